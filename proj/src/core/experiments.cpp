#include "core/experiments.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "core/numerics.hpp"
#include "core/stats.hpp"

namespace rrg {

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

SpectrumRecord spectrum(const RegularGraph& g, std::uint64_t seed) {
  SpectrumRecord rec;
  rec.n = g.vertex_count();
  rec.d = g.degree();
  rec.seed = seed;
  rec.eigenvalues = spectrum_descending(g);
  const double perron =
      g.degree() / std::sqrt(static_cast<double>(g.degree() - 1));
  if (std::abs(rec.eigenvalues.front() - perron) > 1e-9)
    throw std::runtime_error("spectrum: lambda_1 deviates from d/sqrt(d-1)");
  return rec;
}

RigidityProfile rigidity_profile(const SpectrumRecord& rec,
                                 const std::vector<double>& gamma) {
  const int n = rec.n;
  if (static_cast<int>(gamma.size()) != n - 1)
    throw std::invalid_argument("rigidity_profile: gamma size mismatch");
  RigidityProfile prof;
  prof.r.resize(n - 1);
  const double n23 = std::pow(static_cast<double>(n), 2.0 / 3.0);
  for (int i = 2; i <= n; ++i) {
    double weight = std::cbrt(static_cast<double>(std::min(i, n - i + 1)));
    double r = std::abs(rec.eigenvalues[i - 1] - gamma[i - 2]) * n23 * weight;
    prof.r[i - 2] = r;
    if (r > prof.max_r) {
      prof.max_r = r;
      prof.argmax_i = i;
    }
  }
  return prof;
}

EdgeScanResult edge_fluctuation_scan(const std::vector<int>& sizes,
                                     int samples_per_size, int d,
                                     std::uint64_t seed, int threads) {
  if (sizes.size() < 3)
    throw std::invalid_argument("edge_fluctuation_scan: insufficient sizes");
  if (!std::is_sorted(sizes.begin(), sizes.end()))
    throw std::invalid_argument("edge_fluctuation_scan: sizes must ascend");
  EdgeScanResult out;
  out.rows.resize(sizes.size() * samples_per_size);
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const int n = sizes[si];
    parallel_for(samples_per_size, threads, [&, si, n](int k) {
      std::uint64_t stream = derive_stream(
          seed, (static_cast<std::uint64_t>(si) << 32) | static_cast<std::uint64_t>(k));
      Rng rng(stream);
      RegularGraph g = RegularGraph::sample_uniform(n, d, rng);
      SpectrumRecord rec = spectrum(g, stream);
      out.rows[si * samples_per_size + k] = {
          n, d, stream, rec.eigenvalues[1], rec.eigenvalues.back()};
    });
  }
  auto fit_of = [&](bool top_edge) {
    ScalingFit fit;
    std::vector<double> lx, ly;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
      std::vector<double> stat;
      stat.reserve(samples_per_size);
      for (int k = 0; k < samples_per_size; ++k) {
        const EdgeScanRow& row = out.rows[si * samples_per_size + k];
        stat.push_back(top_edge ? row.lambda2 - 2.0
                                : std::abs(row.lambda_n) - 2.0);
      }
      fit.sizes.push_back(sizes[si]);
      fit.means.push_back(mean(stat));
      fit.stds.push_back(sample_stddev(stat));
      lx.push_back(std::log(static_cast<double>(sizes[si])));
      ly.push_back(std::log(fit.stds.back()));
    }
    LinearFit lf = fit_line(lx, ly);
    fit.loglog_slope = lf.slope;
    fit.slope_stderr = lf.slope_stderr;
    return fit;
  };
  out.fit_lambda2 = fit_of(true);
  out.fit_lambda_n = fit_of(false);
  return out;
}

double stieltjes_envelope(int n, SpectralPoint z) {
  const double dn = static_cast<double>(n);
  if (std::abs(z.e) <= 2.0) return 1.0 / (dn * z.eta);
  const double k = z.kappa();
  return (1.0 / std::sqrt(k + z.eta)) *
         (1.0 / (dn * std::sqrt(z.eta)) + 1.0 / ((dn * z.eta) * (dn * z.eta)));
}

std::vector<StieltjesPoint> stieltjes_concentration_scan(
    int n, int d, const std::vector<SpectralPoint>& z_grid, int samples,
    std::uint64_t seed, int threads) {
  std::vector<std::vector<double>> devs(z_grid.size(),
                                        std::vector<double>(samples));
  parallel_for(samples, threads, [&](int k) {
    std::uint64_t stream = derive_stream(seed, static_cast<std::uint64_t>(k));
    Rng rng(stream);
    RegularGraph g = RegularGraph::sample_uniform(n, d, rng);
    SpectrumRecord rec = spectrum(g, stream);
    for (std::size_t zi = 0; zi < z_grid.size(); ++zi) {
      Complex m = stieltjes_from_eigenvalues(rec.eigenvalues, z_grid[zi]);
      devs[zi][k] = std::abs(m - m_d(z_grid[zi], d));
    }
  });
  std::vector<StieltjesPoint> out(z_grid.size());
  for (std::size_t zi = 0; zi < z_grid.size(); ++zi) {
    out[zi].z = z_grid[zi];
    out[zi].abs_dev = devs[zi];
    out[zi].quantile90 = quantile(devs[zi], 0.9);
    out[zi].envelope = stieltjes_envelope(n, z_grid[zi]);
    out[zi].ratio = out[zi].quantile90 / out[zi].envelope;
  }
  return out;
}

EdgeWindowResult edge_window_exclusion(int n, int d, int samples,
                                       std::uint64_t seed, int threads) {
  EdgeWindowResult out;
  out.n = n;
  out.samples = samples;
  const double dn = static_cast<double>(n);
  out.kappa = std::pow(dn, -2.0 / 3.0 + 0.2);
  out.eta = std::pow(dn, 0.15) / (dn * std::sqrt(out.kappa));
  const double lo = 2.0 + out.kappa - out.eta;
  const double hi = 2.0 + out.kappa + out.eta;
  std::vector<char> hit(samples, 0);
  parallel_for(samples, threads, [&](int k) {
    std::uint64_t stream = derive_stream(seed, static_cast<std::uint64_t>(k));
    Rng rng(stream);
    RegularGraph g = RegularGraph::sample_uniform(n, d, rng);
    SpectrumRecord rec = spectrum(g, stream);
    for (double lambda : rec.eigenvalues)
      if (lambda >= lo && lambda <= hi) {
        hit[k] = 1;
        break;
      }
  });
  for (char h : hit) out.hits += h;
  return out;
}

MomentReport sc_moment_estimate(int n, int d, int ell, SpectralPoint z, int p,
                                int samples, std::uint64_t seed, int threads,
                                const RegularGraph* fixed_graph) {
  if (p < 1 || p > 2)
    throw std::invalid_argument("sc_moment_estimate: p must be 1 or 2");
  MomentReport rep;
  rep.n = n;
  rep.samples = samples;
  rep.p = p;
  std::vector<double> lhs(samples), rhs(samples);
  parallel_for(samples, threads, [&](int k) {
    std::uint64_t stream = derive_stream(seed, static_cast<std::uint64_t>(k));
    Rng rng(stream);
    RegularGraph g = fixed_graph
                         ? *fixed_graph
                         : RegularGraph::sample_uniform(n, d, rng);
    Eigensystem es = eigh(normalized_adjacency(g), true);
    Complex m;
    Complex q = q_of(es, g, z, &m);
    Complex y = y_ell(q, z, ell);
    Complex yp = y_ell_derivative(q, z, ell);
    Complex msc = m_sc(z);
    const double n_eta = static_cast<double>(n) * z.eta;
    double im_m = m.imag();
    double comparand =
        (im_m + std::sqrt(std::abs(1.0 - yp) * im_m)) / n_eta +
        std::norm(q - msc);
    lhs[k] = std::pow(std::abs(q - y), 2 * p);
    rhs[k] = std::pow(comparand, 2 * p);
  });
  rep.moment_qy = mean(lhs);
  rep.comparator = mean(rhs);
  rep.ratio = rep.moment_qy / rep.comparator;
  return rep;
}

double esd_vs_km(const SpectrumRecord& rec) {
  std::vector<double> bulk(rec.eigenvalues.begin() + 1, rec.eigenvalues.end());
  const int d = rec.d;
  return ks_distance(std::move(bulk), [d](double x) {
    return 1.0 - km_cdf_from_right(d, x, 1e-10);
  });
}

}  // namespace rrg
