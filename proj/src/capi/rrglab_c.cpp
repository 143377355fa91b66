#include "rrglab.h"

#include <cstring>
#include <exception>
#include <new>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "core/experiments.hpp"
#include "core/graph.hpp"
#include "core/graph_io.hpp"
#include "core/greens.hpp"
#include "core/km.hpp"
#include "core/numerics.hpp"
#include "core/resampling.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error;

rrg_status classify(const std::exception& e) {
  const std::string msg = e.what();
  auto has = [&](const char* needle) {
    return msg.find(needle) != std::string::npos;
  };
  if (has("parity")) return RRG_ERR_PARITY;
  if (has("rejection budget")) return RRG_ERR_REJECTION_BUDGET;
  if (has("no edges outside")) return RRG_ERR_NO_OUTSIDE_EDGES;
  if (has("singular") || has("LAPACK")) return RRG_ERR_SINGULAR;
  if (has("regraph v1") || has("json") || has("parse"))
    return RRG_ERR_PARSE;
  if (has("cannot open") || has("write failed")) return RRG_ERR_IO;
  if (dynamic_cast<const std::invalid_argument*>(&e))
    return RRG_ERR_INVALID_ARGUMENT;
  return RRG_ERR_INTERNAL;
}

template <typename Fn>
rrg_status guarded(Fn&& fn) {
  try {
    fn();
    return RRG_OK;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RRG_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return classify(e);
  } catch (...) {
    g_last_error = "unknown failure";
    return RRG_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(::operator new(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rrg::Statistic statistic_from_name(const std::string& name) {
  if (name == "lambda2") return rrg::Statistic::kLambda2;
  if (name == "triangles") return rrg::Statistic::kTriangleCount;
  if (name == "im_m_i") return rrg::Statistic::kImStieltjesAtI;
  if (name == "constant") return rrg::Statistic::kConstant;
  throw std::invalid_argument("unknown statistic: " + name);
}

rrg::PartnerSampling bias_from_name(const std::string& name) {
  if (name == "uniform") return rrg::PartnerSampling::kUniform;
  if (name == "spectral") return rrg::PartnerSampling::kBiasedSpectral;
  throw std::invalid_argument("unknown bias: " + name);
}

json parse_config(const char* config_json) {
  if (!config_json) throw std::invalid_argument("null config");
  json cfg = json::parse(config_json, nullptr, false);
  if (cfg.is_discarded())
    throw std::invalid_argument("config json parse error");
  return cfg;
}

json woodbury_to_json(const rrg::WoodburyStudy& study) {
  json decay = json::array();
  for (std::size_t k = 0; k < study.median_err.size(); ++k)
    decay.push_back({{"k", k}, {"median_err", study.median_err[k]}});
  return json{{"decay_table", decay},
              {"monotone_fraction", study.monotone_fraction},
              {"median_decay_ratio", study.median_decay_ratio},
              {"p_fallbacks", study.p_fallbacks}};
}

}  // namespace

extern "C" {

struct rrg_graph {
  rrg::RegularGraph g;
};

struct rrg_spectrum {
  rrg::SpectrumRecord rec;
};

struct rrg_gamma_table {
  std::vector<double> gamma;
};

const char* rrg_status_message(rrg_status status) {
  switch (status) {
    case RRG_OK: return "ok";
    case RRG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RRG_ERR_PARITY: return "n*d must be even (parity)";
    case RRG_ERR_REJECTION_BUDGET: return "sampler rejection budget exhausted";
    case RRG_ERR_NO_OUTSIDE_EDGES: return "no edges outside the ball";
    case RRG_ERR_SINGULAR: return "linear algebra breakdown";
    case RRG_ERR_PARSE: return "parse error";
    case RRG_ERR_IO: return "i/o failure";
    case RRG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* rrg_last_error(void) { return g_last_error.c_str(); }

void rrg_free_string(char* text) { ::operator delete(text); }

rrg_status rrg_graph_sample_uniform(int n, int d, uint64_t seed,
                                    int64_t max_attempts, rrg_graph** out) {
  return guarded([&] {
    if (!out) throw std::invalid_argument("null output");
    rrg::Rng rng(seed);
    std::int64_t cap = max_attempts > 0 ? max_attempts : 5000000;
    *out = new rrg_graph{rrg::RegularGraph::sample_uniform(n, d, rng, cap)};
  });
}

rrg_status rrg_graph_from_string(const char* text, rrg_graph** out) {
  return guarded([&] {
    if (!text || !out) throw std::invalid_argument("null argument");
    *out = new rrg_graph{rrg::graph_from_regraph_v1(text)};
  });
}

rrg_status rrg_graph_to_string(const rrg_graph* g, char** out_text) {
  return guarded([&] {
    if (!g || !out_text) throw std::invalid_argument("null argument");
    *out_text = dup_string(rrg::graph_to_regraph_v1(g->g));
  });
}

rrg_status rrg_graph_load(const char* path, rrg_graph** out) {
  return guarded([&] {
    if (!path || !out) throw std::invalid_argument("null argument");
    *out = new rrg_graph{rrg::load_graph(path)};
  });
}

rrg_status rrg_graph_save(const rrg_graph* g, const char* path) {
  return guarded([&] {
    if (!g || !path) throw std::invalid_argument("null argument");
    rrg::save_graph(g->g, path);
  });
}

int rrg_graph_vertex_count(const rrg_graph* g) {
  return g ? g->g.vertex_count() : 0;
}

int rrg_graph_degree(const rrg_graph* g) { return g ? g->g.degree() : 0; }

int rrg_graph_has_edge(const rrg_graph* g, int u, int v) {
  if (!g || u < 0 || v < 0 || u >= g->g.vertex_count() ||
      v >= g->g.vertex_count())
    return 0;
  return g->g.has_edge(u, v) ? 1 : 0;
}

int rrg_graph_distance(const rrg_graph* g, int u, int v) {
  if (!g || u < 0 || v < 0 || u >= g->g.vertex_count() ||
      v >= g->g.vertex_count())
    return -1;
  return rrg::distance(g->g, u, v);
}

void rrg_graph_free(rrg_graph* g) { delete g; }

rrg_status rrg_graph_omega_bar_census(const rrg_graph* g, double c,
                                      int omega_d, int radius_override,
                                      rrg_omega_bar_report* out) {
  return guarded([&] {
    if (!g || !out) throw std::invalid_argument("null argument");
    rrg::OmegaBarReport rep =
        rrg::omega_bar_census(g->g, c, omega_d, radius_override);
    *out = {rep.radius,     rep.excess_cap,
            rep.bad_vertex_count, rep.max_excess,
            rep.bad_vertex_threshold, rep.holds ? 1 : 0};
  });
}

rrg_status rrg_spectrum_compute(const rrg_graph* g, rrg_spectrum** out) {
  return guarded([&] {
    if (!g || !out) throw std::invalid_argument("null argument");
    *out = new rrg_spectrum{rrg::spectrum(g->g)};
  });
}

int rrg_spectrum_size(const rrg_spectrum* s) {
  return s ? static_cast<int>(s->rec.eigenvalues.size()) : 0;
}

const double* rrg_spectrum_values(const rrg_spectrum* s) {
  return s ? s->rec.eigenvalues.data() : nullptr;
}

rrg_status rrg_spectrum_stieltjes(const rrg_spectrum* s, double e, double eta,
                                  double* m_re, double* m_im) {
  return guarded([&] {
    if (!s || !m_re || !m_im) throw std::invalid_argument("null argument");
    rrg::Complex m = rrg::stieltjes_from_eigenvalues(
        s->rec.eigenvalues, rrg::SpectralPoint(e, eta));
    *m_re = m.real();
    *m_im = m.imag();
  });
}

rrg_status rrg_spectrum_esd_vs_km(const rrg_spectrum* s, double* distance) {
  return guarded([&] {
    if (!s || !distance) throw std::invalid_argument("null argument");
    *distance = rrg::esd_vs_km(s->rec);
  });
}

void rrg_spectrum_free(rrg_spectrum* s) { delete s; }

double rrg_rho_d(int d, double x) { return rrg::rho_d(d, x); }

double rrg_km_cdf_from_right(int d, double x) {
  return rrg::km_cdf_from_right(d, x);
}

rrg_status rrg_m_sc(double e, double eta, double* re, double* im) {
  return guarded([&] {
    if (!re || !im) throw std::invalid_argument("null argument");
    rrg::Complex m = rrg::m_sc(rrg::SpectralPoint(e, eta));
    *re = m.real();
    *im = m.imag();
  });
}

rrg_status rrg_m_d(int d, double e, double eta, double* re, double* im) {
  return guarded([&] {
    if (!re || !im) throw std::invalid_argument("null argument");
    rrg::Complex m = rrg::m_d(rrg::SpectralPoint(e, eta), d);
    *re = m.real();
    *im = m.imag();
  });
}

int rrg_in_spectral_domain(int n, double e, double eta, double a, double c) {
  try {
    rrg::LawParams params;
    params.a = a;
    params.c = c;
    return rrg::in_spectral_domain(rrg::SpectralPoint(e, eta), n, params) ? 1
                                                                          : 0;
  } catch (...) {
    return 0;
  }
}

rrg_status rrg_error_params(int d, int n, double e, double eta, double r_frac,
                            double log_power, double* eps_prime, double* eps) {
  return guarded([&] {
    if (!eps_prime || !eps) throw std::invalid_argument("null argument");
    rrg::ErrorParams ep = rrg::error_params(rrg::SpectralPoint(e, eta), d,
                                            r_frac, n, log_power);
    *eps_prime = ep.eps_prime;
    *eps = ep.eps;
  });
}

rrg_status rrg_classical_locations(int n, int d, rrg_gamma_table** out) {
  return guarded([&] {
    if (!out) throw std::invalid_argument("null argument");
    *out = new rrg_gamma_table{rrg::classical_locations(n, d)};
  });
}

int rrg_gamma_count(const rrg_gamma_table* t) {
  return t ? static_cast<int>(t->gamma.size()) : 0;
}

const double* rrg_gamma_values(const rrg_gamma_table* t) {
  return t ? t->gamma.data() : nullptr;
}

void rrg_gamma_free(rrg_gamma_table* t) { delete t; }

rrg_status rrg_greens_eval(const rrg_graph* g, double e, double eta, int ell,
                           double c, rrg_greens_report* out) {
  return guarded([&] {
    if (!g || !out) throw std::invalid_argument("null argument");
    rrg::SpectralPoint z(e, eta);
    rrg::GreensMatrix gm = rrg::greens(g->g, z);
    rrg::WardCheck ward = rrg::ward_check(gm);
    rrg::ScResiduals res = rrg::sc_residuals(g->g, gm, ell, c);
    rrg::Complex msc = rrg::m_sc(z);
    rrg::Complex md = rrg::m_d(z, g->g.degree());
    *out = {e,
            eta,
            gm.m.real(),
            gm.m.imag(),
            msc.real(),
            msc.imag(),
            md.real(),
            md.imag(),
            res.q.real(),
            res.q.imag(),
            res.y_of_q.real(),
            res.y_of_q.imag(),
            res.x_of_q.real(),
            res.x_of_q.imag(),
            std::abs(res.q_minus_y),
            std::abs(res.m_minus_x),
            ward.row_max,
            ward.aggregate,
            res.phi};
  });
}

rrg_status rrg_rigidity_profile(const rrg_spectrum* s,
                                const rrg_gamma_table* gamma, double* r_out,
                                double* max_r, int* argmax_i) {
  return guarded([&] {
    if (!s || !gamma || !r_out) throw std::invalid_argument("null argument");
    rrg::RigidityProfile prof = rrg::rigidity_profile(s->rec, gamma->gamma);
    std::memcpy(r_out, prof.r.data(), prof.r.size() * sizeof(double));
    if (max_r) *max_r = prof.max_r;
    if (argmax_i) *argmax_i = prof.argmax_i;
  });
}

void rrg_edge_window_params(int n, double* kappa, double* eta) {
  const double dn = static_cast<double>(n);
  double k = std::pow(dn, -2.0 / 3.0 + 0.2);
  if (kappa) *kappa = k;
  if (eta) *eta = std::pow(dn, 0.15) / (dn * std::sqrt(k));
}

double rrg_stieltjes_envelope(int n, double e, double eta) {
  return rrg::stieltjes_envelope(n, rrg::SpectralPoint(e, eta));
}

rrg_status rrg_fit_slope(const double* x, const double* y, int count,
                         double* slope, double* stderr_out) {
  return guarded([&] {
    if (!x || !y || !slope) throw std::invalid_argument("null argument");
    if (count < 3) throw std::invalid_argument("fit: insufficient sizes");
    rrg::LinearFit fit = rrg::fit_line(std::vector<double>(x, x + count),
                                       std::vector<double>(y, y + count));
    *slope = fit.slope;
    if (stderr_out) *stderr_out = fit.slope_stderr;
  });
}

uint64_t rrg_derive_stream(uint64_t seed, uint64_t index) {
  return rrg::derive_stream(seed, index);
}

rrg_status rrg_resample_run(const char* config_json, char** out_json) {
  return guarded([&] {
    if (!out_json) throw std::invalid_argument("null output");
    json cfg = parse_config(config_json);
    rrg::ResampleStudyParams params;
    params.n = cfg.at("n").get<int>();
    params.d = cfg.at("d").get<int>();
    params.ell = cfg.value("ell", params.ell);
    params.trials = cfg.value("trials", params.trials);
    params.seed = cfg.value("seed", static_cast<std::uint64_t>(params.seed));
    params.threads = cfg.value("threads", params.threads);
    params.big_r = cfg.value("big_r", params.big_r);
    params.statistic =
        statistic_from_name(cfg.value("statistic", std::string("lambda2")));
    params.bias = bias_from_name(cfg.value("bias", std::string("uniform")));
    params.woodbury_trials =
        cfg.value("woodbury_trials", params.woodbury_trials);
    params.woodbury_k = cfg.value("woodbury_k", params.woodbury_k);
    params.woodbury_z = rrg::SpectralPoint(cfg.value("woodbury_e", 0.2),
                                           cfg.value("woodbury_eta", 0.6));
    rrg::ResampleStudy study = rrg::run_resample_study(params);
    json rep{{"config", cfg},
             {"mean_mu", study.mean_mu},
             {"admissible_rate", study.admissible_rate},
             {"applied_rate", study.applied_rate},
             {"collision_total", study.collision_total},
             {"reversibility_rate", study.reversibility_rate},
             {"exchangeability",
              {{"trials", study.exchangeability.trials},
               {"nonzero_diffs", study.exchangeability.nonzero_diffs},
               {"positives", study.exchangeability.positives},
               {"sign_p", study.exchangeability.sign_p},
               {"rank_p", study.exchangeability.rank_p},
               {"mean_diff", study.exchangeability.mean_diff},
               {"mean_applied", study.exchangeability.mean_applied}}}};
    if (params.woodbury_trials > 0)
      rep["woodbury"] = woodbury_to_json(study.woodbury);
    *out_json = dup_string(rep.dump(2));
  });
}

rrg_status rrg_woodbury_run(const char* config_json, char** out_json) {
  return guarded([&] {
    if (!out_json) throw std::invalid_argument("null output");
    json cfg = parse_config(config_json);
    rrg::WoodburyStudyParams params;
    params.n = cfg.at("n").get<int>();
    params.d = cfg.at("d").get<int>();
    params.ell = cfg.value("ell", params.ell);
    params.trials = cfg.value("trials", params.trials);
    params.seed = cfg.value("seed", static_cast<std::uint64_t>(params.seed));
    params.threads = cfg.value("threads", params.threads);
    params.big_r = cfg.value("big_r", params.big_r);
    params.k_max = cfg.value("k_max", params.k_max);
    params.z =
        rrg::SpectralPoint(cfg.value("e", 0.2), cfg.value("eta", 0.6));
    rrg::WoodburyStudy study = rrg::run_woodbury_study(params);
    json rep = woodbury_to_json(study);
    rep["config"] = cfg;
    *out_json = dup_string(rep.dump(2));
  });
}

rrg_status rrg_moments_run(const char* config_json, char** out_json) {
  return guarded([&] {
    if (!out_json) throw std::invalid_argument("null output");
    json cfg = parse_config(config_json);
    std::vector<int> sizes;
    if (cfg.contains("sizes"))
      sizes = cfg.at("sizes").get<std::vector<int>>();
    else
      sizes.push_back(cfg.at("n").get<int>());
    const int d = cfg.at("d").get<int>();
    const int ell = cfg.value("ell", 3);
    const int p = cfg.value("p", 1);
    const int samples = cfg.value("samples", 100);
    const std::uint64_t seed = cfg.value("seed", 1ULL);
    const int threads = cfg.value("threads", 1);
    rrg::SpectralPoint z(cfg.value("e", 0.3), cfg.value("eta", 0.05));
    json rows = json::array();
    for (int n : sizes) {
      rrg::MomentReport rep =
          rrg::sc_moment_estimate(n, d, ell, z, p, samples, seed, threads);
      rows.push_back({{"n", n},
                      {"samples", rep.samples},
                      {"p", rep.p},
                      {"moment_qy", rep.moment_qy},
                      {"comparator", rep.comparator},
                      {"ratio", rep.ratio}});
    }
    json rep{{"config", cfg}, {"results", rows}};
    if (sizes.size() >= 3) {
      std::vector<double> lx, ly;
      for (const auto& row : rows) {
        lx.push_back(std::log(row.at("n").get<double>()));
        ly.push_back(std::log(row.at("ratio").get<double>()));
      }
      rrg::LinearFit fit = rrg::fit_line(lx, ly);
      rep["log_ratio_slope"] = fit.slope;
      rep["log_ratio_slope_stderr"] = fit.slope_stderr;
    }
    *out_json = dup_string(rep.dump(2));
  });
}

rrg_status rrg_edge_window_run(const char* config_json, char** out_json) {
  return guarded([&] {
    if (!out_json) throw std::invalid_argument("null output");
    json cfg = parse_config(config_json);
    rrg::EdgeWindowResult res = rrg::edge_window_exclusion(
        cfg.at("n").get<int>(), cfg.at("d").get<int>(),
        cfg.value("samples", 200), cfg.value("seed", 1ULL),
        cfg.value("threads", 1));
    json rep{{"config", cfg},
             {"n", res.n},
             {"samples", res.samples},
             {"kappa", res.kappa},
             {"eta", res.eta},
             {"window_lo", 2.0 + res.kappa - res.eta},
             {"window_hi", 2.0 + res.kappa + res.eta},
             {"hits", res.hits},
             {"clear_fraction",
              1.0 - static_cast<double>(res.hits) / res.samples}};
    *out_json = dup_string(rep.dump(2));
  });
}

}  // extern "C"
