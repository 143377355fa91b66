// Batch laboratory CLI over the rrglab C API: graph sampling, spectra,
// classical locations, Green's-function diagnostics, rigidity and
// concentration scans, local-resampling studies, and report aggregation.
//
// Exit codes: 0 success, 1 validation error, 2 runtime failure.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rrglab.h"

using nlohmann::json;

namespace {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(rrg_status status, const std::string& context) {
  if (status == RRG_OK) return;
  std::string msg = context + ": " + rrg_status_message(status);
  const char* detail = rrg_last_error();
  if (detail && *detail) msg += std::string(" (") + detail + ")";
  switch (status) {
    case RRG_ERR_INVALID_ARGUMENT:
    case RRG_ERR_PARITY:
    case RRG_ERR_PARSE:
    case RRG_ERR_NO_OUTSIDE_EDGES:
      throw ValidationError(msg);
    default:
      throw std::runtime_error(msg);
  }
}

// Full round-trip decimal formatting.
std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt(std::uint64_t x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%" PRIu64, x);
  return buf;
}

void atomic_write(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

void emit(const std::string& out_path, const std::string& contents) {
  if (out_path.empty() || out_path == "-") {
    std::fputs(contents.c_str(), stdout);
  } else {
    atomic_write(out_path, contents);
  }
}

// Provenance header: the subcommand plus every option that shaped the output.
std::string config_header(const std::string& sub,
                          const std::vector<std::pair<std::string, std::string>>&
                              entries) {
  std::string line = "# rrglab " + sub;
  for (const auto& [k, v] : entries) line += " " + k + "=" + v;
  line += "\n";
  return line;
}

json config_json(const std::string& sub,
                 const std::vector<std::pair<std::string, std::string>>&
                     entries) {
  json cfg{{"subcommand", sub}};
  for (const auto& [k, v] : entries) cfg[k] = v;
  return cfg;
}

// Ordered sample-parallel map: results land by index, so output bytes do not
// depend on scheduling.
void pool_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::mutex error_mutex;
  std::exception_ptr error;
  std::atomic<int> next{0};
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

struct GraphHandle {
  rrg_graph* g = nullptr;
  ~GraphHandle() { rrg_graph_free(g); }
};

struct SpectrumHandle {
  rrg_spectrum* s = nullptr;
  ~SpectrumHandle() { rrg_spectrum_free(s); }
};

struct GammaHandle {
  rrg_gamma_table* t = nullptr;
  ~GammaHandle() { rrg_gamma_free(t); }
};

struct JsonString {
  char* text = nullptr;
  ~JsonString() { rrg_free_string(text); }
};

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) sizes.push_back(std::stoi(item));
  }
  if (sizes.empty()) throw ValidationError("no sizes given");
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1])
      throw ValidationError("sizes must be strictly ascending");
  return sizes;
}

struct ZPoint {
  double e = 0.0;
  double eta = 0.0;
};

ZPoint parse_z(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos)
    throw ValidationError("z must be given as E,eta");
  ZPoint z;
  z.e = std::stod(text.substr(0, comma));
  z.eta = std::stod(text.substr(comma + 1));
  if (!(z.eta > 0)) throw ValidationError("z needs eta > 0");
  return z;
}

double vec_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

double vec_stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double vec_quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  double pos = q * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  double frac = pos - static_cast<double>(lo);
  return v[lo] * (1 - frac) + v[lo + 1] * frac;
}

/* ------------------------------------------------------------------ */

struct CommonOpts {
  std::string out;
  std::string format = "csv";
  int threads = 2;
  std::uint64_t seed = 1;
};

int cmd_sample(int n, int d, std::uint64_t seed, std::int64_t max_attempts,
               const std::string& out) {
  GraphHandle g;
  check(rrg_graph_sample_uniform(n, d, seed, max_attempts, &g.g), "sample");
  if (out.empty() || out == "-") {
    char* text = nullptr;
    check(rrg_graph_to_string(g.g, &text), "serialize");
    std::fputs(text, stdout);
    rrg_free_string(text);
  } else {
    check(rrg_graph_save(g.g, out.c_str()), "save");
  }
  std::fprintf(stderr, "sampled n=%d d=%d seed=%s -> %s\n", n, d,
               fmt(seed).c_str(), out.empty() ? "-" : out.c_str());
  return 0;
}

GraphHandle obtain_graph(const std::string& in_path, int n, int d,
                         std::uint64_t seed) {
  GraphHandle g;
  if (!in_path.empty()) {
    check(rrg_graph_load(in_path.c_str(), &g.g), "load");
  } else {
    check(rrg_graph_sample_uniform(n, d, seed, 0, &g.g), "sample");
  }
  return g;
}

int cmd_spectrum(const std::string& in_path, int n, int d, std::uint64_t seed,
                 const CommonOpts& opts) {
  GraphHandle g = obtain_graph(in_path, n, d, seed);
  SpectrumHandle sp;
  check(rrg_spectrum_compute(g.g, &sp.s), "spectrum");
  const int count = rrg_spectrum_size(sp.s);
  const double* vals = rrg_spectrum_values(sp.s);
  auto entries = std::vector<std::pair<std::string, std::string>>{
      {"n", std::to_string(rrg_graph_vertex_count(g.g))},
      {"d", std::to_string(rrg_graph_degree(g.g))},
      {"seed", fmt(seed)},
      {"in", in_path.empty() ? "-" : in_path}};
  if (opts.format == "json") {
    json out{{"config", config_json("spectrum", entries)}};
    out["eigenvalues"] = std::vector<double>(vals, vals + count);
    emit(opts.out, out.dump(2) + "\n");
  } else {
    std::string csv = config_header("spectrum", entries) + "i,lambda_i\n";
    for (int i = 0; i < count; ++i)
      csv += std::to_string(i + 1) + "," + fmt(vals[i]) + "\n";
    emit(opts.out, csv);
  }
  std::fprintf(stderr, "spectrum n=%d lambda_1=%s lambda_2=%s\n", count,
               fmt(vals[0]).c_str(), fmt(vals[1]).c_str());
  return 0;
}

int cmd_gamma(int n, int d, const CommonOpts& opts) {
  GammaHandle gam;
  check(rrg_classical_locations(n, d, &gam.t), "gamma");
  const int count = rrg_gamma_count(gam.t);
  const double* vals = rrg_gamma_values(gam.t);
  auto entries = std::vector<std::pair<std::string, std::string>>{
      {"n", std::to_string(n)}, {"d", std::to_string(d)}};
  if (opts.format == "json") {
    json out{{"config", config_json("gamma", entries)}};
    out["gamma"] = std::vector<double>(vals, vals + count);
    emit(opts.out, out.dump(2) + "\n");
  } else {
    std::string csv = config_header("gamma", entries) + "i,gamma_i\n";
    for (int i = 0; i < count; ++i)
      csv += std::to_string(i + 2) + "," + fmt(vals[i]) + "\n";
    emit(opts.out, csv);
  }
  std::fprintf(stderr, "gamma n=%d d=%d rows=%d\n", n, d, count);
  return 0;
}

int cmd_greens(const std::string& in_path, int n, int d, std::uint64_t seed,
               const std::vector<std::string>& z_texts, int ell, double c,
               const CommonOpts& opts) {
  GraphHandle g = obtain_graph(in_path, n, d, seed);
  json points = json::array();
  for (const std::string& zt : z_texts) {
    ZPoint z = parse_z(zt);
    rrg_greens_report rep;
    check(rrg_greens_eval(g.g, z.e, z.eta, ell, c, &rep), "greens");
    points.push_back(
        {{"z", {{"e", rep.e}, {"eta", rep.eta}}},
         {"m", {rep.m_re, rep.m_im}},
         {"m_sc", {rep.m_sc_re, rep.m_sc_im}},
         {"m_d", {rep.m_d_re, rep.m_d_im}},
         {"q", {rep.q_re, rep.q_im}},
         {"y_of_q", {rep.y_of_q_re, rep.y_of_q_im}},
         {"x_of_q", {rep.x_of_q_re, rep.x_of_q_im}},
         {"ward_dev",
          {{"row_max", rep.ward_row_max}, {"aggregate", rep.ward_aggregate}}},
         {"residuals",
          {{"q_minus_y_abs", rep.q_minus_y_abs},
           {"m_minus_x_abs", rep.m_minus_x_abs},
           {"phi", rep.phi}}}});
  }
  auto entries = std::vector<std::pair<std::string, std::string>>{
      {"n", std::to_string(rrg_graph_vertex_count(g.g))},
      {"d", std::to_string(rrg_graph_degree(g.g))},
      {"seed", fmt(seed)},
      {"ell", std::to_string(ell)},
      {"c", fmt(c)}};
  json out{{"config", config_json("greens", entries)}};
  out["points"] = points;
  emit(opts.out, out.dump(2) + "\n");
  std::fprintf(stderr, "greens evaluated %zu point(s)\n", z_texts.size());
  return 0;
}

int cmd_rigidity(const std::vector<int>& sizes, int samples, int d,
                 const CommonOpts& opts) {
  std::string csv = config_header(
      "rigidity", {{"sizes", [&] {
                      std::string s;
                      for (int n : sizes)
                        s += (s.empty() ? "" : "+") + std::to_string(n);
                      return s;
                    }()},
                   {"samples", std::to_string(samples)},
                   {"d", std::to_string(d)},
                   {"seed", fmt(opts.seed)}});
  csv += "n,d,seed,i,lambda_i,gamma_i,r_i\n";
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const int n = sizes[si];
    GammaHandle gam;
    check(rrg_classical_locations(n, d, &gam.t), "gamma");
    const double* gvals = rrg_gamma_values(gam.t);
    std::vector<std::string> blocks(samples);
    pool_for(samples, opts.threads, [&, n](int k) {
      std::uint64_t stream = rrg_derive_stream(
          opts.seed, (static_cast<std::uint64_t>(si) << 32) |
                         static_cast<std::uint64_t>(k));
      GraphHandle g;
      check(rrg_graph_sample_uniform(n, d, stream, 0, &g.g), "sample");
      SpectrumHandle sp;
      check(rrg_spectrum_compute(g.g, &sp.s), "spectrum");
      std::vector<double> r(n - 1);
      double max_r = 0;
      int argmax = 2;
      check(rrg_rigidity_profile(sp.s, gam.t, r.data(), &max_r, &argmax),
            "rigidity");
      const double* vals = rrg_spectrum_values(sp.s);
      std::string block;
      const std::string prefix = std::to_string(n) + "," + std::to_string(d) +
                                 "," + fmt(stream) + ",";
      for (int i = 2; i <= n; ++i) {
        block += prefix + std::to_string(i) + "," + fmt(vals[i - 1]) + "," +
                 fmt(gvals[i - 2]) + "," + fmt(r[i - 2]) + "\n";
      }
      blocks[k] = std::move(block);
    });
    for (auto& b : blocks) csv += b;
  }
  emit(opts.out, csv);
  std::fprintf(stderr, "rigidity: %zu size(s) x %d sample(s)\n", sizes.size(),
               samples);
  return 0;
}

int cmd_edge_scan(const std::vector<int>& sizes, int samples, int d,
                  const CommonOpts& opts) {
  std::string csv = config_header(
      "edge-scan", {{"sizes", [&] {
                       std::string s;
                       for (int n : sizes)
                         s += (s.empty() ? "" : "+") + std::to_string(n);
                       return s;
                     }()},
                    {"samples", std::to_string(samples)},
                    {"d", std::to_string(d)},
                    {"seed", fmt(opts.seed)}});
  csv += "n,d,seed,lambda2,lambdaN\n";
  std::vector<double> log_n, log_std;
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const int n = sizes[si];
    std::vector<double> l2(samples), ln(samples);
    std::vector<std::string> rows(samples);
    pool_for(samples, opts.threads, [&, n](int k) {
      std::uint64_t stream = rrg_derive_stream(
          opts.seed, (static_cast<std::uint64_t>(si) << 32) |
                         static_cast<std::uint64_t>(k));
      GraphHandle g;
      check(rrg_graph_sample_uniform(n, d, stream, 0, &g.g), "sample");
      SpectrumHandle sp;
      check(rrg_spectrum_compute(g.g, &sp.s), "spectrum");
      const double* vals = rrg_spectrum_values(sp.s);
      l2[k] = vals[1];
      ln[k] = vals[n - 1];
      rows[k] = std::to_string(n) + "," + std::to_string(d) + "," +
                fmt(stream) + "," + fmt(vals[1]) + "," + fmt(vals[n - 1]) +
                "\n";
    });
    for (auto& r : rows) csv += r;
    for (double& x : l2) x -= 2.0;
    log_n.push_back(std::log(static_cast<double>(n)));
    log_std.push_back(std::log(vec_stddev(l2)));
  }
  emit(opts.out, csv);
  if (sizes.size() >= 3) {
    double slope = 0, err = 0;
    check(rrg_fit_slope(log_n.data(), log_std.data(),
                        static_cast<int>(log_n.size()), &slope, &err),
          "fit");
    std::fprintf(stderr, "edge-scan: slope(log std(lambda2-2)) = %s +- %s\n",
                 fmt(slope).c_str(), fmt(err).c_str());
  } else {
    std::fprintf(stderr, "edge-scan: done (no fit, need >= 3 sizes)\n");
  }
  return 0;
}

int cmd_stieltjes_scan(int n, int d, const std::vector<std::string>& z_texts,
                       int samples, const CommonOpts& opts) {
  std::vector<ZPoint> zs;
  for (const auto& zt : z_texts) zs.push_back(parse_z(zt));
  if (zs.empty()) throw ValidationError("need at least one --z E,eta");
  std::string csv = config_header(
      "stieltjes-scan", {{"n", std::to_string(n)},
                         {"d", std::to_string(d)},
                         {"samples", std::to_string(samples)},
                         {"seed", fmt(opts.seed)}});
  csv += "n,d,seed,E,eta,abs_m_minus_md\n";
  std::vector<std::string> rows(samples);
  pool_for(samples, opts.threads, [&](int k) {
    std::uint64_t stream =
        rrg_derive_stream(opts.seed, static_cast<std::uint64_t>(k));
    GraphHandle g;
    check(rrg_graph_sample_uniform(n, d, stream, 0, &g.g), "sample");
    SpectrumHandle sp;
    check(rrg_spectrum_compute(g.g, &sp.s), "spectrum");
    std::string block;
    for (const ZPoint& z : zs) {
      double mr = 0, mi = 0, dr = 0, di = 0;
      check(rrg_spectrum_stieltjes(sp.s, z.e, z.eta, &mr, &mi), "stieltjes");
      check(rrg_m_d(d, z.e, z.eta, &dr, &di), "m_d");
      double dev = std::hypot(mr - dr, mi - di);
      block += std::to_string(n) + "," + std::to_string(d) + "," +
               fmt(stream) + "," + fmt(z.e) + "," + fmt(z.eta) + "," +
               fmt(dev) + "\n";
    }
    rows[k] = std::move(block);
  });
  for (auto& r : rows) csv += r;
  emit(opts.out, csv);
  std::fprintf(stderr, "stieltjes-scan: %d sample(s) x %zu z-point(s)\n",
               samples, zs.size());
  return 0;
}

int cmd_edge_window(int n, int d, int samples, const CommonOpts& opts) {
  json cfg{{"n", n},
           {"d", d},
           {"samples", samples},
           {"seed", opts.seed},
           {"threads", opts.threads}};
  JsonString out;
  check(rrg_edge_window_run(cfg.dump().c_str(), &out.text), "edge-window");
  emit(opts.out, std::string(out.text) + "\n");
  std::fprintf(stderr, "edge-window: done\n");
  return 0;
}

int run_json_tool(const char* name,
                  rrg_status (*fn)(const char*, char**), const json& cfg,
                  const std::string& out_path) {
  JsonString out;
  check(fn(cfg.dump().c_str(), &out.text), name);
  emit(out_path, std::string(out.text) + "\n");
  std::fprintf(stderr, "%s: done\n", name);
  return 0;
}

/* ---------------------------- report ------------------------------ */

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  CsvTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) fields.push_back(item);
    if (!header_seen) {
      table.columns = fields;
      header_seen = true;
    } else {
      table.rows.push_back(fields);
    }
  }
  return table;
}

int column_of(const CsvTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return static_cast<int>(i);
  throw ValidationError("schema mismatch: missing column " + name);
}

struct ReportBands {
  double rigidity_exponent_max = 0.15;
  double rigidity_stderr_max = 0.1;
  double edge_slope_lo = -0.80;
  double edge_slope_hi = -0.55;
  double stieltjes_ratio_max = 3.0;
};

int cmd_report(const std::string& rigidity_path, const std::string& edge_path,
               const std::string& stieltjes_path, const std::string& plot_dir,
               const CommonOpts& opts) {
  const ReportBands bands;
  json checks = json::array();
  std::vector<std::pair<std::string, std::string>> plots;

  if (!rigidity_path.empty()) {
    CsvTable t = read_csv(rigidity_path);
    if (t.rows.empty()) {
      checks.push_back({{"id", "criterion-7"}, {"status", "empty"}});
    } else {
      int cn = column_of(t, "n"), cseed = column_of(t, "seed"),
          cr = column_of(t, "r_i");
      std::map<std::pair<long, std::string>, double> max_r;
      for (const auto& row : t.rows) {
        auto key = std::make_pair(std::stol(row[cn]), row[cseed]);
        double r = std::stod(row[cr]);
        auto [it, fresh] = max_r.try_emplace(key, r);
        if (!fresh && r > it->second) it->second = r;
      }
      std::map<long, std::vector<double>> per_n;
      for (const auto& [key, r] : max_r) per_n[key.first].push_back(r);
      std::vector<double> log_n, log_med;
      bool degenerate = false;
      std::string dat;
      json medians = json::object();
      for (auto& [n, v] : per_n) {
        double med = vec_median(v);
        medians[std::to_string(n)] = med;
        if (med <= 0.0) degenerate = true;  // e.g. the lambda := gamma self-test
        log_n.push_back(std::log(static_cast<double>(n)));
        log_med.push_back(med > 0.0 ? std::log(med) : 0.0);
        dat += std::to_string(n) + " " + fmt(med) + "\n";
      }
      plots.emplace_back("rigidity_median_max_r.dat", dat);
      json entry{{"id", "criterion-7"},
                 {"what", "growth exponent of median max_i r_i vs N"},
                 {"median_max_r", medians}};
      if (degenerate) {
        entry["status"] = "zero profiles; no exponent fit";
        checks.push_back(entry);
      } else if (log_n.size() >= 3) {
        double slope = 0, err = 0;
        check(rrg_fit_slope(log_n.data(), log_med.data(),
                            static_cast<int>(log_n.size()), &slope, &err),
              "fit");
        entry["exponent"] = slope;
        entry["stderr"] = err;
        entry["pass"] = slope < bands.rigidity_exponent_max &&
                        err < bands.rigidity_stderr_max;
        checks.push_back(entry);
      } else {
        entry["status"] = "need >= 3 sizes for the exponent fit";
        checks.push_back(entry);
      }
    }
  }

  if (!edge_path.empty()) {
    CsvTable t = read_csv(edge_path);
    if (t.rows.empty()) {
      checks.push_back({{"id", "criterion-8"}, {"status", "empty"}});
    } else {
      int cn = column_of(t, "n"), c2 = column_of(t, "lambda2");
      std::map<long, std::vector<double>> per_n;
      for (const auto& row : t.rows)
        per_n[std::stol(row[cn])].push_back(std::stod(row[c2]) - 2.0);
      std::vector<double> log_n, log_std;
      std::string dat;
      for (auto& [n, v] : per_n) {
        double sd = vec_stddev(v);
        log_n.push_back(std::log(static_cast<double>(n)));
        log_std.push_back(std::log(sd));
        dat += std::to_string(n) + " " + fmt(sd) + "\n";
      }
      plots.emplace_back("edge_std_lambda2.dat", dat);
      json entry{{"id", "criterion-8"},
                 {"what", "log-log slope of std(lambda2 - 2) vs N"}};
      if (log_n.size() >= 3) {
        double slope = 0, err = 0;
        check(rrg_fit_slope(log_n.data(), log_std.data(),
                            static_cast<int>(log_n.size()), &slope, &err),
              "fit");
        entry["slope"] = slope;
        entry["stderr"] = err;
        entry["pass"] =
            slope >= bands.edge_slope_lo && slope <= bands.edge_slope_hi;
      } else {
        entry["status"] = "need >= 3 sizes for the slope fit";
      }
      checks.push_back(entry);
    }
  }

  if (!stieltjes_path.empty()) {
    CsvTable t = read_csv(stieltjes_path);
    if (t.rows.empty()) {
      checks.push_back({{"id", "criterion-9"}, {"status", "empty"}});
    } else {
      int cn = column_of(t, "n"), ce = column_of(t, "E"),
          ceta = column_of(t, "eta"), cdev = column_of(t, "abs_m_minus_md");
      std::map<std::tuple<std::string, std::string, long>, std::vector<double>>
          cells;
      for (const auto& row : t.rows)
        cells[{row[ce], row[ceta], std::stol(row[cn])}].push_back(
            std::stod(row[cdev]));
      // Normalized 0.9-quantile per z across sizes; stability = max/min.
      std::map<std::pair<std::string, std::string>,
               std::vector<std::pair<long, double>>>
          by_z;
      for (auto& [key, devs] : cells) {
        const auto& [e_text, eta_text, n] = key;
        double q90 = vec_quantile(devs, 0.9);
        double env = rrg_stieltjes_envelope(static_cast<int>(n),
                                            std::stod(e_text),
                                            std::stod(eta_text));
        by_z[{e_text, eta_text}].push_back({n, q90 / env});
      }
      json per_z = json::array();
      bool all_pass = true;
      std::string dat;
      for (auto& [zkey, entries] : by_z) {
        double lo = entries.front().second, hi = entries.front().second;
        for (auto& [n, ratio] : entries) {
          lo = std::min(lo, ratio);
          hi = std::max(hi, ratio);
          dat += std::to_string(n) + " " + fmt(ratio) + "\n";
        }
        bool pass = entries.size() < 2 || hi / lo < bands.stieltjes_ratio_max;
        all_pass = all_pass && pass;
        per_z.push_back({{"E", zkey.first},
                         {"eta", zkey.second},
                         {"ratio_spread", entries.size() < 2 ? 1.0 : hi / lo},
                         {"pass", pass}});
      }
      plots.emplace_back("stieltjes_normalized_q90.dat", dat);
      checks.push_back({{"id", "criterion-9"},
                        {"what", "stability of (0.9-quantile |m-m_d|)/envelope"},
                        {"per_z", per_z},
                        {"pass", all_pass}});
    }
  }

  json summary{{"config", config_json("report",
                                      {{"rigidity", rigidity_path},
                                       {"edge_scan", edge_path},
                                       {"stieltjes", stieltjes_path}})},
               {"checks", checks}};
  emit(opts.out, summary.dump(2) + "\n");

  if (!plot_dir.empty() && !plots.empty()) {
    std::string script = "# gnuplot script generated by rrglab report\n"
                         "set logscale xy\nset key left\n";
    for (const auto& [name, contents] : plots) {
      atomic_write(plot_dir + "/" + name, contents);
      script += "plot '" + name + "' using 1:2 with linespoints title '" +
                name + "'\npause -1\n";
    }
    atomic_write(plot_dir + "/plots.gp", script);
  }
  std::fprintf(stderr, "report: %zu check(s)\n", checks.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rrglab: random regular graph spectral laboratory"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value config file");

  CommonOpts opts;
  app.add_option("--out", opts.out, "output path ('-' for stdout)");
  app.add_option("--format", opts.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", opts.threads, "worker pool size")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", opts.seed, "base RNG seed");

  int n = 0, d = 3, ell = 1, samples = 50, trials = 1000, p = 1, k_max = 5;
  std::int64_t max_attempts = 0;
  double c_param = 0.1;
  std::string in_path, sizes_text, statistic = "lambda2", bias = "uniform";
  std::vector<std::string> z_texts;
  std::string rigidity_in, edge_in, stieltjes_in, plot_dir;
  bool edge_window = false;

  auto* sample = app.add_subcommand("sample", "uniform d-regular graph");
  sample->add_option("--n", n, "vertex count")->required();
  sample->add_option("--d", d, "degree")->required();
  sample->add_option("--max-attempts", max_attempts, "rejection cap");

  auto* spectrum = app.add_subcommand("spectrum", "full eigenvalue list");
  spectrum->add_option("--in", in_path, "regraph v1 input file");
  spectrum->add_option("--n", n, "vertex count (when sampling)");
  spectrum->add_option("--d", d, "degree");

  auto* gamma = app.add_subcommand("gamma", "classical eigenvalue locations");
  gamma->add_option("--n", n, "vertex count")->required();
  gamma->add_option("--d", d, "degree");

  auto* greens = app.add_subcommand("greens", "Green's function diagnostics");
  greens->add_option("--in", in_path, "regraph v1 input file");
  greens->add_option("--n", n, "vertex count (when sampling)");
  greens->add_option("--d", d, "degree");
  greens->add_option("--z", z_texts, "spectral point E,eta (repeatable)")
      ->required();
  greens->add_option("--ell", ell, "tree depth");
  greens->add_option("--c", c_param, "control-parameter constant");

  auto* rigidity = app.add_subcommand("rigidity", "rigidity profiles to CSV");
  rigidity->add_option("--sizes", sizes_text, "comma list of N")->required();
  rigidity->add_option("--samples", samples, "samples per size");
  rigidity->add_option("--d", d, "degree");

  auto* escan = app.add_subcommand("edge-scan", "extreme eigenvalue samples");
  escan->add_option("--sizes", sizes_text, "comma list of N")->required();
  escan->add_option("--samples", samples, "samples per size");
  escan->add_option("--d", d, "degree");

  auto* sscan = app.add_subcommand("stieltjes-scan",
                                   "|m - m_d| samples or edge window");
  sscan->add_option("--n", n, "vertex count")->required();
  sscan->add_option("--d", d, "degree");
  sscan->add_option("--z", z_texts, "spectral point E,eta (repeatable)");
  sscan->add_option("--samples", samples, "sample count");
  sscan->add_flag("--edge-window", edge_window,
                  "run the edge-window exclusion experiment instead");

  auto* resample = app.add_subcommand("resample", "local resampling study");
  resample->add_option("--n", n, "vertex count")->required();
  resample->add_option("--d", d, "degree");
  resample->add_option("--ell", ell, "resampling radius");
  resample->add_option("--trials", trials, "trial count");
  resample->add_option("--statistic", statistic,
                       "lambda2|triangles|im_m_i|constant");
  resample->add_option("--bias", bias, "uniform|spectral");
  int wb_trials = 0;
  resample->add_option("--woodbury-trials", wb_trials,
                       "decay-table trials (0 = skip)");

  auto* wcheck = app.add_subcommand("woodbury-check", "expansion decay table");
  wcheck->add_option("--n", n, "vertex count")->required();
  wcheck->add_option("--d", d, "degree");
  wcheck->add_option("--ell", ell, "resampling radius");
  wcheck->add_option("--trials", trials, "trial count");
  wcheck->add_option("--z", z_texts, "spectral point E,eta");
  wcheck->add_option("--kmax", k_max, "truncation order");

  auto* moments = app.add_subcommand("moments", "self-consistent moments");
  moments->add_option("--n", n, "vertex count");
  moments->add_option("--sizes", sizes_text, "comma list of N (overrides --n)");
  moments->add_option("--d", d, "degree");
  moments->add_option("--ell", ell, "tree depth");
  moments->add_option("--z", z_texts, "spectral point E,eta");
  moments->add_option("--p", p, "moment half-order (1 or 2)");
  moments->add_option("--samples", samples, "samples per size");

  auto* report = app.add_subcommand("report", "aggregate fits and pass/fail");
  report->add_option("--rigidity", rigidity_in, "rigidity.csv input");
  report->add_option("--edge-scan", edge_in, "edge_scan.csv input");
  report->add_option("--stieltjes", stieltjes_in, "stieltjes.csv input");
  report->add_option("--plot-dir", plot_dir, "directory for plot data");

  for (CLI::App* sub : app.get_subcommands({}))
    sub->fallthrough();  // global options may follow the subcommand name

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 1;
  }

  try {
    if (sample->parsed())
      return cmd_sample(n, d, opts.seed, max_attempts, opts.out);
    if (spectrum->parsed())
      return cmd_spectrum(in_path, n, d, opts.seed, opts);
    if (gamma->parsed()) return cmd_gamma(n, d, opts);
    if (greens->parsed())
      return cmd_greens(in_path, n, d, opts.seed, z_texts, ell, c_param, opts);
    if (rigidity->parsed())
      return cmd_rigidity(parse_sizes(sizes_text), samples, d, opts);
    if (escan->parsed())
      return cmd_edge_scan(parse_sizes(sizes_text), samples, d, opts);
    if (sscan->parsed()) {
      if (edge_window) return cmd_edge_window(n, d, samples, opts);
      return cmd_stieltjes_scan(n, d, z_texts, samples, opts);
    }
    if (resample->parsed()) {
      json cfg{{"n", n},          {"d", d},
               {"ell", ell},      {"trials", trials},
               {"seed", opts.seed}, {"threads", opts.threads},
               {"statistic", statistic}, {"bias", bias},
               {"woodbury_trials", wb_trials}};
      return run_json_tool("resample", rrg_resample_run, cfg, opts.out);
    }
    if (wcheck->parsed()) {
      ZPoint z = z_texts.empty() ? ZPoint{0.2, 0.6} : parse_z(z_texts.front());
      json cfg{{"n", n},   {"d", d},       {"ell", ell},
               {"trials", trials}, {"seed", opts.seed},
               {"threads", opts.threads}, {"e", z.e},
               {"eta", z.eta},     {"k_max", k_max}};
      return run_json_tool("woodbury-check", rrg_woodbury_run, cfg, opts.out);
    }
    if (moments->parsed()) {
      ZPoint z = z_texts.empty() ? ZPoint{0.3, 1.0} : parse_z(z_texts.front());
      json cfg{{"d", d},    {"ell", ell},
               {"p", p},     {"samples", samples},
               {"seed", opts.seed}, {"threads", opts.threads},
               {"e", z.e},   {"eta", z.eta}};
      if (!sizes_text.empty())
        cfg["sizes"] = parse_sizes(sizes_text);
      else if (n > 0)
        cfg["n"] = n;
      else
        throw ValidationError("moments: need --n or --sizes");
      return run_json_tool("moments", rrg_moments_run, cfg, opts.out);
    }
    if (report->parsed())
      return cmd_report(rigidity_in, edge_in, stieltjes_in, plot_dir, opts);
    throw ValidationError("no subcommand");
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return 2;
  }
}
