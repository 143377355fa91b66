#include "core/graph_io.hpp"

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rrg {

namespace {

// Parses a full line of the form "<int> <int>" with a single separating
// space and nothing else.
bool parse_int_pair(const std::string& line, long& a, long& b) {
  const char* p = line.c_str();
  char* end = nullptr;
  errno = 0;
  a = std::strtol(p, &end, 10);
  if (end == p || errno != 0 || *end != ' ') return false;
  if (!(p[0] == '-' || (p[0] >= '0' && p[0] <= '9'))) return false;
  if (p[0] == '0' && end - p > 1) return false;  // no leading zeros
  const char* q = end + 1;
  char* end2 = nullptr;
  b = std::strtol(q, &end2, 10);
  if (end2 == q || errno != 0 || *end2 != '\0') return false;
  if (!(q[0] == '-' || (q[0] >= '0' && q[0] <= '9'))) return false;
  if (q[0] == '0' && end2 - q > 1) return false;
  return true;
}

}  // namespace

std::string graph_to_regraph_v1(const RegularGraph& g) {
  std::ostringstream out;
  out << g.vertex_count() << ' ' << g.degree() << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
  return out.str();
}

RegularGraph graph_from_regraph_v1(const std::string& text) {
  if (text.empty() || text.back() != '\n')
    throw std::invalid_argument("regraph v1: missing final newline");
  std::vector<std::string> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\n') {
      lines.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (lines.empty()) throw std::invalid_argument("regraph v1: empty input");
  long n = 0, d = 0;
  if (!parse_int_pair(lines[0], n, d))
    throw std::invalid_argument("regraph v1: malformed header line");
  if (n <= 0 || d <= 0 || n > 50000000 || d >= n)
    throw std::invalid_argument("regraph v1: header values out of range");
  std::vector<Edge> edges;
  edges.reserve(lines.size() - 1);
  Edge prev{-1, -1};
  for (std::size_t k = 1; k < lines.size(); ++k) {
    long u = 0, v = 0;
    if (!parse_int_pair(lines[k], u, v))
      throw std::invalid_argument("regraph v1: malformed edge line " +
                                  std::to_string(k + 1));
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw std::invalid_argument("regraph v1: vertex out of range on line " +
                                  std::to_string(k + 1));
    if (u >= v)
      throw std::invalid_argument("regraph v1: edge must satisfy u < v, line " +
                                  std::to_string(k + 1));
    Edge e{static_cast<int>(u), static_cast<int>(v)};
    if (!(prev < e))
      throw std::invalid_argument(
          "regraph v1: edges not strictly sorted, line " +
          std::to_string(k + 1));
    prev = e;
    edges.push_back(e);
  }
  // RegularGraph's constructor enforces the degree/simplicity invariants.
  return RegularGraph(static_cast<int>(n), static_cast<int>(d),
                      std::move(edges));
}

RegularGraph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return graph_from_regraph_v1(buf.str());
}

void atomic_write_file(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  fs::path target(path);
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

void save_graph(const RegularGraph& g, const std::string& path) {
  atomic_write_file(path, graph_to_regraph_v1(g));
}

}  // namespace rrg
