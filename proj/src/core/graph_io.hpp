#pragma once

#include <string>

#include "core/graph.hpp"

namespace rrg {

// "regraph v1" text format: first line "n d", then one "u v" line per
// undirected edge with u < v, 0-based, lexicographically sorted, every line
// newline-terminated, no extra whitespace.
std::string graph_to_regraph_v1(const RegularGraph& g);

// Strict parser; throws std::invalid_argument describing the first violation.
RegularGraph graph_from_regraph_v1(const std::string& text);

RegularGraph load_graph(const std::string& path);

// Atomic write (temp file + rename).
void save_graph(const RegularGraph& g, const std::string& path);

void atomic_write_file(const std::string& path, const std::string& contents);

}  // namespace rrg
