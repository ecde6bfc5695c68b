#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "rootfinder/error.hpp"
#include "rootfinder/tree.hpp"

namespace rootfinder {

namespace detail {

inline bool skip_line(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

inline std::uint64_t parse_positive(std::istringstream& in, std::size_t line_no) {
  std::string token;
  if (!(in >> token) || token.empty() ||
      !std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected a positive integer");
  }
  std::uint64_t value = 0;
  for (char c : token) {
    value = value * 10 + static_cast<std::uint64_t>(c - '0');
    if (value > 0xFFFFFFFFull) throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": identifier too large");
  }
  if (value == 0) throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": identifiers are positive");
  return value;
}

inline void expect_end(std::istringstream& in, std::size_t line_no) {
  std::string extra;
  if (in >> extra) throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": trailing token '" + extra + "'");
}

}  // namespace detail

/// An edge list as read from disk. Identifiers that are not already the
/// dense range 1..n are renumbered by ascending value; `labels[v]` maps an
/// internal vertex back to the identifier used in the file.
struct LabeledShape {
  ShapeTree shape;
  std::vector<std::uint64_t> labels;
};

/// One edge per line, two whitespace-separated positive integers; '#' starts a comment line.
inline LabeledShape read_edge_list(std::istream& in) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::skip_line(line)) continue;
    std::istringstream fields(line);
    const auto a = detail::parse_positive(fields, line_no);
    const auto b = detail::parse_positive(fields, line_no);
    detail::expect_end(fields, line_no);
    raw.emplace_back(a, b);
  }

  std::vector<std::uint64_t> ids;
  ids.reserve(2 * raw.size());
  for (const auto& [a, b] : raw) {
    ids.push_back(a);
    ids.push_back(b);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<std::uint64_t> labels(ids.size() + 1, 0);
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  const bool dense = !ids.empty() && ids.front() == 1 && ids.back() == ids.size();
  if (dense) {
    for (std::size_t i = 0; i < ids.size(); ++i) labels[i + 1] = ids[i];
    for (const auto& [a, b] : raw) edges.push_back({static_cast<Vertex>(a), static_cast<Vertex>(b)});
  } else {
    std::unordered_map<std::uint64_t, Vertex> index;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      index.emplace(ids[i], static_cast<Vertex>(i + 1));
      labels[i + 1] = ids[i];
    }
    for (const auto& [a, b] : raw) edges.push_back({index.at(a), index.at(b)});
  }
  return {build_shape(edges), std::move(labels)};
}

inline void write_edge_list(std::ostream& out, const ShapeTree& shape) {
  for (const auto& e : shape.edges()) out << e.u << ' ' << e.v << '\n';
}

/// Header line "n", then n - 1 lines "i parent[i]" for i = 2..n.
inline void write_growth_tree(std::ostream& out, const GrowthTree& t) {
  out << t.size() << '\n';
  for (Vertex i = 2; i <= t.size(); ++i) out << i << ' ' << t.parent(i) << '\n';
}

inline GrowthTree read_growth_tree(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::uint64_t n = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::skip_line(line)) continue;
    std::istringstream fields(line);
    n = detail::parse_positive(fields, line_no);
    detail::expect_end(fields, line_no);
    break;
  }
  if (n < 2) throw Error(ErrorKind::Parse, "missing or invalid vertex count header");
  std::vector<Vertex> parent(n + 1, 0);
  std::vector<char> seen(n + 1, 0);
  std::uint64_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::skip_line(line)) continue;
    std::istringstream fields(line);
    const auto i = detail::parse_positive(fields, line_no);
    const auto p = detail::parse_positive(fields, line_no);
    detail::expect_end(fields, line_no);
    if (i < 2 || i > n || seen[i]) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": bad or repeated vertex " + std::to_string(i));
    }
    seen[i] = 1;
    parent[i] = static_cast<Vertex>(p);
    ++rows;
  }
  if (rows != n - 1) throw Error(ErrorKind::Parse, "expected " + std::to_string(n - 1) + " parent rows");
  return GrowthTree(std::move(parent));
}

}  // namespace rootfinder
