#pragma once

#include <cstdio>
#include <sstream>

#include "qtbs/gradients.hpp"

namespace qtbs {

// Jain's fairness index (Σx)² / (n·Σx²).
inline double jain_index(const std::vector<double>& x) {
  if (x.empty()) throw Error(ErrorKind::InvalidArgument, "jain index of an empty list");
  double sum = 0, sq = 0;
  for (double v : x) {
    if (!(v >= 0) || !std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "jain index needs finite values >= 0");
    sum += v;
    sq += v * v;
  }
  if (sq == 0) throw Error(ErrorKind::InvalidArgument, "jain index of an all-zero list");
  return sum * sum / (static_cast<double>(x.size()) * sq);
}

inline std::string fixed3(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

// +inf has no JSON spelling; it is written as null.
inline nlohmann::ordered_json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

// Two-line node label; the line break is Graphviz's own \n escape.
inline std::string dot_label(const std::string& id, const std::string& value) {
  std::string q = dot_quote(id);
  q.pop_back();
  return q + "\\n" + value + "\"";
}

}  // namespace detail

inline std::string to_dot(const BottleneckSolution& sol, bool backward_edges) {
  const auto& g = sol.graph;
  std::ostringstream os;
  os << "digraph bottleneck_structure {\n";
  os << "  rankdir=TB;\n";
  for (std::size_t l = 0; l < g.link_count(); ++l)
    os << "  " << detail::dot_quote(sol.net().link(l).id) << " [shape=box, label="
       << detail::dot_label(sol.net().link(l).id, "s=" + fixed3(sol.fair_share[l])) << "];\n";
  for (std::size_t f = 0; f < g.flow_count(); ++f)
    os << "  " << detail::dot_quote(sol.net().flow(f).id) << " [shape=ellipse, style=filled, fillcolor=gray, label="
       << detail::dot_label(sol.net().flow(f).id, "r=" + fixed3(sol.rate[f])) << "];\n";
  for (std::size_t v = 0; v < g.size(); ++v)
    for (const auto& e : g.out(v)) {
      if (e.kind == EdgeKind::Backward && !backward_edges) continue;
      os << "  " << detail::dot_quote(sol.id_of(v)) << " -> " << detail::dot_quote(sol.id_of(e.peer));
      if (e.kind == EdgeKind::Backward) os << " [style=dashed]";
      os << ";\n";
    }
  os << "}\n";
  return os.str();
}

inline const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::Bottleneck: return "bottleneck";
    case EdgeKind::Backward: return "backward";
    case EdgeKind::Traversal: return "traversal";
  }
  return "?";
}

inline nlohmann::ordered_json solution_json(const BottleneckSolution& sol, bool backward_edges) {
  using nlohmann::ordered_json;
  const Network& net = sol.net();
  ordered_json links = ordered_json::array(), flows = ordered_json::array(), edges = ordered_json::array();
  for (std::size_t l = 0; l < net.link_count(); ++l)
    links.push_back({{"id", net.link(l).id},
                     {"capacity", net.link(l).capacity},
                     {"fair_share", json_number(sol.fair_share[l])},
                     {"level", sol.level[sol.graph.link_vertex(l)]}});
  for (std::size_t f = 0; f < net.flow_count(); ++f) {
    ordered_json b = ordered_json::array();
    for (std::size_t l : sol.bottlenecks_of[f]) b.push_back(net.link(l).id);
    flows.push_back({{"id", net.flow(f).id},
                     {"rate", sol.rate[f]},
                     {"bottlenecks", b},
                     {"level", sol.level[sol.graph.flow_vertex(f)]}});
  }
  for (std::size_t v = 0; v < sol.graph.size(); ++v)
    for (const auto& e : sol.graph.out(v)) {
      if (e.kind == EdgeKind::Backward && !backward_edges) continue;
      edges.push_back({{"from", sol.id_of(v)}, {"to", sol.id_of(e.peer)}, {"kind", to_string(e.kind)}});
    }
  return {{"links", links}, {"flows", flows}, {"edges", edges}};
}

}  // namespace qtbs
