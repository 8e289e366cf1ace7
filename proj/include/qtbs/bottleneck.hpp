#pragma once

#include <deque>
#include <memory>
#include <set>
#include <tuple>

#include "qtbs/net_model.hpp"

namespace qtbs {

enum class EdgeKind { Bottleneck, Backward, Traversal };

struct Edge {
  std::size_t peer;  // head vertex in out() lists, tail vertex in in() lists
  EdgeKind kind;
};

// Vertices 0..L-1 are links, L..L+F-1 are flows, in the network's id order.
class GradientGraph {
 public:
  GradientGraph() = default;
  GradientGraph(std::size_t links, std::size_t flows)
      : links_(links), out_(links + flows), in_(links + flows) {}

  std::size_t link_count() const { return links_; }
  std::size_t flow_count() const { return out_.size() - links_; }
  std::size_t size() const { return out_.size(); }

  std::size_t link_vertex(std::size_t l) const { return l; }
  std::size_t flow_vertex(std::size_t f) const { return links_ + f; }
  bool is_link(std::size_t v) const { return v < links_; }
  bool is_flow(std::size_t v) const { return v >= links_ && v < out_.size(); }
  std::size_t element(std::size_t v) const { return is_link(v) ? v : v - links_; }

  const std::vector<Edge>& out(std::size_t v) const { return out_.at(v); }
  const std::vector<Edge>& in(std::size_t v) const { return in_.at(v); }

  void add_edge(std::size_t from, std::size_t to, EdgeKind kind) {
    out_[from].push_back({to, kind});
    in_[to].push_back({from, kind});
  }

  bool has_edge(std::size_t from, std::size_t to, EdgeKind kind) const {
    for (const auto& e : out_.at(from))
      if (e.peer == to && e.kind == kind) return true;
    return false;
  }

  // Keep adjacency lists in ascending vertex order for deterministic walks.
  void sort_edges() {
    auto cmp = [](const Edge& a, const Edge& b) {
      return std::tie(a.peer, a.kind) < std::tie(b.peer, b.kind);
    };
    for (auto& v : out_) std::sort(v.begin(), v.end(), cmp);
    for (auto& v : in_) std::sort(v.begin(), v.end(), cmp);
  }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& v : out_) n += v.size();
    return n;
  }

 private:
  std::size_t links_ = 0;
  std::vector<std::vector<Edge>> out_;
  std::vector<std::vector<Edge>> in_;
};

struct SolveStats {
  std::size_t heap_pops = 0;
  std::size_t key_updates = 0;
};

struct BottleneckSolution {
  std::shared_ptr<const Network> network;
  GradientGraph graph;
  std::vector<double> fair_share;                       // by link index; +inf for non-bottleneck links
  std::vector<double> rate;                             // by flow index
  std::vector<std::vector<std::size_t>> bottlenecks_of; // by flow index, ascending link indices
  std::vector<int> level;                               // by vertex
  SolveStats stats;

  const Network& net() const { return *network; }

  double rate_of(std::string_view flow) const {
    std::size_t f = net().flow_index(flow);
    if (f == npos) throw Error(ErrorKind::UnknownId, "unknown flow '" + std::string(flow) + "'");
    return rate[f];
  }

  double fair_share_of(std::string_view link) const {
    std::size_t l = net().link_index(link);
    if (l == npos) throw Error(ErrorKind::UnknownId, "unknown link '" + std::string(link) + "'");
    return fair_share[l];
  }

  // Resolves an id to a vertex; links are looked up before flows.
  std::size_t vertex_of(std::string_view id) const {
    if (std::size_t l = net().link_index(id); l != npos) return graph.link_vertex(l);
    if (std::size_t f = net().flow_index(id); f != npos) return graph.flow_vertex(f);
    throw Error(ErrorKind::UnknownId, "unknown link or flow '" + std::string(id) + "'");
  }

  const std::string& id_of(std::size_t v) const {
    return graph.is_link(v) ? net().link(v).id : net().flow(graph.element(v)).id;
  }

  // Links whose fair share is finite, i.e. that bottleneck at least one flow.
  bool is_bottleneck_link(std::size_t l) const {
    for (const auto& e : graph.out(graph.link_vertex(l)))
      if (e.kind == EdgeKind::Bottleneck) return true;
    return false;
  }
};

namespace detail {

// Longest path over bottleneck and traversal edges; the graph restricted to
// those edges is acyclic because fair shares grow strictly along traversals.
inline std::vector<int> compute_levels(const GradientGraph& g) {
  std::size_t n = g.size();
  std::vector<int> indeg(n, 0), level(n, 0);
  for (std::size_t v = 0; v < n; ++v)
    for (const auto& e : g.out(v))
      if (e.kind != EdgeKind::Backward) ++indeg[e.peer];
  std::deque<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.push_back(v);
  std::size_t seen = 0;
  while (!ready.empty()) {
    std::size_t v = ready.front();
    ready.pop_front();
    ++seen;
    for (const auto& e : g.out(v)) {
      if (e.kind == EdgeKind::Backward) continue;
      level[e.peer] = std::max(level[e.peer], level[v] + 1);
      if (--indeg[e.peer] == 0) ready.push_back(e.peer);
    }
  }
  if (seen != n) throw std::logic_error("gradient graph has a cycle outside backward edges");
  return level;
}

}  // namespace detail

// Algorithm 1: builds the max-min solution and its gradient graph.
inline BottleneckSolution gradient_graph(const Network& network) {
  if (auto v = validate(network); !v.empty()) throw Error(v.front().kind, v.front().message);

  BottleneckSolution sol;
  sol.network = std::make_shared<const Network>(network);
  const Network& net = *sol.network;
  const std::size_t L = net.link_count(), F = net.flow_count();
  const double tol = eps();

  sol.graph = GradientGraph(L, F);
  sol.fair_share.assign(L, 0.0);
  sol.rate.assign(F, 0.0);
  sol.bottlenecks_of.assign(F, {});

  std::vector<double> avail(L);
  std::vector<std::size_t> unresolved(L);
  std::vector<char> resolved(F, 0), popped(L, 0);
  std::set<std::pair<double, std::size_t>> heap;  // (fair share, link index); link index order == id order

  for (std::size_t l = 0; l < L; ++l) {
    avail[l] = net.link(l).capacity;
    unresolved[l] = net.flows_on(l).size();
    if (unresolved[l] == 0) {
      sol.fair_share[l] = avail[l];
      continue;
    }
    sol.fair_share[l] = avail[l] / static_cast<double>(unresolved[l]);
    heap.emplace(sol.fair_share[l], l);
  }

  auto& g = sol.graph;
  while (!heap.empty()) {
    auto [share, l] = *heap.begin();
    heap.erase(heap.begin());
    ++sol.stats.heap_pops;
    popped[l] = 1;

    for (std::size_t f : net.flows_on(l)) {
      if (resolved[f]) {
        // Tie with a link popped earlier: f is bottlenecked here as well.
        if (sol.rate[f] >= share - tol) {
          g.add_edge(g.link_vertex(l), g.flow_vertex(f), EdgeKind::Bottleneck);
          g.add_edge(g.flow_vertex(f), g.link_vertex(l), EdgeKind::Backward);
          sol.bottlenecks_of[f].push_back(l);
        }
        continue;
      }
      resolved[f] = 1;
      sol.rate[f] = share;
      g.add_edge(g.link_vertex(l), g.flow_vertex(f), EdgeKind::Bottleneck);
      g.add_edge(g.flow_vertex(f), g.link_vertex(l), EdgeKind::Backward);
      sol.bottlenecks_of[f].push_back(l);

      for (std::size_t l2 : net.path(f)) {
        if (l2 == l || popped[l2]) continue;
        if (!(sol.rate[f] < sol.fair_share[l2] - tol)) continue;  // tie: l2 will claim f when popped
        g.add_edge(g.flow_vertex(f), g.link_vertex(l2), EdgeKind::Traversal);
        heap.erase({sol.fair_share[l2], l2});
        avail[l2] -= sol.rate[f];
        --unresolved[l2];
        ++sol.stats.key_updates;
        if (unresolved[l2] == 0) {
          sol.fair_share[l2] = kInf;
          popped[l2] = 1;
        } else {
          sol.fair_share[l2] = avail[l2] / static_cast<double>(unresolved[l2]);
          heap.emplace(sol.fair_share[l2], l2);
        }
      }
    }
  }

  for (std::size_t f = 0; f < F; ++f) {
    if (!resolved[f]) throw std::logic_error("flow '" + net.flow(f).id + "' was never resolved");
    std::sort(sol.bottlenecks_of[f].begin(), sol.bottlenecks_of[f].end());
  }
  g.sort_edges();
  sol.level = detail::compute_levels(g);
  return sol;
}

inline std::vector<int> levels(const BottleneckSolution& sol) { return sol.level; }

// Distinct flow levels present in the structure, ascending.
inline std::vector<int> flow_levels(const BottleneckSolution& sol) {
  std::set<int> s;
  for (std::size_t f = 0; f < sol.rate.size(); ++f) s.insert(sol.level[sol.graph.flow_vertex(f)]);
  return {s.begin(), s.end()};
}

// Vertices reachable from x over any edge kind, x excluded, ascending.
inline std::vector<std::size_t> region_of_influence(const BottleneckSolution& sol, std::size_t x) {
  const auto& g = sol.graph;
  if (x >= g.size()) throw Error(ErrorKind::UnknownId, "vertex out of range");
  std::vector<char> seen(g.size(), 0);
  std::deque<std::size_t> q{x};
  seen[x] = 1;
  while (!q.empty()) {
    std::size_t v = q.front();
    q.pop_front();
    for (const auto& e : g.out(v))
      if (!seen[e.peer]) {
        seen[e.peer] = 1;
        q.push_back(e.peer);
      }
  }
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < g.size(); ++v)
    if (seen[v] && v != x) out.push_back(v);
  return out;
}

inline std::vector<std::string> region_of_influence(const BottleneckSolution& sol, std::string_view id) {
  std::vector<std::string> out;
  for (std::size_t v : region_of_influence(sol, sol.vertex_of(id))) out.push_back(sol.id_of(v));
  return out;
}

}  // namespace qtbs
