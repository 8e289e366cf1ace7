#pragma once

#include <queue>

#include "qtbs/bottleneck.hpp"

namespace qtbs {

struct Perturbation {
  std::vector<std::size_t> targets;  // vertices; all links or all flows
  int direction = +1;                // +1 raises the target quantity, -1 lowers it
};

struct GradientResult {
  Perturbation perturbation;
  std::vector<double> link_gradient;  // by link index
  std::vector<double> flow_gradient;  // by flow index
  // A link ended with no unvisited successor while having to absorb a
  // capacity loss: the perturbation creates a new bottleneck and the
  // linear propagation does not describe it.
  bool degenerate = false;
  std::size_t visited = 0;

  double of_vertex(const GradientGraph& g, std::size_t v) const {
    return g.is_link(v) ? link_gradient[v] : flow_gradient[g.element(v)];
  }
};

// Algorithm 2. Gradients are drifts per unit of perturbation magnitude, so a
// capacity decrease of a link that pushes a flow up by δ/2 reports +0.5.
inline GradientResult forward_grad(const BottleneckSolution& sol, const Perturbation& p) {
  const auto& g = sol.graph;
  if (p.direction != 1 && p.direction != -1) throw Error(ErrorKind::InvalidArgument, "direction must be +1 or -1");
  if (p.targets.empty()) throw Error(ErrorKind::InvalidArgument, "empty perturbation target");
  for (std::size_t t : p.targets) {
    if (t >= g.size()) throw Error(ErrorKind::UnknownId, "perturbation target out of range");
    if (g.is_link(t) != g.is_link(p.targets.front()))
      throw Error(ErrorKind::InvalidArgument, "perturbation mixes links and flows");
  }
  if (sol.fair_share.size() != g.link_count() || sol.rate.size() != g.flow_count())
    throw Error(ErrorKind::InvalidArgument, "solution does not match its graph");

  const std::size_t L = g.link_count(), F = g.flow_count();
  GradientResult res;
  res.perturbation = p;
  res.link_gradient.assign(L, 0.0);
  res.flow_gradient.assign(F, 0.0);
  std::vector<double> dc(L, 0.0);
  std::vector<char> visited(g.size(), 0);
  const double sigma = p.direction;

  auto value = [&](std::size_t v) {
    return g.is_link(v) ? sol.fair_share[v] : sol.rate[g.element(v)];
  };
  auto drift = [&](std::size_t v) -> double& {
    return g.is_link(v) ? res.link_gradient[v] : res.flow_gradient[g.element(v)];
  };
  auto successors = [&](std::size_t v) {
    std::vector<std::size_t> s;
    for (const auto& e : g.out(v)) s.push_back(e.peer);
    return s;
  };

  using Key = std::tuple<double, double, std::size_t>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> heap;

  for (std::size_t t : p.targets) {
    if (g.is_link(t)) {
      dc[t] += sigma;
      std::size_t n = successors(t).size();
      drift(t) = n ? dc[t] / static_cast<double>(n) : 0.0;
    } else {
      drift(t) = sigma;
    }
    heap.emplace(value(t), drift(t), t);
  }

  while (!heap.empty()) {
    std::size_t y = std::get<2>(heap.top());
    heap.pop();
    if (visited[y]) continue;
    visited[y] = 1;
    ++res.visited;
    if (drift(y) == 0.0) continue;

    for (std::size_t y2 : successors(y)) {
      if (visited[y2]) continue;
      if (g.is_flow(y2)) {
        // Flow equation: minimum drift over the flow's bottleneck links.
        double m = kInf;
        for (const auto& e : g.in(y2))
          if (e.kind == EdgeKind::Bottleneck) m = std::min(m, res.link_gradient[e.peer]);
        drift(y2) = m;
      } else {
        // Link equation over the successors not yet visited.
        dc[y2] -= drift(y);
        std::size_t n = 0;
        for (std::size_t s : successors(y2)) n += !visited[s];
        if (n == 0) {
          drift(y2) = 0.0;
          if (dc[y2] < -eps() && std::isfinite(sol.fair_share[y2])) res.degenerate = true;
        } else {
          drift(y2) = dc[y2] / static_cast<double>(n);
        }
      }
      heap.emplace(value(y2), drift(y2), y2);
    }
  }
  return res;
}

inline GradientResult forward_grad(const BottleneckSolution& sol, std::string_view target, int direction) {
  return forward_grad(sol, Perturbation{{sol.vertex_of(target)}, direction});
}

inline GradientResult forward_grad(const BottleneckSolution& sol, const std::vector<std::string>& targets,
                                   int direction) {
  Perturbation p{{}, direction};
  for (const auto& t : targets) p.targets.push_back(sol.vertex_of(t));
  return forward_grad(sol, p);
}

// Property 1 bound d^(D/4): d is the largest in- or out-degree, D the
// longest finite shortest-path distance over all edges.
inline double gradient_bound(const BottleneckSolution& sol) {
  const auto& g = sol.graph;
  std::size_t d = 0;
  for (std::size_t v = 0; v < g.size(); ++v) d = std::max({d, g.out(v).size(), g.in(v).size()});
  std::size_t diameter = 0;
  std::vector<std::size_t> dist(g.size());
  for (std::size_t s = 0; s < g.size(); ++s) {
    std::fill(dist.begin(), dist.end(), npos);
    std::deque<std::size_t> q{s};
    dist[s] = 0;
    while (!q.empty()) {
      std::size_t v = q.front();
      q.pop_front();
      diameter = std::max(diameter, dist[v]);
      for (const auto& e : g.out(v))
        if (dist[e.peer] == npos) {
          dist[e.peer] = dist[v] + 1;
          q.push_back(e.peer);
        }
    }
  }
  return std::pow(static_cast<double>(d), static_cast<double>(diameter) / 4.0);
}

}  // namespace qtbs
