#pragma once

#include "qtbs/bottleneck.hpp"

namespace qtbs {

struct RoutePath {
  std::vector<LinkId> links;
  double predicted_rate = 0;
  std::map<RouterId, double> distance;  // 1/rate when the router converged; +inf if never reached
};

// Rate the max-min solution would give a new flow placed on `path`.
inline double rate_if_routed(const Network& net, const std::vector<LinkId>& path) {
  if (path.empty()) throw Error(ErrorKind::InvalidArgument, "probe path is empty");
  for (const auto& l : path)
    if (net.link_index(l) == npos) throw Error(ErrorKind::UnknownLink, "probe path uses unknown link '" + l + "'");
  auto sol = gradient_graph(net.with_flow(Flow{std::string(kProbeFlowId), path}));
  return sol.rate_of(kProbeFlowId);
}

namespace detail {

inline void require_endpoints(const Network& net) {
  for (const auto& l : net.links())
    if (!l.src || !l.dst) throw Error(ErrorKind::Malformed, "link '" + l.id + "' has no router endpoints");
}

}  // namespace detail

// Fewest-hop path by BFS; ties resolved by link id order.
inline std::vector<LinkId> min_hop_path(const Network& net, const RouterId& src, const RouterId& dst) {
  detail::require_endpoints(net);
  std::map<RouterId, std::optional<std::size_t>> via;  // link used to reach each router
  via[src] = std::nullopt;
  std::deque<RouterId> q{src};
  while (!q.empty()) {
    RouterId u = q.front();
    q.pop_front();
    if (u == dst) break;
    for (std::size_t l = 0; l < net.link_count(); ++l) {
      const auto& link = net.link(l);
      if (*link.src != u || via.count(*link.dst)) continue;
      via[*link.dst] = l;
      q.push_back(*link.dst);
    }
  }
  if (!via.count(dst)) throw Error(ErrorKind::Unreachable, "router '" + dst + "' unreachable from '" + src + "'");
  std::vector<LinkId> path;
  for (RouterId u = dst; via[u];) {
    const auto& link = net.link(*via[u]);
    path.push_back(link.id);
    u = *link.src;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

// Algorithm 3: Dijkstra over routers where the distance of a router is the
// inverse of the rate a new flow would get on the best path found to it.
inline RoutePath max_rate_path(const Network& net, const RouterId& src, const RouterId& dst) {
  detail::require_endpoints(net);
  auto routers = net.all_routers();
  auto known = [&](const RouterId& r) { return std::binary_search(routers.begin(), routers.end(), r); };
  if (!known(src)) throw Error(ErrorKind::UnknownId, "unknown router '" + src + "'");
  if (!known(dst)) throw Error(ErrorKind::UnknownId, "unknown router '" + dst + "'");
  if (src == dst) throw Error(ErrorKind::InvalidArgument, "source and destination are the same router");

  const double tol = eps();
  std::map<RouterId, double> dist;
  std::map<RouterId, std::vector<LinkId>> best;
  for (const auto& r : routers) dist[r] = kInf;
  dist[src] = 0;
  std::set<RouterId> converged;
  std::set<std::pair<double, RouterId>> frontier{{0.0, src}};

  while (!frontier.empty()) {
    // Smallest distance first; near-ties go to the smaller router id.
    auto it = frontier.begin();
    for (auto j = frontier.begin(); j != frontier.end() && j->first <= frontier.begin()->first + tol; ++j)
      if (j->second < it->second) it = j;
    RouterId u = it->second;
    frontier.erase(it);
    converged.insert(u);
    if (u == dst) break;

    for (const auto& link : net.links()) {
      if (*link.src != u || converged.count(*link.dst)) continue;
      auto path = best[u];
      path.push_back(link.id);
      double d = 1.0 / rate_if_routed(net, path);
      const RouterId& v = *link.dst;
      if (dist[v] <= d + tol) continue;
      frontier.erase({dist[v], v});
      dist[v] = d;
      best[v] = std::move(path);
      frontier.emplace(d, v);
    }
  }
  if (!converged.count(dst)) throw Error(ErrorKind::Unreachable, "router '" + dst + "' unreachable from '" + src + "'");

  RoutePath out;
  out.links = best[dst];
  out.predicted_rate = rate_if_routed(net, out.links);
  out.distance = std::move(dist);
  return out;
}

// Every simple router path from src to dst (exponential; for small graphs).
inline std::vector<std::vector<LinkId>> all_simple_paths(const Network& net, const RouterId& src, const RouterId& dst) {
  detail::require_endpoints(net);
  std::vector<std::vector<LinkId>> out;
  std::vector<LinkId> path;
  std::set<RouterId> on_path{src};
  auto walk = [&](auto&& self, const RouterId& u) -> void {
    if (u == dst) {
      out.push_back(path);
      return;
    }
    for (const auto& link : net.links()) {
      if (*link.src != u || on_path.count(*link.dst)) continue;
      path.push_back(link.id);
      on_path.insert(*link.dst);
      self(self, *link.dst);
      on_path.erase(*link.dst);
      path.pop_back();
    }
  };
  walk(walk, src);
  return out;
}

}  // namespace qtbs
