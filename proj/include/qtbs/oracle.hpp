#pragma once

// Brute-force reference solver used to check the main engine. Shares only
// the Network type with it: no heap, no gradient graph, long double sums.

#include <numeric>
#include <random>

#include "qtbs/net_model.hpp"

namespace qtbs {

struct OracleSolution {
  std::vector<double> rate;        // by flow index
  std::vector<double> fair_share;  // by link index
  std::vector<LinkId> saturation_order;
};

namespace detail {

struct Filled {
  std::vector<long double> rate;
  std::vector<long double> share;
  std::vector<std::size_t> order;
};

// Progressive filling. `pinned` flows keep a fixed rate: they consume
// capacity but are not filled and do not define a link's fair share.
inline Filled progressive_fill(const std::vector<long double>& cap, const std::vector<std::vector<std::size_t>>& paths,
                               const std::vector<long double>& pinned_rate, const std::vector<char>& pinned) {
  const std::size_t L = cap.size(), F = paths.size();
  const long double tie = 1e-16L;
  std::vector<long double> remaining = cap;
  std::vector<std::vector<std::size_t>> on(L);
  for (std::size_t f = 0; f < F; ++f)
    for (std::size_t l : paths[f]) on[l].push_back(f);

  Filled out;
  out.rate.assign(F, 0.0L);
  std::vector<char> frozen(F, 0);
  for (std::size_t f = 0; f < F; ++f)
    if (pinned[f]) {
      frozen[f] = 1;
      out.rate[f] = pinned_rate[f];
      for (std::size_t l : paths[f]) remaining[l] -= pinned_rate[f];
    }

  std::vector<char> done(L, 0);
  for (;;) {
    long double best = std::numeric_limits<long double>::infinity();
    std::vector<long double> share(L, std::numeric_limits<long double>::infinity());
    for (std::size_t l = 0; l < L; ++l) {
      std::size_t n = 0;
      for (std::size_t f : on[l]) n += !frozen[f];
      if (n == 0) continue;
      share[l] = remaining[l] / static_cast<long double>(n);
      best = std::min(best, share[l]);
    }
    if (!std::isfinite(static_cast<double>(best))) break;
    long double limit = best + tie * std::max(1.0L, std::fabs(best));
    std::vector<std::size_t> hit;
    for (std::size_t l = 0; l < L; ++l)
      if (share[l] <= limit) hit.push_back(l);
    for (std::size_t l : hit) {
      if (!done[l]) {
        done[l] = 1;
        out.order.push_back(l);
      }
      for (std::size_t f : on[l]) {
        if (frozen[f]) continue;
        frozen[f] = 1;
        out.rate[f] = best;
        for (std::size_t l2 : paths[f]) remaining[l2] -= best;
      }
    }
  }

  // Bertsekas-Gallager fair share: a saturated link's share is the largest
  // rate among the (unpinned) flows crossing it; otherwise it bottlenecks
  // nobody and its share is unbounded. Untraversed links report capacity.
  out.share.assign(L, std::numeric_limits<long double>::infinity());
  for (std::size_t l = 0; l < L; ++l) {
    if (on[l].empty()) {
      out.share[l] = cap[l];
      continue;
    }
    long double used = 0, top = -1;
    for (std::size_t f : on[l]) {
      used += out.rate[f];
      if (!pinned[f]) top = std::max(top, out.rate[f]);
    }
    if (top >= 0 && std::fabs(cap[l] - used) <= 1e-16L * std::max(1.0L, cap[l])) out.share[l] = top;
  }
  return out;
}

inline Filled fill_network(const Network& net) {
  std::vector<long double> cap(net.link_count());
  for (std::size_t l = 0; l < cap.size(); ++l) cap[l] = net.link(l).capacity;
  std::vector<std::vector<std::size_t>> paths(net.flow_count());
  for (std::size_t f = 0; f < paths.size(); ++f) paths[f] = net.path(f);
  return progressive_fill(cap, paths, std::vector<long double>(paths.size(), 0.0L),
                          std::vector<char>(paths.size(), 0));
}

}  // namespace detail

inline OracleSolution waterfill(const Network& net) {
  if (auto v = validate(net); !v.empty()) throw Error(v.front().kind, v.front().message);
  auto filled = detail::fill_network(net);
  OracleSolution out;
  for (auto r : filled.rate) out.rate.push_back(static_cast<double>(r));
  for (auto s : filled.share) out.fair_share.push_back(static_cast<double>(s));
  for (auto l : filled.order) out.saturation_order.push_back(net.link(l).id);
  return out;
}

// One millionth of the smallest positive gap among the solution's finite
// rates and fair shares, floored at 1e-12.
inline double suggest_delta(const Network& net) {
  auto s = waterfill(net);
  std::vector<double> v;
  for (double r : s.rate) v.push_back(r);
  for (double x : s.fair_share)
    if (std::isfinite(x)) v.push_back(x);
  std::sort(v.begin(), v.end());
  double gap = kInf;
  for (std::size_t i = 1; i < v.size(); ++i) {
    double d = v[i] - v[i - 1];
    if (d > eps()) gap = std::min(gap, d);
  }
  if (!std::isfinite(gap)) gap = v.empty() ? 1.0 : std::max(1.0, v.front());
  return std::max(1e-6 * gap, 1e-12);
}

struct FdGradient {
  std::vector<double> link;  // NaN where the fair share is unbounded before or after
  std::vector<double> flow;
  bool feasible = true;      // false if pinning a flow exceeds some link's capacity
};

// One-sided finite difference (solve(x + σδ) − solve(x)) / δ. Link targets
// have their capacity moved; flow targets are pinned at r ± δ.
inline FdGradient fd_gradient(const Network& net, const std::vector<std::string>& targets, int direction,
                              double delta) {
  if (!(delta > 0)) throw Error(ErrorKind::InvalidArgument, "delta must be positive");
  if (direction != 1 && direction != -1) throw Error(ErrorKind::InvalidArgument, "direction must be +1 or -1");
  if (auto v = validate(net); !v.empty()) throw Error(v.front().kind, v.front().message);

  const std::size_t L = net.link_count(), F = net.flow_count();
  std::vector<long double> cap(L);
  for (std::size_t l = 0; l < L; ++l) cap[l] = net.link(l).capacity;
  std::vector<std::vector<std::size_t>> paths(F);
  for (std::size_t f = 0; f < F; ++f) paths[f] = net.path(f);
  auto base = detail::progressive_fill(cap, paths, std::vector<long double>(F, 0), std::vector<char>(F, 0));

  std::vector<long double> pinned_rate(F, 0);
  std::vector<char> pinned(F, 0);
  const long double step = static_cast<long double>(direction) * delta;
  for (const auto& id : targets) {
    if (std::size_t l = net.link_index(id); l != npos) {
      cap[l] += step;
    } else if (std::size_t f = net.flow_index(id); f != npos) {
      pinned[f] = 1;
      pinned_rate[f] = base.rate[f] + step;
    } else {
      throw Error(ErrorKind::UnknownId, "unknown link or flow '" + id + "'");
    }
  }

  FdGradient out;
  std::vector<long double> load(L, 0);
  for (std::size_t f = 0; f < F; ++f)
    if (pinned[f])
      for (std::size_t l : paths[f]) load[l] += pinned_rate[f];
  for (std::size_t l = 0; l < L; ++l)
    if (load[l] > cap[l] * (1 + 1e-15L) || cap[l] <= 0) out.feasible = false;

  auto pert = detail::progressive_fill(cap, paths, pinned_rate, pinned);
  out.flow.resize(F);
  for (std::size_t f = 0; f < F; ++f) out.flow[f] = static_cast<double>((pert.rate[f] - base.rate[f]) / delta);
  out.link.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    bool finite = std::isfinite(static_cast<double>(base.share[l])) && std::isfinite(static_cast<double>(pert.share[l]));
    out.link[l] = finite && !net.flows_on(l).empty()
                      ? static_cast<double>((pert.share[l] - base.share[l]) / delta)
                      : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

inline FdGradient fd_gradient(const Network& net, const std::string& target, int direction, double delta) {
  return fd_gradient(net, std::vector<std::string>{target}, direction, delta);
}

struct RandomLimits {
  std::size_t max_links = 10;
  std::size_t max_flows = 20;
  std::size_t max_path_len = 4;
};

inline double random_capacity(std::mt19937_64& rng) {
  return static_cast<double>(std::uniform_int_distribution<int>(100, 10000)(rng)) / 100.0;
}

// Deterministic per seed. Links no flow uses are dropped.
inline Network random_network(std::uint64_t seed, RandomLimits lim) {
  if (lim.max_links == 0 || lim.max_flows == 0 || lim.max_path_len == 0)
    throw Error(ErrorKind::InvalidArgument, "random_network limits must be positive");
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::size_t nl = pick(1, lim.max_links), nf = pick(1, lim.max_flows);
  std::vector<double> caps(nl);
  for (auto& c : caps) c = random_capacity(rng);

  std::vector<std::size_t> ids(nl);
  std::vector<char> used(nl, 0);
  std::vector<Flow> flows;
  for (std::size_t f = 0; f < nf; ++f) {
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    std::shuffle(ids.begin(), ids.end(), rng);
    std::size_t len = pick(1, std::min(lim.max_path_len, nl));
    Flow fl{"f" + std::to_string(f), {}};
    for (std::size_t k = 0; k < len; ++k) {
      used[ids[k]] = 1;
      fl.links.push_back("l" + std::to_string(ids[k]));
    }
    flows.push_back(std::move(fl));
  }
  std::vector<Link> links;
  for (std::size_t l = 0; l < nl; ++l)
    if (used[l]) links.push_back({"l" + std::to_string(l), caps[l], std::nullopt, std::nullopt});
  return Network(std::move(links), std::move(flows));
}

struct RoutedLimits {
  std::size_t max_routers = 7;
  std::size_t max_links = 14;
  std::size_t max_flows = 10;
};

// Random router graph with simplex links (parallel links allowed) and
// background flows routed along random simple walks.
inline Network random_routed_network(std::uint64_t seed, RoutedLimits lim) {
  if (lim.max_routers < 2 || lim.max_links == 0)
    throw Error(ErrorKind::InvalidArgument, "random_routed_network needs >= 2 routers and >= 1 link");
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::size_t nr = pick(2, lim.max_routers), nl = pick(1, lim.max_links), nf = pick(0, lim.max_flows);
  std::vector<RouterId> routers;
  for (std::size_t r = 0; r < nr; ++r) routers.push_back("u" + std::to_string(r));

  std::vector<Link> links;
  std::vector<std::vector<std::size_t>> out(nr);
  std::vector<std::size_t> dst_of;
  for (std::size_t l = 0; l < nl; ++l) {
    std::size_t a = pick(0, nr - 1), b = pick(0, nr - 2);
    if (b >= a) ++b;
    links.push_back({"l" + std::to_string(l), random_capacity(rng), routers[a], routers[b]});
    out[a].push_back(l);
    dst_of.push_back(b);
  }

  std::vector<Flow> flows;
  for (std::size_t f = 0; f < nf; ++f) {
    std::size_t u = pick(0, nr - 1);
    std::vector<char> seen(nr, 0);
    seen[u] = 1;
    Flow fl{"f" + std::to_string(f), {}};
    std::size_t len = pick(1, nr - 1);
    while (fl.links.size() < len) {
      std::vector<std::size_t> options;
      for (std::size_t l : out[u])
        if (!seen[dst_of[l]]) options.push_back(l);
      if (options.empty()) break;
      std::size_t l = options[pick(0, options.size() - 1)];
      fl.links.push_back(links[l].id);
      u = dst_of[l];
      seen[u] = 1;
    }
    if (!fl.links.empty()) flows.push_back(std::move(fl));
  }
  return Network(std::move(links), std::move(flows), std::move(routers));
}

}  // namespace qtbs
