#pragma once

#include "qtbs/gradients.hpp"

namespace qtbs {

struct ShapingAction {
  FlowId flow;
  double shaper_rate = 0;
  double predicted_target_rate = 0;
};

struct ShapingPlan {
  FlowId target;
  std::vector<FlowId> low_priority;
  double floor_rate = 0;
  double initial_target_rate = 0;
  std::vector<ShapingAction> actions;
  std::string stop_reason;

  double final_target_rate() const {
    return actions.empty() ? initial_target_rate : actions.back().predicted_target_rate;
  }
};

inline std::string shaper_link_id(const FlowId& flow) { return "shaper:" + flow; }

// Adds one private link per action, capacity = shaper rate, crossed only by
// the shaped flow.
inline Network apply_actions(const Network& net, const std::vector<ShapingAction>& actions) {
  std::vector<Link> links = net.links();
  std::vector<Flow> flows = net.flows();
  std::set<FlowId> shaped;
  for (const auto& a : actions) {
    std::size_t f = net.flow_index(a.flow);
    if (f == npos) throw Error(ErrorKind::UnknownId, "plan shapes unknown flow '" + a.flow + "'");
    if (!shaped.insert(a.flow).second) throw Error(ErrorKind::DuplicateId, "flow '" + a.flow + "' shaped twice");
    std::string id = shaper_link_id(a.flow);
    if (net.link_index(id) != npos) throw Error(ErrorKind::DuplicateId, "flow '" + a.flow + "' already has a shaper link");
    if (!(a.shaper_rate > 0)) throw Error(ErrorKind::NonPositiveCapacity, "shaper rate for '" + a.flow + "' must be > 0");
    links.push_back({id, a.shaper_rate, std::nullopt, std::nullopt});
    flows[f].links.push_back(id);
  }
  return Network(std::move(links), std::move(flows), net.routers());
}

inline Network apply_plan(const Network& net, const ShapingPlan& plan) { return apply_actions(net, plan.actions); }

// Smallest step t > 0 at which moving every fair share along its drift
// changes the bottleneck structure: two finite fair shares meet, or a
// non-bottleneck link runs out of spare capacity. +inf if neither happens.
inline double next_breakpoint(const BottleneckSolution& sol, const GradientResult& g) {
  const Network& net = sol.net();
  const double tol = eps();
  double best = kInf;
  std::vector<std::size_t> finite;
  for (std::size_t l = 0; l < net.link_count(); ++l)
    if (!net.flows_on(l).empty() && std::isfinite(sol.fair_share[l])) finite.push_back(l);
  for (std::size_t i = 0; i < finite.size(); ++i)
    for (std::size_t j = 0; j < finite.size(); ++j) {
      std::size_t a = finite[i], b = finite[j];
      double gap = sol.fair_share[b] - sol.fair_share[a];
      double closing = g.link_gradient[a] - g.link_gradient[b];
      if (gap > tol && closing > tol) best = std::min(best, gap / closing);
    }
  for (std::size_t l = 0; l < net.link_count(); ++l) {
    if (net.flows_on(l).empty() || std::isfinite(sol.fair_share[l])) continue;
    double used = 0, growth = 0;
    for (std::size_t f : net.flows_on(l)) {
      used += sol.rate[f];
      growth += g.flow_gradient[f];
    }
    double spare = net.link(l).capacity - used;
    if (growth > tol) best = std::min(best, std::max(spare, 0.0) / growth);
  }
  return best;
}

// Greedy shaping of low-priority flows to speed up `target`. Each stage
// lowers one flow (or, when the target has several bottlenecks, one flow per
// bottleneck by a common amount) up to the next structural change or the
// floor, then re-solves.
inline ShapingPlan accelerate_flow(const Network& net, const FlowId& target, const std::vector<FlowId>& low_priority,
                                   double floor_rate) {
  if (net.flow_index(target) == npos) throw Error(ErrorKind::UnknownId, "unknown target flow '" + target + "'");
  if (low_priority.empty()) throw Error(ErrorKind::InvalidArgument, "low-priority set is empty");
  if (!(floor_rate >= 0) || !std::isfinite(floor_rate)) throw Error(ErrorKind::InvalidArgument, "floor rate must be >= 0");
  std::set<FlowId> pool;
  for (const auto& f : low_priority) {
    if (net.flow_index(f) == npos) throw Error(ErrorKind::UnknownId, "unknown low-priority flow '" + f + "'");
    if (f == target) throw Error(ErrorKind::InvalidArgument, "target flow cannot be low priority");
    pool.insert(f);
  }

  const double tol = eps();
  ShapingPlan plan;
  plan.target = target;
  plan.low_priority.assign(pool.begin(), pool.end());
  plan.floor_rate = floor_rate;

  auto sol = gradient_graph(net);
  plan.initial_target_rate = sol.rate_of(target);
  double min_initial = *std::min_element(sol.rate.begin(), sol.rate.end());
  double keep_above = std::min(floor_rate, min_initial);

  std::set<FlowId> shaped;
  for (;;) {
    const Network& cur = sol.net();
    const std::size_t t = cur.flow_index(target);
    std::vector<std::size_t> candidates;
    for (const auto& id : pool) {
      std::size_t f = cur.flow_index(id);
      if (!shaped.count(id) && sol.rate[f] > std::max(floor_rate, tol) + tol) candidates.push_back(f);
    }
    if (candidates.empty()) {
      plan.stop_reason = "no low-priority flow can be lowered further";
      break;
    }

    const auto& bottlenecks = sol.bottlenecks_of[t];
    std::vector<std::size_t> chosen;
    if (bottlenecks.size() > candidates.size()) {
      plan.stop_reason = "target has more bottlenecks than candidates";
      break;
    }
    std::map<std::size_t, GradientResult> single;
    for (std::size_t c : candidates) {
      auto g = forward_grad(sol, Perturbation{{sol.graph.flow_vertex(c)}, -1});
      if (!g.degenerate) single.emplace(c, std::move(g));
    }
    if (bottlenecks.size() == 1) {
      double best = tol;
      for (const auto& [c, g] : single)
        if (g.flow_gradient[t] > best) {
          best = g.flow_gradient[t];
          chosen = {c};
        }
      if (chosen.empty()) {
        plan.stop_reason = "no candidate raises the target";
        break;
      }
    } else {
      std::set<std::size_t> picked;
      bool covered = true;
      for (std::size_t b : bottlenecks) {
        double best = tol;
        std::size_t pick = npos;
        for (const auto& [c, g] : single)
          if (g.link_gradient[b] > best) {
            best = g.link_gradient[b];
            pick = c;
          }
        if (pick == npos) {
          covered = false;
          break;
        }
        picked.insert(pick);
      }
      if (!covered) {
        plan.stop_reason = "some bottleneck of the target has no improving candidate";
        break;
      }
      chosen.assign(picked.begin(), picked.end());
    }

    Perturbation p{{}, -1};
    for (std::size_t c : chosen) p.targets.push_back(sol.graph.flow_vertex(c));
    auto g = forward_grad(sol, p);
    if (g.degenerate || g.flow_gradient[t] <= tol) {
      plan.stop_reason = "joint shaping does not raise the target";
      break;
    }

    double rho = next_breakpoint(sol, g);
    for (std::size_t f = 0; f < cur.flow_count(); ++f) {
      double d = g.flow_gradient[f];
      if (d >= -tol) continue;
      bool is_chosen = std::find(chosen.begin(), chosen.end(), f) != chosen.end();
      double bound = is_chosen ? std::max(floor_rate, tol) : keep_above;
      rho = std::min(rho, (sol.rate[f] - bound) / -d);
    }
    if (!(rho > tol) || !std::isfinite(rho)) {
      plan.stop_reason = "no room to lower the chosen flows";
      break;
    }

    const double before = sol.rate[t];
    std::vector<ShapingAction> stage;
    for (std::size_t c : chosen) stage.push_back({cur.flow(c).id, sol.rate[c] - rho, 0.0});
    for (auto& a : stage) {
      plan.actions.push_back(a);
      plan.actions.back().predicted_target_rate = gradient_graph(apply_actions(net, plan.actions)).rate_of(target);
    }
    auto next = gradient_graph(apply_actions(net, plan.actions));
    if (next.rate_of(target) - before <= tol) {
      plan.actions.resize(plan.actions.size() - stage.size());
      plan.stop_reason = "target gained nothing";
      break;
    }
    for (const auto& a : stage) shaped.insert(a.flow);
    sol = std::move(next);
  }
  return plan;
}

struct TaperTemplate {
  Network network;
  std::vector<LinkId> scale_links;
  double lambda = 1;
  double tau0 = 1;
};

struct TaperReport {
  double tau_star = 0;
  double spine_capacity_at_fold = 0;
  double tau_below = 0, tau_above = 0;
  std::vector<double> rates_below, rates_at, rates_above;  // by flow index
  std::vector<std::pair<double, double>> slowest_flow_rate;  // (tau, slowest rate)
  bool used_bisection = false;
  std::size_t steps = 0;
};

inline Network scaled_network(const TaperTemplate& t, double tau) {
  std::vector<Link> links = t.network.links();
  for (const auto& id : t.scale_links) {
    auto it = std::find_if(links.begin(), links.end(), [&](const Link& l) { return l.id == id; });
    if (it == links.end()) throw Error(ErrorKind::UnknownLink, "scale link '" + id + "' not in network");
    it->capacity = t.lambda * tau;
  }
  return Network(std::move(links), t.network.flows(), t.network.routers());
}

namespace detail {

inline double rate_gap(const BottleneckSolution& s) {
  auto [lo, hi] = std::minmax_element(s.rate.begin(), s.rate.end());
  return *hi - *lo;
}

}  // namespace detail

// Fold point of a tapered fat-tree: the smallest tau at which raising the
// scaled links merges all flow rates into one level.
inline TaperReport taper_fold(const TaperTemplate& t) {
  if (t.scale_links.empty()) throw Error(ErrorKind::InvalidArgument, "no scale links given");
  if (!(t.lambda > 0) || !(t.tau0 > 0)) throw Error(ErrorKind::InvalidArgument, "lambda and tau0 must be > 0");
  const double tol = eps();
  auto solve = [&](double tau) { return gradient_graph(scaled_network(t, tau)); };

  TaperReport rep;
  auto sol = solve(t.tau0);
  if (sol.rate.empty()) throw Error(ErrorKind::InvalidArgument, "network has no flows");
  if (detail::rate_gap(sol) < tol) throw Error(ErrorKind::InvalidArgument, "structure is already folded at tau0");

  double tau = t.tau0;
  bool folded = false;
  for (std::size_t step = 0; step < 4 * (sol.net().link_count() + sol.net().flow_count()) + 8; ++step) {
    ++rep.steps;
    auto g = forward_grad(sol, t.scale_links, +1);

    // Flows sharing a rate are one level; their drifts must agree for the
    // linear fold equation to apply.
    bool uniform = !g.degenerate;
    for (std::size_t a = 0; a < sol.rate.size() && uniform; ++a)
      for (std::size_t b = a + 1; b < sol.rate.size(); ++b)
        if (std::fabs(sol.rate[a] - sol.rate[b]) < tol && std::fabs(g.flow_gradient[a] - g.flow_gradient[b]) > tol) {
          uniform = false;
          break;
        }
    if (!uniform) {
      rep.used_bisection = true;
      break;
    }

    // Per unit of tau every scaled link gains lambda of capacity.
    double dc = next_breakpoint(sol, g);
    if (!std::isfinite(dc)) break;
    tau += dc / t.lambda;
    sol = solve(tau);
    if (detail::rate_gap(sol) < tol) {
      folded = true;
      break;
    }
  }

  if (!folded) {
    // Bisection on "all rates equal", which stays true once reached.
    rep.used_bisection = true;
    double lo = t.tau0, hi = std::max(tau, t.tau0) * 2;
    int guard = 0;
    while (detail::rate_gap(solve(hi)) >= tol) {
      lo = hi;
      hi *= 2;
      if (++guard > 60) throw Error(ErrorKind::InvalidArgument, "rates never fold as tau grows");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
      double mid = 0.5 * (lo + hi);
      (detail::rate_gap(solve(mid)) < tol ? hi : lo) = mid;
    }
    tau = hi;
  }

  rep.tau_star = tau;
  rep.spine_capacity_at_fold = t.lambda * tau;
  rep.tau_below = 0.5 * (t.tau0 + tau);
  rep.tau_above = 2 * tau - t.tau0;
  rep.rates_below = solve(rep.tau_below).rate;
  rep.rates_at = solve(tau).rate;
  rep.rates_above = solve(rep.tau_above).rate;
  for (int i = 0; i <= 8; ++i) {
    double x = t.tau0 + (rep.tau_above - t.tau0) * i / 8.0;
    auto r = solve(x).rate;
    rep.slowest_flow_rate.emplace_back(x, *std::min_element(r.begin(), r.end()));
  }
  return rep;
}

}  // namespace qtbs
