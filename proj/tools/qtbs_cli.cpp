#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qtbs/qtbs.hpp"

using json = nlohmann::ordered_json;
using namespace qtbs;

namespace {

Network load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str());
}

std::vector<std::string> split_ids(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string part; std::getline(ss, part, ',');)
    if (!part.empty()) out.push_back(part);
  return out;
}

json envelope(const std::string& command, json args, const Network& net) {
  return {{"schema", 1},
          {"command", {{"name", command}, {"args", std::move(args)}}},
          {"network", {{"links", net.link_count()}, {"flows", net.flow_count()}}}};
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

// Left-aligned plain text table.
void print_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> w(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) w[i] = header[i].size();
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::max(w[i], r[i].size());
  auto line = [&](const std::vector<std::string>& r) {
    std::string s;
    for (std::size_t i = 0; i < r.size(); ++i) {
      s += r[i];
      if (i + 1 < r.size()) s += std::string(w[i] - r[i].size() + 2, ' ');
    }
    std::cout << s << "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
}

std::string join(const std::vector<std::string>& v, const char* sep = ",") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

struct Options {
  std::string file;
  std::string format = "table";
  bool backward = false;
  std::string target;
  std::string direction = "up";
  std::string src, dst;
  std::string low_priority;
  double floor = 0;
  std::string scale_links;
  double lambda = 1, tau0 = 1;
};

int cmd_solve(const Options& o) {
  auto net = load(o.file);
  auto sol = gradient_graph(net);
  if (o.format == "dot") {
    std::cout << to_dot(sol, o.backward);
    return 0;
  }
  double jain = net.flow_count() ? jain_index(sol.rate) : 1.0;
  if (o.format == "json") {
    auto j = envelope("solve", {{"file", o.file}, {"backward_edges", o.backward}}, net);
    j["result"] = solution_json(sol, o.backward);
    j["jain_index"] = jain;
    print_json(j);
    return 0;
  }
  std::vector<std::vector<std::string>> rows;
  for (std::size_t f = 0; f < net.flow_count(); ++f) {
    std::vector<std::string> b;
    for (auto l : sol.bottlenecks_of[f]) b.push_back(net.link(l).id);
    rows.push_back({net.flow(f).id, fixed3(sol.rate[f]), join(b), std::to_string(sol.level[sol.graph.flow_vertex(f)])});
  }
  print_table({"flow", "rate", "bottlenecks", "level"}, rows);
  std::cout << "\n";
  rows.clear();
  for (std::size_t l = 0; l < net.link_count(); ++l)
    rows.push_back({net.link(l).id, fixed3(net.link(l).capacity), fixed3(sol.fair_share[l]),
                    std::to_string(sol.level[sol.graph.link_vertex(l)])});
  print_table({"link", "capacity", "fair_share", "level"}, rows);
  std::cout << "\njain_index " << fixed3(jain) << "\n";
  return 0;
}

int cmd_grad(const Options& o) {
  auto net = load(o.file);
  auto sol = gradient_graph(net);
  int dir = o.direction == "up" ? +1 : -1;
  auto g = forward_grad(sol, o.target, dir);
  double bound = gradient_bound(sol);

  struct Item {
    std::string id;
    bool link;
    double value;
  };
  std::vector<Item> items;
  for (std::size_t f = 0; f < net.flow_count(); ++f)
    if (std::fabs(g.flow_gradient[f]) > eps()) items.push_back({net.flow(f).id, false, g.flow_gradient[f]});
  for (std::size_t l = 0; l < net.link_count(); ++l)
    if (std::fabs(g.link_gradient[l]) > eps()) items.push_back({net.link(l).id, true, g.link_gradient[l]});
  // Flows first, then links; each by decreasing magnitude, ties by id.
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.link != b.link) return !a.link;
    if (std::fabs(a.value) != std::fabs(b.value)) return std::fabs(a.value) > std::fabs(b.value);
    return a.id < b.id;
  });

  if (o.format == "json") {
    auto j = envelope("grad", {{"file", o.file}, {"target", o.target}, {"direction", o.direction}}, net);
    json flows = json::array(), links = json::array();
    for (const auto& it : items) (it.link ? links : flows).push_back({{"id", it.id}, {"gradient", it.value}});
    j["result"] = {{"target", o.target},
                   {"direction", o.direction},
                   {"flow_gradients", flows},
                   {"link_gradients", links},
                   {"all_zero", items.empty()},
                   {"degenerate", g.degenerate},
                   {"bound", bound}};
    print_json(j);
    return 0;
  }
  std::cout << "gradients w.r.t. " << o.target << " (" << o.direction << ")\n";
  if (items.empty()) {
    std::cout << "all gradients zero\n";
  } else {
    std::vector<std::vector<std::string>> rows;
    for (const auto& it : items) rows.push_back({it.link ? "link" : "flow", it.id, fixed3(it.value)});
    print_table({"kind", "id", "gradient"}, rows);
  }
  if (g.degenerate) std::cout << "warning: perturbation creates a new bottleneck; values are not a derivative\n";
  std::cout << "bound " << fixed3(bound) << "\n";
  return 0;
}

int cmd_route(const Options& o) {
  auto net = load(o.file);
  auto best = max_rate_path(net, o.src, o.dst);
  auto hop = min_hop_path(net, o.src, o.dst);
  double hop_rate = rate_if_routed(net, hop);
  if (o.format == "json") {
    auto j = envelope("route", {{"file", o.file}, {"src", o.src}, {"dst", o.dst}}, net);
    json dist = json::object();
    for (const auto& [r, d] : best.distance) dist[r] = json_number(d);
    j["result"] = {{"path", best.links},
                   {"rate", best.predicted_rate},
                   {"min_hop_path", hop},
                   {"min_hop_rate", hop_rate},
                   {"distance", dist}};
    print_json(j);
    return 0;
  }
  std::cout << "max-rate path  " << join(best.links, " -> ") << "  rate " << fixed3(best.predicted_rate) << "\n";
  std::cout << "min-hop path   " << join(hop, " -> ") << "  rate " << fixed3(hop_rate) << "\n";
  return 0;
}

int cmd_shape(const Options& o) {
  auto net = load(o.file);
  auto plan = accelerate_flow(net, o.target, split_ids(o.low_priority), o.floor);
  auto after = gradient_graph(apply_plan(net, plan));
  double jain = jain_index(after.rate);
  if (o.format == "json") {
    auto j = envelope("shape", {{"file", o.file}, {"target", o.target}, {"low_priority", o.low_priority}, {"floor", o.floor}},
                      net);
    json actions = json::array();
    for (const auto& a : plan.actions)
      actions.push_back({{"flow", a.flow}, {"shaper_rate", a.shaper_rate}, {"predicted_target_rate", a.predicted_target_rate}});
    json rates = json::object();
    for (std::size_t f = 0; f < net.flow_count(); ++f) rates[net.flow(f).id] = after.rate[f];
    j["result"] = {{"target", plan.target},
                   {"initial_target_rate", plan.initial_target_rate},
                   {"final_target_rate", plan.final_target_rate()},
                   {"actions", actions},
                   {"stop_reason", plan.stop_reason},
                   {"rates_after", rates}};
    j["jain_index"] = jain;
    print_json(j);
    return 0;
  }
  std::cout << "target " << plan.target << " initial rate " << fixed3(plan.initial_target_rate) << "\n";
  if (plan.actions.empty()) {
    std::cout << "empty plan\n";
  } else {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < plan.actions.size(); ++i) {
      const auto& a = plan.actions[i];
      rows.push_back({std::to_string(i + 1), a.flow, fixed3(a.shaper_rate), fixed3(a.predicted_target_rate)});
    }
    print_table({"step", "flow", "shaper_rate", "target_rate"}, rows);
  }
  std::cout << "final target rate " << fixed3(plan.final_target_rate()) << "\n";
  std::cout << "stop: " << plan.stop_reason << "\n";
  std::cout << "jain_index " << fixed3(jain) << "\n";
  return 0;
}

int cmd_taper(const Options& o) {
  auto net = load(o.file);
  TaperTemplate t{net, split_ids(o.scale_links), o.lambda, o.tau0};
  auto rep = taper_fold(t);
  if (o.format == "json") {
    auto j = envelope(
        "taper", {{"file", o.file}, {"scale_links", o.scale_links}, {"lambda", o.lambda}, {"tau0", o.tau0}}, net);
    auto rates = [&](const std::vector<double>& r) {
      json m = json::object();
      for (std::size_t f = 0; f < net.flow_count(); ++f) m[net.flow(f).id] = r[f];
      return m;
    };
    json samples = json::array();
    for (const auto& [tau, r] : rep.slowest_flow_rate) samples.push_back({{"tau", tau}, {"slowest_rate", r}});
    j["result"] = {{"tau_star", rep.tau_star},
                   {"spine_capacity_at_fold", rep.spine_capacity_at_fold},
                   {"used_bisection", rep.used_bisection},
                   {"tau_below", rep.tau_below},
                   {"tau_above", rep.tau_above},
                   {"rates_below", rates(rep.rates_below)},
                   {"rates_at", rates(rep.rates_at)},
                   {"rates_above", rates(rep.rates_above)},
                   {"slowest_flow_rate", samples}};
    print_json(j);
    return 0;
  }
  std::cout << "tau* " << fixed3(rep.tau_star) << "  scaled capacity " << fixed3(rep.spine_capacity_at_fold) << "\n";
  std::vector<std::vector<std::string>> rows;
  for (std::size_t f = 0; f < net.flow_count(); ++f)
    rows.push_back({net.flow(f).id, fixed3(rep.rates_below[f]), fixed3(rep.rates_at[f]), fixed3(rep.rates_above[f])});
  print_table({"flow", "tau=" + fixed3(rep.tau_below), "tau*", "tau=" + fixed3(rep.tau_above)}, rows);
  std::cout << "\n";
  rows.clear();
  for (const auto& [tau, r] : rep.slowest_flow_rate) rows.push_back({fixed3(tau), fixed3(r)});
  print_table({"tau", "slowest_rate"}, rows);
  return 0;
}

int cmd_export(const Options& o) {
  std::cout << to_dot(gradient_graph(load(o.file)), o.backward);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bottleneck structure analysis of max-min fair networks"};
  app.require_subcommand(1);
  Options o;

  auto add_file = [&](CLI::App* sub) { sub->add_option("file", o.file, "network JSON file")->required(); };
  auto add_format = [&](CLI::App* sub, std::vector<std::string> choices) {
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember(choices));
  };

  auto* solve = app.add_subcommand("solve", "max-min rates, fair shares and gradient graph");
  add_file(solve);
  add_format(solve, {"table", "json", "dot"});
  solve->add_flag("--backward-edges", o.backward, "include flow-to-bottleneck edges in graph output");

  auto* grad = app.add_subcommand("grad", "gradients with respect to one link or flow");
  add_file(grad);
  add_format(grad, {"table", "json"});
  grad->add_option("--target", o.target, "link or flow id")->required();
  grad->add_option("--direction", o.direction, "perturbation direction")->check(CLI::IsMember({"up", "down"}));

  auto* route = app.add_subcommand("route", "flow-rate maximal path for a new flow");
  add_file(route);
  add_format(route, {"table", "json"});
  route->add_option("--src", o.src, "source router")->required();
  route->add_option("--dst", o.dst, "destination router")->required();

  auto* shape = app.add_subcommand("shape", "traffic-shaping plan that speeds up a target flow");
  add_file(shape);
  add_format(shape, {"table", "json"});
  shape->add_option("--target", o.target, "flow to accelerate")->required();
  shape->add_option("--low-priority", o.low_priority, "comma-separated flows that may be shaped")->required();
  shape->add_option("--floor", o.floor, "lowest rate a shaped flow may get")->required();

  auto* taper = app.add_subcommand("taper", "fold point of a tapered fat-tree");
  add_file(taper);
  add_format(taper, {"table", "json"});
  taper->add_option("--scale-links", o.scale_links, "comma-separated links with capacity lambda*tau")->required();
  taper->add_option("--lambda", o.lambda, "leaf capacity")->required();
  taper->add_option("--tau0", o.tau0, "starting tapering ratio");

  auto* exp = app.add_subcommand("export", "gradient graph as Graphviz DOT");
  add_file(exp);
  exp->add_flag("--backward-edges", o.backward, "include flow-to-bottleneck edges");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(o);
    if (grad->parsed()) return cmd_grad(o);
    if (route->parsed()) return cmd_route(o);
    if (shape->parsed()) return cmd_shape(o);
    if (taper->parsed()) return cmd_taper(o);
    if (exp->parsed()) return cmd_export(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
