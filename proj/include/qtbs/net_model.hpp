#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace qtbs {

using LinkId = std::string;
using FlowId = std::string;
using RouterId = std::string;

// Id reserved for the hypothetical flow used by route searches.
inline constexpr std::string_view kProbeFlowId = "__probe__";

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

// Absolute tolerance for comparing rates and fair shares.
inline double eps() {
  static const double value = [] {
    if (const char* s = std::getenv("QTBS_EPS")) {
      char* end = nullptr;
      double v = std::strtod(s, &end);
      if (end != s && v > 0 && std::isfinite(v)) return v;
    }
    return 1e-9;
  }();
  return value;
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Link {
  LinkId id;
  double capacity = 0;
  std::optional<RouterId> src;
  std::optional<RouterId> dst;

  bool operator==(const Link&) const = default;
};

struct Flow {
  FlowId id;
  std::vector<LinkId> links;

  bool operator==(const Flow&) const = default;
};

enum class ErrorKind { DuplicateId, UnknownLink, NonPositiveCapacity, Malformed, ReservedId, UnknownId, InvalidArgument, Unreachable };

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::UnknownLink: return "UnknownLink";
    case ErrorKind::NonPositiveCapacity: return "NonPositiveCapacity";
    case ErrorKind::Malformed: return "Malformed";
    case ErrorKind::ReservedId: return "ReservedId";
    case ErrorKind::UnknownId: return "UnknownId";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Unreachable: return "Unreachable";
  }
  return "?";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(to_string(kind)) + ": " + msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct Violation {
  ErrorKind kind;
  std::string message;
};

// Links and flows are kept sorted by id; indices into links()/flows() are the
// dense handles used by every algorithm. Construction never throws on
// semantic problems (see validate()); parse_network() is the strict entry.
class Network {
 public:
  Network() = default;

  Network(std::vector<Link> links, std::vector<Flow> flows, std::vector<RouterId> routers = {})
      : links_(std::move(links)), flows_(std::move(flows)), routers_(std::move(routers)) {
    auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
    std::stable_sort(links_.begin(), links_.end(), by_id);
    std::stable_sort(flows_.begin(), flows_.end(), by_id);
    std::sort(routers_.begin(), routers_.end());
    index();
  }

  const std::vector<Link>& links() const { return links_; }
  const std::vector<Flow>& flows() const { return flows_; }
  const std::vector<RouterId>& routers() const { return routers_; }
  std::size_t link_count() const { return links_.size(); }
  std::size_t flow_count() const { return flows_.size(); }

  const Link& link(std::size_t i) const { return links_.at(i); }
  const Flow& flow(std::size_t i) const { return flows_.at(i); }

  std::size_t link_index(std::string_view id) const { return find(link_idx_, id); }
  std::size_t flow_index(std::string_view id) const { return find(flow_idx_, id); }

  // Link indices of a flow's path in path order; unknown links are skipped.
  const std::vector<std::size_t>& path(std::size_t f) const { return paths_.at(f); }
  // Flow indices traversing link l, ascending.
  const std::vector<std::size_t>& flows_on(std::size_t l) const { return on_link_.at(l); }

  // All routers: the declared list plus any link endpoint, sorted.
  std::vector<RouterId> all_routers() const {
    std::set<RouterId> s(routers_.begin(), routers_.end());
    for (const auto& l : links_) {
      if (l.src) s.insert(*l.src);
      if (l.dst) s.insert(*l.dst);
    }
    return {s.begin(), s.end()};
  }

  Network with_flow(Flow f) const {
    auto flows = flows_;
    flows.push_back(std::move(f));
    return Network(links_, std::move(flows), routers_);
  }

  Network with_link(Link l) const {
    auto links = links_;
    links.push_back(std::move(l));
    return Network(std::move(links), flows_, routers_);
  }

  bool operator==(const Network& o) const {
    return links_ == o.links_ && flows_ == o.flows_ && routers_ == o.routers_;
  }

 private:
  static std::size_t find(const std::map<std::string, std::size_t, std::less<>>& m, std::string_view id) {
    auto it = m.find(id);
    return it == m.end() ? npos : it->second;
  }

  void index() {
    for (std::size_t i = 0; i < links_.size(); ++i) link_idx_.emplace(links_[i].id, i);
    for (std::size_t i = 0; i < flows_.size(); ++i) flow_idx_.emplace(flows_[i].id, i);
    on_link_.assign(links_.size(), {});
    paths_.assign(flows_.size(), {});
    for (std::size_t f = 0; f < flows_.size(); ++f) {
      for (const auto& lid : flows_[f].links) {
        std::size_t l = link_index(lid);
        if (l == npos) continue;
        if (std::find(paths_[f].begin(), paths_[f].end(), l) != paths_[f].end()) continue;
        paths_[f].push_back(l);
        on_link_[l].push_back(f);
      }
    }
  }

  std::vector<Link> links_;
  std::vector<Flow> flows_;
  std::vector<RouterId> routers_;
  std::map<std::string, std::size_t, std::less<>> link_idx_;
  std::map<std::string, std::size_t, std::less<>> flow_idx_;
  std::vector<std::vector<std::size_t>> paths_;
  std::vector<std::vector<std::size_t>> on_link_;
};

inline std::vector<Violation> validate(const Network& net) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i + 1 < net.link_count(); ++i)
    if (net.link(i).id == net.link(i + 1).id)
      out.push_back({ErrorKind::DuplicateId, "duplicate link id '" + net.link(i).id + "'"});
  for (std::size_t i = 0; i + 1 < net.flow_count(); ++i)
    if (net.flow(i).id == net.flow(i + 1).id)
      out.push_back({ErrorKind::DuplicateId, "duplicate flow id '" + net.flow(i).id + "'"});
  for (const auto& l : net.links()) {
    if (!(l.capacity > 0) || !std::isfinite(l.capacity))
      out.push_back({ErrorKind::NonPositiveCapacity, "link '" + l.id + "' has capacity " + std::to_string(l.capacity)});
    if (l.src.has_value() != l.dst.has_value())
      out.push_back({ErrorKind::Malformed, "link '" + l.id + "' has only one endpoint"});
  }
  for (const auto& f : net.flows()) {
    if (f.links.empty()) out.push_back({ErrorKind::Malformed, "flow '" + f.id + "' has an empty path"});
    std::set<LinkId> seen;
    for (const auto& lid : f.links) {
      if (net.link_index(lid) == npos)
        out.push_back({ErrorKind::UnknownLink, "flow '" + f.id + "' references unknown link '" + lid + "'"});
      if (!seen.insert(lid).second)
        out.push_back({ErrorKind::Malformed, "flow '" + f.id + "' repeats link '" + lid + "'"});
    }
  }
  return out;
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                                const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw Error(ErrorKind::Malformed, "unknown field '" + key + "' in " + where);
  }
}

inline std::string get_string(const nlohmann::json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) throw Error(ErrorKind::Malformed, where + " needs string '" + key + "'");
  return it->get<std::string>();
}

}  // namespace detail

// Strict parser: any violation throws qtbs::Error with its own kind.
inline Network network_from_json(const nlohmann::json& doc) {
  using detail::get_string;
  if (!doc.is_object()) throw Error(ErrorKind::Malformed, "document must be an object");
  detail::reject_unknown_keys(doc, {"routers", "links", "flows"}, "document");
  if (!doc.contains("links") || !doc["links"].is_array())
    throw Error(ErrorKind::Malformed, "'links' must be an array");
  if (!doc.contains("flows") || !doc["flows"].is_array())
    throw Error(ErrorKind::Malformed, "'flows' must be an array");

  std::vector<RouterId> routers;
  if (doc.contains("routers")) {
    if (!doc["routers"].is_array()) throw Error(ErrorKind::Malformed, "'routers' must be an array");
    std::set<RouterId> seen;
    for (const auto& r : doc["routers"]) {
      if (!r.is_string()) throw Error(ErrorKind::Malformed, "router ids must be strings");
      if (!seen.insert(r.get<std::string>()).second)
        throw Error(ErrorKind::DuplicateId, "duplicate router id '" + r.get<std::string>() + "'");
      routers.push_back(r.get<std::string>());
    }
  }

  std::vector<Link> links;
  std::set<LinkId> link_ids;
  for (const auto& j : doc["links"]) {
    if (!j.is_object()) throw Error(ErrorKind::Malformed, "link entries must be objects");
    detail::reject_unknown_keys(j, {"id", "capacity", "src", "dst"}, "link");
    Link l;
    l.id = get_string(j, "id", "link");
    if (!j.contains("capacity") || !j["capacity"].is_number())
      throw Error(ErrorKind::Malformed, "link '" + l.id + "' needs numeric 'capacity'");
    l.capacity = j["capacity"].get<double>();
    if (j.contains("src")) l.src = get_string(j, "src", "link '" + l.id + "'");
    if (j.contains("dst")) l.dst = get_string(j, "dst", "link '" + l.id + "'");
    if (l.src.has_value() != l.dst.has_value())
      throw Error(ErrorKind::Malformed, "link '" + l.id + "' needs both 'src' and 'dst' or neither");
    if (!link_ids.insert(l.id).second) throw Error(ErrorKind::DuplicateId, "duplicate link id '" + l.id + "'");
    if (!std::isfinite(l.capacity) || l.capacity <= 0)
      throw Error(ErrorKind::NonPositiveCapacity, "link '" + l.id + "' capacity must be > 0");
    links.push_back(std::move(l));
  }

  std::vector<Flow> flows;
  std::set<FlowId> flow_ids;
  for (const auto& j : doc["flows"]) {
    if (!j.is_object()) throw Error(ErrorKind::Malformed, "flow entries must be objects");
    detail::reject_unknown_keys(j, {"id", "links"}, "flow");
    Flow f;
    f.id = get_string(j, "id", "flow");
    if (f.id == kProbeFlowId) throw Error(ErrorKind::ReservedId, "flow id '" + f.id + "' is reserved");
    if (!flow_ids.insert(f.id).second) throw Error(ErrorKind::DuplicateId, "duplicate flow id '" + f.id + "'");
    if (!j.contains("links") || !j["links"].is_array() || j["links"].empty())
      throw Error(ErrorKind::Malformed, "flow '" + f.id + "' needs a non-empty 'links' array");
    for (const auto& lj : j["links"]) {
      if (!lj.is_string()) throw Error(ErrorKind::Malformed, "flow '" + f.id + "' link ids must be strings");
      auto lid = lj.get<std::string>();
      if (!link_ids.count(lid))
        throw Error(ErrorKind::UnknownLink, "flow '" + f.id + "' references unknown link '" + lid + "'");
      if (std::find(f.links.begin(), f.links.end(), lid) != f.links.end())
        throw Error(ErrorKind::Malformed, "flow '" + f.id + "' repeats link '" + lid + "'");
      f.links.push_back(std::move(lid));
    }
    flows.push_back(std::move(f));
  }
  return Network(std::move(links), std::move(flows), std::move(routers));
}

inline Network parse_network(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Malformed, e.what());
  }
  return network_from_json(doc);
}

inline nlohmann::json network_to_json(const Network& net) {
  nlohmann::json doc = nlohmann::json::object();
  if (!net.routers().empty()) doc["routers"] = net.routers();
  auto links = nlohmann::json::array();
  for (const auto& l : net.links()) {
    nlohmann::json j = {{"id", l.id}, {"capacity", l.capacity}};
    if (l.src) j["src"] = *l.src;
    if (l.dst) j["dst"] = *l.dst;
    links.push_back(std::move(j));
  }
  auto flows = nlohmann::json::array();
  for (const auto& f : net.flows()) flows.push_back({{"id", f.id}, {"links", f.links}});
  doc["links"] = std::move(links);
  doc["flows"] = std::move(flows);
  return doc;
}

inline std::string serialize(const Network& net) { return network_to_json(net).dump(2) + "\n"; }

}  // namespace qtbs
