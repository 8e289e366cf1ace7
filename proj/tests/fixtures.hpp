#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "qtbs/qtbs.hpp"

namespace qtbs::testing {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string data_path(const std::string& name) { return std::string(QTBS_DATA_DIR) + "/" + name + ".json"; }

inline Network fixture(const std::string& name) { return parse_network(read_file(data_path(name))); }

inline double flow_grad(const BottleneckSolution& s, const GradientResult& g, const std::string& flow) {
  return g.flow_gradient.at(s.net().flow_index(flow));
}

inline double link_grad(const BottleneckSolution& s, const GradientResult& g, const std::string& link) {
  return g.link_gradient.at(s.net().link_index(link));
}

}  // namespace qtbs::testing
