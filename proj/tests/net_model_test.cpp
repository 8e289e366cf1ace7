#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace qtbs;
using qtbs::testing::fixture;

namespace {

ErrorKind parse_error_kind(const std::string& text) {
  try {
    parse_network(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(ParseNetwork, MinimalDocument) {
  auto net = parse_network(R"({"links":[{"id":"l1","capacity":10}],"flows":[{"id":"f1","links":["l1"]}]})");
  EXPECT_EQ(net.link_count(), 1u);
  EXPECT_EQ(net.flow_count(), 1u);
  EXPECT_EQ(net.flows_on(0), std::vector<std::size_t>{0});
  EXPECT_FALSE(net.link(0).src.has_value());
}

TEST(ParseNetwork, B4FixtureHas48Flows) {
  auto net = fixture("b4");
  EXPECT_EQ(net.flow_count(), 48u);
  EXPECT_EQ(net.link_count(), 38u);
  EXPECT_EQ(net.all_routers().size(), 12u);
  EXPECT_TRUE(validate(net).empty());
}

TEST(ParseNetwork, DistinctErrorKinds) {
  EXPECT_EQ(parse_error_kind(R"({"links":[{"id":"l1","capacity":10}],"flows":[{"id":"f1","links":["l99"]}]})"),
            ErrorKind::UnknownLink);
  EXPECT_EQ(parse_error_kind(R"({"links":[{"id":"l1","capacity":1},{"id":"l1","capacity":2}],"flows":[]})"),
            ErrorKind::DuplicateId);
  EXPECT_EQ(parse_error_kind(
                R"({"links":[{"id":"l1","capacity":1}],"flows":[{"id":"f","links":["l1"]},{"id":"f","links":["l1"]}]})"),
            ErrorKind::DuplicateId);
  EXPECT_EQ(parse_error_kind(R"({"links":[{"id":"l1","capacity":0}],"flows":[]})"), ErrorKind::NonPositiveCapacity);
  EXPECT_EQ(parse_error_kind(R"({"links":[{"id":"l1","capacity":-3}],"flows":[]})"), ErrorKind::NonPositiveCapacity);
  EXPECT_EQ(parse_error_kind(R"({"links":[{"id":"l1","capacity":1}],"flows":[{"id":"__probe__","links":["l1"]}]})"),
            ErrorKind::ReservedId);
}

TEST(ParseNetwork, MalformedDocuments) {
  for (const char* text : {
           "not json",
           "[]",
           R"({"links":[]})",
           R"({"links":[{"id":"l1","capacity":1,"color":"red"}],"flows":[]})",
           R"({"links":[],"flows":[],"extra":1})",
           R"({"links":[{"id":"l1"}],"flows":[]})",
           R"({"links":[{"id":"l1","capacity":"10"}],"flows":[]})",
           R"({"links":[{"id":"l1","capacity":1,"src":"a"}],"flows":[]})",
           R"({"links":[{"id":"l1","capacity":1}],"flows":[{"id":"f1","links":[]}]})",
           R"({"links":[{"id":"l1","capacity":1}],"flows":[{"id":"f1","links":["l1","l1"]}]})",
           R"({"links":[{"id":7,"capacity":1}],"flows":[]})",
       }) {
    EXPECT_EQ(parse_error_kind(text), ErrorKind::Malformed) << text;
  }
}

TEST(ParseNetwork, ErrorsCarryMessages) {
  try {
    parse_network(R"({"links":[{"id":"l1","capacity":10}],"flows":[{"id":"f1","links":["l99"]}]})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("l99"), std::string::npos);
  }
}

TEST(Validate, ValidFixturesHaveNoViolations) {
  for (const char* name : {"fattree_tau1", "fattree_tau2", "shaping", "fig4c", "fig4d", "ladder", "b4"})
    EXPECT_TRUE(validate(fixture(name)).empty()) << name;
}

TEST(Validate, ZeroCapacityNamesTheLink) {
  Network net({{"a", 5}, {"b", 0}}, {{"f", {"a", "b"}}});
  auto v = validate(net);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ErrorKind::NonPositiveCapacity);
  EXPECT_NE(v[0].message.find("'b'"), std::string::npos);
}

TEST(Validate, RepeatedLinkNamesFlowAndLink) {
  Network net({{"a", 5}, {"b", 3}}, {{"f", {"a", "b", "a"}}});
  auto v = validate(net);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].message.find("'f'"), std::string::npos);
  EXPECT_NE(v[0].message.find("'a'"), std::string::npos);
}

TEST(Validate, UnknownLinkAndEmptyPath) {
  Network net({{"a", 5}}, {{"f", {"zz"}}, {"g", {}}});
  auto v = validate(net);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].kind, ErrorKind::UnknownLink);
  EXPECT_EQ(v[1].kind, ErrorKind::Malformed);
}

TEST(Validate, DoesNotMutate) {
  auto net = fixture("shaping");
  auto copy = net;
  validate(net);
  EXPECT_EQ(net, copy);
}

TEST(Network, IdsAreSortedForDeterminism) {
  Network net({{"z", 1}, {"a", 2}, {"m", 3}}, {{"g", {"z"}}, {"b", {"a", "m"}}});
  EXPECT_EQ(net.link(0).id, "a");
  EXPECT_EQ(net.link(2).id, "z");
  EXPECT_EQ(net.flow(0).id, "b");
  EXPECT_EQ(net.path(0), (std::vector<std::size_t>{0, 1}));
}

TEST(Network, RoundTripThroughJson) {
  for (const char* name : {"b4", "fattree_tau1", "shaping", "two_routers"}) {
    auto net = fixture(name);
    auto again = parse_network(serialize(net));
    EXPECT_EQ(net, again) << name;
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto net = random_network(seed, {12, 30, 4});
    EXPECT_EQ(parse_network(serialize(net)), net);
  }
}

TEST(Network, IncidenceDuality) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto net = random_network(seed, {15, 40, 5});
    for (std::size_t f = 0; f < net.flow_count(); ++f)
      for (std::size_t l = 0; l < net.link_count(); ++l) {
        const auto& p = net.path(f);
        const auto& on = net.flows_on(l);
        bool in_path = std::find(p.begin(), p.end(), l) != p.end();
        bool on_link = std::find(on.begin(), on.end(), f) != on.end();
        EXPECT_EQ(in_path, on_link);
      }
  }
}

TEST(Network, ParallelLinksBetweenRouters) {
  auto net = parse_network(R"({"links":[{"id":"a","capacity":1,"src":"u","dst":"v"},
                                        {"id":"b","capacity":2,"src":"u","dst":"v"}],"flows":[]})");
  EXPECT_EQ(net.all_routers(), (std::vector<RouterId>{"u", "v"}));
  EXPECT_TRUE(validate(net).empty());
}

TEST(Tolerance, DefaultEpsilon) { EXPECT_DOUBLE_EQ(eps(), 1e-9); }
