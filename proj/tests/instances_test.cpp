#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "stochmatch/error.hpp"
#include "stochmatch/instance.hpp"
#include "test_support.hpp"

namespace stochmatch {
namespace {

using testing::bipartite_graph;
using testing::general_graph;
using testing::online_instance;

bool has_violation(const ValidationReport& r, const std::string& text) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const std::string& v) { return v.find(text) != std::string::npos; });
}

TEST(Validate, SingleEdgeIsValid) {
  const auto g = general_graph(2, {{0, 1, 0.5, 1.0}});
  EXPECT_TRUE(validate_instance(g).ok());
}

TEST(Validate, ZeroProbabilityRejected) {
  const auto g = general_graph(2, {{0, 1, 0.0, 1.0}});
  const auto r = validate_instance(g);
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_violation(r, "probability out of (0,1]"));
}

TEST(Validate, ProbabilityAboveOneRejected) {
  EXPECT_FALSE(validate_instance(general_graph(2, {{0, 1, 1.5, 1.0}})).ok());
  EXPECT_TRUE(validate_instance(general_graph(2, {{0, 1, 1.0, 1.0}})).ok());
}

TEST(Validate, EdgeInsideOneSide) {
  auto g = bipartite_graph(2, 1, {{0, 1, 0.5, 1.0}});
  EXPECT_TRUE(has_violation(validate_instance(g), "edge inside one side"));
}

TEST(Validate, SelfLoopAndDuplicate) {
  EXPECT_TRUE(has_violation(validate_instance(general_graph(2, {{0, 0, 0.5, 1.0}})), "self-loop"));
  const auto dup = general_graph(2, {{0, 1, 0.5, 1.0}, {1, 0, 0.3, 1.0}});
  EXPECT_TRUE(has_violation(validate_instance(dup), "duplicate edge"));
}

TEST(Validate, WeightAndTimeout) {
  EXPECT_FALSE(validate_instance(general_graph(2, {{0, 1, 0.5, 0.0}})).ok());
  EXPECT_FALSE(validate_instance(general_graph(2, {{0, 1, 0.5, 1.0}}, {1, 0})).ok());
}

TEST(Validate, OnlineRoundsMustMatchTypes) {
  auto inst = online_instance(1, 2, {{0, 0, 0.5, 1.0}, {0, 1, 0.5, 1.0}});
  EXPECT_TRUE(validate_instance(inst).ok());
  inst.rounds = 3;
  EXPECT_TRUE(has_violation(validate_instance(inst), "rounds must equal"));
}

TEST(Validate, RequireValidThrows) {
  try {
    require_valid(general_graph(2, {{0, 1, 0.0, 1.0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::validation_failed);
  }
}

TEST(Generate, SameSeedSameInstance) {
  GeneratorSpec spec;
  spec.kind = InstanceKind::general;
  spec.nodes = 7;
  spec.w_max = 3.0;
  spec.t_max = 3;
  EXPECT_EQ(generate_random_instance(spec, 11), generate_random_instance(spec, 11));
  EXPECT_NE(generate_random_instance(spec, 11), generate_random_instance(spec, 12));
}

TEST(Generate, CompleteBipartite) {
  GeneratorSpec spec;
  spec.density = 1.0;
  const auto g = std::get<StochasticGraph>(generate_random_instance(spec, 1));
  EXPECT_EQ(g.edges.size(), 9u);
}

TEST(Generate, DegenerateProbabilityRange) {
  GeneratorSpec spec;
  spec.density = 1.0;
  spec.p_min = spec.p_max = 0.2;
  const auto g = std::get<StochasticGraph>(generate_random_instance(spec, 5));
  for (const auto& e : g.edges) EXPECT_EQ(e.p, 0.2);
}

TEST(Generate, InfeasibleSpecs) {
  GeneratorSpec spec;
  spec.density = 1.5;
  EXPECT_THROW(generate_random_instance(spec, 1), Error);
  spec.density = 0.5;
  spec.p_min = 0.0;
  EXPECT_THROW(generate_random_instance(spec, 1), Error);
  spec.p_min = 0.5;
  spec.t_min = 0;
  EXPECT_THROW(generate_random_instance(spec, 1), Error);
}

TEST(Generate, OutputAlwaysValid) {
  for (auto kind : {InstanceKind::bipartite, InstanceKind::general, InstanceKind::online}) {
    GeneratorSpec spec;
    spec.kind = kind;
    spec.left = 4;
    spec.right = 5;
    spec.nodes = 8;
    spec.w_max = 5.0;
    spec.t_max = 3;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      spec.density = static_cast<double>(seed % 11) / 10.0;
      const auto inst = generate_random_instance(spec, seed);
      EXPECT_TRUE(validate_instance(inst).ok()) << to_string(kind) << " seed " << seed;
    }
  }
}

TEST(Serialize, RoundTripIsExact) {
  for (auto kind : {InstanceKind::bipartite, InstanceKind::general, InstanceKind::online}) {
    GeneratorSpec spec;
    spec.kind = kind;
    spec.w_max = 7.0;
    spec.t_max = 4;
    const auto inst = generate_random_instance(spec, 99);
    EXPECT_EQ(parse_instance(serialize_instance(inst)), inst) << to_string(kind);
  }
}

TEST(Parse, TimeoutsDefaultToOne) {
  const auto inst = parse_instance(R"({"kind":"general","nodes":["x","y","z"],
      "edges":[{"u":"x","v":"y","p":0.5,"w":2}],"timeouts":{"y":3}})");
  const auto& g = std::get<StochasticGraph>(inst);
  EXPECT_EQ(g.timeouts, (std::vector<int>{1, 3, 1}));
  EXPECT_EQ(g.edges[0], (Edge{0, 1, 0.5, 2.0}));
}

TEST(Parse, OnlineDefaults) {
  const auto inst = parse_instance(R"({"kind":"online","items":["i"],"buyers":["b","c"],
      "edges":[{"u":"i","v":"c","p":1,"w":1}]})");
  const auto& o = std::get<OnlineInstance>(inst);
  EXPECT_EQ(o.rounds, 2);
  EXPECT_EQ(o.buyer_timeouts, (std::vector<int>{1, 1}));
  EXPECT_EQ(o.edges[0].buyer, 1u);
}

TEST(Parse, Errors) {
  auto code_of = [](const char* text) {
    try {
      parse_instance(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::internal;
  };
  EXPECT_EQ(code_of("{"), ErrorCode::parse_error);
  EXPECT_EQ(code_of(R"({"kind":"general"})"), ErrorCode::parse_error);
  EXPECT_EQ(code_of(R"({"kind":"bipartite","nodes":["a","b"],"edges":[]})"),
            ErrorCode::parse_error);
  EXPECT_EQ(code_of(R"({"kind":"general","nodes":["a"],"edges":[{"u":"a","v":"q","p":1,"w":1}]})"),
            ErrorCode::parse_error);
}

TEST(TypeGraph, ItemsFirstEdgesKept) {
  const auto inst = online_instance(2, 2, {{0, 1, 0.5, 1.0}, {1, 0, 0.4, 2.0}}, {2, 1});
  const auto g = inst.type_graph();
  EXPECT_EQ(g.kind, GraphKind::bipartite);
  ASSERT_EQ(g.node_count(), 4u);
  EXPECT_EQ(g.edges[0].u, 0u);
  EXPECT_EQ(g.edges[0].v, 3u);
  EXPECT_EQ(g.edges[1].w, 2.0);
  EXPECT_EQ(g.timeouts[2], 2);
  EXPECT_TRUE(validate_instance(g).ok());
}

}  // namespace
}  // namespace stochmatch
