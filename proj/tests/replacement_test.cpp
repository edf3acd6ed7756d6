#include "hrs/replacement.hpp"

#include <gtest/gtest.h>

#include "hrs/catalog.hpp"

namespace hrs {
namespace {

TEST(Validate, CatalogSystemsAreConsistent) {
  for (const auto& name : catalog_names()) {
    auto s = catalog_system(name);
    auto d = validate_system(s);
    EXPECT_TRUE(d.ok()) << name << ": " << d.str();
  }
}

TEST(Validate, CatchesArityMismatch) {
  auto s = airplane_system();
  // A red edge of order 3 somewhere contradicts d_red = 2.
  s.rules["blue"].graph.vertices.insert("w");
  s.rules["blue"].graph.edges["T"].boundary.push_back("w");
  auto d = validate_system(s);
  EXPECT_FALSE(d.ok());
  EXPECT_NE(d.str().find("d_red"), std::string::npos);
}

TEST(Validate, CatchesMissingRule) {
  auto s = sierpinski_system();
  s.colors.push_back("ghost");
  auto d = validate_system(s);
  EXPECT_FALSE(d.ok());
  EXPECT_NE(d.str().find("no replacement rule"), std::string::npos);
}

TEST(Validate, CatchesRepeatedRuleBoundary) {
  auto s = sierpinski_system();
  s.rules["tri"].boundary = {"p1", "p2", "p1"};
  EXPECT_FALSE(validate_system(s).ok());
}

TEST(Classify, Airplane) {
  auto c = classify_system(airplane_system());
  EXPECT_EQ(c.expanding_class, ExpandingClass::Expanding);
  EXPECT_TRUE(c.trivial_colors.empty());
  EXPECT_TRUE(c.isolated_colors.empty());
  EXPECT_EQ(c.max_rule_size, 4);
}

TEST(Classify, SierpinskiAndGasket) {
  for (auto s : {sierpinski_system(), gasket_system()}) {
    auto c = classify_system(s);
    EXPECT_EQ(c.expanding_class, ExpandingClass::Expanding);
    EXPECT_TRUE(c.trivial_colors.empty());
    EXPECT_TRUE(c.isolated_colors.empty());
    EXPECT_EQ(c.max_rule_size, 3);
  }
}

TEST(Classify, HoughtonIsAlmostExpandingAllIsolated) {
  for (int n = 2; n <= 5; ++n) {
    auto s = houghton_system(n);
    auto c = classify_system(s);
    EXPECT_EQ(c.expanding_class, ExpandingClass::AlmostExpanding) << n;
    EXPECT_EQ(c.trivial_colors, std::set<Name>{"black"}) << n;
    // Every color is isolated: rays never touch anything.
    std::set<Name> all(s.colors.begin(), s.colors.end());
    EXPECT_EQ(c.isolated_colors, all) << n;
    EXPECT_EQ(c.max_rule_size, 2);
  }
}

TEST(Classify, ShiftSystemsAreExpandingAndIsolated) {
  for (const Name& name : {"fullshift-2", "fullshift-3", "badshift",
                           "matui-k2"}) {
    auto s = catalog_system(name);
    auto c = classify_system(s);
    EXPECT_EQ(c.expanding_class, ExpandingClass::Expanding) << name;
    std::set<Name> all(s.colors.begin(), s.colors.end());
    EXPECT_EQ(c.isolated_colors, all) << name;
    EXPECT_TRUE(c.trivial_colors.empty()) << name;
  }
}

TEST(Classify, AdjacentBoundaryOnNonIsolatedColorIsNeither) {
  // Join the two airplane blue-rule boundary vertices by an extra red edge:
  // blue is not isolated, so the system is no longer almost expanding.
  auto s = airplane_system();
  detail::add_edge(s.rules["blue"].graph, "bad", "red", {"l", "r"});
  auto c = classify_system(s);
  EXPECT_EQ(c.expanding_class, ExpandingClass::Neither);
}

TEST(Classify, TrivialIsolatedColorKeepsAlmostExpanding) {
  // Houghton's black rule has its two boundary vertices on one edge
  // (adjacent), yet the system stays almost expanding because black is
  // trivial and isolated.  Sanity-check the trivial rule detector directly.
  auto s = houghton_system(2);
  EXPECT_TRUE(is_trivial_rule("black", s.rules.at("black")));
  EXPECT_FALSE(is_trivial_rule("ray1", s.rules.at("ray1")));
  // A single-edge rule of the wrong color is not trivial.
  ReplacementRule r;
  detail::add_edge(r.graph, "t", "white", {"p", "q"});
  r.boundary = {"p", "q"};
  EXPECT_FALSE(is_trivial_rule("black", r));
}

TEST(Expand, GasketFirstExpansionMatchesHandData) {
  auto s = gasket_system();
  auto x = base_expansion(s);
  x = expand_hyperedge(s, x, {"L"});
  ASSERT_EQ(x.leaves.size(), 4u);
  // L = (t,b,c) and the rule children are 1=(p1,z,y), 2=(z,p2,x),
  // 3=(y,x,p3); internal z,y,x become L:z, L:y, L:x.
  EXPECT_EQ(x.leaves.at({"L", "1"}).boundary,
            (std::vector<Name>{"t", "L:z", "L:y"}));
  EXPECT_EQ(x.leaves.at({"L", "2"}).boundary,
            (std::vector<Name>{"L:z", "b", "L:x"}));
  EXPECT_EQ(x.leaves.at({"L", "3"}).boundary,
            (std::vector<Name>{"L:y", "L:x", "c"}));
  EXPECT_EQ(x.leaves.at({"R"}).boundary, (std::vector<Name>{"t", "c", "b"}));
}

TEST(Expand, TrivialRuleKeepsBoundary) {
  auto s = houghton_system(2);
  auto x = base_expansion(s);
  x = expand_hyperedge(s, x, {"s1"});  // children s1.b (black), s1.t1
  auto before = x.leaves.at({"s1", "b"}).boundary;
  x = expand_hyperedge(s, x, {"s1", "b"});
  EXPECT_FALSE(x.is_leaf({"s1", "b"}));
  EXPECT_EQ(x.leaves.at({"s1", "b", "t"}).boundary, before);
}

TEST(Expand, SierpinskiDepthTwoCounts) {
  auto s = sierpinski_system();
  auto x = base_expansion(s);
  x = expand_hyperedge(s, x, {"X"});
  for (const auto& leaf : x.sorted_leaves()) x = expand_hyperedge(s, x, leaf);
  EXPECT_EQ(x.leaves.size(), 9u);
  EXPECT_EQ(x.vertices().size(), 15u);
}

TEST(Expand, NotALeafThrows) {
  auto s = sierpinski_system();
  auto x = base_expansion(s);
  EXPECT_THROW(expand_hyperedge(s, x, {"Y"}), input_error);
  x = expand_hyperedge(s, x, {"X"});
  EXPECT_THROW(expand_hyperedge(s, x, {"X"}), input_error);
}

TEST(Expand, DistinctLeavesCommute) {
  auto s = airplane_system();
  auto x = base_expansion(s);
  auto a = expand_hyperedge(s, expand_hyperedge(s, x, {"I"}), {"T"});
  auto b = expand_hyperedge(s, expand_hyperedge(s, x, {"T"}), {"I"});
  EXPECT_EQ(a.leaves, b.leaves);
}

TEST(Expand, VertexCountBookkeeping) {
  for (const auto& name : catalog_names()) {
    auto s = catalog_system(name);
    auto x = base_expansion(s);
    // Expand the first leaf twice, checking the increment each time.
    for (int step = 0; step < 2; ++step) {
      Word leaf = x.sorted_leaves().front();
      const auto& rule = s.rules.at(x.leaves.at(leaf).color);
      size_t internal =
          rule.graph.vertices.size() - static_cast<size_t>(rule.arity());
      size_t before = x.vertices().size();
      x = expand_hyperedge(s, x, leaf);
      EXPECT_EQ(x.vertices().size(), before + internal) << name;
    }
  }
}

TEST(Boundary, SierpinskiCornerCellInterior) {
  auto s = sierpinski_system();
  auto x = expand_hyperedge(s, base_expansion(s), {"X"});
  // X.1 = (l, X:z, X:y): the corner vertex l lies on no other leaf.
  auto f = boundary_status(x, {"X", "1"});
  EXPECT_EQ(f, (std::vector<bool>{false, true, true}));
}

TEST(Boundary, IsolatedEdgeHasNoTopologicalBoundary) {
  auto s = houghton_system(2);
  auto x = base_expansion(s);
  EXPECT_EQ(boundary_status(x, {"s1"}), (std::vector<bool>{false, false}));
  x = expand_hyperedge(s, x, {"s1"});
  EXPECT_EQ(boundary_status(x, {"s1", "b"}),
            (std::vector<bool>{false, false}));
}

TEST(Boundary, GasketBaseFullyShared) {
  auto s = gasket_system();
  auto x = base_expansion(s);
  EXPECT_EQ(boundary_status(x, {"L"}), (std::vector<bool>{true, true, true}));
  EXPECT_EQ(boundary_status(x, {"R"}), (std::vector<bool>{true, true, true}));
}

TEST(Boundary, StableUnderExpandingOtherLeaves) {
  auto s = airplane_system();
  auto x = base_expansion(s);
  x = expand_hyperedge(s, x, {"I"});
  auto before = boundary_status(x, {"I", "T"});
  auto y = expand_hyperedge(s, x, {"F"});
  y = expand_hyperedge(s, y, {"B"});
  EXPECT_EQ(boundary_status(y, {"I", "T"}), before);
}

TEST(Enumerate, SierpinskiSevenLeaves) {
  auto s = sierpinski_system();
  auto all = enumerate_expansions(s, 7);
  // 1 (base) + 1 (depth one) + 3 + 12: Fuss-Catalan counts for up to three
  // internal expansions of a ternary rule.
  EXPECT_EQ(all.size(), 17u);
  // Leaf sets are unique.
  std::set<std::vector<Word>> seen;
  for (const auto& x : all) EXPECT_TRUE(seen.insert(x.sorted_leaves()).second);
}

TEST(Enumerate, BaseOnlyWhenNoRoom) {
  auto s = gasket_system();
  auto all = enumerate_expansions(s, 2);
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all[0].leaves, base_expansion(s).leaves);
}

TEST(Enumerate, HoughtonSkipsTrivialSteps) {
  // Non-trivial expansions add one leaf each; with at most 4 leaves the
  // reachable leaf sets are: base; one ray expanded (x2); both rays
  // expanded; one ray expanded twice along the ray child (x2).
  auto s = houghton_system(2);
  auto all = enumerate_expansions(s, 4);
  EXPECT_EQ(all.size(), 6u);
  for (const auto& x : all)
    for (const auto& [w, e] : x.leaves)
      EXPECT_NE(e.color, "t");  // no black expansion products beyond b itself
}

TEST(Enumerate, MatchesLeafSetReplay) {
  auto s = airplane_system();
  for (const auto& x : enumerate_expansions(s, 7)) {
    std::set<Word> leaves;
    for (const auto& [w, e] : x.leaves) leaves.insert(w);
    EXPECT_TRUE(validate_leaf_set(s, leaves).ok());
    auto y = expansion_from_leaves(s, leaves);
    EXPECT_EQ(y.leaves, x.leaves);
  }
}

TEST(LeafSets, RejectsBadSets) {
  auto s = sierpinski_system();
  // Prefix-related leaves.
  EXPECT_FALSE(validate_leaf_set(s, {{"X"}, {"X", "1"}}).ok());
  // Incomplete frontier.
  EXPECT_FALSE(validate_leaf_set(s, {{"X", "1"}, {"X", "2"}}).ok());
  // Unknown letters.
  EXPECT_FALSE(validate_leaf_set(s, {{"Y"}}).ok());
  EXPECT_FALSE(
      validate_leaf_set(s, {{"X", "1"}, {"X", "2"}, {"X", "9"}}).ok());
  // The base itself is fine.
  EXPECT_TRUE(validate_leaf_set(s, {{"X"}}).ok());
}

TEST(LeafSets, TrivialStepsAreValidLeafSets) {
  // Leaf sets produced by trivial expansions validate and replay, even
  // though the enumerator never produces them.
  auto s = houghton_system(2);
  auto x = base_expansion(s);
  x = expand_hyperedge(s, x, {"s1"});
  x = expand_hyperedge(s, x, {"s1", "b"});
  std::set<Word> leaves;
  for (const auto& [w, e] : x.leaves) leaves.insert(w);
  EXPECT_TRUE(validate_leaf_set(s, leaves).ok());
  EXPECT_EQ(expansion_from_leaves(s, leaves).leaves, x.leaves);
}

}  // namespace
}  // namespace hrs
