#include "hrs/hypergraph.hpp"

#include <gtest/gtest.h>

#include <random>

namespace hrs {
namespace {

// The triangle-with-three-corners shape used throughout: one 3-edge on
// (l, r, t).  Small enough for the brute-force oracle.
ColoredHypergraph triangle() {
  ColoredHypergraph g;
  g.vertices = {"l", "r", "t"};
  g.edges["X"] = {"tri", {"l", "r", "t"}};
  return g;
}

ColoredHypergraph two_color_path() {
  ColoredHypergraph g;
  g.vertices = {"a", "b", "c"};
  g.edges["e1"] = {"blue", {"a", "b"}};
  g.edges["e2"] = {"red", {"b", "c"}};
  return g;
}

TEST(Validate, AcceptsWellFormed) {
  EXPECT_TRUE(validate_hypergraph(triangle()).ok());
  EXPECT_TRUE(validate_hypergraph(two_color_path()).ok());
}

TEST(Validate, RejectsOrderOne) {
  ColoredHypergraph g;
  g.vertices = {"a"};
  g.edges["e"] = {"blue", {"a"}};
  auto d = validate_hypergraph(g);
  EXPECT_FALSE(d.ok());
  EXPECT_NE(d.str().find("order 1"), std::string::npos);
}

TEST(Validate, RejectsIsolatedVertex) {
  auto g = two_color_path();
  g.vertices.insert("lonely");
  auto d = validate_hypergraph(g);
  EXPECT_FALSE(d.ok());
  EXPECT_NE(d.str().find("isolated"), std::string::npos);
}

TEST(Validate, RejectsUndeclaredBoundaryVertex) {
  ColoredHypergraph g;
  g.vertices = {"a", "b"};
  g.edges["e"] = {"blue", {"a", "ghost"}};
  // "ghost" is undeclared and "b" becomes isolated.
  auto d = validate_hypergraph(g);
  EXPECT_FALSE(d.ok());
  EXPECT_NE(d.str().find("undeclared"), std::string::npos);
}

TEST(Validate, AllowsRepeatedBoundaryVertices) {
  ColoredHypergraph g;
  g.vertices = {"a"};
  g.edges["loop"] = {"red", {"a", "a"}};
  EXPECT_TRUE(validate_hypergraph(g).ok());
}

TEST(PiIso, IdentityChecksOut) {
  auto g = two_color_path();
  PiIsomorphism f;
  for (const auto& v : g.vertices) f.vertex_map[v] = v;
  for (const auto& [n, e] : g.edges) {
    f.edge_map[n] = n;
    f.pi[n] = identity_perm(e.ord());
  }
  EXPECT_TRUE(check_pi_isomorphism(g, g, f));
}

TEST(PiIso, AdjacencyEquationEnforced) {
  auto g = two_color_path();
  PiIsomorphism f;
  for (const auto& v : g.vertices) f.vertex_map[v] = v;
  for (const auto& [n, e] : g.edges) f.edge_map[n] = n;
  f.pi["e1"] = Perm{1, 0};  // swaps endpoints without swapping vertices
  f.pi["e2"] = identity_perm(2);
  EXPECT_FALSE(check_pi_isomorphism(g, g, f));
}

TEST(PiIso, ComposeAndInvert) {
  auto g = triangle();
  PiSearchOptions opt;
  opt.allowed["tri"] = generate_group({Perm{1, 2, 0}, Perm{1, 0, 2}}, 3);
  opt.relevant = std::map<Name, std::set<int>>{};  // nothing constrained
  auto autos = find_pi_isomorphisms(g, g, opt);
  ASSERT_EQ(autos.size(), 6u);  // single free 3-edge: all of Sym(3)
  for (const auto& f : autos) {
    EXPECT_TRUE(check_pi_isomorphism(g, g, f));
    auto inv = invert_pi_isomorphism(f);
    EXPECT_TRUE(check_pi_isomorphism(g, g, inv));
    auto id = compose_pi_isomorphisms(inv, f);
    for (const auto& [v, w] : id.vertex_map) EXPECT_EQ(v, w);
    for (const auto& [e, p] : id.pi) EXPECT_TRUE(is_identity(p));
  }
  for (const auto& f : autos)
    for (const auto& h : autos) {
      auto c = compose_pi_isomorphisms(f, h);
      EXPECT_TRUE(check_pi_isomorphism(g, g, c));
    }
}

TEST(PiIso, SharedPositionsConstrainSearch) {
  // Two blue 2-edges head-to-tail: a-b, b-c.  The middle vertex makes
  // position 1 of e1 and position 0 of e2 shared.
  ColoredHypergraph g;
  g.vertices = {"a", "b", "c"};
  g.edges["e1"] = {"blue", {"a", "b"}};
  g.edges["e2"] = {"blue", {"b", "c"}};
  EXPECT_EQ(g.shared_positions("e1"), (std::set<int>{1}));
  EXPECT_EQ(g.shared_positions("e2"), (std::set<int>{0}));

  // With only identity allowed, the flip that reverses the path is ruled
  // out on shared positions, so only the identity survives.
  PiSearchOptions strict;
  auto autos = find_pi_isomorphisms(g, g, strict);
  ASSERT_EQ(autos.size(), 1u);
  EXPECT_EQ(autos[0].vertex_map.at("a"), "a");

  // Allowing the swap on blue edges admits the reversal too.
  PiSearchOptions loose;
  loose.allowed["blue"] = {identity_perm(2), Perm{1, 0}};
  autos = find_pi_isomorphisms(g, g, loose);
  ASSERT_EQ(autos.size(), 2u);
}

TEST(PiIso, ColorsMustMatch) {
  auto g = two_color_path();
  ColoredHypergraph h = g;
  h.edges["e2"].color = "blue";
  EXPECT_TRUE(find_pi_isomorphisms(g, h).empty());
}

TEST(PiIso, RepeatedVerticesDedupeToOneMap) {
  // A single edge visiting (a, a, b): pi tables (id) and (swap 0,1) induce
  // the same vertex map, so exactly one isomorphism is reported.
  ColoredHypergraph g;
  g.vertices = {"a", "b"};
  g.edges["e"] = {"tri", {"a", "a", "b"}};
  PiSearchOptions opt;
  opt.allowed["tri"] = generate_group({Perm{1, 2, 0}, Perm{1, 0, 2}}, 3);
  auto autos = find_pi_isomorphisms(g, g, opt);
  // Maps: a->a,b->b and nothing else (a->b would not be a bijection of the
  // boundary multiset).
  ASSERT_EQ(autos.size(), 1u);
}

// ---------------------------------------------------------------------------
// Randomized comparison against the brute-force oracle.
// ---------------------------------------------------------------------------

ColoredHypergraph random_graph(std::mt19937_64& rng, int nv, int ne,
                               const std::vector<Name>& colors) {
  ColoredHypergraph g;
  for (int i = 0; i < nv; ++i) g.vertices.insert("v" + std::to_string(i));
  std::uniform_int_distribution<int> pick_v(0, nv - 1);
  std::uniform_int_distribution<size_t> pick_c(0, colors.size() - 1);
  std::uniform_int_distribution<int> pick_ord(2, 3);
  for (int i = 0; i < ne; ++i) {
    Hyperedge e;
    e.color = colors[pick_c(rng)];
    int ord = pick_ord(rng);
    for (int j = 0; j < ord; ++j)
      e.boundary.push_back("v" + std::to_string(pick_v(rng)));
    g.edges["e" + std::to_string(i)] = e;
  }
  // Drop isolated vertices so the graph validates.
  std::set<Name> touched;
  for (const auto& [n, e] : g.edges)
    for (const auto& v : e.boundary) touched.insert(v);
  g.vertices = touched;
  return g;
}

// Relabel vertices and edges randomly, preserving structure.
ColoredHypergraph shuffled_copy(const ColoredHypergraph& g,
                                std::mt19937_64& rng,
                                std::map<Name, Name>* vmap_out = nullptr) {
  std::vector<Name> vs(g.vertices.begin(), g.vertices.end());
  std::vector<Name> perm = vs;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::map<Name, Name> vmap;
  for (size_t i = 0; i < vs.size(); ++i) vmap[vs[i]] = "w" + perm[i];
  ColoredHypergraph h;
  for (const auto& v : g.vertices) h.vertices.insert(vmap[v]);
  int k = 0;
  for (const auto& [n, e] : g.edges) {
    Hyperedge e2;
    e2.color = e.color;
    for (const auto& v : e.boundary) e2.boundary.push_back(vmap[v]);
    h.edges["f" + std::to_string(k++)] = e2;
  }
  if (vmap_out) *vmap_out = vmap;
  return h;
}

TEST(PiIso, MatchesBruteForceOracle) {
  std::mt19937_64 rng(20260816);
  std::vector<Name> colors{"blue", "red"};
  int nonempty = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto a = random_graph(rng, 4, 3, colors);
    if (a.vertices.empty()) continue;
    ColoredHypergraph b =
        (trial % 2 == 0) ? shuffled_copy(a, rng) : random_graph(rng, 4, 3, colors);
    PiSearchOptions opt;
    if (trial % 3 == 0) {
      opt.allowed["blue"] = {identity_perm(2), Perm{1, 0}};
      opt.allowed["red"] = {identity_perm(2)};
      opt.allowed["tri"] = {identity_perm(3)};
    }
    auto fast = find_pi_isomorphisms(a, b, opt);
    auto slow = find_pi_isomorphisms_bruteforce(a, b, opt);
    auto key = [](const PiIsomorphism& f) {
      return std::make_pair(f.edge_map, f.vertex_map);
    };
    std::set<std::pair<std::map<Name, Name>, std::map<Name, Name>>> fs, ss;
    for (const auto& f : fast) {
      EXPECT_TRUE(check_pi_isomorphism(a, b, f));
      fs.insert(key(f));
    }
    for (const auto& f : slow) ss.insert(key(f));
    EXPECT_EQ(fs, ss) << "trial " << trial;
    EXPECT_EQ(fast.size(), fs.size()) << "duplicate maps reported";
    if (!fast.empty()) ++nonempty;
  }
  EXPECT_GT(nonempty, 5);  // the comparison actually exercised matches
}

// ---------------------------------------------------------------------------
// Canonical form.
// ---------------------------------------------------------------------------

TEST(Canonical, InvariantUnderRelabeling) {
  std::mt19937_64 rng(7);
  std::vector<Name> colors{"blue", "red", "tri"};
  for (int trial = 0; trial < 60; ++trial) {
    auto a = random_graph(rng, 5, 4, colors);
    if (a.vertices.empty()) continue;
    auto b = shuffled_copy(a, rng);
    EXPECT_EQ(canonical_form(a).certificate, canonical_form(b).certificate);
  }
}

TEST(Canonical, SeparatesNonIsomorphic) {
  auto a = two_color_path();
  ColoredHypergraph b = a;
  b.edges["e2"].color = "blue";
  EXPECT_NE(canonical_form(a).certificate, canonical_form(b).certificate);

  // Same colors, different wiring: path a-b-c vs. both edges on a-b.
  ColoredHypergraph c;
  c.vertices = {"a", "b"};
  c.edges["e1"] = {"blue", {"a", "b"}};
  c.edges["e2"] = {"red", {"a", "b"}};
  EXPECT_NE(canonical_form(a).certificate, canonical_form(c).certificate);
}

TEST(Canonical, BoundaryOrderMatters) {
  // Directed 2-edges: a->b vs. b->a with an anchor edge to break symmetry.
  ColoredHypergraph a;
  a.vertices = {"x", "y", "z"};
  a.edges["anchor"] = {"red", {"x", "y"}};
  a.edges["e"] = {"blue", {"y", "z"}};
  ColoredHypergraph b = a;
  b.edges["e"].boundary = {"z", "y"};
  EXPECT_NE(canonical_form(a).certificate, canonical_form(b).certificate);
}

TEST(Canonical, RenamingRealizesCertificate) {
  std::mt19937_64 rng(99);
  auto g = random_graph(rng, 5, 4, {"blue", "red"});
  auto cf = canonical_form(g);
  // Apply the renaming and recompute: certificate must be unchanged and the
  // canonical names must be v0..vn-1 / e0..em-1.
  ColoredHypergraph h;
  for (const auto& v : g.vertices) h.vertices.insert(cf.vertex_names.at(v));
  for (const auto& [n, e] : g.edges) {
    Hyperedge e2;
    e2.color = e.color;
    for (const auto& v : e.boundary) e2.boundary.push_back(cf.vertex_names.at(v));
    h.edges[cf.edge_names.at(n)] = e2;
  }
  EXPECT_EQ(canonical_form(h).certificate, cf.certificate);
  std::set<Name> expected_edges;
  for (size_t i = 0; i < g.edges.size(); ++i)
    expected_edges.insert("e" + std::to_string(i));
  std::set<Name> got;
  for (const auto& [n, e] : h.edges) got.insert(n);
  EXPECT_EQ(got, expected_edges);
}

TEST(Canonical, HighSymmetryGraph) {
  // Three parallel identical edges between the same pair: automorphism-rich,
  // exercises the individualization branch.
  ColoredHypergraph g;
  g.vertices = {"a", "b"};
  g.edges["p"] = {"blue", {"a", "b"}};
  g.edges["q"] = {"blue", {"a", "b"}};
  g.edges["r"] = {"blue", {"a", "b"}};
  std::mt19937_64 rng(3);
  auto h = shuffled_copy(g, rng);
  EXPECT_EQ(canonical_form(g).certificate, canonical_form(h).certificate);
  PiSearchOptions opt;
  auto autos = find_pi_isomorphisms(g, g, opt);
  EXPECT_EQ(autos.size(), 6u);  // 3! edge permutations, vertices fixed
}

}  // namespace
}  // namespace hrs
