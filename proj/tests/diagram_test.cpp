#include "hrs/diagram.hpp"

#include <gtest/gtest.h>

#include <random>

#include "hrs/catalog.hpp"
#include "hrs/catalog_diagrams.hpp"
#include "hrs/catalog_tuples.hpp"

namespace hrs {
namespace {

// Random valid eventually periodic address: a walk in the shift, with the
// period cut where a color first recurs so the wrap condition holds.
EventuallyPeriodic random_address(const ReplacementSystem& s,
                                  std::mt19937& rng) {
  auto pick = [&](const ColoredHypergraph& g) {
    std::vector<Name> names;
    for (const auto& [n, e] : g.edges) names.push_back(n);
    return names[std::uniform_int_distribution<size_t>(
        0, names.size() - 1)(rng)];
  };
  EventuallyPeriodic out;
  Name first = pick(s.base);
  out.prefix.push_back(first);
  Name color = *s.base_letter_color(first);
  int extra = std::uniform_int_distribution<int>(0, 2)(rng);
  for (int i = 0; i < extra; ++i) {
    Name next = pick(s.rules.at(color).graph);
    out.prefix.push_back(next);
    color = *s.rule_letter_color(color, next);
  }
  std::vector<Name> colors{color};
  Word letters;
  for (;;) {
    Name next = pick(s.rules.at(color).graph);
    letters.push_back(next);
    color = *s.rule_letter_color(color, next);
    auto it = std::find(colors.begin(), colors.end(), color);
    if (it != colors.end()) {
      size_t j = static_cast<size_t>(it - colors.begin());
      out.prefix.insert(out.prefix.end(), letters.begin(),
                        letters.begin() + static_cast<long>(j));
      out.period.assign(letters.begin() + static_cast<long>(j),
                        letters.end());
      return out;
    }
    colors.push_back(color);
  }
}

EventuallyPeriodic image_of(const ReplacementSystem& s,
                            const SelfSimilarTuple& t, const Diagram& d,
                            const std::string& addr) {
  auto out = apply_diagram(s, t, d, parse_address(addr));
  EXPECT_TRUE(out.has_value()) << "apply ran out of budget on " << addr;
  return *out;
}

// The gasket reflection that swaps the two base triangles.
Diagram gasket_base_swap(const ReplacementSystem& s) {
  Diagram d = identity_diagram(s, base_expansion(s));
  d.edge_map[{"L"}] = {"R"};
  d.edge_map[{"R"}] = {"L"};
  return d;
}

TEST(Validate, CatalogDiagramsAndIdentities) {
  for (const Name& n : catalog_diagram_names()) {
    auto cd = catalog_diagram(n);
    auto s = catalog_system(cd.system);
    auto t = catalog_tuple(cd.tuple).tuple;
    auto check = validate_diagram(s, t, cd.diagram);
    EXPECT_TRUE(check.diag.ok()) << n << ": " << check.diag.str();
    EXPECT_TRUE(check.exact);
  }
  for (const Name& n : {"gasket", "airplane", "dendrite-3", "houghton-2"}) {
    auto s = catalog_system(n);
    auto t = trivial_tuple(s);
    auto x = base_expansion(s);
    EXPECT_TRUE(validate_diagram(s, t, identity_diagram(s, x)).diag.ok()) << n;
    auto deeper = expand_hyperedge(s, x, x.sorted_leaves().front());
    EXPECT_TRUE(
        validate_diagram(s, t, identity_diagram(s, deeper)).diag.ok())
        << n;
  }
}

TEST(Validate, CatchesBrokenData) {
  auto s = catalog_system("gasket");
  auto t = catalog_tuple("rhophi").tuple;
  const Diagram r = catalog_diagram("r").diagram;

  {  // permutation inconsistent with the identity labels
    Diagram d = identity_diagram(s, base_expansion(s));
    d.pi[{"L"}] = {0, 2, 1};
    auto check = validate_diagram(s, t, d);
    EXPECT_FALSE(check.diag.ok());
  }
  {  // label color differs from the leaf color
    Diagram d = r;
    d.labels[{"L"}] = GroupWord{"blue", {}};
    EXPECT_FALSE(validate_diagram(s, t, d).diag.ok());
  }
  {  // unknown generator in a label
    Diagram d = r;
    d.labels[{"L"}] = parse_word("tri", "zeta");
    EXPECT_FALSE(validate_diagram(s, t, d).diag.ok());
  }
  {  // edge map repeats an image
    Diagram d = r;
    d.edge_map[{"L"}] = {"R", "2"};
    EXPECT_FALSE(validate_diagram(s, t, d).diag.ok());
  }
  {  // missing permutation
    Diagram d = r;
    d.pi.erase({"L"});
    EXPECT_FALSE(validate_diagram(s, t, d).diag.ok());
  }
  {  // permutation breaks the boundary condition
    Diagram d = r;
    d.pi[{"R", "3"}] = {0, 2, 1};
    auto check = validate_diagram(s, t, d);
    EXPECT_FALSE(check.diag.ok());
    EXPECT_NE(check.diag.str().find("disagrees"), std::string::npos)
        << check.diag.str();
  }
}

TEST(Validate, SharedPointsMustStayOnTheBoundary) {
  // Interior marked points may move: the generator a drags the far endpoint
  // of a red spoke strictly inside the cell, and that is exactly how the
  // group acts on the limit space.  Only points shared with neighbouring
  // cells are pinned to the marked boundary.
  auto s = catalog_system("dendrite-3");
  auto t = catalog_tuple("grig").tuple;
  Diagram d = identity_diagram(s, base_expansion(s));
  d.labels[{"2"}] = parse_word("red", "a");
  auto check = validate_diagram(s, t, d);
  EXPECT_TRUE(check.diag.ok()) << check.diag.str();
  EXPECT_EQ(format_address(image_of(s, t, d, "2.(3)")), "2.2.(3)");

  // b fixes both endpoints, so it is a valid relabeling too.
  Diagram ok = identity_diagram(s, base_expansion(s));
  ok.labels[{"3"}] = parse_word("red", "b");
  auto check2 = validate_diagram(s, t, ok);
  EXPECT_TRUE(check2.diag.ok()) << check2.diag.str();

  // Swapping two triangle letters with no recursion drags the midpoint
  // shared by the first two child cells off the boundary, so no cell that
  // shares that midpoint with a neighbour can carry this label.
  auto s2 = catalog_system("sierpinski");
  auto t2 = trivial_tuple(s2);
  t2.groups["tri"].generators["s"].perm = {{"1", "2"}, {"2", "1"}, {"3", "3"}};
  Diagram bad =
      identity_diagram(s2, expand_hyperedge(s2, base_expansion(s2), {"X"}));
  bad.labels[{"X", "1"}] = parse_word("tri", "s");
  auto check3 = validate_diagram(s2, t2, bad);
  EXPECT_FALSE(check3.diag.ok());
  EXPECT_NE(check3.diag.str().find("moves the shared boundary point"),
            std::string::npos)
      << check3.diag.str();
}

TEST(Expand, ChildLabelsAreSections) {
  auto s = catalog_system("dendrite-3");
  auto t = catalog_tuple("grig").tuple;
  Diagram d = identity_diagram(s, base_expansion(s));
  d.labels[{"3"}] = parse_word("red", "b");

  Diagram e = expand_diagram(s, t, d, {"3"});
  EXPECT_TRUE(validate_diagram(s, t, e).diag.ok());
  EXPECT_EQ(format_word(e.labels.at({"3", "1"})), "");
  EXPECT_EQ(format_word(e.labels.at({"3", "2"})), "a");
  EXPECT_EQ(format_word(e.labels.at({"3", "3"})), "c");
  EXPECT_EQ(e.edge_map.at({"3", "2"}), (Word{"3", "2"}));
  EXPECT_EQ(format_word(e.provenance.at({"3"})), "b");

  Diagram e2 = expand_diagram(s, t, e, {"3", "3"});
  EXPECT_EQ(format_word(e2.labels.at({"3", "3", "1"})), "");
  EXPECT_EQ(format_word(e2.labels.at({"3", "3", "2"})), "a");
  EXPECT_EQ(format_word(e2.labels.at({"3", "3", "3"})), "d");
  EXPECT_TRUE(validate_diagram(s, t, e2).diag.ok());
}

TEST(Expand, GasketRotationChildren) {
  auto s = catalog_system("gasket");
  auto t = catalog_tuple("rhophi").tuple;
  const Diagram r = catalog_diagram("r").diagram;
  Diagram e = expand_diagram(s, t, r, {"L"});
  auto check = validate_diagram(s, t, e);
  EXPECT_TRUE(check.diag.ok()) << check.diag.str();
  // The label rho.rho rotates letters 1 -> 3 -> 2 -> 1 and is its own
  // section everywhere.
  EXPECT_EQ(e.edge_map.at({"L", "1"}), (Word{"R", "3", "3"}));
  EXPECT_EQ(e.edge_map.at({"L", "2"}), (Word{"R", "3", "1"}));
  EXPECT_EQ(e.edge_map.at({"L", "3"}), (Word{"R", "3", "2"}));
  for (const Name& x : {"1", "2", "3"})
    EXPECT_EQ(format_word(e.labels.at({"L", x})), "rho.rho");
}

TEST(Expand, PreservesThePointMap) {
  auto s = catalog_system("gasket");
  auto t = catalog_tuple("rhophi").tuple;
  const std::vector<std::string> probes = {"L.(1)", "R.1.(2)", "R.(3)",
                                           "L.2.(1.2)", "R.3.(2.2.3)"};
  for (const Name& n : catalog_diagram_names()) {
    Diagram d = catalog_diagram(n).diagram;
    Diagram e = expand_diagram(s, t, d, {"L"});
    e = expand_diagram(s, t, e, {"R", "2"});
    EXPECT_TRUE(validate_diagram(s, t, e).diag.ok());
    for (const auto& p : probes)
      EXPECT_TRUE(same_address(image_of(s, t, d, p), image_of(s, t, e, p)))
          << n << " at " << p;
    EXPECT_EQ(diagram_equal(s, t, d, e), Verdict::Yes) << n;
  }
}

TEST(Expand, ThrowsOnNonLeaf) {
  auto s = catalog_system("gasket");
  auto t = catalog_tuple("rhophi").tuple;
  const Diagram r = catalog_diagram("r").diagram;
  EXPECT_THROW(expand_diagram(s, t, r, {"Z"}), input_error);
  EXPECT_THROW(expand_diagram(s, t, r, {"R"}), input_error);
}

TEST(Apply, PinnedExamples) {
  auto s = catalog_system("gasket");
  auto t = catalog_tuple("rhophi").tuple;
  const Diagram r = catalog_diagram("r").diagram;
  const Diagram a = catalog_diagram("a").diagram;

  EXPECT_EQ(format_address(image_of(s, t, r, "L.(1)")), "R.3.(3)");
  EXPECT_EQ(format_address(image_of(s, t, a, "L.(1)")), "R.2.(1)");
  EXPECT_EQ(format_address(image_of(s, t, r, "R.(1)")), "L.(2)");

  Diagram rr = compose(s, t, r, r);
  EXPECT_EQ(format_address(image_of(s, t, rr, "L.(1)")), "R.1.(3)");

  Diagram id = identity_diagram(s, base_expansion(s));
  for (const auto& p : {"L.(1)", "R.2.(3.1)"})
    EXPECT_TRUE(same_address(image_of(s, t, id, p), parse_address(p)));
}

TEST(Apply, FinitaryRelabelingKeepsTheTail) {
  auto s = catalog_system("airplane");
  auto t = catalog_tuple("phiInf").tuple;
  Diagram d = identity_diagram(s, base_expansion(s));
  d.edge_map[{"I"}] = {"F"};
  d.edge_map[{"F"}] = {"I"};
  d.edge_map[{"T"}] = {"B"};
  d.edge_map[{"B"}] = {"T"};
  auto check = validate_diagram(s, t, d);
  EXPECT_TRUE(check.diag.ok()) << check.diag.str();
  // All sections of the flip are trivial, so only the leading letter moves.
  EXPECT_EQ(format_address(image_of(s, t, d, "T.(0.1)")), "B.(0.1)");
  EXPECT_EQ(format_address(image_of(s, t, d, "I.(I.F)")), "F.(I.F)");
}

TEST(Apply, GrigorchukTailRewriting) {
  auto s = catalog_system("dendrite-3");
  auto t = catalog_tuple("grig").tuple;
  Diagram d = identity_diagram(s, base_expansion(s));
  d.labels[{"3"}] = parse_word("red", "b");
  EXPECT_TRUE(
      same_address(image_of(s, t, d, "3.(2)"), parse_address("3.2.3.(2)")));
}

TEST(Apply, FollowsTheVertexMap) {
  auto s = catalog_system("gasket");
  auto t = catalog_tuple("rhophi").tuple;
  const Diagram r = catalog_diagram("r").diagram;
  auto aut = build_gluing_automaton(s);
  // The top vertex t of the base is addressed both as L.(1) and R.(1); the
  // map sends it to the bottom vertex b = R.3.(3) = L.(2), so the two image
  // addresses must stay glued.
  auto i1 = image_of(s, t, r, "L.(1)");
  auto i2 = image_of(s, t, r, "R.(1)");
  EXPECT_TRUE(decide_glued(s, aut, i1, i2));
  EXPECT_TRUE(decide_glued(s, aut, i1, parse_address("L.(2)")));
}

TEST(Apply, PreservesGluing) {
  auto s = catalog_system("gasket");
  auto t = catalog_tuple("rhophi").tuple;
  const Diagram r = catalog_diagram("r").diagram;
  auto aut = build_gluing_automaton(s);
  std::mt19937 rng(2026);
  int glued_seen = 0;
  for (int i = 0; i < 40; ++i) {
    auto alpha = random_address(s, rng);
    auto beta = i % 4 == 0 ? alpha : random_address(s, rng);
    bool before = decide_glued(s, aut, alpha, beta);
    if (before) ++glued_seen;
    auto ia = apply_diagram(s, t, r, alpha);
    auto ib = apply_diagram(s, t, r, beta);
    ASSERT_TRUE(ia && ib);
    EXPECT_EQ(before, decide_glued(s, aut, *ia, *ib))
        << format_address(alpha) << " vs " << format_address(beta);
  }
  EXPECT_GT(glued_seen, 0);
}

TEST(Compose, MatchesPointwiseApplication) {
  auto s = catalog_system("gasket");
  auto t = catalog_tuple("rhophi").tuple;
  const Diagram r = catalog_diagram("r").diagram;
  const Diagram a = catalog_diagram("a").diagram;
  std::mt19937 rng(7);

  Diagram ra = compose(s, t, r, a);
  // Force an interface refinement: the inner diagram's range is finer than
  // the outer diagram's domain.
  Diagram ra2 = compose(s, t, r, expand_diagram(s, t, a, {"L"}));
  EXPECT_TRUE(validate_diagram(s, t, ra).diag.ok());
  EXPECT_TRUE(validate_diagram(s, t, ra2).diag.ok());
  for (int i = 0; i < 25; ++i) {
    auto alpha = random_address(s, rng);
    auto inner = apply_diagram(s, t, a, alpha);
    ASSERT_TRUE(inner.has_value());
    auto two_steps = apply_diagram(s, t, r, *inner);
    auto one_step = apply_diagram(s, t, ra, alpha);
    auto one_step2 = apply_diagram(s, t, ra2, alpha);
    ASSERT_TRUE(two_steps && one_step && one_step2);
    EXPECT_TRUE(same_address(*two_steps, *one_step)) << format_address(alpha);
    EXPECT_TRUE(same_address(*two_steps, *one_step2)) << format_address(alpha);
  }
}

TEST(Compose, GroupoidLaws) {
  auto s = catalog_system("gasket");
  auto t = catalog_tuple("rhophi").tuple;
  const Diagram r = catalog_diagram("r").diagram;
  const Diagram a = catalog_diagram("a").diagram;
  const Diagram id = identity_diagram(s, r.domain);

  EXPECT_EQ(diagram_equal(s, t, compose(s, t, r, invert(r)), id),
            Verdict::Yes);
  EXPECT_EQ(diagram_equal(s, t, compose(s, t, invert(r), r), id),
            Verdict::Yes);
  EXPECT_EQ(diagram_equal(s, t, invert(invert(a)), a), Verdict::Yes);
  EXPECT_EQ(diagram_equal(s, t, compose(s, t, compose(s, t, r, a), r),
                          compose(s, t, r, compose(s, t, a, r))),
            Verdict::Yes);
}

TEST(Equal, DistinguishesTheGenerators) {
  auto s = catalog_system("gasket");
  auto t = catalog_tuple("rhophi").tuple;
  const Diagram r = catalog_diagram("r").diagram;
  const Diagram a = catalog_diagram("a").diagram;
  EXPECT_EQ(diagram_equal(s, t, r, a), Verdict::No);
  // Changing a permutation on a topological-boundary position changes the
  // map.
  Diagram twisted = r;
  twisted.pi[{"R", "3"}] = {0, 2, 1};
  EXPECT_EQ(diagram_equal(s, t, r, twisted), Verdict::No);
}

TEST(Equal, PermutationRewritingOffTheBoundary) {
  // In the two-ray system the base endpoints touch a single cell each, so
  // the identity presentation tolerates a swapped permutation there: the
  // presented map is unchanged.
  auto s = catalog_system("houghton-2");
  auto t = trivial_tuple(s);
  Diagram id = identity_diagram(s, base_expansion(s));
  Diagram swapped = id;
  swapped.pi[{"s1"}] = {1, 0};
  EXPECT_TRUE(validate_diagram(s, t, swapped).diag.ok());
  EXPECT_EQ(diagram_equal(s, t, id, swapped), Verdict::Yes);
}

TEST(Equal, ModuloTrivialTails) {
  auto s = catalog_system("houghton-2");
  auto t = trivial_tuple(s);
  Expansion x = expand_hyperedge(s, base_expansion(s), {"s1"});
  Diagram f = identity_diagram(s, x);
  // Same point map, but one image is written through the trivial black rule.
  Diagram g = f;
  Expansion deeper = expand_hyperedge(s, x, {"s1", "b"});
  g.range = deeper;
  g.edge_map[{"s1", "b"}] = {"s1", "b", "t"};
  g.labels[{"s1", "b"}] = GroupWord{"black", {}};
  g.pi[{"s1", "b"}] = {0, 1};
  EXPECT_TRUE(validate_diagram(s, t, g).diag.ok());
  EXPECT_EQ(diagram_equal(s, t, f, g), Verdict::Yes);
}

TEST(Minimize, UndoesExpansionViaProvenance) {
  auto s = catalog_system("gasket");
  auto t = catalog_tuple("rhophi").tuple;
  const Diagram r = catalog_diagram("r").diagram;
  auto m = minimize(s, t, expand_diagram(s, t, r, {"L"}));
  EXPECT_TRUE(m.certified_minimal);
  EXPECT_EQ(m.diagram.domain.leaves.size(), 4u);
  EXPECT_EQ(m.diagram.edge_map, r.edge_map);
  EXPECT_EQ(m.diagram.labels, r.labels);
  EXPECT_EQ(m.diagram.pi, r.pi);
  EXPECT_TRUE(m.diagram.provenance.empty());
}

TEST(Minimize, FindsLabelsBySearch) {
  auto s = catalog_system("gasket");
  auto t = catalog_tuple("rhophi").tuple;
  const Diagram r = catalog_diagram("r").diagram;
  Diagram e = expand_diagram(s, t, r, {"L"});
  e.provenance.clear();
  auto m = minimize(s, t, e);
  EXPECT_TRUE(m.certified_minimal);
  EXPECT_EQ(m.diagram.domain.leaves.size(), 4u);
  // The search may land on any word presenting the same element (here rho'
  // instead of rho.rho); the maps must still agree.
  EXPECT_EQ(diagram_equal(s, t, m.diagram, r), Verdict::Yes);
}

TEST(Minimize, CollapsesTheIdentity) {
  auto s = catalog_system("sierpinski");
  auto t = catalog_tuple("rhophi").tuple;
  Expansion deeper = expand_hyperedge(s, base_expansion(s), {"X"});
  auto m = minimize(s, t, identity_diagram(s, deeper));
  EXPECT_TRUE(m.certified_minimal);
  EXPECT_EQ(m.diagram.domain.leaves.size(), 1u);
  EXPECT_EQ(diagram_equal(s, t, m.diagram,
                          identity_diagram(s, base_expansion(s))),
            Verdict::Yes);
}

TEST(Minimize, LeavesIrreducibleDiagramsAlone) {
  auto s = catalog_system("gasket");
  auto t = catalog_tuple("rhophi").tuple;
  const Diagram r = catalog_diagram("r").diagram;
  auto m = minimize(s, t, r);
  EXPECT_TRUE(m.certified_minimal);
  EXPECT_EQ(m.diagram.domain.leaves.size(), 4u);
  EXPECT_EQ(m.diagram.edge_map, r.edge_map);
}

TEST(Minimize, ReportsWhenTheSearchIsCutOff) {
  auto s = catalog_system("fullshift-2");
  auto t = catalog_tuple("grig-shift").tuple;
  // Sections of (ab)^4, an element far longer than the search bound.
  GroupWord g = parse_word("sh", "a.b.a.b.a.b.a.b");
  Diagram d = identity_diagram(s, expand_hyperedge(s, base_expansion(s), {"0"}));
  d.labels[{"0", "0"}] = state_of(s, t, g, {"0"});
  d.labels[{"0", "1"}] = state_of(s, t, g, {"1"});

  MinimizeOptions tight;
  tight.max_label_len = 2;
  tight.search_cap = 200;
  auto cut = minimize(s, t, d, tight);
  EXPECT_FALSE(cut.certified_minimal);
  EXPECT_EQ(cut.diagram.domain.leaves.size(), 3u);
  EXPECT_FALSE(cut.note.empty());

  // With the parent label remembered, the same family merges immediately.
  Diagram remembered = d;
  remembered.provenance[{"0"}] = g;
  auto m = minimize(s, t, remembered, tight);
  EXPECT_TRUE(m.certified_minimal);
  EXPECT_EQ(m.diagram.domain.leaves.size(), 2u);
  EXPECT_EQ(format_word(m.diagram.labels.at({"0"})), "a.b.a.b.a.b.a.b");
  EXPECT_EQ(diagram_equal(s, t, m.diagram, d), Verdict::Yes);
}

TEST(TrivialTuple, PlainRearrangements) {
  auto s = catalog_system("gasket");
  auto t = trivial_tuple(s);
  Diagram swap = gasket_base_swap(s);
  auto check = validate_diagram(s, t, swap);
  EXPECT_TRUE(check.diag.ok()) << check.diag.str();
  EXPECT_TRUE(check.exact);

  auto aut = build_gluing_automaton(s);
  auto im = image_of(s, t, swap, "L.(1)");
  EXPECT_EQ(format_address(im), "R.(1)");
  EXPECT_TRUE(decide_glued(s, aut, im, parse_address("L.(1)")));

  EXPECT_EQ(diagram_equal(s, t, compose(s, t, swap, swap),
                          identity_diagram(s, base_expansion(s))),
            Verdict::Yes);
  EXPECT_EQ(diagram_equal(s, t, swap, identity_diagram(s, base_expansion(s))),
            Verdict::No);
}

}  // namespace
}  // namespace hrs
