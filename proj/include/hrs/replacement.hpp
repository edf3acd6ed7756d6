// Replacement systems: a base hypergraph plus one replacement rule per
// color, the consistency checks, the expanding / almost-expanding
// classification, and the hyperedge-expansion engine.
//
// An expansion is identified by its set of leaf addresses (dot-joined words
// of hyperedge letters); expanding leaf e against rule R_{c(e)} replaces it
// with one leaf e.y per rule hyperedge y.  Rule-boundary vertices are
// identified with e's boundary vertices; internal rule vertices get the
// fresh name "<e>:<v>".
#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hrs/base.hpp"
#include "hrs/hypergraph.hpp"

namespace hrs {

struct ReplacementRule {
  ColoredHypergraph graph;
  std::vector<Name> boundary;  // d_k pairwise distinct vertices of graph

  int arity() const { return static_cast<int>(boundary.size()); }

  // Index (0-based) of v within the rule boundary, or -1 if internal.
  int boundary_index(const Name& v) const {
    auto it = std::find(boundary.begin(), boundary.end(), v);
    return it == boundary.end() ? -1
                                : static_cast<int>(it - boundary.begin());
  }
};

struct ReplacementSystem {
  std::vector<Name> colors;
  ColoredHypergraph base;
  std::map<Name, ReplacementRule> rules;

  bool has_color(const Name& k) const { return rules.count(k) > 0; }

  int arity(const Name& color) const { return rules.at(color).arity(); }

  // Color of a base letter, if it names a base hyperedge.
  std::optional<Name> base_letter_color(const Name& letter) const {
    auto it = base.edges.find(letter);
    if (it == base.edges.end()) return std::nullopt;
    return it->second.color;
  }

  // Color of `letter` as a hyperedge of R_{color}, if present.
  std::optional<Name> rule_letter_color(const Name& color,
                                        const Name& letter) const {
    auto it = rules.find(color);
    if (it == rules.end()) return std::nullopt;
    auto jt = it->second.graph.edges.find(letter);
    if (jt == it->second.graph.edges.end()) return std::nullopt;
    return jt->second.color;
  }

  // Maximum number of hyperedges over all rule graphs.
  int max_rule_size() const {
    size_t d = 0;
    for (const auto& [k, r] : rules) d = std::max(d, r.graph.edges.size());
    return static_cast<int>(d);
  }
};

// ---------------------------------------------------------------------------
// Validation: hypergraph invariants on base and every rule graph, arity
// consistency (every k-colored hyperedge anywhere has order d_k), one rule
// per used color, distinct rule boundaries.
// ---------------------------------------------------------------------------
inline Diagnostics validate_system(const ReplacementSystem& s) {
  Diagnostics d;
  {
    auto bd = validate_hypergraph(s.base);
    for (const auto& e : bd.errors) d.fail("base: " + e);
  }
  std::set<Name> colorset(s.colors.begin(), s.colors.end());
  if (colorset.size() != s.colors.size())
    d.fail("color list contains duplicates");
  for (const auto& [k, r] : s.rules) {
    if (!colorset.count(k))
      d.fail("rule for color '" + k + "' which is not in the color list");
    auto rd = validate_hypergraph(r.graph);
    for (const auto& e : rd.errors) d.fail("rule '" + k + "': " + e);
    if (r.arity() < 2)
      d.fail("rule '" + k + "' has fewer than 2 boundary vertices");
    std::set<Name> seen;
    for (const auto& v : r.boundary) {
      if (!r.graph.has_vertex(v))
        d.fail("rule '" + k + "' boundary vertex '" + v +
               "' is not in the rule graph");
      if (!seen.insert(v).second)
        d.fail("rule '" + k + "' boundary vertex '" + v + "' repeats");
    }
    // Rule and base names must be plain identifiers (addresses are built by
    // joining them with '.').
    for (const auto& [n, e] : r.graph.edges)
      if (!is_identifier(n))
        d.fail("rule '" + k + "' hyperedge name '" + n +
               "' is not an identifier");
    for (const auto& v : r.graph.vertices)
      if (!is_identifier(v))
        d.fail("rule '" + k + "' vertex name '" + v + "' is not an identifier");
  }
  for (const auto& [n, e] : s.base.edges)
    if (!is_identifier(n))
      d.fail("base hyperedge name '" + n + "' is not an identifier");
  for (const auto& v : s.base.vertices)
    if (!is_identifier(v))
      d.fail("base vertex name '" + v + "' is not an identifier");
  for (const auto& k : s.colors)
    if (!s.rules.count(k)) d.fail("color '" + k + "' has no replacement rule");
  // Arity consistency across every k-colored hyperedge anywhere.
  auto check_edge = [&](const std::string& where, const Name& n,
                        const Hyperedge& e) {
    auto it = s.rules.find(e.color);
    if (it == s.rules.end()) {
      d.fail(where + ": hyperedge '" + n + "' has unknown color '" + e.color +
             "'");
      return;
    }
    if (e.ord() != it->second.arity())
      d.fail(where + ": hyperedge '" + n + "' of color '" + e.color +
             "' has order " + std::to_string(e.ord()) + " but d_" + e.color +
             " = " + std::to_string(it->second.arity()));
  };
  for (const auto& [n, e] : s.base.edges) check_edge("base", n, e);
  for (const auto& [k, r] : s.rules)
    for (const auto& [n, e] : r.graph.edges) check_edge("rule '" + k + "'", n, e);
  return d;
}

// ---------------------------------------------------------------------------
// Classification.
// ---------------------------------------------------------------------------
enum class ExpandingClass { Expanding, AlmostExpanding, Neither };

inline std::string to_string(ExpandingClass c) {
  switch (c) {
    case ExpandingClass::Expanding:
      return "expanding";
    case ExpandingClass::AlmostExpanding:
      return "almost-expanding";
    case ExpandingClass::Neither:
      return "neither";
  }
  return "?";
}

struct Classification {
  std::set<Name> reachable_colors;  // colors of hyperedges occurring in
                                    // some expansion
  std::set<Name> isolated_colors;   // every occurrence is an isolated edge
  std::set<Name> trivial_colors;
  ExpandingClass expanding_class = ExpandingClass::Neither;
  int max_rule_size = 0;
};

// A rule is trivial when its graph is a single hyperedge of the rule's own
// color whose boundary is exactly the rule boundary (possibly reordered).
inline bool is_trivial_rule(const Name& color, const ReplacementRule& r) {
  if (r.graph.edges.size() != 1) return false;
  const Hyperedge& e = r.graph.edges.begin()->second;
  if (e.color != color) return false;
  if (e.ord() != r.arity()) return false;
  std::set<Name> eb(e.boundary.begin(), e.boundary.end());
  std::set<Name> rb(r.boundary.begin(), r.boundary.end());
  return eb == rb && static_cast<int>(eb.size()) == r.arity();
}

namespace detail {

// True iff two distinct vertices of `vs` lie on a common hyperedge of g.
inline bool has_adjacent_pair(const ColoredHypergraph& g,
                              const std::vector<Name>& vs) {
  for (size_t i = 0; i < vs.size(); ++i)
    for (size_t j = i + 1; j < vs.size(); ++j)
      for (const auto& [n, e] : g.edges) {
        bool a = std::find(e.boundary.begin(), e.boundary.end(), vs[i]) !=
                 e.boundary.end();
        bool b = std::find(e.boundary.begin(), e.boundary.end(), vs[j]) !=
                 e.boundary.end();
        if (a && b) return true;
      }
  return false;
}

// Does vertex v lie on some edge of g other than `self`?
inline bool vertex_shared_beyond(const ColoredHypergraph& g, const Name& v,
                                 const Name& self) {
  for (const auto& [n, e] : g.edges) {
    if (n == self) continue;
    if (std::find(e.boundary.begin(), e.boundary.end(), v) != e.boundary.end())
      return true;
  }
  return false;
}

}  // namespace detail

// Computes reachable colors, isolated colors, trivial colors and the
// expanding class.  Isolation is decided by a fixpoint: position i of color
// k is "exposed" when some k-colored hyperedge in some expansion shares its
// i-th boundary vertex with another hyperedge; a color is isolated when no
// occurrence is ever adjacent to another hyperedge.
inline Classification classify_system(const ReplacementSystem& s) {
  auto d = validate_system(s);
  if (!d.ok()) throw input_error("inconsistent system: " + d.str());
  Classification out;
  out.max_rule_size = s.max_rule_size();
  for (const auto& [k, r] : s.rules)
    if (is_trivial_rule(k, r)) out.trivial_colors.insert(k);

  // Reachable colors: colors of base edges, closed under rule contents.
  std::deque<Name> work;
  for (const auto& [n, e] : s.base.edges)
    if (out.reachable_colors.insert(e.color).second) work.push_back(e.color);
  while (!work.empty()) {
    Name k = work.front();
    work.pop_front();
    for (const auto& [n, e] : s.rules.at(k).graph.edges)
      if (out.reachable_colors.insert(e.color).second) work.push_back(e.color);
  }

  // Exposure fixpoint on (color, boundary position).
  std::set<std::pair<Name, int>> exposed;
  auto expose = [&](const Name& k, int i) {
    return exposed.insert({k, i}).second;
  };
  // Seeds: adjacency visible inside the base or inside a reachable rule.
  auto seed_graph = [&](const ColoredHypergraph& g) {
    for (const auto& [n, e] : g.edges)
      for (int i = 0; i < e.ord(); ++i) {
        const Name& v = e.boundary[static_cast<size_t>(i)];
        if (detail::vertex_shared_beyond(g, v, n)) expose(e.color, i);
      }
  };
  seed_graph(s.base);
  for (const auto& k : out.reachable_colors) seed_graph(s.rules.at(k).graph);
  // Propagation: a rule edge touching an exposed host boundary position is
  // itself exposed at that position.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& k : out.reachable_colors) {
      const auto& r = s.rules.at(k);
      for (const auto& [n, e] : r.graph.edges)
        for (int i = 0; i < e.ord(); ++i) {
          int bi = r.boundary_index(e.boundary[static_cast<size_t>(i)]);
          if (bi >= 0 && exposed.count({k, bi}))
            changed |= expose(e.color, i);
        }
    }
  }
  for (const auto& k : s.colors) {
    bool adjacent_somewhere = false;
    for (int i = 0; i < s.arity(k) && !adjacent_somewhere; ++i)
      if (exposed.count({k, i})) adjacent_somewhere = true;
    if (!adjacent_somewhere) out.isolated_colors.insert(k);
  }

  // Expanding class from the two adjacency bullets.
  bool almost = true;
  bool strict = true;
  for (const auto& k : s.colors) {
    const auto& r = s.rules.at(k);
    bool adj = detail::has_adjacent_pair(r.graph, r.boundary);
    if (adj) strict = false;
    if (out.isolated_colors.count(k)) {
      if (!out.trivial_colors.count(k) && adj) almost = false;
    } else {
      if (adj) almost = false;
    }
  }
  out.expanding_class = !almost ? ExpandingClass::Neither
                       : strict ? ExpandingClass::Expanding
                                : ExpandingClass::AlmostExpanding;
  return out;
}

// ---------------------------------------------------------------------------
// Expansions.
// ---------------------------------------------------------------------------
struct Expansion {
  // Leaf address -> hyperedge occurrence (color + boundary vertex names).
  std::map<Word, Hyperedge> leaves;

  bool is_leaf(const Word& w) const { return leaves.count(w) > 0; }

  std::set<Name> vertices() const {
    std::set<Name> out;
    for (const auto& [w, e] : leaves)
      out.insert(e.boundary.begin(), e.boundary.end());
    return out;
  }

  std::vector<Word> sorted_leaves() const {
    std::vector<Word> out;
    for (const auto& [w, e] : leaves) out.push_back(w);
    return out;
  }
};

inline Expansion base_expansion(const ReplacementSystem& s) {
  Expansion x;
  for (const auto& [n, e] : s.base.edges) x.leaves[{n}] = e;
  return x;
}

// Replace leaf e by one leaf per hyperedge of its color's rule.  Boundary
// inheritance: position j of child e.y gets the host's i-th boundary vertex
// when the rule vertex at j is the i-th rule-boundary vertex, otherwise the
// fresh internal name "<e>:<v>".
inline Expansion expand_hyperedge(const ReplacementSystem& s,
                                  const Expansion& x, const Word& e) {
  auto it = x.leaves.find(e);
  if (it == x.leaves.end())
    throw input_error("not a leaf: '" + join(e) + "'");
  const Hyperedge host = it->second;
  const ReplacementRule& rule = s.rules.at(host.color);
  Expansion out = x;
  out.leaves.erase(e);
  const std::string prefix = join(e);
  for (const auto& [y, re] : rule.graph.edges) {
    Word child = e;
    child.push_back(y);
    Hyperedge ce;
    ce.color = re.color;
    for (const auto& rv : re.boundary) {
      int bi = rule.boundary_index(rv);
      if (bi >= 0)
        ce.boundary.push_back(host.boundary[static_cast<size_t>(bi)]);
      else
        ce.boundary.push_back(prefix + ":" + rv);
    }
    out.leaves[child] = ce;
  }
  return out;
}

// The expansion as a plain hypergraph (edge names = dotted addresses).
inline ColoredHypergraph to_hypergraph(const Expansion& x) {
  ColoredHypergraph g;
  for (const auto& [w, e] : x.leaves) {
    g.edges[join(w)] = e;
    for (const auto& v : e.boundary) g.vertices.insert(v);
  }
  return g;
}

// Per-position boundary flags of a leaf: true = the vertex there is shared
// with another leaf (topological boundary), false = interior.
inline std::vector<bool> boundary_status(const Expansion& x, const Word& e) {
  auto it = x.leaves.find(e);
  if (it == x.leaves.end())
    throw input_error("not a leaf: '" + join(e) + "'");
  const Hyperedge& ed = it->second;
  std::vector<bool> out;
  for (const auto& v : ed.boundary) {
    bool shared = false;
    for (const auto& [w2, e2] : x.leaves) {
      if (w2 == e) continue;
      if (std::find(e2.boundary.begin(), e2.boundary.end(), v) !=
          e2.boundary.end()) {
        shared = true;
        break;
      }
    }
    out.push_back(shared);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reconstructing an expansion from its leaf set (and validating the set).
// ---------------------------------------------------------------------------
namespace detail {

// Check that `suffixes` (nonempty, sorted set of words) is a complete
// frontier of expansions of a single hyperedge of color k.
inline bool is_rule_frontier(const ReplacementSystem& s, const Name& color,
                             const std::set<Word>& suffixes,
                             std::string* why) {
  if (suffixes.size() == 1 && suffixes.begin()->empty()) return true;
  const auto& rule = s.rules.at(color);
  std::map<Name, std::set<Word>> groups;
  for (const auto& w : suffixes) {
    if (w.empty()) {
      if (why) *why = "a leaf is a proper prefix of another leaf";
      return false;
    }
    groups[w.front()].insert(Word(w.begin() + 1, w.end()));
  }
  for (const auto& [n, e] : rule.graph.edges)
    if (!groups.count(n)) {
      if (why)
        *why = "missing subtree for rule hyperedge '" + n + "' of color '" +
               color + "'";
      return false;
    }
  for (const auto& [letter, sub] : groups) {
    auto it = rule.graph.edges.find(letter);
    if (it == rule.graph.edges.end()) {
      if (why)
        *why = "letter '" + letter + "' is not a hyperedge of the rule for '" +
               color + "'";
      return false;
    }
    if (!is_rule_frontier(s, it->second.color, sub, why)) return false;
  }
  return true;
}

}  // namespace detail

// Is `leaves` exactly the leaf set of some finite expansion sequence?
inline Diagnostics validate_leaf_set(const ReplacementSystem& s,
                                     const std::set<Word>& leaves) {
  Diagnostics d;
  if (leaves.empty()) {
    d.fail("empty leaf set");
    return d;
  }
  std::map<Name, std::set<Word>> groups;
  for (const auto& w : leaves) {
    if (w.empty()) {
      d.fail("empty address in leaf set");
      return d;
    }
    groups[w.front()].insert(Word(w.begin() + 1, w.end()));
  }
  for (const auto& [n, e] : s.base.edges)
    if (!groups.count(n))
      d.fail("missing subtree for base hyperedge '" + n + "'");
  for (const auto& [letter, sub] : groups) {
    auto it = s.base.edges.find(letter);
    if (it == s.base.edges.end()) {
      d.fail("letter '" + letter + "' is not a base hyperedge");
      continue;
    }
    std::string why;
    if (!detail::is_rule_frontier(s, it->second.color, sub, &why))
      d.fail("subtree of '" + letter + "': " + why);
  }
  return d;
}

// Rebuild the Expansion value for a valid leaf set by replaying expansions.
inline Expansion expansion_from_leaves(const ReplacementSystem& s,
                                       const std::set<Word>& leaves) {
  auto d = validate_leaf_set(s, leaves);
  if (!d.ok()) throw input_error("invalid leaf set: " + d.str());
  Expansion x = base_expansion(s);
  // Expand any leaf that is a proper prefix of a target leaf.
  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto& [w, e] : x.leaves) {
      if (leaves.count(w)) continue;
      x = expand_hyperedge(s, x, w);
      progress = true;
      break;
    }
  }
  return x;
}

// ---------------------------------------------------------------------------
// Enumeration of all expansions with at most max_leaves leaves, identified
// by leaf set, in deterministic order (leaf count, then lexicographic).
//
// Only non-trivially-colored leaves are expanded: a trivial color's rule
// keeps the leaf count constant, so including those steps would make the
// stream infinite (e.g. an isolated trivial edge can be renamed forever).
// Callers needing a trivial step can apply expand_hyperedge directly.
// ---------------------------------------------------------------------------
inline std::vector<Expansion> enumerate_expansions(const ReplacementSystem& s,
                                                   int max_leaves) {
  if (max_leaves < static_cast<int>(s.base.edges.size()))
    throw input_error("max_leaves is smaller than the base hypergraph");
  auto cls = classify_system(s);
  for (const auto& k : cls.reachable_colors)
    if (!cls.trivial_colors.count(k) && s.rules.at(k).graph.edges.size() < 2)
      throw input_error(
          "color '" + k +
          "' has a non-trivial single-hyperedge rule; enumeration by leaf "
          "count does not terminate");
  std::set<std::vector<Word>> seen;
  std::deque<Expansion> work;
  std::vector<Expansion> out;
  Expansion b = base_expansion(s);
  seen.insert(b.sorted_leaves());
  work.push_back(b);
  while (!work.empty()) {
    Expansion x = work.front();
    work.pop_front();
    out.push_back(x);
    for (const auto& [w, e] : x.leaves) {
      if (cls.trivial_colors.count(e.color)) continue;
      int grow = static_cast<int>(s.rules.at(e.color).graph.edges.size()) - 1;
      if (static_cast<int>(x.leaves.size()) + grow > max_leaves) continue;
      Expansion y = expand_hyperedge(s, x, w);
      if (seen.insert(y.sorted_leaves()).second) work.push_back(y);
    }
  }
  std::sort(out.begin(), out.end(), [](const Expansion& a, const Expansion& b) {
    if (a.leaves.size() != b.leaves.size())
      return a.leaves.size() < b.leaves.size();
    return a.sorted_leaves() < b.sorted_leaves();
  });
  return out;
}

}  // namespace hrs
