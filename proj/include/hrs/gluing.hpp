#pragma once

// The gluing relation on address sequences: two addresses denote the same
// point of the limit space exactly when, at every depth, the cells they
// select share a boundary vertex.  That condition is recognized by a finite
// safety automaton whose states remember which boundary positions of the two
// current cells coincide; a run is accepting when it never dies.  On top of
// the automaton sit an exact decision procedure for eventually periodic
// addresses, point classification (regular / singular / isolated), and the
// finite-depth vertex identification classes used by rendering and tests.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "hrs/replacement.hpp"
#include "hrs/shiftlang.hpp"

namespace hrs {

// Pairs (i, j) of 1-based boundary positions, position i of the first cell
// lying on the same vertex as position j of the second.  Repeated boundary
// vertices can make this a genuine relation rather than a partial bijection,
// so it is stored as a set of pairs.
using Matching = std::set<std::pair<int, int>>;

struct GluingState {
  enum class Kind { Start, Equal, Pair };

  Kind kind = Kind::Start;
  Name color_a;       // Equal: the common color; Pair: color of the first cell
  Name color_b;       // Pair: color of the second cell
  Matching matching;  // Pair only; always nonempty

  friend bool operator<(const GluingState& a, const GluingState& b) {
    return std::tie(a.kind, a.color_a, a.color_b, a.matching) <
           std::tie(b.kind, b.color_a, b.color_b, b.matching);
  }
  friend bool operator==(const GluingState& a, const GluingState& b) {
    return std::tie(a.kind, a.color_a, a.color_b, a.matching) ==
           std::tie(b.kind, b.color_a, b.color_b, b.matching);
  }
};

// Trimmed safety automaton: state 0 is Start, every state is reachable, and
// every state (except possibly Start itself) has an infinite live run.
// Missing transitions mean Dead.
struct GluingAutomaton {
  std::vector<GluingState> states;
  std::map<std::tuple<int, Name, Name>, int> transitions;

  // -1 encodes Dead.
  int step(int state, const Name& x, const Name& y) const {
    auto it = transitions.find({state, x, y});
    return it == transitions.end() ? -1 : it->second;
  }

  // Index of Equal(color), the start state for suffix addresses inside a
  // cell of that color; absent when no such state survived trimming.
  std::optional<int> equal_state(const Name& color) const {
    for (size_t i = 0; i < states.size(); ++i)
      if (states[i].kind == GluingState::Kind::Equal &&
          states[i].color_a == color)
        return static_cast<int>(i);
    return std::nullopt;
  }
};

namespace detail {

// Boundary positions of x and y lying on a common vertex of the ambient
// graph both edges live in.
inline Matching shared_matching(const Hyperedge& x, const Hyperedge& y) {
  Matching m;
  for (int i = 1; i <= x.ord(); ++i)
    for (int j = 1; j <= y.ord(); ++j)
      if (x.boundary[static_cast<size_t>(i - 1)] ==
          y.boundary[static_cast<size_t>(j - 1)])
        m.insert({i, j});
  return m;
}

}  // namespace detail

// Builds the trimmed gluing automaton.  Requires an almost expanding system:
// otherwise the relation recognized here need not be an equivalence.
inline GluingAutomaton build_gluing_automaton(const ReplacementSystem& s) {
  auto cls = classify_system(s);
  if (cls.expanding_class == ExpandingClass::Neither)
    throw input_error("gluing automaton requires an almost expanding system");

  GluingAutomaton a;
  std::map<GluingState, int> index;
  auto intern = [&](const GluingState& q) {
    auto [it, fresh] = index.insert({q, static_cast<int>(a.states.size())});
    if (fresh) a.states.push_back(q);
    return it->second;
  };
  intern(GluingState{});  // Start = 0

  for (int qi = 0; qi < static_cast<int>(a.states.size()); ++qi) {
    // Copy: a.states may reallocate while successors are interned.
    const GluingState q = a.states[static_cast<size_t>(qi)];
    auto add = [&](const Name& x, const Name& y, const GluingState& to) {
      a.transitions[{qi, x, y}] = intern(to);
    };
    if (q.kind == GluingState::Kind::Start ||
        q.kind == GluingState::Kind::Equal) {
      // Both addresses have read the same prefix; the next letters are edges
      // of the same graph (the base, or the rule of the common color).
      const ColoredHypergraph& g = q.kind == GluingState::Kind::Start
                                       ? s.base
                                       : s.rules.at(q.color_a).graph;
      for (const auto& [xn, xe] : g.edges)
        for (const auto& [yn, ye] : g.edges) {
          if (xn == yn) {
            add(xn, yn, GluingState{GluingState::Kind::Equal, xe.color, "",
                                    {}});
            continue;
          }
          Matching m = detail::shared_matching(xe, ye);
          if (!m.empty())
            add(xn, yn, GluingState{GluingState::Kind::Pair, xe.color,
                                    ye.color, m});
        }
    } else {
      // Diverged cells of colors (a, b) with identified boundary positions
      // q.matching.  A child position stays identified when it lands on a
      // rule boundary vertex that was identified in the parent.
      const ReplacementRule& ra = s.rules.at(q.color_a);
      const ReplacementRule& rb = s.rules.at(q.color_b);
      for (const auto& [xn, xe] : ra.graph.edges)
        for (const auto& [yn, ye] : rb.graph.edges) {
          Matching m;
          for (const auto& [i, j] : q.matching) {
            const Name& va = ra.boundary[static_cast<size_t>(i - 1)];
            const Name& vb = rb.boundary[static_cast<size_t>(j - 1)];
            for (int ji = 1; ji <= xe.ord(); ++ji)
              for (int jj = 1; jj <= ye.ord(); ++jj)
                if (xe.boundary[static_cast<size_t>(ji - 1)] == va &&
                    ye.boundary[static_cast<size_t>(jj - 1)] == vb)
                  m.insert({ji, jj});
          }
          if (!m.empty())
            add(xn, yn, GluingState{GluingState::Kind::Pair, xe.color,
                                    ye.color, m});
        }
    }
  }

  // Trim: keep states that are reachable from Start and have some infinite
  // run (a path that can always continue).  Start itself is always kept.
  size_t n = a.states.size();
  std::vector<bool> kept(n, true);
  for (bool changed = true; changed;) {
    changed = false;
    // Live: some outgoing transition into a kept state.
    std::vector<bool> live(n, false);
    for (const auto& [key, to] : a.transitions)
      if (kept[static_cast<size_t>(std::get<0>(key))] &&
          kept[static_cast<size_t>(to)])
        live[static_cast<size_t>(std::get<0>(key))] = true;
    // Reachable from Start through kept live states.
    std::vector<bool> reach(n, false);
    reach[0] = true;
    std::vector<int> todo{0};
    while (!todo.empty()) {
      int cur = todo.back();
      todo.pop_back();
      for (const auto& [key, to] : a.transitions) {
        if (std::get<0>(key) != cur) continue;
        if (kept[static_cast<size_t>(to)] && live[static_cast<size_t>(to)] &&
            !reach[static_cast<size_t>(to)]) {
          reach[static_cast<size_t>(to)] = true;
          todo.push_back(to);
        }
      }
    }
    for (size_t i = 0; i < n; ++i) {
      bool keep = i == 0 || (kept[i] && live[i] && reach[i]);
      if (kept[i] && !keep) {
        kept[i] = false;
        changed = true;
      }
    }
  }

  GluingAutomaton out;
  std::vector<int> remap(n, -1);
  for (size_t i = 0; i < n; ++i)
    if (kept[i]) {
      remap[i] = static_cast<int>(out.states.size());
      out.states.push_back(a.states[i]);
    }
  for (const auto& [key, to] : a.transitions) {
    int from = remap[static_cast<size_t>(std::get<0>(key))];
    int target = remap[static_cast<size_t>(to)];
    if (from >= 0 && target >= 0)
      out.transitions[{from, std::get<1>(key), std::get<2>(key)}] = target;
  }
  return out;
}

// Runs the joint word (alpha, beta) from the given state.  The run is
// infinite and eventually periodic, so it survives forever exactly when a
// (state, phase, phase) triple repeats before any Dead step.
inline bool decide_glued_from(const GluingAutomaton& a, int state,
                              const EventuallyPeriodic& alpha,
                              const EventuallyPeriodic& beta) {
  std::set<std::tuple<int, size_t, size_t>> seen;
  int q = state;
  for (size_t t = 0;; ++t) {
    if (!seen.insert({q, phase_at(alpha, t), phase_at(beta, t)}).second)
      return true;
    q = a.step(q, letter_at(alpha, t), letter_at(beta, t));
    if (q < 0) return false;
  }
}

// Exact decision of the gluing relation for full addresses.
inline bool decide_glued(const ReplacementSystem& s, const GluingAutomaton& a,
                         const EventuallyPeriodic& alpha,
                         const EventuallyPeriodic& beta) {
  for (const auto* addr : {&alpha, &beta}) {
    auto d = validate_address(s, *addr);
    if (!d.ok())
      throw input_error("invalid address " + format_address(*addr) + ": " +
                        d.str());
  }
  return decide_glued_from(a, 0, alpha, beta);
}

enum class PointKind { Regular, Singular, Isolated };

inline std::string to_string(PointKind k) {
  switch (k) {
    case PointKind::Regular: return "regular";
    case PointKind::Singular: return "singular";
    case PointKind::Isolated: return "isolated";
  }
  return "?";
}

struct PointClass {
  PointKind kind = PointKind::Regular;
  Word forcing_prefix;   // Isolated: shortest prefix with a trivial color
  Name witness_vertex;   // Singular: the expansion vertex the point equals
  Word witness_leaf;     // Singular: leaf whose boundary carries the witness
  int witness_index = 0; // 1-based boundary position of the witness there
};

namespace detail {

// Colors of the nonempty unrolled prefixes, computed far enough to cover
// every (phase, color) configuration the periodic part can reach.
inline std::vector<Name> prefix_colors(const ReplacementSystem& s,
                                       const EventuallyPeriodic& a) {
  size_t bound =
      a.prefix.size() + a.period.size() * (s.colors.size() + 1);
  std::vector<Name> out;
  std::optional<Name> c;
  for (size_t t = 0; t < bound; ++t) {
    c = t == 0 ? s.base_letter_color(letter_at(a, 0))
               : s.rule_letter_color(*c, letter_at(a, t));
    if (!c)
      throw input_error("address " + format_address(a) +
                        " leaves the shift language");
    out.push_back(*c);
  }
  return out;
}

}  // namespace detail

// Classifies the limit-space point of an address.  Isolated: some prefix has
// a trivial color, so the cells stop shrinking.  Singular: the point is a
// vertex of a finite expansion — detected by tracking, from some depth and
// starting vertex, the set T of boundary positions equal to that vertex; the
// step keeps exactly the child positions landing on rule boundary vertices
// indexed by T, and survival is decided by cycle detection.  Otherwise
// regular.
inline PointClass classify_point(const ReplacementSystem& s,
                                 const EventuallyPeriodic& alpha) {
  auto d = validate_address(s, alpha);
  if (!d.ok())
    throw input_error("invalid address " + format_address(alpha) + ": " +
                      d.str());
  auto colors = detail::prefix_colors(s, alpha);

  for (size_t t = 0; t < colors.size(); ++t)
    if (is_trivial_rule(colors[t], s.rules.at(colors[t]))) {
      PointClass out;
      out.kind = PointKind::Isolated;
      out.forcing_prefix = unroll(alpha, static_cast<int>(t) + 1);
      return out;
    }

  // The hyperedge selected by the prefix of length t+1 (0-based t).
  auto edge_at = [&](size_t t) -> const Hyperedge& {
    if (t == 0) return s.base.edges.at(letter_at(alpha, 0));
    return s.rules.at(colors[t - 1]).graph.edges.at(letter_at(alpha, t));
  };

  for (size_t t0 = 1; t0 <= colors.size(); ++t0) {
    const Hyperedge& e0 = edge_at(t0 - 1);
    std::set<Name> tried;
    for (const Name& v : e0.boundary) {
      if (!tried.insert(v).second) continue;
      std::set<int> track;
      for (int i = 1; i <= e0.ord(); ++i)
        if (e0.boundary[static_cast<size_t>(i - 1)] == v) track.insert(i);
      int start_index = *track.begin();

      std::set<std::tuple<size_t, Name, std::set<int>>> seen;
      bool survives = false;
      Name color = colors[t0 - 1];  // color of the cell at depth t
      for (size_t t = t0;; ++t) {
        if (!seen.insert({phase_at(alpha, t), color, track}).second) {
          survives = true;
          break;
        }
        const ReplacementRule& r = s.rules.at(color);
        const Hyperedge& x = r.graph.edges.at(letter_at(alpha, t));
        std::set<Name> hit;
        for (int i : track) hit.insert(r.boundary[static_cast<size_t>(i - 1)]);
        std::set<int> next;
        for (int j = 1; j <= x.ord(); ++j)
          if (hit.count(x.boundary[static_cast<size_t>(j - 1)]))
            next.insert(j);
        if (next.empty()) break;
        track = std::move(next);
        color = x.color;
      }
      if (!survives) continue;

      // Name the witness by replaying the expansion along the prefix.
      Expansion x = base_expansion(s);
      Word leaf = unroll(alpha, static_cast<int>(t0));
      for (size_t k = 1; k < t0; ++k)
        x = expand_hyperedge(s, x, Word(leaf.begin(),
                                        leaf.begin() + static_cast<long>(k)));
      PointClass out;
      out.kind = PointKind::Singular;
      out.witness_leaf = leaf;
      out.witness_index = start_index;
      out.witness_vertex =
          x.leaves.at(leaf).boundary[static_cast<size_t>(start_index - 1)];
      return out;
    }
  }
  return PointClass{};
}

// Expands every non-trivially-colored leaf until it has at least the given
// depth.  Trivial cells repeat forever, so they are left alone.
inline Expansion expand_to_depth(const ReplacementSystem& s, Expansion x,
                                 int depth) {
  for (bool again = true; again;) {
    again = false;
    for (const auto& [w, e] : x.leaves) {
      if (static_cast<int>(w.size()) >= depth) continue;
      if (is_trivial_rule(e.color, s.rules.at(e.color))) continue;
      x = expand_hyperedge(s, x, w);
      again = true;
      break;  // the leaf map changed; restart the scan
    }
  }
  return x;
}

// Finite-depth shadow of the gluing relation: occurrences (leaf, 1-based
// boundary position) grouped by the vertex they lie on.
using VertexOccurrences = std::map<Name, std::vector<std::pair<Word, int>>>;

inline VertexOccurrences glued_vertex_classes(const ReplacementSystem& s,
                                              const Expansion& x, int depth) {
  Expansion deep = expand_to_depth(s, x, depth);
  VertexOccurrences out;
  for (const auto& [w, e] : deep.leaves)
    for (int i = 1; i <= e.ord(); ++i)
      out[e.boundary[static_cast<size_t>(i - 1)]].push_back({w, i});
  return out;
}

}  // namespace hrs
