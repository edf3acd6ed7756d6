#pragma once

// Self-similar tuples: one group per color, each generator given by a
// color-preserving permutation of the rule's hyperedges (its action on the
// first letter) and a state word per letter (its action on the rest).  On
// top of the raw wreath recursion sit a word-problem oracle, a certifier for
// "generator g carries the boundary point at vertex v to the one at w",
// boundary permutation groups, the action on eventually periodic addresses,
// and a compatibility check against the gluing relation.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hrs/gluing.hpp"
#include "hrs/replacement.hpp"
#include "hrs/shiftlang.hpp"

namespace hrs {

// ---------------------------------------------------------------------------
// Group words.
// ---------------------------------------------------------------------------

struct SignedGen {
  Name name;
  bool inverse = false;

  friend bool operator==(const SignedGen&, const SignedGen&) = default;
};

// An element of the group attached to one color, written as a product of
// signed generators; the rightmost factor acts first, so "a.b" is a∘b.
struct GroupWord {
  Name color;
  std::vector<SignedGen> gens;

  bool is_identity_word() const { return gens.empty(); }

  friend bool operator==(const GroupWord&, const GroupWord&) = default;
};

// "a.b'.c" (a trailing apostrophe inverts); the empty string is the
// identity.
inline std::string format_word(const GroupWord& w) {
  std::string out;
  for (const auto& g : w.gens) {
    if (!out.empty()) out += '.';
    out += g.name;
    if (g.inverse) out += '\'';
  }
  return out;
}

inline GroupWord parse_word(const Name& color, const std::string& str) {
  GroupWord out{color, {}};
  for (const std::string& tok : split(str, '.')) {
    SignedGen g;
    g.inverse = !tok.empty() && tok.back() == '\'';
    g.name = g.inverse ? tok.substr(0, tok.size() - 1) : tok;
    if (!is_identifier(g.name))
      throw input_error("bad generator name '" + tok + "' in word '" + str +
                        "'");
    out.gens.push_back(std::move(g));
  }
  return out;
}

// Free reduction: cancel adjacent g·g⁻¹ pairs.
inline GroupWord reduced(GroupWord w) {
  std::vector<SignedGen> out;
  for (auto& g : w.gens) {
    if (!out.empty() && out.back().name == g.name &&
        out.back().inverse != g.inverse)
      out.pop_back();
    else
      out.push_back(std::move(g));
  }
  w.gens = std::move(out);
  return w;
}

inline GroupWord word_inverse(const GroupWord& w) {
  GroupWord out{w.color, {}};
  for (auto it = w.gens.rbegin(); it != w.gens.rend(); ++it)
    out.gens.push_back({it->name, !it->inverse});
  return out;
}

// a·b: b acts first.
inline GroupWord word_concat(const GroupWord& a, const GroupWord& b) {
  GroupWord out{a.color, a.gens};
  out.gens.insert(out.gens.end(), b.gens.begin(), b.gens.end());
  return reduced(std::move(out));
}

namespace detail {
inline std::string word_key(const GroupWord& w) {
  return w.color + "|" + format_word(w);
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Tuples.
// ---------------------------------------------------------------------------

struct Generator {
  std::map<Name, Name> perm;        // top action on the rule's edge names
  std::map<Name, GroupWord> states; // per letter; missing entries = identity
};

struct ColorGroup {
  std::map<Name, Generator> generators;
};

struct SelfSimilarTuple {
  std::map<Name, ColorGroup> groups;  // missing color = trivial group
};

inline SelfSimilarTuple trivial_tuple(const ReplacementSystem& s) {
  SelfSimilarTuple t;
  for (const Name& c : s.colors) t.groups[c];
  return t;
}

inline Diagnostics validate_tuple(const ReplacementSystem& s,
                                  const SelfSimilarTuple& t) {
  Diagnostics d;
  for (const auto& [c, grp] : t.groups) {
    if (!s.has_color(c)) {
      d.fail("tuple names unknown color '" + c + "'");
      continue;
    }
    const ColoredHypergraph& g = s.rules.at(c).graph;
    for (const auto& [gname, gen] : grp.generators) {
      std::string where = "generator '" + gname + "' of color " + c;
      if (!is_identifier(gname)) d.fail(where + ": bad name");
      // The permutation must be a color-preserving bijection of the edges.
      std::set<Name> images;
      for (const auto& [n, e] : g.edges) {
        auto it = gen.perm.find(n);
        if (it == gen.perm.end()) {
          d.fail(where + ": no image for letter '" + n + "'");
          continue;
        }
        auto target = g.edges.find(it->second);
        if (target == g.edges.end()) {
          d.fail(where + ": image '" + it->second + "' is not a letter");
          continue;
        }
        if (target->second.color != e.color)
          d.fail(where + ": letter '" + n + "' changes color");
        if (!images.insert(it->second).second)
          d.fail(where + ": image '" + it->second + "' repeated");
      }
      for (const auto& [n, img] : gen.perm)
        if (!g.edges.count(n)) d.fail(where + ": unknown letter '" + n + "'");
      // States must be words over the generators of the letter's color.
      for (const auto& [n, word] : gen.states) {
        auto e = g.edges.find(n);
        if (e == g.edges.end()) {
          d.fail(where + ": state at unknown letter '" + n + "'");
          continue;
        }
        if (word.color != e->second.color)
          d.fail(where + ": state at '" + n + "' is tagged with color '" +
                 word.color + "', expected '" + e->second.color + "'");
        auto child = t.groups.find(e->second.color);
        for (const auto& sg : word.gens)
          if (child == t.groups.end() ||
              !child->second.generators.count(sg.name))
            d.fail(where + ": state at '" + n + "' uses unknown generator '" +
                   sg.name + "' of color " + e->second.color);
      }
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// The wreath recursion.
// ---------------------------------------------------------------------------

// Image of letter x under the top action of w, together with the state of w
// at x.  The state of g⁻¹ at x is (g|_{ĝ⁻¹(x)})⁻¹.
inline std::pair<Name, GroupWord> letter_action(const ReplacementSystem& s,
                                                const SelfSimilarTuple& t,
                                                const GroupWord& w,
                                                const Name& x) {
  const ColoredHypergraph& g = s.rules.at(w.color).graph;
  auto xe = g.edges.find(x);
  if (xe == g.edges.end())
    throw input_error("letter '" + x + "' is not in the rule of color " +
                      w.color);
  GroupWord state{xe->second.color, {}};
  if (w.gens.empty()) return {x, state};

  const ColorGroup& grp = t.groups.at(w.color);
  std::vector<std::vector<SignedGen>> pieces(w.gens.size());
  Name cur = x;
  for (size_t i = w.gens.size(); i-- > 0;) {
    const SignedGen& sg = w.gens[i];
    const Generator& gen = grp.generators.at(sg.name);
    if (!sg.inverse) {
      auto st = gen.states.find(cur);
      if (st != gen.states.end()) pieces[i] = st->second.gens;
      cur = gen.perm.at(cur);
    } else {
      Name pre;
      for (const auto& [from, to] : gen.perm)
        if (to == cur) pre = from;
      auto st = gen.states.find(pre);
      if (st != gen.states.end())
        for (auto it = st->second.gens.rbegin(); it != st->second.gens.rend();
             ++it)
          pieces[i].push_back({it->name, !it->inverse});
      cur = pre;
    }
  }
  for (const auto& p : pieces)
    state.gens.insert(state.gens.end(), p.begin(), p.end());
  return {cur, reduced(std::move(state))};
}

// State of w at the suffix u: fold the recursion along the letters.
inline GroupWord state_of(const ReplacementSystem& s,
                          const SelfSimilarTuple& t, GroupWord w,
                          const Word& u) {
  for (const Name& x : u) w = letter_action(s, t, w, x).second;
  return w;
}

// Letterwise image of the suffix u under w.
inline Word top_image(const ReplacementSystem& s, const SelfSimilarTuple& t,
                      GroupWord w, const Word& u) {
  Word out;
  for (const Name& x : u) {
    auto [y, st] = letter_action(s, t, w, x);
    out.push_back(y);
    w = std::move(st);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Word problem.
// ---------------------------------------------------------------------------

struct TrivialityResult {
  Verdict verdict = Verdict::Undetermined;
  Word witness;       // No: a finite suffix on which the action is visible
  size_t explored = 0;
};

// Decides whether a word acts trivially.  Free-reduce, check the top action
// on every letter, recurse on states with memoization; a word reached again
// while in progress is assumed trivial, which is sound: an element is
// nontrivial exactly when some finite suffix exposes a nontrivial top
// action, and that search is exhaustive here.  The budget (distinct reduced
// words) turns potential non-termination into Undetermined.
inline TrivialityResult is_trivial(const ReplacementSystem& s,
                                   const SelfSimilarTuple& t,
                                   const GroupWord& w,
                                   size_t budget = 100000) {
  TrivialityResult res;
  std::map<std::string, int> status;  // 1 = in progress, 2 = trivial
  bool exhausted = false;
  std::function<std::optional<Word>(const GroupWord&)> rec =
      [&](const GroupWord& raw) -> std::optional<Word> {
    GroupWord g = reduced(raw);
    if (g.gens.empty()) return std::nullopt;
    std::string key = detail::word_key(g);
    if (status.count(key)) return std::nullopt;
    if (status.size() >= budget) {
      exhausted = true;
      return std::nullopt;
    }
    status[key] = 1;
    const ColoredHypergraph& rule = s.rules.at(g.color).graph;
    for (const auto& [x, e] : rule.edges)
      if (letter_action(s, t, g, x).first != x) return Word{x};
    for (const auto& [x, e] : rule.edges)
      if (auto sub = rec(letter_action(s, t, g, x).second)) {
        Word out{x};
        out.insert(out.end(), sub->begin(), sub->end());
        return out;
      }
    status[key] = 2;
    return std::nullopt;
  };
  auto witness = rec(w);
  res.explored = status.size();
  if (witness) {
    res.verdict = Verdict::No;
    res.witness = *witness;
  } else if (exhausted) {
    res.verdict = Verdict::Undetermined;
  } else {
    res.verdict = Verdict::Yes;
  }
  return res;
}

struct FinitaryResult {
  Verdict verdict = Verdict::Undetermined;
  int depth = 0;  // Yes: states at this depth and beyond are trivial
};

// A word is finitary when all its states are trivial from some depth on:
// the reachable graph of genuinely nontrivial states is acyclic.
inline FinitaryResult is_finitary(const ReplacementSystem& s,
                                  const SelfSimilarTuple& t,
                                  const GroupWord& w, size_t budget = 10000) {
  std::map<std::string, int> mark;  // 1 = on path, 2 = done
  std::map<std::string, int> depth;
  bool exhausted = false, cyclic = false;
  std::function<int(const GroupWord&)> rec = [&](const GroupWord& raw) -> int {
    GroupWord g = reduced(raw);
    if (g.gens.empty()) return 0;
    auto tv = is_trivial(s, t, g, budget);
    if (tv.verdict == Verdict::Undetermined) exhausted = true;
    if (tv.verdict == Verdict::Yes) return 0;
    std::string key = detail::word_key(g);
    auto it = mark.find(key);
    if (it != mark.end()) {
      if (it->second == 1) cyclic = true;
      return cyclic ? 0 : depth[key];
    }
    if (mark.size() >= budget) {
      exhausted = true;
      return 0;
    }
    mark[key] = 1;
    int best = 0;
    const ColoredHypergraph& rule = s.rules.at(g.color).graph;
    for (const auto& [x, e] : rule.edges) {
      if (cyclic || exhausted) break;
      best = std::max(best, rec(letter_action(s, t, g, x).second));
    }
    mark[key] = 2;
    depth[key] = best + 1;
    return best + 1;
  };
  int d = rec(w);
  FinitaryResult out;
  if (cyclic)
    out.verdict = Verdict::No;
  else if (exhausted)
    out.verdict = Verdict::Undetermined;
  else {
    out.verdict = Verdict::Yes;
    out.depth = d;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Certified vertex relations.
// ---------------------------------------------------------------------------

// Certifies statements "g carries the boundary point at rule vertex v to the
// boundary point at rule vertex w" (both vertices of R_{g.color}).  The
// point at v has exactly the addresses along which v stays on the cell
// boundary, so the statement reduces co-inductively to: for every letter x
// with image y, the child vertices of v under x and of w under y cover each
// other through certified child relations.  Computed as a greatest fixed
// point over the discovered closure; positive answers are exact.
class RelationCertifier {
 public:
  RelationCertifier(const ReplacementSystem& s, const SelfSimilarTuple& t,
                    size_t budget = 20000)
      : s_(s), t_(t), budget_(budget) {}

  Verdict certify(const GroupWord& g, const Name& v, const Name& w) {
    std::string seed = key(g, v, w);
    if (!discover(reduced(g), v, w)) return Verdict::Undetermined;
    evaluate();
    return truth_.at(seed) ? Verdict::Yes : Verdict::No;
  }

 private:
  struct Node {
    // Per letter: the two child vertex sets and the child relation keys,
    // indexed child-of-v x child-of-w; letters where both sets are empty
    // are dropped.  mismatch = some letter has exactly one side empty.
    bool mismatch = false;
    std::vector<std::pair<std::vector<std::string>,
                          std::pair<size_t, size_t>>> letters;
  };

  static std::string key(const GroupWord& g, const Name& v, const Name& w) {
    return detail::word_key(g) + "|" + v + "|" + w;
  }

  // Child rule-boundary vertices picked up by vertex v on edge x.
  std::set<Name> children(const Hyperedge& x, const Name& v) const {
    std::set<Name> out;
    const ReplacementRule& child = s_.rules.at(x.color);
    for (int j = 1; j <= x.ord(); ++j)
      if (x.boundary[static_cast<size_t>(j - 1)] == v)
        out.insert(child.boundary[static_cast<size_t>(j - 1)]);
    return out;
  }

  bool discover(const GroupWord& g, const Name& v, const Name& w) {
    std::vector<std::tuple<GroupWord, Name, Name>> todo{{g, v, w}};
    while (!todo.empty()) {
      auto [gw, cv, cw] = todo.back();
      todo.pop_back();
      std::string k = key(gw, cv, cw);
      if (nodes_.count(k)) continue;
      if (nodes_.size() >= budget_) return false;
      Node node;
      const ColoredHypergraph& rule = s_.rules.at(gw.color).graph;
      for (const auto& [xn, xe] : rule.edges) {
        auto [yn, st] = letter_action(s_, t_, gw, xn);
        std::set<Name> cvs = children(xe, cv);
        std::set<Name> cws = children(rule.edges.at(yn), cw);
        if (cvs.empty() && cws.empty()) continue;
        if (cvs.empty() || cws.empty()) {
          node.mismatch = true;
          break;
        }
        std::vector<std::string> keys;
        for (const Name& a : cvs)
          for (const Name& b : cws) {
            keys.push_back(key(st, a, b));
            todo.push_back({st, a, b});
          }
        node.letters.push_back({std::move(keys), {cvs.size(), cws.size()}});
      }
      nodes_[k] = std::move(node);
      truth_.emplace(k, !nodes_[k].mismatch);
    }
    return true;
  }

  void evaluate() {
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& [k, node] : nodes_) {
        if (!truth_[k]) continue;
        bool ok = !node.mismatch;
        for (const auto& [keys, dims] : node.letters) {
          if (!ok) break;
          auto [nv, nw] = dims;
          // Every child of v must reach some child of w and vice versa.
          for (size_t i = 0; i < nv && ok; ++i) {
            bool hit = false;
            for (size_t j = 0; j < nw; ++j)
              hit = hit || truth_[keys[i * nw + j]];
            ok = hit;
          }
          for (size_t j = 0; j < nw && ok; ++j) {
            bool hit = false;
            for (size_t i = 0; i < nv; ++i)
              hit = hit || truth_[keys[i * nw + j]];
            ok = hit;
          }
        }
        if (!ok) {
          truth_[k] = false;
          changed = true;
        }
      }
    }
  }

  const ReplacementSystem& s_;
  const SelfSimilarTuple& t_;
  size_t budget_;
  std::map<std::string, Node> nodes_;
  std::map<std::string, bool> truth_;
};

// ---------------------------------------------------------------------------
// Boundary permutation groups.
// ---------------------------------------------------------------------------

struct BoundaryGroupReport {
  Name color;
  std::set<Perm> group;           // 0-based permutations of boundary indices
  std::map<Name, Perm> realized;  // generator -> its boundary permutation
  std::vector<Name> excluded;     // generators without a certified action
  bool exact = true;              // false when a certification hit the budget
};

// The subgroup of Sym(d_c) realized on the boundary points by generators
// that certifiably restrict to boundary bijections.
inline BoundaryGroupReport boundary_perm_group(const ReplacementSystem& s,
                                               const SelfSimilarTuple& t,
                                               const Name& color,
                                               size_t budget = 20000) {
  BoundaryGroupReport out;
  out.color = color;
  const std::vector<Name>& bd = s.rules.at(color).boundary;
  int d = static_cast<int>(bd.size());
  RelationCertifier cert(s, t, budget);
  std::vector<Perm> gens;
  auto git = t.groups.find(color);
  if (git != t.groups.end())
    for (const auto& [gname, gen] : git->second.generators) {
      GroupWord g{color, {{gname, false}}};
      Perm p(static_cast<size_t>(d), -1);
      bool undecided = false;
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          Verdict v = cert.certify(g, bd[static_cast<size_t>(i)],
                                   bd[static_cast<size_t>(j)]);
          if (v == Verdict::Yes) {
            p[static_cast<size_t>(i)] = j;
            break;
          }
          if (v == Verdict::Undetermined) undecided = true;
        }
        if (p[static_cast<size_t>(i)] < 0) break;
      }
      if (undecided) out.exact = false;
      if (is_perm(p)) {
        out.realized[gname] = p;
        gens.push_back(p);
      } else {
        out.excluded.push_back(gname);
      }
    }
  out.group = generate_group(gens, d);
  return out;
}

// ---------------------------------------------------------------------------
// Action on eventually periodic addresses.
// ---------------------------------------------------------------------------

// Image of an eventually periodic suffix address under a group element.
// The output is again eventually periodic because the state orbit along the
// period is finite; nullopt when that orbit exceeds the budget.
inline std::optional<EventuallyPeriodic> apply_word(
    const ReplacementSystem& s, const SelfSimilarTuple& t, GroupWord w,
    const EventuallyPeriodic& a, size_t budget = 10000) {
  if (a.period.empty()) throw input_error("address has an empty period");
  EventuallyPeriodic out;
  for (const Name& x : a.prefix) {
    auto [y, st] = letter_action(s, t, w, x);
    out.prefix.push_back(y);
    w = std::move(st);
  }
  std::map<std::pair<size_t, std::string>, size_t> seen;
  Word emitted;
  for (size_t k = 0;; ++k) {
    size_t phase = k % a.period.size();
    auto key = std::make_pair(phase, detail::word_key(w));
    auto it = seen.find(key);
    if (it != seen.end()) {
      long cut = static_cast<long>(it->second);
      out.prefix.insert(out.prefix.end(), emitted.begin(),
                        emitted.begin() + cut);
      out.period.assign(emitted.begin() + cut, emitted.end());
      return out;
    }
    if (seen.size() >= budget) return std::nullopt;
    seen[key] = emitted.size();
    auto [y, st] = letter_action(s, t, w, a.period[phase]);
    emitted.push_back(y);
    w = std::move(st);
  }
}

// ---------------------------------------------------------------------------
// Compatibility with the gluing relation.
// ---------------------------------------------------------------------------

struct CompatibilityIssue {
  Name color;
  std::string generator;  // "g" or "g'"
  EventuallyPeriodic alpha, beta;
};

struct CompatibilityReport {
  bool compatible = true;
  std::vector<CompatibilityIssue> issues;
  std::vector<Name> undetermined;  // generators whose image ran out of budget
  int pairs_checked = 0;
  int depth = 0;     // path/cycle length bound used in the enumeration
  bool complete = true;  // enumeration was not truncated by the pair cap
  bool finitary = true;  // all generators are finitary
};

// Verifies that every generator (and its inverse) carries glued address
// pairs to glued address pairs.  Glued pairs are enumerated as lassos in
// the gluing automaton starting from Equal(color): a simple path followed
// by a simple cycle.  With the default depth every simple lasso is covered.
inline CompatibilityReport check_compatibility(const ReplacementSystem& s,
                                               const SelfSimilarTuple& t,
                                               int depth = 0,
                                               size_t max_pairs = 2000) {
  GluingAutomaton a = build_gluing_automaton(s);
  CompatibilityReport rep;
  rep.depth = depth > 0 ? depth : static_cast<int>(a.states.size());

  std::map<int, std::vector<std::tuple<Name, Name, int>>> adj;
  for (const auto& [key, to] : a.transitions)
    adj[std::get<0>(key)].push_back(
        {std::get<1>(key), std::get<2>(key), to});

  for (const Name& c : s.colors) {
    auto eq = a.equal_state(c);
    auto git = t.groups.find(c);
    if (!eq || git == t.groups.end()) continue;
    std::vector<std::pair<std::string, GroupWord>> gens;
    for (const auto& [gname, gen] : git->second.generators) {
      gens.push_back({gname, GroupWord{c, {{gname, false}}}});
      gens.push_back({gname + "'", GroupWord{c, {{gname, true}}}});
      if (is_finitary(s, t, GroupWord{c, {{gname, false}}}).verdict !=
          Verdict::Yes)
        rep.finitary = false;
    }
    if (gens.empty()) continue;

    // Enumerate lassos: simple path from Equal(c), then a simple cycle.
    std::vector<std::pair<EventuallyPeriodic, EventuallyPeriodic>> pairs;
    std::set<std::string> dedup;
    std::function<void(int, int, Word&, Word&, std::set<int>&,
                       const Word&, const Word&)>
        find_cycles = [&](int anchor, int cur, Word& la, Word& lb,
                          std::set<int>& seen_states, const Word& pa,
                          const Word& pb) {
          if (pairs.size() >= max_pairs) {
            rep.complete = false;
            return;
          }
          for (const auto& [x, y, to] : adj[cur]) {
            if (static_cast<int>(la.size()) >= rep.depth) break;
            la.push_back(x);
            lb.push_back(y);
            if (to == anchor) {
              EventuallyPeriodic alpha{pa, la}, beta{pb, lb};
              std::string sig = format_address(alpha) + "~" +
                                format_address(beta);
              if (dedup.insert(sig).second) pairs.push_back({alpha, beta});
            } else if (!seen_states.count(to)) {
              seen_states.insert(to);
              find_cycles(anchor, to, la, lb, seen_states, pa, pb);
              seen_states.erase(to);
            }
            la.pop_back();
            lb.pop_back();
          }
        };

    std::function<void(int, Word&, Word&, std::set<int>&)> find_paths =
        [&](int cur, Word& pa, Word& pb, std::set<int>& seen_states) {
          {
            Word la, lb;
            std::set<int> on_cycle;
            find_cycles(cur, cur, la, lb, on_cycle, pa, pb);
          }
          if (static_cast<int>(pa.size()) >= rep.depth) return;
          if (pairs.size() >= max_pairs) {
            rep.complete = false;
            return;
          }
          for (const auto& [x, y, to] : adj[cur]) {
            if (seen_states.count(to)) continue;
            seen_states.insert(to);
            pa.push_back(x);
            pb.push_back(y);
            find_paths(to, pa, pb, seen_states);
            pa.pop_back();
            pb.pop_back();
            seen_states.erase(to);
          }
        };
    Word pa, pb;
    std::set<int> seen_states{*eq};
    find_paths(*eq, pa, pb, seen_states);

    for (const auto& [alpha, beta] : pairs) {
      ++rep.pairs_checked;
      for (const auto& [label, g] : gens) {
        auto ia = apply_word(s, t, g, alpha);
        auto ib = apply_word(s, t, g, beta);
        if (!ia || !ib) {
          if (std::find(rep.undetermined.begin(), rep.undetermined.end(),
                        label) == rep.undetermined.end())
            rep.undetermined.push_back(label);
          continue;
        }
        if (!decide_glued_from(a, *eq, *ia, *ib)) {
          rep.compatible = false;
          rep.issues.push_back({c, label, alpha, beta});
        }
      }
    }
  }
  return rep;
}

}  // namespace hrs
