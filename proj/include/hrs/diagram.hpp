#pragma once

// Diagrams: finitely presented homeomorphisms between limit spaces of a
// replacement system, relative to a self-similar tuple of groups.
//
// A diagram consists of two expansions of the base graph (domain and range),
// a color-preserving bijection between their leaf sets, one group word per
// domain leaf (the label, an element of the tuple's group for that color),
// and one boundary permutation per domain leaf.  Together these present the
// point map
//
//     e . alpha  |->  edge_map(e) . label_e(alpha)
//
// on full addresses.  Validity requires the leaf bijection to extend to a
// pi-isomorphism of the two expansions whose permutations agree, on every
// topological-boundary position, with the boundary behaviour of the labels.
//
// Diagrams form a groupoid: `compose`, `invert` and `identity_diagram`
// implement it, `expand_diagram` refines a presentation without changing the
// point map, `diagram_equal` decides equality of point maps, and `minimize`
// searches for a coarsest presentation by merging sibling families back into
// their parents.

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hrs/gluing.hpp"
#include "hrs/replacement.hpp"
#include "hrs/selfsim.hpp"
#include "hrs/shiftlang.hpp"

namespace hrs {

struct Diagram {
  Expansion domain;
  Expansion range;
  // Domain leaf -> range leaf (bijective, color preserving).
  std::map<Word, Word> edge_map;
  // Domain leaf -> label (group word of the leaf's color).
  std::map<Word, GroupWord> labels;
  // Domain leaf -> boundary permutation (0-based one-line images).
  std::map<Word, Perm> pi;
  // Former leaves remembered across expansions: node address -> the label it
  // carried before it was expanded.  Working data for `minimize`; not part of
  // the presented map and not serialized.
  std::map<Word, GroupWord> provenance;
};

inline Diagram identity_diagram(const ReplacementSystem& s,
                                const Expansion& x) {
  (void)s;
  Diagram d;
  d.domain = x;
  d.range = x;
  for (const auto& [w, e] : x.leaves) {
    d.edge_map[w] = w;
    d.labels[w] = GroupWord{e.color, {}};
    d.pi[w] = identity_perm(static_cast<size_t>(e.ord()));
  }
  return d;
}

namespace detail {

// Distinct rule-boundary positions can carry the same point of the cone
// (the two ends of a trivially colored cell, for instance).  Class ids per
// position, computed from the identity's certified relation.
inline std::vector<int> boundary_point_classes(const ReplacementSystem& s,
                                               RelationCertifier& cert,
                                               const Name& color) {
  const auto& bd = s.rules.at(color).boundary;
  const GroupWord id{color, {}};
  std::vector<int> cls(bd.size(), -1);
  int next = 0;
  for (size_t i = 0; i < bd.size(); ++i) {
    if (cls[i] >= 0) continue;
    cls[i] = next;
    for (size_t j = i + 1; j < bd.size(); ++j)
      if (cls[j] < 0 && cert.certify(id, bd[i], bd[j]) == Verdict::Yes)
        cls[j] = next;
    ++next;
  }
  return cls;
}

struct BoundaryBehaviour {
  // Per rule-boundary position, the first certified image position; kNone
  // when every candidate certified to "no" (the point moves off the marked
  // boundary), kUndetermined when the budget ran out first.
  static constexpr int kNone = -1;
  static constexpr int kUndetermined = -2;
  Perm table;
  // Point class per rule-boundary position.
  std::vector<int> cls;
};

// Boundary behaviour of a group word on the cone of its color.
inline BoundaryBehaviour label_boundary_behaviour(const ReplacementSystem& s,
                                                  RelationCertifier& cert,
                                                  const GroupWord& label) {
  const auto& bd = s.rules.at(label.color).boundary;
  BoundaryBehaviour out;
  out.cls = boundary_point_classes(s, cert, label.color);
  out.table.assign(bd.size(), BoundaryBehaviour::kNone);
  for (size_t i = 0; i < bd.size(); ++i) {
    bool undecided = false;
    for (size_t j = 0; j < bd.size(); ++j) {
      Verdict v = cert.certify(label, bd[i], bd[j]);
      if (v == Verdict::Yes) {
        out.table[i] = static_cast<int>(j);
        break;
      }
      if (v == Verdict::Undetermined) undecided = true;
    }
    if (out.table[i] == BoundaryBehaviour::kNone && undecided)
      out.table[i] = BoundaryBehaviour::kUndetermined;
  }
  return out;
}

// True when `p` is a proper prefix of `w`.
inline bool proper_prefix(const Word& p, const Word& w) {
  return p.size() < w.size() && std::equal(p.begin(), p.end(), w.begin());
}

// Drop trailing letters that expand trivially colored cells: such an
// expansion renames the leaf without changing its cell, so addresses are
// compared modulo these tails.
inline Word strip_trivial_tail(const ReplacementSystem& s, Word w) {
  while (w.size() > 1) {
    Word parent(w.begin(), w.end() - 1);
    Name c = color_of(s, parent);
    if (!is_trivial_rule(c, s.rules.at(c))) break;
    w = parent;
  }
  return w;
}

}  // namespace detail

struct DiagramCheck {
  Diagnostics diag;
  // False when some boundary condition could only be checked up to the
  // certification budget (no violation found, but not a proof).
  bool exact = true;
};

// Checks all diagram invariants: totality and bijectivity of the leaf map,
// color and order preservation, well-definedness and bijectivity of the
// induced vertex map, label colors (condition 1), labels restricting to
// boundary bijections (condition 2), and agreement of the permutations with
// the labels on topological-boundary positions (condition 3).
inline DiagramCheck validate_diagram(const ReplacementSystem& s,
                                     const SelfSimilarTuple& t,
                                     const Diagram& d, size_t budget = 20000) {
  DiagramCheck out;
  Diagnostics& dg = out.diag;

  if (d.edge_map.size() != d.domain.leaves.size())
    dg.fail("edge map must cover every domain leaf");
  std::set<Word> images;
  for (const auto& [e, f] : d.edge_map) {
    if (!d.domain.is_leaf(e))
      dg.fail("edge map source '" + join(e) + "' is not a domain leaf");
    if (!d.range.is_leaf(f))
      dg.fail("edge map image '" + join(f) + "' is not a range leaf");
    else if (!images.insert(f).second)
      dg.fail("edge map repeats image '" + join(f) + "'");
  }
  if (dg.ok() && images.size() != d.range.leaves.size())
    dg.fail("edge map must cover every range leaf");
  if (!dg.ok()) return out;

  RelationCertifier cert(s, t, budget);
  std::map<Name, Name> vimg;  // induced vertex map
  for (const auto& [e, f] : d.edge_map) {
    const Hyperedge& he = d.domain.leaves.at(e);
    const Hyperedge& hf = d.range.leaves.at(f);
    const std::string where = "leaf '" + join(e) + "'";
    if (he.color != hf.color) {
      dg.fail(where + ": image has color " + hf.color + ", expected " +
              he.color);
      continue;
    }
    if (he.ord() != hf.ord()) {
      dg.fail(where + ": image has order " + std::to_string(hf.ord()) +
              ", expected " + std::to_string(he.ord()));
      continue;
    }

    auto lit = d.labels.find(e);
    const GroupWord label =
        lit == d.labels.end() ? GroupWord{he.color, {}} : lit->second;
    bool label_ok = true;
    if (label.color != he.color) {
      dg.fail(where + ": label color " + label.color +
              " differs from the leaf color " + he.color);
      label_ok = false;
    }
    auto git = t.groups.find(label.color);
    for (const auto& g : label.gens)
      if (git == t.groups.end() || !git->second.generators.count(g.name)) {
        dg.fail(where + ": label uses unknown generator '" + g.name + "'");
        label_ok = false;
        break;
      }

    auto pit = d.pi.find(e);
    if (pit == d.pi.end()) {
      dg.fail(where + ": missing boundary permutation");
      continue;
    }
    const Perm& p = pit->second;
    if (p.size() != he.boundary.size() || !is_perm(p)) {
      dg.fail(where + ": boundary permutation is not a permutation of 1.." +
              std::to_string(he.ord()));
      continue;
    }

    for (size_t i = 0; i < he.boundary.size(); ++i) {
      const Name& u = he.boundary[i];
      const Name& w = hf.boundary[static_cast<size_t>(p[i])];
      auto [it2, inserted] = vimg.emplace(u, w);
      if (!inserted && it2->second != w)
        dg.fail("vertex map sends '" + u + "' to both '" + it2->second +
                "' and '" + w + "'");
    }

    if (!label_ok) continue;
    // Conditions 2 and 3 constrain exactly the topological-boundary
    // positions: points shared with other cells must stay on the marked
    // boundary and must land where the permutation says.  Interior marked
    // points are free to move (their permutation entries are presentation
    // only).
    const auto bb = detail::label_boundary_behaviour(s, cert, label);
    const std::vector<bool> tb = boundary_status(d.domain, e);
    for (size_t i = 0; i < tb.size(); ++i) {
      if (!tb[i]) continue;
      if (bb.table[i] == detail::BoundaryBehaviour::kUndetermined) {
        out.exact = false;
        continue;
      }
      if (bb.table[i] == detail::BoundaryBehaviour::kNone) {
        dg.fail(where + ": label '" + format_word(label) +
                "' moves the shared boundary point at position " +
                std::to_string(i + 1) + " off the cell boundary");
        continue;
      }
      const size_t ki = static_cast<size_t>(p[i]);
      const size_t kl = static_cast<size_t>(bb.table[i]);
      // Same vertex, or distinct vertices carrying the same point.
      if (hf.boundary[ki] != hf.boundary[kl] && bb.cls[ki] != bb.cls[kl])
        dg.fail(where + ": permutation disagrees with the label at boundary " +
                "position " + std::to_string(i + 1));
    }
  }

  std::set<Name> vvals;
  for (const auto& [u, w] : vimg)
    if (!vvals.insert(w).second)
      dg.fail("vertex map is not injective at '" + w + "'");
  if (dg.ok() && vvals.size() != d.range.vertices().size())
    dg.fail("vertex map does not cover every range vertex");
  return out;
}

// Refines the presentation at domain leaf `e` without changing the point
// map: the domain is expanded at e, the range at its image, child images
// follow the label's action on letters, child labels are its sections, and
// child permutations are the lexicographically least ones consistent with
// the induced vertex map (fresh internal vertices travel along the label's
// certified vertex relation).
inline Diagram expand_diagram(const ReplacementSystem& s,
                              const SelfSimilarTuple& t, const Diagram& d,
                              const Word& e, size_t budget = 20000) {
  auto it = d.domain.leaves.find(e);
  if (it == d.domain.leaves.end())
    throw input_error("not a domain leaf: '" + join(e) + "'");
  const Hyperedge host = it->second;
  const Word f = d.edge_map.at(e);
  const Hyperedge rhost = d.range.leaves.at(f);
  const GroupWord label = d.labels.at(e);
  const Perm hp = d.pi.at(e);
  const ReplacementRule& rule = s.rules.at(host.color);

  Diagram out = d;
  out.domain = expand_hyperedge(s, d.domain, e);
  out.range = expand_hyperedge(s, d.range, f);
  out.edge_map.erase(e);
  out.labels.erase(e);
  out.pi.erase(e);
  out.provenance[e] = label;

  // Vertex images for the cell being expanded: host boundary positions are
  // matched through the permutation, fresh internal vertices through the
  // label's certified vertex relation.  An internal vertex shared by several
  // rule edges is a junction of child cells, so a valid label must carry it
  // to another such vertex; a vertex on a single edge may land anywhere in
  // the image child, leaving its positions free.
  std::map<Name, Name> vimg;
  for (size_t i = 0; i < host.boundary.size(); ++i)
    vimg[host.boundary[i]] = rhost.boundary[static_cast<size_t>(hp[i])];
  RelationCertifier cert(s, t, budget);
  std::set<Name> rule_bd(rule.boundary.begin(), rule.boundary.end());
  for (const Name& v : rule.graph.vertices) {
    if (rule_bd.count(v)) continue;
    const Name* target = nullptr;
    bool undecided = false;
    for (const Name& w : rule.graph.vertices) {
      Verdict vd = cert.certify(label, v, w);
      if (vd == Verdict::Yes) {
        target = &w;
        break;
      }
      if (vd == Verdict::Undetermined) undecided = true;
    }
    if (!target) {
      if (undecided)
        throw input_error("expansion at '" + join(e) +
                          "': vertex image of '" + v +
                          "' not certified within budget");
      int degree = 0;
      for (const auto& [x, re] : rule.graph.edges)
        if (std::find(re.boundary.begin(), re.boundary.end(), v) !=
            re.boundary.end())
          ++degree;
      if (degree >= 2)
        throw input_error("expansion at '" + join(e) + "': label '" +
                          format_word(label) +
                          "' induces no vertex image for '" + v + "'");
      continue;  // free vertex: its positions are off every cell boundary
    }
    const int bi = rule.boundary_index(*target);
    vimg[join(e) + ":" + v] =
        bi >= 0 ? rhost.boundary[static_cast<size_t>(bi)]
                : join(f) + ":" + *target;
  }

  // Positions holding free vertices are assigned backtracking-first: the
  // first solution of the position-major search is the lexicographically
  // least permutation, and claimed-name bookkeeping keeps the induced vertex
  // map single-valued and injective.
  std::set<Name> claimed;
  for (const auto& [u, w] : vimg) claimed.insert(w);
  std::map<Name, Name> chosen;
  for (const auto& [x, re] : rule.graph.edges) {
    auto [y, st] = letter_action(s, t, label, x);
    Word de = e;
    de.push_back(x);
    Word rf = f;
    rf.push_back(y);
    out.edge_map[de] = rf;
    out.labels[de] = st;
    const Hyperedge& ce = out.domain.leaves.at(de);
    const Hyperedge& cf = out.range.leaves.at(rf);
    if (ce.ord() != cf.ord())
      throw input_error("expansion at '" + join(e) +
                        "': child orders disagree at letter '" + x + "'");
    const size_t d_ord = ce.boundary.size();
    Perm sigma(d_ord, 0);
    std::vector<bool> used(d_ord, false);
    std::function<bool(size_t)> place = [&](size_t j) -> bool {
      if (j == d_ord) return true;
      const Name& u = ce.boundary[j];
      auto pinned = vimg.find(u);
      auto picked = chosen.find(u);
      const Name* want = pinned != vimg.end()   ? &pinned->second
                         : picked != chosen.end() ? &picked->second
                                                  : nullptr;
      for (size_t k = 0; k < d_ord; ++k) {
        if (used[k]) continue;
        const Name& n = cf.boundary[k];
        if (want) {
          if (n != *want) continue;
        } else if (claimed.count(n)) {
          continue;
        }
        used[k] = true;
        sigma[j] = static_cast<int>(k);
        bool fresh = !want;
        if (fresh) {
          chosen[u] = n;
          claimed.insert(n);
        }
        if (place(j + 1)) return true;
        if (fresh) {
          chosen.erase(u);
          claimed.erase(n);
        }
        used[k] = false;
      }
      return false;
    };
    if (!place(0))
      throw input_error("expansion at '" + join(e) +
                        "': no consistent child permutation at '" +
                        join(de) + "'");
    out.pi[de] = sigma;
  }
  return out;
}

namespace detail {

// Expands the two diagrams until g's range and f's domain carry the same
// leaf set (the interface needed to compose f after g).  Both leaf sets are
// complete antichains over the same base, so any missing leaf is resolved by
// expanding whichever side is coarser there.
inline void align_interface(const ReplacementSystem& s,
                            const SelfSimilarTuple& t, Diagram& f, Diagram& g,
                            size_t budget) {
  for (bool again = true; again;) {
    again = false;
    for (const Word& w : g.range.sorted_leaves()) {
      if (f.domain.is_leaf(w)) continue;
      bool expanded = false;
      for (const Word& u : f.domain.sorted_leaves())
        if (proper_prefix(u, w)) {
          f = expand_diagram(s, t, f, u, budget);
          expanded = true;
          break;
        }
      if (!expanded) {
        Word e;
        for (const auto& [de, re] : g.edge_map)
          if (re == w) {
            e = de;
            break;
          }
        if (e.empty())
          throw input_error("interface alignment failed at '" + join(w) + "'");
        g = expand_diagram(s, t, g, e, budget);
      }
      again = true;
      break;
    }
  }
}

// Expands the two diagrams until their domains carry the same leaf set.
inline void align_domains(const ReplacementSystem& s,
                          const SelfSimilarTuple& t, Diagram& f, Diagram& g,
                          size_t budget) {
  for (bool again = true; again;) {
    again = false;
    for (const Word& w : g.domain.sorted_leaves()) {
      if (f.domain.is_leaf(w)) continue;
      bool expanded = false;
      for (const Word& u : f.domain.sorted_leaves())
        if (proper_prefix(u, w)) {
          f = expand_diagram(s, t, f, u, budget);
          expanded = true;
          break;
        }
      if (!expanded) g = expand_diagram(s, t, g, w, budget);
      again = true;
      break;
    }
  }
}

}  // namespace detail

// Composite diagram presenting "apply g, then f".  The two presentations
// are first refined until f's domain equals g's range; images compose,
// labels multiply (the g-label acts first) and permutations compose.
inline Diagram compose(const ReplacementSystem& s, const SelfSimilarTuple& t,
                       const Diagram& F, const Diagram& G,
                       size_t budget = 20000) {
  Diagram f = F;
  Diagram g = G;
  detail::align_interface(s, t, f, g, budget);
  Diagram out;
  out.domain = g.domain;
  out.range = f.range;
  for (const auto& [e, mid] : g.edge_map) {
    out.edge_map[e] = f.edge_map.at(mid);
    out.labels[e] = word_concat(f.labels.at(mid), g.labels.at(e));
    out.pi[e] = compose(f.pi.at(mid), g.pi.at(e));
  }
  return out;
}

inline Diagram invert(const Diagram& d) {
  Diagram out;
  out.domain = d.range;
  out.range = d.domain;
  for (const auto& [e, f] : d.edge_map) {
    out.edge_map[f] = e;
    out.labels[f] = word_inverse(d.labels.at(e));
    out.pi[f] = inverse(d.pi.at(e));
  }
  return out;
}

// Equality of the presented point maps.  The domains are refined to a common
// leaf set; the diagrams are then equal exactly when leaf images agree
// modulo trivially colored tails, the label quotients are trivial, and the
// permutations agree on topological-boundary positions (anything further is
// permutation rewriting and does not change the map).
inline Verdict diagram_equal(const ReplacementSystem& s,
                             const SelfSimilarTuple& t, const Diagram& F,
                             const Diagram& G, size_t budget = 100000) {
  Diagram f = F;
  Diagram g = G;
  detail::align_domains(s, t, f, g, budget);
  RelationCertifier cert(s, t, budget);
  std::map<Name, std::vector<int>> classes;
  bool undecided = false;
  for (const auto& [e, wf] : f.edge_map) {
    const Word& wg = g.edge_map.at(e);
    if (detail::strip_trivial_tail(s, wf) != detail::strip_trivial_tail(s, wg))
      return Verdict::No;
    auto quo = is_trivial(
        s, t, word_concat(f.labels.at(e), word_inverse(g.labels.at(e))),
        budget);
    if (quo.verdict == Verdict::No) return Verdict::No;
    if (quo.verdict == Verdict::Undetermined) undecided = true;
    const std::vector<bool> tb = boundary_status(f.domain, e);
    const Hyperedge& rf = f.range.leaves.at(wf);
    const Hyperedge& rg = g.range.leaves.at(wg);
    const Perm& pf = f.pi.at(e);
    const Perm& pg = g.pi.at(e);
    auto cit = classes.find(rf.color);
    if (cit == classes.end())
      cit = classes
                .emplace(rf.color,
                         detail::boundary_point_classes(s, cert, rf.color))
                .first;
    const std::vector<int>& cls = cit->second;
    for (size_t i = 0; i < tb.size(); ++i) {
      if (!tb[i]) continue;
      const size_t kf = static_cast<size_t>(pf[i]);
      const size_t kg = static_cast<size_t>(pg[i]);
      if (rf.boundary[kf] != rg.boundary[kg] && cls[kf] != cls[kg])
        return Verdict::No;
    }
  }
  return undecided ? Verdict::Undetermined : Verdict::Yes;
}

// The presented point map on a full address: the unique domain leaf on the
// address rewrites to its image, the tail is rewritten by the label.
// Nothing is returned when the label's rewriting exceeds the budget.
inline std::optional<EventuallyPeriodic> apply_diagram(
    const ReplacementSystem& s, const SelfSimilarTuple& t, const Diagram& d,
    const EventuallyPeriodic& a, size_t budget = 10000) {
  auto check = validate_address(s, a);
  if (!check.ok())
    throw input_error("invalid address " + format_address(a) + ": " +
                      check.str());
  size_t maxlen = 0;
  for (const auto& [w, e] : d.domain.leaves) maxlen = std::max(maxlen, w.size());
  const Word head = unroll(a, static_cast<int>(maxlen));
  const Word* leaf = nullptr;
  for (const auto& [w, e] : d.domain.leaves)
    if (w.size() <= head.size() &&
        std::equal(w.begin(), w.end(), head.begin())) {
      leaf = &w;
      break;
    }
  if (!leaf)
    throw input_error("address " + format_address(a) +
                      " does not pass through a domain leaf");

  EventuallyPeriodic tail;
  const size_t k = leaf->size();
  if (k <= a.prefix.size()) {
    tail.prefix.assign(a.prefix.begin() + static_cast<long>(k),
                       a.prefix.end());
    tail.period = a.period;
  } else {
    const size_t r = (k - a.prefix.size()) % a.period.size();
    tail.period.assign(a.period.begin() + static_cast<long>(r),
                       a.period.end());
    tail.period.insert(tail.period.end(), a.period.begin(),
                       a.period.begin() + static_cast<long>(r));
  }
  auto image = apply_word(s, t, d.labels.at(*leaf), tail, budget);
  if (!image) return std::nullopt;
  EventuallyPeriodic out;
  out.prefix = d.edge_map.at(*leaf);
  out.prefix.insert(out.prefix.end(), image->prefix.begin(),
                    image->prefix.end());
  out.period = image->period;
  return out;
}

struct MinimizeOptions {
  // Longest label word tried when no remembered label fits.
  int max_label_len = 8;
  // Most candidate words tried per sibling family.
  size_t search_cap = 5000;
  size_t word_budget = 100000;
  size_t cert_budget = 20000;
};

struct MinimizeResult {
  Diagram diagram;
  // False when some sibling family looked mergeable but the label search was
  // cut off by the bounds, so the result may not be minimal.
  bool certified_minimal = true;
  std::string note;
};

namespace detail {

// Tries to merge the complete sibling family below `p` into a single leaf.
// Succeeds when the children's images form the sibling family below one
// range node via a bijection of letters and some group word reproduces that
// letter action together with all child labels.  Returns false (without
// touching `d`) otherwise; structural mismatches are definitive, while a
// fruitless label search also sets *search_exhausted.
inline bool try_merge(const ReplacementSystem& s, const SelfSimilarTuple& t,
                      Diagram& d, const Word& p, const MinimizeOptions& opt,
                      bool* search_exhausted) {
  const Name c = color_of(s, p);
  const ReplacementRule& rule = s.rules.at(c);
  std::map<Name, Name> tau;  // letter action read off the edge map
  Word q;                    // common parent of the images
  bool have_q = false;
  for (const auto& [x, re] : rule.graph.edges) {
    Word child = p;
    child.push_back(x);
    auto it = d.edge_map.find(child);
    if (it == d.edge_map.end() || !d.domain.is_leaf(child)) return false;
    const Word& im = it->second;
    if (im.size() < 2) return false;  // a base leaf has no sibling family
    Word im_parent(im.begin(), im.end() - 1);
    if (!have_q) {
      q = im_parent;
      have_q = true;
    } else if (q != im_parent) {
      return false;
    }
    tau[x] = im.back();
  }
  {
    std::set<Name> seen;
    for (const auto& [x, y] : tau) {
      if (!rule.graph.edges.count(y)) return false;
      if (rule.graph.edges.at(y).color != rule.graph.edges.at(x).color)
        return false;
      if (!seen.insert(y).second) return false;
    }
  }
  if (color_of(s, q) != c) return false;

  // A candidate must reproduce the letter action and every child label.
  auto matches = [&](const GroupWord& cand) -> Verdict {
    bool und = false;
    for (const auto& [x, y] : tau) {
      auto [iy, st] = letter_action(s, t, cand, x);
      if (iy != y) return Verdict::No;
      Word child = p;
      child.push_back(x);
      auto quo =
          is_trivial(s, t, word_concat(st, word_inverse(d.labels.at(child))),
                     opt.word_budget);
      if (quo.verdict == Verdict::No) return Verdict::No;
      if (quo.verdict == Verdict::Undetermined) und = true;
    }
    return und ? Verdict::Undetermined : Verdict::Yes;
  };

  std::optional<GroupWord> found;
  bool cut_off = false;
  auto prov = d.provenance.find(p);
  if (prov != d.provenance.end() && matches(prov->second) == Verdict::Yes)
    found = prov->second;
  if (!found) {
    // Breadth-first search over reduced words of the color's group.
    std::vector<std::pair<Name, bool>> moves;
    auto git = t.groups.find(c);
    if (git != t.groups.end())
      for (const auto& [gn, gen] : git->second.generators) {
        moves.push_back({gn, false});
        moves.push_back({gn, true});
      }
    std::set<std::string> seen;
    std::deque<GroupWord> queue;
    queue.push_back(GroupWord{c, {}});
    seen.insert(word_key(queue.front()));
    size_t tried = 0;
    while (!queue.empty()) {
      GroupWord cand = queue.front();
      queue.pop_front();
      if (++tried > opt.search_cap) {
        cut_off = true;
        break;
      }
      Verdict m = matches(cand);
      if (m == Verdict::Yes) {
        found = cand;
        break;
      }
      if (m == Verdict::Undetermined) cut_off = true;
      if (static_cast<int>(cand.gens.size()) >= opt.max_label_len) continue;
      for (const auto& [gn, inv] : moves) {
        GroupWord next = cand;
        next.gens.push_back(SignedGen{gn, inv});
        next = reduced(next);
        if (seen.insert(word_key(next)).second) queue.push_back(next);
      }
    }
    // A bounded search that found nothing is inconclusive: a longer label
    // could still exist.
    if (!found) cut_off = true;
  }
  if (!found) {
    if (cut_off && search_exhausted) *search_exhausted = true;
    return false;
  }

  // Reassemble the parent leaves on both sides.
  Hyperedge host;
  host.color = c;
  Hyperedge rhost;
  rhost.color = c;
  std::vector<std::pair<Name, size_t>> carrier;  // rule position per bd index
  for (const Name& rv : rule.boundary) {
    bool placed = false;
    for (const auto& [x, re] : rule.graph.edges) {
      for (size_t j = 0; j < re.boundary.size() && !placed; ++j)
        if (re.boundary[j] == rv) {
          Word child = p;
          child.push_back(x);
          host.boundary.push_back(d.domain.leaves.at(child).boundary[j]);
          carrier.push_back({x, j});
          placed = true;
        }
      if (placed) break;
    }
    if (!placed) return false;
    placed = false;
    for (const auto& [y, re] : rule.graph.edges) {
      for (size_t j = 0; j < re.boundary.size() && !placed; ++j)
        if (re.boundary[j] == rv) {
          Word rchild = q;
          rchild.push_back(y);
          rhost.boundary.push_back(d.range.leaves.at(rchild).boundary[j]);
          placed = true;
        }
      if (placed) break;
    }
    if (!placed) return false;
  }

  // The merged permutation must reproduce the children's vertex images.
  Perm sigma(host.boundary.size(), 0);
  std::vector<bool> used(rhost.boundary.size(), false);
  for (size_t i = 0; i < host.boundary.size(); ++i) {
    const auto& [x, j] = carrier[i];
    Word child = p;
    child.push_back(x);
    Word rchild = q;
    rchild.push_back(tau.at(x));
    const Name want =
        d.range.leaves.at(rchild)
            .boundary[static_cast<size_t>(d.pi.at(child)[j])];
    size_t k = 0;
    for (; k < rhost.boundary.size(); ++k)
      if (!used[k] && rhost.boundary[k] == want) break;
    if (k == rhost.boundary.size()) return false;
    used[k] = true;
    sigma[i] = static_cast<int>(k);
  }

  for (const auto& [x, re] : rule.graph.edges) {
    Word child = p;
    child.push_back(x);
    Word rchild = q;
    rchild.push_back(tau.at(x));
    d.domain.leaves.erase(child);
    d.range.leaves.erase(rchild);
    d.edge_map.erase(child);
    d.labels.erase(child);
    d.pi.erase(child);
  }
  d.domain.leaves[p] = host;
  d.range.leaves[q] = rhost;
  d.edge_map[p] = q;
  d.labels[p] = reduced(*found);
  d.pi[p] = sigma;
  d.provenance.erase(p);
  return true;
}

}  // namespace detail

// Greedily merges complete sibling families back into their parents until no
// family merges.  Labels remembered from earlier expansions are tried first,
// then group words up to the configured length.  The result presents the
// same point map; minimality is certified unless a label search was cut off.
inline MinimizeResult minimize(const ReplacementSystem& s,
                               const SelfSimilarTuple& t, const Diagram& F,
                               MinimizeOptions opt = {}) {
  MinimizeResult res{F, true, ""};
  bool progress = true;
  while (progress) {
    progress = false;
    std::set<Word> parents;
    for (const auto& [w, e] : res.diagram.domain.leaves)
      if (w.size() >= 2) parents.insert(Word(w.begin(), w.end() - 1));
    bool exhausted = false;
    for (const Word& p : parents)
      if (detail::try_merge(s, t, res.diagram, p, opt, &exhausted)) {
        progress = true;
        break;
      }
    if (!progress && exhausted) {
      res.certified_minimal = false;
      res.note =
          "a sibling family matched the letter action but no label was found "
          "within the search bounds";
    }
  }
  return res;
}

}  // namespace hrs
