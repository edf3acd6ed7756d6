// Contraction sites of expansions, parallel contraction, and the
// contraction complex.
//
// A contraction site is a set of leaves of an expansion that matches a
// replacement rule graph: a color-preserving injective embedding of the rule
// graph onto those leaves, where each rule hyperedge may land on its leaf
// twisted by a permutation from the boundary permutation group of its color.
// Vertices internal to the rule must map to vertices private to the site
// (incident to site leaves only).  Contracting the site removes its leaves
// and adds one hyperedge of the rule's color attached to the images of the
// rule boundary.
//
// Matches are grouped by (color, leaf set, attachment modulo the boundary
// permutation group of the color, with attachment vertices private to the
// site masked out); this quotients away retwisted copies of the same site.
// A group counts as a site when at least one of its matches contracts to a
// hypergraph whose canonical form is realized by some expansion of the
// system (the object table).
//
// Two sites are parallel when their leaf sets are disjoint and contracting
// both still lands in the object table.  The contraction complex of an
// expansion has one vertex per site and one edge per parallel pair; its
// groundedness statistic m (largest simplex in which every vertex of the
// complex misses at most d simplex members) yields the connectivity bound
// floor(m/d) - 1.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hrs/replacement.hpp"
#include "hrs/selfsim.hpp"
#include "hrs/shiftlang.hpp"

namespace hrs {

// --------------------------------------------------------------------------
// Object forms
// --------------------------------------------------------------------------

namespace detail {

// Exact linear-time certificate for a connected hypergraph whose incidence
// structure is a tree (no repeated vertices within a boundary, and the
// bipartite vertex/edge incidence graph is acyclic).  Rooted at the center
// of the incidence tree; edge slots stay in boundary order, so orientation
// is preserved exactly as in the general certificate.  Returns nothing when
// the component is not incidence-acyclic.
inline std::optional<std::string> acyclic_certificate(
    const ColoredHypergraph& g) {
  size_t slots = 0;
  for (const auto& [n, e] : g.edges) {
    std::set<Name> distinct(e.boundary.begin(), e.boundary.end());
    if (distinct.size() != e.boundary.size()) return std::nullopt;
    slots += e.boundary.size();
  }
  if (slots != g.vertices.size() + g.edges.size() - 1) return std::nullopt;

  using BNode = std::pair<char, Name>;  // 'v' vertex node, 'e' edge node
  std::map<BNode, std::vector<BNode>> adj;
  for (const auto& [n, e] : g.edges) {
    BNode en{'e', n};
    for (const Name& v : e.boundary) {
      BNode vn{'v', v};
      adj[en].push_back(vn);
      adj[vn].push_back(en);
    }
  }
  // Peel leaves layer by layer; the last one or two nodes are the center.
  std::map<BNode, size_t> deg;
  for (const auto& [n, nb] : adj) deg[n] = nb.size();
  std::vector<BNode> layer;
  std::set<BNode> removed;
  for (const auto& [n, d] : deg)
    if (d <= 1) layer.push_back(n);
  size_t alive = adj.size();
  while (alive > 2 && !layer.empty()) {
    std::vector<BNode> next;
    for (const BNode& n : layer) {
      if (removed.count(n)) continue;
      removed.insert(n);
      --alive;
      for (const BNode& m : adj.at(n))
        if (!removed.count(m) && --deg[m] == 1) next.push_back(m);
    }
    if (alive <= 2) break;
    layer = std::move(next);
  }
  std::vector<BNode> centers;
  for (const auto& [n, nb] : adj)
    if (!removed.count(n)) centers.push_back(n);

  std::function<std::string(const BNode&, const BNode*)> code =
      [&](const BNode& n, const BNode* parent) -> std::string {
    if (n.first == 'v') {
      std::vector<std::string> parts;
      for (const BNode& m : adj.at(n)) {
        if (parent && m == *parent) continue;
        parts.push_back(code(m, &n));
      }
      std::sort(parts.begin(), parts.end());
      std::string out = "(";
      for (const std::string& p : parts) out += p;
      out.push_back(')');
      return out;
    }
    const Hyperedge& e = g.edges.at(n.second);
    std::string out = "[" + e.color + ";";
    for (const Name& v : e.boundary) {
      if (parent && parent->first == 'v' && parent->second == v)
        out.push_back('^');
      else
        out += code({'v', v}, &n);
      out.push_back(',');
    }
    out.push_back(']');
    return out;
  };
  std::string full;
  if (centers.size() == 1) {
    full = code(centers[0], nullptr);
  } else {
    std::string a = code(centers[0], &centers[1]);
    std::string b = code(centers[1], &centers[0]);
    if (b < a) std::swap(a, b);
    full = "{" + a + b + "}";
  }
  return "T" + full;
}

}  // namespace detail

namespace detail {

// Connected components of a hypergraph, by shared vertices.
struct ComponentSplit {
  std::vector<ColoredHypergraph> comps;
  std::map<Name, size_t> comp_of_edge;  // edge name -> index into comps
};

inline ComponentSplit split_components(const ColoredHypergraph& g) {
  ComponentSplit out;
  std::vector<Name> names;
  names.reserve(g.edges.size());
  for (const auto& [n, e] : g.edges) names.push_back(n);
  std::vector<size_t> parent(names.size());
  for (size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  std::function<size_t(size_t)> find = [&](size_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  std::map<Name, size_t> first_edge_at;
  for (size_t i = 0; i < names.size(); ++i) {
    for (const Name& v : g.edges.at(names[i]).boundary) {
      auto [it, fresh] = first_edge_at.try_emplace(v, i);
      if (!fresh) parent[find(i)] = find(it->second);
    }
  }
  std::map<size_t, size_t> index;  // union-find root -> comps position
  for (size_t i = 0; i < names.size(); ++i) {
    auto [it, fresh] = index.try_emplace(find(i), out.comps.size());
    if (fresh) out.comps.emplace_back();
    ColoredHypergraph& c = out.comps[it->second];
    const Hyperedge& e = g.edges.at(names[i]);
    c.edges[names[i]] = e;
    for (const Name& v : e.boundary) c.vertices.insert(v);
    out.comp_of_edge[names[i]] = it->second;
  }
  return out;
}

// Certificate of one connected component: linear-time tree code when the
// incidence is acyclic, general backtracking canonical form otherwise.
inline std::string component_certificate(const ColoredHypergraph& c) {
  std::optional<std::string> tree = acyclic_certificate(c);
  return tree ? *tree : canonical_form(c).certificate;
}

// Concatenate component certificates (sorted, length-prefixed) into the
// certificate of the whole hypergraph.
inline std::string join_certs(std::vector<std::string> certs) {
  std::sort(certs.begin(), certs.end());
  std::string out;
  for (const auto& c : certs) {
    out += std::to_string(c.size());
    out.push_back(':');
    out += c;
  }
  return out;
}

}  // namespace detail

// Canonical certificate of a hypergraph, split into connected components so
// that systems whose expansions are heavily disconnected stay cheap to
// canonicalize.  Two hypergraphs get the same form iff they are isomorphic
// (colors, boundary order and multiplicity all preserved).  Isolated
// vertices do not occur in expansions or contraction results and are
// ignored.
inline std::string object_form(const ColoredHypergraph& g) {
  if (g.edges.empty()) return "V0;";
  detail::ComponentSplit split = detail::split_components(g);
  std::vector<std::string> certs;
  certs.reserve(split.comps.size());
  for (const ColoredHypergraph& c : split.comps)
    certs.push_back(detail::component_certificate(c));
  return detail::join_certs(std::move(certs));
}

// --------------------------------------------------------------------------
// Sites
// --------------------------------------------------------------------------

struct ContractionSite {
  Name color;                    // color of the hyperedge the site contracts to
  std::set<Word> leaves;         // leaves removed by the contraction
  std::map<Name, Word> match;    // rule hyperedge -> leaf it lands on
  std::map<Name, Perm> twists;   // rule hyperedge -> boundary twist used
  std::vector<Name> attachment;  // boundary of the replacing hyperedge
  bool literal = false;  // true when the site undoes one expansion step as-is
};

struct SiteReport {
  std::vector<ContractionSite> sites;
  bool exact = true;  // false when some boundary permutation group timed out
};

// Precomputed per-system data shared by the site searches: the boundary
// permutation groups of the tuple and the table of canonical forms of
// expansions (grown lazily to the largest size queried).
class ContractionContext {
 public:
  ContractionContext(const ReplacementSystem& s, const SelfSimilarTuple& t,
                     size_t group_budget = 20000)
      : system_(s), tuple_(t), cls_(classify_system(s)) {
    for (const Name& k : system_.colors) {
      groups_[k] = boundary_perm_group(system_, tuple_, k, group_budget);
      if (!groups_[k].exact) exact_ = false;
    }
  }

  const ReplacementSystem& system() const { return system_; }
  const SelfSimilarTuple& tuple() const { return tuple_; }
  const Classification& classification() const { return cls_; }
  bool exact() const { return exact_; }

  const BoundaryGroupReport& boundary_group(const Name& color) const {
    return groups_.at(color);
  }

  // Grow the object table to cover all expansions with at most max_edges
  // hyperedges.  No-op when already covered.  Expansion of trivial colors is
  // skipped, matching enumerate_expansions: a trivial rule replaces an edge
  // by a single edge of the same color, so it contributes no new forms.
  void ensure_table(size_t max_edges) {
    if (max_edges <= table_bound_) return;
    table_bound_ = max_edges;
    if (max_edges < system_.base.edges.size()) return;
    for (const Name& k : cls_.reachable_colors)
      if (!cls_.trivial_colors.count(k) &&
          system_.rules.at(k).graph.edges.size() < 2)
        throw input_error("color '" + k +
                          "' has a non-trivial single-hyperedge rule; its "
                          "expansions never terminate");
    table_.clear();
    std::set<std::string> seen;
    std::vector<Expansion> work{base_expansion(system_)};
    seen.insert(leaf_key(work.back()));
    table_.insert(object_form(to_hypergraph(work.back())));
    while (!work.empty()) {
      Expansion x = std::move(work.back());
      work.pop_back();
      for (const auto& [w, e] : x.leaves) {
        if (cls_.trivial_colors.count(e.color)) continue;
        size_t grow = system_.rules.at(e.color).graph.edges.size() - 1;
        if (x.leaves.size() + grow > max_edges) continue;
        Expansion y = expand_hyperedge(system_, x, w);
        if (!seen.insert(leaf_key(y)).second) continue;
        table_.insert(object_form(to_hypergraph(y)));
        work.push_back(std::move(y));
      }
    }
  }

  // Whether g is isomorphic to some expansion of the system.
  bool is_object(const ColoredHypergraph& g) {
    return is_object_form(object_form(g), g.edges.size());
  }

  // Same test when the caller already has the certificate and edge count.
  bool is_object_form(const std::string& form, size_t edge_count) {
    if (edge_count < system_.base.edges.size()) return false;
    ensure_table(edge_count);
    return table_.count(form) > 0;
  }

  // Compact deterministic key of an expansion's leaf set.
  static std::string leaf_key(const Expansion& x) {
    std::string out;
    for (const auto& [w, e] : x.leaves) {
      out += join(w);
      out.push_back(' ');
    }
    return out;
  }

 private:
  ReplacementSystem system_;
  SelfSimilarTuple tuple_;
  Classification cls_;
  std::map<Name, BoundaryGroupReport> groups_;
  std::set<std::string> table_;
  size_t table_bound_ = 0;
  bool exact_ = true;
};

namespace detail {

// Order in which rule hyperedges are matched: each edge after the first of
// its component shares a vertex with an earlier one, so its candidates can
// be read off the incidence of an already-placed vertex.
inline std::vector<Name> match_order(const ReplacementRule& rule) {
  std::vector<Name> order;
  std::set<Name> placed;
  std::set<Name> placed_vertices;
  while (order.size() < rule.graph.edges.size()) {
    Name next;
    for (const auto& [n, e] : rule.graph.edges) {
      if (placed.count(n)) continue;
      for (const Name& v : e.boundary)
        if (placed_vertices.count(v)) {
          next = n;
          break;
        }
      if (!next.empty()) break;
    }
    if (next.empty())
      for (const auto& [n, e] : rule.graph.edges)
        if (!placed.count(n)) {
          next = n;
          break;
        }
    placed.insert(next);
    order.push_back(next);
    for (const Name& v : rule.graph.edges.at(next).boundary)
      placed_vertices.insert(v);
  }
  return order;
}

struct RawMatch {
  std::map<Name, Word> match;
  std::map<Name, Perm> twists;
  std::map<Name, Name> vmap;  // rule vertex -> expansion vertex
};

// All embeddings of `rule` onto leaves of x, each rule edge twisted by a
// permutation from the boundary group of its color (slot j of the rule edge
// lands on slot sig[j] of the leaf).  The vertex map must be injective, and
// rule-internal vertices must land on vertices whose every incident leaf
// belongs to the match.
inline void collect_matches(
    const ReplacementRule& rule, const Expansion& x,
    const std::map<Name, std::vector<Word>>& incident,
    const std::map<Name, std::vector<Word>>& by_color,
    const std::map<Name, const std::set<Perm>*>& twist_groups,
    std::vector<RawMatch>& out) {
  const std::vector<Name> order = match_order(rule);
  std::map<Name, Word> match;
  std::map<Name, Perm> twists;
  std::map<Name, Name> vmap;
  std::map<Name, Name> vinv;
  std::set<Word> used;
  std::function<void(size_t)> step = [&](size_t i) {
    if (i == order.size()) {
      for (const Name& rv : rule.graph.vertices) {
        if (rule.boundary_index(rv) >= 0) continue;
        auto inc = incident.find(vmap.at(rv));
        if (inc != incident.end())
          for (const Word& w : inc->second)
            if (!used.count(w)) return;  // internal image is not private
      }
      out.push_back({match, twists, vmap});
      return;
    }
    const Name& ren = order[i];
    const Hyperedge& re = rule.graph.edges.at(ren);
    const std::vector<Word>* cands = nullptr;
    for (const Name& rv : re.boundary) {
      auto it = vmap.find(rv);
      if (it == vmap.end()) continue;
      auto inc = incident.find(it->second);
      if (inc == incident.end()) return;
      cands = &inc->second;
      break;
    }
    if (!cands) {
      auto it = by_color.find(re.color);
      if (it == by_color.end()) return;
      cands = &it->second;
    }
    const std::set<Perm>& group = *twist_groups.at(re.color);
    for (const Word& w : *cands) {
      if (used.count(w)) continue;
      const Hyperedge& le = x.leaves.at(w);
      if (le.color != re.color) continue;
      if (le.boundary.size() != re.boundary.size()) continue;
      for (const Perm& sig : group) {
        std::vector<std::pair<Name, Name>> added;
        bool ok = true;
        for (size_t j = 0; j < re.boundary.size() && ok; ++j) {
          const Name& rv = re.boundary[j];
          const Name& av = le.boundary[static_cast<size_t>(sig[j])];
          auto itm = vmap.find(rv);
          if (itm != vmap.end()) {
            if (itm->second != av) ok = false;
            continue;
          }
          auto iti = vinv.find(av);
          if (iti != vinv.end()) {
            if (iti->second != rv) ok = false;
            continue;
          }
          vmap.emplace(rv, av);
          vinv.emplace(av, rv);
          added.push_back({rv, av});
        }
        if (ok) {
          match[ren] = w;
          twists[ren] = sig;
          used.insert(w);
          step(i + 1);
          used.erase(w);
          twists.erase(ren);
          match.erase(ren);
        }
        for (const auto& [rv, av] : added) {
          vmap.erase(rv);
          vinv.erase(av);
        }
      }
    }
  };
  step(0);
}

// Attachment with site-private vertices replaced by "*" ('*' is not a legal
// identifier character, so it cannot collide with a real vertex).
inline std::vector<Name> masked_attachment(
    const std::vector<Name>& attachment, const std::set<Word>& leaves,
    const std::map<Name, std::vector<Word>>& incident) {
  std::vector<Name> out = attachment;
  for (Name& v : out) {
    bool priv = true;
    auto it = incident.find(v);
    if (it != incident.end())
      for (const Word& w : it->second)
        if (!leaves.count(w)) {
          priv = false;
          break;
        }
    if (priv) v = "*";
  }
  return out;
}

// Lexicographically least twist of a masked attachment over the boundary
// permutation group of the site color.
inline std::vector<Name> least_attachment(const std::vector<Name>& masked,
                                          const std::set<Perm>& group) {
  std::vector<Name> best = masked;
  std::vector<Name> cand(masked.size());
  for (const Perm& sig : group) {
    for (size_t i = 0; i < masked.size(); ++i)
      cand[i] = masked[static_cast<size_t>(sig[i])];
    if (cand < best) best = cand;
  }
  return best;
}

// Whether the match is the exact reverse of one expansion step: the leaves
// are the complete child family of their common parent, the parent carries
// the site color, and the attachment equals the parent's boundary as
// inherited by its children.
inline bool literal_unexpansion(const ReplacementSystem& s, const Expansion& x,
                                const Name& color, const std::set<Word>& leaves,
                                const std::vector<Name>& attachment) {
  const Word& first = *leaves.begin();
  if (first.size() < 2) return false;
  Word parent(first.begin(), first.end() - 1);
  const ReplacementRule& rule = s.rules.at(color);
  if (leaves.size() != rule.graph.edges.size()) return false;
  std::set<Name> letters;
  for (const Word& w : leaves) {
    if (w.size() != parent.size() + 1) return false;
    if (!std::equal(parent.begin(), parent.end(), w.begin())) return false;
    letters.insert(w.back());
  }
  for (const auto& [n, e] : rule.graph.edges)
    if (!letters.count(n)) return false;
  if (color_of(s, parent) != color) return false;
  for (size_t i = 0; i < rule.boundary.size(); ++i) {
    const Name& bv = rule.boundary[i];
    Name host;
    for (const auto& [n, e] : rule.graph.edges) {
      for (size_t j = 0; j < e.boundary.size(); ++j)
        if (e.boundary[j] == bv) {
          Word child = parent;
          child.push_back(n);
          host = x.leaves.at(child).boundary[j];
          break;
        }
      if (!host.empty()) break;
    }
    if (host != attachment[i]) return false;
  }
  return true;
}

inline bool site_less(const ContractionSite& a, const ContractionSite& b) {
  if (a.leaves != b.leaves) return a.leaves < b.leaves;
  if (a.color != b.color) return a.color < b.color;
  return a.attachment < b.attachment;
}

}  // namespace detail

// --------------------------------------------------------------------------
// Site search and contraction
// --------------------------------------------------------------------------

inline ColoredHypergraph contract_sites(
    const Expansion& x, const std::vector<ContractionSite>& sites) {
  std::set<Word> removed;
  for (const ContractionSite& s : sites)
    for (const Word& w : s.leaves) {
      if (!x.leaves.count(w))
        throw input_error("contraction leaf '" + join(w) +
                          "' is not a leaf of the expansion");
      if (!removed.insert(w).second)
        throw input_error("contraction sites overlap at leaf '" + join(w) +
                          "'");
    }
  ColoredHypergraph g;
  for (const auto& [w, e] : x.leaves) {
    if (removed.count(w)) continue;
    g.edges[join(w)] = e;
    for (const Name& v : e.boundary) g.vertices.insert(v);
  }
  size_t k = 0;
  for (const ContractionSite& s : sites) {
    Hyperedge e;
    e.color = s.color;
    e.boundary = s.attachment;
    g.edges["~" + std::to_string(++k)] = e;  // '~' never occurs in addresses
    for (const Name& v : e.boundary) g.vertices.insert(v);
  }
  return g;
}

inline ColoredHypergraph contract_site(const Expansion& x,
                                       const ContractionSite& site) {
  return contract_sites(x, {site});
}

namespace detail {

// Certificate of the one-hyperedge component a contraction leaves behind
// when its attachment vertices are private to the removed part: only the
// repetition pattern of the attachment matters.
inline std::string single_edge_certificate(const Name& color,
                                           const std::vector<Name>& attachment) {
  ColoredHypergraph one;
  Hyperedge e;
  e.color = color;
  std::map<Name, Name> ren;
  for (const Name& v : attachment) {
    auto [it, fresh] = ren.try_emplace(v, std::to_string(ren.size()));
    e.boundary.push_back(it->second);
    one.vertices.insert(it->second);
  }
  one.edges["~"] = e;
  return component_certificate(one);
}

// Objecthood of contraction results over one fixed expansion, with a
// component fast path: when the removed leaves of every site form whole
// connected components (no component shared between sites), the
// contraction deletes those components and adds one fresh single-hyperedge
// component per site, so the resulting certificate follows from
// per-component certificates by multiset arithmetic instead of
// re-canonicalization.  Arithmetic-path verdicts are memoized by their
// certificate delta, which collapses the quadratically many pairs of
// interchangeable sites that heavily disconnected expansions produce.
class ContractionOracle {
 public:
  ContractionOracle(ContractionContext& ctx, const Expansion& x)
      : ctx_(ctx), x_(x) {
    size_t li = 0;
    for (const auto& [w, e] : x_.leaves) leaf_index_[w] = li++;
  }

  // Whether contracting the single candidate site yields an object.
  bool object_after(const ContractionSite& s) {
    ensure_split();
    SiteInfo info = analyze(s);
    if (!info.whole) return ctx_.is_object(contract_site(x_, s));
    auto it = single_memo_.find(info.key);
    if (it != single_memo_.end()) return it->second;
    std::vector<std::string> certs = certs_without(info.comps);
    certs.push_back(info.new_cert);
    bool ok = ctx_.is_object_form(join_certs(std::move(certs)),
                                  x_.leaves.size() - s.leaves.size() + 1);
    single_memo_.emplace(std::move(info.key), ok);
    return ok;
  }

  // Register the final site list for pairwise queries.
  void bind(const std::vector<ContractionSite>& sites) {
    ensure_split();
    sites_ = &sites;
    mask_words_ = (x_.leaves.size() + 63) / 64;
    masks_.assign(sites.size() * mask_words_, 0);
    info_.clear();
    info_.reserve(sites.size());
    for (size_t i = 0; i < sites.size(); ++i) {
      info_.push_back(analyze(sites[i]));
      for (const Word& w : sites[i].leaves) {
        size_t b = leaf_index_.at(w);
        masks_[i * mask_words_ + b / 64] |= uint64_t(1) << (b % 64);
      }
    }
  }

  bool disjoint(size_t i, size_t j) const {
    const uint64_t* a = masks_.data() + i * mask_words_;
    const uint64_t* b = masks_.data() + j * mask_words_;
    for (size_t w = 0; w < mask_words_; ++w)
      if (a[w] & b[w]) return false;
    return true;
  }

  // Parallelism of two bound sites already known to be leaf-disjoint.
  bool parallel_disjoint(size_t i, size_t j) {
    const ContractionSite& a = (*sites_)[i];
    const ContractionSite& b = (*sites_)[j];
    // Two literal sites undo two independent expansion steps, so the
    // result is itself an expansion.
    if (a.literal && b.literal) return true;
    if (info_[i].whole && info_[j].whole && comps_disjoint(i, j)) {
      std::string key = info_[i].key <= info_[j].key
                            ? info_[i].key + "|" + info_[j].key
                            : info_[j].key + "|" + info_[i].key;
      auto it = pair_memo_.find(key);
      if (it != pair_memo_.end()) return it->second;
      std::vector<size_t> gone = info_[i].comps;
      gone.insert(gone.end(), info_[j].comps.begin(), info_[j].comps.end());
      std::vector<std::string> certs = certs_without(gone);
      certs.push_back(info_[i].new_cert);
      certs.push_back(info_[j].new_cert);
      size_t edges = x_.leaves.size() - a.leaves.size() - b.leaves.size() + 2;
      bool ok = ctx_.is_object_form(join_certs(std::move(certs)), edges);
      pair_memo_.emplace(std::move(key), ok);
      return ok;
    }
    return ctx_.is_object(contract_sites(x_, {a, b}));
  }

 private:
  struct SiteInfo {
    bool whole = false;          // removes only whole components
    std::vector<size_t> comps;   // the components it removes
    std::string new_cert;        // certificate of the replacing hyperedge
    std::string key;             // memo key: certificate delta
  };

  void ensure_split() {
    if (ready_) return;
    split_ = split_components(to_hypergraph(x_));
    comp_cert_.reserve(split_.comps.size());
    for (const ColoredHypergraph& c : split_.comps)
      comp_cert_.push_back(component_certificate(c));
    ready_ = true;
  }

  SiteInfo analyze(const ContractionSite& s) const {
    SiteInfo info;
    std::map<size_t, size_t> touched;  // component -> leaves removed in it
    for (const Word& w : s.leaves)
      ++touched[split_.comp_of_edge.at(join(w))];
    for (const auto& [c, cnt] : touched)
      if (cnt != split_.comps[c].edges.size()) return info;  // partial
    info.whole = true;
    for (const auto& [c, cnt] : touched) info.comps.push_back(c);
    info.new_cert = single_edge_certificate(s.color, s.attachment);
    std::vector<std::string> removed;
    removed.reserve(info.comps.size());
    for (size_t c : info.comps) removed.push_back(comp_cert_[c]);
    info.key = join_certs(std::move(removed)) + "#" + info.new_cert;
    return info;
  }

  std::vector<std::string> certs_without(const std::vector<size_t>& gone) const {
    std::vector<std::string> out;
    out.reserve(comp_cert_.size());
    std::vector<bool> skip(comp_cert_.size(), false);
    for (size_t c : gone) skip[c] = true;
    for (size_t c = 0; c < comp_cert_.size(); ++c)
      if (!skip[c]) out.push_back(comp_cert_[c]);
    return out;
  }

  bool comps_disjoint(size_t i, size_t j) const {
    for (size_t c : info_[i].comps)
      for (size_t d : info_[j].comps)
        if (c == d) return false;
    return true;
  }

  ContractionContext& ctx_;
  const Expansion& x_;
  std::map<Word, size_t> leaf_index_;
  bool ready_ = false;
  ComponentSplit split_;
  std::vector<std::string> comp_cert_;
  const std::vector<ContractionSite>* sites_ = nullptr;
  size_t mask_words_ = 0;
  std::vector<uint64_t> masks_;
  std::vector<SiteInfo> info_;
  std::map<std::string, bool> single_memo_;
  std::map<std::string, bool> pair_memo_;
};

// Parallelism and leaf-disjointness matrices over the reported sites.
struct PairMatrices {
  std::vector<std::vector<bool>> par;
  std::vector<std::vector<bool>> dis;
};

inline PairMatrices pair_matrices(ContractionContext& ctx, const Expansion& x,
                                  const SiteReport& sites) {
  const size_t n = sites.sites.size();
  ContractionOracle oracle(ctx, x);
  oracle.bind(sites.sites);
  PairMatrices m;
  m.par.assign(n, std::vector<bool>(n, false));
  m.dis.assign(n, std::vector<bool>(n, false));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      if (!oracle.disjoint(i, j)) continue;
      m.dis[i][j] = m.dis[j][i] = true;
      if (oracle.parallel_disjoint(i, j)) m.par[i][j] = m.par[j][i] = true;
    }
  return m;
}

}  // namespace detail

// All contraction sites of x, one representative per equivalence group.
// Deterministic: sites are sorted by (leaf set, color, attachment), and the
// representative of a group is the first match in search order that passes
// the object test.
inline SiteReport find_sites(ContractionContext& ctx, const Expansion& x) {
  const ReplacementSystem& s = ctx.system();
  const Classification& cls = ctx.classification();
  SiteReport out;
  out.exact = ctx.exact();

  std::map<Name, std::vector<Word>> incident;
  std::map<Name, std::vector<Word>> by_color;
  for (const auto& [w, e] : x.leaves) {
    by_color[e.color].push_back(w);
    std::set<Name> seen;
    for (const Name& v : e.boundary)
      if (seen.insert(v).second) incident[v].push_back(w);
  }

  std::map<Name, const std::set<Perm>*> twist_groups;
  for (const Name& k : s.colors)
    twist_groups[k] = &ctx.boundary_group(k).group;

  detail::ContractionOracle oracle(ctx, x);

  for (const Name& k : s.colors) {
    if (cls.trivial_colors.count(k)) continue;
    if (!cls.reachable_colors.count(k)) continue;
    const ReplacementRule& rule = s.rules.at(k);
    if (rule.graph.edges.size() > x.leaves.size()) continue;
    std::vector<detail::RawMatch> raw;
    detail::collect_matches(rule, x, incident, by_color, twist_groups, raw);

    // Group matches by (leaf set, masked attachment modulo the boundary
    // group of k); keep the first match per group that contracts to an
    // object.
    using Key = std::pair<std::set<Word>, std::vector<Name>>;
    std::map<Key, std::vector<size_t>> classes;
    std::vector<std::set<Word>> leaf_sets(raw.size());
    std::vector<std::vector<Name>> attachments(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) {
      for (const auto& [ren, w] : raw[i].match) leaf_sets[i].insert(w);
      attachments[i].reserve(rule.boundary.size());
      for (const Name& bv : rule.boundary)
        attachments[i].push_back(raw[i].vmap.at(bv));
      std::vector<Name> masked =
          detail::masked_attachment(attachments[i], leaf_sets[i], incident);
      classes[{leaf_sets[i], detail::least_attachment(masked, *twist_groups[k])}]
          .push_back(i);
    }
    for (const auto& [key, members] : classes) {
      for (size_t i : members) {
        ContractionSite site;
        site.color = k;
        site.leaves = leaf_sets[i];
        site.match = raw[i].match;
        site.twists = raw[i].twists;
        site.attachment = attachments[i];
        site.literal = detail::literal_unexpansion(s, x, k, site.leaves,
                                                   site.attachment);
        if (site.literal || oracle.object_after(site)) {
          out.sites.push_back(std::move(site));
          break;
        }
      }
    }
  }
  std::sort(out.sites.begin(), out.sites.end(), detail::site_less);
  return out;
}

// --------------------------------------------------------------------------
// Parallelism
// --------------------------------------------------------------------------

inline bool are_parallel(ContractionContext& ctx, const Expansion& x,
                         const ContractionSite& a, const ContractionSite& b) {
  for (const Word& w : a.leaves)
    if (b.leaves.count(w)) return false;
  // Two literal sites undo two independent expansion steps, so the result
  // is itself an expansion.
  if (a.literal && b.literal) return true;
  return ctx.is_object(contract_sites(x, {a, b}));
}


// Adjacency matrix of the parallelism relation over the reported sites.
inline std::vector<std::vector<bool>> parallel_matrix(ContractionContext& ctx,
                                                      const Expansion& x,
                                                      const SiteReport& sites) {
  return detail::pair_matrices(ctx, x, sites).par;
}

namespace detail {

// Exact maximum clique, branch and bound with a greedy coloring upper
// bound over bitset candidate sets.  Deterministic.  Sets exact=false when
// the node budget runs out.
class CliqueSearch {
 public:
  // cap: a known external upper bound on the clique number (e.g. leaf
  // supply); reaching it ends the search early.
  CliqueSearch(const std::vector<std::vector<bool>>& adj, size_t node_budget,
               size_t cap = SIZE_MAX)
      : n_(adj.size()), words_((n_ + 63) / 64), budget_(node_budget),
        cap_(cap) {
    rows_.assign(n_ * words_, 0);
    for (size_t i = 0; i < n_; ++i)
      for (size_t j = 0; j < n_; ++j)
        if (adj[i][j]) rows_[i * words_ + j / 64] |= uint64_t(1) << (j % 64);
  }

  size_t best = 0;
  std::vector<size_t> best_set;
  bool exact = true;

  void run() {
    if (n_ == 0) return;
    std::vector<uint64_t> all(words_, 0);
    for (size_t i = 0; i < n_; ++i) all[i / 64] |= uint64_t(1) << (i % 64);
    // Greedy warm start; when it meets the external cap the branch and
    // bound is not needed at all.
    std::vector<size_t> greedy;
    std::vector<uint64_t> left = all;
    for (size_t w = 0; w < words_; ++w)
      while (left[w]) {
        size_t v = w * 64 + size_t(__builtin_ctzll(left[w]));
        greedy.push_back(v);
        for (size_t u = 0; u < words_; ++u) left[u] &= row(v)[u];
      }
    best = greedy.size();
    best_set = std::move(greedy);
    if (best >= cap_) return;
    std::vector<size_t> grown;
    expand(grown, all);
    std::sort(best_set.begin(), best_set.end());
  }

 private:
  const uint64_t* row(size_t v) const { return rows_.data() + v * words_; }

  static bool intersects(const uint64_t* a, const uint64_t* b, size_t w) {
    for (size_t i = 0; i < w; ++i)
      if (a[i] & b[i]) return true;
    return false;
  }

  void expand(std::vector<size_t>& grown, std::vector<uint64_t>& cands) {
    if (best >= cap_) return;
    if (++nodes_ > budget_) {
      exact = false;
      return;
    }
    // Greedy coloring in vertex order: vertices of one color class are
    // pairwise non-adjacent, so a clique takes at most one per class.
    std::vector<std::vector<uint64_t>> classes;
    std::vector<std::pair<size_t, size_t>> ordered;  // (color, vertex)
    for (size_t w = 0; w < words_; ++w) {
      uint64_t bits = cands[w];
      while (bits) {
        size_t v = w * 64 + size_t(__builtin_ctzll(bits));
        bits &= bits - 1;
        size_t c = 0;
        while (c < classes.size() && intersects(classes[c].data(), row(v), words_))
          ++c;
        if (c == classes.size()) classes.emplace_back(words_, 0);
        classes[c][v / 64] |= uint64_t(1) << (v % 64);
        ordered.push_back({c + 1, v});
      }
    }
    if (ordered.empty()) {
      if (grown.size() > best) {
        best = grown.size();
        best_set = grown;
      }
      return;
    }
    if (grown.size() + classes.size() <= best) return;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<uint64_t> next(words_);
    for (size_t i = ordered.size(); i-- > 0;) {
      if (best >= cap_) return;
      if (grown.size() + ordered[i].first <= best) return;
      size_t v = ordered[i].second;
      cands[v / 64] &= ~(uint64_t(1) << (v % 64));
      bool any = false;
      for (size_t w = 0; w < words_; ++w) {
        next[w] = cands[w] & row(v)[w];
        any |= next[w] != 0;
      }
      grown.push_back(v);
      if (any) {
        std::vector<uint64_t> sub = next;
        expand(grown, sub);
      } else if (grown.size() > best) {
        best = grown.size();
        best_set = grown;
      }
      grown.pop_back();
      if (!exact) return;
    }
  }

  size_t n_;
  size_t words_;
  size_t budget_;
  size_t cap_;
  size_t nodes_ = 0;
  std::vector<uint64_t> rows_;
};

}  // namespace detail

struct ParallelReport {
  size_t max_parallel = 0;      // largest set of pairwise parallel sites
  std::vector<size_t> witness;  // indices into the site list
  size_t max_packing = 0;       // largest set of pairwise leaf-disjoint
                                // sites (no object test); upper bound
  bool exact = true;
};

// Largest set of pairwise parallel sites: the maximum clique of the
// parallelism graph, i.e. the top simplex dimension of the contraction
// complex plus one.
inline ParallelReport max_parallel(ContractionContext& ctx, const Expansion& x,
                                   const SiteReport& sites,
                                   size_t node_budget = 1000000) {
  ParallelReport out;
  out.exact = sites.exact;
  const std::vector<ContractionSite>& ss = sites.sites;
  const size_t n = ss.size();

  // Pairwise parallel sites are leaf-disjoint, so no clique can exceed the
  // leaf supply.
  size_t min_site = x.leaves.size();
  for (const ContractionSite& s : ss)
    min_site = std::min(min_site, std::max<size_t>(s.leaves.size(), 1));
  size_t cap = n == 0 ? 0 : x.leaves.size() / min_site;

  detail::PairMatrices m = detail::pair_matrices(ctx, x, sites);
  detail::CliqueSearch cs{m.par, node_budget, cap};
  cs.run();
  out.max_parallel = cs.best;
  out.witness = cs.best_set;
  if (!cs.exact) out.exact = false;

  if (m.dis == m.par) {
    out.max_packing = out.max_parallel;
    return out;
  }
  detail::CliqueSearch ps{m.dis, node_budget, cap};
  ps.run();
  out.max_packing = ps.best;
  if (!ps.exact) out.exact = false;
  return out;
}

// --------------------------------------------------------------------------
// The contraction complex
// --------------------------------------------------------------------------

struct ComplexK {
  size_t n = 0;  // one vertex per contraction site
  std::set<std::pair<size_t, size_t>> edges;  // parallel pairs, first < second
  bool exact = true;
};

inline ComplexK build_complex(ContractionContext& ctx, const Expansion& x,
                              const SiteReport& sites) {
  if (sites.sites.empty())
    throw input_error("EmptyComplex: the expansion admits no contraction sites");
  ComplexK k;
  k.n = sites.sites.size();
  k.exact = sites.exact;
  std::vector<std::vector<bool>> par = parallel_matrix(ctx, x, sites);
  for (size_t i = 0; i < k.n; ++i)
    for (size_t j = i + 1; j < k.n; ++j)
      if (par[i][j]) k.edges.insert({i, j});
  return k;
}

struct GroundednessReport {
  size_t m = 0;                 // largest grounded simplex size
  std::vector<size_t> simplex;  // witness (vertex indices)
  bool exact = true;
};

// Largest clique C of the complex such that every vertex of the complex is
// adjacent to all but at most d members of C (membership in C excuses a
// vertex from being adjacent to itself).  Groundedness is not monotone
// under taking subcliques, so all cliques are enumerated.
inline GroundednessReport groundedness(const ComplexK& k, size_t d,
                                       size_t node_budget = 1000000) {
  GroundednessReport out;
  const size_t n = k.n;
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (const auto& [a, b] : k.edges) adj[a][b] = adj[b][a] = true;
  std::vector<size_t> clique;
  size_t nodes = 0;
  auto grounded = [&]() {
    for (size_t u = 0; u < n; ++u) {
      size_t missed = 0;
      for (size_t c : clique)
        if (c != u && !adj[u][c]) ++missed;
      if (missed > d) return false;
    }
    return true;
  };
  std::function<void()> rec = [&]() {
    if (nodes > node_budget) {
      out.exact = false;
      return;
    }
    ++nodes;
    if (clique.size() > out.m && grounded()) {
      out.m = clique.size();
      out.simplex = clique;
    }
    size_t from = clique.empty() ? 0 : clique.back() + 1;
    for (size_t v = from; v < n; ++v) {
      bool ok = true;
      for (size_t c : clique)
        if (!adj[c][v]) {
          ok = false;
          break;
        }
      if (!ok) continue;
      clique.push_back(v);
      rec();
      clique.pop_back();
    }
  };
  rec();
  return out;
}

inline bool skeleton_connected(const ComplexK& k) {
  if (k.n == 0) return false;
  std::vector<std::vector<size_t>> adj(k.n);
  for (const auto& [a, b] : k.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<bool> seen(k.n, false);
  std::vector<size_t> work{0};
  seen[0] = true;
  size_t reached = 1;
  while (!work.empty()) {
    size_t v = work.back();
    work.pop_back();
    for (size_t w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        work.push_back(w);
      }
  }
  return reached == k.n;
}

struct ConnectivityReport {
  int bound = -2;  // floor(m/d) - 1, or -2 when no grounded simplex exists
  size_t m = 0;
  size_t d = 0;
  std::vector<size_t> simplex;
  bool skeleton_connected = false;
  bool exact = true;
};

inline ConnectivityReport connectivity_bound(const ComplexK& k, size_t d,
                                             size_t node_budget = 1000000) {
  if (d == 0) throw input_error("grounding degree must be positive");
  GroundednessReport g = groundedness(k, d, node_budget);
  ConnectivityReport out;
  out.m = g.m;
  out.d = d;
  out.simplex = g.simplex;
  out.exact = g.exact && k.exact;
  out.bound = g.m == 0 ? -2 : static_cast<int>(g.m / d) - 1;
  out.skeleton_connected = skeleton_connected(k);
  return out;
}

// --------------------------------------------------------------------------
// Contractivity scan
// --------------------------------------------------------------------------

struct ScanEntry {
  std::string leaves;  // space-separated leaf addresses
  size_t leaf_count = 0;
  size_t sites = 0;
  size_t parallel = 0;
};

struct ScanReport {
  size_t max_leaves = 0;
  size_t target = 0;
  size_t scanned = 0;          // number of expansions visited
  size_t margin = 0;           // largest rule size; exceptions this close to
                               // max_leaves defeat the verdict
  std::vector<ScanEntry> exceptions;  // expansions with max_parallel < target
  bool consistent = false;  // true when all exceptions sit well below the
                            // scan horizon (leaf_count + margin < max_leaves)
  bool exact = true;
};

using ScanObserver = std::function<void(const Expansion&, const SiteReport&,
                                        const ParallelReport&)>;

// Visit every expansion with at most max_leaves leaves and record the ones
// admitting fewer than `target` parallel contractions.  The verdict is
// `consistent` when every exception is small enough that no expansion near
// the horizon lacks the target, i.e. the exception list is closed.
inline ScanReport scan_contractivity(ContractionContext& ctx,
                                     size_t max_leaves, size_t target,
                                     const ScanObserver& observer = {},
                                     size_t parallel_budget = 1000000) {
  const ReplacementSystem& s = ctx.system();
  const Classification& cls = ctx.classification();
  if (cls.expanding_class == ExpandingClass::Neither)
    throw input_error(
        "the replacement system is not expanding or almost expanding");
  if (max_leaves < s.base.edges.size())
    throw input_error("max_leaves is smaller than the base hypergraph");
  for (const Name& k : cls.reachable_colors)
    if (!cls.trivial_colors.count(k) && s.rules.at(k).graph.edges.size() < 2)
      throw input_error("color '" + k +
                        "' has a non-trivial single-hyperedge rule; its "
                        "expansions never terminate");
  ctx.ensure_table(max_leaves > 0 ? max_leaves - 1 : 0);

  ScanReport out;
  out.max_leaves = max_leaves;
  out.target = target;
  out.margin = static_cast<size_t>(cls.max_rule_size);
  out.exact = ctx.exact();

  std::set<std::string> seen;
  std::function<void(const Expansion&)> visit = [&](const Expansion& x) {
    ++out.scanned;
    SiteReport sr = find_sites(ctx, x);
    ParallelReport pr = max_parallel(ctx, x, sr, parallel_budget);
    if (!sr.exact || !pr.exact) out.exact = false;
    if (pr.max_parallel < target) {
      ScanEntry e;
      e.leaf_count = x.leaves.size();
      e.sites = sr.sites.size();
      e.parallel = pr.max_parallel;
      std::string joined;
      for (const auto& [w, le] : x.leaves) {
        if (!joined.empty()) joined.push_back(' ');
        joined += join(w);
      }
      e.leaves = std::move(joined);
      out.exceptions.push_back(std::move(e));
    }
    if (observer) observer(x, sr, pr);
    for (const auto& [w, e] : x.leaves) {
      if (cls.trivial_colors.count(e.color)) continue;
      size_t grow = s.rules.at(e.color).graph.edges.size() - 1;
      if (x.leaves.size() + grow > max_leaves) continue;
      Expansion y = expand_hyperedge(s, x, w);
      if (seen.insert(ContractionContext::leaf_key(y)).second) visit(y);
    }
  };
  Expansion b = base_expansion(s);
  seen.insert(ContractionContext::leaf_key(b));
  visit(b);

  std::sort(out.exceptions.begin(), out.exceptions.end(),
            [](const ScanEntry& a, const ScanEntry& b2) {
              if (a.leaf_count != b2.leaf_count)
                return a.leaf_count < b2.leaf_count;
              return a.leaves < b2.leaves;
            });
  out.consistent = true;
  for (const ScanEntry& e : out.exceptions)
    if (e.leaf_count + out.margin >= max_leaves) out.consistent = false;
  return out;
}

}  // namespace hrs
