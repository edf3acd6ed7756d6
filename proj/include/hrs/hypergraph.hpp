// Colored directed hypergraphs and pi-isomorphisms between them.
//
// A hypergraph here is a finite set of vertices plus named hyperedges; each
// hyperedge has a color and an ordered boundary list of vertices (length =
// its order, repeats allowed).  Two hyperedges are adjacent when they share a
// boundary vertex.  A pi-isomorphism is a pair of bijections (vertices,
// hyperedges) together with a per-edge permutation pi_e of boundary positions
// satisfying  f_V(bd_e(i)) = bd_{f_E(e)}(pi_e(i)).
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hrs/base.hpp"

namespace hrs {

struct Hyperedge {
  Name color;
  std::vector<Name> boundary;  // ordered, 1-based in reports; index 0 here

  int ord() const { return static_cast<int>(boundary.size()); }
  bool operator==(const Hyperedge&) const = default;
};

struct ColoredHypergraph {
  std::set<Name> vertices;
  std::map<Name, Hyperedge> edges;  // name -> edge; map keeps order stable

  bool has_vertex(const Name& v) const { return vertices.count(v) > 0; }

  // Names of edges incident on v, in deterministic order.
  std::vector<Name> incident_edges(const Name& v) const {
    std::vector<Name> out;
    for (const auto& [name, e] : edges)
      if (std::find(e.boundary.begin(), e.boundary.end(), v) !=
          e.boundary.end())
        out.push_back(name);
    return out;
  }

  // Boundary positions (0-based) of edge `e` whose vertex also lies on some
  // other edge of this hypergraph.  These are the positions a pi-isomorphism
  // with restricted boundary permutations must respect.
  std::set<int> shared_positions(const Name& e) const {
    std::set<int> out;
    const auto& ed = edges.at(e);
    for (int i = 0; i < ed.ord(); ++i) {
      const Name& v = ed.boundary[static_cast<size_t>(i)];
      for (const auto& [name, other] : edges) {
        if (name == e) continue;
        if (std::find(other.boundary.begin(), other.boundary.end(), v) !=
            other.boundary.end()) {
          out.insert(i);
          break;
        }
      }
    }
    return out;
  }
};

// Every structural invariant, reported together: orders >= 2, boundary
// vertices declared, no isolated vertices, names well-formed.
inline Diagnostics validate_hypergraph(const ColoredHypergraph& g) {
  Diagnostics d;
  std::set<Name> touched;
  for (const auto& v : g.vertices)
    if (!is_vertex_name(v))
      d.fail("vertex name '" + v + "' is not a valid name");
  for (const auto& [name, e] : g.edges) {
    if (!is_address_name(name))
      d.fail("hyperedge name '" + name + "' is not a valid name");
    if (e.color.empty()) d.fail("hyperedge '" + name + "' has empty color");
    if (e.ord() < 2)
      d.fail("hyperedge '" + name + "' has order " +
             std::to_string(e.ord()) + " (minimum is 2)");
    for (const auto& v : e.boundary) {
      if (!g.has_vertex(v))
        d.fail("hyperedge '" + name + "' uses undeclared vertex '" + v + "'");
      touched.insert(v);
    }
  }
  for (const auto& v : g.vertices)
    if (!touched.count(v)) d.fail("vertex '" + v + "' is isolated");
  return d;
}

// ---------------------------------------------------------------------------
// Pi-isomorphisms.
// ---------------------------------------------------------------------------
struct PiIsomorphism {
  std::map<Name, Name> vertex_map;
  std::map<Name, Name> edge_map;
  std::map<Name, Perm> pi;  // per source edge, 0-based one-line form

  // Two pi-isomorphisms are the same map iff they agree on vertices and
  // edges; distinct pi tables can induce the same map when an edge repeats a
  // boundary vertex, so pi is deliberately excluded from equality.
  bool same_map(const PiIsomorphism& o) const {
    return vertex_map == o.vertex_map && edge_map == o.edge_map;
  }
};

// Does (vmap, emap, pi) satisfy the adjacency equation on every edge?
inline bool check_pi_isomorphism(const ColoredHypergraph& a,
                                 const ColoredHypergraph& b,
                                 const PiIsomorphism& f) {
  if (f.vertex_map.size() != a.vertices.size() ||
      f.edge_map.size() != a.edges.size())
    return false;
  std::set<Name> vimg, eimg;
  for (const auto& [v, w] : f.vertex_map) {
    if (!a.has_vertex(v) || !b.has_vertex(w)) return false;
    if (!vimg.insert(w).second) return false;
  }
  if (vimg.size() != b.vertices.size()) return false;
  for (const auto& [e, e2] : f.edge_map)
    if (!eimg.insert(e2).second) return false;
  if (eimg.size() != b.edges.size()) return false;
  for (const auto& [e, e2] : f.edge_map) {
    if (!a.edges.count(e) || !b.edges.count(e2)) return false;
    const auto& ea = a.edges.at(e);
    const auto& eb = b.edges.at(e2);
    if (ea.color != eb.color || ea.ord() != eb.ord()) return false;
    auto it = f.pi.find(e);
    if (it == f.pi.end()) return false;
    const Perm& p = it->second;
    if (static_cast<int>(p.size()) != ea.ord() || !is_perm(p)) return false;
    for (int i = 0; i < ea.ord(); ++i) {
      const Name& src = ea.boundary[static_cast<size_t>(i)];
      if (f.vertex_map.at(src) !=
          eb.boundary[static_cast<size_t>(p[static_cast<size_t>(i)])])
        return false;
    }
  }
  return true;
}

// Composition: tau: A -> B then sigma: B -> C, with per-edge permutations
// composed as sigma_{tau_E(e)} o tau_e.
inline PiIsomorphism compose_pi_isomorphisms(const PiIsomorphism& sigma,
                                             const PiIsomorphism& tau) {
  PiIsomorphism out;
  for (const auto& [v, w] : tau.vertex_map)
    out.vertex_map[v] = sigma.vertex_map.at(w);
  for (const auto& [e, e2] : tau.edge_map)
    out.edge_map[e] = sigma.edge_map.at(e2);
  for (const auto& [e, p] : tau.pi)
    out.pi[e] = compose(sigma.pi.at(tau.edge_map.at(e)), p);
  return out;
}

inline PiIsomorphism invert_pi_isomorphism(const PiIsomorphism& f) {
  PiIsomorphism out;
  for (const auto& [v, w] : f.vertex_map) out.vertex_map[w] = v;
  for (const auto& [e, e2] : f.edge_map) out.edge_map[e2] = e;
  for (const auto& [e, p] : f.pi) out.pi[f.edge_map.at(e)] = inverse(p);
  return out;
}

// ---------------------------------------------------------------------------
// Canonical form: a relabeling-invariant certificate string plus the
// renaming that realizes it.  Two hypergraphs have equal certificates iff
// they are isomorphic as colored hypergraphs with boundary order preserved
// exactly (all pi trivial).
// ---------------------------------------------------------------------------
struct CanonicalForm {
  std::string certificate;
  std::map<Name, Name> vertex_names;  // original -> canonical ("v0", "v1", ..)
  std::map<Name, Name> edge_names;    // original -> canonical ("e0", ..)
};

namespace detail {

// Certificate for a fixed discrete vertex numbering.
inline std::string certificate_for(const ColoredHypergraph& g,
                                   const std::map<Name, int>& vnum) {
  std::vector<std::string> descs;
  descs.reserve(g.edges.size());
  for (const auto& [name, e] : g.edges) {
    std::string d = e.color + ":";
    for (size_t i = 0; i < e.boundary.size(); ++i) {
      if (i) d.push_back(',');
      d += std::to_string(vnum.at(e.boundary[i]));
    }
    descs.push_back(std::move(d));
  }
  std::sort(descs.begin(), descs.end());
  std::string cert = "V" + std::to_string(g.vertices.size()) + ";";
  for (const auto& d : descs) {
    cert += d;
    cert.push_back('|');
  }
  return cert;
}

// One round of partition refinement: split classes by the multiset of
// (edge color, ord, own position, class of each co-boundary vertex).
inline bool refine_classes(const ColoredHypergraph& g,
                           std::map<Name, int>& cls) {
  std::map<Name, std::string> sig;
  for (const auto& v : g.vertices) sig[v] = std::to_string(cls[v]) + "#";
  for (const auto& [name, e] : g.edges) {
    for (size_t i = 0; i < e.boundary.size(); ++i) {
      std::string inc = e.color + "@" + std::to_string(i) + "[";
      for (size_t j = 0; j < e.boundary.size(); ++j)
        inc += std::to_string(cls[e.boundary[j]]) + ".";
      inc += "]";
      // Accumulate incidences per vertex; sorted below via multiset string.
      sig[e.boundary[i]] += inc + ";";
    }
  }
  // Sort each vertex's incidence list so the signature is order-free.
  for (auto& [v, s] : sig) {
    auto parts = split(s, ';');
    std::sort(parts.begin() + 1, parts.end());
    std::string joined;
    for (const auto& p : parts) {
      joined += p;
      joined.push_back(';');
    }
    s = joined;
  }
  std::map<std::string, int> order;
  for (const auto& [v, s] : sig) order[s];  // collect
  int next = 0;
  for (auto& [s, id] : order) id = next++;
  // Signatures embed the old class id, so classes only ever split; the
  // round changed the partition iff the class count grew.  (Ids may still
  // get renumbered on a stable partition, so comparing ids would not
  // terminate.)
  std::set<int> before;
  for (const auto& [v, c] : cls) before.insert(c);
  for (const auto& v : g.vertices) cls[v] = order.at(sig.at(v));
  return order.size() > before.size();
}

inline void canonical_search(const ColoredHypergraph& g,
                             std::map<Name, int> cls,
                             std::optional<std::string>& best,
                             std::map<Name, int>& best_num) {
  while (refine_classes(g, cls)) {
  }
  // Find the smallest non-singleton class.
  std::map<int, std::vector<Name>> buckets;
  for (const auto& v : g.vertices) buckets[cls[v]].push_back(v);
  const std::vector<Name>* target = nullptr;
  for (const auto& [c, vs] : buckets)
    if (vs.size() > 1) {
      target = &vs;
      break;
    }
  if (!target) {
    // Discrete: classes give the numbering directly.
    std::map<Name, int> vnum;
    for (const auto& [v, c] : cls) vnum[v] = c;
    // Classes may be non-contiguous after refinement; compact them.
    std::map<int, int> compact;
    for (const auto& [c, vs] : buckets) compact[c] = static_cast<int>(compact.size());
    for (auto& [v, n] : vnum) n = compact[n];
    std::string cert = certificate_for(g, vnum);
    if (!best || cert < *best) {
      best = cert;
      best_num = vnum;
    }
    return;
  }
  // Individualize each candidate in turn.
  for (const auto& v : *target) {
    auto cls2 = cls;
    int fresh = 0;
    for (const auto& [w, c] : cls2) fresh = std::max(fresh, c + 1);
    cls2[v] = fresh;
    canonical_search(g, std::move(cls2), best, best_num);
  }
}

}  // namespace detail

inline CanonicalForm canonical_form(const ColoredHypergraph& g) {
  CanonicalForm out;
  if (g.vertices.empty()) {
    out.certificate = "V0;";
    return out;
  }
  std::map<Name, int> cls;
  for (const auto& v : g.vertices) cls[v] = 0;
  std::optional<std::string> best;
  std::map<Name, int> best_num;
  detail::canonical_search(g, cls, best, best_num);
  out.certificate = *best;
  for (const auto& [v, n] : best_num)
    out.vertex_names[v] = "v" + std::to_string(n);
  // Edge renaming: sort edges by canonical descriptor, ties by original name
  // (parallel identical edges are interchangeable, so any stable choice
  // yields the same certificate).
  std::vector<std::pair<std::string, Name>> order;
  for (const auto& [name, e] : g.edges) {
    std::string d = e.color + ":";
    for (size_t i = 0; i < e.boundary.size(); ++i) {
      if (i) d.push_back(',');
      d += std::to_string(best_num.at(e.boundary[i]));
    }
    order.push_back({d, name});
  }
  std::sort(order.begin(), order.end());
  for (size_t i = 0; i < order.size(); ++i)
    out.edge_names[order[i].second] = "e" + std::to_string(i);
  return out;
}

// ---------------------------------------------------------------------------
// Enumerating pi-isomorphisms a -> b whose boundary permutations are drawn
// from an allowed set per color on the shared positions (free elsewhere).
// Pass empty `allowed` entries to forbid any reordering beyond identity.
// ---------------------------------------------------------------------------
struct PiSearchOptions {
  // Allowed full boundary permutations per color; missing color => {id}.
  std::map<Name, std::set<Perm>> allowed;
  // Positions of each source edge that must follow an allowed permutation.
  // By default every position shared with another edge is constrained.
  std::optional<std::map<Name, std::set<int>>> relevant;
  size_t limit = 0;  // 0 = no limit on number of results
};

namespace detail {

struct PiSearchState {
  const ColoredHypergraph* a;
  const ColoredHypergraph* b;
  const PiSearchOptions* opt;
  std::vector<Name> a_edges;
  std::map<Name, Name> emap;
  std::map<Name, Name> vmap;      // a vertex -> b vertex
  std::map<Name, Name> vmap_inv;  // b vertex -> a vertex
  std::set<Name> used_b;
  std::map<Name, Perm> pis;
  std::vector<PiIsomorphism> results;
  std::set<std::pair<std::map<Name, Name>, std::map<Name, Name>>> seen;

  std::set<int> relevant_of(const Name& e) const {
    if (opt->relevant) {
      auto it = opt->relevant->find(e);
      return it == opt->relevant->end() ? std::set<int>{} : it->second;
    }
    return a->shared_positions(e);
  }

  const std::set<Perm>& allowed_of(const Name& color) const {
    static const std::set<Perm> kEmpty;
    auto it = opt->allowed.find(color);
    return it == opt->allowed.end() ? kEmpty : it->second;
  }

  bool assign_vertices(const Hyperedge& ea, const Hyperedge& eb,
                       const Perm& p, std::vector<std::pair<Name, Name>>& add) {
    for (int i = 0; i < ea.ord(); ++i) {
      const Name& va = ea.boundary[static_cast<size_t>(i)];
      const Name& vb = eb.boundary[static_cast<size_t>(p[static_cast<size_t>(i)])];
      auto it = vmap.find(va);
      if (it != vmap.end()) {
        if (it->second != vb) return false;
        continue;
      }
      auto it2 = vmap_inv.find(vb);
      if (it2 != vmap_inv.end()) {
        if (it2->second != va) return false;
        continue;
      }
      add.push_back({va, vb});
      vmap[va] = vb;  // tentative; caller rolls back via `add`
      vmap_inv[vb] = va;
    }
    return true;
  }

  void rollback(const std::vector<std::pair<Name, Name>>& add) {
    for (const auto& [va, vb] : add) {
      vmap.erase(va);
      vmap_inv.erase(vb);
    }
  }

  // Candidate boundary permutations for mapping edge ea onto eb: each
  // allowed full permutation fixed on the relevant positions, completed in
  // every injective way on the free positions.
  std::vector<Perm> candidate_pis(const Name& ename, const Hyperedge& ea,
                                  const Hyperedge& eb) {
    std::set<Perm> cands;
    std::set<int> rel = relevant_of(ename);
    int n = ea.ord();
    std::vector<Perm> seeds;
    const auto& allowed = allowed_of(ea.color);
    if (allowed.empty()) {
      seeds.push_back(identity_perm(n));
    } else {
      for (const auto& s : allowed)
        if (static_cast<int>(s.size()) == n) seeds.push_back(s);
      if (seeds.empty()) seeds.push_back(identity_perm(n));
    }
    for (const Perm& s : seeds) {
      // Fix relevant positions to s, permute the rest arbitrarily.
      std::vector<int> free_src, free_dst;
      std::vector<bool> taken(static_cast<size_t>(n), false);
      for (int i : rel) taken[static_cast<size_t>(s[static_cast<size_t>(i)])] = true;
      for (int i = 0; i < n; ++i) {
        if (!rel.count(i)) free_src.push_back(i);
      }
      for (int j = 0; j < n; ++j)
        if (!taken[static_cast<size_t>(j)]) free_dst.push_back(j);
      std::sort(free_dst.begin(), free_dst.end());
      do {
        Perm p(static_cast<size_t>(n), -1);
        for (int i : rel) p[static_cast<size_t>(i)] = s[static_cast<size_t>(i)];
        for (size_t k = 0; k < free_src.size(); ++k)
          p[static_cast<size_t>(free_src[k])] = free_dst[k];
        cands.insert(p);
      } while (std::next_permutation(free_dst.begin(), free_dst.end()));
    }
    return {cands.begin(), cands.end()};
  }

  void search(size_t idx) {
    if (opt->limit && results.size() >= opt->limit) return;
    if (idx == a_edges.size()) {
      auto key = std::make_pair(emap, vmap);
      if (seen.insert(key).second) {
        PiIsomorphism f;
        f.vertex_map = vmap;
        f.edge_map = emap;
        f.pi = pis;
        results.push_back(std::move(f));
      }
      return;
    }
    const Name& ename = a_edges[idx];
    const Hyperedge& ea = a->edges.at(ename);
    for (const auto& [bname, eb] : b->edges) {
      if (used_b.count(bname)) continue;
      if (eb.color != ea.color || eb.ord() != ea.ord()) continue;
      for (const Perm& p : candidate_pis(ename, ea, eb)) {
        std::vector<std::pair<Name, Name>> added;
        if (!assign_vertices(ea, eb, p, added)) {
          rollback(added);
          continue;
        }
        emap[ename] = bname;
        used_b.insert(bname);
        pis[ename] = p;
        search(idx + 1);
        pis.erase(ename);
        used_b.erase(bname);
        emap.erase(ename);
        rollback(added);
        if (opt->limit && results.size() >= opt->limit) return;
      }
    }
  }
};

}  // namespace detail

// All pi-isomorphisms a -> b under the given options.  Results are
// deduplicated as maps (pi reported is the lexicographically least table
// consistent with the vertex map and the allowed set).
inline std::vector<PiIsomorphism> find_pi_isomorphisms(
    const ColoredHypergraph& a, const ColoredHypergraph& b,
    const PiSearchOptions& opt = {}) {
  if (a.vertices.size() != b.vertices.size() ||
      a.edges.size() != b.edges.size())
    return {};
  detail::PiSearchState st;
  st.a = &a;
  st.b = &b;
  st.opt = &opt;
  for (const auto& [name, e] : a.edges) st.a_edges.push_back(name);
  // Most-constrained-first: edges with many shared positions first.
  std::stable_sort(st.a_edges.begin(), st.a_edges.end(),
                   [&](const Name& x, const Name& y) {
                     return a.shared_positions(x).size() >
                            a.shared_positions(y).size();
                   });
  st.search(0);
  return st.results;
}

// Exhaustive reference implementation used by the tests as an oracle: try
// every vertex bijection and every per-edge assignment directly.  Exponential
// and only usable on very small instances.
inline std::vector<PiIsomorphism> find_pi_isomorphisms_bruteforce(
    const ColoredHypergraph& a, const ColoredHypergraph& b,
    const PiSearchOptions& opt = {}) {
  std::vector<PiIsomorphism> out;
  if (a.vertices.size() != b.vertices.size() ||
      a.edges.size() != b.edges.size())
    return out;
  std::vector<Name> av(a.vertices.begin(), a.vertices.end());
  std::vector<Name> bv(b.vertices.begin(), b.vertices.end());
  std::sort(bv.begin(), bv.end());
  std::set<std::pair<std::map<Name, Name>, std::map<Name, Name>>> seen;
  do {
    std::map<Name, Name> vmap;
    for (size_t i = 0; i < av.size(); ++i) vmap[av[i]] = bv[i];
    // Try to assign each a-edge to a b-edge consistently.
    std::vector<Name> ae;
    for (const auto& [n, e] : a.edges) ae.push_back(n);
    std::map<Name, Name> emap;
    std::map<Name, Perm> pis;
    std::set<Name> used;
    std::function<void(size_t)> rec = [&](size_t i) {
      if (i == ae.size()) {
        PiIsomorphism f;
        f.vertex_map = vmap;
        f.edge_map = emap;
        f.pi = pis;
        if (check_pi_isomorphism(a, b, f) &&
            seen.insert({emap, vmap}).second)
          out.push_back(f);
        return;
      }
      const auto& ea = a.edges.at(ae[i]);
      for (const auto& [bn, eb] : b.edges) {
        if (used.count(bn) || eb.color != ea.color || eb.ord() != ea.ord())
          continue;
        // Find the least pi consistent with vmap; must also obey `allowed`
        // on shared positions.
        std::set<int> rel;
        if (opt.relevant) {
          auto it = opt.relevant->find(ae[i]);
          if (it != opt.relevant->end()) rel = it->second;
        } else {
          rel = a.shared_positions(ae[i]);
        }
        std::set<Perm> seeds;
        auto ita = opt.allowed.find(ea.color);
        if (ita != opt.allowed.end())
          for (const auto& s : ita->second)
            if (static_cast<int>(s.size()) == ea.ord()) seeds.insert(s);
        if (seeds.empty()) seeds.insert(identity_perm(ea.ord()));
        Perm p(static_cast<size_t>(ea.ord()));
        for (int x = 0; x < ea.ord(); ++x) p[static_cast<size_t>(x)] = x;
        std::sort(p.begin(), p.end());
        bool found = false;
        do {
          bool okp = true;
          for (int x = 0; x < ea.ord() && okp; ++x)
            if (vmap.at(ea.boundary[static_cast<size_t>(x)]) !=
                eb.boundary[static_cast<size_t>(p[static_cast<size_t>(x)])])
              okp = false;
          if (okp) {
            bool seed_ok = false;
            for (const auto& s : seeds) {
              bool agree = true;
              for (int r : rel)
                if (vmap.at(ea.boundary[static_cast<size_t>(r)]) !=
                    eb.boundary[static_cast<size_t>(s[static_cast<size_t>(r)])]) {
                  agree = false;
                  break;
                }
              if (agree) {
                seed_ok = true;
                break;
              }
            }
            if (seed_ok) {
              found = true;
              break;
            }
          }
        } while (std::next_permutation(p.begin(), p.end()));
        if (!found) continue;
        emap[ae[i]] = bn;
        pis[ae[i]] = p;
        used.insert(bn);
        rec(i + 1);
        used.erase(bn);
        pis.erase(ae[i]);
        emap.erase(ae[i]);
      }
    };
    rec(0);
  } while (std::next_permutation(bv.begin(), bv.end()));
  return out;
}

}  // namespace hrs
