#pragma once

// Named self-similar tuples over the catalog systems.
//
//   phiInf      airplane     order-2 rotation of the blue rule
//   rhophi      sierpinski   rotation + reflection of the triangle rule
//                            (also valid over gasket, which shares the rule)
//   phi3..phi5  dendrite-n   order-2 flip of the blue rule
//   grig        dendrite-3   the flip together with a Grigorchuk action
//                            on the red rule
//   grig-shift  fullshift-2  the Grigorchuk action on the binary shift

#include <string>
#include <vector>

#include "hrs/catalog.hpp"
#include "hrs/selfsim.hpp"

namespace hrs {

struct CatalogTuple {
  Name system;  // catalog system the tuple is pinned to
  SelfSimilarTuple tuple;
};

inline std::vector<Name> catalog_tuple_names() {
  return {"phiInf", "rhophi", "phi3", "phi4", "phi5", "grig", "grig-shift"};
}

inline bool is_catalog_tuple_name(const Name& name) {
  for (const auto& n : catalog_tuple_names())
    if (n == name) return true;
  return false;
}

namespace detail {

// Identity on every edge of the rule, then the given cycles applied.
inline std::map<Name, Name> perm_from_cycles(
    const ReplacementSystem& s, const Name& color,
    const std::vector<std::vector<Name>>& cycles) {
  std::map<Name, Name> p;
  for (const auto& [n, e] : s.rules.at(color).graph.edges) p[n] = n;
  for (const auto& cyc : cycles)
    for (size_t i = 0; i < cyc.size(); ++i)
      p[cyc[i]] = cyc[(i + 1) % cyc.size()];
  return p;
}

inline CatalogTuple grigorchuk_shift_tuple() {
  ReplacementSystem s = catalog_system("fullshift-2");
  SelfSimilarTuple t = trivial_tuple(s);
  auto& g = t.groups["sh"].generators;
  g["a"].perm = perm_from_cycles(s, "sh", {{"0", "1"}});
  g["b"].perm = perm_from_cycles(s, "sh", {});
  g["b"].states = {{"0", parse_word("sh", "a")}, {"1", parse_word("sh", "c")}};
  g["c"].perm = g["b"].perm;
  g["c"].states = {{"0", parse_word("sh", "a")}, {"1", parse_word("sh", "d")}};
  g["d"].perm = g["b"].perm;
  g["d"].states = {{"1", parse_word("sh", "b")}};
  return {"fullshift-2", t};
}

inline CatalogTuple grigorchuk_dendrite_tuple() {
  ReplacementSystem s = catalog_system("dendrite-3");
  SelfSimilarTuple t = trivial_tuple(s);
  t.groups["blue"].generators["phi3"].perm =
      perm_from_cycles(s, "blue", {{"1", "3"}});
  auto& g = t.groups["red"].generators;
  g["a"].perm = perm_from_cycles(s, "red", {{"2", "3"}});
  g["b"].perm = perm_from_cycles(s, "red", {});
  g["b"].states = {{"2", parse_word("red", "a")},
                   {"3", parse_word("red", "c")}};
  g["c"].perm = g["b"].perm;
  g["c"].states = {{"2", parse_word("red", "a")},
                   {"3", parse_word("red", "d")}};
  g["d"].perm = g["b"].perm;
  g["d"].states = {{"3", parse_word("red", "b")}};
  return {"dendrite-3", t};
}

}  // namespace detail

inline CatalogTuple catalog_tuple(const Name& name) {
  using detail::perm_from_cycles;
  if (name == "phiInf") {
    ReplacementSystem s = catalog_system("airplane");
    SelfSimilarTuple t = trivial_tuple(s);
    t.groups["blue"].generators["phiInf"].perm =
        perm_from_cycles(s, "blue", {{"I", "F"}, {"T", "B"}});
    return {"airplane", t};
  }
  if (name == "rhophi") {
    ReplacementSystem s = catalog_system("sierpinski");
    SelfSimilarTuple t = trivial_tuple(s);
    Generator rho, phi;
    rho.perm = perm_from_cycles(s, "tri", {{"1", "2", "3"}});
    phi.perm = perm_from_cycles(s, "tri", {{"1", "2"}});
    for (const Name& x : std::vector<Name>{"1", "2", "3"}) {
      rho.states[x] = parse_word("tri", "rho");
      phi.states[x] = parse_word("tri", "phi");
    }
    t.groups["tri"].generators["rho"] = rho;
    t.groups["tri"].generators["phi"] = phi;
    return {"sierpinski", t};
  }
  if (name == "phi3" || name == "phi4" || name == "phi5") {
    int n = name.back() - '0';
    Name sys = "dendrite-" + std::to_string(n);
    ReplacementSystem s = catalog_system(sys);
    SelfSimilarTuple t = trivial_tuple(s);
    t.groups["blue"].generators[name].perm =
        perm_from_cycles(s, "blue", {{"1", std::to_string(n)}});
    return {sys, t};
  }
  if (name == "grig") return detail::grigorchuk_dendrite_tuple();
  if (name == "grig-shift") return detail::grigorchuk_shift_tuple();
  throw input_error("unknown catalog tuple '" + name + "'");
}

}  // namespace hrs
