// Built-in replacement systems.  Each builder returns a system that passes
// validate_system, with the classification stated in catalog_notes.
//
// Names: airplane, sierpinski, gasket, dendrite-3..5, houghton-2..5,
// fullshift-2..3, badshift, matui-k2.  Tuples and diagrams for these systems
// live in catalog_tuples.hpp / catalog_diagrams.hpp (attached to entries via
// catalog_entry).
#pragma once

#include <string>
#include <vector>

#include "hrs/base.hpp"
#include "hrs/replacement.hpp"

namespace hrs {

namespace detail {

inline void add_edge(ColoredHypergraph& g, const Name& name,
                     const Name& color, std::vector<Name> bd) {
  for (const auto& v : bd) g.vertices.insert(v);
  g.edges[name] = Hyperedge{color, std::move(bd)};
}

}  // namespace detail

// Two colors; the base is a copy of the blue rule graph, so its letters are
// I, F, T, B.  Blue rule: a bar of two blue edges joined by a two-edge red
// cycle; red rule: a path of two red edges with a blue antenna in the middle.
inline ReplacementSystem airplane_system() {
  using detail::add_edge;
  ReplacementSystem s;
  s.colors = {"blue", "red"};
  add_edge(s.base, "I", "blue", {"bcl", "bl"});
  add_edge(s.base, "F", "blue", {"bcr", "br"});
  add_edge(s.base, "T", "red", {"bcr", "bcl"});
  add_edge(s.base, "B", "red", {"bcl", "bcr"});
  ReplacementRule blue;
  add_edge(blue.graph, "I", "blue", {"cl", "l"});
  add_edge(blue.graph, "F", "blue", {"cr", "r"});
  add_edge(blue.graph, "T", "red", {"cr", "cl"});
  add_edge(blue.graph, "B", "red", {"cl", "cr"});
  blue.boundary = {"l", "r"};
  s.rules["blue"] = blue;
  ReplacementRule red;
  add_edge(red.graph, "0", "red", {"l", "c"});
  add_edge(red.graph, "1", "red", {"c", "r"});
  add_edge(red.graph, "M", "blue", {"c", "ct"});
  red.boundary = {"l", "r"};
  s.rules["red"] = red;
  return s;
}

// One color of order 3; the rule subdivides a triangle into three corner
// triangles meeting pairwise at the midpoint vertices x, y, z.
inline ReplacementSystem sierpinski_system() {
  using detail::add_edge;
  ReplacementSystem s;
  s.colors = {"tri"};
  add_edge(s.base, "X", "tri", {"l", "r", "t"});
  ReplacementRule r;
  add_edge(r.graph, "1", "tri", {"p1", "z", "y"});
  add_edge(r.graph, "2", "tri", {"z", "p2", "x"});
  add_edge(r.graph, "3", "tri", {"y", "x", "p3"});
  r.boundary = {"p1", "p2", "p3"};
  s.rules["tri"] = r;
  return s;
}

// Same rule as sierpinski; the base is two triangles glued along all three
// vertices with opposite orientations.
inline ReplacementSystem gasket_system() {
  using detail::add_edge;
  ReplacementSystem s = sierpinski_system();
  s.base = ColoredHypergraph{};
  add_edge(s.base, "L", "tri", {"t", "b", "c"});
  add_edge(s.base, "R", "tri", {"t", "c", "b"});
  return s;
}

// n >= 3.  Base: an n-star of red edges from a center.  Both rules are
// n-stars from a fresh center; in the blue rule the first and last spokes
// are blue, in the red rule only the first is.
inline ReplacementSystem dendrite_system(int n) {
  using detail::add_edge;
  if (n < 3) throw input_error("dendrite systems need n >= 3");
  ReplacementSystem s;
  s.colors = {"blue", "red"};
  for (int i = 1; i <= n; ++i)
    add_edge(s.base, std::to_string(i), "red", {"ctr", "o" + std::to_string(i)});
  for (bool blue_rule : {true, false}) {
    ReplacementRule r;
    add_edge(r.graph, "1", "blue", {"ctr", "p"});
    for (int i = 2; i < n; ++i)
      add_edge(r.graph, std::to_string(i), "red",
               {"ctr", "m" + std::to_string(i)});
    add_edge(r.graph, std::to_string(n), blue_rule ? "blue" : "red",
             {"ctr", "q"});
    r.boundary = {"p", "q"};
    s.rules[blue_rule ? "blue" : "red"] = r;
  }
  return s;
}

// n in 2..5.  Base: n disjoint rays.  Each ray rule grows a black edge at
// the near end and continues the ray at the far end, leaving the two parts
// disconnected; black is trivial.
inline ReplacementSystem houghton_system(int n) {
  using detail::add_edge;
  if (n < 2) throw input_error("houghton systems need n >= 2");
  ReplacementSystem s;
  for (int k = 1; k <= n; ++k) s.colors.push_back("ray" + std::to_string(k));
  s.colors.push_back("black");
  for (int k = 1; k <= n; ++k) {
    std::string i = std::to_string(k);
    add_edge(s.base, "s" + i, "ray" + i, {"a" + i, "b" + i});
    ReplacementRule r;
    add_edge(r.graph, "b", "black", {"p", "u"});
    add_edge(r.graph, "t" + i, "ray" + i, {"v", "q"});
    r.boundary = {"p", "q"};
    s.rules["ray" + i] = r;
  }
  ReplacementRule black;
  add_edge(black.graph, "t", "black", {"p", "q"});
  black.boundary = {"p", "q"};
  s.rules["black"] = black;
  return s;
}

// The full shift on n letters as a replacement system: one color, rule and
// base are n pairwise disjoint edges 0..n-1.  Everything is isolated, so
// the limit space is the shift itself.
inline ReplacementSystem fullshift_system(int n) {
  using detail::add_edge;
  if (n < 2) throw input_error("full shift systems need n >= 2");
  ReplacementSystem s;
  s.colors = {"sh"};
  ReplacementRule r;
  for (int i = 0; i < n; ++i) {
    std::string d = std::to_string(i);
    add_edge(s.base, d, "sh", {"bu" + d, "bv" + d});
    add_edge(r.graph, d, "sh", {"u" + d, "v" + d});
  }
  r.boundary = {"u0", "v1"};
  s.rules["sh"] = r;
  return s;
}

// The edge shift on the two-vertex graph with a: blue->red, b: blue->red,
// c: red->blue, d: red->red, started at red.  The rules are disjoint edges
// (one per outgoing edge, colored by its target).  blue has no self-colored
// edge, so long runs of d admit no contraction and the system fails to be
// m-contractive for every m >= 2.
inline ReplacementSystem badshift_system() {
  using detail::add_edge;
  ReplacementSystem s;
  s.colors = {"blue", "red"};
  add_edge(s.base, "c", "blue", {"bu1", "bv1"});
  add_edge(s.base, "d", "red", {"bu2", "bv2"});
  ReplacementRule blue;
  add_edge(blue.graph, "a", "red", {"ua", "va"});
  add_edge(blue.graph, "b", "red", {"ub", "vb"});
  blue.boundary = {"ua", "vb"};
  s.rules["blue"] = blue;
  ReplacementRule red;
  add_edge(red.graph, "c", "blue", {"uc", "vc"});
  add_edge(red.graph, "d", "red", {"ud", "vd"});
  red.boundary = {"uc", "vd"};
  s.rules["red"] = red;
  return s;
}

// A two-color edge shift where each rule has exactly one edge of the other
// color and two of its own: the smallest instance of the "exactly an edge
// of every color" shape, with edge bound 4 + 3m for m parallel
// contractions.
inline ReplacementSystem matui_k2_system() {
  using detail::add_edge;
  ReplacementSystem s;
  s.colors = {"g", "h"};
  add_edge(s.base, "x0", "g", {"xs", "xt"});
  add_edge(s.base, "y0", "h", {"ys", "yt"});
  ReplacementRule g;
  add_edge(g.graph, "p", "g", {"ps", "pt"});
  add_edge(g.graph, "q", "g", {"qs", "qt"});
  add_edge(g.graph, "r", "h", {"rs", "rt"});
  g.boundary = {"ps", "qt"};
  s.rules["g"] = g;
  ReplacementRule h;
  add_edge(h.graph, "u", "h", {"us", "ut"});
  add_edge(h.graph, "v", "h", {"vs", "vt"});
  add_edge(h.graph, "w", "g", {"ws", "wt"});
  h.boundary = {"us", "vt"};
  s.rules["h"] = h;
  return s;
}

inline std::vector<Name> catalog_names() {
  return {"airplane",   "sierpinski", "gasket",      "dendrite-3",
          "dendrite-4", "dendrite-5", "houghton-2",  "houghton-3",
          "houghton-4", "houghton-5", "fullshift-2", "fullshift-3",
          "badshift",   "matui-k2"};
}

inline bool is_catalog_name(const Name& name) {
  for (const auto& n : catalog_names())
    if (n == name) return true;
  return false;
}

inline ReplacementSystem catalog_system(const Name& name) {
  if (name == "airplane") return airplane_system();
  if (name == "sierpinski") return sierpinski_system();
  if (name == "gasket") return gasket_system();
  if (name == "dendrite-3") return dendrite_system(3);
  if (name == "dendrite-4") return dendrite_system(4);
  if (name == "dendrite-5") return dendrite_system(5);
  if (name == "houghton-2") return houghton_system(2);
  if (name == "houghton-3") return houghton_system(3);
  if (name == "houghton-4") return houghton_system(4);
  if (name == "houghton-5") return houghton_system(5);
  if (name == "fullshift-2") return fullshift_system(2);
  if (name == "fullshift-3") return fullshift_system(3);
  if (name == "badshift") return badshift_system();
  if (name == "matui-k2") return matui_k2_system();
  throw input_error("unknown catalog entry '" + name + "'");
}

inline std::string catalog_notes(const Name& name) {
  if (name == "airplane")
    return "expanding; two colors; base is a copy of the blue rule graph; "
           "tuple phiInf flips blue cells end for end";
  if (name == "sierpinski")
    return "expanding; one order-3 color; tuple rhophi generates the full "
           "symmetric group on the three corners";
  if (name == "gasket")
    return "expanding; sierpinski rule over a two-triangle base; diagrams r "
           "and a generate a rotation and a reflection of the limit space";
  if (name.rfind("dendrite-", 0) == 0)
    return "expanding; red n-star base; tuple phi" + name.substr(9) +
           " swaps the two blue spokes" +
           (name == "dendrite-3"
                ? "; tuple grig adds the four standard involutions on the "
                  "red letters 2 and 3"
                : std::string());
  if (name.rfind("houghton-", 0) == 0)
    return "almost-expanding; black is trivial and every color is isolated; "
           "disconnected rule graphs";
  if (name.rfind("fullshift-", 0) == 0)
    return std::string("expanding; every color isolated; the limit space is "
                       "the full shift") +
           (name == "fullshift-2"
                ? "; tuple grig is the standard four-generator recursion on "
                  "the two letters"
                : std::string());
  if (name == "badshift")
    return "expanding; every color isolated; blue has no self-colored rule "
           "edge, so the system is not m-contractive for m >= 2";
  if (name == "matui-k2")
    return "expanding; every color isolated; each rule has one edge of the "
           "other color and two of its own; edge count bound 4 + 3m";
  throw input_error("unknown catalog entry '" + name + "'");
}

}  // namespace hrs
