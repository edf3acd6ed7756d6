#pragma once

// Worked diagrams over the gasket system: the two generating rearrangements
// r (a rotation-like map) and a (a reflection-like map), presented on the
// expansion of the base at its right-hand edge and labeled with elements of
// the rho/phi tuple.

#include <vector>

#include "hrs/catalog_tuples.hpp"
#include "hrs/diagram.hpp"

namespace hrs {

struct CatalogDiagram {
  Name system;  // catalog system the diagram lives over
  Name tuple;   // catalog tuple providing the labels
  Diagram diagram;
};

inline std::vector<Name> catalog_diagram_names() { return {"a", "r"}; }

inline bool is_catalog_diagram_name(const Name& n) {
  for (const auto& m : catalog_diagram_names())
    if (m == n) return true;
  return false;
}

inline CatalogDiagram catalog_diagram(const Name& name) {
  const ReplacementSystem s = catalog_system("gasket");
  const Expansion x = expand_hyperedge(s, base_expansion(s), Word{"R"});
  const Word L{"L"};
  const Word R1{"R", "1"};
  const Word R2{"R", "2"};
  const Word R3{"R", "3"};

  Diagram d;
  d.domain = x;
  d.range = x;
  if (name == "r") {
    d.edge_map = {{L, R3}, {R1, L}, {R2, R2}, {R3, R1}};
    d.labels = {{L, parse_word("tri", "rho.rho")},
                {R1, parse_word("tri", "rho")},
                {R2, parse_word("tri", "rho")},
                {R3, parse_word("tri", "")}};
    d.pi = {{L, {2, 0, 1}}, {R1, {1, 2, 0}}, {R2, {1, 2, 0}}, {R3, {0, 1, 2}}};
  } else if (name == "a") {
    d.edge_map = {{L, R2}, {R1, R1}, {R2, L}, {R3, R3}};
    d.labels = {{L, parse_word("tri", "phi.rho")},
                {R1, parse_word("tri", "phi")},
                {R2, parse_word("tri", "phi.rho")},
                {R3, parse_word("tri", "phi.rho")}};
    d.pi = {{L, {0, 2, 1}}, {R1, {1, 0, 2}}, {R2, {0, 2, 1}}, {R3, {0, 2, 1}}};
  } else {
    throw input_error("unknown catalog diagram '" + name + "'");
  }
  return CatalogDiagram{"gasket", "rhophi", d};
}

}  // namespace hrs
