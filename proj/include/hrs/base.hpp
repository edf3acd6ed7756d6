// Common small utilities shared by every module: name/word handling,
// permutations in one-line form, deterministic containers and a diagnostic
// accumulator used by the validators.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hrs {

// Vertex / hyperedge / color names.  Names are non-empty strings over
// [A-Za-z0-9_:.] (':' and '.' are reserved for generated vertex and address
// names; user input is restricted to alphanumerics and '_').
using Name = std::string;

// A word over hyperedge letters; addresses of cells and points use these.
using Word = std::vector<Name>;

inline std::string join(const Word& w, char sep = '.') {
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) out.push_back(sep);
    out += w[i];
  }
  return out;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;  // empty string = empty word, not {""}
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

// Identifier check for user-supplied names.  Letters, digits and '_' are
// allowed and the name must not be empty.  (Digit-initial names like "0" or
// "3" are legal: several built-in systems use bare digits as edge letters.)
inline bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
      return false;
  }
  return true;
}

// Hyperedge names in expansions are dot-joined addresses ("X.1.2"); plain
// identifiers are the one-letter case.
inline bool is_address_name(const std::string& s) {
  if (s.empty()) return false;
  for (const auto& part : split(s, '.'))
    if (!is_identifier(part)) return false;
  return s.back() != '.';
}

// Vertex names are either identifiers (base/rule vertices) or "w:v" where w
// is the address of the expansion step that created the vertex.
inline bool is_vertex_name(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) return is_identifier(s);
  return is_address_name(s.substr(0, colon)) &&
         is_identifier(s.substr(colon + 1));
}

// ---------------------------------------------------------------------------
// Permutations, stored in one-line form: perm[i] = image of index i,
// 0-based internally.  All report formats are 1-based.
// ---------------------------------------------------------------------------
using Perm = std::vector<int>;

inline Perm identity_perm(int n) {
  Perm p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  return p;
}

inline bool is_perm(const Perm& p) {
  std::vector<bool> seen(p.size(), false);
  for (int v : p) {
    if (v < 0 || v >= static_cast<int>(p.size()) || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

inline Perm compose(const Perm& f, const Perm& g) {  // (f*g)(i) = f(g(i))
  Perm r(g.size());
  for (size_t i = 0; i < g.size(); ++i) r[i] = f[g[i]];
  return r;
}

inline Perm inverse(const Perm& p) {
  Perm r(p.size());
  for (size_t i = 0; i < p.size(); ++i) r[p[i]] = static_cast<int>(i);
  return r;
}

inline bool is_identity(const Perm& p) {
  for (size_t i = 0; i < p.size(); ++i)
    if (p[i] != static_cast<int>(i)) return false;
  return true;
}

// Closure of a generating set under composition; fine for the tiny symmetric
// groups (degree <= 8) that arise as boundary permutation groups.
inline std::set<Perm> generate_group(const std::vector<Perm>& gens, int degree) {
  std::set<Perm> g;
  g.insert(identity_perm(degree));
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<Perm> cur(g.begin(), g.end());
    for (const Perm& a : cur)
      for (const Perm& b : gens)
        if (g.insert(compose(b, a)).second) grew = true;
  }
  return g;
}

// Cycle notation for reports, 1-based: (1 2)(3 4); identity prints "id".
inline std::string cycle_string(const Perm& p) {
  std::string out;
  std::vector<bool> used(p.size(), false);
  for (size_t i = 0; i < p.size(); ++i) {
    if (used[i] || p[i] == static_cast<int>(i)) continue;
    out.push_back('(');
    size_t j = i;
    bool first = true;
    while (!used[j]) {
      used[j] = true;
      if (!first) out.push_back(' ');
      out += std::to_string(j + 1);
      first = false;
      j = static_cast<size_t>(p[j]);
    }
    out.push_back(')');
  }
  return out.empty() ? "id" : out;
}

// ---------------------------------------------------------------------------
// Diagnostics: validators return every violation, not just the first.
// ---------------------------------------------------------------------------
struct Diagnostics {
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
  void fail(std::string msg) { errors.push_back(std::move(msg)); }
  std::string str() const {
    std::string out;
    for (const auto& e : errors) {
      out += e;
      out.push_back('\n');
    }
    return out;
  }
};

// Thrown on malformed input (exit code 2 at the CLI boundary).
struct input_error : std::runtime_error {
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// Three-valued verdicts for budgeted decision procedures.
enum class Verdict { Yes, No, Undetermined };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    default: return "undetermined";
  }
}

}  // namespace hrs
