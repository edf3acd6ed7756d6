// The symbol space of a replacement system as an edge shift: the color
// graph, language membership with failure positions, depth and color of
// words, and eventually periodic addresses ("prefix.(period)") with
// unrolling and prefix swapping.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hrs/base.hpp"
#include "hrs/replacement.hpp"

namespace hrs {

// ---------------------------------------------------------------------------
// The color graph: one vertex per color plus the start symbol "s"; an edge
// s -> k per k-colored base hyperedge and an edge k1 -> k2 per k2-colored
// hyperedge of R_{k1}.  Words of the language are walks starting at s.
// ---------------------------------------------------------------------------
struct ColorGraphEdge {
  Name letter;
  Name from;
  Name to;

  bool operator==(const ColorGraphEdge&) const = default;
};

struct ColorGraph {
  Name start = "s";
  std::set<Name> vertices;
  std::vector<ColorGraphEdge> edges;  // sorted by (from, letter)
};

inline ColorGraph build_color_graph(const ReplacementSystem& s) {
  ColorGraph g;
  g.vertices.insert(g.start);
  for (const auto& k : s.colors) g.vertices.insert(k);
  for (const auto& [n, e] : s.base.edges)
    g.edges.push_back({n, g.start, e.color});
  for (const auto& k : s.colors)
    for (const auto& [n, e] : s.rules.at(k).graph.edges)
      g.edges.push_back({n, k, e.color});
  std::sort(g.edges.begin(), g.edges.end(),
            [](const ColorGraphEdge& a, const ColorGraphEdge& b) {
              return std::tie(a.from, a.letter, a.to) <
                     std::tie(b.from, b.letter, b.to);
            });
  return g;
}

// ---------------------------------------------------------------------------
// Language membership.  Positions are 1-based in reports.
// ---------------------------------------------------------------------------
struct LanguageCheck {
  bool ok = false;
  int failure_position = 0;  // 0 when ok
  std::string reason;
};

inline LanguageCheck is_in_language(const ReplacementSystem& s,
                                    const Word& w) {
  LanguageCheck res;
  if (w.empty()) {
    res.failure_position = 1;
    res.reason = "empty word";
    return res;
  }
  auto c = s.base_letter_color(w[0]);
  if (!c) {
    res.failure_position = 1;
    res.reason = "'" + w[0] + "' is not a base hyperedge";
    return res;
  }
  for (size_t i = 1; i < w.size(); ++i) {
    auto next = s.rule_letter_color(*c, w[i]);
    if (!next) {
      res.failure_position = static_cast<int>(i) + 1;
      res.reason = "'" + w[i] + "' is not a hyperedge of the rule for color '" +
                   *c + "'";
      return res;
    }
    c = next;
  }
  res.ok = true;
  return res;
}

// Color of a word of the language: the color of its last letter.
inline Name color_of(const ReplacementSystem& s, const Word& w) {
  auto check = is_in_language(s, w);
  if (!check.ok)
    throw input_error("word '" + join(w) + "' is not in the language (" +
                      check.reason + ")");
  Name c = *s.base_letter_color(w[0]);
  for (size_t i = 1; i < w.size(); ++i) c = *s.rule_letter_color(c, w[i]);
  return c;
}

inline int depth_of(const Word& w) { return static_cast<int>(w.size()); }

// Number of language words per depth 1..max_depth (walk counts from s).
inline std::vector<long long> language_counts(const ReplacementSystem& s,
                                              int max_depth) {
  std::vector<long long> out;
  std::map<Name, long long> at;  // color -> #words of current depth ending
                                 // there
  for (const auto& [n, e] : s.base.edges) at[e.color] += 1;
  for (int d = 1; d <= max_depth; ++d) {
    long long total = 0;
    for (const auto& [k, cnt] : at) total += cnt;
    out.push_back(total);
    std::map<Name, long long> next;
    for (const auto& [k, cnt] : at)
      for (const auto& [n, e] : s.rules.at(k).graph.edges)
        next[e.color] += cnt;
    at = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Eventually periodic addresses.
// ---------------------------------------------------------------------------
struct EventuallyPeriodic {
  Word prefix;  // possibly empty
  Word period;  // nonempty

  bool operator==(const EventuallyPeriodic&) const = default;
};

// Letter of the unrolled address at 0-based position t.
inline const Name& letter_at(const EventuallyPeriodic& a, size_t t) {
  if (t < a.prefix.size()) return a.prefix[t];
  return a.period[(t - a.prefix.size()) % a.period.size()];
}

// Phase of position t: positions with equal phase read the same letters
// forever after, so (automaton state, phase) pairs drive cycle detection.
inline size_t phase_at(const EventuallyPeriodic& a, size_t t) {
  if (t < a.prefix.size()) return t;
  return a.prefix.size() + (t - a.prefix.size()) % a.period.size();
}

// Serialization: "prefix.(period)" with both parts dot-joined; empty prefix
// is written "(period)".
inline std::string format_address(const EventuallyPeriodic& a) {
  std::string out;
  if (!a.prefix.empty()) out = join(a.prefix) + ".";
  out += "(" + join(a.period) + ")";
  return out;
}

// Parses "X.1.(2)", "(1.2)" and the like.  Throws input_error on malformed
// strings (unbalanced parentheses, empty period, junk after ')').
inline EventuallyPeriodic parse_address(const std::string& str) {
  auto open = str.find('(');
  if (open == std::string::npos)
    throw input_error("address '" + str +
                      "' has no period; expected \"prefix.(period)\"");
  if (str.back() != ')' || str.find(')') != str.size() - 1)
    throw input_error("address '" + str + "' is malformed");
  std::string prefix_part = str.substr(0, open);
  std::string period_part = str.substr(open + 1, str.size() - open - 2);
  EventuallyPeriodic out;
  if (!prefix_part.empty()) {
    if (prefix_part.back() != '.')
      throw input_error("address '" + str +
                        "' needs a '.' between prefix and period");
    out.prefix = split(prefix_part.substr(0, prefix_part.size() - 1), '.');
  }
  out.period = split(period_part, '.');
  if (out.period.empty())
    throw input_error("address '" + str + "' has an empty period");
  for (const auto& l : out.prefix)
    if (!is_identifier(l))
      throw input_error("address letter '" + l + "' is not an identifier");
  for (const auto& l : out.period)
    if (!is_identifier(l))
      throw input_error("address letter '" + l + "' is not an identifier");
  return out;
}

// First n letters of the unrolled infinite word.
inline Word unroll(const EventuallyPeriodic& a, int n) {
  Word out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (i < static_cast<int>(a.prefix.size()))
      out.push_back(a.prefix[static_cast<size_t>(i)]);
    else
      out.push_back(a.period[static_cast<size_t>(
          (i - a.prefix.size()) % a.period.size())]);
  }
  return out;
}

// The chain condition on the unrolled word, including the wrap of the
// period.  Checking prefix + two periods covers every transition.
inline Diagnostics validate_address(const ReplacementSystem& s,
                                    const EventuallyPeriodic& a) {
  Diagnostics d;
  if (a.period.empty()) {
    d.fail("empty period");
    return d;
  }
  int len = static_cast<int>(a.prefix.size() + 2 * a.period.size());
  auto check = is_in_language(s, unroll(a, len));
  if (!check.ok)
    d.fail("position " + std::to_string(check.failure_position) + ": " +
           check.reason);
  return d;
}

// Canonical form: primitive period, and no prefix letter that could be
// absorbed by rotating the period.  Two addresses denote the same infinite
// word iff their canonical forms are equal.
inline EventuallyPeriodic canonicalize(const EventuallyPeriodic& a) {
  EventuallyPeriodic out = a;
  // Shrink the period to its primitive root.
  for (size_t k = 1; k <= out.period.size() / 2; ++k) {
    if (out.period.size() % k) continue;
    bool repeats = true;
    for (size_t i = k; i < out.period.size() && repeats; ++i)
      repeats = out.period[i] == out.period[i - k];
    if (repeats) {
      out.period.resize(k);
      break;
    }
  }
  // Absorb trailing prefix letters equal to the period's last letter.
  while (!out.prefix.empty() && out.prefix.back() == out.period.back()) {
    out.prefix.pop_back();
    std::rotate(out.period.begin(), out.period.end() - 1, out.period.end());
  }
  return out;
}

inline bool same_address(const EventuallyPeriodic& a,
                         const EventuallyPeriodic& b) {
  return canonicalize(a) == canonicalize(b);
}

// The canonical homeomorphism between same-colored cones, applied to one
// address: replace prefix x of alpha by y.
inline EventuallyPeriodic prefix_swap(const ReplacementSystem& s,
                                      const Word& x, const Word& y,
                                      const EventuallyPeriodic& alpha) {
  if (x.empty() || y.empty())
    throw input_error("prefix_swap needs nonempty cone words");
  Name cx = color_of(s, x);
  Name cy = color_of(s, y);
  if (cx != cy)
    throw input_error("cone words '" + join(x) + "' and '" + join(y) +
                      "' have different colors ('" + cx + "' vs '" + cy +
                      "')");
  Word head = unroll(alpha, static_cast<int>(x.size()));
  if (head != x)
    throw input_error("address " + format_address(alpha) +
                      " does not start with '" + join(x) + "'");
  EventuallyPeriodic out;
  out.prefix = y;
  // Remaining letters of alpha after the first |x|: rotate the period as
  // needed when x eats into it.
  if (x.size() <= alpha.prefix.size()) {
    out.prefix.insert(out.prefix.end(), alpha.prefix.begin() + x.size(),
                      alpha.prefix.end());
    out.period = alpha.period;
  } else {
    size_t eaten = (x.size() - alpha.prefix.size()) % alpha.period.size();
    Word rot = alpha.period;
    std::rotate(rot.begin(), rot.begin() + eaten, rot.end());
    out.period = rot;
  }
  return out;
}

}  // namespace hrs
