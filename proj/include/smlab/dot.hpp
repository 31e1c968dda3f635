#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>

#include "smlab/label_ops.hpp"
#include "smlab/label_structure.hpp"

namespace smlab {

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::string selector_text(const FamilyDomination& d) {
  std::string s;
  auto list = [](const std::vector<std::int64_t>& v) {
    std::string r;
    for (auto n : v) r += (r.empty() ? "" : ",") + std::to_string(n);
    return "{" + r + "}";
  };
  if (d.only) s += "only " + list(*d.only);
  if (d.min) s += (s.empty() ? "" : " ") + std::string("n>=") + std::to_string(*d.min);
  if (d.max) s += (s.empty() ? "" : " ") + std::string("n<=") + std::to_string(*d.max);
  if (!d.except.empty()) s += (s.empty() ? "" : " ") + std::string("except ") + list(d.except);
  return s.empty() ? "all" : s;
}

// Every member `d` selects is also dominated according to `part`.
inline bool selection_within(const FamilyDomination& d, const FamilyPart& part) {
  if (part.kind == FamilyPart::Kind::cofinite) {
    for (auto n : part.indices)
      if (d.covers(n)) return false;
    return true;
  }
  if (part.kind == FamilyPart::Kind::mixed || !d.only) return false;
  for (auto n : *d.only)
    if (d.covers(n) && std::find(part.indices.begin(), part.indices.end(), n) == part.indices.end()) return false;
  return true;
}

}  // namespace detail

/// Hasse diagram of domination: one cluster per fiber, an edge from each
/// label to the labels covering it, dashed undirected edges between
/// complements, and families as double-bordered nodes.
inline std::string to_dot(const LabelStructure& s) {
  using detail::dot_quote;
  std::ostringstream os;
  os << "digraph domination {\n  rankdir=BT;\n  node [shape=box, fontname=\"Helvetica\"];\n";
  int cluster = 0;
  for (const auto& [key, f] : s.fibers) {
    os << "  subgraph cluster_" << cluster++ << " {\n";
    os << "    label=" << dot_quote("rho(" + f.src + ", " + f.dst + ")") << ";\n";
    for (const auto& l : f.labels)
      os << "    " << dot_quote(l.id) << " [label=" << dot_quote(l.id + "\n" + l.spec.str() + " " + to_string(l.sign))
         << "];\n";
    for (const auto& g : f.families)
      os << "    " << dot_quote(g.id) << " [peripheries=2, label="
         << dot_quote(g.id + "[n]\n" + g.member_spec.str() + " " + to_string(g.member_sign)) << "];\n";
    for (const auto& [lo, hi] : f.dominates) {
      bool covered = false;
      for (const auto& l : f.labels)
        if (l.id != lo && l.id != hi && f.dominates.count({lo, l.id}) && f.dominates.count({l.id, hi})) covered = true;
      if (!covered) os << "    " << dot_quote(lo) << " -> " << dot_quote(hi) << ";\n";
    }
    std::map<std::string, DominatedDescriptor> below;
    for (const auto& l : f.labels) below.emplace(l.id, dominated_descriptor(s, l.id));
    for (const auto& d : f.family_dominations) {
      bool implied = false;
      for (const auto& l : f.labels) {
        if (l.id == d.label || !f.dominates.count({l.id, d.label})) continue;
        for (const auto& part : below.at(l.id).families)
          if (part.family == d.family && detail::selection_within(d, part)) implied = true;
      }
      if (implied) continue;
      os << "    " << dot_quote(d.family) << " -> " << dot_quote(d.label)
         << " [label=" << dot_quote(detail::selector_text(d)) << "];\n";
    }
    for (const auto& [a, b] : f.complements)
      os << "    " << dot_quote(a) << " -> " << dot_quote(b) << " [style=dashed, dir=none, constraint=false];\n";
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace smlab
