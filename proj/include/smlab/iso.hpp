#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "smlab/label_structure.hpp"

namespace smlab {

namespace detail {

struct ColoredDigraph {
  std::vector<std::string> color;
  std::vector<std::tuple<int, int, std::string>> edges;
};

inline std::string list_str(const std::vector<std::int64_t>& v) {
  std::string s;
  for (auto n : v) s += std::to_string(n) + ",";
  return s;
}

// Vertices: types, schematic endpoints, labels, families. Edges carry the
// endpoint, domination, complement and family-domination relations.
inline ColoredDigraph encode(const LabelStructure& s) {
  ColoredDigraph g;
  std::map<std::string, int> vid;
  auto add = [&](const std::string& key, std::string color) {
    vid[key] = static_cast<int>(g.color.size());
    g.color.push_back(std::move(color));
  };
  auto flags = [](bool principal, bool infinite) {
    return std::string(principal ? "P" : "N") + (infinite ? "I" : "F");
  };
  for (const auto& t : s.types) add("type:" + t.name, "T" + flags(t.principal, t.infinite_realizations));
  if (s.schematic) {
    const auto f = flags(s.schematic->principal, s.schematic->infinite_realizations);
    add("type:" + s.schematic->same(), "Si" + f);
    add("type:" + s.schematic->other(), "Sj" + f);
  }
  for (const auto& [key, f] : s.fibers) {
    for (const auto& l : f.labels) {
      add("label:" + l.id, "L" + l.spec.str() + to_string(l.sign));
      g.edges.emplace_back(vid["label:" + l.id], vid["type:" + f.src], "src");
      g.edges.emplace_back(vid["label:" + l.id], vid["type:" + f.dst], "dst");
    }
    for (const auto& fam : f.families) {
      add("family:" + fam.id, "F" + std::string(fam.domain == IndexDomain::integers ? "Z" : "w") + list_str(fam.excluded) +
                                  fam.member_spec.str() + to_string(fam.member_sign) + (fam.additive ? "+" : ""));
      g.edges.emplace_back(vid["family:" + fam.id], vid["type:" + f.src], "src");
      g.edges.emplace_back(vid["family:" + fam.id], vid["type:" + f.dst], "dst");
    }
    for (const auto& [lo, hi] : f.dominates) g.edges.emplace_back(vid["label:" + lo], vid["label:" + hi], "dom");
    for (const auto& [a, b] : f.complements) {
      g.edges.emplace_back(vid["label:" + a], vid["label:" + b], "comp");
      g.edges.emplace_back(vid["label:" + b], vid["label:" + a], "comp");
    }
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> selectors;
    for (const auto& d : f.family_dominations) {
      std::string sel = d.only ? "only" + list_str(*d.only) : "";
      if (d.min) sel += "min" + std::to_string(*d.min);
      if (d.max) sel += "max" + std::to_string(*d.max);
      sel += "except" + list_str(d.except);
      selectors[{d.label, d.family}].push_back(sel);
    }
    for (auto& [k, v] : selectors) {
      std::sort(v.begin(), v.end());
      std::string c = "fd";
      for (const auto& x : v) c += "|" + x;
      g.edges.emplace_back(vid["label:" + k.first], vid["family:" + k.second], c);
    }
  }
  return g;
}

class IsoSearch {
 public:
  IsoSearch(const ColoredDigraph& a, const ColoredDigraph& b) : a_(a), b_(b) {
    std::map<std::string, int> dict;
    for (const auto* g : {&a, &b})
      for (const auto& c : g->color) dict.emplace(c, 0);
    int next = 0;
    for (auto& [k, v] : dict) v = next++;
    for (const auto& c : a.color) ca_.push_back(dict[c]);
    for (const auto& c : b.color) cb_.push_back(dict[c]);
    std::map<std::string, int> edict;
    for (const auto* g : {&a, &b})
      for (const auto& [x, y, c] : g->edges) edict.emplace(c, 0);
    next = 0;
    for (auto& [k, v] : edict) v = next++;
    adj_a_ = adjacency(a, edict);
    adj_b_ = adjacency(b, edict);
    for (const auto& [x, y, c] : a.edges) ea_.insert({x, y, edict[c]});
    for (const auto& [x, y, c] : b.edges) eb_.insert({x, y, edict[c]});
  }

  bool run() {
    if (ca_.size() != cb_.size() || ea_.size() != eb_.size()) return false;
    return search(ca_, cb_);
  }

 private:
  using Adj = std::vector<std::vector<std::pair<int, int>>>;  // (edge color * 2 + dir, neighbour)

  static Adj adjacency(const ColoredDigraph& g, std::map<std::string, int>& edict) {
    Adj adj(g.color.size());
    for (const auto& [x, y, c] : g.edges) {
      adj[x].push_back({edict[c] * 2, y});
      adj[y].push_back({edict[c] * 2 + 1, x});
    }
    return adj;
  }

  // Refine both colourings jointly until the number of classes is stable.
  void refine(std::vector<int>& ca, std::vector<int>& cb) const {
    for (;;) {
      std::map<std::pair<int, std::vector<std::pair<int, int>>>, int> sigs;
      auto signature = [](const Adj& adj, const std::vector<int>& c, int v) {
        std::vector<std::pair<int, int>> nb;
        for (const auto& [e, w] : adj[v]) nb.push_back({e, c[w]});
        std::sort(nb.begin(), nb.end());
        return std::make_pair(c[v], nb);
      };
      std::vector<std::pair<int, std::vector<std::pair<int, int>>>> sa, sb;
      for (int v = 0; v < static_cast<int>(ca.size()); ++v) sa.push_back(signature(adj_a_, ca, v));
      for (int v = 0; v < static_cast<int>(cb.size()); ++v) sb.push_back(signature(adj_b_, cb, v));
      for (const auto& x : sa) sigs.emplace(x, 0);
      for (const auto& x : sb) sigs.emplace(x, 0);
      int next = 0;
      for (auto& [k, v] : sigs) v = next++;
      const auto before = std::set<int>(ca.begin(), ca.end()).size() + std::set<int>(cb.begin(), cb.end()).size();
      for (std::size_t v = 0; v < ca.size(); ++v) ca[v] = sigs[sa[v]];
      for (std::size_t v = 0; v < cb.size(); ++v) cb[v] = sigs[sb[v]];
      const auto after = std::set<int>(ca.begin(), ca.end()).size() + std::set<int>(cb.begin(), cb.end()).size();
      if (after == before) return;
    }
  }

  static std::map<int, int> histogram(const std::vector<int>& c) {
    std::map<int, int> h;
    for (int x : c) ++h[x];
    return h;
  }

  bool search(std::vector<int> ca, std::vector<int> cb) const {
    refine(ca, cb);
    const auto ha = histogram(ca);
    if (ha != histogram(cb)) return false;

    int pick_color = -1, best = 0;
    for (const auto& [c, n] : ha)
      if (n > 1 && (pick_color < 0 || n < best)) pick_color = c, best = n;

    if (pick_color < 0) {
      std::map<int, int> where_b;
      for (int v = 0; v < static_cast<int>(cb.size()); ++v) where_b[cb[v]] = v;
      std::vector<int> map(ca.size());
      for (int v = 0; v < static_cast<int>(ca.size()); ++v) map[v] = where_b[ca[v]];
      for (const auto& [x, y, c] : ea_)
        if (!eb_.count({map[x], map[y], c})) return false;
      return true;
    }

    const int fresh = std::max(*std::max_element(ca.begin(), ca.end()), *std::max_element(cb.begin(), cb.end())) + 1;
    const int x = static_cast<int>(std::find(ca.begin(), ca.end(), pick_color) - ca.begin());
    for (int y = 0; y < static_cast<int>(cb.size()); ++y) {
      if (cb[y] != pick_color) continue;
      auto na = ca, nb = cb;
      na[x] = fresh;
      nb[y] = fresh;
      if (search(std::move(na), std::move(nb))) return true;
    }
    return false;
  }

  const ColoredDigraph& a_;
  const ColoredDigraph& b_;
  std::vector<int> ca_, cb_;
  Adj adj_a_, adj_b_;
  std::set<std::tuple<int, int, int>> ea_, eb_;
};

}  // namespace detail

/// True iff the structures agree up to renaming of types, labels and
/// families. The composition table is not compared.
inline bool iso_check(const LabelStructure& a, const LabelStructure& b) {
  const auto ga = detail::encode(a);
  const auto gb = detail::encode(b);
  return detail::IsoSearch(ga, gb).run();
}

}  // namespace smlab
