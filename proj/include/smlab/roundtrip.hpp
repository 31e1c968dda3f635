#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "smlab/builder.hpp"
#include "smlab/iso.hpp"
#include "smlab/label_ops.hpp"

namespace smlab {

struct RoundtripReport {
  bool ok = false;
  std::vector<std::string> lines;     // what was recovered
  std::vector<std::string> problems;  // why it does not match
  LabelStructure recovered;
};

namespace detail {

// Solution sets S_u(a) of one stage, as sorted element lists.
class StageView {
 public:
  explicit StageView(const Approximation& ap) : ap_(ap) {
    for (const auto& [name, pairs] : ap.structure.relations) {
      auto& out = rel_[name];
      out.resize(ap.structure.size);
      for (const auto& [a, b] : pairs) out[a].push_back(b);
    }
  }

  const std::vector<int>& solutions(const std::string& rel, int a) const { return rel_.at(rel)[a]; }
  std::size_t size() const { return ap_.structure.size; }
  const std::string& type_of(int a) const { return ap_.type_of[a]; }

 private:
  const Approximation& ap_;
  std::map<std::string, std::vector<std::vector<int>>> rel_;
};

class Recovery {
 public:
  Recovery(const LabelStructure& s, const BuildResult& built, int stages)
      : s_(s), chain_(built.chain), stages_(stages), param_stage_((stages + 1) / 2) {
    for (const auto& ap : chain_) views_.emplace_back(ap);
  }

  RoundtripReport run() {
    RoundtripReport r;
    if (stages_ < 2) {
      r.problems.push_back("at least two stages are needed to tell Finite from Cofinite counts");
      return r;
    }
    recover_types(r);
    for (const auto& [name, pairs] : chain_.back().structure.relations) recover_label(name, r);
    recover_order(r);
    reindex(r.recovered);

    auto expected = materialize(s_, member_bound(s_, stages_));
    for (auto it = expected.fibers.begin(); it != expected.fibers.end();)
      it = it->second.labels.empty() ? expected.fibers.erase(it) : std::next(it);
    reindex(expected);
    compare_by_id(expected, r);
    const bool iso = iso_check(r.recovered, expected);
    r.lines.push_back(std::string("isomorphic to the materialized input: ") + (iso ? "yes" : "no"));
    if (!iso) r.problems.push_back("recovered structure is not isomorphic to the materialized input");
    r.ok = r.problems.empty();
    return r;
  }

 private:
  const Approximation& last() const { return chain_.back(); }
  const StageView& last_view() const { return views_.back(); }

  std::vector<int> params(const std::string& type) const {
    std::vector<int> out;
    const auto& ap = last();
    for (std::size_t a = 0; a < ap.structure.size; ++a)
      if (ap.type_of[a] == type && ap.born[a] <= param_stage_) out.push_back(static_cast<int>(a));
    return out;
  }

  void recover_types(RoundtripReport& r) {
    const std::string prefix = type_mark("");
    const auto& mid = chain_[param_stage_].structure;
    for (const auto& [mark, elems] : last().structure.marks) {
      if (mark.rfind(prefix, 0) != 0) continue;
      const std::string name = mark.substr(prefix.size());
      const auto before = mid.marks.count(mark) ? mid.marks.at(mark).size() : 0;
      const bool infinite = elems.size() > before;
      r.recovered.types.push_back({name, true, infinite});
      r.lines.push_back("type " + name + ": " + std::to_string(elems.size()) + " element(s), " +
                        (infinite ? "growing" : "stable"));
    }
  }

  void recover_label(const std::string& id, RoundtripReport& r) {
    const auto& pairs = last().structure.relations.at(id);
    if (pairs.empty()) {
      r.problems.push_back(id + ": no instances in the final stage");
      return;
    }
    std::set<std::string> srcs, dsts;
    for (const auto& [a, b] : pairs) srcs.insert(last().type_of[a]), dsts.insert(last().type_of[b]);
    if (srcs.size() != 1 || dsts.size() != 1) {
      r.problems.push_back(id + ": instances span several fibers");
      return;
    }
    const std::string src = *srcs.begin(), dst = *dsts.begin();

    bool stable = true, growing = true;
    std::set<std::size_t> finals, cofinals;
    bool observed_growth = false, all_zero = true;
    for (int a : params(src)) {
      const int from = last().born[a] + 2;
      std::vector<std::size_t> counts, missed;
      for (int t = from; t <= stages_; ++t) {
        counts.push_back(views_[t].solutions(id, a).size());
        missed.push_back(views_[t].size() - counts.back());
      }
      if (counts.empty()) continue;
      for (std::size_t i = 1; i < counts.size(); ++i) {
        if (counts[i] != counts[0]) stable = false;
        if (counts[i] <= counts[i - 1] || missed[i] != missed[0]) growing = false;
      }
      if (counts.size() > 1) observed_growth = true;
      finals.insert(counts.back());
      cofinals.insert(missed.back());
      const auto& sol = last_view().solutions(id, a);
      if (!(sol.size() == 1 && sol[0] == a)) all_zero = false;
    }

    std::optional<CardSpec> spec;
    if (finals.empty() || !observed_growth) {
      r.problems.push_back(id + ": no parameter observed long enough");
      return;
    }
    if (stable && finals.size() == 1) spec = CardSpec::finite(*finals.begin());
    else if (growing && cofinals.size() == 1) spec = CardSpec::cofinite(*cofinals.begin());

    const auto declared = s_.label(id);
    if (!spec) {
      if (declared && declared->spec.is_finite())
        r.problems.push_back(id + ": builder bug, Finite count did not stabilize");
      else
        r.problems.push_back(id + ": count neither stabilizes nor grows with fixed exceptions");
      return;
    }
    const Sign sign = all_zero ? Sign::zero : Sign::positive;
    auto& f = fiber(r.recovered, src, dst);
    f.labels.push_back({id, src, dst, sign, *spec});
    r.lines.push_back("label " + id + ": " + spec->str() + " " + to_string(sign));
  }

  static Fiber& fiber(LabelStructure& s, const std::string& src, const std::string& dst) {
    auto [it, fresh] = s.fibers.try_emplace({src, dst});
    if (fresh) it->second.src = src, it->second.dst = dst;
    return it->second;
  }

  bool explicit_in_input(const std::string& id) const {
    auto ref = s_.find(id);
    return ref && !ref->is_member;
  }

  // Domination is solution-set inclusion for every parameter; complements
  // partition the target type for every parameter.
  void recover_order(RoundtripReport& r) {
    for (auto& [key, f] : r.recovered.fibers) {
      const auto ps = params(f.src);
      std::vector<int> target;
      for (std::size_t b = 0; b < last().structure.size; ++b)
        if (last().type_of[b] == f.dst) target.push_back(static_cast<int>(b));
      for (const auto& lo : f.labels)
        for (const auto& hi : f.labels) {
          if (lo.id == hi.id) continue;
          const bool below = std::all_of(ps.begin(), ps.end(), [&](int a) {
            const auto& x = last_view().solutions(lo.id, a);
            const auto& y = last_view().solutions(hi.id, a);
            return std::includes(y.begin(), y.end(), x.begin(), x.end());
          });
          if (below) f.dominates.insert({lo.id, hi.id});
          if (lo.id >= hi.id || !explicit_in_input(lo.id) || !explicit_in_input(hi.id)) continue;
          const bool partition = std::all_of(ps.begin(), ps.end(), [&](int a) {
            std::vector<int> both;
            const auto& x = last_view().solutions(lo.id, a);
            const auto& y = last_view().solutions(hi.id, a);
            std::merge(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(both));
            return both == target;
          });
          if (partition) f.complements.insert({lo.id, hi.id});
        }
      r.lines.push_back("rho(" + f.src + ", " + f.dst + "): " + std::to_string(f.dominates.size()) + " domination pair(s), " +
                        std::to_string(f.complements.size()) + " complement pair(s)");
    }
  }

  void compare_by_id(const LabelStructure& expected, RoundtripReport& r) const {
    for (const auto& [key, f] : expected.fibers) {
      const Fiber* g = r.recovered.fiber(f.src, f.dst);
      for (const auto& l : f.labels) {
        auto got = r.recovered.label(l.id);
        if (!got) {
          r.problems.push_back(l.id + ": not recovered");
          continue;
        }
        if (got->spec != l.spec || got->sign != l.sign)
          r.problems.push_back(l.id + ": expected " + l.spec.str() + " " + to_string(l.sign) + ", recovered " +
                               got->spec.str() + " " + to_string(got->sign));
      }
      if (!g) continue;
      for (const auto& p : f.dominates)
        if (!g->dominates.count(p)) r.problems.push_back("domination " + p.first + " <= " + p.second + " not recovered");
      for (const auto& p : g->dominates)
        if (!f.dominates.count(p)) r.problems.push_back("spurious domination " + p.first + " <= " + p.second);
      if (f.complements != g->complements) r.problems.push_back("complements differ in rho(" + f.src + ", " + f.dst + ")");
    }
  }

  const LabelStructure& s_;
  const std::vector<Approximation>& chain_;
  int stages_;
  int param_stage_;
  std::vector<StageView> views_;
};

}  // namespace detail

/// Re-extracts a label structure from an already built chain and compares it
/// with the input's materialized fragment.
inline RoundtripReport verify_roundtrip(const LabelStructure& s, const BuildResult& built, int stages) {
  return detail::Recovery(s, built, stages).run();
}

/// Builds `stages` stages and re-extracts.
inline RoundtripReport verify_roundtrip(const LabelStructure& s, int stages) {
  const auto built = build_approximation(s, stages);
  return verify_roundtrip(s, built, stages);
}

}  // namespace smlab
