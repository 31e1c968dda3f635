#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smlab/label_structure.hpp"

namespace smlab {

class UnknownLabel : public std::invalid_argument {
 public:
  explicit UnknownLabel(const std::string& id) : std::invalid_argument("unknown label id '" + id + "'") {}
};

class CompositionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// How much of one family a label dominates.
struct FamilyPart {
  enum class Kind { finite, cofinite, mixed };

  std::string family;
  Kind kind = Kind::finite;
  // finite: the dominated member indices; cofinite: the members NOT dominated.
  std::vector<std::int64_t> indices;
  // mixed: the half-line(s) dominated, for diagnostics.
  std::string note;
};

/// The exact set { v in fiber(u) : v <= u }.
struct DominatedDescriptor {
  std::vector<std::string> explicit_ids;  // sorted
  std::vector<FamilyPart> families;       // one per family of the fiber

  bool is_mixed() const {
    return std::any_of(families.begin(), families.end(), [](const auto& p) { return p.kind == FamilyPart::Kind::mixed; });
  }
  bool is_finite() const {
    return std::all_of(families.begin(), families.end(), [](const auto& p) { return p.kind == FamilyPart::Kind::finite; });
  }
  /// Cofinite within the fiber: only finitely many fiber labels are missed.
  bool is_cofinite() const {
    return std::all_of(families.begin(), families.end(), [](const auto& p) { return p.kind == FamilyPart::Kind::cofinite; });
  }
  bool contains(const std::string& id) const {
    return std::binary_search(explicit_ids.begin(), explicit_ids.end(), id);
  }
};

struct Classification {
  bool in_ufin = false;
  bool in_ucofin = false;
  bool forcing = false;
  bool almost_deterministic = false;

  friend bool operator==(const Classification&, const Classification&) = default;
};

namespace detail {

inline LabelRef require(const LabelStructure& s, const std::string& id) {
  auto ref = s.find(id);
  if (!ref) throw UnknownLabel(id);
  return *ref;
}

// The union of the given family dominations restricted to `fam`, classified
// by looking at members beyond every index mentioned anywhere.
inline FamilyPart classify_family_part(const LabelFamily& fam, const std::vector<const FamilyDomination*>& doms) {
  std::int64_t bound = 1;
  auto widen = [&](std::int64_t n) { bound = std::max(bound, std::abs(n) + 1); };
  for (auto n : fam.excluded) widen(n);
  for (const auto* d : doms) {
    if (d->only)
      for (auto n : *d->only) widen(n);
    if (d->min) widen(*d->min);
    if (d->max) widen(*d->max);
    for (auto n : d->except) widen(n);
  }
  auto covered = [&](std::int64_t n) {
    return std::any_of(doms.begin(), doms.end(), [&](const auto* d) { return d->covers(n); });
  };

  FamilyPart part;
  part.family = fam.id;
  const bool up = covered(bound);
  const bool down = fam.domain == IndexDomain::integers ? covered(-bound) : up;
  if (up && down) {
    part.kind = FamilyPart::Kind::cofinite;
    for (auto n : fam.members_up_to(bound))
      if (!covered(n)) part.indices.push_back(n);
  } else if (!up && !down) {
    part.kind = FamilyPart::Kind::finite;
    for (auto n : fam.members_up_to(bound))
      if (covered(n)) part.indices.push_back(n);
  } else {
    part.kind = FamilyPart::Kind::mixed;
    part.note = up ? "all members with large positive index" : "all members with large negative index";
  }
  return part;
}

}  // namespace detail

inline DominatedDescriptor dominated_descriptor(const LabelStructure& s, const std::string& id) {
  const LabelRef ref = detail::require(s, id);
  const Fiber& f = s.fiber_of(ref);
  DominatedDescriptor out;

  if (ref.is_member) {
    // Family members form an antichain and nothing explicit lies below them.
    out.explicit_ids = {};
    for (const auto& fam : f.families) {
      FamilyPart part{fam.id, FamilyPart::Kind::finite, {}, {}};
      if (&fam == &f.families[ref.position]) part.indices.push_back(ref.index);
      out.families.push_back(part);
    }
    return out;
  }

  out.explicit_ids.push_back(id);
  for (const auto& [lo, hi] : f.dominates)
    if (hi == id) out.explicit_ids.push_back(lo);
  std::sort(out.explicit_ids.begin(), out.explicit_ids.end());

  for (const auto& fam : f.families) {
    std::vector<const FamilyDomination*> doms;
    for (const auto& d : f.family_dominations)
      if (d.family == fam.id && out.contains(d.label)) doms.push_back(&d);
    out.families.push_back(detail::classify_family_part(fam, doms));
  }
  return out;
}

inline Classification classify_label(const LabelStructure& s, const std::string& id) {
  const auto desc = dominated_descriptor(s, id);
  const auto label = *s.label(id);
  Classification c;
  c.in_ufin = desc.is_finite();
  c.in_ucofin = desc.is_cofinite();
  c.almost_deterministic = label.spec.is_finite();
  c.forcing = !label.spec.is_finite() || !desc.is_finite();
  return c;
}

inline std::optional<std::string> complement_of(const LabelStructure& s, const std::string& id) {
  const LabelRef ref = detail::require(s, id);
  if (ref.is_member) return std::nullopt;
  for (const auto& [a, b] : s.fiber_of(ref).complements) {
    if (a == id) return b;
    if (b == id) return a;
  }
  return std::nullopt;
}

/// u <= v within one fiber (reflexive).
inline bool dominated_by(const LabelStructure& s, const std::string& lower, const std::string& upper) {
  if (lower == upper) return true;
  auto lo = s.find(lower);
  if (!lo) throw UnknownLabel(lower);
  auto hi = s.find(upper);
  if (!hi) throw UnknownLabel(upper);
  if (lo->fiber != hi->fiber || hi->is_member) return false;
  const Fiber& f = s.fiber_of(*lo);
  if (!lo->is_member) return f.dominates.count({lower, upper}) > 0;
  const auto& fam = f.families[lo->position];
  for (const auto& d : f.family_dominations) {
    if (d.family != fam.id || !d.covers(lo->index)) continue;
    if (d.label == upper || f.dominates.count({d.label, upper})) return true;
  }
  return false;
}

/// Composition that is fixed by the structure itself: identity laws, the
/// recorded table, and additive families. No default is applied.
inline std::optional<std::string> recorded_composition(const LabelStructure& s, const std::string& left,
                                                       const std::string& right) {
  const auto u = s.label(left);
  if (!u) throw UnknownLabel(left);
  const auto v = s.label(right);
  if (!v) throw UnknownLabel(right);
  if (u->dst != v->src)
    throw CompositionError("labels '" + left + "' and '" + right + "' are not composable");
  if (u->sign == Sign::zero) return right;
  if (v->sign == Sign::zero) return left;
  for (const auto& c : s.composition)
    if (c.left == left && c.right == right) return c.result;

  const auto ru = *s.find(left), rv = *s.find(right);
  if (ru.is_member && rv.is_member && ru.fiber == rv.fiber && ru.position == rv.position) {
    const Fiber& f = s.fiber_of(ru);
    const auto& fam = f.families[ru.position];
    if (fam.additive) {
      const std::int64_t n = ru.index + rv.index;
      if (n == 0 && f.zero()) return f.zero()->id;
      if (fam.contains(n)) return fam.member_id(n);
    }
  }
  return std::nullopt;
}

/// Composition with the default closure rule when nothing is recorded:
/// Finite o Finite gives the <=-least Finite label of the target fiber;
/// anything else gives the target fiber's <=-maximum when it has one, then
/// the <=-least non-Finite label. Ties go to the smallest id.
inline std::string compose(const LabelStructure& s, const std::string& left, const std::string& right) {
  if (auto r = recorded_composition(s, left, right)) return *r;
  const auto u = *s.label(left), v = *s.label(right);
  const Fiber* target = s.fiber(u.src, v.dst);
  if (!target || target->labels.empty())
    throw CompositionError("compose(" + left + ", " + right + "): empty target fiber rho(" + u.src + ", " + v.dst + ")");

  auto least = [&](auto pred) -> std::optional<std::string> {
    std::vector<std::string> pool;
    for (const auto& l : target->labels)
      if (pred(l)) pool.push_back(l.id);
    std::sort(pool.begin(), pool.end());
    for (const auto& id : pool) {
      bool minimal = std::none_of(pool.begin(), pool.end(),
                                  [&](const std::string& o) { return o != id && target->dominates.count({o, id}); });
      if (minimal) return id;
    }
    return std::nullopt;
  };

  if (u.spec.is_finite() && v.spec.is_finite()) {
    if (auto w = least([](const Label& l) { return l.spec.is_finite(); })) return *w;
    throw CompositionError("compose(" + left + ", " + right + "): no Finite label in rho(" + u.src + ", " + v.dst + ")");
  }

  std::vector<std::string> ids;
  for (const auto& l : target->labels) ids.push_back(l.id);
  std::sort(ids.begin(), ids.end());
  for (const auto& id : ids) {
    auto d = dominated_descriptor(s, id);
    bool covers_all = d.explicit_ids.size() == target->labels.size() &&
                      std::all_of(d.families.begin(), d.families.end(), [](const FamilyPart& p) {
                        return p.kind == FamilyPart::Kind::cofinite && p.indices.empty();
                      });
    if (covers_all) return id;
  }
  if (auto w = least([](const Label& l) { return !l.spec.is_finite(); })) return *w;
  return *least([](const Label&) { return true; });
}

/// Replace every family by its members with |index| <= bound as explicit
/// labels, carrying domination over. Composition entries naming dropped
/// members are discarded.
inline LabelStructure materialize(const LabelStructure& s, std::int64_t bound) {
  LabelStructure out = s;
  for (auto& [key, f] : out.fibers) {
    const Fiber& orig = s.fibers.at(key);
    for (const auto& fam : orig.families) {
      for (auto n : fam.members_up_to(bound)) {
        const std::string mid = fam.member_id(n);
        f.labels.push_back(Label{mid, fam.src, fam.dst, fam.member_sign, fam.member_spec});
        for (const auto& l : orig.labels)
          if (dominated_by(s, mid, l.id)) f.dominates.insert({mid, l.id});
      }
    }
    f.families.clear();
    f.family_dominations.clear();
  }
  reindex(out);
  std::vector<CompositionEntry> kept;
  for (const auto& c : s.composition)
    if (out.find(c.left) && out.find(c.right) && out.find(c.result)) kept.push_back(c);
  out.composition = std::move(kept);
  return out;
}

}  // namespace smlab
