#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "smlab/label_ops.hpp"
#include "smlab/label_structure.hpp"

namespace smlab {

struct Witness {
  std::string id;
  std::string reason;
};

struct ConditionResult {
  char condition = 'a';
  bool holds = true;
  std::vector<Witness> witnesses;
};

/// Outcome of checking a structure against the characterization of label
/// structures representable by strongly minimal theories.
///
/// `overall` holds iff the structure is well formed for strong minimality
/// and all five conditions hold. Every failing condition carries at least
/// one witness; passing ones carry none. `notes` are informational only.
struct Verdict {
  bool overall = false;
  std::optional<std::string> r0;
  bool wellformed_sm = true;
  std::vector<std::string> wellformed_reasons;
  std::vector<ConditionResult> conditions;
  std::vector<std::string> notes;

  const ConditionResult& condition(char c) const { return conditions.at(static_cast<std::size_t>(c - 'a')); }
};

namespace detail {

struct CheckContext {
  const LabelStructure& s;
  std::optional<std::string> r0;

  bool is_r0(const std::string& t) const { return r0 && *r0 == t; }
};

// Labels and family members of a fiber, as (id, sign, spec) triples.
struct FiberEntry {
  std::string id;
  Sign sign;
  CardSpec spec;
  bool member;
};

inline std::vector<FiberEntry> entries(const Fiber& f) {
  std::vector<FiberEntry> out;
  for (const auto& l : f.labels) out.push_back({l.id, l.sign, l.spec, false});
  for (const auto& g : f.families) out.push_back({g.id, g.member_sign, g.member_spec, true});
  return out;
}

inline std::string fiber_name(const Fiber& f) { return "rho(" + f.src + ", " + f.dst + ")"; }

inline void check_wellformed(const CheckContext& cx, Verdict& v) {
  for (const auto& [key, f] : cx.s.fibers)
    for (const auto& l : f.labels) {
      if (l.spec.is_infinite_coinfinite())
        v.wellformed_reasons.push_back(l.id + ": solution set is neither finite nor cofinite");
      if (l.sign == Sign::zero && l.spec != CardSpec::finite(1))
        v.wellformed_reasons.push_back(l.id + ": zero label must be Finite(1)");
    }
  v.wellformed_sm = v.wellformed_reasons.empty();
}

inline ConditionResult check_a(const CheckContext& cx) {
  ConditionResult r{'a', true, {}};
  for (const auto& [key, f] : cx.s.fibers)
    for (const auto& l : f.labels) {
      const auto d = dominated_descriptor(cx.s, l.id);
      if (!d.is_mixed()) continue;
      for (const auto& p : d.families)
        if (p.kind == FamilyPart::Kind::mixed)
          r.witnesses.push_back({l.id, "dominates an infinite, co-infinite part of family " + p.family + " (" + p.note + ")"});
    }
  return r;
}

inline ConditionResult check_b(const CheckContext& cx) {
  ConditionResult r{'b', true, {}};
  std::vector<std::string> infinite;
  for (const auto& t : cx.s.types)
    if (t.infinite_realizations) infinite.push_back(t.name);
  if (cx.s.schematic && cx.s.schematic->infinite_realizations) infinite.push_back(cx.s.schematic->name + "[*]");
  if (infinite.empty()) r.witnesses.push_back({"-", "no type has infinitely many realizations"});
  if (infinite.size() > 1)
    for (const auto& t : infinite) r.witnesses.push_back({t, "more than one type has infinitely many realizations"});

  for (const auto& [key, f] : cx.s.fibers) {
    if (cx.is_r0(f.dst)) continue;
    for (const auto& g : f.families)
      r.witnesses.push_back({g.id, "infinite family in " + fiber_name(f) + " whose target is not r0"});
    for (const auto& l : f.labels)
      if (!l.spec.is_finite())
        r.witnesses.push_back({l.id, "label into non-r0 type " + f.dst + " is not almost deterministic (" + l.spec.str() + ")"});
  }
  return r;
}

inline ConditionResult check_c(const CheckContext& cx, std::vector<std::string>& notes) {
  ConditionResult r{'c', true, {}};
  if (!cx.s.finite_types()) return r;
  for (const auto& t : cx.s.types)
    if (!t.principal) r.witnesses.push_back({t.name, "type is not principal although R is finite"});
  for (const auto& [key, f] : cx.s.fibers) {
    for (const auto& e : entries(f))
      if (e.sign == Sign::negative) r.witnesses.push_back({e.id, "non-zero label is not positive"});
    if (!cx.is_r0(f.dst)) continue;
    for (const auto& [a, b] : f.complements) {
      const auto la = *cx.s.label(a), lb = *cx.s.label(b);
      const int finite = int(la.spec.is_finite()) + int(lb.spec.is_finite());
      const std::string pair = "(" + a + ", " + b + ")";
      if (finite != 1) {
        r.witnesses.push_back({a, "complement pair " + pair + " has " + std::to_string(finite) +
                                      " almost deterministic members, expected exactly one"});
        continue;
      }
      const auto& other = la.spec.is_finite() ? lb : la;
      if (!other.spec.is_cofinite())
        r.witnesses.push_back({other.id, "complement pair " + pair + ": partner of the almost deterministic label is " +
                                             other.spec.str() + ", not cofinite"});
      else if (!classify_label(cx.s, other.id).in_ucofin)
        r.witnesses.push_back({other.id, "complement pair " + pair + ": cofinite partner is not in U_cofin"});
    }
    for (const auto& l : f.labels)
      if (!complement_of(cx.s, l.id)) notes.push_back(l.id + ": label into r0 has no recorded complement");
  }
  return r;
}

inline ConditionResult check_d(const CheckContext& cx) {
  ConditionResult r{'d', true, {}};
  if (cx.s.finite_types()) return r;
  if (!cx.r0) {
    r.witnesses.push_back({"-", "R is infinite but no distinguished type r0 exists"});
    return r;
  }
  for (const auto& t : cx.s.types) {
    if (t.name == *cx.r0 && t.principal) r.witnesses.push_back({t.name, "r0 must be the non-principal type when R is infinite"});
    if (t.name != *cx.r0 && !t.principal) r.witnesses.push_back({t.name, "a second non-principal type besides r0"});
  }
  for (const auto& [key, f] : cx.s.fibers) {
    const bool from_r0 = cx.is_r0(f.src), to_r0 = cx.is_r0(f.dst);
    const auto all = entries(f);
    if (!from_r0 && to_r0) {
      for (const auto& e : all)
        r.witnesses.push_back({e.id, "principal type " + f.src + " semi-isolates realizations of r0 in " + fiber_name(f)});
      continue;
    }
    if (from_r0 && !to_r0) {
      for (const auto& e : all)
        if (e.sign != Sign::negative) r.witnesses.push_back({e.id, "label linking r0 to principal " + f.dst + " is not negative"});
      continue;
    }
    for (const auto& e : all)
      if (e.sign == Sign::negative) r.witnesses.push_back({e.id, "negative label inside " + fiber_name(f)});
    if (!(from_r0 && to_r0)) continue;
    for (const auto& l : f.labels) {
      if (!l.spec.is_finite()) r.witnesses.push_back({l.id, "label in rho(r0, r0) is not almost deterministic (" + l.spec.str() + ")"});
      if (auto c = complement_of(cx.s, l.id)) r.witnesses.push_back({l.id, "label in rho(r0, r0) has complement " + *c});
      const auto k = classify_label(cx.s, l.id);
      if (f.families.empty() && k.in_ufin != k.in_ucofin)
        r.witnesses.push_back({l.id, "rho(r0, r0) is finite but U_fin and U_cofin disagree on this label"});
      if (!f.families.empty() && k.in_ucofin)
        r.witnesses.push_back({l.id, "rho(r0, r0) is infinite but this label is in U_cofin"});
    }
  }
  return r;
}

inline ConditionResult check_e(const CheckContext& cx) {
  ConditionResult r{'e', true, {}};
  const bool r0_principal = cx.r0 && cx.s.is_principal(*cx.r0);
  for (const auto& [key, f] : cx.s.fibers)
    for (const auto& l : f.labels) {
      if (!classify_label(cx.s, l.id).forcing) continue;
      if (!cx.is_r0(f.dst)) r.witnesses.push_back({l.id, "forcing label outside every fiber rho(p, r0)"});
      else if (!cx.s.finite_types()) r.witnesses.push_back({l.id, "forcing label although R is infinite"});
      else if (!r0_principal) r.witnesses.push_back({l.id, "forcing label although r0 is not principal"});
    }
  return r;
}

}  // namespace detail

/// Evaluates well-formedness and all five conditions; never short-circuits.
inline Verdict check_conditions(const LabelStructure& s) {
  Verdict v;
  std::vector<std::string> infinite;
  for (const auto& t : s.types)
    if (t.infinite_realizations) infinite.push_back(t.name);
  if (infinite.size() == 1 && !(s.schematic && s.schematic->infinite_realizations)) v.r0 = infinite.front();

  const detail::CheckContext cx{s, v.r0};
  detail::check_wellformed(cx, v);
  v.conditions.push_back(detail::check_a(cx));
  v.conditions.push_back(detail::check_b(cx));
  v.conditions.push_back(detail::check_c(cx, v.notes));
  v.conditions.push_back(detail::check_d(cx));
  v.conditions.push_back(detail::check_e(cx));
  v.overall = v.wellformed_sm;
  for (auto& c : v.conditions) {
    c.holds = c.witnesses.empty();
    v.overall = v.overall && c.holds;
  }
  return v;
}

inline Json to_json(const Verdict& v) {
  Json out;
  out["overall"] = v.overall;
  out["r0"] = v.r0 ? Json(*v.r0) : Json(nullptr);
  out["wellformed_sm"] = {{"holds", v.wellformed_sm}, {"reasons", v.wellformed_reasons}};
  out["conditions"] = Json::array();
  for (const auto& c : v.conditions) {
    Json cj{{"condition", std::string(1, c.condition)}, {"holds", c.holds}, {"witnesses", Json::array()}};
    for (const auto& w : c.witnesses) cj["witnesses"].push_back({{"id", w.id}, {"reason", w.reason}});
    out["conditions"].push_back(cj);
  }
  out["notes"] = v.notes;
  return out;
}

/// One line per condition: `PASS`/`FAIL` followed by witnesses.
inline std::string text_report(const Verdict& v) {
  std::ostringstream os;
  os << "wellformed " << (v.wellformed_sm ? "PASS" : "FAIL");
  for (const auto& r : v.wellformed_reasons) os << "  [" << r << "]";
  os << "\n";
  for (const auto& c : v.conditions) {
    os << "(" << c.condition << ")        " << (c.holds ? "PASS" : "FAIL");
    for (const auto& w : c.witnesses) os << "  [" << w.id << ": " << w.reason << "]";
    os << "\n";
  }
  for (const auto& n : v.notes) os << "note: " << n << "\n";
  os << "overall    " << (v.overall ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace smlab
