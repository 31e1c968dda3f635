#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "smlab/card_spec.hpp"

namespace smlab {

using Json = nlohmann::ordered_json;

struct TypePoint {
  std::string name;
  bool principal = true;
  bool infinite_realizations = false;
};

/// An omega-indexed family of principal types sharing one fiber schema.
/// Fibers refer to its members as `name[i]` and, for a second distinct
/// member, `name[j]`.
struct SchematicTypeFamily {
  std::string name;
  bool principal = true;
  bool infinite_realizations = false;

  std::string same() const { return name + "[i]"; }
  std::string other() const { return name + "[j]"; }
};

struct Label {
  std::string id;
  std::string src;
  std::string dst;
  Sign sign = Sign::positive;
  CardSpec spec = CardSpec::finite(1);
};

enum class IndexDomain { omega, integers };

/// An antichain of almost deterministic labels indexed by omega or Z,
/// minus an explicit list of excluded indices.
struct LabelFamily {
  std::string id;
  std::string src;
  std::string dst;
  IndexDomain domain = IndexDomain::integers;
  std::vector<std::int64_t> excluded;
  Sign member_sign = Sign::positive;
  CardSpec member_spec = CardSpec::finite(1);
  // member(m) o member(n) = member(m + n); index 0 is the fiber's zero label.
  bool additive = false;

  bool contains(std::int64_t n) const {
    if (domain == IndexDomain::omega && n < 0) return false;
    return std::find(excluded.begin(), excluded.end(), n) == excluded.end();
  }

  std::string member_id(std::int64_t n) const { return id + "[" + std::to_string(n) + "]"; }

  /// Members with |n| <= bound, in ascending index order.
  std::vector<std::int64_t> members_up_to(std::int64_t bound) const {
    std::vector<std::int64_t> out;
    const std::int64_t lo = domain == IndexDomain::omega ? 0 : -bound;
    for (std::int64_t n = lo; n <= bound; ++n)
      if (contains(n)) out.push_back(n);
    return out;
  }
};

/// "label dominates members of family": every member, or a finite list
/// (`only`), or a half-line (`min`/`max`), minus `except`.
struct FamilyDomination {
  std::string label;
  std::string family;
  std::optional<std::vector<std::int64_t>> only;
  std::optional<std::int64_t> min;
  std::optional<std::int64_t> max;
  std::vector<std::int64_t> except;

  bool covers(std::int64_t n) const {
    if (std::find(except.begin(), except.end(), n) != except.end()) return false;
    if (only) return std::find(only->begin(), only->end(), n) != only->end();
    if (min && n < *min) return false;
    if (max && n > *max) return false;
    return true;
  }
};

struct Fiber {
  std::string src;
  std::string dst;
  std::vector<Label> labels;
  std::vector<LabelFamily> families;
  // (lower, upper) pairs, transitively closed, reflexive pairs omitted.
  std::set<std::pair<std::string, std::string>> dominates;
  std::vector<FamilyDomination> family_dominations;
  // Each pair stored once with first < second.
  std::set<std::pair<std::string, std::string>> complements;

  const Label* zero() const {
    for (const auto& l : labels)
      if (l.sign == Sign::zero) return &l;
    return nullptr;
  }
};

struct CompositionEntry {
  std::string left;
  std::string right;
  std::string result;
};

using FiberKey = std::pair<std::string, std::string>;

/// Where a label id lives: an explicit label, or member `index` of a family.
struct LabelRef {
  FiberKey fiber;
  bool is_member = false;
  std::size_t position = 0;  // into labels or families
  std::int64_t index = 0;    // member index
};

class StructureError : public std::runtime_error {
 public:
  explicit StructureError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid label structure:";
    for (const auto& s : v) out += "\n  " + s;
    return out;
  }

  std::vector<std::string> violations_;
};

/// A validated, immutable label structure. Build one with
/// `validate_structure`; the lookup index is only populated there.
struct LabelStructure {
  std::vector<TypePoint> types;
  std::optional<SchematicTypeFamily> schematic;
  std::map<FiberKey, Fiber> fibers;
  std::vector<CompositionEntry> composition;

  std::map<std::string, LabelRef> index;

  bool finite_types() const { return !schematic.has_value(); }

  const TypePoint* type(const std::string& name) const {
    for (const auto& t : types)
      if (t.name == name) return &t;
    return nullptr;
  }

  bool is_schematic_endpoint(const std::string& name) const {
    return schematic && (name == schematic->same() || name == schematic->other());
  }

  bool is_type_name(const std::string& name) const {
    return type(name) != nullptr || is_schematic_endpoint(name);
  }

  bool is_principal(const std::string& name) const {
    if (const auto* t = type(name)) return t->principal;
    return schematic && schematic->principal;
  }

  const Fiber* fiber(const std::string& src, const std::string& dst) const {
    auto it = fibers.find({src, dst});
    return it == fibers.end() ? nullptr : &it->second;
  }

  std::optional<LabelRef> find(const std::string& id) const {
    if (auto it = index.find(id); it != index.end()) {
      if (it->second.is_member) return std::nullopt;  // a family id, not a label
      return it->second;
    }
    // family member `fam[n]`
    auto open = id.rfind('[');
    if (open == std::string::npos || id.back() != ']') return std::nullopt;
    auto it = index.find(id.substr(0, open));
    if (it == index.end() || !it->second.is_member) return std::nullopt;
    std::int64_t n = 0;
    const char* first = id.data() + open + 1;
    const char* last = id.data() + id.size() - 1;
    auto [ptr, ec] = std::from_chars(first, last, n);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    const auto& fam = fibers.at(it->second.fiber).families[it->second.position];
    if (!fam.contains(n)) return std::nullopt;
    LabelRef ref = it->second;
    ref.index = n;
    return ref;
  }

  const Fiber& fiber_of(const LabelRef& ref) const { return fibers.at(ref.fiber); }

  /// The label record for an id; family members are synthesized.
  std::optional<Label> label(const std::string& id) const {
    auto ref = find(id);
    if (!ref) return std::nullopt;
    const auto& f = fiber_of(*ref);
    if (!ref->is_member) return f.labels[ref->position];
    const auto& fam = f.families[ref->position];
    return Label{fam.member_id(ref->index), fam.src, fam.dst, fam.member_sign, fam.member_spec};
  }

  const LabelFamily* family(const std::string& family_id) const {
    auto it = index.find(family_id);
    if (it == index.end() || !it->second.is_member) return nullptr;
    return &fibers.at(it->second.fiber).families[it->second.position];
  }
};

namespace detail {

inline CardSpec spec_from_json(const Json& j) {
  if (j.is_string() && j.get<std::string>() == "infinite_coinfinite") return CardSpec::infinite_coinfinite();
  if (j.is_object() && j.size() == 1) {
    if (j.contains("finite")) return CardSpec::finite(j.at("finite").get<std::uint64_t>());
    if (j.contains("cofinite")) return CardSpec::cofinite(j.at("cofinite").get<std::uint64_t>());
  }
  throw std::invalid_argument("bad spec " + j.dump());
}

inline Json spec_to_json(const CardSpec& s) {
  switch (s.kind()) {
    case CardSpec::Kind::finite: return Json{{"finite", s.count()}};
    case CardSpec::Kind::cofinite: return Json{{"cofinite", s.count()}};
    case CardSpec::Kind::infinite_coinfinite: return "infinite_coinfinite";
  }
  return nullptr;
}

inline std::vector<std::int64_t> int_list(const Json& j) {
  std::vector<std::int64_t> out;
  for (const auto& x : j) out.push_back(x.get<std::int64_t>());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Rebuilds the id lookup table after the fibers were edited in place.
inline void reindex(LabelStructure& s) {
  s.index.clear();
  for (const auto& [key, f] : s.fibers) {
    for (std::size_t i = 0; i < f.labels.size(); ++i) s.index[f.labels[i].id] = LabelRef{key, false, i, 0};
    for (std::size_t i = 0; i < f.families.size(); ++i) s.index[f.families[i].id] = LabelRef{key, true, i, 0};
  }
}

/// Parse and validate a structure document. Throws StructureError listing
/// every violation found; never returns a partially valid structure.
inline LabelStructure validate_structure(const Json& raw) {
  std::vector<std::string> errs;
  LabelStructure s;

  auto fail = [&](std::string msg) { errs.push_back(std::move(msg)); };

  try {
    for (const auto& t : raw.at("types")) {
      TypePoint tp{t.at("name").get<std::string>(), t.value("principal", true),
                   t.value("infinite_realizations", false)};
      if (s.type(tp.name)) fail("duplicate type name '" + tp.name + "'");
      if (!tp.principal && !tp.infinite_realizations)
        fail("non-principal type '" + tp.name + "' must have infinite realizations");
      s.types.push_back(tp);
    }
    if (raw.contains("schematic_type_family") && !raw.at("schematic_type_family").is_null()) {
      const auto& f = raw.at("schematic_type_family");
      s.schematic = SchematicTypeFamily{f.at("name").get<std::string>(), f.value("principal", true),
                                        f.value("infinite_realizations", false)};
      if (s.type(s.schematic->name)) fail("schematic family name clashes with type '" + s.schematic->name + "'");
      if (!s.schematic->principal) fail("schematic type family must be principal");
    }

    std::set<std::string> ids;
    auto claim_id = [&](const std::string& id) {
      if (!ids.insert(id).second) fail("duplicate label id '" + id + "'");
    };

    for (const auto& fj : raw.at("fibers")) {
      Fiber f;
      f.src = fj.at("src").get<std::string>();
      f.dst = fj.at("dst").get<std::string>();
      const std::string where = "fiber " + f.src + "->" + f.dst;
      if (!s.is_type_name(f.src)) fail(where + ": dangling source type '" + f.src + "'");
      if (!s.is_type_name(f.dst)) fail(where + ": dangling target type '" + f.dst + "'");
      if (s.fibers.count({f.src, f.dst})) fail(where + ": duplicate fiber");
      const bool loop = f.src == f.dst;

      for (const auto& lj : fj.value("labels", Json::array())) {
        Label l{lj.at("id").get<std::string>(), f.src, f.dst, sign_from_string(lj.at("sign").get<std::string>()),
                detail::spec_from_json(lj.at("spec"))};
        claim_id(l.id);
        if (l.spec.is_finite() && l.spec.count() == 0)
          fail("label '" + l.id + "': Finite(0) is not a semi-isolating formula");
        if (l.sign == Sign::zero) {
          if (!loop) fail("zero label '" + l.id + "' must have src = dst");
          if (l.spec != CardSpec::finite(1)) fail("zero label '" + l.id + "' must have spec Finite(1), got " + l.spec.str());
          if (f.zero()) fail(where + ": more than one zero label");
        }
        f.labels.push_back(l);
      }

      for (const auto& gj : fj.value("families", Json::array())) {
        LabelFamily fam;
        fam.id = gj.at("id").get<std::string>();
        fam.src = f.src;
        fam.dst = f.dst;
        const auto dom = gj.value("domain", std::string("integers"));
        if (dom == "integers") fam.domain = IndexDomain::integers;
        else if (dom == "omega") fam.domain = IndexDomain::omega;
        else fail("family '" + fam.id + "': unknown index domain '" + dom + "'");
        fam.excluded = detail::int_list(gj.value("exclude", Json::array()));
        fam.member_sign = sign_from_string(gj.value("member_sign", std::string("positive")));
        fam.member_spec = detail::spec_from_json(gj.at("member_spec"));
        fam.additive = gj.value("additive", false);
        if (gj.value("shape", std::string("antichain")) != "antichain")
          fail("family '" + fam.id + "': only antichain families are supported");
        if (!fam.member_spec.is_finite() || fam.member_spec.count() == 0)
          fail("family '" + fam.id + "': members must be Finite(k), k >= 1");
        if (fam.member_sign == Sign::zero) fail("family '" + fam.id + "': members cannot be zero labels");
        if (fam.additive && !loop) fail("family '" + fam.id + "': additive families need src = dst");
        claim_id(fam.id);
        f.families.push_back(fam);
      }

      auto in_fiber = [&](const std::string& id) {
        return std::any_of(f.labels.begin(), f.labels.end(), [&](const Label& l) { return l.id == id; });
      };

      std::set<std::pair<std::string, std::string>> dom;
      for (const auto& pj : fj.value("dominates", Json::array())) {
        auto lo = pj.at(0).get<std::string>(), hi = pj.at(1).get<std::string>();
        if (!in_fiber(lo) || !in_fiber(hi)) {
          fail(where + ": domination pair (" + lo + ", " + hi + ") names a label outside this fiber");
          continue;
        }
        if (lo != hi) dom.insert({lo, hi});
      }
      // transitive closure
      for (bool grew = true; grew;) {
        grew = false;
        for (const auto& [a, b] : std::vector(dom.begin(), dom.end()))
          for (const auto& [c, d] : std::vector(dom.begin(), dom.end()))
            if (b == c && a != d && dom.insert({a, d}).second) grew = true;
      }
      for (const auto& [a, b] : dom)
        if (a < b && dom.count({b, a})) fail(where + ": domination is not antisymmetric on '" + a + "' and '" + b + "'");
      if (const Label* z = f.zero())
        for (const auto& [a, b] : dom)
          if (b == z->id && a != z->id) fail(where + ": label '" + a + "' lies strictly below the zero label");
      f.dominates = std::move(dom);

      for (const auto& dj : fj.value("dominates_family", Json::array())) {
        FamilyDomination d;
        d.label = dj.at("label").get<std::string>();
        d.family = dj.at("family").get<std::string>();
        if (dj.contains("only")) d.only = detail::int_list(dj.at("only"));
        if (dj.contains("min")) d.min = dj.at("min").get<std::int64_t>();
        if (dj.contains("max")) d.max = dj.at("max").get<std::int64_t>();
        d.except = detail::int_list(dj.value("except", Json::array()));
        if (!in_fiber(d.label)) fail(where + ": dominates_family names unknown label '" + d.label + "'");
        if (std::none_of(f.families.begin(), f.families.end(), [&](const auto& g) { return g.id == d.family; }))
          fail(where + ": dominates_family names a family outside this fiber: '" + d.family + "'");
        f.family_dominations.push_back(std::move(d));
      }

      std::set<std::string> paired;
      for (const auto& cj : fj.value("complements", Json::array())) {
        auto a = cj.at(0).get<std::string>(), b = cj.at(1).get<std::string>();
        if (!in_fiber(a) || !in_fiber(b)) {
          fail(where + ": complement pair (" + a + ", " + b + ") crosses fibers or names an unknown label");
          continue;
        }
        if (a == b) {
          fail(where + ": label '" + a + "' cannot be its own complement");
          continue;
        }
        if (!paired.insert(a).second || !paired.insert(b).second)
          fail(where + ": label in more than one complement pair (" + a + ", " + b + ")");
        f.complements.insert(std::minmax(a, b));
      }

      for (const auto& tj : fj.value("compose", Json::array()))
        s.composition.push_back({tj.at(0).get<std::string>(), tj.at(1).get<std::string>(), tj.at(2).get<std::string>()});

      s.fibers.emplace(FiberKey{f.src, f.dst}, std::move(f));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("schema: ") + e.what());
  } catch (const std::invalid_argument& e) {
    fail(std::string("schema: ") + e.what());
  }
  if (!errs.empty()) throw StructureError(errs);

  reindex(s);

  for (const auto& c : s.composition) {
    auto u = s.label(c.left), v = s.label(c.right), w = s.label(c.result);
    const std::string what = "compose(" + c.left + ", " + c.right + ") = " + c.result;
    if (!u || !v || !w) {
      fail(what + ": unknown label");
      continue;
    }
    if (u->dst != v->src) fail(what + ": labels are not composable");
    if (w->src != u->src || w->dst != v->dst) fail(what + ": result lies outside rho(" + u->src + ", " + v->dst + ")");
    if (u->sign == Sign::zero && w->id != v->id) fail(what + ": violates zero o v = v");
    if (v->sign == Sign::zero && w->id != u->id) fail(what + ": violates u o zero = u");
  }
  if (!errs.empty()) throw StructureError(errs);
  return s;
}

inline Json to_json(const LabelStructure& s) {
  Json out;
  out["types"] = Json::array();
  for (const auto& t : s.types)
    out["types"].push_back({{"name", t.name}, {"principal", t.principal}, {"infinite_realizations", t.infinite_realizations}});
  if (s.schematic)
    out["schematic_type_family"] = {{"name", s.schematic->name},
                                    {"principal", s.schematic->principal},
                                    {"infinite_realizations", s.schematic->infinite_realizations}};
  else
    out["schematic_type_family"] = nullptr;
  out["fibers"] = Json::array();
  for (const auto& [key, f] : s.fibers) {
    Json fj;
    fj["src"] = f.src;
    fj["dst"] = f.dst;
    fj["labels"] = Json::array();
    for (const auto& l : f.labels)
      fj["labels"].push_back({{"id", l.id}, {"sign", to_string(l.sign)}, {"spec", detail::spec_to_json(l.spec)}});
    fj["families"] = Json::array();
    for (const auto& g : f.families) {
      Json gj{{"id", g.id},
              {"domain", g.domain == IndexDomain::integers ? "integers" : "omega"},
              {"exclude", g.excluded},
              {"member_sign", to_string(g.member_sign)},
              {"member_spec", detail::spec_to_json(g.member_spec)},
              {"shape", "antichain"}};
      if (g.additive) gj["additive"] = true;
      fj["families"].push_back(gj);
    }
    fj["dominates"] = Json::array();
    for (const auto& [a, b] : f.dominates) fj["dominates"].push_back({a, b});
    fj["dominates_family"] = Json::array();
    for (const auto& d : f.family_dominations) {
      Json dj{{"label", d.label}, {"family", d.family}};
      if (d.only) dj["only"] = *d.only;
      if (d.min) dj["min"] = *d.min;
      if (d.max) dj["max"] = *d.max;
      if (!d.except.empty()) dj["except"] = d.except;
      fj["dominates_family"].push_back(dj);
    }
    fj["complements"] = Json::array();
    for (const auto& [a, b] : f.complements) fj["complements"].push_back({a, b});
    fj["compose"] = Json::array();
    for (const auto& c : s.composition) {
      auto u = s.label(c.left);
      if (u && u->src == f.src && u->dst == f.dst) fj["compose"].push_back({c.left, c.right, c.result});
    }
    out["fibers"].push_back(fj);
  }
  return out;
}

}  // namespace smlab
