#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "smlab/card_spec.hpp"
#include "smlab/label_structure.hpp"

namespace smlab {

// ---------------------------------------------------------------------------
// Normal-form formulas theta(x, y)

/// Pure set with constants: a disjunction of the cells `y = x`, `y = c`
/// (one per listed constant) and `rest` (y differs from x and from every
/// constant in the cell universe).
struct PureSetFormula {
  bool x = false;
  std::set<std::string> constants;
  bool rest = false;

  friend auto operator<=>(const PureSetFormula&, const PureSetFormula&) = default;
};

/// Successor structure: `y in { s^n(x) : n in offsets }`, or its negation.
struct OffsetFormula {
  bool negated = false;
  std::set<std::int64_t> offsets;

  friend auto operator<=>(const OffsetFormula&, const OffsetFormula&) = default;
};

/// Dense linear order: which of y < x, y = x, y > x hold.
struct OrderFormula {
  bool below = false;
  bool equal = false;
  bool above = false;

  friend auto operator<=>(const OrderFormula&, const OrderFormula&) = default;
};

using NormalFormFormula = std::variant<PureSetFormula, OffsetFormula, OrderFormula>;

inline std::string render(const NormalFormFormula& f) {
  struct {
    std::string operator()(const PureSetFormula& p) const {
      std::vector<std::string> parts;
      if (p.x) parts.push_back("(= y x)");
      for (const auto& c : p.constants) parts.push_back("(= y " + c + ")");
      if (p.rest) parts.push_back("rest");
      if (parts.empty()) return "(false)";
      if (parts.size() == 1) return parts[0];
      std::string s = "(or";
      for (const auto& x : parts) s += " " + x;
      return s + ")";
    }
    std::string operator()(const OffsetFormula& o) const {
      std::string s;
      for (auto n : o.offsets) s += (s.empty() ? "" : " | ") + std::string("y = s^") + std::to_string(n) + "(x)";
      if (o.offsets.empty()) s = "false";
      return o.negated ? "not(" + s + ")" : s;
    }
    std::string operator()(const OrderFormula& o) const {
      std::vector<std::string> parts;
      if (o.below) parts.push_back("(< y x)");
      if (o.equal) parts.push_back("(= y x)");
      if (o.above) parts.push_back("(< x y)");
      if (parts.empty()) return "(false)";
      if (parts.size() == 1) return parts[0];
      std::string s = "(or";
      for (const auto& x : parts) s += " " + x;
      return s + ")";
    }
  } v;
  return std::visit(v, f);
}

// ---------------------------------------------------------------------------
// Engines

struct TypeFamilyInfo {
  std::vector<TypePoint> types;
  std::optional<SchematicTypeFamily> schematic;
};

/// One catalog entry after quotienting by equality of solution sets.
struct CatalogLabel {
  std::string name;
  NormalFormFormula formula;
  Sign sign = Sign::positive;
  CardSpec spec = CardSpec::finite(1);
};

class ExemplarError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::string label_id(const std::string& p, const std::string& q, const std::string& name) {
  return p + "/" + q + "/" + name;
}

// Pure set with k constants (k = nullopt for omega many).
class PureSetEngine {
 public:
  explicit PureSetEngine(std::optional<unsigned> k) : k_(k) {}

  std::string name() const { return "pure-set:" + (k_ ? std::to_string(*k_) : std::string("omega")); }

  TypeFamilyInfo types() const {
    TypeFamilyInfo out;
    out.types.push_back({"r0", k_.has_value(), true});
    if (k_)
      for (unsigned i = 1; i <= *k_; ++i) out.types.push_back({"c" + std::to_string(i), true, false});
    else
      out.schematic = SchematicTypeFamily{"c", true, false};
    return out;
  }

  std::vector<std::pair<std::string, std::string>> fiber_pairs() const {
    std::vector<std::string> names{"r0"};
    if (k_)
      for (unsigned i = 1; i <= *k_; ++i) names.push_back("c" + std::to_string(i));
    std::vector<std::pair<std::string, std::string>> out;
    if (k_) {
      for (const auto& p : names)
        for (const auto& q : names) out.push_back({p, q});
    } else {
      out = {{"r0", "r0"}, {"r0", "c[i]"}, {"c[i]", "r0"}, {"c[i]", "c[i]"}, {"c[i]", "c[j]"}};
    }
    return out;
  }

  // Constants distinguishable from a parameter of type p.
  std::vector<std::string> cell_constants(const std::string& p) const {
    std::vector<std::string> out;
    if (k_) {
      for (unsigned i = 1; i <= *k_; ++i) out.push_back("c" + std::to_string(i));
    } else {
      out = {"c[i]", "c[j]"};
    }
    (void)p;
    return out;
  }

  static bool is_constant(const std::string& t) { return t != "r0"; }

  // Cells as element sets: "x" is merged into the constant when p is one.
  std::set<std::string> cells(const std::string& p, const PureSetFormula& f) const {
    std::set<std::string> out(f.constants.begin(), f.constants.end());
    if (f.x) out.insert(is_constant(p) ? p : "x");
    if (f.rest) out.insert("rest");
    return out;
  }

  CardSpec solution_spec(const std::string& p, const PureSetFormula& f) const {
    const auto sol = cells(p, f);
    const auto universe = cell_constants(p).size() + (is_constant(p) ? 0 : 1);  // + x
    if (!f.rest) return CardSpec::finite(sol.size());
    return CardSpec::cofinite(universe - (sol.size() - 1));
  }

  // Nonempty and inside the realizations of q.
  bool semi_isolating(const std::string& p, const std::string& q, const PureSetFormula& f) const {
    const auto sol = cells(p, f);
    if (sol.empty()) return false;
    for (const auto& c : sol) {
      if (c == "rest") {
        if (q != "r0" || !k_) return false;  // with omega constants `rest` contains constants
      } else if (c == "x") {
        if (q != "r0") return false;
      } else if (c != q) {
        return false;
      }
    }
    return true;
  }

  std::vector<CatalogLabel> catalog(const std::string& p, const std::string& q) const {
    const auto consts = cell_constants(p);
    const std::size_t bits = consts.size() + 2;
    std::map<std::set<std::string>, PureSetFormula> seen;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << bits); ++mask) {
      PureSetFormula f;
      f.x = mask & 1;
      f.rest = mask & 2;
      for (std::size_t i = 0; i < consts.size(); ++i)
        if (mask & (std::uint64_t{4} << i)) f.constants.insert(consts[i]);
      if (!semi_isolating(p, q, f)) continue;
      auto key = cells(p, f);
      if (!seen.count(key)) seen.emplace(key, f);
    }
    std::vector<CatalogLabel> out;
    for (const auto& [key, f] : seen) {
      std::string nm;
      for (const auto& c : key) nm += (nm.empty() ? "" : "+") + c;
      out.push_back({nm, f, sign_of(p, q, key), solution_spec(p, f)});
    }
    return out;
  }

  Sign sign_of(const std::string& p, const std::string& q, const std::set<std::string>& key) const {
    if (p == q && (key == std::set<std::string>{"x"} || key == std::set<std::string>{p})) return Sign::zero;
    // With omega constants no formula over a constant isolates r0, so
    // r0-realizations are semi-isolated by nothing principal.
    if (!k_ && p == "r0" && q != "r0") return Sign::negative;
    return Sign::positive;
  }

 private:
  std::optional<unsigned> k_;
};

// Successor function on Z, optionally with constants whose chains are
// pairwise disjoint.
class SuccessorEngine {
 public:
  explicit SuccessorEngine(std::optional<unsigned> c) : c_(c) {}

  std::string name() const { return "succ:" + (c_ ? std::to_string(*c_) : std::string("omega")); }

  bool has_constants() const { return !c_ || *c_ > 0; }

  TypeFamilyInfo types() const {
    TypeFamilyInfo out;
    if (!has_constants()) {
      out.types.push_back({"r0", true, true});
    } else {
      // x = s^n(c_i) for every n and i: infinitely many principal types.
      out.types.push_back({"r0", false, true});
      out.schematic = SchematicTypeFamily{"t", true, false};
    }
    return out;
  }

  static CardSpec solution_spec(const OffsetFormula& f) {
    return f.negated ? CardSpec::cofinite(f.offsets.size()) : CardSpec::finite(f.offsets.size());
  }

  /// s^m o s^n = s^(m+n).
  static OffsetFormula compose(const OffsetFormula& a, const OffsetFormula& b) {
    OffsetFormula out;
    for (auto m : a.offsets)
      for (auto n : b.offsets) out.offsets.insert(m + n);
    return out;
  }

 private:
  std::optional<unsigned> c_;
};

class DloEngine {
 public:
  std::string name() const { return "dlo"; }

  TypeFamilyInfo types() const { return {{{"r0", true, true}}, std::nullopt}; }

  static CardSpec solution_spec(const OrderFormula& f) {
    if (f.below && f.above) return CardSpec::cofinite(f.equal ? 0 : 1);
    if (f.below || f.above) return CardSpec::infinite_coinfinite();
    return CardSpec::finite(f.equal ? 1 : 0);
  }
};

}  // namespace detail

/// A symbolic exemplar theory. Cardinalities are computed exactly over the
/// countable saturated model; nothing is sampled.
class TheoryEngine {
 public:
  static TheoryEngine pure_set(std::optional<unsigned> constants) { return TheoryEngine(detail::PureSetEngine(constants)); }
  static TheoryEngine successor(std::optional<unsigned> constants) { return TheoryEngine(detail::SuccessorEngine(constants)); }
  static TheoryEngine dlo() { return TheoryEngine(detail::DloEngine()); }

  /// Parses `pure-set:k`, `pure-set:omega`, `succ:c`, `succ:omega`, `dlo`.
  static TheoryEngine from_name(const std::string& name) {
    if (name == "dlo") return dlo();
    auto colon = name.find(':');
    if (colon == std::string::npos) throw ExemplarError("unknown exemplar '" + name + "'");
    const auto kind = name.substr(0, colon), arg = name.substr(colon + 1);
    std::optional<unsigned> n;
    if (arg != "omega") {
      if (arg.empty() || arg.size() > 3 || !std::all_of(arg.begin(), arg.end(), ::isdigit))
        throw ExemplarError("bad parameter in exemplar '" + name + "'");
      n = static_cast<unsigned>(std::stoul(arg));
    }
    if (kind == "pure-set") {
      if (n && *n > 8) throw ExemplarError("pure-set supports at most 8 named constants");
      return pure_set(n);
    }
    if (kind == "succ") return successor(n);
    throw ExemplarError("unknown exemplar '" + name + "'");
  }

  std::string name() const {
    return std::visit([](const auto& e) { return e.name(); }, kind_);
  }

  TypeFamilyInfo types() const {
    return std::visit([](const auto& e) { return e.types(); }, kind_);
  }

  /// Exact classification of f(a, y) for a realizing p.
  CardSpec solution_spec(const std::string& p, const NormalFormFormula& f) const {
    if (auto* e = std::get_if<detail::PureSetEngine>(&kind_))
      if (auto* g = std::get_if<PureSetFormula>(&f)) return e->solution_spec(p, *g);
    if (std::holds_alternative<detail::SuccessorEngine>(kind_))
      if (auto* g = std::get_if<OffsetFormula>(&f)) return detail::SuccessorEngine::solution_spec(*g);
    if (std::holds_alternative<detail::DloEngine>(kind_))
      if (auto* g = std::get_if<OrderFormula>(&f)) return detail::DloEngine::solution_spec(*g);
    throw ExemplarError("formula does not belong to the language of " + name());
  }

  /// The label structure of the theory with catalogs bounded by `depth`.
  Json extract_json(int depth) const;

  LabelStructure extract(int depth) const { return validate_structure(extract_json(depth)); }

  /// Human-readable summary: types and the depth-bounded catalog.
  std::string describe(int depth) const {
    const auto s = extract(depth);
    std::ostringstream os;
    os << "exemplar " << name() << "\n";
    for (const auto& t : s.types)
      os << "  type " << t.name << (t.principal ? " principal" : " non-principal")
         << (t.infinite_realizations ? " infinite" : " finite") << "\n";
    if (s.schematic) os << "  type family " << s.schematic->name << "[n], n in omega, principal, finite\n";
    for (const auto& [key, f] : s.fibers) {
      os << "  rho(" << f.src << ", " << f.dst << ")\n";
      for (const auto& l : f.labels) os << "    " << l.id << "  " << to_string(l.sign) << "  " << l.spec.str() << "\n";
      for (const auto& g : f.families)
        os << "    " << g.id << "[n] family over " << (g.domain == IndexDomain::integers ? "Z" : "omega") << "  "
           << to_string(g.member_sign) << "  " << g.member_spec.str() << "\n";
    }
    return os.str();
  }

  const auto& kind() const { return kind_; }

 private:
  using Kind = std::variant<detail::PureSetEngine, detail::SuccessorEngine, detail::DloEngine>;
  explicit TheoryEngine(Kind k) : kind_(std::move(k)) {}

  Kind kind_;
};

namespace detail {

inline Json types_json(const TypeFamilyInfo& info) {
  Json out;
  out["types"] = Json::array();
  for (const auto& t : info.types)
    out["types"].push_back({{"name", t.name}, {"principal", t.principal}, {"infinite_realizations", t.infinite_realizations}});
  if (info.schematic)
    out["schematic_type_family"] = {{"name", info.schematic->name},
                                    {"principal", info.schematic->principal},
                                    {"infinite_realizations", info.schematic->infinite_realizations}};
  else
    out["schematic_type_family"] = nullptr;
  out["fibers"] = Json::array();
  return out;
}

inline Json label_json(const std::string& id, Sign sign, const CardSpec& spec) {
  Json s = spec.is_finite()     ? Json{{"finite", spec.count()}}
           : spec.is_cofinite() ? Json{{"cofinite", spec.count()}}
                                : Json("infinite_coinfinite");
  return {{"id", id}, {"sign", to_string(sign)}, {"spec", s}};
}

inline Json fiber_json(const std::string& p, const std::string& q) {
  return {{"src", p},           {"dst", q},
          {"labels", Json::array()}, {"families", Json::array()},
          {"dominates", Json::array()}, {"dominates_family", Json::array()},
          {"complements", Json::array()}, {"compose", Json::array()}};
}

inline Json extract_pure_set(const PureSetEngine& e) {
  Json doc = types_json(e.types());
  for (const auto& [p, q] : e.fiber_pairs()) {
    const auto cat = e.catalog(p, q);
    if (cat.empty()) continue;
    Json f = fiber_json(p, q);
    std::set<std::string> q_cells;
    for (const auto& l : cat)
      for (const auto& c : e.cells(p, std::get<PureSetFormula>(l.formula))) q_cells.insert(c);
    for (const auto& l : cat) f["labels"].push_back(label_json(label_id(p, q, l.name), l.sign, l.spec));
    for (const auto& a : cat)
      for (const auto& b : cat) {
        if (a.name == b.name) continue;
        const auto ca = e.cells(p, std::get<PureSetFormula>(a.formula));
        const auto cb = e.cells(p, std::get<PureSetFormula>(b.formula));
        if (std::includes(cb.begin(), cb.end(), ca.begin(), ca.end()))
          f["dominates"].push_back({label_id(p, q, a.name), label_id(p, q, b.name)});
        std::set<std::string> both(ca.begin(), ca.end());
        both.insert(cb.begin(), cb.end());
        const bool disjoint = both.size() == ca.size() + cb.size();
        if (a.name < b.name && disjoint && both == q_cells)
          f["complements"].push_back({label_id(p, q, a.name), label_id(p, q, b.name)});
      }
    doc["fibers"].push_back(f);
  }
  return doc;
}

inline Json extract_successor(const SuccessorEngine& e, int depth) {
  Json doc = types_json(e.types());
  const std::string fam_id = label_id("r0", "r0", "s");
  Json self = fiber_json("r0", "r0");
  self["labels"].push_back(label_json(label_id("r0", "r0", "zero"), Sign::zero, CardSpec::finite(1)));
  self["families"].push_back({{"id", fam_id},
                              {"domain", "integers"},
                              {"exclude", {0}},
                              {"member_sign", "positive"},
                              {"member_spec", {{"finite", 1}}},
                              {"shape", "antichain"},
                              {"additive", true}});
  if (!e.has_constants()) {
    // Cofinite formulas: not(y in S) for S empty, {0}, {n}.
    const std::string top = label_id("r0", "r0", "top"), ne = label_id("r0", "r0", "ne_x");
    const std::string zero = label_id("r0", "r0", "zero");
    self["labels"].push_back(label_json(top, Sign::positive, CardSpec::cofinite(0)));
    self["labels"].push_back(label_json(ne, Sign::positive, CardSpec::cofinite(1)));
    self["dominates"].push_back({zero, top});
    self["dominates"].push_back({ne, top});
    self["dominates_family"].push_back({{"label", top}, {"family", fam_id}});
    self["dominates_family"].push_back({{"label", ne}, {"family", fam_id}});
    self["complements"].push_back({zero, ne});
    for (std::int64_t n = -depth; n <= depth; ++n) {
      if (n == 0) continue;
      const std::string id = label_id("r0", "r0", "not_s" + std::to_string(n));
      self["labels"].push_back(label_json(id, Sign::positive, CardSpec::cofinite(1)));
      self["dominates"].push_back({zero, id});
      self["dominates"].push_back({id, top});
      self["dominates_family"].push_back({{"label", id}, {"family", fam_id}, {"except", {n}}});
    }
    doc["fibers"].push_back(self);
    return doc;
  }
  doc["fibers"].push_back(self);
  // r0 -> t[i]: y = s^n(c_k) for the named element; realizations of the
  // principal types never semi-isolate back into r0.
  Json down = fiber_json("r0", "t[i]");
  down["labels"].push_back(label_json(label_id("r0", "t[i]", "eq_t"), Sign::negative, CardSpec::finite(1)));
  doc["fibers"].push_back(down);
  Json loop = fiber_json("t[i]", "t[i]");
  loop["labels"].push_back(label_json(label_id("t[i]", "t[i]", "zero"), Sign::zero, CardSpec::finite(1)));
  doc["fibers"].push_back(loop);
  Json across = fiber_json("t[i]", "t[j]");
  across["labels"].push_back(label_json(label_id("t[i]", "t[j]", "eq_t"), Sign::positive, CardSpec::finite(1)));
  doc["fibers"].push_back(across);
  return doc;
}

inline Json extract_dlo() {
  Json doc = types_json(DloEngine().types());
  Json f = fiber_json("r0", "r0");
  struct Shape {
    const char* name;
    OrderFormula f;
  };
  const std::vector<Shape> shapes{{"eq", {false, true, false}}, {"lt", {true, false, false}}, {"gt", {false, false, true}},
                                  {"le", {true, true, false}},  {"ge", {false, true, true}},  {"ne", {true, false, true}},
                                  {"top", {true, true, true}}};
  auto id = [](const char* n) { return label_id("r0", "r0", n); };
  for (const auto& s : shapes)
    f["labels"].push_back(label_json(id(s.name), s.f.equal && !s.f.below && !s.f.above ? Sign::zero : Sign::positive,
                                     DloEngine::solution_spec(s.f)));
  auto subset = [](const OrderFormula& a, const OrderFormula& b) {
    return (!a.below || b.below) && (!a.equal || b.equal) && (!a.above || b.above);
  };
  for (const auto& a : shapes)
    for (const auto& b : shapes) {
      if (std::string(a.name) == b.name) continue;
      if (subset(a.f, b.f)) f["dominates"].push_back({id(a.name), id(b.name)});
      const bool part = a.f.below != b.f.below && a.f.equal != b.f.equal && a.f.above != b.f.above;
      if (std::string(a.name) < b.name && part) f["complements"].push_back({id(a.name), id(b.name)});
    }
  doc["fibers"].push_back(f);
  return doc;
}

}  // namespace detail

inline Json TheoryEngine::extract_json(int depth) const {
  if (depth < 1) throw ExemplarError("extraction depth must be at least 1");
  if (auto* e = std::get_if<detail::PureSetEngine>(&kind_)) return detail::extract_pure_set(*e);
  if (auto* e = std::get_if<detail::SuccessorEngine>(&kind_)) return detail::extract_successor(*e, depth);
  return detail::extract_dlo();
}

}  // namespace smlab
