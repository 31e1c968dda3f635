#pragma once

#include <algorithm>
#include <numeric>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "smlab/smlab.hpp"

namespace testing_support {

using smlab::Json;

inline std::string fixture_path(const std::string& rel) { return std::string(SMLAB_FIXTURES) + "/" + rel; }

inline Json load_json(const std::string& rel) {
  std::ifstream in(fixture_path(rel));
  std::stringstream buf;
  buf << in.rdbuf();
  return Json::parse(buf.str());
}

inline smlab::LabelStructure load(const std::string& rel) { return smlab::validate_structure(load_json(rel)); }

inline std::vector<std::string> fixtures_in(const std::string& dir) {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(fixture_path(dir)))
    if (e.path().extension() == ".json") out.push_back(dir + "/" + e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

// A built structure with relations renamed R0, R1, ... (label ids may clash
// with variable names) and one formula (Ri x y) per relation.
struct ProbeView {
  smlab::fo::FiniteStructure structure;
  std::vector<smlab::fo::Formula> family;
};

inline ProbeView probe_view(const smlab::fo::FiniteStructure& m) {
  ProbeView v;
  v.structure.size = m.size;
  std::size_t i = 0;
  for (const auto& [name, pairs] : m.relations) v.structure.relations["R" + std::to_string(i++)] = pairs;
  const auto sig = smlab::fo::Signature::of(v.structure);
  for (const auto& [name, pairs] : v.structure.relations)
    v.family.push_back(smlab::fo::parse_formula("(" + name + " x y)", sig));
  return v;
}

// Largest number written in any Finite or Cofinite spec.
inline std::size_t max_declared(const smlab::LabelStructure& s) {
  std::size_t c = 1;
  for (const auto& [key, f] : s.fibers) {
    for (const auto& l : f.labels)
      if (!l.spec.is_infinite_coinfinite()) c = std::max(c, l.spec.count());
    for (const auto& g : f.families) c = std::max(c, g.member_spec.count());
  }
  return c;
}

// Random small structures and formulas for the orbit oracle.
struct RandomCase {
  smlab::fo::FiniteStructure structure;
  std::string formula;  // free in y, possibly x
  int parameter = 0;
};

inline int pick(std::mt19937& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline std::string random_formula(std::mt19937& rng, const smlab::fo::FiniteStructure& m, int depth,
                                  std::vector<std::string> vars, int budget) {
  std::vector<std::string> terms = vars;
  for (const auto& [c, v] : m.constants) terms.push_back(c);
  auto term = [&] { return terms[pick(rng, 0, static_cast<int>(terms.size()) - 1)]; };
  // Half of the atoms mention y, so most cases have a proper solution set.
  auto first = [&] { return pick(rng, 0, 1) ? std::string("y") : term(); };
  const int choice = budget <= 0 ? pick(rng, 0, 2) : pick(rng, 0, 7);
  switch (choice) {
    case 0: return "(= " + first() + " " + term() + ")";
    case 1: return "(E " + first() + " " + term() + ")";
    case 2: return m.marks.empty() ? "(E " + term() + " " + first() + ")" : "(P " + first() + ")";
    case 3: return "(not " + random_formula(rng, m, depth, vars, budget - 1) + ")";
    case 4:
    case 5:
      return std::string(choice == 4 ? "(and " : "(or ") + random_formula(rng, m, depth, vars, budget - 2) + " " +
             random_formula(rng, m, depth, vars, budget - 2) + ")";
    default: {
      if (depth == 0) return random_formula(rng, m, depth, vars, budget - 1);
      const std::string v = "z" + std::to_string(vars.size());
      vars.push_back(v);
      return std::string(pick(rng, 0, 1) ? "(exists " : "(forall ") + v + " " +
             random_formula(rng, m, depth - 1, vars, budget - 1) + ")";
    }
  }
}

inline RandomCase random_case(std::mt19937& rng) {
  RandomCase c;
  auto& m = c.structure;
  m.size = static_cast<std::size_t>(pick(rng, 2, 6));
  const int n = static_cast<int>(m.size);
  const int density = pick(rng, 0, 4);
  m.relations["E"];
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (pick(rng, 0, 9) < density) m.relations["E"].insert({a, b});
  if (pick(rng, 0, 1)) {
    auto& p = m.marks["P"];
    for (int a = 0; a < n; ++a)
      if (pick(rng, 0, 2) == 0) p.insert(a);
  }
  if (pick(rng, 0, 1)) m.constants["c"] = pick(rng, 0, n - 1);
  // The (= y y) conjunct keeps y free.
  c.formula = "(and (= y y) " + random_formula(rng, m, 2, {"x", "y"}, 6) + ")";
  c.parameter = pick(rng, 0, n - 1);
  return c;
}

// Empty when the solution set is a union of orbits over {parameter};
// otherwise a description of the split orbit.
inline std::string orbit_counterexample(const RandomCase& c) {
  using namespace smlab::fo;
  const auto f = parse_formula(c.formula, Signature::of(c.structure));
  const auto sols = solutions(c.structure, f, {{"x", c.parameter}});
  for (const auto& block : orbits_over(c.structure, {c.parameter})) {
    std::size_t inside = 0;
    for (int a : block) inside += std::binary_search(sols.begin(), sols.end(), a);
    if (inside != 0 && inside != block.size())
      return c.formula + " splits an orbit over " + std::to_string(c.parameter);
  }
  return {};
}

// Small JSON builders for hand-written structures.
inline Json type(const std::string& name, bool infinite, bool principal = true) {
  return {{"name", name}, {"principal", principal}, {"infinite_realizations", infinite}};
}

inline Json label(const std::string& id, const Json& spec, const std::string& sign = "positive") {
  return {{"id", id}, {"sign", sign}, {"spec", spec}};
}

inline Json fin(int k) { return {{"finite", k}}; }
inline Json cofin(int m) { return {{"cofinite", m}}; }

inline Json fiber(const std::string& src, const std::string& dst, Json labels) {
  return {{"src", src},
          {"dst", dst},
          {"labels", std::move(labels)},
          {"families", Json::array()},
          {"dominates", Json::array()},
          {"dominates_family", Json::array()},
          {"complements", Json::array()},
          {"compose", Json::array()}};
}

inline Json doc(Json types, Json fibers, Json schematic = nullptr) {
  return {{"types", std::move(types)}, {"schematic_type_family", std::move(schematic)}, {"fibers", std::move(fibers)}};
}

inline Json z_family(const std::string& id) {
  return {{"id", id},        {"domain", "integers"},        {"exclude", {0}}, {"member_sign", "positive"},
          {"member_spec", fin(1)}, {"shape", "antichain"}, {"additive", true}};
}

// zero, top = Cofinite(0) and the additive Z-family s of Finite(1) offsets.
inline Json successor_schema() {
  Json f = fiber("r0", "r0", Json::array({label("zero", fin(1), "zero"), label("top", cofin(0))}));
  f["families"].push_back(z_family("s"));
  f["dominates"].push_back({"zero", "top"});
  f["dominates_family"].push_back({{"label", "top"}, {"family", "s"}});
  return doc(Json::array({type("r0", true)}), Json::array({f}));
}

}  // namespace testing_support
