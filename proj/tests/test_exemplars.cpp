#include <gtest/gtest.h>

#include "support.hpp"

using namespace testing_support;
using smlab::CardSpec;
using smlab::TheoryEngine;

namespace {

smlab::fo::FiniteStructure pure_set_model(std::size_t n, int constants) {
  smlab::fo::FiniteStructure m;
  m.size = n;
  for (int i = 0; i < constants; ++i) m.constants["c" + std::to_string(i + 1)] = i;
  return m;
}

std::set<std::string> label_ids(const smlab::Fiber& f) {
  std::set<std::string> out;
  for (const auto& l : f.labels) out.insert(l.id);
  return out;
}

}  // namespace

TEST(Engines, TypeCounts) {
  auto ps2 = TheoryEngine::pure_set(2).types();
  ASSERT_EQ(ps2.types.size(), 3u);
  for (const auto& t : ps2.types) EXPECT_TRUE(t.principal);
  EXPECT_TRUE(ps2.types[0].infinite_realizations);
  EXPECT_FALSE(ps2.schematic.has_value());

  EXPECT_EQ(TheoryEngine::successor(0).types().types.size(), 1u);

  auto omega = TheoryEngine::pure_set(std::nullopt).types();
  ASSERT_EQ(omega.types.size(), 1u);
  EXPECT_FALSE(omega.types[0].principal);
  ASSERT_TRUE(omega.schematic.has_value());
  EXPECT_TRUE(omega.schematic->principal);
}

TEST(Engines, PureSetTypesMatchOrbitsOfFiniteModels) {
  for (std::size_t n = 4; n <= 8; ++n) {
    const auto orbits = smlab::fo::orbits_over(pure_set_model(n, 2), {});
    EXPECT_EQ(orbits.size(), TheoryEngine::pure_set(2).types().types.size()) << n;
  }
}

TEST(Engines, FromName) {
  EXPECT_EQ(TheoryEngine::from_name("pure-set:3").name(), "pure-set:3");
  EXPECT_EQ(TheoryEngine::from_name("succ:omega").name(), "succ:omega");
  EXPECT_EQ(TheoryEngine::from_name("dlo").name(), "dlo");
  EXPECT_THROW(TheoryEngine::from_name("pure-set:9"), smlab::ExemplarError);
  EXPECT_THROW(TheoryEngine::from_name("vector-space:2"), smlab::ExemplarError);
  EXPECT_THROW(TheoryEngine::from_name("succ:"), smlab::ExemplarError);
  EXPECT_THROW(TheoryEngine::dlo().extract(0), smlab::ExemplarError);
}

TEST(Extract, SuccessorDepthThree) {
  auto s = TheoryEngine::successor(0).extract(3);
  const auto* f = s.fiber("r0", "r0");
  ASSERT_NE(f, nullptr);
  ASSERT_EQ(f->families.size(), 1u);
  EXPECT_EQ(f->families[0].member_spec, CardSpec::finite(1));
  EXPECT_EQ(s.label("r0/r0/top")->spec, CardSpec::cofinite(0));
  auto top = smlab::dominated_descriptor(s, "r0/r0/top");
  EXPECT_EQ(top.explicit_ids.size(), f->labels.size());
  EXPECT_TRUE(top.families[0].indices.empty());
  int negated = 0;
  for (const auto& l : f->labels)
    if (l.id.find("not_s") != std::string::npos) {
      ++negated;
      EXPECT_EQ(l.spec, CardSpec::cofinite(1));
    }
  EXPECT_EQ(negated, 6);
}

TEST(Extract, PureSetTwoConstants) {
  auto s = TheoryEngine::pure_set(2).extract(2);
  const auto* f = s.fiber("r0", "r0");
  EXPECT_EQ(label_ids(*f), (std::set<std::string>{"r0/r0/x", "r0/r0/rest", "r0/r0/rest+x"}));
  EXPECT_EQ(s.label("r0/r0/rest")->spec, CardSpec::cofinite(3));
  EXPECT_EQ(s.label("r0/r0/rest+x")->spec, CardSpec::cofinite(2));
  EXPECT_EQ(s.label("r0/r0/x")->sign, smlab::Sign::zero);
  EXPECT_TRUE(f->complements.count({"r0/r0/rest", "r0/r0/x"}));
  for (const auto* c : {"c1", "c2"}) {
    const auto* g = s.fiber("r0", c);
    ASSERT_NE(g, nullptr);
    ASSERT_EQ(g->labels.size(), 1u);
    EXPECT_EQ(g->labels[0].sign, smlab::Sign::positive);
    EXPECT_EQ(g->labels[0].spec, CardSpec::finite(1));
  }
}

TEST(Extract, PureSetSpecsAgreeWithBruteForceCounts) {
  const auto engine = TheoryEngine::pure_set(2);
  const auto& ps = std::get<smlab::detail::PureSetEngine>(engine.kind());
  for (std::size_t n = 5; n <= 8; ++n) {
    auto m = pure_set_model(n, 2);
    const auto sig = smlab::fo::Signature::of(m);
    for (const auto& l : ps.catalog("r0", "r0")) {
      const auto& f = std::get<smlab::PureSetFormula>(l.formula);
      std::string text = "(or";
      if (f.x) text += " (= y x)";
      for (const auto& c : f.constants) text += " (= y " + c + ")";
      if (f.rest) text += " (and (not (= y x)) (not (= y c1)) (not (= y c2)))";
      text += ")";
      const auto count = smlab::fo::solutions(m, smlab::fo::parse_formula(text, sig), {{"x", 3}}).size();
      if (l.spec.is_finite()) EXPECT_EQ(count, l.spec.count()) << text;
      else EXPECT_EQ(count + l.spec.count(), n) << text;
    }
  }
}

TEST(Extract, DloShapes) {
  auto s = TheoryEngine::dlo().extract(1);
  const auto* f = s.fiber("r0", "r0");
  EXPECT_EQ(f->labels.size(), 7u);
  EXPECT_TRUE(s.label("r0/r0/lt")->spec.is_infinite_coinfinite());
  EXPECT_TRUE(s.label("r0/r0/gt")->spec.is_infinite_coinfinite());
  EXPECT_EQ(s.label("r0/r0/ne")->spec, CardSpec::cofinite(1));
  EXPECT_EQ(s.label("r0/r0/top")->spec, CardSpec::cofinite(0));
  EXPECT_TRUE(f->complements.count({"r0/r0/ge", "r0/r0/lt"}));
}

TEST(Extract, SolutionSpecs) {
  EXPECT_EQ(TheoryEngine::successor(0).solution_spec("r0", smlab::OffsetFormula{false, {2}}), CardSpec::finite(1));
  EXPECT_EQ(TheoryEngine::pure_set(2).solution_spec("r0", smlab::PureSetFormula{true, {}, false}), CardSpec::finite(1));
  EXPECT_TRUE(TheoryEngine::dlo().solution_spec("r0", smlab::OrderFormula{false, false, true}).is_infinite_coinfinite());
  EXPECT_THROW(TheoryEngine::dlo().solution_spec("r0", smlab::OffsetFormula{}), smlab::ExemplarError);
}

TEST(Extract, MonotoneInDepth) {
  for (const auto* name : {"succ:0", "succ:omega", "pure-set:2", "pure-set:omega"})
    for (int d = 1; d < 5; ++d) {
      const auto e = TheoryEngine::from_name(name);
      const auto small = e.extract(d), big = e.extract(d + 1);
      for (const auto& [key, f] : small.fibers) {
        const auto* g = big.fiber(key.first, key.second);
        ASSERT_NE(g, nullptr) << name;
        for (const auto& l : f.labels) {
          auto other = big.label(l.id);
          ASSERT_TRUE(other.has_value()) << name << " " << l.id;
          EXPECT_EQ(other->spec, l.spec);
          EXPECT_EQ(other->sign, l.sign);
        }
        for (const auto& p : f.dominates) EXPECT_TRUE(g->dominates.count(p)) << name;
        for (const auto& p : f.complements) EXPECT_TRUE(g->complements.count(p)) << name;
      }
    }
}

TEST(Extract, NonPrincipalSplit) {
  auto ps = TheoryEngine::pure_set(std::nullopt).extract(3);
  for (const auto& [key, f] : ps.fibers)
    for (const auto& l : f.labels)
      EXPECT_EQ(l.sign == smlab::Sign::negative, f.src == "r0" && f.dst == "c[i]") << l.id;
  EXPECT_EQ(ps.fiber("c[i]", "r0"), nullptr);
  EXPECT_EQ(label_ids(*ps.fiber("r0", "r0")), (std::set<std::string>{"r0/r0/x"}));

  auto succ = TheoryEngine::successor(std::nullopt).extract(3);
  const auto* f = succ.fiber("r0", "r0");
  EXPECT_EQ(f->families.size(), 1u);
  for (const auto& l : f->labels) EXPECT_FALSE(smlab::classify_label(succ, l.id).in_ucofin) << l.id;
  EXPECT_EQ(succ.fiber("t[i]", "r0"), nullptr);
}

TEST(Extract, DescribeListsTypesAndLabels) {
  const auto text = TheoryEngine::pure_set(1).describe(1);
  EXPECT_NE(text.find("exemplar pure-set:1"), std::string::npos);
  EXPECT_NE(text.find("type c1 principal finite"), std::string::npos);
  EXPECT_NE(text.find("r0/r0/rest  positive  Cofinite(2)"), std::string::npos);
}
