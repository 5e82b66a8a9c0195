#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"

using namespace qrobust;

namespace {

QipInstance forall_first() {
  InstanceBuilder b;
  b.block(Quantifier::ForAll);
  b.binary("q");
  b.block(Quantifier::Exists);
  const int x = b.binary("x");
  b.objective(x, 1);
  return b.build();
}

}  // namespace

TEST(Validate, FirstBlockForAll) {
  const auto rep = validate(forall_first());
  EXPECT_TRUE(rep.contains(Finding::FirstBlockNotExistential));
  EXPECT_EQ(rep.issues.front().index, 0);
}

TEST(Validate, UniversalRowOnExistentialVariable) {
  InstanceBuilder b;
  b.block(Quantifier::Exists);
  const int x = b.binary("x");
  b.block(Quantifier::ForAll);
  const int q = b.binary("q");
  b.block(Quantifier::Exists);
  b.binary("y");
  b.universal_row({{x, 1}, {q, 1}}, Sense::LE, 1);
  const auto rep = validate(b.build());
  ASSERT_TRUE(rep.contains(Finding::UniversalRowTouchesExistential));
  EXPECT_EQ(rep.summary(), "UniversalRowTouchesExistential(0)");
}

TEST(Validate, StructuralFindings) {
  QipInstance q = fixtures::tiny_selection();
  ASSERT_TRUE(validate(q).ok());

  QipInstance crossed = q;
  crossed.domains[0] = VarDomain{2, 1, VarKind::Integer};
  EXPECT_TRUE(validate(crossed).contains(Finding::DomainBoundsCrossed));

  QipInstance missing = q;
  missing.blocks[0].vars.pop_back();
  EXPECT_TRUE(validate(missing).contains(Finding::VariableMissingFromBlocks));

  QipInstance twice = q;
  twice.blocks[2].vars.push_back(twice.blocks[0].vars[0]);
  EXPECT_TRUE(validate(twice).contains(Finding::VariableInMultipleBlocks));

  QipInstance early = q;
  early.domains[0].kind = VarKind::TrailingContinuous;
  EXPECT_TRUE(validate(early).contains(Finding::TrailingContinuousOutsideLastBlock));

  QipInstance last_forall = q;
  last_forall.blocks.push_back(QuantBlock{Quantifier::ForAll, {}});
  const auto rep = validate(last_forall);
  EXPECT_TRUE(rep.contains(Finding::LastBlockNotExistential));
  EXPECT_TRUE(rep.contains(Finding::EmptyBlock));

  QipInstance empty_d = q;
  empty_d.universal_rows[0].rhs = Rational(3);
  EXPECT_TRUE(validate(empty_d).contains(Finding::UniversalSystemEmpty));

  EXPECT_TRUE(validate(QipInstance{}).contains(Finding::NoBlocks));
}

TEST(Validate, IsPure) {
  const QipInstance q = forall_first();
  EXPECT_EQ(validate(q), validate(q));
}

TEST(ObjectiveBounds, SingleTerm) {
  InstanceBuilder b;
  b.block(Quantifier::Exists);
  const int x = b.binary("x0");
  b.objective(x, 3);
  EXPECT_EQ(objective_bounds(b.build()), std::make_pair(Rational(0), Rational(3)));
}

TEST(ObjectiveBounds, SignSplit) {
  InstanceBuilder b;
  b.block(Quantifier::Exists);
  const int x0 = b.binary("x0");
  const int x1 = b.binary("x1");
  b.objective(x0, -2).objective(x1, 1);
  EXPECT_EQ(objective_bounds(b.build()), std::make_pair(Rational(-2), Rational(1)));
}

TEST(ObjectiveBounds, MatchesEnumerationOnSelection) {
  const QipInstance q = build_selection_qip_pu(SelectionParams{2, 1, 1, 2, 3});
  const auto [lo, hi] = objective_bounds(q);
  std::vector<Int> x(static_cast<std::size_t>(q.num_vars()));
  Rational best_lo(1000000);
  Rational best_hi(-1000000);
  auto rec = [&](auto&& self, int v) -> void {
    if (v == q.num_vars()) {
      Rational val = q.objective_constant;
      for (const Term& t : q.objective) val += t.coef * Rational(x[t.var]);
      best_lo = min(best_lo, val);
      best_hi = max(best_hi, val);
      return;
    }
    for (Int a = q.domains[v].lower; a <= q.domains[v].upper; ++a) {
      x[v] = a;
      self(self, v + 1);
    }
  };
  rec(rec, 0);
  EXPECT_EQ(lo, best_lo);
  EXPECT_EQ(hi, best_hi);
}

TEST(ImmediateViolation, HoldsForGenerators) {
  EXPECT_TRUE(immediate_violation_failures(fixtures::tiny_selection()).empty());
  KnapsackParams k;
  k.n = 2;
  k.T = 2;
  k.beta = 1;
  EXPECT_TRUE(immediate_violation_failures(build_knapsack_qip_pu(k)).empty());
}

TEST(ImmediateViolation, DetectsDeferredViolation) {
  // q0 is free in its block but the row through q1 rules out q0 = 1 later.
  InstanceBuilder b;
  b.block(Quantifier::Exists);
  b.binary("x");
  b.block(Quantifier::ForAll);
  const int q0 = b.binary("q0");
  b.block(Quantifier::Exists);
  b.binary("y");
  b.block(Quantifier::ForAll);
  const int q1 = b.var("q1", 1, 1);
  b.block(Quantifier::Exists);
  b.binary("w");
  b.universal_row({{q0, 1}, {q1, 1}}, Sense::LE, 1);
  const auto failures = immediate_violation_failures(b.build());
  ASSERT_EQ(failures.size(), 1u);
  EXPECT_EQ(failures[0], 1);
}
