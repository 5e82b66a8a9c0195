#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace qrobust;

namespace {

std::vector<VarDomain> binaries(int n) { return std::vector<VarDomain>(static_cast<std::size_t>(n), VarDomain{0, 1}); }

// Every integer point of the box satisfying all rows.
std::vector<std::vector<Int>> feasible_points(const std::vector<LinConstraint>& rows, const BoundsState& s) {
  std::vector<std::vector<Int>> out;
  std::vector<Int> x(static_cast<std::size_t>(s.size()));
  auto rec = [&](auto&& self, int v) -> void {
    if (v == s.size()) {
      for (const auto& r : rows)
        if (!detail::row_satisfied(r, x)) return;
      out.push_back(x);
      return;
    }
    for (Int a = s.lower[v].ceil(); a <= s.upper[v].floor(); ++a) {
      x[v] = a;
      self(self, v + 1);
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace

TEST(Propagate, SingleRowTightening) {
  BoundsState s = BoundsState::from(binaries(2));
  s.lower[0] = Rational(1);
  const std::vector<LinConstraint> rows{LinConstraint::make({{0, 1}, {1, 1}}, Sense::LE, 1)};
  const auto out = propagate(rows, s);
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(out->upper[1], Rational(0));
}

TEST(Propagate, CrossingBoundsIsEmpty) {
  const std::vector<LinConstraint> rows{LinConstraint::make({{0, 1}}, Sense::LE, 0),
                                        LinConstraint::at_least({{0, 1}}, 1)};
  EXPECT_FALSE(propagate(rows, BoundsState::from(binaries(1))).has_value());
}

TEST(Propagate, CardinalityForcesLastVariable) {
  // sum x = 2 over five binaries with x0 = 1 and x1..x3 = 0.
  std::vector<Term> all;
  for (int i = 0; i < 5; ++i) all.push_back({i, 1});
  const std::vector<LinConstraint> rows{LinConstraint::make(all, Sense::EQ, 2)};
  BoundsState s = BoundsState::from(binaries(5));
  s.lower[0] = s.upper[0] = Rational(1);
  for (int i = 1; i < 4; ++i) s.lower[i] = s.upper[i] = Rational(0);
  const auto out = propagate(rows, s);
  ASSERT_TRUE(out.has_value());
  const auto pts = feasible_points(rows, s);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(out->lower[4], Rational(pts[0][4]));
  EXPECT_EQ(out->upper[4], Rational(pts[0][4]));
}

TEST(Propagate, IntegerBoundsRoundInward) {
  std::vector<VarDomain> d{{0, 10}};
  const std::vector<LinConstraint> rows{LinConstraint::make({{0, 3}}, Sense::LE, 7),
                                        LinConstraint::at_least({{0, 2}}, 3)};
  const auto out = propagate(rows, BoundsState::from(d));
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(out->lower[0], Rational(2));
  EXPECT_EQ(out->upper[0], Rational(2));
}

TEST(Propagate, ContinuousBoundsStayFractional) {
  std::vector<VarDomain> d{{0, 10, VarKind::TrailingContinuous}};
  const std::vector<LinConstraint> rows{LinConstraint::make({{0, 3}}, Sense::LE, 7)};
  const auto out = propagate(rows, BoundsState::from(d));
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(out->upper[0], Rational(7, 3));
}

TEST(Propagate, UndoRestoresBox) {
  const std::vector<LinConstraint> rows{LinConstraint::make({{0, 1}, {1, 1}, {2, 1}}, Sense::LE, 1)};
  Propagator p(rows, 3);
  BoundsState s = BoundsState::from(binaries(3));
  const BoundsState before = s;
  BoundTrail trail;
  ASSERT_TRUE(p.fix(s, 0, Rational(1), &trail));
  ASSERT_TRUE(p.propagate(s, nullptr, &trail));
  EXPECT_EQ(s.upper[1], Rational(0));
  undo(s, trail, 0);
  EXPECT_EQ(s.lower, before.lower);
  EXPECT_EQ(s.upper, before.upper);
}

// Random rows over small boxes: soundness against enumeration and the
// fixpoint property.
TEST(Propagate, SoundAndIdempotentOnRandomRows) {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = static_cast<int>(rng.draw(2, 6));
    std::vector<VarDomain> d;
    for (int v = 0; v < n; ++v) {
      const Int lo = rng.draw(-2, 1);
      d.push_back({lo, lo + rng.draw(0, 3)});
    }
    std::vector<LinConstraint> rows;
    const int m = static_cast<int>(rng.draw(1, 4));
    for (int r = 0; r < m; ++r) {
      std::vector<Term> terms;
      for (int v = 0; v < n; ++v)
        if (rng.draw(0, 1) == 1) terms.push_back({v, Rational(rng.draw(-3, 3))});
      rows.push_back(LinConstraint::make(terms, rng.draw(0, 3) == 0 ? Sense::EQ : Sense::LE, rng.draw(-3, 4)));
    }
    const BoundsState box = BoundsState::from(d);
    const auto pts = feasible_points(rows, box);
    const auto once = propagate(rows, box);
    if (!once) {
      ASSERT_TRUE(pts.empty()) << "trial " << trial;
      continue;
    }
    for (const auto& x : pts)
      for (int v = 0; v < n; ++v) {
        ASSERT_LE(once->lower[v], Rational(x[v])) << "trial " << trial;
        ASSERT_GE(once->upper[v], Rational(x[v])) << "trial " << trial;
      }
    const auto twice = propagate(rows, *once);
    ASSERT_TRUE(twice.has_value());
    EXPECT_EQ(twice->lower, once->lower) << "trial " << trial;
    EXPECT_EQ(twice->upper, once->upper) << "trial " << trial;
  }
}

TEST(OptimisticValue, Examples) {
  BoundsState s = BoundsState::from(binaries(2));
  const std::vector<Term> sum{{0, 1}, {1, 1}};
  EXPECT_EQ(optimistic_value(sum, Rational(0), s, OptSense::Min), Rational(0));
  EXPECT_EQ(optimistic_value(sum, Rational(0), s, OptSense::Max), Rational(2));

  BoundsState t = BoundsState::from({VarDomain{2, 5}});
  const std::vector<Term> neg{{0, -1}};
  EXPECT_EQ(optimistic_value(neg, Rational(0), t, OptSense::Min), Rational(-5));
}

TEST(OptimisticValue, AdmissibleOnOracleSuite) {
  for (const QipInstance& q : fixtures::oracle_suite()) {
    const SolveResult r = oracle_solve(q);
    if (r.status != SolveStatus::Optimal) continue;
    const BoundsState s = BoundsState::from(q.domains);
    const Rational bound = optimistic_value(q.objective, q.objective_constant, s, OptSense::Min);
    EXPECT_LE(Value(bound), q.to_internal(*r.value)) << q.name;
  }
}
