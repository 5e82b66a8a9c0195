#include <gtest/gtest.h>

#include <map>

#include "fixtures.hpp"

using namespace qrobust;

namespace {

BenchRecord timed(const std::string& id, const std::string& solver, std::optional<std::int64_t> ms) {
  BenchRecord r;
  r.instance_id = id;
  r.family = "sel";
  r.model = "QIPPU";
  r.solver = solver;
  r.status = ms ? BenchStatus::Optimal : BenchStatus::TimeLimit;
  if (ms) r.value = Value(Rational(1));
  r.time_ms = ms.value_or(5000);
  return r;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Profile, TwoSolverExample) {
  const std::vector<BenchRecord> recs{timed("i1", "A", 2), timed("i2", "A", 4), timed("i1", "B", 4),
                                      timed("i2", "B", 2)};
  const ProfileTable t = performance_profile(recs);
  ASSERT_EQ(t.solvers, (std::vector<std::string>{"QIPPU/A", "QIPPU/B"}));
  ASSERT_GE(t.taus.size(), 3u);
  EXPECT_EQ(t.taus[0], Rational(1));
  EXPECT_EQ(t.taus[2], Rational(2));
  EXPECT_EQ(t.p[0][0], 0.5);
  EXPECT_EQ(t.p[1][0], 0.5);
  EXPECT_EQ(t.p[0][2], 1.0);
  EXPECT_EQ(t.p[1][2], 1.0);
}

TEST(Profile, SingleSolverIsFractionSolved) {
  const std::vector<BenchRecord> recs{timed("i1", "A", 3), timed("i2", "A", std::nullopt), timed("i3", "A", 0),
                                      timed("i4", "A", 9)};
  const ProfileTable t = performance_profile(recs);
  for (double p : t.p[0]) EXPECT_EQ(p, 0.75);
}

TEST(Profile, NeverSolvedIsZero) {
  const std::vector<BenchRecord> recs{timed("i1", "A", 3), timed("i1", "B", std::nullopt), timed("i2", "A", 1),
                                      timed("i2", "B", std::nullopt)};
  const ProfileTable t = performance_profile(recs);
  for (double p : t.p[1]) EXPECT_EQ(p, 0.0);
}

TEST(Profile, BuildFailedCountsAsUnsolved) {
  auto failed = timed("i1", "bnb", std::nullopt);
  failed.status = BenchStatus::BuildFailed;
  const std::vector<BenchRecord> recs{timed("i1", "alphabeta", 5), failed};
  const ProfileTable t = performance_profile(recs);
  ASSERT_EQ(t.solvers, (std::vector<std::string>{"QIPPU/alphabeta", "QIPPU/bnb"}));
  EXPECT_EQ(t.p[0].back(), 1.0);
  EXPECT_EQ(t.p[1].back(), 0.0);
}

TEST(Profile, ZeroTimesAreLifted) {
  // 0 ms and 1 ms are the same time after lifting, so both solvers tie.
  const std::vector<BenchRecord> recs{timed("i1", "A", 0), timed("i1", "B", 1)};
  const ProfileTable t = performance_profile(recs);
  EXPECT_EQ(t.p[0][0], 1.0);
  EXPECT_EQ(t.p[1][0], 1.0);
}

TEST(Profile, MismatchedInstanceSets) {
  const std::vector<BenchRecord> recs{timed("i1", "A", 2), timed("i2", "A", 4), timed("i1", "B", 4)};
  EXPECT_THROW(performance_profile(recs), MismatchedInstanceSets);
  const std::vector<BenchRecord> dup{timed("i1", "A", 2), timed("i1", "A", 4)};
  EXPECT_THROW(performance_profile(dup), MismatchedInstanceSets);
}

TEST(Profile, RandomRecordSetsAreMonotoneAndInRange) {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int solvers = static_cast<int>(rng.draw(1, 4));
    const int instances = static_cast<int>(rng.draw(1, 8));
    std::vector<BenchRecord> recs;
    for (int s = 0; s < solvers; ++s)
      for (int i = 0; i < instances; ++i) {
        std::optional<std::int64_t> ms;
        if (rng.draw(0, 3) != 0) ms = rng.draw(0, 60);
        recs.push_back(timed("i" + std::to_string(i), "s" + std::to_string(s), ms));
      }
    const ProfileTable t = performance_profile(recs);
    ASSERT_EQ(t.p.size(), static_cast<std::size_t>(solvers));
    double at_one = 0;
    bool any_solved = false;
    for (int s = 0; s < solvers; ++s) {
      for (std::size_t k = 0; k < t.taus.size(); ++k) {
        ASSERT_GE(t.p[s][k], 0.0);
        ASSERT_LE(t.p[s][k], 1.0);
        if (k > 0) ASSERT_GE(t.p[s][k], t.p[s][k - 1]) << "trial " << trial;
      }
      at_one += t.p[s][0];
      // Terminal value is the solved fraction.
      std::size_t solved_here = 0;
      for (const auto& r : recs)
        if (r.solver == "s" + std::to_string(s) && solved(r.status)) ++solved_here;
      any_solved = any_solved || solved_here > 0;
      ASSERT_DOUBLE_EQ(t.p[s].back(), static_cast<double>(solved_here) / instances) << "trial " << trial;
    }
    // Each instance solved by anyone has at least one fastest solver.
    if (any_solved) ASSERT_GE(at_one * instances, 1.0 - 1e-9);
  }
}

TEST(Csv, RecordRoundTrip) {
  std::vector<BenchRecord> recs{timed("a", "alphabeta", 12), timed("b", "bnb", std::nullopt)};
  recs[0].n = 4;
  recs[0].p = 2;
  recs[0].T = 1;
  recs[0].N = 2;
  recs[0].value = Value(Rational(-7, 3));
  recs[0].nodes = 99;
  recs[1].model = "DEP";
  recs[1].status = BenchStatus::BuildFailed;
  BenchRecord inf = timed("c", "alphabeta", 1);
  inf.status = BenchStatus::Infeasible;
  inf.value = Value::infinity();
  inf.family = "lot";
  inf.B = 3;
  inf.U = 2;
  recs.push_back(inf);
  const std::string text = emit_csv(recs);
  EXPECT_EQ(text.substr(0, text.find('\n')), kRecordHeader);
  EXPECT_EQ(count(text, "\n"), recs.size() + 1);
  EXPECT_EQ(parse_csv(text), recs);
}

TEST(Csv, ProfileHeader) {
  const std::vector<BenchRecord> recs{timed("i1", "A", 2), timed("i1", "B", 4)};
  const std::string text = emit_csv(performance_profile(recs));
  EXPECT_EQ(text.substr(0, text.find('\n')), "tau,QIPPU/A,QIPPU/B");
}

TEST(Svg, OnePolylinePerSolver) {
  const std::vector<BenchRecord> recs{timed("i1", "A", 2), timed("i1", "B", 4), timed("i1", "C", 3)};
  const std::string svg = emit_svg(performance_profile(recs));
  EXPECT_EQ(count(svg, "<polyline"), 3u);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
}

TEST(Grid, ParseAndCardinality) {
  const GridSpec g = parse_grid(R"(# toy grid
family = sel
models = qippu, qip
solvers = alphabeta
n = 4
p = 2
T = 1
N = 2
seeds = 0..1
time_limit_ms = 10000
)");
  EXPECT_EQ(g.seeds, (std::vector<std::uint64_t>{0, 1}));
  const auto recs = run_grid(g, 2);
  ASSERT_EQ(recs.size(), 4u);
  for (const auto& r : recs) EXPECT_EQ(r.status, BenchStatus::Optimal);
  EXPECT_EQ(recs[0].value, recs[1].value);
  EXPECT_EQ(recs[2].value, recs[3].value);
}

TEST(Grid, RejectsUnknownKeys) {
  EXPECT_THROW(parse_grid("colour = blue\n"), std::invalid_argument);
  EXPECT_THROW(parse_grid("seeds = 3..x\n"), std::invalid_argument);
}

TEST(Grid, SelectionModelsAgree) {
  GridSpec g;
  g.family = "sel";
  g.models = {"qippu", "qip", "dep"};
  g.solvers = {"alphabeta", "bnb"};
  g.params = {{"n", {4}}, {"p", {2}}, {"T", {1}}, {"N", {2}}};
  g.seeds.clear();
  for (std::uint64_t s = 0; s < 10; ++s) g.seeds.push_back(s);
  g.time_limit_ms = 20000;
  const auto recs = run_grid(g, 4);
  std::map<std::string, std::optional<Value>> by_instance;
  for (const auto& r : recs) {
    ASSERT_EQ(r.status, BenchStatus::Optimal) << r.instance_id << " " << r.model << " " << r.solver;
    auto [it, fresh] = by_instance.emplace(r.instance_id, r.value);
    if (!fresh) EXPECT_EQ(it->second, r.value) << r.instance_id;
  }
  EXPECT_EQ(by_instance.size(), 10u);
}

TEST(Grid, BuildFailureIsRecorded) {
  GridSpec g;
  g.family = "sel";
  g.models = {"dep"};
  g.solvers = {"bnb"};
  g.params = {{"n", {4}}, {"T", {3}}, {"N", {4}}};
  g.leaf_cap = 10;
  const auto recs = run_grid(g);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].status, BenchStatus::BuildFailed);
  EXPECT_FALSE(recs[0].value.has_value());
}
