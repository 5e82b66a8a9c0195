// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "qrobust/qrobust.hpp"

using namespace qrobust;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string show(const std::optional<Value>& v) { return v ? v->str() : "none"; }

std::map<std::string, int> index_of(const QipInstance& q) {
  std::map<std::string, int> out;
  for (int v = 0; v < q.num_vars(); ++v) out[q.var_names[v]] = v;
  return out;
}

std::string idx(const std::string& base, int t, int i) { return base + std::to_string(t) + "_" + std::to_string(i); }

// ---------------------------------------------------------------------------

struct Family {
  std::string name;
  std::vector<BenchInstance> cells;
};

BenchInstance cell(const std::string& family, std::uint64_t seed) {
  BenchInstance b;
  b.family = family;
  b.seed = seed;
  return b;
}

std::vector<BenchInstance> criterion1_instances() {
  std::vector<BenchInstance> out;
  for (std::uint64_t s = 0; s < 20; ++s) {
    for (int n : {2, 4})
      for (int T : {1, 2})
        for (int N : {1, 2, 3}) {
          auto b = cell("sel", s);
          b.n = n, b.p = n / 2, b.T = T, b.N = N;
          out.push_back(b);
        }
    for (int n : {2, 3})
      for (int T : {1, 2})
        for (int N : {1, 2}) {
          auto b = cell("ass", s);
          b.n = n, b.T = T, b.N = N;
          out.push_back(b);
        }
    for (int T = 1; T <= 4; ++T) {
      auto b = cell("lot", s);
      b.B = 3, b.U = 2, b.T = T;
      out.push_back(b);
    }
    for (int n = 1; n <= 3; ++n)
      for (int T : {1, 2}) {
        auto b = cell("kna", s);
        b.n = n, b.T = T;
        out.push_back(b);
      }
  }
  return out;
}

std::optional<Value> hand_dep_value(const BenchInstance& b) {
  if (b.family == "sel") return solve_mip(build_selection_dep(b.selection())).value;
  if (b.family == "ass") return solve_mip(build_assignment_dep(b.assignment())).value;
  if (b.family == "lot") return solve_mip(build_lot_sizing_dep(b.lot_sizing())).value;
  return solve_mip(build_knapsack_dep(b.knapsack())).value;
}

std::string describe(const BenchInstance& b) {
  std::ostringstream os;
  os << b.family;
  if (b.n) os << " n=" << *b.n;
  if (b.T) os << " T=" << *b.T;
  if (b.N) os << " N=" << *b.N;
  os << " seed=" << b.seed;
  return os.str();
}

Outcome criterion1() {
  Outcome o;
  const auto start = Clock::now();
  std::size_t instances = 0;
  std::size_t oracle_checked = 0;
  std::size_t oracle_skipped = 0;
  for (const BenchInstance& b : criterion1_instances()) {
    ++instances;
    std::vector<std::pair<std::string, std::optional<Value>>> values;
    const bool has_pu = family_has_model(b.family, "qippu");
    const bool has_qip = family_has_model(b.family, "qip");
    const QipInstance main = build_qip(b, has_pu);
    values.emplace_back(has_pu ? "solve(QIPPU)" : "solve(QIP)", solve(main).value);
    if (has_pu && has_qip) values.emplace_back("solve(QIP)", solve(build_qip(b, false)).value);
    values.emplace_back("solve_mip(flatten)", solve_mip(flatten(main)).value);
    values.emplace_back("solve_mip(DEP)", hand_dep_value(b));
    try {
      values.emplace_back("oracle", oracle_solve(main).value);
      ++oracle_checked;
    } catch (const TreeTooLarge&) {
      ++oracle_skipped;
    }
    for (const auto& [label, v] : values) {
      if (v == values.front().second) continue;
      o.pass = false;
      o.detail = describe(b) + ": " + values.front().first + "=" + show(values.front().second) + " but " + label +
                 "=" + show(v);
      return o;
    }
  }
  const double secs = seconds_since(start);
  if (secs >= 600) o.pass = false;
  std::ostringstream os;
  os << instances << " instances agree; oracle compared on " << oracle_checked << ", above its leaf guard on "
     << oracle_skipped << "; " << static_cast<long>(secs) << " s";
  o.detail = os.str();
  return o;
}

// ---------------------------------------------------------------------------

long geometric(long N, int T) {
  long sum = 0;
  for (long t = 0, term = 1; t <= T; ++t, term *= N) sum += term;
  return sum;
}

std::size_t rows_on(const QipInstance& m, const std::string& var) {
  const int z = index_of(m).at(var);
  return static_cast<std::size_t>(std::count_if(m.existential_rows.begin(), m.existential_rows.end(), [z](const auto& r) {
    return std::any_of(r.terms.begin(), r.terms.end(), [z](const Term& t) { return t.var == z; });
  }));
}

Outcome criterion2() {
  Outcome o;
  std::ostringstream os;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok && o.pass) {
      o.pass = false;
      os.str("");
      os << what;
    }
  };
  const SelectionParams sel{10, 5, 2, 4, 0};
  const int flat_sel = flatten(build_selection_qip_pu(sel)).num_vars();
  const int hand_sel = build_selection_dep(sel).num_vars();
  check(flat_sel == 211 && hand_sel == 211,
        "selection n=10 N=4 T=2: " + std::to_string(flat_sel) + "/" + std::to_string(hand_sel) + " variables");
  for (int n : {2, 3, 4})
    for (int T : {1, 2, 3})
      for (int N : {1, 2, 3}) {
        const AssignmentParams ap{n, T, N, 0};
        const long expected = static_cast<long>(n) * n * geometric(N, T) + 1;
        const int flat = flatten(build_assignment_qip_pu(ap)).num_vars();
        const int hand = build_assignment_dep(ap).num_vars();
        check(flat == expected && hand == expected,
              "assignment n=" + std::to_string(n) + " T=" + std::to_string(T) + " N=" + std::to_string(N) + ": " +
                  std::to_string(flat) + "/" + std::to_string(hand) + " variables, expected " +
                  std::to_string(expected));
      }
  for (int T = 1; T <= 8; ++T) {
    const LotSizingParams lp{3, 2, T, 0, false};
    const std::size_t expected = std::size_t{1} << T;
    const std::size_t flat = flatten(build_lot_sizing_qip(lp)).tree->leaves.size();
    const std::size_t hand = rows_on(build_lot_sizing_dep(lp).model, "z");
    check(flat == expected && hand == expected, "lot-sizing T=" + std::to_string(T) + ": " + std::to_string(flat) +
                                                    "/" + std::to_string(hand) + " leaves");
  }
  if (o.pass) os << "selection 211 variables; assignment n^2 sum N^t + 1 on 27 cells; lot-sizing 2^T leaves, T=1..8";
  o.detail = os.str();
  return o;
}

// ---------------------------------------------------------------------------

Outcome criterion3() {
  Outcome o;
  constexpr std::int64_t limit = 5000;
  std::ostringstream os;
  int qippu_cliff = 0;
  int dep_cliff = 0;
  int largest_reached = 0;
  std::map<int, std::pair<int, int>> counts;
  for (int T = 1; T <= 4; ++T) {
    int pu = 0;
    int dep = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      BenchInstance b = cell("kna", s);
      b.n = 5;
      b.T = T;
      b.id = "kna_n5_T" + std::to_string(T) + "_s" + std::to_string(s);
      if (solved(run_cell(b, "qippu", "alphabeta", limit, kDefaultLeafCap).status)) ++pu;
      if (solved(run_cell(b, "dep", "bnb", limit, kDefaultLeafCap).status)) ++dep;
    }
    counts[T] = {pu, dep};
    if (pu < dep) o.pass = false;
    if (pu > 0) largest_reached = T;
    if (qippu_cliff == 0 && pu < 10) qippu_cliff = T;
    if (dep_cliff == 0 && dep < 10) dep_cliff = T;
    os << "T=" << T << " " << pu << "/" << dep << "; ";
  }
  // A cliff that never appears sits past the last T.
  if (qippu_cliff == 0) qippu_cliff = 5;
  if (dep_cliff == 0) dep_cliff = 5;
  if (largest_reached == 0 || counts[largest_reached].first <= counts[largest_reached].second) o.pass = false;
  if (dep_cliff >= qippu_cliff) o.pass = false;
  os << "solved QIPPU/DEP of 10; cliff T QIPPU=" << qippu_cliff << " DEP=" << dep_cliff;
  o.detail = os.str();
  return o;
}

// ---------------------------------------------------------------------------

std::vector<QipInstance> oracle_suite() {
  std::vector<QipInstance> out;
  for (std::uint64_t s = 0; s < 20; ++s) {
    out.push_back(build_selection_qip_pu(SelectionParams{2, 1, 1, 2, s}));
    out.push_back(build_selection_qip(SelectionParams{2, 1, 2, 2, s}));
    out.push_back(build_selection_qip_pu(SelectionParams{4, 2, 1, 3, s}));
    out.push_back(build_assignment_qip_pu(AssignmentParams{2, 1, 2, s}));
    out.push_back(build_assignment_qip(AssignmentParams{2, 2, 2, s}));
    out.push_back(build_lot_sizing_qip(LotSizingParams{3, 2, 2, s, false}));
    KnapsackParams k;
    k.n = 2;
    k.T = 2;
    k.seed = s;
    out.push_back(build_knapsack_qip_pu(k));
  }
  return out;
}

Outcome criterion4() {
  Outcome o;
  std::uint64_t pruned = 0;
  std::uint64_t full = 0;
  std::size_t count = 0;
  for (const QipInstance& q : oracle_suite()) {
    ++count;
    const SolveResult ex = oracle_solve(q);
    const SolveResult ab = solve(q);
    SearchConfig off;
    off.bounds_enabled = false;
    const SolveResult nb = solve(q, off);
    pruned += ab.nodes;
    full += ex.nodes;
    if (ab.nodes > ex.nodes || ab.value != ex.value || nb.value != ab.value || ab.status != ex.status) {
      o.pass = false;
      o.detail = q.name + ": nodes " + std::to_string(ab.nodes) + " vs " + std::to_string(ex.nodes) + ", values " +
                 show(ab.value) + " / " + show(ex.value) + " / unbounded " + show(nb.value);
      return o;
    }
  }
  std::ostringstream os;
  os << count << " instances; " << pruned << " pruned nodes vs " << full << " exhaustive";
  o.detail = os.str();
  return o;
}

// ---------------------------------------------------------------------------

BenchRecord timed(const std::string& id, const std::string& solver, std::optional<std::int64_t> ms) {
  BenchRecord r;
  r.instance_id = id;
  r.family = "sel";
  r.model = "QIPPU";
  r.solver = solver;
  r.status = ms ? BenchStatus::Optimal : BenchStatus::TimeLimit;
  r.time_ms = ms.value_or(0);
  return r;
}

Outcome criterion5() {
  Outcome o;
  const ProfileTable ab = performance_profile(
      {timed("i1", "A", 2), timed("i2", "A", 4), timed("i1", "B", 4), timed("i2", "B", 2)});
  const bool example = ab.taus.size() >= 3 && ab.taus[2] == Rational(2) && ab.p[0][0] == 0.5 && ab.p[1][0] == 0.5 &&
                       ab.p[0][2] == 1.0 && ab.p[1][2] == 1.0;
  if (!example) {
    o.pass = false;
    o.detail = "A/B example mismatch";
    return o;
  }
  SplitMix64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const int solvers = static_cast<int>(rng.draw(1, 5));
    const int instances = static_cast<int>(rng.draw(1, 10));
    std::vector<BenchRecord> recs;
    for (int s = 0; s < solvers; ++s)
      for (int i = 0; i < instances; ++i) {
        std::optional<std::int64_t> ms;
        if (rng.draw(0, 4) != 0) ms = rng.draw(0, 100);
        recs.push_back(timed("i" + std::to_string(i), "s" + std::to_string(s), ms));
      }
    const ProfileTable t = performance_profile(recs);
    for (const auto& row : t.p)
      for (std::size_t k = 0; k < row.size(); ++k)
        if (row[k] < 0.0 || row[k] > 1.0 || (k > 0 && row[k] < row[k - 1])) {
          o.pass = false;
          o.detail = "random set " + std::to_string(trial) + " breaks range or monotonicity";
          return o;
        }
  }
  o.detail = "A/B example exact; 1000 random record sets monotone within [0,1]";
  return o;
}

// ---------------------------------------------------------------------------

Outcome criterion6() {
  Outcome o;
  constexpr double guard = 1e5;
  std::size_t plays_checked = 0;
  auto fail = [&](const std::string& what) {
    if (o.pass) o.detail = what;
    o.pass = false;
  };
  for (std::uint64_t s = 0; s < 20; ++s) {
    {
      const SelectionParams p{4, 2, 2, 2, s};
      const QipInstance q = build_selection_qip_pu(p);
      const auto at = index_of(q);
      for (const auto& x : oracle_strategy_plays(q, guard)) {
        ++plays_checked;
        Int total = 0;
        for (int i = 1; i <= p.n; ++i) {
          Int item = 0;
          for (int t = 0; t <= p.T; ++t) item += x[at.at(idx("x", t, i))];
          if (item > 1) fail("selection seed " + std::to_string(s) + ": item bought twice");
          total += item;
        }
        if (total != p.p) fail("selection seed " + std::to_string(s) + ": " + std::to_string(total) + " items");
      }
    }
    {
      const AssignmentParams p{2, 2, 2, s};
      const QipInstance q = build_assignment_qip_pu(p);
      const auto at = index_of(q);
      for (const auto& x : oracle_strategy_plays(q, guard)) {
        ++plays_checked;
        std::vector<Int> row(static_cast<std::size_t>(p.n), 0);
        std::vector<Int> col(static_cast<std::size_t>(p.n), 0);
        for (int i = 1; i <= p.n; ++i)
          for (int j = 1; j <= p.n; ++j)
            for (int t = 0; t <= p.T; ++t) {
              const Int v = x[at.at(idx("x", t, i) + "_" + std::to_string(j))];
              row[i - 1] += v;
              col[j - 1] += v;
            }
        for (int i = 0; i < p.n; ++i)
          if (row[i] != 1 || col[i] != 1) fail("assignment seed " + std::to_string(s) + ": not a perfect matching");
      }
    }
    {
      const LotSizingParams p{3, 2, 2, s, false};
      const LotSizingData d = lot_sizing_data(p);
      const QipInstance q = build_lot_sizing_qip(p, d);
      const auto at = index_of(q);
      for (const auto& x : oracle_strategy_plays(q, guard)) {
        ++plays_checked;
        // I_t = sum over t' <= t of orders arriving in t' minus demand in t'.
        Int inventory = 0;
        for (int t = 1; t <= p.T; ++t) {
          for (int b = 1; b <= p.B; ++b) inventory += d.q[b - 1] * x[at.at(idx("x", t - 1, b))];
          for (int u = 1; u <= p.U; ++u) inventory += d.pu[u - 1] * x[at.at(idx("y", t, u))];
          inventory -= x[at.at("z" + std::to_string(t))] == 1 ? d.d_hi[t - 1] : d.d_lo[t - 1];
          if (inventory < 0) fail("lot-sizing seed " + std::to_string(s) + ": negative inventory");
        }
      }
    }
    {
      KnapsackParams p;
      p.n = 3;
      p.T = 1;
      p.seed = s;
      const KnapsackData d = knapsack_data(p);
      const QipInstance q = build_knapsack_qip_pu(p, d);
      const auto at = index_of(q);
      for (const auto& x : oracle_strategy_plays(q, guard)) {
        ++plays_checked;
        Int running = 0;
        for (int t = 1; t <= p.T; ++t) {
          Int period = 0;
          for (int i = 1; i <= p.n; ++i) period += x[at.at(idx("z", t, i))];
          running += period;
          if (period > d.alpha || running > d.beta) fail("knapsack seed " + std::to_string(s) + ": budget exceeded");
        }
      }
    }
  }
  if (o.pass) o.detail = std::to_string(plays_checked) + " strategy plays over 80 instances";
  return o;
}

// ---------------------------------------------------------------------------

Outcome criterion7() {
  Outcome o;
  std::size_t checked = 0;
  auto check = [&](const QipInstance& q, const std::string& what) {
    ++checked;
    const std::string text = write_qlp(q);
    const QipInstance back = parse_qlp(text);
    if (o.pass && (back != q || write_qlp(back) != text)) {
      o.pass = false;
      o.detail = what + " does not round-trip";
    }
  };
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::string seed = " seed " + std::to_string(s);
    const SelectionParams sp{4, 2, 2, 3, s};
    check(build_selection_qip_pu(sp), "selection QIPPU" + seed);
    check(build_selection_qip(sp), "selection QIP" + seed);
    check(build_selection_dep(sp).model, "selection DEP" + seed);
    check(flatten(build_selection_qip_pu(sp)).model, "selection flatten" + seed);
    const AssignmentParams ap{3, 2, 2, s};
    check(build_assignment_qip_pu(ap), "assignment QIPPU" + seed);
    check(build_assignment_qip(ap), "assignment QIP" + seed);
    check(build_assignment_dep(ap).model, "assignment DEP" + seed);
    const LotSizingParams lp{3, 2, 3, s, false};
    check(build_lot_sizing_qip(lp), "lot-sizing QIP" + seed);
    check(build_lot_sizing_dep(lp).model, "lot-sizing DEP" + seed);
    check(flatten(build_lot_sizing_qip(lp)).model, "lot-sizing flatten" + seed);
    KnapsackParams kp;
    kp.n = 4;
    kp.T = 2;
    kp.seed = s;
    check(build_knapsack_qip_pu(kp), "knapsack QIPPU" + seed);
    check(build_knapsack_dep(kp).model, "knapsack DEP" + seed);
  }
  if (o.pass) o.detail = std::to_string(checked) + " generator outputs round-trip canonically";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"three-way value equivalence", criterion1}, {"DEP size law", criterion2},
      {"scaling shape", criterion3},               {"alpha-beta correctness", criterion4},
      {"performance profiles", criterion5},        {"strategy invariants", criterion6},
      {"serialization", criterion7},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
