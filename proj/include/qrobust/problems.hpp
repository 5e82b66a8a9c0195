#pragma once

// Seeded instance generators for the multistage robust selection,
// assignment, lot-sizing and knapsack families. Each family has a quantified
// model with universal constraints (QIP^PU, where the family has one), a
// plain QIP (selection and assignment), and a hand-built deterministic
// equivalent used as a fixture against the generic flattener.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrobust/dep.hpp"
#include "qrobust/model.hpp"
#include "qrobust/rng.hpp"

namespace qrobust {

// ---------------------------------------------------------------------------
// Parameters and drawn data

struct SelectionParams {
  int n = 4;
  int p = 2;
  int T = 1;
  int N = 2;
  std::uint64_t seed = 0;
};

struct SelectionData {
  std::vector<Int> c0;                         // [i]
  std::vector<std::vector<std::vector<Int>>> c;  // [t-1][k][i]
};

struct AssignmentParams {
  int n = 3;
  int T = 1;
  int N = 2;
  std::uint64_t seed = 0;
};

struct AssignmentData {
  std::vector<std::vector<Int>> c0;                           // [i][j]
  std::vector<std::vector<std::vector<std::vector<Int>>>> c;  // [t-1][k][i][j]
};

struct LotSizingParams {
  int B = 3;
  int U = 2;
  int T = 3;
  std::uint64_t seed = 0;
  bool collapse_demand = false;  // upper demand := lower demand
};

struct LotSizingData {
  Int cB = 0;
  Int cU = 0;
  Int cS = 0;
  std::vector<Int> q;      // [b] basic order quantities
  std::vector<Int> pu;     // [u] urgent order quantities
  std::vector<Int> d_lo;   // [t-1]
  std::vector<Int> d_hi;   // [t-1]
};

struct KnapsackParams {
  int n = 3;
  int T = 1;
  std::uint64_t seed = 0;
  std::optional<Int> alpha;
  std::optional<Int> beta;
  std::optional<Int> capacity;
};

struct KnapsackData {
  std::vector<std::vector<Int>> p;  // [t][i], t = 0..T
  std::vector<std::vector<Int>> w;  // [t][i], t = 0..T
  std::vector<std::vector<Int>> a;  // [t-1][i], t = 1..T
  std::vector<Int> b;               // [i]
  Int capacity = 0;
  Int alpha = 0;
  Int beta = 0;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

inline std::string idx(const std::string& base, int t, int i) {
  return base + std::to_string(t) + "_" + std::to_string(i);
}

inline Int cost_sum(const std::vector<Int>& v) {
  Int s = 0;
  for (Int x : v) s += x;
  return s;
}

}  // namespace detail

inline void check(const SelectionParams& p) {
  detail::require(p.p >= 1 && p.n == 2 * p.p, "selection needs n = 2p with p >= 1");
  detail::require(p.T >= 1 && p.N >= 1, "selection needs T >= 1 and N >= 1");
}
inline void check(const AssignmentParams& p) {
  detail::require(p.n >= 1 && p.T >= 1 && p.N >= 1, "assignment needs n, T, N >= 1");
}
inline void check(const LotSizingParams& p) {
  detail::require(p.B >= 1 && p.B <= 4, "lot-sizing needs 1 <= B <= 4");
  detail::require(p.U >= 1 && p.T >= 1, "lot-sizing needs U >= 1 and T >= 1");
}
inline void check(const KnapsackParams& p) {
  detail::require(p.n >= 1 && p.T >= 1, "knapsack needs n >= 1 and T >= 1");
  detail::require(!p.alpha || *p.alpha >= 0, "knapsack alpha must be nonnegative");
  detail::require(!p.beta || *p.beta >= 0, "knapsack beta must be nonnegative");
  detail::require(!p.capacity || *p.capacity >= 0, "knapsack capacity must be nonnegative");
}

inline SelectionData selection_data(const SelectionParams& p) {
  check(p);
  SplitMix64 rng(p.seed);
  SelectionData d;
  for (int i = 0; i < p.n; ++i) d.c0.push_back(rng.draw(0, 99));
  d.c.assign(static_cast<std::size_t>(p.T), std::vector<std::vector<Int>>(static_cast<std::size_t>(p.N)));
  for (int t = 0; t < p.T; ++t)
    for (int k = 0; k < p.N; ++k)
      for (int i = 0; i < p.n; ++i) d.c[t][k].push_back(rng.draw(0, 99));
  return d;
}

inline AssignmentData assignment_data(const AssignmentParams& p) {
  check(p);
  SplitMix64 rng(p.seed);
  AssignmentData d;
  d.c0.assign(static_cast<std::size_t>(p.n), {});
  for (int i = 0; i < p.n; ++i)
    for (int j = 0; j < p.n; ++j) d.c0[i].push_back(rng.draw(0, 99));
  d.c.assign(static_cast<std::size_t>(p.T),
             std::vector<std::vector<std::vector<Int>>>(static_cast<std::size_t>(p.N),
                                                        std::vector<std::vector<Int>>(static_cast<std::size_t>(p.n))));
  for (int t = 0; t < p.T; ++t)
    for (int k = 0; k < p.N; ++k)
      for (int i = 0; i < p.n; ++i)
        for (int j = 0; j < p.n; ++j) d.c[t][k][i].push_back(rng.draw(0, 99));
  return d;
}

inline LotSizingData lot_sizing_data(const LotSizingParams& p) {
  check(p);
  SplitMix64 rng(p.seed);
  LotSizingData d;
  d.cB = rng.draw(0, 5);
  do {
    d.cU = rng.draw(0, 10);
  } while (d.cU <= d.cB);
  d.cS = rng.draw(0, 10);
  for (int t = 0; t < p.T; ++t) {
    d.d_lo.push_back(rng.draw(0, 25));
    d.d_hi.push_back(rng.draw(75, 100));
  }
  if (p.collapse_demand) d.d_hi = d.d_lo;
  for (int b = 1; b <= p.B; ++b) d.q.push_back(Int{128} >> b);
  for (int u = 1; u <= p.U; ++u) d.pu.push_back(100 / u);
  return d;
}

inline KnapsackData knapsack_data(const KnapsackParams& p) {
  check(p);
  SplitMix64 rng(p.seed);
  KnapsackData d;
  d.p.assign(static_cast<std::size_t>(p.T) + 1, {});
  d.w.assign(static_cast<std::size_t>(p.T) + 1, {});
  d.a.assign(static_cast<std::size_t>(p.T), {});
  for (int t = 0; t <= p.T; ++t)
    for (int i = 0; i < p.n; ++i) d.p[t].push_back(rng.draw(0, 100));
  for (int t = 0; t <= p.T; ++t)
    for (int i = 0; i < p.n; ++i) d.w[t].push_back(rng.draw(0, 50));
  for (int t = 0; t < p.T; ++t)
    for (int i = 0; i < p.n; ++i) d.a[t].push_back(rng.draw(5, 20));
  for (int i = 0; i < p.n; ++i) d.b.push_back(rng.draw(0, 50));
  const Int w0 = detail::cost_sum(d.w[0]);
  d.capacity = rng.draw(w0 / 3, w0);
  if (p.capacity) d.capacity = *p.capacity;
  d.alpha = p.alpha ? *p.alpha : (p.n + p.T) / (p.T + 1) + 1;
  d.beta = p.beta ? *p.beta : p.n;
  return d;
}

// ---------------------------------------------------------------------------
// Selection

/// Objective-uncertain selection with universal constraints: the adversary
/// picks one scenario vector q^t per period.
inline QipInstance build_selection_qip_pu(const SelectionParams& p, const SelectionData& d) {
  check(p);
  InstanceBuilder b("selection_qippu");
  std::vector<std::vector<int>> x(static_cast<std::size_t>(p.T) + 1);
  std::vector<std::vector<int>> q(static_cast<std::size_t>(p.T) + 1);
  std::vector<int> z;
  b.block(Quantifier::Exists);
  for (int i = 1; i <= p.n; ++i) x[0].push_back(b.binary(detail::idx("x", 0, i)));
  for (int t = 1; t <= p.T; ++t) {
    b.block(Quantifier::ForAll);
    for (int k = 1; k <= p.N; ++k) q[t].push_back(b.binary(detail::idx("q", t, k)));
    b.block(Quantifier::Exists);
    for (int i = 1; i <= p.n; ++i) x[t].push_back(b.binary(detail::idx("x", t, i)));
  }
  for (int t = 1; t <= p.T; ++t) {
    Int ub = 0;
    for (int k = 0; k < p.N; ++k) ub = std::max(ub, detail::cost_sum(d.c[t - 1][k]));
    z.push_back(b.var("z" + std::to_string(t), 0, ub, VarKind::TrailingContinuous));
  }

  for (int i = 0; i < p.n; ++i) b.objective(x[0][i], d.c0[i]);
  for (int v : z) b.objective(v, 1);

  std::vector<Term> all;
  for (int t = 0; t <= p.T; ++t)
    for (int v : x[t]) all.push_back(Term{v, 1});
  b.row(all, Sense::EQ, p.p);
  for (int i = 0; i < p.n; ++i) {
    std::vector<Term> once;
    for (int t = 0; t <= p.T; ++t) once.push_back(Term{x[t][i], 1});
    b.row(once, Sense::LE, 1);
  }
  for (int t = 1; t <= p.T; ++t) {
    for (int k = 0; k < p.N; ++k) {
      const Int M = detail::cost_sum(d.c[t - 1][k]);
      std::vector<Term> row;
      for (int i = 0; i < p.n; ++i) row.push_back(Term{x[t][i], d.c[t - 1][k][i]});
      row.push_back(Term{z[t - 1], -1});
      row.push_back(Term{q[t][k], M});
      b.row(row, Sense::LE, M);
    }
  }
  for (int t = 1; t <= p.T; ++t) {
    std::vector<Term> one;
    for (int v : q[t]) one.push_back(Term{v, 1});
    b.universal_row(one, Sense::EQ, 1);
  }
  return b.build();
}

inline QipInstance build_selection_qip_pu(const SelectionParams& p) {
  return build_selection_qip_pu(p, selection_data(p));
}

/// Same problem without universal constraints: the adversary picks a
/// scenario number l_t in [1, N] and existential indicators decode it.
inline QipInstance build_selection_qip(const SelectionParams& p, const SelectionData& d) {
  check(p);
  InstanceBuilder b("selection_qip");
  std::vector<std::vector<int>> x(static_cast<std::size_t>(p.T) + 1);
  std::vector<std::vector<int>> q(static_cast<std::size_t>(p.T) + 1);
  std::vector<int> l(static_cast<std::size_t>(p.T) + 1, -1);
  std::vector<int> z;
  b.block(Quantifier::Exists);
  for (int i = 1; i <= p.n; ++i) x[0].push_back(b.binary(detail::idx("x", 0, i)));
  for (int t = 1; t <= p.T; ++t) {
    b.block(Quantifier::ForAll);
    l[t] = b.var("l" + std::to_string(t), 1, p.N);
    b.block(Quantifier::Exists);
    for (int k = 1; k <= p.N; ++k) q[t].push_back(b.binary(detail::idx("q", t, k)));
    for (int i = 1; i <= p.n; ++i) x[t].push_back(b.binary(detail::idx("x", t, i)));
  }
  for (int t = 1; t <= p.T; ++t) {
    Int ub = 0;
    for (int k = 0; k < p.N; ++k) ub = std::max(ub, detail::cost_sum(d.c[t - 1][k]));
    z.push_back(b.var("z" + std::to_string(t), 0, ub, VarKind::TrailingContinuous));
  }

  for (int i = 0; i < p.n; ++i) b.objective(x[0][i], d.c0[i]);
  for (int v : z) b.objective(v, 1);

  std::vector<Term> all;
  for (int t = 0; t <= p.T; ++t)
    for (int v : x[t]) all.push_back(Term{v, 1});
  b.row(all, Sense::EQ, p.p);
  for (int i = 0; i < p.n; ++i) {
    std::vector<Term> once;
    for (int t = 0; t <= p.T; ++t) once.push_back(Term{x[t][i], 1});
    b.row(once, Sense::LE, 1);
  }
  for (int t = 1; t <= p.T; ++t) {
    for (int k = 0; k < p.N; ++k) {
      const Int M = detail::cost_sum(d.c[t - 1][k]);
      std::vector<Term> row;
      for (int i = 0; i < p.n; ++i) row.push_back(Term{x[t][i], d.c[t - 1][k][i]});
      row.push_back(Term{z[t - 1], -1});
      row.push_back(Term{q[t][k], M});
      b.row(row, Sense::LE, M);
    }
  }
  for (int t = 1; t <= p.T; ++t) {
    std::vector<Term> one;
    std::vector<Term> decode;
    for (int k = 0; k < p.N; ++k) {
      one.push_back(Term{q[t][k], 1});
      decode.push_back(Term{q[t][k], k + 1});
    }
    decode.push_back(Term{l[t], -1});
    b.row(one, Sense::EQ, 1);
    b.row(decode, Sense::EQ, 0);
  }
  return b.build();
}

inline QipInstance build_selection_qip(const SelectionParams& p) { return build_selection_qip(p, selection_data(p)); }

namespace detail {

// Prefix tree of [N]^T in depth-first preorder, the order used by the
// hand-built DEPs and by the generic flattener.
struct PrefixTree {
  std::vector<int> parent;
  std::vector<int> depth;
  std::vector<int> scenario;  // 0-based scenario of the last period (-1 at root)
  std::vector<int> leaves;

  PrefixTree(int N, int T) {
    auto rec = [&](auto&& self, int par, int d, int k) -> void {
      const int id = static_cast<int>(parent.size());
      parent.push_back(par);
      depth.push_back(d);
      scenario.push_back(k);
      if (d == T) {
        leaves.push_back(id);
        return;
      }
      for (int c = 0; c < N; ++c) self(self, id, d + 1, c);
    };
    rec(rec, -1, 0, -1);
  }

  /// Path root..node as node ids.
  [[nodiscard]] std::vector<int> path(int node) const {
    std::vector<int> out;
    for (int v = node; v >= 0; v = parent[v]) out.push_back(v);
    return {out.rbegin(), out.rend()};
  }
};

inline Rational lin_min(const std::vector<Term>& terms, const std::vector<VarDomain>& d) {
  Rational s;
  for (const Term& t : terms) s += t.coef * Rational(t.coef.sign() > 0 ? d[t.var].lower : d[t.var].upper);
  return s;
}
inline Rational lin_max(const std::vector<Term>& terms, const std::vector<VarDomain>& d) {
  Rational s;
  for (const Term& t : terms) s += t.coef * Rational(t.coef.sign() > 0 ? d[t.var].upper : d[t.var].lower);
  return s;
}

// Adds `z >= terms + constant` for every leaf and sets z's bounds.
inline void add_epigraph(QipInstance& m, int z, const std::vector<std::pair<std::vector<Term>, Rational>>& leaves) {
  bool first = true;
  Rational lo;
  Rational hi;
  for (const auto& [terms, constant] : leaves) {
    auto t = normalize_terms(terms);
    const Rational a = lin_min(t, m.domains) + constant;
    const Rational b = lin_max(t, m.domains) + constant;
    lo = first ? a : max(lo, a);
    hi = first ? b : max(hi, b);
    first = false;
    t.push_back(Term{z, Rational(-1)});
    m.existential_rows.push_back(LinConstraint::make(std::move(t), Sense::LE, -constant));
  }
  m.domains[z].lower = lo.floor();
  m.domains[z].upper = hi.ceil();
}

inline int add_var(QipInstance& m, std::string name, VarDomain dom) {
  const int v = m.num_vars();
  m.var_names.push_back(std::move(name));
  m.domains.push_back(dom);
  m.blocks[0].vars.push_back(v);
  return v;
}

inline QipInstance single_block(std::string name) {
  QipInstance m;
  m.name = std::move(name);
  m.blocks.push_back(QuantBlock{Quantifier::Exists, {}});
  return m;
}

}  // namespace detail

/// Hand-built deterministic equivalent: item copies per scenario prefix and
/// one epigraph variable for the worst scenario sequence.
inline MipInstance build_selection_dep(const SelectionParams& p, const SelectionData& d) {
  check(p);
  const detail::PrefixTree tree(p.N, p.T);
  QipInstance m = detail::single_block("selection_dep");
  std::vector<std::vector<int>> x(tree.parent.size());
  for (std::size_t node = 0; node < tree.parent.size(); ++node)
    for (int i = 1; i <= p.n; ++i)
      x[node].push_back(detail::add_var(m, detail::idx("x", tree.depth[node], i) + "_h" + std::to_string(node),
                                        VarDomain{0, 1, VarKind::Integer}));
  const int z = detail::add_var(m, "z", VarDomain{0, 0, VarKind::TrailingContinuous});

  for (int i = 0; i < p.n; ++i) m.objective.push_back(Term{x[0][i], d.c0[i]});
  m.objective.push_back(Term{z, 1});
  m.objective = normalize_terms(m.objective);

  std::vector<std::pair<std::vector<Term>, Rational>> epi;
  for (int leaf : tree.leaves) {
    const auto path = tree.path(leaf);
    std::vector<Term> cost;
    std::vector<Term> count;
    for (int node : path) {
      for (int i = 0; i < p.n; ++i) {
        count.push_back(Term{x[node][i], 1});
        if (tree.depth[node] > 0) cost.push_back(Term{x[node][i], d.c[tree.depth[node] - 1][tree.scenario[node]][i]});
      }
    }
    epi.emplace_back(cost, Rational(0));
    m.existential_rows.push_back(LinConstraint::make(count, Sense::EQ, p.p));
    for (int i = 0; i < p.n; ++i) {
      std::vector<Term> once;
      for (int node : path) once.push_back(Term{x[node][i], 1});
      m.existential_rows.push_back(LinConstraint::make(once, Sense::LE, 1));
    }
  }
  detail::add_epigraph(m, z, epi);
  return MipInstance::from_model(std::move(m));
}

inline MipInstance build_selection_dep(const SelectionParams& p) { return build_selection_dep(p, selection_data(p)); }

// ---------------------------------------------------------------------------
// Assignment

inline QipInstance build_assignment_qip_pu(const AssignmentParams& p, const AssignmentData& d) {
  check(p);
  const int n = p.n;
  InstanceBuilder b("assignment_qippu");
  // x[t][i*n + j]
  std::vector<std::vector<int>> x(static_cast<std::size_t>(p.T) + 1);
  std::vector<std::vector<int>> q(static_cast<std::size_t>(p.T) + 1);
  std::vector<int> z;
  auto edge_name = [](int t, int i, int j) {
    return "x" + std::to_string(t) + "_" + std::to_string(i) + "_" + std::to_string(j);
  };
  b.block(Quantifier::Exists);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) x[0].push_back(b.binary(edge_name(0, i, j)));
  for (int t = 1; t <= p.T; ++t) {
    b.block(Quantifier::ForAll);
    for (int k = 1; k <= p.N; ++k) q[t].push_back(b.binary(detail::idx("q", t, k)));
    b.block(Quantifier::Exists);
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) x[t].push_back(b.binary(edge_name(t, i, j)));
  }
  auto scenario_sum = [&](int t, int k) {
    Int s = 0;
    for (const auto& row : d.c[t - 1][k]) s += detail::cost_sum(row);
    return s;
  };
  for (int t = 1; t <= p.T; ++t) {
    Int ub = 0;
    for (int k = 0; k < p.N; ++k) ub = std::max(ub, scenario_sum(t, k));
    z.push_back(b.var("z" + std::to_string(t), 0, ub, VarKind::TrailingContinuous));
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b.objective(x[0][i * n + j], d.c0[i][j]);
  for (int v : z) b.objective(v, 1);

  for (int i = 0; i < n; ++i) {
    std::vector<Term> row;
    for (int t = 0; t <= p.T; ++t)
      for (int j = 0; j < n; ++j) row.push_back(Term{x[t][i * n + j], 1});
    b.row(row, Sense::EQ, 1);
  }
  for (int j = 0; j < n; ++j) {
    std::vector<Term> row;
    for (int t = 0; t <= p.T; ++t)
      for (int i = 0; i < n; ++i) row.push_back(Term{x[t][i * n + j], 1});
    b.row(row, Sense::EQ, 1);
  }
  for (int t = 1; t <= p.T; ++t) {
    for (int k = 0; k < p.N; ++k) {
      const Int M = scenario_sum(t, k);
      std::vector<Term> row;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) row.push_back(Term{x[t][i * n + j], d.c[t - 1][k][i][j]});
      row.push_back(Term{z[t - 1], -1});
      row.push_back(Term{q[t][k], M});
      b.row(row, Sense::LE, M);
    }
    std::vector<Term> one;
    for (int v : q[t]) one.push_back(Term{v, 1});
    b.universal_row(one, Sense::EQ, 1);
  }
  return b.build();
}

inline QipInstance build_assignment_qip_pu(const AssignmentParams& p) {
  return build_assignment_qip_pu(p, assignment_data(p));
}

inline QipInstance build_assignment_qip(const AssignmentParams& p, const AssignmentData& d) {
  check(p);
  const int n = p.n;
  InstanceBuilder b("assignment_qip");
  std::vector<std::vector<int>> x(static_cast<std::size_t>(p.T) + 1);
  std::vector<std::vector<int>> q(static_cast<std::size_t>(p.T) + 1);
  std::vector<int> l(static_cast<std::size_t>(p.T) + 1, -1);
  std::vector<int> z;
  auto edge_name = [](int t, int i, int j) {
    return "x" + std::to_string(t) + "_" + std::to_string(i) + "_" + std::to_string(j);
  };
  b.block(Quantifier::Exists);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) x[0].push_back(b.binary(edge_name(0, i, j)));
  for (int t = 1; t <= p.T; ++t) {
    b.block(Quantifier::ForAll);
    l[t] = b.var("l" + std::to_string(t), 1, p.N);
    b.block(Quantifier::Exists);
    for (int k = 1; k <= p.N; ++k) q[t].push_back(b.binary(detail::idx("q", t, k)));
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) x[t].push_back(b.binary(edge_name(t, i, j)));
  }
  auto scenario_sum = [&](int t, int k) {
    Int s = 0;
    for (const auto& row : d.c[t - 1][k]) s += detail::cost_sum(row);
    return s;
  };
  for (int t = 1; t <= p.T; ++t) {
    Int ub = 0;
    for (int k = 0; k < p.N; ++k) ub = std::max(ub, scenario_sum(t, k));
    z.push_back(b.var("z" + std::to_string(t), 0, ub, VarKind::TrailingContinuous));
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b.objective(x[0][i * n + j], d.c0[i][j]);
  for (int v : z) b.objective(v, 1);

  for (int i = 0; i < n; ++i) {
    std::vector<Term> row;
    for (int t = 0; t <= p.T; ++t)
      for (int j = 0; j < n; ++j) row.push_back(Term{x[t][i * n + j], 1});
    b.row(row, Sense::EQ, 1);
  }
  for (int j = 0; j < n; ++j) {
    std::vector<Term> row;
    for (int t = 0; t <= p.T; ++t)
      for (int i = 0; i < n; ++i) row.push_back(Term{x[t][i * n + j], 1});
    b.row(row, Sense::EQ, 1);
  }
  for (int t = 1; t <= p.T; ++t) {
    for (int k = 0; k < p.N; ++k) {
      const Int M = scenario_sum(t, k);
      std::vector<Term> row;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) row.push_back(Term{x[t][i * n + j], d.c[t - 1][k][i][j]});
      row.push_back(Term{z[t - 1], -1});
      row.push_back(Term{q[t][k], M});
      b.row(row, Sense::LE, M);
    }
    std::vector<Term> one;
    std::vector<Term> decode;
    for (int k = 0; k < p.N; ++k) {
      one.push_back(Term{q[t][k], 1});
      decode.push_back(Term{q[t][k], k + 1});
    }
    decode.push_back(Term{l[t], -1});
    b.row(one, Sense::EQ, 1);
    b.row(decode, Sense::EQ, 0);
  }
  return b.build();
}

inline QipInstance build_assignment_qip(const AssignmentParams& p) {
  return build_assignment_qip(p, assignment_data(p));
}

inline MipInstance build_assignment_dep(const AssignmentParams& p, const AssignmentData& d) {
  check(p);
  const int n = p.n;
  const detail::PrefixTree tree(p.N, p.T);
  QipInstance m = detail::single_block("assignment_dep");
  std::vector<std::vector<int>> x(tree.parent.size());
  for (std::size_t node = 0; node < tree.parent.size(); ++node)
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j)
        x[node].push_back(detail::add_var(m,
                                          "x" + std::to_string(tree.depth[node]) + "_" + std::to_string(i) + "_" +
                                              std::to_string(j) + "_h" + std::to_string(node),
                                          VarDomain{0, 1, VarKind::Integer}));
  const int z = detail::add_var(m, "z", VarDomain{0, 0, VarKind::TrailingContinuous});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.objective.push_back(Term{x[0][i * n + j], d.c0[i][j]});
  m.objective.push_back(Term{z, 1});
  m.objective = normalize_terms(m.objective);

  std::vector<std::pair<std::vector<Term>, Rational>> epi;
  for (int leaf : tree.leaves) {
    const auto path = tree.path(leaf);
    std::vector<Term> cost;
    for (int node : path) {
      if (tree.depth[node] == 0) continue;
      const auto& c = d.c[tree.depth[node] - 1][tree.scenario[node]];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cost.push_back(Term{x[node][i * n + j], c[i][j]});
    }
    epi.emplace_back(cost, Rational(0));
    for (int i = 0; i < n; ++i) {
      std::vector<Term> row;
      for (int node : path)
        for (int j = 0; j < n; ++j) row.push_back(Term{x[node][i * n + j], 1});
      m.existential_rows.push_back(LinConstraint::make(row, Sense::EQ, 1));
    }
    for (int j = 0; j < n; ++j) {
      std::vector<Term> row;
      for (int node : path)
        for (int i = 0; i < n; ++i) row.push_back(Term{x[node][i * n + j], 1});
      m.existential_rows.push_back(LinConstraint::make(row, Sense::EQ, 1));
    }
  }
  detail::add_epigraph(m, z, epi);
  return MipInstance::from_model(std::move(m));
}

inline MipInstance build_assignment_dep(const AssignmentParams& p) {
  return build_assignment_dep(p, assignment_data(p));
}

// ---------------------------------------------------------------------------
// Lot-sizing

/// Single-item lot-sizing with binary demand realizations; the inventory
/// levels are substituted into the rows I_t >= 0 and into the objective.
inline QipInstance build_lot_sizing_qip(const LotSizingParams& p, const LotSizingData& d) {
  check(p);
  InstanceBuilder b("lot_sizing_qip");
  std::vector<std::vector<int>> x(static_cast<std::size_t>(p.T));      // x[t], t = 0..T-1
  std::vector<std::vector<int>> y(static_cast<std::size_t>(p.T) + 1);  // y[t], t = 1..T
  std::vector<int> z(static_cast<std::size_t>(p.T) + 1, -1);
  b.block(Quantifier::Exists);
  for (int bb = 1; bb <= p.B; ++bb) x[0].push_back(b.binary(detail::idx("x", 0, bb)));
  for (int t = 1; t <= p.T; ++t) {
    b.block(Quantifier::ForAll);
    z[t] = b.binary("z" + std::to_string(t));
    b.block(Quantifier::Exists);
    for (int u = 1; u <= p.U; ++u) y[t].push_back(b.binary(detail::idx("y", t, u)));
    if (t < p.T)
      for (int bb = 1; bb <= p.B; ++bb) x[t].push_back(b.binary(detail::idx("x", t, bb)));
  }

  // Objective: ordering costs plus cS * sum_t I_t, where the flow of period
  // t' enters I_t for every t >= t', i.e. (T - t' + 1) times.
  Rational constant;
  for (int t = 1; t <= p.T; ++t) {
    const Int times = p.T - t + 1;
    for (int bb = 0; bb < p.B; ++bb) b.objective(x[t - 1][bb], d.cB * d.q[bb] + d.cS * times * d.q[bb]);
    for (int u = 0; u < p.U; ++u) b.objective(y[t][u], d.cU * d.pu[u] + d.cS * times * d.pu[u]);
    b.objective(z[t], -d.cS * times * (d.d_hi[t - 1] - d.d_lo[t - 1]));
    constant -= Rational(d.cS * times * d.d_lo[t - 1]);
  }
  b.objective_constant(constant);

  for (int t = 1; t <= p.T; ++t) {
    std::vector<Term> row;
    Int demand = 0;
    for (int s = 1; s <= t; ++s) {
      for (int bb = 0; bb < p.B; ++bb) row.push_back(Term{x[s - 1][bb], -d.q[bb]});
      for (int u = 0; u < p.U; ++u) row.push_back(Term{y[s][u], -d.pu[u]});
      row.push_back(Term{z[s], d.d_hi[s - 1] - d.d_lo[s - 1]});
      demand += d.d_lo[s - 1];
    }
    b.row(row, Sense::LE, -demand);
  }
  return b.build();
}

inline QipInstance build_lot_sizing_qip(const LotSizingParams& p) {
  return build_lot_sizing_qip(p, lot_sizing_data(p));
}

inline MipInstance build_lot_sizing_dep(const LotSizingParams& p, const LotSizingData& d) {
  check(p);
  const detail::PrefixTree tree(2, p.T);
  QipInstance m = detail::single_block("lot_sizing_dep");
  std::vector<std::vector<int>> x(tree.parent.size());
  std::vector<std::vector<int>> y(tree.parent.size());
  for (std::size_t node = 0; node < tree.parent.size(); ++node) {
    const int t = tree.depth[node];
    const std::string h = node == 0 ? "" : "_h" + std::to_string(node);
    if (t >= 1)
      for (int u = 1; u <= p.U; ++u)
        y[node].push_back(detail::add_var(m, detail::idx("y", t, u) + h, VarDomain{0, 1, VarKind::Integer}));
    if (t < p.T)
      for (int bb = 1; bb <= p.B; ++bb)
        x[node].push_back(detail::add_var(m, detail::idx("x", t, bb) + h, VarDomain{0, 1, VarKind::Integer}));
  }
  const int z = detail::add_var(m, "z", VarDomain{0, 0, VarKind::TrailingContinuous});
  m.objective.push_back(Term{z, 1});

  auto demand = [&](int node) {
    const int t = tree.depth[node];
    return d.d_lo[t - 1] + (tree.scenario[node] == 1 ? d.d_hi[t - 1] - d.d_lo[t - 1] : 0);
  };
  // Inventory rows depend only on the prefix, so one per non-root node.
  for (std::size_t node = 1; node < tree.parent.size(); ++node) {
    const auto path = tree.path(static_cast<int>(node));
    std::vector<Term> row;
    Int need = 0;
    for (std::size_t s = 1; s < path.size(); ++s) {
      for (int bb = 0; bb < p.B; ++bb) row.push_back(Term{x[path[s - 1]][bb], -d.q[bb]});
      for (int u = 0; u < p.U; ++u) row.push_back(Term{y[path[s]][u], -d.pu[u]});
      need += demand(path[s]);
    }
    m.existential_rows.push_back(LinConstraint::make(row, Sense::LE, -need));
  }
  std::vector<std::pair<std::vector<Term>, Rational>> epi;
  for (int leaf : tree.leaves) {
    const auto path = tree.path(leaf);
    std::vector<Term> cost;
    Rational constant;
    for (std::size_t s = 1; s < path.size(); ++s) {
      const Int times = p.T - static_cast<Int>(s) + 1;
      for (int bb = 0; bb < p.B; ++bb)
        cost.push_back(Term{x[path[s - 1]][bb], d.cB * d.q[bb] + d.cS * times * d.q[bb]});
      for (int u = 0; u < p.U; ++u) cost.push_back(Term{y[path[s]][u], d.cU * d.pu[u] + d.cS * times * d.pu[u]});
      constant -= Rational(d.cS * times * demand(path[s]));
    }
    epi.emplace_back(cost, constant);
  }
  detail::add_epigraph(m, z, epi);
  return MipInstance::from_model(std::move(m));
}

inline MipInstance build_lot_sizing_dep(const LotSizingParams& p) {
  return build_lot_sizing_dep(p, lot_sizing_data(p));
}

// ---------------------------------------------------------------------------
// Knapsack

/// Multistage knapsack with budgeted weight increases. The product
/// (w + a z) x is linearized with v = x z. Stored negated (maximize flag).
inline QipInstance build_knapsack_qip_pu(const KnapsackParams& p, const KnapsackData& d) {
  check(p);
  const int n = p.n;
  InstanceBuilder b("knapsack_qippu");
  b.maximize();
  std::vector<std::vector<int>> x(static_cast<std::size_t>(p.T) + 1);
  std::vector<std::vector<int>> v(static_cast<std::size_t>(p.T) + 1);
  std::vector<std::vector<int>> y(static_cast<std::size_t>(p.T) + 1);
  std::vector<std::vector<int>> z(static_cast<std::size_t>(p.T) + 1);
  b.block(Quantifier::Exists);
  for (int i = 1; i <= n; ++i) x[0].push_back(b.binary(detail::idx("x", 0, i)));
  for (int t = 1; t <= p.T; ++t) {
    b.block(Quantifier::ForAll);
    for (int i = 1; i <= n; ++i) z[t].push_back(b.binary(detail::idx("z", t, i)));
    b.block(Quantifier::Exists);
    for (int i = 1; i <= n; ++i) x[t].push_back(b.binary(detail::idx("x", t, i)));
    for (int i = 1; i <= n; ++i) v[t].push_back(b.binary(detail::idx("v", t, i)));
    for (int i = 1; i <= n; ++i) y[t].push_back(b.binary(detail::idx("y", t, i)));
  }
  for (int t = 0; t <= p.T; ++t)
    for (int i = 0; i < n; ++i) b.objective(x[t][i], d.p[t][i]);
  for (int t = 1; t <= p.T; ++t)
    for (int i = 0; i < n; ++i) b.objective(y[t][i], d.b[i]);

  {
    std::vector<Term> row;
    for (int i = 0; i < n; ++i) row.push_back(Term{x[0][i], d.w[0][i]});
    b.row(row, Sense::LE, d.capacity);
  }
  for (int t = 1; t <= p.T; ++t) {
    std::vector<Term> row;
    for (int i = 0; i < n; ++i) {
      row.push_back(Term{x[t][i], d.w[t][i]});
      row.push_back(Term{v[t][i], d.a[t - 1][i]});
    }
    b.row(row, Sense::LE, d.capacity);
    for (int i = 0; i < n; ++i) {
      b.row({{v[t][i], 1}, {x[t][i], -1}}, Sense::LE, 0);
      b.row({{v[t][i], 1}, {z[t][i], -1}}, Sense::LE, 0);
      b.row({{x[t][i], 1}, {z[t][i], 1}, {v[t][i], -1}}, Sense::LE, 1);
      b.row({{y[t][i], 1}, {x[t - 1][i], 1}, {x[t][i], -1}}, Sense::LE, 1);
      b.row({{y[t][i], 1}, {x[t - 1][i], -1}, {x[t][i], 1}}, Sense::LE, 1);
    }
  }
  std::vector<Term> running;
  for (int t = 1; t <= p.T; ++t) {
    std::vector<Term> per;
    for (int i = 0; i < n; ++i) {
      per.push_back(Term{z[t][i], 1});
      running.push_back(Term{z[t][i], 1});
    }
    b.universal_row(per, Sense::LE, d.alpha);
    b.universal_row(running, Sense::LE, d.beta);
  }
  return b.build();
}

inline QipInstance build_knapsack_qip_pu(const KnapsackParams& p) {
  return build_knapsack_qip_pu(p, knapsack_data(p));
}

/// Hand-built DEP over the budget-feasible weight-increase patterns. The
/// epigraph bounds the negated profit of the later periods.
inline MipInstance build_knapsack_dep(const KnapsackParams& p, const KnapsackData& d) {
  check(p);
  const int n = p.n;
  // Scenario tree of z-patterns per period under the per-period and running budgets.
  struct Node {
    int parent;
    int depth;
    std::vector<Int> z;
    Int spent;
  };
  std::vector<Node> nodes{{-1, 0, {}, 0}};
  std::vector<int> leaves;
  auto grow = [&](auto&& self, int id) -> void {
    if (nodes[id].depth == p.T) {
      leaves.push_back(id);
      return;
    }
    std::vector<Int> pattern(static_cast<std::size_t>(n), 0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      Int ones = 0;
      for (int i = 0; i < n; ++i) {
        pattern[i] = static_cast<Int>((mask >> i) & 1u);
        ones += pattern[i];
      }
      if (ones > d.alpha || nodes[id].spent + ones > d.beta) continue;
      nodes.push_back(Node{id, nodes[id].depth + 1, pattern, nodes[id].spent + ones});
      self(self, static_cast<int>(nodes.size()) - 1);
    }
  };
  grow(grow, 0);

  QipInstance m = detail::single_block("knapsack_dep");
  m.maximize = true;
  std::vector<std::vector<int>> x(nodes.size());
  std::vector<std::vector<int>> y(nodes.size());
  for (std::size_t node = 0; node < nodes.size(); ++node) {
    const int t = nodes[node].depth;
    const std::string h = node == 0 ? "" : "_h" + std::to_string(node);
    for (int i = 1; i <= n; ++i)
      x[node].push_back(detail::add_var(m, detail::idx("x", t, i) + h, VarDomain{0, 1, VarKind::Integer}));
    if (t >= 1)
      for (int i = 1; i <= n; ++i)
        y[node].push_back(detail::add_var(m, detail::idx("y", t, i) + h, VarDomain{0, 1, VarKind::Integer}));
  }
  const int zeta = detail::add_var(m, "z", VarDomain{0, 0, VarKind::TrailingContinuous});
  // Internal minimization of the negated profit.
  for (int i = 0; i < n; ++i) m.objective.push_back(Term{x[0][i], -d.p[0][i]});
  m.objective.push_back(Term{zeta, 1});
  m.objective = normalize_terms(m.objective);

  {
    std::vector<Term> row;
    for (int i = 0; i < n; ++i) row.push_back(Term{x[0][i], d.w[0][i]});
    m.existential_rows.push_back(LinConstraint::make(row, Sense::LE, d.capacity));
  }
  for (std::size_t node = 1; node < nodes.size(); ++node) {
    const int t = nodes[node].depth;
    const int par = nodes[node].parent;
    std::vector<Term> row;
    for (int i = 0; i < n; ++i) row.push_back(Term{x[node][i], d.w[t][i] + d.a[t - 1][i] * nodes[node].z[i]});
    m.existential_rows.push_back(LinConstraint::make(row, Sense::LE, d.capacity));
    for (int i = 0; i < n; ++i) {
      m.existential_rows.push_back(
          LinConstraint::make({{y[node][i], 1}, {x[par][i], 1}, {x[node][i], -1}}, Sense::LE, 1));
      m.existential_rows.push_back(
          LinConstraint::make({{y[node][i], 1}, {x[par][i], -1}, {x[node][i], 1}}, Sense::LE, 1));
    }
  }
  std::vector<std::pair<std::vector<Term>, Rational>> epi;
  for (int leaf : leaves) {
    std::vector<Term> loss;
    for (int node = leaf; node > 0; node = nodes[node].parent) {
      const int t = nodes[node].depth;
      for (int i = 0; i < n; ++i) {
        loss.push_back(Term{x[node][i], -d.p[t][i]});
        loss.push_back(Term{y[node][i], -d.b[i]});
      }
    }
    epi.emplace_back(loss, Rational(0));
  }
  detail::add_epigraph(m, zeta, epi);
  MipInstance out = MipInstance::from_model(std::move(m));
  return out;
}

inline MipInstance build_knapsack_dep(const KnapsackParams& p) { return build_knapsack_dep(p, knapsack_data(p)); }

}  // namespace qrobust
