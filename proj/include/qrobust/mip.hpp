#pragma once

// Depth-first branch-and-bound for single-block instances (DEPs and plain
// MIPs) with bound propagation and incumbent cutoff.
//
// Once every integer variable with an objective coefficient is fixed and the
// remaining objective is a single epigraph variable z (z >= f_r(x) rows), the
// rest of the tree is solved as a min-max problem: the free variables split
// into independent components (rows ignoring z), each is minimized on its
// own, and z takes the largest component value.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qrobust/dep.hpp"
#include "qrobust/model.hpp"
#include "qrobust/relax.hpp"
#include "qrobust/search.hpp"
#include "qrobust/trailing.hpp"

namespace qrobust {

struct MipResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<Value> value;  // model sense; on TimeLimit the incumbent, if any
  bool value_is_bound = false;
  std::vector<Rational> assignment;  // present when a feasible point was found
  std::uint64_t nodes = 0;
  std::int64_t elapsed_ms = 0;
};

namespace detail {

class BranchAndBound {
 public:
  BranchAndBound(const QipInstance& m, const SearchConfig& cfg)
      : m_(m), cfg_(cfg), prop_(m.existential_rows, m.num_vars()), trailing_(m) {
    const int n = m.num_vars();
    coef_.assign(static_cast<std::size_t>(n), Rational(0));
    for (const Term& t : m.objective) coef_[t.var] = t.coef;
    for (int v = 0; v < n; ++v)
      if (m.domains[v].kind == VarKind::Integer) order_.push_back(v);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      const Rational ca = coef_[a].sign() < 0 ? -coef_[a] : coef_[a];
      const Rational cb = coef_[b].sign() < 0 ? -coef_[b] : coef_[b];
      return ca > cb;
    });
    std::vector<char> handled(m.existential_rows.size(), 0);
    for (int r : trailing_.handled_rows()) handled[r] = 1;
    for (std::size_t r = 0; r < m.existential_rows.size(); ++r)
      if (!handled[r]) plain_rows_.push_back(static_cast<int>(r));
    detect_epigraph();
  }

  MipResult run() {
    if (cfg_.time_limit_ms <= 0) throw std::invalid_argument("time limit must be positive");
    start_ = std::chrono::steady_clock::now();
    deadline_ = start_ + std::chrono::milliseconds(cfg_.time_limit_ms);
    MipResult res;
    bool aborted = false;
    try {
      BoundsState root = BoundsState::from(m_.domains);
      prop_.mark_all(root);
      if (prop_.propagate(root)) dfs(root);
    } catch (const SearchAbort&) {
      aborted = true;
    }
    res.nodes = nodes_;
    if (incumbent_) {
      res.value = m_.to_user(*incumbent_);
      res.assignment = best_;
    }
    if (aborted) {
      res.status = SolveStatus::TimeLimit;
      res.value_is_bound = incumbent_.has_value();
    } else if (incumbent_) {
      res.status = SolveStatus::Optimal;
    } else {
      res.status = SolveStatus::Infeasible;
      res.value = Value::infinity();
    }
    res.elapsed_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_).count();
    return res;
  }

 private:
  void detect_epigraph() {
    const auto& tv = trailing_.variables();
    if (tv.size() != 1) return;
    const int z = tv[0];
    if (coef_[z].sign() <= 0) return;
    for (const auto& row : m_.existential_rows)
      for (const Term& t : row.terms)
        if (t.var == z && (row.sense != Sense::LE || t.coef.sign() >= 0)) return;
    z_ = z;
  }

  void tick() {
    ++nodes_;
    if (cfg_.node_limit && nodes_ > *cfg_.node_limit) throw SearchAbort{};
    if ((nodes_ & 1023u) == 0 && std::chrono::steady_clock::now() >= deadline_) throw SearchAbort{};
  }

  int next_branch_var(const BoundsState& s) const {
    for (int v : order_)
      if (!s.is_fixed(v)) return v;
    return -1;
  }

  // Evaluates a point given by integer values; updates the incumbent.
  void consider(std::vector<Int> x) {
    for (int r : plain_rows_)
      if (!row_satisfied(m_.existential_rows[r], x)) return;
    std::vector<Rational> trailing_values;
    auto tr = trailing_.resolve(x, &trailing_values);
    if (!tr) return;
    Rational v = m_.objective_constant + *tr;
    for (const Term& t : m_.objective)
      if (m_.domains[t.var].kind == VarKind::Integer) v += t.coef * Rational(x[t.var]);
    if (incumbent_ && !(Value(v) < *incumbent_)) return;
    incumbent_ = Value(v);
    best_.assign(x.begin(), x.end());
    const auto& tv = trailing_.variables();
    for (std::size_t i = 0; i < tv.size(); ++i) best_[tv[i]] = trailing_values[i];
  }

  std::vector<Int> fixed_point(const BoundsState& s) const {
    std::vector<Int> x(static_cast<std::size_t>(m_.num_vars()), 0);
    for (int v = 0; v < m_.num_vars(); ++v)
      if (m_.domains[v].kind == VarKind::Integer) x[v] = s.lower[v].ceil();
    return x;
  }

  void dfs(BoundsState& s) {
    tick();
    const Rational lb = optimistic_value(m_.objective, m_.objective_constant, s, OptSense::Min);
    if (incumbent_ && !(Value(lb) < *incumbent_)) return;
    const int var = next_branch_var(s);
    if (var < 0) {
      consider(fixed_point(s));
      return;
    }
    if (z_ >= 0 && coef_[var].is_zero()) {
      epigraph_leaf(s);
      return;
    }
    const Int lo = s.lower[var].ceil();
    const Int hi = s.upper[var].floor();
    std::vector<Int> values;
    for (Int x = lo; x <= hi; ++x) values.push_back(x);
    if (coef_[var].sign() < 0) std::reverse(values.begin(), values.end());
    const std::size_t mark = trail_.size();
    for (Int x : values) {
      prop_.fix(s, var, Rational(x), &trail_);
      if (prop_.propagate(s, nullptr, &trail_)) dfs(s);
      undo(s, trail_, mark);
    }
  }

  using Witness = std::vector<std::pair<int, Int>>;

  void epigraph_leaf(BoundsState& s) {
    const Rational cz = coef_[z_];
    // objective = fixed + cz * z
    Rational fixed = m_.objective_constant;
    for (const Term& t : m_.objective)
      if (t.var != z_) fixed += t.coef * s.lower[t.var];
    const Value beta = incumbent_ ? Value((incumbent_->rational() - fixed) / cz) : Value::infinity();
    const Value alpha(s.lower[z_] - Rational(1));
    std::vector<int> free;
    for (int v : order_)
      if (!s.is_fixed(v)) free.push_back(v);
    std::sort(free.begin(), free.end());
    std::vector<char> active(m_.existential_rows.size(), 1);
    Witness w;
    const Value r = component(s, active, free, alpha, beta, w);
    if (!(r < beta) || r.is_infinite()) return;
    std::vector<Int> x = fixed_point(s);
    for (const auto& [v, val] : w) x[v] = val;
    consider(std::move(x));
  }

  // Minimum of z over completions of the free variables in `vars`, with
  // fail-soft bounds: a result <= alpha or >= beta is only a bound. `w`
  // receives values for `vars` attaining at most max(result, alpha).
  Value component(BoundsState s, const std::vector<char>& active, const std::vector<int>& vars, const Value& alpha,
                  const Value& beta, Witness& w) {
    tick();
    bool capped = false;
    if (beta.is_finite() && beta.rational() < s.upper[z_]) {
      s.upper[z_] = beta.rational();
      capped = true;
      if (s.upper[z_] < s.lower[z_]) return beta;
      prop_.mark_var(s, z_);
    }
    if (!prop_.propagate(s, &active)) return capped ? beta : Value::infinity();
    if (!(Value(s.lower[z_]) < beta)) return s.lower[z_];

    std::vector<int> free;
    for (int v : vars)
      if (!s.is_fixed(v)) free.push_back(v);
    w.clear();
    for (int v : vars)
      if (s.is_fixed(v)) w.emplace_back(v, s.lower[v].ceil());
    if (free.empty()) return s.lower[z_];

    // Union-find over free variables joined by rows that can still be violated.
    const int n = m_.num_vars();
    if (static_cast<int>(parent_.size()) != n) parent_.assign(static_cast<std::size_t>(n), 0);
    for (int v : free) parent_[v] = v;
    auto find = [&](int v) {
      while (parent_[v] != v) v = parent_[v] = parent_[parent_[v]];
      return v;
    };
    std::vector<char> is_free(static_cast<std::size_t>(n), 0);
    for (int v : free) is_free[v] = 1;
    std::vector<int> live_rows;
    std::vector<char> constrained(static_cast<std::size_t>(n), 0);
    for (std::size_t r = 0; r < active.size(); ++r) {
      if (active[r] == 0) continue;
      const LinConstraint& row = m_.existential_rows[r];
      const bool any_free =
          std::any_of(row.terms.begin(), row.terms.end(), [&](const Term& t) { return t.var != z_ && is_free[t.var]; });
      if (!any_free || entailed(row, s)) continue;
      live_rows.push_back(static_cast<int>(r));
      int first = -1;
      for (const Term& t : row.terms) {
        if (t.var == z_ || is_free[t.var] == 0) continue;
        constrained[t.var] = 1;
        if (first < 0) {
          first = t.var;
        } else {
          const int a = find(first);
          const int b = find(t.var);
          if (a != b) parent_[std::max(a, b)] = std::min(a, b);
        }
      }
    }
    std::vector<std::vector<int>> groups;
    std::vector<int> group_of(static_cast<std::size_t>(n), -1);
    for (int v : free) {
      if (constrained[v] == 0) {
        w.emplace_back(v, s.lower[v].ceil());
        continue;
      }
      const int root = find(v);
      if (group_of[root] < 0) {
        group_of[root] = static_cast<int>(groups.size());
        groups.emplace_back();
      }
      groups[group_of[root]].push_back(v);
    }
    if (groups.empty()) return s.lower[z_];

    if (groups.size() > 1) {
      Value running = s.lower[z_];
      for (const auto& g : groups) {
        std::vector<char> sub(active.size(), 0);
        for (int r : live_rows) {
          const auto& terms = m_.existential_rows[r].terms;
          if (std::any_of(terms.begin(), terms.end(),
                          [&](const Term& t) { return t.var != z_ && is_free[t.var] && find(t.var) == find(g[0]); }))
            sub[r] = 1;
        }
        Witness wg;
        const Value a = alpha < running ? running : alpha;
        const Value r = component(s, sub, g, a, beta, wg);
        if (running < r) running = r;
        w.insert(w.end(), wg.begin(), wg.end());
        if (!(running < beta)) return running;
      }
      return running;
    }

    const std::vector<int>& g = groups[0];
    std::vector<char> sub(active.size(), 0);
    for (int r : live_rows) sub[r] = 1;
    const int var = g[0];
    Value best = Value::infinity();
    Witness best_w;
    for (Int x = s.lower[var].ceil(); x <= s.upper[var].floor(); ++x) {
      BoundsState child = s;
      prop_.fix(child, var, Rational(x));
      Witness wc;
      const Value bound = beta < best ? beta : best;
      const Value r = component(std::move(child), sub, g, alpha, bound, wc);
      if (r < best) {
        best = r;
        best_w = std::move(wc);
        if (!(alpha < best)) break;
      }
    }
    w.insert(w.end(), best_w.begin(), best_w.end());
    return best;
  }

  bool entailed(const LinConstraint& row, const BoundsState& s) const {
    if (row.sense == Sense::EQ) {
      for (const Term& t : row.terms)
        if (!s.is_fixed(t.var)) return false;
      return true;
    }
    Rational maxact;
    for (const Term& t : row.terms) maxact += t.coef * (t.coef.sign() > 0 ? s.upper[t.var] : s.lower[t.var]);
    return maxact <= row.rhs;
  }

  const QipInstance& m_;
  SearchConfig cfg_;
  Propagator prop_;
  TrailingResolver trailing_;
  std::vector<Rational> coef_;
  std::vector<int> order_;
  std::vector<int> plain_rows_;
  int z_ = -1;
  std::vector<int> parent_;
  std::optional<Value> incumbent_;
  BoundTrail trail_;
  std::vector<Rational> best_;
  std::uint64_t nodes_ = 0;
  std::chrono::steady_clock::time_point start_;
  std::chrono::steady_clock::time_point deadline_;
};

}  // namespace detail

/// Exact optimum of a single-player instance (no universal blocks).
inline MipResult solve_mip(const QipInstance& model, const SearchConfig& cfg = {}) {
  if (model.num_universal_blocks() != 0) throw ModelContractError("solve_mip needs an instance without universal blocks");
  return detail::with_stack(detail::stack_for_depth(static_cast<std::size_t>(model.num_vars())),
                            [&] { return detail::BranchAndBound(model, cfg).run(); });
}

inline MipResult solve_mip(const MipInstance& mip, const SearchConfig& cfg = {}) { return solve_mip(mip.model, cfg); }

}  // namespace qrobust
