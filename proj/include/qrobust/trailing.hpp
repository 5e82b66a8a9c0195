#pragma once

// Closed-form resolution of the trailing continuous block.
//
// Once every integer variable is fixed, each trailing variable d is only
// bounded from below by rows in which it carries a negative coefficient, and
// it has a nonnegative objective weight. Its optimal value is therefore the
// largest lower bound implied by those rows (or its domain lower bound).
// Trailing variables may also feed other rows with positive coefficients; the
// resolver evaluates them in dependency order, which yields the least (and
// hence optimal) solution of the monotone system.

#include <span>
#include <string>
#include <vector>

#include "qrobust/model.hpp"

namespace qrobust {

class NonSeparableError : public ModelContractError {
 public:
  using ModelContractError::ModelContractError;
};

class TrailingResolver {
 public:
  TrailingResolver() = default;

  explicit TrailingResolver(const QipInstance& q) : domains_(q.domains) {
    const int n = q.num_vars();
    slot_.assign(static_cast<std::size_t>(n), -1);
    auto& slot = slot_;
    for (int v = 0; v < n; ++v) {
      if (q.domains[v].kind != VarKind::TrailingContinuous) continue;
      slot[v] = static_cast<int>(vars_.size());
      vars_.push_back(v);
    }
    if (vars_.empty()) return;

    weight_.assign(vars_.size(), Rational(0));
    for (const Term& t : q.objective) {
      if (slot[t.var] < 0) continue;
      if (t.coef.sign() < 0)
        throw NonSeparableError("trailing variable " + name(q, t.var) + " has a negative objective weight");
      weight_[slot[t.var]] = t.coef;
    }

    defining_.assign(vars_.size(), {});
    std::vector<std::vector<int>> depends(vars_.size());
    for (std::size_t r = 0; r < q.existential_rows.size(); ++r) {
      const LinConstraint& row = q.existential_rows[r];
      int defined = -1;
      std::vector<int> feeds;
      for (const Term& t : row.terms) {
        if (slot[t.var] < 0) continue;
        if (row.sense != Sense::LE)
          throw NonSeparableError("trailing variable " + name(q, t.var) + " appears in an equality row");
        if (t.coef.sign() < 0) {
          if (defined >= 0) throw NonSeparableError("row " + std::to_string(r) + " bounds two trailing variables");
          defined = slot[t.var];
        } else {
          feeds.push_back(slot[t.var]);
        }
      }
      if (defined < 0 && feeds.empty()) continue;
      rows_.push_back(row);
      const int stored = static_cast<int>(rows_.size()) - 1;
      handled_rows_.push_back(static_cast<int>(r));
      if (defined >= 0) {
        defining_[defined].push_back(stored);
        for (int f : feeds) depends[defined].push_back(f);
      } else {
        checks_.push_back(stored);
      }
    }

    // Kahn ordering; a cycle means the least solution is not computable pointwise.
    std::vector<int> indegree(vars_.size(), 0);
    std::vector<std::vector<int>> users(vars_.size());
    for (std::size_t d = 0; d < vars_.size(); ++d) {
      for (int f : depends[d]) {
        if (f == static_cast<int>(d)) throw NonSeparableError("trailing variable bounds itself");
        users[f].push_back(static_cast<int>(d));
        ++indegree[d];
      }
    }
    std::vector<int> ready;
    for (std::size_t d = 0; d < vars_.size(); ++d)
      if (indegree[d] == 0) ready.push_back(static_cast<int>(d));
    while (!ready.empty()) {
      const int d = ready.back();
      ready.pop_back();
      order_.push_back(d);
      for (int u : users[d])
        if (--indegree[u] == 0) ready.push_back(u);
    }
    if (order_.size() != vars_.size()) throw NonSeparableError("cyclic dependency among trailing variables");
  }

  [[nodiscard]] bool empty() const { return vars_.empty(); }
  [[nodiscard]] const std::vector<int>& variables() const { return vars_; }
  /// Existential rows (by index) that mention a trailing variable; the
  /// resolver checks them itself.
  [[nodiscard]] const std::vector<int>& handled_rows() const { return handled_rows_; }

  /// Optimal objective contribution of the trailing block given values for
  /// every integer variable (entries of trailing variables are ignored), or
  /// nullopt when no feasible completion exists. `out`, when given, receives
  /// the trailing values.
  std::optional<Rational> resolve(std::span<const Int> assignment, std::vector<Rational>* out = nullptr) const {
    if (vars_.empty()) return Rational(0);
    std::vector<Rational> value(vars_.size());
    auto term_value = [&](int var) -> Rational {
      return slot_[var] >= 0 ? value[slot_[var]] : Rational(assignment[var]);
    };
    for (int d : order_) {
      const int var = vars_[d];
      Rational v(domains_[var].lower);
      for (int r : defining_[d]) {
        const LinConstraint& row = rows_[r];
        Rational rest;
        Rational own;
        for (const Term& t : row.terms) {
          if (t.var == var) {
            own = t.coef;
          } else {
            rest += t.coef * term_value(t.var);
          }
        }
        // rest + own*v <= rhs with own < 0  =>  v >= (rest - rhs) / -own
        const Rational need = (rest - row.rhs) / (-own);
        if (need > v) v = need;
      }
      if (v > Rational(domains_[var].upper)) return std::nullopt;
      value[d] = v;
    }
    for (int r : checks_) {
      Rational act;
      for (const Term& t : rows_[r].terms) act += t.coef * term_value(t.var);
      if (act > rows_[r].rhs) return std::nullopt;
    }
    Rational total;
    for (std::size_t d = 0; d < vars_.size(); ++d) total += weight_[d] * value[d];
    if (out != nullptr) *out = value;
    return total;
  }

 private:
  static std::string name(const QipInstance& q, int v) {
    return v < static_cast<int>(q.var_names.size()) ? q.var_names[v] : "#" + std::to_string(v);
  }

  std::vector<VarDomain> domains_;
  std::vector<int> vars_;
  std::vector<int> slot_;
  std::vector<Rational> weight_;
  std::vector<LinConstraint> rows_;
  std::vector<int> handled_rows_;
  std::vector<std::vector<int>> defining_;
  std::vector<int> checks_;
  std::vector<int> order_;
};

/// One-shot form of TrailingResolver::resolve. Throws NonSeparableError when
/// the trailing block does not have the supported structure.
inline std::optional<Rational> resolve_trailing(const QipInstance& q, std::span<const Int> assignment) {
  return TrailingResolver(q).resolve(assignment);
}

}  // namespace qrobust
