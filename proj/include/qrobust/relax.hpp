#pragma once

// Interval bound propagation over linear rows. Supplies feasibility pruning
// and admissible objective bounds to the game-tree search and to the
// branch-and-bound MIP solver.

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "qrobust/model.hpp"

namespace qrobust {

/// Per-node variable box. Integer variables keep integral bounds.
struct BoundsState {
  std::vector<Rational> lower;
  std::vector<Rational> upper;
  std::shared_ptr<const std::vector<char>> integral;
  std::vector<int> dirty;  // rows queued for the next propagation
  bool empty = false;

  static BoundsState from(const std::vector<VarDomain>& domains) {
    BoundsState s;
    auto integral = std::make_shared<std::vector<char>>();
    s.lower.reserve(domains.size());
    s.upper.reserve(domains.size());
    integral->reserve(domains.size());
    for (const VarDomain& d : domains) {
      s.lower.emplace_back(d.lower);
      s.upper.emplace_back(d.upper);
      integral->push_back(d.kind == VarKind::Integer ? 1 : 0);
    }
    s.integral = std::move(integral);
    return s;
  }

  [[nodiscard]] int size() const { return static_cast<int>(lower.size()); }
  [[nodiscard]] bool is_fixed(int v) const { return lower[v] == upper[v]; }
  [[nodiscard]] bool is_integral(int v) const { return (*integral)[v] != 0; }
};

/// Prior bounds of one variable, logged so that in-place changes can be undone.
struct BoundChange {
  int var;
  Rational lower;
  Rational upper;
};
using BoundTrail = std::vector<BoundChange>;

/// Restores every change logged after `mark` and clears pending work.
inline void undo(BoundsState& s, BoundTrail& trail, std::size_t mark) {
  while (trail.size() > mark) {
    const BoundChange& c = trail.back();
    s.lower[c.var] = c.lower;
    s.upper[c.var] = c.upper;
    trail.pop_back();
  }
  s.dirty.clear();
  s.empty = false;
}

/// Row store with a variable-to-row index and the tightening loop. One
/// instance belongs to one solve call; the scratch buffers are not shared.
class Propagator {
 public:
  Propagator() = default;
  Propagator(std::vector<LinConstraint> rows, int num_vars) : rows_(std::move(rows)) {
    rows_of_.assign(static_cast<std::size_t>(num_vars), {});
    for (std::size_t r = 0; r < rows_.size(); ++r)
      for (const Term& t : rows_[r].terms) rows_of_[t.var].push_back(static_cast<int>(r));
    tightenable_.assign(static_cast<std::size_t>(num_vars), 1);
    queued_.assign(rows_.size(), 0);
  }

  [[nodiscard]] const std::vector<LinConstraint>& rows() const { return rows_; }
  [[nodiscard]] const std::vector<int>& rows_of(int v) const { return rows_of_[v]; }

  /// Variables whose mask entry is zero are read but never tightened. The
  /// search clears it for universal variables: their range belongs to the
  /// adversary, not to the existential constraint system.
  void set_tightenable(std::vector<char> mask) { tightenable_ = std::move(mask); }

  void mark_all(BoundsState& s) const {
    for (std::size_t r = 0; r < rows_.size(); ++r) s.dirty.push_back(static_cast<int>(r));
  }
  void mark_var(BoundsState& s, int v) const {
    for (int r : rows_of_[v]) s.dirty.push_back(r);
  }
  /// Fixes v to value and queues its rows. Returns false if value is outside
  /// the current box. Changes are logged to `trail` when given.
  bool fix(BoundsState& s, int v, const Rational& value, BoundTrail* trail = nullptr) const {
    if (value < s.lower[v] || value > s.upper[v]) {
      s.empty = true;
      return false;
    }
    if (trail != nullptr) trail->push_back(BoundChange{v, s.lower[v], s.upper[v]});
    s.lower[v] = value;
    s.upper[v] = value;
    mark_var(s, v);
    return true;
  }

  /// Runs the queued rows to a fixpoint (or the visit cap). `active`, when
  /// given, restricts work to rows with a nonzero entry. Returns false and
  /// marks the state empty on interval infeasibility.
  bool propagate(BoundsState& s, const std::vector<char>* active = nullptr, BoundTrail* trail = nullptr) const {
    if (s.empty) return false;
    std::vector<int> queue;
    queue.swap(s.dirty);
    std::size_t head = 0;
    for (int r : queue) queued_[r] = 1;
    const std::size_t cap =
        std::max<std::size_t>(1, static_cast<std::size_t>(s.size()) * std::max<std::size_t>(1, rows_.size()));
    std::size_t visits = 0;
    bool ok = true;
    while (head < queue.size()) {
      const int r = queue[head++];
      queued_[r] = 0;
      if (active != nullptr && (*active)[r] == 0) continue;
      if (++visits > cap) break;
      if (!tighten_row(s, rows_[r], false, queue, trail)) {
        ok = false;
        break;
      }
      if (rows_[r].sense == Sense::EQ && !tighten_row(s, rows_[r], true, queue, trail)) {
        ok = false;
        break;
      }
    }
    for (std::size_t i = head; i < queue.size(); ++i) queued_[queue[i]] = 0;
    if (!ok) s.empty = true;
    return ok;
  }

 private:
  // Processes `sum a x <= b` (or `-sum a x <= -b` when `reversed`).
  bool tighten_row(BoundsState& s, const LinConstraint& row, bool reversed, std::vector<int>& queue,
                   BoundTrail* trail) const {
    Rational minact;
    for (const Term& t : row.terms) {
      const Rational a = reversed ? -t.coef : t.coef;
      minact += a * (a.sign() > 0 ? s.lower[t.var] : s.upper[t.var]);
    }
    const Rational rhs = reversed ? -row.rhs : row.rhs;
    if (minact > rhs) return false;
    for (const Term& t : row.terms) {
      const int v = t.var;
      if (tightenable_[v] == 0 || s.lower[v] == s.upper[v]) continue;
      const Rational a = reversed ? -t.coef : t.coef;
      const Rational own = a * (a.sign() > 0 ? s.lower[v] : s.upper[v]);
      const Rational bound = (rhs - (minact - own)) / a;
      bool changed = false;
      if (a.sign() > 0) {
        const Rational nu = s.is_integral(v) ? Rational(bound.floor()) : bound;
        if (nu < s.upper[v]) {
          if (nu < s.lower[v]) return false;
          if (trail != nullptr) trail->push_back(BoundChange{v, s.lower[v], s.upper[v]});
          s.upper[v] = nu;
          changed = true;
        }
      } else {
        const Rational nl = s.is_integral(v) ? Rational(bound.ceil()) : bound;
        if (nl > s.lower[v]) {
          if (nl > s.upper[v]) return false;
          if (trail != nullptr) trail->push_back(BoundChange{v, s.lower[v], s.upper[v]});
          s.lower[v] = nl;
          changed = true;
        }
      }
      if (changed) {
        for (int r : rows_of_[v]) {
          if (queued_[r] == 0) {
            queued_[r] = 1;
            queue.push_back(r);
          }
        }
      }
    }
    return true;
  }

  std::vector<LinConstraint> rows_;
  std::vector<std::vector<int>> rows_of_;
  std::vector<char> tightenable_;
  mutable std::vector<char> queued_;
};

/// Fixpoint propagation of `rows` on a copy of `state`; nullopt when the box
/// is interval-infeasible.
inline std::optional<BoundsState> propagate(std::span<const LinConstraint> rows, BoundsState state) {
  Propagator p(std::vector<LinConstraint>(rows.begin(), rows.end()), state.size());
  p.mark_all(state);
  if (!p.propagate(state)) return std::nullopt;
  return state;
}

enum class OptSense { Min, Max };

/// Interval bound of `constant + sum coef*x` over the box: the lower end for
/// Min, the upper end for Max.
inline Rational optimistic_value(std::span<const Term> objective, const Rational& constant, const BoundsState& s,
                                 OptSense sense) {
  Rational v = constant;
  for (const Term& t : objective) {
    const bool take_lower = (t.coef.sign() > 0) == (sense == OptSense::Min);
    v += t.coef * (take_lower ? s.lower[t.var] : s.upper[t.var]);
  }
  return v;
}

}  // namespace qrobust
