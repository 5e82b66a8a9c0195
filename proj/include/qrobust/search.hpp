#pragma once

// Alpha-beta game-tree search for QIPs, plus the exhaustive minimax oracle.
//
// Variables are assigned one at a time in quantifier order. Existential
// variables are minimizing choices, universal blocks are maximizing choices
// restricted to moves that violate no fully assigned universal row. A play
// that violates an existential row is worth +infinity. The trailing
// continuous block is resolved in closed form at the leaves.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrobust/model.hpp"
#include "qrobust/relax.hpp"
#include "qrobust/stack.hpp"
#include "qrobust/trailing.hpp"

namespace qrobust {

enum class SolveStatus { Optimal, Infeasible, TimeLimit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "OPTIMAL";
    case SolveStatus::Infeasible: return "INFEASIBLE";
    case SolveStatus::TimeLimit: return "TIME_LIMIT";
  }
  return "?";
}

enum class MoveOrdering { DomainAscending, ObjectiveGuided };

struct SearchConfig {
  std::int64_t time_limit_ms = 60'000;
  MoveOrdering ordering = MoveOrdering::ObjectiveGuided;
  bool bounds_enabled = true;
  std::optional<std::uint64_t> node_limit;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  /// Game value in the model's sense (+inf when infeasible). On TimeLimit it
  /// holds the best value proven for a complete first-stage move, if any,
  /// and `value_is_bound` is set.
  std::optional<Value> value;
  bool value_is_bound = false;
  std::vector<int> first_stage_vars;  // integer variables of block 1
  std::vector<Int> first_stage;       // present iff Optimal
  std::uint64_t nodes = 0;
  std::int64_t elapsed_ms = 0;
};

class TreeTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline bool row_satisfied(const LinConstraint& row, std::span<const Int> x) {
  Rational act;
  for (const Term& t : row.terms) act += t.coef * Rational(x[t.var]);
  return row.sense == Sense::EQ ? act == row.rhs : act <= row.rhs;
}

/// Legal-move generator for universal blocks under the immediate-violation
/// rule: a block assignment is legal iff it violates no universal row whose
/// variables are all assigned once the block is set.
class UniversalMoves {
 public:
  explicit UniversalMoves(const QipInstance& q) : q_(q) {
    const Layout layout = Layout::of(q);
    rows_at_.resize(q.blocks.size());
    for (std::size_t b = 0; b < q.blocks.size(); ++b) rows_at_[b].assign(q.blocks[b].vars.size(), {});
    std::vector<int> inner(static_cast<std::size_t>(q.num_vars()), 0);
    for (const auto& block : q.blocks)
      for (std::size_t i = 0; i < block.vars.size(); ++i) inner[block.vars[i]] = static_cast<int>(i);
    for (std::size_t r = 0; r < q.universal_rows.size(); ++r) {
      int best_block = -1;
      int best_inner = -1;
      for (const Term& t : q.universal_rows[r].terms) {
        const int b = layout.block_of[t.var];
        if (b > best_block || (b == best_block && inner[t.var] > best_inner)) {
          best_block = b;
          best_inner = inner[t.var];
        }
      }
      if (best_block >= 0) rows_at_[best_block][best_inner].push_back(static_cast<int>(r));
    }
  }

  /// All legal assignments of `block` given values of earlier variables in
  /// `x` (entries of the block itself are overwritten as scratch).
  std::vector<std::vector<Int>> enumerate(std::vector<Int>& x, int block) const {
    const auto& vars = q_.blocks[block].vars;
    double box = 1;
    for (int v : vars) box *= static_cast<double>(q_.domains[v].upper - q_.domains[v].lower + 1);
    if (box > static_cast<double>(1 << 22)) throw ModelContractError("universal block too large to enumerate");
    std::vector<std::vector<Int>> out;
    std::vector<Int> cur(vars.size());
    auto rec = [&](auto&& self, std::size_t i) -> void {
      if (i == vars.size()) {
        out.push_back(cur);
        return;
      }
      const int v = vars[i];
      for (Int val = q_.domains[v].lower; val <= q_.domains[v].upper; ++val) {
        x[v] = val;
        cur[i] = val;
        bool ok = true;
        for (int r : rows_at_[block][i]) {
          if (!row_satisfied(q_.universal_rows[r], x)) {
            ok = false;
            break;
          }
        }
        if (ok) self(self, i + 1);
      }
    };
    rec(rec, 0);
    if (out.empty()) throw ModelContractError("universal block " + std::to_string(block) + " has no legal move");
    return out;
  }

 private:
  const QipInstance& q_;
  std::vector<std::vector<std::vector<int>>> rows_at_;  // [block][inner position] -> completed rows
};

struct SearchAbort {};

class AlphaBeta {
 public:
  AlphaBeta(const QipInstance& q, const SearchConfig& cfg)
      : q_(q), cfg_(cfg), moves_(q), trailing_(q) {
    is_universal_.assign(static_cast<std::size_t>(q.num_vars()), 0);
    for (const auto& block : q.blocks) {
      for (int v : block.vars) {
        if (block.quantifier == Quantifier::ForAll) is_universal_[v] = 1;
      }
    }
    block_start_.assign(q.blocks.size(), 0);
    block_end_.assign(q.blocks.size(), 0);
    for (std::size_t b = 0; b < q.blocks.size(); ++b) {
      block_start_[b] = static_cast<int>(order_.size());
      for (int v : q.blocks[b].vars) {
        if (q.domains[v].kind != VarKind::Integer) continue;
        order_.push_back(v);
        pos_block_.push_back(static_cast<int>(b));
      }
      block_end_[b] = static_cast<int>(order_.size());
    }
    first_end_ = q.blocks.empty() ? 0 : block_end_[0];
    obj_coef_.assign(static_cast<std::size_t>(q.num_vars()), Rational(0));
    for (const Term& t : q.objective) obj_coef_[t.var] = t.coef;

    prop_ = Propagator(q.existential_rows, q.num_vars());
    std::vector<char> mask(static_cast<std::size_t>(q.num_vars()), 1);
    for (int v = 0; v < q.num_vars(); ++v)
      if (is_universal_[v]) mask[v] = 0;
    prop_.set_tightenable(std::move(mask));

    std::vector<char> handled(q.existential_rows.size(), 0);
    for (int r : trailing_.handled_rows()) handled[r] = 1;
    for (std::size_t r = 0; r < q.existential_rows.size(); ++r)
      if (!handled[r]) plain_rows_.push_back(static_cast<int>(r));

    assign_.assign(static_cast<std::size_t>(q.num_vars()), 0);
    best_first_.assign(static_cast<std::size_t>(first_end_), 0);
  }

  SolveResult run() {
    if (cfg_.time_limit_ms <= 0) throw std::invalid_argument("time limit must be positive");
    start_ = std::chrono::steady_clock::now();
    deadline_ = start_ + std::chrono::milliseconds(cfg_.time_limit_ms);
    SolveResult res;
    for (int p = 0; p < first_end_; ++p) res.first_stage_vars.push_back(order_[p]);

    const auto [lo, hi] = objective_bounds(q_);
    (void)hi;
    const Value alpha(lo - Rational(1));
    try {
      BoundsState root = BoundsState::from(q_.domains);
      Value v = Value::infinity();
      bool feasible = true;
      if (cfg_.bounds_enabled) {
        prop_.mark_all(root);
        feasible = prop_.propagate(root);
      }
      if (feasible) v = search(0, root, alpha, Value::infinity());
      res.nodes = nodes_;
      if (v.is_infinite()) {
        res.status = SolveStatus::Infeasible;
        res.value = Value::infinity();
      } else {
        res.status = SolveStatus::Optimal;
        res.value = q_.to_user(v);
        if (incumbent_) res.first_stage = best_first_;
      }
    } catch (const SearchAbort&) {
      res.status = SolveStatus::TimeLimit;
      res.nodes = nodes_;
      if (incumbent_) {
        res.value = q_.to_user(*incumbent_);
        res.value_is_bound = true;
      }
    }
    res.elapsed_ms = elapsed_ms();
    return res;
  }

 private:
  std::int64_t elapsed_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_).count();
  }

  void tick() {
    ++nodes_;
    if (cfg_.node_limit && nodes_ > *cfg_.node_limit) throw SearchAbort{};
    if ((nodes_ & 1023u) == 0 && std::chrono::steady_clock::now() >= deadline_) throw SearchAbort{};
  }

  Value leaf_value() {
    for (int r : plain_rows_)
      if (!row_satisfied(q_.existential_rows[r], assign_)) return Value::infinity();
    auto tr = trailing_.resolve(assign_);
    if (!tr) return Value::infinity();
    Rational v = q_.objective_constant + *tr;
    for (const Term& t : q_.objective)
      if (q_.domains[t.var].kind == VarKind::Integer) v += t.coef * Rational(assign_[t.var]);
    return v;
  }

  // Fail-soft alpha-beta; `s` is propagated on entry.
  Value search(int pos, BoundsState& s, Value alpha, Value beta) {
    tick();
    if (pos == static_cast<int>(order_.size())) return leaf_value();
    if (cfg_.bounds_enabled) {
      const Value lb = optimistic_value(q_.objective, q_.objective_constant, s, OptSense::Min);
      if (lb >= beta) return lb;
    }
    const int var = order_[pos];
    const int block = pos_block_[pos];
    if (is_universal_[var]) return universal_node(block, s, alpha, beta);
    return existential_node(pos, var, s, alpha, beta);
  }

  Value universal_node(int block, BoundsState& s, Value alpha, Value beta) {
    auto moves = moves_.enumerate(assign_, block);
    const auto& vars = q_.blocks[block].vars;
    if (cfg_.ordering == MoveOrdering::ObjectiveGuided) {
      std::vector<std::pair<Rational, std::size_t>> key;
      key.reserve(moves.size());
      for (std::size_t m = 0; m < moves.size(); ++m) {
        Rational c;
        for (std::size_t i = 0; i < vars.size(); ++i) c += obj_coef_[vars[i]] * Rational(moves[m][i]);
        key.emplace_back(c, m);
      }
      std::stable_sort(key.begin(), key.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      std::vector<std::vector<Int>> sorted;
      sorted.reserve(moves.size());
      for (const auto& k : key) sorted.push_back(std::move(moves[k.second]));
      moves = std::move(sorted);
    }
    Value best = alpha;
    bool any = false;
    const std::size_t mark = trail_.size();
    for (const auto& move : moves) {
      for (std::size_t i = 0; i < vars.size(); ++i) {
        assign_[vars[i]] = move[i];
        trail_.push_back(BoundChange{vars[i], s.lower[vars[i]], s.upper[vars[i]]});
        s.lower[vars[i]] = s.upper[vars[i]] = Rational(move[i]);
        if (cfg_.bounds_enabled) prop_.mark_var(s, vars[i]);
      }
      Value r = Value::infinity();
      if (!cfg_.bounds_enabled || prop_.propagate(s, nullptr, &trail_))
        r = search(block_end_[block], s, max_value(alpha, best), beta);
      undo(s, trail_, mark);
      if (!any || r > best) best = r;
      any = true;
      if (best >= beta) return best;
    }
    return best;
  }

  Value existential_node(int pos, int var, BoundsState& s, Value alpha, Value beta) {
    const Int lo = s.lower[var].ceil();
    const Int hi = s.upper[var].floor();
    std::vector<Int> values;
    values.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (Int x = lo; x <= hi; ++x) values.push_back(x);
    // The first block stays in lexicographic order so that ties resolve to
    // the lexicographically smallest first-stage move.
    if (cfg_.ordering == MoveOrdering::ObjectiveGuided && pos >= first_end_ && obj_coef_[var].sign() < 0)
      std::reverse(values.begin(), values.end());

    Value best = Value::infinity();
    const std::size_t mark = trail_.size();
    for (Int x : values) {
      assign_[var] = x;
      Value r = Value::infinity();
      if (cfg_.bounds_enabled) {
        prop_.fix(s, var, Rational(x), &trail_);
        if (prop_.propagate(s, nullptr, &trail_)) r = search(pos + 1, s, alpha, min_value(beta, best));
      } else {
        trail_.push_back(BoundChange{var, s.lower[var], s.upper[var]});
        s.lower[var] = s.upper[var] = Rational(x);
        r = search(pos + 1, s, alpha, min_value(beta, best));
      }
      undo(s, trail_, mark);
      if (r < best) {
        best = r;
        // Inside the first block alpha stays below every value and beta is
        // at least the incumbent, so a value under the incumbent is exact.
        if (pos + 1 == first_end_ && best.is_finite() && (!incumbent_ || best < *incumbent_)) {
          incumbent_ = best;
          for (int p = 0; p < first_end_; ++p) best_first_[p] = assign_[order_[p]];
        }
        if (best <= alpha) return best;
      }
    }
    return best;
  }

  static Value max_value(const Value& a, const Value& b) { return a < b ? b : a; }
  static Value min_value(const Value& a, const Value& b) { return b < a ? b : a; }

  const QipInstance& q_;
  SearchConfig cfg_;
  UniversalMoves moves_;
  TrailingResolver trailing_;
  Propagator prop_;
  std::vector<char> is_universal_;
  std::vector<int> order_;
  std::vector<int> pos_block_;
  std::vector<int> block_start_;
  std::vector<int> block_end_;
  int first_end_ = 0;
  std::vector<Rational> obj_coef_;
  std::vector<int> plain_rows_;
  std::vector<Int> assign_;
  std::vector<Int> best_first_;
  BoundTrail trail_;
  std::optional<Value> incumbent_;
  std::uint64_t nodes_ = 0;
  std::chrono::steady_clock::time_point start_;
  std::chrono::steady_clock::time_point deadline_;
};

}  // namespace detail

/// Legal assignments of universal block `block` given the values of all
/// earlier variables in `prefix` (indexed by variable; later entries are
/// ignored). Throws ModelContractError if the block has no legal move.
inline std::vector<std::vector<Int>> legal_universal_moves(const QipInstance& q, std::span<const Int> prefix,
                                                           int block) {
  if (block < 0 || block >= static_cast<int>(q.blocks.size()) || q.blocks[block].quantifier != Quantifier::ForAll)
    throw ModelContractError("legal_universal_moves needs a universal block");
  std::vector<Int> x(prefix.begin(), prefix.end());
  x.resize(static_cast<std::size_t>(q.num_vars()), 0);
  return detail::UniversalMoves(q).enumerate(x, block);
}

/// Optimal worst-case value and first-stage move of a validated instance.
inline SolveResult solve(const QipInstance& q, const SearchConfig& cfg = {}) {
  return detail::with_stack(detail::stack_for_depth(static_cast<std::size_t>(q.num_vars())),
                            [&] { return detail::AlphaBeta(q, cfg).run(); });
}

namespace detail {

// Plain minimax over every play; shares nothing with AlphaBeta except the
// trailing-block resolver.
class Exhaustive {
 public:
  explicit Exhaustive(const QipInstance& q) : q_(q), trailing_(q) {
    const int n = q.num_vars();
    std::vector<int> block_of(static_cast<std::size_t>(n), -1);
    for (std::size_t b = 0; b < q.blocks.size(); ++b) {
      for (int v : q.blocks[b].vars) {
        block_of[v] = static_cast<int>(b);
        if (q.domains[v].kind != VarKind::Integer) continue;
        order_.push_back(v);
        universal_.push_back(q.blocks[b].quantifier == Quantifier::ForAll);
      }
    }
    block_first_.assign(order_.size(), 0);
    for (std::size_t p = 0; p < order_.size(); ++p)
      block_first_[p] = p == 0 || block_of[order_[p]] != block_of[order_[p - 1]];
    first_end_ = 0;
    if (!q.blocks.empty())
      for (int v : q.blocks[0].vars)
        if (q.domains[v].kind == VarKind::Integer) ++first_end_;

    std::vector<int> pos_of(static_cast<std::size_t>(n), -1);
    for (std::size_t p = 0; p < order_.size(); ++p) pos_of[order_[p]] = static_cast<int>(p);
    // A universal block's rows are checked once the block's last variable is set.
    block_last_pos_.assign(q.blocks.size(), -1);
    for (std::size_t p = 0; p < order_.size(); ++p) block_last_pos_[block_of[order_[p]]] = static_cast<int>(p);
    universal_check_.assign(order_.size(), {});
    for (std::size_t r = 0; r < q.universal_rows.size(); ++r) {
      int last_block = -1;
      for (const Term& t : q.universal_rows[r].terms) last_block = std::max(last_block, block_of[t.var]);
      if (last_block >= 0 && block_last_pos_[last_block] >= 0)
        universal_check_[block_last_pos_[last_block]].push_back(static_cast<int>(r));
    }
    // Existential rows without trailing variables are checked when their last
    // variable is set; the resolver owns the rest.
    std::vector<char> handled(q.existential_rows.size(), 0);
    for (int r : trailing_.handled_rows()) handled[r] = 1;
    existential_check_.assign(order_.size() + 1, {});
    for (std::size_t r = 0; r < q.existential_rows.size(); ++r) {
      if (handled[r]) continue;
      int last = -1;
      for (const Term& t : q.existential_rows[r].terms) last = std::max(last, pos_of[t.var]);
      existential_check_[last < 0 ? order_.size() : static_cast<std::size_t>(last)].push_back(static_cast<int>(r));
    }
    x_.assign(static_cast<std::size_t>(n), 0);
    pv_.assign(static_cast<std::size_t>(first_end_) + 1, {});
  }

  double leaf_bound() const {
    double leaves = 1;
    for (int v : order_) leaves *= static_cast<double>(q_.domains[v].upper - q_.domains[v].lower + 1);
    return leaves;
  }

  SolveResult run() {
    const auto start = std::chrono::steady_clock::now();
    SolveResult res;
    for (int p = 0; p < first_end_; ++p) res.first_stage_vars.push_back(order_[p]);
    ++nodes_;
    bool violated = false;
    for (int r : existential_check_[order_.size()])
      if (!row_satisfied(q_.existential_rows[r], x_)) violated = true;
    const Value v = visit(0, violated).value_or(Value::infinity());
    res.nodes = nodes_;
    if (v.is_infinite()) {
      res.status = SolveStatus::Infeasible;
      res.value = Value::infinity();
    } else {
      res.status = SolveStatus::Optimal;
      res.value = q_.to_user(v);
      res.first_stage = pv_[0];
    }
    res.elapsed_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    return res;
  }

  // Leaves of one optimal strategy: existential nodes follow their first
  // minimizing move, universal nodes branch on every legal move.
  std::vector<std::vector<Int>> strategy_plays() {
    bool violated = false;
    for (int r : existential_check_[order_.size()])
      if (!row_satisfied(q_.existential_rows[r], x_)) violated = true;
    std::vector<std::vector<Int>> out;
    play(0, violated, out);
    return out;
  }

 private:
  bool set_and_check(std::size_t pos, Int val, bool& violated) {
    x_[order_[pos]] = val;
    for (int r : universal_check_[pos])
      if (!row_satisfied(q_.universal_rows[r], x_)) return false;
    for (int r : existential_check_[pos])
      if (!row_satisfied(q_.existential_rows[r], x_)) violated = true;
    return true;
  }

  void play(std::size_t pos, bool violated, std::vector<std::vector<Int>>& out) {
    if (pos == order_.size()) {
      out.push_back(x_);
      return;
    }
    const int var = order_[pos];
    std::vector<std::pair<Int, bool>> follow;
    std::optional<Value> best;
    for (Int val = q_.domains[var].lower; val <= q_.domains[var].upper; ++val) {
      bool child_violated = violated;
      if (!set_and_check(pos, val, child_violated)) continue;
      const std::optional<Value> r = visit(pos + 1, child_violated);
      if (!r) continue;
      if (universal_[pos] != 0) {
        follow.emplace_back(val, child_violated);
      } else if (!best || *r < *best) {
        best = r;
        follow.assign(1, {val, child_violated});
      }
    }
    for (const auto& [val, child_violated] : follow) {
      x_[var] = val;
      play(pos + 1, child_violated, out);
    }
  }

  // Value of the subgame after positions [0, pos) are set. `violated` records
  // whether an existential row has already failed; the subtree is still
  // enumerated in full. nullopt means a partially set universal block has no
  // legal completion.
  std::optional<Value> visit(std::size_t pos, bool violated) {
    if (pos == order_.size()) {
      if (violated) return Value::infinity();
      auto tr = trailing_.resolve(x_);
      if (!tr) return Value::infinity();
      Rational v = q_.objective_constant + *tr;
      for (const Term& t : q_.objective)
        if (q_.domains[t.var].kind == VarKind::Integer) v += t.coef * Rational(x_[t.var]);
      return Value(v);
    }
    const int var = order_[pos];
    const bool universal = universal_[pos] != 0;
    std::optional<Value> best;
    for (Int val = q_.domains[var].lower; val <= q_.domains[var].upper; ++val) {
      x_[var] = val;
      ++nodes_;
      bool legal = true;
      for (int r : universal_check_[pos])
        if (!row_satisfied(q_.universal_rows[r], x_)) legal = false;
      if (!legal) continue;
      bool now_violated = violated;
      for (int r : existential_check_[pos])
        if (!row_satisfied(q_.existential_rows[r], x_)) now_violated = true;
      const std::optional<Value> r = visit(pos + 1, now_violated);
      if (!r) continue;
      if (!best || (universal ? *r > *best : *r < *best)) {
        best = r;
        if (pos < static_cast<std::size_t>(first_end_)) {
          pv_[pos].assign(1, val);
          if (pos + 1 < static_cast<std::size_t>(first_end_))
            pv_[pos].insert(pv_[pos].end(), pv_[pos + 1].begin(), pv_[pos + 1].end());
        }
      }
    }
    if (!best && universal && block_first_[pos])
      throw ModelContractError("universal block has no legal move");
    return best;
  }

  const QipInstance& q_;
  TrailingResolver trailing_;
  std::vector<int> order_;
  std::vector<char> universal_;
  int first_end_ = 0;
  std::vector<int> block_last_pos_;
  std::vector<std::vector<int>> universal_check_;
  std::vector<std::vector<int>> existential_check_;
  std::vector<Int> x_;
  std::vector<std::vector<Int>> pv_;
  std::vector<char> block_first_;
  std::uint64_t nodes_ = 0;
};

}  // namespace detail

/// Exhaustive minimax without pruning or bounding. Throws TreeTooLarge when
/// the product of the integer domain sizes exceeds `leaf_limit`.
inline SolveResult oracle_solve(const QipInstance& q, double leaf_limit = 1e7) {
  detail::Exhaustive ex(q);
  if (ex.leaf_bound() > leaf_limit) throw TreeTooLarge("game tree exceeds the oracle's leaf limit");
  return detail::with_stack(detail::stack_for_depth(static_cast<std::size_t>(q.num_vars())), [&] { return ex.run(); });
}

/// Complete plays of the oracle's optimal strategy, one per leaf reached when
/// every universal reply is explored. Each play is indexed by variable;
/// continuous trailing entries are left at zero.
inline std::vector<std::vector<Int>> oracle_strategy_plays(const QipInstance& q, double leaf_limit = 1e7) {
  detail::Exhaustive ex(q);
  if (ex.leaf_bound() > leaf_limit) throw TreeTooLarge("game tree exceeds the oracle's leaf limit");
  return detail::with_stack(detail::stack_for_depth(static_cast<std::size_t>(q.num_vars())),
                            [&] { return ex.strategy_plays(); });
}

}  // namespace qrobust
