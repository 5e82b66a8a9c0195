#pragma once

// Data model for quantified integer linear programs (QIPs), optionally with a
// universal constraint system that restricts the adversary's moves.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qrobust/rational.hpp"

namespace qrobust {

/// Raised when an instance breaks a structural precondition of an operation.
class ModelContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class VarKind { Integer, TrailingContinuous };
enum class Quantifier { Exists, ForAll };
enum class Sense { LE, EQ };
enum class RowSide { Existential, Universal };

struct VarDomain {
  Int lower = 0;
  Int upper = 0;
  VarKind kind = VarKind::Integer;

  friend bool operator==(const VarDomain&, const VarDomain&) = default;
};

struct QuantBlock {
  Quantifier quantifier = Quantifier::Exists;
  std::vector<int> vars;

  friend bool operator==(const QuantBlock&, const QuantBlock&) = default;
};

struct Term {
  int var = 0;
  Rational coef;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Sorts by variable, merges duplicates and drops zero coefficients.
inline std::vector<Term> normalize_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> out;
  out.reserve(terms.size());
  for (const Term& t : terms) {
    if (!out.empty() && out.back().var == t.var) {
      out.back().coef += t.coef;
    } else {
      out.push_back(t);
    }
    if (out.back().coef.is_zero()) out.pop_back();
  }
  return out;
}

/// A row `sum coef*x (<= | =) rhs`. Terms are kept normalized.
struct LinConstraint {
  std::vector<Term> terms;
  Sense sense = Sense::LE;
  Rational rhs;
  RowSide side = RowSide::Existential;

  static LinConstraint make(std::vector<Term> terms, Sense sense, Rational rhs,
                            RowSide side = RowSide::Existential) {
    return LinConstraint{normalize_terms(std::move(terms)), sense, rhs, side};
  }

  /// `terms >= rhs`, stored as the negated LE row.
  static LinConstraint at_least(std::vector<Term> terms, Rational rhs, RowSide side = RowSide::Existential) {
    for (Term& t : terms) t.coef = -t.coef;
    return make(std::move(terms), Sense::LE, -rhs, side);
  }

  friend bool operator==(const LinConstraint&, const LinConstraint&) = default;
};

struct QipInstance {
  std::string name;
  std::vector<std::string> var_names;
  std::vector<VarDomain> domains;
  std::vector<QuantBlock> blocks;
  /// Minimized by the existential player. Maximization models are stored
  /// negated with `maximize` set; user-facing values are negated back.
  std::vector<Term> objective;
  Rational objective_constant;
  bool maximize = false;
  std::vector<LinConstraint> existential_rows;
  std::vector<LinConstraint> universal_rows;

  [[nodiscard]] int num_vars() const { return static_cast<int>(domains.size()); }
  [[nodiscard]] int num_universal_blocks() const {
    return static_cast<int>(std::count_if(blocks.begin(), blocks.end(), [](const QuantBlock& b) {
      return b.quantifier == Quantifier::ForAll;
    }));
  }

  /// Converts an internal (minimization) value to the modeller's sense.
  [[nodiscard]] Value to_user(const Value& internal) const {
    if (!maximize || internal.is_infinite()) return internal;
    return Value(-internal.rational());
  }
  [[nodiscard]] Value to_internal(const Value& user) const { return to_user(user); }

  friend bool operator==(const QipInstance&, const QipInstance&) = default;
};

/// Per-variable block membership derived from the block list.
struct Layout {
  std::vector<int> block_of;          // -1 when a variable is in no block
  std::vector<Quantifier> quantifier;  // quantifier of the owning block
  std::vector<int> universal_before;  // universal blocks preceding the owning block

  static Layout of(const QipInstance& q) {
    Layout l;
    const auto n = static_cast<std::size_t>(q.num_vars());
    l.block_of.assign(n, -1);
    l.quantifier.assign(n, Quantifier::Exists);
    l.universal_before.assign(n, 0);
    int universal_seen = 0;
    for (std::size_t b = 0; b < q.blocks.size(); ++b) {
      for (int v : q.blocks[b].vars) {
        if (v < 0 || static_cast<std::size_t>(v) >= n) continue;
        l.block_of[v] = static_cast<int>(b);
        l.quantifier[v] = q.blocks[b].quantifier;
        l.universal_before[v] = universal_seen;
      }
      if (q.blocks[b].quantifier == Quantifier::ForAll) ++universal_seen;
    }
    return l;
  }
};

/// Incremental construction helper used by the generators, the parser and tests.
class InstanceBuilder {
 public:
  explicit InstanceBuilder(std::string name = {}) { q_.name = std::move(name); }

  /// Opens a new quantifier block; subsequent variables are appended to it.
  InstanceBuilder& block(Quantifier quantifier) {
    q_.blocks.push_back(QuantBlock{quantifier, {}});
    return *this;
  }

  int var(std::string name, Int lower, Int upper, VarKind kind = VarKind::Integer) {
    if (q_.blocks.empty()) throw std::logic_error("InstanceBuilder::var before block()");
    const int index = q_.num_vars();
    q_.var_names.push_back(std::move(name));
    q_.domains.push_back(VarDomain{lower, upper, kind});
    q_.blocks.back().vars.push_back(index);
    return index;
  }
  int binary(std::string name) { return var(std::move(name), 0, 1); }

  InstanceBuilder& objective(int var, const Rational& coef) {
    objective_terms_.push_back(Term{var, coef});
    return *this;
  }
  InstanceBuilder& objective_constant(const Rational& c) {
    q_.objective_constant += c;
    return *this;
  }
  InstanceBuilder& maximize(bool on = true) {
    q_.maximize = on;
    return *this;
  }

  InstanceBuilder& row(std::vector<Term> terms, Sense sense, const Rational& rhs) {
    q_.existential_rows.push_back(LinConstraint::make(std::move(terms), sense, rhs));
    return *this;
  }
  InstanceBuilder& row_ge(std::vector<Term> terms, const Rational& rhs) {
    q_.existential_rows.push_back(LinConstraint::at_least(std::move(terms), rhs));
    return *this;
  }
  InstanceBuilder& universal_row(std::vector<Term> terms, Sense sense, const Rational& rhs) {
    q_.universal_rows.push_back(LinConstraint::make(std::move(terms), sense, rhs, RowSide::Universal));
    return *this;
  }

  /// The objective given so far is in the modeller's sense; maximization
  /// models are negated here.
  QipInstance build() {
    QipInstance q = q_;
    auto terms = normalize_terms(objective_terms_);
    if (q.maximize) {
      for (Term& t : terms) t.coef = -t.coef;
      q.objective_constant = -q.objective_constant;
    }
    q.objective = std::move(terms);
    return q;
  }

 private:
  QipInstance q_;
  std::vector<Term> objective_terms_;
};

// ---------------------------------------------------------------------------
// Validation

enum class Finding {
  NoBlocks,
  FirstBlockNotExistential,
  LastBlockNotExistential,
  EmptyBlock,
  VariableIndexOutOfRange,
  VariableInMultipleBlocks,
  VariableMissingFromBlocks,
  DomainBoundsCrossed,
  TrailingContinuousOutsideLastBlock,
  NameCountMismatch,
  ObjectiveIndexOutOfRange,
  RowIndexOutOfRange,
  RowSideMismatch,
  UniversalRowTouchesExistential,
  UniversalSystemEmpty,
};

inline const char* to_string(Finding f) {
  switch (f) {
    case Finding::NoBlocks: return "NoBlocks";
    case Finding::FirstBlockNotExistential: return "FirstBlockNotExistential";
    case Finding::LastBlockNotExistential: return "LastBlockNotExistential";
    case Finding::EmptyBlock: return "EmptyBlock";
    case Finding::VariableIndexOutOfRange: return "VariableIndexOutOfRange";
    case Finding::VariableInMultipleBlocks: return "VariableInMultipleBlocks";
    case Finding::VariableMissingFromBlocks: return "VariableMissingFromBlocks";
    case Finding::DomainBoundsCrossed: return "DomainBoundsCrossed";
    case Finding::TrailingContinuousOutsideLastBlock: return "TrailingContinuousOutsideLastBlock";
    case Finding::NameCountMismatch: return "NameCountMismatch";
    case Finding::ObjectiveIndexOutOfRange: return "ObjectiveIndexOutOfRange";
    case Finding::RowIndexOutOfRange: return "RowIndexOutOfRange";
    case Finding::RowSideMismatch: return "RowSideMismatch";
    case Finding::UniversalRowTouchesExistential: return "UniversalRowTouchesExistential";
    case Finding::UniversalSystemEmpty: return "UniversalSystemEmpty";
  }
  return "?";
}

struct ValidationIssue {
  Finding finding;
  int index;  // offending block, variable or row; -1 when global

  friend bool operator==(const ValidationIssue&, const ValidationIssue&) = default;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  [[nodiscard]] bool ok() const { return issues.empty(); }
  [[nodiscard]] bool contains(Finding f) const {
    return std::any_of(issues.begin(), issues.end(), [f](const ValidationIssue& i) { return i.finding == f; });
  }
  [[nodiscard]] std::string summary() const {
    std::string s;
    for (const auto& i : issues) {
      if (!s.empty()) s += "; ";
      s += to_string(i.finding);
      if (i.index >= 0) s += "(" + std::to_string(i.index) + ")";
    }
    return s;
  }

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

namespace detail {

// Depth-first search for one point of the universal system within bounds.
// Universal rows only mention universal variables, so the search runs over
// those alone. Returns nullopt when the node budget runs out.
inline std::optional<bool> universal_system_nonempty(const QipInstance& q, long budget = 1'000'000) {
  if (q.universal_rows.empty()) return true;
  std::vector<int> vars;
  for (const auto& row : q.universal_rows)
    for (const Term& t : row.terms) vars.push_back(t.var);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());

  std::vector<VarDomain> box = q.domains;
  auto consistent = [&]() {
    for (const auto& row : q.universal_rows) {
      Rational lo;
      Rational hi;
      for (const Term& t : row.terms) {
        const Rational a(box[t.var].lower);
        const Rational b(box[t.var].upper);
        lo += t.coef.sign() > 0 ? t.coef * a : t.coef * b;
        hi += t.coef.sign() > 0 ? t.coef * b : t.coef * a;
      }
      if (lo > row.rhs) return false;
      if (row.sense == Sense::EQ && hi < row.rhs) return false;
    }
    return true;
  };
  long nodes = 0;
  bool exhausted = false;
  auto dfs = [&](auto&& self, std::size_t k) -> bool {
    if (++nodes > budget) {
      exhausted = true;
      return false;
    }
    if (!consistent()) return false;
    if (k == vars.size()) return true;
    const int v = vars[k];
    const VarDomain saved = box[v];
    for (Int val = saved.lower; val <= saved.upper; ++val) {
      box[v].lower = box[v].upper = val;
      if (self(self, k + 1)) return true;
      if (exhausted) break;
    }
    box[v] = saved;
    return false;
  };
  const bool found = dfs(dfs, 0);
  if (!found && exhausted) return std::nullopt;
  return found;
}

}  // namespace detail

/// Checks the structural conditions of a QIP. Pure; never throws.
inline ValidationReport validate(const QipInstance& q) {
  ValidationReport rep;
  auto add = [&](Finding f, int index) { rep.issues.push_back(ValidationIssue{f, index}); };
  const int n = q.num_vars();

  if (static_cast<int>(q.var_names.size()) != n) add(Finding::NameCountMismatch, -1);
  for (int v = 0; v < n; ++v) {
    if (q.domains[v].lower > q.domains[v].upper) add(Finding::DomainBoundsCrossed, v);
  }

  if (q.blocks.empty()) {
    add(Finding::NoBlocks, -1);
  } else {
    if (q.blocks.front().quantifier != Quantifier::Exists) add(Finding::FirstBlockNotExistential, 0);
    if (q.blocks.back().quantifier != Quantifier::Exists)
      add(Finding::LastBlockNotExistential, static_cast<int>(q.blocks.size()) - 1);
  }

  std::vector<int> seen(static_cast<std::size_t>(std::max(n, 0)), 0);
  bool indices_ok = true;
  for (std::size_t b = 0; b < q.blocks.size(); ++b) {
    if (q.blocks[b].vars.empty()) add(Finding::EmptyBlock, static_cast<int>(b));
    for (int v : q.blocks[b].vars) {
      if (v < 0 || v >= n) {
        add(Finding::VariableIndexOutOfRange, v);
        indices_ok = false;
        continue;
      }
      if (++seen[v] == 2) add(Finding::VariableInMultipleBlocks, v);
      if (q.domains[v].kind == VarKind::TrailingContinuous &&
          (b + 1 != q.blocks.size() || q.blocks[b].quantifier != Quantifier::Exists))
        add(Finding::TrailingContinuousOutsideLastBlock, v);
    }
  }
  for (int v = 0; v < n; ++v)
    if (seen[v] == 0) add(Finding::VariableMissingFromBlocks, v);

  for (const Term& t : q.objective)
    if (t.var < 0 || t.var >= n) add(Finding::ObjectiveIndexOutOfRange, t.var);

  const Layout layout = Layout::of(q);
  auto check_rows = [&](const std::vector<LinConstraint>& rows, RowSide side) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].side != side) add(Finding::RowSideMismatch, static_cast<int>(r));
      for (const Term& t : rows[r].terms) {
        if (t.var < 0 || t.var >= n) {
          add(Finding::RowIndexOutOfRange, static_cast<int>(r));
          indices_ok = false;
          continue;
        }
        if (side == RowSide::Universal && layout.quantifier[t.var] != Quantifier::ForAll) {
          add(Finding::UniversalRowTouchesExistential, static_cast<int>(r));
          break;
        }
      }
    }
  };
  check_rows(q.existential_rows, RowSide::Existential);
  check_rows(q.universal_rows, RowSide::Universal);

  const bool domains_ok = !rep.contains(Finding::DomainBoundsCrossed);
  if (indices_ok && domains_ok && !rep.contains(Finding::UniversalRowTouchesExistential)) {
    auto nonempty = detail::universal_system_nonempty(q);
    if (nonempty.has_value() && !*nonempty) add(Finding::UniversalSystemEmpty, -1);
  }
  return rep;
}

/// Interval bounds (L, U) of the internal objective, constant included, over
/// the variable box.
inline std::pair<Rational, Rational> objective_bounds(const QipInstance& q) {
  Rational lo = q.objective_constant;
  Rational hi = q.objective_constant;
  for (const Term& t : q.objective) {
    const Rational a = t.coef * Rational(q.domains[t.var].lower);
    const Rational b = t.coef * Rational(q.domains[t.var].upper);
    lo += min(a, b);
    hi += max(a, b);
  }
  return {lo, hi};
}

/// Exhaustive check of the immediate-violation property: every universal
/// block assignment that breaks no fully assigned universal row must extend
/// to a point of the universal system. Intended for debugging small models;
/// throws ModelContractError beyond 12 universal variables. Returns the
/// indices of universal blocks where the property fails.
inline std::vector<int> immediate_violation_failures(const QipInstance& q) {
  std::vector<int> uvars;
  std::vector<int> ublock_of_pos;
  for (std::size_t b = 0; b < q.blocks.size(); ++b) {
    if (q.blocks[b].quantifier != Quantifier::ForAll) continue;
    for (int v : q.blocks[b].vars) {
      uvars.push_back(v);
      ublock_of_pos.push_back(static_cast<int>(b));
    }
  }
  if (uvars.size() > 12) throw ModelContractError("immediate-violation check limited to 12 universal variables");

  std::vector<Int> value(static_cast<std::size_t>(q.num_vars()), 0);
  std::vector<int> pos_of(static_cast<std::size_t>(q.num_vars()), -1);
  for (std::size_t i = 0; i < uvars.size(); ++i) pos_of[uvars[i]] = static_cast<int>(i);

  // Highest universal position mentioned by each row.
  std::vector<int> last_pos(q.universal_rows.size(), -1);
  for (std::size_t r = 0; r < q.universal_rows.size(); ++r)
    for (const Term& t : q.universal_rows[r].terms) last_pos[r] = std::max(last_pos[r], pos_of[t.var]);

  auto row_ok = [&](std::size_t r) {
    Rational act;
    for (const Term& t : q.universal_rows[r].terms) act += t.coef * Rational(value[t.var]);
    return q.universal_rows[r].sense == Sense::EQ ? act == q.universal_rows[r].rhs : act <= q.universal_rows[r].rhs;
  };
  auto rows_ok_upto = [&](int pos) {
    for (std::size_t r = 0; r < q.universal_rows.size(); ++r)
      if (last_pos[r] <= pos && !row_ok(r)) return false;
    return true;
  };

  // completable(k): the current assignment of positions < k extends to a full point.
  auto completable = [&](auto&& self, std::size_t k) -> bool {
    if (k == uvars.size()) return rows_ok_upto(static_cast<int>(k));
    const int v = uvars[k];
    for (Int x = q.domains[v].lower; x <= q.domains[v].upper; ++x) {
      value[v] = x;
      if (self(self, k + 1)) return true;
    }
    return false;
  };

  std::vector<int> failures;
  // Walk every prefix that ends at a block boundary and compare the local
  // legality test with true extendability.
  auto walk = [&](auto&& self, std::size_t k) -> void {
    if (k == uvars.size()) return;
    const int block = ublock_of_pos[k];
    std::size_t end = k;
    while (end < uvars.size() && ublock_of_pos[end] == block) ++end;
    // enumerate assignments of positions [k, end)
    auto enumerate = [&](auto&& rec, std::size_t j) -> void {
      if (j == end) {
        const bool local = rows_ok_upto(static_cast<int>(end) - 1);
        std::vector<Int> saved(value);
        const bool extendable = completable(completable, end);
        value = saved;
        if (local != extendable &&
            std::find(failures.begin(), failures.end(), block) == failures.end())
          failures.push_back(block);
        if (local && extendable) self(self, end);
        return;
      }
      const int v = uvars[j];
      for (Int x = q.domains[v].lower; x <= q.domains[v].upper; ++x) {
        value[v] = x;
        rec(rec, j + 1);
      }
    };
    enumerate(enumerate, k);
  };
  walk(walk, 0);
  return failures;
}

}  // namespace qrobust
