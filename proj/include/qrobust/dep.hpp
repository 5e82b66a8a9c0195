#pragma once

// Deterministic equivalent program (DEP) construction.
//
// The universal moves of an instance form a scenario tree. Every existential
// variable gets one copy per tree node at the depth of its block, so two
// scenario sequences with a common prefix share the copies of that prefix.
// Existential rows are instantiated once per leaf; the part of the objective
// that depends on the scenario is bounded by an epigraph variable.

#include <algorithm>
#include <cstddef>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrobust/model.hpp"
#include "qrobust/search.hpp"

namespace qrobust {

class ScenarioExplosion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Universal block assignments in play order, one per elapsed universal block.
using ScenarioHistory = std::vector<std::vector<Int>>;

struct ScenarioNode {
  int parent = -1;
  int depth = 0;          // universal blocks elapsed
  std::vector<Int> move;  // values of the depth-th universal block (empty at the root)
  std::vector<int> children;
};

/// Tree of legal universal sequences. Node ids are in depth-first preorder.
struct ScenarioTree {
  std::vector<int> universal_blocks;  // block indices, in order
  std::vector<ScenarioNode> nodes;
  std::vector<int> leaves;

  [[nodiscard]] int depth() const { return static_cast<int>(universal_blocks.size()); }

  [[nodiscard]] ScenarioHistory history(int node) const {
    ScenarioHistory h;
    for (int n = node; n > 0; n = nodes[n].parent) h.push_back(nodes[n].move);
    std::reverse(h.begin(), h.end());
    return h;
  }

  /// Ancestor of `node` at `depth` (the node itself when depths agree).
  [[nodiscard]] int ancestor(int node, int depth) const {
    while (nodes[node].depth > depth) node = nodes[node].parent;
    return node;
  }
};

inline constexpr std::size_t kDefaultLeafCap = 1'000'000;

inline ScenarioTree enumerate_scenarios(const QipInstance& q, std::size_t leaf_cap = kDefaultLeafCap) {
  ScenarioTree tree;
  for (std::size_t b = 0; b < q.blocks.size(); ++b)
    if (q.blocks[b].quantifier == Quantifier::ForAll) tree.universal_blocks.push_back(static_cast<int>(b));
  const detail::UniversalMoves gen(q);
  std::vector<Int> x(static_cast<std::size_t>(q.num_vars()), 0);
  tree.nodes.push_back(ScenarioNode{});

  auto expand = [&](auto&& self, int node) -> void {
    const int d = tree.nodes[node].depth;
    if (d == tree.depth()) {
      tree.leaves.push_back(node);
      if (tree.leaves.size() > leaf_cap)
        throw ScenarioExplosion("scenario tree exceeds " + std::to_string(leaf_cap) + " leaves");
      return;
    }
    const int block = tree.universal_blocks[d];
    const auto moves = gen.enumerate(x, block);
    for (const auto& move : moves) {
      const auto& vars = q.blocks[block].vars;
      for (std::size_t i = 0; i < vars.size(); ++i) x[vars[i]] = move[i];
      const int child = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back(ScenarioNode{node, d + 1, move, {}});
      tree.nodes[node].children.push_back(child);
      self(self, child);
    }
  };
  expand(expand, 0);
  return tree;
}

struct VarOrigin {
  int original = -1;  // variable of the source instance; -1 for auxiliary variables
  int node = 0;       // scenario-tree node whose history the copy belongs to

  friend bool operator==(const VarOrigin&, const VarOrigin&) = default;
};

/// Single-block minimization instance plus the provenance of its variables.
struct MipInstance {
  QipInstance model;
  std::vector<VarOrigin> origin;
  std::shared_ptr<const ScenarioTree> tree;

  [[nodiscard]] int num_vars() const { return model.num_vars(); }

  /// Wraps a hand-built single-block model.
  static MipInstance from_model(QipInstance m) {
    MipInstance out;
    out.origin.assign(static_cast<std::size_t>(m.num_vars()), VarOrigin{});
    out.model = std::move(m);
    return out;
  }
};

namespace detail {

struct LinExpr {
  std::vector<Term> terms;
  Rational constant;

  void normalize() { terms = normalize_terms(std::move(terms)); }
};

inline Rational expr_min(const LinExpr& e, const std::vector<VarDomain>& d) {
  Rational v = e.constant;
  for (const Term& t : e.terms) v += t.coef * Rational(t.coef.sign() > 0 ? d[t.var].lower : d[t.var].upper);
  return v;
}
inline Rational expr_max(const LinExpr& e, const std::vector<VarDomain>& d) {
  Rational v = e.constant;
  for (const Term& t : e.terms) v += t.coef * Rational(t.coef.sign() > 0 ? d[t.var].upper : d[t.var].lower);
  return v;
}

class Flattener {
 public:
  Flattener(const QipInstance& q, std::size_t leaf_cap)
      : q_(q), layout_(Layout::of(q)), tree_(std::make_shared<ScenarioTree>(enumerate_scenarios(q, leaf_cap))) {}

  MipInstance run() {
    const int n = q_.num_vars();
    const int depth = tree_->depth();
    out_.model.name = q_.name.empty() ? std::string("dep") : q_.name + "_dep";
    out_.model.maximize = q_.maximize;
    out_.model.blocks.push_back(QuantBlock{Quantifier::Exists, {}});

    // Universal variable -> (ordinal of its universal block, position in block).
    universal_slot_.assign(static_cast<std::size_t>(n), {-1, -1});
    for (int k = 0; k < depth; ++k) {
      const auto& vars = q_.blocks[tree_->universal_blocks[k]].vars;
      for (std::size_t i = 0; i < vars.size(); ++i) universal_slot_[vars[i]] = {k, static_cast<int>(i)};
    }

    stage_vars_.assign(static_cast<std::size_t>(depth) + 1, {});
    stage_pos_.assign(static_cast<std::size_t>(n), -1);
    for (int v = 0; v < n; ++v) {
      if (layout_.quantifier[v] != Quantifier::Exists || q_.domains[v].kind != VarKind::Integer) continue;
      const int d = layout_.universal_before[v];
      stage_pos_[v] = static_cast<int>(stage_vars_[d].size());
      stage_vars_[d].push_back(v);
    }
    node_base_.assign(tree_->nodes.size(), 0);
    for (std::size_t node = 0; node < tree_->nodes.size(); ++node) {
      node_base_[node] = out_.model.num_vars();
      for (int v : stage_vars_[tree_->nodes[node].depth]) {
        std::string name = q_.var_names[v];
        if (node != 0) name += "_h" + std::to_string(node);
        add_var(std::move(name), q_.domains[v], VarOrigin{v, static_cast<int>(node)});
      }
    }

    classify_trailing();
    if (depth > 0) z_ = add_var("z_epi", VarDomain{0, 0, VarKind::TrailingContinuous}, VarOrigin{-1, 0});

    for (const Term& t : q_.objective) {
      if (layout_.quantifier[t.var] == Quantifier::Exists && q_.domains[t.var].kind == VarKind::Integer &&
          layout_.universal_before[t.var] == 0 && depth > 0)
        objective_.push_back(Term{copy_of(t.var, 0), t.coef});
    }
    for (int leaf : tree_->leaves) process_leaf(leaf);

    if (z_ >= 0) {
      objective_.push_back(Term{z_, Rational(1)});
      out_.model.domains[z_].lower = have_z_bounds_ ? z_lo_.floor() : 0;
      out_.model.domains[z_].upper = have_z_bounds_ ? z_hi_.ceil() : 0;
    }
    out_.model.objective = normalize_terms(objective_);
    out_.model.objective_constant = objective_constant_;
    out_.tree = tree_;
    return std::move(out_);
  }

 private:
  int add_var(std::string name, VarDomain dom, VarOrigin origin) {
    const int idx = out_.model.num_vars();
    out_.model.var_names.push_back(std::move(name));
    out_.model.domains.push_back(dom);
    out_.model.blocks[0].vars.push_back(idx);
    out_.origin.push_back(origin);
    return idx;
  }

  int copy_of(int v, int node) const {
    const int anc = tree_->ancestor(node, layout_.universal_before[v]);
    return node_base_[anc] + stage_pos_[v];
  }

  Int universal_value(int v, int leaf) const {
    const auto [k, i] = universal_slot_[v];
    return tree_->nodes[tree_->ancestor(leaf, k + 1)].move[i];
  }

  // A trailing variable can be eliminated when each of its rows is an LE row
  // in which it is the only trailing variable and has a negative coefficient.
  void classify_trailing() {
    eliminable_.assign(static_cast<std::size_t>(q_.num_vars()), 0);
    weight_.assign(static_cast<std::size_t>(q_.num_vars()), Rational(0));
    for (int v = 0; v < q_.num_vars(); ++v)
      if (q_.domains[v].kind == VarKind::TrailingContinuous) {
        eliminable_[v] = 1;
        trailing_.push_back(v);
      }
    for (const Term& t : q_.objective)
      if (q_.domains[t.var].kind == VarKind::TrailingContinuous) weight_[t.var] = t.coef;
    for (const auto& row : q_.existential_rows) {
      int count = 0;
      for (const Term& t : row.terms)
        if (q_.domains[t.var].kind == VarKind::TrailingContinuous) ++count;
      if (count == 0) continue;
      for (const Term& t : row.terms) {
        if (q_.domains[t.var].kind != VarKind::TrailingContinuous) continue;
        if (count > 1 || row.sense != Sense::LE || t.coef.sign() > 0) eliminable_[t.var] = 0;
      }
    }
    for (int v : trailing_)
      if (weight_[v].sign() < 0) eliminable_[v] = 0;
  }

  // Maps the non-trailing part of `terms` into copies for `leaf`; universal
  // values land in the constant. Trailing terms are returned separately.
  LinExpr instantiate(const std::vector<Term>& terms, int leaf, std::vector<Term>* trailing) const {
    LinExpr e;
    for (const Term& t : terms) {
      if (layout_.quantifier[t.var] == Quantifier::ForAll) {
        e.constant += t.coef * Rational(universal_value(t.var, leaf));
      } else if (q_.domains[t.var].kind == VarKind::TrailingContinuous) {
        if (trailing != nullptr) trailing->push_back(t);
      } else {
        e.terms.push_back(Term{copy_of(t.var, leaf), t.coef});
      }
    }
    e.normalize();
    return e;
  }

  void add_row(LinExpr lhs, Sense sense, const Rational& rhs) {
    lhs.normalize();
    LinConstraint row = LinConstraint::make(std::move(lhs.terms), sense, rhs - lhs.constant);
    if (row.terms.empty()) {
      const bool ok = row.sense == Sense::EQ ? row.rhs.is_zero() : row.rhs.sign() >= 0;
      if (ok) return;
      row.sense = Sense::LE;
      row.rhs = Rational(-1);
    }
    std::string key = row.sense == Sense::EQ ? "=" : "<";
    key += row.rhs.str();
    for (const Term& t : row.terms) key += "|" + std::to_string(t.var) + ":" + t.coef.str();
    if (!seen_rows_.insert(std::move(key)).second) return;
    out_.model.existential_rows.push_back(std::move(row));
  }

  void process_leaf(int leaf) {
    const auto& dom = out_.model.domains;
    const bool fallback_all = trailing_fallback_needed(leaf);

    std::vector<int> leaf_copy(static_cast<std::size_t>(q_.num_vars()), -1);
    auto trailing_copy = [&](int v) {
      if (leaf_copy[v] < 0) {
        std::string name = q_.var_names[v];
        if (leaf != 0) name += "_h" + std::to_string(leaf);
        leaf_copy[v] = add_var(std::move(name), q_.domains[v], VarOrigin{v, leaf});
      }
      return leaf_copy[v];
    };
    auto kept = [&](int v) { return fallback_all || eliminable_[v] == 0; };

    for (const auto& row : q_.existential_rows) {
      std::vector<Term> tr;
      LinExpr e = instantiate(row.terms, leaf, &tr);
      if (tr.empty()) {
        add_row(std::move(e), row.sense, row.rhs);
        continue;
      }
      if (std::all_of(tr.begin(), tr.end(), [&](const Term& t) { return !kept(t.var); })) continue;
      for (const Term& t : tr) e.terms.push_back(Term{trailing_copy(t.var), t.coef});
      add_row(std::move(e), row.sense, row.rhs);
    }

    // Choices for the value of each eliminated trailing variable: it equals
    // the largest of these expressions.
    std::vector<std::vector<LinExpr>> choices;
    if (!fallback_all) {
      for (int v : trailing_) {
        if (kept(v)) continue;
        auto options = eliminated_options(v, leaf);
        if (weight_[v].is_zero()) continue;
        for (auto& o : options) {
          for (Term& t : o.terms) t.coef *= weight_[v];
          o.constant *= weight_[v];
        }
        choices.push_back(std::move(options));
      }
    }

    LinExpr rest;
    rest.constant = q_.objective_constant;
    for (const Term& t : q_.objective) {
      if (layout_.quantifier[t.var] == Quantifier::ForAll) {
        rest.constant += t.coef * Rational(universal_value(t.var, leaf));
      } else if (q_.domains[t.var].kind == VarKind::TrailingContinuous) {
        if (kept(t.var)) rest.terms.push_back(Term{trailing_copy(t.var), t.coef});
      } else if (z_ < 0 || layout_.universal_before[t.var] > 0) {
        rest.terms.push_back(Term{copy_of(t.var, leaf), t.coef});
      }
    }

    std::vector<std::size_t> pick(choices.size(), 0);
    while (true) {
      LinExpr total = rest;
      for (std::size_t c = 0; c < choices.size(); ++c) {
        const LinExpr& o = choices[c][pick[c]];
        total.terms.insert(total.terms.end(), o.terms.begin(), o.terms.end());
        total.constant += o.constant;
      }
      total.normalize();
      if (z_ < 0) {
        objective_.insert(objective_.end(), total.terms.begin(), total.terms.end());
        objective_constant_ += total.constant;
      } else {
        const Rational lo = expr_min(total, dom);
        const Rational hi = expr_max(total, dom);
        if (!have_z_bounds_) {
          z_lo_ = lo;
          z_hi_ = hi;
          have_z_bounds_ = true;
        } else {
          z_lo_ = max(z_lo_, lo);
          z_hi_ = max(z_hi_, hi);
        }
        total.terms.push_back(Term{z_, Rational(-1)});
        add_row(std::move(total), Sense::LE, Rational(0));
      }
      std::size_t c = 0;
      while (c < choices.size() && ++pick[c] == choices[c].size()) pick[c++] = 0;
      if (c == choices.size()) break;
    }
  }

  // Candidate expressions for trailing variable v at `leaf`; adds the rows
  // that keep it within its upper bound.
  std::vector<LinExpr> eliminated_options(int v, int leaf) {
    const auto& dom = out_.model.domains;
    const Rational lb(q_.domains[v].lower);
    const Rational ub(q_.domains[v].upper);
    std::vector<LinExpr> exprs;
    for (const auto& row : q_.existential_rows) {
      Rational own;
      bool mentions = false;
      for (const Term& t : row.terms)
        if (t.var == v) {
          own = t.coef;
          mentions = true;
        }
      if (!mentions) continue;
      // rest + own*v <= rhs, own < 0  =>  v >= (rest - rhs) / (-own)
      LinExpr e = instantiate(row.terms, leaf, nullptr);
      e.constant -= row.rhs;
      const Rational scale = Rational(1) / (-own);
      for (Term& t : e.terms) t.coef *= scale;
      e.constant *= scale;
      if (expr_max(e, dom) > ub) {
        LinExpr cap = e;
        add_row(std::move(cap), Sense::LE, ub);
      }
      if (expr_max(e, dom) <= lb) continue;
      exprs.push_back(std::move(e));
    }
    const bool lb_dominated =
        std::any_of(exprs.begin(), exprs.end(), [&](const LinExpr& e) { return expr_min(e, dom) >= lb; });
    if (!lb_dominated) exprs.push_back(LinExpr{{}, lb});
    if (lb_dominated && exprs.size() > 1) {
      // Keep one dominating expression when a single one is always largest.
      std::vector<LinExpr> unique;
      for (auto& e : exprs) {
        const bool dup = std::any_of(unique.begin(), unique.end(),
                                     [&](const LinExpr& u) { return u.terms == e.terms && u.constant == e.constant; });
        if (!dup) unique.push_back(std::move(e));
      }
      exprs = std::move(unique);
    }
    return exprs;
  }

  bool trailing_fallback_needed(int leaf) {
    double combos = 1;
    for (int v : trailing_) {
      if (eliminable_[v] == 0 || weight_[v].is_zero()) continue;
      combos *= static_cast<double>(count_options(v, leaf));
    }
    if (combos <= 1) return false;
    return z_ < 0 || combos > 4096;
  }

  std::size_t count_options(int v, int leaf) const {
    const auto& dom = out_.model.domains;
    const Rational lb(q_.domains[v].lower);
    std::size_t count = 0;
    bool dominated = false;
    for (const auto& row : q_.existential_rows) {
      Rational own;
      bool mentions = false;
      for (const Term& t : row.terms)
        if (t.var == v) {
          own = t.coef;
          mentions = true;
        }
      if (!mentions) continue;
      LinExpr e = instantiate(row.terms, leaf, nullptr);
      e.constant -= row.rhs;
      const Rational scale = Rational(1) / (-own);
      for (Term& t : e.terms) t.coef *= scale;
      e.constant *= scale;
      if (expr_max(e, dom) <= lb) continue;
      ++count;
      if (expr_min(e, dom) >= lb) dominated = true;
    }
    return dominated ? count : count + 1;
  }

  const QipInstance& q_;
  Layout layout_;
  std::shared_ptr<ScenarioTree> tree_;
  MipInstance out_;
  std::vector<std::pair<int, int>> universal_slot_;
  std::vector<std::vector<int>> stage_vars_;
  std::vector<int> stage_pos_;
  std::vector<int> node_base_;
  std::vector<int> trailing_;
  std::vector<char> eliminable_;
  std::vector<Rational> weight_;
  int z_ = -1;
  Rational z_lo_;
  Rational z_hi_;
  bool have_z_bounds_ = false;
  std::vector<Term> objective_;
  Rational objective_constant_;
  std::set<std::string> seen_rows_;
};

}  // namespace detail

/// Deterministic equivalent of `q`: a single existential block whose optimal
/// value equals the game value of `q`. Throws ScenarioExplosion beyond
/// `leaf_cap` scenario sequences.
inline MipInstance flatten(const QipInstance& q, std::size_t leaf_cap = kDefaultLeafCap) {
  return detail::Flattener(q, leaf_cap).run();
}

}  // namespace qrobust
