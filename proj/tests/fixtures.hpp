#pragma once

#include <vector>

#include "qrobust/qrobust.hpp"

namespace fixtures {

using namespace qrobust;

// Two items, one to pick. Buying now costs (5, 9); the adversary then picks
// period costs (3, 100) or (100, 2). Waiting is best: worst case 3.
inline SelectionParams tiny_selection_params() { return SelectionParams{2, 1, 1, 2, 0}; }

inline SelectionData tiny_selection_data() {
  SelectionData d;
  d.c0 = {5, 9};
  d.c = {{{3, 100}, {100, 2}}};
  return d;
}

inline QipInstance tiny_selection() { return build_selection_qip_pu(tiny_selection_params(), tiny_selection_data()); }

// Capacity 10. Period 0 fits item 1 only; a weight increase on item 1 makes
// both items too heavy in period 1.
inline KnapsackParams tight_knapsack_params() {
  KnapsackParams p;
  p.n = 2;
  p.T = 1;
  return p;
}

inline KnapsackData tight_knapsack_data() {
  KnapsackData d;
  d.p = {{10, 50}, {7, 9}};
  d.w = {{6, 20}, {8, 20}};
  d.a = {{5, 5}};
  d.b = {3, 4};
  d.capacity = 10;
  d.alpha = 2;
  d.beta = 2;
  return d;
}

inline QipInstance single_var_min() {
  InstanceBuilder b("single");
  b.block(Quantifier::Exists);
  const int x = b.binary("x0");
  b.objective(x, 1);
  return b.build();
}

inline QipInstance contradictory() {
  InstanceBuilder b("contradiction");
  b.block(Quantifier::Exists);
  const int x = b.binary("x0");
  b.objective(x, 1);
  b.row({{x, 1}}, Sense::LE, 0);
  b.row({{x, 1}}, Sense::EQ, 1);
  return b.build();
}

/// Small instances of every family on which the oracle is cheap.
inline std::vector<QipInstance> oracle_suite(std::uint64_t seeds = 3) {
  std::vector<QipInstance> out;
  for (std::uint64_t s = 0; s < seeds; ++s) {
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

}  // namespace fixtures
