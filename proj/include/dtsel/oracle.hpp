#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dtsel/dataset.hpp"
#include "dtsel/decision.hpp"
#include "dtsel/loss.hpp"
#include "dtsel/modelspace.hpp"
#include "dtsel/scoring.hpp"
#include "dtsel/search.hpp"

// Brute-force reference implementations. Written for auditability, not
// speed, and kept free of the main scoring and decision arithmetic.
namespace dtsel::oracle {

// Chain rule over cases: sum_t sum_i log[(a_ijk + n_<t(x_ik|pi_ij)) /
// (a_ij + n_<t(pi_ij))], counts built incrementally in case order.
double polya_urn_marginal(const CategoricalDataset& data, const DagModel& dag,
                          const DirichletPrior& prior);

struct ExhaustiveResult {
  LocalModel model;
  RiskReport report;
};

// Evaluates every action's risk over the full table and takes the argmin
// (ties: fewest arcs, then lowest lattice index).
ExhaustiveResult exhaustive_select(const LocalPosterior& lp, const LossTable& table);

struct FoldResult {
  DagModel chosen;
  double global_bayes_risk = 0.0;
  std::size_t tree_size = 0;      // nodes visited
  bool branch_invariant = true;   // every decision node of a level chose the same action
};

// Leaves allowed in a folded tree: prod_i (2^{q_i})^2.
inline constexpr std::size_t kMaxFoldLeaves = 1'000'000;

// Literal averaging-out and folding-back over the sequential decision tree:
// decision nodes in ordering order, each followed by a chance node over that
// child's lattice; leaves carry the loss cumulated along the branch.
FoldResult fold_sequential_tree(std::span<const LocalPosterior> posteriors,
                                std::span<const LossTable> local_losses,
                                const VariableOrdering& ordering);

// Builds the local posteriors and expanded local losses from a learner
// configuration whose loss is disintegrable, then folds.
FoldResult fold_sequential_tree(const CategoricalDataset& data, const LearnConfig& config);

}  // namespace dtsel::oracle
