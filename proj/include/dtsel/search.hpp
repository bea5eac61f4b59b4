#pragma once

#include <map>
#include <span>
#include <variant>
#include <vector>

#include "dtsel/dataset.hpp"
#include "dtsel/decision.hpp"
#include "dtsel/loss.hpp"
#include "dtsel/modelspace.hpp"
#include "dtsel/scoring.hpp"

namespace dtsel {

enum class ArcDecision { include, exclude, tie };

struct ArcVerdict {
  double delta = 0.0;  // R(a_0) - R(a_j) = lj0 * P_j - l0j * (1 - P_j)
  ArcDecision decision = ArcDecision::tie;
};

// Per-arc rule for disintegrable losses: include iff the arc lowers the risk.
ArcVerdict arc_decision(double arc_probability, const PairwiseLoss& pl);

struct ZeroOneLoss {};

// What select_local minimizes for one child. A vector of pairwise losses
// (one per candidate) is the disintegrable case; a LossTable must be a
// 2^q x 2^q table in lattice order.
using LocalLoss = std::variant<ZeroOneLoss, std::vector<PairwiseLoss>, LossTable>;

struct ArcDiagnostics {
  VarIndex parent = 0;
  double probability = 0.0;
  double delta = 0.0;  // only meaningful when the linear rule was used
  ArcDecision decision = ArcDecision::exclude;
};

enum class SelectionPath { linear_rule, exhaustive, map };

struct LocalSelection {
  LocalModel model;
  std::vector<ArcDiagnostics> arcs;  // candidate order
  double bayes_risk = 0.0;
  std::size_t lattice_size = 1;
  SelectionPath path = SelectionPath::map;
};

// Lattice posterior as a decision-module posterior (complexity = arc count).
Posterior as_posterior(const LocalPosterior& lp);

// q arc comparisons plus the lattice marginals P_j.
LocalSelection select_by_arc_rule(const LocalPosterior& lp, std::span<const PairwiseLoss> arcs);
// Full risk vector over a 2^q x 2^q table.
LocalSelection select_by_table(const LocalPosterior& lp, const LossTable& table);
// Lattice MAP: the Bayes action under 0-1 loss.
LocalSelection select_map(const LocalPosterior& lp);

LocalSelection select_from_posterior(const LocalPosterior& lp, const LocalLoss& loss);

LocalSelection select_local(const CategoricalDataset& data, const CandidateParents& family,
                            const DirichletPrior& prior, std::span<const double> model_prior,
                            const LocalLoss& loss, std::size_t cap = kDefaultParentCap);

// General tables are materialized, so their lattice is capped separately.
inline constexpr std::size_t kMaxTableParents = 10;

struct LearnConfig {
  VariableOrdering ordering;
  std::map<VarIndex, std::vector<VarIndex>> candidate_overrides;
  DirichletPrior prior;
  std::map<VarIndex, std::vector<double>> model_priors;  // empty -> uniform
  LossSpec loss;
  std::size_t cap = kDefaultParentCap;
  Execution exec = Execution::parallel;
};

// Candidate family of every variable (defaults: all predecessors).
std::vector<CandidateParents> families_for(const LearnConfig& config);

// The loss of one child under `spec`; needs the dataset for state counts.
LocalLoss resolve_local_loss(const LossSpec& spec, const CandidateParents& family,
                             const CategoricalDataset& data);

struct LearnResult {
  DagModel dag;
  std::vector<LocalSelection> locals;  // indexed by variable
  double total_bayes_risk = 0.0;
};

// Independent local Bayes selection per child, assembled with global_sum.
// Children are processed concurrently when config.exec is parallel; the
// result does not depend on the execution mode.
LearnResult learn(const CategoricalDataset& data, const LearnConfig& config);

struct K2Result {
  DagModel dag;
  std::vector<double> family_scores;  // indexed by variable
};

// Greedy bottom-up parent addition maximizing the family log marginal.
// Ties between candidate additions go to the earlier candidate.
K2Result k2_greedy(const CategoricalDataset& data, const VariableOrdering& ordering,
                   const DirichletPrior& prior, std::size_t max_parents,
                   std::span<const CandidateParents> families = {});

const char* to_string(ArcDecision d);
const char* to_string(SelectionPath p);

}  // namespace dtsel
