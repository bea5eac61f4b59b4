#pragma once

#include <span>
#include <vector>

#include "dtsel/dataset.hpp"
#include "dtsel/modelspace.hpp"

namespace dtsel {

enum class PriorScheme {
  uniform_precision,  // alpha_ijk = alpha / (c_i * #configs)
  fixed_cell,         // alpha_ijk = fixed_cell_value
};

struct DirichletPrior {
  double total_precision = 1.0;
  PriorScheme scheme = PriorScheme::uniform_precision;
  double fixed_cell_value = 1.0;

  // alpha_ijk for a family with the given child cardinality and number of
  // parent configurations. Throws Error(prior) if not strictly positive.
  double cell_alpha(std::size_t child_cardinality, std::size_t num_configs) const;

  static DirichletPrior k2() { return {1.0, PriorScheme::fixed_cell, 1.0}; }
};

// Selects the OpenMP kernel or its serial reference.
enum class Execution { serial, parallel };

// log p(D | family) under the Dirichlet prior, closed form in log-Gamma.
double family_log_marginal(const ContingencyCounts& counts, const DirichletPrior& prior);

// Counts and scores one family.
double family_log_marginal(const CategoricalDataset& data, VarIndex child,
                           std::span<const VarIndex> parents, const DirichletPrior& prior);

double global_log_marginal(const CategoricalDataset& data, const DagModel& dag,
                           const DirichletPrior& prior);

// Per-family scores, indexed by variable.
std::vector<double> family_log_marginals(const CategoricalDataset& data, const DagModel& dag,
                                         const DirichletPrior& prior);

// Unnormalized family score of every lattice subset, in enumerate_lattice order.
std::vector<double> score_lattice(const CategoricalDataset& data, const CandidateParents& family,
                                  const DirichletPrior& prior, Execution exec,
                                  std::size_t cap = kDefaultParentCap);

struct LocalPosterior {
  CandidateParents family;
  std::vector<SubsetMask> subsets;  // enumerate_lattice order
  std::vector<double> log_scores;   // log model prior + log marginal, unnormalized
  std::vector<double> probs;

  std::size_t q() const { return family.q(); }
  std::size_t size() const { return probs.size(); }
};

// Builds a posterior from arbitrary lattice probabilities (tests, oracles).
// probs must be in enumerate_lattice order, positive, and sum to 1 within 1e-12.
LocalPosterior make_local_posterior(CandidateParents family, std::vector<double> probs);

// model_prior: one positive weight per lattice subset in enumerate_lattice
// order, or empty for uniform.
LocalPosterior local_posterior(const CategoricalDataset& data, const CandidateParents& family,
                               const DirichletPrior& prior,
                               std::span<const double> model_prior = {},
                               Execution exec = Execution::parallel,
                               std::size_t cap = kDefaultParentCap);

// Posterior probability that candidate `position` (0-based) is a parent.
double arc_probability(const LocalPosterior& lp, std::size_t position);

double log_bayes_factor(const CategoricalDataset& data, const DagModel& m0, const DagModel& m1,
                        const DirichletPrior& prior);

// p(D|m0) / p(D|m1); may overflow to inf or underflow to 0 for large samples.
double bayes_factor(const CategoricalDataset& data, const DagModel& m0, const DagModel& m1,
                    const DirichletPrior& prior);

}  // namespace dtsel
