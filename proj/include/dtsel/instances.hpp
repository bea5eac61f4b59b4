#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dtsel/dataset.hpp"
#include "dtsel/loss.hpp"
#include "dtsel/modelspace.hpp"
#include "dtsel/scoring.hpp"

// Seeded random problem generators shared by the verify command and tests.
namespace dtsel::instances {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi);  // inclusive

// Variables named X1..Xm with cardinalities in [2, max_card]; values uniform.
CategoricalDataset random_dataset(Rng& rng, std::size_t num_vars, std::size_t max_card,
                                  std::size_t n);

// Each predecessor in the ordering becomes a parent with probability p,
// keeping at most max_parents parents per child.
DagModel random_dag(Rng& rng, const VariableOrdering& ordering, double p, std::size_t max_parents);

DirichletPrior random_prior(Rng& rng);

// Strictly positive probabilities over the 2^q lattice, normalized; a few
// entries may be duplicated to exercise ties.
std::vector<double> random_lattice_probs(Rng& rng, std::size_t q);

std::vector<PairwiseLoss> random_pairwise(Rng& rng, std::size_t q);

}  // namespace dtsel::instances
