#include "dtsel/instances.hpp"

#include <algorithm>
#include <cmath>

namespace dtsel::instances {

double uniform(Rng& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

CategoricalDataset random_dataset(Rng& rng, std::size_t num_vars, std::size_t max_card,
                                  std::size_t n) {
  std::vector<VariableSpec> vars(num_vars);
  for (std::size_t v = 0; v < num_vars; ++v) {
    vars[v].name = "X" + std::to_string(v + 1);
    const std::size_t c = uniform_index(rng, 2, max_card);
    for (std::size_t k = 0; k < c; ++k) vars[v].labels.push_back("s" + std::to_string(k));
  }
  std::vector<std::vector<StateIndex>> rows(n, std::vector<StateIndex>(num_vars));
  for (auto& row : rows)
    for (std::size_t v = 0; v < num_vars; ++v)
      row[v] = static_cast<StateIndex>(uniform_index(rng, 0, vars[v].cardinality() - 1));
  return CategoricalDataset(std::move(vars), rows);
}

DagModel random_dag(Rng& rng, const VariableOrdering& ordering, double p, std::size_t max_parents) {
  std::vector<std::vector<VarIndex>> parents(ordering.size());
  for (VarIndex v : ordering.order())
    for (VarIndex pred : ordering.predecessors(v))
      if (parents[v].size() < max_parents && uniform(rng, 0.0, 1.0) < p) parents[v].push_back(pred);
  return DagModel(std::move(parents));
}

DirichletPrior random_prior(Rng& rng) {
  DirichletPrior prior;
  if (rng() % 2 == 0) {
    prior.scheme = PriorScheme::uniform_precision;
    prior.total_precision = uniform(rng, 0.1, 20.0);
  } else {
    prior.scheme = PriorScheme::fixed_cell;
    prior.fixed_cell_value = uniform(rng, 0.05, 5.0);
  }
  return prior;
}

std::vector<double> random_lattice_probs(Rng& rng, std::size_t q) {
  const std::size_t m = std::size_t{1} << q;
  std::vector<double> w(m);
  // Spread over several orders of magnitude so both sparse and flat
  // posteriors occur.
  const double spread = uniform(rng, 0.0, 6.0);
  for (auto& x : w) x = std::exp(uniform(rng, -spread, spread));
  if (m > 1 && rng() % 4 == 0) w[uniform_index(rng, 0, m - 1)] = w[uniform_index(rng, 0, m - 1)];
  double sum = 0.0;
  for (double x : w) sum += x;
  for (auto& x : w) x /= sum;
  // Push the rounding residue into the largest entry.
  double check = 0.0;
  for (double x : w) check += x;
  *std::max_element(w.begin(), w.end()) += 1.0 - check;
  return w;
}

std::vector<PairwiseLoss> random_pairwise(Rng& rng, std::size_t q) {
  std::vector<PairwiseLoss> out(q);
  for (auto& pl : out) {
    pl.add_penalty = uniform(rng, 0.05, 10.0);
    pl.omit_penalty = uniform(rng, 0.05, 10.0);
  }
  return out;
}

}  // namespace dtsel::instances
