#include "dtsel/network.hpp"

#include <cmath>
#include <random>

#include "dtsel/error.hpp"

namespace dtsel {

void validate(const BayesNetwork& net) {
  const std::size_t n = net.variables.size();
  if (net.dag.num_variables() != n || net.cpts.size() != n)
    throw Error(ErrorKind::validation, "network DAG, CPTs and variables disagree in size");
  if (!net.dag.is_acyclic()) throw Error(ErrorKind::validation, "network graph has a cycle");
  for (VarIndex v = 0; v < n; ++v) {
    const auto& var = net.variables[v];
    if (var.cardinality() < 2)
      throw Error(ErrorKind::validation, "variable '" + var.name + "' needs at least 2 states");
    std::size_t configs = 1;
    for (VarIndex p : net.dag.parents(v)) configs *= net.variables[p].cardinality();
    const auto& rows = net.cpts[v].rows;
    if (rows.size() != configs)
      throw Error(ErrorKind::validation, "CPT of '" + var.name + "' has " +
                                             std::to_string(rows.size()) + " rows, expected " +
                                             std::to_string(configs));
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (rows[j].size() != var.cardinality())
        throw Error(ErrorKind::validation,
                    "CPT row " + std::to_string(j) + " of '" + var.name + "' has the wrong width");
      double sum = 0.0;
      for (double p : rows[j]) {
        if (!(p >= 0.0) || !std::isfinite(p))
          throw Error(ErrorKind::validation, "CPT of '" + var.name + "' has a negative entry");
        sum += p;
      }
      if (std::fabs(sum - 1.0) > 1e-9)
        throw Error(ErrorKind::validation,
                    "CPT row " + std::to_string(j) + " of '" + var.name + "' does not sum to 1");
    }
  }
}

CategoricalDataset sample_network(const BayesNetwork& net, std::size_t n, std::uint64_t seed) {
  validate(net);
  const auto topo = net.dag.topological_order();
  std::mt19937_64 rng(seed);
  // 53 random bits -> uniform double in [0, 1), independent of the standard
  // library's distribution implementations.
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  std::vector<std::vector<StateIndex>> rows(n, std::vector<StateIndex>(net.variables.size()));
  for (auto& row : rows) {
    for (VarIndex v : topo) {
      std::size_t j = 0;
      for (VarIndex p : net.dag.parents(v)) j = j * net.variables[p].cardinality() + row[p];
      const auto& probs = net.cpts[v].rows[j];
      const double u = uniform();
      double acc = 0.0;
      std::size_t k = 0;
      // The last positive entry absorbs rounding in the cumulative sum.
      std::size_t last_positive = 0;
      for (std::size_t s = 0; s < probs.size(); ++s)
        if (probs[s] > 0.0) last_positive = s;
      for (k = 0; k < last_positive; ++k) {
        acc += probs[k];
        if (u < acc && probs[k] > 0.0) break;
      }
      row[v] = static_cast<StateIndex>(k);
    }
  }
  return CategoricalDataset(net.variables, rows);
}

}  // namespace dtsel
