#pragma once

#include <cstdint>
#include <vector>

#include "dtsel/dataset.hpp"
#include "dtsel/modelspace.hpp"

namespace dtsel {

// Conditional probability table of one variable: one row per parent
// configuration (row-major over the DAG's parent list), one column per state.
struct ConditionalTable {
  std::vector<std::vector<double>> rows;
};

struct BayesNetwork {
  std::vector<VariableSpec> variables;
  DagModel dag;
  std::vector<ConditionalTable> cpts;  // indexed by variable
};

// Checks shapes, acyclicity, and that every row sums to 1 within 1e-9.
void validate(const BayesNetwork& net);

// Ancestral sampling in topological order from a 64-bit Mersenne Twister
// seeded with `seed`. Same inputs give the same dataset.
CategoricalDataset sample_network(const BayesNetwork& net, std::size_t n, std::uint64_t seed);

}  // namespace dtsel
