#pragma once

#include <cstddef>
#include <vector>

#include "dtsel/loss.hpp"

namespace dtsel {

// Posterior over an explicit model list. complexity[i] is the arc count of
// model i and drives tie-breaking (fewer arcs first).
struct Posterior {
  std::vector<double> probs;
  std::vector<int> complexity;

  std::size_t size() const { return probs.size(); }
};

// Validates probs (nonnegative, sum to 1 within 1e-12). Empty complexity
// means all models are equally complex.
Posterior make_posterior(std::vector<double> probs, std::vector<int> complexity = {});

struct RiskReport {
  std::vector<double> risks;
  std::size_t bayes_action = 0;
  double bayes_risk = 0.0;
  std::vector<std::size_t> ties;  // every action tied with the minimum
};

struct Choice {
  std::size_t index = 0;
  std::vector<std::size_t> ties;
};

// R(a_j | D) = sum_i l_ij p(M_i | D).
double risk(const LossTable& loss, const Posterior& post, std::size_t action);
std::vector<double> risks(const LossTable& loss, const Posterior& post);

// Minimum-risk action; ties (within kTieTolerance) break toward fewer arcs,
// then the lower index.
RiskReport bayes_action(const LossTable& loss, const Posterior& post);

// Posterior argmax with the same tie rule; the Bayes action under 0-1 loss.
Choice map_action(const Posterior& post);

// Tie-break among candidate indices: fewest arcs, then lowest index.
std::size_t simplest(const std::vector<std::size_t>& candidates, const std::vector<int>& complexity);

}  // namespace dtsel
