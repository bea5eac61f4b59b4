#include "dtsel/decision.hpp"

#include <algorithm>
#include <cmath>

#include "dtsel/error.hpp"
#include "dtsel/numeric.hpp"

namespace dtsel {

Posterior make_posterior(std::vector<double> probs, std::vector<int> complexity) {
  if (probs.empty()) throw Error(ErrorKind::validation, "posterior over no models");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw Error(ErrorKind::validation, "posterior probabilities must be nonnegative");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw Error(ErrorKind::validation, "posterior probabilities must sum to 1");
  if (complexity.empty()) complexity.assign(probs.size(), 0);
  if (complexity.size() != probs.size())
    throw Error(ErrorKind::dimension, "one complexity value per model is required");
  return {std::move(probs), std::move(complexity)};
}

double risk(const LossTable& loss, const Posterior& post, std::size_t action) {
  if (loss.size() != post.size())
    throw Error(ErrorKind::dimension, "loss table and posterior sizes differ");
  if (action >= loss.size()) throw Error(ErrorKind::dimension, "action index out of range");
  double r = 0.0;
  for (std::size_t i = 0; i < post.size(); ++i) r += loss.at(i, action) * post.probs[i];
  return r;
}

std::vector<double> risks(const LossTable& loss, const Posterior& post) {
  std::vector<double> out(loss.size());
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = risk(loss, post, a);
  return out;
}

std::size_t simplest(const std::vector<std::size_t>& candidates, const std::vector<int>& complexity) {
  return *std::min_element(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    if (complexity[a] != complexity[b]) return complexity[a] < complexity[b];
    return a < b;
  });
}

RiskReport bayes_action(const LossTable& loss, const Posterior& post) {
  RiskReport report;
  report.risks = risks(loss, post);
  const double best = *std::min_element(report.risks.begin(), report.risks.end());
  for (std::size_t a = 0; a < report.risks.size(); ++a)
    if (nearly_tied(report.risks[a], best)) report.ties.push_back(a);
  report.bayes_action = simplest(report.ties, post.complexity);
  report.bayes_risk = best;
  return report;
}

Choice map_action(const Posterior& post) {
  if (post.probs.empty()) throw Error(ErrorKind::validation, "posterior over no models");
  Choice out;
  const double best = *std::max_element(post.probs.begin(), post.probs.end());
  for (std::size_t i = 0; i < post.size(); ++i)
    if (nearly_tied(post.probs[i], best)) out.ties.push_back(i);
  out.index = simplest(out.ties, post.complexity);
  return out;
}

}  // namespace dtsel
