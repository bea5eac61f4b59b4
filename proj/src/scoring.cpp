#include "dtsel/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "dtsel/error.hpp"
#include "dtsel/numeric.hpp"

namespace dtsel {

double DirichletPrior::cell_alpha(std::size_t child_cardinality, std::size_t num_configs) const {
  double a = 0.0;
  switch (scheme) {
    case PriorScheme::uniform_precision:
      a = total_precision /
          (static_cast<double>(child_cardinality) * static_cast<double>(num_configs));
      break;
    case PriorScheme::fixed_cell:
      a = fixed_cell_value;
      break;
  }
  if (!(a > 0.0) || !std::isfinite(a))
    throw Error(ErrorKind::prior, "Dirichlet hyperparameters must be positive and finite");
  return a;
}

double family_log_marginal(const ContingencyCounts& counts, const DirichletPrior& prior) {
  const std::size_t c = counts.child_cardinality;
  const double cell = prior.cell_alpha(c, counts.num_configs);
  const double config_alpha = cell * static_cast<double>(c);
  const double lg_cell = log_gamma(cell);
  const double lg_config = log_gamma(config_alpha);

  double score = 0.0;
  for (std::size_t j = 0; j < counts.num_configs; ++j) {
    const auto nj = counts.config_totals[j];
    if (nj == 0) continue;  // every Gamma ratio is 1
    score += lg_config - log_gamma(config_alpha + nj);
    for (std::size_t k = 0; k < c; ++k) {
      const auto njk = counts.at(j, k);
      if (njk != 0) score += log_gamma(cell + njk) - lg_cell;
    }
  }
  return score;
}

double family_log_marginal(const CategoricalDataset& data, VarIndex child,
                           std::span<const VarIndex> parents, const DirichletPrior& prior) {
  return family_log_marginal(count(data, child, parents), prior);
}

std::vector<double> family_log_marginals(const CategoricalDataset& data, const DagModel& dag,
                                         const DirichletPrior& prior) {
  if (dag.num_variables() != data.num_variables())
    throw Error(ErrorKind::validation, "DAG and dataset have different variable counts");
  std::vector<double> out(dag.num_variables());
  for (VarIndex v = 0; v < out.size(); ++v)
    out[v] = family_log_marginal(data, v, dag.parents(v), prior);
  return out;
}

double global_log_marginal(const CategoricalDataset& data, const DagModel& dag,
                           const DirichletPrior& prior) {
  double total = 0.0;
  for (double s : family_log_marginals(data, dag, prior)) total += s;
  return total;
}

std::vector<double> score_lattice(const CategoricalDataset& data, const CandidateParents& family,
                                  const DirichletPrior& prior, Execution exec, std::size_t cap) {
  const auto lattice = enumerate_lattice(family.q(), cap);
  std::vector<double> scores(lattice.size());
  const auto n = static_cast<std::ptrdiff_t>(lattice.size());

  if (exec == Execution::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto parents = mask_to_parents(lattice[i], family.candidates);
      scores[i] = family_log_marginal(data, family.child, parents, prior);
    }
    return scores;
  }

  // Each subset is scored independently; the output slot fixes the order, so
  // results are bitwise identical to the serial loop.
  bool failed = false;
  Error first_error(ErrorKind::validation, "");
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const auto parents = mask_to_parents(lattice[i], family.candidates);
      scores[i] = family_log_marginal(data, family.child, parents, prior);
    } catch (const Error& e) {
#pragma omp critical(dtsel_score_lattice_error)
      if (!failed) {
        failed = true;
        first_error = e;
      }
    }
  }
  if (failed) throw first_error;
  return scores;
}

namespace {

std::vector<double> normalize_log(std::span<const double> log_scores) {
  const double total = log_sum_exp(log_scores);
  std::vector<double> probs(log_scores.size());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = std::exp(log_scores[i] - total);
  return probs;
}

}  // namespace

LocalPosterior make_local_posterior(CandidateParents family, std::vector<double> probs) {
  auto subsets = enumerate_lattice(family.q(), kMaxParentCap);
  if (probs.size() != subsets.size())
    throw Error(ErrorKind::dimension, "posterior size does not match the lattice");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p > 0.0)) throw Error(ErrorKind::validation, "lattice posterior must be positive");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw Error(ErrorKind::validation, "lattice posterior does not sum to 1");
  LocalPosterior lp;
  lp.family = std::move(family);
  lp.subsets = std::move(subsets);
  lp.log_scores.resize(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) lp.log_scores[i] = std::log(probs[i]);
  lp.probs = std::move(probs);
  return lp;
}

LocalPosterior local_posterior(const CategoricalDataset& data, const CandidateParents& family,
                               const DirichletPrior& prior, std::span<const double> model_prior,
                               Execution exec, std::size_t cap) {
  LocalPosterior lp;
  lp.family = family;
  lp.subsets = enumerate_lattice(family.q(), cap);
  if (!model_prior.empty() && model_prior.size() != lp.subsets.size())
    throw Error(ErrorKind::dimension, "model prior needs one weight per lattice subset");
  for (double w : model_prior)
    if (!(w > 0.0) || !std::isfinite(w))
      throw Error(ErrorKind::validation, "model prior weights must be positive");

  lp.log_scores = score_lattice(data, family, prior, exec, cap);
  if (!model_prior.empty())
    for (std::size_t i = 0; i < lp.log_scores.size(); ++i)
      lp.log_scores[i] += std::log(model_prior[i]);
  lp.probs = normalize_log(lp.log_scores);
  return lp;
}

double arc_probability(const LocalPosterior& lp, std::size_t position) {
  if (position >= lp.q()) throw Error(ErrorKind::validation, "candidate position out of range");
  const SubsetMask bit = SubsetMask{1} << position;
  double p = 0.0;
  for (std::size_t i = 0; i < lp.size(); ++i)
    if (lp.subsets[i] & bit) p += lp.probs[i];
  // Summation can land a few ulps above 1 when the arc is nearly certain.
  return std::min(p, 1.0);
}

double log_bayes_factor(const CategoricalDataset& data, const DagModel& m0, const DagModel& m1,
                        const DirichletPrior& prior) {
  return global_log_marginal(data, m0, prior) - global_log_marginal(data, m1, prior);
}

double bayes_factor(const CategoricalDataset& data, const DagModel& m0, const DagModel& m1,
                    const DirichletPrior& prior) {
  return std::exp(log_bayes_factor(data, m0, m1, prior));
}

}  // namespace dtsel
