#include "dtsel/oracle.hpp"

#include <cmath>
#include <map>
#include <set>

#include "dtsel/error.hpp"

namespace dtsel::oracle {

double polya_urn_marginal(const CategoricalDataset& data, const DagModel& dag,
                          const DirichletPrior& prior) {
  const std::size_t nvars = data.num_variables();
  if (dag.num_variables() != nvars)
    throw Error(ErrorKind::validation, "DAG and dataset have different variable counts");

  std::vector<double> cell(nvars);
  for (VarIndex v = 0; v < nvars; ++v) {
    double configs = 1.0;
    for (VarIndex p : dag.parents(v)) configs *= static_cast<double>(data.cardinality(p));
    const double c = static_cast<double>(data.cardinality(v));
    cell[v] = prior.scheme == PriorScheme::uniform_precision ? prior.total_precision / (c * configs)
                                                             : prior.fixed_cell_value;
    if (!(cell[v] > 0.0)) throw Error(ErrorKind::prior, "Dirichlet hyperparameters must be positive");
  }

  // Keyed by the parent value tuple itself, not a configuration index.
  using Key = std::vector<StateIndex>;
  std::vector<std::map<Key, std::vector<double>>> seen(nvars);

  double total = 0.0;
  for (std::size_t t = 0; t < data.num_cases(); ++t) {
    for (VarIndex v = 0; v < nvars; ++v) {
      Key key;
      for (VarIndex p : dag.parents(v)) key.push_back(data.value(t, p));
      auto& counts = seen[v][key];
      if (counts.empty()) counts.assign(data.cardinality(v), 0.0);
      double config_total = 0.0;
      for (double c : counts) config_total += c;
      const StateIndex k = data.value(t, v);
      const double alpha_config = cell[v] * static_cast<double>(data.cardinality(v));
      total += std::log((cell[v] + counts[k]) / (alpha_config + config_total));
      counts[k] += 1.0;
    }
  }
  return total;
}

ExhaustiveResult exhaustive_select(const LocalPosterior& lp, const LossTable& table) {
  const std::size_t n = lp.probs.size();
  if (table.size() != n)
    throw Error(ErrorKind::dimension, "loss table does not match the lattice");
  ExhaustiveResult out;
  out.report.risks.assign(n, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t s = 0; s < n; ++s) out.report.risks[a] += table.at(s, a) * lp.probs[s];

  double best = out.report.risks[0];
  for (double r : out.report.risks) best = std::min(best, r);
  for (std::size_t a = 0; a < n; ++a) {
    const double scale = std::max({1.0, std::fabs(best), std::fabs(out.report.risks[a])});
    if (out.report.risks[a] - best <= 1e-12 * scale) out.report.ties.push_back(a);
  }
  std::size_t pick = out.report.ties.front();
  for (std::size_t a : out.report.ties) {
    const int ca = __builtin_popcount(lp.subsets[a]);
    const int cp = __builtin_popcount(lp.subsets[pick]);
    if (ca < cp || (ca == cp && a < pick)) pick = a;
  }
  out.report.bayes_action = pick;
  out.report.bayes_risk = best;
  out.model = {lp.family, lp.subsets[pick]};
  return out;
}

namespace {

struct Folder {
  std::span<const LocalPosterior> posteriors;  // in ordering order
  std::span<const LossTable> losses;           // in ordering order
  std::size_t nodes = 0;
  std::vector<std::set<std::size_t>> choices;  // per level, actions chosen anywhere

  // Returns the minimal expected cumulated loss below a decision node at
  // `level`, given the loss cumulated so far. Writes the chosen action.
  double decide(std::size_t level, double cumulated, std::size_t* chosen) {
    ++nodes;
    if (level == posteriors.size()) return cumulated;  // leaf
    const auto& lp = posteriors[level];
    const auto& loss = losses[level];
    const std::size_t m = lp.probs.size();

    std::vector<double> values(m, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
      ++nodes;  // chance node revealing this level's true local model
      for (std::size_t s = 0; s < m; ++s) {
        std::size_t ignored = 0;
        values[a] += lp.probs[s] * decide(level + 1, cumulated + loss.at(s, a), &ignored);
      }
    }
    double best = values[0];
    for (double v : values) best = std::min(best, v);
    std::size_t pick = m;
    for (std::size_t a = 0; a < m; ++a) {
      const double scale = std::max({1.0, std::fabs(best), std::fabs(values[a])});
      if (values[a] - best > 1e-12 * scale) continue;
      if (pick == m) {
        pick = a;
        continue;
      }
      const int ca = __builtin_popcount(lp.subsets[a]);
      const int cp = __builtin_popcount(lp.subsets[pick]);
      if (ca < cp) pick = a;
    }
    choices[level].insert(pick);
    *chosen = pick;
    return best;
  }
};

}  // namespace

FoldResult fold_sequential_tree(std::span<const LocalPosterior> posteriors,
                                std::span<const LossTable> local_losses,
                                const VariableOrdering& ordering) {
  const std::size_t n = ordering.size();
  if (posteriors.size() != n || local_losses.size() != n)
    throw Error(ErrorKind::validation, "one posterior and one loss per variable are required");
  double leaves = 1.0;
  for (const auto& lp : posteriors) {
    leaves *= static_cast<double>(lp.probs.size()) * static_cast<double>(lp.probs.size());
    if (leaves > static_cast<double>(kMaxFoldLeaves))
      throw Error(ErrorKind::capacity, "sequential decision tree too large to fold");
  }

  // Tree levels follow the ordering; inputs are indexed by variable.
  std::vector<LocalPosterior> level_posts;
  std::vector<LossTable> level_losses;
  for (VarIndex v : ordering.order()) {
    if (posteriors[v].family.child != v)
      throw Error(ErrorKind::validation, "posteriors must be indexed by child");
    if (local_losses[v].size() != posteriors[v].probs.size())
      throw Error(ErrorKind::dimension, "local loss does not match the child's lattice");
    level_posts.push_back(posteriors[v]);
    level_losses.push_back(local_losses[v]);
  }

  Folder folder{level_posts, level_losses, 0, std::vector<std::set<std::size_t>>(n)};
  FoldResult out;
  std::size_t root_action = 0;
  out.global_bayes_risk = folder.decide(0, 0.0, &root_action);
  out.tree_size = folder.nodes;

  // Read the policy off the first branch below each optimal action.
  std::vector<LocalModel> locals;
  double cumulated = 0.0;
  for (std::size_t level = 0; level < n; ++level) {
    if (folder.choices[level].size() != 1) out.branch_invariant = false;
    Folder probe{std::span<const LocalPosterior>(level_posts).subspan(level),
                 std::span<const LossTable>(level_losses).subspan(level), 0,
                 std::vector<std::set<std::size_t>>(n - level)};
    std::size_t action = 0;
    probe.decide(0, cumulated, &action);
    const auto& lp = level_posts[level];
    locals.push_back({lp.family, lp.subsets[action]});
    cumulated += level_losses[level].at(0, action);
  }
  out.chosen = global_sum(locals, ordering);
  return out;
}

FoldResult fold_sequential_tree(const CategoricalDataset& data, const LearnConfig& config) {
  if (config.loss.kind != LossSpec::Kind::disintegrable)
    throw Error(ErrorKind::validation, "folding oracle requires a globally disintegrable loss");
  const auto families = families_for(config);
  std::vector<LocalPosterior> posts;
  std::vector<LossTable> losses;
  for (const auto& fam : families) {
    std::span<const double> model_prior;
    if (auto it = config.model_priors.find(fam.child); it != config.model_priors.end())
      model_prior = it->second;
    posts.push_back(
        local_posterior(data, fam, config.prior, model_prior, Execution::serial, config.cap));
    const auto arcs = std::get<std::vector<PairwiseLoss>>(resolve_local_loss(config.loss, fam, data));
    losses.push_back(expand_local(arcs, config.cap));
  }
  return fold_sequential_tree(posts, losses, config.ordering);
}

}  // namespace dtsel::oracle
