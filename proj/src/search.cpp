#include "dtsel/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "dtsel/error.hpp"
#include "dtsel/numeric.hpp"

namespace dtsel {

ArcVerdict arc_decision(double arc_probability, const PairwiseLoss& pl) {
  if (!(arc_probability >= 0.0 && arc_probability <= 1.0))
    throw Error(ErrorKind::validation, "arc probability outside [0, 1]");
  const double gain = pl.omit_penalty * arc_probability;
  const double cost = pl.add_penalty * (1.0 - arc_probability);
  ArcVerdict v;
  v.delta = gain - cost;
  if (nearly_tied(gain, cost))
    v.decision = ArcDecision::tie;
  else
    v.decision = v.delta > 0.0 ? ArcDecision::include : ArcDecision::exclude;
  return v;
}

Posterior as_posterior(const LocalPosterior& lp) {
  Posterior post;
  post.probs = lp.probs;
  post.complexity.reserve(lp.subsets.size());
  for (SubsetMask s : lp.subsets) post.complexity.push_back(arc_count(s));
  return post;
}

namespace {

std::vector<ArcDiagnostics> arc_marginals(const LocalPosterior& lp) {
  std::vector<ArcDiagnostics> arcs(lp.q());
  for (std::size_t j = 0; j < lp.q(); ++j) {
    arcs[j].parent = lp.family.candidates[j];
    arcs[j].probability = arc_probability(lp, j);
  }
  return arcs;
}

void mark_decisions(LocalSelection& sel) {
  for (std::size_t j = 0; j < sel.arcs.size(); ++j)
    sel.arcs[j].decision =
        (sel.model.included >> j) & 1u ? ArcDecision::include : ArcDecision::exclude;
}

}  // namespace

LocalSelection select_by_arc_rule(const LocalPosterior& lp, std::span<const PairwiseLoss> arcs) {
  if (arcs.size() != lp.q())
    throw Error(ErrorKind::dimension, "one pairwise loss per candidate arc is required");
  LocalSelection sel;
  sel.path = SelectionPath::linear_rule;
  sel.lattice_size = lp.size();
  sel.arcs = arc_marginals(lp);
  sel.model = LocalModel::null_model(lp.family);
  // R(a_0) = sum_j lj0 P_j; each included arc lowers it by delta_j.
  double risk = 0.0;
  for (std::size_t j = 0; j < arcs.size(); ++j) {
    validate(arcs[j]);
    risk += arcs[j].omit_penalty * sel.arcs[j].probability;
  }
  for (std::size_t j = 0; j < arcs.size(); ++j) {
    const auto verdict = arc_decision(sel.arcs[j].probability, arcs[j]);
    sel.arcs[j].delta = verdict.delta;
    sel.arcs[j].decision = verdict.decision;
    if (verdict.decision == ArcDecision::include) {
      sel.model.included |= SubsetMask{1} << j;
      risk -= verdict.delta;
    }
  }
  sel.bayes_risk = risk;
  return sel;
}

LocalSelection select_by_table(const LocalPosterior& lp, const LossTable& table) {
  if (table.size() != lp.size())
    throw Error(ErrorKind::dimension, "loss table has " + std::to_string(table.size()) +
                                          " states but the lattice has " +
                                          std::to_string(lp.size()));
  const auto report = bayes_action(table, as_posterior(lp));
  LocalSelection sel;
  sel.path = SelectionPath::exhaustive;
  sel.lattice_size = lp.size();
  sel.arcs = arc_marginals(lp);
  sel.model = {lp.family, lp.subsets[report.bayes_action]};
  sel.bayes_risk = report.bayes_risk;
  mark_decisions(sel);
  return sel;
}

LocalSelection select_map(const LocalPosterior& lp) {
  const auto choice = map_action(as_posterior(lp));
  LocalSelection sel;
  sel.path = SelectionPath::map;
  sel.lattice_size = lp.size();
  sel.arcs = arc_marginals(lp);
  sel.model = {lp.family, lp.subsets[choice.index]};
  sel.bayes_risk = 1.0 - lp.probs[choice.index];
  mark_decisions(sel);
  return sel;
}

LocalSelection select_from_posterior(const LocalPosterior& lp, const LocalLoss& loss) {
  return std::visit(
      [&](const auto& l) -> LocalSelection {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ZeroOneLoss>)
          return select_map(lp);
        else if constexpr (std::is_same_v<T, LossTable>)
          return select_by_table(lp, l);
        else
          return select_by_arc_rule(lp, l);
      },
      loss);
}

LocalSelection select_local(const CategoricalDataset& data, const CandidateParents& family,
                            const DirichletPrior& prior, std::span<const double> model_prior,
                            const LocalLoss& loss, std::size_t cap) {
  const auto lp = local_posterior(data, family, prior, model_prior, Execution::serial, cap);
  return select_from_posterior(lp, loss);
}

std::vector<CandidateParents> families_for(const LearnConfig& config) {
  auto families = default_families(config.ordering);
  for (const auto& [child, candidates] : config.candidate_overrides) {
    if (child >= families.size())
      throw Error(ErrorKind::validation, "candidate override for an unknown variable");
    families[child].candidates = candidates;
  }
  for (const auto& fam : families) validate_family(fam, config.ordering, config.cap);
  return families;
}

LocalLoss resolve_local_loss(const LossSpec& spec, const CandidateParents& family,
                             const CategoricalDataset& data) {
  switch (spec.kind) {
    case LossSpec::Kind::zero_one:
      return ZeroOneLoss{};
    case LossSpec::Kind::disintegrable: {
      std::vector<PairwiseLoss> arcs;
      for (VarIndex p : family.candidates) arcs.push_back(spec.pair_for(family.child, p));
      return arcs;
    }
    case LossSpec::Kind::state_count: {
      if (family.q() > kMaxTableParents)
        throw Error(ErrorKind::capacity, "state-count loss over more than " +
                                             std::to_string(kMaxTableParents) + " candidates");
      std::vector<std::size_t> cards;
      for (VarIndex p : family.candidates) cards.push_back(data.cardinality(p));
      return example2_state_count_loss(cards, spec.h, spec.k);
    }
    case LossSpec::Kind::table: {
      auto it = spec.tables.find(family.child);
      if (it == spec.tables.end()) return ZeroOneLoss{};
      if (it->second.size() != (std::size_t{1} << family.q()))
        throw Error(ErrorKind::dimension, "loss table for variable " +
                                              std::to_string(family.child) +
                                              " does not match its lattice");
      return it->second;
    }
  }
  return ZeroOneLoss{};
}

LearnResult learn(const CategoricalDataset& data, const LearnConfig& config) {
  if (config.ordering.size() != data.num_variables())
    throw Error(ErrorKind::validation, "ordering does not cover the dataset's variables");
  const auto families = families_for(config);
  const std::size_t n = families.size();

  std::vector<LocalLoss> losses;
  losses.reserve(n);
  for (const auto& fam : families) losses.push_back(resolve_local_loss(config.loss, fam, data));

  auto model_prior_of = [&](VarIndex v) -> std::span<const double> {
    auto it = config.model_priors.find(v);
    if (it == config.model_priors.end()) return {};
    return it->second;
  };

  std::vector<std::optional<LocalSelection>> selected(n);
  if (config.exec == Execution::serial) {
    for (VarIndex v = 0; v < n; ++v)
      selected[v] = select_local(data, families[v], config.prior, model_prior_of(v), losses[v],
                                 config.cap);
  } else {
    // Children are independent decision problems; each writes its own slot.
    std::optional<Error> failure;
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const auto v = static_cast<VarIndex>(i);
      try {
        selected[v] = select_local(data, families[v], config.prior, model_prior_of(v),
                                   losses[v], config.cap);
      } catch (const Error& e) {
#pragma omp critical(dtsel_learn_error)
        if (!failure) failure = e;
      }
    }
    if (failure) throw *failure;
  }

  LearnResult result;
  std::vector<LocalModel> locals;
  locals.reserve(n);
  for (VarIndex v = 0; v < n; ++v) {
    result.total_bayes_risk += selected[v]->bayes_risk;
    locals.push_back(selected[v]->model);
    result.locals.push_back(std::move(*selected[v]));
  }
  result.dag = global_sum(locals, config.ordering);
  return result;
}

K2Result k2_greedy(const CategoricalDataset& data, const VariableOrdering& ordering,
                   const DirichletPrior& prior, std::size_t max_parents,
                   std::span<const CandidateParents> families) {
  std::vector<CandidateParents> fams;
  if (families.empty())
    fams = default_families(ordering);
  else
    fams.assign(families.begin(), families.end());
  if (fams.size() != data.num_variables())
    throw Error(ErrorKind::validation, "one candidate family per variable is required");

  K2Result out;
  std::vector<std::vector<VarIndex>> parents(fams.size());
  out.family_scores.resize(fams.size());
  for (const auto& fam : fams) {
    std::vector<VarIndex> current;
    double best = family_log_marginal(data, fam.child, current, prior);
    std::vector<bool> used(fam.q(), false);
    while (current.size() < max_parents) {
      std::optional<std::size_t> pick;
      double pick_score = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < fam.q(); ++j) {
        if (used[j]) continue;
        auto trial = current;
        trial.push_back(fam.candidates[j]);
        const double s = family_log_marginal(data, fam.child, trial, prior);
        if (s > pick_score) {
          pick_score = s;
          pick = j;
        }
      }
      if (!pick || !(pick_score > best)) break;
      used[*pick] = true;
      current.push_back(fam.candidates[*pick]);
      best = pick_score;
    }
    parents[fam.child] = current;
    out.family_scores[fam.child] = best;
  }
  out.dag = DagModel(std::move(parents));
  return out;
}

const char* to_string(ArcDecision d) {
  switch (d) {
    case ArcDecision::include: return "include";
    case ArcDecision::exclude: return "exclude";
    case ArcDecision::tie: return "tie";
  }
  return "?";
}

const char* to_string(SelectionPath p) {
  switch (p) {
    case SelectionPath::linear_rule: return "linear-rule";
    case SelectionPath::exhaustive: return "exhaustive";
    case SelectionPath::map: return "map";
  }
  return "?";
}

}  // namespace dtsel
