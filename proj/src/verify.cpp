#include "dtsel/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dtsel/formats.hpp"
#include "dtsel/instances.hpp"
#include "dtsel/oracle.hpp"
#include "dtsel/search.hpp"

namespace dtsel {

bool VerifyReport::passed() const {
  return std::all_of(suites.begin(), suites.end(),
                     [](const SuiteResult& s) { return s.failures == 0; });
}

namespace {

bool close_relative(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

void record_failure(SuiteResult& suite, const VerifyOptions& opt, std::size_t trial,
                    const std::string& detail) {
  if (suite.failures++ == 0) {
    Json m;
    m["command"] = "verify";
    m["suite"] = suite.name;
    m["seed"] = opt.seed;
    m["trial"] = trial;
    m["detail"] = detail;
    suite.first_failure = m.dump();
  }
}

// Each trial draws from its own generator so a failure is reproducible from
// (seed, suite, trial) alone.
instances::Rng trial_rng(std::uint64_t seed, std::uint64_t suite, std::size_t trial) {
  std::seed_seq seq{seed, suite, static_cast<std::uint64_t>(trial)};
  return instances::Rng(seq);
}

SuiteResult polya_suite(const VerifyOptions& opt) {
  SuiteResult suite{"polya-urn", opt.trials, 0, {}};
  for (std::size_t t = 0; t < opt.trials; ++t) {
    auto rng = trial_rng(opt.seed, 1, t);
    const std::size_t vars = instances::uniform_index(rng, 1, 4);
    const std::size_t n = instances::uniform_index(rng, 0, opt.max_cases);
    const auto data = instances::random_dataset(rng, vars, 3, n);
    std::vector<VarIndex> order(vars);
    std::iota(order.begin(), order.end(), VarIndex{0});
    std::shuffle(order.begin(), order.end(), rng);
    const auto dag = instances::random_dag(rng, VariableOrdering(order), 0.6, 3);
    const auto prior = instances::random_prior(rng);

    const double closed = global_log_marginal(data, dag, prior);
    double urn = oracle::polya_urn_marginal(data, dag, prior);
    if (opt.fault == Fault::polya) urn += 1e-6;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const double urn_perm = oracle::polya_urn_marginal(data.permuted(perm), dag, prior);
    if (!close_relative(closed, urn, 1e-9) || !close_relative(urn, urn_perm, 1e-9))
      record_failure(suite, opt, t,
                     "closed=" + std::to_string(closed) + " urn=" + std::to_string(urn) +
                         " urn_permuted=" + std::to_string(urn_perm));
  }
  return suite;
}

SuiteResult linear_rule_suite(const VerifyOptions& opt) {
  SuiteResult suite{"linear-rule", opt.trials, 0, {}};
  for (std::size_t t = 0; t < opt.trials; ++t) {
    auto rng = trial_rng(opt.seed, 2, t);
    const std::size_t q = instances::uniform_index(rng, 1, std::max<std::size_t>(1, opt.max_q));
    std::vector<VarIndex> cands(q);
    std::iota(cands.begin(), cands.end(), VarIndex{1});
    const auto lp = make_local_posterior({0, cands}, instances::random_lattice_probs(rng, q));
    const auto arcs = instances::random_pairwise(rng, q);

    auto linear = select_by_arc_rule(lp, arcs);
    if (opt.fault == Fault::linear_rule) linear.model.included ^= 1u;
    const auto exhaustive = oracle::exhaustive_select(lp, expand_local(arcs, q));
    if (linear.model.included != exhaustive.model.included ||
        !close_relative(linear.bayes_risk, exhaustive.report.bayes_risk, 1e-10))
      record_failure(suite, opt, t,
                     "q=" + std::to_string(q) + " linear=" + std::to_string(linear.model.included) +
                         " exhaustive=" + std::to_string(exhaustive.model.included));
  }
  return suite;
}

SuiteResult fold_suite(const VerifyOptions& opt) {
  SuiteResult suite{"fold-vs-learn", opt.trials, 0, {}};
  for (std::size_t t = 0; t < opt.trials; ++t) {
    auto rng = trial_rng(opt.seed, 3, t);
    const std::size_t n = instances::uniform_index(rng, 0, 50);
    const auto data = instances::random_dataset(rng, 3, 3, n);
    std::vector<VarIndex> order{0, 1, 2};
    std::shuffle(order.begin(), order.end(), rng);

    LearnConfig config;
    config.ordering = VariableOrdering(order);
    config.prior = instances::random_prior(rng);
    config.loss = LossSpec::disintegrable(instances::random_pairwise(rng, 1)[0]);
    for (VarIndex child = 0; child < 3; ++child)
      for (VarIndex parent = 0; parent < 3; ++parent)
        if (child != parent)
          config.loss.arc_overrides[{child, parent}] = instances::random_pairwise(rng, 1)[0];
    config.exec = Execution::serial;

    const auto learned = learn(data, config);
    const auto folded = oracle::fold_sequential_tree(data, config);
    double risk = folded.global_bayes_risk;
    if (opt.fault == Fault::fold) risk += 1e-6;
    if (!(learned.dag == folded.chosen) || !folded.branch_invariant ||
        std::fabs(learned.total_bayes_risk - risk) > 1e-10)
      record_failure(suite, opt, t,
                     "learn_risk=" + std::to_string(learned.total_bayes_risk) +
                         " fold_risk=" + std::to_string(risk) +
                         " same_dag=" + std::to_string(learned.dag == folded.chosen));
  }
  return suite;
}

}  // namespace

VerifyReport run_verification(const VerifyOptions& options) {
  VerifyReport report;
  report.suites.push_back(polya_suite(options));
  report.suites.push_back(linear_rule_suite(options));
  report.suites.push_back(fold_suite(options));
  return report;
}

}  // namespace dtsel
