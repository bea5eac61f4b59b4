#include <doctest.h>

#include <cmath>
#include <numeric>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "dtsel/error.hpp"
#include "dtsel/instances.hpp"
#include "dtsel/network.hpp"
#include "dtsel/oracle.hpp"
#include "dtsel/scoring.hpp"
#include "helpers.hpp"

using namespace dtsel;
using testing::csv;
using testing::error_kind;
using testing::from_rows;

namespace {

const std::vector<VarIndex> kNoParents;

DirichletPrior uniform(double alpha) { return {alpha, PriorScheme::uniform_precision, 1.0}; }

// Two binary variables, X1 child of X2 (index 1), strongly associated.
CategoricalDataset associated_pair(std::size_t n, std::uint64_t seed) {
  BayesNetwork net;
  net.variables = {{"X1", {"a", "b"}}, {"X2", {"u", "v"}}};
  net.dag = DagModel(std::vector<std::vector<VarIndex>>{{1}, {}});
  net.cpts = {{{{0.9, 0.1}, {0.1, 0.9}}}, {{{0.5, 0.5}}}};
  return sample_network(net, n, seed);
}

}  // namespace

TEST_CASE("family_log_marginal hand values") {
  SUBCASE("empty dataset scores 0") {
    const auto d = from_rows({2, 3}, {});
    const std::vector<VarIndex> p{1};
    CHECK(family_log_marginal(d, 0, p, uniform(1.0)) == 0.0);
    CHECK(family_log_marginal(d, 1, kNoParents, DirichletPrior::k2()) == 0.0);
  }
  SUBCASE("binary root, alpha 2, counts (1,1) gives ln(1/6)") {
    const auto d = from_rows({2}, {{0}, {1}});
    CHECK(family_log_marginal(d, 0, kNoParents, uniform(2.0)) ==
          doctest::Approx(std::log(1.0 / 6.0)).epsilon(1e-14));
  }
  SUBCASE("fixed cell, K2 closed form") {
    // K2: prod_j (c-1)! / (n_j + c - 1)! prod_k n_jk!
    const auto d = from_rows({3}, {{0}, {0}, {2}, {1}, {0}});
    const double expected = std::log(2.0) - std::log(5040.0) + std::log(6.0);  // 2!/7! * 3!1!1!
    CHECK(family_log_marginal(d, 0, kNoParents, DirichletPrior::k2()) ==
          doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("prior hyperparameters") {
  CHECK(uniform(1.0).cell_alpha(2, 3) == doctest::Approx(1.0 / 6.0));
  CHECK(DirichletPrior::k2().cell_alpha(5, 100) == 1.0);
  CHECK(error_kind([] { uniform(0.0).cell_alpha(2, 1); }) == ErrorKind::prior);
  CHECK(error_kind([] { uniform(-1.0).cell_alpha(2, 1); }) == ErrorKind::prior);
  const DirichletPrior bad{1.0, PriorScheme::fixed_cell, 0.0};
  CHECK(error_kind([&] { bad.cell_alpha(2, 1); }) == ErrorKind::prior);
}

TEST_CASE("global_log_marginal") {
  const auto d = csv("A,B\na1,b1\na1,b2\na2,b1\n");
  SUBCASE("empty graph is the sum of two marginal histogram scores") {
    // alpha = 2, two states: Gamma(2)/Gamma(5) * Gamma(1+2)Gamma(1+1)/Gamma(1)^2 for each.
    const double one = std::lgamma(2.0) - std::lgamma(5.0) + std::lgamma(3.0) + std::lgamma(2.0);
    const DagModel empty(2);
    CHECK(global_log_marginal(d, empty, uniform(2.0)) == doctest::Approx(2 * one).epsilon(1e-14));
  }
  SUBCASE("any DAG on an empty dataset is 0") {
    const auto e = from_rows({2, 2, 3}, {});
    const DagModel dag(std::vector<std::vector<VarIndex>>{{}, {0}, {0, 1}});
    CHECK(global_log_marginal(e, dag, uniform(1.0)) == 0.0);
  }
  SUBCASE("additivity over families") {
    instances::Rng rng(8);
    const auto r = instances::random_dataset(rng, 3, 3, 40);
    const DagModel chain(std::vector<std::vector<VarIndex>>{{}, {0}, {1}});
    const std::vector<VarIndex> p0{0}, p1{1};
    const auto prior = uniform(1.5);
    const double separate = family_log_marginal(r, 0, kNoParents, prior) +
                            family_log_marginal(r, 1, p0, prior) +
                            family_log_marginal(r, 2, p1, prior);
    CHECK(global_log_marginal(r, chain, prior) == separate);
  }
}

TEST_CASE("two-variable marginal likelihoods by the displayed Gamma products") {
  instances::Rng rng(21);
  for (int t = 0; t < 20; ++t) {
    const std::size_t c1 = instances::uniform_index(rng, 2, 4);
    const std::size_t c2 = instances::uniform_index(rng, 2, 4);
    const std::size_t n = instances::uniform_index(rng, 0, 60);
    std::vector<std::vector<StateIndex>> rows;
    for (std::size_t r = 0; r < n; ++r)
      rows.push_back({static_cast<StateIndex>(instances::uniform_index(rng, 0, c1 - 1)),
                      static_cast<StateIndex>(instances::uniform_index(rng, 0, c2 - 1))});
    const auto d = from_rows({c1, c2}, rows);
    const double a = instances::uniform(rng, 0.2, 5.0);

    std::vector<double> n1(c1, 0), n2(c2, 0), n12(c1 * c2, 0);
    for (const auto& r : rows) {
      ++n1[r[0]];
      ++n2[r[1]];
      ++n12[r[1] * c1 + r[0]];
    }
    double x2 = std::lgamma(a) - std::lgamma(a + n);
    for (std::size_t j = 0; j < c2; ++j) x2 += std::lgamma(a / c2 + n2[j]) - std::lgamma(a / c2);
    double x1 = std::lgamma(a) - std::lgamma(a + n);
    for (std::size_t k = 0; k < c1; ++k) x1 += std::lgamma(a / c1 + n1[k]) - std::lgamma(a / c1);
    double x1_given_x2 = 0.0;
    for (std::size_t j = 0; j < c2; ++j) {
      x1_given_x2 += std::lgamma(a / c2) - std::lgamma(a / c2 + n2[j]);
      for (std::size_t k = 0; k < c1; ++k)
        x1_given_x2 += std::lgamma(a / (c1 * c2) + n12[j * c1 + k]) - std::lgamma(a / (c1 * c2));
    }
    const DagModel m0(2);
    const DagModel m1(std::vector<std::vector<VarIndex>>{{1}, {}});
    CHECK(global_log_marginal(d, m0, uniform(a)) == doctest::Approx(x2 + x1).epsilon(1e-12));
    CHECK(global_log_marginal(d, m1, uniform(a)) ==
          doctest::Approx(x2 + x1_given_x2).epsilon(1e-12));
  }
}

TEST_CASE("local_posterior") {
  SUBCASE("n = 0 gives a uniform posterior") {
    const auto d = from_rows({2, 2, 3, 2}, {});
    const auto lp = local_posterior(d, {3, {0, 1, 2}}, uniform(1.0));
    REQUIRE(lp.size() == 8);
    for (double p : lp.probs) CHECK(p == doctest::Approx(0.125).epsilon(1e-15));
    for (std::size_t j = 0; j < 3; ++j) CHECK(arc_probability(lp, j) == doctest::Approx(0.5));
  }
  SUBCASE("q = 1 odds are the Bayes factor times the prior odds") {
    const auto d = associated_pair(300, 4);
    const DirichletPrior prior = uniform(1.0);
    const std::vector<double> model_prior{0.7, 0.3};
    const auto lp = local_posterior(d, {0, {1}}, prior, model_prior);
    const DagModel m0(2);
    const DagModel m1(std::vector<std::vector<VarIndex>>{{1}, {}});
    const double log_r = log_bayes_factor(d, m1, m0, prior);
    CHECK(std::log(lp.probs[1] / lp.probs[0]) ==
          doctest::Approx(log_r + std::log(0.3 / 0.7)).epsilon(1e-10));
  }
  SUBCASE("scaling the model prior changes nothing") {
    instances::Rng rng(2);
    const auto d = instances::random_dataset(rng, 4, 3, 25);
    std::vector<double> w(8);
    for (auto& x : w) x = instances::uniform(rng, 0.1, 2.0);
    auto w_scaled = w;
    for (auto& x : w_scaled) x *= 37.5;
    const CandidateParents fam{3, {0, 1, 2}};
    const auto a = local_posterior(d, fam, uniform(1.0), w);
    const auto b = local_posterior(d, fam, uniform(1.0), w_scaled);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::fabs(a.probs[i] - b.probs[i]) <= 1e-12);
  }
  SUBCASE("errors") {
    const auto d = from_rows({2, 2}, {{0, 1}});
    const std::vector<double> wrong{1.0};
    const std::vector<double> negative{1.0, -1.0};
    CHECK(error_kind([&] { local_posterior(d, {0, {1}}, uniform(1.0), wrong); }) ==
          ErrorKind::dimension);
    CHECK(error_kind([&] { local_posterior(d, {0, {1}}, uniform(1.0), negative); }) ==
          ErrorKind::validation);
  }
}

TEST_CASE("local_posterior matches a 50-digit normalizer") {
  using Big = boost::multiprecision::cpp_dec_float_50;
  instances::Rng rng(99);
  for (int t = 0; t < 40; ++t) {
    const std::size_t q = instances::uniform_index(rng, 0, 6);
    const std::size_t n = instances::uniform_index(rng, 0, 80);
    const auto d = instances::random_dataset(rng, q + 1, 3, n);
    std::vector<VarIndex> cands(q);
    std::iota(cands.begin(), cands.end(), VarIndex{1});
    const auto lp = local_posterior(d, {0, cands}, instances::random_prior(rng));

    Big total = 0;
    std::vector<Big> w(lp.size());
    for (std::size_t i = 0; i < lp.size(); ++i) {
      w[i] = boost::multiprecision::exp(Big(lp.log_scores[i]));
      total += w[i];
    }
    for (std::size_t i = 0; i < lp.size(); ++i)
      CHECK(std::fabs(static_cast<double>(w[i] / total) - lp.probs[i]) <= 1e-10);
  }
}

TEST_CASE("arc_probability") {
  SUBCASE("two-candidate lattice: P3 = p3 + p23") {
    const auto lp = make_local_posterior({0, {2, 1}}, {0.4, 0.1, 0.2, 0.3});
    CHECK(arc_probability(lp, 0) == doctest::Approx(0.1 + 0.3));
    CHECK(arc_probability(lp, 1) == doctest::Approx(0.2 + 0.3));
  }
  SUBCASE("random posteriors against a subset scan") {
    instances::Rng rng(6);
    for (int t = 0; t < 50; ++t) {
      const std::size_t q = instances::uniform_index(rng, 1, 7);
      std::vector<VarIndex> cands(q);
      std::iota(cands.begin(), cands.end(), VarIndex{1});
      const auto probs = instances::random_lattice_probs(rng, q);
      const auto lp = make_local_posterior({0, cands}, probs);
      const auto lattice = enumerate_lattice(q);
      for (std::size_t j = 0; j < q; ++j) {
        double p = 0.0;
        for (std::size_t i = 0; i < lattice.size(); ++i)
          for (VarIndex v : mask_to_parents(lattice[i], cands))
            if (v == cands[j]) p += probs[i];
        CHECK(arc_probability(lp, j) == doctest::Approx(p).epsilon(1e-14));
      }
    }
  }
  SUBCASE("out of range") {
    const auto lp = make_local_posterior({0, {1}}, {0.5, 0.5});
    CHECK(error_kind([&] { arc_probability(lp, 1); }) == ErrorKind::validation);
  }
}

TEST_CASE("Bayes factors") {
  const auto d = associated_pair(500, 12);
  const auto prior = uniform(1.0);
  const DagModel indep(2);
  const DagModel dep(std::vector<std::vector<VarIndex>>{{1}, {}});
  CHECK(bayes_factor(d, dep, dep, prior) == 1.0);
  CHECK(bayes_factor(d, indep, dep, prior) < 1.0);
  const double r = log_bayes_factor(d, indep, dep, prior);
  CHECK(testing::rel_close(log_bayes_factor(d, dep, indep, prior), -r, 1e-12));

  // Closed-form ratio from the displayed products: only the X1 factor differs.
  std::vector<double> n1(2, 0), n2(2, 0), n12(4, 0);
  for (std::size_t t = 0; t < d.num_cases(); ++t) {
    ++n1[d.value(t, 0)];
    ++n2[d.value(t, 1)];
    ++n12[d.value(t, 1) * 2 + d.value(t, 0)];
  }
  double num = std::lgamma(1.0) - std::lgamma(501.0);
  for (int k = 0; k < 2; ++k) num += std::lgamma(0.5 + n1[k]) - std::lgamma(0.5);
  double den = 0.0;
  for (int j = 0; j < 2; ++j) {
    den += std::lgamma(0.5) - std::lgamma(0.5 + n2[j]);
    for (int k = 0; k < 2; ++k) den += std::lgamma(0.25 + n12[j * 2 + k]) - std::lgamma(0.25);
  }
  CHECK(r == doctest::Approx(num - den).epsilon(1e-12));
}

TEST_CASE("closed form equals the urn oracle on random families") {
  instances::Rng rng(44);
  for (int t = 0; t < 100; ++t) {
    const std::size_t vars = instances::uniform_index(rng, 1, 4);
    const auto d = instances::random_dataset(rng, vars, 4, instances::uniform_index(rng, 0, 30));
    const auto dag = instances::random_dag(rng, VariableOrdering::identity(vars), 0.5, 3);
    const auto prior = instances::random_prior(rng);
    CHECK(testing::rel_close(global_log_marginal(d, dag, prior),
                             oracle::polya_urn_marginal(d, dag, prior), 1e-9));
  }
}
