// Serial vs OpenMP timing for lattice scoring and full structure learning.
// Usage: dtsel_bench [rows] [candidates] [repeats]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <vector>

#include "dtsel/instances.hpp"
#include "dtsel/scoring.hpp"
#include "dtsel/search.hpp"

using namespace dtsel;

namespace {

template <class F>
double best_seconds(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                              .count());
  }
  return best;
}

void report(const char* name, double serial, double parallel, bool same) {
  std::printf("%-14s serial %9.4fs  parallel %9.4fs  speedup %5.2fx  %s\n", name, serial,
              parallel, serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t rows = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 20000;
  const std::size_t q = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 10;
  const int repeats = argc > 3 ? std::atoi(argv[3]) : 3;
  std::printf("rows=%zu candidates=%zu threads=%d\n", rows, q, omp_get_max_threads());

  instances::Rng rng(2026);
  const auto data = instances::random_dataset(rng, q + 1, 3, rows);

  CandidateParents family{static_cast<VarIndex>(q), {}};
  family.candidates.resize(q);
  std::iota(family.candidates.begin(), family.candidates.end(), VarIndex{0});
  const DirichletPrior prior;

  std::vector<double> s_serial, s_parallel;
  const double t1 = best_seconds(repeats, [&] {
    s_serial = score_lattice(data, family, prior, Execution::serial, q);
  });
  const double t2 = best_seconds(repeats, [&] {
    s_parallel = score_lattice(data, family, prior, Execution::parallel, q);
  });
  report("score_lattice", t1, t2, s_serial == s_parallel);

  std::vector<VarIndex> order(q + 1);
  std::iota(order.begin(), order.end(), VarIndex{0});
  LearnConfig config;
  config.ordering = VariableOrdering(order);
  config.cap = q;
  LearnResult l_serial, l_parallel;
  config.exec = Execution::serial;
  const double t3 = best_seconds(repeats, [&] { l_serial = learn(data, config); });
  config.exec = Execution::parallel;
  const double t4 = best_seconds(repeats, [&] { l_parallel = learn(data, config); });
  report("learn", t3, t4,
         l_serial.dag == l_parallel.dag &&
             l_serial.total_bayes_risk == l_parallel.total_bayes_risk);
  return 0;
}
