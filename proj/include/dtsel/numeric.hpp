#pragma once

#include <span>

namespace dtsel {

// Natural log of Gamma(x) for x > 0. Reentrant (safe inside OpenMP regions).
double log_gamma(double x);

// log(sum_i exp(v_i)), summed in the given order. Empty input gives -inf.
double log_sum_exp(std::span<const double> values);

// Two values are tied when they differ by at most this fraction of
// max(1, |a|, |b|).
inline constexpr double kTieTolerance = 1e-12;

bool nearly_tied(double a, double b);

}  // namespace dtsel
