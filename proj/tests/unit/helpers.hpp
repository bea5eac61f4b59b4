#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <optional>

#include "dtsel/dataset.hpp"
#include "dtsel/error.hpp"

namespace testing {

// Rows of labels, first row is the header.
inline dtsel::CategoricalDataset csv(const std::string& text) {
  std::istringstream in(text);
  return dtsel::load_csv(in);
}

// Variables with the given cardinalities and labels "0".."c-1".
inline dtsel::CategoricalDataset from_rows(const std::vector<std::size_t>& cards,
                                           const std::vector<std::vector<dtsel::StateIndex>>& rows) {
  std::vector<dtsel::VariableSpec> vars;
  for (std::size_t v = 0; v < cards.size(); ++v) {
    dtsel::VariableSpec s;
    s.name = "V" + std::to_string(v);
    for (std::size_t k = 0; k < cards[v]; ++k) s.labels.push_back(std::to_string(k));
    vars.push_back(s);
  }
  return dtsel::CategoricalDataset(vars, rows);
}

inline bool rel_close(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

// Kind of the dtsel::Error thrown by f, or nullopt if nothing was thrown.
template <class F>
std::optional<dtsel::ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const dtsel::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace testing
