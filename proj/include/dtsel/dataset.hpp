#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dtsel {

using VarIndex = std::size_t;
using StateIndex = std::uint16_t;

struct VariableSpec {
  std::string name;
  std::vector<std::string> labels;  // category k is labels[k]

  std::size_t cardinality() const { return labels.size(); }
};

// A complete categorical sample. Values are stored column-major: one column
// of category indices per variable. Immutable after construction.
class CategoricalDataset {
 public:
  CategoricalDataset() = default;

  // rows[r][v] is the category index of variable v in case r.
  // Throws Error(validation) if any invariant is violated.
  CategoricalDataset(std::vector<VariableSpec> variables,
                     const std::vector<std::vector<StateIndex>>& rows);

  std::size_t num_variables() const { return variables_.size(); }
  std::size_t num_cases() const { return num_cases_; }

  const std::vector<VariableSpec>& variables() const { return variables_; }
  const VariableSpec& variable(VarIndex v) const { return variables_.at(v); }
  std::size_t cardinality(VarIndex v) const { return variables_.at(v).cardinality(); }

  std::span<const StateIndex> column(VarIndex v) const { return columns_.at(v); }
  StateIndex value(std::size_t row, VarIndex v) const { return columns_[v][row]; }
  std::vector<StateIndex> row(std::size_t r) const;

  // Index of the variable with this name; throws Error(validation) if absent.
  VarIndex index_of(const std::string& name) const;

  // Same variables with the cases reordered: result row r is this row perm[r].
  CategoricalDataset permuted(std::span<const std::size_t> perm) const;

  friend bool operator==(const CategoricalDataset&, const CategoricalDataset&) = default;

 private:
  std::vector<VariableSpec> variables_;
  std::vector<std::vector<StateIndex>> columns_;
  std::size_t num_cases_ = 0;
};

struct CsvOptions {
  bool has_header = true;
};

// Labels are indexed in order of first appearance. Errors name the 1-based
// line number.
CategoricalDataset load_csv(std::istream& in, const CsvOptions& options = {});
CategoricalDataset load_csv_file(const std::string& path, const CsvOptions& options = {});

// Header line, then one line per case in stored order.
void write_csv(std::ostream& out, const CategoricalDataset& data);

// Sufficient statistics n(x_k | pi_j) for one family. Parent configuration j
// enumerates parent value tuples row-major over `parents` (the last parent
// varies fastest).
struct ContingencyCounts {
  VarIndex child = 0;
  std::vector<VarIndex> parents;
  std::size_t child_cardinality = 0;
  std::size_t num_configs = 1;
  std::vector<std::uint32_t> table;          // [j * child_cardinality + k]
  std::vector<std::uint32_t> config_totals;  // n(pi_j)

  std::uint32_t at(std::size_t config, std::size_t state) const {
    return table[config * child_cardinality + state];
  }
};

// Largest table (configs x child states) count() will allocate.
inline constexpr std::size_t kMaxCountCells = std::size_t{1} << 26;

ContingencyCounts count(const CategoricalDataset& data, VarIndex child,
                        std::span<const VarIndex> parents);

// Row-major configuration index of `row` over `parents`.
std::size_t parent_config(const CategoricalDataset& data, std::size_t row,
                          std::span<const VarIndex> parents);

}  // namespace dtsel
