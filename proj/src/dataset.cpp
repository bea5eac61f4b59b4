#include "dtsel/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "dtsel/error.hpp"

namespace dtsel {

namespace {

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  // getline drops a trailing empty field ("a,b,")
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

CategoricalDataset::CategoricalDataset(std::vector<VariableSpec> variables,
                                       const std::vector<std::vector<StateIndex>>& rows)
    : variables_(std::move(variables)), num_cases_(rows.size()) {
  std::unordered_set<std::string> names;
  for (const auto& var : variables_) {
    if (!names.insert(var.name).second)
      throw Error(ErrorKind::validation, "duplicate variable name '" + var.name + "'");
    if (var.cardinality() < 2)
      throw Error(ErrorKind::validation,
                  "variable '" + var.name + "' has fewer than 2 categories");
    if (var.cardinality() > std::numeric_limits<StateIndex>::max())
      throw Error(ErrorKind::validation, "variable '" + var.name + "' has too many categories");
    std::unordered_set<std::string> labels(var.labels.begin(), var.labels.end());
    if (labels.size() != var.labels.size())
      throw Error(ErrorKind::validation, "variable '" + var.name + "' has duplicate labels");
  }
  columns_.assign(variables_.size(), std::vector<StateIndex>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != variables_.size())
      throw Error(ErrorKind::validation,
                  "case " + std::to_string(r) + " does not have one value per variable");
    for (std::size_t v = 0; v < variables_.size(); ++v) {
      if (rows[r][v] >= variables_[v].cardinality())
        throw Error(ErrorKind::validation, "case " + std::to_string(r) +
                                               ": category index out of range for '" +
                                               variables_[v].name + "'");
      columns_[v][r] = rows[r][v];
    }
  }
}

std::vector<StateIndex> CategoricalDataset::row(std::size_t r) const {
  std::vector<StateIndex> out(variables_.size());
  for (std::size_t v = 0; v < variables_.size(); ++v) out[v] = columns_[v][r];
  return out;
}

VarIndex CategoricalDataset::index_of(const std::string& name) const {
  for (std::size_t v = 0; v < variables_.size(); ++v)
    if (variables_[v].name == name) return v;
  throw Error(ErrorKind::validation, "unknown variable '" + name + "'");
}

CategoricalDataset CategoricalDataset::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != num_cases_)
    throw Error(ErrorKind::validation, "permutation length does not match case count");
  CategoricalDataset out;
  out.variables_ = variables_;
  out.num_cases_ = num_cases_;
  out.columns_.assign(columns_.size(), std::vector<StateIndex>(num_cases_));
  for (std::size_t v = 0; v < columns_.size(); ++v)
    for (std::size_t r = 0; r < num_cases_; ++r) out.columns_[v][r] = columns_[v].at(perm[r]);
  return out;
}

CategoricalDataset load_csv(std::istream& in, const CsvOptions& options) {
  std::vector<VariableSpec> vars;
  std::vector<std::unordered_map<std::string, StateIndex>> lookup;
  std::vector<std::vector<StateIndex>> rows;
  std::vector<std::size_t> first_seen_line;

  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool have_width = false;

  auto init_width = [&](std::size_t w, const std::vector<std::string>* names) {
    width = w;
    have_width = true;
    vars.resize(w);
    lookup.resize(w);
    for (std::size_t i = 0; i < w; ++i)
      vars[i].name = names ? (*names)[i] : "X" + std::to_string(i + 1);
  };

  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) {
      // A blank line is tolerated only at the very end of the file.
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw Error(ErrorKind::incomplete,
                  "line " + std::to_string(line_no) + ": incomplete sample (empty record)");
    }
    auto fields = split_record(line);
    if (!have_width) {
      if (options.has_header) {
        for (const auto& f : fields)
          if (f.empty())
            throw Error(ErrorKind::parse,
                        "line " + std::to_string(line_no) + ": empty column name in header");
        init_width(fields.size(), &fields);
        continue;
      }
      init_width(fields.size(), nullptr);
    }
    if (fields.size() != width)
      throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(width) + " fields, found " +
                                        std::to_string(fields.size()));
    std::vector<StateIndex> row(width);
    for (std::size_t v = 0; v < width; ++v) {
      if (fields[v].empty())
        throw Error(ErrorKind::incomplete,
                    "line " + std::to_string(line_no) +
                        ": incomplete sample, empty value for '" + vars[v].name +
                        "' (complete data is required)");
      auto [it, inserted] =
          lookup[v].try_emplace(fields[v], static_cast<StateIndex>(vars[v].labels.size()));
      if (inserted) vars[v].labels.push_back(fields[v]);
      row[v] = it->second;
    }
    rows.push_back(std::move(row));
  }

  for (const auto& var : vars)
    if (var.cardinality() < 2)
      throw Error(ErrorKind::validation, "variable '" + var.name + "' has " +
                                             std::to_string(var.cardinality()) +
                                             " observed categories; at least 2 are required");
  return CategoricalDataset(std::move(vars), rows);
}

CategoricalDataset load_csv_file(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parse, "cannot open '" + path + "'");
  try {
    return load_csv(in, options);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

void write_csv(std::ostream& out, const CategoricalDataset& data) {
  const auto& vars = data.variables();
  for (std::size_t v = 0; v < vars.size(); ++v) out << (v ? "," : "") << vars[v].name;
  out << '\n';
  for (std::size_t r = 0; r < data.num_cases(); ++r) {
    for (std::size_t v = 0; v < vars.size(); ++v)
      out << (v ? "," : "") << vars[v].labels[data.value(r, v)];
    out << '\n';
  }
}

std::size_t parent_config(const CategoricalDataset& data, std::size_t row,
                          std::span<const VarIndex> parents) {
  std::size_t j = 0;
  for (VarIndex p : parents) j = j * data.cardinality(p) + data.value(row, p);
  return j;
}

ContingencyCounts count(const CategoricalDataset& data, VarIndex child,
                        std::span<const VarIndex> parents) {
  const std::size_t nvars = data.num_variables();
  if (child >= nvars) throw Error(ErrorKind::validation, "child index out of range");
  ContingencyCounts out;
  out.child = child;
  out.parents.assign(parents.begin(), parents.end());
  out.child_cardinality = data.cardinality(child);
  for (VarIndex p : parents) {
    if (p >= nvars) throw Error(ErrorKind::validation, "parent index out of range");
    if (p == child)
      throw Error(ErrorKind::validation,
                  "invalid family: '" + data.variable(child).name + "' is its own parent");
    if (std::count(parents.begin(), parents.end(), p) > 1)
      throw Error(ErrorKind::validation, "invalid family: repeated parent");
    const std::size_t c = data.cardinality(p);
    if (out.num_configs > kMaxCountCells / c / out.child_cardinality)
      throw Error(ErrorKind::capacity, "contingency table for '" + data.variable(child).name +
                                           "' exceeds the cell limit");
    out.num_configs *= c;
  }
  out.table.assign(out.num_configs * out.child_cardinality, 0);
  out.config_totals.assign(out.num_configs, 0);

  const auto child_col = data.column(child);
  for (std::size_t r = 0; r < data.num_cases(); ++r) {
    const std::size_t j = parent_config(data, r, parents);
    ++out.table[j * out.child_cardinality + child_col[r]];
    ++out.config_totals[j];
  }
  return out;
}

}  // namespace dtsel
