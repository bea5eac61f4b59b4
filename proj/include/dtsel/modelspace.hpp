#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dtsel/dataset.hpp"

namespace dtsel {

// Bit j set <=> candidate position j (0-based) is a parent.
using SubsetMask = std::uint32_t;

inline constexpr std::size_t kDefaultParentCap = 12;
// Hard ceiling for any cap: masks are 32-bit and lattices are materialized.
inline constexpr std::size_t kMaxParentCap = 24;

inline int arc_count(SubsetMask s) { return __builtin_popcount(s); }

// order[0] comes first; earlier variables may be parents of later ones.
class VariableOrdering {
 public:
  VariableOrdering() = default;
  explicit VariableOrdering(std::vector<VarIndex> order);

  static VariableOrdering identity(std::size_t n);

  std::size_t size() const { return order_.size(); }
  const std::vector<VarIndex>& order() const { return order_; }
  std::size_t position(VarIndex v) const { return position_.at(v); }
  bool precedes(VarIndex a, VarIndex b) const { return position(a) < position(b); }

  // All variables before v, in ordering order.
  std::vector<VarIndex> predecessors(VarIndex v) const;

 private:
  std::vector<VarIndex> order_;
  std::vector<std::size_t> position_;
};

struct CandidateParents {
  VarIndex child = 0;
  std::vector<VarIndex> candidates;

  std::size_t q() const { return candidates.size(); }
  friend bool operator==(const CandidateParents&, const CandidateParents&) = default;
};

// Checks the child is not a candidate, candidates are distinct and precede the
// child, and q <= cap.
void validate_family(const CandidateParents& family, const VariableOrdering& ordering,
                     std::size_t cap);

// A point in the parent-set lattice of one child.
struct LocalModel {
  CandidateParents family;
  SubsetMask included = 0;

  static LocalModel null_model(CandidateParents family) { return {std::move(family), 0}; }
  static LocalModel generator(CandidateParents family, std::size_t position);

  std::vector<VarIndex> parents() const;
  int level() const { return arc_count(included); }
  friend bool operator==(const LocalModel&, const LocalModel&) = default;
};

// Union of arcs; throws Error(algebra) for different child or candidate list.
LocalModel model_sum(const LocalModel& a, const LocalModel& b);

// All 2^q subsets ordered by level, then by mask value.
std::vector<SubsetMask> enumerate_lattice(std::size_t q, std::size_t cap = kDefaultParentCap);

// Position of each mask in enumerate_lattice order (inverse permutation).
std::vector<std::size_t> lattice_positions(std::size_t q);

std::vector<VarIndex> mask_to_parents(SubsetMask mask, std::span<const VarIndex> candidates);

class DagModel {
 public:
  DagModel() = default;
  explicit DagModel(std::size_t num_vars) : parents_(num_vars) {}
  explicit DagModel(std::vector<std::vector<VarIndex>> parents);

  std::size_t num_variables() const { return parents_.size(); }
  const std::vector<VarIndex>& parents(VarIndex v) const { return parents_.at(v); }
  const std::vector<std::vector<VarIndex>>& parent_lists() const { return parents_; }
  std::size_t num_arcs() const;
  bool has_arc(VarIndex parent, VarIndex child) const;

  // Kahn's algorithm; empty result when the graph has a cycle.
  std::vector<VarIndex> topological_order() const;
  bool is_acyclic() const { return topological_order().size() == parents_.size(); }
  bool consistent_with(const VariableOrdering& ordering) const;
  // Every arc of this DAG is an arc of `other`.
  bool is_subgraph_of(const DagModel& other) const;

  friend bool operator==(const DagModel&, const DagModel&) = default;

 private:
  std::vector<std::vector<VarIndex>> parents_;
};

// locals[k] is the local model of some child; exactly one per variable.
// Parent lists follow the candidate order of each local model.
DagModel global_sum(std::span<const LocalModel> locals, const VariableOrdering& ordering);

// Inverse of global_sum given each child's candidate list (indexed by child).
std::vector<LocalModel> decompose(const DagModel& dag,
                                  std::span<const CandidateParents> families);

// Default families: every predecessor is a candidate.
std::vector<CandidateParents> default_families(const VariableOrdering& ordering);

}  // namespace dtsel
