#include "dtsel/modelspace.hpp"

#include <algorithm>
#include <numeric>

#include "dtsel/error.hpp"

namespace dtsel {

VariableOrdering::VariableOrdering(std::vector<VarIndex> order) : order_(std::move(order)) {
  position_.assign(order_.size(), order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) {
    const VarIndex v = order_[i];
    if (v >= order_.size() || position_[v] != order_.size())
      throw Error(ErrorKind::validation, "ordering is not a permutation of the variables");
    position_[v] = i;
  }
}

VariableOrdering VariableOrdering::identity(std::size_t n) {
  std::vector<VarIndex> order(n);
  std::iota(order.begin(), order.end(), VarIndex{0});
  return VariableOrdering(std::move(order));
}

std::vector<VarIndex> VariableOrdering::predecessors(VarIndex v) const {
  const std::size_t pos = position(v);
  return {order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(pos)};
}

void validate_family(const CandidateParents& family, const VariableOrdering& ordering,
                     std::size_t cap) {
  if (family.child >= ordering.size())
    throw Error(ErrorKind::validation, "child index out of range");
  if (family.q() > cap)
    throw Error(ErrorKind::capacity, "child " + std::to_string(family.child) + " has " +
                                         std::to_string(family.q()) +
                                         " candidate parents; the cap is " + std::to_string(cap));
  for (std::size_t i = 0; i < family.candidates.size(); ++i) {
    const VarIndex c = family.candidates[i];
    if (c >= ordering.size()) throw Error(ErrorKind::validation, "candidate index out of range");
    if (c == family.child)
      throw Error(ErrorKind::validation, "a variable cannot be its own candidate parent");
    if (std::find(family.candidates.begin(), family.candidates.begin() + i, c) !=
        family.candidates.begin() + i)
      throw Error(ErrorKind::validation, "repeated candidate parent");
    if (!ordering.precedes(c, family.child))
      throw Error(ErrorKind::ordering, "candidate " + std::to_string(c) +
                                           " does not precede child " +
                                           std::to_string(family.child));
  }
}

LocalModel LocalModel::generator(CandidateParents family, std::size_t position) {
  if (position >= family.q())
    throw Error(ErrorKind::validation, "candidate position out of range");
  return {std::move(family), SubsetMask{1} << position};
}

std::vector<VarIndex> LocalModel::parents() const {
  return mask_to_parents(included, family.candidates);
}

LocalModel model_sum(const LocalModel& a, const LocalModel& b) {
  if (a.family.child != b.family.child)
    throw Error(ErrorKind::algebra, "model sum of local models for different children");
  if (a.family.candidates != b.family.candidates)
    throw Error(ErrorKind::algebra, "model sum over different candidate lists");
  return {a.family, a.included | b.included};
}

std::vector<SubsetMask> enumerate_lattice(std::size_t q, std::size_t cap) {
  if (q > cap || q > kMaxParentCap)
    throw Error(ErrorKind::capacity, "lattice over " + std::to_string(q) +
                                         " candidates exceeds the cap of " +
                                         std::to_string(std::min(cap, kMaxParentCap)));
  std::vector<SubsetMask> out(std::size_t{1} << q);
  std::iota(out.begin(), out.end(), SubsetMask{0});
  std::stable_sort(out.begin(), out.end(),
                   [](SubsetMask a, SubsetMask b) { return arc_count(a) < arc_count(b); });
  return out;
}

std::vector<std::size_t> lattice_positions(std::size_t q) {
  const auto lattice = enumerate_lattice(q, kMaxParentCap);
  std::vector<std::size_t> pos(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i) pos[lattice[i]] = i;
  return pos;
}

std::vector<VarIndex> mask_to_parents(SubsetMask mask, std::span<const VarIndex> candidates) {
  std::vector<VarIndex> out;
  for (std::size_t j = 0; j < candidates.size(); ++j)
    if (mask & (SubsetMask{1} << j)) out.push_back(candidates[j]);
  return out;
}

DagModel::DagModel(std::vector<std::vector<VarIndex>> parents) : parents_(std::move(parents)) {
  for (std::size_t v = 0; v < parents_.size(); ++v)
    for (std::size_t i = 0; i < parents_[v].size(); ++i) {
      const VarIndex p = parents_[v][i];
      if (p >= parents_.size() || p == v)
        throw Error(ErrorKind::validation, "invalid parent in DAG");
      if (std::find(parents_[v].begin(), parents_[v].begin() + i, p) != parents_[v].begin() + i)
        throw Error(ErrorKind::validation, "repeated arc in DAG");
    }
}

std::size_t DagModel::num_arcs() const {
  std::size_t n = 0;
  for (const auto& p : parents_) n += p.size();
  return n;
}

bool DagModel::has_arc(VarIndex parent, VarIndex child) const {
  const auto& p = parents_.at(child);
  return std::find(p.begin(), p.end(), parent) != p.end();
}

std::vector<VarIndex> DagModel::topological_order() const {
  const std::size_t n = parents_.size();
  std::vector<std::size_t> pending(n);
  std::vector<std::vector<VarIndex>> children(n);
  for (VarIndex v = 0; v < n; ++v) {
    pending[v] = parents_[v].size();
    for (VarIndex p : parents_[v]) children[p].push_back(v);
  }
  std::vector<VarIndex> out;
  for (VarIndex v = 0; v < n; ++v)
    if (pending[v] == 0) out.push_back(v);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (VarIndex c : children[out[i]])
      if (--pending[c] == 0) out.push_back(c);
  if (out.size() != n) out.clear();
  return out;
}

bool DagModel::consistent_with(const VariableOrdering& ordering) const {
  if (ordering.size() != parents_.size()) return false;
  for (VarIndex v = 0; v < parents_.size(); ++v)
    for (VarIndex p : parents_[v])
      if (!ordering.precedes(p, v)) return false;
  return true;
}

bool DagModel::is_subgraph_of(const DagModel& other) const {
  if (other.num_variables() != num_variables()) return false;
  for (VarIndex v = 0; v < parents_.size(); ++v)
    for (VarIndex p : parents_[v])
      if (!other.has_arc(p, v)) return false;
  return true;
}

DagModel global_sum(std::span<const LocalModel> locals, const VariableOrdering& ordering) {
  const std::size_t n = ordering.size();
  if (locals.size() != n)
    throw Error(ErrorKind::validation, "global sum needs exactly one local model per variable");
  std::vector<std::vector<VarIndex>> parents(n);
  std::vector<bool> seen(n, false);
  for (const auto& local : locals) {
    const VarIndex child = local.family.child;
    if (child >= n || seen[child])
      throw Error(ErrorKind::validation, "global sum needs exactly one local model per variable");
    seen[child] = true;
    for (VarIndex p : local.parents()) {
      if (p >= n || !ordering.precedes(p, child))
        throw Error(ErrorKind::ordering, "local model of variable " + std::to_string(child) +
                                             " cites a parent that does not precede it");
    }
    parents[child] = local.parents();
  }
  return DagModel(std::move(parents));
}

std::vector<LocalModel> decompose(const DagModel& dag, std::span<const CandidateParents> families) {
  if (families.size() != dag.num_variables())
    throw Error(ErrorKind::validation, "one candidate family per variable is required");
  std::vector<LocalModel> out;
  out.reserve(families.size());
  for (VarIndex v = 0; v < families.size(); ++v) {
    const auto& fam = families[v];
    if (fam.child != v) throw Error(ErrorKind::validation, "families must be indexed by child");
    SubsetMask mask = 0;
    for (VarIndex p : dag.parents(v)) {
      auto it = std::find(fam.candidates.begin(), fam.candidates.end(), p);
      if (it == fam.candidates.end())
        throw Error(ErrorKind::validation, "DAG parent is not a candidate of its child");
      mask |= SubsetMask{1} << (it - fam.candidates.begin());
    }
    out.push_back({fam, mask});
  }
  return out;
}

std::vector<CandidateParents> default_families(const VariableOrdering& ordering) {
  std::vector<CandidateParents> out(ordering.size());
  for (VarIndex v = 0; v < ordering.size(); ++v) out[v] = {v, ordering.predecessors(v)};
  return out;
}

}  // namespace dtsel
