#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dtsel/dataset.hpp"
#include "dtsel/modelspace.hpp"

namespace dtsel {

// 0-L loss for one candidate arc: l0j charges adding the arc when the truth
// lacks it, lj0 charges omitting it when the truth has it.
struct PairwiseLoss {
  double add_penalty = 1.0;   // l0j
  double omit_penalty = 1.0;  // lj0

  friend bool operator==(const PairwiseLoss&, const PairwiseLoss&) = default;
};

void validate(const PairwiseLoss& pl);

using ArcId = std::uint32_t;

// Square state x action loss matrix with zero diagonal. Action i chooses
// state i. A lattice table additionally knows its arc set: state s is the
// subset enumerate_lattice(arcs.size())[s] of `arcs` (bit b <-> arcs[b]).
class LossTable {
 public:
  LossTable() : LossTable(std::vector<ArcId>{}, {0.0}) {}

  // General table over `size` states; entries row-major [state][action].
  LossTable(std::size_t size, std::vector<double> entries);
  // Lattice table over the given arcs (strictly increasing ids).
  LossTable(std::vector<ArcId> arcs, std::vector<double> entries);

  std::size_t size() const { return size_; }
  double at(std::size_t state, std::size_t action) const { return entries_[state * size_ + action]; }
  const std::vector<double>& entries() const { return entries_; }

  bool on_lattice() const { return lattice_; }
  const std::vector<ArcId>& arcs() const { return arcs_; }
  const std::vector<SubsetMask>& states() const { return states_; }

  // Number of arcs of state i on a lattice table, 0 for general tables.
  int complexity(std::size_t i) const { return lattice_ ? arc_count(states_[i]) : 0; }

  // Same entries with every value multiplied by factor > 0.
  LossTable scaled(double factor) const;

  friend bool operator==(const LossTable&, const LossTable&) = default;

 private:
  void validate_entries() const;

  std::size_t size_ = 0;
  std::vector<double> entries_;
  bool lattice_ = false;
  std::vector<ArcId> arcs_;
  std::vector<SubsetMask> states_;
};

// Ones off the diagonal.
LossTable zero_one(std::size_t g);

// 2x2 lattice table {absent, present} x {exclude, include} for one arc.
LossTable pairwise_table(ArcId arc, const PairwiseLoss& pl);

// The sum of two lattice tables over disjoint arc sets. State/action
// (S_a u S_b, T_a u T_b) costs a[S_a,T_a] + b[S_b,T_b]. The result is laid
// out over the sorted union of arcs in canonical lattice order.
LossTable loss_sum(const LossTable& a, const LossTable& b);

// Closed-form expansion of per-arc losses over one child's lattice (arc ids
// are candidate positions 0..q-1):
//   entry(S,T) = sum_{j in T\S} l0j + sum_{j in S\T} lj0.
LossTable expand_local(std::span<const PairwiseLoss> arcs, std::size_t cap = kDefaultParentCap);

// Loss growing with the number of states of wrongly added parents:
//   S == T           -> 0
//   T subset of S    -> h * |S \ T|                (only omissions)
//   otherwise        -> k * sum_{j in S^T} c_j     (some arc added)
// For q = 2 with c = (c3, c2) this is the 4x4 "state count" table over
// {M0, M3, M2, M23}.
LossTable example2_state_count_loss(std::span<const std::size_t> cardinalities, double h,
                                    double k);

// Uniform penalty for over-complexity: entry(S,T) = 0 if S == T, 1 if S is
// empty, h * |S| otherwise. Not disintegrable.
LossTable uniform_complexity_loss(std::size_t q, double h);

// Attempt to recover per-arc losses from a lattice table: generators come
// from row {} and column {}; every entry is then checked against the closed
// form. On failure the first violated entry is reported.
struct DisintegrableFit {
  bool disintegrable = false;
  std::vector<PairwiseLoss> generators;
  std::size_t state = 0;
  std::size_t action = 0;
  double expected = 0.0;  // closed form implied by the generators
  double actual = 0.0;
};

DisintegrableFit fit_disintegrable(const LossTable& table);

// Learner-level loss description, resolved per child by the search module.
struct LossSpec {
  enum class Kind { zero_one, disintegrable, state_count, table };

  Kind kind = Kind::zero_one;
  PairwiseLoss default_pair;
  std::map<std::pair<VarIndex, VarIndex>, PairwiseLoss> arc_overrides;  // (child, parent)
  double h = 1.0;
  double k = 1.0;
  // Kind::table: explicit lattice tables per child; other children use 0-1.
  std::map<VarIndex, LossTable> tables;

  static LossSpec zero_one() { return {}; }
  static LossSpec disintegrable(PairwiseLoss default_pair);

  PairwiseLoss pair_for(VarIndex child, VarIndex parent) const;
};

}  // namespace dtsel
