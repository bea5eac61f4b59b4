#include "dtsel/loss.hpp"

#include <algorithm>
#include <cmath>

#include "dtsel/error.hpp"

namespace dtsel {

void validate(const PairwiseLoss& pl) {
  if (!(pl.add_penalty > 0.0) || !(pl.omit_penalty > 0.0) || !std::isfinite(pl.add_penalty) ||
      !std::isfinite(pl.omit_penalty))
    throw Error(ErrorKind::validation, "pairwise losses must be strictly positive");
}

LossTable::LossTable(std::size_t size, std::vector<double> entries)
    : size_(size), entries_(std::move(entries)) {
  validate_entries();
}

LossTable::LossTable(std::vector<ArcId> arcs, std::vector<double> entries)
    : entries_(std::move(entries)), lattice_(true), arcs_(std::move(arcs)) {
  for (std::size_t i = 1; i < arcs_.size(); ++i)
    if (arcs_[i] <= arcs_[i - 1])
      throw Error(ErrorKind::algebra, "lattice loss arcs must be strictly increasing");
  states_ = enumerate_lattice(arcs_.size(), kMaxParentCap);
  size_ = states_.size();
  validate_entries();
}

void LossTable::validate_entries() const {
  if (size_ == 0) throw Error(ErrorKind::dimension, "loss table must have at least one state");
  if (entries_.size() != size_ * size_)
    throw Error(ErrorKind::dimension, "loss table must be square");
  for (std::size_t i = 0; i < size_; ++i)
    for (std::size_t j = 0; j < size_; ++j) {
      const double v = at(i, j);
      if (i == j && v != 0.0)
        throw Error(ErrorKind::validation, "loss table diagonal must be zero");
      if (!(v >= 0.0) || !std::isfinite(v))
        throw Error(ErrorKind::validation, "loss table entries must be finite and nonnegative");
    }
}

LossTable LossTable::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorKind::validation, "loss scale must be positive");
  LossTable out = *this;
  for (double& v : out.entries_) v *= factor;
  return out;
}

LossTable zero_one(std::size_t g) {
  if (g == 0) throw Error(ErrorKind::dimension, "zero-one loss needs at least one model");
  std::vector<double> e(g * g, 1.0);
  for (std::size_t i = 0; i < g; ++i) e[i * g + i] = 0.0;
  return LossTable(g, std::move(e));
}

LossTable pairwise_table(ArcId arc, const PairwiseLoss& pl) {
  validate(pl);
  return LossTable(std::vector<ArcId>{arc}, {0.0, pl.add_penalty, pl.omit_penalty, 0.0});
}

LossTable loss_sum(const LossTable& a, const LossTable& b) {
  if (!a.on_lattice() || !b.on_lattice())
    throw Error(ErrorKind::algebra, "loss sum is defined on lattice tables only");
  std::vector<ArcId> arcs;
  std::set_union(a.arcs().begin(), a.arcs().end(), b.arcs().begin(), b.arcs().end(),
                 std::back_inserter(arcs));
  if (arcs.size() != a.arcs().size() + b.arcs().size())
    throw Error(ErrorKind::algebra, "loss sum operands share an arc");
  if (arcs.size() > kMaxParentCap)
    throw Error(ErrorKind::capacity, "loss sum exceeds the lattice capacity");

  // Bit position in the union for each operand bit.
  auto bit_map = [&](const LossTable& t) {
    std::vector<unsigned> out;
    for (ArcId id : t.arcs())
      out.push_back(static_cast<unsigned>(std::lower_bound(arcs.begin(), arcs.end(), id) -
                                          arcs.begin()));
    return out;
  };
  const auto bits_a = bit_map(a);
  const auto bits_b = bit_map(b);
  auto project = [](SubsetMask u, const std::vector<unsigned>& bits) {
    SubsetMask m = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (u & (SubsetMask{1} << bits[i])) m |= SubsetMask{1} << i;
    return m;
  };

  const auto pos_a = lattice_positions(a.arcs().size());
  const auto pos_b = lattice_positions(b.arcs().size());
  const auto states = enumerate_lattice(arcs.size(), kMaxParentCap);
  const std::size_t n = states.size();
  std::vector<std::size_t> ia(n), ib(n);
  for (std::size_t s = 0; s < n; ++s) {
    ia[s] = pos_a[project(states[s], bits_a)];
    ib[s] = pos_b[project(states[s], bits_b)];
  }
  std::vector<double> e(n * n);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t) e[s * n + t] = a.at(ia[s], ia[t]) + b.at(ib[s], ib[t]);
  return LossTable(std::move(arcs), std::move(e));
}

LossTable expand_local(std::span<const PairwiseLoss> arcs, std::size_t cap) {
  for (const auto& pl : arcs) validate(pl);
  const auto states = enumerate_lattice(arcs.size(), cap);
  const std::size_t n = states.size();
  std::vector<double> e(n * n);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t) {
      const SubsetMask added = states[t] & ~states[s];
      const SubsetMask omitted = states[s] & ~states[t];
      double v = 0.0;
      for (std::size_t j = 0; j < arcs.size(); ++j) {
        const SubsetMask bit = SubsetMask{1} << j;
        if (added & bit) v += arcs[j].add_penalty;
        if (omitted & bit) v += arcs[j].omit_penalty;
      }
      e[s * n + t] = v;
    }
  std::vector<ArcId> ids(arcs.size());
  for (std::size_t j = 0; j < ids.size(); ++j) ids[j] = static_cast<ArcId>(j);
  return LossTable(std::move(ids), std::move(e));
}

LossTable example2_state_count_loss(std::span<const std::size_t> cardinalities, double h,
                                    double k) {
  if (!(h > 0.0) || !(k > 0.0))
    throw Error(ErrorKind::validation, "h and k must be positive");
  const auto states = enumerate_lattice(cardinalities.size(), kMaxParentCap);
  const std::size_t n = states.size();
  std::vector<double> e(n * n);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t) {
      const SubsetMask truth = states[s];
      const SubsetMask act = states[t];
      double v = 0.0;
      if (truth == act) {
        v = 0.0;
      } else if ((act & ~truth) == 0) {
        v = h * arc_count(truth & ~act);
      } else {
        const SubsetMask diff = truth ^ act;
        double states_sum = 0.0;
        for (std::size_t j = 0; j < cardinalities.size(); ++j)
          if (diff & (SubsetMask{1} << j)) states_sum += static_cast<double>(cardinalities[j]);
        v = k * states_sum;
      }
      e[s * n + t] = v;
    }
  std::vector<ArcId> ids(cardinalities.size());
  for (std::size_t j = 0; j < ids.size(); ++j) ids[j] = static_cast<ArcId>(j);
  return LossTable(std::move(ids), std::move(e));
}

LossTable uniform_complexity_loss(std::size_t q, double h) {
  if (q == 0) throw Error(ErrorKind::validation, "uniform complexity loss needs q >= 1");
  if (!(h > 0.0)) throw Error(ErrorKind::validation, "h must be positive");
  const auto states = enumerate_lattice(q, kMaxParentCap);
  const std::size_t n = states.size();
  std::vector<double> e(n * n);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t) {
      if (s == t) continue;
      e[s * n + t] = states[s] == 0 ? 1.0 : h * arc_count(states[s]);
    }
  std::vector<ArcId> ids(q);
  for (std::size_t j = 0; j < q; ++j) ids[j] = static_cast<ArcId>(j);
  return LossTable(std::move(ids), std::move(e));
}

DisintegrableFit fit_disintegrable(const LossTable& table) {
  if (!table.on_lattice())
    throw Error(ErrorKind::algebra, "only lattice tables can be tested for disintegrability");
  const std::size_t q = table.arcs().size();
  const auto pos = lattice_positions(q);
  DisintegrableFit fit;
  fit.generators.resize(q);
  for (std::size_t j = 0; j < q; ++j) {
    const std::size_t single = pos[SubsetMask{1} << j];
    fit.generators[j] = {table.at(0, single), table.at(single, 0)};
  }
  const auto& states = table.states();
  for (std::size_t s = 0; s < table.size(); ++s)
    for (std::size_t t = 0; t < table.size(); ++t) {
      double v = 0.0;
      for (std::size_t j = 0; j < q; ++j) {
        const SubsetMask bit = SubsetMask{1} << j;
        if ((states[t] & bit) && !(states[s] & bit)) v += fit.generators[j].add_penalty;
        if ((states[s] & bit) && !(states[t] & bit)) v += fit.generators[j].omit_penalty;
      }
      const double actual = table.at(s, t);
      if (std::fabs(v - actual) > 1e-12 * std::max({1.0, std::fabs(v), std::fabs(actual)})) {
        fit.state = s;
        fit.action = t;
        fit.expected = v;
        fit.actual = actual;
        return fit;
      }
    }
  fit.disintegrable = true;
  return fit;
}

LossSpec LossSpec::disintegrable(PairwiseLoss default_pair) {
  validate(default_pair);
  LossSpec spec;
  spec.kind = Kind::disintegrable;
  spec.default_pair = default_pair;
  return spec;
}

PairwiseLoss LossSpec::pair_for(VarIndex child, VarIndex parent) const {
  auto it = arc_overrides.find({child, parent});
  return it == arc_overrides.end() ? default_pair : it->second;
}

}  // namespace dtsel
