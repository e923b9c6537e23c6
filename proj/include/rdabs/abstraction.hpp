#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rdabs/dynamics.hpp"
#include "rdabs/geometry.hpp"

namespace rdabs {

// Uniform partition of a box domain. Cells are half-open [lo, hi) along each
// axis except the last slab, which is closed, so every domain point belongs to
// exactly one cell.
class UniformGrid {
 public:
  UniformGrid() = default;
  UniformGrid(BoxRegion domain, std::vector<int> counts);

  int dim() const { return domain_.dim(); }
  std::int64_t cell_count() const { return total_; }
  const BoxRegion& domain() const { return domain_; }
  const std::vector<int>& counts() const { return counts_; }

  // idx in [0, counts[axis]]; boundary(axis, counts[axis]) is the domain's hi.
  double boundary(int axis, std::int64_t idx) const;

  // Closure of cell `index` as a closed box.
  BoxRegion cell(std::int64_t index) const;

  // Cell of a point under the half-open convention. Throws ConfigError when
  // the point lies outside the domain (beyond a tiny tolerance).
  std::int64_t locate(const Vec& p) const;

  std::vector<std::int64_t> multi_index(std::int64_t index) const;
  std::int64_t flat_index(std::span<const std::int64_t> mi) const;

 private:
  BoxRegion domain_;
  std::vector<int> counts_;
  std::int64_t total_ = 0;
  std::vector<std::int64_t> strides_;
};

UniformGrid build_partition(BoxRegion domain, std::vector<int> counts);

// Successor sets per cell, CSR storage. Sound: x in Y, f(x) in Y' implies
// (Y, Y') is present.
class TransitionRelation {
 public:
  TransitionRelation() = default;
  static TransitionRelation from_adjacency(std::vector<std::vector<std::int64_t>> adjacency);

  std::int64_t source_count() const { return static_cast<std::int64_t>(offsets_.size()) - 1; }
  std::int64_t transition_count() const { return static_cast<std::int64_t>(targets_.size()); }

  std::span<const std::int64_t> successors(std::int64_t cell) const {
    const auto b = offsets_[static_cast<std::size_t>(cell)];
    const auto e = offsets_[static_cast<std::size_t>(cell) + 1];
    return {targets_.data() + b, targets_.data() + e};
  }

  bool has(std::int64_t from, std::int64_t to) const;

  const std::vector<std::int64_t>& offsets() const { return offsets_; }
  const std::vector<std::int64_t>& targets() const { return targets_; }

 private:
  std::vector<std::int64_t> offsets_{0};
  std::vector<std::int64_t> targets_;
};

struct TransitionOptions {
  // Exact half-open images instead of the closed-closure rule. Requires
  // SystemDef::supports_exact_image().
  bool exact = false;
  int workers = 1;
};

// Default rule: enclose f(closure of Y) with interval images and link Y to
// every cell whose closure meets the enclosure. Sound, possibly conservative.
// Images are clamped to the domain, matching the clamped step() semantics.
TransitionRelation build_transitions(const SystemDef& sys, const UniformGrid& grid,
                                     const TransitionOptions& options = {});

// Abstract initial condition of a trajectory starting at xi0.
std::int64_t encode(const UniformGrid& grid, const Vec& xi0);

// Worst-case time-averaged squared deviation between the trajectory and any
// abstract trajectory starting from cell omega0, computed by dynamic
// programming over (time x cells). Equals the max over all l-step paths
// because the sup over a product box splits per coordinate.
double distortion(const TrajectoryMatrix& traj, std::int64_t omega0,
                  const TransitionRelation& rel, const UniformGrid& grid);

// Reusable DP buffers for batched distortion evaluation.
class DistortionSolver {
 public:
  DistortionSolver(const TransitionRelation& rel, const UniformGrid& grid);
  double operator()(const TrajectoryMatrix& traj, std::int64_t omega0);

 private:
  const TransitionRelation* rel_;
  const UniformGrid* grid_;
  std::vector<double> val_, next_;
  std::vector<std::int64_t> frontier_, next_frontier_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
};

struct McDistortion {
  double mean = 0.0;
  double se = 0.0;
  long escapes = 0;
  long samples = 0;
};

// Monte Carlo mean distortion over uniform initial conditions. Deterministic
// for fixed (seed, samples) regardless of worker count.
McDistortion expected_distortion(const SystemDef& sys, const UniformGrid& grid,
                                 const TransitionRelation& rel, int l, long samples,
                                 std::uint64_t seed, int workers = 1);

// Samples trajectories and counts those whose cell sequence is not a path in
// the relation. Must be zero for sound relations.
long check_inclusion(const SystemDef& sys, const UniformGrid& grid, const TransitionRelation& rel,
                     int l, long samples, std::uint64_t seed, int workers = 1);

}  // namespace rdabs
