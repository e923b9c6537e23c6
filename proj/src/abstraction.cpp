#include "rdabs/abstraction.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>

#include "rdabs/errors.hpp"
#include "rdabs/parallel.hpp"
#include "rdabs/stats.hpp"

namespace rdabs {

UniformGrid::UniformGrid(BoxRegion domain, std::vector<int> counts)
    : domain_(std::move(domain)), counts_(std::move(counts)) {
  if (static_cast<int>(counts_.size()) != domain_.dim()) {
    throw ConfigError("UniformGrid: counts dimension != domain dimension");
  }
  total_ = 1;
  strides_.assign(counts_.size(), 1);
  for (int i = domain_.dim() - 1; i >= 0; --i) {
    if (counts_[static_cast<std::size_t>(i)] < 1) {
      throw ConfigError("UniformGrid: cells-per-axis must be >= 1");
    }
    if (domain_.axis(i).width() <= 0.0) {
      throw ConfigError("UniformGrid: zero-width domain axis " + std::to_string(i));
    }
    strides_[static_cast<std::size_t>(i)] = total_;
    total_ *= counts_[static_cast<std::size_t>(i)];
  }
}

UniformGrid build_partition(BoxRegion domain, std::vector<int> counts) {
  return UniformGrid(std::move(domain), std::move(counts));
}

double UniformGrid::boundary(int axis, std::int64_t idx) const {
  const auto& ax = domain_.axis(axis);
  const std::int64_t count = counts_[static_cast<std::size_t>(axis)];
  if (idx <= 0) return ax.lo;
  if (idx >= count) return ax.hi;
  return ax.lo + ax.width() * (static_cast<double>(idx) / static_cast<double>(count));
}

BoxRegion UniformGrid::cell(std::int64_t index) const {
  const auto mi = multi_index(index);
  std::vector<Interval> axes;
  axes.reserve(static_cast<std::size_t>(dim()));
  for (int i = 0; i < dim(); ++i) {
    axes.emplace_back(boundary(i, mi[static_cast<std::size_t>(i)]),
                      boundary(i, mi[static_cast<std::size_t>(i)] + 1));
  }
  return BoxRegion(std::move(axes));
}

std::int64_t UniformGrid::locate(const Vec& p) const {
  if (p.size() != dim()) throw std::invalid_argument("locate: dimension mismatch");
  std::int64_t flat = 0;
  for (int i = 0; i < dim(); ++i) {
    const auto& ax = domain_.axis(i);
    const std::int64_t count = counts_[static_cast<std::size_t>(i)];
    const double tol = 1e-12 * (1.0 + ax.width());
    if (p[i] < ax.lo - tol || p[i] > ax.hi + tol) {
      throw ConfigError("locate: point outside the grid domain");
    }
    auto idx = static_cast<std::int64_t>(
        std::floor((p[i] - ax.lo) / ax.width() * static_cast<double>(count)));
    idx = std::clamp<std::int64_t>(idx, 0, count - 1);
    // Align with the exact boundary() values; floating-point division above
    // can be off by one cell near a boundary.
    while (idx > 0 && p[i] < boundary(i, idx)) --idx;
    while (idx + 1 < count && p[i] >= boundary(i, idx + 1)) ++idx;
    flat += idx * strides_[static_cast<std::size_t>(i)];
  }
  return flat;
}

std::vector<std::int64_t> UniformGrid::multi_index(std::int64_t index) const {
  std::vector<std::int64_t> mi(static_cast<std::size_t>(dim()));
  for (int i = 0; i < dim(); ++i) {
    mi[static_cast<std::size_t>(i)] = index / strides_[static_cast<std::size_t>(i)];
    index %= strides_[static_cast<std::size_t>(i)];
  }
  return mi;
}

std::int64_t UniformGrid::flat_index(std::span<const std::int64_t> mi) const {
  std::int64_t flat = 0;
  for (int i = 0; i < dim(); ++i) {
    flat += mi[static_cast<std::size_t>(i)] * strides_[static_cast<std::size_t>(i)];
  }
  return flat;
}

TransitionRelation TransitionRelation::from_adjacency(
    std::vector<std::vector<std::int64_t>> adjacency) {
  TransitionRelation rel;
  rel.offsets_.clear();
  rel.offsets_.reserve(adjacency.size() + 1);
  rel.offsets_.push_back(0);
  std::size_t total = 0;
  for (auto& succ : adjacency) total += succ.size();
  rel.targets_.reserve(total);
  for (auto& succ : adjacency) {
    std::sort(succ.begin(), succ.end());
    succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    rel.targets_.insert(rel.targets_.end(), succ.begin(), succ.end());
    rel.offsets_.push_back(static_cast<std::int64_t>(rel.targets_.size()));
  }
  return rel;
}

bool TransitionRelation::has(std::int64_t from, std::int64_t to) const {
  const auto succ = successors(from);
  return std::binary_search(succ.begin(), succ.end(), to);
}

namespace {

// Closed-interval overlap of [lo, hi] with the closures of grid cells along
// one axis; returns the index range [first, last].
std::pair<std::int64_t, std::int64_t> closure_overlap_range(const UniformGrid& grid, int axis,
                                                            const Interval& image) {
  const std::int64_t count = grid.counts()[static_cast<std::size_t>(axis)];
  const auto& ax = grid.domain().axis(axis);
  auto guess = [&](double x) {
    auto idx = static_cast<std::int64_t>(
        std::floor((x - ax.lo) / ax.width() * static_cast<double>(count)));
    return std::clamp<std::int64_t>(idx, 0, count - 1);
  };
  std::int64_t first = guess(image.lo);
  while (first > 0 && grid.boundary(axis, first) >= image.lo) --first;
  while (first < count - 1 && grid.boundary(axis, first + 1) < image.lo) ++first;
  std::int64_t last = guess(image.hi);
  while (last < count - 1 && grid.boundary(axis, last + 1) <= image.hi) ++last;
  while (last > 0 && grid.boundary(axis, last) > image.hi) --last;
  return {first, last};
}

void enumerate_boxes(const UniformGrid& grid, const BoxRegion& image,
                     std::vector<std::int64_t>& out) {
  const int d = grid.dim();
  std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
  ranges.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) ranges.push_back(closure_overlap_range(grid, i, image.axis(i)));
  std::vector<std::int64_t> mi(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) mi[static_cast<std::size_t>(i)] = ranges[static_cast<std::size_t>(i)].first;
  while (true) {
    out.push_back(grid.flat_index(mi));
    int axis = d - 1;
    while (axis >= 0) {
      auto& v = mi[static_cast<std::size_t>(axis)];
      if (++v <= ranges[static_cast<std::size_t>(axis)].second) break;
      v = ranges[static_cast<std::size_t>(axis)].first;
      --axis;
    }
    if (axis < 0) break;
  }
}

BoxRegion clamp_to_domain(const BoxRegion& image, const BoxRegion& domain) {
  std::vector<Interval> axes;
  axes.reserve(static_cast<std::size_t>(domain.dim()));
  for (int i = 0; i < domain.dim(); ++i) {
    const auto& dom = domain.axis(i);
    const auto& img = image.axis(i);
    // Clamped dynamics: parts of the image outside the domain collapse onto
    // the boundary, so clamping endpoints is the exact image of the clamp.
    const double lo = std::min(std::max(img.lo, dom.lo), dom.hi);
    const double hi = std::min(std::max(img.hi, dom.lo), dom.hi);
    axes.emplace_back(lo, hi);
  }
  return BoxRegion(std::move(axes));
}

// --- exact half-open mode -------------------------------------------------

// [lo, hi) when closed_hi is false, [lo, hi] when true.
struct HoInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool closed_hi = false;

  bool empty() const { return lo > hi || (lo == hi && !closed_hi); }
};

HoInterval ho_intersect(const HoInterval& a, const HoInterval& b) {
  HoInterval out;
  out.lo = std::max(a.lo, b.lo);
  if (a.hi < b.hi) {
    out.hi = a.hi;
    out.closed_hi = a.closed_hi;
  } else if (b.hi < a.hi) {
    out.hi = b.hi;
    out.closed_hi = b.closed_hi;
  } else {
    out.hi = a.hi;
    out.closed_hi = a.closed_hi && b.closed_hi;
  }
  return out;
}

HoInterval ho_cell(const UniformGrid& grid, int axis, std::int64_t idx) {
  HoInterval out;
  out.lo = grid.boundary(axis, idx);
  out.hi = grid.boundary(axis, idx + 1);
  out.closed_hi = idx + 1 == grid.counts()[static_cast<std::size_t>(axis)];
  return out;
}

HoInterval ho_piece_axis(const UniformGrid& grid, int axis, const Interval& region) {
  HoInterval out;
  out.lo = region.lo;
  out.hi = region.hi;
  out.closed_hi = region.hi == grid.domain().axis(axis).hi;
  return out;
}

std::vector<std::int64_t> exact_targets_axis(const UniformGrid& grid, int axis,
                                             const HoInterval& image) {
  std::vector<std::int64_t> out;
  const std::int64_t count = grid.counts()[static_cast<std::size_t>(axis)];
  const auto [first_guess, last_guess] =
      closure_overlap_range(grid, axis, Interval(image.lo, image.hi));
  for (std::int64_t idx = std::max<std::int64_t>(0, first_guess - 1);
       idx <= std::min<std::int64_t>(count - 1, last_guess + 1); ++idx) {
    if (!ho_intersect(image, ho_cell(grid, axis, idx)).empty()) out.push_back(idx);
  }
  return out;
}

std::vector<std::int64_t> exact_successors(const SystemDef& sys, const UniformGrid& grid,
                                           const std::vector<SystemDef::DiagonalPiece>& pieces,
                                           std::int64_t cell_index) {
  const int d = grid.dim();
  const auto mi = grid.multi_index(cell_index);
  std::vector<std::int64_t> out;
  for (const auto& piece : pieces) {
    std::vector<std::vector<std::int64_t>> per_axis(static_cast<std::size_t>(d));
    bool empty = false;
    for (int i = 0; i < d && !empty; ++i) {
      const HoInterval cell_ax = ho_cell(grid, i, mi[static_cast<std::size_t>(i)]);
      const HoInterval part = ho_intersect(cell_ax, ho_piece_axis(grid, i, piece.region.axis(i)));
      if (part.empty()) {
        empty = true;
        break;
      }
      // Positive diagonal scale preserves orientation and openness.
      HoInterval image;
      image.lo = piece.scale[i] * part.lo + piece.offset[i];
      image.hi = piece.scale[i] * part.hi + piece.offset[i];
      image.closed_hi = part.closed_hi;
      per_axis[static_cast<std::size_t>(i)] = exact_targets_axis(grid, i, image);
      if (per_axis[static_cast<std::size_t>(i)].empty()) empty = true;
    }
    if (empty) continue;
    std::vector<std::size_t> cursor(static_cast<std::size_t>(d), 0);
    std::vector<std::int64_t> target(static_cast<std::size_t>(d));
    while (true) {
      for (int i = 0; i < d; ++i) {
        target[static_cast<std::size_t>(i)] =
            per_axis[static_cast<std::size_t>(i)][cursor[static_cast<std::size_t>(i)]];
      }
      out.push_back(grid.flat_index(target));
      int axis = d - 1;
      while (axis >= 0) {
        auto& c = cursor[static_cast<std::size_t>(axis)];
        if (++c < per_axis[static_cast<std::size_t>(axis)].size()) break;
        c = 0;
        --axis;
      }
      if (axis < 0) break;
    }
  }
  (void)sys;
  return out;
}

}  // namespace

TransitionRelation build_transitions(const SystemDef& sys, const UniformGrid& grid,
                                     const TransitionOptions& options) {
  if (!(sys.domain().dim() == grid.dim())) {
    throw ConfigError("build_transitions: system and grid dimension differ");
  }
  for (int i = 0; i < grid.dim(); ++i) {
    if (sys.domain().axis(i).lo != grid.domain().axis(i).lo ||
        sys.domain().axis(i).hi != grid.domain().axis(i).hi) {
      throw ConfigError("build_transitions: system domain != grid domain");
    }
  }
  const std::int64_t cells = grid.cell_count();
  std::vector<std::vector<std::int64_t>> adjacency(static_cast<std::size_t>(cells));

  if (options.exact) {
    const auto pieces = sys.diagonal_pieces();
    parallel_chunks(cells, options.workers, [&](int, std::int64_t begin, std::int64_t end) {
      for (std::int64_t c = begin; c < end; ++c) {
        adjacency[static_cast<std::size_t>(c)] = exact_successors(sys, grid, pieces, c);
      }
    });
  } else {
    parallel_chunks(cells, options.workers, [&](int, std::int64_t begin, std::int64_t end) {
      std::vector<std::int64_t> targets;
      for (std::int64_t c = begin; c < end; ++c) {
        targets.clear();
        for (const auto& image : sys.interval_image(grid.cell(c))) {
          enumerate_boxes(grid, clamp_to_domain(image, grid.domain()), targets);
        }
        adjacency[static_cast<std::size_t>(c)] = targets;
      }
    });
  }
  return TransitionRelation::from_adjacency(std::move(adjacency));
}

std::int64_t encode(const UniformGrid& grid, const Vec& xi0) { return grid.locate(xi0); }

DistortionSolver::DistortionSolver(const TransitionRelation& rel, const UniformGrid& grid)
    : rel_(&rel), grid_(&grid) {
  const auto cells = static_cast<std::size_t>(grid.cell_count());
  val_.assign(cells, 0.0);
  next_.assign(cells, 0.0);
  mark_.assign(cells, 0);
}

double DistortionSolver::operator()(const TrajectoryMatrix& traj, std::int64_t omega0) {
  const int l = traj.l;
  if (l < 1) throw std::invalid_argument("distortion: empty trajectory");
  if (rel_->source_count() != grid_->cell_count()) {
    throw ConfigError("distortion: relation size != grid size");
  }

  frontier_.clear();
  frontier_.push_back(omega0);
  val_[static_cast<std::size_t>(omega0)] = sup_sq_dist(traj.state(0), grid_->cell(omega0));

  for (int t = 1; t < l; ++t) {
    ++stamp_;
    next_frontier_.clear();
    // best predecessor value per reachable cell, then one cost add per cell
    for (const std::int64_t y : frontier_) {
      const double v = val_[static_cast<std::size_t>(y)];
      for (const std::int64_t succ : rel_->successors(y)) {
        const auto s = static_cast<std::size_t>(succ);
        if (mark_[s] != stamp_) {
          mark_[s] = stamp_;
          next_[s] = v;
          next_frontier_.push_back(succ);
        } else if (v > next_[s]) {
          next_[s] = v;
        }
      }
    }
    if (next_frontier_.empty()) {
      throw NumericError("distortion: no outgoing transitions before the horizon ended");
    }
    for (const std::int64_t y : next_frontier_) {
      next_[static_cast<std::size_t>(y)] += sup_sq_dist(traj.state(t), grid_->cell(y));
    }
    std::swap(val_, next_);
    std::swap(frontier_, next_frontier_);
  }

  double best = -std::numeric_limits<double>::infinity();
  for (const std::int64_t y : frontier_) {
    best = std::max(best, val_[static_cast<std::size_t>(y)]);
  }
  return best / static_cast<double>(l);
}

double distortion(const TrajectoryMatrix& traj, std::int64_t omega0, const TransitionRelation& rel,
                  const UniformGrid& grid) {
  DistortionSolver solver(rel, grid);
  return solver(traj, omega0);
}

McDistortion expected_distortion(const SystemDef& sys, const UniformGrid& grid,
                                 const TransitionRelation& rel, int l, long samples,
                                 std::uint64_t seed, int workers) {
  if (samples < 2) throw std::invalid_argument("expected_distortion: samples must be >= 2");
  std::vector<double> values(static_cast<std::size_t>(samples));
  std::atomic<long> escapes{0};
  parallel_chunks(samples, workers, [&](int, std::int64_t begin, std::int64_t end) {
    DistortionSolver solver(rel, grid);
    long local_escapes = 0;
    for (std::int64_t i = begin; i < end; ++i) {
      SampleRng rng(seed, static_cast<std::uint64_t>(i));
      const Vec x0 = sample_uniform(sys.domain(), rng);
      const TrajectoryMatrix traj = behavior(sys, x0, l);
      local_escapes += traj.escapes;
      values[static_cast<std::size_t>(i)] = solver(traj, encode(grid, x0));
    }
    escapes += local_escapes;
  });
  const SampleStats stats = mean_and_stderr(values);
  McDistortion out;
  out.mean = stats.mean;
  out.se = stats.se;
  out.escapes = escapes.load();
  out.samples = samples;
  return out;
}

long check_inclusion(const SystemDef& sys, const UniformGrid& grid, const TransitionRelation& rel,
                     int l, long samples, std::uint64_t seed, int workers) {
  std::atomic<long> violations{0};
  parallel_chunks(samples, workers, [&](int, std::int64_t begin, std::int64_t end) {
    long local = 0;
    for (std::int64_t i = begin; i < end; ++i) {
      SampleRng rng(seed, static_cast<std::uint64_t>(i));
      const Vec x0 = sample_uniform(sys.domain(), rng);
      const TrajectoryMatrix traj = behavior(sys, x0, l);
      std::int64_t prev = encode(grid, traj.state(0));
      for (int t = 1; t < l; ++t) {
        const std::int64_t cur = encode(grid, traj.state(t));
        if (!rel.has(prev, cur)) {
          ++local;
          break;
        }
        prev = cur;
      }
    }
    violations += local;
  });
  return violations.load();
}

}  // namespace rdabs
