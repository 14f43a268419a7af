#pragma once

// Unit-torus neighborhood queries. Agents are bucketed on a square grid of
// cells; a radius query scans the cells that can intersect the disc.

#include "abmsam/agents.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace abmsam {

double torus_distance2(Location a, Location b);

class Grid {
public:
  Grid() = default;
  explicit Grid(int cellsPerSide);

  [[nodiscard]] int side() const { return side_; }
  [[nodiscard]] int n_cells() const { return side_ * side_; }
  [[nodiscard]] int cell_of(Location p) const;
  /// Cells whose squares can hold a point within `radius` of p.
  void cells_near(Location p, double radius, std::vector<int>& out) const;

private:
  int side_ = 1;
};

/// Buckets of agent ids per (cell, class). Class is the sector for firms and
/// 0 for households.
class SpatialIndex {
public:
  SpatialIndex() = default;
  SpatialIndex(int cellsPerSide, int nClasses);

  void clear();
  void insert(int id, Location p, int cls);
  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] const std::vector<int>& bucket(int cell, int cls) const {
    return buckets_[static_cast<std::size_t>(cell * nClasses_ + cls)];
  }

  /// Ids of class `cls` within radius of p, expanding the radius by doubling
  /// up to `expansions` times while nothing qualifies.
  template <typename Accept>
  void query(Location p, int cls, double radius, int expansions, const std::vector<Location>& locs,
             Accept&& accept, std::vector<int>& out) const {
    out.clear();
    double r = radius;
    for (int round = 0; round <= expansions; ++round, r *= 2) {
      grid_.cells_near(p, r, cells_);
      const double r2 = r * r;
      for (int c : cells_)
        for (int id : bucket(c, cls))
          if (torus_distance2(p, locs[static_cast<std::size_t>(id)]) <= r2 && accept(id)) out.push_back(id);
      if (!out.empty()) return;
    }
  }

private:
  Grid grid_;
  int nClasses_ = 1;
  std::vector<std::vector<int>> buckets_;
  mutable std::vector<int> cells_;
};

/// Reduces `ids` to at most `cap` entries chosen uniformly, order preserved.
void cap_candidates(std::vector<int>& ids, std::size_t cap, std::mt19937_64& rng);

/// Unmet demand (money) per grid cell and sector for the current month.
struct UnmetGrid {
  Grid grid;
  Eigen::MatrixXd amount;  // cells x sectors

  UnmetGrid() = default;
  UnmetGrid(int cellsPerSide, int nSectors)
      : grid(cellsPerSide), amount(Eigen::MatrixXd::Zero(cellsPerSide * cellsPerSide, nSectors)) {}

  void add(Location p, int sector, double value) { amount(grid.cell_of(p), sector) += value; }
  void reset() { amount.setZero(); }
  /// Sum over the 3x3 block of cells centered on p's cell.
  [[nodiscard]] Eigen::VectorXd around(Location p) const;
  /// Removes up to `value` from the 3x3 block around p, cell by cell.
  void consume(Location p, int sector, double value);
};

}  // namespace abmsam
