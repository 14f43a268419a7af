#include "abmsam/spatial.hpp"

#include <algorithm>
#include <cmath>

namespace abmsam {

namespace {

double wrap_delta(double d) {
  d = std::abs(d);
  return d > 0.5 ? 1.0 - d : d;
}

int wrap(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

double torus_distance2(Location a, Location b) {
  const double dx = wrap_delta(a.x - b.x);
  const double dy = wrap_delta(a.y - b.y);
  return dx * dx + dy * dy;
}

Grid::Grid(int cellsPerSide) : side_(std::max(1, cellsPerSide)) {}

int Grid::cell_of(Location p) const {
  const int cx = std::clamp(static_cast<int>(p.x * side_), 0, side_ - 1);
  const int cy = std::clamp(static_cast<int>(p.y * side_), 0, side_ - 1);
  return cy * side_ + cx;
}

void Grid::cells_near(Location p, double radius, std::vector<int>& out) const {
  out.clear();
  const int span = static_cast<int>(std::ceil(radius * side_));
  if (2 * span + 1 >= side_) {
    for (int c = 0; c < n_cells(); ++c) out.push_back(c);
    return;
  }
  const int cx = std::clamp(static_cast<int>(p.x * side_), 0, side_ - 1);
  const int cy = std::clamp(static_cast<int>(p.y * side_), 0, side_ - 1);
  for (int dy = -span; dy <= span; ++dy)
    for (int dx = -span; dx <= span; ++dx) out.push_back(wrap(cy + dy, side_) * side_ + wrap(cx + dx, side_));
}

SpatialIndex::SpatialIndex(int cellsPerSide, int nClasses)
    : grid_(cellsPerSide), nClasses_(std::max(1, nClasses)),
      buckets_(static_cast<std::size_t>(grid_.n_cells() * nClasses_)) {}

void SpatialIndex::clear() {
  for (auto& b : buckets_) b.clear();
}

void SpatialIndex::insert(int id, Location p, int cls) {
  buckets_[static_cast<std::size_t>(grid_.cell_of(p) * nClasses_ + cls)].push_back(id);
}

void cap_candidates(std::vector<int>& ids, std::size_t cap, std::mt19937_64& rng) {
  if (ids.size() <= cap) return;
  // selection sampling keeps the original order
  std::vector<int> kept;
  kept.reserve(cap);
  std::size_t need = cap;
  std::size_t left = ids.size();
  for (int id : ids) {
    if (std::uniform_int_distribution<std::size_t>(0, left - 1)(rng) < need) {
      kept.push_back(id);
      --need;
    }
    --left;
  }
  ids.swap(kept);
}

Eigen::VectorXd UnmetGrid::around(Location p) const {
  const int n = grid.side();
  const int c = grid.cell_of(p);
  const int cx = c % n, cy = c / n;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(amount.cols());
  if (n < 3) return amount.colwise().sum().transpose();
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) sum += amount.row(wrap(cy + dy, n) * n + wrap(cx + dx, n)).transpose();
  return sum;
}

void UnmetGrid::consume(Location p, int sector, double value) {
  const int n = grid.side();
  const int c = grid.cell_of(p);
  const int cx = c % n, cy = c / n;
  for (int dy = -1; dy <= 1 && value > 0; ++dy)
    for (int dx = -1; dx <= 1 && value > 0; ++dx) {
      const int cell = n < 3 ? (dy == 0 && dx == 0 ? c : -1) : wrap(cy + dy, n) * n + wrap(cx + dx, n);
      if (cell < 0) continue;
      const double take = std::min(value, amount(cell, sector));
      amount(cell, sector) -= take;
      value -= take;
    }
}

}  // namespace abmsam
