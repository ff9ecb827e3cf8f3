#include "hexcombat/hexgrid.hpp"

#include <cmath>
#include <deque>
#include <numbers>
#include <string>

#include "hexcombat/error.hpp"

namespace hexcombat {

namespace {

// Row deltas per direction, and column deltas for even and odd rows.
constexpr std::array<int, 6> kRowDelta = {0, -1, -1, 0, 1, 1};
constexpr std::array<int, 6> kColDeltaEven = {1, 0, -1, -1, -1, 0};
constexpr std::array<int, 6> kColDeltaOdd = {1, 1, 0, -1, 0, 1};

std::string to_string(HexCoord h) {
  return "(" + std::to_string(h.row) + "," + std::to_string(h.col) + ")";
}

}  // namespace

PlanarPoint to_planar(HexCoord h) noexcept {
  return {static_cast<double>(h.col) + 0.5 * static_cast<double>(h.row & 1),
          static_cast<double>(h.row) * kRowPitch};
}

HexCoord step(HexCoord h, Direction d) noexcept {
  const auto k = static_cast<std::size_t>(d);
  const int dc = (h.row & 1) ? kColDeltaOdd[k] : kColDeltaEven[k];
  return {h.row + kRowDelta[k], h.col + dc};
}

std::vector<Neighbor> neighbors(HexCoord h, BoardDims bounds) {
  if (!bounds.contains(h)) {
    throw Error(ErrorCode::invalid_argument, "hex " + to_string(h) + " is off the board");
  }
  std::vector<Neighbor> out;
  out.reserve(6);
  for (Direction d : kAllDirections) {
    const HexCoord n = step(h, d);
    if (bounds.contains(n)) out.push_back({d, n});
  }
  return out;
}

namespace {

// Planar offset b - a built from integer deltas, so it depends only on the
// relative position and the row parities.
PlanarPoint planar_delta(HexCoord a, HexCoord b) noexcept {
  return {static_cast<double>(b.col - a.col) + 0.5 * static_cast<double>((b.row & 1) - (a.row & 1)),
          static_cast<double>(b.row - a.row) * kRowPitch};
}

}  // namespace

double euclid(HexCoord a, HexCoord b) noexcept {
  const PlanarPoint d = planar_delta(a, b);
  return std::hypot(d.x, d.y);
}

double angle_deg(HexCoord from, HexCoord to) {
  if (from == to) {
    throw Error(ErrorCode::invalid_argument, "angle undefined between identical hexes");
  }
  const PlanarPoint d = planar_delta(from, to);
  // Screen y points down, so "up" is -d.y.
  double deg = std::atan2(-d.y, d.x) * (180.0 / std::numbers::pi);
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

int hex_distance(HexCoord a, HexCoord b) noexcept {
  // Odd-r offset to axial.
  const int aq = a.col - (a.row - (a.row & 1)) / 2;
  const int bq = b.col - (b.row - (b.row & 1)) / 2;
  const int dq = bq - aq;
  const int dr = b.row - a.row;
  return (std::abs(dq) + std::abs(dr) + std::abs(dq + dr)) / 2;
}

std::vector<int> path_distances(BoardDims dims, std::span<const HexCoord> sources,
                                const std::vector<bool>& passable) {
  std::vector<int> dist(dims.area(), kUnreachable);
  std::deque<HexCoord> frontier;
  for (HexCoord s : sources) {
    if (!dims.contains(s)) continue;
    auto& d = dist[dims.index(s)];
    if (d == 0) continue;
    d = 0;
    frontier.push_back(s);
  }
  while (!frontier.empty()) {
    const HexCoord h = frontier.front();
    frontier.pop_front();
    const int next = dist[dims.index(h)] + 1;
    for (Direction d : kAllDirections) {
      const HexCoord n = step(h, d);
      if (!dims.contains(n)) continue;
      const std::size_t i = dims.index(n);
      if (dist[i] != kUnreachable || !passable[i]) continue;
      dist[i] = next;
      frontier.push_back(n);
    }
  }
  return dist;
}

}  // namespace hexcombat
