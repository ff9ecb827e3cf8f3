#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hexcombat {

/// Offset coordinate on an odd-r hex board: odd rows are drawn shifted half
/// a hex to the east. Row 0 is the top of the board.
struct HexCoord {
  int row = 0;
  int col = 0;

  friend constexpr auto operator<=>(const HexCoord&, const HexCoord&) = default;
};

/// Board extent in rows × cols.
struct BoardDims {
  int rows = 0;
  int cols = 0;

  constexpr bool contains(HexCoord h) const noexcept {
    return h.row >= 0 && h.col >= 0 && h.row < rows && h.col < cols;
  }
  constexpr std::size_t area() const noexcept {
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }
  constexpr std::size_t index(HexCoord h) const noexcept {
    return static_cast<std::size_t>(h.row) * static_cast<std::size_t>(cols) +
           static_cast<std::size_t>(h.col);
  }
  constexpr HexCoord coord(std::size_t index) const noexcept {
    return {static_cast<int>(index / static_cast<std::size_t>(cols)),
            static_cast<int>(index % static_cast<std::size_t>(cols))};
  }

  friend constexpr bool operator==(const BoardDims&, const BoardDims&) = default;
};

/// Position in the plane, in units of hex pitch. y grows with the row index.
struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;
};

/// The six hex directions, counterclockwise from east as drawn on screen.
enum class Direction : int { east = 0, north_east, north_west, west, south_west, south_east };

inline constexpr int kDirectionCount = 6;
inline constexpr std::array<Direction, 6> kAllDirections = {
    Direction::east,      Direction::north_east, Direction::north_west,
    Direction::west,      Direction::south_west, Direction::south_east};

constexpr Direction opposite(Direction d) noexcept {
  return static_cast<Direction>((static_cast<int>(d) + 3) % 6);
}

inline constexpr double kRowPitch = 0.86602540378443864676;  // sqrt(3)/2

PlanarPoint to_planar(HexCoord h) noexcept;

/// Neighbor in direction d, without bounds checking.
HexCoord step(HexCoord h, Direction d) noexcept;

struct Neighbor {
  Direction direction;
  HexCoord coord;
};

/// In-bounds neighbors in canonical direction order. Throws if h is off-board.
std::vector<Neighbor> neighbors(HexCoord h, BoardDims bounds);

/// Straight-line distance between hex centers; adjacent centers are 1 apart.
double euclid(HexCoord a, HexCoord b) noexcept;

/// Counterclockwise angle in degrees [0, 360) of the vector from -> to, as
/// drawn with row 0 at the top (decreasing row is "up"). Throws if from == to.
double angle_deg(HexCoord from, HexCoord to);

/// Hex-step distance ignoring obstacles.
int hex_distance(HexCoord a, HexCoord b) noexcept;

inline constexpr int kUnreachable = -1;

/// Multi-source breadth-first step distances. Cells whose `passable` entry is
/// false are never entered (sources are always distance 0). Unreached cells
/// hold kUnreachable.
std::vector<int> path_distances(BoardDims dims, std::span<const HexCoord> sources,
                                const std::vector<bool>& passable);

}  // namespace hexcombat

template <>
struct std::hash<hexcombat::HexCoord> {
  std::size_t operator()(const hexcombat::HexCoord& h) const noexcept {
    return std::hash<long long>{}((static_cast<long long>(h.row) << 32) ^
                                  static_cast<unsigned>(h.col));
  }
};
