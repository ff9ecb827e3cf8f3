#pragma once

#include <cstdint>
#include <vector>

#include "hexcombat/game.hpp"

namespace hexcombat {

inline constexpr int kMinBoardSize = 3;
inline constexpr int kMaxBoardSize = 12;

struct UnitPlacement {
  UnitId id = 0;
  UnitType type = UnitType::infantry;
  HexCoord position;

  friend bool operator==(const UnitPlacement&, const UnitPlacement&) = default;
};

/// A square n x n starting position with a single city.
struct ScenarioSpec {
  int size = 0;
  std::uint64_t seed = 0;
  int phase_budget = 0;
  HexCoord city;
  std::vector<UnitPlacement> blue;
  std::vector<UnitPlacement> red;
  Faction first_mover = Faction::blue;
  /// Optional full terrain grid; empty means clear terrain plus the city.
  std::vector<Terrain> terrain;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// round(n/2) with halves rounded away from zero.
int min_units_for(int size) noexcept;
/// Rows of each faction's spawn band, ceil(n/3).
int spawn_band_rows(int size) noexcept;

/// Middle axis of the board: one row for odd n, two for even n.
struct RowRange {
  int first = 0;
  int last = 0;  // inclusive
  bool contains(int row) const noexcept { return row >= first && row <= last; }
};
RowRange middle_rows(int size) noexcept;
/// Rows counted as a faction's side of the board (excludes the middle axis).
RowRange side_rows(int size, Faction f) noexcept;
/// Spawn band of a faction: blue at the bottom, red at the top.
RowRange spawn_rows(int size, Faction f) noexcept;

/// Random scenario for complexity level n in [3, 12].
ScenarioSpec generate(int size, std::uint64_t seed);

/// Phase-0 game state for a spec. Throws on overlapping or off-board spawns.
GameState instantiate(const ScenarioSpec& spec, const CombatConfig& combat = {});

/// Board isometry that exchanges the two spawn bands: a vertical flip when the
/// row count is odd, a half-turn rotation when it is even.
HexCoord mirror_coord(HexCoord h, BoardDims dims) noexcept;
Direction mirror_direction(Direction d, BoardDims dims) noexcept;
ActionIndex mirror_action(ActionIndex a, BoardDims dims) noexcept;

/// Same scenario seen from the other side: factions swapped, positions
/// mirrored, and the other faction moving first.
ScenarioSpec mirrored(const ScenarioSpec& spec);

/// Mirrors an arbitrary state the same way (factions swapped, board mirrored).
GameState mirrored(const GameState& s);

}  // namespace hexcombat
