#include "hexcombat/scenario.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "hexcombat/error.hpp"
#include "hexcombat/rng.hpp"

namespace hexcombat {

int min_units_for(int size) noexcept {
  return static_cast<int>(std::lround(static_cast<double>(size) / 2.0));
}

int spawn_band_rows(int size) noexcept { return (size + 2) / 3; }

RowRange middle_rows(int size) noexcept {
  if (size % 2 == 1) return {size / 2, size / 2};
  return {size / 2 - 1, size / 2};
}

RowRange side_rows(int size, Faction f) noexcept {
  const RowRange mid = middle_rows(size);
  if (f == Faction::blue) return {mid.last + 1, size - 1};
  return {0, mid.first - 1};
}

RowRange spawn_rows(int size, Faction f) noexcept {
  const int band = spawn_band_rows(size);
  if (f == Faction::blue) return {size - band, size - 1};
  return {0, band - 1};
}

namespace {

// Picks `count` distinct cells uniformly by partial Fisher-Yates.
std::vector<HexCoord> sample_cells(std::vector<HexCoord> cells, int count, Rng& rng) {
  if (count > static_cast<int>(cells.size())) {
    throw Error(ErrorCode::internal, "not enough free cells for spawning");
  }
  for (int i = 0; i < count; ++i) {
    const auto remaining = cells.size() - static_cast<std::size_t>(i);
    const auto j = static_cast<std::size_t>(i) + rng.below(remaining);
    std::swap(cells[static_cast<std::size_t>(i)], cells[j]);
  }
  cells.resize(static_cast<std::size_t>(count));
  return cells;
}

std::vector<HexCoord> cells_in_rows(int size, RowRange rows, HexCoord exclude = {-1, -1}) {
  std::vector<HexCoord> out;
  for (int r = rows.first; r <= rows.last; ++r) {
    for (int c = 0; c < size; ++c) {
      if (HexCoord{r, c} != exclude) out.push_back({r, c});
    }
  }
  return out;
}

}  // namespace

ScenarioSpec generate(int size, std::uint64_t seed) {
  if (size < kMinBoardSize || size > kMaxBoardSize) {
    throw Error(ErrorCode::invalid_argument,
                "board size " + std::to_string(size) + " outside [3, 12]");
  }
  Rng rng(mix_seed(seed, 0));
  ScenarioSpec spec;
  spec.size = size;
  spec.seed = seed;
  spec.phase_budget = 4 * size;

  const int lo = min_units_for(size);
  const int blue_count = rng.between(lo, size);
  const int red_count = rng.between(lo, size);

  // The city goes down first so spawns can avoid it.
  if (blue_count == red_count) {
    const RowRange mid = middle_rows(size);
    const int row = rng.between(mid.first, mid.last);
    spec.city = {row, rng.between(0, size - 1)};
  } else {
    const Faction weaker = blue_count < red_count ? Faction::blue : Faction::red;
    const auto side = cells_in_rows(size, side_rows(size, weaker));
    spec.city = side[rng.below(side.size())];
  }

  UnitId next_id = 0;
  for (const HexCoord h :
       sample_cells(cells_in_rows(size, spawn_rows(size, Faction::blue), spec.city), blue_count, rng)) {
    spec.blue.push_back({next_id++, UnitType::infantry, h});
  }
  for (const HexCoord h :
       sample_cells(cells_in_rows(size, spawn_rows(size, Faction::red), spec.city), red_count, rng)) {
    spec.red.push_back({next_id++, UnitType::infantry, h});
  }
  return spec;
}

GameState instantiate(const ScenarioSpec& spec, const CombatConfig& combat) {
  if (spec.size <= 0) throw Error(ErrorCode::invalid_argument, "scenario size must be positive");
  const BoardDims dims{spec.size, spec.size};
  std::vector<Terrain> terrain = spec.terrain;
  if (terrain.empty()) {
    if (!dims.contains(spec.city)) {
      throw Error(ErrorCode::invalid_argument, "city is off the board");
    }
    terrain.assign(dims.area(), Terrain::clear);
    terrain[dims.index(spec.city)] = Terrain::urban;
  }
  std::vector<Unit> units;
  units.reserve(spec.blue.size() + spec.red.size());
  for (const auto& [roster, faction] :
       {std::pair{&spec.blue, Faction::blue}, std::pair{&spec.red, Faction::red}}) {
    for (const UnitPlacement& p : *roster) {
      units.push_back({p.id, faction, p.type, kFullStrength, p.position, false});
    }
  }
  return GameState(dims, std::move(terrain), std::move(units), spec.phase_budget,
                   spec.first_mover, combat);
}

HexCoord mirror_coord(HexCoord h, BoardDims dims) noexcept {
  if (dims.rows % 2 == 1) return {dims.rows - 1 - h.row, h.col};
  return {dims.rows - 1 - h.row, dims.cols - 1 - h.col};
}

Direction mirror_direction(Direction d, BoardDims dims) noexcept {
  if (dims.rows % 2 == 0) return opposite(d);
  switch (d) {
    case Direction::north_east: return Direction::south_east;
    case Direction::south_east: return Direction::north_east;
    case Direction::north_west: return Direction::south_west;
    case Direction::south_west: return Direction::north_west;
    default: return d;
  }
}

ActionIndex mirror_action(ActionIndex a, BoardDims dims) noexcept {
  if (a == kPassAction) return a;
  return static_cast<ActionIndex>(mirror_direction(static_cast<Direction>(a), dims));
}

ScenarioSpec mirrored(const ScenarioSpec& spec) {
  const BoardDims dims{spec.size, spec.size};
  ScenarioSpec out = spec;
  out.city = mirror_coord(spec.city, dims);
  out.first_mover = other(spec.first_mover);
  auto flip = [&](const std::vector<UnitPlacement>& roster) {
    std::vector<UnitPlacement> result = roster;
    for (UnitPlacement& p : result) p.position = mirror_coord(p.position, dims);
    return result;
  };
  out.blue = flip(spec.red);
  out.red = flip(spec.blue);
  if (!spec.terrain.empty()) {
    for (std::size_t i = 0; i < spec.terrain.size(); ++i) {
      out.terrain[dims.index(mirror_coord(dims.coord(i), dims))] = spec.terrain[i];
    }
  }
  return out;
}

GameState mirrored(const GameState& s) {
  GameSnapshot snap = s.snapshot();
  const BoardDims dims = snap.dims;
  GameSnapshot out = snap;
  for (std::size_t i = 0; i < snap.terrain.size(); ++i) {
    const std::size_t j = dims.index(mirror_coord(dims.coord(i), dims));
    out.terrain[j] = snap.terrain[i];
    const Owner o = snap.city_owner[i];
    out.city_owner[j] = o == Owner::blue ? Owner::red : o == Owner::red ? Owner::blue : Owner::none;
  }
  for (Unit& u : out.units) {
    u.faction = other(u.faction);
    u.position = mirror_coord(u.position, dims);
  }
  out.on_move = other(snap.on_move);
  out.score = {snap.score.red_city, snap.score.red_combat, snap.score.blue_city,
               snap.score.blue_combat};
  return GameState::restore(std::move(out));
}

}  // namespace hexcombat
