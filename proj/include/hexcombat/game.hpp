#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hexcombat/hexgrid.hpp"

namespace hexcombat {

enum class Faction : std::uint8_t { blue = 0, red = 1 };

constexpr Faction other(Faction f) noexcept {
  return f == Faction::blue ? Faction::red : Faction::blue;
}

enum class UnitType : std::uint8_t { infantry = 0, mechanized, artillery, other };
inline constexpr int kUnitTypeCount = 4;

enum class Terrain : std::uint8_t { clear = 0, rough, urban, water, marsh };
inline constexpr int kTerrainCount = 5;

enum class Owner : std::uint8_t { none = 0, blue, red };

constexpr Owner owner_of(Faction f) noexcept {
  return f == Faction::blue ? Owner::blue : Owner::red;
}

std::string_view to_string(Faction f) noexcept;
std::string_view to_string(UnitType t) noexcept;
std::string_view to_string(Terrain t) noexcept;
std::string_view to_string(Owner o) noexcept;
Faction parse_faction(std::string_view s);
UnitType parse_unit_type(std::string_view s);
Terrain parse_terrain(std::string_view s);

using UnitId = int;

inline constexpr int kFullStrength = 100;

struct Unit {
  UnitId id = 0;
  Faction faction = Faction::blue;
  UnitType type = UnitType::infantry;
  int strength = kFullStrength;
  HexCoord position;
  bool can_move = false;

  friend bool operator==(const Unit&, const Unit&) = default;
};

/// Actions 0..5 target the neighbor in that Direction; 6 is pass.
using ActionIndex = int;
inline constexpr ActionIndex kPassAction = 6;
inline constexpr int kActionCount = 7;
using LegalMask = std::array<bool, kActionCount>;

struct CombatConfig {
  double attacker_fraction = 0.4;
  double counter_fraction = 0.2;
  int removal_threshold = 50;

  void validate() const;
  friend bool operator==(const CombatConfig&, const CombatConfig&) = default;
};

inline constexpr int kCityPointsPerPhase = 24;

struct ScoreBreakdown {
  long blue_city = 0;
  long blue_combat = 0;
  long red_city = 0;
  long red_combat = 0;

  long total() const noexcept { return blue_city + blue_combat - (red_city + red_combat); }
  friend bool operator==(const ScoreBreakdown&, const ScoreBreakdown&) = default;
};

// Event log entries produced by apply_action and end_phase.
struct MoveEvent {
  UnitId unit;
  HexCoord from;
  HexCoord to;
};
struct CaptureEvent {
  HexCoord city;
  Faction faction;
  Owner previous;
};
struct AttackEvent {
  UnitId attacker;
  Faction attacker_faction;
  UnitId defender;
  int damage;          // inflicted on the defender
  int counter_damage;  // inflicted on the attacker
};
struct RemovalEvent {
  UnitId unit;
  Faction faction;
  int residual;  // strength left at removal, credited to the other faction
};
struct PassEvent {
  UnitId unit;
};
struct PhaseEndEvent {
  int phase;  // the phase that just ended
  long blue_city_gain;
  long red_city_gain;
};

using Event =
    std::variant<MoveEvent, CaptureEvent, AttackEvent, RemovalEvent, PassEvent, PhaseEndEvent>;

enum class TerminalReason { none, phase_budget, blue_eliminated, red_eliminated };
std::string_view to_string(TerminalReason r) noexcept;

/// Every field of a GameState, for restoring arbitrary positions.
struct GameSnapshot {
  BoardDims dims;
  std::vector<Terrain> terrain;
  std::vector<Owner> city_owner;  // empty means all unowned
  std::vector<Unit> units;        // can_move is taken as given
  int phase = 0;
  int phase_budget = 0;
  Faction on_move = Faction::blue;
  ScoreBreakdown score;
  CombatConfig combat;
};

/// Full board situation. Units are kept sorted by id; removed units are
/// erased from the roster.
class GameState {
 public:
  GameState() = default;
  GameState(BoardDims dims, std::vector<Terrain> terrain, std::vector<Unit> units,
            int phase_budget, Faction first_to_move = Faction::blue,
            CombatConfig combat = {});

  /// Validates and restores a snapshot verbatim.
  static GameState restore(GameSnapshot snap);
  GameSnapshot snapshot() const;

  BoardDims dims() const noexcept { return dims_; }
  Terrain terrain_at(HexCoord h) const { return terrain_[dims_.index(h)]; }
  const std::vector<Terrain>& terrain() const noexcept { return terrain_; }
  Owner city_owner(HexCoord h) const { return city_owner_[dims_.index(h)]; }
  const std::vector<Owner>& city_owners() const noexcept { return city_owner_; }
  std::vector<HexCoord> cities() const;

  const std::vector<Unit>& units() const noexcept { return units_; }
  const Unit* find_unit(UnitId id) const noexcept;
  const Unit* unit_at(HexCoord h) const noexcept;
  int total_strength(Faction f) const noexcept;
  int unit_count(Faction f) const noexcept;

  int phase() const noexcept { return phase_; }
  int phase_budget() const noexcept { return phase_budget_; }
  Faction on_move() const noexcept { return on_move_; }
  const ScoreBreakdown& score() const noexcept { return score_; }
  const CombatConfig& combat() const noexcept { return combat_; }

  /// Lowest-id unit of the moving faction that has not yet acted.
  std::optional<UnitId> on_move_unit() const noexcept;
  /// True once every unit of the moving faction has acted this phase.
  bool phase_complete() const noexcept { return !on_move_unit().has_value(); }

  friend bool operator==(const GameState&, const GameState&) = default;

 private:
  friend struct Engine;

  void index_units();

  BoardDims dims_;
  std::vector<Terrain> terrain_;
  std::vector<Owner> city_owner_;
  std::vector<Unit> units_;
  std::vector<UnitId> occupant_;  // per hex, -1 when empty
  int phase_ = 0;
  int phase_budget_ = 0;
  Faction on_move_ = Faction::blue;
  ScoreBreakdown score_;
  CombatConfig combat_;
};

/// Legal actions for a movable unit of the moving faction.
LegalMask legal_mask(const GameState& s, UnitId unit);
std::vector<ActionIndex> legal_actions(const GameState& s, UnitId unit);

struct Transition {
  GameState state;
  std::vector<Event> events;
};

/// Executes one action for the current on-move unit.
Transition apply_action(GameState s, UnitId unit, ActionIndex action);

/// Closes the current phase: scores owned cities, advances the phase counter
/// and hands the move to the other faction. Throws if units remain to act.
Transition end_phase(GameState s);

long total_score(const GameState& s) noexcept;

struct TerminalStatus {
  bool terminal = false;
  TerminalReason reason = TerminalReason::none;
};
TerminalStatus is_terminal(const GameState& s) noexcept;

/// Calls end_phase when the phase is complete and the game is not over.
/// Returns true if a phase was closed.
bool close_phase_if_complete(GameState& s, std::vector<Event>* events = nullptr);

/// Rebuilds the score from an event log alone.
ScoreBreakdown score_from_events(const std::vector<Event>& events);

}  // namespace hexcombat
