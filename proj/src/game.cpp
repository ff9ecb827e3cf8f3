#include "hexcombat/game.hpp"

#include <algorithm>
#include <cmath>

#include "hexcombat/error.hpp"

namespace hexcombat {

std::string_view to_string(Faction f) noexcept { return f == Faction::blue ? "blue" : "red"; }

std::string_view to_string(UnitType t) noexcept {
  switch (t) {
    case UnitType::infantry: return "infantry";
    case UnitType::mechanized: return "mechanized";
    case UnitType::artillery: return "artillery";
    case UnitType::other: return "other";
  }
  return "other";
}

std::string_view to_string(Terrain t) noexcept {
  switch (t) {
    case Terrain::clear: return "clear";
    case Terrain::rough: return "rough";
    case Terrain::urban: return "urban";
    case Terrain::water: return "water";
    case Terrain::marsh: return "marsh";
  }
  return "clear";
}

std::string_view to_string(Owner o) noexcept {
  switch (o) {
    case Owner::none: return "none";
    case Owner::blue: return "blue";
    case Owner::red: return "red";
  }
  return "none";
}

std::string_view to_string(TerminalReason r) noexcept {
  switch (r) {
    case TerminalReason::none: return "none";
    case TerminalReason::phase_budget: return "phase_budget";
    case TerminalReason::blue_eliminated: return "blue_eliminated";
    case TerminalReason::red_eliminated: return "red_eliminated";
  }
  return "none";
}

Faction parse_faction(std::string_view s) {
  if (s == "blue") return Faction::blue;
  if (s == "red") return Faction::red;
  throw Error(ErrorCode::invalid_argument, "unknown faction '" + std::string(s) + "'");
}

UnitType parse_unit_type(std::string_view s) {
  for (int i = 0; i < kUnitTypeCount; ++i) {
    const auto t = static_cast<UnitType>(i);
    if (to_string(t) == s) return t;
  }
  throw Error(ErrorCode::invalid_argument, "unknown unit type '" + std::string(s) + "'");
}

Terrain parse_terrain(std::string_view s) {
  for (int i = 0; i < kTerrainCount; ++i) {
    const auto t = static_cast<Terrain>(i);
    if (to_string(t) == s) return t;
  }
  throw Error(ErrorCode::invalid_argument, "unknown terrain '" + std::string(s) + "'");
}

void CombatConfig::validate() const {
  if (!(attacker_fraction > 0.0 && attacker_fraction <= 1.0) ||
      !(counter_fraction > 0.0 && counter_fraction <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "combat fractions must lie in (0, 1]");
  }
  if (removal_threshold <= 0 || removal_threshold > kFullStrength) {
    throw Error(ErrorCode::invalid_argument, "removal threshold must lie in (0, 100]");
  }
}

struct Engine {
  static Unit& unit(GameState& s, UnitId id) {
    auto it = std::lower_bound(s.units_.begin(), s.units_.end(), id,
                               [](const Unit& u, UnitId v) { return u.id < v; });
    return *it;
  }

  static void credit_combat(GameState& s, Faction to, long points) {
    (to == Faction::blue ? s.score_.blue_combat : s.score_.red_combat) += points;
  }

  static void remove_if_broken(GameState& s, UnitId id, std::vector<Event>& events) {
    const Unit& u = unit(s, id);
    if (u.strength >= s.combat_.removal_threshold) return;
    const int residual = u.strength;
    const Faction f = u.faction;
    credit_combat(s, other(f), residual);
    s.occupant_[s.dims_.index(u.position)] = -1;
    events.push_back(RemovalEvent{id, f, residual});
    std::erase_if(s.units_, [id](const Unit& v) { return v.id == id; });
  }

  static Transition apply(GameState s, UnitId id, ActionIndex action) {
    if (is_terminal(s).terminal) {
      throw Error(ErrorCode::invalid_state, "game is already over");
    }
    const Unit* found = s.find_unit(id);
    if (found == nullptr) {
      throw Error(ErrorCode::invalid_argument, "unknown unit " + std::to_string(id));
    }
    const auto current = s.on_move_unit();
    if (!current || *current != id) {
      throw Error(ErrorCode::invalid_state, "unit " + std::to_string(id) + " is not on move");
    }
    const LegalMask mask = legal_mask(s, id);
    if (action < 0 || action >= kActionCount || !mask[static_cast<std::size_t>(action)]) {
      throw Error(ErrorCode::illegal_action, "action " + std::to_string(action) +
                                                 " is not legal for unit " + std::to_string(id));
    }

    std::vector<Event> events;
    Unit& actor = unit(s, id);
    actor.can_move = false;
    if (action == kPassAction) {
      events.push_back(PassEvent{id});
      return {std::move(s), std::move(events)};
    }

    const HexCoord target = step(actor.position, static_cast<Direction>(action));
    const std::size_t target_index = s.dims_.index(target);
    const UnitId defender_id = s.occupant_[target_index];

    if (defender_id < 0) {
      const HexCoord from = actor.position;
      s.occupant_[s.dims_.index(from)] = -1;
      s.occupant_[target_index] = id;
      actor.position = target;
      events.push_back(MoveEvent{id, from, target});
      if (s.terrain_[target_index] == Terrain::urban) {
        Owner& owner = s.city_owner_[target_index];
        if (owner != owner_of(actor.faction)) {
          events.push_back(CaptureEvent{target, actor.faction, owner});
          owner = owner_of(actor.faction);
        }
      }
      return {std::move(s), std::move(events)};
    }

    Unit& defender = unit(s, defender_id);
    const int defender_before = defender.strength;
    const int damage = std::min(
        defender.strength,
        static_cast<int>(std::lround(s.combat_.attacker_fraction * actor.strength)));
    const int counter = std::min(
        actor.strength,
        static_cast<int>(std::lround(s.combat_.counter_fraction * defender_before)));
    defender.strength -= damage;
    actor.strength -= counter;
    credit_combat(s, actor.faction, damage);
    credit_combat(s, defender.faction, counter);
    events.push_back(AttackEvent{id, actor.faction, defender_id, damage, counter});
    remove_if_broken(s, defender_id, events);
    remove_if_broken(s, id, events);
    return {std::move(s), std::move(events)};
  }

  static Transition close(GameState s) {
    if (is_terminal(s).terminal) {
      throw Error(ErrorCode::invalid_state, "game is already over");
    }
    if (!s.phase_complete()) {
      throw Error(ErrorCode::invalid_state, "phase still has units to act");
    }
    long blue_gain = 0;
    long red_gain = 0;
    for (Owner o : s.city_owner_) {
      if (o == Owner::blue) blue_gain += kCityPointsPerPhase;
      if (o == Owner::red) red_gain += kCityPointsPerPhase;
    }
    s.score_.blue_city += blue_gain;
    s.score_.red_city += red_gain;
    std::vector<Event> events{PhaseEndEvent{s.phase_, blue_gain, red_gain}};
    ++s.phase_;
    s.on_move_ = other(s.on_move_);
    for (Unit& u : s.units_) u.can_move = (u.faction == s.on_move_);
    return {std::move(s), std::move(events)};
  }
};

GameState::GameState(BoardDims dims, std::vector<Terrain> terrain, std::vector<Unit> units,
                     int phase_budget, Faction first_to_move, CombatConfig combat)
    : dims_(dims),
      terrain_(std::move(terrain)),
      units_(std::move(units)),
      phase_budget_(phase_budget),
      on_move_(first_to_move),
      combat_(combat) {
  for (Unit& u : units_) u.can_move = (u.faction == on_move_);
  index_units();
}

GameState GameState::restore(GameSnapshot snap) {
  GameState s;
  s.dims_ = snap.dims;
  s.terrain_ = std::move(snap.terrain);
  s.city_owner_ = std::move(snap.city_owner);
  s.units_ = std::move(snap.units);
  s.phase_ = snap.phase;
  s.phase_budget_ = snap.phase_budget;
  s.on_move_ = snap.on_move;
  s.score_ = snap.score;
  s.combat_ = snap.combat;
  if (s.phase_ < 0 || s.phase_ > s.phase_budget_) {
    throw Error(ErrorCode::invalid_argument, "phase outside [0, phase_budget]");
  }
  s.index_units();
  return s;
}

GameSnapshot GameState::snapshot() const {
  return {dims_, terrain_, city_owner_, units_, phase_, phase_budget_, on_move_, score_, combat_};
}

void GameState::index_units() {
  if (dims_.rows <= 0 || dims_.cols <= 0) {
    throw Error(ErrorCode::invalid_argument, "board dimensions must be positive");
  }
  if (terrain_.size() != dims_.area()) {
    throw Error(ErrorCode::invalid_argument, "terrain grid does not match board size");
  }
  if (city_owner_.empty()) city_owner_.assign(dims_.area(), Owner::none);
  if (city_owner_.size() != dims_.area()) {
    throw Error(ErrorCode::invalid_argument, "city owner grid does not match board size");
  }
  for (std::size_t i = 0; i < city_owner_.size(); ++i) {
    if (city_owner_[i] != Owner::none && terrain_[i] != Terrain::urban) {
      throw Error(ErrorCode::invalid_argument, "only urban hexes can have an owner");
    }
  }
  if (phase_budget_ <= 0) {
    throw Error(ErrorCode::invalid_argument, "phase budget must be positive");
  }
  combat_.validate();
  occupant_.assign(dims_.area(), -1);
  std::sort(units_.begin(), units_.end(), [](const Unit& a, const Unit& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < units_.size(); ++i) {
    const Unit& u = units_[i];
    if (i > 0 && units_[i - 1].id == u.id) {
      throw Error(ErrorCode::invalid_argument, "duplicate unit id " + std::to_string(u.id));
    }
    if (u.id < 0) throw Error(ErrorCode::invalid_argument, "unit ids must be non-negative");
    if (!dims_.contains(u.position)) {
      throw Error(ErrorCode::invalid_argument, "unit " + std::to_string(u.id) + " is off the board");
    }
    if (u.strength < combat_.removal_threshold || u.strength > kFullStrength) {
      throw Error(ErrorCode::invalid_argument,
                  "unit " + std::to_string(u.id) + " strength out of range");
    }
    const std::size_t idx = dims_.index(u.position);
    if (terrain_[idx] == Terrain::water) {
      throw Error(ErrorCode::invalid_argument, "unit " + std::to_string(u.id) + " placed on water");
    }
    if (occupant_[idx] >= 0) {
      throw Error(ErrorCode::invalid_argument,
                  "units " + std::to_string(occupant_[idx]) + " and " + std::to_string(u.id) +
                      " share a hex");
    }
    occupant_[idx] = u.id;
  }
}

std::vector<HexCoord> GameState::cities() const {
  std::vector<HexCoord> out;
  for (std::size_t i = 0; i < terrain_.size(); ++i) {
    if (terrain_[i] == Terrain::urban) out.push_back(dims_.coord(i));
  }
  return out;
}

const Unit* GameState::find_unit(UnitId id) const noexcept {
  auto it = std::lower_bound(units_.begin(), units_.end(), id,
                             [](const Unit& u, UnitId v) { return u.id < v; });
  return (it != units_.end() && it->id == id) ? &*it : nullptr;
}

const Unit* GameState::unit_at(HexCoord h) const noexcept {
  if (!dims_.contains(h)) return nullptr;
  const UnitId id = occupant_[dims_.index(h)];
  return id < 0 ? nullptr : find_unit(id);
}

int GameState::total_strength(Faction f) const noexcept {
  int total = 0;
  for (const Unit& u : units_) {
    if (u.faction == f) total += u.strength;
  }
  return total;
}

int GameState::unit_count(Faction f) const noexcept {
  return static_cast<int>(
      std::count_if(units_.begin(), units_.end(), [f](const Unit& u) { return u.faction == f; }));
}

std::optional<UnitId> GameState::on_move_unit() const noexcept {
  for (const Unit& u : units_) {
    if (u.faction == on_move_ && u.can_move) return u.id;
  }
  return std::nullopt;
}

LegalMask legal_mask(const GameState& s, UnitId id) {
  const Unit* u = s.find_unit(id);
  if (u == nullptr) {
    throw Error(ErrorCode::invalid_argument, "unknown unit " + std::to_string(id));
  }
  if (u->faction != s.on_move() || !u->can_move) {
    throw Error(ErrorCode::invalid_state, "unit " + std::to_string(id) + " is not on move");
  }
  LegalMask mask{};
  mask[kPassAction] = true;
  for (Direction d : kAllDirections) {
    const HexCoord n = step(u->position, d);
    if (!s.dims().contains(n) || s.terrain_at(n) == Terrain::water) continue;
    const Unit* occupant = s.unit_at(n);
    mask[static_cast<std::size_t>(d)] = occupant == nullptr || occupant->faction != u->faction;
  }
  return mask;
}

std::vector<ActionIndex> legal_actions(const GameState& s, UnitId unit) {
  const LegalMask mask = legal_mask(s, unit);
  std::vector<ActionIndex> out;
  for (int a = 0; a < kActionCount; ++a) {
    if (mask[static_cast<std::size_t>(a)]) out.push_back(a);
  }
  return out;
}

Transition apply_action(GameState s, UnitId unit, ActionIndex action) {
  return Engine::apply(std::move(s), unit, action);
}

Transition end_phase(GameState s) { return Engine::close(std::move(s)); }

long total_score(const GameState& s) noexcept { return s.score().total(); }

TerminalStatus is_terminal(const GameState& s) noexcept {
  if (s.phase() >= s.phase_budget()) return {true, TerminalReason::phase_budget};
  if (s.unit_count(Faction::blue) == 0) return {true, TerminalReason::blue_eliminated};
  if (s.unit_count(Faction::red) == 0) return {true, TerminalReason::red_eliminated};
  return {};
}

bool close_phase_if_complete(GameState& s, std::vector<Event>* events) {
  if (is_terminal(s).terminal || !s.phase_complete()) return false;
  Transition t = end_phase(std::move(s));
  s = std::move(t.state);
  if (events != nullptr) {
    events->insert(events->end(), t.events.begin(), t.events.end());
  }
  return true;
}

ScoreBreakdown score_from_events(const std::vector<Event>& events) {
  ScoreBreakdown score;
  for (const Event& e : events) {
    if (const auto* p = std::get_if<PhaseEndEvent>(&e)) {
      score.blue_city += p->blue_city_gain;
      score.red_city += p->red_city_gain;
    } else if (const auto* a = std::get_if<AttackEvent>(&e)) {
      const bool blue_attacks = a->attacker_faction == Faction::blue;
      (blue_attacks ? score.blue_combat : score.red_combat) += a->damage;
      (blue_attacks ? score.red_combat : score.blue_combat) += a->counter_damage;
    } else if (const auto* r = std::get_if<RemovalEvent>(&e)) {
      (r->faction == Faction::blue ? score.red_combat : score.blue_combat) += r->residual;
    }
  }
  return score;
}

}  // namespace hexcombat
