#include <doctest.h>

#include <cmath>
#include <set>

#include "hexcombat/error.hpp"
#include "hexcombat/game.hpp"
#include "hexcombat/scenario.hpp"
#include "support/random_states.hpp"

using namespace hexcombat;
using testing_support::board;
using testing_support::unit;

namespace {

std::set<int> actions_of(const GameState& s, UnitId id) {
  const auto v = legal_actions(s, id);
  return {v.begin(), v.end()};
}

int strength_of(const GameState& s, UnitId id) {
  const Unit* u = s.find_unit(id);
  return u != nullptr ? u->strength : 0;
}

}  // namespace

TEST_CASE("legal actions") {
  SUBCASE("lone unit mid-board may go anywhere") {
    const GameState s = board(5, 5, {unit(0, Faction::blue, 2, 2), unit(1, Faction::red, 0, 0)});
    CHECK(actions_of(s, 0) == std::set<int>{0, 1, 2, 3, 4, 5, 6});
  }
  SUBCASE("unit boxed in by friends can only pass") {
    std::vector<Unit> units{unit(0, Faction::blue, 2, 2)};
    int id = 1;
    for (Direction d : kAllDirections) {
      const HexCoord h = step({2, 2}, d);
      units.push_back(unit(id++, Faction::blue, h.row, h.col));
    }
    units.push_back(unit(id, Faction::red, 4, 4));
    const GameState s = board(5, 5, units);
    CHECK(actions_of(s, 0) == std::set<int>{6});
  }
  SUBCASE("adjacent enemy to the east is an attack target") {
    GameState s = board(5, 5, {unit(0, Faction::blue, 2, 2), unit(1, Faction::red, 2, 3)});
    CHECK(actions_of(s, 0) == std::set<int>{0, 1, 2, 3, 4, 5, 6});
    const Transition t = apply_action(s, 0, 0);
    CHECK(t.state.find_unit(0)->position == HexCoord{2, 2});
    REQUIRE(t.events.size() == 1);
    CHECK(std::holds_alternative<AttackEvent>(t.events[0]));
  }
  SUBCASE("water and board edges are excluded") {
    const BoardDims dims{3, 3};
    std::vector<Terrain> terrain(dims.area(), Terrain::clear);
    terrain[dims.index({0, 1})] = Terrain::water;
    const GameState s(dims, terrain, {unit(0, Faction::blue, 0, 0), unit(1, Faction::red, 2, 2)}, 12);
    // From (0,0): E is water, NE/NW/W are off-board, SW off-board, SE is (1,0).
    CHECK(actions_of(s, 0) == std::set<int>{5, 6});
  }
  SUBCASE("unknown unit or unit not on move throws") {
    const GameState s = board(5, 5, {unit(0, Faction::blue, 2, 2), unit(1, Faction::red, 0, 0)});
    CHECK_THROWS_AS(legal_mask(s, 7), Error);
    CHECK_THROWS_AS(legal_mask(s, 1), Error);
  }
}

TEST_CASE("combat") {
  SUBCASE("full strength exchange") {
    const GameState s = board(5, 5, {unit(0, Faction::blue, 2, 2), unit(1, Faction::red, 2, 3)});
    const Transition t = apply_action(s, 0, 0);
    CHECK(strength_of(t.state, 1) == 60);
    CHECK(strength_of(t.state, 0) == 80);
    CHECK(t.state.score().blue_combat == 40);
    CHECK(t.state.score().red_combat == 20);
    CHECK(total_score(t.state) == 20);
    CHECK_FALSE(t.state.find_unit(0)->can_move);
  }
  SUBCASE("removal credits the residual to the attacker's side") {
    const GameState s = board(5, 5, {unit(0, Faction::blue, 2, 2, 55), unit(1, Faction::red, 2, 3, 55)});
    const Transition t = apply_action(s, 0, 0);
    CHECK(t.state.find_unit(1) == nullptr);
    CHECK(t.state.unit_at({2, 3}) == nullptr);
    // 22 damage plus 33 residual.
    CHECK(t.state.score().blue_combat == 55);
    // Counter damage uses the defender's pre-combat strength: round(0.2 * 55) = 11,
    // leaving the attacker at 44, below the threshold, so it is removed too.
    CHECK(t.state.find_unit(0) == nullptr);
    CHECK(t.state.score().red_combat == 11 + 44);
  }
  SUBCASE("fractional damage rounds to nearest") {
    // 0.4 * 91 = 36.4 and 0.2 * 92 = 18.4
    const GameState s = board(5, 5, {unit(0, Faction::blue, 2, 2, 91), unit(1, Faction::red, 2, 3, 92)});
    const Transition t = apply_action(s, 0, 0);
    CHECK(strength_of(t.state, 1) == 92 - 36);
    CHECK(strength_of(t.state, 0) == 91 - 18);
  }
  SUBCASE("exact halves round away from zero") {
    GameSnapshot snap =
        board(5, 5, {unit(0, Faction::blue, 2, 2, 90), unit(1, Faction::red, 2, 3, 90)}).snapshot();
    snap.combat.attacker_fraction = 0.25;  // 22.5
    snap.combat.counter_fraction = 0.25;   // 22.5
    const Transition t = apply_action(GameState::restore(snap), 0, 0);
    CHECK(strength_of(t.state, 1) == 90 - 23);
    CHECK(strength_of(t.state, 0) == 90 - 23);
  }
}

TEST_CASE("movement and city control") {
  GameState s = board(5, 5, {unit(0, Faction::blue, 2, 2), unit(1, Faction::red, 0, 0)}, {{2, 3}});
  CHECK(s.city_owner({2, 3}) == Owner::none);
  Transition t = apply_action(s, 0, 0);
  CHECK(t.state.find_unit(0)->position == HexCoord{2, 3});
  CHECK(t.state.city_owner({2, 3}) == Owner::blue);
  // Control persists after the unit leaves.
  GameState g = end_phase(t.state).state;
  g = apply_action(g, 1, kPassAction).state;
  g = end_phase(g).state;
  g = apply_action(g, 0, 3).state;
  CHECK(g.find_unit(0)->position == HexCoord{2, 2});
  CHECK(g.city_owner({2, 3}) == Owner::blue);
}

TEST_CASE("illegal actions throw") {
  const GameState s = board(5, 5, {unit(0, Faction::blue, 0, 0), unit(1, Faction::blue, 0, 1),
                                   unit(2, Faction::red, 4, 4)});
  CHECK_THROWS_AS(apply_action(s, 0, 0), Error);   // friendly occupied
  CHECK_THROWS_AS(apply_action(s, 0, 3), Error);   // off-board
  CHECK_THROWS_AS(apply_action(s, 0, 7), Error);   // out of range
  CHECK_THROWS_AS(apply_action(s, 1, 6), Error);   // not the on-move unit
  CHECK_THROWS_AS(apply_action(s, 2, 6), Error);   // enemy unit
}

TEST_CASE("units act in ascending id order within a phase") {
  GameState s = board(5, 5, {unit(3, Faction::blue, 4, 4), unit(1, Faction::blue, 4, 0), unit(2, Faction::red, 0, 0)});
  CHECK(s.on_move_unit() == 1);
  s = apply_action(s, 1, kPassAction).state;
  CHECK(s.on_move_unit() == 3);
  s = apply_action(s, 3, kPassAction).state;
  CHECK_FALSE(s.on_move_unit().has_value());
  CHECK(s.phase_complete());
}

TEST_CASE("end_phase scoring") {
  SUBCASE("owned city scores 24") {
    GameState s = board(5, 5, {unit(0, Faction::blue, 2, 2), unit(1, Faction::red, 0, 0)}, {{2, 3}});
    s = apply_action(s, 0, 0).state;
    const Transition t = end_phase(s);
    CHECK(t.state.score().blue_city == 24);
    CHECK(t.state.score().red_city == 0);
    CHECK(t.state.phase() == 1);
    CHECK(t.state.on_move() == Faction::red);
    CHECK(t.state.find_unit(1)->can_move);
  }
  SUBCASE("no owned cities leaves scores unchanged") {
    GameState s = board(5, 5, {unit(0, Faction::blue, 2, 2), unit(1, Faction::red, 0, 0)}, {{4, 4}});
    s = apply_action(s, 0, kPassAction).state;
    CHECK(end_phase(s).state.score() == ScoreBreakdown{});
  }
  SUBCASE("three phases of control accumulate 72") {
    GameState s = board(5, 5, {unit(0, Faction::blue, 2, 2), unit(1, Faction::red, 0, 0)}, {{2, 3}});
    s = apply_action(s, 0, 0).state;
    for (int i = 0; i < 2; ++i) {
      s = end_phase(s).state;
      const UnitId u = *s.on_move_unit();
      s = apply_action(s, u, kPassAction).state;
    }
    CHECK(s.score().blue_city == 48);
    s = end_phase(s).state;
    CHECK(s.score().blue_city == 72);
  }
  SUBCASE("mid-phase end throws") {
    const GameState s = board(5, 5, {unit(0, Faction::blue, 2, 2), unit(1, Faction::red, 0, 0)});
    CHECK_THROWS_AS(end_phase(s), Error);
  }
}

TEST_CASE("total_score") {
  CHECK(ScoreBreakdown{120, 60, 0, 20}.total() == 160);
  CHECK(total_score(instantiate(generate(6, 3))) == 0);
  ScoreBreakdown five_phases{5 * kCityPointsPerPhase, 60, 0, 20};
  CHECK(five_phases.total() == 160);
}

TEST_CASE("terminal conditions") {
  SUBCASE("phase budget") {
    GameSnapshot snap = instantiate(generate(5, 1)).snapshot();
    snap.phase = 20;
    const GameState s = GameState::restore(snap);
    CHECK(s.phase_budget() == 20);
    CHECK(is_terminal(s).terminal);
    CHECK(is_terminal(s).reason == TerminalReason::phase_budget);
  }
  SUBCASE("annihilation") {
    GameState s = board(5, 5, {unit(0, Faction::blue, 2, 2), unit(1, Faction::red, 2, 3, 50)});
    s = apply_action(s, 0, 0).state;  // 50 - 40 = 10 -> removed
    const TerminalStatus st = is_terminal(s);
    CHECK(st.terminal);
    CHECK(st.reason == TerminalReason::red_eliminated);
  }
  SUBCASE("fresh game is live") {
    GameSnapshot snap = instantiate(generate(5, 1)).snapshot();
    snap.phase = 1;
    CHECK_FALSE(is_terminal(GameState::restore(snap)).terminal);
  }
}

TEST_CASE("random games: conservation, one unit per hex, event-log score") {
  for (int g = 0; g < 300; ++g) {
    const int n = 3 + g % 10;
    const ScenarioSpec spec = generate(n, 1000 + g);
    const auto played = testing_support::play_random_game(spec, 5000 + g);
    const GameState& s = played.final_state;
    CHECK(is_terminal(s).terminal);

    long red_lost = 100L * static_cast<long>(spec.red.size());
    long blue_lost = 100L * static_cast<long>(spec.blue.size());
    std::set<HexCoord> occupied;
    for (const Unit& u : s.units()) {
      (u.faction == Faction::red ? red_lost : blue_lost) -= u.strength;
      CHECK(occupied.insert(u.position).second);
      CHECK(u.strength >= s.combat().removal_threshold);
      CHECK(s.terrain_at(u.position) != Terrain::water);
    }
    CHECK(s.score().blue_combat == red_lost);
    CHECK(s.score().red_combat == blue_lost);
    CHECK(score_from_events(played.events) == s.score());
  }
}

TEST_CASE("determinism") {
  const ScenarioSpec spec = generate(8, 42);
  const auto a = testing_support::play_random_game(spec, 9);
  const auto b = testing_support::play_random_game(spec, 9);
  CHECK(a.final_state == b.final_state);
}

TEST_CASE("snapshot round trip") {
  const GameState s = testing_support::random_midgame(7, 11);
  CHECK(GameState::restore(s.snapshot()) == s);
}

TEST_CASE("combat config validation") {
  CombatConfig c;
  CHECK_NOTHROW(c.validate());
  c.attacker_fraction = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.removal_threshold = 101;
  CHECK_THROWS_AS(c.validate(), Error);
}
