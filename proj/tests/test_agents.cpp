#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <set>
#include <thread>

#include "hexcombat/agents.hpp"
#include "hexcombat/eval.hpp"
#include "hexcombat/json_io.hpp"
#include "hexcombat/scenario.hpp"
#include "net.hpp"
#include "support/random_states.hpp"

using namespace hexcombat;
using testing_support::board;
using testing_support::unit;

namespace {

std::set<ActionIndex> mirrored_set(const std::vector<ActionIndex>& actions, BoardDims dims) {
  std::set<ActionIndex> out;
  for (ActionIndex a : actions) out.insert(mirror_action(a, dims));
  return out;
}

// Accepts one connection and answers every line with `reply`, or never
// answers when reply is empty.
class LinePolicyServer {
 public:
  explicit LinePolicyServer(std::string reply)
      : listener_(net::listen_tcp("127.0.0.1", 0)), reply_(std::move(reply)) {
    port_ = net::bound_port(listener_);
    thread_ = std::thread([this] {
      net::Socket conn = net::accept_connection(listener_);
      if (!conn.valid()) return;
      std::string buffer;
      try {
        while (auto line = net::read_line(conn.fd(), buffer, std::chrono::milliseconds(-1))) {
          ++requests_;
          if (!reply_.empty()) net::write_all(conn.fd(), reply_ + "\n");
        }
      } catch (const Error&) {
      }
    });
  }
  ~LinePolicyServer() {
    listener_.shutdown();
    thread_.join();
  }
  int port() const { return port_; }
  int requests() const { return requests_; }

 private:
  net::Socket listener_;
  std::string reply_;
  int port_ = 0;
  std::atomic<int> requests_{0};
  std::thread thread_;
};

}  // namespace

TEST_CASE("posture") {
  const GameState even = board(5, 5, {unit(0, Faction::blue, 4, 0), unit(1, Faction::red, 0, 4)});
  CHECK(posture_of(even, Faction::blue) == Posture::attack);
  CHECK(posture_of(even, Faction::red) == Posture::attack);
  const GameState weak = board(5, 5, {unit(0, Faction::blue, 4, 0, 60), unit(1, Faction::red, 0, 4)});
  CHECK(posture_of(weak, Faction::blue) == Posture::defend);
  CHECK(posture_of(weak, Faction::red) == Posture::attack);
}

TEST_CASE("Pass-Agg attacks an adjacent enemy") {
  for (int strength : {60, 100}) {
    const GameState s = board(5, 5, {unit(0, Faction::blue, 2, 2, strength), unit(1, Faction::red, 2, 3)}, {{0, 0}});
    Rng rng(1);
    CHECK(passagg_decide(s, 0, rng) == 0);
  }
}

TEST_CASE("Pass-Agg picks among two adjacent enemies uniformly") {
  // (2,2) is even: NE neighbor (1,2), W neighbor (2,1).
  const GameState s = board(5, 5,
                            {unit(0, Faction::blue, 2, 2), unit(1, Faction::red, 1, 2), unit(2, Faction::red, 2, 1)});
  int ne = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    Rng rng(mix_seed(4242, static_cast<std::uint64_t>(i)));
    const ActionIndex a = passagg_decide(s, 0, rng);
    REQUIRE((a == 1 || a == 3));
    ne += a == 1;
  }
  CHECK(std::abs(ne / static_cast<double>(trials) - 0.5) <= 0.03);
}

TEST_CASE("Pass-Agg moves toward an unowned city when no enemy is present") {
  const GameState s = board(7, 7, {unit(0, Faction::blue, 3, 1)}, {{3, 4}});
  // Hand scores with no enemy term: -distance to the city.
  //   stay (3,1): -3   E (3,2): -2   NE (2,1): -3   NW (2,0): -4
  //   W (3,0): -4     SW (4,0): -4  SE (4,1): -3
  const PassAggPlan plan = passagg_plan(s, 0);
  CHECK(plan.best == std::vector<ActionIndex>{0});
  CHECK(plan.best_score == -2.0);
  Rng rng(0);
  CHECK(passagg_decide(s, 0, rng) == 0);
}

TEST_CASE("Pass-Agg hex score form") {
  const GameState s = board(7, 7, {unit(0, Faction::blue, 3, 1), unit(1, Faction::red, 0, 6)}, {{3, 4}});
  std::vector<int> city(49, 2), enemy(49, 5);
  CHECK(passagg_hex_score(s, {0, 0}, Posture::attack, city, enemy, {}) == -2.0 - 2.5);
  CHECK(passagg_hex_score(s, {0, 0}, Posture::defend, city, enemy, {}) == -2.0 + 2.5);
  CHECK(passagg_hex_score(s, {0, 0}, Posture::attack, city, enemy, {2.0, 1.0}) == -4.0 - 5.0);
}

TEST_CASE("Pass-Agg passes when staying put is best") {
  const GameState s = board(5, 5, {unit(0, Faction::blue, 2, 2)}, {{2, 2}});
  Rng rng(0);
  CHECK(passagg_decide(s, 0, rng) == kPassAction);
}

TEST_CASE("Pass-Agg is legal, attacks when possible, and is mirror symmetric") {
  int attacks_seen = 0;
  for (int i = 0; i < 4000; ++i) {
    const int n = 3 + i % 10;
    const GameState s = testing_support::random_midgame(n, static_cast<std::uint64_t>(i));
    const UnitId u = *s.on_move_unit();
    const LegalMask mask = legal_mask(s, u);
    Rng rng(static_cast<std::uint64_t>(i));
    const ActionIndex a = passagg_decide(s, u, rng);
    REQUIRE(mask[static_cast<std::size_t>(a)]);

    const PassAggPlan plan = passagg_plan(s, u);
    const Unit& self = *s.find_unit(u);
    bool adjacent_enemy = false;
    for (const Neighbor& nb : neighbors(self.position, s.dims())) {
      const Unit* o = s.unit_at(nb.coord);
      adjacent_enemy = adjacent_enemy || (o != nullptr && o->faction != self.faction);
    }
    CHECK(adjacent_enemy == !plan.attacks.empty());
    if (adjacent_enemy) {
      ++attacks_seen;
      CHECK(std::find(plan.attacks.begin(), plan.attacks.end(), a) != plan.attacks.end());
    }

    const GameState m = mirrored(s);
    const PassAggPlan mplan = passagg_plan(m, u);
    CHECK(mplan.posture == plan.posture);
    CHECK(mirrored_set(plan.attacks, s.dims()) == std::set<ActionIndex>(mplan.attacks.begin(), mplan.attacks.end()));
    if (plan.attacks.empty()) {
      CHECK(mirrored_set(plan.best, s.dims()) == std::set<ActionIndex>(mplan.best.begin(), mplan.best.end()));
      CHECK(mplan.best_score == plan.best_score);
    }
    const auto& choices = plan.attacks.empty() ? plan.best : plan.attacks;
    if (choices.size() == 1) {
      Rng rm(static_cast<std::uint64_t>(i));
      CHECK(passagg_decide(m, u, rm) == mirror_action(a, s.dims()));
    }
  }
  CHECK(attacks_seen > 100);
}

TEST_CASE("Pass-Agg never picks an illegal action") {
  std::uint64_t checked = 0;
  for (int g = 0; g < 400; ++g) {
    const ScenarioSpec spec = generate(3 + g % 10, static_cast<std::uint64_t>(g));
    GameState s = instantiate(spec);
    Rng rng(static_cast<std::uint64_t>(g));
    while (!is_terminal(s).terminal) {
      if (close_phase_if_complete(s)) continue;
      const UnitId u = *s.on_move_unit();
      const ActionIndex a = passagg_decide(s, u, rng);
      REQUIRE(legal_mask(s, u)[static_cast<std::size_t>(a)]);
      ++checked;
      s = apply_action(std::move(s), u, a).state;
    }
  }
  CHECK(checked > 10000);
}

TEST_CASE("deciding for a unit not on move throws") {
  const GameState s = board(5, 5, {unit(0, Faction::blue, 2, 2), unit(1, Faction::red, 0, 0)});
  Rng rng(0);
  CHECK_THROWS_AS(passagg_decide(s, 1, rng), Error);
  CHECK_THROWS_AS(random_decide(s, 1, rng), Error);
}

TEST_CASE("random agent") {
  SUBCASE("only pass legal") {
    const GameState s = board(3, 3,
                              {unit(0, Faction::blue, 0, 0), unit(1, Faction::blue, 0, 1), unit(2, Faction::blue, 1, 0),
                               unit(3, Faction::red, 2, 2)});
    Rng rng(3);
    for (int i = 0; i < 20; ++i) CHECK(random_decide(s, 0, rng) == kPassAction);
  }
  SUBCASE("uniform over seven actions") {
    const GameState s = board(5, 5, {unit(0, Faction::blue, 2, 2), unit(1, Faction::red, 0, 4)});
    Rng rng(11);
    std::array<int, 7> counts{};
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) ++counts[static_cast<std::size_t>(random_decide(s, 0, rng))];
    for (int c : counts) CHECK(std::abs(c / static_cast<double>(trials) - 1.0 / 7.0) <= 0.02);
  }
  SUBCASE("same seed, same sequence") {
    const GameState s = board(5, 5, {unit(0, Faction::blue, 2, 2), unit(1, Faction::red, 0, 4)});
    Rng a(5), b(5);
    for (int i = 0; i < 100; ++i) CHECK(random_decide(s, 0, a) == random_decide(s, 0, b));
  }
}

TEST_CASE("external decisions over a callback transport") {
  const GameState s = board(5, 5, {unit(0, Faction::blue, 0, 0), unit(1, Faction::red, 4, 4)});
  const LegalMask mask = legal_mask(s, 0);
  const ObservationTensor obs = build_global(s);

  SUBCASE("reply 6 is a pass") {
    std::string sent;
    CallbackTransport t([&](const std::string& line) {
      sent = line;
      return std::string(R"({"action":6})");
    });
    CHECK(external_decide(obs, mask, t) == kPassAction);
    const Json req = parse_json_line(sent);
    CHECK(req["op"] == "act");
    CHECK(req["legal_mask"] == legal_mask_json(mask));
    CHECK(tensor_from_json(req["observation"]) == obs);
  }
  SUBCASE("illegal reply carries the mask") {
    CallbackTransport t([](const std::string&) { return std::string(R"({"action":2})"); });
    try {
      external_decide(obs, mask, t);
      FAIL("expected an exception");
    } catch (const IllegalRemoteAction& e) {
      CHECK(e.code() == ErrorCode::protocol);
      CHECK(e.action() == 2);
      CHECK(e.legal_mask() == mask);
    }
  }
  SUBCASE("out of range and malformed replies") {
    CallbackTransport big([](const std::string&) { return std::string(R"({"action":9})"); });
    CHECK_THROWS_AS(external_decide(obs, mask, big), IllegalRemoteAction);
    CallbackTransport junk([](const std::string&) { return std::string("not json"); });
    CHECK_THROWS_AS(external_decide(obs, mask, junk), Error);
    CallbackTransport missing([](const std::string&) { return std::string(R"({"move":1})"); });
    CHECK_THROWS_AS(external_decide(obs, mask, missing), Error);
  }
  SUBCASE("local mode sends a 7x7 view") {
    std::string sent;
    ExternalAgent agent(std::make_unique<CallbackTransport>([&](const std::string& line) {
                          sent = line;
                          return std::string(R"({"action":6})");
                        }),
                        ObsMode::local);
    CHECK(agent.decide(s, 0) == kPassAction);
    CHECK(tensor_from_json(parse_json_line(sent)["observation"]).shape() == std::array<int, 3>{18, 7, 7});
  }
}

TEST_CASE("echo policy over TCP plays a full game to the phase budget") {
  LinePolicyServer server(R"({"action":6})");
  const ScenarioSpec spec = generate(4, 9);
  auto blue = make_agent("external:127.0.0.1:" + std::to_string(server.port()) + ":global", 0);
  ExternalAgent red(std::make_unique<CallbackTransport>([](const std::string&) { return std::string(R"({"action":6})"); }),
                    ObsMode::local);
  const ReplayDocument doc = play_recorded(spec, *blue, red);
  CHECK(doc.reason == TerminalReason::phase_budget);
  CHECK(doc.final_score == ScoreBreakdown{});
  const int blue_units = static_cast<int>(spec.blue.size());
  CHECK(server.requests() == blue_units * spec.phase_budget / 2);
}

TEST_CASE("external policy timeout") {
  LinePolicyServer silent("");
  TcpPolicyTransport t("127.0.0.1", silent.port(), std::chrono::milliseconds(100));
  try {
    t.exchange(R"({"op":"act"})");
    FAIL("expected a timeout");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::timeout);
  }
}

TEST_CASE("agent specs") {
  CHECK_NOTHROW(validate_agent_spec("passagg"));
  CHECK_NOTHROW(validate_agent_spec("random"));
  CHECK_NOTHROW(validate_agent_spec("external:localhost:9000"));
  CHECK_NOTHROW(validate_agent_spec("external:localhost:9000:global"));
  CHECK_THROWS_AS(validate_agent_spec("greedy"), Error);
  CHECK_THROWS_AS(validate_agent_spec("external:localhost"), Error);
  CHECK_THROWS_AS(validate_agent_spec("external:localhost:0"), Error);
  CHECK_THROWS_AS(validate_agent_spec("external:localhost:9000:sideways"), Error);
  CHECK(make_agent("passagg", 1)->name() == "passagg");
  CHECK(make_agent("random", 1)->name() == "random");
  CHECK(parse_obs_mode("local") == ObsMode::local);
  CHECK(to_string(ObsMode::global) == "global");
}
