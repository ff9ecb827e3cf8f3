#include "hexcombat/agents.hpp"

#include <algorithm>
#include <charconv>

#include "hexcombat/error.hpp"
#include "hexcombat/json_io.hpp"
#include "net.hpp"

namespace hexcombat {

Posture posture_of(const GameState& s, Faction f) noexcept {
  return s.total_strength(f) >= s.total_strength(other(f)) ? Posture::attack : Posture::defend;
}

namespace {

std::vector<bool> passable_cells(const GameState& s) {
  std::vector<bool> passable(s.dims().area());
  for (std::size_t i = 0; i < passable.size(); ++i) {
    passable[i] = s.terrain()[i] != Terrain::water;
  }
  return passable;
}

std::vector<int> distances_from(const GameState& s, const std::vector<HexCoord>& sources,
                                const std::vector<bool>& passable) {
  if (sources.empty()) return std::vector<int>(s.dims().area(), 0);
  auto dist = path_distances(s.dims(), sources, passable);
  const int unreachable = static_cast<int>(s.dims().area());
  for (int& d : dist) {
    if (d == kUnreachable) d = unreachable;
  }
  return dist;
}

std::vector<HexCoord> relevant_cities(const GameState& s, Faction f) {
  const std::vector<HexCoord> all = s.cities();
  std::vector<HexCoord> contested;
  for (HexCoord h : all) {
    if (s.city_owner(h) != owner_of(f)) contested.push_back(h);
  }
  return contested.empty() ? all : contested;
}

std::vector<HexCoord> enemy_positions(const GameState& s, Faction f) {
  std::vector<HexCoord> out;
  for (const Unit& u : s.units()) {
    if (u.faction != f) out.push_back(u.position);
  }
  return out;
}

}  // namespace

double passagg_hex_score(const GameState& s, HexCoord h, Posture posture,
                         const std::vector<int>& city_dist, const std::vector<int>& enemy_dist,
                         const HexScoreWeights& w) {
  const std::size_t i = s.dims().index(h);
  const double sign = posture == Posture::attack ? 1.0 : -1.0;
  return -w.city_weight * city_dist[i] + sign * (-w.enemy_weight * enemy_dist[i]);
}

PassAggPlan passagg_plan(const GameState& s, UnitId id, const HexScoreWeights& w) {
  const LegalMask mask = legal_mask(s, id);
  const Unit& u = *s.find_unit(id);
  PassAggPlan plan;
  plan.posture = posture_of(s, u.faction);

  for (Direction d : kAllDirections) {
    if (!mask[static_cast<std::size_t>(d)]) continue;
    const Unit* occupant = s.unit_at(step(u.position, d));
    if (occupant != nullptr && occupant->faction != u.faction) {
      plan.attacks.push_back(static_cast<ActionIndex>(d));
    }
  }
  if (!plan.attacks.empty()) return plan;

  const auto passable = passable_cells(s);
  const auto city_dist = distances_from(s, relevant_cities(s, u.faction), passable);
  const auto enemy_dist = distances_from(s, enemy_positions(s, u.faction), passable);

  plan.best_score = passagg_hex_score(s, u.position, plan.posture, city_dist,
                                      enemy_dist, w);
  plan.best = {kPassAction};
  bool stay_is_best = true;
  for (Direction d : kAllDirections) {
    if (!mask[static_cast<std::size_t>(d)]) continue;
    const double score = passagg_hex_score(s, step(u.position, d), plan.posture,
                                           city_dist, enemy_dist, w);
    if (score > plan.best_score) {
      plan.best_score = score;
      plan.best = {static_cast<ActionIndex>(d)};
      stay_is_best = false;
    } else if (score == plan.best_score && !stay_is_best) {
      plan.best.push_back(static_cast<ActionIndex>(d));
    }
  }
  return plan;
}

ActionIndex passagg_decide(const GameState& s, UnitId unit, Rng& rng, const HexScoreWeights& w) {
  const PassAggPlan plan = passagg_plan(s, unit, w);
  if (!plan.attacks.empty()) return plan.attacks[rng.below(plan.attacks.size())];
  if (plan.best.size() == 1) return plan.best.front();
  return plan.best[rng.below(plan.best.size())];
}

ActionIndex random_decide(const GameState& s, UnitId unit, Rng& rng) {
  const auto actions = legal_actions(s, unit);
  return actions[rng.below(actions.size())];
}

namespace {

std::string mask_text(const LegalMask& mask) {
  std::string out = "[";
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (i) out += ",";
    out += mask[i] ? "1" : "0";
  }
  return out + "]";
}

}  // namespace

IllegalRemoteAction::IllegalRemoteAction(ActionIndex action, const LegalMask& mask)
    : Error(ErrorCode::protocol, "remote policy chose illegal action " + std::to_string(action) +
                                     "; legal mask " + mask_text(mask)),
      action_(action),
      mask_(mask) {}

TcpPolicyTransport::TcpPolicyTransport(const std::string& host, int port,
                                       std::chrono::milliseconds timeout)
    : fd_(net::connect_tcp(host, port).release()), timeout_(timeout) {}

TcpPolicyTransport::~TcpPolicyTransport() { net::Socket closer(fd_); }

std::string TcpPolicyTransport::exchange(const std::string& line) {
  net::write_all(fd_, line + "\n");
  auto reply = net::read_line(fd_, buffer_, timeout_);
  if (!reply) throw Error(ErrorCode::io, "policy server closed the connection");
  return *reply;
}

ActionIndex external_decide(const ObservationTensor& obs, const LegalMask& mask,
                            PolicyTransport& session) {
  const Json request{{"op", "act"}, {"observation", tensor_to_json(obs)},
                     {"legal_mask", legal_mask_json(mask)}};
  const Json reply = parse_json_line(session.exchange(request.dump()));
  if (!reply.is_object() || !reply.contains("action") || !reply.at("action").is_number_integer()) {
    throw Error(ErrorCode::protocol, "policy reply lacks an integer 'action'");
  }
  const auto action = reply.at("action").get<long long>();
  if (action < 0 || action >= kActionCount || !mask[static_cast<std::size_t>(action)]) {
    throw IllegalRemoteAction(static_cast<ActionIndex>(action), mask);
  }
  return static_cast<ActionIndex>(action);
}

std::string_view to_string(ObsMode m) noexcept { return m == ObsMode::global ? "global" : "local"; }

ObsMode parse_obs_mode(std::string_view s) {
  if (s == "global") return ObsMode::global;
  if (s == "local") return ObsMode::local;
  throw Error(ErrorCode::invalid_argument, "unknown observation mode '" + std::string(s) + "'");
}

ActionIndex ExternalAgent::decide(const GameState& s, UnitId unit) {
  const Unit* u = s.find_unit(unit);
  if (u == nullptr) throw Error(ErrorCode::invalid_argument, "unknown unit " + std::to_string(unit));
  const LegalMask mask = legal_mask(s, unit);
  ObservationTensor obs = build_global(s, u->faction);
  if (mode_ == ObsMode::local) obs = localize(obs, u->position);
  return external_decide(obs, mask, *transport_);
}

namespace {

struct ExternalSpec {
  std::string host;
  int port = 0;
  ObsMode mode = ObsMode::local;
};

ExternalSpec parse_external(std::string_view spec) {
  // external:HOST:PORT[:mode]
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = spec.find(':', start);
    parts.push_back(spec.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() < 3 || parts.size() > 4 || parts[0] != "external") {
    throw Error(ErrorCode::invalid_argument, "expected external:HOST:PORT[:local|global]");
  }
  ExternalSpec out;
  out.host = std::string(parts[1]);
  const auto [ptr, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), out.port);
  if (ec != std::errc{} || ptr != parts[2].data() + parts[2].size() || out.port <= 0 ||
      out.port > 65535) {
    throw Error(ErrorCode::invalid_argument, "bad port in agent spec '" + std::string(spec) + "'");
  }
  if (parts.size() == 4) out.mode = parse_obs_mode(parts[3]);
  return out;
}

}  // namespace

void validate_agent_spec(std::string_view spec) {
  if (spec == "passagg" || spec == "random") return;
  if (spec.starts_with("external:")) {
    parse_external(spec);
    return;
  }
  throw Error(ErrorCode::invalid_argument, "unknown agent '" + std::string(spec) + "'");
}

std::unique_ptr<Agent> make_agent(std::string_view spec, std::uint64_t seed,
                                  std::chrono::milliseconds external_timeout) {
  if (spec == "passagg") return std::make_unique<PassAggAgent>(seed);
  if (spec == "random") return std::make_unique<RandomAgent>(seed);
  if (spec.starts_with("external:")) {
    const ExternalSpec ext = parse_external(spec);
    return std::make_unique<ExternalAgent>(std::make_unique<TcpPolicyTransport>(ext.host, ext.port, external_timeout),
                                           ext.mode);
  }
  throw Error(ErrorCode::invalid_argument, "unknown agent '" + std::string(spec) + "'");
}

}  // namespace hexcombat
