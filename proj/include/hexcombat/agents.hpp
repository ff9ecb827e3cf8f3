#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hexcombat/error.hpp"
#include "hexcombat/game.hpp"
#include "hexcombat/observation.hpp"
#include "hexcombat/rng.hpp"

namespace hexcombat {

enum class Posture { attack, defend };

struct HexScoreWeights {
  double city_weight = 1.0;
  double enemy_weight = 0.5;
};

/// Everything Pass-Agg considers before the random tie-break.
struct PassAggPlan {
  Posture posture = Posture::attack;
  /// Attack actions against adjacent enemies; when non-empty one is chosen.
  std::vector<ActionIndex> attacks;
  /// Best-scoring candidates (move actions, or pass for staying put).
  std::vector<ActionIndex> best;
  double best_score = 0.0;
};

Posture posture_of(const GameState& s, Faction f) noexcept;

/// Pass-Agg's value for standing on h:
///   -city_weight * d_city(h) + sign * (-enemy_weight * d_enemy(h))
/// with sign +1 when attacking and -1 when defending; distances are hex steps
/// to the nearest contested city and the nearest enemy.
double passagg_hex_score(const GameState& s, HexCoord h, Posture posture,
                         const std::vector<int>& city_dist, const std::vector<int>& enemy_dist,
                         const HexScoreWeights& w);

PassAggPlan passagg_plan(const GameState& s, UnitId unit, const HexScoreWeights& w = {});

/// Attacks an adjacent enemy if any (uniform choice), otherwise moves to the
/// best-scoring hex (uniform tie-break) or passes when staying put is best.
ActionIndex passagg_decide(const GameState& s, UnitId unit, Rng& rng,
                           const HexScoreWeights& w = {});

/// Uniform choice among the legal actions.
ActionIndex random_decide(const GameState& s, UnitId unit, Rng& rng);

/// Line-oriented request/reply channel to a remote policy.
class PolicyTransport {
 public:
  virtual ~PolicyTransport() = default;
  /// Sends one JSON line (no trailing newline) and returns the reply line.
  virtual std::string exchange(const std::string& line) = 0;
};

/// In-process transport, mostly for tests.
class CallbackTransport final : public PolicyTransport {
 public:
  explicit CallbackTransport(std::function<std::string(const std::string&)> fn)
      : fn_(std::move(fn)) {}
  std::string exchange(const std::string& line) override { return fn_(line); }

 private:
  std::function<std::string(const std::string&)> fn_;
};

/// JSON-lines over TCP. Throws Error{timeout} when a reply takes too long.
class TcpPolicyTransport final : public PolicyTransport {
 public:
  TcpPolicyTransport(const std::string& host, int port,
                     std::chrono::milliseconds timeout = std::chrono::seconds(30));
  ~TcpPolicyTransport() override;
  TcpPolicyTransport(const TcpPolicyTransport&) = delete;
  TcpPolicyTransport& operator=(const TcpPolicyTransport&) = delete;

  std::string exchange(const std::string& line) override;

 private:
  int fd_ = -1;
  std::chrono::milliseconds timeout_;
  std::string buffer_;
};

/// Raised when a remote policy answers with an action outside the legal mask.
class IllegalRemoteAction : public Error {
 public:
  IllegalRemoteAction(ActionIndex action, const LegalMask& mask);
  ActionIndex action() const noexcept { return action_; }
  const LegalMask& legal_mask() const noexcept { return mask_; }

 private:
  ActionIndex action_;
  LegalMask mask_;
};

/// Sends {"op":"act", observation, legal_mask, ...} and validates the reply.
ActionIndex external_decide(const ObservationTensor& obs, const LegalMask& mask,
                            PolicyTransport& session);

/// Common interface for anything that can pick an action for the on-move unit.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual ActionIndex decide(const GameState& s, UnitId unit) = 0;
  virtual std::string name() const = 0;
};

class PassAggAgent final : public Agent {
 public:
  explicit PassAggAgent(std::uint64_t seed, HexScoreWeights w = {}) : rng_(seed), weights_(w) {}
  ActionIndex decide(const GameState& s, UnitId unit) override {
    return passagg_decide(s, unit, rng_, weights_);
  }
  std::string name() const override { return "passagg"; }

 private:
  Rng rng_;
  HexScoreWeights weights_;
};

class RandomAgent final : public Agent {
 public:
  explicit RandomAgent(std::uint64_t seed) : rng_(seed) {}
  ActionIndex decide(const GameState& s, UnitId unit) override {
    return random_decide(s, unit, rng_);
  }
  std::string name() const override { return "random"; }

 private:
  Rng rng_;
};

enum class ObsMode { global, local };
std::string_view to_string(ObsMode m) noexcept;
ObsMode parse_obs_mode(std::string_view s);

class ExternalAgent final : public Agent {
 public:
  ExternalAgent(std::unique_ptr<PolicyTransport> transport, ObsMode mode)
      : transport_(std::move(transport)), mode_(mode) {}
  ActionIndex decide(const GameState& s, UnitId unit) override;
  std::string name() const override { return "external"; }

 private:
  std::unique_ptr<PolicyTransport> transport_;
  ObsMode mode_;
};

/// Builds an agent from "passagg", "random" or "external:HOST:PORT[:local|global]".
std::unique_ptr<Agent> make_agent(std::string_view spec, std::uint64_t seed,
                                  std::chrono::milliseconds external_timeout = std::chrono::seconds(30));
/// Throws if the spec string is not recognised.
void validate_agent_spec(std::string_view spec);

}  // namespace hexcombat
