#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "hexcombat/agents.hpp"
#include "hexcombat/observation.hpp"
#include "hexcombat/replay.hpp"
#include "hexcombat/scenario.hpp"

namespace hexcombat {

struct RewardConfig {
  double terminal_bonus = 25.0;

  void validate() const;
};

/// max(raw_delta, 0) * (current_strength / initial_strength) + bonus * [terminal]
double engineered_reward(double raw_delta, double current_strength, double initial_strength,
                         bool terminal, const RewardConfig& config = {});

/// A game between one controlling side and a scripted opponent. The opponent
/// plays its whole phase atomically whenever the move passes to it.
class Match {
 public:
  Match(ScenarioSpec spec, Faction side, const std::string& opponent, std::uint64_t opponent_seed);

  const GameState& state() const noexcept { return recorder_.state(); }
  const ScenarioSpec& scenario() const noexcept { return recorder_.scenario(); }
  Faction side() const noexcept { return side_; }
  bool terminal() const noexcept { return is_terminal(state()).terminal; }

  /// The controlling side's unit that must act next, if it is that side's turn.
  std::optional<UnitId> controlled_unit() const noexcept;
  /// Hex to centre observations on: the unit on move, else the last position
  /// a controlled unit acted from or moved to.
  HexCoord focus() const;

  /// Applies an action for controlled_unit(), then lets the opponent play
  /// until control returns or the game ends. Throws Error{illegal_action}.
  void act(ActionIndex action);

  ReplayDocument replay() const { return recorder_.document(); }

 private:
  void run_opponent();

  GameRecorder recorder_;
  Faction side_;
  std::unique_ptr<Agent> opponent_;
  HexCoord focus_;
};

enum class IllegalActionMode { error, pass };

struct EpisodeParams {
  std::optional<int> size;               // random scenario of this size, or
  std::optional<ScenarioSpec> scenario;  // an explicit one
  std::uint64_t seed = 0;
  Faction role = Faction::blue;
  ObsMode obs_mode = ObsMode::local;
  std::string opponent = "passagg";
  IllegalActionMode illegal = IllegalActionMode::error;
  RewardConfig reward;
};

struct StepInfo {
  long raw_score_delta = 0;  // learner perspective
  long total_score = 0;      // blue perspective
  LegalMask legal_mask{};
  int phase = 0;
  bool illegal = false;
  std::optional<UnitId> unit;  // unit the observation is for
  TerminalReason reason = TerminalReason::none;
};

struct StepResult {
  ObservationTensor observation;
  double reward = 0.0;
  bool terminal = false;
  StepInfo info;
};

/// Learner-facing episode: one query per friendly unit per phase.
class EnvSession {
 public:
  StepResult reset(const EpisodeParams& params);
  StepResult step(ActionIndex action);

  bool started() const noexcept { return match_ != nullptr; }
  bool terminal() const noexcept { return match_ && match_->terminal(); }
  const Match& match() const;
  const EpisodeParams& params() const noexcept { return params_; }

  /// Replay of the finished episode; stored when a store is given.
  ReplayDocument record_replay(const ReplayStore* store = nullptr,
                               std::string* stored_id = nullptr) const;

 private:
  StepResult observe(double reward, long raw_delta, bool illegal) const;
  long learner_score() const noexcept;

  EpisodeParams params_;
  std::unique_ptr<Match> match_;
  long previous_score_ = 0;
  int initial_strength_ = 0;
};

}  // namespace hexcombat
