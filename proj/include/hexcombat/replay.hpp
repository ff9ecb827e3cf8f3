#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hexcombat/game.hpp"
#include "hexcombat/json_io.hpp"
#include "hexcombat/scenario.hpp"

namespace hexcombat {

inline constexpr int kReplayVersion = 1;

/// One action, plus everything it caused (including a phase close it triggered).
struct ReplayStep {
  int phase = 0;
  UnitId unit = 0;
  ActionIndex action = kPassAction;
  std::vector<Event> events;
};

struct PhaseScore {
  int phase = 0;  // phase that just ended
  ScoreBreakdown score;
};

struct ReplayDocument {
  int version = kReplayVersion;
  ScenarioSpec scenario;
  CombatConfig combat;
  std::vector<ReplayStep> steps;
  std::vector<PhaseScore> phase_scores;
  ScoreBreakdown final_score;
  TerminalReason reason = TerminalReason::none;
};

void to_json(Json& j, const ReplayDocument& doc);
void from_json(const Json& j, ReplayDocument& doc);

/// Drives a game from a scenario while logging a replay. Phases close
/// automatically once every unit of the moving faction has acted.
class GameRecorder {
 public:
  explicit GameRecorder(ScenarioSpec spec, CombatConfig combat = {});

  const GameState& state() const noexcept { return state_; }
  const ScenarioSpec& scenario() const noexcept { return spec_; }
  std::vector<Event> act(UnitId unit, ActionIndex action);

  /// Requires a finished game.
  ReplayDocument document() const;

 private:
  ScenarioSpec spec_;
  CombatConfig combat_;
  GameState state_;
  std::vector<ReplayStep> steps_;
  std::vector<PhaseScore> phase_scores_;
};

struct ReplayCheck {
  bool ok = true;
  std::string message;
};

/// Re-simulates the document and compares events, score trace and final score.
ReplayCheck verify_replay(const ReplayDocument& doc);

/// Board states before the first action and after each step.
std::vector<GameState> replay_states(const ReplayDocument& doc);

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
std::string replay_id(const ReplayDocument& doc);

/// One JSON file per game, named by content hash. Writes go through a
/// temporary file and rename, so concurrent writers never expose partial files.
class ReplayStore {
 public:
  explicit ReplayStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::string put(const ReplayDocument& doc) const;
  std::optional<ReplayDocument> get(const std::string& id) const;
  std::vector<std::string> list() const;

 private:
  std::filesystem::path dir_;
};

}  // namespace hexcombat
