#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hexcombat/agents.hpp"
#include "hexcombat/json_io.hpp"
#include "hexcombat/replay.hpp"
#include "hexcombat/scenario.hpp"

namespace hexcombat {

/// Sample standard deviation (n - 1 denominator). Needs at least 2 values.
double sample_stddev(std::span<const double> values);
/// Standard error of the mean, sample_stddev / sqrt(n).
double sem(std::span<const double> values);

/// Plays one game to the end. Returns the final blue-perspective score.
long play_scenario(const ScenarioSpec& spec, Agent& blue, Agent& red);
ReplayDocument play_recorded(const ScenarioSpec& spec, Agent& blue, Agent& red);

struct MatchupConfig {
  std::string blue = "passagg";
  std::string red = "passagg";
  int size = 5;
  int games = 1000;
  std::uint64_t base_seed = 0;
  unsigned workers = 0;  // 0: hardware concurrency
  bool allow_failures = false;
  std::optional<std::filesystem::path> replay_dir;
  std::chrono::milliseconds external_timeout = std::chrono::seconds(30);
};

struct LevelReport {
  int size = 0;
  int games = 0;     // successful games
  int failures = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double sem = 0.0;
  std::optional<double> normalized_mean;
  std::vector<long> raw_scores;  // by game index; failed games omitted
  std::vector<std::string> failure_messages;
};

/// Game i uses seed base_seed + i. Results are merged by index, so they do
/// not depend on the number of workers. Throws if any game fails unless
/// allow_failures is set.
LevelReport run_matchup(const MatchupConfig& config);

/// (mean - baseline mean) / baseline standard deviation.
double normalize(double mean, const LevelReport& baseline);

struct EvalConfig {
  std::string blue = "passagg";
  std::string red = "passagg";
  std::vector<int> sizes;
  int games = 1000;
  std::uint64_t base_seed = 0;
  /// Blue agent of the normalization baseline (played against the same red).
  std::optional<std::string> baseline_blue = "random";
  unsigned workers = 0;
  bool allow_failures = false;
  std::optional<std::filesystem::path> replay_dir;
  std::chrono::milliseconds external_timeout = std::chrono::seconds(30);
};

struct EvalReport {
  std::string blue;
  std::string red;
  std::uint64_t base_seed = 0;
  std::optional<std::string> baseline_blue;
  std::vector<LevelReport> levels;
  std::vector<LevelReport> baseline_levels;
};

EvalReport run_eval(const EvalConfig& config);

Json report_to_json(const EvalReport& report);
/// Columns: size,games,mean,sem,normalized_mean
std::string report_to_csv(const EvalReport& report);

/// Parses "3..12", "5" or "3,5,7".
std::vector<int> parse_sizes(std::string_view text);

}  // namespace hexcombat
