#include "hexcombat/eval.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "hexcombat/error.hpp"

namespace hexcombat {

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "standard deviation needs at least 2 values");
  }
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

double sem(std::span<const double> values) {
  return sample_stddev(values) / std::sqrt(static_cast<double>(values.size()));
}

long play_scenario(const ScenarioSpec& spec, Agent& blue, Agent& red) {
  GameState s = instantiate(spec);
  while (!is_terminal(s).terminal) {
    if (close_phase_if_complete(s)) continue;
    const UnitId unit = *s.on_move_unit();
    Agent& agent = s.on_move() == Faction::blue ? blue : red;
    const ActionIndex action = agent.decide(s, unit);
    s = apply_action(std::move(s), unit, action).state;
  }
  return total_score(s);
}

ReplayDocument play_recorded(const ScenarioSpec& spec, Agent& blue, Agent& red) {
  GameRecorder rec(spec);
  while (!is_terminal(rec.state()).terminal) {
    const GameState& s = rec.state();
    const UnitId unit = *s.on_move_unit();
    Agent& agent = s.on_move() == Faction::blue ? blue : red;
    rec.act(unit, agent.decide(s, unit));
  }
  return rec.document();
}

LevelReport run_matchup(const MatchupConfig& config) {
  if (config.games < 1) throw Error(ErrorCode::invalid_argument, "games must be at least 1");
  validate_agent_spec(config.blue);
  validate_agent_spec(config.red);

  struct Outcome {
    bool ok = false;
    long score = 0;
    std::string error;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(config.games));
  std::optional<ReplayStore> store;
  if (config.replay_dir) store.emplace(*config.replay_dir);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < config.games; i = next++) {
      Outcome& out = outcomes[static_cast<std::size_t>(i)];
      const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(i);
      try {
        const ScenarioSpec spec = generate(config.size, seed);
        auto blue = make_agent(config.blue, mix_seed(seed, 1), config.external_timeout);
        auto red = make_agent(config.red, mix_seed(seed, 2), config.external_timeout);
        if (store) {
          const ReplayDocument doc = play_recorded(spec, *blue, *red);
          store->put(doc);
          out.score = doc.final_score.total();
        } else {
          out.score = play_scenario(spec, *blue, *red);
        }
        out.ok = true;
      } catch (const std::exception& e) {
        out.error = "game " + std::to_string(i) + " (seed " + std::to_string(seed) + "): " + e.what();
      }
    }
  };

  unsigned workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(config.games));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  LevelReport report;
  report.size = config.size;
  std::vector<double> scores;
  for (const Outcome& o : outcomes) {
    if (o.ok) {
      report.raw_scores.push_back(o.score);
      scores.push_back(static_cast<double>(o.score));
    } else {
      ++report.failures;
      report.failure_messages.push_back(o.error);
    }
  }
  if (report.failures > 0 && !config.allow_failures) {
    throw Error(ErrorCode::internal, std::to_string(report.failures) + " of " +
                                         std::to_string(config.games) +
                                         " games failed; first: " + report.failure_messages.front());
  }
  report.games = static_cast<int>(scores.size());
  if (!scores.empty()) {
    report.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
  }
  if (scores.size() >= 2) {
    report.stddev = sample_stddev(scores);
    report.sem = report.stddev / std::sqrt(static_cast<double>(scores.size()));
  }
  return report;
}

double normalize(double mean, const LevelReport& baseline) {
  if (baseline.games < 2) {
    throw Error(ErrorCode::invalid_argument, "baseline needs at least 2 games");
  }
  if (baseline.stddev == 0.0) {
    throw Error(ErrorCode::invalid_argument, "baseline standard deviation is zero");
  }
  return (mean - baseline.mean) / baseline.stddev;
}

EvalReport run_eval(const EvalConfig& config) {
  if (config.sizes.empty()) throw Error(ErrorCode::invalid_argument, "no board sizes given");
  EvalReport report;
  report.blue = config.blue;
  report.red = config.red;
  report.base_seed = config.base_seed;
  report.baseline_blue = config.baseline_blue;

  auto matchup = [&](const std::string& blue, int size) {
    MatchupConfig m;
    m.blue = blue;
    m.red = config.red;
    m.size = size;
    m.games = config.games;
    m.base_seed = config.base_seed;
    m.workers = config.workers;
    m.allow_failures = config.allow_failures;
    m.replay_dir = config.replay_dir;
    m.external_timeout = config.external_timeout;
    return run_matchup(m);
  };

  for (int size : config.sizes) {
    LevelReport level = matchup(config.blue, size);
    if (config.baseline_blue) {
      LevelReport base = *config.baseline_blue == config.blue ? level : matchup(*config.baseline_blue, size);
      level.normalized_mean = normalize(level.mean, base);
      report.baseline_levels.push_back(std::move(base));
    }
    report.levels.push_back(std::move(level));
  }
  return report;
}

namespace {

Json level_to_json(const LevelReport& l) {
  Json j{{"size", l.size},     {"games", l.games},   {"failures", l.failures},
         {"mean", l.mean},     {"stddev", l.stddev}, {"sem", l.sem},
         {"raw_scores", l.raw_scores}};
  j["normalized_mean"] = l.normalized_mean ? Json(*l.normalized_mean) : Json(nullptr);
  if (!l.failure_messages.empty()) j["failure_messages"] = l.failure_messages;
  return j;
}

}  // namespace

Json report_to_json(const EvalReport& report) {
  Json levels = Json::array();
  for (const LevelReport& l : report.levels) levels.push_back(level_to_json(l));
  Json j{{"matchup", {{"blue", report.blue}, {"red", report.red}}},
         {"base_seed", report.base_seed},
         {"levels", std::move(levels)}};
  if (report.baseline_blue) {
    Json base = Json::array();
    for (const LevelReport& l : report.baseline_levels) {
      Json b = level_to_json(l);
      b.erase("normalized_mean");
      base.push_back(std::move(b));
    }
    j["baseline"] = {{"matchup", {{"blue", *report.baseline_blue}, {"red", report.red}}},
                     {"levels", std::move(base)}};
  } else {
    j["baseline"] = nullptr;
  }
  return j;
}

std::string report_to_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "size,games,mean,sem,normalized_mean\n";
  out << std::setprecision(10);
  for (const LevelReport& l : report.levels) {
    out << l.size << ',' << l.games << ',' << l.mean << ',' << l.sem << ',';
    if (l.normalized_mean) out << *l.normalized_mean;
    out << '\n';
  }
  return out.str();
}

std::vector<int> parse_sizes(std::string_view text) {
  auto to_int = [&](std::string_view part) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size()) {
      throw Error(ErrorCode::invalid_argument, "bad size list '" + std::string(text) + "'");
    }
    if (v < kMinBoardSize || v > kMaxBoardSize) {
      throw Error(ErrorCode::invalid_argument, "board size " + std::to_string(v) + " outside [3, 12]");
    }
    return v;
  };
  std::vector<int> out;
  if (const auto dots = text.find(".."); dots != std::string_view::npos) {
    const int lo = to_int(text.substr(0, dots));
    const int hi = to_int(text.substr(dots + 2));
    if (lo > hi) throw Error(ErrorCode::invalid_argument, "empty size range");
    for (int n = lo; n <= hi; ++n) out.push_back(n);
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    out.push_back(to_int(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace hexcombat
