#include "hexcombat/replay.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "hexcombat/error.hpp"

namespace hexcombat {

namespace {

TerminalReason parse_reason(const std::string& s) {
  for (auto r : {TerminalReason::none, TerminalReason::phase_budget, TerminalReason::blue_eliminated,
                 TerminalReason::red_eliminated}) {
    if (to_string(r) == s) return r;
  }
  throw Error(ErrorCode::invalid_argument, "unknown terminal reason '" + s + "'");
}

}  // namespace

void to_json(Json& j, const ReplayDocument& doc) {
  Json steps = Json::array();
  for (const ReplayStep& s : doc.steps) {
    steps.push_back(
        {{"phase", s.phase}, {"unit", s.unit}, {"action", s.action}, {"events", s.events}});
  }
  Json trace = Json::array();
  for (const PhaseScore& p : doc.phase_scores) {
    trace.push_back({{"phase", p.phase}, {"score", p.score}});
  }
  j = Json{{"version", doc.version},       {"scenario", doc.scenario},
           {"combat", doc.combat},         {"steps", std::move(steps)},
           {"phase_scores", std::move(trace)}, {"final_score", doc.final_score},
           {"reason", to_string(doc.reason)}};
}

void from_json(const Json& j, ReplayDocument& doc) {
  doc.version = j.at("version").get<int>();
  if (doc.version != kReplayVersion) {
    throw Error(ErrorCode::invalid_argument,
                "unsupported replay version " + std::to_string(doc.version));
  }
  doc.scenario = j.at("scenario").get<ScenarioSpec>();
  doc.combat = j.value("combat", CombatConfig{});
  doc.steps.clear();
  for (const Json& s : j.at("steps")) {
    doc.steps.push_back({s.at("phase").get<int>(), s.at("unit").get<int>(),
                         s.at("action").get<int>(), s.at("events").get<std::vector<Event>>()});
  }
  doc.phase_scores.clear();
  for (const Json& p : j.at("phase_scores")) {
    doc.phase_scores.push_back({p.at("phase").get<int>(), p.at("score").get<ScoreBreakdown>()});
  }
  doc.final_score = j.at("final_score").get<ScoreBreakdown>();
  doc.reason = parse_reason(j.at("reason").get<std::string>());
}

GameRecorder::GameRecorder(ScenarioSpec spec, CombatConfig combat)
    : spec_(std::move(spec)), combat_(combat), state_(instantiate(spec_, combat_)) {}

std::vector<Event> GameRecorder::act(UnitId unit, ActionIndex action) {
  const int phase = state_.phase();
  Transition t = apply_action(std::move(state_), unit, action);
  state_ = std::move(t.state);
  if (close_phase_if_complete(state_, &t.events)) {
    phase_scores_.push_back({phase, state_.score()});
  }
  steps_.push_back({phase, unit, action, t.events});
  return std::move(t.events);
}

ReplayDocument GameRecorder::document() const {
  const TerminalStatus term = is_terminal(state_);
  if (!term.terminal) throw Error(ErrorCode::invalid_state, "game is still in progress");
  return {kReplayVersion, spec_, combat_, steps_, phase_scores_, state_.score(), term.reason};
}

ReplayCheck verify_replay(const ReplayDocument& doc) {
  try {
    GameRecorder rec(doc.scenario, doc.combat);
    for (std::size_t i = 0; i < doc.steps.size(); ++i) {
      const ReplayStep& step = doc.steps[i];
      const std::string where = "step " + std::to_string(i) + ": ";
      if (rec.state().phase() != step.phase) {
        return {false, where + "recorded phase " + std::to_string(step.phase) + ", simulated " +
                           std::to_string(rec.state().phase())};
      }
      const auto events = rec.act(step.unit, step.action);
      if (Json(events) != Json(step.events)) {
        return {false, where + "event log differs from re-simulation"};
      }
    }
    const ReplayDocument again = rec.document();
    const bool same_trace = std::equal(
        again.phase_scores.begin(), again.phase_scores.end(), doc.phase_scores.begin(),
        doc.phase_scores.end(), [](const PhaseScore& a, const PhaseScore& b) {
          return a.phase == b.phase && a.score == b.score;
        });
    if (!same_trace) return {false, "per-phase score trace differs from re-simulation"};
    if (again.final_score != doc.final_score) {
      return {false, "final score " + std::to_string(doc.final_score.total()) +
                         " differs from re-simulated " + std::to_string(again.final_score.total())};
    }
    if (again.reason != doc.reason) return {false, "terminal reason differs"};
  } catch (const Error& e) {
    return {false, std::string("re-simulation failed: ") + e.what()};
  }
  return {};
}

std::vector<GameState> replay_states(const ReplayDocument& doc) {
  GameRecorder rec(doc.scenario, doc.combat);
  std::vector<GameState> out{rec.state()};
  for (const ReplayStep& step : doc.steps) {
    rec.act(step.unit, step.action);
    out.push_back(rec.state());
  }
  return out;
}

std::string replay_id(const ReplayDocument& doc) {
  const std::string text = Json(doc).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ReplayStore::ReplayStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create replay directory " + dir_.string());
}

std::string ReplayStore::put(const ReplayDocument& doc) const {
  static std::atomic<unsigned long> counter{0};
  const std::string id = replay_id(doc);
  const auto final_path = dir_ / (id + ".json");
  if (std::filesystem::exists(final_path)) return id;
  std::ostringstream tmp_name;
  tmp_name << "." << id << "." << std::this_thread::get_id() << "." << counter++ << ".tmp";
  const auto tmp_path = dir_ / tmp_name.str();
  {
    std::ofstream out(tmp_path, std::ios::binary);
    out << Json(doc).dump() << '\n';
    if (!out) throw Error(ErrorCode::io, "cannot write " + tmp_path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp_path, final_path, ec);
  if (ec) {
    std::filesystem::remove(tmp_path, ec);
    throw Error(ErrorCode::io, "cannot store replay " + id);
  }
  return id;
}

std::optional<ReplayDocument> ReplayStore::get(const std::string& id) const {
  if (id.size() != 16 || !std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
      })) {
    return std::nullopt;
  }
  std::ifstream in(dir_ / (id + ".json"), std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  const Json j = parse_json_line(buf.str());
  return j.get<ReplayDocument>();
}

std::vector<std::string> ReplayStore::list() const {
  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    const auto name = entry.path().filename().string();
    if (name.size() == 21 && name.ends_with(".json") && name[0] != '.') {
      ids.push_back(name.substr(0, 16));
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace hexcombat
