#include "hexcombat/session.hpp"

#include <algorithm>

#include "hexcombat/error.hpp"

namespace hexcombat {

void RewardConfig::validate() const {
  if (!(terminal_bonus >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "terminal bonus must be non-negative");
  }
}

double engineered_reward(double raw_delta, double current_strength, double initial_strength,
                         bool terminal, const RewardConfig& config) {
  if (!(initial_strength > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "initial strength must be positive");
  }
  const double shaped = std::max(raw_delta, 0.0) * current_strength / initial_strength;
  return shaped + (terminal ? config.terminal_bonus : 0.0);
}

Match::Match(ScenarioSpec spec, Faction side, const std::string& opponent,
             std::uint64_t opponent_seed)
    : recorder_(std::move(spec)), side_(side), opponent_(make_agent(opponent, opponent_seed)) {
  const auto& roster = side == Faction::blue ? scenario().blue : scenario().red;
  if (!roster.empty()) focus_ = roster.front().position;
  run_opponent();
}

std::optional<UnitId> Match::controlled_unit() const noexcept {
  if (terminal() || state().on_move() != side_) return std::nullopt;
  return state().on_move_unit();
}

HexCoord Match::focus() const {
  if (const auto unit = controlled_unit()) return state().find_unit(*unit)->position;
  return focus_;
}

void Match::act(ActionIndex action) {
  const auto unit = controlled_unit();
  if (!unit) throw Error(ErrorCode::invalid_state, "no controlled unit is on move");
  const LegalMask mask = legal_mask(state(), *unit);
  if (action < 0 || action >= kActionCount || !mask[static_cast<std::size_t>(action)]) {
    throw Error(ErrorCode::illegal_action, "action " + std::to_string(action) +
                                               " is not legal for unit " + std::to_string(*unit));
  }
  focus_ = state().find_unit(*unit)->position;
  recorder_.act(*unit, action);
  if (const Unit* u = state().find_unit(*unit)) focus_ = u->position;
  run_opponent();
}

void Match::run_opponent() {
  while (!terminal() && state().on_move() != side_) {
    const UnitId unit = *state().on_move_unit();
    recorder_.act(unit, opponent_->decide(state(), unit));
  }
}

const Match& EnvSession::match() const {
  if (!match_) throw Error(ErrorCode::invalid_state, "no episode has been started");
  return *match_;
}

long EnvSession::learner_score() const noexcept {
  const long blue = total_score(match_->state());
  return params_.role == Faction::blue ? blue : -blue;
}

StepResult EnvSession::reset(const EpisodeParams& params) {
  params.reward.validate();
  ScenarioSpec spec;
  if (params.scenario) {
    spec = *params.scenario;
  } else if (params.size) {
    spec = generate(*params.size, params.seed);
  } else {
    throw Error(ErrorCode::invalid_argument, "reset needs a size or a scenario");
  }
  validate_agent_spec(params.opponent);
  const auto& roster = params.role == Faction::blue ? spec.blue : spec.red;
  if (roster.empty()) throw Error(ErrorCode::invalid_argument, "learner side has no units");

  const std::uint64_t opponent_stream = params.role == Faction::blue ? 2 : 1;
  auto match = std::make_unique<Match>(spec, params.role, params.opponent,
                                       mix_seed(params.seed, opponent_stream));
  // Only commit once construction succeeded, so a bad reset leaves the session as it was.
  params_ = params;
  match_ = std::move(match);
  initial_strength_ = static_cast<int>(roster.size()) * kFullStrength;
  previous_score_ = learner_score();
  return observe(0.0, previous_score_, false);
}

StepResult EnvSession::step(ActionIndex action) {
  if (!match_) throw Error(ErrorCode::invalid_state, "no episode has been started");
  if (match_->terminal()) throw Error(ErrorCode::invalid_state, "episode is over; reset first");
  bool illegal = false;
  const UnitId unit = *match_->controlled_unit();
  const LegalMask mask = legal_mask(match_->state(), unit);
  if (action < 0 || action >= kActionCount || !mask[static_cast<std::size_t>(action)]) {
    if (params_.illegal == IllegalActionMode::error) {
      throw Error(ErrorCode::illegal_action, "action " + std::to_string(action) +
                                                 " is not legal for unit " + std::to_string(unit));
    }
    action = kPassAction;
    illegal = true;
  }
  match_->act(action);
  const long now = learner_score();
  const long raw = now - previous_score_;
  previous_score_ = now;
  const double reward =
      engineered_reward(static_cast<double>(raw), match_->state().total_strength(params_.role),
                        initial_strength_, match_->terminal(), params_.reward);
  return observe(reward, raw, illegal);
}

StepResult EnvSession::observe(double reward, long raw_delta, bool illegal) const {
  const GameState& s = match_->state();
  StepResult r;
  r.observation = build_global(s, params_.role);
  if (params_.obs_mode == ObsMode::local) {
    r.observation = localize(r.observation, match_->focus());
  }
  r.reward = reward;
  const TerminalStatus term = is_terminal(s);
  r.terminal = term.terminal;
  r.info.raw_score_delta = raw_delta;
  r.info.total_score = total_score(s);
  r.info.phase = s.phase();
  r.info.illegal = illegal;
  r.info.reason = term.reason;
  r.info.unit = match_->controlled_unit();
  if (r.info.unit) r.info.legal_mask = legal_mask(s, *r.info.unit);
  return r;
}

ReplayDocument EnvSession::record_replay(const ReplayStore* store, std::string* stored_id) const {
  if (!match_) throw Error(ErrorCode::invalid_state, "no episode has been started");
  if (!match_->terminal()) throw Error(ErrorCode::invalid_state, "episode is still in progress");
  ReplayDocument doc = match_->replay();
  if (store != nullptr) {
    const std::string id = store->put(doc);
    if (stored_id != nullptr) *stored_id = id;
  }
  return doc;
}

}  // namespace hexcombat
