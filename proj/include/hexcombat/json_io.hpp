#pragma once

// JSON encodings for the wire protocol and replay files.

#include <json.hpp>

#include "hexcombat/game.hpp"
#include "hexcombat/observation.hpp"
#include "hexcombat/scenario.hpp"

namespace hexcombat {

using Json = nlohmann::json;

void to_json(Json& j, const HexCoord& h);
void from_json(const Json& j, HexCoord& h);
void to_json(Json& j, const ScoreBreakdown& s);
void from_json(const Json& j, ScoreBreakdown& s);
void to_json(Json& j, const UnitPlacement& p);
void from_json(const Json& j, UnitPlacement& p);
void to_json(Json& j, const ScenarioSpec& spec);
void from_json(const Json& j, ScenarioSpec& spec);
void to_json(Json& j, const Event& e);
void from_json(const Json& j, Event& e);
void to_json(Json& j, const CombatConfig& c);
void from_json(const Json& j, CombatConfig& c);

Json legal_mask_json(const LegalMask& mask);

/// {"shape":[c,r,k],"data":[[[...]]]} with nested per-channel, per-row arrays.
Json tensor_to_json(const ObservationTensor& t);
ObservationTensor tensor_from_json(const Json& j);
/// {"shape":[...],"encoding":"f32le-base64","data":"..."}
Json tensor_to_json_f32le(const ObservationTensor& t);

/// Board snapshot for display clients: terrain, units, cities, score, turn.
Json state_to_json(const GameState& s);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Parses one line, raising Error{protocol} on malformed input.
Json parse_json_line(std::string_view line);

}  // namespace hexcombat
