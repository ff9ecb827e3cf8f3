#include "hexcombat/json_io.hpp"

#include <array>
#include <string>

#include "hexcombat/error.hpp"

namespace hexcombat {

void to_json(Json& j, const HexCoord& h) { j = Json{{"row", h.row}, {"col", h.col}}; }

void from_json(const Json& j, HexCoord& h) {
  h.row = j.at("row").get<int>();
  h.col = j.at("col").get<int>();
}

void to_json(Json& j, const ScoreBreakdown& s) {
  j = Json{{"blue_city", s.blue_city}, {"blue_combat", s.blue_combat},
           {"red_city", s.red_city},   {"red_combat", s.red_combat},
           {"total", s.total()}};
}

void from_json(const Json& j, ScoreBreakdown& s) {
  s.blue_city = j.at("blue_city").get<long>();
  s.blue_combat = j.at("blue_combat").get<long>();
  s.red_city = j.at("red_city").get<long>();
  s.red_combat = j.at("red_combat").get<long>();
}

void to_json(Json& j, const UnitPlacement& p) {
  j = Json{{"id", p.id}, {"type", to_string(p.type)}, {"row", p.position.row}, {"col", p.position.col}};
}

void from_json(const Json& j, UnitPlacement& p) {
  p.id = j.at("id").get<int>();
  p.type = j.contains("type") ? parse_unit_type(j.at("type").get<std::string>()) : UnitType::infantry;
  p.position = {j.at("row").get<int>(), j.at("col").get<int>()};
}

void to_json(Json& j, const ScenarioSpec& spec) {
  j = Json{{"size", spec.size},
           {"seed", spec.seed},
           {"phase_budget", spec.phase_budget},
           {"city", spec.city},
           {"blue", spec.blue},
           {"red", spec.red},
           {"first_mover", to_string(spec.first_mover)}};
  if (!spec.terrain.empty()) {
    Json terrain = Json::array();
    for (Terrain t : spec.terrain) terrain.push_back(to_string(t));
    j["terrain"] = std::move(terrain);
  }
}

void from_json(const Json& j, ScenarioSpec& spec) {
  spec.size = j.at("size").get<int>();
  spec.seed = j.value("seed", std::uint64_t{0});
  spec.phase_budget = j.value("phase_budget", 4 * spec.size);
  spec.city = j.at("city").get<HexCoord>();
  spec.blue = j.at("blue").get<std::vector<UnitPlacement>>();
  spec.red = j.at("red").get<std::vector<UnitPlacement>>();
  spec.first_mover = parse_faction(j.value("first_mover", std::string("blue")));
  spec.terrain.clear();
  if (j.contains("terrain")) {
    for (const Json& t : j.at("terrain")) spec.terrain.push_back(parse_terrain(t.get<std::string>()));
  }
}

void to_json(Json& j, const CombatConfig& c) {
  j = Json{{"attacker_fraction", c.attacker_fraction},
           {"counter_fraction", c.counter_fraction},
           {"removal_threshold", c.removal_threshold}};
}

void from_json(const Json& j, CombatConfig& c) {
  c.attacker_fraction = j.value("attacker_fraction", c.attacker_fraction);
  c.counter_fraction = j.value("counter_fraction", c.counter_fraction);
  c.removal_threshold = j.value("removal_threshold", c.removal_threshold);
}

namespace {

struct EventWriter {
  Json operator()(const MoveEvent& e) const {
    return {{"type", "move"}, {"unit", e.unit}, {"from", e.from}, {"to", e.to}};
  }
  Json operator()(const CaptureEvent& e) const {
    return {{"type", "capture"},
            {"city", e.city},
            {"faction", to_string(e.faction)},
            {"previous", to_string(e.previous)}};
  }
  Json operator()(const AttackEvent& e) const {
    return {{"type", "attack"},
            {"attacker", e.attacker},
            {"attacker_faction", to_string(e.attacker_faction)},
            {"defender", e.defender},
            {"damage", e.damage},
            {"counter_damage", e.counter_damage}};
  }
  Json operator()(const RemovalEvent& e) const {
    return {{"type", "removal"},
            {"unit", e.unit},
            {"faction", to_string(e.faction)},
            {"residual", e.residual}};
  }
  Json operator()(const PassEvent& e) const { return {{"type", "pass"}, {"unit", e.unit}}; }
  Json operator()(const PhaseEndEvent& e) const {
    return {{"type", "phase_end"},
            {"phase", e.phase},
            {"blue_city_gain", e.blue_city_gain},
            {"red_city_gain", e.red_city_gain}};
  }
};

Owner parse_owner(const std::string& s) {
  if (s == "none") return Owner::none;
  return owner_of(parse_faction(s));
}

}  // namespace

void to_json(Json& j, const Event& e) { j = std::visit(EventWriter{}, e); }

void from_json(const Json& j, Event& e) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "move") {
    e = MoveEvent{j.at("unit").get<int>(), j.at("from").get<HexCoord>(), j.at("to").get<HexCoord>()};
  } else if (type == "capture") {
    e = CaptureEvent{j.at("city").get<HexCoord>(), parse_faction(j.at("faction").get<std::string>()),
                     parse_owner(j.at("previous").get<std::string>())};
  } else if (type == "attack") {
    e = AttackEvent{j.at("attacker").get<int>(),
                    parse_faction(j.at("attacker_faction").get<std::string>()),
                    j.at("defender").get<int>(), j.at("damage").get<int>(),
                    j.at("counter_damage").get<int>()};
  } else if (type == "removal") {
    e = RemovalEvent{j.at("unit").get<int>(), parse_faction(j.at("faction").get<std::string>()),
                     j.at("residual").get<int>()};
  } else if (type == "pass") {
    e = PassEvent{j.at("unit").get<int>()};
  } else if (type == "phase_end") {
    e = PhaseEndEvent{j.at("phase").get<int>(), j.at("blue_city_gain").get<long>(),
                      j.at("red_city_gain").get<long>()};
  } else {
    throw Error(ErrorCode::invalid_argument, "unknown event type '" + type + "'");
  }
}

Json legal_mask_json(const LegalMask& mask) {
  Json out = Json::array();
  for (bool b : mask) out.push_back(b);
  return out;
}

Json tensor_to_json(const ObservationTensor& t) {
  Json data = Json::array();
  for (int c = 0; c < t.channels(); ++c) {
    Json plane = Json::array();
    for (int r = 0; r < t.rows(); ++r) {
      Json row = Json::array();
      for (int k = 0; k < t.cols(); ++k) row.push_back(t.at(c, r, k));
      plane.push_back(std::move(row));
    }
    data.push_back(std::move(plane));
  }
  return Json{{"shape", t.shape()}, {"data", std::move(data)}};
}

ObservationTensor tensor_from_json(const Json& j) {
  const auto shape = j.at("shape").get<std::array<int, 3>>();
  if (j.value("encoding", std::string("nested")) == "f32le-base64") {
    const auto bytes = base64_decode(j.at("data").get<std::string>());
    return decode_f32le(bytes, shape);
  }
  ObservationTensor t(shape[0], shape[1], shape[2]);
  const Json& data = j.at("data");
  for (int c = 0; c < shape[0]; ++c) {
    for (int r = 0; r < shape[1]; ++r) {
      for (int k = 0; k < shape[2]; ++k) t.at(c, r, k) = data.at(c).at(r).at(k).get<double>();
    }
  }
  return t;
}

Json tensor_to_json_f32le(const ObservationTensor& t) {
  return Json{{"shape", t.shape()},
              {"encoding", "f32le-base64"},
              {"data", base64_encode(encode_f32le(t))}};
}

Json state_to_json(const GameState& s) {
  const BoardDims dims = s.dims();
  Json terrain = Json::array();
  for (int r = 0; r < dims.rows; ++r) {
    Json row = Json::array();
    for (int c = 0; c < dims.cols; ++c) row.push_back(to_string(s.terrain_at({r, c})));
    terrain.push_back(std::move(row));
  }
  Json units = Json::array();
  for (const Unit& u : s.units()) {
    units.push_back({{"id", u.id},
                     {"faction", to_string(u.faction)},
                     {"type", to_string(u.type)},
                     {"strength", u.strength},
                     {"row", u.position.row},
                     {"col", u.position.col},
                     {"can_move", u.can_move}});
  }
  Json cities = Json::array();
  for (HexCoord h : s.cities()) {
    cities.push_back({{"row", h.row}, {"col", h.col}, {"owner", to_string(s.city_owner(h))}});
  }
  const auto on_move = s.on_move_unit();
  const TerminalStatus term = is_terminal(s);
  LegalMask mask{};
  if (on_move && !term.terminal) mask = legal_mask(s, *on_move);
  return Json{{"rows", dims.rows},
              {"cols", dims.cols},
              {"terrain", std::move(terrain)},
              {"units", std::move(units)},
              {"cities", std::move(cities)},
              {"phase", s.phase()},
              {"phase_budget", s.phase_budget()},
              {"on_move", {{"faction", to_string(s.on_move())},
                           {"unit", on_move && !term.terminal ? Json(*on_move) : Json(nullptr)}}},
              {"legal_mask", legal_mask_json(mask)},
              {"score", s.score()},
              {"terminal", term.terminal},
              {"reason", to_string(term.reason)}};
}

namespace {
constexpr std::string_view kBase64Alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kBase64Alphabet[(v >> 18) & 63];
    out += kBase64Alphabet[(v >> 12) & 63];
    out += kBase64Alphabet[(v >> 6) & 63];
    out += kBase64Alphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out += kBase64Alphabet[(v >> 18) & 63];
    out += kBase64Alphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kBase64Alphabet[(v >> 18) & 63];
    out += kBase64Alphabet[(v >> 12) & 63];
    out += kBase64Alphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::array<int, 256> lookup;
  lookup.fill(-1);
  for (std::size_t i = 0; i < kBase64Alphabet.size(); ++i) {
    lookup[static_cast<unsigned char>(kBase64Alphabet[i])] = static_cast<int>(i);
  }
  if (text.size() % 4 != 0) throw Error(ErrorCode::invalid_argument, "bad base64 length");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::uint32_t v = 0;
    int pad = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const char ch = text[i + k];
      int d = 0;
      if (ch == '=') {
        ++pad;
      } else {
        d = lookup[static_cast<unsigned char>(ch)];
        if (d < 0 || pad > 0) throw Error(ErrorCode::invalid_argument, "bad base64 character");
      }
      v = (v << 6) | static_cast<std::uint32_t>(d);
    }
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(v >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

Json parse_json_line(std::string_view line) {
  Json j = Json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::protocol, "malformed JSON");
  return j;
}

}  // namespace hexcombat
