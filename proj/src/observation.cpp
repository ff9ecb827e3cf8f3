#include "hexcombat/observation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include "hexcombat/error.hpp"

namespace hexcombat {

ObservationTensor build_global(const GameState& s, Faction perspective,
                               const GlobalObsConfig& config) {
  const BoardDims dims = s.dims();
  ObservationTensor t(kChannels, dims.rows, dims.cols);

  const auto on_move = s.on_move_unit();
  if (on_move && s.on_move() == perspective) {
    const Unit& u = *s.find_unit(*on_move);
    t.at(channel::on_move, u.position.row, u.position.col) = 1.0;
    const LegalMask mask = legal_mask(s, u.id);
    for (Direction d : kAllDirections) {
      if (!mask[static_cast<std::size_t>(d)]) continue;
      const HexCoord n = step(u.position, d);
      t.at(channel::legal_targets, n.row, n.col) = 1.0;
    }
  }

  for (const Unit& u : s.units()) {
    const int r = u.position.row;
    const int c = u.position.col;
    const bool friendly = u.faction == perspective;
    if (friendly && u.can_move && s.on_move() == perspective) t.at(channel::movable, r, c) = 1.0;
    t.at(friendly ? channel::friendly_health : channel::enemy_health, r, c) =
        static_cast<double>(u.strength) / kFullStrength;
    t.at(channel::unit_type_first + static_cast<int>(u.type), r, c) = 1.0;
  }

  const double phase_value =
      static_cast<double>(s.phase()) / static_cast<double>(s.phase_budget());
  double score_value = std::clamp(static_cast<double>(total_score(s)) / config.score_scale, -1.0, 1.0);
  if (perspective == Faction::red) score_value = -score_value;
  const Owner friendly_owner = owner_of(perspective);

  for (int r = 0; r < dims.rows; ++r) {
    for (int c = 0; c < dims.cols; ++c) {
      const HexCoord h{r, c};
      t.at(channel::terrain_first + static_cast<int>(s.terrain_at(h)), r, c) = 1.0;
      const Owner o = s.city_owner(h);
      if (o != Owner::none) {
        t.at(o == friendly_owner ? channel::friendly_city : channel::enemy_city, r, c) = 1.0;
      }
      t.at(channel::phase_fraction, r, c) = phase_value;
      t.at(channel::score, r, c) = score_value;
    }
  }
  return t;
}

void DecayParams::validate() const {
  if (!(0.0 <= inner_radius && inner_radius < mid_radius && mid_radius < far_radius)) {
    throw Error(ErrorCode::invalid_argument, "decay radii must satisfy 0 <= inner < mid < far");
  }
  if (!(0.0 < far_floor && far_floor < mid_floor && mid_floor < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "decay floors must satisfy 0 < far < mid < 1");
  }
  if (!(near_drop >= 0.0 && far_drop >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "decay slopes must be non-negative");
  }
}

double decay_weight(double d, const DecayParams& p) {
  if (!(d >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "decay distance must be non-negative");
  }
  if (d <= p.inner_radius) return 1.0;
  if (d < p.mid_radius) return 1.0 - p.near_drop * (d - p.inner_radius) / (p.mid_radius - p.inner_radius);
  if (d < p.far_radius) return p.mid_floor - p.far_drop * (d - p.mid_radius) / (p.far_radius - p.mid_radius);
  return p.far_floor;
}

SectorMap::SectorMap() {
  constexpr int half = kLocalSize / 2;
  struct Candidate {
    double angle;
    LocalCell cell;
  };
  std::vector<Candidate> perimeter;
  for (int r = 0; r < kLocalSize; ++r) {
    for (int c = 0; c < kLocalSize; ++c) {
      if (r != 0 && r != kLocalSize - 1 && c != 0 && c != kLocalSize - 1) continue;
      const int dr = r - half;
      const int dc = c - half;
      double a = std::atan2(static_cast<double>(-dr), static_cast<double>(dc)) * 180.0 /
                 std::numbers::pi;
      if (a < 0.0) a += 360.0;
      perimeter.push_back({a, {r, c}});
    }
  }
  std::sort(perimeter.begin(), perimeter.end(),
            [](const Candidate& a, const Candidate& b) { return a.angle < b.angle; });
  sector_of_cell_.fill(-1);
  for (int k = 0; k < kSectorCount; ++k) {
    const LocalCell cell = perimeter[static_cast<std::size_t>(k)].cell;
    cells_[static_cast<std::size_t>(k)] = cell;
    sector_of_cell_[static_cast<std::size_t>(cell.row * kLocalSize + cell.col)] = k;
  }
}

const SectorMap& SectorMap::standard() {
  static const SectorMap map;
  return map;
}

int SectorMap::sector_at(LocalCell c) const {
  if (c.row < 0 || c.col < 0 || c.row >= kLocalSize || c.col >= kLocalSize) return -1;
  return sector_of_cell_[static_cast<std::size_t>(c.row * kLocalSize + c.col)];
}

int sector_of(HexCoord agent, HexCoord target) {
  if (in_inner_box(agent, target)) {
    throw Error(ErrorCode::invalid_argument, "sector lookup for a hex inside the inner box");
  }
  const double shifted = std::fmod(angle_deg(agent, target) + kSectorWidthDeg / 2.0, 360.0);
  const int k = static_cast<int>(std::floor(shifted / kSectorWidthDeg));
  return std::min(k, kSectorCount - 1);
}

ObservationTensor localize(const ObservationTensor& global, HexCoord agent,
                           const DecayParams& params, const SectorMap& sectors) {
  if (global.channels() != kChannels) {
    throw Error(ErrorCode::invalid_argument, "global observation must have 18 channels");
  }
  const BoardDims dims{global.rows(), global.cols()};
  if (!dims.contains(agent)) {
    throw Error(ErrorCode::invalid_argument, "agent hex is off the board");
  }
  params.validate();

  constexpr int half = kLocalSize / 2;
  ObservationTensor local(kChannels, kLocalSize, kLocalSize);

  // Per-hex sector and weight are channel independent, so compute them once.
  struct FarHex {
    int row;
    int col;
    int sector;
    double weight;
  };
  std::vector<FarHex> far;
  far.reserve(dims.area());
  for (int r = 0; r < dims.rows; ++r) {
    for (int c = 0; c < dims.cols; ++c) {
      const HexCoord h{r, c};
      if (in_inner_box(agent, h)) continue;
      far.push_back({r, c, sector_of(agent, h), decay_weight(euclid(agent, h), params)});
    }
  }

  std::array<double, kSectorCount> sums{};
  for (int ch = 0; ch <= channel::last_spatial; ++ch) {
    for (int dr = -kInnerRadius; dr <= kInnerRadius; ++dr) {
      for (int dc = -kInnerRadius; dc <= kInnerRadius; ++dc) {
        const HexCoord h{agent.row + dr, agent.col + dc};
        if (!dims.contains(h)) continue;
        local.at(ch, half + dr, half + dc) = global.at(ch, h.row, h.col);
      }
    }
    sums.fill(0.0);
    for (const FarHex& f : far) {
      const double v = global.at(ch, f.row, f.col);
      if (v != 0.0) sums[static_cast<std::size_t>(f.sector)] += v * f.weight;
    }
    for (int k = 0; k < kSectorCount; ++k) {
      const LocalCell cell = sectors.cell(k);
      local.at(ch, cell.row, cell.col) = std::min(sums[static_cast<std::size_t>(k)], 1.0);
    }
  }

  for (int ch = channel::phase_fraction; ch < kChannels; ++ch) {
    const double v = global.at(ch, agent.row, agent.col);
    for (int r = 0; r < kLocalSize; ++r) {
      for (int c = 0; c < kLocalSize; ++c) local.at(ch, r, c) = v;
    }
  }
  return local;
}

std::vector<std::uint8_t> encode_f32le(const ObservationTensor& t) {
  std::vector<std::uint8_t> out;
  out.reserve(t.data().size() * 4);
  for (double v : t.data()) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
  }
  return out;
}

ObservationTensor decode_f32le(std::span<const std::uint8_t> bytes, std::array<int, 3> shape) {
  ObservationTensor t(shape[0], shape[1], shape[2]);
  if (bytes.size() != t.data().size() * 4) {
    throw Error(ErrorCode::invalid_argument, "byte count does not match tensor shape");
  }
  auto data = t.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[i * 4 + b]) << (8 * b);
    data[i] = static_cast<double>(std::bit_cast<float>(bits));
  }
  return t;
}

}  // namespace hexcombat
