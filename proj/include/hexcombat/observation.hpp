#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hexcombat/game.hpp"
#include "hexcombat/hexgrid.hpp"

namespace hexcombat {

inline constexpr int kChannels = 18;
inline constexpr int kLocalSize = 7;
inline constexpr int kInnerRadius = 2;  // inner box is (2*2+1)^2 = 5x5
inline constexpr int kSectorCount = 24;
inline constexpr double kSectorWidthDeg = 360.0 / kSectorCount;

// Channel layout.
namespace channel {
inline constexpr int on_move = 0;
inline constexpr int movable = 1;
inline constexpr int legal_targets = 2;
inline constexpr int friendly_health = 3;
inline constexpr int enemy_health = 4;
inline constexpr int unit_type_first = 5;   // 5..8
inline constexpr int terrain_first = 9;     // 9..13
inline constexpr int friendly_city = 14;
inline constexpr int enemy_city = 15;
inline constexpr int phase_fraction = 16;
inline constexpr int score = 17;
inline constexpr int last_spatial = 15;
}  // namespace channel

/// Dense channel-major tensor: data[(c * rows + r) * cols + col].
class ObservationTensor {
 public:
  ObservationTensor() = default;
  ObservationTensor(int channels, int rows, int cols)
      : channels_(channels),
        rows_(rows),
        cols_(cols),
        data_(static_cast<std::size_t>(channels) * rows * cols, 0.0) {}

  int channels() const noexcept { return channels_; }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::array<int, 3> shape() const noexcept { return {channels_, rows_, cols_}; }

  double& at(int c, int r, int col) noexcept { return data_[offset(c, r, col)]; }
  double at(int c, int r, int col) const noexcept { return data_[offset(c, r, col)]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const ObservationTensor&, const ObservationTensor&) = default;

 private:
  std::size_t offset(int c, int r, int col) const noexcept {
    return (static_cast<std::size_t>(c) * rows_ + r) * cols_ + col;
  }

  int channels_ = 0;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

struct GlobalObsConfig {
  double score_scale = 1000.0;
};

/// Full-board 18-channel view. "Friendly" channels belong to `perspective`;
/// the score channel is negated for a red perspective.
ObservationTensor build_global(const GameState& s, Faction perspective = Faction::blue,
                               const GlobalObsConfig& config = {});

/// Piecewise linear spatial decay:
///   w(d) = 1                                           d <= inner_radius
///   w(d) = 1 - near_drop * (d - inner) / (mid - inner)  d <  mid_radius
///   w(d) = mid_floor - far_drop * (d - mid) / (far - mid) d <  far_radius
///   w(d) = far_floor                                    otherwise
struct DecayParams {
  double inner_radius = 3.0;
  double mid_radius = 7.0;
  double far_radius = 100.0;
  double near_drop = 0.9;
  double mid_floor = 0.1;
  double far_drop = 0.09;
  double far_floor = 0.01;

  void validate() const;
};

double decay_weight(double d, const DecayParams& p = {});

/// Cell of the 7x7 local grid.
struct LocalCell {
  int row = 0;
  int col = 0;
  friend constexpr bool operator==(const LocalCell&, const LocalCell&) = default;
};

/// Bijection between the 24 angular sectors and the perimeter cells of the
/// 7x7 grid. Perimeter cells are ordered by the counterclockwise angle of
/// their offset from the center (row 0 is "up"); sector 0 is due east.
class SectorMap {
 public:
  SectorMap();

  static const SectorMap& standard();

  LocalCell cell(int sector) const { return cells_.at(static_cast<std::size_t>(sector)); }
  /// Sector owning a local cell, or -1 for non-perimeter cells.
  int sector_at(LocalCell c) const;

 private:
  std::array<LocalCell, kSectorCount> cells_{};
  std::array<int, kLocalSize * kLocalSize> sector_of_cell_{};
};

/// True when target lies in the 5x5 offset box around agent.
constexpr bool in_inner_box(HexCoord agent, HexCoord target) noexcept {
  const int dr = target.row - agent.row;
  const int dc = target.col - agent.col;
  return dr >= -kInnerRadius && dr <= kInnerRadius && dc >= -kInnerRadius && dc <= kInnerRadius;
}

/// 15-degree sector of target around agent. Throws for targets in the inner box.
int sector_of(HexCoord agent, HexCoord target);

/// Compresses an 18 x rows x cols global tensor into 18 x 7 x 7 around agent:
/// inner 5x5 copied, everything else decay-weighted and summed per sector onto
/// the perimeter (clipped to 1), scalar channels 16/17 broadcast.
ObservationTensor localize(const ObservationTensor& global, HexCoord agent,
                           const DecayParams& params = {},
                           const SectorMap& sectors = SectorMap::standard());

/// Little-endian float32, channel-major then row-major.
std::vector<std::uint8_t> encode_f32le(const ObservationTensor& t);
ObservationTensor decode_f32le(std::span<const std::uint8_t> bytes, std::array<int, 3> shape);

}  // namespace hexcombat
