#include <doctest.h>

#include <map>
#include <set>

#include "hexcombat/error.hpp"
#include "hexcombat/scenario.hpp"

using namespace hexcombat;

namespace {

// Upper 1% points of the chi-square distribution, df = 1..11.
constexpr double kChi2Crit99[] = {0.0,    6.635,  9.210,  11.345, 13.277, 15.086,
                                  16.812, 18.475, 20.090, 21.666, 23.209, 24.725};

double chi_square_uniform(const std::map<int, int>& counts, int categories, int total) {
  const double expected = static_cast<double>(total) / categories;
  double chi2 = 0.0;
  int seen = 0;
  for (const auto& [value, count] : counts) {
    chi2 += (count - expected) * (count - expected) / expected;
    ++seen;
  }
  // Categories never observed contribute expected each.
  chi2 += (categories - seen) * expected;
  return chi2;
}

}  // namespace

TEST_CASE("rounding and band helpers") {
  CHECK(min_units_for(7) == 4);
  CHECK(min_units_for(3) == 2);
  CHECK(min_units_for(5) == 3);
  CHECK(min_units_for(10) == 5);
  CHECK(min_units_for(12) == 6);
  CHECK(spawn_band_rows(3) == 1);
  CHECK(spawn_band_rows(4) == 2);
  CHECK(spawn_band_rows(12) == 4);
  CHECK(middle_rows(5).first == 2);
  CHECK(middle_rows(5).last == 2);
  CHECK(middle_rows(6).first == 2);
  CHECK(middle_rows(6).last == 3);
  CHECK(side_rows(5, Faction::blue).first == 3);
  CHECK(side_rows(5, Faction::red).last == 1);
  CHECK(side_rows(6, Faction::blue).first == 4);
  CHECK(side_rows(6, Faction::red).last == 1);
  CHECK(spawn_rows(9, Faction::red).last == 2);
  CHECK(spawn_rows(9, Faction::blue).first == 6);
}

TEST_CASE("generate rejects sizes outside 3..12") {
  CHECK_THROWS_AS(generate(2, 0), Error);
  CHECK_THROWS_AS(generate(13, 0), Error);
  CHECK_NOTHROW(generate(3, 0));
  CHECK_NOTHROW(generate(12, 0));
}

TEST_CASE("worked count ranges") {
  std::set<std::size_t> five, ten;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const ScenarioSpec a = generate(5, seed);
    five.insert(a.blue.size());
    five.insert(a.red.size());
    CHECK(a.phase_budget == 20);
    const ScenarioSpec b = generate(10, seed);
    ten.insert(b.blue.size());
    ten.insert(b.red.size());
  }
  CHECK(five == std::set<std::size_t>{3, 4, 5});
  CHECK(ten == std::set<std::size_t>{5, 6, 7, 8, 9, 10});
}

TEST_CASE("scenario invariants over many seeds") {
  for (int n = kMinBoardSize; n <= kMaxBoardSize; ++n) {
    CAPTURE(n);
    const int lo = min_units_for(n);
    std::map<int, int> blue_counts, red_counts;
    const int samples = 2000;
    for (std::uint64_t seed = 0; seed < static_cast<std::uint64_t>(samples); ++seed) {
      const ScenarioSpec s = generate(n, seed);
      const int nb = static_cast<int>(s.blue.size());
      const int nr = static_cast<int>(s.red.size());
      REQUIRE(nb >= lo);
      REQUIRE(nb <= n);
      REQUIRE(nr >= lo);
      REQUIRE(nr <= n);
      ++blue_counts[nb];
      ++red_counts[nr];
      CHECK(s.phase_budget == 4 * n);

      if (nb == nr) {
        CHECK(middle_rows(n).contains(s.city.row));
      } else {
        const Faction weaker = nb < nr ? Faction::blue : Faction::red;
        CHECK(side_rows(n, weaker).contains(s.city.row));
      }

      std::set<HexCoord> occupied;
      for (const UnitPlacement& p : s.blue) {
        CHECK(spawn_rows(n, Faction::blue).contains(p.position.row));
        occupied.insert(p.position);
      }
      for (const UnitPlacement& p : s.red) {
        CHECK(spawn_rows(n, Faction::red).contains(p.position.row));
        occupied.insert(p.position);
      }
      CHECK(occupied.size() == s.blue.size() + s.red.size());
      CHECK(occupied.count(s.city) == 0);

      const GameState g = instantiate(s);
      CHECK(g.cities().size() == 1);
      CHECK(g.phase() == 0);
      CHECK(g.on_move() == Faction::blue);
      CHECK(total_score(g) == 0);
      for (const Unit& u : g.units()) CHECK(u.strength == 100);
    }
    const int categories = n - lo + 1;
    CHECK(chi_square_uniform(blue_counts, categories, samples) < kChi2Crit99[categories - 1]);
    CHECK(chi_square_uniform(red_counts, categories, samples) < kChi2Crit99[categories - 1]);
  }
}

TEST_CASE("equal counts put the city uniformly on the middle axis") {
  std::map<int, int> cols;
  int total = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const ScenarioSpec s = generate(7, seed);
    if (s.blue.size() != s.red.size()) continue;
    CHECK(s.city.row == 3);
    ++cols[s.city.col];
    ++total;
  }
  REQUIRE(total > 1000);
  CHECK(chi_square_uniform(cols, 7, total) < kChi2Crit99[6]);
}

TEST_CASE("generate and instantiate are deterministic") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CHECK(generate(8, seed) == generate(8, seed));
    CHECK(instantiate(generate(8, seed)) == instantiate(generate(8, seed)));
  }
  int differing = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) differing += generate(8, seed) != generate(8, seed + 1);
  CHECK(differing > 40);
}

TEST_CASE("instantiate rejects bad specs") {
  ScenarioSpec s = generate(5, 1);
  s.red.front().position = s.blue.front().position;
  CHECK_THROWS_AS(instantiate(s), Error);
  s = generate(5, 1);
  s.city = {9, 9};
  CHECK_THROWS_AS(instantiate(s), Error);
}

TEST_CASE("mirroring is an involutive isometry") {
  for (int n = 3; n <= 12; ++n) {
    const BoardDims dims{n, n};
    for (std::size_t i = 0; i < dims.area(); ++i) {
      const HexCoord h = dims.coord(i);
      CHECK(mirror_coord(mirror_coord(h, dims), dims) == h);
      for (std::size_t j = 0; j < dims.area(); ++j) {
        const HexCoord k = dims.coord(j);
        CHECK(hex_distance(h, k) == hex_distance(mirror_coord(h, dims), mirror_coord(k, dims)));
      }
      for (Direction d : kAllDirections) {
        const HexCoord n1 = step(h, d);
        if (!dims.contains(n1)) continue;
        CHECK(step(mirror_coord(h, dims), mirror_direction(d, dims)) == mirror_coord(n1, dims));
      }
    }
    const ScenarioSpec s = generate(n, 17);
    const ScenarioSpec m = mirrored(s);
    CHECK(mirrored(m) == s);
    CHECK(m.blue.size() == s.red.size());
    CHECK(m.first_mover == Faction::red);
    const GameState g = instantiate(s);
    CHECK(mirrored(mirrored(g)) == g);
    for (const UnitPlacement& p : m.blue) CHECK(spawn_rows(n, Faction::blue).contains(p.position.row));
  }
}
