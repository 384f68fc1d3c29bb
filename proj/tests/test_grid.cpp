#include <doctest.h>

#include <numeric>
#include <random>
#include <set>

#include "aav/error.hpp"
#include "aav/grid.hpp"
#include "oracles/oracles.hpp"

using namespace aav;

namespace {

std::set<Cell> as_set(const std::vector<Cell>& v) { return {v.begin(), v.end()}; }

AttentionSample at(double x, double y, std::optional<double> radius = std::nullopt) {
  AttentionSample s;
  s.position = Point2{x, y};
  s.radius_px = radius;
  s.source = Source::Gaze;
  return s;
}

}  // namespace

TEST_CASE("grid config derives clipped rows and columns") {
  GridConfig cfg{100.0, 70.0, 32.0};
  CHECK(cfg.cols() == 4);
  CHECK(cfg.rows() == 3);
  const Rect last = cell_rect(cfg, {2, 3});
  CHECK(last.x0 == 96.0);
  CHECK(last.x1 == 100.0);
  CHECK(last.y1 == 70.0);
  CHECK_THROWS_AS((GridConfig{0.0, 10.0, 5.0}.validate()), Error);
  CHECK_THROWS_AS((GridConfig{100.0, 20.0, 32.0}.validate()), Error);
  CHECK_THROWS_AS((GridConfig{100.0, 100.0, 0.0}.validate()), Error);
}

TEST_CASE("zero radius at a cell centre hits that cell only") {
  const GridConfig cfg{320.0, 320.0, 32.0};
  const auto cells = cells_intersecting_circle(cfg, {3 * 32 + 16, 2 * 32 + 16}, 0.0);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0] == Cell{2, 3});
}

TEST_CASE("small disk on a shared corner hits the four cells") {
  const GridConfig cfg{320.0, 320.0, 32.0};
  const auto cells = as_set(cells_intersecting_circle(cfg, {64.0, 96.0}, 10.0));
  CHECK(cells == std::set<Cell>{{2, 1}, {2, 2}, {3, 1}, {3, 2}});
}

TEST_CASE("disk outside the mount hits nothing") {
  const GridConfig cfg{320.0, 240.0, 32.0};
  CHECK(cells_intersecting_circle(cfg, {-60.0, 100.0}, 48.0).empty());
  CHECK(cells_intersecting_circle(cfg, {100.0, 300.0}, 48.0).empty());
  // Reaching in from outside counts.
  CHECK(as_set(cells_intersecting_circle(cfg, {-10.0, 16.0}, 12.0)) == std::set<Cell>{{0, 0}});
}

TEST_CASE("intersection matches the disk-rectangle oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double cell = 8.0 + 40.0 * u(rng);
    const GridConfig cfg{cell * (1.0 + 10.0 * u(rng)) + cell, cell * (1.0 + 10.0 * u(rng)) + cell, cell};
    const Point2 c{-50.0 + (cfg.width_px + 100.0) * u(rng), -50.0 + (cfg.height_px + 100.0) * u(rng)};
    const double r = 80.0 * u(rng);
    const auto got = cells_intersecting_circle(cfg, c, r);
    CHECK(std::is_sorted(got.begin(), got.end()));
    CHECK(as_set(got) == oracle::disk_cells(cfg, c, r));
  }
}

TEST_CASE("intersection is monotone in radius") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const GridConfig cfg{300.0, 200.0, 20.0};
  for (int trial = 0; trial < 200; ++trial) {
    const Point2 c{300.0 * u(rng), 200.0 * u(rng)};
    const double r1 = 60.0 * u(rng), r2 = r1 + 30.0 * u(rng);
    const auto a = as_set(cells_intersecting_circle(cfg, c, r1));
    const auto b = as_set(cells_intersecting_circle(cfg, c, r2));
    CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  }
}

TEST_CASE("interior sample with zero radius raises only its cell") {
  AttentionGrid grid({320.0, 320.0, 32.0});
  const auto s = at(5 * 32 + 16, 4 * 32 + 16, 0.0);
  apply_sample(grid, &s, {});
  const auto cum = grid.map().fused_cumulative();
  for (std::size_t i = 0; i < cum.size(); ++i) CHECK(cum[i] == (i == grid.index({4, 5}) ? 0.1 : 0.0));
}

TEST_CASE("off-grid sample beyond its radius only decays") {
  AttentionGrid grid({320.0, 320.0, 32.0});
  grid.map().state(Source::Gaze, 7) = {1.0, 0.5};
  const auto s = at(-100.0, -100.0, 48.0);
  apply_sample(grid, &s, {});
  CHECK(grid.map().state(Source::Gaze, 7).cumulative == 1.0);
  CHECK(grid.map().state(Source::Gaze, 7).short_term < 0.5);
  CHECK(coverage(grid) == doctest::Approx(1.0 / 100.0));
}

TEST_CASE("screen-center samples land on the mount centre") {
  AttentionGrid grid({320.0, 320.0, 32.0});
  AttentionSample s;
  s.source = Source::Head;
  s.radius_px = 0.0;
  apply_sample(grid, &s, {});
  const auto cum = grid.map().fused_cumulative();
  CHECK(std::count_if(cum.begin(), cum.end(), [](double v) { return v > 0; }) == 4);
  CHECK(grid.map().state(Source::Head, grid.index({4, 4})).cumulative > 0.0);
}

TEST_CASE("negative sample radius is rejected") {
  AttentionGrid grid({320.0, 320.0, 32.0});
  const auto s = at(10.0, 10.0, -1.0);
  CHECK_THROWS_AS(apply_sample(grid, &s, {}), Error);
}

TEST_CASE("random samples match an independent grid recomputation") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-20.0, 340.0);
  const GridConfig cfg{320.0, 240.0, 24.0};
  AttentionGrid grid(cfg);
  const ModelParams p;
  std::vector<std::vector<std::size_t>> hits;
  for (int i = 0; i < 100; ++i) {
    const auto s = at(u(rng), u(rng), std::abs(u(rng)) / 4.0);
    apply_sample(grid, &s, p);
    std::vector<std::size_t> h;
    for (const auto& c : oracle::disk_cells(cfg, *s.position, *s.radius_px))
      h.push_back(static_cast<std::size_t>(c.row * cfg.cols() + c.col));
    hits.push_back(h);
  }
  const auto ref = oracle::scalar_replay(cfg.cell_count(), hits, p.tick_s(), p.gain_per_s, p.half_life_s, p.cap);
  for (std::size_t i = 0; i < cfg.cell_count(); ++i) {
    CHECK(grid.map().state(Source::Gaze, i).cumulative == doctest::Approx(ref[i].cum).epsilon(1e-12));
    CHECK(grid.map().state(Source::Gaze, i).short_term == doctest::Approx(ref[i].st).epsilon(1e-9));
  }
}

TEST_CASE("total cumulative equals dt times cells hit") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 400.0);
  const GridConfig cfg{400.0, 400.0, 40.0};
  AttentionGrid grid(cfg);
  double expected = 0.0;
  for (int i = 0; i < 300; ++i) {
    const auto s = at(u(rng), u(rng), u(rng) / 5.0);
    expected += 0.1 * static_cast<double>(cells_intersecting_circle(cfg, *s.position, *s.radius_px).size());
    apply_sample(grid, &s, {});
  }
  const auto cum = grid.map().fused_cumulative();
  CHECK(std::abs(std::accumulate(cum.begin(), cum.end(), 0.0) - expected) <= 1e-9);
}

TEST_CASE("coverage examples") {
  AttentionGrid fresh({160.0, 128.0, 32.0});
  CHECK(coverage(fresh) == 0.0);

  AttentionGrid one({160.0, 128.0, 32.0});  // 5 x 4
  const auto s = at(16.0, 16.0, 0.0);
  apply_sample(one, &s, {});
  CHECK(coverage(one) == doctest::Approx(0.05));

  AttentionGrid all({160.0, 128.0, 32.0});
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 5; ++c) {
      const auto t = at(c * 32 + 16, r * 32 + 16, 0.0);
      apply_sample(all, &t, {});
    }
  CHECK(coverage(all) == 1.0);
}
