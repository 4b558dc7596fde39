#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "nanoexplore/metrics.hpp"

using namespace nanoexplore;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("default grid has 143 cells") {
  const OccupancyGrid g = make_grid(6.5, 5.5);
  CHECK(g.cols() == 13);
  CHECK(g.rows() == 11);
  CHECK(g.cell_count() == 143);
  CHECK(coverage(g) == 0.0);
  // Non-divisible rooms round up.
  CHECK(make_grid(6.4, 5.2).cell_count() == 13 * 11);
}

TEST_CASE("mark uses the clamped floor") {
  OccupancyGrid g = make_grid(6.5, 5.5);
  mark(g, Vec2(0.1, 0.1), 0.02, 6.5, 5.5);
  CHECK(g.dwell(0, 0) == doctest::Approx(0.02));
  CHECK(g.visited(0, 0));

  const CellIndex c = cell_of(g, Vec2(6.49, 5.49), 6.5, 5.5);
  CHECK(c.col == 12);
  CHECK(c.row == 10);
  const CellIndex edge = cell_of(g, Vec2(6.5, 5.5), 6.5, 5.5);
  CHECK(edge.col == 12);
  CHECK(edge.row == 10);

  CHECK_THROWS_AS(mark(g, Vec2(-0.01, 1.0), 0.02, 6.5, 5.5), std::out_of_range);
  CHECK_THROWS_AS(mark(g, Vec2(1.0, 5.6), 0.02, 6.5, 5.5), std::out_of_range);
}

TEST_CASE("coverage values") {
  OccupancyGrid g = make_grid(6.5, 5.5);
  mark(g, Vec2(3.3, 2.8), 0.02, 6.5, 5.5);
  CHECK(coverage(g) == doctest::Approx(1.0 / 143));
  for (int k = 0; k < 9000; ++k) mark(g, Vec2(3.3, 2.8), 0.02, 6.5, 5.5);
  CHECK(coverage(g) == 1.0 / 143);

  OccupancyGrid full = make_grid(6.5, 5.5);
  for (int r = 0; r < 11; ++r)
    for (int c = 0; c < 13; ++c) mark(full, Vec2(0.25 + 0.5 * c, 0.25 + 0.5 * r), 0.02, 6.5, 5.5);
  CHECK(coverage(full) == 1.0);
}

TEST_CASE("dwell is conserved and coverage is monotone") {
  OccupancyGrid g = make_grid(6.5, 5.5);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> x(0.0, 6.5), y(0.0, 5.5);
  double prev = 0.0;
  for (int k = 0; k < 9000; ++k) {
    mark(g, Vec2(x(rng), y(rng)), 0.02, 6.5, 5.5);
    const double c = coverage(g);
    CHECK(c >= prev);
    prev = c;
  }
  CHECK(std::abs(g.dwell.sum() - 180.0) < 1e-6);
  CHECK((g.dwell >= 0.0).all());
  CHECK((!g.visited || (g.dwell > 0.0)).all());
}

TEST_CASE("dwell csv round trip") {
  OccupancyGrid g = make_grid(6.5, 5.5);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> x(0.0, 6.5), y(0.0, 2.0);
  for (int k = 0; k < 3000; ++k) mark(g, Vec2(x(rng), y(rng)), 0.02, 6.5, 5.5);
  const std::string csv = dwell_csv(g);
  const OccupancyGrid back = grid_from_dwell_csv(csv);
  REQUIRE(back.rows() == g.rows());
  REQUIRE(back.cols() == g.cols());
  CHECK(((back.dwell - g.dwell).abs() <= 1e-6).all());
  CHECK((back.visited == g.visited).all());
  // Row 0 of the CSV is the north edge, where nothing was marked.
  CHECK(csv.substr(0, csv.find('\n')).find_first_not_of("0.,") == std::string::npos);
}

TEST_CASE("heatmap levels") {
  CHECK(heatmap_level(0.0, false, 18) == 0);
  CHECK(heatmap_level(18.0, true, 18) == 255);
  CHECK(heatmap_level(40.0, true, 18) == 255);
  CHECK(heatmap_level(9.0, true, 18) == 128);
}

TEST_CASE("heatmap pgm") {
  OccupancyGrid g = make_grid(6.5, 5.5);
  std::string pgm = heatmap_pgm(g);
  const std::string header = "P5\n416 352\n255\n";
  REQUIRE(pgm.substr(0, header.size()) == header);
  CHECK(pgm.size() == header.size() + 416 * 352);
  CHECK(pgm.find_first_not_of('\0', header.size()) == std::string::npos);

  // 18 s in the south-west cell: a white block in the bottom-left corner.
  for (int k = 0; k < 900; ++k) mark(g, Vec2(0.2, 0.2), 0.02, 6.5, 5.5);
  pgm = heatmap_pgm(g);
  const auto px = [&](int x, int y) { return static_cast<unsigned char>(pgm[header.size() + y * 416 + x]); };
  CHECK(px(0, 351) == 255);
  CHECK(px(31, 320) == 255);
  CHECK(px(32, 351) == 0);
  CHECK(px(0, 319) == 0);
  CHECK(px(0, 0) == 0);
}

TEST_CASE("export_heatmap writes both files") {
  const auto dir = std::filesystem::temp_directory_path() / "nanoexplore_metrics_test";
  std::filesystem::create_directories(dir);
  OccupancyGrid g = make_grid(6.5, 5.5);
  mark(g, Vec2(1.0, 1.0), 9.0, 6.5, 5.5);
  export_heatmap(g, (dir / "h").string());
  CHECK(slurp(dir / "h.csv") == dwell_csv(g));
  CHECK(slurp(dir / "h.pgm") == heatmap_pgm(g));
  std::filesystem::remove_all(dir);
  CHECK_THROWS(export_heatmap(g, "/nonexistent-dir/x/h"));
}

TEST_CASE("mission energy") {
  const EnergyModel em;
  CHECK_NOTHROW(validate(em));
  const EnergyBreakdown e = mission_energy(em, 180.0);
  CHECK(e.total == doctest::Approx(1443.6).epsilon(1e-12));
  CHECK(e.aideck == doctest::Approx(0.134 * 180));
  CHECK(e.motors == doctest::Approx(7.32 * 180));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100 * e.aideck_share());
  CHECK(std::string(buf) == "1.67");
  CHECK(mission_energy(em, 0.0).total == 0.0);
  std::snprintf(buf, sizeof buf, "%.2f", 100 * mission_energy(em, 37.0).aideck_share());
  CHECK(std::string(buf) == "1.67");

  EnergyModel bad = em;
  bad.p_motors = 9.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = em;
  bad.p_cf = -0.1;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  CHECK_THROWS_AS(mission_energy(em, -1.0), std::invalid_argument);
}
