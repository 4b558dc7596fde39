#include "nanoexplore/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace nanoexplore {

OccupancyGrid make_grid(double width, double height, double cell_size) {
  if (!(cell_size > 0.0 && width > 0.0 && height > 0.0)) {
    throw std::invalid_argument("grid dimensions and cell size must be > 0");
  }
  // Tolerance keeps 6.5 / 0.5 from rounding up to 14.
  const auto cols = static_cast<Eigen::Index>(std::ceil(width / cell_size - 1e-9));
  const auto rows = static_cast<Eigen::Index>(std::ceil(height / cell_size - 1e-9));
  OccupancyGrid g;
  g.cell_size = cell_size;
  g.dwell = Eigen::ArrayXXd::Zero(rows, cols);
  g.visited.setConstant(rows, cols, false);
  return g;
}

CellIndex cell_of(const OccupancyGrid& grid, const Vec2& p, double width, double height) {
  if (!(p.x() >= 0.0 && p.x() <= width && p.y() >= 0.0 && p.y() <= height)) {
    throw std::out_of_range("position outside the room");
  }
  const auto col = std::min<Eigen::Index>(static_cast<Eigen::Index>(p.x() / grid.cell_size), grid.cols() - 1);
  const auto row = std::min<Eigen::Index>(static_cast<Eigen::Index>(p.y() / grid.cell_size), grid.rows() - 1);
  return {col, row};
}

void mark(OccupancyGrid& grid, const Vec2& p, double dt, double width, double height) {
  const CellIndex c = cell_of(grid, p, width, height);
  grid.dwell(c.row, c.col) += dt;
  grid.visited(c.row, c.col) = true;
}

double coverage(const OccupancyGrid& grid) {
  if (grid.cell_count() == 0) return 0.0;
  return static_cast<double>(grid.visited.count()) / static_cast<double>(grid.cell_count());
}

std::string dwell_csv(const OccupancyGrid& grid) {
  std::string out;
  char buf[32];
  for (Eigen::Index r = grid.rows() - 1; r >= 0; --r) {
    for (Eigen::Index c = 0; c < grid.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.6f", grid.dwell(r, c));
      if (c) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

OccupancyGrid grid_from_dwell_csv(const std::string& text, double cell_size) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw std::runtime_error("malformed dwell value '" + cell + "'");
      }
      if (row.back() < 0.0) throw std::runtime_error("negative dwell value");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("ragged dwell matrix");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty dwell matrix");

  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_cols = static_cast<Eigen::Index>(rows.front().size());
  OccupancyGrid g;
  g.cell_size = cell_size;
  g.dwell.resize(n_rows, n_cols);
  for (Eigen::Index r = 0; r < n_rows; ++r) {
    for (Eigen::Index c = 0; c < n_cols; ++c) g.dwell(n_rows - 1 - r, c) = rows[r][c];
  }
  g.visited = g.dwell > 0.0;
  return g;
}

unsigned char heatmap_level(double dwell, bool visited, double saturation) {
  if (!visited) return 0;
  const double frac = std::min(dwell, saturation) / saturation;
  return static_cast<unsigned char>(std::floor(frac * 255.0 + 0.5));
}

std::string heatmap_pgm(const OccupancyGrid& grid, const HeatmapStyle& style) {
  const Eigen::Index w = grid.cols() * style.scale;
  const Eigen::Index h = grid.rows() * style.scale;
  std::string out = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(w * h));
  for (Eigen::Index y = 0; y < h; ++y) {
    const Eigen::Index r = grid.rows() - 1 - y / style.scale;
    for (Eigen::Index x = 0; x < w; ++x) {
      const Eigen::Index c = x / style.scale;
      out.push_back(static_cast<char>(heatmap_level(grid.dwell(r, c), grid.visited(r, c), style.saturation)));
    }
  }
  return out;
}

namespace {

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace

void export_heatmap(const OccupancyGrid& grid, const std::string& base_path, const HeatmapStyle& style) {
  write_file(base_path + ".csv", dwell_csv(grid));
  write_file(base_path + ".pgm", heatmap_pgm(grid, style));
}

void validate(const EnergyModel& em) {
  for (double p : {em.p_motors, em.p_cf, em.p_aideck, em.p_multiranger, em.p_total}) {
    if (!(p >= 0.0)) throw std::invalid_argument("energy model powers must be >= 0");
  }
  const double sum = em.p_motors + em.p_cf + em.p_aideck + em.p_multiranger;
  if (std::abs(sum - em.p_total) > 0.005) {
    throw std::invalid_argument("energy model components do not sum to the total within 0.005 W");
  }
}

EnergyBreakdown mission_energy(const EnergyModel& em, double duration) {
  if (duration < 0.0) throw std::invalid_argument("duration must be >= 0");
  return {em.p_motors * duration, em.p_cf * duration, em.p_aideck * duration, em.p_multiranger * duration,
          em.p_total * duration};
}

}  // namespace nanoexplore
