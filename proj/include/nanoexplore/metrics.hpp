#pragma once

#include <string>

#include <Eigen/Core>

#include "nanoexplore/arena.hpp"

namespace nanoexplore {

// Square-cell occupancy grid anchored at the room's south-west corner.
// Row 0 is the southernmost row internally; exports flip to north-first.
struct OccupancyGrid {
  double cell_size = 0.5;
  Eigen::ArrayXXd dwell;  // rows x cols, seconds
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> visited;

  Eigen::Index rows() const { return dwell.rows(); }
  Eigen::Index cols() const { return dwell.cols(); }
  Eigen::Index cell_count() const { return dwell.size(); }
};

struct CellIndex {
  Eigen::Index col = 0;
  Eigen::Index row = 0;
};

// ceil(width / cell) x ceil(height / cell) empty cells.
OccupancyGrid make_grid(double width, double height, double cell_size = 0.5);

// Clamped-floor cell lookup. Throws std::out_of_range outside the room.
CellIndex cell_of(const OccupancyGrid& grid, const Vec2& p, double width, double height);

void mark(OccupancyGrid& grid, const Vec2& p, double dt, double width, double height);

double coverage(const OccupancyGrid& grid);

// Dwell matrix as CSV (row 0 = north), fixed 6 decimals.
std::string dwell_csv(const OccupancyGrid& grid);
// Inverse of dwell_csv; `visited` is reconstructed as dwell > 0.
OccupancyGrid grid_from_dwell_csv(const std::string& text, double cell_size = 0.5);

struct HeatmapStyle {
  double saturation = 18.0;  // seconds mapped to white
  int scale = 32;            // pixels per cell edge
};

// Binary PGM (P5, maxval 255). Intensity round(min(dwell, sat) / sat * 255),
// unvisited cells black.
std::string heatmap_pgm(const OccupancyGrid& grid, const HeatmapStyle& style = {});
unsigned char heatmap_level(double dwell, bool visited, double saturation);

// Writes <base>.csv and <base>.pgm. Throws std::runtime_error on I/O failure.
void export_heatmap(const OccupancyGrid& grid, const std::string& base_path, const HeatmapStyle& style = {});

// Average platform power draw per component, W.
struct EnergyModel {
  double p_motors = 7.32;
  double p_cf = 0.277;
  double p_aideck = 0.134;
  double p_multiranger = 0.286;
  double p_total = 8.02;  // measured total; components sum to it within 0.005 W
};

void validate(const EnergyModel& em);

struct EnergyBreakdown {
  double motors = 0.0;
  double cf = 0.0;
  double aideck = 0.0;
  double multiranger = 0.0;
  double total = 0.0;

  double aideck_share() const { return total > 0.0 ? aideck / total : 0.0; }
};

EnergyBreakdown mission_energy(const EnergyModel& em, double duration);

}  // namespace nanoexplore
