#pragma once

#include <array>
#include <cstdlib>
#include <string>
#include <vector>

namespace savrl {

// Rectangular zone layout with Manhattan travel. Per-pair travel times and
// distances derive from the hop constants, which makes them symmetric, zero
// on the diagonal, and triangle-respecting by construction.
struct ZoneGrid {
  int rows = 3;
  int cols = 7;
  double hop_hours = 0.2;  // travel time per grid hop
  double hop_miles = 2.0;  // distance per grid hop
  std::vector<int> parking_capacity;                 // per zone
  std::vector<double> parking_fee;                   // currency per hour, per zone
  std::vector<std::array<double, 24>> demand_profile;  // base requests/hour

  int n_zones() const { return rows * cols; }
  int row_of(int z) const { return z / cols; }
  int col_of(int z) const { return z % cols; }
  int zone_at(int r, int c) const { return r * cols + c; }
  int hops(int a, int b) const {
    return std::abs(row_of(a) - row_of(b)) + std::abs(col_of(a) - col_of(b));
  }
  double travel_hours(int a, int b) const { return hop_hours * hops(a, b); }
  double travel_miles(int a, int b) const { return hop_miles * hops(a, b); }
};

// The pinned synthetic city: 3x7 grid, a three-zone high-fee core in the
// middle of the center row, two-peak demand (suburbs peak 08:00, core peaks
// 18:00) so the demand's center of mass moves during the day.
ZoneGrid default_city();

// Scenario text format (see save_scenario): grid dimensions and travel
// constants, then one line per zone with capacity, fee and the 24 hourly
// base rates.
ZoneGrid load_scenario(const std::string& path);
void save_scenario(const std::string& path, const ZoneGrid& grid);

// Throws std::invalid_argument naming the broken field.
void validate_grid(const ZoneGrid& grid);

}  // namespace savrl
