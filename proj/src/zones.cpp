#include "savrl/zones.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace savrl {

namespace {

// Smooth two-peak daily curve: base load plus Gaussian bumps at the given
// hours (wrapped on the 24h circle).
std::array<double, 24> two_peak_profile(double base, double peak1_hour, double peak1,
                                        double peak2_hour, double peak2) {
  std::array<double, 24> out{};
  auto bump = [](double h, double center, double height) {
    double d = std::abs(h - center);
    d = std::min(d, 24.0 - d);
    return height * std::exp(-(d * d) / (2.0 * 1.5 * 1.5));
  };
  for (int h = 0; h < 24; ++h) {
    out[h] = base + bump(h, peak1_hour, peak1) + bump(h, peak2_hour, peak2);
  }
  return out;
}

}  // namespace

ZoneGrid default_city() {
  ZoneGrid g;
  g.rows = 3;
  g.cols = 7;
  g.hop_hours = 0.2;
  g.hop_miles = 2.0;
  const int n = g.n_zones();
  g.parking_capacity.assign(n, 0);
  g.parking_fee.assign(n, 0.0);
  g.demand_profile.assign(n, {});
  for (int z = 0; z < n; ++z) {
    const int r = g.row_of(z);
    const int c = g.col_of(z);
    const bool core = (r == 1 && c >= 2 && c <= 4);  // downtown: zones 9, 10, 11
    if (core) {
      g.parking_capacity[z] = 3;
      g.parking_fee[z] = 3.0;
      // office/evening demand: quiet mornings, strong evening peak
      g.demand_profile[z] = two_peak_profile(0.4, 8.0, 1.0, 18.0, 2.6);
    } else {
      g.parking_capacity[z] = 6;
      g.parking_fee[z] = 0.5;
      // residential: strong morning peak, mild evening bump
      g.demand_profile[z] = two_peak_profile(0.15, 8.0, 1.6, 18.0, 0.5);
    }
  }
  return g;
}

void validate_grid(const ZoneGrid& grid) {
  if (grid.rows <= 0 || grid.cols <= 0) throw std::invalid_argument("grid: rows/cols must be positive");
  if (grid.hop_hours <= 0.0) throw std::invalid_argument("grid: hop_hours must be positive");
  if (grid.hop_miles < 0.0) throw std::invalid_argument("grid: hop_miles must be nonnegative");
  const std::size_t n = static_cast<std::size_t>(grid.n_zones());
  if (grid.parking_capacity.size() != n) throw std::invalid_argument("grid: parking_capacity size");
  if (grid.parking_fee.size() != n) throw std::invalid_argument("grid: parking_fee size");
  if (grid.demand_profile.size() != n) throw std::invalid_argument("grid: demand_profile size");
  for (std::size_t z = 0; z < n; ++z) {
    if (grid.parking_capacity[z] < 0) throw std::invalid_argument("grid: negative parking capacity");
    if (grid.parking_fee[z] < 0.0) throw std::invalid_argument("grid: negative parking fee");
    for (double rate : grid.demand_profile[z]) {
      if (!(rate >= 0.0)) throw std::invalid_argument("grid: negative demand rate");
    }
  }
}

ZoneGrid load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario: " + path);
  std::string line;
  std::vector<double> numbers;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    std::istringstream row(line);
    double v;
    while (row >> v) numbers.push_back(v);
  }
  std::size_t pos = 0;
  auto next = [&]() -> double {
    if (pos >= numbers.size()) throw std::runtime_error("truncated scenario: " + path);
    return numbers[pos++];
  };
  ZoneGrid g;
  g.rows = static_cast<int>(next());
  g.cols = static_cast<int>(next());
  g.hop_hours = next();
  g.hop_miles = next();
  const int n = g.rows * g.cols;
  if (n <= 0) throw std::runtime_error("scenario has no zones: " + path);
  g.parking_capacity.resize(n);
  g.parking_fee.resize(n);
  g.demand_profile.resize(n);
  for (int z = 0; z < n; ++z) {
    g.parking_capacity[z] = static_cast<int>(next());
    g.parking_fee[z] = next();
    for (int h = 0; h < 24; ++h) g.demand_profile[z][h] = next();
  }
  if (pos != numbers.size()) throw std::runtime_error("trailing data in scenario: " + path);
  validate_grid(g);
  return g;
}

void save_scenario(const std::string& path, const ZoneGrid& grid) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario: " + path);
  out.precision(17);
  out << "# savrl scenario: rows cols / hop_hours hop_miles / per zone:\n";
  out << "#   capacity fee rate_h0 .. rate_h23\n";
  out << grid.rows << " " << grid.cols << "\n";
  out << grid.hop_hours << " " << grid.hop_miles << "\n";
  for (int z = 0; z < grid.n_zones(); ++z) {
    out << grid.parking_capacity[z] << " " << grid.parking_fee[z];
    for (double rate : grid.demand_profile[z]) out << " " << rate;
    out << "\n";
  }
}

}  // namespace savrl
