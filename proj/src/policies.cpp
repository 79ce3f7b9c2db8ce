#include "savrl/policies.hpp"

#include <limits>
#include <stdexcept>

namespace savrl {

int action_space_size(ActionSpaceMode mode, int n_zones) {
  return mode == ActionSpaceMode::kNZone ? n_zones : 4;
}

const char* to_string(ActionSpaceMode mode) {
  return mode == ActionSpaceMode::kNZone ? "n_zone" : "four_nearest";
}

ActionSpaceMode action_space_from_string(const std::string& s) {
  if (s == "n_zone" || s == "n-zone") return ActionSpaceMode::kNZone;
  if (s == "four_nearest" || s == "4-nearest" || s == "4_nearest") {
    return ActionSpaceMode::kFourNearest;
  }
  throw std::invalid_argument("unknown action space: " + s);
}

NeighborTable build_neighbor_table(const ZoneGrid& grid) {
  NeighborTable table;
  table.targets.resize(static_cast<std::size_t>(grid.n_zones()));
  for (int z = 0; z < grid.n_zones(); ++z) {
    const int r = grid.row_of(z);
    const int c = grid.col_of(z);
    auto at = [&](int rr, int cc) {
      if (rr < 0 || rr >= grid.rows || cc < 0 || cc >= grid.cols) return z;  // edge fill
      return grid.zone_at(rr, cc);
    };
    table.targets[static_cast<std::size_t>(z)] = {at(r - 1, c), at(r, c + 1), at(r + 1, c),
                                                  at(r, c - 1)};
  }
  return table;
}

int expand_action(ActionSpaceMode mode, int zone, int local_action, const NeighborTable& table) {
  if (mode == ActionSpaceMode::kNZone) {
    if (local_action < 0 || local_action >= static_cast<int>(table.targets.size())) {
      throw std::out_of_range("expand_action: zone action out of range");
    }
    return local_action;
  }
  if (local_action < 0 || local_action >= 4) {
    throw std::out_of_range("expand_action: four-nearest action out of range");
  }
  return table.targets[static_cast<std::size_t>(zone)][static_cast<std::size_t>(local_action)];
}

RelocationDirective RelocationDirective::stay(int n_zones) {
  RelocationDirective d;
  d.mode = ActionSpaceMode::kNZone;
  d.rows.assign(static_cast<std::size_t>(n_zones),
                std::vector<double>(static_cast<std::size_t>(n_zones), 0.0));
  for (int z = 0; z < n_zones; ++z) d.rows[static_cast<std::size_t>(z)][static_cast<std::size_t>(z)] = 1.0;
  return d;
}

RelocationDirective RelocationDirective::uniform(ActionSpaceMode mode, int n_zones) {
  RelocationDirective d;
  d.mode = mode;
  const int width = action_space_size(mode, n_zones);
  d.rows.assign(static_cast<std::size_t>(n_zones),
                std::vector<double>(static_cast<std::size_t>(width), 1.0 / width));
  return d;
}

RelocationDirective RelocationDirective::from_choices(ActionSpaceMode mode, int n_zones,
                                                      std::span<const int> local_actions) {
  if (static_cast<int>(local_actions.size()) != n_zones) {
    throw std::invalid_argument("from_choices: one local action per zone required");
  }
  RelocationDirective d;
  d.mode = mode;
  const int width = action_space_size(mode, n_zones);
  d.rows.assign(static_cast<std::size_t>(n_zones),
                std::vector<double>(static_cast<std::size_t>(width), 0.0));
  for (int z = 0; z < n_zones; ++z) {
    const int a = local_actions[static_cast<std::size_t>(z)];
    if (a < 0 || a >= width) throw std::out_of_range("from_choices: local action out of range");
    d.rows[static_cast<std::size_t>(z)][static_cast<std::size_t>(a)] = 1.0;
  }
  return d;
}

std::vector<double> imbalance_scores(std::span<const double> sav_share,
                                     std::span<const double> demand_share) {
  if (sav_share.size() != demand_share.size()) {
    throw std::invalid_argument("imbalance_scores: length mismatch");
  }
  std::vector<double> scores(sav_share.size(), 0.0);
  for (std::size_t z = 0; z < scores.size(); ++z) {
    const double s = sav_share[z];
    const double d = demand_share[z];
    if (d == 0.0) {
      scores[z] = (s > 0.0) ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
      scores[z] = (s - d) / d;
    }
  }
  return scores;
}

std::vector<bool> eligibility(std::span<const double> scores, double threshold) {
  std::vector<bool> out(scores.size(), false);
  for (std::size_t z = 0; z < scores.size(); ++z) out[z] = scores[z] >= threshold;
  return out;
}

RelocationDirective imbalance_directive(const Obs& observation, RngEngine& rng,
                                        double threshold) {
  if (observation.size() % 3 != 0 || observation.empty()) {
    throw std::invalid_argument("imbalance_directive: observation is not a 3n vector");
  }
  const int n = static_cast<int>(observation.size() / 3);
  const std::span<const double> demand_share(observation.data(), static_cast<std::size_t>(n));
  const std::span<const double> sav_share(observation.data() + n, static_cast<std::size_t>(n));
  const std::vector<double> scores = imbalance_scores(sav_share, demand_share);
  const std::vector<bool> eligible = eligibility(scores, threshold);

  std::vector<int> deficits;
  for (int z = 0; z < n; ++z) {
    if (scores[static_cast<std::size_t>(z)] < 0.0) deficits.push_back(z);
  }

  std::vector<int> sources;
  for (int z = 0; z < n; ++z) {
    if (eligible[static_cast<std::size_t>(z)]) sources.push_back(z);
  }

  // One source -> target pair per hour: a uniformly sampled surplus zone
  // sends its idle vehicles to a uniformly sampled deficit zone. Everyone
  // else stays.
  RelocationDirective d = RelocationDirective::stay(n);
  if (sources.empty() || deficits.empty()) return d;
  std::uniform_int_distribution<std::size_t> pick_source(0, sources.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_target(0, deficits.size() - 1);
  const int source = sources[pick_source(rng)];
  const int target = deficits[pick_target(rng)];
  auto& row = d.rows[static_cast<std::size_t>(source)];
  row.assign(row.size(), 0.0);
  row[static_cast<std::size_t>(target)] = 1.0;
  return d;
}

double block_balance(double sav_total, double sav_block, double demand_block,
                     double demand_total) {
  if (sav_total <= 0.0 || demand_total <= 0.0) {
    throw std::invalid_argument("block_balance: totals must be positive");
  }
  return sav_total * (sav_block / sav_total - demand_block / demand_total);
}

}  // namespace savrl
