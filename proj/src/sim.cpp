#include "savrl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace savrl {

namespace {

constexpr double kSalaryLogMedian = 3.2188758248682006;  // ln 25
constexpr double kSalaryLogSigma = 0.5;
constexpr double kAbandonHours = 24.0;

// Whole-hour busy accounting: movements occupy at least the current hour.
int hours_to_steps(double hours) {
  return std::max(1, static_cast<int>(std::ceil(hours - 1e-9)));
}

}  // namespace

const char* to_string(VehicleStatus s) {
  switch (s) {
    case VehicleStatus::kIdle: return "idle";
    case VehicleStatus::kRelocating: return "relocating";
    case VehicleStatus::kServing: return "serving";
    case VehicleStatus::kParked: return "parked";
  }
  return "?";
}

void validate_config(const SimConfig& cfg) {
  std::vector<std::string> bad;
  if (cfg.fleet_size <= 0) bad.push_back("fleet_size must be positive");
  if (cfg.gas_price < 0.0) bad.push_back("gas_price must be nonnegative");
  if (cfg.demand_scale < 0.0) bad.push_back("demand_scale must be nonnegative");
  if (cfg.episode_length <= 0) bad.push_back("episode_length must be positive");
  if (cfg.matching_radius_hops < 0.0) bad.push_back("matching_radius_hops must be nonnegative");
  if (!bad.empty()) {
    std::string msg = "invalid SimConfig:";
    for (const auto& b : bad) msg += " " + b + ";";
    throw std::invalid_argument(msg);
  }
}

std::size_t SimWorld::queue_size() const {
  std::size_t n = 0;
  for (const auto& q : waiting) n += q.size();
  return n;
}

RewardParts compute_reward_parts(const SimWorld& world) {
  RewardParts parts;
  // waiting clients, including the ones that hit the cap this step
  double wait_sum = 0.0;
  std::size_t wait_n = 0;
  for (const auto& q : world.waiting) {
    for (const auto& c : q) {
      wait_sum += c.salary * c.waiting_hours;
      ++wait_n;
    }
  }
  for (const auto& [salary, hours] : world.abandoned_charges) {
    wait_sum += salary * hours;
    ++wait_n;
  }
  if (wait_n > 0) parts.waiting = wait_sum / static_cast<double>(wait_n);

  double gas_sum = 0.0;
  std::size_t gas_n = 0;
  double fee_sum = 0.0;
  std::size_t fee_n = 0;
  for (const auto& v : world.vehicles) {
    if (v.empty_miles_step > 0.0) {
      gas_sum += v.empty_miles_step * world.gas_price;
      ++gas_n;
    }
    if (v.status == VehicleStatus::kParked) {
      fee_sum += world.grid.parking_fee[static_cast<std::size_t>(v.zone)];
      ++fee_n;
    }
  }
  if (gas_n > 0) parts.gas = gas_sum / static_cast<double>(gas_n);
  if (fee_n > 0) parts.parking = fee_sum / static_cast<double>(fee_n);
  return parts;
}

double compute_reward(const SimWorld& world) { return compute_reward_parts(world).total(); }

Obs encode_state(const SimWorld& world) {
  const int n = world.grid.n_zones();
  Obs obs(static_cast<std::size_t>(3 * n), 0.0);
  double total_demand = 0.0;
  for (int z = 0; z < n; ++z) total_demand += static_cast<double>(world.demand_seen[static_cast<std::size_t>(z)]);
  if (total_demand > 0.0) {
    for (int z = 0; z < n; ++z) {
      obs[static_cast<std::size_t>(z)] =
          static_cast<double>(world.demand_seen[static_cast<std::size_t>(z)]) / total_demand;
    }
  }
  const double fleet = static_cast<double>(world.vehicles.size());
  for (const auto& v : world.vehicles) {
    obs[static_cast<std::size_t>(n + v.zone)] += 1.0 / fleet;
  }
  for (int z = 0; z < n; ++z) {
    obs[static_cast<std::size_t>(2 * n + z)] =
        static_cast<double>(world.grid.parking_capacity[static_cast<std::size_t>(z)] -
                            world.parked_count[static_cast<std::size_t>(z)]);
  }
  return obs;
}

std::vector<std::vector<ClientRequest>> spawn_demand(const ZoneGrid& grid, int hour,
                                                     double scale, RngEngine& rng,
                                                     long* next_client_id) {
  const int n = grid.n_zones();
  const int h = ((hour % 24) + 24) % 24;
  std::vector<std::vector<ClientRequest>> out(static_cast<std::size_t>(n));
  long local_id = 0;
  long& id = next_client_id ? *next_client_id : local_id;

  // destination attraction for this hour
  std::vector<double> attraction(static_cast<std::size_t>(n), 0.0);
  for (int z = 0; z < n; ++z) attraction[static_cast<std::size_t>(z)] = grid.demand_profile[static_cast<std::size_t>(z)][h];

  std::lognormal_distribution<double> salary(kSalaryLogMedian, kSalaryLogSigma);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int z = 0; z < n; ++z) {
    const double rate = grid.demand_profile[static_cast<std::size_t>(z)][h] * scale;
    int count = 0;
    if (rate > 0.0) {
      std::poisson_distribution<int> poisson(rate);
      count = poisson(rng);
    }
    for (int k = 0; k < count; ++k) {
      ClientRequest c;
      c.id = id++;
      c.origin = z;
      c.request_hour = hour;
      c.salary = salary(rng);
      c.waiting_hours = 0.0;
      // destination proportional to attraction, origin excluded
      double total = 0.0;
      for (int d = 0; d < n; ++d) {
        if (d != z) total += attraction[static_cast<std::size_t>(d)];
      }
      if (n == 1) {
        c.destination = z;
      } else if (total <= 0.0) {
        int pick = static_cast<int>(unif(rng) * (n - 1));
        pick = std::min(pick, n - 2);
        c.destination = pick >= z ? pick + 1 : pick;
      } else {
        const double u = unif(rng) * total;
        double acc = 0.0;
        c.destination = (z == 0) ? 1 : 0;
        for (int d = 0; d < n; ++d) {
          if (d == z) continue;
          acc += attraction[static_cast<std::size_t>(d)];
          if (u < acc) {
            c.destination = d;
            break;
          }
        }
      }
      out[static_cast<std::size_t>(z)].push_back(c);
    }
  }
  return out;
}

SavEnv::SavEnv(ZoneGrid grid, SimConfig cfg)
    : cfg_(cfg), rng_(make_rng(cfg.seed)) {
  validate_grid(grid);
  validate_config(cfg);
  world_.grid = std::move(grid);
  table_ = build_neighbor_table(world_.grid);
}

Obs SavEnv::reset() {
  guard_.require_open("reset");
  const int n = world_.grid.n_zones();
  world_.gas_price = cfg_.gas_price;
  world_.vehicles.assign(static_cast<std::size_t>(cfg_.fleet_size), Vehicle{});
  for (int i = 0; i < cfg_.fleet_size; ++i) {
    Vehicle& v = world_.vehicles[static_cast<std::size_t>(i)];
    v.id = i;
    v.zone = i % n;  // round-robin distribution
    v.status = VehicleStatus::kIdle;
    v.busy_until = 0;
    v.empty_miles_step = 0.0;
  }
  world_.waiting.assign(static_cast<std::size_t>(n), {});
  world_.parked_count.assign(static_cast<std::size_t>(n), 0);
  world_.demand_seen.assign(static_cast<std::size_t>(n), 0);
  world_.clock = 0;
  world_.abandoned_charges.clear();
  last_actions_.clear();
  hour_spawned_ = false;
  spawn_current_hour();
  guard_.on_reset();
  return encode_state(world_);
}

void SavEnv::spawn_current_hour() {
  if (hour_spawned_) return;
  auto fresh = spawn_demand(world_.grid, world_.clock, cfg_.demand_scale, rng_, &next_client_id_);
  spawned_this_step_ = 0;
  for (std::size_t z = 0; z < fresh.size(); ++z) {
    spawned_this_step_ += static_cast<long>(fresh[z].size());
    auto& queue = world_.waiting[z];
    queue.insert(queue.end(), fresh[z].begin(), fresh[z].end());
    world_.demand_seen[z] = static_cast<long>(queue.size());
  }
  hour_spawned_ = true;
}

void SavEnv::match_clients(InfoMap& info) {
  // clients in global arrival order
  std::vector<std::pair<long, std::pair<int, std::size_t>>> order;
  for (int z = 0; z < world_.grid.n_zones(); ++z) {
    const auto& q = world_.waiting[static_cast<std::size_t>(z)];
    for (std::size_t i = 0; i < q.size(); ++i) order.push_back({q[i].id, {z, i}});
  }
  std::sort(order.begin(), order.end());

  long served = 0;
  std::vector<std::vector<std::size_t>> taken(world_.waiting.size());
  for (const auto& [cid, where] : order) {
    const auto [zone, index] = where;
    const ClientRequest& client = world_.waiting[static_cast<std::size_t>(zone)][index];
    // nearest available vehicle within the matching radius, ties by id
    int best = -1;
    int best_hops = 0;
    for (const auto& v : world_.vehicles) {
      if (v.status != VehicleStatus::kIdle && v.status != VehicleStatus::kParked) continue;
      const int h = world_.grid.hops(v.zone, client.origin);
      if (static_cast<double>(h) > cfg_.matching_radius_hops + 1e-9) continue;
      if (best < 0 || h < best_hops) {
        best = v.id;
        best_hops = h;
      }
    }
    if (best < 0) continue;
    Vehicle& v = world_.vehicles[static_cast<std::size_t>(best)];
    if (v.status == VehicleStatus::kParked) {
      --world_.parked_count[static_cast<std::size_t>(v.zone)];  // unparking is free
    }
    const double pickup_hours = world_.grid.travel_hours(v.zone, client.origin);
    v.empty_miles_step += world_.grid.travel_miles(v.zone, client.origin);
    const double trip_hours = world_.grid.travel_hours(client.origin, client.destination);
    v.status = VehicleStatus::kServing;
    v.busy_until = world_.clock + hours_to_steps(pickup_hours + trip_hours);
    v.zone = client.destination;
    taken[static_cast<std::size_t>(zone)].push_back(index);
    ++served;
  }
  // compact the queues (serving removes the client from the waiting set)
  for (std::size_t z = 0; z < world_.waiting.size(); ++z) {
    if (taken[z].empty()) continue;
    std::vector<ClientRequest> rest;
    rest.reserve(world_.waiting[z].size() - taken[z].size());
    std::size_t t = 0;
    for (std::size_t i = 0; i < world_.waiting[z].size(); ++i) {
      if (t < taken[z].size() && taken[z][t] == i) {
        ++t;
        continue;
      }
      rest.push_back(world_.waiting[z][i]);
    }
    world_.waiting[z] = std::move(rest);
  }
  info["served"] = static_cast<double>(served);
}

void SavEnv::apply_directive(const RelocationDirective& directive) {
  const int n = world_.grid.n_zones();
  const int width = action_space_size(cfg_.mode, n);
  if (directive.mode != cfg_.mode) {
    throw std::invalid_argument("step: directive action-space mode does not match the env");
  }
  if (static_cast<int>(directive.rows.size()) != n) {
    throw std::invalid_argument("step: directive must have one row per zone");
  }
  for (const auto& row : directive.rows) {
    if (static_cast<int>(row.size()) != width) {
      throw std::invalid_argument("step: directive row width does not match the action space");
    }
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw std::invalid_argument("step: directive row has a negative or non-finite entry");
      }
      sum += p;
    }
    if (sum <= 0.0) throw std::invalid_argument("step: directive row sums to zero");
  }

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  last_actions_.clear();
  for (auto& v : world_.vehicles) {
    if (v.status != VehicleStatus::kIdle && v.status != VehicleStatus::kParked) continue;
    const auto& row = directive.rows[static_cast<std::size_t>(v.zone)];
    double sum = 0.0;
    for (double p : row) sum += p;
    const double u = unif(rng_) * sum;
    double acc = 0.0;
    int local = static_cast<int>(row.size()) - 1;
    for (std::size_t a = 0; a < row.size(); ++a) {
      acc += row[a];
      if (u < acc) {
        local = static_cast<int>(a);
        break;
      }
    }
    last_actions_.push_back(v.zone * width + local);
    const int target = expand_action(cfg_.mode, v.zone, local, table_);
    if (target == v.zone) {
      // own zone means "park here"; overflow stays idle at zero fee
      if (v.status == VehicleStatus::kIdle &&
          world_.parked_count[static_cast<std::size_t>(v.zone)] <
              world_.grid.parking_capacity[static_cast<std::size_t>(v.zone)]) {
        v.status = VehicleStatus::kParked;
        ++world_.parked_count[static_cast<std::size_t>(v.zone)];
      }
      continue;
    }
    if (v.status == VehicleStatus::kParked) {
      --world_.parked_count[static_cast<std::size_t>(v.zone)];
      v.status = VehicleStatus::kIdle;
    }
    v.empty_miles_step += world_.grid.travel_miles(v.zone, target);
    v.status = VehicleStatus::kRelocating;
    v.busy_until = world_.clock + hours_to_steps(world_.grid.travel_hours(v.zone, target));
    v.zone = target;
  }
}

void SavEnv::land_arrivals() {
  for (auto& v : world_.vehicles) {
    if ((v.status == VehicleStatus::kRelocating || v.status == VehicleStatus::kServing) &&
        v.busy_until <= world_.clock + 1) {
      v.status = VehicleStatus::kIdle;
    }
  }
}

void SavEnv::age_and_abandon(InfoMap& info) {
  long abandoned = 0;
  for (auto& queue : world_.waiting) {
    std::vector<ClientRequest> still;
    still.reserve(queue.size());
    for (auto& c : queue) {
      c.waiting_hours += 1.0;
      if (c.waiting_hours >= kAbandonHours) {
        world_.abandoned_charges.emplace_back(c.salary, kAbandonHours);
        ++abandoned;
      } else {
        still.push_back(c);
      }
    }
    queue = std::move(still);
  }
  info["abandoned"] = static_cast<double>(abandoned);
}

StepResult<Obs> SavEnv::step(const RelocationDirective& directive) {
  guard_.require_steppable();
  // fresh step accounting
  for (auto& v : world_.vehicles) v.empty_miles_step = 0.0;
  world_.abandoned_charges.clear();

  InfoMap info;
  spawn_current_hour();
  info["spawned"] = static_cast<double>(spawned_this_step_);
  match_clients(info);
  apply_directive(directive);
  land_arrivals();
  age_and_abandon(info);

  ++world_.clock;
  hour_spawned_ = false;
  const bool done = world_.clock >= cfg_.episode_length;

  const RewardParts parts = compute_reward_parts(world_);
  info["cost_waiting"] = parts.waiting;
  info["cost_gas"] = parts.gas;
  info["cost_parking"] = parts.parking;
  info["queue_len"] = static_cast<double>(world_.queue_size());
  long idle = 0, parked = 0, serving = 0, relocating = 0;
  for (const auto& v : world_.vehicles) {
    switch (v.status) {
      case VehicleStatus::kIdle: ++idle; break;
      case VehicleStatus::kParked: ++parked; break;
      case VehicleStatus::kServing: ++serving; break;
      case VehicleStatus::kRelocating: ++relocating; break;
    }
  }
  info["n_idle"] = static_cast<double>(idle);
  info["n_parked"] = static_cast<double>(parked);
  info["n_serving"] = static_cast<double>(serving);
  info["n_relocating"] = static_cast<double>(relocating);

  guard_.on_step(done);
  return {encode_state(world_), parts.total(), done, std::move(info)};
}

void SavEnv::close() {
  world_.vehicles.clear();
  world_.waiting.clear();
  world_.parked_count.clear();
  guard_.on_close();
}

}  // namespace savrl
