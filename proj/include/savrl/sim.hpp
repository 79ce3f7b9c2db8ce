#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "savrl/mdp.hpp"
#include "savrl/policies.hpp"
#include "savrl/rng.hpp"
#include "savrl/zones.hpp"

namespace savrl {

enum class VehicleStatus { kIdle, kRelocating, kServing, kParked };

const char* to_string(VehicleStatus s);

struct Vehicle {
  int id = 0;
  // Zone the vehicle is committed to: its location when idle/parked, its
  // destination while relocating or serving.
  int zone = 0;
  VehicleStatus status = VehicleStatus::kIdle;
  int busy_until = 0;            // absolute hour the current movement ends
  double empty_miles_step = 0.0; // empty miles accrued this step
};

struct ClientRequest {
  long id = 0;
  int origin = 0;
  int destination = 0;
  double salary = 0.0;        // currency per hour
  int request_hour = 0;
  double waiting_hours = 0.0; // abandonment at 24
};

struct SimConfig {
  int fleet_size = 60;
  double gas_price = 0.20;          // currency per mile
  double demand_scale = 1.0;
  int episode_length = 168;         // hourly steps, 7 days
  double matching_radius_hops = 1.0;  // max pickup distance in grid hops
  std::uint64_t seed = 1;
  ActionSpaceMode mode = ActionSpaceMode::kFourNearest;
};

// Throws std::invalid_argument naming each broken field.
void validate_config(const SimConfig& cfg);

// Full simulator state. Reward accounting reads the waiting queues, the
// vehicles' per-step empty miles, the parked set and the step's abandonment
// charges, so a synthetic world can be assembled field by field.
struct SimWorld {
  ZoneGrid grid;
  double gas_price = 0.20;
  std::vector<Vehicle> vehicles;
  std::vector<std::vector<ClientRequest>> waiting;  // per zone, arrival order
  std::vector<int> parked_count;                    // per zone
  int clock = 0;
  // per-zone demand seen this hour (new requests plus carried-over queue),
  // snapshotted before matching; the observation's demand shares read this
  std::vector<long> demand_seen;
  // clients that hit the 24h cap this step: (salary, final waiting hours)
  std::vector<std::pair<double, double>> abandoned_charges;

  std::size_t queue_size() const;
};

struct RewardParts {
  double waiting = 0.0;
  double gas = 0.0;
  double parking = 0.0;
  double total() const { return -(waiting + gas + parking); }
};

// Global reward: minus the sum of (mean waiting cost over waiting clients,
// mean empty-travel gas cost over vehicles that moved empty this step, mean
// parking fee over parked vehicles). A term with an empty set contributes 0.
RewardParts compute_reward_parts(const SimWorld& world);
double compute_reward(const SimWorld& world);

// 3n observation: demand shares, SAV shares, then available parking counts.
Obs encode_state(const SimWorld& world);

// Per-zone Poisson draws at rate profile[zone][hour mod 24] * scale.
// Destinations are sampled proportional to the destination zones' current
// hour rate (origin excluded); salaries are log-normal, median 25/h.
std::vector<std::vector<ClientRequest>> spawn_demand(const ZoneGrid& grid, int hour,
                                                     double scale, RngEngine& rng,
                                                     long* next_client_id = nullptr);

// The hourly fleet environment. Step order: spawn this hour's requests
// (reset pre-spawns hour 0), match waiting clients to idle/parked vehicles
// nearest-first, apply the relocation directive to idle and parked vehicles
// (one sample per vehicle from its zone's row; own zone means park), land
// finished movements, age and abandon clients, then advance the clock and
// compute the reward.
class SavEnv : public Env<Obs, RelocationDirective> {
 public:
  SavEnv(ZoneGrid grid, SimConfig cfg);

  Obs reset() override;
  StepResult<Obs> step(const RelocationDirective& directive) override;
  void close() override;

  const SimWorld& world() const { return world_; }
  const SimConfig& config() const { return cfg_; }
  const NeighborTable& neighbors() const { return table_; }
  int n_zones() const { return world_.grid.n_zones(); }
  int obs_size() const { return 3 * n_zones(); }

  // Local actions executed by the last step's idle/parked vehicles, one
  // entry per vehicle, encoded as zone * action_width + local_action. This
  // is what the learners treat as the step's realized decisions.
  const std::vector<int>& last_actions() const { return last_actions_; }

 private:
  void spawn_current_hour();
  void match_clients(InfoMap& info);
  void apply_directive(const RelocationDirective& directive);
  void land_arrivals();
  void age_and_abandon(InfoMap& info);

  SimConfig cfg_;
  SimWorld world_;
  NeighborTable table_;
  RngEngine rng_;
  EnvGuard guard_;
  bool hour_spawned_ = false;
  long next_client_id_ = 0;
  long spawned_this_step_ = 0;
  std::vector<int> last_actions_;
};

}  // namespace savrl
