#pragma once

#include "vcc/channel.hpp"
#include "vcc/latency.hpp"
#include "vcc/mobility.hpp"
#include "vcc/tpsa.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace vcc {

struct TrafficParams {
    std::size_t vehicles = 20;
    std::vector<double> speed_limits_mps{13.9, 11.1, 16.7}; // one per road
    double speed_factor_min = 0.7;
    double arrival_rate = 0.1; // tasks per second per vehicle
    double task_min_bits = 2.0e6;
    double task_max_bits = 5.0e6;
    std::string trace_file; // replaces the synthetic router when set
};

/// Immutable description of the simulated world.
struct Scenario {
    RoadGrid grid;
    std::vector<Point2> rsus;
    RadioParams radio;
    ComputeParams compute;
    TrafficParams traffic;
    double penalty_per_bit = 50.0e-6; // lambda, 50 per Mbit
    std::size_t horizon = 20;
    std::uint64_t seed = 1;
    TpsaOptions tpsa;

    void validate() const;
    Geometry geometry() const;
    std::size_t zone_count() const { return grid.zone_count(); }
    std::size_t rsu_count() const { return rsus.size(); }
    double mean_task_bits() const { return 0.5 * (traffic.task_min_bits + traffic.task_max_bits); }
};

/// Small world used for training and acceptance: 3 roads x 3 segments of
/// 200 m, three RSUs on the diagonal, 20 vehicles.
Scenario desk_scenario();

/// 800 m x 800 m area, nine RSUs, 200 vehicles, 40 m x 10 m zones.
Scenario paper_scenario();

/// Observation: per-zone workload and mean speed, per-RSU backlog.
struct SlotState {
    std::size_t roads = 0;
    std::size_t segments = 0;
    std::vector<double> workload_bits; // roads * segments
    std::vector<double> mean_speed_mps; // roads * segments
    std::vector<double> backlog_s;     // one per RSU

    bool operator==(const SlotState&) const = default;
};

struct ZoneDecision {
    std::size_t receiver = 0;
    std::size_t helper = 0;
    DeliverVia deliver = DeliverVia::Receiver;

    bool operator==(const ZoneDecision&) const = default;
};

struct Assignment {
    std::vector<ZoneDecision> zones;

    bool operator==(const Assignment&) const = default;
};

/// One vehicle's share of a zone task.
struct Arrival {
    std::size_t vehicle = 0;
    std::size_t zone = 0;
    double bits = 0.0;
};

struct TaskRecord {
    std::size_t zone = 0;
    double workload_bits = 0.0;
    std::size_t receiver = 0;
    std::size_t helper = 0;
    std::size_t deliver_rsu = 0;
    bool offload_ok = true;
    bool forward_ok = true;
    bool scheduled = false;
    double partition = 1.0;
    double service_time = 0.0;
    bool success = false;
    std::size_t vehicles = 0;
    bool dwell_exceeded = false; // offload outlasted some vehicle's stay in the zone
};

/// Per-task cost term: service time on success, penalty * W on failure.
double task_cost(const TaskRecord& record, double penalty_per_bit);

struct SlotOutcome {
    std::size_t slot = 0;
    double cost = 0.0;
    std::vector<TaskRecord> tasks;
    Schedule schedule;
    SlotState next;
    bool done = false;
};

/// Draws Poisson task arrivals for every vehicle over one slot.
std::vector<Arrival> generate_arrivals(const std::vector<VehicleState>& vehicles, const TrafficParams& traffic,
                                       double slot_length_s, std::mt19937_64& rng);

/// Sums arrivals into a per-zone workload grid.
std::vector<double> aggregate_workload(const std::vector<Arrival>& arrivals, std::size_t zone_count);

/// Mean speed of the vehicles in each zone (0 for empty zones).
std::vector<double> zone_mean_speed(const std::vector<VehicleState>& vehicles, std::size_t zone_count);

/// Single-threaded MDP environment. Owns its mobility model and RNG.
class Environment {
public:
    explicit Environment(Scenario scenario);

    const Scenario& scenario() const { return scenario_; }
    const Geometry& geometry() const { return geometry_; }

    /// Places vehicles, clears backlogs, draws the first slot's tasks and returns s_0.
    SlotState reset(std::uint64_t seed);
    /// Same as reset, with explicit mobility (tests, trace replay).
    SlotState reset(std::uint64_t seed, std::unique_ptr<Mobility> mobility);

    /// Applies the assignment to the current slot's tasks and advances one slot.
    /// Throws std::invalid_argument on a malformed assignment.
    SlotOutcome step(const Assignment& assignment);

    /// Replaces the current slot's arrivals. Used to force tasks in tests.
    void set_arrivals(std::vector<Arrival> arrivals);
    /// Replaces the current backlog vector.
    void set_backlog(std::vector<double> backlog_s);

    const SlotState& state() const { return state_; }
    const std::vector<Arrival>& arrivals() const { return arrivals_; }
    std::size_t slot() const { return slot_; }
    bool done() const { return slot_ >= scenario_.horizon; }
    double now_s() const { return static_cast<double>(slot_) * scenario_.compute.slot_length_s; }

private:
    void refresh_state(const std::vector<VehicleState>& vehicles);

    Scenario scenario_;
    Geometry geometry_;
    std::unique_ptr<Mobility> mobility_;
    std::mt19937_64 rng_;
    std::size_t slot_ = 0;
    std::vector<Arrival> arrivals_;
    SlotState state_;
};

} // namespace vcc
