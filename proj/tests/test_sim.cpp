#include "vcc/sim.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace vcc;

namespace {

// Distance (m) at which a link of the given power and bandwidth runs at `rate_bps`.
double distance_for_rate(double rate_bps, double bandwidth_hz, double tx_dbm, double noise_dbm, const RadioParams& p)
{
    const double snr_db = 10.0 * std::log10(std::pow(2.0, rate_bps / bandwidth_hz) - 1.0);
    const double loss = tx_dbm - noise_dbm - snr_db;
    const double at_1km = path_loss_db(1.0, p);
    const double slope = 40.0 * (1.0 - 4e-3 * p.antenna_height_m);
    return 1000.0 * std::pow(10.0, (loss - at_1km) / slope);
}

// Two 1 km zones on one road; zone 0 is centered on the origin. RSU 0 offloads
// zone 0 at 6 Mbit/s and forwards to RSU 1 at 8 Mbit/s; RSU 2 is out of reach.
Scenario worked_scenario()
{
    Scenario s;
    s.grid = RoadGrid{1, 2, 1000.0, 10.0, 0.0, {-500.0, -5.0}};
    const RadioParams& p = s.radio;
    const double dv = distance_for_rate(6e6, p.zone_bandwidth_hz, p.vehicle_tx_power_dbm, p.noise_power_v2i_dbm, p);
    const double dr = distance_for_rate(8e6, p.rsu_bandwidth_hz, p.rsu_tx_power_dbm, p.noise_power_r2r_dbm, p);
    s.rsus = {{0.0, dv}, {0.0, dv + dr}, {0.0, -400.0}};
    s.compute.rsu_capacity.assign(3, 8e9);
    s.compute.cycles_per_bit = 4000.0;
    s.traffic.vehicles = 1;
    s.traffic.speed_limits_mps = {0.0};
    s.traffic.arrival_rate = 0.0;
    s.horizon = 5;
    return s;
}

std::unique_ptr<Mobility> trace(const RoadGrid& g, std::vector<TraceSample> samples)
{
    return std::make_unique<TraceMobility>(g, std::move(samples));
}

Assignment assign_all(std::size_t zones, ZoneDecision d) { return Assignment{std::vector<ZoneDecision>(zones, d)}; }

Assignment random_assignment(const Scenario& s, std::mt19937_64& rng)
{
    std::uniform_int_distribution<std::size_t> rsu(0, s.rsu_count() - 1);
    std::bernoulli_distribution coin(0.5);
    Assignment a;
    for (std::size_t z = 0; z < s.zone_count(); ++z)
        a.zones.push_back({rsu(rng), rsu(rng), coin(rng) ? DeliverVia::Receiver : DeliverVia::Helper});
    return a;
}

} // namespace

TEST_CASE("worked task succeeds with its service time as cost")
{
    const Scenario s = worked_scenario();
    Environment env(s);
    env.reset(1, trace(s.grid, {{0.0, 0, {0.0, 0.0}}, {100.0, 0, {0.0, 0.0}}}));
    env.set_arrivals({{0, 0, 8e6}});
    const SlotOutcome out = env.step(assign_all(2, {0, 1, DeliverVia::Receiver}));
    REQUIRE(out.tasks.size() == 1);
    const TaskRecord& r = out.tasks[0];
    CHECK(r.scheduled);
    CHECK(r.success);
    CHECK_FALSE(r.dwell_exceeded);
    CHECK(r.partition == doctest::Approx(5.0 / 9.0).epsilon(1e-9));
    CHECK(out.cost == doctest::Approx(32.0 / 9.0).epsilon(1e-9));
    CHECK(out.next.backlog_s[0] == doctest::Approx(32.0 / 9.0 - 1.0).epsilon(1e-9));
}

TEST_CASE("infeasible offload is charged the failure penalty")
{
    const Scenario s = worked_scenario();
    Environment env(s);
    env.reset(1, trace(s.grid, {{0.0, 0, {0.0, 0.0}}, {100.0, 0, {0.0, 0.0}}}));
    env.set_arrivals({{0, 0, 8e6}});
    const SlotOutcome out = env.step(assign_all(2, {1, 1, DeliverVia::Receiver}));
    CHECK_FALSE(out.tasks[0].offload_ok);
    CHECK_FALSE(out.tasks[0].scheduled);
    CHECK(out.cost == doctest::Approx(400.0));
    CHECK(out.next.backlog_s == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("a vehicle that leaves coverage before delivery fails the task")
{
    const Scenario s = worked_scenario();
    Environment env(s);
    env.reset(1, trace(s.grid, {{0.0, 0, {0.0, 0.0}}, {2.0, 0, {1000.0, 0.0}}}));
    env.set_arrivals({{0, 0, 8e6}});
    const SlotOutcome out = env.step(assign_all(2, {0, 1, DeliverVia::Receiver}));
    CHECK(out.tasks[0].scheduled);
    CHECK_FALSE(out.tasks[0].success);
    CHECK(out.tasks[0].dwell_exceeded);
    CHECK(out.cost == doctest::Approx(400.0));
    // The failed task still occupied its servers.
    CHECK(out.next.backlog_s[0] > 0.0);
}

TEST_CASE("every contributing vehicle must be reachable at delivery")
{
    const Scenario s = worked_scenario();
    Environment env(s);
    env.reset(1, trace(s.grid, {{0.0, 0, {0.0, 0.0}}, {100.0, 0, {0.0, 0.0}},
                                {0.0, 1, {0.0, 0.0}}, {2.0, 1, {1000.0, 0.0}}}));
    env.set_arrivals({{0, 0, 4e6}, {1, 0, 4e6}});
    const SlotOutcome out = env.step(assign_all(2, {0, 1, DeliverVia::Receiver}));
    CHECK(out.tasks[0].vehicles == 2);
    CHECK_FALSE(out.tasks[0].success);
}

TEST_CASE("no tasks: zero cost and draining backlogs")
{
    Scenario s = desk_scenario();
    s.traffic.vehicles = 0;
    Environment env(s);
    const SlotState s0 = env.reset(3);
    CHECK(s0.backlog_s == std::vector<double>{0.0, 0.0, 0.0});
    env.set_backlog({2.5, 0.4, 0.0});
    const SlotOutcome out = env.step(assign_all(9, {0, 0, DeliverVia::Receiver}));
    CHECK(out.cost == 0.0);
    CHECK(out.tasks.empty());
    CHECK(out.next.backlog_s[0] == doctest::Approx(1.5));
    CHECK(out.next.backlog_s[1] == 0.0);
    SlotState st = out.next;
    while (!env.done()) {
        st = env.step(assign_all(9, {1, 2, DeliverVia::Helper})).next;
        for (double w : st.workload_bits)
            CHECK(w == 0.0);
    }
}

TEST_CASE("desk scenario coverage")
{
    const Scenario s = desk_scenario();
    const Geometry g = s.geometry();
    for (std::size_t z = 0; z < s.zone_count(); ++z) {
        bool any = false;
        for (std::size_t r = 0; r < s.rsu_count(); ++r)
            any = any || offload_feasible(z, r, g, s.radio);
        CHECK(any);
        CHECK(deliver_feasible(z, 2, g, s.radio));
    }
    for (std::size_t a = 0; a < s.rsu_count(); ++a)
        for (std::size_t b = 0; b < s.rsu_count(); ++b)
            CHECK(forward_feasible(a, b, g, s.radio));
}

TEST_CASE("trajectory invariants under random assignments")
{
    const Scenario s = desk_scenario();
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        Environment env(s), twin(s);
        SlotState st = env.reset(seed);
        CHECK(twin.reset(seed) == st);
        std::mt19937_64 rng(seed + 100);
        while (!env.done()) {
            const Assignment a = random_assignment(s, rng);
            const auto& arrivals = env.arrivals();
            double generated = 0.0;
            for (const auto& x : arrivals)
                generated += x.bits;

            const SlotOutcome out = env.step(a);
            const SlotOutcome tw = twin.step(a);
            CHECK(tw.next == out.next);
            CHECK(tw.cost == out.cost);

            double recorded = 0.0, cost = 0.0;
            for (const auto& r : out.tasks) {
                recorded += r.workload_bits;
                cost += r.success ? r.service_time : s.penalty_per_bit * r.workload_bits;
                CHECK(r.workload_bits > 0.0);
                if (!r.scheduled)
                    CHECK_FALSE(r.success);
            }
            CHECK(recorded == doctest::Approx(generated).epsilon(1e-12));
            CHECK(out.cost == doctest::Approx(cost).epsilon(1e-12));
            CHECK(out.next.backlog_s == out.schedule.backlog_out);
            st = out.next;
        }
    }
}

TEST_CASE("a deliverer covering every zone never fails")
{
    const Scenario s = desk_scenario();
    const Geometry g = s.geometry();
    Environment env(s);
    env.reset(9);
    std::size_t tasks = 0;
    while (!env.done()) {
        Assignment a;
        for (std::size_t z = 0; z < s.zone_count(); ++z)
            a.zones.push_back({strongest_rsu(z, g, s.radio), 2, DeliverVia::Helper});
        for (const auto& r : env.step(a).tasks) {
            ++tasks;
            CHECK(r.success);
        }
    }
    CHECK(tasks > 0);
}

TEST_CASE("a deliverer out of reach always fails")
{
    Scenario s = worked_scenario();
    s.rsus[2] = {0.0, -5000.0};
    Environment env(s);
    env.reset(1, trace(s.grid, {{0.0, 0, {0.0, 0.0}}, {100.0, 0, {0.0, 0.0}}}));
    env.set_arrivals({{0, 0, 3e6}});
    const SlotOutcome out = env.step(assign_all(2, {0, 2, DeliverVia::Helper}));
    CHECK_FALSE(out.tasks[0].success);
}

TEST_CASE("task generation")
{
    const Scenario s = desk_scenario();
    std::mt19937_64 rng(5);
    std::vector<VehicleState> vehicles(20);
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
        vehicles[i].id = i;
        vehicles[i].zone = i % 9;
    }
    TrafficParams off = s.traffic;
    off.arrival_rate = 0.0;
    CHECK(generate_arrivals(vehicles, off, 1.0, rng).empty());

    const int slots = 10000;
    double total = 0.0;
    for (int k = 0; k < slots; ++k)
        for (const auto& a : generate_arrivals(vehicles, s.traffic, 1.0, rng)) {
            // One record per vehicle sums its k >= 1 tasks of 2..5 Mbit each.
            CHECK(a.bits >= 2e6);
            CHECK(std::ceil(a.bits / 5e6) <= std::floor(a.bits / 2e6));
            CHECK(a.zone == vehicles[a.vehicle].zone);
            total += a.bits;
        }
    const double mean = 20 * 0.1 * 3.5e6;
    const double var_per_slot = 20 * 0.1 * (0.75e12 + 3.5e6 * 3.5e6);
    CHECK(std::abs(total / slots - mean) <= 3.0 * std::sqrt(var_per_slot / slots));

    const auto grid = aggregate_workload({{0, 4, 3e6}}, 9);
    CHECK(grid[4] == 3e6);
    CHECK(grid[3] == 0.0);
}

TEST_CASE("malformed assignments are rejected")
{
    Environment env(desk_scenario());
    CHECK_THROWS_AS(env.step(assign_all(9, {0, 0, DeliverVia::Receiver})), std::logic_error);
    env.reset(1);
    CHECK_THROWS_AS(env.step(assign_all(8, {0, 0, DeliverVia::Receiver})), std::invalid_argument);
    CHECK_THROWS_AS(env.step(assign_all(9, {0, 3, DeliverVia::Receiver})), std::invalid_argument);
    CHECK_THROWS_AS(env.set_backlog({1.0}), std::invalid_argument);
}

TEST_CASE("scenario validation")
{
    Scenario s = desk_scenario();
    s.traffic.speed_limits_mps = {10.0};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = desk_scenario();
    s.compute.rsu_capacity.pop_back();
    CHECK_THROWS_AS(Environment{s}, std::invalid_argument);
    CHECK_NOTHROW(paper_scenario().validate());
}
