#include "vcc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace vcc {

void Scenario::validate() const
{
    grid.validate();
    radio.validate();
    compute.validate();
    geometry().validate();
    if (compute.rsu_count() != rsus.size())
        throw std::invalid_argument("expected one computing capacity per RSU");
    if (traffic.speed_limits_mps.size() != grid.roads)
        throw std::invalid_argument("expected one speed limit per road");
    if (!(traffic.arrival_rate >= 0.0))
        throw std::invalid_argument("arrival rate must be non-negative");
    if (!(traffic.task_min_bits >= 0.0) || !(traffic.task_min_bits <= traffic.task_max_bits))
        throw std::invalid_argument("task size range must satisfy 0 <= min <= max");
    if (!(traffic.speed_factor_min >= 0.0 && traffic.speed_factor_min <= 1.0))
        throw std::invalid_argument("speed factor must lie in [0, 1]");
    for (double v : traffic.speed_limits_mps)
        if (!(v >= 0.0))
            throw std::invalid_argument("speed limits must be non-negative");
    if (!(penalty_per_bit >= 0.0))
        throw std::invalid_argument("failure penalty must be non-negative");
    if (horizon < 1)
        throw std::invalid_argument("horizon must be at least one slot");
}

Geometry Scenario::geometry() const { return Geometry{grid.zone_centers(), rsus}; }

Scenario desk_scenario()
{
    Scenario s;
    s.grid = RoadGrid{3, 3, 200.0, 10.0, 250.0, {0.0, 0.0}};
    s.rsus = {{150.0, 130.0}, {450.0, 130.0}, {300.0, 400.0}};
    s.compute.rsu_capacity.assign(3, 4.0e9);
    s.compute.cycles_per_bit = 1200.0;
    s.compute.slot_length_s = 1.0;
    s.traffic.vehicles = 20;
    s.traffic.speed_limits_mps = {13.9, 11.1, 16.7};
    return s;
}

Scenario paper_scenario()
{
    Scenario s;
    // 4 horizontal roads 240 m apart, 20 zones of 40 m each.
    s.grid = RoadGrid{4, 20, 40.0, 10.0, 240.0, {0.0, 35.0}};
    for (double y : {133.0, 400.0, 667.0})
        for (double x : {133.0, 400.0, 667.0})
            s.rsus.push_back({x, y});
    s.compute.rsu_capacity.assign(9, 16.0e9);
    s.traffic.vehicles = 200;
    s.traffic.speed_limits_mps = {13.9, 16.7, 13.9, 11.1};
    return s;
}

double task_cost(const TaskRecord& record, double penalty_per_bit)
{
    return record.success ? record.service_time : penalty_per_bit * record.workload_bits;
}

std::vector<Arrival> generate_arrivals(const std::vector<VehicleState>& vehicles, const TrafficParams& traffic,
                                       double slot_length_s, std::mt19937_64& rng)
{
    std::vector<Arrival> out;
    if (traffic.arrival_rate <= 0.0)
        return out;
    std::poisson_distribution<int> count(traffic.arrival_rate * slot_length_s);
    std::uniform_real_distribution<double> size(traffic.task_min_bits, traffic.task_max_bits);
    for (const auto& v : vehicles) {
        const int k = count(rng);
        double bits = 0.0;
        for (int i = 0; i < k; ++i)
            bits += size(rng);
        if (k > 0)
            out.push_back({v.id, v.zone, bits});
    }
    return out;
}

std::vector<double> aggregate_workload(const std::vector<Arrival>& arrivals, std::size_t zone_count)
{
    std::vector<double> grid(zone_count, 0.0);
    for (const auto& a : arrivals)
        grid.at(a.zone) += a.bits;
    return grid;
}

std::vector<double> zone_mean_speed(const std::vector<VehicleState>& vehicles, std::size_t zone_count)
{
    std::vector<double> sum(zone_count, 0.0);
    std::vector<std::size_t> n(zone_count, 0);
    for (const auto& v : vehicles) {
        sum.at(v.zone) += v.speed_mps;
        ++n[v.zone];
    }
    for (std::size_t z = 0; z < zone_count; ++z)
        if (n[z] > 0)
            sum[z] /= static_cast<double>(n[z]);
    return sum;
}

Environment::Environment(Scenario scenario) : scenario_(std::move(scenario))
{
    scenario_.validate();
    geometry_ = scenario_.geometry();
}

SlotState Environment::reset(std::uint64_t seed)
{
    rng_.seed(seed);
    std::unique_ptr<Mobility> mobility;
    const auto& traffic = scenario_.traffic;
    if (!traffic.trace_file.empty()) {
        std::ifstream in(traffic.trace_file);
        if (!in)
            throw std::runtime_error("cannot open trace file " + traffic.trace_file);
        mobility = std::make_unique<TraceMobility>(scenario_.grid, read_trace_csv(in));
    } else {
        mobility = std::make_unique<SyntheticMobility>(scenario_.grid, traffic.vehicles, traffic.speed_limits_mps,
                                                       traffic.speed_factor_min, rng_);
    }
    mobility_ = std::move(mobility);
    slot_ = 0;
    arrivals_.clear();
    state_ = SlotState{scenario_.grid.roads, scenario_.grid.segments, {}, {},
                       std::vector<double>(scenario_.rsu_count(), 0.0)};
    const auto vehicles = mobility_->snapshot(0.0);
    arrivals_ = generate_arrivals(vehicles, scenario_.traffic, scenario_.compute.slot_length_s, rng_);
    refresh_state(vehicles);
    return state_;
}

SlotState Environment::reset(std::uint64_t seed, std::unique_ptr<Mobility> mobility)
{
    rng_.seed(seed);
    mobility_ = std::move(mobility);
    slot_ = 0;
    arrivals_.clear();
    state_ = SlotState{scenario_.grid.roads, scenario_.grid.segments, {}, {},
                       std::vector<double>(scenario_.rsu_count(), 0.0)};
    const auto vehicles = mobility_->snapshot(0.0);
    arrivals_ = generate_arrivals(vehicles, scenario_.traffic, scenario_.compute.slot_length_s, rng_);
    refresh_state(vehicles);
    return state_;
}

void Environment::refresh_state(const std::vector<VehicleState>& vehicles)
{
    state_.workload_bits = aggregate_workload(arrivals_, scenario_.zone_count());
    state_.mean_speed_mps = zone_mean_speed(vehicles, scenario_.zone_count());
}

void Environment::set_arrivals(std::vector<Arrival> arrivals)
{
    for (const auto& a : arrivals)
        if (a.zone >= scenario_.zone_count() || !(a.bits >= 0.0))
            throw std::invalid_argument("arrival outside the zone grid or with negative size");
    arrivals_ = std::move(arrivals);
    state_.workload_bits = aggregate_workload(arrivals_, scenario_.zone_count());
}

void Environment::set_backlog(std::vector<double> backlog_s)
{
    if (backlog_s.size() != scenario_.rsu_count())
        throw std::invalid_argument("expected one backlog entry per RSU");
    state_.backlog_s = std::move(backlog_s);
}

SlotOutcome Environment::step(const Assignment& assignment)
{
    if (!mobility_)
        throw std::logic_error("environment stepped before reset");
    const std::size_t zones = scenario_.zone_count();
    const std::size_t rsus = scenario_.rsu_count();
    if (assignment.zones.size() != zones)
        throw std::invalid_argument("assignment must hold one decision per zone");
    for (const auto& d : assignment.zones)
        if (d.receiver >= rsus || d.helper >= rsus)
            throw std::invalid_argument("assignment references an unknown RSU");

    const double t0 = now_s();
    const auto& radio = scenario_.radio;

    std::vector<std::vector<const Arrival*>> contributors(zones);
    for (const auto& a : arrivals_)
        contributors[a.zone].push_back(&a);

    SlotOutcome out;
    out.slot = slot_;
    TpsaInstance instance;
    instance.params = scenario_.compute;
    instance.backlog_in = state_.backlog_s;
    std::vector<std::size_t> record_of_task;

    for (std::size_t z = 0; z < zones; ++z) {
        const double w = state_.workload_bits[z];
        if (w <= 0.0)
            continue;
        const ZoneDecision& d = assignment.zones[z];
        TaskRecord rec;
        rec.zone = z;
        rec.workload_bits = w;
        rec.receiver = d.receiver;
        rec.helper = d.helper;
        rec.deliver_rsu = d.deliver == DeliverVia::Receiver ? d.receiver : d.helper;
        rec.vehicles = contributors[z].size();
        rec.offload_ok = offload_feasible(z, d.receiver, geometry_, radio);
        rec.forward_ok = forward_feasible(d.receiver, d.helper, geometry_, radio);
        if (rec.offload_ok && rec.forward_ok) {
            Task t;
            t.zone = z;
            t.workload_bits = w;
            t.receiver = d.receiver;
            t.helper = d.helper;
            t.deliver = d.deliver;
            t.offload_rate = rate_v2i(z, d.receiver, geometry_, radio);
            t.forward_rate = rate_r2r(d.receiver, d.helper, geometry_, radio);
            instance.tasks.push_back(t);
            record_of_task.push_back(out.tasks.size());
            rec.scheduled = true;
        }
        out.tasks.push_back(rec);
    }

    out.schedule = tpsa_schedule(instance, scenario_.tpsa);

    for (std::size_t k = 0; k < instance.tasks.size(); ++k) {
        TaskRecord& rec = out.tasks[record_of_task[k]];
        const Task& t = instance.tasks[k];
        rec.partition = out.schedule.partition[k];
        rec.service_time = out.schedule.service_time[k];
        const double offload_done = t0 + offload_delay(t);
        const double delivered_at = t0 + rec.service_time;
        bool ok = true;
        for (const Arrival* a : contributors[rec.zone]) {
            const auto at_delivery = mobility_->locate(a->vehicle, delivered_at);
            if (!at_delivery || !deliver_feasible(at_delivery->zone, rec.deliver_rsu, geometry_, radio))
                ok = false;
            const auto at_offload = mobility_->locate(a->vehicle, offload_done);
            if (at_offload && at_offload->zone != rec.zone)
                rec.dwell_exceeded = true;
        }
        rec.success = ok;
    }

    for (const auto& rec : out.tasks)
        out.cost += task_cost(rec, scenario_.penalty_per_bit);

    ++slot_;
    const double t1 = now_s();
    const auto vehicles = mobility_->snapshot(t1);
    arrivals_ = generate_arrivals(vehicles, scenario_.traffic, scenario_.compute.slot_length_s, rng_);
    state_.backlog_s = out.schedule.backlog_out;
    refresh_state(vehicles);
    out.next = state_;
    out.done = done();
    return out;
}

} // namespace vcc
