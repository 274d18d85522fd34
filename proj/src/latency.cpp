#include "vcc/latency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace vcc {

void ComputeParams::validate() const
{
    if (rsu_capacity.empty())
        throw std::invalid_argument("compute parameters need at least one RSU capacity");
    for (double c : rsu_capacity)
        if (!(c > 0.0) || !std::isfinite(c))
            throw std::invalid_argument("RSU capacities must be positive");
    if (!(cycles_per_bit > 0.0))
        throw std::invalid_argument("cycles per bit must be positive");
    if (!(slot_length_s > 0.0))
        throw std::invalid_argument("slot length must be positive");
}

double Schedule::total_service() const { return std::accumulate(service_time.begin(), service_time.end(), 0.0); }

double offload_delay(const Task& task)
{
    if (task.workload_bits == 0.0)
        return 0.0;
    if (!(task.offload_rate > 0.0))
        return std::numeric_limits<double>::infinity();
    return task.workload_bits / task.offload_rate;
}

double forward_delay(const Task& task, double x)
{
    if (!task.split())
        return 0.0;
    const double bits = (1.0 - x) * task.workload_bits;
    if (bits == 0.0)
        return 0.0;
    if (!(task.forward_rate > 0.0))
        return std::numeric_limits<double>::infinity();
    return bits / task.forward_rate;
}

double workload_share(const Task& task, std::size_t rsu, double x)
{
    if (!task.split())
        return rsu == task.receiver ? 1.0 : 0.0;
    if (rsu == task.receiver)
        return x;
    if (rsu == task.helper)
        return 1.0 - x;
    return 0.0;
}

double processing_delay(const Task& task, std::size_t rsu, double x, const ComputeParams& params)
{
    const double share = workload_share(task, rsu, x);
    return params.cycles_per_bit * task.workload_bits * share / params.rsu_capacity.at(rsu);
}

double arrival_time(const Task& task, std::size_t rsu, double x)
{
    const double offload = offload_delay(task);
    if (task.split() && rsu == task.helper)
        return offload + forward_delay(task, x);
    return offload;
}

double carry_backlog(double makespan, double slot_length_s) { return std::max(makespan - slot_length_s, 0.0); }

namespace {

void check_orders(const TaskBatch& batch, const std::vector<std::vector<std::size_t>>& orders, std::size_t rsu_count)
{
    if (orders.size() != rsu_count)
        throw std::invalid_argument("expected one execution order per RSU");
    // seen[i] counts placements of task i; each loaded task needs one per distinct server.
    std::vector<int> seen(batch.size(), 0);
    for (std::size_t r = 0; r < orders.size(); ++r) {
        for (std::size_t idx : orders[r]) {
            if (idx >= batch.size())
                throw std::invalid_argument("execution order references unknown task " + std::to_string(idx));
            const Task& t = batch[idx];
            if (r != t.receiver && r != t.helper)
                throw std::invalid_argument("task " + std::to_string(idx) + " ordered on RSU " + std::to_string(r)
                                            + " which does not serve it");
            ++seen[idx];
        }
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Task& t = batch[i];
        if (t.receiver >= rsu_count || t.helper >= rsu_count)
            throw std::invalid_argument("task " + std::to_string(i) + " references an unknown RSU");
        const int expected = t.split() ? 2 : 1;
        const bool optional = t.workload_bits == 0.0 && seen[i] == 0;
        if (!optional && seen[i] != expected)
            throw std::invalid_argument("execution orders are not a permutation: task " + std::to_string(i)
                                        + " placed " + std::to_string(seen[i]) + " times");
    }
    for (const auto& order : orders) {
        std::vector<std::size_t> sorted(order);
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("execution order lists a task twice");
    }
}

} // namespace

Schedule completion_times(const TaskBatch& batch, const std::vector<double>& partition,
                          const std::vector<std::vector<std::size_t>>& orders,
                          const std::vector<double>& backlog_in, const ComputeParams& params)
{
    const std::size_t rsus = params.rsu_count();
    if (partition.size() != batch.size())
        throw std::invalid_argument("expected one partition ratio per task");
    if (backlog_in.size() != rsus)
        throw std::invalid_argument("expected one backlog entry per RSU");
    check_orders(batch, orders, rsus);

    Schedule s;
    s.partition.resize(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double x = partition[i];
        if (!(x >= 0.0 && x <= 1.0))
            throw std::invalid_argument("partition ratio outside [0, 1]");
        s.partition[i] = batch[i].split() ? x : 1.0;
    }
    s.order = orders;
    s.completion_receiver.assign(batch.size(), 0.0);
    s.completion_helper.assign(batch.size(), 0.0);
    s.service_time.assign(batch.size(), 0.0);
    s.backlog_out.resize(rsus);

    for (std::size_t r = 0; r < rsus; ++r) {
        double ready = std::max(backlog_in[r], 0.0);
        for (std::size_t idx : orders[r]) {
            const Task& t = batch[idx];
            const double x = s.partition[idx];
            const double arrival = arrival_time(t, r, x);
            double completion;
            if (t.workload_bits == 0.0 || workload_share(t, r, x) == 0.0) {
                completion = arrival;
            } else {
                completion = std::max(arrival, ready) + processing_delay(t, r, x, params);
                ready = completion;
            }
            if (r == t.receiver)
                s.completion_receiver[idx] = completion;
            if (r == t.helper)
                s.completion_helper[idx] = completion;
        }
        s.backlog_out[r] = carry_backlog(ready, params.slot_length_s);
    }
    for (std::size_t i = 0; i < batch.size(); ++i)
        s.service_time[i] = std::max(s.completion_receiver[i], s.completion_helper[i]);
    return s;
}

} // namespace vcc
