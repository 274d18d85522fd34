#include "vcc/tpsa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace vcc {

void TpsaInstance::validate() const
{
    params.validate();
    if (backlog_in.size() != params.rsu_count())
        throw std::invalid_argument("expected one backlog entry per RSU");
    for (double b : backlog_in)
        if (!(b >= 0.0))
            throw std::invalid_argument("backlog must be non-negative");
    for (const Task& t : tasks) {
        if (!(t.workload_bits >= 0.0))
            throw std::invalid_argument("workload must be non-negative");
        if (t.receiver >= params.rsu_count() || t.helper >= params.rsu_count())
            throw std::invalid_argument("task references an unknown RSU");
    }
}

double optimal_partition(const Task& task, double queue_receiver, double queue_helper, const ComputeParams& params)
{
    if (!task.split() || task.workload_bits == 0.0 || !(task.forward_rate > 0.0))
        return 1.0;
    const double w = task.workload_bits;
    const double chi = params.cycles_per_bit;
    const double c_r = params.rsu_capacity.at(task.receiver);
    const double c_h = params.rsu_capacity.at(task.helper);
    const double proc_r = chi * w / c_r;
    const double proc_h = chi * w / c_h;
    const double fwd = w / task.forward_rate;
    const double offload = offload_delay(task);
    const double start_r = std::max(queue_receiver, offload);

    // Helper queue dominates the forwarded data's arrival at the equalizing split.
    const bool helper_queue_binds =
        queue_helper - start_r
        >= proc_r - chi * task.forward_rate * (queue_helper - offload) * (1.0 / c_r + 1.0 / c_h);
    double x;
    if (helper_queue_binds)
        x = (queue_helper - start_r + proc_h) / (proc_r + proc_h);
    else
        x = (offload - start_r + proc_h + fwd) / (proc_r + proc_h + fwd);
    return std::clamp(x, 0.0, 1.0);
}

namespace {

struct Placement {
    double x = 1.0;
    double completion_r = 0.0;
    double completion_h = 0.0;
};

// Places one task against the current per-RSU ready times, mirroring completion_times.
Placement place(const Task& t, const std::vector<double>& ready, const ComputeParams& params,
                double forced_x = std::numeric_limits<double>::quiet_NaN())
{
    Placement p;
    p.x = std::isnan(forced_x) ? optimal_partition(t, ready[t.receiver], ready[t.helper], params) : forced_x;
    auto at = [&](std::size_t r) {
        const double arrival = arrival_time(t, r, p.x);
        if (workload_share(t, r, p.x) == 0.0)
            return arrival;
        return std::max(arrival, ready[r]) + processing_delay(t, r, p.x, params);
    };
    p.completion_r = at(t.receiver);
    p.completion_h = t.split() ? at(t.helper) : p.completion_r;
    return p;
}

void commit(const Task& t, const Placement& p, std::vector<double>& ready,
            std::vector<std::vector<std::size_t>>& orders, std::size_t idx)
{
    if (workload_share(t, t.receiver, p.x) > 0.0)
        ready[t.receiver] = p.completion_r;
    orders[t.receiver].push_back(idx);
    if (t.split()) {
        if (workload_share(t, t.helper, p.x) > 0.0)
            ready[t.helper] = p.completion_h;
        orders[t.helper].push_back(idx);
    }
}

double score(const Task& t, const Placement& p, bool as_printed)
{
    if (!t.split())
        return p.completion_r;
    if (p.x == 1.0)
        return as_printed ? p.completion_h : p.completion_r;
    if (p.x == 0.0)
        return as_printed ? p.completion_r : p.completion_h;
    return 0.5 * (p.completion_r + p.completion_h);
}

std::vector<std::size_t> active_tasks(const TaskBatch& tasks)
{
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < tasks.size(); ++i)
        if (tasks[i].workload_bits != 0.0)
            active.push_back(i);
    return active;
}

} // namespace

Schedule schedule_in_sequence(const TpsaInstance& instance, const std::vector<std::size_t>& sequence,
                              std::span<const double> forced_partition)
{
    const auto& tasks = instance.tasks;
    if (!forced_partition.empty() && forced_partition.size() != tasks.size())
        throw std::invalid_argument("expected one forced partition entry per task");
    std::vector<double> ready(instance.backlog_in);
    std::vector<std::vector<std::size_t>> orders(instance.params.rsu_count());
    std::vector<double> partition(tasks.size(), 1.0);
    for (std::size_t idx : sequence) {
        const double forced = forced_partition.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                       : forced_partition[idx];
        const Placement p = place(tasks.at(idx), ready, instance.params, forced);
        partition[idx] = p.x;
        commit(tasks[idx], p, ready, orders, idx);
    }
    return completion_times(tasks, partition, orders, instance.backlog_in, instance.params);
}

Schedule tpsa_schedule(const TpsaInstance& instance, const TpsaOptions& options, TpsaStats* stats)
{
    instance.validate();
    const auto& tasks = instance.tasks;
    std::vector<std::size_t> pending = active_tasks(tasks);
    std::vector<double> ready(instance.backlog_in);
    std::vector<std::vector<std::size_t>> orders(instance.params.rsu_count());
    std::vector<double> partition(tasks.size(), 1.0);
    std::size_t iterations = 0;

    while (!pending.empty()) {
        std::size_t best_pos = 0;
        Placement best;
        double best_score = std::numeric_limits<double>::infinity();
        for (std::size_t pos = 0; pos < pending.size(); ++pos) {
            ++iterations;
            const Task& t = tasks[pending[pos]];
            const Placement p = place(t, ready, instance.params);
            const double q = score(t, p, options.score_as_printed);
            // pending stays sorted by index, so strict < keeps the lowest index on ties
            if (q < best_score || pos == 0) {
                best_score = q;
                best = p;
                best_pos = pos;
            }
        }
        const std::size_t idx = pending[best_pos];
        partition[idx] = best.x;
        commit(tasks[idx], best, ready, orders, idx);
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best_pos));
    }
    if (stats)
        stats->iterations = iterations;
    return completion_times(tasks, partition, orders, instance.backlog_in, instance.params);
}

namespace {

struct Search {
    const TpsaInstance& instance;
    std::vector<std::size_t> active;
    std::vector<bool> used;
    std::vector<std::size_t> prefix;
    std::vector<std::size_t> best_sequence;
    double best_total = std::numeric_limits<double>::infinity();

    void descend(const std::vector<double>& ready, double total)
    {
        if (prefix.size() == active.size()) {
            if (total < best_total) {
                best_total = total;
                best_sequence = prefix;
            }
            return;
        }
        std::vector<double> next(ready.size());
        for (std::size_t k = 0; k < active.size(); ++k) {
            if (used[k])
                continue;
            const Task& t = instance.tasks[active[k]];
            const Placement p = place(t, ready, instance.params);
            next = ready;
            if (workload_share(t, t.receiver, p.x) > 0.0)
                next[t.receiver] = p.completion_r;
            if (t.split() && workload_share(t, t.helper, p.x) > 0.0)
                next[t.helper] = p.completion_h;
            used[k] = true;
            prefix.push_back(active[k]);
            descend(next, total + std::max(p.completion_r, p.completion_h));
            prefix.pop_back();
            used[k] = false;
        }
    }
};

} // namespace

Schedule brute_force_schedule(const TpsaInstance& instance, std::size_t max_tasks)
{
    instance.validate();
    Search search{instance, active_tasks(instance.tasks), {}, {}, {}};
    if (search.active.size() > max_tasks)
        throw std::length_error("brute-force search refuses " + std::to_string(search.active.size())
                                + " tasks (cap " + std::to_string(max_tasks) + ")");
    search.used.assign(search.active.size(), false);
    search.descend(instance.backlog_in, 0.0);
    return schedule_in_sequence(instance, search.best_sequence);
}

Schedule random_schedule(const TpsaInstance& instance, std::uint64_t seed)
{
    instance.validate();
    std::vector<std::size_t> sequence = active_tasks(instance.tasks);
    std::mt19937_64 rng(seed);
    std::shuffle(sequence.begin(), sequence.end(), rng);
    return schedule_in_sequence(instance, sequence);
}

} // namespace vcc
