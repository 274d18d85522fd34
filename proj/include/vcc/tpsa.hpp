#pragma once

#include "vcc/latency.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace vcc {

/// One slot's partition-and-scheduling problem: tasks with fixed receiver and
/// helper selections, plus the residual work each RSU carries into the slot.
struct TpsaInstance {
    TaskBatch tasks;
    std::vector<double> backlog_in;
    ComputeParams params;

    void validate() const;
};

/// Optimal share of a task kept at its receiver when nothing is queued behind
/// it, given the times at which the receiver and helper become free. Equalizes
/// the two completion times and clamps the result to [0, 1].
double optimal_partition(const Task& task, double queue_receiver, double queue_helper, const ComputeParams& params);

struct TpsaOptions {
    // Score x == 1 by the helper's and x == 0 by the receiver's candidate
    // completion, as Algorithm 1 lines 10-11 are printed. Off by default.
    bool score_as_printed = false;
};

struct TpsaStats {
    std::size_t iterations = 0; // candidate evaluations
};

/// Greedy scheduler: each round evaluates every unscheduled task against the
/// current RSU availability and commits the one with the smallest score.
Schedule tpsa_schedule(const TpsaInstance& instance, const TpsaOptions& options = {}, TpsaStats* stats = nullptr);

/// Exhaustive search over task priority sequences, applying the optimal
/// partition to each task as it is placed. Throws std::length_error when the
/// instance has more than `max_tasks` non-empty tasks.
Schedule brute_force_schedule(const TpsaInstance& instance, std::size_t max_tasks = 9);

/// Uniformly random priority sequence with the optimal partition per task.
Schedule random_schedule(const TpsaInstance& instance, std::uint64_t seed);

/// Materializes a priority sequence (task indices) into per-RSU orders and
/// sequential optimal partitions, then evaluates it. A non-NaN entry of
/// `forced_partition` replaces that task's optimal partition; later tasks still
/// adapt to the resulting queues.
Schedule schedule_in_sequence(const TpsaInstance& instance, const std::vector<std::size_t>& sequence,
                              std::span<const double> forced_partition = {});

} // namespace vcc
