#pragma once

#include <cstddef>
#include <vector>

namespace vcc {

/// Which of the two serving RSUs sends the result back to the vehicles.
enum class DeliverVia { Receiver, Helper };

struct ComputeParams {
    std::vector<double> rsu_capacity; // cycles/s, one entry per RSU
    double cycles_per_bit = 1200.0;
    double slot_length_s = 1.0;

    void validate() const;
    std::size_t rsu_count() const { return rsu_capacity.size(); }
};

/// The aggregated task of one zone in one slot, with its server selection.
struct Task {
    std::size_t zone = 0;
    double workload_bits = 0.0;
    std::size_t receiver = 0;
    std::size_t helper = 0;
    DeliverVia deliver = DeliverVia::Receiver;
    double offload_rate = 0.0; // vehicles -> receiver, bit/s
    double forward_rate = 0.0; // receiver -> helper, bit/s (ignored when receiver == helper)

    bool split() const { return receiver != helper; }
    std::size_t deliver_rsu() const { return deliver == DeliverVia::Receiver ? receiver : helper; }
};

using TaskBatch = std::vector<Task>;

/// Partition, execution orders and resulting timings for one slot.
///
/// `order[r]` lists task indices in the sequence RSU r processes them. A task
/// appears once in its receiver's order and once in its helper's order (once in
/// total when the two coincide). Tasks without workload may be left out.
struct Schedule {
    std::vector<double> partition; // share processed at the receiver
    std::vector<std::vector<std::size_t>> order;
    std::vector<double> completion_receiver;
    std::vector<double> completion_helper;
    std::vector<double> service_time;
    std::vector<double> backlog_out; // per-RSU residual work carried into the next slot

    double total_service() const;
};

/// W / rate. Zero workload takes no time; a non-positive rate gives +inf.
double offload_delay(const Task& task);

/// (1 - x) W / forward rate, 0 when receiver and helper coincide.
double forward_delay(const Task& task, double x);

/// Fraction of the task's workload that lands on `rsu` under partition `x`.
double workload_share(const Task& task, std::size_t rsu, double x);

/// chi * W * share / C_rsu.
double processing_delay(const Task& task, std::size_t rsu, double x, const ComputeParams& params);

/// Time at which the task's data is available at `rsu`: the offload delay at
/// the receiver, offload plus forwarding at the helper.
double arrival_time(const Task& task, std::size_t rsu, double x);

/// Propagates queueing and computing delays through the per-RSU orders.
///
/// On each RSU the first task waits for `backlog_in`, later tasks wait for the
/// completion of the previous task holding workload there. A task completes at
/// max(arrival, queue) + processing. An RSU that holds a zero share of a task
/// (x == 1 at the helper, x == 0 at the receiver) only relays it: its completion
/// there is the arrival time and the RSU's queue does not advance.
///
/// Throws std::invalid_argument if an order is not a permutation of the tasks
/// assigned to that RSU, or if a partition lies outside [0, 1].
Schedule completion_times(const TaskBatch& batch, const std::vector<double>& partition,
                          const std::vector<std::vector<std::size_t>>& orders,
                          const std::vector<double>& backlog_in, const ComputeParams& params);

/// max(makespan - slot length, 0).
double carry_backlog(double makespan, double slot_length_s);

} // namespace vcc
