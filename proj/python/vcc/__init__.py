"""Python bindings for the vcc task partition, scheduling and learning library."""

from ._vcc import (
    ComputeParams,
    ConfigError,
    DeliverVia,
    RadioParams,
    Schedule,
    Task,
    TpsaInstance,
    brute_force_schedule,
    compare_baselines,
    completion_times,
    optimal_partition,
    path_loss_db,
    random_schedule,
    run_study,
    shannon_rate,
    tpsa_bench,
    tpsa_schedule,
)

__all__ = [
    "ComputeParams",
    "ConfigError",
    "DeliverVia",
    "RadioParams",
    "Schedule",
    "Task",
    "TpsaInstance",
    "brute_force_schedule",
    "compare_baselines",
    "completion_times",
    "optimal_partition",
    "path_loss_db",
    "random_schedule",
    "run_study",
    "shannon_rate",
    "tpsa_bench",
    "tpsa_schedule",
]
