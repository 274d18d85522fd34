#include "vcc/harness.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace vcc;

namespace {

Scenario scenario_from_text(const std::string& json_text)
{
    return scenario_from_json(json_text.empty() ? Json::object() : Json::parse(json_text));
}

} // namespace

PYBIND11_MODULE(_vcc, m)
{
    m.doc() = "Vehicular edge computing: task partition and scheduling, simulation and DDPG training.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<RadioParams>(m, "RadioParams")
        .def(py::init<>())
        .def_readwrite("zone_bandwidth_hz", &RadioParams::zone_bandwidth_hz)
        .def_readwrite("rsu_bandwidth_hz", &RadioParams::rsu_bandwidth_hz)
        .def_readwrite("vehicle_tx_power_dbm", &RadioParams::vehicle_tx_power_dbm)
        .def_readwrite("rsu_tx_power_dbm", &RadioParams::rsu_tx_power_dbm);
    m.def("path_loss_db", &path_loss_db, py::arg("distance_km"), py::arg("params") = RadioParams{});
    m.def("shannon_rate", &shannon_rate, py::arg("bandwidth_hz"), py::arg("snr"));

    py::enum_<DeliverVia>(m, "DeliverVia").value("Receiver", DeliverVia::Receiver).value("Helper", DeliverVia::Helper);

    py::class_<Task>(m, "Task")
        .def(py::init<>())
        .def(py::init([](double bits, std::size_t receiver, std::size_t helper, double offload_rate,
                         double forward_rate) {
                 Task t;
                 t.workload_bits = bits;
                 t.receiver = receiver;
                 t.helper = helper;
                 t.offload_rate = offload_rate;
                 t.forward_rate = forward_rate;
                 return t;
             }),
             py::arg("workload_bits"), py::arg("receiver"), py::arg("helper"), py::arg("offload_rate"),
             py::arg("forward_rate") = 0.0)
        .def_readwrite("zone", &Task::zone)
        .def_readwrite("workload_bits", &Task::workload_bits)
        .def_readwrite("receiver", &Task::receiver)
        .def_readwrite("helper", &Task::helper)
        .def_readwrite("deliver", &Task::deliver)
        .def_readwrite("offload_rate", &Task::offload_rate)
        .def_readwrite("forward_rate", &Task::forward_rate);

    py::class_<ComputeParams>(m, "ComputeParams")
        .def(py::init<>())
        .def(py::init([](std::vector<double> capacity, double cycles_per_bit) {
                 ComputeParams p;
                 p.rsu_capacity = std::move(capacity);
                 p.cycles_per_bit = cycles_per_bit;
                 return p;
             }),
             py::arg("rsu_capacity"), py::arg("cycles_per_bit"))
        .def_readwrite("rsu_capacity", &ComputeParams::rsu_capacity)
        .def_readwrite("cycles_per_bit", &ComputeParams::cycles_per_bit)
        .def_readwrite("slot_length_s", &ComputeParams::slot_length_s);

    py::class_<Schedule>(m, "Schedule")
        .def_readonly("partition", &Schedule::partition)
        .def_readonly("order", &Schedule::order)
        .def_readonly("completion_receiver", &Schedule::completion_receiver)
        .def_readonly("completion_helper", &Schedule::completion_helper)
        .def_readonly("service_time", &Schedule::service_time)
        .def_readonly("backlog_out", &Schedule::backlog_out)
        .def_property_readonly("total_service", &Schedule::total_service);

    py::class_<TpsaInstance>(m, "TpsaInstance")
        .def(py::init([](TaskBatch tasks, std::vector<double> backlog, ComputeParams params) {
                 return TpsaInstance{std::move(tasks), std::move(backlog), std::move(params)};
             }),
             py::arg("tasks"), py::arg("backlog_in"), py::arg("params"))
        .def_readwrite("tasks", &TpsaInstance::tasks)
        .def_readwrite("backlog_in", &TpsaInstance::backlog_in)
        .def_readwrite("params", &TpsaInstance::params);

    m.def("optimal_partition", &optimal_partition, py::arg("task"), py::arg("queue_receiver"),
          py::arg("queue_helper"), py::arg("params"));
    m.def("completion_times", &completion_times, py::arg("tasks"), py::arg("partition"), py::arg("orders"),
          py::arg("backlog_in"), py::arg("params"));
    m.def(
        "tpsa_schedule",
        [](const TpsaInstance& inst) {
            TpsaStats stats;
            Schedule s = tpsa_schedule(inst, {}, &stats);
            return py::make_tuple(s, stats.iterations);
        },
        py::arg("instance"), "Returns (schedule, candidate evaluations).");
    m.def("brute_force_schedule", &brute_force_schedule, py::arg("instance"), py::arg("max_tasks") = 9);
    m.def("random_schedule", &random_schedule, py::arg("instance"), py::arg("seed"));

    m.def(
        "tpsa_bench",
        [](std::vector<std::size_t> counts, std::size_t rounds, std::uint64_t seed, bool timing) {
            BenchSettings s;
            s.task_counts = std::move(counts);
            s.rounds = rounds;
            s.seed = seed;
            s.timing = timing;
            py::list out;
            for (const auto& r : run_tpsa_bench(s)) {
                py::dict d;
                d["n_tasks"] = r.n_tasks;
                d["scheme"] = r.scheme;
                d["mean_total_service_s"] = r.mean_total_service_s;
                d["runtime_us"] = r.runtime_us;
                d["max_iterations"] = r.max_iterations;
                out.append(d);
            }
            return out;
        },
        py::arg("task_counts") = std::vector<std::size_t>{1, 2, 3, 4, 5, 6, 7, 8}, py::arg("rounds") = 200,
        py::arg("seed") = 1, py::arg("timing") = true);

    m.def(
        "compare_baselines",
        [](const std::string& scenario_json, std::vector<std::string> policies, std::vector<double> rates,
           std::vector<std::uint64_t> seeds) {
            const Scenario scenario = scenario_from_text(scenario_json);
            CompareSettings cs;
            cs.policies = std::move(policies);
            cs.arrival_rates = std::move(rates);
            std::vector<CompareRow> rows;
            {
                py::gil_scoped_release release;
                rows = run_compare(scenario, cs, seeds, nullptr);
            }
            py::list out;
            for (const auto& r : rows) {
                py::dict d;
                d["arrival_rate"] = r.arrival_rate;
                d["policy"] = r.policy;
                d["mean_cost"] = r.mean_cost;
                d["failure_pct"] = r.failure_pct;
                d["computed_mbit"] = r.computed_mbit;
                d["failed_mbit"] = r.failed_mbit;
                d["generated_mbit"] = r.generated_mbit;
                d["delay_per_mbit_s"] = r.delay_per_mbit_s;
                out.append(d);
            }
            return out;
        },
        py::arg("scenario_json") = "", py::arg("policies") = std::vector<std::string>{"greedy", "greedy_tpsa",
                                                                                          "random_tpsa"},
        py::arg("rates") = std::vector<double>{0.1}, py::arg("seeds") = std::vector<std::uint64_t>{1, 2, 3},
        "Runs the non-learning policies; the scenario is a JSON document in the config format.");

    m.def(
        "run_study",
        [](const std::string& study, const std::string& config, std::vector<std::string> overrides,
           std::optional<std::uint64_t> seed, std::optional<std::string> out, bool paper_shapes) {
            const ExperimentConfig cfg = make_experiment(parse_study(study), config, overrides, seed, out, paper_shapes);
            py::gil_scoped_release release;
            return vcc::run_study(cfg);
        },
        py::arg("study"), py::arg("config") = "", py::arg("overrides") = std::vector<std::string>{},
        py::arg("seed") = py::none(), py::arg("out") = py::none(), py::arg("paper_shapes") = false,
        "Runs tpsa-bench, train, evaluate or compare and returns the files written.");
}
