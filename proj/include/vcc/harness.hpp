#pragma once

#include "vcc/agents.hpp"
#include "vcc/config.hpp"
#include "vcc/sim.hpp"
#include "vcc/tpsa.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace vcc {

inline constexpr int kCsvFormatVersion = 1;

enum class StudyKind { TpsaBench, Train, Evaluate, Compare };

StudyKind parse_study(const std::string& name);
std::string to_string(StudyKind kind);

/// Resolved experiment: the merged JSON document plus the fields every study needs.
struct ExperimentConfig {
    Json doc;
    std::string config_path;
    StudyKind study = StudyKind::Compare;
    std::string agent = "ddpg";
    std::vector<std::uint64_t> seeds;
    std::string out_dir = "out";
    std::vector<std::string> overrides;

    /// Throws ConfigError when a referenced file is missing or a field is invalid.
    void validate() const;
    std::string hash() const { return config_hash(doc); }
    Scenario scenario() const;
    DdpgConfig ddpg() const;
    /// evaluation.checkpoint, or <out_dir>/checkpoint.
    std::string checkpoint_dir() const;
};

/// Builds an experiment from an optional file, `key=value` overrides and CLI flags.
/// `--seed N` replaces the seed list with N, N+1, ... keeping its length.
ExperimentConfig make_experiment(StudyKind study, const std::string& config_path,
                                 const std::vector<std::string>& overrides,
                                 std::optional<std::uint64_t> seed = std::nullopt,
                                 std::optional<std::string> out_dir = std::nullopt, bool paper_shapes = false);

/// `# format=1 config_hash=... seeds=...`
std::string csv_header_comment(const std::string& hash, const std::vector<std::uint64_t>& seeds);

/// Mixes two integers into an independent stream seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// ---------------------------------------------------------------- benchmark

struct BenchSettings {
    std::vector<std::size_t> task_counts{1, 2, 3, 4, 5, 6, 7, 8};
    std::size_t rounds = 200;
    std::size_t warmup = 5;
    std::size_t servers = 5;
    double offload_rate_bps = 6.0e6;
    double forward_rate_bps = 8.0e6;
    double capacity = 8.0e9;
    double cycles_per_bit = 4000.0;
    double size_min_bits = 1.0e6;
    double size_max_bits = 21.0e6;
    std::size_t brute_force_cap = 9;
    bool timing = true;
    std::uint64_t seed = 1;
};

BenchSettings bench_from_json(const Json& j);

/// One instance of the benchmark distribution: uniform sizes, receiver and
/// helper drawn independently and uniformly, empty queues.
TpsaInstance sample_bench_instance(const BenchSettings& settings, std::size_t n, std::mt19937_64& rng);

struct BenchRow {
    std::size_t n_tasks = 0;
    std::string scheme;
    double mean_total_service_s = 0.0;
    double runtime_us = 0.0; // median over timed rounds
    std::size_t max_iterations = 0;
};

std::vector<BenchRow> run_tpsa_bench(const BenchSettings& settings, std::ostream* notices = nullptr);
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows, const std::string& header);

// ----------------------------------------------------------------- training

struct EpisodeSummary {
    std::size_t episode = 0;
    std::size_t step = 0;
    double mean_cost = 0.0;
    double critic_loss = 0.0;
    double actor_objective = 0.0;
    double noise_scale = 0.0;
};

using EpisodeCallback = std::function<void(const EpisodeSummary&)>;

/// Runs `episodes` training episodes. Episodes without an update repeat the
/// previous loss and objective.
std::vector<EpisodeSummary> run_training(DdpgTrainer& trainer, const Scenario& scenario, std::size_t episodes,
                                         std::uint64_t seed, const EpisodeCallback& on_episode = {});

void write_training_csv(std::ostream& out, const std::vector<EpisodeSummary>& log, const std::string& header);

// --------------------------------------------------------------- evaluation

/// Known policy names: greedy, greedy_tpsa, random_tpsa, ddpg.
bool is_known_policy(const std::string& name);

/// Baseline policies; `ddpg` requires `agent`. Throws ConfigError on an unknown name.
Policy make_policy(const std::string& name, const Scenario& scenario, std::uint64_t seed,
                   const DdpgAgent* agent = nullptr);

struct SlotMetrics {
    std::size_t t = 0;
    double total_cost = 0.0;
    std::size_t n_tasks = 0;
    std::size_t n_failures = 0;
    double total_bits = 0.0;
    double mean_service_s = 0.0; // over successful tasks
};

SlotMetrics slot_metrics(const SlotOutcome& outcome);

struct EpisodeMetrics {
    double mean_cost = 0.0; // per slot
    std::size_t tasks = 0;
    std::size_t failures = 0;
    double generated_bits = 0.0;
    double computed_bits = 0.0;
    double failed_bits = 0.0;
    double success_service_s = 0.0;
};

EpisodeMetrics episode_metrics(const EpisodeRecord& record);

struct CompareRow {
    double arrival_rate = 0.0;
    std::string policy;
    double mean_cost = 0.0;
    double failure_pct = 0.0;
    double computed_mbit = 0.0;
    double failed_mbit = 0.0;
    double generated_mbit = 0.0;
    double delay_per_mbit_s = 0.0;
};

/// Ordered reduction of per-seed metrics into one row.
CompareRow reduce_metrics(double arrival_rate, const std::string& policy, const std::vector<EpisodeMetrics>& per_seed);

struct CompareSettings {
    std::vector<double> arrival_rates{0.05, 0.1, 0.15, 0.2};
    std::vector<std::string> policies{"greedy", "greedy_tpsa", "random_tpsa", "ddpg"};
    std::size_t threads = 0; // 0: hardware concurrency
};

CompareSettings compare_from_json(const Json& j);

/// Runs every (rate, policy, seed) episode concurrently and reduces by seed order.
std::vector<CompareRow> run_compare(const Scenario& scenario, const CompareSettings& settings,
                                    const std::vector<std::uint64_t>& seeds, const DdpgAgent* agent);

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows, const std::string& header);
void write_slot_csv(std::ostream& out, const std::vector<SlotMetrics>& rows, const std::string& header);

// ---------------------------------------------------------- study entry points

/// Each writes its CSVs (and checkpoints for training) under config.out_dir and
/// returns the paths written. Progress goes to `log` when given.
std::vector<std::string> run_study(const ExperimentConfig& config, std::ostream* log = nullptr);

} // namespace vcc
