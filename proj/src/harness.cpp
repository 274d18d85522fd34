#include "vcc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

namespace vcc {

namespace fs = std::filesystem;

StudyKind parse_study(const std::string& name)
{
    if (name == "tpsa-bench")
        return StudyKind::TpsaBench;
    if (name == "train")
        return StudyKind::Train;
    if (name == "evaluate")
        return StudyKind::Evaluate;
    if (name == "compare")
        return StudyKind::Compare;
    throw ConfigError("unknown study kind '" + name + "'");
}

std::string to_string(StudyKind kind)
{
    switch (kind) {
    case StudyKind::TpsaBench: return "tpsa-bench";
    case StudyKind::Train: return "train";
    case StudyKind::Evaluate: return "evaluate";
    case StudyKind::Compare: return "compare";
    }
    return "?";
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index)
{
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string csv_header_comment(const std::string& hash, const std::vector<std::uint64_t>& seeds)
{
    std::string s = "# format=" + std::to_string(kCsvFormatVersion) + " config_hash=" + hash + " seeds=";
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (i)
            s += ',';
        s += std::to_string(seeds[i]);
    }
    return s;
}

namespace {

std::vector<std::uint64_t> default_seeds(StudyKind study)
{
    if (study == StudyKind::Evaluate || study == StudyKind::Compare) {
        std::vector<std::uint64_t> s(10);
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = 1 + i;
        return s;
    }
    return {1};
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

ExperimentConfig make_experiment(StudyKind study, const std::string& config_path,
                                 const std::vector<std::string>& overrides, std::optional<std::uint64_t> seed,
                                 std::optional<std::string> out_dir, bool paper_shapes)
{
    ExperimentConfig cfg;
    cfg.study = study;
    cfg.config_path = config_path;
    cfg.overrides = overrides;
    cfg.doc = config_path.empty() ? Json::object() : load_config_file(config_path);
    if (!cfg.doc.is_object())
        throw ConfigError("config root must be a JSON object");
    for (const auto& o : overrides)
        apply_override(cfg.doc, o);
    if (paper_shapes)
        cfg.doc["ddpg"]["paper_shapes"] = true;

    try {
        if (cfg.doc.contains("agent"))
            cfg.agent = cfg.doc.at("agent").get<std::string>();
        cfg.seeds = cfg.doc.contains("seeds") ? cfg.doc.at("seeds").get<std::vector<std::uint64_t>>()
                                              : default_seeds(study);
        if (cfg.doc.contains("out_dir"))
            cfg.out_dir = cfg.doc.at("out_dir").get<std::string>();
    } catch (const Json::exception& e) {
        throw ConfigError(e.what());
    }
    if (seed) {
        const std::size_t n = std::max<std::size_t>(1, cfg.seeds.size());
        cfg.seeds.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            cfg.seeds[i] = *seed + i;
    }
    if (out_dir)
        cfg.out_dir = *out_dir;
    cfg.validate();
    return cfg;
}

Scenario ExperimentConfig::scenario() const
{
    return scenario_from_json(doc.contains("scenario") ? doc.at("scenario") : Json::object());
}

DdpgConfig ExperimentConfig::ddpg() const
{
    return ddpg_from_json(doc.contains("ddpg") ? doc.at("ddpg") : Json());
}

std::string ExperimentConfig::checkpoint_dir() const
{
    if (doc.contains("evaluation") && doc.at("evaluation").contains("checkpoint"))
        return doc.at("evaluation").at("checkpoint").get<std::string>();
    return (fs::path(out_dir) / "checkpoint").string();
}

void ExperimentConfig::validate() const
{
    if (seeds.empty())
        throw ConfigError("seed list is empty");
    if (out_dir.empty())
        throw ConfigError("output directory is empty");
    const Scenario s = scenario();
    if (!s.traffic.trace_file.empty() && !fs::exists(s.traffic.trace_file))
        throw ConfigError("mobility trace not found: " + s.traffic.trace_file);
    const DdpgConfig d = ddpg();
    (void)d;
    if (study == StudyKind::TpsaBench)
        (void)bench_from_json(doc.contains("bench") ? doc.at("bench") : Json::object());
    if (study == StudyKind::Evaluate && !is_known_policy(agent))
        throw ConfigError("unknown agent kind '" + agent + "'");
    if (study == StudyKind::Train && agent != "ddpg")
        throw ConfigError("only the ddpg agent can be trained");
    bool needs_checkpoint = study == StudyKind::Evaluate && agent == "ddpg";
    if (study == StudyKind::Compare) {
        const auto cs = compare_from_json(doc.contains("evaluation") ? doc.at("evaluation") : Json::object());
        needs_checkpoint = std::find(cs.policies.begin(), cs.policies.end(), "ddpg") != cs.policies.end();
    }
    if (needs_checkpoint && !fs::exists(fs::path(checkpoint_dir()) / "actor.ckpt"))
        throw ConfigError("missing checkpoint: " + (fs::path(checkpoint_dir()) / "actor.ckpt").string());
}

// ---------------------------------------------------------------- benchmark

BenchSettings bench_from_json(const Json& j)
{
    BenchSettings b;
    if (!j.is_object())
        throw ConfigError("bench section must be a JSON object");
    try {
        if (j.contains("task_counts"))
            b.task_counts = j.at("task_counts").get<std::vector<std::size_t>>();
        b.rounds = j.value("rounds", b.rounds);
        b.warmup = j.value("warmup", b.warmup);
        b.servers = j.value("servers", b.servers);
        b.offload_rate_bps = j.value("offload_rate_mbps", b.offload_rate_bps / 1e6) * 1e6;
        b.forward_rate_bps = j.value("forward_rate_mbps", b.forward_rate_bps / 1e6) * 1e6;
        b.capacity = j.value("capacity_gcps", b.capacity / 1e9) * 1e9;
        b.cycles_per_bit = j.value("gcycles_per_mbit", b.cycles_per_bit / 1e3) * 1e3;
        b.size_min_bits = j.value("size_min_mbit", b.size_min_bits / 1e6) * 1e6;
        b.size_max_bits = j.value("size_max_mbit", b.size_max_bits / 1e6) * 1e6;
        b.brute_force_cap = j.value("brute_force_cap", b.brute_force_cap);
        b.timing = j.value("timing", b.timing);
        b.seed = j.value("seed", b.seed);
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("bench: ") + e.what());
    }
    if (b.rounds == 0 || b.servers == 0 || b.task_counts.empty())
        throw ConfigError("bench: rounds, servers and task_counts must be non-empty");
    if (!(b.offload_rate_bps > 0 && b.forward_rate_bps > 0 && b.capacity > 0 && b.cycles_per_bit > 0))
        throw ConfigError("bench: rates, capacity and cycles per bit must be positive");
    if (!(b.size_min_bits > 0 && b.size_max_bits >= b.size_min_bits))
        throw ConfigError("bench: invalid task size range");
    return b;
}

TpsaInstance sample_bench_instance(const BenchSettings& s, std::size_t n, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> size(s.size_min_bits, s.size_max_bits);
    std::uniform_int_distribution<std::size_t> server(0, s.servers - 1);
    TpsaInstance inst;
    inst.params.rsu_capacity.assign(s.servers, s.capacity);
    inst.params.cycles_per_bit = s.cycles_per_bit;
    inst.backlog_in.assign(s.servers, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        Task t;
        t.zone = i;
        t.workload_bits = size(rng);
        t.receiver = server(rng);
        t.helper = server(rng);
        t.offload_rate = s.offload_rate_bps;
        t.forward_rate = s.forward_rate_bps;
        inst.tasks.push_back(t);
    }
    return inst;
}

namespace {

double median(std::vector<double> v)
{
    if (v.empty())
        return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

template <class F>
double time_us(F&& f)
{
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::micro>(t1 - t0).count();
}

} // namespace

std::vector<BenchRow> run_tpsa_bench(const BenchSettings& settings, std::ostream* notices)
{
    std::vector<BenchRow> rows;
    for (std::size_t n : settings.task_counts) {
        const bool brute = n <= settings.brute_force_cap;
        if (!brute && notices)
            *notices << "tpsa-bench: brute-force skipped for n=" << n << " (cap " << settings.brute_force_cap
                     << ")\n";
        double sum_tpsa = 0.0, sum_bf = 0.0, sum_rand = 0.0;
        std::vector<double> t_tpsa, t_bf, t_rand;
        std::size_t max_iter = 0;
        const std::size_t total = settings.rounds + (settings.timing ? settings.warmup : 0);
        for (std::size_t round = 0; round < total; ++round) {
            const bool warm = round < total - settings.rounds;
            // Warm-up rounds reuse round 0's instance so the measured rounds match
            // the untimed distribution exactly.
            const std::size_t index = warm ? 0 : round - (total - settings.rounds);
            std::mt19937_64 rng(derive_seed(derive_seed(settings.seed, n), index));
            const TpsaInstance inst = sample_bench_instance(settings, n, rng);
            const std::uint64_t random_seed = rng();

            Schedule s_tpsa, s_bf, s_rand;
            TpsaStats stats;
            const double a = time_us([&] { s_tpsa = tpsa_schedule(inst, {}, &stats); });
            const double c = time_us([&] { s_rand = random_schedule(inst, random_seed); });
            double b = 0.0;
            if (brute)
                b = time_us([&] { s_bf = brute_force_schedule(inst, settings.brute_force_cap); });
            if (warm)
                continue;
            sum_tpsa += s_tpsa.total_service();
            sum_rand += s_rand.total_service();
            if (brute)
                sum_bf += s_bf.total_service();
            max_iter = std::max(max_iter, stats.iterations);
            t_tpsa.push_back(a);
            t_rand.push_back(c);
            t_bf.push_back(b);
        }
        const double r = static_cast<double>(settings.rounds);
        auto runtime = [&](const std::vector<double>& v) { return settings.timing ? median(v) : 0.0; };
        rows.push_back({n, "tpsa", sum_tpsa / r, runtime(t_tpsa), max_iter});
        if (brute)
            rows.push_back({n, "brute_force", sum_bf / r, runtime(t_bf), 0});
        rows.push_back({n, "random", sum_rand / r, runtime(t_rand), 0});
    }
    return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows, const std::string& header)
{
    out << header << '\n' << "n_tasks,scheme,mean_total_service_s,mean_runtime_us\n";
    for (const auto& r : rows) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f", r.runtime_us);
        out << r.n_tasks << ',' << r.scheme << ',' << fmt(r.mean_total_service_s) << ',' << buf << '\n';
    }
}

// ----------------------------------------------------------------- training

std::vector<EpisodeSummary> run_training(DdpgTrainer& trainer, const Scenario& scenario, std::size_t episodes,
                                         std::uint64_t seed, const EpisodeCallback& on_episode)
{
    Environment env(scenario);
    std::vector<EpisodeSummary> log;
    log.reserve(episodes);
    for (std::size_t e = 0; e < episodes; ++e) {
        const EpisodeRecord rec = trainer.run_episode(env, derive_seed(seed, e));
        EpisodeSummary s{rec.episode, rec.global_step, rec.mean_cost, rec.critic_loss, rec.actor_objective,
                         trainer.noise_scale()};
        if (rec.train_steps == 0 && !log.empty()) {
            s.critic_loss = log.back().critic_loss;
            s.actor_objective = log.back().actor_objective;
        }
        log.push_back(s);
        if (on_episode)
            on_episode(s);
    }
    return log;
}

void write_training_csv(std::ostream& out, const std::vector<EpisodeSummary>& log, const std::string& header)
{
    out << header << '\n' << "episode,step,mean_cost,critic_loss,actor_objective,noise_scale\n";
    for (const auto& s : log)
        out << s.episode << ',' << s.step << ',' << fmt(s.mean_cost) << ',' << fmt(s.critic_loss) << ','
            << fmt(s.actor_objective) << ',' << fmt(s.noise_scale) << '\n';
}

// --------------------------------------------------------------- evaluation

bool is_known_policy(const std::string& name)
{
    return name == "greedy" || name == "greedy_tpsa" || name == "random_tpsa" || name == "ddpg";
}

Policy make_policy(const std::string& name, const Scenario& scenario, std::uint64_t seed, const DdpgAgent* agent)
{
    if (name == "greedy") {
        Assignment a = greedy_assignment(scenario);
        return [a](const SlotState&) { return a; };
    }
    if (name == "greedy_tpsa" || name == "random_tpsa") {
        auto rng = std::make_shared<std::mt19937_64>(seed);
        const bool greedy = name == "greedy_tpsa";
        return [rng, greedy, scenario](const SlotState&) {
            return greedy ? greedy_tpsa_assignment(scenario, *rng) : random_tpsa_assignment(scenario, *rng);
        };
    }
    if (name == "ddpg") {
        if (!agent)
            throw ConfigError("the ddpg policy needs a trained agent");
        return ddpg_policy(*agent);
    }
    throw ConfigError("unknown policy '" + name + "'");
}

SlotMetrics slot_metrics(const SlotOutcome& o)
{
    SlotMetrics m;
    m.t = o.slot;
    m.total_cost = o.cost;
    double service = 0.0;
    std::size_t ok = 0;
    for (const auto& r : o.tasks) {
        ++m.n_tasks;
        m.total_bits += r.workload_bits;
        if (r.success) {
            service += r.service_time;
            ++ok;
        } else {
            ++m.n_failures;
        }
    }
    m.mean_service_s = ok ? service / static_cast<double>(ok) : 0.0;
    return m;
}

EpisodeMetrics episode_metrics(const EpisodeRecord& rec)
{
    EpisodeMetrics m;
    m.mean_cost = rec.mean_cost;
    for (const auto& slot : rec.slots) {
        for (const auto& r : slot.tasks) {
            ++m.tasks;
            m.generated_bits += r.workload_bits;
            if (r.success) {
                m.computed_bits += r.workload_bits;
                m.success_service_s += r.service_time;
            } else {
                ++m.failures;
                m.failed_bits += r.workload_bits;
            }
        }
    }
    return m;
}

CompareRow reduce_metrics(double arrival_rate, const std::string& policy, const std::vector<EpisodeMetrics>& per_seed)
{
    CompareRow row;
    row.arrival_rate = arrival_rate;
    row.policy = policy;
    if (per_seed.empty())
        return row;
    std::size_t tasks = 0, failures = 0;
    double cost = 0.0, computed = 0.0, failed = 0.0, generated = 0.0, service = 0.0;
    for (const auto& m : per_seed) {
        cost += m.mean_cost;
        tasks += m.tasks;
        failures += m.failures;
        computed += m.computed_bits;
        failed += m.failed_bits;
        generated += m.generated_bits;
        service += m.success_service_s;
    }
    const double n = static_cast<double>(per_seed.size());
    row.mean_cost = cost / n;
    row.failure_pct = tasks ? 100.0 * static_cast<double>(failures) / static_cast<double>(tasks) : 0.0;
    row.computed_mbit = computed / n / 1e6;
    row.failed_mbit = failed / n / 1e6;
    row.generated_mbit = generated / n / 1e6;
    row.delay_per_mbit_s = computed > 0.0 ? service / (computed / 1e6) : 0.0;
    return row;
}

CompareSettings compare_from_json(const Json& j)
{
    CompareSettings c;
    if (!j.is_object())
        throw ConfigError("evaluation section must be a JSON object");
    try {
        if (j.contains("arrival_rates"))
            c.arrival_rates = j.at("arrival_rates").get<std::vector<double>>();
        if (j.contains("policies"))
            c.policies = j.at("policies").get<std::vector<std::string>>();
        c.threads = j.value("threads", c.threads);
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("evaluation: ") + e.what());
    }
    for (const auto& p : c.policies)
        if (!is_known_policy(p))
            throw ConfigError("unknown policy '" + p + "'");
    for (double r : c.arrival_rates)
        if (!(r >= 0.0))
            throw ConfigError("arrival rates must be non-negative");
    return c;
}

std::vector<CompareRow> run_compare(const Scenario& scenario, const CompareSettings& settings,
                                    const std::vector<std::uint64_t>& seeds, const DdpgAgent* agent)
{
    struct Unit {
        std::size_t rate, policy, seed;
    };
    std::vector<Unit> units;
    for (std::size_t r = 0; r < settings.arrival_rates.size(); ++r)
        for (std::size_t p = 0; p < settings.policies.size(); ++p)
            for (std::size_t s = 0; s < seeds.size(); ++s)
                units.push_back({r, p, s});
    for (const auto& p : settings.policies)
        if (p == "ddpg" && !agent)
            throw ConfigError("the ddpg policy needs a trained agent");

    std::vector<EpisodeMetrics> results(units.size());
    std::vector<std::string> errors(units.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < units.size(); i = next++) {
            const Unit& u = units[i];
            try {
                Scenario sc = scenario;
                sc.traffic.arrival_rate = settings.arrival_rates[u.rate];
                Environment env(sc);
                const Policy policy =
                    make_policy(settings.policies[u.policy], sc, derive_seed(seeds[u.seed], 0x5eed), agent);
                results[i] = episode_metrics(run_policy_episode(env, policy, seeds[u.seed]));
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    std::size_t threads = settings.threads ? settings.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(1, units.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    for (const auto& e : errors)
        if (!e.empty())
            throw std::runtime_error(e);

    std::vector<CompareRow> rows;
    std::size_t i = 0;
    for (std::size_t r = 0; r < settings.arrival_rates.size(); ++r)
        for (std::size_t p = 0; p < settings.policies.size(); ++p) {
            std::vector<EpisodeMetrics> per_seed(results.begin() + static_cast<std::ptrdiff_t>(i),
                                                 results.begin() + static_cast<std::ptrdiff_t>(i + seeds.size()));
            i += seeds.size();
            rows.push_back(reduce_metrics(settings.arrival_rates[r], settings.policies[p], per_seed));
        }
    return rows;
}

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows, const std::string& header)
{
    out << header << '\n'
        << "arrival_rate,policy,mean_cost,failure_pct,computed_mbit,failed_mbit,generated_mbit,delay_per_mbit_s\n";
    for (const auto& r : rows)
        out << fmt(r.arrival_rate) << ',' << r.policy << ',' << fmt(r.mean_cost) << ',' << fmt(r.failure_pct) << ','
            << fmt(r.computed_mbit) << ',' << fmt(r.failed_mbit) << ',' << fmt(r.generated_mbit) << ','
            << fmt(r.delay_per_mbit_s) << '\n';
}

void write_slot_csv(std::ostream& out, const std::vector<SlotMetrics>& rows, const std::string& header)
{
    out << header << '\n' << "t,total_cost,n_tasks,n_failures,total_bits,mean_service_s\n";
    for (const auto& m : rows)
        out << m.t << ',' << fmt(m.total_cost) << ',' << m.n_tasks << ',' << m.n_failures << ',' << fmt(m.total_bits)
            << ',' << fmt(m.mean_service_s) << '\n';
}

// ---------------------------------------------------------- study entry points

namespace {

std::ofstream open_output(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::unique_ptr<DdpgAgent> load_agent(const ExperimentConfig& cfg, const Scenario& sc)
{
    auto agent = std::make_unique<DdpgAgent>(sc, cfg.ddpg(), cfg.seeds.front());
    agent->load(cfg.checkpoint_dir());
    return agent;
}

} // namespace

std::vector<std::string> run_study(const ExperimentConfig& cfg, std::ostream* log)
{
    fs::create_directories(cfg.out_dir);
    const fs::path out_dir(cfg.out_dir);
    const std::string header = csv_header_comment(cfg.hash(), cfg.seeds);
    std::vector<std::string> written;

    switch (cfg.study) {
    case StudyKind::TpsaBench: {
        BenchSettings b = bench_from_json(cfg.doc.contains("bench") ? cfg.doc.at("bench") : Json::object());
        b.seed = cfg.seeds.front();
        const auto rows = run_tpsa_bench(b, log);
        const fs::path path = out_dir / "tpsa_bench.csv";
        auto out = open_output(path);
        write_bench_csv(out, rows, header);
        written.push_back(path.string());
        break;
    }
    case StudyKind::Train: {
        const Scenario sc = cfg.scenario();
        const DdpgConfig dc = cfg.ddpg();
        DdpgTrainer trainer(sc, dc, cfg.seeds.front());
        const auto t0 = std::chrono::steady_clock::now();
        auto progress = [&](const EpisodeSummary& s) {
            if (log && (s.episode + 1) % 100 == 0) {
                const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                *log << "episode " << s.episode + 1 << "/" << dc.episodes << " mean_cost " << fmt(s.mean_cost)
                     << " elapsed " << static_cast<long>(el) << "s\n";
            }
        };
        const auto history = run_training(trainer, sc, dc.episodes, cfg.seeds.front(), progress);
        const fs::path path = out_dir / "training_log.csv";
        auto out = open_output(path);
        write_training_csv(out, history, header);
        written.push_back(path.string());
        const fs::path ckpt = out_dir / "checkpoint";
        trainer.agent().save(ckpt.string());
        written.push_back(ckpt.string());
        break;
    }
    case StudyKind::Evaluate: {
        const Scenario sc = cfg.scenario();
        std::unique_ptr<DdpgAgent> agent;
        if (cfg.agent == "ddpg")
            agent = load_agent(cfg, sc);
        std::vector<EpisodeMetrics> per_seed;
        for (std::uint64_t seed : cfg.seeds) {
            Environment env(sc);
            const Policy policy = make_policy(cfg.agent, sc, derive_seed(seed, 0x5eed), agent.get());
            const EpisodeRecord rec = run_policy_episode(env, policy, seed);
            std::vector<SlotMetrics> slots;
            for (const auto& o : rec.slots)
                slots.push_back(slot_metrics(o));
            const fs::path path = out_dir / ("eval_seed" + std::to_string(seed) + ".csv");
            auto out = open_output(path);
            write_slot_csv(out, slots, csv_header_comment(cfg.hash(), {seed}));
            written.push_back(path.string());
            per_seed.push_back(episode_metrics(rec));
        }
        const fs::path path = out_dir / "eval_summary.csv";
        auto out = open_output(path);
        write_compare_csv(out, {reduce_metrics(sc.traffic.arrival_rate, cfg.agent, per_seed)}, header);
        written.push_back(path.string());
        break;
    }
    case StudyKind::Compare: {
        const Scenario sc = cfg.scenario();
        const CompareSettings cs =
            compare_from_json(cfg.doc.contains("evaluation") ? cfg.doc.at("evaluation") : Json::object());
        std::unique_ptr<DdpgAgent> agent;
        if (std::find(cs.policies.begin(), cs.policies.end(), "ddpg") != cs.policies.end())
            agent = load_agent(cfg, sc);
        const auto rows = run_compare(sc, cs, cfg.seeds, agent.get());
        const fs::path path = out_dir / "compare.csv";
        auto out = open_output(path);
        write_compare_csv(out, rows, header);
        written.push_back(path.string());
        break;
    }
    }
    return written;
}

} // namespace vcc
