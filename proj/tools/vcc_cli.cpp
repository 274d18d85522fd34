#include "vcc/harness.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::vector<std::string> overrides;
    bool paper_shapes = false;
};

void add_common(CLI::App* cmd, Options& o)
{
    cmd->add_option("--config", o.config, "JSON configuration file");
    cmd->add_option("--seed", o.seed, "first seed; the seed list keeps its length");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--set", o.overrides, "override a config key, e.g. --set scenario.horizon=10")
        ->type_name("KEY=VALUE");
    cmd->add_flag("--paper-shapes", o.paper_shapes, "use the full-width actor and critic layers");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Collaborative vehicular edge computing simulator"};
    app.require_subcommand(1);
    Options opts;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"tpsa-bench", "Monte-Carlo comparison of TPSA, brute force and random scheduling"},
        {"train", "train the DDPG agent and write a checkpoint"},
        {"evaluate", "run one policy and write per-slot metrics"},
        {"compare", "sweep arrival rates over all policies"}};
    for (const auto& [name, help] : commands)
        add_common(app.add_subcommand(name, help), opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    const std::string study = app.get_subcommands().front()->get_name();
    try {
        const vcc::ExperimentConfig cfg = vcc::make_experiment(vcc::parse_study(study), opts.config, opts.overrides,
                                                               opts.seed, opts.out, opts.paper_shapes);
        for (const auto& path : vcc::run_study(cfg, &std::cerr))
            std::cout << path << '\n';
    } catch (const vcc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
