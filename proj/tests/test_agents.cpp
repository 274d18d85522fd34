#include "vcc/agents.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <stdexcept>

using namespace vcc;

namespace {

Experience tagged(double tag)
{
    Experience e;
    e.cost = tag;
    return e;
}

DdpgConfig small_config()
{
    DdpgConfig c;
    c.batch_size = 4;
    c.buffer_capacity = 64;
    c.train_every = 10;
    c.train_steps = 2;
    c.cost_scale = 1.0;
    return c;
}

SlotState some_state(const Scenario& s, double w)
{
    SlotState st;
    st.roads = s.grid.roads;
    st.segments = s.grid.segments;
    st.workload_bits.assign(s.zone_count(), 0.0);
    st.mean_speed_mps.assign(s.zone_count(), 10.0);
    st.backlog_s.assign(s.rsu_count(), 0.5);
    st.workload_bits[1] = w;
    return st;
}

// Leaves only the final bias of a network's last layer, so the output is that constant.
void make_constant(nn::Network& net, double value)
{
    auto p = net.parameters();
    std::fill(p.begin(), p.end(), 0.0);
    p[p.size() - 1] = value;
}

} // namespace

TEST_CASE("replay buffer evicts the oldest entries")
{
    ReplayBuffer b(5);
    for (int i = 0; i < 8; ++i)
        b.push(tagged(i));
    REQUIRE(b.size() == 5);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(b.at(i).cost == 3.0 + static_cast<double>(i));

    std::mt19937_64 rng(1);
    const auto s = b.sample(5, rng);
    std::set<double> seen;
    for (const auto* e : s)
        seen.insert(e->cost);
    CHECK(seen.size() == 5);
    CHECK_THROWS_AS(b.sample(6, rng), std::invalid_argument);
    CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);
}

TEST_CASE("replay sampling is roughly uniform")
{
    ReplayBuffer b(10);
    for (int i = 0; i < 10; ++i)
        b.push(tagged(i));
    std::mt19937_64 rng(7);
    std::vector<int> hits(10, 0);
    for (int k = 0; k < 5000; ++k)
        for (const auto* e : b.sample(3, rng))
            ++hits[static_cast<std::size_t>(e->cost)];
    for (int h : hits)
        CHECK(std::abs(h - 1500) < 150);
}

TEST_CASE("decoding actions")
{
    CHECK(decode_index(-1.0, 9) == 0);
    CHECK(decode_index(1.0, 9) == 8);
    CHECK(decode_index(0.0, 9) == 4);
    CHECK(decode_index(3.0, 3) == 2);
    CHECK(decode_index(0.7, 1) == 0);

    const std::vector<double> raw{1.0, -1.0, 0.0, -0.3, -0.2, 1.0};
    const Assignment a = decode_action(raw, 2, 9);
    CHECK(a.zones[0].receiver == 8);
    CHECK(a.zones[0].helper == 4);
    CHECK(a.zones[0].deliver == DeliverVia::Receiver);
    CHECK(a.zones[1].receiver == 0);
    CHECK(a.zones[1].deliver == DeliverVia::Helper);
    CHECK_THROWS_AS(decode_action(raw, 3, 9), std::invalid_argument);

    // Five channels: the last two are ignored.
    std::vector<double> five(raw);
    five.insert(five.end(), {0.9, -0.9, 0.1, 0.1});
    CHECK(decode_action(five, 2, 9, 5) == a);
}

TEST_CASE("every assignment is reachable")
{
    const std::size_t rsus = 4;
    for (std::size_t r = 0; r < rsus; ++r)
        for (std::size_t h = 0; h < rsus; ++h)
            for (DeliverVia d : {DeliverVia::Receiver, DeliverVia::Helper}) {
                auto level = [&](std::size_t i) { return 2.0 * static_cast<double>(i) / (rsus - 1) - 1.0; };
                const std::vector<double> raw{level(r), level(h), d == DeliverVia::Receiver ? -0.5 : 0.5};
                const ZoneDecision got = decode_action(raw, 1, rsus).zones[0];
                CHECK(got == ZoneDecision{r, h, d});
            }
}

TEST_CASE("baseline policies")
{
    Scenario s = desk_scenario();
    s.grid = RoadGrid{1, 1, 40.0, 10.0, 0.0, {0.0, 0.0}};
    s.rsus = {{20.0, 50.0}, {20.0, 200.0}};
    s.compute.rsu_capacity.assign(2, 4e9);
    s.traffic.speed_limits_mps = {10.0};
    const Assignment g = greedy_assignment(s);
    CHECK(g.zones[0] == ZoneDecision{0, 0, DeliverVia::Receiver});

    const Scenario desk = desk_scenario();
    std::mt19937_64 rng(3), twin(3);
    for (int k = 0; k < 20; ++k) {
        const Assignment a = greedy_tpsa_assignment(desk, rng);
        (void)greedy_tpsa_assignment(desk, twin);
        for (std::size_t z = 0; z < a.zones.size(); ++z) {
            CHECK(a.zones[z].helper != a.zones[z].receiver);
            CHECK(a.zones[z].receiver == greedy_assignment(desk).zones[z].receiver);
        }
        CHECK(random_tpsa_assignment(desk, rng) == random_tpsa_assignment(desk, twin));
    }
}

TEST_CASE("action selection")
{
    const Scenario s = desk_scenario();
    DdpgAgent agent(s, small_config(), 5);
    const SlotState st = some_state(s, 3e6);
    std::mt19937_64 rng(1);
    const auto [raw, a] = agent.select_action(st, 0.0, rng);
    CHECK(raw == agent.policy_output(st));
    CHECK(raw.size() == 3 * s.zone_count());

    std::mt19937_64 r1(9), r2(9);
    const auto n1 = agent.select_action(st, 0.5, r1);
    const auto n2 = agent.select_action(st, 0.5, r2);
    CHECK(n1.first == n2.first);
    CHECK(n1.first != raw);
    for (double v : n1.first) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("regression target on planted values")
{
    const Scenario s = desk_scenario();
    DdpgConfig c = small_config();
    c.discount = 0.9;
    DdpgAgent agent(s, c, 1);
    make_constant(agent.target_critic(), 10.0);
    CHECK(agent.target_value(2.0, some_state(s, 1e6)) == doctest::Approx(11.0).epsilon(1e-14));

    c.discount = 0.0;
    DdpgAgent myopic(s, c, 1);
    make_constant(myopic.target_critic(), 10.0);
    CHECK(myopic.target_value(2.0, some_state(s, 1e6)) == 2.0);

    c.cost_scale = 0.0;
    DdpgAgent scaled(s, c, 1);
    CHECK(scaled.cost_scale() == doctest::Approx(50e-6 * 3.5e6));
}

TEST_CASE("target networks lag by exactly tau")
{
    const Scenario s = desk_scenario();
    DdpgConfig c = small_config();
    c.tau = 0.01;
    DdpgAgent agent(s, c, 2);
    ReplayBuffer buffer(16);
    for (int i = 0; i < 8; ++i) {
        std::vector<double> act(3 * s.zone_count(), 0.1 * i - 0.3);
        buffer.push({some_state(s, 1e6 * i), act, 10.0 * i, some_state(s, 2e6)});
    }
    const std::vector<double> old_critic(agent.target_critic().parameters().begin(),
                                         agent.target_critic().parameters().end());
    const std::vector<double> old_actor(agent.target_actor().parameters().begin(),
                                        agent.target_actor().parameters().end());
    const TrainStats st = agent.train_step(buffer);
    REQUIRE(st.trained);
    double worst = 0.0;
    const auto online = agent.critic().parameters();
    const auto target = agent.target_critic().parameters();
    for (std::size_t i = 0; i < target.size(); ++i)
        worst = std::max(worst, std::abs(target[i] - (0.01 * online[i] + (1.0 - 0.01) * old_critic[i])));
    const auto a_online = agent.actor().parameters();
    const auto a_target = agent.target_actor().parameters();
    for (std::size_t i = 0; i < a_target.size(); ++i)
        worst = std::max(worst, std::abs(a_target[i] - (0.01 * a_online[i] + (1.0 - 0.01) * old_actor[i])));
    CHECK(worst == 0.0);

    ReplayBuffer tiny(16);
    tiny.push(buffer.at(0));
    CHECK_FALSE(agent.train_step(tiny).trained);
}

TEST_CASE("critic converges to a fixed target on one transition")
{
    const Scenario s = desk_scenario();
    DdpgConfig c = small_config();
    c.discount = 0.0;
    c.batch_size = 1;
    c.optimizer = nn::Optimizer::Kind::Adam;
    c.critic_lr = 1e-3;
    c.norm_momentum = 1.0;
    DdpgAgent agent(s, c, 4);
    ReplayBuffer buffer(1);
    const SlotState st = some_state(s, 4e6);
    const std::vector<double> act(3 * s.zone_count(), 0.25);
    buffer.push({st, act, 0.7, st});
    for (int i = 0; i < 500; ++i)
        agent.train_step(buffer);
    CHECK(std::abs(agent.critic_value(st, act) - 0.7) < 1e-2);
}

TEST_CASE("actor descends a planted quadratic critic")
{
    const Scenario s = desk_scenario();
    nn::Network actor(actor_spec(s, DdpgConfig{}));
    std::mt19937_64 rng(6);
    actor.initialize(rng);
    nn::Optimizer opt(nn::Optimizer::Kind::Sgd, 0.02, 1.0, 0);
    const SlotState st = some_state(s, 2e6);
    const std::vector<StateEncoding> states{encode_state(st, s)};
    std::vector<double> goal(actor.spec().output_size());
    for (std::size_t i = 0; i < goal.size(); ++i)
        goal[i] = 0.6 * std::sin(static_cast<double>(i));
    auto distance = [&] {
        const auto a = actor.forward(states[0].grid, states[0].aux);
        double d = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            d += (a[i] - goal[i]) * (a[i] - goal[i]);
        return d;
    };
    double prev = distance();
    const double start = prev;
    for (int it = 0; it < 60; ++it) {
        actor_descent_step(actor, opt, states, [&](std::size_t, std::span<const double> a, std::vector<double>& g) {
            double q = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                q += (a[i] - goal[i]) * (a[i] - goal[i]);
                g[i] = 2.0 * (a[i] - goal[i]);
            }
            return q;
        });
        const double d = distance();
        CHECK(d < prev);
        prev = d;
    }
    CHECK(prev < 0.5 * start);
}

TEST_CASE("agent checkpoints")
{
    const Scenario s = desk_scenario();
    const auto dir = std::filesystem::temp_directory_path() / "vcc_test_agent";
    std::filesystem::remove_all(dir);
    DdpgAgent a(s, small_config(), 11);
    a.save(dir.string());
    DdpgAgent b(s, small_config(), 12);
    const SlotState st = some_state(s, 3e6);
    CHECK(a.policy_output(st) != b.policy_output(st));
    b.load(dir.string());
    CHECK(a.policy_output(st) == b.policy_output(st));
    const auto act = a.policy_output(st);
    CHECK(a.critic_value(st, act) == b.critic_value(st, act));
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(b.load(dir.string()), std::runtime_error);

    DdpgConfig paper = small_config();
    paper.paper_shapes = true;
    DdpgAgent wide(s, paper, 1);
    wide.save(dir.string());
    CHECK_THROWS_AS(b.load(dir.string()), std::runtime_error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("training cadence")
{
    const Scenario s = desk_scenario();
    DdpgConfig c = small_config();
    c.train_every = 30;
    c.train_steps = 3;
    DdpgTrainer trainer(s, c, 1);
    Environment env(s);
    const EpisodeRecord e0 = trainer.run_episode(env, 1);
    CHECK(e0.slots.size() == s.horizon);
    CHECK(e0.global_step == 20);
    CHECK(e0.train_steps == 0);
    CHECK(trainer.buffer().size() == 20);
    const EpisodeRecord e1 = trainer.run_episode(env, 2);
    CHECK(e1.train_steps == 3); // step 30 falls inside the second episode
    CHECK(e1.episode == 1);
    CHECK(trainer.noise_scale() == doctest::Approx(0.5 * std::pow(0.999, 40)));

    DdpgConfig bad = c;
    bad.train_every = 3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("encoded state layout")
{
    const Scenario s = desk_scenario();
    const SlotState st = some_state(s, 7e6);
    const StateEncoding e = encode_state(st, s);
    CHECK(e.grid.size() == 2 * s.zone_count());
    CHECK(e.grid[1] == doctest::Approx(2.0));
    CHECK(e.grid[s.zone_count()] == doctest::Approx(10.0 / 16.7));
    CHECK(e.aux == std::vector<double>{0.5, 0.5, 0.5});
}
