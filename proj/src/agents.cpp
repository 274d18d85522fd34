#include "vcc/agents.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <stdexcept>

namespace vcc {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity)
{
    if (capacity == 0)
        throw std::invalid_argument("replay buffer capacity must be positive");
}

void ReplayBuffer::push(Experience e)
{
    if (items_.size() == capacity_)
        items_.pop_front();
    items_.push_back(std::move(e));
}

std::vector<const Experience*> ReplayBuffer::sample(std::size_t n, std::mt19937_64& rng) const
{
    if (n > items_.size())
        throw std::invalid_argument("cannot sample more experiences than stored");
    std::vector<std::size_t> idx(items_.size());
    std::iota(idx.begin(), idx.end(), 0);
    // partial Fisher-Yates: the first n slots become a uniform draw without replacement
    for (std::size_t i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    std::vector<const Experience*> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = &items_[idx[i]];
    return out;
}

void DdpgConfig::validate() const
{
    if (!(discount >= 0.0 && discount < 1.0))
        throw std::invalid_argument("discount must lie in [0, 1)");
    if (!(tau > 0.0 && tau <= 1.0))
        throw std::invalid_argument("tau must lie in (0, 1]");
    if (train_every <= train_steps)
        throw std::invalid_argument("training cadence needs N_e > N_t");
    if (batch_size == 0 || buffer_capacity < batch_size)
        throw std::invalid_argument("buffer capacity must hold at least one batch");
    if (action_channels != 3 && action_channels != 5)
        throw std::invalid_argument("actor emits 3 or 5 channels per zone");
    if (!(actor_lr > 0.0) || !(critic_lr > 0.0))
        throw std::invalid_argument("learning rates must be positive");
}

StateEncoding encode_state(const SlotState& state, const Scenario& scenario)
{
    const std::size_t zones = state.roads * state.segments;
    const double size_unit = std::max(scenario.mean_task_bits(), 1.0);
    double speed_unit = 1.0;
    for (double v : scenario.traffic.speed_limits_mps)
        speed_unit = std::max(speed_unit, v);
    StateEncoding e;
    e.grid.resize(2 * zones);
    for (std::size_t z = 0; z < zones; ++z) {
        e.grid[z] = state.workload_bits.at(z) / size_unit;
        e.grid[zones + z] = state.mean_speed_mps.at(z) / speed_unit;
    }
    e.aux.resize(state.backlog_s.size());
    for (std::size_t r = 0; r < e.aux.size(); ++r)
        e.aux[r] = state.backlog_s[r] / scenario.compute.slot_length_s;
    return e;
}

nn::NetworkSpec actor_spec(const Scenario& scenario, const DdpgConfig& config)
{
    using namespace nn;
    NetworkSpec s;
    s.in_channels = 2;
    s.height = scenario.grid.roads;
    s.width = scenario.grid.segments;
    s.grid_layers = {ConvSpec{5, 1, 10, 1, Activation::Relu}, PoolSpec{2, 1}};
    s.aux_size = scenario.rsu_count();
    s.normalize = true;
    const std::size_t hidden = config.paper_shapes ? 1400 : 128;
    const std::size_t out = config.action_channels * scenario.zone_count();
    s.dense = {{hidden, Activation::Tanh}, {hidden, Activation::Tanh}, {out, Activation::Tanh}};
    return s;
}

nn::NetworkSpec critic_spec(const Scenario& scenario, const DdpgConfig& config)
{
    using namespace nn;
    NetworkSpec s;
    s.in_channels = 2;
    s.height = scenario.grid.roads;
    s.width = scenario.grid.segments;
    s.grid_layers = {ConvSpec{5, 1, 40, 1, Activation::Relu}, PoolSpec{2, 1}, ConvSpec{3, 1, 10, 1, Activation::Relu},
                     PoolSpec{2, 1}};
    s.aux_size = scenario.rsu_count() + config.action_channels * scenario.zone_count();
    s.normalize = true;
    if (config.paper_shapes)
        s.dense = {{640, Activation::Relu}, {512, Activation::Relu}, {128, Activation::None}, {1, Activation::Relu}};
    else
        s.dense = {{64, Activation::Relu}, {64, Activation::Relu}, {32, Activation::None}, {1, Activation::None}};
    return s;
}

std::size_t decode_index(double v, std::size_t rsus)
{
    if (rsus <= 1)
        return 0;
    const double c = std::clamp(v, -1.0, 1.0);
    const auto idx = static_cast<std::size_t>(std::lround((c + 1.0) / 2.0 * static_cast<double>(rsus - 1)));
    return std::min(idx, rsus - 1);
}

Assignment decode_action(std::span<const double> raw, std::size_t zones, std::size_t rsus, std::size_t channels)
{
    if (channels < 3 || raw.size() != channels * zones)
        throw std::invalid_argument("raw action must hold at least 3 channels per zone");
    Assignment a;
    a.zones.resize(zones);
    for (std::size_t z = 0; z < zones; ++z) {
        a.zones[z].receiver = decode_index(raw[z], rsus);
        a.zones[z].helper = decode_index(raw[zones + z], rsus);
        a.zones[z].deliver = raw[2 * zones + z] < 0.0 ? DeliverVia::Receiver : DeliverVia::Helper;
    }
    return a;
}

Assignment greedy_assignment(const Scenario& scenario)
{
    const Geometry geom = scenario.geometry();
    Assignment a;
    a.zones.resize(scenario.zone_count());
    for (std::size_t z = 0; z < a.zones.size(); ++z) {
        const std::size_t r = strongest_rsu(z, geom, scenario.radio);
        a.zones[z] = {r, r, DeliverVia::Receiver};
    }
    return a;
}

Assignment greedy_tpsa_assignment(const Scenario& scenario, std::mt19937_64& rng)
{
    Assignment a = greedy_assignment(scenario);
    const std::size_t rsus = scenario.rsu_count();
    if (rsus < 2)
        return a;
    std::uniform_int_distribution<std::size_t> pick(0, rsus - 2);
    for (auto& d : a.zones) {
        std::size_t h = pick(rng);
        if (h >= d.receiver)
            ++h;
        d.helper = h;
    }
    return a;
}

Assignment random_tpsa_assignment(const Scenario& scenario, std::mt19937_64& rng)
{
    std::uniform_int_distribution<std::size_t> pick(0, scenario.rsu_count() - 1);
    std::bernoulli_distribution coin(0.5);
    Assignment a;
    a.zones.resize(scenario.zone_count());
    for (auto& d : a.zones) {
        d.receiver = pick(rng);
        d.helper = pick(rng);
        d.deliver = coin(rng) ? DeliverVia::Helper : DeliverVia::Receiver;
    }
    return a;
}

double actor_descent_step(nn::Network& actor, nn::Optimizer& optimizer, const std::vector<StateEncoding>& states,
                          const std::function<double(std::size_t, std::span<const double>, std::vector<double>&)>& q_and_grad)
{
    if (states.empty())
        return 0.0;
    nn::Gradients g = actor.make_gradients();
    const double inv_n = 1.0 / static_cast<double>(states.size());
    double objective = 0.0;
    std::vector<double> dq_da;
    nn::ForwardCache cache;
    for (std::size_t k = 0; k < states.size(); ++k) {
        const auto action = actor.forward(states[k].grid, states[k].aux, &cache);
        dq_da.assign(action.size(), 0.0);
        objective += q_and_grad(k, action, dq_da) * inv_n;
        for (double& v : dq_da)
            v *= inv_n;
        actor.backward(cache, dq_da, g);
    }
    optimizer.step(actor.parameters(), g.params);
    return objective;
}

namespace {

nn::Network make_network(const nn::NetworkSpec& spec, std::mt19937_64& rng)
{
    nn::Network net(spec);
    net.initialize(rng);
    return net;
}

} // namespace

DdpgAgent::DdpgAgent(const Scenario& scenario, DdpgConfig config, std::uint64_t seed)
    : scenario_(scenario),
      config_(config),
      cost_scale_(config.cost_scale > 0.0 ? config.cost_scale : scenario.penalty_per_bit * scenario.mean_task_bits()),
      actor_(actor_spec(scenario, config)),
      critic_(critic_spec(scenario, config)),
      target_actor_(actor_spec(scenario, config)),
      target_critic_(critic_spec(scenario, config)),
      actor_opt_(config.optimizer, config.actor_lr, config.lr_decay, config.lr_decay_every),
      critic_opt_(config.optimizer, config.critic_lr, config.lr_decay, config.lr_decay_every),
      rng_(seed)
{
    config_.validate();
    if (!(cost_scale_ > 0.0))
        cost_scale_ = 1.0;
    actor_ = make_network(actor_.spec(), rng_);
    critic_ = make_network(critic_.spec(), rng_);
    nn::soft_update(target_actor_.parameters(), actor_.parameters(), 1.0);
    nn::soft_update(target_critic_.parameters(), critic_.parameters(), 1.0);
    nn::soft_update(target_actor_.statistics(), actor_.statistics(), 1.0);
    nn::soft_update(target_critic_.statistics(), critic_.statistics(), 1.0);
}

std::vector<double> DdpgAgent::critic_aux(const StateEncoding& s, std::span<const double> action) const
{
    std::vector<double> aux(s.aux);
    aux.insert(aux.end(), action.begin(), action.end());
    return aux;
}

std::vector<double> DdpgAgent::policy_output(const SlotState& state) const
{
    const StateEncoding e = encode_state(state, scenario_);
    return actor_.forward(e.grid, e.aux);
}

double DdpgAgent::critic_value(const SlotState& state, std::span<const double> action) const
{
    const StateEncoding e = encode_state(state, scenario_);
    return critic_.forward(e.grid, critic_aux(e, action)).front();
}

double DdpgAgent::target_critic_value(const SlotState& state, std::span<const double> action) const
{
    const StateEncoding e = encode_state(state, scenario_);
    return target_critic_.forward(e.grid, critic_aux(e, action)).front();
}

std::pair<std::vector<double>, Assignment> DdpgAgent::select_action(const SlotState& state, double noise_scale,
                                                                    std::mt19937_64& rng) const
{
    std::vector<double> raw = policy_output(state);
    if (noise_scale > 0.0) {
        std::normal_distribution<double> noise(0.0, noise_scale);
        for (double& v : raw)
            v += noise(rng);
    }
    for (double& v : raw)
        v = std::clamp(v, -1.0, 1.0);
    Assignment a = decode_action(raw, scenario_.zone_count(), scenario_.rsu_count(), config_.action_channels);
    return {std::move(raw), std::move(a)};
}

double DdpgAgent::target_value(double cost, const SlotState& next_state) const
{
    const StateEncoding e = encode_state(next_state, scenario_);
    const auto next_action = target_actor_.forward(e.grid, e.aux);
    const double q_next = target_critic_.forward(e.grid, critic_aux(e, next_action)).front();
    return cost / cost_scale_ + config_.discount * q_next;
}

TrainStats DdpgAgent::train_step(const ReplayBuffer& buffer)
{
    TrainStats stats;
    if (buffer.size() < config_.batch_size)
        return stats;
    const auto batch = buffer.sample(config_.batch_size, rng_);
    const double inv_n = 1.0 / static_cast<double>(batch.size());

    std::vector<StateEncoding> states;
    std::vector<std::vector<double>> critic_inputs;
    states.reserve(batch.size());
    for (const Experience* e : batch) {
        states.push_back(encode_state(e->state, scenario_));
        critic_inputs.push_back(critic_aux(states.back(), e->action));
    }

    if (config_.norm_momentum < 1.0) {
        std::vector<std::vector<double>> feats;
        for (std::size_t k = 0; k < batch.size(); ++k)
            feats.push_back(critic_.features(states[k].grid, critic_inputs[k]));
        critic_.update_statistics(feats, config_.norm_momentum);
        feats.clear();
        for (const auto& s : states)
            feats.push_back(actor_.features(s.grid, s.aux));
        actor_.update_statistics(feats, config_.norm_momentum);
    }

    // critic regression towards the frozen target
    nn::Gradients cg = critic_.make_gradients();
    nn::ForwardCache cache;
    double loss = 0.0;
    for (std::size_t k = 0; k < batch.size(); ++k) {
        const double y = target_value(batch[k]->cost, batch[k]->next_state);
        const double q = critic_.forward(states[k].grid, critic_inputs[k], &cache).front();
        const double err = q - y;
        loss += err * err * inv_n;
        const double dq = 2.0 * err * inv_n;
        critic_.backward(cache, std::span<const double>(&dq, 1), cg);
    }
    critic_opt_.step(critic_.parameters(), cg.params);

    // actor descends the critic's estimate of the long-run cost
    const std::size_t rsus = scenario_.rsu_count();
    nn::Gradients qg = critic_.make_gradients();
    nn::ForwardCache qcache;
    stats.actor_objective = actor_descent_step(
        actor_, actor_opt_, states, [&](std::size_t k, std::span<const double> action, std::vector<double>& dq_da) {
            const auto aux = critic_aux(states[k], action);
            const double q = critic_.forward(states[k].grid, aux, &qcache).front();
            qg.zero();
            const double one = 1.0;
            critic_.backward(qcache, std::span<const double>(&one, 1), qg);
            for (std::size_t i = 0; i < dq_da.size(); ++i)
                dq_da[i] = qg.aux[rsus + i];
            return q;
        });

    nn::soft_update(target_critic_.parameters(), critic_.parameters(), config_.tau);
    nn::soft_update(target_actor_.parameters(), actor_.parameters(), config_.tau);
    nn::soft_update(target_critic_.statistics(), critic_.statistics(), config_.tau);
    nn::soft_update(target_actor_.statistics(), actor_.statistics(), config_.tau);

    stats.trained = true;
    stats.critic_loss = loss;
    return stats;
}

void DdpgAgent::save(const std::string& directory) const
{
    std::filesystem::create_directories(directory);
    const std::filesystem::path dir(directory);
    nn::save_checkpoint(actor_, (dir / "actor.ckpt").string());
    nn::save_checkpoint(critic_, (dir / "critic.ckpt").string());
    nn::save_checkpoint(target_actor_, (dir / "actor_target.ckpt").string());
    nn::save_checkpoint(target_critic_, (dir / "critic_target.ckpt").string());
}

void DdpgAgent::load(const std::string& directory)
{
    const std::filesystem::path dir(directory);
    const auto actor_path = dir / "actor.ckpt";
    if (!std::filesystem::exists(actor_path))
        throw std::runtime_error("missing policy checkpoint " + actor_path.string());
    nn::load_checkpoint(actor_, actor_path.string());
    nn::soft_update(target_actor_.parameters(), actor_.parameters(), 1.0);
    nn::soft_update(target_actor_.statistics(), actor_.statistics(), 1.0);
    if (std::filesystem::exists(dir / "critic.ckpt")) {
        nn::load_checkpoint(critic_, (dir / "critic.ckpt").string());
        nn::soft_update(target_critic_.parameters(), critic_.parameters(), 1.0);
        nn::soft_update(target_critic_.statistics(), critic_.statistics(), 1.0);
    }
    if (std::filesystem::exists(dir / "actor_target.ckpt"))
        nn::load_checkpoint(target_actor_, (dir / "actor_target.ckpt").string());
    if (std::filesystem::exists(dir / "critic_target.ckpt"))
        nn::load_checkpoint(target_critic_, (dir / "critic_target.ckpt").string());
}

EpisodeRecord run_policy_episode(Environment& env, const Policy& policy, std::uint64_t seed)
{
    EpisodeRecord rec;
    SlotState s = env.reset(seed);
    while (!env.done()) {
        SlotOutcome out = env.step(policy(s));
        s = out.next;
        rec.total_cost += out.cost;
        rec.slots.push_back(std::move(out));
    }
    rec.mean_cost = rec.slots.empty() ? 0.0 : rec.total_cost / static_cast<double>(rec.slots.size());
    return rec;
}

DdpgTrainer::DdpgTrainer(const Scenario& scenario, DdpgConfig config, std::uint64_t seed)
    : config_(config),
      agent_(scenario, config, seed),
      buffer_(config.buffer_capacity),
      rng_(seed ^ 0x9e3779b97f4a7c15ULL),
      noise_(config.noise_initial)
{
}

EpisodeRecord DdpgTrainer::run_episode(Environment& env, std::uint64_t episode_seed)
{
    EpisodeRecord rec;
    rec.episode = episode_++;
    SlotState s = env.reset(episode_seed);
    double loss_sum = 0.0, objective_sum = 0.0;
    while (!env.done()) {
        auto [raw, assignment] = agent_.select_action(s, noise_, rng_);
        SlotOutcome out = env.step(assignment);
        buffer_.push(Experience{s, std::move(raw), out.cost, out.next});
        s = out.next;
        rec.total_cost += out.cost;
        ++step_;
        noise_ = std::max(config_.noise_floor, noise_ * config_.noise_decay);
        if (step_ % config_.train_every == 0) {
            for (std::size_t j = 0; j < config_.train_steps; ++j) {
                const TrainStats ts = agent_.train_step(buffer_);
                if (!ts.trained)
                    break;
                loss_sum += ts.critic_loss;
                objective_sum += ts.actor_objective;
                ++rec.train_steps;
            }
        }
        rec.slots.push_back(std::move(out));
    }
    rec.global_step = step_;
    rec.mean_cost = rec.slots.empty() ? 0.0 : rec.total_cost / static_cast<double>(rec.slots.size());
    if (rec.train_steps > 0) {
        rec.critic_loss = loss_sum / static_cast<double>(rec.train_steps);
        rec.actor_objective = objective_sum / static_cast<double>(rec.train_steps);
    }
    rec.noise_scale = noise_;
    return rec;
}

Policy ddpg_policy(const DdpgAgent& agent)
{
    return [&agent](const SlotState& s) {
        std::mt19937_64 unused(0);
        return agent.select_action(s, 0.0, unused).second;
    };
}

} // namespace vcc
