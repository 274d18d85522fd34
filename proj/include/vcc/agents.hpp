#pragma once

#include "vcc/approximator.hpp"
#include "vcc/sim.hpp"

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace vcc {

/// Replay tuple. `action` is the raw actor output after noise and clamping.
struct Experience {
    SlotState state;
    std::vector<double> action;
    double cost = 0.0;
    SlotState next_state;
};

/// Fixed-capacity FIFO of experiences; the oldest entry is evicted first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Experience e);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Experience& at(std::size_t i) const { return items_.at(i); } // 0 = oldest

    /// `n` distinct entries drawn uniformly. Throws std::invalid_argument if n > size().
    std::vector<const Experience*> sample(std::size_t n, std::mt19937_64& rng) const;

private:
    std::size_t capacity_;
    std::deque<Experience> items_;
};

struct DdpgConfig {
    // Discount of the long-run cost; unrelated to the per-zone delivery choice.
    double discount = 0.9;
    double actor_lr = 1e-5;
    double critic_lr = 1e-4;
    double lr_decay = 0.991;
    std::size_t lr_decay_every = 500;
    nn::Optimizer::Kind optimizer = nn::Optimizer::Kind::Sgd;
    double tau = 0.01;
    double noise_initial = 0.5;
    double noise_decay = 0.999;
    double noise_floor = 0.02;
    std::size_t train_every = 80; // N_e environment steps
    std::size_t train_steps = 25; // N_t updates per training round
    std::size_t episodes = 3000;
    std::size_t buffer_capacity = 8000;
    std::size_t batch_size = 128;
    double cost_scale = 0.0; // <= 0: penalty * mean task size
    std::size_t action_channels = 3; // 3, or 5 with the last two ignored
    bool paper_shapes = false;
    double norm_momentum = 0.99;

    void validate() const;
};

/// Network inputs for one state: a (2, roads, segments) grid of workload and
/// speed, and the backlog vector.
struct StateEncoding {
    std::vector<double> grid;
    std::vector<double> aux;
};

StateEncoding encode_state(const SlotState& state, const Scenario& scenario);

nn::NetworkSpec actor_spec(const Scenario& scenario, const DdpgConfig& config);
nn::NetworkSpec critic_spec(const Scenario& scenario, const DdpgConfig& config);

/// Maps a channel value in [-1, 1] to an RSU index: round((v + 1) / 2 * (rsus - 1)).
std::size_t decode_index(double v, std::size_t rsus);

/// Raw actor output is channel-major: raw[c * zones + z]. Channel 0 picks the
/// receiver, channel 1 the helper, channel 2 the deliverer (< 0 receiver).
Assignment decode_action(std::span<const double> raw, std::size_t zones, std::size_t rsus,
                         std::size_t channels = 3);

using Policy = std::function<Assignment(const SlotState&)>;

/// Highest-SNR receiver, no collaboration.
Assignment greedy_assignment(const Scenario& scenario);
/// Highest-SNR receiver, a different random helper, delivery by the receiver.
Assignment greedy_tpsa_assignment(const Scenario& scenario, std::mt19937_64& rng);
/// Receiver, helper and deliverer drawn uniformly.
Assignment random_tpsa_assignment(const Scenario& scenario, std::mt19937_64& rng);

/// One actor step along the batch-mean of dQ/da * da/dtheta. `dq_da` returns the
/// critic's action gradient at (state k, action). Returns the batch-mean Q.
double actor_descent_step(nn::Network& actor, nn::Optimizer& optimizer, const std::vector<StateEncoding>& states,
                          const std::function<double(std::size_t, std::span<const double>, std::vector<double>&)>& q_and_grad);

struct TrainStats {
    bool trained = false;
    double critic_loss = 0.0;
    double actor_objective = 0.0;
};

class DdpgAgent {
public:
    DdpgAgent(const Scenario& scenario, DdpgConfig config, std::uint64_t seed);

    const DdpgConfig& config() const { return config_; }
    double cost_scale() const { return cost_scale_; }

    /// Actor output plus zero-mean Gaussian noise, clamped to [-1, 1], and its decoding.
    std::pair<std::vector<double>, Assignment> select_action(const SlotState& state, double noise_scale,
                                                             std::mt19937_64& rng) const;
    std::vector<double> policy_output(const SlotState& state) const;
    double critic_value(const SlotState& state, std::span<const double> action) const;
    double target_critic_value(const SlotState& state, std::span<const double> action) const;

    /// Regression target: scaled cost + discount * Q'(s', mu'(s')).
    double target_value(double cost, const SlotState& next_state) const;

    /// One critic regression and actor update on a sampled batch, then soft
    /// target updates. No-op (trained = false) when the buffer is underfull.
    TrainStats train_step(const ReplayBuffer& buffer);

    nn::Network& actor() { return actor_; }
    nn::Network& critic() { return critic_; }
    nn::Network& target_actor() { return target_actor_; }
    nn::Network& target_critic() { return target_critic_; }
    const nn::Network& actor() const { return actor_; }
    const nn::Network& critic() const { return critic_; }

    void save(const std::string& directory) const;
    void load(const std::string& directory);

private:
    std::vector<double> critic_aux(const StateEncoding& s, std::span<const double> action) const;

    Scenario scenario_;
    DdpgConfig config_;
    double cost_scale_;
    nn::Network actor_, critic_, target_actor_, target_critic_;
    nn::Optimizer actor_opt_, critic_opt_;
    std::mt19937_64 rng_;
};

struct EpisodeRecord {
    std::size_t episode = 0;
    std::size_t global_step = 0;
    std::vector<SlotOutcome> slots;
    double total_cost = 0.0;
    double mean_cost = 0.0; // per slot
    double critic_loss = 0.0; // mean over training steps in the episode
    double actor_objective = 0.0;
    double noise_scale = 0.0;
    std::size_t train_steps = 0;
};

/// Runs one episode of a fixed policy (no learning).
EpisodeRecord run_policy_episode(Environment& env, const Policy& policy, std::uint64_t seed);

/// The training loop: act with exploration noise, store transitions, and every
/// N_e environment steps run N_t training steps.
class DdpgTrainer {
public:
    DdpgTrainer(const Scenario& scenario, DdpgConfig config, std::uint64_t seed);

    EpisodeRecord run_episode(Environment& env, std::uint64_t episode_seed);

    DdpgAgent& agent() { return agent_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    double noise_scale() const { return noise_; }
    std::size_t global_step() const { return step_; }

private:
    DdpgConfig config_;
    DdpgAgent agent_;
    ReplayBuffer buffer_;
    std::mt19937_64 rng_;
    double noise_;
    std::size_t step_ = 0;
    std::size_t episode_ = 0;
};

/// Noise-free policy of a trained agent.
Policy ddpg_policy(const DdpgAgent& agent);

} // namespace vcc
