#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace vcc::nn {

enum class Activation { None, Relu, Tanh };

const char* to_string(Activation a);

/// Zero-padded ("same") 2-D convolution. Input channels are inferred.
struct ConvSpec {
    std::size_t kernel_h = 1;
    std::size_t kernel_w = 1;
    std::size_t out_channels = 1;
    std::size_t stride = 1;
    Activation activation = Activation::Relu;
};

/// Non-overlapping average pooling; a trailing partial window averages the
/// cells it covers.
struct PoolSpec {
    std::size_t window_h = 2;
    std::size_t window_w = 1;
};

using GridLayer = std::variant<ConvSpec, PoolSpec>;

struct DenseSpec {
    std::size_t out = 1;
    Activation activation = Activation::None;
};

/// Grid input (channels x height x width) through conv/pool stages, flattened
/// and concatenated with an auxiliary vector, optionally normalized, then a
/// dense stack.
struct NetworkSpec {
    std::size_t in_channels = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<GridLayer> grid_layers;
    std::size_t aux_size = 0;
    bool normalize = false;
    std::vector<DenseSpec> dense;

    std::size_t grid_input_size() const { return in_channels * height * width; }
    std::size_t output_size() const;
    /// Size of the concatenated feature vector entering the dense stack.
    std::size_t feature_size() const;
    /// Canonical text form, used for checkpoint compatibility checks.
    std::string describe() const;
    std::uint64_t hash() const;
};

struct Shape3 {
    std::size_t c = 0, h = 0, w = 0;
    std::size_t size() const { return c * h * w; }
};

/// Intermediate values of one forward pass, consumed by backward().
struct ForwardCache {
    std::vector<std::vector<double>> grid_inputs;  // input of each grid layer
    std::vector<std::vector<double>> grid_pre;     // conv pre-activations (empty for pooling)
    std::vector<double> features;                  // concatenation before normalization
    std::vector<double> normalized;                // after normalization (== features when off)
    std::vector<std::vector<double>> dense_inputs;
    std::vector<std::vector<double>> dense_pre;
    std::vector<double> output;
};

struct Gradients {
    std::vector<double> params;
    std::vector<double> grid;
    std::vector<double> aux;

    void zero();
};

class Network {
public:
    explicit Network(NetworkSpec spec);

    const NetworkSpec& spec() const { return spec_; }
    std::size_t parameter_count() const { return params_.size(); }
    std::span<double> parameters() { return params_; }
    std::span<const double> parameters() const { return params_; }
    /// Running feature statistics of the normalization layer: means then variances.
    std::span<double> statistics() { return stats_; }
    std::span<const double> statistics() const { return stats_; }

    /// Uniform in +-1/sqrt(fan_in) for weights and biases; unit gain, zero shift.
    void initialize(std::mt19937_64& rng);

    /// Throws std::invalid_argument on input size mismatch.
    std::vector<double> forward(std::span<const double> grid, std::span<const double> aux,
                                ForwardCache* cache = nullptr) const;

    /// Accumulates parameter and input gradients of <output_grad, output> into `grads`.
    void backward(const ForwardCache& cache, std::span<const double> output_grad, Gradients& grads) const;

    Gradients make_gradients() const;

    /// Concatenated feature vector for one input (pre-normalization).
    std::vector<double> features(std::span<const double> grid, std::span<const double> aux) const;
    /// Exponential moving update of the normalization statistics from a batch of feature vectors.
    void update_statistics(const std::vector<std::vector<double>>& batch_features, double momentum);

    Shape3 grid_output_shape(std::size_t layer) const { return shapes_.at(layer + 1); }

private:
    struct ConvLayout {
        std::size_t weights = 0, bias = 0, in_c = 0;
    };
    struct DenseLayout {
        std::size_t weights = 0, bias = 0, in = 0;
    };

    NetworkSpec spec_;
    std::vector<Shape3> shapes_; // grid shape before each grid layer, plus the final one
    std::vector<ConvLayout> conv_layout_;
    std::vector<DenseLayout> dense_layout_;
    std::size_t norm_gain_ = 0, norm_shift_ = 0;
    std::vector<double> params_;
    std::vector<double> stats_;
};

double activate(Activation a, double pre);

/// theta <- theta - learning_rate * grad.
void apply_update(std::span<double> params, std::span<const double> grads, double learning_rate);

/// target <- tau * online + (1 - tau) * target.
void soft_update(std::span<double> target, std::span<const double> online, double tau);

/// Gradient descent with a step-wise learning-rate decay and optional Adam moments.
class Optimizer {
public:
    enum class Kind { Sgd, Adam };

    Optimizer(Kind kind, double learning_rate, double decay_factor, std::size_t decay_every);

    void step(std::span<double> params, std::span<const double> grads);
    double learning_rate() const;
    std::size_t steps() const { return steps_; }

private:
    Kind kind_;
    double base_rate_;
    double decay_factor_;
    std::size_t decay_every_;
    std::size_t steps_ = 0;
    std::vector<double> m_, v_;
};

/// Versioned little-endian checkpoint: magic, format version, spec hash, then
/// parameter and statistics tensors in spec order.
void save_checkpoint(const Network& net, const std::string& path);
/// Throws std::runtime_error on a missing file, bad magic, version or spec hash.
void load_checkpoint(Network& net, const std::string& path);

inline constexpr std::uint32_t kCheckpointVersion = 1;

} // namespace vcc::nn
