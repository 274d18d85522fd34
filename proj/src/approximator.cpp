#include "vcc/approximator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vcc::nn {

namespace {

constexpr double kNormEps = 1e-5;

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

double derivative(Activation a, double pre, double post)
{
    switch (a) {
    case Activation::Relu:
        return pre > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh:
        return 1.0 - post * post;
    case Activation::None:
        break;
    }
    return 1.0;
}

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

const char* to_string(Activation a)
{
    switch (a) {
    case Activation::Relu:
        return "relu";
    case Activation::Tanh:
        return "tanh";
    case Activation::None:
        break;
    }
    return "none";
}

double activate(Activation a, double pre)
{
    switch (a) {
    case Activation::Relu:
        return pre > 0.0 ? pre : 0.0;
    case Activation::Tanh:
        return std::tanh(pre);
    case Activation::None:
        break;
    }
    return pre;
}

std::size_t NetworkSpec::feature_size() const
{
    Shape3 s{in_channels, height, width};
    for (const auto& layer : grid_layers) {
        if (const auto* conv = std::get_if<ConvSpec>(&layer)) {
            s = {conv->out_channels, (s.h - 1) / conv->stride + 1, (s.w - 1) / conv->stride + 1};
        } else {
            const auto& pool = std::get<PoolSpec>(layer);
            s = {s.c, ceil_div(s.h, pool.window_h), ceil_div(s.w, pool.window_w)};
        }
    }
    return s.size() + aux_size;
}

std::size_t NetworkSpec::output_size() const { return dense.empty() ? feature_size() : dense.back().out; }

std::string NetworkSpec::describe() const
{
    std::ostringstream os;
    os << "grid " << in_channels << 'x' << height << 'x' << width;
    for (const auto& layer : grid_layers) {
        if (const auto* conv = std::get_if<ConvSpec>(&layer))
            os << " conv " << conv->kernel_h << 'x' << conv->kernel_w << "->" << conv->out_channels << " s"
               << conv->stride << ' ' << to_string(conv->activation);
        else
            os << " pool " << std::get<PoolSpec>(layer).window_h << 'x' << std::get<PoolSpec>(layer).window_w;
    }
    os << " aux " << aux_size << (normalize ? " norm" : "");
    for (const auto& d : dense)
        os << " fc " << d.out << ' ' << to_string(d.activation);
    return os.str();
}

std::uint64_t NetworkSpec::hash() const { return fnv1a(describe()); }

void Gradients::zero()
{
    std::fill(params.begin(), params.end(), 0.0);
    std::fill(grid.begin(), grid.end(), 0.0);
    std::fill(aux.begin(), aux.end(), 0.0);
}

Network::Network(NetworkSpec spec) : spec_(std::move(spec))
{
    std::size_t offset = 0;
    Shape3 s{spec_.in_channels, spec_.height, spec_.width};
    shapes_.push_back(s);
    for (const auto& layer : spec_.grid_layers) {
        if (const auto* conv = std::get_if<ConvSpec>(&layer)) {
            if (conv->kernel_h == 0 || conv->kernel_w == 0 || conv->stride == 0 || conv->out_channels == 0)
                throw std::invalid_argument("convolution dimensions must be positive");
            if (s.size() == 0)
                throw std::invalid_argument("convolution over an empty grid");
            ConvLayout l;
            l.in_c = s.c;
            l.weights = offset;
            offset += conv->out_channels * s.c * conv->kernel_h * conv->kernel_w;
            l.bias = offset;
            offset += conv->out_channels;
            conv_layout_.push_back(l);
            s = {conv->out_channels, (s.h - 1) / conv->stride + 1, (s.w - 1) / conv->stride + 1};
        } else {
            const auto& pool = std::get<PoolSpec>(layer);
            if (pool.window_h == 0 || pool.window_w == 0)
                throw std::invalid_argument("pooling window must be positive");
            conv_layout_.push_back({});
            s = {s.c, ceil_div(s.h, pool.window_h), ceil_div(s.w, pool.window_w)};
        }
        shapes_.push_back(s);
    }
    const std::size_t features = spec_.feature_size();
    if (spec_.normalize) {
        norm_gain_ = offset;
        offset += features;
        norm_shift_ = offset;
        offset += features;
        stats_.assign(2 * features, 0.0);
        std::fill(stats_.begin() + static_cast<std::ptrdiff_t>(features), stats_.end(), 1.0);
    }
    std::size_t in = features;
    for (const auto& d : spec_.dense) {
        if (d.out == 0)
            throw std::invalid_argument("dense layer needs at least one output");
        DenseLayout l;
        l.in = in;
        l.weights = offset;
        offset += d.out * in;
        l.bias = offset;
        offset += d.out;
        dense_layout_.push_back(l);
        in = d.out;
    }
    params_.assign(offset, 0.0);
    if (spec_.normalize)
        std::fill(params_.begin() + static_cast<std::ptrdiff_t>(norm_gain_),
                  params_.begin() + static_cast<std::ptrdiff_t>(norm_shift_), 1.0);
}

void Network::initialize(std::mt19937_64& rng)
{
    auto fill = [&](std::size_t begin, std::size_t count, std::size_t fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
        std::uniform_real_distribution<double> u(-bound, bound);
        for (std::size_t i = 0; i < count; ++i)
            params_[begin + i] = u(rng);
    };
    for (std::size_t k = 0; k < spec_.grid_layers.size(); ++k) {
        const auto* conv = std::get_if<ConvSpec>(&spec_.grid_layers[k]);
        if (!conv)
            continue;
        const auto& l = conv_layout_[k];
        const std::size_t fan_in = l.in_c * conv->kernel_h * conv->kernel_w;
        fill(l.weights, conv->out_channels * fan_in, fan_in);
        fill(l.bias, conv->out_channels, fan_in);
    }
    if (spec_.normalize) {
        const std::size_t f = spec_.feature_size();
        std::fill_n(params_.begin() + static_cast<std::ptrdiff_t>(norm_gain_), f, 1.0);
        std::fill_n(params_.begin() + static_cast<std::ptrdiff_t>(norm_shift_), f, 0.0);
    }
    for (std::size_t k = 0; k < spec_.dense.size(); ++k) {
        const auto& l = dense_layout_[k];
        fill(l.weights, spec_.dense[k].out * l.in, l.in);
        fill(l.bias, spec_.dense[k].out, l.in);
    }
}

Gradients Network::make_gradients() const
{
    Gradients g;
    g.params.assign(params_.size(), 0.0);
    g.grid.assign(spec_.grid_input_size(), 0.0);
    g.aux.assign(spec_.aux_size, 0.0);
    return g;
}

std::vector<double> Network::features(std::span<const double> grid, std::span<const double> aux) const
{
    ForwardCache cache;
    forward(grid, aux, &cache);
    return cache.features;
}

std::vector<double> Network::forward(std::span<const double> grid, std::span<const double> aux,
                                     ForwardCache* cache) const
{
    if (grid.size() != spec_.grid_input_size() || aux.size() != spec_.aux_size)
        throw std::invalid_argument("network input shape mismatch: expected grid " +
                                    std::to_string(spec_.grid_input_size()) + " and aux " +
                                    std::to_string(spec_.aux_size));
    ForwardCache local;
    ForwardCache& c = cache ? *cache : local;
    c.grid_inputs.clear();
    c.grid_pre.clear();
    c.dense_inputs.clear();
    c.dense_pre.clear();

    std::vector<double> x(grid.begin(), grid.end());
    for (std::size_t k = 0; k < spec_.grid_layers.size(); ++k) {
        const Shape3 in = shapes_[k];
        const Shape3 out = shapes_[k + 1];
        std::vector<double> y(out.size(), 0.0);
        std::vector<double> pre;
        if (const auto* conv = std::get_if<ConvSpec>(&spec_.grid_layers[k])) {
            const auto& l = conv_layout_[k];
            const std::size_t kh = conv->kernel_h, kw = conv->kernel_w, st = conv->stride;
            const std::ptrdiff_t pad_t = static_cast<std::ptrdiff_t>((kh - 1) / 2);
            const std::ptrdiff_t pad_l = static_cast<std::ptrdiff_t>((kw - 1) / 2);
            pre.assign(out.size(), 0.0);
            for (std::size_t o = 0; o < out.c; ++o) {
                for (std::size_t i = 0; i < out.h; ++i) {
                    for (std::size_t j = 0; j < out.w; ++j) {
                        double acc = params_[l.bias + o];
                        for (std::size_t ch = 0; ch < in.c; ++ch) {
                            for (std::size_t a = 0; a < kh; ++a) {
                                const std::ptrdiff_t r = static_cast<std::ptrdiff_t>(i * st + a) - pad_t;
                                if (r < 0 || r >= static_cast<std::ptrdiff_t>(in.h))
                                    continue;
                                for (std::size_t b = 0; b < kw; ++b) {
                                    const std::ptrdiff_t q = static_cast<std::ptrdiff_t>(j * st + b) - pad_l;
                                    if (q < 0 || q >= static_cast<std::ptrdiff_t>(in.w))
                                        continue;
                                    acc += params_[l.weights + ((o * in.c + ch) * kh + a) * kw + b]
                                           * x[(ch * in.h + static_cast<std::size_t>(r)) * in.w
                                               + static_cast<std::size_t>(q)];
                                }
                            }
                        }
                        const std::size_t idx = (o * out.h + i) * out.w + j;
                        pre[idx] = acc;
                        y[idx] = activate(conv->activation, acc);
                    }
                }
            }
        } else {
            const auto& pool = std::get<PoolSpec>(spec_.grid_layers[k]);
            for (std::size_t ch = 0; ch < out.c; ++ch)
                for (std::size_t i = 0; i < out.h; ++i)
                    for (std::size_t j = 0; j < out.w; ++j) {
                        double acc = 0.0;
                        std::size_t n = 0;
                        for (std::size_t a = i * pool.window_h; a < std::min(in.h, (i + 1) * pool.window_h); ++a)
                            for (std::size_t b = j * pool.window_w; b < std::min(in.w, (j + 1) * pool.window_w);
                                 ++b) {
                                acc += x[(ch * in.h + a) * in.w + b];
                                ++n;
                            }
                        y[(ch * out.h + i) * out.w + j] = acc / static_cast<double>(n);
                    }
        }
        c.grid_inputs.push_back(std::move(x));
        c.grid_pre.push_back(std::move(pre));
        x = std::move(y);
    }

    c.features = std::move(x);
    c.features.insert(c.features.end(), aux.begin(), aux.end());
    c.normalized = c.features;
    if (spec_.normalize) {
        const std::size_t f = c.features.size();
        for (std::size_t i = 0; i < f; ++i) {
            const double inv = 1.0 / std::sqrt(stats_[f + i] + kNormEps);
            c.normalized[i] = params_[norm_gain_ + i] * (c.features[i] - stats_[i]) * inv + params_[norm_shift_ + i];
        }
    }

    std::vector<double> h = c.normalized;
    for (std::size_t k = 0; k < spec_.dense.size(); ++k) {
        const auto& l = dense_layout_[k];
        const auto& d = spec_.dense[k];
        std::vector<double> pre(d.out);
        std::vector<double> y(d.out);
        for (std::size_t o = 0; o < d.out; ++o) {
            const double* w = &params_[l.weights + o * l.in];
            double acc = params_[l.bias + o];
            for (std::size_t i = 0; i < l.in; ++i)
                acc += w[i] * h[i];
            pre[o] = acc;
            y[o] = activate(d.activation, acc);
        }
        c.dense_inputs.push_back(std::move(h));
        c.dense_pre.push_back(std::move(pre));
        h = std::move(y);
    }
    c.output = h;
    return h;
}

void Network::backward(const ForwardCache& c, std::span<const double> output_grad, Gradients& g) const
{
    if (output_grad.size() != spec_.output_size())
        throw std::invalid_argument("output gradient shape mismatch");
    if (g.params.size() != params_.size())
        g = make_gradients();

    std::vector<double> dh(output_grad.begin(), output_grad.end());
    for (std::size_t kk = spec_.dense.size(); kk-- > 0;) {
        const auto& l = dense_layout_[kk];
        const auto& d = spec_.dense[kk];
        const auto& in = c.dense_inputs[kk];
        const auto& pre = c.dense_pre[kk];
        const std::vector<double>& post = kk + 1 < spec_.dense.size() ? c.dense_inputs[kk + 1] : c.output;
        std::vector<double> din(l.in, 0.0);
        for (std::size_t o = 0; o < d.out; ++o) {
            const double dpre = dh[o] * derivative(d.activation, pre[o], post[o]);
            if (dpre == 0.0)
                continue;
            const double* w = &params_[l.weights + o * l.in];
            double* gw = &g.params[l.weights + o * l.in];
            for (std::size_t i = 0; i < l.in; ++i) {
                gw[i] += dpre * in[i];
                din[i] += dpre * w[i];
            }
            g.params[l.bias + o] += dpre;
        }
        dh = std::move(din);
    }

    const std::size_t f = c.features.size();
    std::vector<double> df(dh);
    if (spec_.normalize) {
        for (std::size_t i = 0; i < f; ++i) {
            const double inv = 1.0 / std::sqrt(stats_[f + i] + kNormEps);
            const double xhat = (c.features[i] - stats_[i]) * inv;
            g.params[norm_gain_ + i] += dh[i] * xhat;
            g.params[norm_shift_ + i] += dh[i];
            df[i] = dh[i] * params_[norm_gain_ + i] * inv;
        }
    }

    const std::size_t grid_out = f - spec_.aux_size;
    for (std::size_t i = 0; i < spec_.aux_size; ++i)
        g.aux[i] += df[grid_out + i];

    std::vector<double> dx(df.begin(), df.begin() + static_cast<std::ptrdiff_t>(grid_out));
    for (std::size_t k = spec_.grid_layers.size(); k-- > 0;) {
        const Shape3 in = shapes_[k];
        const Shape3 out = shapes_[k + 1];
        const auto& x = c.grid_inputs[k];
        std::vector<double> din(in.size(), 0.0);
        if (const auto* conv = std::get_if<ConvSpec>(&spec_.grid_layers[k])) {
            const auto& l = conv_layout_[k];
            const auto& pre = c.grid_pre[k];
            const std::size_t kh = conv->kernel_h, kw = conv->kernel_w, st = conv->stride;
            const std::ptrdiff_t pad_t = static_cast<std::ptrdiff_t>((kh - 1) / 2);
            const std::ptrdiff_t pad_l = static_cast<std::ptrdiff_t>((kw - 1) / 2);
            for (std::size_t o = 0; o < out.c; ++o) {
                for (std::size_t i = 0; i < out.h; ++i) {
                    for (std::size_t j = 0; j < out.w; ++j) {
                        const std::size_t idx = (o * out.h + i) * out.w + j;
                        const double post = activate(conv->activation, pre[idx]);
                        const double dpre = dx[idx] * derivative(conv->activation, pre[idx], post);
                        if (dpre == 0.0)
                            continue;
                        g.params[l.bias + o] += dpre;
                        for (std::size_t ch = 0; ch < in.c; ++ch) {
                            for (std::size_t a = 0; a < kh; ++a) {
                                const std::ptrdiff_t r = static_cast<std::ptrdiff_t>(i * st + a) - pad_t;
                                if (r < 0 || r >= static_cast<std::ptrdiff_t>(in.h))
                                    continue;
                                for (std::size_t b = 0; b < kw; ++b) {
                                    const std::ptrdiff_t q = static_cast<std::ptrdiff_t>(j * st + b) - pad_l;
                                    if (q < 0 || q >= static_cast<std::ptrdiff_t>(in.w))
                                        continue;
                                    const std::size_t wi = l.weights + ((o * in.c + ch) * kh + a) * kw + b;
                                    const std::size_t xi = (ch * in.h + static_cast<std::size_t>(r)) * in.w
                                                           + static_cast<std::size_t>(q);
                                    g.params[wi] += dpre * x[xi];
                                    din[xi] += dpre * params_[wi];
                                }
                            }
                        }
                    }
                }
            }
        } else {
            const auto& pool = std::get<PoolSpec>(spec_.grid_layers[k]);
            for (std::size_t ch = 0; ch < out.c; ++ch)
                for (std::size_t i = 0; i < out.h; ++i)
                    for (std::size_t j = 0; j < out.w; ++j) {
                        const std::size_t a_end = std::min(in.h, (i + 1) * pool.window_h);
                        const std::size_t b_end = std::min(in.w, (j + 1) * pool.window_w);
                        const double n = static_cast<double>((a_end - i * pool.window_h) * (b_end - j * pool.window_w));
                        const double share = dx[(ch * out.h + i) * out.w + j] / n;
                        for (std::size_t a = i * pool.window_h; a < a_end; ++a)
                            for (std::size_t b = j * pool.window_w; b < b_end; ++b)
                                din[(ch * in.h + a) * in.w + b] += share;
                    }
        }
        dx = std::move(din);
    }
    for (std::size_t i = 0; i < dx.size(); ++i)
        g.grid[i] += dx[i];
}

void Network::update_statistics(const std::vector<std::vector<double>>& batch_features, double momentum)
{
    if (!spec_.normalize || batch_features.empty())
        return;
    const std::size_t f = spec_.feature_size();
    for (std::size_t i = 0; i < f; ++i) {
        double mean = 0.0;
        for (const auto& row : batch_features)
            mean += row.at(i);
        mean /= static_cast<double>(batch_features.size());
        double var = 0.0;
        for (const auto& row : batch_features)
            var += (row[i] - mean) * (row[i] - mean);
        var /= static_cast<double>(batch_features.size());
        stats_[i] = momentum * stats_[i] + (1.0 - momentum) * mean;
        stats_[f + i] = momentum * stats_[f + i] + (1.0 - momentum) * var;
    }
}

void apply_update(std::span<double> params, std::span<const double> grads, double learning_rate)
{
    if (params.size() != grads.size())
        throw std::invalid_argument("parameter and gradient sizes differ");
    for (std::size_t i = 0; i < params.size(); ++i)
        params[i] -= learning_rate * grads[i];
}

void soft_update(std::span<double> target, std::span<const double> online, double tau)
{
    if (target.size() != online.size())
        throw std::invalid_argument("target and online parameter sets are not congruent");
    if (tau == 0.0)
        return;
    if (tau == 1.0) {
        std::copy(online.begin(), online.end(), target.begin());
        return;
    }
    for (std::size_t i = 0; i < target.size(); ++i)
        target[i] = tau * online[i] + (1.0 - tau) * target[i];
}

Optimizer::Optimizer(Kind kind, double learning_rate, double decay_factor, std::size_t decay_every)
    : kind_(kind), base_rate_(learning_rate), decay_factor_(decay_factor), decay_every_(decay_every)
{
}

double Optimizer::learning_rate() const
{
    if (decay_every_ == 0)
        return base_rate_;
    return base_rate_ * std::pow(decay_factor_, static_cast<double>(steps_ / decay_every_));
}

void Optimizer::step(std::span<double> params, std::span<const double> grads)
{
    const double lr = learning_rate();
    if (kind_ == Kind::Sgd) {
        apply_update(params, grads, lr);
    } else {
        constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        if (m_.size() != params.size()) {
            m_.assign(params.size(), 0.0);
            v_.assign(params.size(), 0.0);
        }
        const double t = static_cast<double>(steps_ + 1);
        const double c1 = 1.0 - std::pow(b1, t);
        const double c2 = 1.0 - std::pow(b2, t);
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = b1 * m_[i] + (1.0 - b1) * grads[i];
            v_[i] = b2 * v_[i] + (1.0 - b2) * grads[i] * grads[i];
            params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps);
        }
    }
    ++steps_;
}

namespace {

constexpr char kMagic[8] = {'V', 'C', 'C', 'N', 'E', 'T', '0', '1'};

void put_u64(std::ostream& os, std::uint64_t v)
{
    unsigned char b[8];
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is)
{
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8))
        throw std::runtime_error("checkpoint truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

} // namespace

void save_checkpoint(const Network& net, const std::string& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot write checkpoint " + path);
    os.write(kMagic, sizeof kMagic);
    put_u64(os, kCheckpointVersion);
    put_u64(os, net.spec().hash());
    put_u64(os, net.parameter_count());
    put_u64(os, net.statistics().size());
    for (double v : net.parameters())
        put_u64(os, std::bit_cast<std::uint64_t>(v));
    for (double v : net.statistics())
        put_u64(os, std::bit_cast<std::uint64_t>(v));
    if (!os)
        throw std::runtime_error("failed writing checkpoint " + path);
}

void load_checkpoint(Network& net, const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open checkpoint " + path);
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("not a network checkpoint: " + path);
    if (get_u64(is) != kCheckpointVersion)
        throw std::runtime_error("unsupported checkpoint version in " + path);
    if (get_u64(is) != net.spec().hash())
        throw std::runtime_error("checkpoint " + path + " was written for a different network layout");
    const std::uint64_t n_params = get_u64(is);
    const std::uint64_t n_stats = get_u64(is);
    if (n_params != net.parameter_count() || n_stats != net.statistics().size())
        throw std::runtime_error("checkpoint tensor sizes do not match the network");
    for (double& v : net.parameters())
        v = std::bit_cast<double>(get_u64(is));
    for (double& v : net.statistics())
        v = std::bit_cast<double>(get_u64(is));
}

} // namespace vcc::nn
