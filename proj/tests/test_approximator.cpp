#include "gradcheck.hpp"

#include "vcc/approximator.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

using namespace vcc::nn;

namespace {

NetworkSpec dense_only(std::size_t in, std::vector<DenseSpec> layers)
{
    NetworkSpec s;
    s.aux_size = in;
    s.dense = std::move(layers);
    return s;
}

void randomize_statistics(Network& net, std::mt19937_64& rng)
{
    auto stats = net.statistics();
    const std::size_t f = stats.size() / 2;
    std::uniform_real_distribution<double> mean(-0.5, 0.5), var(0.2, 2.0);
    for (std::size_t i = 0; i < f; ++i) {
        stats[i] = mean(rng);
        stats[f + i] = var(rng);
    }
}

std::filesystem::path temp_file(const char* name)
{
    return std::filesystem::temp_directory_path() / (std::string("vcc_test_") + name);
}

} // namespace

TEST_CASE("all-zero weights give zero output")
{
    NetworkSpec s;
    s.in_channels = 2;
    s.height = 4;
    s.width = 3;
    s.grid_layers = {ConvSpec{3, 1, 4, 1, Activation::Relu}, PoolSpec{2, 1}};
    s.aux_size = 2;
    s.normalize = true;
    s.dense = {{8, Activation::Relu}, {3, Activation::None}};
    Network net(s);
    const std::vector<double> grid(24, 1.5), aux{0.3, -2.0};
    for (double v : net.forward(grid, aux))
        CHECK(v == 0.0);
}

TEST_CASE("identity dense layer")
{
    Network net(dense_only(3, {{3, Activation::None}}));
    auto p = net.parameters();
    p[0] = p[4] = p[8] = 1.0;
    const std::vector<double> x{0.5, -1.25, 3.0};
    CHECK(net.forward({}, x) == x);
}

TEST_CASE("2x2 convolution over a 3x3 grid")
{
    NetworkSpec s;
    s.in_channels = 1;
    s.height = 3;
    s.width = 3;
    s.grid_layers = {ConvSpec{2, 2, 1, 1, Activation::None}};
    Network net(s);
    auto p = net.parameters();
    REQUIRE(p.size() == 5);
    p[0] = 1.0;
    p[1] = 2.0;
    p[2] = 3.0;
    p[3] = 4.0;
    const std::vector<double> grid{1, 2, 3, 4, 5, 6, 7, 8, 9};
    const std::vector<double> expected{37, 47, 21, 67, 77, 33, 23, 26, 9};
    CHECK(net.forward(grid, {}) == expected);
}

TEST_CASE("strided convolution and partial pooling windows")
{
    NetworkSpec s;
    s.in_channels = 1;
    s.height = 5;
    s.width = 1;
    s.grid_layers = {ConvSpec{1, 1, 1, 2, Activation::None}, PoolSpec{2, 1}};
    Network net(s);
    net.parameters()[0] = 1.0;
    CHECK(net.grid_output_shape(0).h == 3);
    CHECK(net.grid_output_shape(1).h == 2);
    const std::vector<double> grid{1, 2, 3, 4, 5};
    // Stride 2 keeps rows 0, 2, 4; pooling averages (1, 3) and (5).
    CHECK(net.forward(grid, {}) == std::vector<double>{2.0, 5.0});
}

TEST_CASE("linear regression gradient")
{
    Network net(dense_only(3, {{1, Activation::None}}));
    auto p = net.parameters();
    p[0] = 0.5;
    p[1] = -1.0;
    p[2] = 2.0;
    p[3] = 0.25;
    const std::vector<double> x{1.0, 2.0, -1.0};
    ForwardCache c;
    const double y = net.forward({}, x, &c)[0];
    const double target = 1.0;
    const std::vector<double> err{y - target};
    Gradients g = net.make_gradients();
    net.backward(c, err, g);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(g.params[i] == doctest::Approx(x[i] * err[0]));
    CHECK(g.params[3] == doctest::Approx(err[0]));
}

TEST_CASE("zero output gradient gives zero parameter gradients")
{
    NetworkSpec s;
    s.in_channels = 1;
    s.height = 4;
    s.width = 2;
    s.grid_layers = {ConvSpec{3, 1, 2, 1, Activation::Tanh}};
    s.aux_size = 1;
    s.normalize = true;
    s.dense = {{4, Activation::Tanh}, {2, Activation::None}};
    Network net(s);
    std::mt19937_64 rng(1);
    net.initialize(rng);
    ForwardCache c;
    net.forward(std::vector<double>(8, 0.3), std::vector<double>{1.0}, &c);
    Gradients g = net.make_gradients();
    net.backward(c, std::vector<double>{0.0, 0.0}, g);
    for (double v : g.params)
        CHECK(v == 0.0);
}

TEST_CASE("finite-difference gradients for every layer type")
{
    std::mt19937_64 rng(42);
    std::vector<NetworkSpec> specs;
    for (Activation a : {Activation::None, Activation::Relu, Activation::Tanh}) {
        NetworkSpec s;
        s.in_channels = 2;
        s.height = 5;
        s.width = 3;
        s.grid_layers = {ConvSpec{3, 2, 3, 1, a}};
        s.dense = {{2, Activation::None}};
        specs.push_back(s);
    }
    {
        NetworkSpec s;
        s.in_channels = 2;
        s.height = 7;
        s.width = 4;
        s.grid_layers = {ConvSpec{3, 3, 2, 2, Activation::Tanh}, PoolSpec{2, 2}};
        s.dense = {{3, Activation::Tanh}};
        specs.push_back(s);
    }
    {
        NetworkSpec s = dense_only(5, {{6, Activation::Relu}, {4, Activation::Tanh}, {2, Activation::None}});
        s.normalize = true;
        specs.push_back(s);
    }
    {
        NetworkSpec s;
        s.in_channels = 2;
        s.height = 6;
        s.width = 3;
        s.grid_layers = {ConvSpec{5, 1, 4, 1, Activation::Relu}, PoolSpec{2, 1}, ConvSpec{3, 1, 2, 1, Activation::Relu},
                         PoolSpec{2, 1}};
        s.aux_size = 3;
        s.normalize = true;
        s.dense = {{6, Activation::Relu}, {5, Activation::None}, {1, Activation::Relu}};
        specs.push_back(s);
    }
    for (const auto& spec : specs) {
        CAPTURE(spec.describe());
        Network net(spec);
        net.initialize(rng);
        if (spec.normalize)
            randomize_statistics(net, rng);
        for (int trial = 0; trial < 5; ++trial) {
            const auto r = gradcheck::check(net, rng, 40);
            CHECK(r.failures == 0);
            CHECK(r.probes > 0);
        }
    }
}

TEST_CASE("forward is pure")
{
    NetworkSpec s = dense_only(4, {{5, Activation::Tanh}, {2, Activation::None}});
    s.normalize = true;
    Network net(s);
    std::mt19937_64 rng(2);
    net.initialize(rng);
    const std::vector<double> x{0.1, 0.2, -0.3, 4.0};
    const auto a = net.forward({}, x);
    const auto b = net.forward({}, x);
    CHECK(a == b);
    CHECK_THROWS_AS(net.forward({}, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("soft update")
{
    std::vector<double> target{0.0, 2.0}, online{1.0, 4.0};
    soft_update(target, online, 0.0);
    CHECK(target == std::vector<double>{0.0, 2.0});
    soft_update(target, online, 0.01);
    CHECK(target[0] == doctest::Approx(0.01));
    CHECK(target[1] == doctest::Approx(2.02));
    soft_update(target, online, 1.0);
    CHECK(target == online);
    std::vector<double> shorter{1.0};
    CHECK_THROWS_AS(soft_update(shorter, online, 0.5), std::invalid_argument);
}

TEST_CASE("plain gradient step and learning-rate decay")
{
    std::vector<double> p{1.0, -1.0};
    apply_update(p, std::vector<double>{2.0, -4.0}, 0.5);
    CHECK(p == std::vector<double>{0.0, 1.0});

    Optimizer opt(Optimizer::Kind::Sgd, 1e-3, 0.991, 500);
    std::vector<double> q{0.0};
    const std::vector<double> g{1.0};
    for (int i = 0; i < 499; ++i)
        opt.step(q, g);
    CHECK(opt.learning_rate() == doctest::Approx(1e-3));
    opt.step(q, g);
    CHECK(opt.learning_rate() == doctest::Approx(0.991e-3));
    CHECK(q[0] == doctest::Approx(-0.5));
}

TEST_CASE("normalization statistics follow an exponential average")
{
    NetworkSpec s = dense_only(2, {{1, Activation::None}});
    s.normalize = true;
    Network net(s);
    net.update_statistics({{1.0, 4.0}, {3.0, 4.0}}, 0.9);
    const auto st = net.statistics();
    CHECK(st[0] == doctest::Approx(0.2));
    CHECK(st[1] == doctest::Approx(0.4));
    CHECK(st[2] == doctest::Approx(0.9 + 0.1 * 1.0));
    CHECK(st[3] == doctest::Approx(0.9));
}

TEST_CASE("checkpoint round trip")
{
    NetworkSpec s;
    s.in_channels = 1;
    s.height = 3;
    s.width = 2;
    s.grid_layers = {ConvSpec{3, 1, 2, 1, Activation::Relu}};
    s.aux_size = 2;
    s.normalize = true;
    s.dense = {{3, Activation::Tanh}};
    Network a(s);
    std::mt19937_64 rng(8);
    a.initialize(rng);
    randomize_statistics(a, rng);
    const auto path = temp_file("ckpt.bin");
    save_checkpoint(a, path.string());

    Network b(s);
    load_checkpoint(b, path.string());
    const std::vector<double> grid{1, 2, 3, 4, 5, 6}, aux{0.5, -0.5};
    CHECK(a.forward(grid, aux) == b.forward(grid, aux));
    CHECK(std::equal(a.statistics().begin(), a.statistics().end(), b.statistics().begin()));

    NetworkSpec other = s;
    other.dense[0].out = 4;
    Network c(other);
    CHECK_THROWS_AS(load_checkpoint(c, path.string()), std::runtime_error);
    CHECK_THROWS_AS(load_checkpoint(b, (path.string() + ".missing")), std::runtime_error);

    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.write("XXXX", 4);
    }
    CHECK_THROWS_AS(load_checkpoint(b, path.string()), std::runtime_error);
    std::filesystem::remove(path);
}
