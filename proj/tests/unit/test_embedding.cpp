#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qpinn/embedding.hpp"

using namespace qpinn;

namespace {

EmbeddingParams random_params(std::vector<std::size_t> dims, std::mt19937_64& rng, double scale = 1.0) {
    auto p = EmbeddingParams::zeros(dims);
    std::uniform_real_distribution<double> u(-scale, scale);
    for (auto& w : p.weights)
        for (auto& x : w.data) x = u(rng);
    for (auto& b : p.biases)
        for (auto& x : b) x = u(rng);
    return p;
}

// Separate re-implementation of the forward pass over plain nested vectors.
std::vector<double> naive_forward(const EmbeddingParams& p, std::vector<double> a) {
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        const auto& w = p.weights[l];
        std::vector<double> z(w.rows);
        for (std::size_t r = 0; r < w.rows; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < w.cols; ++c) acc += w.data[r * w.cols + c] * a[c];
            z[r] = acc + p.biases[l][r];
        }
        if (l + 1 < p.weights.size())
            for (auto& v : z) v = std::tanh(v);
        a = z;
    }
    return a;
}

double contracted(const EmbeddingParams& p, std::span<const double> x, std::span<const double> u) {
    auto out = embed_forward(p, x).angles;
    double acc = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) acc += out[i] * u[i];
    return acc;
}

}  // namespace

TEST_CASE("embed_forward examples") {
    auto z = EmbeddingParams::zeros({2, 10, 10, 5});
    std::vector<double> in{0.5, 0.1};
    for (double a : embed_forward(z, in).angles) CHECK(a == 0.0);

    z.biases.back() = {0.1, -0.2, 0.3, -0.4, 0.5};
    CHECK(embed_forward(z, in).angles == z.biases.back());

    std::mt19937_64 rng(3);
    auto p = random_params({2, 10, 10, 5}, rng);
    auto got = embed_forward(p, in).angles;
    auto want = naive_forward(p, in);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(got[i] - want[i]) < 1e-12);
}

TEST_CASE("shape errors") {
    auto p = EmbeddingParams::zeros({2, 3, 4});
    std::vector<double> three{1, 2, 3};
    CHECK_THROWS_AS(embed_forward(p, three), std::invalid_argument);
    auto q = p;
    q.weights[1] = Matrix(4, 2);
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    auto out = embed_forward(p, std::vector<double>{0.1, 0.2});
    std::vector<double> up(3);
    CHECK_THROWS_AS(embed_backward_params(p, out, up), std::invalid_argument);
}

TEST_CASE("embed_backward_params examples") {
    std::mt19937_64 rng(5);
    auto p = random_params({2, 10, 10, 5}, rng);
    std::vector<double> in{0.3, -0.7};
    auto out = embed_forward(p, in);
    std::vector<double> zero(5, 0.0);
    auto g = embed_backward_params(p, out, zero);
    std::vector<double> flat;
    g.flatten_into(flat);
    for (double v : flat) CHECK(v == 0.0);

    auto lin = random_params({3, 2}, rng);
    std::vector<double> x{0.2, -1.1, 0.6}, u{1.5, -0.5};
    auto gl = embed_backward_params(lin, embed_forward(lin, x), u);
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < 3; ++c) CHECK(gl.weights[0](r, c) == doctest::Approx(u[r] * x[c]).epsilon(1e-15));
        CHECK(gl.biases[0][r] == u[r]);
    }
}

TEST_CASE("backprop matches central differences over 100 configurations") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1, 1);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        auto p = random_params({2, 10, 10, 5}, rng);
        std::vector<double> x{u(rng), 0.5 * (u(rng) + 1)}, up(5);
        for (auto& v : up) v = u(rng);
        auto g = embed_backward_params(p, embed_forward(p, x), up);
        std::vector<double> ga, pf;
        g.flatten_into(ga);
        p.flatten_into(pf);
        for (std::size_t i = 0; i < pf.size(); ++i) {
            auto fd = test::central_fd(
                [&](double v) {
                    auto q = pf;
                    q[i] = v;
                    EmbeddingParams pp = p;
                    pp.assign_from(q);
                    return contracted(pp, x, up);
                },
                pf[i]);
            worst = std::max(worst, test::rel_err(ga[i], fd));
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("embed_jacobian_input") {
    auto z = EmbeddingParams::zeros({3, 4, 2});
    std::vector<double> in{0.1, 0.2, 0.3};
    for (double v : embed_jacobian_input(z, in).data) CHECK(v == 0.0);

    std::mt19937_64 rng(9);
    auto lin = random_params({3, 2}, rng);
    CHECK(embed_jacobian_input(lin, in) == lin.weights[0]);

    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        auto p = random_params({3, 10, 10, 6}, rng);
        std::vector<double> x{0.4, -0.3, 0.05};
        auto j = embed_jacobian_input(p, x);
        for (std::size_t c = 0; c < 3; ++c) {
            for (std::size_t r = 0; r < 6; ++r) {
                auto fd = test::central_fd(
                    [&](double v) {
                        auto y = x;
                        y[c] = v;
                        return embed_forward(p, y).angles[r];
                    },
                    x[c]);
                worst = std::max(worst, test::rel_err(j(r, c), fd));
            }
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("glorot initialisation stays bounded on the PDE domains") {
    for (std::uint64_t seed : {1ull, 2ull, 1234ull}) {
        auto p = EmbeddingParams::glorot({3, 10, 10, 6}, seed);
        CHECK(p == EmbeddingParams::glorot({3, 10, 10, 6}, seed));
        for (std::size_t l = 0; l < p.layer_count(); ++l) {
            const double lim = std::sqrt(6.0 / double(p.layer_dims[l] + p.layer_dims[l + 1]));
            for (double w : p.weights[l].data) CHECK(std::abs(w) <= lim);
            for (double b : p.biases[l]) CHECK(b == 0.0);
        }
        for (double x = -1; x <= 1; x += 0.25)
            for (double y = -1; y <= 1; y += 0.25)
                for (double t = 0; t <= 1; t += 0.25) {
                    std::vector<double> in{x, y, t};
                    auto a = embed_forward(p, in).angles;
                    // bound from the affine output layer on tanh activations
                    const auto& w = p.weights.back();
                    for (std::size_t r = 0; r < a.size(); ++r) {
                        double bound = std::abs(p.biases.back()[r]);
                        for (std::size_t c = 0; c < w.cols; ++c) bound += std::abs(w(r, c));
                        CHECK(std::abs(a[r]) <= bound + 1e-12);
                        CHECK(std::abs(a[r]) < 50);
                    }
                }
    }
    CHECK(EmbeddingParams::glorot({2, 10, 10, 5}, 1) != EmbeddingParams::glorot({2, 10, 10, 5}, 2));
}
