#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qpinn/compiled_model.hpp"
#include "qpinn/model.hpp"

using namespace qpinn;

namespace {

ModelConfig heat1d_model() {
    ModelConfig c;
    c.ansatz = {5, 4, {GateKind::RY, GateKind::RZ}, Entangler::chain};
    c.embedding_dims = {2, 10, 10, 5};
    return c;
}

ModelConfig tiny(unsigned layers, double a) {
    ModelConfig c;
    c.ansatz = {1, layers, {GateKind::RY}, Entangler::chain};
    c.embedding_dims = {2, 1};
    (void)a;
    return c;
}

ModelParams linear_angle(const ModelConfig& c, double a) {
    ModelParams p;
    p.theta.assign(c.ansatz.parameter_count(), 0.0);
    p.xi = EmbeddingParams::zeros(c.embedding_dims);
    p.xi.weights[0](0, 0) = a;
    return p;
}

}  // namespace

TEST_CASE("forward examples") {
    auto c = heat1d_model();
    ModelParams p;
    p.theta.assign(40, 0.0);
    p.xi = EmbeddingParams::zeros(c.embedding_dims);
    for (double x : {-1.0, 0.0, 0.7})
        for (double t : {0.0, 0.5}) CHECK(forward(c, p, std::vector<double>{x, t}) == 5.0);

    auto one = tiny(0, 0);
    auto q = linear_angle(one, 0.0);
    q.xi.biases[0][0] = M_PI / 2;
    CHECK(std::abs(forward(one, q, std::vector<double>{0.3, 0.1})) < 1e-15);

    // composition of the three modules
    auto r = init_params(c, 42, M_PI);
    r.scale = 0.7;
    r.bias = -0.2;
    std::vector<double> pt{0.3, 0.2};
    auto ang = embed_forward(r.xi, pt).angles;
    auto z = run_circuit(5, ang, c.ansatz, r.theta);
    double s = 0.0;
    for (double v : z) s += v;
    CHECK(forward(c, r, pt) == r.scale * s + r.bias);
}

TEST_CASE("aggregations and bounds") {
    auto c = heat1d_model();
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 30; ++trial) {
        auto p = init_params(c, rng(), 4.0);
        p.scale = 1.0;
        p.bias = 0.0;
        std::vector<double> pt{0.1 * trial - 1.0, 0.3};
        const double sum = forward(c, p, pt);
        CHECK(std::abs(sum) <= 5.0 + 1e-12);
        auto m = c;
        m.aggregation = Aggregation::mean_z;
        CHECK(forward(m, p, pt) == doctest::Approx(sum / 5).epsilon(1e-14));
        m.aggregation = Aggregation::product_z;
        CHECK(std::abs(forward(m, p, pt)) <= 1.0 + 1e-12);
    }
    CHECK(parse_aggregation("product_z") == Aggregation::product_z);
    CHECK_THROWS(parse_aggregation("max"));
}

TEST_CASE("config validation") {
    auto c = heat1d_model();
    CHECK_NOTHROW(c.validate());
    c.fd_step = 0.5;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.fd_step = 1e-6;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = heat1d_model();
    c.embedding_dims.back() = 4;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("grad_params examples") {
    auto c = tiny(1, 0);
    auto p = linear_angle(c, 0.0);
    p.theta[0] = M_PI / 2;
    std::vector<double> pt{0.2, 0.4};
    CHECK(grad_params(c, p, pt).d_theta[0] == doctest::Approx(-1.0).epsilon(1e-14));

    // theta = 0 with zero encoding: d cos(theta) vanishes, as does every encoding shift
    p.theta[0] = 0.0;
    auto g = grad_params(c, p, pt);
    CHECK(std::abs(g.d_theta[0]) < 1e-15);
    auto fd = test::central_fd([&](double v) {
        auto q = p;
        q.theta[0] = v;
        return forward(c, q, pt);
    }, 0.0);
    CHECK(std::abs(fd) < 1e-9);
    for (double v : g.flatten()) CHECK(std::isfinite(v));
}

TEST_CASE("grad_params matches central differences on the 1D model") {
    auto c = heat1d_model();
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ux(-1, 1), ut(0, 0.95);
    auto p = init_params(c, 7, M_PI);
    p.scale = 0.8;
    p.bias = 0.1;
    auto flat = p.flatten();
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        std::vector<double> pt{ux(rng), ut(rng)};
        auto g = grad_params(c, p, pt).flatten();
        REQUIRE(g.size() == flat.size());
        for (std::size_t k = 0; k < flat.size(); ++k) {
            const double fd = test::central_fd([&](double v) {
                auto f = flat;
                f[k] = v;
                ModelParams q = p;
                q.assign_from(f);
                return forward(c, q, pt);
            }, flat[k]);
            worst = std::max(worst, test::rel_err(g[k], fd));
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("grad_params execution count") {
    auto c = heat1d_model();
    auto p = init_params(c, 3, M_PI);
    std::vector<double> pt{0.1, 0.2};
    const std::size_t shifts = 2 * (c.ansatz.parameter_count() + c.n_qubits());

    c.train_output_map = false;
    auto before = circuit_executions();
    grad_params(c, p, pt);
    CHECK(circuit_executions() - before == shifts);

    // the scale gradient needs the unshifted output
    c.train_output_map = true;
    before = circuit_executions();
    grad_params(c, p, pt);
    CHECK(circuit_executions() - before == shifts + 1);
}

TEST_CASE("determinism") {
    auto c = heat1d_model();
    auto p = init_params(c, 11, M_PI);
    std::vector<double> pt{-0.4, 0.6};
    CHECK(forward(c, p, pt) == forward(c, p, pt));
    CHECK(grad_params(c, p, pt).flatten() == grad_params(c, p, pt).flatten());
    CHECK(init_params(c, 11, M_PI) == p);
}

TEST_CASE("input derivatives") {
    auto c = heat1d_model();
    ModelParams zero;
    zero.theta.assign(40, 0.0);
    zero.xi = EmbeddingParams::zeros(c.embedding_dims);
    std::vector<double> pt{0.2, 0.3};
    for (std::size_t axis : {0u, 1u})
        for (int order : {1, 2}) CHECK(std::abs(input_derivatives(c, zero, pt, {axis, order})) < 1e-9);

    // u = cos(a x)
    const double a = 2.0;
    auto one = tiny(0, a);
    auto p = linear_angle(one, a);
    std::vector<double> origin{0.0, 0.5};
    one.fd_step = 1e-3;
    CHECK(input_derivatives(one, p, origin, {0, 2}) == doctest::Approx(-a * a).epsilon(1e-5));
    std::vector<double> x1{0.3, 0.5};
    CHECK(input_derivatives(one, p, x1, {0, 1}) == doctest::Approx(-a * std::sin(a * 0.3)).epsilon(1e-5));

    one.fd_step = 0.04;
    const double e1 = std::abs(input_derivatives(one, p, origin, {0, 2}) + a * a);
    one.fd_step = 0.02;
    const double e2 = std::abs(input_derivatives(one, p, origin, {0, 2}) + a * a);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.01));

    Box box{{-1, 1}, {0, 1}};
    std::vector<double> edge{0.99995, 0.5};
    one.fd_step = 1e-3;
    CHECK_THROWS_AS(input_derivatives(one, p, edge, {0, 2}, &box), DomainError);
    CHECK_NOTHROW(input_derivatives(one, p, x1, {0, 2}, &box));
}

TEST_CASE("compiled observable agrees with the statevector path") {
    for (auto agg : {Aggregation::sum_z, Aggregation::mean_z, Aggregation::product_z}) {
        for (auto ent : {Entangler::chain, Entangler::ring}) {
            ModelConfig c = heat1d_model();
            c.aggregation = agg;
            c.ansatz.entangler = ent;
            c.ansatz.rotation_pattern = {GateKind::RY, GateKind::RZ, GateKind::RX};
            auto p = init_params(c, 5, M_PI);
            CompiledObservable obs(c, p.theta);
            std::mt19937_64 rng(4);
            std::uniform_real_distribution<double> u(-1, 1);
            for (int i = 0; i < 10; ++i) {
                std::vector<double> pt{u(rng), 0.5 + 0.4 * u(rng)};
                const double direct = (forward(c, p, pt) - p.bias) / p.scale;
                CHECK(compiled_raw_output(obs, p.xi, pt) == doctest::Approx(direct).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("compiled gradients agree with parameter shift") {
    auto c = heat1d_model();
    auto p = init_params(c, 8, M_PI);
    CompiledObservable obs(c, p.theta);
    const std::size_t dim = obs.dim();
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1, 1);

    std::vector<double> r(dim * dim, 0.0), expect(40, 0.0);
    for (int i = 0; i < 6; ++i) {
        std::vector<double> pt{u(rng), 0.5 + 0.4 * u(rng)};
        const double w = u(rng);
        auto ang = embed_forward(p.xi, pt).angles;
        std::vector<double> psi(dim), mpsi(dim), dpsi(5 * dim), dang(5);
        encoding_state(ang, psi);
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = 0; b < dim; ++b) r[a * dim + b] += w * psi[a] * psi[b];
        auto g = grad_params(c, p, pt);
        for (std::size_t k = 0; k < 40; ++k) expect[k] += w * g.d_theta[k] / p.scale;

        obs.value(psi, mpsi);
        encoding_state_derivatives(ang, dpsi);
        obs.angle_gradient(mpsi, dpsi, dang);
        std::vector<double> rev(5), scratch(2 * dim);
        encoding_backward(ang, mpsi, rev, scratch);
        for (unsigned q = 0; q < 5; ++q) {
            CHECK(2.0 * rev[q] == doctest::Approx(dang[q]).epsilon(1e-12));
            const double fd = test::central_fd([&](double v) {
                auto a2 = ang;
                a2[q] = v;
                std::vector<double> s(dim), ms(dim);
                encoding_state(a2, s);
                return obs.value(s, ms);
            }, ang[q]);
            CHECK(std::abs(dang[q] - fd) < 1e-8);
        }
    }
    auto got = obs.theta_gradient(r);
    for (std::size_t k = 0; k < 40; ++k) CHECK(got[k] == doctest::Approx(expect[k]).epsilon(1e-10));
}
