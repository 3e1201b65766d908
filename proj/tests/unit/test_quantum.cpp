#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qpinn/quantum.hpp"
#include "qpinn/simd/kernels.hpp"

using namespace qpinn;
using qpinn::test::cplx;

TEST_CASE("init_zero_state") {
    for (unsigned n : {1u, 2u, 5u}) {
        auto s = init_zero_state(n);
        REQUIRE(s.dim() == (std::size_t{1} << n));
        CHECK(s[0] == cplx(1, 0));
        for (std::size_t k = 1; k < s.dim(); ++k) CHECK(s[k] == cplx(0, 0));
    }
    CHECK_THROWS_AS(init_zero_state(0), std::invalid_argument);
    CHECK_THROWS_AS(init_zero_state(21), std::invalid_argument);
    CHECK_NOTHROW(init_zero_state(20));
}

TEST_CASE("apply_gate examples") {
    auto s = apply_gate(init_zero_state(1), GateOp::ry(0, M_PI));
    CHECK(std::abs(s[0]) < 1e-15);
    CHECK(std::abs(s[1] - cplx(1, 0)) < 1e-15);

    s = apply_gate(init_zero_state(1), GateOp::ry(0, M_PI / 2));
    CHECK(std::abs(s[0] - std::sqrt(0.5)) < 1e-15);
    CHECK(std::abs(s[1] - std::sqrt(0.5)) < 1e-15);

    // |01> means amplitude index 1 (qubit 0 set).
    auto two = init_zero_state(2);
    two[0] = 0;
    two[1] = 1;
    two = apply_gate(two, GateOp::cnot(0, 1));
    CHECK(two[3] == cplx(1, 0));
    CHECK(two[1] == cplx(0, 0));
}

TEST_CASE("apply_gate leaves its argument untouched") {
    const auto s = init_zero_state(2);
    auto t = apply_gate(s, GateOp::ry(1, 1.0));
    CHECK(s[0] == cplx(1, 0));
    CHECK(t[0] != cplx(1, 0));
}

TEST_CASE("gate validation") {
    auto s = init_zero_state(2);
    CHECK_THROWS_AS(apply_gate(s, GateOp::ry(2, 0.1)), std::out_of_range);
    CHECK_THROWS_AS(apply_gate(s, GateOp::cnot(0, 2)), std::out_of_range);
    CHECK_THROWS_AS(apply_gate(s, GateOp::cnot(1, 1)), std::invalid_argument);
    GateOp bad{GateKind::CNOT, 1, std::nullopt, 0.0};
    CHECK_THROWS_AS(apply_gate(s, bad), std::invalid_argument);
    CHECK_THROWS_AS(expect_z(s, 2), std::out_of_range);
}

TEST_CASE("expect_z examples") {
    CHECK(expect_z(init_zero_state(1), 0) == 1.0);
    CHECK(std::abs(expect_z(apply_gate(init_zero_state(1), GateOp::ry(0, M_PI / 2)), 0)) < 1e-12);
    for (double th : {0.3, 1.1, 2.7}) {
        auto s = apply_gate(init_zero_state(1), GateOp::ry(0, th));
        // direct 2x2 product: (cos th/2, sin th/2)
        const double a = std::cos(th / 2), b = std::sin(th / 2);
        CHECK(expect_z(s, 0) == doctest::Approx(a * a - b * b).epsilon(1e-14));
        CHECK(expect_z(s, 0) == doctest::Approx(std::cos(th)).epsilon(1e-14));
    }
}

TEST_CASE("expect_z_sum examples") {
    CHECK(expect_z_sum(init_zero_state(5)) == 5.0);
    auto s = init_zero_state(3);
    for (unsigned q = 0; q < 3; ++q) s.apply(GateOp::ry(q, M_PI / 2));
    CHECK(std::abs(expect_z_sum(s)) < 1e-12);
    auto t = apply_gate(init_zero_state(2), GateOp::ry(0, 0.4));
    CHECK(expect_z_sum(t) == doctest::Approx(std::cos(0.4) + 1).epsilon(1e-14));
}

TEST_CASE("expect_z_product") {
    auto s = init_zero_state(2);
    s.apply(GateOp::ry(0, 0.4));
    s.apply(GateOp::ry(1, 1.3));
    CHECK(expect_z_product(s) == doctest::Approx(std::cos(0.4) * std::cos(1.3)).epsilon(1e-14));
}

namespace {

void run_properties() {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<unsigned> nq(1, 6);
    std::uniform_int_distribution<std::size_t> len(0, 100);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const unsigned n = nq(rng);
        auto gates = test::random_circuit(rng, n, len(rng));
        auto s = init_zero_state(n);
        s.apply(gates);
        worst = std::max(worst, std::abs(s.norm_sq() - 1.0));
        for (unsigned q = 0; q < n; ++q) {
            const double z = expect_z(s, q);
            CHECK(z <= 1.0 + 1e-12);
            CHECK(z >= -1.0 - 1e-12);
        }
    }
    CHECK(worst < 1e-12);

    // involution and CNOT^2
    for (int trial = 0; trial < 50; ++trial) {
        const unsigned n = std::max(2u, nq(rng));
        auto s = init_zero_state(n);
        s.apply(test::random_circuit(rng, n, 20));
        const auto ref = s;
        std::uniform_real_distribution<double> ang(-7, 7);
        const double th = ang(rng);
        auto t = apply_gate(apply_gate(s, GateOp::ry(trial % n, th)), GateOp::ry(trial % n, -th));
        auto u = apply_gate(apply_gate(s, GateOp::cnot(0, n - 1)), GateOp::cnot(0, n - 1));
        for (std::size_t k = 0; k < s.dim(); ++k) {
            CHECK(std::abs(t[k] - ref[k]) < 1e-12);
            CHECK(std::abs(u[k] - ref[k]) < 1e-12);
        }
    }

    // dense Kronecker-product oracle
    for (int trial = 0; trial < 60; ++trial) {
        const unsigned n = 1 + trial % 4;
        auto gates = test::random_circuit(rng, n, 25);
        auto s = init_zero_state(n);
        s.apply(gates);
        auto d = test::dense_run(gates, n);
        for (std::size_t k = 0; k < s.dim(); ++k) CHECK(std::abs(s[k] - d[k]) < 1e-12);
        for (unsigned q = 0; q < n; ++q)
            CHECK(std::abs(expect_z(s, q) - test::dense_expect_z(d, q)) < 1e-12);
    }

    // expect_z is linear in the probabilities: mixing two states' |a|^2
    for (int trial = 0; trial < 20; ++trial) {
        const unsigned n = 3;
        auto a = init_zero_state(n), b = init_zero_state(n);
        a.apply(test::random_circuit(rng, n, 15));
        b.apply(test::random_circuit(rng, n, 15));
        const double w = 0.3;
        // amplitudes with |c_k|^2 = w|a_k|^2 + (1-w)|b_k|^2
        auto c = init_zero_state(n);
        for (std::size_t k = 0; k < c.dim(); ++k) c[k] = std::sqrt(w * std::norm(a[k]) + (1 - w) * std::norm(b[k]));
        for (unsigned q = 0; q < n; ++q)
            CHECK(expect_z(c, q) == doctest::Approx(w * expect_z(a, q) + (1 - w) * expect_z(b, q)).epsilon(1e-13));
    }
}

}  // namespace

TEST_CASE("properties under the scalar kernels") {
    REQUIRE(simd::select(simd::Isa::scalar));
    run_properties();
}

TEST_CASE("properties under the vector kernels") {
    if (!simd::select(simd::Isa::avx2)) {
        MESSAGE("avx2 unavailable");
        return;
    }
    run_properties();
}
