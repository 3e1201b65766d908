#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qpinn/circuit.hpp"

using namespace qpinn;

TEST_CASE("build_encoding") {
    std::vector<double> zeros(3, 0.0);
    auto g = build_encoding(zeros);
    REQUIRE(g.size() == 3);
    for (unsigned q = 0; q < 3; ++q) CHECK(g[q] == GateOp::ry(q, 0.0));

    AnsatzSpec none{2, 0, {GateKind::RY}, Entangler::chain};
    std::vector<double> flip{M_PI, 0.0};
    auto z = run_circuit(2, flip, none, {});
    CHECK(z[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(z[1] == doctest::Approx(1.0).epsilon(1e-14));

    std::vector<double> a{0.7, -0.2};
    z = run_circuit(2, a, none, {});
    CHECK(z[0] == doctest::Approx(std::cos(0.7)).epsilon(1e-14));
    CHECK(z[1] == doctest::Approx(std::cos(-0.2)).epsilon(1e-14));
}

TEST_CASE("build_ansatz structure") {
    AnsatzSpec s{2, 1, {GateKind::RY}, Entangler::chain};
    std::vector<double> th{0.1, 0.2};
    auto g = build_ansatz(s, th);
    REQUIRE(g.size() == 3);
    CHECK(g[0] == GateOp::ry(0, 0.1));
    CHECK(g[1] == GateOp::ry(1, 0.2));
    CHECK(g[2] == GateOp::cnot(0, 1));

    AnsatzSpec big{5, 4, {GateKind::RY, GateKind::RZ}, Entangler::chain};
    CHECK(big.parameter_count() == 40);
    std::vector<double> th40(40, 0.3);
    auto gates = build_ansatz(big, th40);
    std::size_t rot = 0, cx = 0;
    for (auto& x : gates) (x.is_rotation() ? rot : cx)++;
    CHECK(rot == 40);
    CHECK(cx == 16);

    AnsatzSpec ring{3, 1, {GateKind::RY}, Entangler::ring};
    std::vector<double> th3{0, 0, 0};
    auto rg = build_ansatz(ring, th3);
    CHECK(rg.back() == GateOp::cnot(2, 0));
}

TEST_CASE("theta ordering is layer-major, qubit-minor, pattern-innermost") {
    AnsatzSpec s{3, 2, {GateKind::RY, GateKind::RZ, GateKind::RX}, Entangler::chain};
    std::vector<double> th(s.parameter_count());
    for (std::size_t i = 0; i < th.size(); ++i) th[i] = double(i);
    auto g = build_ansatz(s, th);
    std::size_t k = 0;
    for (auto& x : g) {
        if (!x.is_rotation()) continue;
        const std::size_t l = k / 9, q = (k / 3) % 3, r = k % 3;
        CHECK(x.angle == double((l * 3 + q) * 3 + r));
        CHECK(x.target == q);
        CHECK(x.kind == s.rotation_pattern[r]);
        ++k;
    }
}

TEST_CASE("length mismatches and bad specs throw") {
    AnsatzSpec s{2, 1, {GateKind::RY}, Entangler::chain};
    std::vector<double> one{0.1};
    CHECK_THROWS_AS(build_ansatz(s, one), std::invalid_argument);
    CHECK_THROWS_AS(run_circuit(3, std::vector<double>{0, 0}, s, std::vector<double>{0, 0}), std::invalid_argument);
    AnsatzSpec ring1{1, 1, {GateKind::RY}, Entangler::ring};
    CHECK_THROWS_AS(ring1.validate(), std::invalid_argument);
    AnsatzSpec nopattern{2, 1, {}, Entangler::chain};
    CHECK_THROWS_AS(nopattern.validate(), std::invalid_argument);
}

TEST_CASE("run_circuit examples") {
    AnsatzSpec s{4, 2, {GateKind::RY, GateKind::RZ}, Entangler::ring};
    std::vector<double> enc(4, 0.0), th(s.parameter_count(), 0.0);
    for (double z : run_circuit(4, enc, s, th)) CHECK(z == doctest::Approx(1.0).epsilon(1e-14));

    AnsatzSpec none{1, 0, {GateKind::RY}, Entangler::chain};
    for (double phi : {0.2, 1.7, -2.9}) {
        std::vector<double> e{phi};
        CHECK(run_circuit(1, e, none, {})[0] == doctest::Approx(std::cos(phi)).epsilon(1e-14));
    }

    AnsatzSpec one{2, 1, {GateKind::RY}, Entangler::chain};
    std::vector<double> e2{M_PI / 2, 0.0}, t2{0.0, 0.0};
    auto z = run_circuit(2, e2, one, t2);
    auto d = test::dense_run(bind_circuit(one, e2, t2).gates, 2);
    CHECK(std::abs(z[0]) < 1e-12);
    CHECK(std::abs(z[1]) < 1e-12);
    CHECK(std::abs(z[0] - test::dense_expect_z(d, 0)) < 1e-12);
    CHECK(std::abs(z[1] - test::dense_expect_z(d, 1)) < 1e-12);
}

TEST_CASE("bound circuit invariants") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3, 3);
    for (unsigned n = 1; n <= 5; ++n) {
        for (unsigned layers = 0; layers <= 3; ++layers) {
            for (Entangler e : {Entangler::chain, Entangler::ring}) {
                if (e == Entangler::ring && n < 2) continue;
                AnsatzSpec s{n, layers, {GateKind::RY, GateKind::RZ}, e};
                std::vector<double> enc(n), th(s.parameter_count());
                for (auto& a : enc) a = u(rng);
                for (auto& a : th) a = u(rng);
                auto b = bind_circuit(s, enc, th);
                const std::size_t ring = e == Entangler::ring ? 1 : 0;
                CHECK(b.gates.size() == n + s.parameter_count() + layers * (n - 1 + ring));
                CHECK(b.enc_slots.size() == n);
                CHECK(b.var_slots.size() == s.parameter_count());
                for (auto i : b.enc_slots)
                    for (auto j : b.var_slots) CHECK(i != j);
                auto again = bind_circuit(s, enc, th);
                CHECK(again.gates == b.gates);
                CHECK(again.var_slots == b.var_slots);

                if (n <= 4) {
                    auto z = run_circuit(n, enc, s, th);
                    auto d = test::dense_run(b.gates, n);
                    for (unsigned q = 0; q < n; ++q) CHECK(std::abs(z[q] - test::dense_expect_z(d, q)) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("zero variational angles leave only the CNOT wiring") {
    AnsatzSpec s{3, 2, {GateKind::RY, GateKind::RZ}, Entangler::chain};
    std::vector<double> enc{0.4, 1.9, -0.8}, th(s.parameter_count(), 0.0);
    auto z = run_circuit(3, enc, s, th);
    std::vector<GateOp> only = build_encoding(enc);
    for (int l = 0; l < 2; ++l) {
        only.push_back(GateOp::cnot(0, 1));
        only.push_back(GateOp::cnot(1, 2));
    }
    auto d = test::dense_run(only, 3);
    for (unsigned q = 0; q < 3; ++q) CHECK(std::abs(z[q] - test::dense_expect_z(d, q)) < 1e-12);
}

TEST_CASE("execution counter and formatting") {
    AnsatzSpec s{2, 1, {GateKind::RY}, Entangler::chain};
    std::vector<double> enc{0.1, 0.2}, th{0.3, 0.4};
    const auto before = circuit_executions();
    run_circuit(2, enc, s, th);
    run_circuit_state(s, enc, th);
    CHECK(circuit_executions() - before == 2);

    auto text = format_circuit(bind_circuit(s, enc, th), true);
    CHECK(text == "RY q0 0.1000  enc\nRY q1 0.2000  enc\nRY q0 0.3000  var[0]\nRY q1 0.4000  var[1]\nCNOT q0 q1\n");
}
