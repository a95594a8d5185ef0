#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "qkes/oracle.hpp"
#include "qkes/rng.hpp"
#include "qkes/statevec.hpp"

using namespace qkes;
using namespace qkes::sv;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void require_state(const StateVector& s, const std::vector<cplx>& expected,
                   double tol = 1e-12) {
    REQUIRE(s.amps.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        INFO("amplitude index " << i);
        REQUIRE(std::abs(s.amps[i] - expected[i]) < tol);
    }
}

} // namespace

TEST_CASE("bell state amplitude tables") {
    require_state(make_bell(Bell::phi_plus), {kInvSqrt2, 0, 0, kInvSqrt2});
    require_state(make_bell(Bell::phi_minus), {kInvSqrt2, 0, 0, -kInvSqrt2});
    require_state(make_bell(Bell::psi_plus), {0, kInvSqrt2, kInvSqrt2, 0});
    require_state(make_bell(Bell::psi_minus), {0, kInvSqrt2, -kInvSqrt2, 0});
    REQUIRE(norm_squared(make_bell(Bell::phi_plus)) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("cnot truth table and entangling action") {
    // |10> (control qubit 0 set) -> |11>
    auto s = make_basis_state(2, 0b01);
    s = apply_cnot(s, 0, 1);
    require_state(s, {0, 0, 0, 1});

    // control clear: |00> unchanged
    auto z = apply_cnot(make_basis_state(2, 0), 0, 1);
    require_state(z, {1, 0, 0, 0});

    // phi+ (x) |0>, CNOT(0 -> 2): amplitude moves from index 3 to 7
    auto fan = tensor(make_bell(Bell::phi_plus), make_basis_state(1, 0));
    fan = apply_cnot(fan, 0, 2);
    std::vector<cplx> expected(8, 0);
    expected[0] = kInvSqrt2;
    expected[7] = kInvSqrt2;
    require_state(fan, expected);

    // against the dense oracle for the same circuit
    auto dense = oracle::matvec(
        oracle::dense_cnot(3, 0, 2),
        tensor(make_bell(Bell::phi_plus), make_basis_state(1, 0)).amps);
    require_state(fan, dense, 1e-12);
}

TEST_CASE("cnot precondition failures") {
    const auto s = make_basis_state(2, 0);
    REQUIRE_THROWS_AS(apply_cnot(s, 0, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(apply_cnot(s, 0, 5), std::out_of_range);
}

TEST_CASE("pauli applications on eigenstates") {
    // X|0> = |1>
    require_state(apply_pauli(make_basis_state(1, 0), Pauli::X, 0), {0, 1});
    // Y|0> = i|1>
    require_state(apply_pauli(make_basis_state(1, 0), Pauli::Y, 0), {0, cplx(0, 1)});
    // Z|+> = |->
    require_state(apply_pauli(make_x_basis_state(0), Pauli::Z, 0),
                  {kInvSqrt2, -kInvSqrt2});
    REQUIRE_THROWS_AS(apply_pauli(make_basis_state(1, 0), Pauli::X, 3),
                      std::out_of_range);
}

TEST_CASE("norm preserved through random gate sequences") {
    Rng rng(11);
    StateVector s = tensor(tensor(random_qubit_state(rng), random_qubit_state(rng)),
                           random_qubit_state(rng));
    for (int step = 0; step < 50; ++step) {
        if (rng.bernoulli(0.5)) {
            const int c = static_cast<int>(rng.below(3));
            int t = static_cast<int>(rng.below(3));
            if (t == c) t = (t + 1) % 3;
            s = apply_cnot(s, c, t);
        } else {
            s = apply_pauli(s, static_cast<Pauli>(1 + rng.below(3)),
                            static_cast<int>(rng.below(3)));
        }
        REQUIRE(norm_squared(s) == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("cnot is an involution on random states") {
    Rng rng(12);
    for (int trial = 0; trial < 25; ++trial) {
        const StateVector s =
            tensor(random_qubit_state(rng), random_qubit_state(rng));
        const StateVector twice = apply_cnot(apply_cnot(s, 0, 1), 0, 1);
        for (std::size_t i = 0; i < s.dim(); ++i)
            REQUIRE(std::abs(twice.amps[i] - s.amps[i]) < 1e-12);
    }
}

TEST_CASE("measurement on eigenstates is deterministic") {
    Rng rng(13);
    auto [bit_z, post_z] = measure(make_basis_state(1, 1), 0, Basis::Z, rng);
    REQUIRE(bit_z == 1);
    REQUIRE(norm_squared(post_z) == Catch::Approx(1.0).margin(1e-12));

    auto [bit_x, post_x] = measure(make_x_basis_state(0), 0, Basis::X, rng);
    REQUIRE(bit_x == 0);
    auto [bit_xm, post_xm] = measure(make_x_basis_state(1), 0, Basis::X, rng);
    REQUIRE(bit_xm == 1);
    (void)post_x;
    (void)post_xm;
}

TEST_CASE("born rule on |0> measured in X: near-uniform over 10000 trials") {
    Rng rng(14);
    int ones = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        auto [bit, post] = measure(make_basis_state(1, 0), 0, Basis::X, rng);
        (void)post;
        ones += bit;
    }
    REQUIRE(static_cast<double>(ones) / trials == Catch::Approx(0.5).margin(0.02));
}

TEST_CASE("post-measurement state collapses and renormalizes") {
    Rng rng(15);
    // measure qubit 0 of phi+ in Z; the two outcomes collapse qubit 1 too
    auto [bit, post] = measure(make_bell(Bell::phi_plus), 0, Basis::Z, rng);
    REQUIRE(norm_squared(post) == Catch::Approx(1.0).margin(1e-12));
    const std::size_t expect = bit ? 3 : 0;
    REQUIRE(std::abs(post.amps[expect]) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("error propagation table with randomized message states") {
    Rng rng(16);
    for (int trial = 0; trial < 100; ++trial) {
        const auto rx = verify_propagation(Pauli::X, rng);
        REQUIRE(rx.verified);
        REQUIRE(rx.pair_error == Pauli::I);
        REQUIRE(rx.message_error == Pauli::X);

        const auto rz = verify_propagation(Pauli::Z, rng);
        REQUIRE(rz.verified);
        REQUIRE(rz.pair_error == Pauli::Z);
        REQUIRE(rz.message_error == Pauli::Z);

        const auto ry = verify_propagation(Pauli::Y, rng);
        REQUIRE(ry.verified);
        REQUIRE(ry.pair_error == Pauli::Z);
        REQUIRE(ry.message_error == Pauli::Y);
    }
    REQUIRE_THROWS_AS(verify_propagation(Pauli::I, rng), std::invalid_argument);
}

TEST_CASE("propagation pipeline agrees with the dense-matrix oracle") {
    Rng rng(17);
    for (Pauli err : {Pauli::X, Pauli::Y, Pauli::Z}) {
        for (int trial = 0; trial < 30; ++trial) {
            const StateVector chi = random_qubit_state(rng);
            StateVector fast = tensor(make_bell(Bell::phi_plus), chi);
            oracle::Vec dense = fast.amps;
            fast = apply_cnot(fast, 0, 2);
            fast = apply_pauli(fast, err, 2);
            fast = apply_cnot(fast, 1, 2);
            dense = oracle::matvec(oracle::dense_cnot(3, 0, 2), dense);
            dense = oracle::matvec(oracle::dense_pauli(3, 2, err), dense);
            dense = oracle::matvec(oracle::dense_cnot(3, 1, 2), dense);
            for (std::size_t i = 0; i < dense.size(); ++i)
                REQUIRE(std::abs(dense[i] - fast.amps[i]) < 1e-10);
        }
    }
}

TEST_CASE("a corrupted cnot breaks the propagation check") {
    Rng rng(18);
    // Swapping control and target is a representative wiring bug.
    const CnotFn corrupted = [](const StateVector& s, int c, int t) {
        return apply_cnot(s, t, c);
    };
    bool all_match = true;
    for (int trial = 0; trial < 10; ++trial) {
        const auto res = verify_propagation(Pauli::Z, rng, corrupted);
        all_match = all_match && res.verified && res.pair_error == Pauli::Z &&
                    res.message_error == Pauli::Z;
    }
    REQUIRE_FALSE(all_match);
}

TEST_CASE("global-phase equality ignores a common phase only") {
    const StateVector plus = make_x_basis_state(0);
    StateVector rotated = plus;
    const cplx phase = std::polar(1.0, 1.234);
    for (auto& a : rotated.amps) a *= phase;
    REQUIRE(equal_up_to_global_phase(plus, rotated, 1e-12));
    REQUIRE_FALSE(equal_up_to_global_phase(plus, make_x_basis_state(1), 1e-6));
}

TEST_CASE("exact measurement distribution matches sampling expectations") {
    const auto probs = measurement_distribution(make_bell(Bell::phi_plus),
                                                {{0, Basis::Z}, {1, Basis::Z}});
    REQUIRE(probs[0] == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(probs[3] == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(probs[1] == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(probs[2] == Catch::Approx(0.0).margin(1e-12));

    // phi+ measured in X on both qubits: correlated again
    const auto probs_x = measurement_distribution(make_bell(Bell::phi_plus),
                                                  {{0, Basis::X}, {1, Basis::X}});
    REQUIRE(probs_x[0] == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(probs_x[3] == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("qubit count is capped") {
    REQUIRE_THROWS_AS(make_basis_state(9, 0), std::invalid_argument);
    const auto a = make_basis_state(5, 0);
    const auto b = make_basis_state(4, 0);
    REQUIRE_THROWS_AS(tensor(a, b), std::invalid_argument);
}
