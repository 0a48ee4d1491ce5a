#include "doctest.h"

#include <stdexcept>

#include "cdsurf/pauli.hpp"
#include "cdsurf/rng.hpp"

using namespace cdsurf;

TEST_CASE("single-qubit commutation table") {
    CHECK(pauli_commutes(Pauli::I, Pauli::X));
    CHECK(pauli_commutes(Pauli::X, Pauli::X));
    CHECK_FALSE(pauli_commutes(Pauli::X, Pauli::Z));
    CHECK_FALSE(pauli_commutes(Pauli::Y, Pauli::Z));
}

TEST_CASE("commutes on canonical pairs") {
    const auto x0 = PauliOperator::from_string("XI");
    const auto z0 = PauliOperator::from_string("ZI");
    const auto z1 = PauliOperator::from_string("IZ");
    CHECK_FALSE(commutes(x0, z0));
    CHECK(commutes(x0, z1));

    // Two anticommuting overlaps cancel mod 2.
    const auto xz = PauliOperator::from_string("XZ");
    const auto zx = PauliOperator::from_string("ZX");
    CHECK(commutes(xz, zx));
}

TEST_CASE("commutes rejects length mismatch") {
    CHECK_THROWS_AS(commutes(PauliOperator(3), PauliOperator(4)), std::invalid_argument);
}

TEST_CASE("composition is bitwise xor") {
    auto a = PauliOperator::from_string("XYZI");
    const auto b = PauliOperator::from_string("YYIZ");
    a *= b;
    CHECK(a.to_string() == "ZIZZ");
    CHECK((b * b).is_identity());
}

TEST_CASE("string round trip and support") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.next_below(130);
        PauliOperator op(n);
        for (std::size_t q = 0; q < n; ++q) {
            op.set(q, static_cast<Pauli>(rng.next_below(4)));
        }
        CHECK(PauliOperator::from_string(op.to_string()) == op);
        CHECK(op.support().size() == op.weight());
    }
}

TEST_CASE("symplectic product matches brute-force anticommutation count") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.next_below(70);
        PauliOperator a(n), b(n);
        for (std::size_t q = 0; q < n; ++q) {
            a.set(q, static_cast<Pauli>(rng.next_below(4)));
            b.set(q, static_cast<Pauli>(rng.next_below(4)));
        }
        int anti = 0;
        for (std::size_t q = 0; q < n; ++q) {
            if (!pauli_commutes(a.get(q), b.get(q))) ++anti;
        }
        CHECK(commutes(a, b) == (anti % 2 == 0));
    }
}
