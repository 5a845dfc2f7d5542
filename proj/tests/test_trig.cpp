#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fermicurve/trig.hpp"

#include <cmath>
#include <random>

using namespace fermi;

TEST_CASE("arithmetic and evaluation agree pointwise") {
    PeriodPair L(1.0, 1.5);
    Trig2 a(L), b(L);
    a.set(1, 0, cplx(0.5, -0.25));
    a.set(-1, 0, cplx(0.5, 0.25));
    a.set(0, 2, 1.0);
    b.set(0, 1, cplx(0.0, 1.0));
    b.set(2, -1, cplx(0.3, 0.0));

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 6.0);
    for (int t = 0; t < 20; ++t) {
        const double x = u(rng), y = u(rng);
        const cplx va = a.evaluate(x, y), vb = b.evaluate(x, y);
        CHECK(std::abs((a + b).evaluate(x, y) - (va + vb)) < 1e-13);
        CHECK(std::abs(a.mul(b).evaluate(x, y) - va * vb) < 1e-13);
        CHECK(std::abs(a.conj_function().evaluate(x, y) - std::conj(va)) <
              1e-13);
    }
}

TEST_CASE("derivatives are exact on modes") {
    PeriodPair L(2.0, 1.0);
    Trig2 a(L);
    a.set(3, -2, cplx(1.0, 2.0));
    const double x = 0.7, y = 1.9;
    const cplx expect_dx =
        a.coeff(3, -2) * cplx(0.0, 3.0 / L.l1) *
        std::exp(cplx(0.0, 3.0 * x / L.l1 - 2.0 * y / L.l2));
    CHECK(std::abs(a.dx().evaluate(x, y) - expect_dx) < 1e-14);
    // round trip: differentiate then integrate mode-wise returns the input
    Trig2 d = a.dy();
    Trig2 back(L);
    for (const auto& [k, v] : d.coeffs())
        back.add(k.first, k.second, v / cplx(0.0, k.second / L.l2));
    CHECK(std::abs(back.coeff(3, -2) - a.coeff(3, -2)) < 1e-13);
}

TEST_CASE("x_average keeps only the n=0 line") {
    PeriodPair L(1.0, 1.0);
    Trig2 a(L);
    a.set(0, 1, 2.0);
    a.set(1, 1, 5.0);
    a.set(0, 0, cplx(0.0, 3.0));
    Trig2 m = a.x_average();
    CHECK(m.size() == 2);
    CHECK(m.coeff(0, 1) == cplx(2.0, 0.0));
    CHECK(m.coeff(0, 0) == cplx(0.0, 3.0));
    CHECK(a.mean() == cplx(0.0, 3.0));
}

TEST_CASE("prune and zero handling") {
    PeriodPair L(1.0, 1.0);
    Trig2 a(L);
    a.set(1, 1, 1e-20);
    a.set(2, 2, 1.0);
    a.add(2, 2, -1.0); // exact cancellation removes the key
    CHECK(a.coeff(2, 2) == cplx(0.0, 0.0));
    a.prune(1e-15);
    CHECK(a.empty());
}
