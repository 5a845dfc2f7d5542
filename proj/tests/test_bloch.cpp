#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fermicurve/bloch.hpp"

#include <cmath>
#include <random>

using namespace fermi;

namespace {

// 4th-order central Laplacian of the evaluated solution; independent of the
// Fourier-side residual assembly.
cplx fd_laplacian(const BlochSeries& b, double x, double y, double h) {
    auto f = [&](double xx, double yy) { return b.evaluate(xx, yy); };
    auto d2 = [&](auto&& g) {
        return (-g(2.0 * h) + 16.0 * g(h) - 30.0 * g(0.0) + 16.0 * g(-h) -
                g(-2.0 * h)) /
               (12.0 * h * h);
    };
    const cplx dxx = d2([&](double t) { return f(x + t, y); });
    const cplx dyy = d2([&](double t) { return f(x, y + t); });
    return dxx + dyy;
}

} // namespace

TEST_CASE("v == 0 reproduces the free solution") {
    PeriodPair L(1.0, 1.0);
    FourierPotential v(L);
    auto b = assemble_bloch(cplx(1.7, 0.4), -4.0, v, 3, L);
    for (int s = 1; s <= 3; ++s) {
        CHECK(b.F(s).empty());
        CHECK(b.P(s).empty());
    }
    CHECK(std::abs(b.w2_tilde() - b.w2()) < 1e-14);
    for (double x : {0.2, 1.4})
        for (double y : {0.1, 2.2}) {
            const cplx free = free_bloch(cplx(1.7, 0.4), -4.0, x, y);
            CHECK(std::abs(b.evaluate(x, y) - free) <
                  1e-12 * (1.0 + std::abs(free)));
        }
}

TEST_CASE("F_1 vanishes when v has no x-averaged modes") {
    PeriodPair L(1.0, 1.0);
    FourierPotential v(L);
    v.set_mode(1, 1, 1e-3);
    v.set_mode(-1, -1, 1e-3);
    BlochSeries b(2.0, -4.0, v, L);
    b.advance_to(1);
    CHECK(series_step_F(1, b).empty());
    // First-order fiber coefficients obey the x-frequency selection rule.
    auto c1 = b.fiber_coefficient(1, FiberIndex{1, +1});
    auto c2 = b.fiber_coefficient(1, FiberIndex{2, +1});
    CHECK(!b.P(1).empty());
    CHECK(c2.modes.empty()); // no (2,*) mode in v
    (void)c1;
}

TEST_CASE("normalization and monodromy are exact") {
    PeriodPair L(1.0, 1.0);
    auto v = FourierPotential::two_cosine(1e-2, L);
    auto b = assemble_bloch(2.3, -4.0, v, 3, L);

    CHECK(std::abs(b.evaluate(0.0, 0.0) - 1.0) < 1e-13);

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 6.0);
    for (int t = 0; t < 12; ++t) {
        const double x = u(rng), y = u(rng);
        const cplx base = b.evaluate(x, y);
        const cplx shifted_x = b.evaluate(x + L.x_period(), y);
        CHECK(std::abs(shifted_x - b.w1() * base) <
              1e-12 * (1.0 + std::abs(shifted_x)));
        const cplx shifted_y = b.evaluate(x, y + L.y_period());
        CHECK(std::abs(shifted_y - b.w2_tilde() * base) <
              1e-10 * (1.0 + std::abs(shifted_y)));
    }
}

TEST_CASE("Fourier-side residual matches finite differences") {
    PeriodPair L(1.0, 1.0);
    const double eps = 1e-2;
    auto v = FourierPotential::two_cosine(eps, L);
    const cplx E(-4.0, 0.0);
    auto b = assemble_bloch(2.3, E, v, 2, L);

    const Trig2 tail = b.residual_tail();
    const cplx norm = b.norm_value();
    for (double x : {0.4, 2.8})
        for (double y : {0.9, 3.3}) {
            const cplx psi = b.evaluate(x, y);
            const cplx vval = v.series().evaluate(x, y);
            const cplx fd = -fd_laplacian(b, x, y, 1e-3) + (vval - E) * psi;
            const cplx carrier = std::exp(b.F_integral(y) + b.carrier_p() * x +
                                          cplx(0.0, 1.0) * b.carrier_s() * y);
            const cplx sym = carrier * tail.evaluate(x, y) / norm;
            CHECK(std::abs(fd - sym) < 1e-8 * (1.0 + std::abs(psi)));
        }
}

TEST_CASE("residual scaling at the benign in-fiber resonance k0 = 2") {
    // k0 = 2, E = -4 sits on the free (0,3) resonance (w20^2 = 1); the
    // deferred-amplitude solve must keep the series consistent through S=3.
    PeriodPair L(1.0, 1.0);
    const cplx E(-4.0, 0.0);
    std::vector<double> eps = {1e-2, 1e-3, 1e-4};
    std::vector<double> res;
    for (double e : eps) {
        auto v = FourierPotential::two_cosine(e, L);
        auto b = assemble_bloch(2.0, E, v, 3, L);
        res.push_back(b.residual_max(16, 16));
        // x-Floquet stays exact at every eps.
        const cplx base = b.evaluate(0.7, 1.1);
        const cplx shifted = b.evaluate(0.7 + L.x_period(), 1.1);
        CHECK(std::abs(shifted - b.w1() * base) <
              1e-10 * (1.0 + std::abs(shifted)));
    }
    // Least-squares slope of log10(res) vs log10(eps).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = int(eps.size());
    for (int i = 0; i < n; ++i) {
        const double X = std::log10(eps[i]), Y = std::log10(res[i]);
        sx += X;
        sy += Y;
        sxx += X * X;
        sxy += X * Y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope >= 3.8);
}

TEST_CASE("guards: degenerate weight and genuine resonant index") {
    PeriodPair L(1.0, 1.0);
    auto v = FourierPotential::two_cosine(1e-3, L);
    // s(k)=k+E/(4k)=0 at k=1 for E=-4: the pairing weight degenerates.
    CHECK_THROWS_AS(BlochSeries(1.0, -4.0, v, L), DegenerateWeightError);

    // Base point at the (1,0) resonance: the partner fiber -1 collides in w2
    // and the plain series must refuse.
    const cplx kres(0.0, (1.0 + std::sqrt(17.0)) / 4.0);
    BlochSeries b(kres, -4.0, v, L);
    CHECK_THROWS_AS(b.advance_to(2), ResonantIndexError);
}

TEST_CASE("fiber_coefficient standalone guards") {
    PeriodPair L(1.0, 1.0);
    auto v = FourierPotential::two_cosine(1e-3, L);
    BlochSeries b(2.0, -4.0, v, L);
    b.advance_to(1);
    // nu = (0,-) is exactly resonant with the base point at k0=2 (w2 = w20).
    CHECK_THROWS_AS(b.fiber_coefficient(1, FiberIndex{0, -1}),
                    ResonantIndexError);
}
