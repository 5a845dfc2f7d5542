#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fermicurve/lattice.hpp"

#include <cmath>
#include <random>

using namespace fermi;

static double rel_err(cplx a, cplx b) {
    return std::abs(a - b) / (1.0 + std::abs(b));
}

TEST_CASE("free_bloch closed form") {
    CHECK(rel_err(free_bloch(1.0, 0.0, 1.0, 0.0), std::exp(1.0)) < 1e-15);
    CHECK(rel_err(free_bloch(cplx(0.3, 1.7), cplx(-2.0, 0.1), 0.0, 0.0), 1.0) <
          1e-15);
    // k=1, E=-4: exponent k z - (E/4k) zbar = z + zbar = 2x.
    CHECK(rel_err(free_bloch(1.0, -4.0, 1.0, 0.0), std::exp(2.0)) < 1e-14);
    CHECK_THROWS_AS(free_bloch(0.0, -4.0, 0.1, 0.2), std::domain_error);
}

TEST_CASE("multipliers closed form and symmetries") {
    PeriodPair L(1.0, 1.0);
    auto [w1, w2] = multipliers(1.0, -4.0, L);
    CHECK(rel_err(w1, std::exp(4.0 * PI)) < 1e-12);
    CHECK(rel_err(w2, 1.0) < 1e-13);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 50; ++t) {
        const cplx k(u(rng), u(rng));
        if (std::abs(k) < 0.1) continue;
        const cplx E(-4.0, 0.0);
        auto [a1, a2] = multipliers(k, E, L);
        auto [b1, b2] = multipliers(-k, E, L);
        CHECK(std::abs(a1 * b1 - 1.0) < 1e-12 * (1.0 + std::abs(a1 * b1)));
        CHECK(std::abs(a2 * b2 - 1.0) < 1e-12 * (1.0 + std::abs(a2 * b2)));

        // tau(k) = -conj(E)/(4 conj(k)) conjugates both multipliers (E real).
        const cplx tk = -std::conj(E) / (4.0 * std::conj(k));
        auto [c1, c2] = multipliers(tk, E, L);
        CHECK(std::abs(c1 - std::conj(a1)) < 1e-12 * (1.0 + std::abs(a1)));
        CHECK(std::abs(c2 - std::conj(a2)) < 1e-12 * (1.0 + std::abs(a2)));
    }

    // k real, E < 0: exponent of w2 purely imaginary.
    auto [w1r, w2r] = multipliers(0.7, -1.3, L);
    CHECK(std::abs(std::abs(w2r) - 1.0) < 1e-13);
}

TEST_CASE("fiber_points solves w1(k)=w1(k0)") {
    PeriodPair L(1.0, 1.0);
    const cplx k0(2.0, 0.0), E(-4.0, 0.0);

    auto pts = fiber_points(k0, E, L, 0);
    REQUIRE(pts.size() == 2);
    // n=0 fiber is {k0, -E/(4 k0)}.
    bool has_k0 = false, has_partner = false;
    for (const auto& fp : pts) {
        if (std::abs(fp.k - k0) < 1e-12) has_k0 = true;
        if (std::abs(fp.k - (-E / (4.0 * k0))) < 1e-12) has_partner = true;
    }
    CHECK(has_k0);
    CHECK(has_partner);

    // Resubstitution for a spread of branches.
    const cplx w10 = multipliers(k0, E, L).first;
    for (const auto& fp : fiber_points(k0, E, L, 4)) {
        const cplx w1 = multipliers(fp.k, E, L).first;
        CHECK(std::abs(w1 / w10 - 1.0) < 1e-10);
    }

    // Closed-form cross-check for n=1, k0=1: the quadratic in k solved by
    // independent arithmetic.
    auto pts1 = fiber_points(1.0, E, L, 1);
    const cplx b = cplx(0.0, 1.0) + (cplx(1.0) - E / 4.0); // i + 2
    const cplx root = std::sqrt(b * b + E);
    int matched = 0;
    for (const auto& fp : pts1) {
        if (fp.idx.n != 1) continue;
        const cplx expect = 0.5 * (b + double(fp.idx.sign) * root);
        if (std::abs(fp.k - expect) < 1e-12) ++matched;
    }
    CHECK(matched == 2);
}

TEST_CASE("resonance points: values, identities, degeneracy") {
    PeriodPair L(1.0, 1.0);
    const cplx E(-4.0, 0.0);

    auto rp = resonance_point(ResonanceIndex(1, 0, +1), E, L);
    auto rm = resonance_point(ResonanceIndex(1, 0, -1), E, L);
    CHECK(!rp.degenerate);
    CHECK(rel_err(rp.k, cplx(0.0, (1.0 + std::sqrt(17.0)) / 4.0)) < 1e-13);
    CHECK(rel_err(rm.k, cplx(0.0, (1.0 - std::sqrt(17.0)) / 4.0)) < 1e-13);

    // w_i(k_{n,m}^pm) = w_i(k_{-n,-m}^mp) for all 0 < |n|,|m| <= 5.
    for (int n = -5; n <= 5; ++n)
        for (int m = -5; m <= 5; ++m) {
            if (n == 0 && m == 0) continue;
            for (int sg : {+1, -1}) {
                auto a = resonance_point(ResonanceIndex(n, m, sg), E, L);
                auto b = resonance_point(ResonanceIndex(-n, -m, -sg), E, L);
                auto [wa1, wa2] = multipliers(a.k, E, L);
                auto [wb1, wb2] = multipliers(b.k, E, L);
                CHECK(std::abs(wa1 - wb1) < 1e-10 * (1.0 + std::abs(wa1)));
                CHECK(std::abs(wa2 - wb2) < 1e-10 * (1.0 + std::abs(wa2)));
            }
        }

    // The free conjugation symmetry at resonance pairs, E real < 0:
    // psi(k_{n,m}^+) = conj(psi(k_{-n,-m}^-)) pointwise.
    auto kp = resonance_point(ResonanceIndex(2, 1, +1), E, L).k;
    auto km = resonance_point(ResonanceIndex(-2, -1, -1), E, L).k;
    for (double x : {0.3, 1.1})
        for (double y : {0.0, 0.7}) {
            const cplx va = free_bloch(kp, E, x, y);
            const cplx vb = std::conj(free_bloch(km, E, x, y));
            CHECK(std::abs(va - vb) < 1e-12 * (1.0 + std::abs(va)));
        }

    // Degenerate radicand at E = E_{1,0}.
    const double Edeg = eigenlevel(1, 0, L);
    auto d1 = resonance_point(ResonanceIndex(1, 0, +1), Edeg, L);
    auto d2 = resonance_point(ResonanceIndex(1, 0, -1), Edeg, L);
    CHECK(d1.degenerate);
    CHECK(std::abs(d1.k - d2.k) < 1e-13);
}

TEST_CASE("eigenlevel") {
    PeriodPair L(1.0, 1.0);
    CHECK(eigenlevel(0, 1, L) == 0.25); // exact in binary floating point
    CHECK(eigenlevel(0, 0, L) == 0.0);
    CHECK(eigenlevel(3, -2, L) == eigenlevel(-3, 2, L));
    PeriodPair L2(2.0, 0.5);
    CHECK(eigenlevel(1, 1, L2) ==
          doctest::Approx((4.0 + 0.25) / (4.0 * 4.0 * 0.25)));
}

TEST_CASE("weight_r") {
    PeriodPair L(1.0, 1.0);
    CHECK(std::abs(weight_r(1.0, -4.0, L)) < 1e-14);
    const cplx k(0.4, 1.2), E(-2.5, 0.0);
    CHECK(std::abs(weight_r(k, E, L) + weight_r(-k, E, L)) < 1e-13);
    // k=i, E=-4: r = 4*pi*i*(i + i) = -8*pi.
    CHECK(rel_err(weight_r(cplx(0.0, 1.0), -4.0, L), cplx(-8.0 * PI, 0.0)) <
          1e-13);
    // Ratio of the (rr) weight to the averaged Wronskian is 2*pi*l1.
    CHECK(rel_err(weight_r(k, E, L) / weight_wronskian(k, E),
                  cplx(2.0 * PI * L.l1, 0.0)) < 1e-13);
}

TEST_CASE("no sigma-tau fixed points for E < 0 (free)") {
    PeriodPair L(1.0, 1.0);
    auto scan = scan_stau_fixed_points(-4.0, L, 0.05, 20.0, 60, 120);
    CHECK(scan.hits == 0);
    CHECK(scan.points_scanned == 60 * 120);
}
