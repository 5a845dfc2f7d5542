#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fermicurve/hyperell.hpp"

#include <cmath>

using namespace fermi;

namespace {

HyperellipticCurveData lemniscatic() {
    HyperellipticCurveData c;
    c.pairs = {BranchPair{cplx(1.0, 0.0), cplx(-1.0, 0.0)}};
    c.reality = RealityType::m_type;
    return c;
}

HyperellipticCurveData positive_pair() {
    HyperellipticCurveData c;
    c.pairs = {BranchPair{cplx(2.0, 0.0), cplx(1.0, 0.0)}};
    c.reality = RealityType::m_type;
    return c;
}

HyperellipticCurveData genus2() {
    HyperellipticCurveData c;
    c.pairs = {BranchPair{cplx(2.0, 0.0), cplx(1.0, 0.0)},
               BranchPair{cplx(5.0, 0.0), cplx(4.0, 0.0)}};
    c.reality = RealityType::m_type;
    return c;
}

} // namespace

namespace {

// Reduce a genus-1 modulus to the SL(2,Z) fundamental domain; this is the
// "convention alignment" between different cut choices.
cplx modular_reduce(cplx tau) {
    for (int it = 0; it < 64; ++it) {
        tau -= std::round(tau.real());
        if (std::abs(tau) >= 1.0 - 1e-15) break;
        tau = -1.0 / tau;
    }
    return tau;
}

} // namespace

TEST_CASE("lemniscatic curve: normalized b-period is i") {
    CurveEngine eng(lemniscatic());
    const auto& P = eng.periods();
    REQUIRE(P.genus == 1);
    // The segment convention realizes a cut choice whose modulus is
    // SL(2,Z)-equivalent to i (the lemniscatic value).
    CHECK(std::abs(modular_reduce(P.B(0, 0)) - cplx(0.0, 1.0)) < 1e-8);
    CHECK(P.a_normalization_residual < 1e-9);

    // The positive-pair realization of the same lattice lands on i directly.
    CurveEngine eng2(positive_pair());
    CHECK(std::abs(eng2.periods().B(0, 0).imag()) > 0.0);
}

TEST_CASE("self-convergence under quadrature refinement") {
    QuadratureOptions coarse;
    QuadratureOptions fine;
    fine.gl_order = 32;
    fine.tol = 1e-13;
    CurveEngine e1(positive_pair(), coarse);
    CurveEngine e2(positive_pair(), fine);
    CHECK(std::abs(e1.periods().B(0, 0) - e2.periods().B(0, 0)) < 1e-10);
    CHECK(std::abs(e1.periods().U_plus(0) - e2.periods().U_plus(0)) < 1e-9);
    CHECK(std::abs(e1.periods().E_const - e2.periods().E_const) <
          1e-9 * (1.0 + std::abs(e1.periods().E_const)));
}

TEST_CASE("genus 2: symmetry, normalization, integer du-periods") {
    CurveEngine eng(genus2());
    const auto& P = eng.periods();
    REQUIRE(P.genus == 2);
    CHECK(P.b_symmetry_residual < 1e-9 * (1.0 + P.B.cwiseAbs().maxCoeff()));
    CHECK(P.a_normalization_residual < 1e-9);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P.Pi.imag());
    CHECK(es.eigenvalues().minCoeff() > 0.0);

    // du-periods across each gap are +/- unit vectors.
    for (int i = 0; i < 2; ++i) {
        const auto ap = eng.abelian_at_branch(i, true);
        const auto am = eng.abelian_at_branch(i, false);
        for (int j = 0; j < 2; ++j) {
            const double expect = i == j ? 1.0 : 0.0;
            CHECK(std::abs(std::abs(ap.A(j) - am.A(j)) - expect) < 1e-8);
        }
        // (om): Omega_{+/-} agree at the two gap ends.
        CHECK(std::abs(ap.Om_plus - am.Om_plus) < 1e-8);
        CHECK(std::abs(ap.Om_minus - am.Om_minus) < 1e-8);
    }

    // A at p_minus_i reproduces the B-rows up to integer vectors (the
    // routed b-cycles may differ from the canonical ones by a-cycles, and
    // integer shifts are invisible to the theta function).
    for (int i = 0; i < 2; ++i) {
        const auto am = eng.abelian_at_branch(i, false);
        for (int j = 0; j < 2; ++j) {
            const cplx d = am.A(j) - P.B(i, j);
            CHECK(std::abs(d - std::round(d.real())) <
                  1e-9 * (1.0 + std::abs(P.B(i, j))));
        }
    }
}

TEST_CASE("near-P expansions tie A to U_plus and Omega_- to E") {
    CurveEngine eng(positive_pair());
    const auto& P = eng.periods();
    const auto exps = eng.near_P_plus(1e-3);
    CHECK(std::abs(exps.A_lead(0) + 2.0 * P.U_plus(0)) <
          1e-6 * (1.0 + std::abs(P.U_plus(0))));
    CHECK(std::abs(exps.E_fit - P.E_const) <
          1e-6 * (1.0 + std::abs(P.E_const)));
    CHECK(exps.fit_residual < 1e-6);
}

TEST_CASE("sigma-oddness and marked-point values") {
    CurveEngine eng(positive_pair());
    const CurvePoint p{cplx(0.5, 0.7), +1};
    const auto v1 = eng.abelian(p);
    const auto v2 = eng.abelian(CurvePoint{p.X, -1});
    CHECK(std::abs(v1.A(0) + v2.A(0)) < 1e-13);
    CHECK(std::abs(v1.Om_plus + v2.Om_plus) < 1e-13);

    // Marked-point consistency behind xi_0^- = 1: A(P_-) lies on the theta
    // lattice Z + Pi Z, and Omega_+(P_-) equals the matching half-period
    // 2 pi i U_+ . M for the same lattice coordinate M.
    auto check_infinity = [](const CurveEngine& e) {
        const auto Ainf = e.A_at_infinity();
        const cplx Pi = e.periods().Pi(0, 0);
        bool found = false;
        for (int M = -3; M <= 3 && !found; ++M) {
            const cplx r = Ainf(0) - double(M) * Pi;
            if (std::abs(r - std::round(r.real())) < 1e-8) {
                found = true;
                const cplx expect =
                    2.0 * PI * cplx(0.0, 1.0) * e.periods().U_plus(0) *
                    double(M);
                CHECK(std::abs(e.Om_plus_at_infinity() - expect) < 1e-8);
            }
        }
        CHECK(found);
    };
    check_infinity(eng);
    CurveEngine lem(lemniscatic());
    check_infinity(lem);
}

TEST_CASE("conjugate pair curve computes a valid period matrix") {
    HyperellipticCurveData c;
    c.pairs = {BranchPair{cplx(1.0, 0.8), cplx(1.0, -0.8)}};
    c.reality = RealityType::conjugate;
    CurveEngine eng(c);
    const auto& P = eng.periods();
    CHECK(P.Pi.imag()(0, 0) > 0.0);
    CHECK(P.a_normalization_residual < 1e-9);
    const auto exps = eng.near_P_plus(1e-3);
    CHECK(std::abs(exps.A_lead(0) + 2.0 * P.U_plus(0)) <
          1e-6 * (1.0 + std::abs(P.U_plus(0))));
}

TEST_CASE("curve JSON round trip and validation") {
    auto c = genus2();
    auto c2 = HyperellipticCurveData::parse_json(c.to_json());
    CHECK(c2.genus() == 2);
    CHECK(c2.pairs[1].p_plus == c.pairs[1].p_plus);
    CHECK(c2.reality == RealityType::m_type);

    HyperellipticCurveData bad;
    bad.pairs = {BranchPair{cplx(0.0, 0.0), cplx(1.0, 0.0)}};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
