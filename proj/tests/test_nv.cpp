#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fermicurve/nv.hpp"

#include <cmath>
#include <random>

using namespace fermi;

namespace {

HyperellipticCurveData reference_curve() {
    HyperellipticCurveData c;
    // tau-compatible m-type pair: p_+ p_- = 1.
    c.pairs = {BranchPair{cplx(2.0, 0.0), cplx(0.5, 0.0)}};
    c.reality = RealityType::m_type;
    return c;
}

NVBundle reference_bundle() {
    Eigen::VectorXcd Z(1);
    Z(0) = 0.0;
    return NVBundle(reference_curve(), Z);
}

} // namespace

TEST_CASE("normalization and node conditions") {
    auto b = reference_bundle();
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-1.5, 1.5);

    const auto p1 = b.prepare(CurvePoint{cplx(0.7, 0.4), +1});
    const auto p2 = b.prepare(CurvePoint{cplx(-0.8, 0.9), +1});
    CHECK(std::abs(b.psi(p1, 0.0, 0.0) - 1.0) < 1e-13);
    CHECK(std::abs(b.psi(p2, 0.0, 0.0) - 1.0) < 1e-13);

    const auto bp = b.prepare_branch(0, true);
    const auto bm = b.prepare_branch(0, false);
    for (int t = 0; t < 10; ++t) {
        const double x = u(rng), y = u(rng);
        const cplx vp = b.psi(bp, x, y);
        const cplx vm = b.psi(bm, x, y);
        CHECK(std::abs(vp - vm) < 1e-8 * (1.0 + std::abs(vp)));
    }
}

TEST_CASE("marked point expansions: xi0- = 1 and u = 4 dzbar xi1+") {
    auto b = reference_bundle();
    const auto fits = marked_point_fits(b, 0.31, -0.42);
    CHECK(std::abs(fits.xi0_minus - 1.0) < 1e-6);

    const cplx u_direct = b.potential(0.31, -0.42);
    const cplx u_exp = potential_from_psi_expansion(b, 0.31, -0.42);
    CHECK(std::abs(u_direct - u_exp) < 1e-5 * (1.0 + std::abs(u_direct)));
}

TEST_CASE("analytic PDE residual is small at generic points") {
    auto b = reference_bundle();
    GridSpec grid(0.0, 2.0, 8, -1.0, 1.0, 8);
    for (const cplx X : {cplx(0.7, 0.4), cplx(-1.3, 0.2), cplx(0.2, -1.1)}) {
        const auto pd = b.prepare(CurvePoint{X, +1});
        const auto st = pde_residual(b, pd, grid);
        CHECK(st.max_abs < 1e-6);
        CHECK(st.n_singular == 0);
    }
}

TEST_CASE("potential reality and regularity on the m-type bundle") {
    auto b = reference_bundle();
    GridSpec grid(0.0, 3.0, 24, 0.0, 3.0, 24);
    const auto pg = evaluate_potential(b, grid);
    CHECK(pg.max_imag < 1e-8);
    CHECK(pg.min_theta_abs > 0.0);

    const auto rep = reality_check(b, grid);
    for (const auto& f : rep.failures) INFO(f);
    CHECK(rep.certified);
    CHECK(rep.max_im_u < 1e-8);
}

TEST_CASE("degenerate direction: constant theta argument gives u = E") {
    // With zero directional vectors the termwise derivatives vanish and the
    // potential collapses to the constant E.
    auto b = reference_bundle();
    Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(1);
    Eigen::VectorXcd Z(1);
    Z(0) = 0.1;
    const auto v = b.theta().eval(Z, zero, zero);
    CHECK(std::abs(v.d_plus) == 0.0);
    CHECK(std::abs(v.d_mixed) == 0.0);
}

TEST_CASE("hyperelliptic closed form agrees with the BA evaluation") {
    auto b = reference_bundle();
    for (bool plus : {true, false}) {
        const auto pd = b.prepare_branch(0, plus);
        for (double x : {0.4, 1.3})
            for (double y : {-0.5, 0.8}) {
                const cplx via_ba = b.psi(pd, x, y);
                const cplx via_closed = hyperelliptic_psi_j(b, x, y, 0, plus);
                CHECK(std::abs(via_ba - via_closed) <
                      1e-8 * (1.0 + std::abs(via_ba)));
            }
    }
}

TEST_CASE("closed-form period tuning and Bloch property") {
    auto tuned = tune_periods_closed_form(reference_curve());
    CHECK(tuned.converged);
    CHECK(tuned.residual < 1e-8);

    Eigen::VectorXcd Z(1);
    Z(0) = 0.0;
    NVBundle b(tuned.curve, Z, tuned.L);
    const PeriodPair& L = tuned.L;

    // Periodic potential.
    for (double x : {0.3, 1.1})
        for (double y : {0.2, 0.9}) {
            const cplx u0 = b.potential(x, y);
            CHECK(std::abs(b.potential(x + L.x_period(), y) - u0) <
                  1e-6 * (1.0 + std::abs(u0)));
            CHECK(std::abs(b.potential(x, y + L.y_period()) - u0) <
                  1e-6 * (1.0 + std::abs(u0)));
        }

    // Bloch property with the multiplier functions.
    const auto pd = b.prepare(CurvePoint{cplx(0.6, 0.35), +1});
    const auto [w1, w2] = b.multiplier_functions(pd);
    for (double x : {0.25, 0.8})
        for (double y : {0.15, 0.55}) {
            const cplx base = b.psi(pd, x, y);
            CHECK(std::abs(b.psi(pd, x + L.x_period(), y) - w1 * base) <
                  1e-6 * (1.0 + std::abs(base)));
            CHECK(std::abs(b.psi(pd, x, y + L.y_period()) - w2 * base) <
                  1e-6 * (1.0 + std::abs(base)));
        }

    // sigma inverts the multipliers; the branch-point values match across
    // each pair and square to one under the integer period conditions.
    const auto pds = b.prepare(CurvePoint{cplx(0.6, 0.35), -1});
    const auto [w1s, w2s] = b.multiplier_functions(pds);
    CHECK(std::abs(w1 * w1s - 1.0) < 1e-8 * (1.0 + std::abs(w1)));
    CHECK(std::abs(w2 * w2s - 1.0) < 1e-8 * (1.0 + std::abs(w2)));

    const auto bp = b.prepare_branch(0, true);
    const auto bm = b.prepare_branch(0, false);
    const auto [w1p, w2p] = b.multiplier_functions(bp);
    const auto [w1m, w2m] = b.multiplier_functions(bm);
    CHECK(std::abs(w1p - w1m) < 1e-8 * (1.0 + std::abs(w1p)));
    CHECK(std::abs(w2p - w2m) < 1e-8 * (1.0 + std::abs(w2p)));
    CHECK(std::abs(w1p * w1p - 1.0) < 1e-8);
    CHECK(std::abs(w2p * w2p - 1.0) < 1e-8);

    // Two-route spectral differential and its residues at the marked points.
    const auto tr = differential_two_route(b, CurvePoint{cplx(0.45, 0.3), +1});
    CHECK(tr.rel_mismatch < 1e-5);
    const auto [resP, resM] = differential_residues(b);
    CHECK(std::abs(resP - 1.0) < 1e-5);
    CHECK(std::abs(resM + 1.0) < 1e-5);
}

TEST_CASE("root-finding tune recovers a perturbed curve") {
    auto base = tune_periods_closed_form(reference_curve());
    REQUIRE(base.converged);

    HyperellipticCurveData start = reference_curve();
    start.pairs[0].p_plus = 2.3;
    start.pairs[0].p_minus = 1.0 / 2.3;
    auto res = tune_periods(start, base.Na, base.Nb, base.Ma, base.Mb, base.L,
                            25, 1e-9);
    CHECK(res.converged);
    CHECK(res.residual < 1e-9);
    CHECK(std::abs(res.curve.pairs[0].p_plus - 2.0) < 1e-6);
}

TEST_CASE("reality check flags violated hypotheses") {
    // conjugate-type pair on the unit circle with a wrong residue sign.
    HyperellipticCurveData c;
    c.pairs = {BranchPair{std::polar(1.0, 0.9), std::polar(1.0, -0.9)}};
    c.reality = RealityType::conjugate;
    Eigen::VectorXcd Z(1);
    Z(0) = 0.0;
    NVBundle b(c, Z);
    GridSpec grid(0.0, 1.0, 6, 0.0, 1.0, 6);
    auto rep = reality_check(b, grid, {+0.5});
    CHECK(!rep.certified);
    bool sign_flagged = false;
    for (const auto& f : rep.failures)
        if (f.find("residue sign") != std::string::npos) sign_flagged = true;
    CHECK(sign_flagged);
}
