#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fermicurve/theta.hpp"

#include <cmath>
#include <random>

using namespace fermi;

namespace {

Eigen::MatrixXcd pi_g1() {
    Eigen::MatrixXcd Pi(1, 1);
    Pi(0, 0) = cplx(0.0, 1.0);
    return Pi;
}

Eigen::MatrixXcd pi_g2() {
    Eigen::MatrixXcd Pi(2, 2);
    Pi(0, 0) = cplx(0.1, 1.0);
    Pi(1, 1) = cplx(-0.2, 1.3);
    Pi(0, 1) = Pi(1, 0) = cplx(0.05, 0.25);
    return Pi;
}

} // namespace

TEST_CASE("theta(0|i) against a brute-force oracle") {
    // Direct high-cutoff sum: sum_m exp(-pi m^2).
    double oracle = 0.0;
    for (int m = -60; m <= 60; ++m) oracle += std::exp(-PI * double(m) * m);

    Theta th{ThetaParams(pi_g1())};
    Eigen::VectorXcd z0 = Eigen::VectorXcd::Zero(1);
    CHECK(std::abs(th(z0) - oracle) < 1e-12);
    CHECK(std::abs(th(z0).real() - 1.08643481121330801) < 1e-12);
}

TEST_CASE("parity and integer periodicity") {
    Theta th{ThetaParams(pi_g2())};
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXcd z(2);
        z << cplx(u(rng), u(rng)), cplx(u(rng), u(rng));
        const cplx v = th(z);
        CHECK(std::abs(th(-z) - v) < 1e-12 * (1.0 + std::abs(v)));
        Eigen::VectorXcd ze = z;
        ze(1) += 1.0;
        CHECK(std::abs(th(ze) - v) < 1e-12 * (1.0 + std::abs(v)));
    }
}

TEST_CASE("quasi-periodicity under Pi-lattice shifts") {
    const auto Pi = pi_g2();
    Theta th{ThetaParams(Pi)};
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    std::uniform_int_distribution<int> mi(-2, 2);
    for (int t = 0; t < 40; ++t) {
        Eigen::VectorXcd z(2);
        z << cplx(u(rng), u(rng)), cplx(u(rng), u(rng));
        Eigen::VectorXcd m(2);
        m << double(mi(rng)), double(mi(rng));
        if (m.norm() == 0.0) continue;
        Eigen::VectorXcd zs = z + Pi * m;
        cplx phase = 0.0;
        for (int a = 0; a < 2; ++a) {
            phase += -2.0 * PI * cplx(0.0, 1.0) * z(a) * m(a);
            for (int b = 0; b < 2; ++b)
                phase += -PI * cplx(0.0, 1.0) * m(a) * Pi(a, b) * m(b);
        }
        const cplx lhs = th(zs);
        const cplx rhs = std::exp(phase) * th(z);
        CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("directional derivatives against finite differences") {
    const auto Pi = pi_g2();
    Theta th{ThetaParams(Pi)};
    Eigen::VectorXcd z(2), dp(2), dm(2);
    z << cplx(0.21, 0.05), cplx(-0.13, 0.11);
    dp << cplx(0.7, 0.1), cplx(-0.3, 0.0);
    dm << cplx(0.2, -0.4), cplx(0.5, 0.2);

    const auto val = th.eval(z, dp, dm);
    const double h = 1e-5;
    auto at = [&](double a, double b) { return th(z + a * dp + b * dm); };
    const cplx fd_p = (at(h, 0) - at(-h, 0)) / (2 * h);
    const cplx fd_m = (at(0, h) - at(0, -h)) / (2 * h);
    const cplx fd_pm =
        (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
    CHECK(std::abs(val.d_plus - fd_p) < 1e-7 * (1.0 + std::abs(fd_p)));
    CHECK(std::abs(val.d_minus - fd_m) < 1e-7 * (1.0 + std::abs(fd_m)));
    CHECK(std::abs(val.d_mixed - fd_pm) < 1e-5 * (1.0 + std::abs(fd_pm)));
    CHECK(val.dropped_bound < 1e-14);
}

TEST_CASE("Im Pi must be positive definite") {
    Eigen::MatrixXcd bad(1, 1);
    bad(0, 0) = cplx(0.3, -1.0);
    CHECK_THROWS_AS((void)ThetaParams{bad}, std::domain_error);
}
