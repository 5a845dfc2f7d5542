#include "fermicurve/theta.hpp"

#include <cmath>

namespace fermi {

ThetaParams::ThetaParams(Eigen::MatrixXcd Pi_) : Pi(std::move(Pi_)) {
    if (Pi.rows() == 0) return;
    if (Pi.rows() != Pi.cols())
        throw std::invalid_argument("ThetaParams: Pi must be square");
    const double asym = (Pi - Pi.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8 * (1.0 + Pi.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("ThetaParams: Pi must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Pi.imag());
    im_min_eigenvalue = es.eigenvalues().minCoeff();
    if (im_min_eigenvalue <= 0.0)
        throw std::domain_error(
            "ThetaParams: Im Pi must be positive definite");
}

Theta::Theta(ThetaParams params) : params_(std::move(params)) {
    im_pi_ = params_.Pi.imag();
    im_chol_.compute(im_pi_);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(im_pi_);
    lambda_min_ = es.eigenvalues().minCoeff();
}

template <typename F>
void Theta::lattice_sweep(const Eigen::VectorXcd& z, F&& accumulate,
                          double* dropped) const {
    const int g = params_.genus();
    // Gaussian center of the summand in m: minimize
    // pi (m+c)^T ImPi (m+c) with c = (ImPi)^{-1} Im z.
    Eigen::VectorXd center = -im_chol_.solve(z.imag());
    const double logtol = -std::log(params_.drop_tol);
    const double spread = std::sqrt(logtol / (PI * lambda_min_)) + 1.5;

    Eigen::VectorXi lo(g), hi(g);
    for (int d = 0; d < g; ++d) {
        lo(d) = int(std::floor(center(d) - spread));
        hi(d) = int(std::ceil(center(d) + spread));
    }

    // The largest term magnitude on the boundary shell bounds what the
    // window dropped.
    double max_boundary = 0.0;

    Eigen::VectorXi m = lo;
    Eigen::VectorXd mf(g);
    while (true) {
        bool boundary = false;
        for (int d = 0; d < g; ++d) {
            mf(d) = m(d);
            if (m(d) == lo(d) || m(d) == hi(d)) boundary = true;
        }
        // exponent = 2 pi i (z,m) + pi i (m, Pi m)
        cplx phase = 0.0;
        for (int a = 0; a < g; ++a) {
            phase += 2.0 * PI * cplx(0.0, 1.0) * z(a) * mf(a);
            for (int b = 0; b < g; ++b)
                phase += PI * cplx(0.0, 1.0) * mf(a) * params_.Pi(a, b) * mf(b);
        }
        const cplx term = std::exp(phase);
        if (boundary) max_boundary = std::max(max_boundary, std::abs(term));
        accumulate(mf, term);

        int d = 0;
        while (d < g && ++m(d) > hi(d)) {
            m(d) = lo(d);
            ++d;
        }
        if (d == g) break;
    }
    if (dropped) *dropped = max_boundary;
}

cplx Theta::operator()(const Eigen::VectorXcd& z) const {
    cplx sum(0.0, 0.0);
    lattice_sweep(
        z, [&](const Eigen::VectorXd&, cplx term) { sum += term; }, nullptr);
    return sum;
}

ThetaValue Theta::eval(const Eigen::VectorXcd& z,
                       const Eigen::VectorXcd& dir_plus,
                       const Eigen::VectorXcd& dir_minus) const {
    ThetaValue out;
    out.value = out.d_plus = out.d_minus = out.d_mixed = cplx(0.0, 0.0);
    double dropped = 0.0;
    lattice_sweep(
        z,
        [&](const Eigen::VectorXd& m, cplx term) {
            cplx mp(0.0, 0.0), mm(0.0, 0.0);
            for (int d = 0; d < int(m.size()); ++d) {
                mp += dir_plus(d) * m(d);
                mm += dir_minus(d) * m(d);
            }
            const cplx tp = 2.0 * PI * cplx(0.0, 1.0) * mp;
            const cplx tm = 2.0 * PI * cplx(0.0, 1.0) * mm;
            out.value += term;
            out.d_plus += tp * term;
            out.d_minus += tm * term;
            out.d_mixed += tp * tm * term;
        },
        &dropped);
    out.dropped_bound = dropped;
    return out;
}

} // namespace fermi
