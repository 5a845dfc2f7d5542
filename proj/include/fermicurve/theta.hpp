// Theta function of a g-dimensional period matrix with positive-definite
// imaginary part:
//
//     theta(z | Pi) = sum_{m in Z^g} exp(2 pi i (z,m) + pi i (m, Pi m)),
//
// evaluated by direct lattice summation over an ellipsoid chosen so the
// largest dropped term is below a recorded bound.  First and second
// directional derivatives are termwise sums over the same lattice window.

#pragma once

#include "fermicurve/types.hpp"

#include <Eigen/Dense>

namespace fermi {

struct ThetaParams {
    Eigen::MatrixXcd Pi;
    double drop_tol = 1e-18; // target bound on dropped/retained ratio

    explicit ThetaParams(Eigen::MatrixXcd Pi_ = {});
    int genus() const { return int(Pi.rows()); }

    // Validation performed at construction: symmetry and Im Pi > 0.
    double im_min_eigenvalue = 0.0;
};

struct ThetaValue {
    cplx value;
    cplx d_plus;   // directional derivative along dir_plus
    cplx d_minus;  // directional derivative along dir_minus
    cplx d_mixed;  // second derivative along (dir_plus, dir_minus)
    double dropped_bound = 0.0; // bound on the truncation error
};

class Theta {
public:
    explicit Theta(ThetaParams params);

    cplx operator()(const Eigen::VectorXcd& z) const;

    // Value plus directional derivatives along two fixed directions.
    ThetaValue eval(const Eigen::VectorXcd& z, const Eigen::VectorXcd& dir_plus,
                    const Eigen::VectorXcd& dir_minus) const;

    const ThetaParams& params() const { return params_; }

private:
    template <typename F>
    void lattice_sweep(const Eigen::VectorXcd& z, F&& accumulate,
                       double* dropped) const;

    ThetaParams params_;
    Eigen::MatrixXd im_pi_;
    Eigen::LLT<Eigen::MatrixXd> im_chol_;
    double lambda_min_;
};

} // namespace fermi
