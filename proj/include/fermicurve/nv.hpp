// The generalized finite-gap constructor at the zero level: Baker-Akhiezer
// function, potential, multiplier functions, period tuning and the
// reality/regularity certificates, specialized to hyperelliptic curves
// Y^2 = X prod (X - p_plus_i)(X - p_minus_i) with marked points X = 0 (P_+)
// and X = infinity (P_-).
//
// psi(x,y,p) = theta(A(p)+W) theta(Z) / (theta(W) theta(A(p)+Z))
//              * exp(z Omega_+(p) + zbar Omega_-(p)),  W = z U_+ + zbar U_- + Z,
// u(x,y)     = -2 Lap ln theta(W) + E.
//
// All derivatives of psi and u are computed termwise on the theta sums and
// by the chain rule on the exponentials; finite differences appear only in
// the independent oracle module.
//
// Conventions: U_+/- are the dOmega_+/- periods over the same realized
// b-cycles that define B, so Omega_+/-(p_-^j) = pi i U_+/-^j; the marked
// pair swap is the anti-involution X -> q/conj(X) with q = p_plus p_minus,
// so tau-compatible m-type data has p_plus_i * p_minus_i = 1 and the
// denominator theta is real-valued exactly for half-integer real Z.

#pragma once

#include "fermicurve/hyperell.hpp"
#include "fermicurve/theta.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fermi {

struct GridSpec {
    double x_min = 0.0, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;
    int nx = 2, ny = 2;

    GridSpec() = default;
    GridSpec(double x0, double x1, int nx_, double y0, double y1, int ny_)
        : x_min(x0), x_max(x1), y_min(y0), y_max(y1), nx(nx_), ny(ny_) {
        if (nx < 2 || ny < 2)
            throw std::invalid_argument("GridSpec: nx, ny must be >= 2");
    }
    double x(int i) const { return x_min + (x_max - x_min) * i / (nx - 1); }
    double y(int j) const { return y_min + (y_max - y_min) * j / (ny - 1); }
};

class NVBundle {
public:
    NVBundle(HyperellipticCurveData curve, Eigen::VectorXcd Z,
             PeriodPair L = PeriodPair(1.0, 1.0), QuadratureOptions qopt = {});

    const CurveEngine& engine() const { return *engine_; }
    const Theta& theta() const { return *theta_; }
    const Eigen::VectorXcd& Z() const { return Z_; }
    const PeriodPair& periods() const { return L_; }
    cplx E_const() const { return engine_->periods().E_const; }
    const Eigen::VectorXcd& U_plus() const { return engine_->periods().U_plus; }
    const Eigen::VectorXcd& U_minus() const {
        return engine_->periods().U_minus;
    }

    // Cached Abelian data of a curve point (paths shared between A and
    // Omega by construction).
    struct PointData {
        CurvePoint p;
        Eigen::VectorXcd A;
        cplx Om_plus, Om_minus;
    };
    PointData prepare(const CurvePoint& p) const;
    PointData prepare_branch(int pair, bool plus_point) const;

    struct SingularEvaluation : std::runtime_error {
        using std::runtime_error::runtime_error;
    };

    // Normalized Baker-Akhiezer value; throws SingularEvaluation near a
    // theta zero.
    cplx psi(const PointData& pd, double x, double y) const;

    // psi * exp(-z k_plus_sub - zbar k_minus_sub) with the subtraction done
    // inside the exponent; keeps marked-point fits overflow-free.
    cplx psi_reduced(const PointData& pd, double x, double y, cplx k_plus_sub,
                     cplx k_minus_sub) const;

    struct PsiDerivs {
        cplx psi;
        cplx dz, dzbar;  // log-derivative times psi: exact d/dz psi etc.
        cplx dzz;        // d^2/(dz dzbar) psi
    };
    PsiDerivs psi_derivs(const PointData& pd, double x, double y) const;

    // Potential u(x,y) by termwise second derivatives of the theta sum.
    cplx potential(double x, double y) const;
    // |theta(W)| at a grid point (regularity certificate input).
    double theta_denominator_abs(double x, double y) const;

    // (-Delta + u) psi by the analytic route.
    cplx pde_residual_at(const PointData& pd, double x, double y) const;

    // w_j(p) = exp(2 pi l_j int dp_j) with the quasimomentum differentials
    // assembled from dOmega_+/-, du_j and the real decomposition vectors.
    std::pair<cplx, cplx> multiplier_functions(const PointData& pd) const;
    const Eigen::VectorXd& nu_b() const { return nu_b_; }
    const Eigen::VectorXd& mu_b() const { return mu_b_; }

    // Quasimomentum differential values dp_j/dX at p.
    std::pair<cplx, cplx> quasimomentum_differentials(const CurvePoint& p) const;

private:
    HyperellipticCurveData curve_;
    std::shared_ptr<CurveEngine> engine_;
    std::shared_ptr<Theta> theta_;
    Eigen::VectorXcd Z_;
    PeriodPair L_;
    Eigen::VectorXd nu_a_, nu_b_, mu_a_, mu_b_; // (baz) decompositions
};

struct ResidualStats {
    double max_abs = 0.0;
    double mean_abs = 0.0;
    long n_points = 0;
    long n_singular = 0;
};

ResidualStats pde_residual(const NVBundle& b, const NVBundle::PointData& pd,
                           const GridSpec& grid);

struct PotentialGrid {
    GridSpec grid;
    std::vector<cplx> u;       // row-major, ny rows of nx
    std::vector<bool> singular;
    double max_imag = 0.0;
    double min_theta_abs = 0.0;
};
PotentialGrid evaluate_potential(const NVBundle& b, const GridSpec& grid);

// Coefficients of the expansion psi = e^{k z}(xi_0 + xi_1 / k + ...) at the
// marked points, extracted by sigma-symmetrized radial fits.
struct MarkedPointFits {
    cplx xi0_minus;      // expected 1
    cplx xi1_plus;       // u = 4 d/dzbar xi_1^+
    double fit_residual; // spread of the extrapolation table
};
MarkedPointFits marked_point_fits(const NVBundle& b, double x, double y,
                                  double t0 = 1e-3);

// u reconstructed from 4 d_zbar xi_1^+ by central differences of the fits.
cplx potential_from_psi_expansion(const NVBundle& b, double x, double y,
                                  double h = 1e-3);

// The hyperelliptic closed form at p_{+/-}^j: theta arguments shifted by
// the B-column, exponent carried by Omega_{+/-}(p_pm^j).
cplx hyperelliptic_psi_j(const NVBundle& b, double x, double y, int j,
                         bool plus_point = true);

struct TuneResult {
    HyperellipticCurveData curve;
    PeriodPair L;
    Eigen::VectorXi Na, Nb, Ma, Mb;
    double residual = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Root-find branch-point positions (m-type: log-symmetric pairs
// p_{+/-} = exp(+/- t_i)) so that the period conditions
//   2 pi l1 (U_+ + U_-) = N^a + Pi N^b,
//   2 pi i l2 (U_+ - U_-) = M^a + Pi M^b
// hold for the given integer targets.
TuneResult tune_periods(const HyperellipticCurveData& curve0,
                        const Eigen::VectorXi& Na, const Eigen::VectorXi& Nb,
                        const Eigen::VectorXi& Ma, const Eigen::VectorXi& Mb,
                        const PeriodPair& L, int max_iter = 40,
                        double tol = 1e-10);

// Pick integer targets and periods that the given curve satisfies exactly
// (the closed-form tuning route: the period conditions fix l1, l2).
TuneResult tune_periods_closed_form(const HyperellipticCurveData& curve,
                                    int Nb_seed = -1);

struct RealityReport {
    bool certified = false;
    std::string theorem; // which set of hypotheses was checked
    std::vector<std::string> failures;
    double max_im_u = 0.0;
    double min_theta_abs = 0.0;
    double max_theta_imag = 0.0; // denominator reality residual
};

// m-type: real branch pairs with p_+ p_- = 1 (tau-compatibility in the
// fixed local coordinates), half-integer real Z, denominator reality and
// nonvanishing on a period cell.  conjugate-type: p_- = conj(p_+) on the
// unit circle and the user-supplied residue signs c_i < 0.
RealityReport reality_check(const NVBundle& b, const GridSpec& grid,
                            const std::vector<double>& residues_c = {});

// Two-route consistency of the spectral differential: 2i dp1 / <psi_y
// psi^sigma - psi psi^sigma_y>_x vs -2i dp2 / <psi_x psi^sigma - psi
// psi^sigma_x>_y at p, averaged over one period (tuned bundles).
struct TwoRouteDiff {
    cplx route1, route2;
    double rel_mismatch = 0.0;
};
TwoRouteDiff differential_two_route(const NVBundle& b, const CurvePoint& p,
                                    int n_avg = 256);

// Residues of the two-route differential at the marked points (radial
// extrapolation); the defining normalization gives +1 at P_+ and -1 at P_-.
std::pair<cplx, cplx> differential_residues(const NVBundle& b,
                                            int n_avg = 128);

} // namespace fermi
