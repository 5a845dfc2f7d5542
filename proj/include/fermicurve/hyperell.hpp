// Function theory on the hyperelliptic curves
//
//     Y^2 = X * prod_i (X - p_plus_i)(X - p_minus_i),
//
// with the branch points X = 0 and X = infinity playing the role of the
// marked points P_+ and P_-.  Provides: period matrix B of the normalized
// holomorphic differentials (Prym matrix Pi = 2B), the normalized
// second-kind differentials dOmega_+/- with double poles at P_+/-, their
// b-period vectors U_+/-, the constant E = 4 dOmega_-/d(1/k_+) (P_+),
// Abelian integrals A(p), Omega_+/-(p) along a recorded canonical path
// tree, and the local expansions near the marked points.
//
// Homology/cut convention ("segment" tag): a_i is the cycle around the
// pair {p_minus_i, p_plus_i}; b_i is the cycle around {0, p_minus_i}.
// Cycle integrals are evaluated as doubled open-path integrals between the
// enclosed branch points with continuous square-root branch tracking; the
// local coordinate at P_+ is k_+ = 1/t, X = t^2, and at P_- it is
// k_- = 1/s, X = s^-2, both odd under the hyperelliptic involution
// composed with t -> -t.

#pragma once

#include "fermicurve/types.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace fermi {

enum class RealityType { none, m_type, conjugate };

struct BranchPair {
    cplx p_plus;
    cplx p_minus;
};

struct HyperellipticCurveData {
    std::vector<BranchPair> pairs; // n >= 1
    RealityType reality = RealityType::none;
    std::string convention = "segment"; // cut/homology convention tag

    int genus() const { return int(pairs.size()); }
    void validate() const; // distinct, nonzero, reality consistency

    std::string to_json() const;
    static HyperellipticCurveData parse_json(const std::string& text);
};

struct QuadratureOptions {
    double tol = 1e-12;
    int gl_order = 24;
    int max_doublings = 9;
    int walk_steps = 512;
    double clearance_rel = 0.04; // path clearance to foreign branch points
    double t0 = 5e-2;            // regularization radius at P_+ (t-units)
    double bp_delta = 1e-5;      // b-period regularization for dOmega_+
};

struct PeriodData {
    int genus = 0;
    Eigen::MatrixXcd B;   // b-periods of normalized holomorphic diffs
    Eigen::MatrixXcd Pi;  // Prym matrix, = 2B for the g0 = 0 block
    Eigen::VectorXcd U_plus, U_minus;
    cplx E_const;
    // quadrature metadata
    int max_panels_used = 0;
    double b_symmetry_residual = 0.0;
    double a_normalization_residual = 0.0;
};

struct AbelianValues {
    Eigen::VectorXcd A; // Prym-differential integrals from P_+
    cplx Om_plus;       // regularized branch Omega_+ = k_+ + O(1/k_+)
    cplx Om_minus;
};

// A point of the curve: X-coordinate plus the sheet relative to the
// canonical branch continuation along the recorded path (+1) or its
// sigma image (-1).
struct CurvePoint {
    cplx X;
    int sheet = +1;
};

struct NearPExpansions {
    Eigen::VectorXcd A_lead;  // A(p) ~ A_lead * t + O(t^3)
    cplx Om_minus_lead;       // Omega_-(p) ~ lead * t + O(t^3)
    cplx E_fit;               // potential constant, 4 * Om_minus_lead
    double fit_residual = 0.0;
};

class CurveEngine {
public:
    CurveEngine(HyperellipticCurveData curve, QuadratureOptions opt = {});

    const HyperellipticCurveData& curve() const { return curve_; }
    const PeriodData& periods() const { return periods_; }
    const QuadratureOptions& options() const { return opt_; }

    // Path integrals from P_+ with shared paths for A and Omega.
    AbelianValues abelian(const CurvePoint& p) const;

    // Values exactly at the finite branch points p_{+/-}^i (pair index i,
    // plus_point selects p_plus vs p_minus).
    AbelianValues abelian_at_branch(int pair, bool plus_point) const;

    // A(P_-) (finite); used for the integrality check of the marked point.
    Eigen::VectorXcd A_at_infinity() const;
    cplx Om_plus_at_infinity() const;

    NearPExpansions near_P_plus(double t_small = 1e-3) const;

    // Local coordinate data at P_+ on the canonical branch.
    cplx g0() const { return g0_; }
    // Unit direction of the canonical first leg out of P_+.
    cplx trunk_direction() const;
    // Unit direction (in X) of the canonical ray toward P_-.
    cplx infinity_direction() const;

    // Evaluate the normalized holomorphic differentials' coefficient
    // polynomials (row j = dω_j's coefficients of X^0..X^{g-1}).
    const Eigen::MatrixXcd& omega_coeffs() const { return C_; }
    // Laurent coefficients of dOmega_+ (X^{-1}..X^{g-1}) and dOmega_-
    // (X^0..X^g).
    const Eigen::VectorXcd& dOm_plus_coeffs() const { return dplus_; }
    const Eigen::VectorXcd& dOm_minus_coeffs() const { return dminus_; }

    // dp_1/dp_2-style linear combinations: integral of
    // (alpha dOmega_+ + beta dOmega_- + sum_j gamma_j du_j) from P_+ to p,
    // sharing the canonical path (Omega_+ part regularized).
    cplx combined_integral(const CurvePoint& p, cplx alpha, cplx beta,
                           const Eigen::VectorXcd& gamma) const;

    // Differential values (dX-coefficient) at a curve point for the same
    // combination; used by the two-route quasimomentum checks.
    cplx combined_differential(const CurvePoint& p, cplx alpha, cplx beta,
                               const Eigen::VectorXcd& gamma) const;

private:
    struct Leg {
        cplx a, b;
        bool sing_a = false, sing_b = false;
        bool u_coords = false; // leg runs in u = X^{-1/2}
    };
    using Path = std::vector<Leg>;

    cplx principal_Y(cplx X) const;
    cplx principal_Pu(cplx u) const;

    Path plan(cplx from, cplx to, bool from_bp, bool to_bp) const;
    Path plan_to_infinity() const;
    cplx omega_plus_along(const Path& path) const;

    // Integrate a set of Laurent-polynomial differentials R(X) dX / Y along
    // a path with tracked branch; returns one value per differential and
    // (optionally) the tracked Y at the path end.
    std::vector<cplx> integrate(const Path& path,
                                const std::vector<Eigen::VectorXcd>& lauren,
                                const std::vector<int>& lo_pow,
                                cplx* y_end = nullptr,
                                int* panels_used = nullptr) const;

    cplx laurent_eval(const Eigen::VectorXcd& c, int lo, cplx X) const;

    void compute_all();

    HyperellipticCurveData curve_;
    QuadratureOptions opt_;
    std::vector<cplx> finite_bps_; // nonzero finite branch points
    double scale_ = 1.0;
    PeriodData periods_;
    Eigen::MatrixXcd C_;       // normalized holomorphic coefficients
    Eigen::VectorXcd dplus_;   // dOmega_+ Laurent coeffs, powers -1..g-1
    Eigen::VectorXcd dminus_;  // dOmega_- coeffs, powers 0..g
    cplx g0_;                  // tracked Y / sqrt(X) at P_+
    Eigen::VectorXcd Ppoly_;   // coefficients of P(X) = prod(X - b_i) = g^2
    double a_sign_ = 1.0;      // a-path orientation flag after alignment
    mutable int max_panels_ = 0;
};

} // namespace fermi
