// Quasi-Bloch analysis near a free resonance pair k_{nm}^{sign},
// k_{-n,-m}^{-sign}: the two-sheeted covering patch of the Fermi curve over
// a disc in the w1-plane, its 2x2 monodromy matrix, the discriminant branch
// points (gap endpoints), the marked-resonance test, and the normalization
// pole on the gap segment.
//
// Method: on the w1-fiber the solution space is spanned by mode vectors on
// the integer lattice attached to the carrier exp(p_A x + i s_A y + mu y);
// a Bloch solution with multiplier pair (w10, w2A e^{2 pi l2 mu}) exists iff
// the exact lattice operator
//
//     L(mu) = diag[ (s_A + j/l2 - i mu)^2 - s_n'^2 ] + conv(v)
//
// is singular.  The resonant pair of modes {(0,0), (-n,-m)} is separated by
// a Schur complement M(mu) (2x2); det M(mu) = 0 has two roots near zero and
// everything else (eigen multipliers, discriminant, monodromy matrix, mode
// vectors) follows.  det M is analytic in mu, so the root pair is extracted
// from a trigonometric-interpolation Taylor model, which stays accurate
// through branch-point collisions.

#pragma once

#include "fermicurve/fermi_model.hpp"
#include "fermicurve/lattice.hpp"
#include "fermicurve/potential.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace fermi {

struct PatchOptions {
    int n_samples = 64;        // w10 samples on the patch circle
    double radius_factor = 8.0; // circle radius = factor * |v|-scale * |w1n|
    int lattice_nx = 4;        // mode lattice half-extent in n
    int lattice_ny = 6;        // mode lattice half-extent in j
    int taylor_points = 16;    // trig-interpolation points for det M(mu)
    double marked_rel_tol = 1e-6; // |b1-b2| below this * radius => marked
};

struct MonodromySample {
    cplx w10;
    std::array<cplx, 2> mu;  // Floquet exponent corrections
    std::array<cplx, 2> wt;  // eigen multipliers w2A * exp(2 pi l2 mu)
    Eigen::Matrix2cd T;      // seed-basis monodromy matrix
};

class ResonancePatchSolver {
public:
    ResonancePatchSolver(ResonanceIndex idx, cplx E,
                         const FourierPotential& v, const PeriodPair& L,
                         PatchOptions opt = {});

    struct Solution {
        std::array<cplx, 2> mu;
        std::array<cplx, 2> wt;
        Eigen::Matrix2cd T;
        // Value at the origin of each sheet's mode vector, phase-normalized
        // so that a tau-symmetric vector gives a real value (up to sign).
        std::array<cplx, 2> eta;
        std::array<double, 2> eta_imag_residual;
        std::array<Eigen::VectorXcd, 2> vec; // unit mode vectors
    };

    Solution solve(cplx w10, bool want_vectors = false) const;

    // Scale-free discriminant ((wt1 - wt2)/w2A)^2 of the covering.
    cplx discriminant(cplx w10) const;

    const ResonanceIndex& index() const { return idx_; }
    cplx k_node() const { return k_node_; }
    cplx w1_node() const { return w1_node_; }
    cplx w2_node() const { return w2_node_; }
    double coupling_scale() const { return vscale_; }
    const PeriodPair& periods() const { return L_; }
    cplx E() const { return E_; }

private:
    int mode_id(int n, int j) const;

    ResonanceIndex idx_;
    cplx E_;
    PeriodPair L_;
    PatchOptions opt_;
    Trig2 v_;
    double vscale_;
    cplx k_node_, p_node_, s_node_, w1_node_, w2_node_;
    int n_lo_, n_hi_, j_lo_, j_hi_;
    std::vector<std::pair<int, int>> modes_; // lattice order, resonant pair last
    int id00_, idrho_;
};

struct MonodromyPatch {
    ResonanceIndex idx;
    cplx E;
    PeriodPair L;
    cplx k_node, w1_node, w2_node;
    double radius = 0.0;
    std::vector<MonodromySample> samples;
    std::array<cplx, 2> branch_points; // w10-plane
    bool marked = false;
};

struct NeighborhoodOverlapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

MonodromyPatch monodromy_patch(const ResonanceIndex& idx, cplx E,
                               const FourierPotential& v, const PeriodPair& L,
                               PatchOptions opt = {});

struct NoGapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gap endpoints: p_j = p_node + log(b_j / w1_node)/(2 pi l1).  Throws
// NoGapError on a marked patch.
GapRecord extract_gap(const MonodromyPatch& patch);

struct PoleResult {
    cplx w10;       // position on the gap segment, w-plane
    int sheet = 0;  // which covering sheet carries the zero
    int zero_count = 0;
    double max_eta_imag = 0.0; // reality residual of the scanned section
};

struct StructuralViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The normalization pole: the unique point of the gap oval where the Bloch
// eigenvector vanishes at (x,y) = (0,0).  A zero count other than one is a
// structural violation and throws.
PoleResult locate_pole(const ResonancePatchSolver& solver,
                       const MonodromyPatch& patch, int n_scan = 200);

} // namespace fermi
