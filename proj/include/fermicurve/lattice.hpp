// Exact Bloch geometry of the free operator -Delta - E: plane-wave Bloch
// solutions, Floquet multipliers, w1-fiber points, resonance (nodal) points,
// (anti)periodic eigenlevels and the pairing weight r(k).
//
// Everything here is closed-form in k; no quadrature is involved.

#pragma once

#include "fermicurve/types.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace fermi {

// exp(k z - k^{-1} (E/4) zbar), z = x + i y.  The free Bloch solution.
cplx free_bloch(cplx k, cplx E, double x, double y);

// Quasimomentum-like exponents: p(k) = k - E/(4k), s(k) = k + E/(4k).
cplx exponent_p(cplx k, cplx E);
cplx exponent_s(cplx k, cplx E);

// Floquet multipliers (w1, w2) of free_bloch over the period lattice.
std::pair<cplx, cplx> multipliers(cplx k, cplx E, const PeriodPair& L);

// Pairing weight r(k) = 4*pi*i*l1*(k + E/(4k)).
cplx weight_r(cplx k, cplx E, const PeriodPair& L);

// Averaged Wronskian weight <psi_y psi^sigma - psi psi^sigma_y>_x = 2i*(k+E/4k).
// This is the normalizer the expansion formulas actually divide by; it differs
// from weight_r by the constant factor 2*pi*l1 (integral vs average convention).
cplx weight_wronskian(cplx k, cplx E);

struct FiberPoint {
    FiberIndex idx;
    cplx k;
};

// All solutions k_nu of w1(k) = w1(k0) with branch index |n| <= nmax, both
// signs of the square root (principal branch, signs emitted explicitly).
// Every returned point is resubstituted into w1; a mismatch throws.
std::vector<FiberPoint> fiber_points(cplx k0, cplx E, const PeriodPair& L,
                                     int nmax, double tol = 1e-10);

struct ResonancePoint {
    cplx k;
    bool degenerate = false; // radicand vanished: E = E_{|n|,|m|}
};

// k_{nm}^{sign}: the resonance point where two free Bloch solutions share
// both multipliers.  Degenerate radicand is tagged, not thrown.
ResonancePoint resonance_point(const ResonanceIndex& idx, cplx E,
                               const PeriodPair& L);

// Eigenvalues E_{|n|,|m|} of -Delta on (anti)periodic functions.
double eigenlevel(int n, int m, const PeriodPair& L);

// Scan for simultaneous |w1| = |w2| = 1 over k = r e^{i phi}; returns the
// number of grid points within tol of a joint fixed point (0 expected for
// E < 0, per the sigma-tau fixed-point obstruction).
struct StFixedPointScan {
    long points_scanned = 0;
    long hits = 0;
    double min_joint_deviation = 0.0; // min over scan of max(||w1|-1|, ||w2|-1|)
};
StFixedPointScan scan_stau_fixed_points(cplx E, const PeriodPair& L,
                                        double r_min, double r_max,
                                        int nr, int nphi, double tol = 1e-6);

} // namespace fermi
