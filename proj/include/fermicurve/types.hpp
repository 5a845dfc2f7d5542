// Core scalar and index types shared by all fermicurve modules.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace fermi {

using cplx = std::complex<double>;

inline constexpr double PI = 3.14159265358979323846;

// Lattice of periods (2*pi*l1, 2*pi*l2).
struct PeriodPair {
    double l1 = 1.0;
    double l2 = 1.0;

    PeriodPair() = default;
    PeriodPair(double l1_, double l2_) : l1(l1_), l2(l2_) {
        if (!(l1 > 0.0) || !(l2 > 0.0))
            throw std::invalid_argument("PeriodPair: periods must be positive");
    }
    double x_period() const { return 2.0 * PI * l1; }
    double y_period() const { return 2.0 * PI * l2; }
};

// Index of a point on the w1-fiber: branch n and sign of the square root.
struct FiberIndex {
    int n = 0;
    int sign = +1; // +1 or -1

    bool operator==(const FiberIndex&) const = default;
};

// Index of a free resonance point k_{nm}^{sign}; (n,m) != (0,0).
struct ResonanceIndex {
    int n = 0;
    int m = 0;
    int sign = +1;

    ResonanceIndex() = default;
    ResonanceIndex(int n_, int m_, int s_) : n(n_), m(m_), sign(s_) {
        if (n == 0 && m == 0)
            throw std::invalid_argument("ResonanceIndex: (n,m) must not be (0,0)");
        if (sign != 1 && sign != -1)
            throw std::invalid_argument("ResonanceIndex: sign must be +1 or -1");
    }
    bool operator==(const ResonanceIndex&) const = default;
};

// Tolerance knobs. The defaults mirror the identity-check bounds used
// throughout the test suites; callers may tighten or relax per run.
struct Tolerances {
    double identity = 1e-10;  // exact-identity checks (multiplier symmetry, ...)
    double resonance_guard = 0.1;      // neighborhood parameter h
    double degenerate_weight = 1e-12;  // |r| below this is a degenerate weight
    double series_drop = 1e-300;       // prune threshold for Fourier data
};

inline bool finite(const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

} // namespace fermi
