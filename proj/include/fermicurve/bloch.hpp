// Perturbative Bloch solutions of (-Delta + v - E) psi = 0 for small
// trig-polynomial v.
//
// The solution is kept in uniform-carrier form
//
//     psi(x,y) = exp(G(y)) * exp(p0 x + i s0 y) * sum_s P_s(x,y) / norm,
//
// where p0 = k0 - E/(4 k0), s0 = k0 + E/(4 k0), each P_s is a doubly
// periodic finite Fourier series (the order-s term of the perturbation
// series) and G' = F = sum_s F_s collects the y-line corrections.  In this
// form the recursion is a pure mode-by-mode division: the order-s equation
// reads D_nj * Phat_s(n,j) = Khat_s(n,j) with
//
//     D_nj = (s0 + j/l2)^2 - s_n^2,   s_n^2 = (p0 + i n/l1)^2 + E,
//
// and D_nj -> 0 exactly where the paper-level resonance guard
// |w_{2 nu}/w_{20} - 1| > h fails.  The n = 0 line is absorbed into F_s
// (this fixes the gauge of the F-series; the Floquet data w1, w2_tilde and
// the solution itself are gauge independent).  In-fiber resonant modes
// (n = 0, 2 s0 + j/l2 = 0) are handled by deferred amplitudes fixed by the
// solvability of higher orders; any other near-resonant mode raises and the
// caller must switch to the quasi-Bloch machinery (monodromy.hpp).
//
// All coefficient arithmetic is exact on finite Fourier data, so the
// truncated-series PDE residual can be assembled symbolically (residual_tail)
// with full relative accuracy even when it is ~1e-16 in absolute size.

#pragma once

#include "fermicurve/lattice.hpp"
#include "fermicurve/potential.hpp"
#include "fermicurve/trig.hpp"

#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace fermi {

struct ResonantIndexError : std::runtime_error {
    FiberIndex nu;
    explicit ResonantIndexError(FiberIndex nu_, const std::string& what)
        : std::runtime_error(what), nu(nu_) {}
};

struct DegenerateWeightError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SeriesOptions {
    double neighborhood_h = 0.1;   // resonance guard (nei)
    double weight_tol = 1e-12;     // |r_0| guard
    double kappa_rel_tol = 1e-11;  // solvability violation threshold (relative)
    int max_resolve_iterations = 64;
    double prune_eps = 0.0;        // 0: keep everything
};

// Quasi-periodic y-coefficient c_nu^s(y) = exp(i offset y) * (Fourier in y).
struct FiberCoefficient {
    cplx offset;  // s0 - s_nu
    Trig2 modes;  // n == 0 entries only, interpreted as Fourier in y
    cplx evaluate(double y) const;
};

class BlochSeries {
public:
    BlochSeries(cplx k0, cplx E, const FourierPotential& v,
                const PeriodPair& L, SeriesOptions opt = {});

    // Run the recursion up to and including order S.
    void advance_to(int S);

    int order() const { return int(P_.size()) - 1; }
    cplx k0() const { return k0_; }
    cplx E() const { return E_; }
    const PeriodPair& periods() const { return L_; }
    cplx carrier_p() const { return p0_; }
    cplx carrier_s() const { return s0_; }

    cplx w1() const { return w1_; }
    cplx w2() const { return w2_; }
    cplx w2_tilde() const; // w2 * exp(int_0^{2 pi l2} F)

    const Trig2& P(int s) const { return P_.at(s); }
    const Trig2& F(int s) const { return F_.at(s); } // s >= 1

    // Value of the normalized solution (psi(0,0) = 1).
    cplx evaluate(double x, double y) const;
    // Un-normalized Psi(0,0); Lemma-1 normalization divides by this.
    cplx norm_value() const;
    bool norm_near_zero() const; // surfaced as a warning condition

    // G(y) = int_0^y F, exact per-mode integration.
    cplx F_integral(double y) const;

    // Fourier-exact leftover of (-Delta + v - E) applied to the truncated
    // series (orders > S).  residual(x,y) = e^G e^carrier * tail(x,y)/norm.
    Trig2 residual_tail() const;
    // max over grid of |residual| / (1 + |psi|).
    double residual_max(int nx = 32, int ny = 32) const;

    // Per-fiber view of the order-s data (the paper's c_nu^s).  Enforces the
    // standalone guards: resonance neighborhood and degenerate weight.
    FiberCoefficient fiber_coefficient(int s, FiberIndex nu) const;

    // Deferred resonant amplitudes that were fixed by higher-order
    // solvability, keyed (order, j).
    const std::map<std::pair<int, int>, cplx>& resonant_amplitudes() const {
        return alpha_;
    }

private:
    struct Violation {
        int order;
        int j;
        cplx kappa;
        double scale; // coefficient scale of K at that order
    };

    void compute_order(int s);
    std::vector<Violation> recompute_collect(int lo, int hi);
    std::vector<Violation> filter(const std::vector<Violation>& all) const;
    cplx mode_divisor(int n, int j) const;
    cplx fiber_s(int n) const; // principal sqrt of s_n^2

    cplx k0_, E_;
    PeriodPair L_;
    SeriesOptions opt_;
    Trig2 v_;
    cplx p0_, s0_, w1_, w2_;
    double freq_guard_; // h / (2 pi l2)
    std::vector<Trig2> P_;       // P_[0..S]
    std::vector<Trig2> F_;       // F_[0] unused
    std::vector<Trig2> skipped_; // uncancelled resonant-mode forcing per order
    std::vector<double> kscale_; // coefficient scale of K_s per order
    std::map<std::pair<int, int>, cplx> alpha_;
};

// Lemma-1 style one-call assembly.
BlochSeries assemble_bloch(cplx k0, cplx E, const FourierPotential& v, int S,
                           const PeriodPair& L, SeriesOptions opt = {});

// F_s of the recursion, computed on a fresh state advanced to order s.
Trig2 series_step_F(int s, const BlochSeries& state);

} // namespace fermi
