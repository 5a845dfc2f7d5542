#include "fermicurve/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fermi {

cplx FiberCoefficient::evaluate(double y) const {
    return std::exp(cplx(0.0, 1.0) * offset * y) * modes.evaluate(0.0, y);
}

BlochSeries::BlochSeries(cplx k0, cplx E, const FourierPotential& v,
                         const PeriodPair& L, SeriesOptions opt)
    : k0_(k0), E_(E), L_(L), opt_(opt), v_(v.series()) {
    if (k0 == cplx(0.0, 0.0))
        throw std::domain_error("BlochSeries: k0 must be nonzero");
    if (v.periods().l1 != L.l1 || v.periods().l2 != L.l2)
        throw std::invalid_argument("BlochSeries: potential periods mismatch");
    p0_ = exponent_p(k0, E);
    s0_ = exponent_s(k0, E);
    auto [w1, w2] = multipliers(k0, E, L);
    w1_ = w1;
    w2_ = w2;
    if (std::abs(2.0 * s0_) <= opt_.weight_tol)
        throw DegenerateWeightError(
            "BlochSeries: degenerate base point (r_0 ~ 0); move k0");
    freq_guard_ = opt_.neighborhood_h / (2.0 * PI * L.l2);

    P_.push_back(Trig2::constant(1.0, L));
    F_.push_back(Trig2(L)); // placeholders for s = 0
    skipped_.push_back(Trig2(L));
    kscale_.push_back(1.0);
}

cplx BlochSeries::fiber_s(int n) const {
    const cplx pn = p0_ + cplx(0.0, n / L_.l1);
    return std::sqrt(pn * pn + E_);
}

cplx BlochSeries::mode_divisor(int n, int j) const {
    const cplx freq = s0_ + cplx(j / L_.l2, 0.0);
    const cplx pn = p0_ + cplx(0.0, n / L_.l1);
    return freq * freq - (pn * pn + E_);
}

void BlochSeries::compute_order(int s) {
    // K_s: every product of already-known data with total order s.
    Trig2 K = v_.mul(P_[s - 1]) * cplx(-1.0, 0.0);
    for (int i = 1; i <= s - 1; ++i) {
        const Trig2& Pi = P_[s - i];
        Trig2 dshift = Pi.dy() + cplx(0.0, 1.0) * s0_ * Pi;
        K += F_[i].mul(dshift) * cplx(2.0, 0.0);
        K += F_[i].dy().mul(Pi);
        for (int l = 1; l <= s - i; ++l)
            K += F_[i].mul(F_[l]).mul(P_[s - i - l]);
    }

    Trig2 Fs(L_), Ps(L_), skip(L_);
    for (const auto& [key, c] : K.coeffs()) {
        const int n = key.first, j = key.second;
        if (n == 0) {
            const cplx freq2 = 2.0 * s0_ + cplx(j / L_.l2, 0.0);
            if (std::abs(freq2) <= freq_guard_) {
                // In-fiber resonant mode: 0 * Phat = Khat.  The forcing is
                // recorded; it must be cancelled by a deferred amplitude at
                // a lower order (or already be zero).
                skip.add(0, j, c);
                continue;
            }
            Fs.add(0, j, -c / (cplx(0.0, 1.0) * freq2));
        } else {
            const cplx freq = s0_ + cplx(j / L_.l2, 0.0);
            const cplx sn = fiber_s(n);
            const double sep =
                std::min(std::abs(freq - sn), std::abs(freq + sn));
            if (sep <= freq_guard_) {
                const int sign =
                    std::abs(freq - sn) < std::abs(freq + sn) ? +1 : -1;
                std::ostringstream msg;
                msg << "BlochSeries: resonant index nu=(" << n << ","
                    << (sign > 0 ? '+' : '-') << ") at order " << s
                    << "; switch to quasi-Bloch (monodromy patch)";
                throw ResonantIndexError(FiberIndex{n, sign}, msg.str());
            }
            Ps.add(n, j, c / mode_divisor(n, j));
        }
    }

    // Deferred amplitudes assigned to this order.
    for (const auto& [key, a] : alpha_)
        if (key.first == s) Ps.add(0, key.second, a);

    if (opt_.prune_eps > 0.0) {
        Fs.prune(opt_.prune_eps);
        Ps.prune(opt_.prune_eps);
    }

    const double ks = std::max(1e-300, K.max_abs_coeff());
    if (int(P_.size()) == s) {
        P_.push_back(std::move(Ps));
        F_.push_back(std::move(Fs));
        skipped_.push_back(std::move(skip));
        kscale_.push_back(ks);
    } else {
        P_[s] = std::move(Ps);
        F_[s] = std::move(Fs);
        skipped_[s] = std::move(skip);
        kscale_[s] = ks;
    }
}

std::vector<BlochSeries::Violation> BlochSeries::recompute_collect(int lo,
                                                                   int hi) {
    std::vector<Violation> all;
    for (int t = lo; t <= hi; ++t) {
        compute_order(t);
        for (const auto& [key, c] : skipped_[t].coeffs())
            all.push_back({t, key.second, c, kscale_[t]});
    }
    return all;
}

std::vector<BlochSeries::Violation> BlochSeries::filter(
    const std::vector<Violation>& all) const {
    std::vector<Violation> out;
    for (const auto& v : all)
        if (std::abs(v.kappa) > opt_.kappa_rel_tol * v.scale) out.push_back(v);
    return out;
}

void BlochSeries::advance_to(int S) {
    for (int s = order() + 1; s <= S; ++s) {
        std::vector<Violation> viol = filter(recompute_collect(s, s));

        int guard = 0;
        while (!viol.empty()) {
            if (++guard > opt_.max_resolve_iterations)
                throw ResonantIndexError(
                    FiberIndex{0, -1},
                    "BlochSeries: unresolved in-fiber resonance at order " +
                        std::to_string(s));
            // Lowest order first; violations at lower orders invalidate the
            // data above them.
            const Violation v0 = *std::min_element(
                viol.begin(), viol.end(),
                [](const Violation& a, const Violation& b) {
                    return a.order < b.order;
                });
            bool solved = false;
            for (int sp = v0.order - 1; sp >= 1 && !solved; --sp) {
                // Secant probe of kappa's response to an amplitude at
                // (order sp, mode (0, j)).  The probe step is kept small so
                // higher-than-linear response does not distort the slope.
                const auto key = std::make_pair(sp, v0.j);
                const cplx saved = alpha_.count(key) ? alpha_[key] : cplx(0.0);
                const double step =
                    std::clamp(std::sqrt(std::abs(v0.kappa) / v0.scale), 1e-8,
                               1.0);
                alpha_[key] = saved + step;
                (void)recompute_collect(sp, s);
                const cplx kappa1 = skipped_[v0.order].coeff(0, v0.j);
                const cplx chi = (kappa1 - v0.kappa) / step;
                if (std::abs(chi) > 1e-300 &&
                    std::abs(v0.kappa / chi) < 1e8) {
                    alpha_[key] = saved - v0.kappa / chi;
                    viol = filter(recompute_collect(sp, s));
                    bool cleared = true;
                    for (const auto& p : viol)
                        if (p.order == v0.order && p.j == v0.j &&
                            std::abs(p.kappa) > 0.5 * std::abs(v0.kappa))
                            cleared = false;
                    if (cleared) {
                        solved = true;
                        break;
                    }
                }
                alpha_[key] = saved;
                if (alpha_[key] == cplx(0.0, 0.0)) alpha_.erase(key);
                viol = filter(recompute_collect(sp, s));
            }
            if (!solved)
                throw ResonantIndexError(
                    FiberIndex{0, -1},
                    "BlochSeries: in-fiber resonance at order " +
                        std::to_string(v0.order) +
                        " has no solvable deferred amplitude");
        }
    }
}

cplx BlochSeries::w2_tilde() const {
    cplx mean(0.0, 0.0);
    for (int s = 1; s <= order(); ++s) mean += F_[s].coeff(0, 0);
    return w2_ * std::exp(2.0 * PI * L_.l2 * mean);
}

cplx BlochSeries::F_integral(double y) const {
    cplx g(0.0, 0.0);
    for (int s = 1; s <= order(); ++s) {
        for (const auto& [key, c] : F_[s].coeffs()) {
            const int j = key.second;
            if (j == 0) {
                g += c * y;
            } else {
                const cplx iw(0.0, j / L_.l2);
                g += c * (std::exp(iw * y) - 1.0) / iw;
            }
        }
    }
    return g;
}

cplx BlochSeries::norm_value() const {
    cplx n(0.0, 0.0);
    for (const auto& Ps : P_) n += Ps.evaluate(0.0, 0.0);
    return n;
}

bool BlochSeries::norm_near_zero() const {
    return std::abs(norm_value()) < 1e-8;
}

cplx BlochSeries::evaluate(double x, double y) const {
    cplx sum(0.0, 0.0);
    for (const auto& Ps : P_) sum += Ps.evaluate(x, y);
    const cplx carrier = std::exp(p0_ * x + cplx(0.0, 1.0) * s0_ * y);
    return std::exp(F_integral(y)) * carrier * sum / norm_value();
}

Trig2 BlochSeries::residual_tail() const {
    // The residual equals minus the (order > S) part of
    //   -v Psi + F^2 Psi + F_y Psi + 2 F Psi_y
    // assembled from the truncated factors; all orders <= S cancel exactly.
    const int S = order();
    Trig2 acc(L_);
    acc += v_.mul(P_[S]) * cplx(-1.0, 0.0); // the only -v term beyond order S
    for (int i = 1; i <= S; ++i) {
        for (int a = 0; a <= S; ++a) {
            if (i + a <= S) continue;
            const Trig2& Pa = P_[a];
            Trig2 dshift = Pa.dy() + cplx(0.0, 1.0) * s0_ * Pa;
            acc += F_[i].mul(dshift) * cplx(2.0, 0.0);
            acc += F_[i].dy().mul(Pa);
        }
        for (int l = 1; l <= S; ++l)
            for (int a = 0; a <= S; ++a) {
                if (i + l + a <= S) continue;
                acc += F_[i].mul(F_[l]).mul(P_[a]);
            }
    }
    Trig2 tail = acc * cplx(-1.0, 0.0);
    // Sub-tolerance forcing that was skipped at resonant modes stays in the
    // equation and belongs to the residual.
    for (int t = 1; t <= S; ++t) tail -= skipped_[t];
    return tail;
}

double BlochSeries::residual_max(int nx, int ny) const {
    const Trig2 tail = residual_tail();
    const cplx norm = norm_value();
    double worst = 0.0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const double x = L_.x_period() * i / nx;
            const double y = L_.y_period() * j / ny;
            const cplx carrier =
                std::exp(F_integral(y) + p0_ * x + cplx(0.0, 1.0) * s0_ * y);
            const cplx res = carrier * tail.evaluate(x, y) / norm;
            const cplx psi = evaluate(x, y);
            worst = std::max(worst, std::abs(res) / (1.0 + std::abs(psi)));
        }
    return worst;
}

FiberCoefficient BlochSeries::fiber_coefficient(int s, FiberIndex nu) const {
    if (s < 0 || s > order())
        throw std::out_of_range("fiber_coefficient: order not computed");
    const cplx sn = fiber_s(nu.n);
    if (std::abs(2.0 * sn) <= opt_.weight_tol)
        throw DegenerateWeightError(
            "fiber_coefficient: degenerate weight r_nu ~ 0 on fiber n=" +
            std::to_string(nu.n));
    const cplx snu = double(nu.sign) * sn;
    // Standalone (nei) guard for nu != 0.
    if (!(nu.n == 0 && nu.sign == +1)) {
        const cplx w2nu = std::exp(cplx(0.0, 2.0 * PI * L_.l2) * snu);
        if (std::abs(w2nu / w2_ - 1.0) <= opt_.neighborhood_h)
            throw ResonantIndexError(
                nu, "fiber_coefficient: resonance guard violated for nu=(" +
                        std::to_string(nu.n) + "," +
                        (nu.sign > 0 ? std::string("+") : std::string("-")) +
                        ")");
    }

    FiberCoefficient out;
    out.offset = s0_ - snu;
    out.modes = Trig2(L_);
    for (const auto& [key, c] : P_[s].coeffs()) {
        if (key.first != nu.n) continue;
        const cplx freq = s0_ + cplx(key.second / L_.l2, 0.0);
        // Nearest-carrier assignment of the mode to the +/- branch.
        const int branch = std::abs(freq - sn) <= std::abs(freq + sn) ? 1 : -1;
        if (branch == nu.sign) out.modes.add(0, key.second, c);
    }
    return out;
}

BlochSeries assemble_bloch(cplx k0, cplx E, const FourierPotential& v, int S,
                           const PeriodPair& L, SeriesOptions opt) {
    BlochSeries b(k0, E, v, L, opt);
    b.advance_to(S);
    return b;
}

Trig2 series_step_F(int s, const BlochSeries& state) {
    return state.F(s);
}

} // namespace fermi
