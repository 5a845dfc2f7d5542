#include "fermicurve/lattice.hpp"

#include <cmath>

namespace fermi {

static void require_nonzero(cplx k, const char* who) {
    if (k == cplx(0.0, 0.0))
        throw std::domain_error(std::string(who) + ": k must be nonzero");
}

cplx exponent_p(cplx k, cplx E) { return k - E / (4.0 * k); }
cplx exponent_s(cplx k, cplx E) { return k + E / (4.0 * k); }

cplx free_bloch(cplx k, cplx E, double x, double y) {
    require_nonzero(k, "free_bloch");
    const cplx z(x, y), zb(x, -y);
    return std::exp(k * z - E / (4.0 * k) * zb);
}

std::pair<cplx, cplx> multipliers(cplx k, cplx E, const PeriodPair& L) {
    require_nonzero(k, "multipliers");
    const cplx w1 = std::exp(2.0 * PI * L.l1 * exponent_p(k, E));
    const cplx w2 = std::exp(cplx(0.0, 2.0 * PI * L.l2) * exponent_s(k, E));
    return {w1, w2};
}

cplx weight_r(cplx k, cplx E, const PeriodPair& L) {
    require_nonzero(k, "weight_r");
    return cplx(0.0, 4.0 * PI * L.l1) * exponent_s(k, E);
}

cplx weight_wronskian(cplx k, cplx E) {
    require_nonzero(k, "weight_wronskian");
    return cplx(0.0, 2.0) * exponent_s(k, E);
}

std::vector<FiberPoint> fiber_points(cplx k0, cplx E, const PeriodPair& L,
                                     int nmax, double tol) {
    require_nonzero(k0, "fiber_points");
    if (nmax < 0)
        throw std::invalid_argument("fiber_points: nmax must be >= 0");

    const cplx p0 = exponent_p(k0, E);
    const cplx w10 = std::exp(2.0 * PI * L.l1 * p0);

    std::vector<FiberPoint> out;
    out.reserve(2 * (2 * nmax + 1));
    for (int n = -nmax; n <= nmax; ++n) {
        // Roots of k - E/(4k) = p0 + i n / l1: a quadratic in k.
        const cplx b = p0 + cplx(0.0, n / L.l1);
        const cplx root = std::sqrt(b * b + E); // principal branch
        for (int sign : {+1, -1}) {
            const cplx k = 0.5 * (b + double(sign) * root);
            if (k == cplx(0.0, 0.0))
                continue; // E = 0 artifact: the p-plane point itself
            const cplx w1 = multipliers(k, E, L).first;
            if (std::abs(w1 - w10) > tol * (1.0 + std::abs(w10)))
                throw std::runtime_error(
                    "fiber_points: resubstitution failed for branch n=" +
                    std::to_string(n));
            out.push_back({FiberIndex{n, sign}, k});
        }
    }
    return out;
}

ResonancePoint resonance_point(const ResonanceIndex& idx, cplx E,
                               const PeriodPair& L) {
    const double l1 = L.l1, l2 = L.l2;
    const double nm2 = double(idx.m) * idx.m * l1 * l1 +
                       double(idx.n) * idx.n * l2 * l2;
    const cplx pref = cplx(idx.m * l1, idx.n * l2) / (4.0 * l1 * l2);
    const cplx radicand = 1.0 - 4.0 * E * l1 * l1 * l2 * l2 / nm2;

    ResonancePoint rp;
    rp.degenerate = std::abs(radicand) < 1e-14;
    rp.k = pref * (1.0 + double(idx.sign) * std::sqrt(radicand));
    return rp;
}

double eigenlevel(int n, int m, const PeriodPair& L) {
    const double l1 = L.l1, l2 = L.l2;
    return (double(m) * m * l1 * l1 + double(n) * n * l2 * l2) /
           (4.0 * l1 * l1 * l2 * l2);
}

StFixedPointScan scan_stau_fixed_points(cplx E, const PeriodPair& L,
                                        double r_min, double r_max,
                                        int nr, int nphi, double tol) {
    StFixedPointScan res;
    res.min_joint_deviation = 1e300;
    for (int i = 0; i < nr; ++i) {
        const double r = r_min + (r_max - r_min) * i / double(nr - 1);
        for (int j = 0; j < nphi; ++j) {
            const double phi = 2.0 * PI * j / double(nphi);
            const cplx k = std::polar(r, phi);
            auto [w1, w2] = multipliers(k, E, L);
            const double d1 = std::abs(std::abs(w1) - 1.0);
            const double d2 = std::abs(std::abs(w2) - 1.0);
            const double joint = std::max(d1, d2);
            res.min_joint_deviation = std::min(res.min_joint_deviation, joint);
            ++res.points_scanned;
            if (d1 < tol && d2 < tol)
                ++res.hits;
        }
    }
    return res;
}

} // namespace fermi
