#include "fermicurve/monodromy.hpp"

#include <algorithm>
#include <cmath>

namespace fermi {

namespace {

// Branch of sqrt(z) continuous near a reference value.
cplx sqrt_near(cplx z, cplx ref) {
    const cplx r = std::sqrt(z);
    return std::abs(r - ref) <= std::abs(-r - ref) ? r : -r;
}

// Roots of the truncated Taylor polynomial closest to the origin, Newton
// polished on the polynomial itself.
std::array<cplx, 2> nearest_two_roots(const std::vector<cplx>& a, cplx center) {
    // Quadratic seed from the first three coefficients.
    const cplx A = a.size() > 2 ? a[2] : cplx(0.0);
    const cplx B = a.size() > 1 ? a[1] : cplx(0.0);
    const cplx C = a[0];
    std::array<cplx, 2> roots;
    if (std::abs(A) < 1e-300 * (1.0 + std::abs(B))) {
        roots = {-C / B, -C / B};
    } else {
        const cplx disc = std::sqrt(B * B - 4.0 * A * C);
        // Numerically stable quadratic roots.
        const cplx q = -0.5 * (B + (std::real(std::conj(B) * disc) >= 0.0
                                        ? disc
                                        : -disc));
        roots = {q / A, std::abs(q) > 0.0 ? C / q : -C / B};
    }
    auto P = [&](cplx x) {
        cplx s(0.0, 0.0);
        for (int k = int(a.size()) - 1; k >= 0; --k) s = s * x + a[k];
        return s;
    };
    auto dP = [&](cplx x) {
        cplx s(0.0, 0.0);
        for (int k = int(a.size()) - 1; k >= 1; --k)
            s = s * x + double(k) * a[k];
        return s;
    };
    for (auto& r : roots) {
        for (int it = 0; it < 60; ++it) {
            const cplx d = dP(r);
            if (std::abs(d) < 1e-300) break;
            const cplx step = P(r) / d;
            r -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(r))) break;
        }
        r += center;
    }
    return roots;
}

} // namespace

ResonancePatchSolver::ResonancePatchSolver(ResonanceIndex idx, cplx E,
                                           const FourierPotential& v,
                                           const PeriodPair& L,
                                           PatchOptions opt)
    : idx_(idx), E_(E), L_(L), opt_(opt), v_(v.series()) {
    const auto rp = resonance_point(idx, E, L);
    if (rp.degenerate)
        throw std::domain_error(
            "ResonancePatchSolver: degenerate resonance (E = E_nm)");
    k_node_ = rp.k;
    p_node_ = exponent_p(k_node_, E);
    s_node_ = exponent_s(k_node_, E);
    auto [w1n, w2n] = multipliers(k_node_, E, L);
    w1_node_ = w1n;
    w2_node_ = w2n;
    vscale_ = v_.max_abs_coeff();
    if (vscale_ <= 0.0)
        vscale_ = 1e-8; // v == 0 still defines the (degenerate) covering

    // Mode lattice symmetric under the conjugation reflection
    // (n', j) -> (-n - n', -m - j).
    const int n = idx.n, m = idx.m;
    n_lo_ = std::min(0, -n) - opt_.lattice_nx;
    n_hi_ = std::max(0, -n) + opt_.lattice_nx;
    j_lo_ = std::min(0, -m) - opt_.lattice_ny;
    j_hi_ = std::max(0, -m) + opt_.lattice_ny;

    for (int nn = n_lo_; nn <= n_hi_; ++nn)
        for (int jj = j_lo_; jj <= j_hi_; ++jj) {
            if ((nn == 0 && jj == 0) || (nn == -n && jj == -m)) continue;
            modes_.push_back({nn, jj});
        }
    id00_ = int(modes_.size());
    modes_.push_back({0, 0});
    idrho_ = int(modes_.size());
    modes_.push_back({-n, -m});
}

int ResonancePatchSolver::mode_id(int n, int j) const {
    if (n == 0 && j == 0) return id00_;
    if (n == -idx_.n && j == -idx_.m) return idrho_;
    if (n < n_lo_ || n > n_hi_ || j < j_lo_ || j > j_hi_) return -1;
    // Dense order of the construction loop with the two seeds skipped.
    const int W = j_hi_ - j_lo_ + 1;
    const int raw = (n - n_lo_) * W + (j - j_lo_);
    const int raw00 = (0 - n_lo_) * W + (0 - j_lo_);
    const int rawrho = (-idx_.n - n_lo_) * W + (-idx_.m - j_lo_);
    return raw - (raw > raw00 ? 1 : 0) - (raw > rawrho ? 1 : 0);
}

ResonancePatchSolver::Solution ResonancePatchSolver::solve(
    cplx w10, bool want_vectors) const {
    const cplx pA = p_node_ + std::log(w10 / w1_node_) / (2.0 * PI * L_.l1);
    const cplx sA = sqrt_near(pA * pA + E_, s_node_);
    const cplx w2A = std::exp(cplx(0.0, 2.0 * PI * L_.l2) * sA);

    const int M = int(modes_.size());
    const int R = M - 2;

    // Free partner exponent: the B-branch frequency relative to the carrier.
    const cplx pB = pA - cplx(0.0, idx_.n / L_.l1);
    const cplx sB_ref = sA - cplx(idx_.m / L_.l2, 0.0);
    const cplx sB = sqrt_near(pB * pB + E_, sB_ref);
    const cplx muB = cplx(0.0, 1.0) * (sB - sB_ref);

    // Precompute mu-independent data.
    std::vector<cplx> sn2(M), freq(M);
    for (int a = 0; a < M; ++a) {
        const auto [nn, jj] = modes_[a];
        const cplx pn = pA + cplx(0.0, nn / L_.l1);
        sn2[a] = pn * pn + E_;
        freq[a] = sA + cplx(jj / L_.l2, 0.0);
    }
    Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(M, M);
    for (int a = 0; a < M; ++a) {
        const auto [na, ja] = modes_[a];
        for (const auto& [key, c] : v_.coeffs()) {
            const int nb = na - key.first, jb = ja - key.second;
            const int b = mode_id(nb, jb);
            if (b >= 0) V(a, b) += c;
        }
    }

    auto schur = [&](cplx mu) -> Eigen::Matrix2cd {
        Eigen::MatrixXcd A = V;
        for (int a = 0; a < M; ++a) {
            const cplx shat = freq[a] - cplx(0.0, 1.0) * mu;
            A(a, a) += shat * shat - sn2[a];
        }
        const Eigen::MatrixXcd Arr = A.topLeftCorner(R, R);
        const Eigen::MatrixXcd Ari = A.topRightCorner(R, 2);
        const Eigen::MatrixXcd Air = A.bottomLeftCorner(2, R);
        const Eigen::Matrix2cd Aii = A.bottomRightCorner(2, 2);
        if (R == 0) return Aii;
        return Aii - Air * Arr.partialPivLu().solve(Ari);
    };

    // Taylor model of det M(mu) around mu_c by trigonometric interpolation.
    const double coupling = vscale_ / std::max(1e-12, std::abs(2.0 * sA));
    const cplx mu_c = 0.5 * muB;
    const double rad = std::max({4.0 * std::abs(muB), 16.0 * coupling, 1e-9});
    const int Q = opt_.taylor_points;
    std::vector<cplx> fvals(Q);
    for (int q = 0; q < Q; ++q) {
        const cplx mu = mu_c + std::polar(rad, 2.0 * PI * q / Q);
        fvals[q] = schur(mu).determinant();
    }
    const int deg = Q / 2;
    std::vector<cplx> taylor(deg + 1, cplx(0.0, 0.0));
    for (int k = 0; k <= deg; ++k) {
        cplx s(0.0, 0.0);
        for (int q = 0; q < Q; ++q)
            s += fvals[q] * std::exp(cplx(0.0, -2.0 * PI * k * q / Q));
        taylor[k] = s / double(Q) / std::pow(rad, k);
    }
    const auto roots = nearest_two_roots(taylor, mu_c);

    Solution sol;
    sol.mu = {roots[0], roots[1]};
    sol.wt = {w2A * std::exp(2.0 * PI * L_.l2 * roots[0]),
              w2A * std::exp(2.0 * PI * L_.l2 * roots[1])};
    sol.eta = {cplx(0.0, 0.0), cplx(0.0, 0.0)};
    sol.eta_imag_residual = {0.0, 0.0};

    // Seed-space eigenvectors and the monodromy matrix.
    Eigen::Matrix2cd S;
    std::array<Eigen::VectorXcd, 2> full;
    for (int i = 0; i < 2; ++i) {
        const Eigen::Matrix2cd Mi = schur(sol.mu[i]);
        // Null vector of a 2x2: pick the larger row construction.
        Eigen::Vector2cd u;
        if (std::abs(Mi(0, 0)) + std::abs(Mi(0, 1)) >
            std::abs(Mi(1, 0)) + std::abs(Mi(1, 1)))
            u << -Mi(0, 1), Mi(0, 0);
        else
            u << -Mi(1, 1), Mi(1, 0);
        if (u.norm() == 0.0) u << 1.0, 0.0;
        u.normalize();
        S.col(i) = u;

        if (want_vectors) {
            Eigen::MatrixXcd A = V;
            for (int a = 0; a < M; ++a) {
                const cplx shat = freq[a] - cplx(0.0, 1.0) * sol.mu[i];
                A(a, a) += shat * shat - sn2[a];
            }
            Eigen::VectorXcd rhs = -(A.topRightCorner(R, 2) * u);
            Eigen::VectorXcd interior =
                A.topLeftCorner(R, R).partialPivLu().solve(rhs);
            Eigen::VectorXcd vec(M);
            vec.head(R) = interior;
            vec(id00_) = u(0);
            vec(idrho_) = u(1);
            vec.normalize();

            // Phase-normalize against the conjugation reflection
            // (n',j) -> (-n-n', -m-j); on the tau-symmetric locus this makes
            // the vector (and its value at the origin) real up to sign.
            Eigen::VectorXcd refl(M);
            for (int a = 0; a < M; ++a) {
                const auto [nn, jj] = modes_[a];
                const int b = mode_id(-idx_.n - nn, -idx_.m - jj);
                refl(a) = b >= 0 ? std::conj(vec(b)) : cplx(0.0, 0.0);
            }
            int imax = 0;
            for (int a = 1; a < M; ++a)
                if (std::abs(vec(a)) > std::abs(vec(imax))) imax = a;
            const cplx lambda = refl(imax) / vec(imax);
            if (std::abs(std::abs(lambda) - 1.0) < 1e-6) {
                const cplx phase =
                    std::exp(cplx(0.0, 0.5 * std::arg(lambda)));
                vec *= phase;
            }
            cplx eta(0.0, 0.0);
            for (int a = 0; a < M; ++a) eta += vec(a);
            sol.eta[i] = eta;
            sol.eta_imag_residual[i] =
                std::abs(eta.imag()) / (1.0 + std::abs(eta));
            sol.vec[i] = std::move(vec);
        }
    }
    sol.T = S * Eigen::Vector2cd(sol.wt[0], sol.wt[1]).asDiagonal() *
            S.inverse();
    return sol;
}

cplx ResonancePatchSolver::discriminant(cplx w10) const {
    const auto sol = solve(w10, false);
    const cplx pA = p_node_ + std::log(w10 / w1_node_) / (2.0 * PI * L_.l1);
    const cplx sA = sqrt_near(pA * pA + E_, s_node_);
    const cplx w2A = std::exp(cplx(0.0, 2.0 * PI * L_.l2) * sA);
    const cplx d = (sol.wt[0] - sol.wt[1]) / w2A;
    return d * d;
}

MonodromyPatch monodromy_patch(const ResonanceIndex& idx, cplx E,
                               const FourierPotential& v, const PeriodPair& L,
                               PatchOptions opt) {
    ResonancePatchSolver solver(idx, E, v, L, opt);

    MonodromyPatch patch;
    patch.idx = idx;
    patch.E = E;
    patch.L = L;
    patch.k_node = solver.k_node();
    patch.w1_node = solver.w1_node();
    patch.w2_node = solver.w2_node();
    patch.radius = opt.radius_factor * solver.coupling_scale() *
                   std::abs(solver.w1_node());

    // Neighborhood overlap guard: the k-plane image of the sampling disc
    // must stay clear of the other resonance points.  The disc radius maps
    // to the k-plane through dw1/dk = 2 pi l1 w1 (1 + E/(4 k^2)).
    {
        const cplx kn = solver.k_node();
        const double dwdk = 2.0 * PI * L.l1 * std::abs(solver.w1_node()) *
                            std::abs(1.0 + E / (4.0 * kn * kn));
        const double k_radius = patch.radius / std::max(dwdk, 1e-12);
        for (int nn = -std::abs(idx.n) - 3; nn <= std::abs(idx.n) + 3; ++nn)
            for (int mm = -std::abs(idx.m) - 3; mm <= std::abs(idx.m) + 3;
                 ++mm) {
                if (nn == 0 && mm == 0) continue;
                if ((nn == idx.n && mm == idx.m) ||
                    (nn == -idx.n && mm == -idx.m))
                    continue;
                for (int sg : {+1, -1}) {
                    const auto rp =
                        resonance_point(ResonanceIndex(nn, mm, sg), E, L);
                    if (std::abs(rp.k - kn) < 2.0 * k_radius)
                        throw NeighborhoodOverlapError(
                            "monodromy_patch: resonance neighborhood overlap "
                            "with (" + std::to_string(nn) + "," +
                            std::to_string(mm) + "); reduce radius");
                }
            }
    }

    for (int q = 0; q < opt.n_samples; ++q) {
        const cplx w10 =
            solver.w1_node() +
            std::polar(patch.radius, 2.0 * PI * q / opt.n_samples);
        const auto sol = solver.solve(w10);
        patch.samples.push_back({w10, sol.mu, sol.wt, sol.T});
    }

    // Discriminant zeros: Taylor model on a circle, secant polish, and
    // adaptive shrinking of the fit circle until the root pair is resolved
    // against it (or the circle hits the resolution floor -> marked).
    {
        const int Q = opt.n_samples;
        const double floor_radius = 1e-9 * std::abs(patch.w1_node);
        cplx center = solver.w1_node();
        double radius = patch.radius;
        std::array<cplx, 2> roots{center, center};
        for (int level = 0; level < 8; ++level) {
            std::vector<cplx> fvals(Q);
            for (int q = 0; q < Q; ++q)
                fvals[q] = solver.discriminant(
                    center + std::polar(radius, 2.0 * PI * q / Q));
            const int deg = std::min(Q / 2, 16);
            std::vector<cplx> taylor(deg + 1);
            for (int k = 0; k <= deg; ++k) {
                cplx s(0.0, 0.0);
                for (int q = 0; q < Q; ++q)
                    s += fvals[q] * std::exp(cplx(0.0, -2.0 * PI * k * q / Q));
                taylor[k] = s / double(Q) / std::pow(radius, k);
            }
            roots = nearest_two_roots(taylor, center);
            for (auto& b : roots) {
                cplx x0 = b, x1 = b + radius * 1e-5;
                cplx f0 = solver.discriminant(x0),
                     f1 = solver.discriminant(x1);
                for (int it = 0; it < 40; ++it) {
                    if (f1 == f0) break;
                    const cplx x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
                    x0 = x1;
                    f0 = f1;
                    x1 = x2;
                    f1 = solver.discriminant(x1);
                    if (std::abs(x1 - x0) < 1e-14 * (1.0 + std::abs(x1)))
                        break;
                }
                b = x1;
            }
            const double split = std::abs(roots[0] - roots[1]);
            if (split > 0.2 * radius || radius <= floor_radius) break;
            center = 0.5 * (roots[0] + roots[1]);
            radius = std::max(4.0 * split, 0.05 * radius);
            radius = std::max(radius, floor_radius);
        }
        patch.branch_points = roots;
        const double split = std::abs(roots[0] - roots[1]);
        patch.marked = split <= std::max(3e-2 * radius,
                                         1e-10 * std::abs(patch.w1_node));
    }
    return patch;
}

GapRecord extract_gap(const MonodromyPatch& patch) {
    if (patch.marked)
        throw NoGapError("extract_gap: marked resonance opens no gap");
    GapRecord g;
    g.n = patch.idx.n;
    g.m = patch.idx.m;
    const cplx p_node = exponent_p(patch.k_node, patch.E);
    g.p1 = p_node + std::log(patch.branch_points[0] / patch.w1_node) /
                        (2.0 * PI * patch.L.l1);
    g.p2 = p_node + std::log(patch.branch_points[1] / patch.w1_node) /
                        (2.0 * PI * patch.L.l1);
    g.sheet = 1;
    return g;
}

PoleResult locate_pole(const ResonancePatchSolver& solver,
                       const MonodromyPatch& patch, int n_scan) {
    if (patch.marked)
        throw NoGapError("locate_pole: marked patch has no gap segment");

    // The gap segment is tau-fixed, so the branch points must be real up to
    // solver accuracy; the oval is scanned along the real chord.
    const cplx b1 = patch.branch_points[0], b2 = patch.branch_points[1];
    const double im_scale = std::abs(b1 - b2);
    if (std::abs(b1.imag()) > 1e-3 * im_scale + 1e-10 * std::abs(b1) ||
        std::abs(b2.imag()) > 1e-3 * im_scale + 1e-10 * std::abs(b2))
        throw StructuralViolation(
            "locate_pole: branch points are not real; gap segment is not "
            "tau-fixed");

    const double lo = std::min(b1.real(), b2.real());
    const double hi = std::max(b1.real(), b2.real());
    const double pad = 2e-3 * (hi - lo);

    // One closed traverse of the oval: sheet 0 ascending, sheet 1
    // descending, chained by vector continuity.  The eigenvector section is
    // Moebius-twisted around the oval, so the zero count may legitimately
    // be odd; the count of sign changes of the chained section is the pole
    // count.
    struct Node {
        double w;
        int sheet; // 0: smaller multiplier, 1: larger
    };
    auto grid = [&](int q) {
        return lo + pad + (hi - lo - 2 * pad) * q / n_scan;
    };
    // Cut the oval at mid-gap so both branch-point junctions are interior
    // to the traverse.
    const int q0 = n_scan / 2;
    std::vector<Node> loop;
    for (int q = q0; q <= n_scan; ++q) loop.push_back({grid(q), 0});
    for (int q = n_scan; q >= 0; --q) loop.push_back({grid(q), 1});
    for (int q = 0; q <= q0; ++q) loop.push_back({grid(q), 0});

    Eigen::VectorXcd ref;
    double max_imag = 0.0;
    auto eval = [&](const Node& nd, bool chain) -> double {
        const auto sol = solver.solve(cplx(nd.w, 0.0), true);
        const int i0 = sol.wt[0].real() <= sol.wt[1].real() ? 0 : 1;
        const int i = nd.sheet == 0 ? i0 : 1 - i0;
        Eigen::VectorXcd v = sol.vec[i];
        cplx eta = sol.eta[i];
        max_imag = std::max(max_imag, sol.eta_imag_residual[i]);
        if (chain && ref.size() == v.size()) {
            const cplx ip = (ref.adjoint() * v)(0, 0);
            if (ip.real() < 0.0) {
                v = -v;
                eta = -eta;
            }
        }
        ref = v;
        return eta.real();
    };

    std::vector<double> etas;
    etas.reserve(loop.size());
    for (const auto& nd : loop) etas.push_back(eval(nd, true));

    struct Crossing {
        double w;
        int sheet;
    };
    std::vector<Crossing> zeros;
    for (std::size_t q = 1; q < loop.size(); ++q) {
        if (etas[q - 1] * etas[q] >= 0.0) continue;
        if (loop[q - 1].sheet != loop[q].sheet) {
            // Crossing inside the branch-point junction; report midpoint.
            zeros.push_back({0.5 * (loop[q - 1].w + loop[q].w),
                             loop[q].sheet + 1});
            continue;
        }
        // Bisection refine with local chaining.
        double a = loop[q - 1].w, b = loop[q].w;
        const int sheet = loop[q].sheet;
        ref.resize(0);
        double fa = eval({a, sheet}, false);
        for (int it = 0; it < 50; ++it) {
            const double mid = 0.5 * (a + b);
            const double fm = eval({mid, sheet}, true);
            if (fa * fm <= 0.0)
                b = mid;
            else {
                a = mid;
                fa = fm;
            }
        }
        zeros.push_back({0.5 * (a + b), sheet + 1});
        ref.resize(0);
    }

    // Closure sanity: the traverse starts and ends at the same curve point,
    // so a sign mismatch there must match an odd crossing count (the
    // Moebius twist of the section).
    const bool closure_flip = etas.front() * etas.back() < 0.0;
    if (closure_flip != (zeros.size() % 2 == 1))
        throw StructuralViolation(
            "locate_pole: oval traverse lost phase continuity");

    if (zeros.size() != 1)
        throw StructuralViolation(
            "locate_pole: found " + std::to_string(zeros.size()) +
            " normalization zeros on the gap oval (expected 1)");

    return {cplx(zeros[0].w, 0.0), zeros[0].sheet, 1, max_imag};
}

} // namespace fermi
