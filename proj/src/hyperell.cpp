#include "fermicurve/hyperell.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace fermi {

using nlohmann::json;

void HyperellipticCurveData::validate() const {
    if (pairs.empty())
        throw std::invalid_argument("curve: at least one branch pair required");
    std::vector<cplx> all;
    for (const auto& pr : pairs) {
        all.push_back(pr.p_plus);
        all.push_back(pr.p_minus);
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (all[i] == cplx(0.0, 0.0))
            throw std::invalid_argument(
                "curve: branch points must avoid X = 0 (reserved for P_+)");
        for (std::size_t j = i + 1; j < all.size(); ++j)
            if (std::abs(all[i] - all[j]) == 0.0)
                throw std::invalid_argument("curve: branch points must be distinct");
    }
    if (reality == RealityType::m_type) {
        for (const auto& pr : pairs)
            if (pr.p_plus.imag() != 0.0 || pr.p_minus.imag() != 0.0)
                throw std::invalid_argument(
                    "curve: m-type requires real branch points");
    }
    if (reality == RealityType::conjugate) {
        for (const auto& pr : pairs)
            if (std::abs(pr.p_minus - std::conj(pr.p_plus)) >
                1e-14 * (1.0 + std::abs(pr.p_plus)))
                throw std::invalid_argument(
                    "curve: conjugate type requires p_minus = conj(p_plus)");
    }
}

std::string HyperellipticCurveData::to_json() const {
    json j;
    j["n"] = genus();
    j["branch_pairs"] = json::array();
    for (const auto& pr : pairs)
        j["branch_pairs"].push_back(
            {{"plus", {{"re", pr.p_plus.real()}, {"im", pr.p_plus.imag()}}},
             {"minus", {{"re", pr.p_minus.real()}, {"im", pr.p_minus.imag()}}}});
    switch (reality) {
        case RealityType::m_type: j["reality"] = "m-type"; break;
        case RealityType::conjugate: j["reality"] = "conjugate"; break;
        default: j["reality"] = "none";
    }
    j["convention"] = convention;
    return j.dump(2);
}

HyperellipticCurveData HyperellipticCurveData::parse_json(
    const std::string& text) {
    const json j = json::parse(text);
    HyperellipticCurveData c;
    for (const auto& pr : j.at("branch_pairs")) {
        BranchPair bp;
        bp.p_plus = cplx(pr.at("plus").at("re").get<double>(),
                         pr.at("plus").value("im", 0.0));
        bp.p_minus = cplx(pr.at("minus").at("re").get<double>(),
                          pr.at("minus").value("im", 0.0));
        c.pairs.push_back(bp);
    }
    const std::string r = j.value("reality", "none");
    c.reality = r == "m-type" ? RealityType::m_type
                : r == "conjugate" ? RealityType::conjugate
                                   : RealityType::none;
    c.convention = j.value("convention", "segment");
    if (j.contains("n") && j.at("n").get<int>() != c.genus())
        throw std::invalid_argument("curve JSON: n does not match pair count");
    c.validate();
    return c;
}

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration.
struct GLRule {
    std::vector<double> x, w;
};

const GLRule& gl_rule(int order) {
    static std::map<int, GLRule> cache;
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    GLRule r;
    r.x.resize(order);
    r.w.resize(order);
    for (int i = 0; i < order; ++i) {
        double x = std::cos(PI * (i + 0.75) / (order + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
            const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = order * (x * p1 - p0) / (x * x - 1.0);
        r.x[i] = x;
        r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    it = cache.emplace(order, std::move(r)).first;
    return it->second;
}

// Distance from point q to segment [a, b].
double seg_dist(cplx a, cplx b, cplx q) {
    const cplx d = b - a;
    const double L2 = std::norm(d);
    if (L2 == 0.0) return std::abs(q - a);
    double t = ((q - a) * std::conj(d)).real() / L2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(q - (a + t * d));
}

} // namespace

cplx CurveEngine::principal_Y(cplx X) const {
    cplx y = std::sqrt(X);
    for (const cplx& b : finite_bps_) y *= std::sqrt(X - b);
    return y;
}

cplx CurveEngine::principal_Pu(cplx u) const {
    cplx p = 1.0;
    for (const cplx& b : finite_bps_) p *= std::sqrt(1.0 - b * u * u);
    return p;
}

cplx CurveEngine::laurent_eval(const Eigen::VectorXcd& c, int lo, cplx X) const {
    // c(k) multiplies X^{lo+k}.
    cplx acc(0.0, 0.0);
    cplx xp = lo == -1 ? 1.0 / X : cplx(1.0, 0.0);
    if (lo == 0) xp = 1.0;
    for (int k = 0; k < c.size(); ++k) {
        acc += c(k) * xp;
        xp *= X;
    }
    return acc;
}

CurveEngine::Path CurveEngine::plan(cplx from, cplx to, bool from_bp,
                                    bool to_bp) const {
    const double clearance = opt_.clearance_rel * scale_;
    std::vector<cplx> obstacles = finite_bps_;
    obstacles.push_back(cplx(0.0, 0.0));

    std::vector<cplx> pts{from, to};
    // Recursive midpoint displacement until every leg clears the obstacles
    // (path endpoints excluded from their own legs' checks).
    for (int depth = 0; depth < 24; ++depth) {
        bool ok = true;
        for (std::size_t i = 0; i + 1 < pts.size() && ok; ++i) {
            const cplx a = pts[i], b = pts[i + 1];
            for (const cplx& q : obstacles) {
                if (std::abs(q - from) < 1e-13 * scale_ && i == 0) continue;
                if (std::abs(q - to) < 1e-13 * scale_ && i + 2 == pts.size())
                    continue;
                if (std::abs(q - a) < 1e-13 * scale_ ||
                    std::abs(q - b) < 1e-13 * scale_)
                    continue;
                if (seg_dist(a, b, q) < clearance) {
                    // Bow this leg to the side that gains more distance.
                    const cplx mid = 0.5 * (a + b);
                    const cplx normal =
                        cplx(0.0, 1.0) * (b - a) / std::abs(b - a);
                    const double h =
                        std::max(0.35 * std::abs(b - a), 2.5 * clearance);
                    const cplx c1 = mid + h * normal, c2 = mid - h * normal;
                    double d1 = 1e300, d2 = 1e300;
                    for (const cplx& o : obstacles) {
                        d1 = std::min(d1, std::abs(c1 - o));
                        d2 = std::min(d2, std::abs(c2 - o));
                    }
                    pts.insert(pts.begin() + i + 1, d1 >= d2 ? c1 : c2);
                    ok = false;
                    break;
                }
            }
        }
        if (ok) break;
        if (depth == 23)
            throw std::runtime_error("plan: failed to route path between " +
                                     std::to_string(from.real()) + "+i" +
                                     std::to_string(from.imag()) + " and " +
                                     std::to_string(to.real()) + "+i" +
                                     std::to_string(to.imag()));
    }

    Path path;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        Leg leg;
        leg.a = pts[i];
        leg.b = pts[i + 1];
        leg.sing_a = (i == 0) && from_bp;
        leg.sing_b = (i + 2 == pts.size()) && to_bp;
        path.push_back(leg);
    }
    return path;
}

std::vector<cplx> CurveEngine::integrate(
    const Path& path, const std::vector<Eigen::VectorXcd>& lauren,
    const std::vector<int>& lo_pow, cplx* y_end, int* panels_used) const {
    std::vector<cplx> totals(lauren.size(), cplx(0.0, 0.0));
    double run_sign = 1.0;
    cplx last_y(0.0, 0.0);
    int worst_panels = 1;

    const int g = curve_.genus();

    // Grade radially wide legs geometrically: uniform panel refinement
    // cannot resolve the 1/X-type profiles across several decades.
    Path legs;
    for (const auto& leg : path) {
        const double ra = std::abs(leg.a), rb = std::abs(leg.b);
        if (leg.u_coords || leg.sing_a || leg.sing_b || ra == 0.0 ||
            rb == 0.0 || std::max(ra, rb) <= 8.0 * std::min(ra, rb)) {
            legs.push_back(leg);
            continue;
        }
        const int pieces =
            int(std::ceil(std::log(std::max(ra, rb) / std::min(ra, rb)) /
                          std::log(8.0)));
        const bool grow = rb > ra;
        cplx prev = leg.a;
        for (int k = 1; k <= pieces; ++k) {
            Leg sub = leg;
            sub.a = prev;
            sub.sing_a = false;
            sub.sing_b = false;
            if (k == pieces) {
                sub.b = leg.b;
            } else {
                // Split where |X| reaches the geometric intermediate value
                // (|X| is monotone along the radially wide legs we split).
                const double target = ra * std::pow(rb / ra, double(k) / pieces);
                double t_lo = 0.0, t_hi = 1.0;
                for (int it = 0; it < 60; ++it) {
                    const double tm = 0.5 * (t_lo + t_hi);
                    const bool below =
                        std::abs(leg.a + (leg.b - leg.a) * tm) < target;
                    if (below == grow)
                        t_lo = tm;
                    else
                        t_hi = tm;
                }
                sub.b = leg.a + (leg.b - leg.a) * 0.5 * (t_lo + t_hi);
            }
            legs.push_back(sub);
            prev = sub.b;
        }
    }

    for (const auto& leg : legs) {
        // Parameter map tau in [0,1] -> X (or u), absorbing sqrt endpoint
        // singularities.
        auto map = [&](double tau, cplx& Xc, cplx& dXdtau, cplx& uval) {
            double w, dw;
            if (leg.sing_a && leg.sing_b) {
                w = 0.5 * (1.0 - std::cos(PI * tau));
                dw = 0.5 * PI * std::sin(PI * tau);
            } else if (leg.sing_a) {
                w = tau * tau;
                dw = 2.0 * tau;
            } else if (leg.sing_b) {
                w = 1.0 - (1.0 - tau) * (1.0 - tau);
                dw = 2.0 * (1.0 - tau);
            } else {
                w = tau;
                dw = 1.0;
            }
            const cplx d = leg.b - leg.a;
            if (!leg.u_coords) {
                Xc = leg.a + d * w;
                dXdtau = d * dw;
                uval = 0.0;
            } else {
                const cplx u = leg.a + d * w;
                uval = u;
                Xc = 1.0 / (u * u);
                dXdtau = -2.0 / (u * u * u) * d * dw;
            }
        };

        // Branch walk: flips of the principal evaluator along the leg.
        // Tracked value = parity * principal; a flip is recorded where the
        // parity-applied candidate jumps relative to the tracked value.
        std::vector<double> flips;
        {
            const int W = opt_.walk_steps;
            const double tau_lo = leg.sing_a ? 0.5 / W : 0.0;
            const double tau_hi = leg.sing_b ? 1.0 - 0.5 / W : 1.0;
            double s = 1.0;
            cplx cont_prev;
            bool have = false;
            for (int k = 0; k <= W; ++k) {
                const double tau = tau_lo + (tau_hi - tau_lo) * k / W;
                cplx X, dX, u;
                map(tau, X, dX, u);
                const cplx val =
                    leg.u_coords ? principal_Pu(u) : principal_Y(X);
                cplx cand = s * val;
                if (have &&
                    std::abs(cand - cont_prev) > std::abs(cand + cont_prev)) {
                    s = -s;
                    cand = -cand;
                    flips.push_back(tau);
                }
                cont_prev = cand;
                have = true;
            }
        }
        auto walk_sign = [&](double tau) {
            int c = 0;
            for (double f : flips)
                if (f <= tau) ++c;
            return (c % 2 == 0) ? 1.0 : -1.0;
        };

        // Sign handoff between legs (and into u-coordinates).
        double leg_sign = 1.0;
        if (last_y != cplx(0.0, 0.0)) {
            cplx X0, dX0, u0;
            map(leg.sing_a ? 1e-8 : 0.0, X0, dX0, u0);
            cplx base;
            if (!leg.u_coords)
                base = principal_Y(X0);
            else {
                const cplx pw = std::pow(u0, -2 * g - 1);
                base = pw * principal_Pu(u0);
            }
            base *= walk_sign(leg.sing_a ? 1e-8 : 0.0);
            // Choose the sign that continues the previous tracked Y.
            leg_sign =
                std::abs(base - last_y) <= std::abs(base + last_y) ? 1.0 : -1.0;
        } else {
            leg_sign = run_sign;
        }

        auto Yval = [&](double tau) {
            cplx X, dX, u;
            map(tau, X, dX, u);
            cplx y;
            if (!leg.u_coords)
                y = principal_Y(X);
            else
                y = std::pow(u, -2 * g - 1) * principal_Pu(u);
            return leg_sign * walk_sign(tau) * y;
        };

        // Composite Gauss-Legendre with panel doubling.
        const GLRule& rule = gl_rule(opt_.gl_order);
        std::vector<cplx> prev_vals(lauren.size(), cplx(0.0, 0.0));
        std::vector<cplx> cur(lauren.size());
        int panels = 1;
        for (int lvl = 0;; ++lvl) {
            std::fill(cur.begin(), cur.end(), cplx(0.0, 0.0));
            for (int p = 0; p < panels; ++p) {
                const double ta = double(p) / panels,
                             tb = double(p + 1) / panels;
                for (std::size_t q = 0; q < rule.x.size(); ++q) {
                    const double tau =
                        0.5 * (ta + tb) + 0.5 * (tb - ta) * rule.x[q];
                    const double wq = 0.5 * (tb - ta) * rule.w[q];
                    cplx X, dX, u;
                    map(tau, X, dX, u);
                    const cplx Y = Yval(tau);
                    for (std::size_t f = 0; f < lauren.size(); ++f)
                        cur[f] += wq * laurent_eval(lauren[f], lo_pow[f], X) /
                                  Y * dX;
                }
            }
            double err = 0.0, sc = 0.0;
            for (std::size_t f = 0; f < lauren.size(); ++f) {
                err = std::max(err, std::abs(cur[f] - prev_vals[f]));
                sc = std::max(sc, std::abs(cur[f]));
            }
            if (lvl > 0 && err <= opt_.tol * (1.0 + sc)) break;
            if (lvl >= opt_.max_doublings) break;
            prev_vals = cur;
            panels *= 2;
        }
        worst_panels = std::max(worst_panels, panels);
        for (std::size_t f = 0; f < lauren.size(); ++f) totals[f] += cur[f];

        // Track Y to the leg end for the next handoff.
        const double tau_end = leg.sing_b ? 1.0 - 1e-8 : 1.0;
        last_y = Yval(tau_end);
        run_sign = leg_sign;
    }
    if (y_end) *y_end = last_y;
    if (panels_used) *panels_used = worst_panels;
    max_panels_ = std::max(max_panels_, worst_panels);
    return totals;
}

CurveEngine::CurveEngine(HyperellipticCurveData curve, QuadratureOptions opt)
    : curve_(std::move(curve)), opt_(opt) {
    curve_.validate();
    for (const auto& pr : curve_.pairs) {
        finite_bps_.push_back(pr.p_plus);
        finite_bps_.push_back(pr.p_minus);
    }
    scale_ = 0.0;
    for (const cplx& b : finite_bps_) scale_ = std::max(scale_, std::abs(b));
    compute_all();
}

void CurveEngine::compute_all() {
    const int g = curve_.genus();

    // Basis differentials X^k dX/Y, k = 0..g-1, plus the X^{-1} column used
    // by dOmega_+.
    std::vector<Eigen::VectorXcd> basis;
    std::vector<int> lo;
    for (int k = 0; k < g; ++k) {
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(k + 1);
        c(k) = 1.0;
        basis.push_back(c);
        lo.push_back(0);
    }
    {
        Eigen::VectorXcd c(1);
        c(0) = 1.0;
        basis.push_back(c); // X^{-1}
        lo.push_back(-1);
    }
    {
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(g + 1);
        c(g) = 1.0;
        basis.push_back(c); // X^{g}
        lo.push_back(0);
    }

    // a-periods: doubled integrals over the pair segments.
    Eigen::MatrixXcd Aper(g, g);          // holomorphic block
    Eigen::MatrixXcd Aneg(g, 1), Atop(g, 1); // X^{-1} and X^{g} columns
    for (int i = 0; i < g; ++i) {
        const auto path = plan(curve_.pairs[i].p_minus, curve_.pairs[i].p_plus,
                               true, true);
        const auto vals = integrate(path, basis, lo);
        for (int k = 0; k < g; ++k) Aper(i, k) = 2.0 * vals[k];
        Aneg(i, 0) = 2.0 * vals[g];
        Atop(i, 0) = 2.0 * vals[g + 1];
    }

    // Normalized holomorphic differentials: rows of C_ against X^k dX/Y.
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Aper);
    const double cond_proxy =
        Aper.cwiseAbs().maxCoeff() *
        lu.inverse().cwiseAbs().maxCoeff();
    if (!(cond_proxy < 1e10))
        throw std::runtime_error(
            "compute_periods: period solve is ill-conditioned; "
            "near-degenerate branch configuration");
    C_ = lu.solve(Eigen::MatrixXcd::Identity(g, g)).transpose();

    // Local data at P_+: g0 = Y/sqrt(X) at X -> 0 is exactly a square root
    // of prod(-b_i); only its sign is read off the tracked branch along the
    // canonical (first b-path) direction.
    {
        cplx prod(1.0, 0.0);
        for (const cplx& b : finite_bps_) prod *= -b;
        const cplx g0_exact = std::sqrt(prod);
        const auto trunk =
            plan(cplx(0.0, 0.0), curve_.pairs[0].p_minus, true, true);
        const cplx dir =
            (trunk[0].b - trunk[0].a) / std::abs(trunk[0].b - trunk[0].a);
        const cplx Xs = 1e-8 * scale_ * dir;
        const cplx probe = principal_Y(Xs) / std::sqrt(Xs);
        g0_ = std::abs(probe - g0_exact) <= std::abs(probe + g0_exact)
                  ? g0_exact
                  : -g0_exact;
        // Coefficients of P(X) = prod(X - b_i) = g(t^2)^2; the difference
        // quotient (P(X) - P(0))/X drives the cancellation-free Omega_+
        // regularization.
        Ppoly_ = Eigen::VectorXcd::Zero(int(finite_bps_.size()) + 1);
        Ppoly_(0) = 1.0;
        int deg = 0;
        for (const cplx& b : finite_bps_) {
            for (int k = deg + 1; k >= 1; --k)
                Ppoly_(k) = Ppoly_(k - 1) - b * Ppoly_(k);
            Ppoly_(0) *= -b;
            ++deg;
        }
    }

    // dOmega_+ = (c_{-1}/X + sum_{k<g} c_k X^k) dX/Y: leading term fixed by
    // the k_+ = 1/t normalization, a-periods zeroed.
    dplus_ = Eigen::VectorXcd::Zero(g + 1); // powers -1..g-1
    dplus_(0) = -0.5 * g0_;
    if (g > 0) {
        Eigen::VectorXcd rhs = -dplus_(0) * Aneg.col(0);
        Eigen::VectorXcd ck = lu.solve(rhs);
        for (int k = 0; k < g; ++k) dplus_(k + 1) = ck(k);
    }

    // dOmega_-: leading coefficient from the expansion at P_-.  The curve
    // is monic, so (Y X^{-g-1/2})^2 -> 1 at infinity; only the sign comes
    // from the tracked branch along the canonical path.
    cplx g_inf;
    {
        const auto path = plan_to_infinity();
        Path xpart(path.begin(), path.end() - 1);
        cplx yfar;
        std::vector<Eigen::VectorXcd> none;
        std::vector<int> none_lo;
        integrate(xpart, none, none_lo, &yfar);
        const cplx Xfar = xpart.back().b;
        const cplx probe = yfar / std::pow(Xfar, g + 0.5);
        g_inf = std::abs(probe - 1.0) <= std::abs(probe + 1.0) ? 1.0 : -1.0;
    }
    dminus_ = Eigen::VectorXcd::Zero(g + 1); // powers 0..g
    dminus_(g) = 0.5 * g_inf;
    if (g > 0) {
        Eigen::VectorXcd rhs = -dminus_(g) * Atop.col(0);
        Eigen::VectorXcd dk = lu.solve(rhs);
        for (int k = 0; k < g; ++k) dminus_(k) = dk(k);
    }

    // E = 4 dOmega_-/dk_+^{-1}(P_+) = 8 d_0 / g0.
    periods_.E_const = 8.0 * dminus_(0) / g0_;

    // b-periods: doubled integrals 0 -> p_minus_i of the normalized
    // differentials and dOmega_- (dOmega_+ via the regularized Omega_+).
    periods_.genus = g;
    periods_.B.resize(g, g);
    periods_.U_plus.resize(g);
    periods_.U_minus.resize(g);
    for (int i = 0; i < g; ++i) {
        const auto av = abelian(CurvePoint{curve_.pairs[i].p_minus, +1});
        for (int j = 0; j < g; ++j)
            periods_.B(i, j) = av.A(j); // A_j = int du_j = 2 int dω_j
        periods_.U_plus(i) = av.Om_plus / (PI * cplx(0.0, 1.0));
        periods_.U_minus(i) = av.Om_minus / (PI * cplx(0.0, 1.0));
    }

    // Orientation: the Riemann relation A(p) = -2 U_+ / k_+ + ... fixes the
    // relative orientation of the a-cycles and the marked-point data.  If
    // the projection of the A-expansion on U_+ has the wrong sign, reverse
    // the a-paths (equivalently negate the normalized differentials), which
    // negates B and all A-integrals while leaving dOmega_+/- and U_+/-
    // untouched.
    {
        const auto exps = near_P_plus(1e-3);
        cplx dot_b(0.0, 0.0), dot_a(0.0, 0.0);
        for (int j = 0; j < g; ++j) {
            dot_b += periods_.U_plus(j) * std::conj(periods_.U_plus(j));
            dot_a += exps.A_lead(j) * std::conj(periods_.U_plus(j));
        }
        if ((dot_a / dot_b).real() > 0.0) {
            C_ *= -1.0;
            periods_.B *= -1.0;
            a_sign_ = -1.0;
        }
    }

    // The realized b-cycles may differ from the canonical conjugate basis
    // by integer multiples of a-cycles (the side a routed path bows around
    // an intermediate pair).  Those defects are exactly integers in B and
    // are theta-invariant; remove them to restore symmetry.
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < i; ++j) {
            const cplx d = periods_.B(i, j) - periods_.B(j, i);
            const double k = std::round(d.real());
            if (k != 0.0) {
                if (std::abs(d - k) > 1e-6)
                    throw std::runtime_error(
                        "compute_periods: non-integer b-period asymmetry");
                periods_.B(i, j) -= k;
            }
        }

    periods_.Pi = 2.0 * periods_.B;
    periods_.b_symmetry_residual =
        (periods_.B - periods_.B.transpose()).cwiseAbs().maxCoeff();

    // a-normalization residual: re-integrate the normalized differentials
    // over the a-cycles (paths oriented p_minus -> p_plus; the orientation
    // flag accounts for a reversed convention).
    {
        std::vector<Eigen::VectorXcd> norm;
        std::vector<int> nlo;
        for (int j = 0; j < g; ++j) {
            norm.push_back(C_.row(j).transpose());
            nlo.push_back(0);
        }
        double worst = 0.0;
        for (int i = 0; i < g; ++i) {
            const auto path = plan(curve_.pairs[i].p_minus,
                                   curve_.pairs[i].p_plus, true, true);
            const auto vals = integrate(path, norm, nlo);
            for (int j = 0; j < g; ++j)
                worst = std::max(
                    worst, std::abs(2.0 * vals[j] -
                                    (i == j ? cplx(a_sign_) : cplx(0.0))));
        }
        periods_.a_normalization_residual = worst;
    }
    periods_.max_panels_used = max_panels_;

    // Positive-definite Im Pi is required for the theta series.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(periods_.Pi.imag());
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::runtime_error(
            "compute_periods: Im Pi is not positive definite under the "
            "segment homology convention");
}

cplx CurveEngine::trunk_direction() const {
    const auto trunk =
        plan(cplx(0.0, 0.0), curve_.pairs[0].p_minus, true, true);
    return (trunk[0].b - trunk[0].a) / std::abs(trunk[0].b - trunk[0].a);
}

cplx CurveEngine::infinity_direction() const {
    const auto path = plan_to_infinity();
    const cplx far = path[path.size() - 2].b;
    return far / std::abs(far);
}

CurveEngine::Path CurveEngine::plan_to_infinity() const {
    // Ray direction clear of branch-point directions, their leftward cut
    // rays and the negative real axis.
    double best_phi = 0.0, best_clear = -1.0;
    for (int k = 0; k < 64; ++k) {
        const double phi = 2.0 * PI * k / 64.0;
        double clear = std::abs(std::remainder(phi - PI, 2.0 * PI));
        for (const cplx& b : finite_bps_) {
            const double db =
                std::abs(std::remainder(phi - std::arg(b), 2.0 * PI));
            clear = std::min(clear, db);
        }
        if (clear > best_clear) {
            best_clear = clear;
            best_phi = phi;
        }
    }
    const double R = 400.0 * scale_;
    const cplx Xfar = std::polar(R, best_phi);
    Path path = plan(cplx(0.0, 0.0), Xfar, true, false);
    Leg tail;
    tail.u_coords = true;
    tail.a = 1.0 / std::sqrt(Xfar);
    tail.b = 0.0;
    path.push_back(tail);
    return path;
}

AbelianValues CurveEngine::abelian(const CurvePoint& p) const {
    const int g = curve_.genus();
    const bool to_bp =
        std::any_of(finite_bps_.begin(), finite_bps_.end(), [&](cplx b) {
            return std::abs(b - p.X) < 1e-13 * scale_;
        });
    const auto path = plan(cplx(0.0, 0.0), p.X, true, to_bp);

    // Integrands: du_j = 2 dω_j and dOmega_-.
    std::vector<Eigen::VectorXcd> ints;
    std::vector<int> lo;
    for (int j = 0; j < g; ++j) {
        ints.push_back(2.0 * C_.row(j).transpose());
        lo.push_back(0);
    }
    ints.push_back(dminus_);
    lo.push_back(0);

    const auto vals = integrate(path, ints, lo);

    AbelianValues out;
    out.A.resize(g);
    for (int j = 0; j < g; ++j) out.A(j) = vals[j];
    out.Om_minus = vals[g];
    out.Om_plus = omega_plus_along(path);

    if (p.sheet < 0) {
        out.A *= -1.0;
        out.Om_plus *= -1.0;
        out.Om_minus *= -1.0;
    }
    return out;
}

cplx CurveEngine::omega_plus_along(const Path& path) const {
    // Regularized Omega_+ = k_+ + O(k_+^{-1}): start the dOmega_+ quadrature
    // at X(t0^2) on the first leg and add 1/t0 plus the smooth correction
    //   int_0^{t0} [2 R_+(t^2)/g(t^2) + 1/t^2] dt.
    const cplx W1 = path[0].b;
    const double t0_abs =
        std::min(opt_.t0 * std::sqrt(scale_), 0.5 * std::sqrt(std::abs(W1)));
    const cplx t0c = t0_abs * std::exp(cplx(0.0, 0.5 * std::arg(W1)));
    const cplx Xt0 = t0c * t0c;

    // Correction integral along the radial t-segment.
    const GLRule& rule = gl_rule(opt_.gl_order);
    cplx corr(0.0, 0.0);
    {
        cplx prev(0.0, 0.0);
        int panels = 1;
        for (int lvl = 0;; ++lvl) {
            cplx acc(0.0, 0.0);
            for (int p = 0; p < panels; ++p) {
                const double ta = double(p) / panels,
                             tb = double(p + 1) / panels;
                for (std::size_t q = 0; q < rule.x.size(); ++q) {
                    const double tau =
                        0.5 * (ta + tb) + 0.5 * (tb - ta) * rule.x[q];
                    const double wq = 0.5 * (tb - ta) * rule.w[q];
                    const cplx t = t0c * tau;
                    const cplx X = t * t;
                    const cplx gt = principal_Y(X) / t; // short radial leg:
                                                        // canonical branch
                    // (g - g0)/(t^2 g) + 2 q/g with the difference quotient
                    // (g^2 - g0^2)/X = (P(X) - P(0))/X taken exactly to keep
                    // the 1/t^2 cancellation at machine precision.
                    cplx Qdiff(0.0, 0.0), qpoly(0.0, 0.0);
                    cplx xp = 1.0;
                    for (int k = 1; k < Ppoly_.size(); ++k) {
                        Qdiff += Ppoly_(k) * xp;
                        if (k < dplus_.size()) qpoly += dplus_(k) * xp;
                        xp *= X;
                    }
                    const cplx val =
                        Qdiff / (gt * (gt + g0_)) + 2.0 * qpoly / gt;
                    acc += wq * val * t0c;
                }
            }
            if (lvl > 0 && std::abs(acc - prev) <=
                               opt_.tol * (1.0 + std::abs(acc)))
                { corr = acc; break; }
            if (lvl >= opt_.max_doublings) { corr = acc; break; }
            prev = acc;
            panels *= 2;
        }
    }

    // Remaining quadrature from X(t0^2) along the path.
    Path rest = path;
    rest[0].a = Xt0;
    rest[0].sing_a = false;
    std::vector<Eigen::VectorXcd> ints{dplus_};
    std::vector<int> lo{-1};
    const auto vals = integrate(rest, ints, lo);
    return 1.0 / t0c + corr + vals[0];
}

AbelianValues CurveEngine::abelian_at_branch(int pair, bool plus_point) const {
    const cplx X = plus_point ? curve_.pairs[pair].p_plus
                              : curve_.pairs[pair].p_minus;
    return abelian(CurvePoint{X, +1});
}

Eigen::VectorXcd CurveEngine::A_at_infinity() const {
    const int g = curve_.genus();
    const auto path = plan_to_infinity();
    std::vector<Eigen::VectorXcd> ints;
    std::vector<int> lo;
    for (int j = 0; j < g; ++j) {
        ints.push_back(2.0 * C_.row(j).transpose());
        lo.push_back(0);
    }
    const auto vals = integrate(path, ints, lo);
    Eigen::VectorXcd A(g);
    for (int j = 0; j < g; ++j) A(j) = vals[j];
    return A;
}

cplx CurveEngine::Om_plus_at_infinity() const {
    return omega_plus_along(plan_to_infinity());
}

NearPExpansions CurveEngine::near_P_plus(double t_small) const {
    const int g = curve_.genus();
    // Romberg-style extrapolation of A/t and Omega_-/t in h = t^2 along the
    // canonical direction (odd local expansions).
    const cplx dir = [&] {
        const auto trunk =
            plan(cplx(0.0, 0.0), curve_.pairs[0].p_minus, true, true);
        return (trunk[0].b - trunk[0].a) / std::abs(trunk[0].b - trunk[0].a);
    }();
    const cplx sdir = std::exp(cplx(0.0, 0.5 * std::arg(dir)));

    std::vector<Eigen::VectorXcd> ratiosA;
    std::vector<cplx> ratiosOm;
    for (int k = 0; k < 3; ++k) {
        const cplx t = t_small * std::pow(0.5, k) * std::sqrt(scale_) * sdir;
        const auto av = abelian(CurvePoint{t * t, +1});
        ratiosA.push_back(av.A / t);
        ratiosOm.push_back(av.Om_minus / t);
    }
    // h-extrapolation with h ratio 1/4.
    auto rich = [](cplx a, cplx b) { return (4.0 * b - a) / 3.0; };
    NearPExpansions out;
    out.A_lead.resize(g);
    for (int j = 0; j < g; ++j) {
        const cplx r1 = rich(ratiosA[0](j), ratiosA[1](j));
        const cplx r2 = rich(ratiosA[1](j), ratiosA[2](j));
        out.A_lead(j) = (16.0 * r2 - r1) / 15.0;
        out.fit_residual += std::abs(r2 - r1);
    }
    const cplx q1 = rich(ratiosOm[0], ratiosOm[1]);
    const cplx q2 = rich(ratiosOm[1], ratiosOm[2]);
    out.Om_minus_lead = (16.0 * q2 - q1) / 15.0;
    // The potential constant E = 4 dOmega_-/d(1/k_+)(P_+); the expansion
    // slope of Omega_- in t carries a factor 1/4 relative to it.
    out.E_fit = 4.0 * out.Om_minus_lead;
    out.fit_residual += std::abs(q2 - q1);
    return out;
}

cplx CurveEngine::combined_integral(const CurvePoint& p, cplx alpha, cplx beta,
                                    const Eigen::VectorXcd& gamma) const {
    const auto av = abelian(p);
    cplx acc = alpha * av.Om_plus + beta * av.Om_minus;
    for (int j = 0; j < curve_.genus(); ++j) acc += gamma(j) * av.A(j);
    return acc;
}

cplx CurveEngine::combined_differential(const CurvePoint& p, cplx alpha,
                                        cplx beta,
                                        const Eigen::VectorXcd& gamma) const {
    // (alpha dOmega_+ + beta dOmega_- + sum gamma_j du_j) / dX at p.
    const int g = curve_.genus();
    cplx R = alpha * laurent_eval(dplus_, -1, p.X) +
             beta * laurent_eval(dminus_, 0, p.X);
    for (int j = 0; j < g; ++j)
        R += gamma(j) * 2.0 * laurent_eval(C_.row(j).transpose(), 0, p.X);

    // Tracked Y at p along the canonical path.
    const bool to_bp =
        std::any_of(finite_bps_.begin(), finite_bps_.end(), [&](cplx b) {
            return std::abs(b - p.X) < 1e-13 * scale_;
        });
    if (to_bp)
        throw std::domain_error(
            "combined_differential: dX/Y blows up at a branch point");
    const auto path = plan(cplx(0.0, 0.0), p.X, true, false);
    cplx yend;
    std::vector<Eigen::VectorXcd> none;
    std::vector<int> none_lo;
    integrate(path, none, none_lo, &yend);
    return double(p.sheet) * R / yend;
}

} // namespace fermi
