#include "fermicurve/nv.hpp"

#include <algorithm>
#include <cmath>

namespace fermi {

namespace {
constexpr double kThetaFloor = 1e-12;
}

NVBundle::NVBundle(HyperellipticCurveData curve, Eigen::VectorXcd Z,
                   PeriodPair L, QuadratureOptions qopt)
    : curve_(std::move(curve)), Z_(std::move(Z)), L_(L) {
    engine_ = std::make_shared<CurveEngine>(curve_, qopt);
    const auto& P = engine_->periods();
    if (Z_.size() != P.genus)
        throw std::invalid_argument("NVBundle: Z dimension must equal genus");
    theta_ = std::make_shared<Theta>(ThetaParams(P.Pi));
    if (std::abs((*theta_)(Z_)) < 1e-8)
        throw std::domain_error("NVBundle: theta(Z) ~ 0, Z is not generic");

    // (baz): 2 pi (U_+ + U_-) = nu^a + Pi nu^b with real vectors; the real
    // splitting solves Im Pi nu^b = Im v.
    Eigen::MatrixXd imPi = P.Pi.imag(), rePi = P.Pi.real();
    auto split = [&](const Eigen::VectorXcd& v, Eigen::VectorXd& a,
                     Eigen::VectorXd& bvec) {
        bvec = imPi.ldlt().solve(v.imag());
        a = v.real() - rePi * bvec;
    };
    split(2.0 * PI * (P.U_plus + P.U_minus), nu_a_, nu_b_);
    split(2.0 * PI * cplx(0.0, 1.0) * (P.U_plus - P.U_minus), mu_a_, mu_b_);
}

NVBundle::PointData NVBundle::prepare(const CurvePoint& p) const {
    const auto av = engine_->abelian(p);
    return {p, av.A, av.Om_plus, av.Om_minus};
}

NVBundle::PointData NVBundle::prepare_branch(int pair, bool plus_point) const {
    const cplx X = plus_point ? curve_.pairs[pair].p_plus
                              : curve_.pairs[pair].p_minus;
    return prepare(CurvePoint{X, +1});
}

namespace {

struct ThetaLogs {
    cplx value, Lp, Lm, M;
};

ThetaLogs theta_logs(const Theta& th, const Eigen::VectorXcd& w,
                     const Eigen::VectorXcd& Up, const Eigen::VectorXcd& Um) {
    const auto v = th.eval(w, Up, Um);
    if (std::abs(v.value) < kThetaFloor)
        throw NVBundle::SingularEvaluation("theta vanished at evaluation");
    ThetaLogs out;
    out.value = v.value;
    out.Lp = v.d_plus / v.value;
    out.Lm = v.d_minus / v.value;
    out.M = (v.d_mixed * v.value - v.d_plus * v.d_minus) /
            (v.value * v.value);
    return out;
}

} // namespace

cplx NVBundle::psi(const PointData& pd, double x, double y) const {
    return psi_reduced(pd, x, y, cplx(0.0, 0.0), cplx(0.0, 0.0));
}

cplx NVBundle::psi_reduced(const PointData& pd, double x, double y,
                           cplx k_plus_sub, cplx k_minus_sub) const {
    const cplx z(x, y), zb(x, -y);
    const auto& P = engine_->periods();
    const Eigen::VectorXcd W = z * P.U_plus + zb * P.U_minus + Z_;
    const cplx t_wa = (*theta_)(W + pd.A);
    const cplx t_w = (*theta_)(W);
    const cplx t_az = (*theta_)(pd.A + Z_);
    const cplx t_z = (*theta_)(Z_);
    if (std::abs(t_w) < kThetaFloor || std::abs(t_az) < kThetaFloor)
        throw SingularEvaluation("psi: theta denominator vanished");
    return t_wa * t_z / (t_w * t_az) *
           std::exp(z * (pd.Om_plus - k_plus_sub) +
                    zb * (pd.Om_minus - k_minus_sub));
}

NVBundle::PsiDerivs NVBundle::psi_derivs(const PointData& pd, double x,
                                         double y) const {
    const cplx z(x, y), zb(x, -y);
    const auto& P = engine_->periods();
    const Eigen::VectorXcd W = z * P.U_plus + zb * P.U_minus + Z_;
    const auto num = theta_logs(*theta_, W + pd.A, P.U_plus, P.U_minus);
    const auto den = theta_logs(*theta_, W, P.U_plus, P.U_minus);
    const cplx t_az = (*theta_)(pd.A + Z_);
    const cplx t_z = (*theta_)(Z_);
    if (std::abs(t_az) < kThetaFloor)
        throw SingularEvaluation("psi_derivs: theta(A+Z) vanished");

    PsiDerivs out;
    out.psi = num.value * t_z / (den.value * t_az) *
              std::exp(z * pd.Om_plus + zb * pd.Om_minus);
    const cplx lz = num.Lp - den.Lp + pd.Om_plus;    // d/dz log psi
    const cplx lzb = num.Lm - den.Lm + pd.Om_minus;  // d/dzbar log psi
    const cplx mixed = num.M - den.M;                // d2/(dz dzbar) log psi
    out.dz = out.psi * lz;
    out.dzbar = out.psi * lzb;
    out.dzz = out.psi * (mixed + lz * lzb);
    return out;
}

cplx NVBundle::potential(double x, double y) const {
    const cplx z(x, y), zb(x, -y);
    const auto& P = engine_->periods();
    const Eigen::VectorXcd W = z * P.U_plus + zb * P.U_minus + Z_;
    const auto den = theta_logs(*theta_, W, P.U_plus, P.U_minus);
    // u = -2 Lap ln theta + E = -8 d2/(dz dzbar) ln theta + E.
    return -8.0 * den.M + P.E_const;
}

double NVBundle::theta_denominator_abs(double x, double y) const {
    const cplx z(x, y), zb(x, -y);
    const auto& P = engine_->periods();
    const Eigen::VectorXcd W = z * P.U_plus + zb * P.U_minus + Z_;
    return std::abs((*theta_)(W));
}

cplx NVBundle::pde_residual_at(const PointData& pd, double x, double y) const {
    const auto d = psi_derivs(pd, x, y);
    const cplx u = potential(x, y);
    return -4.0 * d.dzz + u * d.psi;
}

std::pair<cplx, cplx> NVBundle::multiplier_functions(
    const PointData& pd) const {
    const int g = engine_->periods().genus;
    cplx I1 = pd.Om_plus + pd.Om_minus;
    cplx I2 = cplx(0.0, 1.0) * (pd.Om_plus - pd.Om_minus);
    for (int j = 0; j < g; ++j) {
        I1 -= cplx(0.0, 1.0) * nu_b_(j) * pd.A(j);
        I2 -= cplx(0.0, 1.0) * mu_b_(j) * pd.A(j);
    }
    return {std::exp(2.0 * PI * L_.l1 * I1), std::exp(2.0 * PI * L_.l2 * I2)};
}

std::pair<cplx, cplx> NVBundle::quasimomentum_differentials(
    const CurvePoint& p) const {
    const int g = engine_->periods().genus;
    Eigen::VectorXcd g1(g), g2(g);
    for (int j = 0; j < g; ++j) {
        g1(j) = -cplx(0.0, 1.0) * nu_b_(j);
        g2(j) = -cplx(0.0, 1.0) * mu_b_(j);
    }
    const cplx dp1 = engine_->combined_differential(p, 1.0, 1.0, g1);
    const cplx dp2 = engine_->combined_differential(p, cplx(0.0, 1.0),
                                                    cplx(0.0, -1.0), g2);
    return {dp1, dp2};
}

ResidualStats pde_residual(const NVBundle& b, const NVBundle::PointData& pd,
                           const GridSpec& grid) {
    ResidualStats st;
    double sum = 0.0;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            try {
                const auto d = b.psi_derivs(pd, grid.x(i), grid.y(j));
                const cplx u = b.potential(grid.x(i), grid.y(j));
                const double r = std::abs(-4.0 * d.dzz + u * d.psi) /
                                 (1.0 + std::abs(d.psi));
                st.max_abs = std::max(st.max_abs, r);
                sum += r;
                ++st.n_points;
            } catch (const NVBundle::SingularEvaluation&) {
                ++st.n_singular;
            }
        }
    st.mean_abs = st.n_points ? sum / st.n_points : 0.0;
    return st;
}

PotentialGrid evaluate_potential(const NVBundle& b, const GridSpec& grid) {
    PotentialGrid out;
    out.grid = grid;
    out.u.resize(std::size_t(grid.nx) * grid.ny, cplx(0.0, 0.0));
    out.singular.assign(std::size_t(grid.nx) * grid.ny, false);
    out.min_theta_abs = 1e300;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const std::size_t id = std::size_t(j) * grid.nx + i;
            const double th = b.theta_denominator_abs(grid.x(i), grid.y(j));
            out.min_theta_abs = std::min(out.min_theta_abs, th);
            try {
                const cplx u = b.potential(grid.x(i), grid.y(j));
                out.u[id] = u;
                out.max_imag = std::max(out.max_imag, std::abs(u.imag()));
            } catch (const NVBundle::SingularEvaluation&) {
                out.singular[id] = true;
            }
        }
    return out;
}

MarkedPointFits marked_point_fits(const NVBundle& b, double x, double y,
                                  double t0) {
    const auto& eng = b.engine();
    const cplx z(x, y), zb(x, -y);
    MarkedPointFits out{};
    out.fit_residual = 0.0;

    // xi_1^+ at P_+: odd part of psi e^{-k_+ z} in the local parameter.
    {
        const cplx sdir = std::exp(
            cplx(0.0, 0.5 * std::arg(eng.trunk_direction())));
        auto F = [&](double t, int sheet) {
            const cplx tc = t * sdir;
            const auto pd = b.prepare(CurvePoint{tc * tc, sheet});
            // k_+ = 1/t on the canonical branch, negated on the sigma sheet.
            const cplx k = double(sheet) / tc;
            return b.psi_reduced(pd, x, y, k, cplx(0.0, 0.0));
        };
        auto odd = [&](double t) {
            return 0.5 * (F(t, +1) - F(t, -1)) / (t * sdir);
        };
        const cplx v1 = odd(t0), v2 = odd(0.5 * t0);
        out.xi1_plus = (4.0 * v2 - v1) / 3.0; // error O(t^2), ratio 1/4
        out.fit_residual += std::abs(v2 - v1);
    }

    // xi_0^- at P_-: even part of psi e^{-k_- zbar} along the infinity ray.
    {
        const cplx idir = eng.infinity_direction();
        const cplx usdir = std::exp(cplx(0.0, -0.5 * std::arg(idir)));
        auto F = [&](double uu, int sheet) {
            const cplx uc = uu * usdir;
            const auto pd = b.prepare(CurvePoint{1.0 / (uc * uc), sheet});
            // k_- = 1/u on the branch matching Omega_- ~ k_-.
            cplx k = double(sheet) / uc;
            if (std::abs(pd.Om_minus - k) > std::abs(pd.Om_minus + k))
                k = -k;
            return b.psi_reduced(pd, x, y, cplx(0.0, 0.0), k);
        };
        const double u0 = t0;
        auto even = [&](double uu) {
            return 0.5 * (F(uu, +1) + F(uu, -1));
        };
        const cplx v1 = even(u0), v2 = even(0.5 * u0);
        out.xi0_minus = (4.0 * v2 - v1) / 3.0;
        out.fit_residual += std::abs(v2 - v1);
    }
    return out;
}

cplx potential_from_psi_expansion(const NVBundle& b, double x, double y,
                                  double h) {
    auto xi1 = [&](double xx, double yy) {
        return marked_point_fits(b, xx, yy).xi1_plus;
    };
    const cplx dx = (xi1(x + h, y) - xi1(x - h, y)) / (2.0 * h);
    const cplx dy = (xi1(x, y + h) - xi1(x, y - h)) / (2.0 * h);
    // 4 d/dzbar xi_1^+ with d/dzbar = (d/dx + i d/dy)/2.
    return 2.0 * (dx + cplx(0.0, 1.0) * dy);
}

cplx hyperelliptic_psi_j(const NVBundle& b, double x, double y, int j,
                         bool plus_point) {
    const auto& P = b.engine().periods();
    if (j < 0 || j >= P.genus)
        throw std::out_of_range("hyperelliptic_psi_j: pair index");
    const cplx z(x, y), zb(x, -y);
    const Eigen::VectorXcd W = z * P.U_plus + zb * P.U_minus + b.Z();
    const Eigen::VectorXcd Bcol = P.B.row(j).transpose();
    const auto& th = b.theta();
    const cplx t_bw = th(W + Bcol);
    const cplx t_w = th(W);
    const cplx t_bz = th(Bcol + b.Z());
    const cplx t_z = th(b.Z());
    if (std::abs(t_w) < kThetaFloor || std::abs(t_bz) < kThetaFloor)
        throw NVBundle::SingularEvaluation(
            "hyperelliptic_psi_j: theta denominator vanished");
    const auto pd = b.prepare_branch(j, plus_point);
    return t_bw * t_z / (t_w * t_bz) *
           std::exp(z * pd.Om_plus + zb * pd.Om_minus);
}

TuneResult tune_periods(const HyperellipticCurveData& curve0,
                        const Eigen::VectorXi& Na, const Eigen::VectorXi& Nb,
                        const Eigen::VectorXi& Ma, const Eigen::VectorXi& Mb,
                        const PeriodPair& L, int max_iter, double tol) {
    const int g = curve0.genus();
    // m-type pairs parameterized log-symmetrically: p_{+/-}^i = exp(+/-t_i),
    // which preserves the tau-compatibility p_+ p_- = 1.
    Eigen::VectorXd t(g);
    for (int i = 0; i < g; ++i) {
        const double ratio =
            std::abs(curve0.pairs[i].p_plus / curve0.pairs[i].p_minus);
        t(i) = 0.5 * std::log(ratio);
    }

    auto curve_at = [&](const Eigen::VectorXd& tv) {
        HyperellipticCurveData c = curve0;
        for (int i = 0; i < g; ++i) {
            c.pairs[i].p_plus = std::exp(tv(i));
            c.pairs[i].p_minus = std::exp(-tv(i));
        }
        return c;
    };

    auto residual = [&](const Eigen::VectorXd& tv) {
        CurveEngine eng(curve_at(tv));
        const auto& P = eng.periods();
        Eigen::VectorXcd r1 =
            2.0 * PI * L.l1 * (P.U_plus + P.U_minus) - Na.cast<double>().cast<cplx>();
        Eigen::VectorXcd r2 = 2.0 * PI * cplx(0.0, 1.0) * L.l2 *
                                  (P.U_plus - P.U_minus) -
                              Ma.cast<double>().cast<cplx>();
        r1 -= P.Pi * Nb.cast<double>().cast<cplx>();
        r2 -= P.Pi * Mb.cast<double>().cast<cplx>();
        Eigen::VectorXd r(4 * g);
        for (int i = 0; i < g; ++i) {
            r(4 * i + 0) = r1(i).real();
            r(4 * i + 1) = r1(i).imag();
            r(4 * i + 2) = r2(i).real();
            r(4 * i + 3) = r2(i).imag();
        }
        return r;
    };

    TuneResult out;
    out.Na = Na;
    out.Nb = Nb;
    out.Ma = Ma;
    out.Mb = Mb;
    out.L = L;
    Eigen::VectorXd r = residual(t);
    out.residual = r.norm();
    for (out.iterations = 0; out.iterations < max_iter; ++out.iterations) {
        if (r.norm() < tol) {
            out.converged = true;
            break;
        }
        // Finite-difference Gauss-Newton with step damping.
        Eigen::MatrixXd J(r.size(), g);
        const double h = 1e-6;
        for (int i = 0; i < g; ++i) {
            Eigen::VectorXd tp = t;
            tp(i) += h;
            J.col(i) = (residual(tp) - r) / h;
        }
        Eigen::VectorXd step =
            (J.transpose() * J + 1e-14 * Eigen::MatrixXd::Identity(g, g))
                .ldlt()
                .solve(-J.transpose() * r);
        double damp = 1.0;
        for (int k = 0; k < 8; ++k) {
            Eigen::VectorXd tn = t + damp * step;
            Eigen::VectorXd rn = residual(tn);
            if (rn.norm() < r.norm()) {
                t = tn;
                r = rn;
                break;
            }
            damp *= 0.5;
        }
        out.residual = r.norm();
        if (damp < 1e-2 / 256.0) break;
    }
    out.curve = curve_at(t);
    out.residual = r.norm();
    if (r.norm() < tol) out.converged = true;
    return out;
}

TuneResult tune_periods_closed_form(const HyperellipticCurveData& curve,
                                    int Nb_seed) {
    CurveEngine eng(curve);
    const auto& P = eng.periods();
    const int g = P.genus;
    TuneResult out;
    out.curve = curve;
    out.Na = Eigen::VectorXi::Zero(g);
    out.Nb = Eigen::VectorXi::Constant(g, Nb_seed);
    out.Ma = Eigen::VectorXi::Zero(g);
    out.Mb = Eigen::VectorXi::Zero(g);

    // Solve 2 pi l1 (U_+ + U_-) = Pi Nb for l1 using the first component;
    // for tau-compatible data the left side is proportional to Pi Nb.
    const Eigen::VectorXcd v1 = 2.0 * PI * (P.U_plus + P.U_minus);
    const Eigen::VectorXcd target = P.Pi * out.Nb.cast<double>().cast<cplx>();
    double l1 = (target(0) / v1(0)).real();
    if (l1 < 0.0) {
        out.Nb = -out.Nb;
        l1 = -l1;
    }
    out.L = PeriodPair(l1, 1.0);

    // Residual across all components (M-side vanishes identically when
    // U_- = U_+, which tau-compatibility provides for m-type data).
    Eigen::VectorXcd r1 = double(l1) * v1 -
                          P.Pi * out.Nb.cast<double>().cast<cplx>() -
                          out.Na.cast<double>().cast<cplx>();
    Eigen::VectorXcd r2 = 2.0 * PI * cplx(0.0, 1.0) * out.L.l2 *
                          (P.U_plus - P.U_minus);
    out.residual = std::sqrt(r1.squaredNorm() + r2.squaredNorm());
    out.converged = out.residual < 1e-8;
    return out;
}

RealityReport reality_check(const NVBundle& b, const GridSpec& grid,
                            const std::vector<double>& residues_c) {
    RealityReport rep;
    const auto& curve = b.engine().curve();
    const auto& P = b.engine().periods();

    if (curve.reality == RealityType::none) {
        rep.theorem = "none";
        rep.failures.push_back("reality_type is none");
        return rep;
    }

    if (curve.reality == RealityType::m_type) {
        rep.theorem = "m-type (real branch pairs on fixed ovals)";
        for (const auto& pr : curve.pairs) {
            if (pr.p_plus.imag() != 0.0 || pr.p_minus.imag() != 0.0)
                rep.failures.push_back("branch points not real");
            if (std::abs(pr.p_plus * pr.p_minus - 1.0) > 1e-10)
                rep.failures.push_back(
                    "pair product != 1: marked-point swap is not "
                    "tau-compatible in the fixed local coordinates");
        }
        for (int j = 0; j < b.Z().size(); ++j) {
            const cplx zj = b.Z()(j);
            if (std::abs(zj.imag()) > 1e-12 ||
                std::abs(zj.real() - std::round(2.0 * zj.real()) / 2.0) >
                    1e-12)
                rep.failures.push_back(
                    "Z is not a real half-integer vector; denominator theta "
                    "will not be real-valued");
        }
    } else {
        rep.theorem = "conjugate-type (separating involution)";
        for (const auto& pr : curve.pairs) {
            if (std::abs(pr.p_minus - std::conj(pr.p_plus)) >
                1e-12 * (1.0 + std::abs(pr.p_plus)))
                rep.failures.push_back("pairs are not conjugate");
            if (std::abs(std::abs(pr.p_plus) - 1.0) > 1e-10)
                rep.failures.push_back(
                    "pair not on the unit circle: marked-point swap is not "
                    "tau-compatible in the fixed local coordinates");
        }
        if (residues_c.empty()) {
            rep.failures.push_back(
                "residue data c_i not supplied (hypothesis assumed)");
        } else {
            for (double c : residues_c)
                if (!(c < 0.0))
                    rep.failures.push_back("residue sign c_i >= 0");
        }
    }

    // Observable consequences on the grid: real potential, real-valued and
    // nonvanishing denominator theta.
    const auto pg = evaluate_potential(b, grid);
    rep.max_im_u = pg.max_imag;
    rep.min_theta_abs = pg.min_theta_abs;
    const auto& PU = P.U_plus;
    const auto& PV = P.U_minus;
    for (int j = 0; j < grid.ny; j += std::max(1, grid.ny / 8))
        for (int i = 0; i < grid.nx; i += std::max(1, grid.nx / 8)) {
            const cplx z(grid.x(i), grid.y(j)), zb(grid.x(i), -grid.y(j));
            const Eigen::VectorXcd W = z * PU + zb * PV + b.Z();
            const cplx tv = b.theta()(W);
            rep.max_theta_imag = std::max(
                rep.max_theta_imag, std::abs(tv.imag()) / (1.0 + std::abs(tv)));
        }
    if (curve.reality == RealityType::m_type && rep.max_im_u > 1e-8)
        rep.failures.push_back("Im u exceeds 1e-8 on the grid");
    if (pg.min_theta_abs <= 0.0)
        rep.failures.push_back("theta denominator vanished on the grid");

    rep.certified = rep.failures.empty();
    return rep;
}

TwoRouteDiff differential_two_route(const NVBundle& b, const CurvePoint& p,
                                    int n_avg) {
    const auto pd = b.prepare(p);
    const auto pds = b.prepare(CurvePoint{p.X, -p.sheet});
    const auto [dp1, dp2] = b.quasimomentum_differentials(p);
    const PeriodPair& L = b.periods();

    // <psi_y psi^sigma - psi psi^sigma_y>_x at fixed y (trapezoid).
    auto wronsk_x = [&](double y) {
        cplx acc(0.0, 0.0);
        for (int k = 0; k < n_avg; ++k) {
            const double x = L.x_period() * k / n_avg;
            const auto d = b.psi_derivs(pd, x, y);
            const auto ds = b.psi_derivs(pds, x, y);
            const cplx py = cplx(0.0, 1.0) * (d.dz - d.dzbar);
            const cplx psy = cplx(0.0, 1.0) * (ds.dz - ds.dzbar);
            acc += py * ds.psi - d.psi * psy;
        }
        return acc / double(n_avg);
    };
    auto wronsk_y = [&](double x) {
        cplx acc(0.0, 0.0);
        for (int k = 0; k < n_avg; ++k) {
            const double y = L.y_period() * k / n_avg;
            const auto d = b.psi_derivs(pd, x, y);
            const auto ds = b.psi_derivs(pds, x, y);
            const cplx px = d.dz + d.dzbar;
            const cplx psx = ds.dz + ds.dzbar;
            acc += px * ds.psi - d.psi * psx;
        }
        return acc / double(n_avg);
    };

    TwoRouteDiff out;
    out.route1 = 2.0 * cplx(0.0, 1.0) * dp1 / wronsk_x(0.37);
    out.route2 = -2.0 * cplx(0.0, 1.0) * dp2 / wronsk_y(0.61);
    out.rel_mismatch = std::abs(out.route1 - out.route2) /
                       (1.0 + std::abs(out.route1));
    return out;
}

std::pair<cplx, cplx> differential_residues(const NVBundle& b, int n_avg) {
    const auto& eng = b.engine();

    // Residue at P_+ in the odd parameter t: res = lim t^2 * (dOmega/dX) *
    // dX/dt / t = lim 2 t^2 (dOmega/dX) * sdir^2.
    const cplx sdir2 = eng.trunk_direction();
    auto res_plus = [&](double t) {
        const cplx X = t * t * sdir2;
        const auto d = differential_two_route(b, CurvePoint{X, +1}, n_avg);
        return d.route1 * 2.0 * t * t * sdir2;
    };
    const cplx rp1 = res_plus(1e-2), rp2 = res_plus(5e-3);
    const cplx resP = (4.0 * rp2 - rp1) / 3.0;

    const cplx idir = eng.infinity_direction();
    auto res_minus = [&](double uu) {
        const cplx X = idir / (uu * uu);
        const auto d = differential_two_route(b, CurvePoint{X, +1}, n_avg);
        // k_- ~ 1/u: res = lim (dOmega/dX) dX/du * u = -2 (dOmega/dX) X / u
        return d.route1 * (-2.0) * X / uu * uu; // = -2 (dOmega/dX) X
    };
    const cplx rm1 = res_minus(1e-2), rm2 = res_minus(5e-3);
    const cplx resM = (4.0 * rm2 - rm1) / 3.0;
    return {resP, resM};
}

} // namespace fermi
