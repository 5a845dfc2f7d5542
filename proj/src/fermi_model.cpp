#include "fermicurve/fermi_model.hpp"

#include "fermicurve/lattice.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace fermi {

using nlohmann::json;

static json cplx_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }
static cplx cplx_from(const json& j) {
    return {j.at("re").get<double>(), j.value("im", 0.0)};
}

std::string GapRecord::to_json() const {
    json j{{"n", n}, {"m", m}, {"p1", cplx_json(p1)}, {"p2", cplx_json(p2)},
           {"sheet", sheet}};
    if (pole) j["pole"] = cplx_json(*pole);
    return j.dump(2);
}

GapRecord GapRecord::parse_json(const std::string& text) {
    const json j = json::parse(text);
    GapRecord g;
    g.n = j.at("n").get<int>();
    g.m = j.at("m").get<int>();
    g.p1 = cplx_from(j.at("p1"));
    g.p2 = cplx_from(j.at("p2"));
    g.sheet = j.value("sheet", 1);
    if (j.contains("pole")) g.pole = cplx_from(j.at("pole"));
    return g;
}

std::string AdmissibleDataSet::to_json() const {
    json j;
    j["p0"] = p0;
    j["l1"] = L.l1;
    j["l2"] = L.l2;
    j["E"] = E;
    j["localization_bound"] = localization_bound;
    j["gaps"] = json::array();
    for (const auto& g : gaps) j["gaps"].push_back(json::parse(g.to_json()));
    return j.dump(2);
}

AdmissibleDataSet AdmissibleDataSet::parse_json(const std::string& text) {
    const json j = json::parse(text);
    AdmissibleDataSet d;
    d.p0 = j.at("p0").get<double>();
    d.L = PeriodPair(j.at("l1").get<double>(), j.at("l2").get<double>());
    d.E = j.value("E", 0.0);
    d.localization_bound = j.value("localization_bound", 0.5);
    for (const auto& g : j.value("gaps", json::array()))
        d.gaps.push_back(GapRecord::parse_json(g.dump()));
    return d;
}

std::string ValidationReport::to_json() const {
    json j;
    j["valid"] = valid;
    j["issues"] = json::array();
    for (const auto& i : issues)
        j["issues"].push_back({{"clause", i.clause}, {"detail", i.detail}});
    return j.dump(2);
}

namespace {

std::string gap_name(const GapRecord& g) {
    return "(" + std::to_string(g.n) + "," + std::to_string(g.m) + ")";
}

// Closed real intervals [a1,a2], [b1,b2] at the same height intersect?
bool intervals_overlap(double a1, double a2, double b1, double b2) {
    if (a1 > a2) std::swap(a1, a2);
    if (b1 > b2) std::swap(b1, b2);
    return std::max(a1, b1) <= std::min(a2, b2);
}

} // namespace

ValidationReport validate(const AdmissibleDataSet& data, double tol) {
    ValidationReport rep;
    auto fail = [&](std::string clause, std::string detail) {
        rep.valid = false;
        rep.issues.push_back({std::move(clause), std::move(detail)});
    };

    if (!(data.p0 > 0.0)) fail("p0-positive", "p0 must be > 0");
    if (data.E != 0.0) {
        const double expect = 0.5 * std::sqrt(-data.E);
        if (!(data.E < 0.0))
            fail("p0-energy", "E must be negative when supplied");
        else if (std::abs(data.p0 - expect) > tol * (1.0 + expect))
            fail("p0-energy", "p0 != sqrt(-E)/2");
    }

    for (const auto& g : data.gaps) {
        if (g.n == 0 && g.m == 0) fail("index", "gap (0,0) is not allowed");
        if (std::abs(g.p1.imag() - g.p2.imag()) > tol)
            fail("segment-horizontal",
                 "gap " + gap_name(g) + ": endpoints at different heights");
        const double height = g.n / (2.0 * data.L.l1);
        if (std::abs(g.p1.imag() - height) > tol)
            fail("segment-height",
                 "gap " + gap_name(g) + ": Im p != n/(2 l1)");
    }

    // Symmetry closure: the (-n,-m) partner exists with p1 = -partner.p2.
    for (const auto& g : data.gaps) {
        bool found = false;
        for (const auto& h : data.gaps) {
            if (h.n != -g.n || h.m != -g.m) continue;
            if (std::abs(g.p1 + h.p2) <= tol * (1.0 + std::abs(g.p1)) &&
                std::abs(g.p2 + h.p1) <= tol * (1.0 + std::abs(g.p2))) {
                found = true;
                break;
            }
        }
        if (!found)
            fail("symmetry-closure",
                 "gap " + gap_name(g) + ": no matching (-n,-m) partner");
    }

    // Segments must not intersect each other or the central cut [-p0, p0].
    for (std::size_t i = 0; i < data.gaps.size(); ++i) {
        const auto& a = data.gaps[i];
        if (std::abs(a.p1.imag()) <= tol &&
            intervals_overlap(a.p1.real(), a.p2.real(), -data.p0, data.p0))
            fail("central-cut", "gap " + gap_name(a) + " touches [-p0, p0]");
        for (std::size_t j = i + 1; j < data.gaps.size(); ++j) {
            const auto& b = data.gaps[j];
            if (std::abs(a.p1.imag() - b.p1.imag()) > tol) continue;
            if (intervals_overlap(a.p1.real(), a.p2.real(), b.p1.real(),
                                  b.p2.real()))
                fail("disjoint",
                     "gaps " + gap_name(a) + " and " + gap_name(b) +
                         " intersect");
        }
    }

    // Localization surrogate: endpoints near the free resonance image.
    if (data.E < 0.0) {
        for (const auto& g : data.gaps) {
            if (g.n == 0 && g.m == 0) continue;
            double best = 1e300;
            for (int sg : {+1, -1}) {
                const auto rp =
                    resonance_point(ResonanceIndex(g.n, g.m, sg), data.E, data.L);
                const cplx pk = exponent_p(rp.k, data.E);
                best = std::min(best, std::max(std::abs(g.p1 - pk),
                                               std::abs(g.p2 - pk)));
            }
            const double bound =
                data.localization_bound / double(g.n * g.n + g.m * g.m);
            if (best > bound)
                fail("localization",
                     "gap " + gap_name(g) + ": distance to p(k_nm) exceeds " +
                         std::to_string(bound));
        }
    }

    return rep;
}

SurfacePoint involution_sigma(const SurfacePoint& pt) {
    return {-pt.p, pt.sheet};
}

SurfacePoint involution_tau(const SurfacePoint& pt) {
    return {std::conj(pt.p), 3 - pt.sheet};
}

bool on_oval(const AdmissibleDataSet& data, const SurfacePoint& pt,
             double tol) {
    const cplx p = pt.p;
    if (std::abs(p.imag()) <= tol && std::abs(p.real()) <= data.p0 + tol)
        return true;
    for (const auto& g : data.gaps) {
        // Gap cuts live on sheet 1 at [p1,p2] and on sheet 2 at the
        // conjugate segment; both edges are identified by the gluing.
        const cplx a = pt.sheet == 1 ? g.p1 : std::conj(g.p1);
        const cplx b = pt.sheet == 1 ? g.p2 : std::conj(g.p2);
        if (std::abs(p.imag() - a.imag()) > tol) continue;
        const double lo = std::min(a.real(), b.real()) - tol;
        const double hi = std::max(a.real(), b.real()) + tol;
        if (p.real() >= lo && p.real() <= hi) return true;
    }
    return false;
}

std::string MCurveReport::to_json() const {
    json j;
    j["pass"] = pass;
    j["ovals"] = ovals;
    j["poles_total"] = poles_total;
    j["failures"] = failures;
    return j.dump(2);
}

MCurveReport mcurve_report(const AdmissibleDataSet& data) {
    MCurveReport rep;
    rep.ovals = int(data.gaps.size()) + 1; // a_s per gap plus the central a_0
    for (const auto& g : data.gaps) {
        const int count = g.pole ? 1 : 0;
        rep.poles_total += count;
        if (count != 1) {
            rep.pass = false;
            rep.failures.push_back("gap " + gap_name(g) + " carries " +
                                   std::to_string(count) +
                                   " poles (expected 1)");
        }
    }
    return rep;
}

} // namespace fermi
