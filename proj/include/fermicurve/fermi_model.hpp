// Combinatorial model of the Fermi curve at level E < 0: an admissible data
// set (central cut half-width p0 plus finitely many gap segments in the
// p-plane), the two-sheeted glued surface built from it, its involutions,
// and the M-curve structure report.  Validation only; no function theory is
// computed on the glued surface.

#pragma once

#include "fermicurve/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fermi {

struct GapRecord {
    int n = 0;
    int m = 0;
    cplx p1, p2;              // gap endpoints, Im p = n/(2 l1)
    std::optional<cplx> pole; // normalization-pole position, w-plane
    int sheet = 1;

    std::string to_json() const;
    static GapRecord parse_json(const std::string& text);
};

struct AdmissibleDataSet {
    double p0 = 1.0; // central branch half-width, sqrt(-E)/2
    std::vector<GapRecord> gaps;
    PeriodPair L;
    double E = 0.0;
    double localization_bound = 0.5; // |p - p(k_nm)| <= bound/(n^2+m^2)

    std::string to_json() const;
    static AdmissibleDataSet parse_json(const std::string& text);
};

struct ValidationIssue {
    std::string clause;
    std::string detail;
};

struct ValidationReport {
    bool valid = true;
    std::vector<ValidationIssue> issues;
    std::string to_json() const;
};

// Checks every admissibility clause: p0 > 0 (and = sqrt(-E)/2 when E is
// supplied), segments parallel to the real axis at height n/(2 l1),
// symmetry closure under (n,m) -> (-n,-m), pairwise disjointness, no
// contact with the central cut, and the finite-truncation localization
// surrogate.
ValidationReport validate(const AdmissibleDataSet& data, double tol = 1e-7);

struct SurfacePoint {
    cplx p;
    int sheet = 1; // 1 or 2
};

SurfacePoint involution_sigma(const SurfacePoint& pt);
SurfacePoint involution_tau(const SurfacePoint& pt);

// True iff pt lies on a cut boundary (central cut or a gap segment on its
// sheet), i.e. on a fixed oval of tau after the gluing.
bool on_oval(const AdmissibleDataSet& data, const SurfacePoint& pt,
             double tol = 1e-9);

struct MCurveReport {
    bool pass = true;
    int ovals = 0;          // fixed ovals of tau: one per gap + central
    int poles_total = 0;
    std::vector<std::string> failures;
    std::string to_json() const;
};

// Counts fixed ovals and verifies the pole placement: exactly one pole per
// gap oval, none on the central oval.
MCurveReport mcurve_report(const AdmissibleDataSet& data);

} // namespace fermi
