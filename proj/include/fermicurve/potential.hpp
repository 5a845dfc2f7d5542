// Finite Fourier perturbation v(x,y) with zero torus average, plus its
// JSON form {"l1":..,"l2":..,"modes":[{"n":..,"m":..,"re":..,"im":..}]}.

#pragma once

#include "fermicurve/trig.hpp"

#include <string>

namespace fermi {

class FourierPotential {
public:
    FourierPotential() = default;
    explicit FourierPotential(PeriodPair L) : data_(L) {}

    // Throws if a nonzero (0,0) mode is present.
    static FourierPotential from_trig(const Trig2& t);

    void set_mode(int n, int m, cplx v);

    const Trig2& series() const { return data_; }
    const PeriodPair& periods() const { return data_.periods(); }

    // coeff(-n,-m) == conj(coeff(n,m)) for every mode.
    bool is_real(double tol = 0.0) const;

    int support_radius() const; // max over modes of max(|n|,|m|)

    // v = 2*eps*(cos x + cos y) style test potentials.
    static FourierPotential two_cosine(double eps, PeriodPair L);

    std::string to_json() const;
    static FourierPotential parse_json(const std::string& text);

private:
    Trig2 data_;
};

} // namespace fermi
