#include "fermicurve/potential.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace fermi {

using nlohmann::json;

FourierPotential FourierPotential::from_trig(const Trig2& t) {
    if (std::abs(t.coeff(0, 0)) != 0.0)
        throw std::invalid_argument(
            "FourierPotential: torus average must be zero (nonzero (0,0) mode)");
    FourierPotential p;
    p.data_ = t;
    return p;
}

void FourierPotential::set_mode(int n, int m, cplx v) {
    if (n == 0 && m == 0 && v != cplx(0.0, 0.0))
        throw std::invalid_argument("FourierPotential: (0,0) mode must stay zero");
    data_.set(n, m, v);
}

bool FourierPotential::is_real(double tol) const {
    for (const auto& [k, v] : data_.coeffs()) {
        const cplx partner = data_.coeff(-k.first, -k.second);
        if (std::abs(partner - std::conj(v)) > tol) return false;
    }
    return true;
}

int FourierPotential::support_radius() const {
    return std::max(data_.max_abs_n(), data_.max_abs_j());
}

FourierPotential FourierPotential::two_cosine(double eps, PeriodPair L) {
    FourierPotential p{L};
    p.set_mode(1, 0, eps);
    p.set_mode(-1, 0, eps);
    p.set_mode(0, 1, eps);
    p.set_mode(0, -1, eps);
    return p;
}

std::string FourierPotential::to_json() const {
    json j;
    j["l1"] = periods().l1;
    j["l2"] = periods().l2;
    j["modes"] = json::array();
    for (const auto& [k, v] : data_.coeffs()) {
        j["modes"].push_back({{"n", k.first},
                              {"m", k.second},
                              {"re", v.real()},
                              {"im", v.imag()}});
    }
    return j.dump(2);
}

FourierPotential FourierPotential::parse_json(const std::string& text) {
    const json j = json::parse(text);
    PeriodPair L(j.at("l1").get<double>(), j.at("l2").get<double>());
    FourierPotential p{L};
    for (const auto& mode : j.at("modes")) {
        const int n = mode.at("n").get<int>();
        const int m = mode.at("m").get<int>();
        const cplx v(mode.at("re").get<double>(),
                     mode.value("im", 0.0));
        if (n == 0 && m == 0 && v != cplx(0.0, 0.0))
            throw std::invalid_argument(
                "FourierPotential: JSON has a nonzero (0,0) mode");
        if (v != cplx(0.0, 0.0)) p.set_mode(n, m, v);
    }
    return p;
}

} // namespace fermi
