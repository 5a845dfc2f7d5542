#include "fermicurve/trig.hpp"

#include <cmath>
#include <cstdlib>

namespace fermi {

void Trig2::set(int n, int j, cplx v) {
    if (v == cplx(0.0, 0.0))
        c_.erase({n, j});
    else
        c_[{n, j}] = v;
}

void Trig2::add(int n, int j, cplx v) {
    auto [it, inserted] = c_.try_emplace({n, j}, v);
    if (!inserted) {
        it->second += v;
        if (it->second == cplx(0.0, 0.0)) c_.erase(it);
    }
}

Trig2& Trig2::operator+=(const Trig2& o) {
    for (const auto& [k, v] : o.c_) add(k.first, k.second, v);
    return *this;
}

Trig2& Trig2::operator-=(const Trig2& o) {
    for (const auto& [k, v] : o.c_) add(k.first, k.second, -v);
    return *this;
}

Trig2& Trig2::operator*=(cplx a) {
    if (a == cplx(0.0, 0.0)) {
        c_.clear();
        return *this;
    }
    for (auto& [k, v] : c_) v *= a;
    return *this;
}

Trig2 Trig2::mul(const Trig2& o) const {
    Trig2 out(L_);
    for (const auto& [ka, va] : c_)
        for (const auto& [kb, vb] : o.c_)
            out.add(ka.first + kb.first, ka.second + kb.second, va * vb);
    return out;
}

Trig2 Trig2::dx() const {
    Trig2 out(L_);
    for (const auto& [k, v] : c_)
        out.add(k.first, k.second, v * cplx(0.0, k.first / L_.l1));
    return out;
}

Trig2 Trig2::dy() const {
    Trig2 out(L_);
    for (const auto& [k, v] : c_)
        out.add(k.first, k.second, v * cplx(0.0, k.second / L_.l2));
    return out;
}

Trig2 Trig2::conj_function() const {
    Trig2 out(L_);
    for (const auto& [k, v] : c_)
        out.add(-k.first, -k.second, std::conj(v));
    return out;
}

Trig2 Trig2::x_average() const {
    Trig2 out(L_);
    for (const auto& [k, v] : c_)
        if (k.first == 0) out.add(0, k.second, v);
    return out;
}

cplx Trig2::evaluate(double x, double y) const {
    cplx s(0.0, 0.0);
    for (const auto& [k, v] : c_) {
        const double phase = k.first * x / L_.l1 + k.second * y / L_.l2;
        s += v * std::exp(cplx(0.0, phase));
    }
    return s;
}

double Trig2::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [k, v] : c_) m = std::max(m, std::abs(v));
    return m;
}

void Trig2::prune(double eps) {
    for (auto it = c_.begin(); it != c_.end();) {
        if (std::abs(it->second) <= eps)
            it = c_.erase(it);
        else
            ++it;
    }
}

int Trig2::max_abs_n() const {
    int m = 0;
    for (const auto& [k, v] : c_) m = std::max(m, std::abs(k.first));
    return m;
}

int Trig2::max_abs_j() const {
    int m = 0;
    for (const auto& [k, v] : c_) m = std::max(m, std::abs(k.second));
    return m;
}

} // namespace fermi
