// Finite Fourier series on the torus with periods (2*pi*l1, 2*pi*l2).
// Mode (n,j) stands for exp(i(n x / l1 + j y / l2)).  All operations are
// exact on the coefficients (no quadrature), which keeps the Bloch series
// recursion free of discretization error.

#pragma once

#include "fermicurve/types.hpp"

#include <map>
#include <utility>
#include <vector>

namespace fermi {

class Trig2 {
public:
    using Key = std::pair<int, int>; // (n, j)
    using Map = std::map<Key, cplx>;

    Trig2() = default;
    explicit Trig2(PeriodPair L) : L_(L) {}

    static Trig2 constant(cplx c, PeriodPair L) {
        Trig2 t(L);
        if (c != cplx(0.0, 0.0)) t.c_[{0, 0}] = c;
        return t;
    }

    const PeriodPair& periods() const { return L_; }
    const Map& coeffs() const { return c_; }
    bool empty() const { return c_.empty(); }
    std::size_t size() const { return c_.size(); }

    cplx coeff(int n, int j) const {
        auto it = c_.find({n, j});
        return it == c_.end() ? cplx(0.0, 0.0) : it->second;
    }
    void set(int n, int j, cplx v);
    void add(int n, int j, cplx v);

    Trig2& operator+=(const Trig2& o);
    Trig2& operator-=(const Trig2& o);
    Trig2& operator*=(cplx a);
    friend Trig2 operator+(Trig2 a, const Trig2& b) { return a += b; }
    friend Trig2 operator-(Trig2 a, const Trig2& b) { return a -= b; }
    friend Trig2 operator*(Trig2 a, cplx s) { return a *= s; }
    friend Trig2 operator*(cplx s, Trig2 a) { return a *= s; }

    // Pointwise product (coefficient convolution); exact.
    Trig2 mul(const Trig2& o) const;

    Trig2 dx() const; // d/dx
    Trig2 dy() const; // d/dy

    // Coefficients of the complex conjugate function.
    Trig2 conj_function() const;

    // The x-average <f>_x: the n = 0 slice, still a Trig2 (n == 0 modes only).
    Trig2 x_average() const;

    cplx mean() const { return coeff(0, 0); } // <<f>>

    cplx evaluate(double x, double y) const;

    double max_abs_coeff() const;
    void prune(double eps);

    int max_abs_n() const;
    int max_abs_j() const;

private:
    PeriodPair L_{};
    Map c_;
};

} // namespace fermi
