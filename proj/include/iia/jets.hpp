#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace iia {

inline constexpr int kDim = 6;

class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Second-order Taylor data of a scalar field at the base point x = 0.
struct Jet2 {
    double val = 0.0;
    std::array<double, kDim> grad{};
    std::array<double, kDim * kDim> hess{};  // row-major, kept symmetric

    Jet2() = default;
    Jet2(double v) : val(v) {}  // NOLINT: constants promote implicitly

    double h(int a, int b) const { return hess[a * kDim + b]; }
    double& h(int a, int b) { return hess[a * kDim + b]; }

    static Jet2 constant(double v) { return Jet2(v); }
    // Coordinate function x_i shifted by v.
    static Jet2 variable(int i, double v = 0.0);
    // v + g.x + x^T H x / 2; H is symmetrized.
    static Jet2 quadratic(double v, const std::array<double, kDim>& g,
                          const std::array<double, kDim * kDim>& H);

    void symmetrize();
    bool is_constant() const;

    Jet2& operator+=(const Jet2& o);
    Jet2& operator-=(const Jet2& o);
    Jet2& operator*=(double s);
    Jet2 operator-() const;
};

Jet2 jet_add(const Jet2& a, const Jet2& b);
Jet2 jet_mul(const Jet2& a, const Jet2& b);

enum class SmoothFn { Reciprocal, Sqrt, Log };
Jet2 jet_smooth(const Jet2& a, SmoothFn f);

// Partial derivative along x_i. The result is exact in value and gradient
// only; its Hessian is truncated to zero.
Jet2 jet_partial(const Jet2& a, int i);

inline Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
inline Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
inline Jet2 operator*(const Jet2& a, const Jet2& b) { return jet_mul(a, b); }
inline Jet2 operator*(Jet2 a, double s) { return a *= s; }
inline Jet2 operator*(double s, Jet2 a) { return a *= s; }
inline Jet2 operator/(const Jet2& a, const Jet2& b) {
    return jet_mul(a, jet_smooth(b, SmoothFn::Reciprocal));
}

inline Jet2 reciprocal(const Jet2& a) { return jet_smooth(a, SmoothFn::Reciprocal); }
inline Jet2 sqrt(const Jet2& a) { return jet_smooth(a, SmoothFn::Sqrt); }
inline Jet2 log(const Jet2& a) { return jet_smooth(a, SmoothFn::Log); }

// Scalar traits so generic code can treat double and Jet2 alike.
inline double value_of(double x) { return x; }
inline double value_of(const Jet2& x) { return x.val; }
inline double partial_of(double, int) { return 0.0; }
inline Jet2 partial_of(const Jet2& x, int i) { return jet_partial(x, i); }

inline double sqrt(double x) {
    if (!(x >= 0.0)) throw DomainError("sqrt of a negative value");
    return std::sqrt(x);
}
inline double log(double x) {
    if (!(x > 0.0)) throw DomainError("log of a non-positive value");
    return std::log(x);
}
inline double reciprocal(double x) {
    if (x == 0.0) throw DomainError("reciprocal of zero");
    return 1.0 / x;
}

}  // namespace iia
