#include "iia/jets.hpp"

#include <cmath>

#include "iia/simd.hpp"

namespace iia {

Jet2 Jet2::variable(int i, double v) {
    Jet2 j(v);
    j.grad[i] = 1.0;
    return j;
}

Jet2 Jet2::quadratic(double v, const std::array<double, kDim>& g,
                     const std::array<double, kDim * kDim>& H) {
    Jet2 j(v);
    j.grad = g;
    j.hess = H;
    j.symmetrize();
    return j;
}

void Jet2::symmetrize() {
    for (int a = 0; a < kDim; ++a)
        for (int b = a + 1; b < kDim; ++b) {
            double m = 0.5 * (h(a, b) + h(b, a));
            h(a, b) = m;
            h(b, a) = m;
        }
}

bool Jet2::is_constant() const {
    for (double g : grad)
        if (g != 0.0) return false;
    for (double x : hess)
        if (x != 0.0) return false;
    return true;
}

Jet2& Jet2::operator+=(const Jet2& o) {
    val += o.val;
    for (int a = 0; a < kDim; ++a) grad[a] += o.grad[a];
    for (int a = 0; a < kDim * kDim; ++a) hess[a] += o.hess[a];
    return *this;
}

Jet2& Jet2::operator-=(const Jet2& o) {
    val -= o.val;
    for (int a = 0; a < kDim; ++a) grad[a] -= o.grad[a];
    for (int a = 0; a < kDim * kDim; ++a) hess[a] -= o.hess[a];
    return *this;
}

Jet2& Jet2::operator*=(double s) {
    val *= s;
    for (double& g : grad) g *= s;
    for (double& x : hess) x *= s;
    return *this;
}

Jet2 Jet2::operator-() const {
    Jet2 r = *this;
    r *= -1.0;
    return r;
}

Jet2 jet_add(const Jet2& a, const Jet2& b) { return a + b; }

Jet2 jet_mul(const Jet2& a, const Jet2& b) {
    Jet2 r;
    simd::jet_fma(r, a, b);
    return r;
}

Jet2 jet_smooth(const Jet2& a, SmoothFn f) {
    double f0, f1, f2;
    const double x = a.val;
    switch (f) {
    case SmoothFn::Reciprocal:
        if (x == 0.0) throw DomainError("jet reciprocal at zero");
        f0 = 1.0 / x;
        f1 = -f0 * f0;
        f2 = 2.0 * f0 * f0 * f0;
        break;
    case SmoothFn::Sqrt:
        if (!(x > 0.0)) throw DomainError("jet sqrt needs a positive value");
        f0 = std::sqrt(x);
        f1 = 0.5 / f0;
        f2 = -0.25 / (f0 * x);
        break;
    case SmoothFn::Log:
        if (!(x > 0.0)) throw DomainError("jet log needs a positive value");
        f0 = std::log(x);
        f1 = 1.0 / x;
        f2 = -f1 * f1;
        break;
    default:
        throw DomainError("unknown smooth function");
    }
    Jet2 r(f0);
    for (int i = 0; i < kDim; ++i) r.grad[i] = f1 * a.grad[i];
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
            r.h(i, j) = f1 * a.h(i, j) + f2 * a.grad[i] * a.grad[j];
    return r;
}

Jet2 jet_partial(const Jet2& a, int i) {
    Jet2 r(a.grad[i]);
    for (int j = 0; j < kDim; ++j) r.grad[j] = a.h(i, j);
    return r;
}

}  // namespace iia
