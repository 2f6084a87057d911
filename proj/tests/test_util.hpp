#pragma once

// Shared helpers and independent oracles for the test binaries.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "iia/jets.hpp"
#include "iia/tensor.hpp"

namespace test {

using iia::Jet2;
using iia::kDim;
using Point = std::array<double, kDim>;

inline double normal(std::mt19937_64& rng) {
    return std::normal_distribution<double>()(rng);
}

inline Jet2 random_jet(std::mt19937_64& rng) {
    Jet2 a(normal(rng));
    for (auto& g : a.grad) g = normal(rng);
    for (int i = 0; i < kDim; ++i)
        for (int j = i; j < kDim; ++j) a.h(i, j) = a.h(j, i) = normal(rng);
    return a;
}

inline double jet_max_abs(const Jet2& a) {
    double m = std::abs(a.val);
    for (double g : a.grad) m = std::max(m, std::abs(g));
    for (double h : a.hess) m = std::max(m, std::abs(h));
    return m;
}

// v + g.x + x^T H x / 2 with symmetric H.
struct Quadratic {
    double v = 0;
    Point g{};
    std::array<double, kDim * kDim> H{};

    static Quadratic random(std::mt19937_64& rng, double s = 1.0) {
        Quadratic q;
        q.v = s * normal(rng);
        for (auto& x : q.g) x = s * normal(rng);
        for (int i = 0; i < kDim; ++i)
            for (int j = i; j < kDim; ++j) q.H[i * kDim + j] = q.H[j * kDim + i] = s * normal(rng);
        return q;
    }
    double operator()(const Point& x) const {
        double r = v;
        for (int i = 0; i < kDim; ++i) {
            r += g[i] * x[i];
            for (int j = 0; j < kDim; ++j) r += 0.5 * H[i * kDim + j] * x[i] * x[j];
        }
        return r;
    }
    Jet2 jet() const { return Jet2::quadratic(v, g, H); }
};

// Max error of a jet against central differences of f at the origin,
// relative to max(1, |component|).
inline double jet_fd_error(const Jet2& j, const std::function<double(const Point&)>& f, double h) {
    auto at = [&](int a, double sa, int b, double sb) {
        Point x{};
        if (a >= 0) x[a] += sa * h;
        if (b >= 0) x[b] += sb * h;
        return f(x);
    };
    double err = std::abs(j.val - f(Point{})) / std::max(1.0, std::abs(j.val));
    for (int i = 0; i < kDim; ++i) {
        const double gi = (at(i, 1, -1, 0) - at(i, -1, -1, 0)) / (2 * h);
        err = std::max(err, std::abs(j.grad[i] - gi) / std::max(1.0, std::abs(gi)));
        for (int k = 0; k < kDim; ++k) {
            double hk;
            if (i == k) {
                hk = (at(i, 1, -1, 0) - 2 * f(Point{}) + at(i, -1, -1, 0)) / (h * h);
            } else {
                hk = (at(i, 1, k, 1) - at(i, 1, k, -1) - at(i, -1, k, 1) + at(i, -1, k, -1)) /
                     (4 * h * h);
            }
            err = std::max(err, std::abs(j.h(i, k) - hk) / std::max(1.0, std::abs(hk)));
        }
    }
    return err;
}

// Random expression tree over three quadratics, evaluated generically so the
// jet result and the plain-double function come from the same tree.
struct ExprNode {
    int op = 0;  // 0 leaf, 1 add, 2 mul, 3 sqrt(1+x^2), 4 log(2+x^2), 5 1/(1+x^2), 6 scale
    int leaf = 0;
    double c = 1.0;
    std::unique_ptr<ExprNode> a, b;

    template <class S>
    S eval(const std::array<S, 3>& leaves) const {
        using iia::log;
        using iia::reciprocal;
        using iia::sqrt;
        switch (op) {
            case 0: return leaves[leaf];
            case 1: return a->eval(leaves) + b->eval(leaves);
            case 2: return a->eval(leaves) * b->eval(leaves);
            case 3: {
                const S x = a->eval(leaves);
                return sqrt(S(1.0) + x * x);
            }
            case 4: {
                const S x = a->eval(leaves);
                return log(S(2.0) + x * x);
            }
            case 5: {
                const S x = a->eval(leaves);
                return reciprocal(S(1.0) + x * x);
            }
            default: return a->eval(leaves) * c;
        }
    }
};

inline std::unique_ptr<ExprNode> random_tree(std::mt19937_64& rng, int depth) {
    auto n = std::make_unique<ExprNode>();
    std::uniform_int_distribution<int> pick(depth > 0 ? 1 : 0, depth > 0 ? 6 : 0);
    n->op = pick(rng);
    if (n->op == 0) {
        n->leaf = std::uniform_int_distribution<int>(0, 2)(rng);
        return n;
    }
    n->a = random_tree(rng, depth - 1);
    if (n->op == 1 || n->op == 2) n->b = random_tree(rng, depth - 1);
    if (n->op == 6) n->c = 0.5 + std::uniform_real_distribution<double>()(rng);
    return n;
}

struct Expression {
    Jet2 jet;
    std::function<double(const Point&)> f;
};

// The k-th tree is forced to contain at least one nonlinear smooth function.
inline Expression random_expression(std::mt19937_64& rng, int k) {
    std::array<Quadratic, 3> q{Quadratic::random(rng, 0.5), Quadratic::random(rng, 0.5),
                               Quadratic::random(rng, 0.5)};
    std::shared_ptr<ExprNode> root = random_tree(rng, 3);
    if (root->op <= 2 || root->op == 6) {
        auto wrap = std::make_shared<ExprNode>();
        wrap->op = 3 + k % 3;
        wrap->a = std::make_unique<ExprNode>(std::move(*root));
        root = wrap;
    }
    Expression e;
    e.jet = root->eval<Jet2>({q[0].jet(), q[1].jet(), q[2].jet()});
    e.f = [root, q](const Point& x) { return root->eval<double>({q[0](x), q[1](x), q[2](x)}); };
    return e;
}

// Brute-force helpers over dense tensors.
inline std::vector<int> digits(std::size_t o, int rank) {
    std::vector<int> d(rank);
    for (int s = rank - 1; s >= 0; --s) {
        d[s] = static_cast<int>(o % kDim);
        o /= kDim;
    }
    return d;
}

inline iia::TensorD random_tensor(std::mt19937_64& rng, std::vector<iia::Var> sig) {
    iia::TensorD t(std::move(sig));
    for (auto& c : t.comps()) c = normal(rng);
    return t;
}

inline iia::TensorD random_form(std::mt19937_64& rng, int k) {
    return iia::alternate(random_tensor(rng, std::vector<iia::Var>(k, iia::Var::Co)));
}

inline double max_diff(const iia::TensorD& a, const iia::TensorD& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double rel_diff(const iia::TensorD& a, const iia::TensorD& b) {
    return max_diff(a, b) / std::max({1.0, iia::max_abs(a), iia::max_abs(b)});
}

}  // namespace test
