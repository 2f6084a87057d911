#include "iia/typeiia.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace iia {

namespace {

Eigen::Matrix<double, 6, 6> to_eigen(const TensorD& m) {
    Eigen::Matrix<double, 6, 6> M;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) M(i, j) = m(i, j);
    return M;
}

template <class S>
Tensor<S> scaled_constant(const Tensor<S>& t, double s) {
    Tensor<S> r = t;
    r *= s;
    return r;
}

template <class S>
double max_abs_full(const Tensor<S>& t) {
    if constexpr (std::is_same_v<S, double>) {
        return max_abs(t);
    } else {
        double m = 0.0;
        for (const auto& c : t.comps()) {
            m = std::max(m, std::abs(c.val));
            for (double x : c.grad) m = std::max(m, std::abs(x));
            for (double x : c.hess) m = std::max(m, std::abs(x));
        }
        return m;
    }
}

}  // namespace

double form_norm(const TensorD& f) {
    double s = 0.0;
    for (double c : f.comps()) s += c * c;
    double fact = 1.0;
    for (int i = 2; i <= f.rank(); ++i) fact *= i;
    return std::sqrt(s / fact);
}

TensorD standard_omega() {
    return basis_form({0, 1}) + basis_form({2, 3}) + basis_form({4, 5});
}

TensorD standard_phi() {
    return basis_form({0, 2, 4}) - basis_form({0, 3, 5}) - basis_form({1, 2, 5}) -
           basis_form({1, 3, 4});
}

double det6(const TensorD& m) { return to_eigen(m).determinant(); }

std::array<double, kDim> sym_eigenvalues(const TensorD& m) {
    Eigen::Matrix<double, 6, 6> M = to_eigen(m);
    Eigen::Matrix<double, 6, 6> Sym = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(Sym, Eigen::EigenvaluesOnly);
    std::array<double, kDim> ev{};
    for (int i = 0; i < kDim; ++i) ev[i] = es.eigenvalues()(i);
    return ev;
}

template <class S>
Tensor<S> hitchin_K(const Tensor<S>& phi) {
    if (phi.rank() != 3) throw RankError("hitchin_K needs a 3-form");
    Tensor<S> K({Var::Contra, Var::Co});
    for (int j = 0; j < kDim; ++j) {
        Tensor<S> e = Tensor<S>::contravariant(1);
        e[j] = S(1.0);
        Tensor<S> v = levi_civita_pairing(wedge(interior(e, phi), phi));
        for (int i = 0; i < kDim; ++i) K(i, j) = v[i];
    }
    return K;
}

template <class S>
S hitchin_lambda(const Tensor<S>& phi) {
    Tensor<S> K = hitchin_K(phi);
    Tensor<S> K2 = einsum<S>("ik,kj->ij", {&K, &K});
    S tr(0.0);
    for (int i = 0; i < kDim; ++i) tr += K2(i, i);
    tr *= 1.0 / 6.0;
    return tr;
}

template <class S>
Tensor<S> hitchin_J(const Tensor<S>& phi, const Tensor<S>& omega, const StructureOptions& opt,
                    double* sign_out) {
    Tensor<S> K = hitchin_K(phi);
    Tensor<S> K2 = einsum<S>("ik,kj->ij", {&K, &K});
    S lam(0.0);
    for (int i = 0; i < kDim; ++i) lam += K2(i, i);
    lam *= 1.0 / 6.0;
    const double nphi = form_norm(values_of(phi));
    if (!(value_of(lam) < -opt.degeneracy_eps * std::pow(nphi, 4)))
        throw DegenerateForm("3-form is degenerate or of the wrong type (lambda >= 0)");
    S root = sqrt(S(-1.0) * lam);
    Tensor<S> J = K;
    J.scale(reciprocal(root));
    for (double s : {1.0, -1.0}) {
        TensorD Jd = values_of(J);
        Jd *= s;
        TensorD w = values_of(omega);
        TensorD g = einsum<double>("ik,kj->ij", {&w, &Jd});
        auto ev = sym_eigenvalues(g);
        if (ev[0] > 0.0) {
            if (sign_out) *sign_out = s;
            return scaled_constant(J, s);
        }
    }
    throw NotPositive("neither sign of J gives a positive definite metric");
}

template <class S>
Tensor<S> lambda_contraction(const Tensor<S>& f, const Tensor<S>& omegaInv) {
    if (f.rank() < 2) throw RankError("Lambda needs a form of degree >= 2");
    // w^{ba} f_{ab..}: the contraction normalized so that Lambda omega = 3
    std::string spec = "ba,ab";
    std::string rest;
    for (int s = 2; s < f.rank(); ++s) rest.push_back(static_cast<char>('c' + s));
    spec += rest + "->" + rest;
    Tensor<S> r = einsum<S>(spec, {&omegaInv, &f});
    r *= 0.5;
    return r;
}

template <class S>
Tensor<S> hat_dual(const Tensor<S>& phi, const Tensor<S>& J) {
    Tensor<S> r = apply_J(phi, 0, J);
    r *= -1.0;
    return r;
}

template <class S>
Tensor<S> ndagger(const Tensor<S>& N, const Tensor<S>& phi, const Tensor<S>& gInv) {
    // N^mu_j^lambda: raise the last slot of N^mu_{j lambda}
    Tensor<S> Nr = raise_lower(N, 2, gInv);
    Tensor<S> t = einsum<S>("mjl,mkl->kj", {&Nr, &phi});
    Tensor<S> tt = permute(t, {1, 0});
    return t - tt;
}

template <class S>
Tensor<S> inverse2(const Tensor<S>& m) {
    if (m.rank() != 2) throw RankError("inverse2 needs rank 2");
    const Var flip0 = m.variance(1) == Var::Co ? Var::Contra : Var::Co;
    const Var flip1 = m.variance(0) == Var::Co ? Var::Contra : Var::Co;
    std::array<std::array<S, 2 * kDim>, kDim> a;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) {
            a[i][j] = m(i, j);
            a[i][kDim + j] = S(i == j ? 1.0 : 0.0);
        }
    double scale = 0.0;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) scale = std::max(scale, std::abs(value_of(m(i, j))));
    for (int c = 0; c < kDim; ++c) {
        int piv = c;
        for (int r = c + 1; r < kDim; ++r)
            if (std::abs(value_of(a[r][c])) > std::abs(value_of(a[piv][c]))) piv = r;
        if (std::abs(value_of(a[piv][c])) <= 1e-14 * scale)
            throw SingularMetric("matrix is singular");
        std::swap(a[c], a[piv]);
        const S inv = reciprocal(a[c][c]);
        for (int j = 0; j < 2 * kDim; ++j) a[c][j] = a[c][j] * inv;
        for (int r = 0; r < kDim; ++r) {
            if (r == c) continue;
            const S f = a[r][c];
            for (int j = 0; j < 2 * kDim; ++j) a[r][j] -= f * a[c][j];
        }
    }
    Tensor<S> out({flip0, flip1});
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) out(i, j) = a[i][kDim + j];
    return out;
}

template <class S>
Tensor<S> gtilde_quadratic(const Tensor<S>& phi, const Tensor<S>& omegaInv) {
    // X_i^k_b = phi_{iab} w^{ak}; Y_i^{kp} = X_i^k_b w^{bp}
    Tensor<S> X = einsum<S>("iab,ak->ikb", {&phi, &omegaInv});
    Tensor<S> Y = einsum<S>("ikb,bp->ikp", {&X, &omegaInv});
    Tensor<S> r = einsum<S>("ikp,jkp->ij", {&Y, &phi});
    r *= -1.0;
    return r;
}

template <class S>
S form_norm_sq(const Tensor<S>& f, const Tensor<S>& gInv) {
    Tensor<S> up = f;
    for (int s = 0; s < f.rank(); ++s) up = raise_lower(up, s, gInv);
    S acc(0.0);
    for (std::size_t i = 0; i < f.size(); ++i) detail::mul_acc(acc, f[i], up[i]);
    double fact = 1.0;
    for (int i = 2; i <= f.rank(); ++i) fact *= i;
    acc *= 1.0 / fact;
    return acc;
}

template <class S>
TypeIIAStructure<S> build_structure(const Tensor<S>& omega, const Tensor<S>& phi,
                                    const StructureOptions& opt) {
    if (phi.rank() != 3 || omega.rank() != 2) throw RankError("build_structure: ranks");
    TypeIIAStructure<S> st;
    st.omega = omega;
    st.phi = phi;
    st.omegaInv = inverse2(omega);
    if (opt.check_primitive) {
        Tensor<S> lp = lambda_contraction(phi, st.omegaInv);
        const double bound = opt.primitivity_tol * std::max(1.0, max_abs_full(phi)) *
                             std::max(1.0, max_abs(st.omegaInv));
        if (max_abs_full(lp) > bound) throw NotPrimitive("Lambda phi does not vanish");
    }
    st.lambda = hitchin_lambda(phi);
    st.J = hitchin_J(phi, omega, opt, &st.hitchinSign);
    st.g = einsum<S>("ik,kj->ij", {&omega, &st.J});
    st.gInv = inverse2(st.g);
    st.normPhiSq = form_norm_sq(phi, st.gInv);
    st.phiHat = hat_dual(phi, st.J);
    st.gTilde = st.g;
    st.gTilde.scale(st.normPhiSq);
    return st;
}

StructureReport check_structure(const TypeIIAStructure<double>& st) {
    StructureReport r;
    TensorD J2 = einsum<double>("ik,kj->ij", {&st.J, &st.J});
    for (int i = 0; i < kDim; ++i) J2(i, i) += 1.0;
    r.jSquare = max_abs(J2);
    r.gSymmetry = max_abs(st.g - permute(st.g, {1, 0}));
    TensorD wJJ = apply_J(apply_J(st.omega, 0, st.J), 1, st.J);
    r.omegaJ = max_abs(wJJ - st.omega);
    r.primitive = max_abs(lambda_contraction(st.phi, st.omegaInv));
    r.gTildeTwoWays = max_abs(st.gTilde - gtilde_quadratic(st.phi, st.omegaInv)) /
                      std::max(1.0, max_abs(st.gTilde));
    const double dw = det6(st.omega);
    r.volume = std::abs(det6(st.g) - dw) / std::abs(dw);
    auto ev = sym_eigenvalues(st.g);
    r.minEigen = ev[0];
    r.condition = ev[kDim - 1] / ev[0];
    return r;
}

#define IIA_INSTANTIATE(S)                                                                 \
    template Tensor<S> hitchin_K(const Tensor<S>&);                                        \
    template S hitchin_lambda(const Tensor<S>&);                                           \
    template Tensor<S> hitchin_J(const Tensor<S>&, const Tensor<S>&,                       \
                                 const StructureOptions&, double*);                        \
    template Tensor<S> lambda_contraction(const Tensor<S>&, const Tensor<S>&);             \
    template Tensor<S> hat_dual(const Tensor<S>&, const Tensor<S>&);                       \
    template Tensor<S> ndagger(const Tensor<S>&, const Tensor<S>&, const Tensor<S>&);      \
    template Tensor<S> inverse2(const Tensor<S>&);                                         \
    template Tensor<S> gtilde_quadratic(const Tensor<S>&, const Tensor<S>&);               \
    template S form_norm_sq(const Tensor<S>&, const Tensor<S>&);                           \
    template TypeIIAStructure<S> build_structure(const Tensor<S>&, const Tensor<S>&,       \
                                                 const StructureOptions&);

IIA_INSTANTIATE(double)
IIA_INSTANTIATE(Jet2)

}  // namespace iia
