#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <string>
#include <type_traits>
#include <vector>

#include "iia/tensor.hpp"
#include "iia/typeiia.hpp"

namespace iia {

enum class BackendKind { JetChart, LieAlgebra };

// Lexicographic list of strictly increasing triples (20 of them).
const std::vector<std::array<int, 3>>& triples();
// Index of the unordered pair {a, b} among the 21 pairs a <= b.
int pair_index(int a, int b);

inline constexpr int kJetCoeffs = 560;

// phi(x) = phi0 + phi1 . x + (1/2) x^T phi2 x per increasing component:
// [0, 20) values, [20, 140) gradients (20 x 6), [140, 560) Hessians (20 x 21).
struct JetCoefficients {
    std::array<double, kJetCoeffs> c{};

    double& value(int I) { return c[I]; }
    double& gradient(int I, int a) { return c[20 + I * 6 + a]; }
    double& hessian(int I, int a, int b) { return c[140 + I * 21 + pair_index(a, b)]; }
    double value(int I) const { return c[I]; }
    double gradient(int I, int a) const { return c[20 + I * 6 + a]; }
    double hessian(int I, int a, int b) const { return c[140 + I * 21 + pair_index(a, b)]; }
};

TensorD form_from_coeffs(const std::array<double, 20>& v);
std::array<double, 20> coeffs_from_form(const TensorD& f);
TensorJ jet_form(const JetCoefficients& jc);

class Backend {
public:
    virtual ~Backend() = default;
    virtual BackendKind kind() const = 0;
    virtual const TensorJ& omega() const = 0;
    virtual const TensorJ& phi() const = 0;
    virtual const TensorD& omega_values() const = 0;
    virtual const TensorD& phi_values() const = 0;
    // Frame derivative of a field, as a new leading covariant slot.
    virtual TensorJ partial(const TensorJ& t) const = 0;
    // c^k_{ij} with [e_i, e_j] = c^k_{ij} e_k; zero on a coordinate chart.
    virtual const TensorD& brackets() const = 0;
    // d by the backend's own route (partial derivatives or Chevalley-Eilenberg).
    virtual TensorJ exterior_d(const TensorJ& form) const = 0;
    // Plain-value variants; only invariant data can be differentiated this way.
    virtual TensorD partial(const TensorD& t) const = 0;
    virtual TensorD exterior_d(const TensorD& form) const = 0;

    template <class S>
    const Tensor<S>& omega_as() const {
        if constexpr (std::is_same_v<S, double>) return omega_values();
        else return omega();
    }
    template <class S>
    const Tensor<S>& phi_as() const {
        if constexpr (std::is_same_v<S, double>) return phi_values();
        else return phi();
    }
};

// Flat Darboux chart around the origin carrying a 2-jet of phi.
class JetChartBackend final : public Backend {
public:
    JetChartBackend(const TensorD& omega, const JetCoefficients& coeffs);
    BackendKind kind() const override { return BackendKind::JetChart; }
    const TensorJ& omega() const override { return omega_; }
    const TensorJ& phi() const override { return phi_; }
    TensorJ partial(const TensorJ& t) const override;
    const TensorD& brackets() const override { return zero_c_; }
    TensorJ exterior_d(const TensorJ& form) const override;
    // Values alone carry no derivative data; these throw std::logic_error.
    TensorD partial(const TensorD& t) const override;
    TensorD exterior_d(const TensorD& form) const override;
    const TensorD& omega_values() const override { return omegaD_; }
    const TensorD& phi_values() const override { return phiD_; }
    const JetCoefficients& coefficients() const { return coeffs_; }

private:
    TensorD omegaD_;
    TensorJ omega_;
    JetCoefficients coeffs_;
    TensorJ phi_;
    TensorD phiD_;
    TensorD zero_c_;
};

// Left-invariant data on a Lie algebra in a fixed basis e_1..e_6.
class LieAlgebraBackend final : public Backend {
public:
    LieAlgebraBackend(const TensorD& c, const TensorD& omega, const TensorD& phi);
    BackendKind kind() const override { return BackendKind::LieAlgebra; }
    const TensorJ& omega() const override { return omega_; }
    const TensorJ& phi() const override { return phi_; }
    TensorJ partial(const TensorJ& t) const override;
    const TensorD& brackets() const override { return c_; }
    TensorJ exterior_d(const TensorJ& form) const override;
    TensorD partial(const TensorD& t) const override;
    TensorD exterior_d(const TensorD& form) const override;
    const TensorD& omega_values() const override { return omegaD_; }
    const TensorD& phi_values() const override { return phiD_; }

private:
    TensorD c_, omegaD_, phiD_;
    TensorJ omega_, phi_;
};

// Chevalley-Eilenberg differential of an invariant form:
// (d b)(X0..Xk) = sum_{a<b} (-1)^{a+b} b([Xa, Xb], X0..^a..^b..Xk).
template <class S>
Tensor<S> ce_differential(const TensorD& c, const Tensor<S>& form);
double jacobi_defect(const TensorD& c);
// Structure constants from the compact notation "0,0,0,0,12,13" meaning
// de^5 = e^12, de^6 = e^13 (terms joined with + or -).
TensorD parse_structure_notation(const std::string& notation);

// Connection, curvature and the derived tensors of a Type IIA structure over
// a backend. Jet fields lose one order of validity per derivative, so
// second-derivative quantities are exact in their values only. The double
// instantiation serves invariant data, where every field is constant.
template <class S>
class GeometryT {
public:
    using Ten = Tensor<S>;
    explicit GeometryT(std::shared_ptr<const Backend> backend, const StructureOptions& opt = {});

    const Backend& backend() const { return *backend_; }
    const TypeIIAStructure<S>& structure() const { return st_; }
    const Ten& christoffel() const { return gamma_; }  // Gamma^k_{ij}
    const Ten& nabla_J() const { return nablaJ_; }     // nabla_m J^k_j
    const Ten& nijenhuis() const { return N_; }        // N^k_{ij}
    const Ten& nijenhuis_lower() const { return Nl_; } // N_{kij}
    const Ten& alpha() const { return alpha_; }
    const Ten& riemann() const;                        // R_{ij}^k_l, computed on first use

    Ten partial(const Ten& t) const { return backend_->partial(t); }
    Ten nabla(const Ten& t) const;
    Ten frak_d(const Ten& t) const;
    Ten ricci() const;
    Ten exterior_d(const Ten& form) const { return backend_->exterior_d(form); }
    Ten exterior_d_nabla(const Ten& form) const;
    Ten codifferential(const Ten& form) const;

private:
    std::shared_ptr<const Backend> backend_;
    TypeIIAStructure<S> st_;
    Ten gamma_, nablaJ_, N_, Nl_, Nmix_, alpha_;
    mutable std::once_flag rOnce_;
    mutable Ten R_;
};

using Geometry = GeometryT<Jet2>;
using GeometryD = GeometryT<double>;

template <class S>
Tensor<S> levi_civita(const Backend& b, const Tensor<S>& g, const Tensor<S>& gInv);
template <class S>
Tensor<S> riemann_tensor(const Backend& b, const Tensor<S>& gamma);
// N^k_{ij} = (1/4)(J^r_i nabla_r J^k_j + J^k_r nabla_j J^r_i - (i <-> j)).
template <class S>
Tensor<S> nijenhuis_tensor(const Tensor<S>& J, const Tensor<S>& nablaJ);
// 4 N(X,Y) = [JX,JY] - [X,Y] - J[JX,Y] - J[X,JY] for invariant fields.
TensorD nijenhuis_from_brackets(const TensorD& c, const TensorD& J);

// All tensors needed by the identity checks, at the base point.
struct PointGeometry {
    BackendKind kind = BackendKind::JetChart;
    TensorD omega, omegaInv, phi, phiHat, J, g, gInv, gTilde;
    double normPhiSq = 0;
    TensorD brackets, gamma, nablaG, nablaJ, N, Nl, alpha, nablaAlpha;
    TensorD frakDphi, frakDphiHat, frakDJ, frakDg, frakDomega, frakDN;
    TensorD riemann, riemannLower, ricci;
    double scalarR = 0;
    TensorD nablaPhi, nablaNablaPhi, dPhi, dPhiNabla, codiffPhi, ddCodiffPhi;
    TensorD gradNormPhiSq;  // d|phi|^2
};

template <class S>
PointGeometry evaluate_point(const GeometryT<S>& geo);

}  // namespace iia
