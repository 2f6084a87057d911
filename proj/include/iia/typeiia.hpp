#pragma once

#include <stdexcept>
#include <string>

#include "iia/tensor.hpp"

namespace iia {

class StructureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class DegenerateForm : public StructureError {
public:
    using StructureError::StructureError;
};
class NotPositive : public StructureError {
public:
    using StructureError::StructureError;
};
class NotPrimitive : public StructureError {
public:
    using StructureError::StructureError;
};
class SingularMetric : public StructureError {
public:
    using StructureError::StructureError;
};

struct StructureOptions {
    double degeneracy_eps = 1e-6;   // reject -lambda < eps * |phi|^4
    double primitivity_tol = 1e-10; // |Lambda phi| <= tol * |phi| |omega^-1|
    bool check_primitive = true;
};

template <class S>
struct TypeIIAStructure {
    Tensor<S> omega;     // (Co,Co)
    Tensor<S> omegaInv;  // (Contra,Contra), omega^{ak} omega_{kp} = delta
    Tensor<S> phi;       // 3-form
    Tensor<S> J;         // (Contra,Co)
    Tensor<S> g;         // (Co,Co)
    Tensor<S> gInv;      // (Contra,Contra)
    S normPhiSq{};
    Tensor<S> phiHat;    // 3-form
    Tensor<S> gTilde;    // (Co,Co)
    double hitchinSign = 1.0;
    S lambda{};
};

// sqrt of the sum of squares of the strictly increasing components.
double form_norm(const TensorD& f);

template <class S>
Tensor<S> hitchin_K(const Tensor<S>& phi);
template <class S>
S hitchin_lambda(const Tensor<S>& phi);
// Sign is chosen from the values so that omega(X, JY) is positive definite.
template <class S>
Tensor<S> hitchin_J(const Tensor<S>& phi, const Tensor<S>& omega,
                    const StructureOptions& opt = {}, double* sign_out = nullptr);

// (Lambda f)_{I} = (1/2) w^{ba} f_{abI}, so that Lambda omega = 3.
template <class S>
Tensor<S> lambda_contraction(const Tensor<S>& f, const Tensor<S>& omegaInv);
template <class S>
Tensor<S> hat_dual(const Tensor<S>& phi, const Tensor<S>& J);
// (N^dagger phi)_{kj} from N^k_{ij} given as (Contra,Co,Co).
template <class S>
Tensor<S> ndagger(const Tensor<S>& N, const Tensor<S>& phi, const Tensor<S>& gInv);

// Inverse of a rank-2 tensor; variances of the result are flipped.
template <class S>
Tensor<S> inverse2(const Tensor<S>& m);

// -phi_{iab} phi_{jkp} w^{ak} w^{bp}
template <class S>
Tensor<S> gtilde_quadratic(const Tensor<S>& phi, const Tensor<S>& omegaInv);

// |f|^2 = (1/k!) f_{I} f^{I} using gInv.
template <class S>
S form_norm_sq(const Tensor<S>& f, const Tensor<S>& gInv);

template <class S>
TypeIIAStructure<S> build_structure(const Tensor<S>& omega, const Tensor<S>& phi,
                                    const StructureOptions& opt = {});

// Residual checks of the structure invariants at the base point.
struct StructureReport {
    double jSquare = 0;      // |J^2 + 1|
    double gSymmetry = 0;    // |g - g^T|
    double omegaJ = 0;       // |omega(J., J.) - omega|
    double primitive = 0;    // |Lambda phi|
    double gTildeTwoWays = 0;
    double volume = 0;       // |det g - det omega| / |det omega|
    double minEigen = 0;
    double condition = 0;
};
StructureReport check_structure(const TypeIIAStructure<double>& st);

double det6(const TensorD& m);
// Eigenvalues of the symmetric part, ascending.
std::array<double, kDim> sym_eigenvalues(const TensorD& m);

TensorD standard_omega();
TensorD standard_phi();

}  // namespace iia
