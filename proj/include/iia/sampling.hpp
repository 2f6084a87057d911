#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "iia/geometry.hpp"

namespace iia {

class SamplingExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class NoSolution : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class AlgebraError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct JetSampleOptions {
    double scale = 1.0;              // form norm of the base value
    double derivativeScale = 0.3;    // max-abs of each derivative block, relative to scale
    double symplecticSpread = 0.4;   // size of the random symmetric generator
    double degeneracyEps = 1e-6;
    double maxCondition = 1e4;
    int maxAttempts = 1000;
    bool standardBase = false;       // base value fixed to the standard form
    bool zeroDerivatives = false;
};

struct JetSample {
    std::uint64_t seed = 0;
    double scale = 1.0;
    TensorD omega;
    JetCoefficients coeffs;
    int attempts = 0;
};

JetSample sample_typeiia_jet(std::uint64_t seed, const JetSampleOptions& opt = {});
std::shared_ptr<const JetChartBackend> make_backend(const JetSample& s);

// Maximum violation of the linear constraints, read through tensor algebra
// on the jets (independent of the constraint matrices used for sampling).
struct ConstraintResiduals {
    double primitive = 0;  // all coefficients of Lambda phi
    double closed = 0;     // degree 0 and 1 coefficients of d phi
};
ConstraintResiduals constraint_residuals(const TensorD& omega, const JetCoefficients& c);

// Null-space bases of the degree-1 and degree-2 constraint blocks with the
// standard symplectic form; columns index coefficients, rows basis vectors.
struct JetConstraintSystem {
    int rows1 = 0, rows2 = 0;
    std::vector<double> matrix1, matrix2;  // row-major rows x 120 / rows x 420
    std::vector<double> null1, null2;      // row-major k x 120 / k x 420
    int nullity1 = 0, nullity2 = 0;
};
const JetConstraintSystem& jet_constraint_system();

// Adds a Lambda-primitive but non-closed quadratic perturbation of the given
// max-abs size, breaking d phi = 0 at first order.
JetSample break_closedness(const JetSample& s, double size, std::uint64_t seed);

struct InvariantSampleOptions {
    double scale = 1.0;
    double degeneracyEps = 1e-6;
    double maxCondition = 1e4;
    int omegaDraws = 5000;
    int phiDrawsPerOmega = 10;
};

struct InvariantSample {
    std::uint64_t seed = 0;
    std::string algebra;
    TensorD c, omega, phi;
    int attempts = 0;
};

InvariantSample sample_typeiia_invariant(const std::string& name, const TensorD& c,
                                         std::uint64_t seed,
                                         const InvariantSampleOptions& opt = {});
std::shared_ptr<const LieAlgebraBackend> make_backend(const InvariantSample& s);

// Requires the Jacobi identity and a terminating lower central series.
void validate_nilpotent(const TensorD& c);
// Basis of CE-closed invariant k-forms (k = 2, 3), as full tensors.
std::vector<TensorD> closed_forms(const TensorD& c, int degree);

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream);

}  // namespace iia
