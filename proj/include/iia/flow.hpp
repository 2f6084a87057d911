#pragma once

#include <array>
#include <functional>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "iia/geometry.hpp"

namespace iia {

class InvalidState : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class PositivityLost : public std::runtime_error {
public:
    PositivityLost(const std::string& what, double last_good_t)
        : std::runtime_error(what), lastGoodTime(last_good_t) {}
    double lastGoodTime;
};
class StepRejected : public std::runtime_error {
public:
    StepRejected(const std::string& what, long step) : std::runtime_error(what), step(step) {}
    long step;
};

// Constant relating dLd(|phi|^2 phi^) to the Laplacian form
// -dd^+(|phi|^2 phi) + 2d(|phi|^2 N^+ phi) under the Lambda omega = 3
// normalization: the raw dLd expression equals this factor times the
// Laplacian form. Measured by original_form_ratio.
inline constexpr double kOriginalFormFactor = 1.0;

// Pieces of the Laplacian form at the base point.
struct LaplacianTerms {
    TensorD twoTerm;     // -dd^+(|phi|^2 phi) + 2d(|phi|^2 N^+ phi)
    TensorD ddCodiff;    // -|phi|^2 dd^+ phi
    TensorD gradWedge;   // -d|phi|^2 ^ d^+ phi
    TensorD interior;    // d(i_{grad |phi|^2} phi)
    TensorD ndagger;     // 2 d(|phi|^2 N^+ phi)
    TensorD fourTerm() const;
};

template <class S>
LaplacianTerms laplacian_terms(const GeometryT<S>& geo);

// A_{iab} B_{jkp} w^{ka} w^{pb}
TensorD phi_pairing(const TensorD& a, const TensorD& b, const TensorD& omegaInv);

// Two-term form; throws InvalidState unless the four-term expansion agrees
// to within tol (relative).
template <class S>
TensorD rhs_laplacian(const GeometryT<S>& geo, double tol = 1e-10);
// dLd(|phi|^2 phi^), raw, and with kOriginalFormFactor divided out.
template <class S>
TensorD rhs_original_raw(const GeometryT<S>& geo);
template <class S>
TensorD rhs_original(const GeometryT<S>& geo);
// <raw, lap> / <lap, lap>; NaN when the Laplacian form vanishes.
template <class S>
double original_form_ratio(const GeometryT<S>& geo);

// d_t g from d_t phi through g~ = |phi|^2 g and d_t log|phi|^2 = (1/6) d_t log det g~.
struct MetricVelocity {
    TensorD gdot;
    TensorD gTildeDot;
    double dLogNormSq = 0;
};
MetricVelocity metric_velocity_from_phidot(const PointGeometry& p, const TensorD& phidot);
TensorD metric_velocity_theorem1(const PointGeometry& p);
// |phi|^2 (-2 nabla_m alpha^m - R + 2|alpha|^2)
double dilaton_velocity(const PointGeometry& p);

// ---------------------------------------------------------------- integration

struct FlowState {
    double t = 0;
    std::array<double, 20> phi{};
    TensorD c;      // structure constants
    TensorD omega;
};

struct FlowMonitors {
    double t = 0;
    double normPhiSq = 0;
    double detG = 0;
    double N2 = 0;
    double scalarR = 0;
    double primResidual = 0;
    double closedResidual = 0;
};

struct FlowTrace {
    std::vector<FlowMonitors> monitors;
    std::vector<std::array<double, 20>> phi;
    void write_csv(std::ostream& os) const;
};

struct FlowOptions {
    double dt = 1e-3;
    long steps = 1000;
    double monitorLimit = 1e-6;
    long recordEvery = 1;
};

// One classical RK4 step of y' = f(y) for any fixed-size real state.
template <std::size_t N, class F>
std::array<double, N> rk4_step(F&& f, const std::array<double, N>& y, double h) {
    auto shifted = [&](const std::array<double, N>& k, double a) {
        std::array<double, N> z = y;
        for (std::size_t i = 0; i < N; ++i) z[i] += a * k[i];
        return z;
    };
    const std::array<double, N> k1 = f(y);
    const std::array<double, N> k2 = f(shifted(k1, h / 2));
    const std::array<double, N> k3 = f(shifted(k2, h / 2));
    const std::array<double, N> k4 = f(shifted(k3, h));
    std::array<double, N> out = y;
    for (std::size_t i = 0; i < N; ++i) out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

std::shared_ptr<const LieAlgebraBackend> state_backend(const FlowState& s);
std::array<double, 20> flow_velocity(const FlowState& s);
FlowMonitors measure(const FlowState& s);
// Classical RK4 with fixed step; the state is advanced in place and the trace
// keeps every accepted record even when integration stops early.
void evolve_into(FlowState& state, const FlowOptions& opt, FlowTrace& trace);
FlowTrace evolve(FlowState& state, const FlowOptions& opt);

}  // namespace iia
