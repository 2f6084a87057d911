#include "iia/flow.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace iia {

TensorD LaplacianTerms::fourTerm() const { return ddCodiff + gradWedge + interior + ndagger; }

TensorD phi_pairing(const TensorD& a, const TensorD& b, const TensorD& omegaInv) {
    TensorD X = einsum<double>("iab,ka->ikb", {&a, &omegaInv});
    TensorD Y = einsum<double>("ikb,pb->ikp", {&X, &omegaInv});
    return einsum<double>("ikp,jkp->ij", {&Y, &b});
}

template <class S>
LaplacianTerms laplacian_terms(const GeometryT<S>& geo) {
    using Ten = Tensor<S>;
    const auto& st = geo.structure();
    const double n2 = value_of(st.normPhiSq);
    LaplacianTerms L;

    Ten n2phi = st.phi;
    n2phi.scale(st.normPhiSq);
    const TensorD dcod = values_of(geo.exterior_d(geo.codifferential(n2phi)));

    Ten nd = ndagger(geo.nijenhuis(), st.phi, st.gInv);
    nd.scale(st.normPhiSq);
    L.ndagger = values_of(geo.exterior_d(nd));
    L.ndagger *= 2.0;
    L.twoTerm = L.ndagger - dcod;

    const Ten codphi = geo.codifferential(st.phi);
    L.ddCodiff = values_of(geo.exterior_d(codphi));
    L.ddCodiff *= -n2;
    const Ten dn2 = geo.partial(Ten::scalar(st.normPhiSq));
    L.gradWedge = wedge(values_of(dn2), values_of(codphi));
    L.gradWedge *= -1.0;
    const Ten grad = einsum<S>("mn,n->m", {&st.gInv, &dn2});
    L.interior = values_of(geo.exterior_d(interior(grad, st.phi)));
    return L;
}

template <class S>
TensorD rhs_laplacian(const GeometryT<S>& geo, double tol) {
    const LaplacianTerms L = laplacian_terms(geo);
    const TensorD four = L.fourTerm();
    const double scale = std::max({1.0, max_abs(L.ddCodiff), max_abs(L.gradWedge),
                                   max_abs(L.interior), max_abs(L.ndagger)});
    if (max_abs(four - L.twoTerm) > tol * scale)
        throw InvalidState("four-term expansion disagrees with the two-term Laplacian form");
    return L.twoTerm;
}

template <class S>
TensorD rhs_original_raw(const GeometryT<S>& geo) {
    const auto& st = geo.structure();
    Tensor<S> f = st.phiHat;
    f.scale(st.normPhiSq);
    const Tensor<S> inner = geo.exterior_d(f);
    return values_of(geo.exterior_d(lambda_contraction(inner, st.omegaInv)));
}

template <class S>
TensorD rhs_original(const GeometryT<S>& geo) {
    TensorD r = rhs_original_raw(geo);
    r *= 1.0 / kOriginalFormFactor;
    return r;
}

template <class S>
double original_form_ratio(const GeometryT<S>& geo) {
    const TensorD raw = rhs_original_raw(geo);
    const TensorD lap = laplacian_terms(geo).twoTerm;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < lap.size(); ++i) {
        num += raw[i] * lap[i];
        den += lap[i] * lap[i];
    }
    return den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
}

#define IIA_FLOW_INSTANTIATE(S)                                                            \
    template LaplacianTerms laplacian_terms(const GeometryT<S>&);                          \
    template TensorD rhs_laplacian(const GeometryT<S>&, double);                           \
    template TensorD rhs_original_raw(const GeometryT<S>&);                                \
    template TensorD rhs_original(const GeometryT<S>&);                                    \
    template double original_form_ratio(const GeometryT<S>&);

IIA_FLOW_INSTANTIATE(double)
IIA_FLOW_INSTANTIATE(Jet2)

MetricVelocity metric_velocity_from_phidot(const PointGeometry& p, const TensorD& phidot) {
    MetricVelocity v;
    const TensorD P = phi_pairing(phidot, p.phi, p.omegaInv);
    v.gTildeDot = P + permute(P, {1, 0});
    v.gTildeDot *= -1.0;
    const TensorD gtInv = inverse2(p.gTilde);
    v.dLogNormSq = einsum<double>("ij,ij->", {&gtInv, &v.gTildeDot})[0] / 6.0;
    v.gdot = v.gTildeDot - v.dLogNormSq * p.gTilde;
    v.gdot *= 1.0 / p.normPhiSq;
    return v;
}

TensorD metric_velocity_theorem1(const PointGeometry& p) {
    const TensorD Nuu = raise_lower(raise_lower(p.Nl, 0, p.gInv), 1, p.gInv);  // N^{pq}_i
    const TensorD Nm = einsum<double>("pqi,qpj->ij", {&Nuu, &p.Nl});
    const TensorD Nmid = raise_lower(p.Nl, 1, p.gInv);  // N_j^p_i
    TensorD T = einsum<double>("p,jpi->ij", {&p.alpha, &Nmid});
    T += permute(T, {1, 0});
    const TensorD alJ = apply_J(p.alpha, 0, p.J);
    // the Hessian of log|phi|^2 is -nabla alpha
    TensorD v = 2.0 * p.ricci;
    v += 2.0 * p.nablaAlpha;
    v += 4.0 * Nm;
    v -= outer(p.alpha, p.alpha);
    v += outer(alJ, alJ);
    v += 4.0 * T;
    v *= -p.normPhiSq;
    return v;
}

double dilaton_velocity(const PointGeometry& p) {
    const double div = einsum<double>("ij,ij->", {&p.gInv, &p.nablaAlpha})[0];
    const TensorD au = raise_lower(p.alpha, 0, p.gInv);
    const double a2 = einsum<double>("i,i->", {&au, &p.alpha})[0];
    return p.normPhiSq * (-2.0 * div - p.scalarR + 2.0 * a2);
}

// ---------------------------------------------------------------- integration

std::shared_ptr<const LieAlgebraBackend> state_backend(const FlowState& s) {
    return std::make_shared<LieAlgebraBackend>(s.c, s.omega, form_from_coeffs(s.phi));
}

namespace {

StructureOptions flow_structure_options() {
    StructureOptions o;
    o.check_primitive = false;  // monitored separately
    return o;
}

}  // namespace

std::array<double, 20> flow_velocity(const FlowState& s) {
    try {
        GeometryD geo(state_backend(s), flow_structure_options());
        return coeffs_from_form(rhs_laplacian(geo));
    } catch (const StructureError& e) {
        throw PositivityLost(std::string("structure lost along the flow: ") + e.what(), s.t);
    }
}

FlowMonitors measure(const FlowState& s) {
    FlowMonitors m;
    m.t = s.t;
    const TensorD phi = form_from_coeffs(s.phi);
    try {
        GeometryD geo(state_backend(s), flow_structure_options());
        const auto& st = geo.structure();
        m.normPhiSq = st.normPhiSq;
        const TensorD& g = st.g;
        const TensorD& gInv = st.gInv;
        m.detG = det6(g);
        const TensorD& Nl = geo.nijenhuis_lower();
        const TensorD Nu = raise_lower(raise_lower(raise_lower(Nl, 0, gInv), 1, gInv), 2, gInv);
        m.N2 = einsum<double>("ijk,ijk->", {&Nu, &Nl})[0];
        const TensorD ric = geo.ricci();
        m.scalarR = einsum<double>("ij,ij->", {&gInv, &ric})[0];
        m.primResidual = max_abs(lambda_contraction(phi, st.omegaInv));
    } catch (const StructureError& e) {
        throw PositivityLost(std::string("structure lost along the flow: ") + e.what(), s.t);
    }
    m.closedResidual = max_abs(ce_differential(s.c, phi));
    return m;
}

void FlowTrace::write_csv(std::ostream& os) const {
    os << "t";
    for (int i = 1; i <= 20; ++i) os << ",phi_" << i;
    os << ",normPhiSq,detG,N2,scalarR,primResidual,closedResidual\n";
    char buf[32];
    auto put = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.12e", x == 0.0 ? 0.0 : x);
        os << buf;
    };
    for (std::size_t r = 0; r < monitors.size(); ++r) {
        const auto& m = monitors[r];
        put(m.t);
        for (double x : phi[r]) {
            os << ',';
            put(x);
        }
        for (double x : {m.normPhiSq, m.detG, m.N2, m.scalarR, m.primResidual, m.closedResidual}) {
            os << ',';
            put(x);
        }
        os << '\n';
    }
}

FlowTrace evolve(FlowState& state, const FlowOptions& opt) {
    FlowTrace trace;
    evolve_into(state, opt, trace);
    return trace;
}

void evolve_into(FlowState& state, const FlowOptions& opt, FlowTrace& trace) {
    if (!(opt.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (opt.steps < 0) throw std::invalid_argument("steps must be non-negative");
    FlowMonitors m0 = measure(state);
    trace.monitors.push_back(m0);
    trace.phi.push_back(state.phi);
    const double det0 = m0.detG;
    const double h = opt.dt;
    auto velocity = [&](const std::array<double, 20>& phi) {
        FlowState s = state;
        s.phi = phi;
        return flow_velocity(s);
    };
    for (long step = 1; step <= opt.steps; ++step) {
        FlowState next = state;
        next.phi = rk4_step(velocity, state.phi, h);
        next.t = state.t + h;
        FlowMonitors m;
        try {
            m = measure(next);
        } catch (const PositivityLost& e) {
            throw PositivityLost(e.what(), state.t);
        }
        const double drift = std::abs(m.detG - det0) / std::abs(det0);
        if (m.primResidual > opt.monitorLimit || m.closedResidual > opt.monitorLimit ||
            drift > opt.monitorLimit || !std::isfinite(m.normPhiSq))
            throw StepRejected("monitor limit exceeded at step " + std::to_string(step), step);
        state = next;
        if (step % std::max(1L, opt.recordEvery) == 0 || step == opt.steps) {
            trace.monitors.push_back(m);
            trace.phi.push_back(state.phi);
        }
    }
}

}  // namespace iia
