#include "iia/identities.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "iia/catalog.hpp"
#include "iia/sampling.hpp"

namespace iia {

// ---------------------------------------------------------------- context

EvalContext::EvalContext(std::shared_ptr<const Backend> backend, const StructureOptions& opt)
    : geo_(std::move(backend), opt) {}

const PointGeometry& EvalContext::point() const {
    if (!point_) point_ = evaluate_point(geo_);
    return *point_;
}

const LaplacianTerms& EvalContext::laplacian() const {
    if (!lap_) lap_ = laplacian_terms(geo_);
    return *lap_;
}

const TensorD& EvalContext::original() const {
    if (!orig_) orig_ = rhs_original(geo_);
    return *orig_;
}

double residual(const TensorD& a, const TensorD& b, std::initializer_list<const TensorD*> terms) {
    double scale = std::max({1.0, max_abs(a), max_abs(b)});
    for (const TensorD* t : terms) scale = std::max(scale, max_abs(*t));
    return max_abs(a - b) / scale;
}

double residual(double a, double b, std::initializer_list<double> terms) {
    double scale = std::max({1.0, std::abs(a), std::abs(b)});
    for (double t : terms) scale = std::max(scale, std::abs(t));
    return std::abs(a - b) / scale;
}

namespace {

using T = TensorD;

T ein(std::string_view s, std::initializer_list<const T*> ops) { return einsum<double>(s, ops); }
T tr(const T& t) { return permute(t, {1, 0}); }
double full(const T& a, const T& b) { return ein("ij,ij->", {&a, &b})[0]; }

// Contractions of N and alpha used across several checks.
struct NData {
    T N3;     // N_{ij}^k
    T Nuu;    // N^{pq}_i
    T Np, Nm; // (N^2_+)_{ij}, (N^2_-)_{ij}
    double Nsq = 0;
    T aN;     // alpha_k N_i^k_j + (i <-> j)
    T alJ;    // alpha_{Jm}
    T DNs;    // D_s N_i^s_j
    T DNk;    // D_k N_{ij}^k
    double divA = 0, a2 = 0;
    T hess;   // nabla nabla log|phi|^2

    explicit NData(const PointGeometry& p) {
        N3 = raise_lower(p.Nl, 2, p.gInv);
        Nuu = raise_lower(raise_lower(p.Nl, 0, p.gInv), 1, p.gInv);
        Np = ein("pqi,pqj->ij", {&Nuu, &p.Nl});
        Nm = ein("pqi,qpj->ij", {&Nuu, &p.Nl});
        const T Nall = raise_lower(Nuu, 2, p.gInv);
        Nsq = ein("abc,abc->", {&Nall, &p.Nl})[0];
        const T Nikj = raise_lower(p.Nl, 1, p.gInv);
        aN = ein("k,ikj->ij", {&p.alpha, &Nikj});
        aN += tr(aN);
        alJ = apply_J(p.alpha, 0, p.J);
        DNs = ein("sa,siaj->ij", {&p.gInv, &p.frakDN});
        DNk = ein("kc,kijc->ij", {&p.gInv, &p.frakDN});
        divA = full(p.gInv, p.nablaAlpha);
        const T au = raise_lower(p.alpha, 0, p.gInv);
        a2 = ein("i,i->", {&au, &p.alpha})[0];
        hess = -1.0 * p.nablaAlpha;
    }
};

T pair(const PointGeometry& p, const T& t) { return phi_pairing(p.phi, t, p.omegaInv); }
T psym(const PointGeometry& p, const T& t) {
    T a = pair(p, t);
    return a + tr(a);
}

T laplacian_of_phi(const PointGeometry& p) {
    return ein("lm,mljkp->jkp", {&p.gInv, &p.nablaNablaPhi});
}

// g^{lm} of the commutator terms in the Bochner-Kodaira formula.
T commutator_terms(const PointGeometry& p) {
    const T comm = p.nablaNablaPhi - permute(p.nablaNablaPhi, {1, 0, 2, 3, 4});
    T c = ein("lm,mjkpl->jkp", {&p.gInv, &comm});
    c += ein("lm,mkpjl->jkp", {&p.gInv, &comm});
    c += ein("lm,mpjkl->jkp", {&p.gInv, &comm});
    return c;
}

double worst(std::initializer_list<double> r) {
    double m = 0.0;
    for (double x : r) m = std::max(m, x);
    return m;
}

std::vector<IdentityCheck> build_catalog() {
    std::vector<IdentityCheck> c;
    auto add = [&](std::string id, std::string name, std::string desc, std::string anchor,
                   Applicability a, std::function<double(const EvalContext&)> f) {
        c.push_back({std::move(id), std::move(name), std::move(desc), std::move(anchor), a,
                     std::move(f)});
    };
    using A = Applicability;

    add("ID-01", "gTilde-two-ways", "quadratic expression in phi equals |phi|^2 g",
        "conformal-metric", A::Both, [](const EvalContext& x) {
            const auto& p = x.point();
            return residual(gtilde_quadratic(p.phi, p.omegaInv), p.normPhiSq * p.g);
        });
    add("ID-02", "volume", "det g equals det omega", "volume-form", A::Both,
        [](const EvalContext& x) {
            const auto& p = x.point();
            return residual(det6(p.g), det6(p.omega));
        });
    add("ID-03", "J-on-phi", "J acting on two slots is -1, on one slot is slot independent",
        "J-action-phi", A::Both, [](const EvalContext& x) {
            const auto& p = x.point();
            const T j0 = apply_J(p.phi, 0, p.J), j1 = apply_J(p.phi, 1, p.J),
                    j2 = apply_J(p.phi, 2, p.J);
            const T m = -1.0 * p.phi;
            return worst({residual(apply_J(j0, 1, p.J), m), residual(apply_J(j0, 2, p.J), m),
                          residual(apply_J(j1, 2, p.J), m), residual(j0, j1), residual(j1, j2)});
        });
    add("ID-04", "bilinear-omega", "phi phi contracted once with omega^-1", "bilinear-contractions",
        A::Both, [](const EvalContext& x) {
            const auto& p = x.point();
            const T lhs = ein("ij,iab,jcd->abcd", {&p.omegaInv, &p.phi, &p.phi});
            T rhs = ein("ac,bd->abcd", {&p.omega, &p.g});
            rhs += ein("bd,ac->abcd", {&p.omega, &p.g});
            rhs -= ein("bc,ad->abcd", {&p.omega, &p.g});
            rhs -= ein("ad,bc->abcd", {&p.omega, &p.g});
            rhs *= p.normPhiSq / 4.0;
            return residual(lhs, rhs);
        });
    add("ID-05", "bilinear-metric", "phi phi contracted once with g^-1", "bilinear-contractions",
        A::Both, [](const EvalContext& x) {
            const auto& p = x.point();
            const T lhs = ein("ij,iab,jcd->abcd", {&p.gInv, &p.phi, &p.phi});
            T rhs = ein("ac,bd->abcd", {&p.g, &p.g});
            rhs += ein("ca,bd->abcd", {&p.omega, &p.omega});
            rhs -= ein("ad,cb->abcd", {&p.omega, &p.omega});
            rhs -= ein("bc,ad->abcd", {&p.g, &p.g});
            rhs *= p.normPhiSq / 4.0;
            return residual(lhs, rhs);
        });
    add("ID-06", "hat-bilinear", "phi^ phi contracted twice with omega^-1 gives |phi|^2 omega",
        "hat-bilinear", A::Both, [](const EvalContext& x) {
            const auto& p = x.point();
            const T lhs =
                ein("lkp,iab,ka,pb->li", {&p.phiHat, &p.phi, &p.omegaInv, &p.omegaInv});
            return residual(lhs, p.normPhiSq * p.omega);
        });
    add("ID-07", "N-(0,2)-type", "J moves freely between the slots of N", "N-type-02", A::Both,
        [](const EvalContext& x) {
            const auto& p = x.point();
            const T JN = -1.0 * ein("kp,pij->kij", {&p.J, &p.N});
            return worst({residual(ein("kpj,pi->kij", {&p.N, &p.J}), JN),
                          residual(ein("kip,pj->kij", {&p.N, &p.J}), JN),
                          residual(ein("pjk,pi->ijk", {&p.Nl, &p.J}),
                                   ein("ipk,pj->ijk", {&p.Nl, &p.J})),
                          residual(ein("pjk,pi->ijk", {&p.Nl, &p.J}),
                                   ein("ijp,pk->ijk", {&p.Nl, &p.J}))});
        });
    add("ID-08", "N-Bianchi", "cyclic sum of N_{ijk} vanishes", "N-bianchi", A::Both,
        [](const EvalContext& x) {
            const auto& p = x.point();
            const T s = p.Nl + permute(p.Nl, {1, 2, 0}) + permute(p.Nl, {2, 0, 1});
            return residual(s, T(s.signature()), {&p.Nl});
        });
    add("ID-09", "gradJ", "nabla J in terms of N", "grad-J", A::Both, [](const EvalContext& x) {
        const auto& p = x.point();
        const NData n(p);
        return residual(p.nablaJ, -2.0 * ein("kp,ijp->ikj", {&p.J, &n.N3}));
    });
    add("ID-10", "qua-N", "quadratic expressions in N", "quadratic-N", A::Both,
        [](const EvalContext& x) {
            const auto& p = x.point();
            const NData n(p);
            return worst({residual(n.Nm, 2.0 * n.Np - (0.25 * n.Nsq) * p.g),
                          residual(n.Nsq, full(p.gInv, n.Np)),
                          residual(n.Nsq, 2.0 * full(p.gInv, n.Nm))});
        });
    add("ID-11", "N-phi-switch", "N^p_{ij} phi_{pkl} is antisymmetric under (ij) <-> (kl)",
        "N-phi-switch", A::Both, [](const EvalContext& x) {
            const auto& p = x.point();
            return residual(ein("pij,pkl->ijkl", {&p.N, &p.phi}),
                            -1.0 * ein("pkl,pij->ijkl", {&p.N, &p.phi}));
        });
    add("ID-12", "frakD-phi", "projected derivative of phi and phi^ through alpha", "frakD-phi",
        A::Both, [](const EvalContext& x) {
            const auto& p = x.point();
            const T alJ = apply_J(p.alpha, 0, p.J);
            T r1 = -1.0 * outer(p.alpha, p.phi) - outer(alJ, p.phiHat);
            r1 *= 0.5;
            T r2 = outer(alJ, p.phi) - outer(p.alpha, p.phiHat);
            r2 *= 0.5;
            return worst({residual(p.frakDphi, r1), residual(p.frakDphiHat, r2)});
        });
    add("ID-13", "riemann-J", "J acting on the last pair of Rm", "riemann-J", A::Jet,
        [](const EvalContext& x) {
            const auto& p = x.point();
            T B = -2.0 * p.frakDN + 2.0 * permute(p.frakDN, {1, 0, 2, 3});
            B -= 2.0 * ein("aij,akl->ijkl", {&p.N, &p.Nl});
            const T lhs = ein("jiab,ak,bl->ijkl", {&p.riemannLower, &p.J, &p.J});
            const T R = permute(p.riemannLower, {1, 0, 2, 3});
            return residual(lhs, R + B, {&B});
        });
    add("ID-14", "ricci-typeiia", "Ricci curvature through N and log|phi|^2", "ricci-typeiia",
        A::Jet, [](const EvalContext& x) {
            const auto& p = x.point();
            const NData n(p);
            T rhs = -1.0 * (n.DNs + tr(n.DNs)) - 2.0 * n.Nm + 0.5 * n.hess;
            rhs += 0.5 * ein("pi,qj,pq->ij", {&p.J, &p.J, &n.hess});
            return residual(p.ricci, rhs, {&n.hess, &n.DNs});
        });
    add("ID-15", "bochner-kodaira", "dd^+ phi for closed phi via rough Laplacian and commutators",
        "bochner-kodaira", A::Jet, [](const EvalContext& x) {
            const auto& p = x.point();
            const T lap = laplacian_of_phi(p);
            const T bk = commutator_terms(p) - lap;
            return residual(p.ddCodiffPhi, bk, {&lap});
        });
    add("ID-16", "E-N-contraction", "E-N contraction paired with phi", "E-N-contraction", A::Jet,
        [](const EvalContext& x) {
            const auto& p = x.point();
            const NData n(p);
            T E = ein("lkp,mjl->mjkp", {&p.phi, &n.N3});
            E += ein("jlp,mkl->mjkp", {&p.phi, &n.N3});
            E += ein("jkl,mpl->mjkp", {&p.phi, &n.N3});
            T l1 = ein("lm,mxkp,ljx->jkp", {&p.gInv, &E, &n.N3});
            l1 += ein("lm,mjxp,lkx->jkp", {&p.gInv, &E, &n.N3});
            l1 += ein("lm,mjkx,lpx->jkp", {&p.gInv, &E, &n.N3});
            return residual(pair(p, l1), (0.5 * p.normPhiSq * n.Nsq) * p.g);
        });
    add("ID-17", "divergence-E", "divergence of E paired with phi and symmetrized vanishes",
        "E-divergence", A::Jet, [](const EvalContext& x) {
            const auto& p = x.point();
            const NData n(p);
            T t = ein("ml,mlu,ujkp->jkp", {&p.gInv, &n.N3, &p.frakDphi});
            t += ein("ml,mju,lukp->jkp", {&p.gInv, &n.N3, &p.frakDphi});
            t += ein("ml,mku,ljup->jkp", {&p.gInv, &n.N3, &p.frakDphi});
            t += ein("ml,mpu,ljku->jkp", {&p.gInv, &n.N3, &p.frakDphi});
            const T s = psym(p, t), pr = pair(p, t);
            return residual(s, T(s.signature()), {&pr});
        });
    add("ID-18", "laplacian-contribution", "rough Laplacian of phi paired with phi", "laplacian-contribution",
        A::Jet, [](const EvalContext& x) {
            const auto& p = x.point();
            const NData n(p);
            return residual(psym(p, laplacian_of_phi(p)), (p.normPhiSq * (n.divA + n.Nsq)) * p.g);
        });
    add("ID-19", "curvature-commutators", "curvature commutators paired with phi, with and without F",
        "curvature-commutators", A::Jet, [](const EvalContext& x) {
            const auto& p = x.point();
            const NData n(p);
            const double n2 = p.normPhiSq;
            const T lhs = psym(p, commutator_terms(p));
            const T Rm = raise_lower(p.riemann, 0, p.gInv);  // R^l_j^x_p
            T Ft = ein("ljxp,xkl->jkp", {&Rm, &p.phi});
            Ft -= ein("lpxj,xkl->jkp", {&Rm, &p.phi});
            Ft -= ein("ljxk,xpl->jkp", {&Rm, &p.phi});
            Ft += ein("lkxj,xpl->jkp", {&Rm, &p.phi});
            Ft += ein("lpxk,xjl->jkp", {&Rm, &p.phi});
            Ft -= ein("lkxp,xjl->jkp", {&Rm, &p.phi});
            const T F = psym(p, Ft);
            const T RJJ = ein("aj,bi,ab->ij", {&p.J, &p.J, &p.ricci});
            T l4 = n2 * (-2.0 * tr(p.ricci) + p.ricci + RJJ) - (n2 * p.scalarR) * p.g;
            l4 += F;
            const T A1 = ein("ai,bl,ablj->ij", {&p.J, &p.J, &p.riemann});  // R_{Ji,Jl}^l_j
            const T A3 = ein("ai,pl,ajlp->ij", {&p.J, &p.J, &p.riemann});  // R_{Ji,j}^l_{Jl}
            T base = -2.0 * tr(p.ricci) + p.ricci + RJJ - p.scalarR * p.g;
            base -= A1 + tr(A1);
            base += 2.0 * p.ricci - 2.0 * (n.DNs + tr(n.DNs)) + 2.0 * n.aN;
            base += 4.0 * n.Nm - 4.0 * n.Np;
            const T l5 = n2 * (base + A3 + tr(A3));
            return worst({residual(lhs, l4, {&F}), residual(lhs, l5)});
        });
    add("ID-20", "commutators-scalar-curvature", "curvature commutators reduced to scalar curvature and D N",
        "curvature-reduced", A::Jet, [](const EvalContext& x) {
            const auto& p = x.point();
            const NData n(p);
            T l6 = -p.scalarR * p.g + 2.0 * (n.DNk + tr(n.DNk)) + 2.0 * n.aN;
            l6 += 4.0 * n.Nm - 8.0 * n.Np;
            l6 *= p.normPhiSq;
            return residual(psym(p, commutator_terms(p)), l6);
        });
    add("ID-21", "bochner-contribution", "-|phi|^2 dd^+ phi paired with phi", "bochner-contribution", A::Jet,
        [](const EvalContext& x) {
            const auto& p = x.point();
            const NData n(p);
            const double n2 = p.normPhiSq;
            T l7 = (p.scalarR + n.divA + n.Nsq) * p.g - 2.0 * (n.DNk + tr(n.DNk));
            l7 += -2.0 * n.aN - 4.0 * n.Nm + 8.0 * n.Np;
            l7 *= n2 * n2;
            return residual(psym(p, -n2 * p.ddCodiffPhi), l7);
        });
    add("ID-22", "grad-dagger", "-d|phi|^2 ^ d^+ phi paired with phi", "grad-dagger",
        A::Jet, [](const EvalContext& x) {
            const auto& p = x.point();
            const NData n(p);
            const double n2 = p.normPhiSq;
            return residual(psym(p, x.laplacian().gradWedge), (-2.0 * n2 * n2) * n.aN);
        });
    add("ID-23", "DN-switch", "derivative of the N-phi switch identity", "DN-switch", A::Jet,
        [](const EvalContext& x) {
            const auto& p = x.point();
            const NData n(p);
            const T DNup = raise_lower(p.frakDN, 1, p.gInv);  // D_k N^p_{ij}
            const T NJ = ein("pxb,bl->pxl", {&p.N, &p.J});  // N^p_{x,Jl}
            const T lhs = ein("kpij,pxl->kijxl", {&DNup, &p.phi});
            T rhs = -1.0 * ein("kpxl,pij->kijxl", {&DNup, &p.phi});
            rhs += ein("pxl,k,pij->kijxl", {&NJ, &n.alJ, &p.phi});
            return residual(lhs, rhs);
        });
    add("ID-24", "d-iota", "d(i_{grad |phi|^2} phi) paired with phi", "d-iota", A::Jet,
        [](const EvalContext& x) {
            const auto& p = x.point();
            const NData n(p);
            const double n2 = p.normPhiSq;
            T l = 0.5 * (p.nablaAlpha + tr(p.nablaAlpha));
            l -= outer(p.alpha, p.alpha);
            l += outer(n.alJ, n.alJ);
            l += (n.divA - 2.0 * n.a2) * p.g;
            T jj = ein("pj,qi,pq->ij", {&p.J, &p.J, &p.nablaAlpha});
            jj += ein("pi,qj,pq->ij", {&p.J, &p.J, &p.nablaAlpha});
            l -= 0.5 * jj;
            l *= n2 * n2;
            return residual(psym(p, x.interiorTerm()), l);
        });
    add("ID-25", "d-Ndagger", "d(|phi|^2 N^+ phi) paired with phi", "d-Ndagger", A::Jet,
        [](const EvalContext& x) {
            const auto& p = x.point();
            const NData n(p);
            const double n2 = p.normPhiSq;
            T l = 2.0 * (n.DNk + tr(n.DNk)) + 4.0 * n.aN - full(p.gInv, n.Nm) * p.g;
            l += -4.0 * n.Np + 2.0 * n.Nm;
            l *= n2 * n2;
            return residual(psym(p, 0.5 * x.laplacian().ndagger), l);
        });
    add("ID-26", "metric-velocity", "metric velocity from the flow equals the closed formula",
        "metric-flow", A::Both, [](const EvalContext& x) {
            const auto& p = x.point();
            const MetricVelocity v = metric_velocity_from_phidot(p, x.laplacian().twoTerm);
            const T th = metric_velocity_theorem1(p);
            const T ric = (2.0 * p.normPhiSq) * p.ricci;
            const T hs = (2.0 * p.normPhiSq) * p.nablaAlpha;
            return residual(v.gdot, th, {&ric, &hs});
        });
    add("ID-27", "flow-form-equivalence", "dLd(|phi|^2 phi^) against the Laplacian form",
        "flow-forms", A::Jet, [](const EvalContext& x) {
            const auto& L = x.laplacian();
            return residual(x.original(), L.twoTerm,
                            {&L.ddCodiff, &L.gradWedge, &L.interior, &L.ndagger});
        });
    add("ID-28", "ndagger-two-forms", "N^+ phi as a single contraction", "N-dagger", A::Both,
        [](const EvalContext& x) {
            const auto& p = x.point();
            const T Nuu = raise_lower(raise_lower(p.Nl, 0, p.gInv), 2, p.gInv);
            return residual(ndagger(p.N, p.phi, p.gInv),
                            2.0 * ein("mjl,mkl->kj", {&Nuu, &p.phi}));
        });
    add("ID-29", "dilaton", "d_t log|phi|^2 from det g~ against the dilaton formula", "dilaton",
        A::Jet, [](const EvalContext& x) {
            const auto& p = x.point();
            const MetricVelocity v = metric_velocity_from_phidot(p, x.laplacian().twoTerm);
            return residual(v.dLogNormSq, dilaton_velocity(p));
        });
    return c;
}

}  // namespace

const std::vector<IdentityCheck>& identity_catalog() {
    static const std::vector<IdentityCheck> c = build_catalog();
    return c;
}

const IdentityCheck& find_check(const std::string& id) {
    for (const auto& c : identity_catalog())
        if (c.id == id) return c;
    throw std::invalid_argument("unknown check '" + id + "'");
}

double run_check(const IdentityCheck& check, const EvalContext& ctx) {
    if (!check.applies_to(ctx.kind()))
        throw ApplicabilityError(check.id + " does not apply to this backend");
    return check.evaluator(ctx);
}

bool SuiteReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

SuiteReport run_suite(const SuiteConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (!(cfg.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
    std::vector<const IdentityCheck*> checks;
    if (cfg.checkFilter.empty()) {
        for (const auto& c : identity_catalog()) checks.push_back(&c);
    } else {
        for (const auto& id : cfg.checkFilter) checks.push_back(&find_check(id));
    }
    std::vector<AlgebraEntry> algebras;
    if (cfg.invariant)
        for (const auto& a : cfg.algebras)
            algebras.push_back(cfg.catalog.empty() ? resolve_algebra(a) : resolve_algebra(a, cfg.catalog));

    struct Task {
        int algebra;  // -1 for a jet sample
        int trial;
    };
    std::vector<Task> tasks;
    if (cfg.jet)
        for (int t = 0; t < cfg.trials; ++t) tasks.push_back({-1, t});
    for (int a = 0; a < static_cast<int>(algebras.size()); ++a)
        for (int t = 0; t < cfg.trials; ++t) tasks.push_back({a, t});

    const std::size_t nc = checks.size();
    std::vector<std::vector<double>> results(tasks.size(), std::vector<double>(nc, -1.0));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failMutex;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                const Task& t = tasks[i];
                std::shared_ptr<const Backend> b;
                if (t.algebra < 0) {
                    JetSampleOptions o;
                    o.scale = cfg.scale;
                    b = make_backend(sample_typeiia_jet(trial_seed(cfg.seed, t.trial, 0), o));
                } else {
                    InvariantSampleOptions o;
                    o.scale = cfg.scale;
                    const auto& a = algebras[t.algebra];
                    b = make_backend(sample_typeiia_invariant(
                        a.name, a.c, trial_seed(cfg.seed, t.trial, 1 + t.algebra), o));
                }
                EvalContext ctx(b);
                for (std::size_t k = 0; k < nc; ++k)
                    if (checks[k]->applies_to(ctx.kind()))
                        results[i][k] = std::abs(checks[k]->evaluator(ctx));
            } catch (...) {
                std::lock_guard<std::mutex> lk(failMutex);
                if (!failure) failure = std::current_exception();
                next.store(tasks.size());
            }
        }
    };
    int nthreads = cfg.threads > 0 ? cfg.threads
                                   : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    nthreads = std::min<int>(nthreads, static_cast<int>(tasks.size()));
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    SuiteReport rep;
    rep.seed = cfg.seed;
    rep.trials = cfg.trials;
    rep.tolerance = cfg.tolerance;
    for (std::size_t k = 0; k < nc; ++k) {
        CheckSummary s;
        s.id = checks[k]->id;
        s.anchor = checks[k]->anchor;
        double sum = 0.0;
        for (const auto& r : results) {
            if (r[k] < 0.0) continue;  // not applicable
            s.max = std::isfinite(r[k]) ? std::max(s.max, r[k]) : HUGE_VAL;
            sum += r[k];
            ++s.count;
        }
        if (s.count == 0) continue;  // no applicable sample was drawn
        s.mean = sum / s.count;
        s.pass = s.max <= cfg.tolerance;
        rep.checks.push_back(s);
    }
    return rep;
}

SuiteReport run_on_backend(std::shared_ptr<const Backend> backend, const SuiteConfig& cfg) {
    if (!(cfg.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
    std::vector<const IdentityCheck*> checks;
    if (cfg.checkFilter.empty()) {
        for (const auto& c : identity_catalog()) checks.push_back(&c);
    } else {
        for (const auto& id : cfg.checkFilter) checks.push_back(&find_check(id));
    }
    const EvalContext ctx(std::move(backend));
    SuiteReport rep;
    rep.seed = cfg.seed;
    rep.trials = 1;
    rep.tolerance = cfg.tolerance;
    for (const IdentityCheck* c : checks) {
        if (!c->applies_to(ctx.kind())) continue;
        CheckSummary s;
        s.id = c->id;
        s.anchor = c->anchor;
        const double r = run_check(*c, ctx);
        s.max = s.mean = std::isfinite(r) ? r : HUGE_VAL;
        s.count = 1;
        s.pass = s.max <= cfg.tolerance;
        rep.checks.push_back(s);
    }
    return rep;
}

}  // namespace iia
