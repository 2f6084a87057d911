#include "iia/geometry.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace iia {

const std::vector<std::array<int, 3>>& triples() {
    static const std::vector<std::array<int, 3>> t = [] {
        std::vector<std::array<int, 3>> v;
        for (int a = 0; a < kDim; ++a)
            for (int b = a + 1; b < kDim; ++b)
                for (int c = b + 1; c < kDim; ++c) v.push_back({a, b, c});
        return v;
    }();
    return t;
}

int pair_index(int a, int b) {
    if (a > b) std::swap(a, b);
    // rows a = 0..5 hold 6, 5, .., 1 entries
    return a * kDim - a * (a - 1) / 2 + (b - a);
}

TensorD form_from_coeffs(const std::array<double, 20>& v) {
    TensorD f = TensorD::covariant(3);
    const auto& T = triples();
    fill_alternating(f, [&](const int* I) {
        for (std::size_t n = 0; n < T.size(); ++n)
            if (T[n][0] == I[0] && T[n][1] == I[1] && T[n][2] == I[2]) return v[n];
        return 0.0;
    });
    return f;
}

std::array<double, 20> coeffs_from_form(const TensorD& f) {
    std::array<double, 20> v{};
    const auto& T = triples();
    for (std::size_t n = 0; n < T.size(); ++n) v[n] = f(T[n][0], T[n][1], T[n][2]);
    return v;
}

TensorJ jet_form(const JetCoefficients& jc) {
    TensorJ f = TensorJ::covariant(3);
    const auto& T = triples();
    fill_alternating(f, [&](const int* I) {
        for (std::size_t n = 0; n < T.size(); ++n) {
            if (T[n][0] != I[0] || T[n][1] != I[1] || T[n][2] != I[2]) continue;
            const int N = static_cast<int>(n);
            Jet2 j(jc.value(N));
            for (int a = 0; a < kDim; ++a) {
                j.grad[a] = jc.gradient(N, a);
                for (int b = 0; b < kDim; ++b) j.h(a, b) = jc.hessian(N, a, b);
            }
            return j;
        }
        return Jet2(0.0);
    });
    return f;
}

// ---------------------------------------------------------------- backends

JetChartBackend::JetChartBackend(const TensorD& omega, const JetCoefficients& coeffs)
    : omegaD_(omega), omega_(lift(omega)), coeffs_(coeffs), phi_(jet_form(coeffs)),
      phiD_(values_of(phi_)), zero_c_({Var::Contra, Var::Co, Var::Co}) {
    if (omega.rank() != 2) throw RankError("omega must be a 2-form");
}

TensorJ JetChartBackend::partial(const TensorJ& t) const {
    std::vector<Var> sig{Var::Co};
    sig.insert(sig.end(), t.signature().begin(), t.signature().end());
    TensorJ out(sig);
    const std::size_t n = t.size();
    for (int m = 0; m < kDim; ++m)
        for (std::size_t o = 0; o < n; ++o) out[m * n + o] = jet_partial(t[o], m);
    return out;
}

TensorJ JetChartBackend::exterior_d(const TensorJ& form) const {
    TensorJ d = alternate(partial(form));
    d *= static_cast<double>(form.rank() + 1);
    return d;
}

TensorD JetChartBackend::partial(const TensorD&) const {
    throw std::logic_error("jet chart: derivatives need jet-valued fields");
}

TensorD JetChartBackend::exterior_d(const TensorD&) const {
    throw std::logic_error("jet chart: derivatives need jet-valued fields");
}

LieAlgebraBackend::LieAlgebraBackend(const TensorD& c, const TensorD& omega, const TensorD& phi)
    : c_(c), omegaD_(omega), phiD_(phi), omega_(lift(omega)), phi_(lift(phi)) {
    if (c.rank() != 3 || c.variance(0) != Var::Contra)
        throw SlotError("structure constants must be (Contra,Co,Co)");
}

TensorJ LieAlgebraBackend::partial(const TensorJ& t) const {
    std::vector<Var> sig{Var::Co};
    sig.insert(sig.end(), t.signature().begin(), t.signature().end());
    return TensorJ(sig);
}

TensorJ LieAlgebraBackend::exterior_d(const TensorJ& form) const {
    return ce_differential(c_, form);
}

TensorD LieAlgebraBackend::partial(const TensorD& t) const {
    std::vector<Var> sig{Var::Co};
    sig.insert(sig.end(), t.signature().begin(), t.signature().end());
    return TensorD(sig);
}

TensorD LieAlgebraBackend::exterior_d(const TensorD& form) const {
    return ce_differential(c_, form);
}

template <class S>
Tensor<S> ce_differential(const TensorD& c, const Tensor<S>& form) {
    const int k = form.rank();
    for (Var v : form.signature())
        if (v != Var::Co) throw SlotError("ce_differential: argument is not a form");
    Tensor<S> out = Tensor<S>::covariant(k + 1);
    int idx[kMaxRank], rest[kMaxRank];
    for (std::size_t o = 0; o < out.size(); ++o) {
        out.unravel(o, idx);
        S acc(0.0);
        for (int a = 0; a <= k; ++a)
            for (int b = a + 1; b <= k; ++b) {
                int n = 1;
                for (int q = 0; q <= k; ++q)
                    if (q != a && q != b) rest[n++] = idx[q];
                const double sg = ((a + b) % 2 == 0) ? 1.0 : -1.0;
                for (int m = 0; m < kDim; ++m) {
                    const double cm = c(m, idx[a], idx[b]);
                    if (cm == 0.0) continue;
                    rest[0] = m;
                    S term = form[form.offset(rest)];
                    term *= sg * cm;
                    acc += term;
                }
            }
        out[o] = acc;
    }
    return out;
}

template TensorD ce_differential(const TensorD&, const TensorD&);
template TensorJ ce_differential(const TensorD&, const TensorJ&);

double jacobi_defect(const TensorD& c) {
    double worst = 0.0;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
            for (int k = 0; k < kDim; ++k)
                for (int l = 0; l < kDim; ++l) {
                    double s = 0.0;
                    for (int m = 0; m < kDim; ++m)
                        s += c(m, i, j) * c(l, k, m) + c(m, j, k) * c(l, i, m) +
                             c(m, k, i) * c(l, j, m);
                    worst = std::max(worst, std::abs(s));
                }
    return worst;
}

TensorD parse_structure_notation(const std::string& notation) {
    TensorD c({Var::Contra, Var::Co, Var::Co});
    std::vector<std::string> entries;
    {
        std::stringstream ss(notation);
        std::string e;
        while (std::getline(ss, e, ',')) {
            std::string t;
            for (char ch : e)
                if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
            entries.push_back(t);
        }
    }
    if (entries.size() != static_cast<std::size_t>(kDim))
        throw std::invalid_argument("structure notation needs 6 comma-separated entries");
    for (int k = 0; k < kDim; ++k) {
        const std::string& e = entries[k];
        if (e == "0") continue;
        std::size_t p = 0;
        bool any = false;
        while (p < e.size()) {
            double sg = 1.0;
            if (e[p] == '+' || e[p] == '-') {
                sg = e[p] == '-' ? -1.0 : 1.0;
                ++p;
            } else if (any) {
                throw std::invalid_argument("bad term separator in '" + e + "'");
            }
            if (p + 2 > e.size() || e[p] < '1' || e[p] > '6' || e[p + 1] < '1' || e[p + 1] > '6')
                throw std::invalid_argument("bad term in '" + e + "'");
            const int i = e[p] - '1', j = e[p + 1] - '1';
            if (i == j) throw std::invalid_argument("repeated index in '" + e + "'");
            // d e^k = e^{ij} corresponds to [e_i, e_j] = -e_k
            c(k, i, j) -= sg;
            c(k, j, i) += sg;
            p += 2;
            any = true;
        }
        if (!any) throw std::invalid_argument("empty entry in structure notation");
    }
    return c;
}

// ---------------------------------------------------------------- geometry

namespace {

template <class S>
Tensor<S> constant_tensor(const TensorD& t) {
    if constexpr (std::is_same_v<S, double>) return t;
    else return lift(t);
}

}  // namespace

template <class S>
Tensor<S> levi_civita(const Backend& b, const Tensor<S>& g, const Tensor<S>& gInv) {
    const Tensor<S> dg = b.partial(g);  // dg[m,i,j] = d_m g_ij
    const TensorD& c = b.brackets();
    Tensor<S> cl({Var::Co, Var::Co, Var::Co});  // c_{k,ij}
    for (int k = 0; k < kDim; ++k)
        for (int i = 0; i < kDim; ++i)
            for (int j = 0; j < kDim; ++j) {
                S acc(0.0);
                for (int m = 0; m < kDim; ++m) {
                    const double cm = c(m, i, j);
                    if (cm != 0.0) acc += g(k, m) * cm;
                }
                cl(k, i, j) = acc;
            }
    Tensor<S> low({Var::Co, Var::Co, Var::Co});  // Gamma_{k;ij}
    for (int k = 0; k < kDim; ++k)
        for (int i = 0; i < kDim; ++i)
            for (int j = 0; j < kDim; ++j) {
                S v = dg(i, j, k) + dg(j, i, k) - dg(k, i, j) + cl(k, i, j) - cl(i, j, k) +
                      cl(j, k, i);
                v *= 0.5;
                low(k, i, j) = v;
            }
    return einsum<S>("kl,lij->kij", {&gInv, &low});
}

template <class S>
Tensor<S> riemann_tensor(const Backend& b, const Tensor<S>& gamma) {
    const Tensor<S> dG = b.partial(gamma);  // dG[i,k,j,l] = d_i Gamma^k_jl
    Tensor<S> R = permute(dG, {0, 2, 1, 3});  // [i,j,k,l]
    R -= permute(dG, {2, 0, 1, 3});
    // Gamma^k_im Gamma^m_jl - Gamma^k_jm Gamma^m_il
    Tensor<S> GG = einsum<S>("kim,mjl->ijkl", {&gamma, &gamma});
    R += GG;
    R -= permute(GG, {1, 0, 2, 3});
    // - c^m_ij Gamma^k_ml
    const Tensor<S> c = constant_tensor<S>(b.brackets());
    R -= einsum<S>("mij,kml->ijkl", {&c, &gamma});
    return R;
}

template <class S>
Tensor<S> nijenhuis_tensor(const Tensor<S>& J, const Tensor<S>& nablaJ) {
    // nablaJ[r,k,j] = nabla_r J^k_j
    Tensor<S> t = einsum<S>("ri,rkj->kij", {&J, &nablaJ});
    t += einsum<S>("kr,jri->kij", {&J, &nablaJ});
    Tensor<S> N = t - permute(t, {0, 2, 1});
    N *= 0.25;
    return N;
}

TensorD nijenhuis_from_brackets(const TensorD& c, const TensorD& J) {
    TensorD JJc = einsum<double>("ai,bj,kab->kij", {&J, &J, &c});
    TensorD Jc1 = einsum<double>("km,ai,maj->kij", {&J, &J, &c});
    TensorD Jc2 = einsum<double>("km,bj,mib->kij", {&J, &J, &c});
    TensorD N = JJc - c - Jc1 - Jc2;
    N *= 0.25;
    return N;
}

namespace {

template <class S, class F>
Tensor<S> slotwise(const Tensor<S>& t, Tensor<S> out, F&& add_slot) {
    const int r = t.rank();
    const std::size_t n = t.size();
    for (int s = 0; s < r; ++s) {
        const std::size_t st = ipow6(r - 1 - s);
        for (std::size_t o = 0; o < n; ++o) {
            const int is = static_cast<int>((o / st) % kDim);
            const std::size_t base = o - is * st;
            for (int m = 0; m < kDim; ++m) add_slot(out[m * n + o], s, m, is, base, st);
        }
    }
    return out;
}

}  // namespace

template <class S>
GeometryT<S>::GeometryT(std::shared_ptr<const Backend> backend, const StructureOptions& opt)
    : backend_(std::move(backend)) {
    if (!backend_) throw std::invalid_argument("null backend");
    st_ = build_structure(backend_->omega_as<S>(), backend_->phi_as<S>(), opt);
    gamma_ = levi_civita(*backend_, st_.g, st_.gInv);
    nablaJ_ = nabla(st_.J);
    N_ = nijenhuis_tensor(st_.J, nablaJ_);
    Nl_ = einsum<S>("km,mij->kij", {&st_.g, &N_});
    Nmix_ = raise_lower(Nl_, 2, st_.gInv);
    alpha_ = backend_->partial(Ten::scalar(log(st_.normPhiSq)));
    alpha_ *= -1.0;
}

template <class S>
const Tensor<S>& GeometryT<S>::riemann() const {
    std::call_once(rOnce_, [this] { R_ = riemann_tensor(*backend_, gamma_); });
    return R_;
}

template <class S>
Tensor<S> GeometryT<S>::nabla(const Ten& t) const {
    const Ten& G = gamma_;
    return slotwise(t, backend_->partial(t),
                    [&](S& acc, int s, int m, int is, std::size_t base, std::size_t st) {
                        if (t.variance(s) == Var::Contra) {
                            // + Gamma^a_{mq} T^{..q..}, a = is
                            for (int q = 0; q < kDim; ++q)
                                detail::mul_acc(acc, G(is, m, q), t[base + q * st]);
                        } else {
                            // - Gamma^q_{mb} T_{..q..}, b = is
                            S sum(0.0);
                            for (int q = 0; q < kDim; ++q)
                                detail::mul_acc(sum, G(q, m, is), t[base + q * st]);
                            acc -= sum;
                        }
                    });
}

template <class S>
Tensor<S> GeometryT<S>::frak_d(const Ten& t) const {
    const Ten& Nm = Nmix_;  // N_{mp}^a
    return slotwise(t, nabla(t),
                    [&](S& acc, int s, int m, int is, std::size_t base, std::size_t st) {
                        if (t.variance(s) == Var::Contra) {
                            S sum(0.0);
                            for (int p = 0; p < kDim; ++p)
                                detail::mul_acc(sum, Nm(m, p, is), t[base + p * st]);
                            acc -= sum;
                        } else {
                            for (int p = 0; p < kDim; ++p)
                                detail::mul_acc(acc, Nm(m, is, p), t[base + p * st]);
                        }
                    });
}

template <class S>
Tensor<S> GeometryT<S>::ricci() const {
    Ten Rl = einsum<S>("jm,ipmq->ipjq", {&st_.g, &riemann()});
    return einsum<S>("pq,ipjq->ij", {&st_.gInv, &Rl});
}

template <class S>
Tensor<S> GeometryT<S>::exterior_d_nabla(const Ten& form) const {
    Ten d = alternate(nabla(form));
    d *= static_cast<double>(form.rank() + 1);
    return d;
}

template <class S>
Tensor<S> GeometryT<S>::codifferential(const Ten& form) const {
    if (form.rank() < 1) throw RankError("codifferential of a 0-form");
    const Ten nb = nabla(form);
    const int r = form.rank();
    std::vector<Var> sig(form.signature().begin() + 1, form.signature().end());
    Ten out(sig);
    const std::size_t n = out.size();
    const std::size_t blk = ipow6(r);
    for (int l = 0; l < kDim; ++l)
        for (int m = 0; m < kDim; ++m) {
            const S& w = st_.gInv(l, m);
            for (std::size_t o = 0; o < n; ++o) {
                S term = w * nb[m * blk + l * n + o];
                out[o] -= term;
            }
        }
    return out;
}

template <class S>
PointGeometry evaluate_point(const GeometryT<S>& geo) {
    using Ten = Tensor<S>;
    const auto& st = geo.structure();
    PointGeometry p;
    p.kind = geo.backend().kind();
    p.omega = values_of(st.omega);
    p.omegaInv = values_of(st.omegaInv);
    p.phi = values_of(st.phi);
    p.phiHat = values_of(st.phiHat);
    p.J = values_of(st.J);
    p.g = values_of(st.g);
    p.gInv = values_of(st.gInv);
    p.gTilde = values_of(st.gTilde);
    p.normPhiSq = value_of(st.normPhiSq);
    p.brackets = geo.backend().brackets();
    p.gamma = values_of(geo.christoffel());
    p.nablaG = values_of(geo.nabla(st.g));
    p.nablaJ = values_of(geo.nabla_J());
    p.N = values_of(geo.nijenhuis());
    p.Nl = values_of(geo.nijenhuis_lower());
    p.alpha = values_of(geo.alpha());
    p.nablaAlpha = values_of(geo.nabla(geo.alpha()));
    p.frakDphi = values_of(geo.frak_d(st.phi));
    p.frakDphiHat = values_of(geo.frak_d(st.phiHat));
    p.frakDJ = values_of(geo.frak_d(st.J));
    p.frakDg = values_of(geo.frak_d(st.g));
    p.frakDomega = values_of(geo.frak_d(st.omega));
    p.frakDN = values_of(geo.frak_d(geo.nijenhuis_lower()));
    p.riemann = values_of(geo.riemann());
    p.riemannLower = einsum<double>("km,ijml->ijkl", {&p.g, &p.riemann});
    p.ricci = values_of(geo.ricci());
    p.scalarR = einsum<double>("ij,ij->", {&p.gInv, &p.ricci})[0];
    const Ten nphi = geo.nabla(st.phi);
    p.nablaPhi = values_of(nphi);
    p.nablaNablaPhi = values_of(geo.nabla(nphi));
    p.dPhi = values_of(geo.exterior_d(st.phi));
    p.dPhiNabla = values_of(geo.exterior_d_nabla(st.phi));
    const Ten cod = geo.codifferential(st.phi);
    p.codiffPhi = values_of(cod);
    p.ddCodiffPhi = values_of(geo.exterior_d(cod));
    p.gradNormPhiSq = values_of(geo.partial(Ten::scalar(st.normPhiSq)));
    return p;
}

#define IIA_GEOMETRY_INSTANTIATE(S)                                                        \
    template class GeometryT<S>;                                                           \
    template Tensor<S> levi_civita(const Backend&, const Tensor<S>&, const Tensor<S>&);    \
    template Tensor<S> riemann_tensor(const Backend&, const Tensor<S>&);                   \
    template Tensor<S> nijenhuis_tensor(const Tensor<S>&, const Tensor<S>&);               \
    template PointGeometry evaluate_point(const GeometryT<S>&);

IIA_GEOMETRY_INSTANTIATE(double)
IIA_GEOMETRY_INSTANTIATE(Jet2)

}  // namespace iia
