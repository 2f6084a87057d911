#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "iia/jets.hpp"
#include "iia/simd.hpp"

namespace iia {

class SlotError : public std::invalid_argument {
public:
    explicit SlotError(const std::string& w) : std::invalid_argument(w) {}
};

class RankError : public std::invalid_argument {
public:
    explicit RankError(const std::string& w) : std::invalid_argument(w) {}
};

enum class Var : std::uint8_t { Co, Contra };

inline constexpr int kMaxRank = 6;

inline std::size_t ipow6(int k) {
    std::size_t n = 1;
    for (int i = 0; i < k; ++i) n *= kDim;
    return n;
}

// Dense rank-k tensor over R^6. Slot 0 is the most significant index.
template <class S>
class Tensor {
public:
    Tensor() : comps_(1, S(0.0)) {}
    explicit Tensor(std::vector<Var> sig) : sig_(std::move(sig)) {
        if (sig_.size() > static_cast<std::size_t>(kMaxRank)) throw RankError("rank above 6");
        comps_.assign(ipow6(rank()), S(0.0));
    }
    Tensor(std::initializer_list<Var> sig) : Tensor(std::vector<Var>(sig)) {}

    static Tensor covariant(int k) { return Tensor(std::vector<Var>(k, Var::Co)); }
    static Tensor contravariant(int k) { return Tensor(std::vector<Var>(k, Var::Contra)); }
    static Tensor scalar(const S& s) {
        Tensor t;
        t.comps_[0] = s;
        return t;
    }

    int rank() const { return static_cast<int>(sig_.size()); }
    const std::vector<Var>& signature() const { return sig_; }
    Var variance(int slot) const { return sig_.at(slot); }
    std::size_t size() const { return comps_.size(); }
    std::vector<S>& comps() { return comps_; }
    const std::vector<S>& comps() const { return comps_; }
    S& operator[](std::size_t i) { return comps_[i]; }
    const S& operator[](std::size_t i) const { return comps_[i]; }

    template <class... I>
    S& operator()(I... idx) {
        return comps_[offset_of(idx...)];
    }
    template <class... I>
    const S& operator()(I... idx) const {
        return comps_[offset_of(idx...)];
    }

    std::size_t offset(const int* idx) const {
        std::size_t o = 0;
        for (int s = 0; s < rank(); ++s) o = o * kDim + idx[s];
        return o;
    }
    // Inverse of offset(); fills rank() entries.
    void unravel(std::size_t o, int* idx) const {
        for (int s = rank() - 1; s >= 0; --s) {
            idx[s] = static_cast<int>(o % kDim);
            o /= kDim;
        }
    }

    Tensor& operator+=(const Tensor& o) {
        check_same(o);
        for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] += o.comps_[i];
        return *this;
    }
    Tensor& operator-=(const Tensor& o) {
        check_same(o);
        for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] -= o.comps_[i];
        return *this;
    }
    Tensor& operator*=(double s) {
        for (auto& c : comps_) c *= s;
        return *this;
    }
    Tensor& scale(const S& s) {
        for (auto& c : comps_) c = c * s;
        return *this;
    }

    void check_same(const Tensor& o) const {
        if (o.sig_ != sig_) throw SlotError("signature mismatch");
    }

private:
    template <class... I>
    std::size_t offset_of(I... idx) const {
        static_assert(sizeof...(I) <= kMaxRank);
        const int arr[] = {static_cast<int>(idx)..., 0};
        if (static_cast<int>(sizeof...(I)) != rank()) throw RankError("wrong index count");
        return offset(arr);
    }

    std::vector<Var> sig_;
    std::vector<S> comps_;
};

template <class S>
Tensor<S> operator+(Tensor<S> a, const Tensor<S>& b) {
    return a += b;
}
template <class S>
Tensor<S> operator-(Tensor<S> a, const Tensor<S>& b) {
    return a -= b;
}
template <class S>
Tensor<S> operator*(double s, Tensor<S> a) {
    return a *= s;
}
template <class S>
Tensor<S> operator*(Tensor<S> a, double s) {
    return a *= s;
}

using TensorD = Tensor<double>;
using TensorJ = Tensor<Jet2>;

namespace detail {

inline void mul_acc(double& acc, double a, double b) { acc += a * b; }
inline void mul_acc(Jet2& acc, const Jet2& a, const Jet2& b) { simd::jet_fma(acc, a, b); }

inline int perm_sign(const int* p, int n) {
    int s = 1;
    int q[kMaxRank];
    std::copy(p, p + n, q);
    for (int i = 0; i < n; ++i)
        while (q[i] != i) {
            std::swap(q[i], q[q[i]]);
            s = -s;
        }
    return s;
}

}  // namespace detail

// Labelled contraction, e.g. einsum("iab,jkp,ka,pb->ij", {phi, phi, wInv, wInv}).
// Each repeated label must appear in exactly two slots of opposite variance;
// free labels keep the variance of their slot.
template <class S>
Tensor<S> einsum(std::string_view spec, std::initializer_list<const Tensor<S>*> ops) {
    const std::vector<const Tensor<S>*> in(ops);
    const auto arrow = spec.find("->");
    if (arrow == std::string_view::npos) throw SlotError("einsum spec needs '->'");
    std::vector<std::string> terms;
    {
        std::string_view lhs = spec.substr(0, arrow);
        std::size_t start = 0;
        while (true) {
            auto comma = lhs.find(',', start);
            terms.emplace_back(lhs.substr(start, comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
    }
    const std::string out_labels(spec.substr(arrow + 2));
    if (terms.size() != in.size()) throw SlotError("einsum operand count");

    std::string labels;
    std::vector<int> count(128, 0), first_var(128, -1);
    for (std::size_t t = 0; t < terms.size(); ++t) {
        if (static_cast<int>(terms[t].size()) != in[t]->rank())
            throw RankError("einsum term rank mismatch: " + terms[t]);
        for (std::size_t s = 0; s < terms[t].size(); ++s) {
            unsigned char c = terms[t][s];
            int v = static_cast<int>(in[t]->variance(static_cast<int>(s)));
            if (count[c] == 0) {
                labels.push_back(static_cast<char>(c));
                first_var[c] = v;
            } else if (first_var[c] == v) {
                throw SlotError(std::string("einsum pairs equal variances on label ") +
                                static_cast<char>(c));
            }
            ++count[c];
        }
    }
    std::vector<Var> osig;
    for (char c : out_labels) {
        unsigned char u = c;
        if (count[u] != 1) throw SlotError(std::string("bad output label ") + c);
        osig.push_back(static_cast<Var>(first_var[u]));
    }
    for (char c : labels) {
        unsigned char u = c;
        if (count[u] > 2) throw SlotError(std::string("label used more than twice: ") + c);
        if (count[u] == 1 && out_labels.find(c) == std::string::npos)
            throw SlotError(std::string("unpaired label missing from output: ") + c);
    }

    Tensor<S> out(osig);
    const int L = static_cast<int>(labels.size());
    const int nops = static_cast<int>(in.size());
    // stride[l][t]: offset step of operand t (t == nops is the output) for label l.
    std::vector<std::vector<std::size_t>> stride(L, std::vector<std::size_t>(nops + 1, 0));
    for (int l = 0; l < L; ++l) {
        for (int t = 0; t <= nops; ++t) {
            const std::string& term = t < nops ? terms[t] : out_labels;
            const int r = static_cast<int>(term.size());
            for (int s = 0; s < r; ++s)
                if (term[s] == labels[l]) stride[l][t] += ipow6(r - 1 - s);
        }
    }
    std::vector<int> idx(L, 0);
    std::vector<std::size_t> off(nops + 1, 0);
    const std::size_t total = ipow6(L);
    for (std::size_t it = 0; it < total; ++it) {
        if (nops == 1) {
            out[off[1]] += (*in[0])[off[0]];
        } else if (nops == 2) {
            detail::mul_acc(out[off[2]], (*in[0])[off[0]], (*in[1])[off[1]]);
        } else {
            S p = (*in[0])[off[0]];
            for (int t = 1; t < nops - 1; ++t) p = p * (*in[t])[off[t]];
            detail::mul_acc(out[off[nops]], p, (*in[nops - 1])[off[nops - 1]]);
        }
        for (int l = L - 1; l >= 0; --l) {
            if (++idx[l] < kDim) {
                for (int t = 0; t <= nops; ++t) off[t] += stride[l][t];
                break;
            }
            idx[l] = 0;
            for (int t = 0; t <= nops; ++t) off[t] -= stride[l][t] * (kDim - 1);
        }
    }
    return out;
}

// Reorder slots: result slot s is input slot perm[s].
template <class S>
Tensor<S> permute(const Tensor<S>& t, const std::vector<int>& perm) {
    const int r = t.rank();
    if (static_cast<int>(perm.size()) != r) throw RankError("permutation size");
    std::vector<Var> sig(r);
    for (int s = 0; s < r; ++s) sig[s] = t.variance(perm[s]);
    Tensor<S> out(sig);
    int idx[kMaxRank], src[kMaxRank];
    for (std::size_t o = 0; o < out.size(); ++o) {
        out.unravel(o, idx);
        for (int s = 0; s < r; ++s) src[perm[s]] = idx[s];
        out[o] = t[t.offset(src)];
    }
    return out;
}

template <class S>
Tensor<S> outer(const Tensor<S>& a, const Tensor<S>& b) {
    std::vector<Var> sig = a.signature();
    sig.insert(sig.end(), b.signature().begin(), b.signature().end());
    Tensor<S> out(sig);
    const std::size_t nb = b.size();
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < nb; ++j) out[i * nb + j] = a[i] * b[j];
    return out;
}

template <class S>
Tensor<S> contract(const Tensor<S>& t, int slotA, int slotB) {
    const int r = t.rank();
    if (slotA < 0 || slotB < 0 || slotA >= r || slotB >= r || slotA == slotB)
        throw SlotError("contract: bad slots");
    if (t.variance(slotA) == t.variance(slotB))
        throw SlotError("contract: slots have the same variance");
    std::vector<Var> sig;
    for (int s = 0; s < r; ++s)
        if (s != slotA && s != slotB) sig.push_back(t.variance(s));
    Tensor<S> out(sig);
    int idx[kMaxRank], full[kMaxRank];
    for (std::size_t o = 0; o < out.size(); ++o) {
        out.unravel(o, idx);
        S acc(0.0);
        for (int a = 0; a < kDim; ++a) {
            int q = 0;
            for (int s = 0; s < r; ++s) full[s] = (s == slotA || s == slotB) ? a : idx[q++];
            acc += t[t.offset(full)];
        }
        out[o] = acc;
    }
    return out;
}

// Flip the variance of one slot by contracting with a rank-2 metric (or
// inverse metric) of the opposite variance, through the metric's second slot.
template <class S>
Tensor<S> raise_lower(const Tensor<S>& t, int slot, const Tensor<S>& m) {
    if (slot < 0 || slot >= t.rank()) throw SlotError("raise_lower: bad slot");
    if (m.rank() != 2 || m.variance(0) != m.variance(1))
        throw SlotError("raise_lower: metric must be rank 2 with equal variances");
    if (m.variance(0) == t.variance(slot)) throw SlotError("raise_lower: variance mismatch");
    const int r = t.rank();
    std::vector<Var> sig = t.signature();
    sig[slot] = m.variance(0);
    Tensor<S> out(sig);
    int idx[kMaxRank];
    for (std::size_t o = 0; o < out.size(); ++o) {
        out.unravel(o, idx);
        const int a = idx[slot];
        S acc(0.0);
        for (int b = 0; b < kDim; ++b) {
            idx[slot] = b;
            detail::mul_acc(acc, m(a, b), t[t.offset(idx)]);
        }
        idx[slot] = a;
        out[o] = acc;
    }
    (void)r;
    return out;
}

// J acting on one slot: W_{..Jk..} = J^p_k W_{..p..}, V^{..Jk..} = J^k_p V^{..p..}.
template <class S>
Tensor<S> apply_J(const Tensor<S>& t, int slot, const Tensor<S>& J) {
    if (slot < 0 || slot >= t.rank()) throw SlotError("apply_J: bad slot");
    if (J.rank() != 2 || J.variance(0) != Var::Contra || J.variance(1) != Var::Co)
        throw SlotError("apply_J: J must be a (1,1) tensor");
    const bool co = t.variance(slot) == Var::Co;
    Tensor<S> out(t.signature());
    int idx[kMaxRank];
    for (std::size_t o = 0; o < out.size(); ++o) {
        out.unravel(o, idx);
        const int k = idx[slot];
        S acc(0.0);
        for (int p = 0; p < kDim; ++p) {
            idx[slot] = p;
            detail::mul_acc(acc, co ? J(p, k) : J(k, p), t[t.offset(idx)]);
        }
        idx[slot] = k;
        out[o] = acc;
    }
    return out;
}

// Full antisymmetrization with the 1/p! weight.
template <class S>
Tensor<S> alternate(const Tensor<S>& t) {
    const int r = t.rank();
    for (int s = 1; s < r; ++s)
        if (t.variance(s) != t.variance(0)) throw SlotError("alternate: mixed variance");
    if (r <= 1) return t;
    std::vector<int> p(r);
    for (int i = 0; i < r; ++i) p[i] = i;
    Tensor<S> out(t.signature());
    double fact = 1.0;
    for (int i = 2; i <= r; ++i) fact *= i;
    int idx[kMaxRank], src[kMaxRank];
    do {
        const double sg = detail::perm_sign(p.data(), r) / fact;
        for (std::size_t o = 0; o < out.size(); ++o) {
            out.unravel(o, idx);
            for (int s = 0; s < r; ++s) src[s] = idx[p[s]];
            S term = t[t.offset(src)];
            term *= sg;
            out[o] += term;
        }
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

// Fill every component of an alternating tensor from its strictly increasing
// components, given a function computing the latter.
template <class S, class F>
void fill_alternating(Tensor<S>& out, F&& increasing_component) {
    const int r = out.rank();
    std::vector<int> comb(r);
    for (int i = 0; i < r; ++i) comb[i] = i;
    int idx[kMaxRank];
    std::vector<int> p(r);
    while (true) {
        const S v = increasing_component(comb.data());
        for (int i = 0; i < r; ++i) p[i] = i;
        do {
            for (int s = 0; s < r; ++s) idx[s] = comb[p[s]];
            S w = v;
            w *= detail::perm_sign(p.data(), r);
            out[out.offset(idx)] = w;
        } while (std::next_permutation(p.begin(), p.end()));
        int i = r - 1;
        while (i >= 0 && comb[i] == kDim - r + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (int j = i + 1; j < r; ++j) comb[j] = comb[j - 1] + 1;
    }
}

// (a ^ b) = (p+q)!/(p! q!) Alt(a (x) b); for a 1-form and a 2-form this is
// a_j b_kp + a_k b_pj + a_p b_jk.
template <class S>
Tensor<S> wedge(const Tensor<S>& a, const Tensor<S>& b) {
    const int p = a.rank(), q = b.rank(), r = p + q;
    if (r > kDim) throw RankError("wedge: degree above 6");
    for (const Tensor<S>* t : {&a, &b})
        for (Var v : t->signature())
            if (v != Var::Co) throw SlotError("wedge: arguments must be forms");
    Tensor<S> out = Tensor<S>::covariant(r);
    if (r == 0) {
        out[0] = a[0] * b[0];
        return out;
    }
    fill_alternating(out, [&](const int* I) {
        // sum over (p,q)-shuffles of the increasing multi-index I
        S acc(0.0);
        std::vector<int> sel(r, 0);
        std::fill(sel.begin() + q, sel.end(), 1);  // 1 marks a slot taken by a
        int ia[kMaxRank], ib[kMaxRank], ord[kMaxRank];
        do {
            int na = 0, nb = 0;
            for (int s = 0; s < r; ++s) {
                if (sel[s]) ia[na++] = I[s];
                else ib[nb++] = I[s];
            }
            // sign of the permutation taking I to (ia, ib)
            int n = 0;
            for (int s = 0; s < r; ++s)
                if (sel[s]) ord[n++] = s;
            for (int s = 0; s < r; ++s)
                if (!sel[s]) ord[n++] = s;
            S term = a[a.offset(ia)] * b[b.offset(ib)];
            term *= detail::perm_sign(ord, r);
            acc += term;
        } while (std::next_permutation(sel.begin(), sel.end()));
        return acc;
    });
    return out;
}

template <class S>
Tensor<S> interior(const Tensor<S>& v, const Tensor<S>& f) {
    if (f.rank() < 1) throw RankError("interior: 0-form argument");
    if (v.rank() != 1 || v.variance(0) != Var::Contra)
        throw SlotError("interior: first argument must be a vector");
    if (f.variance(0) != Var::Co) throw SlotError("interior: form slot must be covariant");
    std::vector<Var> sig(f.signature().begin() + 1, f.signature().end());
    Tensor<S> out(sig);
    const std::size_t n = out.size();
    for (int a = 0; a < kDim; ++a)
        for (std::size_t o = 0; o < n; ++o) detail::mul_acc(out[o], v[a], f[a * n + o]);
    return out;
}

// v^i = (1/5!) eps^{i a1..a5} f_{a1..a5} with eps^{123456} = +1.
template <class S>
Tensor<S> levi_civita_pairing(const Tensor<S>& f5) {
    if (f5.rank() != 5) throw RankError("levi_civita_pairing needs a 5-form");
    Tensor<S> v = Tensor<S>::contravariant(1);
    for (int i = 0; i < kDim; ++i) {
        int rest[5], n = 0;
        for (int j = 0; j < kDim; ++j)
            if (j != i) rest[n++] = j;
        // eps^{i, rest} = (-1)^i for increasing rest
        S c = f5[f5.offset(rest)];
        c *= (i % 2 == 0) ? 1.0 : -1.0;
        v[i] = c;
    }
    return v;
}

// Basis form e^{i1} ^ ... ^ e^{ik} (0-based indices).
template <class S = double>
Tensor<S> basis_form(std::initializer_list<int> ids) {
    std::vector<int> I(ids);
    Tensor<S> out = Tensor<S>::covariant(static_cast<int>(I.size()));
    std::vector<int> p(I.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<int>(i);
    int idx[kMaxRank];
    do {
        for (std::size_t s = 0; s < p.size(); ++s) idx[s] = I[p[s]];
        out[out.offset(idx)] += S(detail::perm_sign(p.data(), static_cast<int>(p.size())));
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

template <class S>
double max_abs(const Tensor<S>& t) {
    double m = 0.0;
    for (const auto& c : t.comps()) m = std::max(m, std::abs(value_of(c)));
    return m;
}

// Largest violation of antisymmetry under any adjacent transposition.
template <class S>
double alternation_defect(const Tensor<S>& t) {
    double m = 0.0;
    int idx[kMaxRank];
    for (std::size_t o = 0; o < t.size(); ++o) {
        t.unravel(o, idx);
        for (int s = 0; s + 1 < t.rank(); ++s) {
            std::swap(idx[s], idx[s + 1]);
            m = std::max(m, std::abs(value_of(t[o]) + value_of(t[t.offset(idx)])));
            std::swap(idx[s], idx[s + 1]);
        }
    }
    return m;
}

inline const TensorD& values_of(const TensorD& t) { return t; }

inline TensorD values_of(const TensorJ& t) {
    TensorD out(t.signature());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i].val;
    return out;
}

inline TensorJ lift(const TensorD& t) {
    TensorJ out(t.signature());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = Jet2(t[i]);
    return out;
}

}  // namespace iia
