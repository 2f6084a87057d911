#include "iia/sampling.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <random>

namespace iia {

using MatX = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream) {
    std::uint64_t s = seed ^ (stream * 0xD1B54A32D192ED03ull);
    splitmix64(s);
    s ^= trial * 0x8CB92BA72F3D8DD7ull;
    return splitmix64(s);
}

namespace {

// Rows of V spanning the null space of M (cutoff relative to the largest
// singular value).
MatX null_space(const MatX& M, double rel = 1e-10) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > rel * std::max(smax, 1e-300)) ++rank;
    const int n = static_cast<int>(M.cols());
    MatX out(n - rank, n);
    for (int r = rank; r < n; ++r) out.row(r - rank) = svd.matrixV().col(r).transpose();
    return out;
}

const std::vector<TensorD>& basis3() {
    static const std::vector<TensorD> b = [] {
        std::vector<TensorD> v;
        for (const auto& t : triples()) v.push_back(basis_form({t[0], t[1], t[2]}));
        return v;
    }();
    return b;
}

std::vector<std::array<int, 4>> quads() {
    std::vector<std::array<int, 4>> q;
    for (int a = 0; a < kDim; ++a)
        for (int b = a + 1; b < kDim; ++b)
            for (int c = b + 1; c < kDim; ++c)
                for (int d = c + 1; d < kDim; ++d) q.push_back({a, b, c, d});
    return q;
}

// (d f)_{lijk} for f_{ijk}(x) = B(ijk) * [derivative slot selector].
double d_row(const TensorD& B, const std::array<int, 4>& q, const std::array<int, 4>& w) {
    // w[s] multiplies the term whose derivative index is q[s]
    const int l = q[0], i = q[1], j = q[2], k = q[3];
    return w[0] * B(i, j, k) - w[1] * B(l, j, k) - w[2] * B(i, l, k) - w[3] * B(i, j, l);
}

JetConstraintSystem build_system() {
    const TensorD W = inverse2(standard_omega());
    const auto& B = basis3();
    const auto Q = quads();
    // (Lambda B_n)_i
    std::vector<std::array<double, kDim>> lam(20);
    for (int n = 0; n < 20; ++n) {
        TensorD l = lambda_contraction(B[n], W);
        for (int i = 0; i < kDim; ++i) lam[n][i] = l(i);
    }
    JetConstraintSystem sys;
    // degree 1: unknowns (n, a) -> d_a phi = c1[n,a] B_n
    {
        MatX M = MatX::Zero(36 + 15, 120);
        for (int n = 0; n < 20; ++n)
            for (int a = 0; a < kDim; ++a) {
                const int col = n * kDim + a;
                for (int i = 0; i < kDim; ++i) M(a * kDim + i, col) = lam[n][i];
                for (std::size_t r = 0; r < Q.size(); ++r) {
                    std::array<int, 4> w{};
                    for (int s = 0; s < 4; ++s) w[s] = Q[r][s] == a;
                    M(36 + r, col) = d_row(B[n], Q[r], w);
                }
            }
        sys.rows1 = static_cast<int>(M.rows());
        sys.matrix1.assign(M.data(), M.data() + M.size());
        MatX N = null_space(M);
        sys.nullity1 = static_cast<int>(N.rows());
        sys.null1.assign(N.data(), N.data() + N.size());
    }
    // degree 2: unknowns (n, {a,b}) -> d_c d_d phi = [{c,d} = {a,b}] c2 B_n
    {
        MatX M = MatX::Zero(126 + 90, 420);
        for (int n = 0; n < 20; ++n)
            for (int a = 0; a < kDim; ++a)
                for (int b = a; b < kDim; ++b) {
                    const int col = n * 21 + pair_index(a, b);
                    auto H = [&](int c, int d) {
                        return (std::min(c, d) == a && std::max(c, d) == b) ? 1 : 0;
                    };
                    for (int c = 0; c < kDim; ++c)
                        for (int d = c; d < kDim; ++d)
                            if (H(c, d))
                                for (int i = 0; i < kDim; ++i)
                                    M(pair_index(c, d) * kDim + i, col) = lam[n][i];
                    for (int e = 0; e < kDim; ++e)
                        for (std::size_t r = 0; r < Q.size(); ++r) {
                            std::array<int, 4> w{};
                            for (int s = 0; s < 4; ++s) w[s] = H(e, Q[r][s]);
                            M(126 + e * 15 + r, col) = d_row(B[n], Q[r], w);
                        }
                }
        sys.rows2 = static_cast<int>(M.rows());
        sys.matrix2.assign(M.data(), M.data() + M.size());
        MatX N = null_space(M);
        sys.nullity2 = static_cast<int>(N.rows());
        sys.null2.assign(N.data(), N.data() + N.size());
    }
    return sys;
}

Eigen::Matrix<double, 6, 6> to_mat(const TensorD& t) {
    Eigen::Matrix<double, 6, 6> M;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) M(i, j) = t(i, j);
    return M;
}

bool admissible(const TensorD& omega, const TensorD& phi, double eps, double maxCond) {
    try {
        StructureOptions so;
        so.degeneracy_eps = eps;
        so.check_primitive = false;
        auto st = build_structure(omega, phi, so);
        auto ev = sym_eigenvalues(st.g);
        return ev[0] > 0 && ev[kDim - 1] / ev[0] <= maxCond;
    } catch (const StructureError&) {
        return false;
    }
}

std::vector<double> random_combination(const std::vector<double>& basis, int k, int n,
                                       std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    std::vector<double> v(n, 0.0);
    for (int r = 0; r < k; ++r) {
        const double x = nd(rng);
        for (int j = 0; j < n; ++j) v[j] += x * basis[r * n + j];
    }
    return v;
}

void scale_to_max(std::vector<double>& v, double target) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    if (m > 0.0)
        for (double& x : v) x *= target / m;
}

}  // namespace

const JetConstraintSystem& jet_constraint_system() {
    static const JetConstraintSystem sys = build_system();
    return sys;
}

JetSample sample_typeiia_jet(std::uint64_t seed, const JetSampleOptions& opt) {
    if (!(opt.scale > 0.0)) throw std::invalid_argument("scale must be positive");
    const auto& sys = jet_constraint_system();
    const TensorD omega = standard_omega();
    const Eigen::Matrix<double, 6, 6> Winv = to_mat(omega).inverse();
    const TensorD phi0 = standard_phi();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    for (int attempt = 1; attempt <= opt.maxAttempts; ++attempt) {
        TensorD base = phi0;
        if (!opt.standardBase) {
            // pull the standard form back along exp(omega^-1 S), which preserves omega
            Eigen::Matrix<double, 6, 6> S;
            for (int i = 0; i < kDim; ++i)
                for (int j = 0; j < kDim; ++j) S(i, j) = nd(rng);
            const Eigen::Matrix<double, 6, 6> Ssym = 0.5 * opt.symplecticSpread * (S + S.transpose());
            const Eigen::Matrix<double, 6, 6> A = (Winv * Ssym).exp();
            TensorD At({Var::Contra, Var::Co});
            for (int i = 0; i < kDim; ++i)
                for (int j = 0; j < kDim; ++j) At(i, j) = A(i, j);
            TensorD t1 = einsum<double>("ai,abc->ibc", {&At, &phi0});
            TensorD t2 = einsum<double>("bj,ibc->ijc", {&At, &t1});
            base = einsum<double>("ck,ijc->ijk", {&At, &t2});
        }
        base *= opt.scale / form_norm(base);
        std::vector<double> c1 = random_combination(sys.null1, sys.nullity1, 120, rng);
        std::vector<double> c2 = random_combination(sys.null2, sys.nullity2, 420, rng);
        if (opt.zeroDerivatives) {
            std::fill(c1.begin(), c1.end(), 0.0);
            std::fill(c2.begin(), c2.end(), 0.0);
        } else {
            scale_to_max(c1, opt.derivativeScale * opt.scale);
            scale_to_max(c2, opt.derivativeScale * opt.scale);
        }
        if (!admissible(omega, base, opt.degeneracyEps, opt.maxCondition)) continue;
        JetSample s;
        s.seed = seed;
        s.scale = opt.scale;
        s.omega = omega;
        s.attempts = attempt;
        const auto v = coeffs_from_form(base);
        for (int n = 0; n < 20; ++n) s.coeffs.c[n] = v[n];
        for (int j = 0; j < 120; ++j) s.coeffs.c[20 + j] = c1[j];
        for (int j = 0; j < 420; ++j) s.coeffs.c[140 + j] = c2[j];
        return s;
    }
    throw SamplingExhausted("no admissible jet sample after " + std::to_string(opt.maxAttempts) +
                            " attempts");
}

std::shared_ptr<const JetChartBackend> make_backend(const JetSample& s) {
    return std::make_shared<JetChartBackend>(s.omega, s.coeffs);
}

ConstraintResiduals constraint_residuals(const TensorD& omega, const JetCoefficients& c) {
    const TensorJ phi = jet_form(c);
    const TensorJ W = lift(inverse2(omega));
    ConstraintResiduals r;
    for (const Jet2& x : lambda_contraction(phi, W).comps()) {
        r.primitive = std::max(r.primitive, std::abs(x.val));
        for (double v : x.grad) r.primitive = std::max(r.primitive, std::abs(v));
        for (double v : x.hess) r.primitive = std::max(r.primitive, std::abs(v));
    }
    JetChartBackend b(omega, c);
    for (const Jet2& x : b.exterior_d(phi).comps()) {
        r.closed = std::max(r.closed, std::abs(x.val));
        for (double v : x.grad) r.closed = std::max(r.closed, std::abs(v));
    }
    return r;
}

JetSample break_closedness(const JetSample& s, double size, std::uint64_t seed) {
    const auto& sys = jet_constraint_system();
    // primitive quadratic parts: null space of the Lambda rows alone
    MatX M = Eigen::Map<const MatX>(sys.matrix2.data(), sys.rows2, 420).topRows(126);
    MatX P = null_space(M);
    MatX Z = Eigen::Map<const MatX>(sys.null2.data(), sys.nullity2, 420);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(420);
    for (int r = 0; r < P.rows(); ++r) v += nd(rng) * P.row(r).transpose();
    // remove the closed component so the perturbation is purely non-closed
    v -= Z.transpose() * (Z * v);
    v *= size / v.cwiseAbs().maxCoeff();
    JetSample out = s;
    for (int j = 0; j < 420; ++j) out.coeffs.c[140 + j] += v(j);
    return out;
}

// ---------------------------------------------------------------- invariant

void validate_nilpotent(const TensorD& c) {
    if (c.rank() != 3) throw AlgebraError("structure constants must have rank 3");
    double cmax = max_abs(c);
    for (int k = 0; k < kDim; ++k)
        for (int i = 0; i < kDim; ++i)
            for (int j = 0; j < kDim; ++j)
                if (std::abs(c(k, i, j) + c(k, j, i)) > 1e-12 * std::max(1.0, cmax))
                    throw AlgebraError("structure constants are not antisymmetric");
    if (jacobi_defect(c) > 1e-10 * std::max(1.0, cmax * cmax))
        throw AlgebraError("structure constants violate the Jacobi identity");
    // lower central series g_{k+1} = [g, g_k]
    MatX span = MatX::Identity(kDim, kDim);
    for (int step = 0; step <= kDim; ++step) {
        if (span.rows() == 0) return;
        MatX gen(kDim * span.rows(), kDim);
        for (int i = 0; i < kDim; ++i)
            for (int r = 0; r < span.rows(); ++r)
                for (int k = 0; k < kDim; ++k) {
                    double acc = 0.0;
                    for (int j = 0; j < kDim; ++j) acc += c(k, i, j) * span(r, j);
                    gen(i * span.rows() + r, k) = acc;
                }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(gen, Eigen::ComputeFullV);
        const auto& s = svd.singularValues();
        int rank = 0;
        for (int i = 0; i < s.size(); ++i)
            if (s(i) > 1e-10 * std::max(1.0, cmax)) ++rank;
        MatX next(rank, kDim);
        for (int r = 0; r < rank; ++r) next.row(r) = svd.matrixV().col(r).transpose();
        span = next;
    }
    throw AlgebraError("algebra is not nilpotent");
}

std::vector<TensorD> closed_forms(const TensorD& c, int degree) {
    if (degree < 1 || degree > 5) throw RankError("closed_forms: degree out of range");
    std::vector<TensorD> basis;
    std::vector<int> comb(degree);
    for (int i = 0; i < degree; ++i) comb[i] = i;
    while (true) {
        TensorD b = TensorD::covariant(degree);
        std::vector<int> perm(degree);
        for (int i = 0; i < degree; ++i) perm[i] = i;
        int idx[kMaxRank];
        do {
            for (int s = 0; s < degree; ++s) idx[s] = comb[perm[s]];
            b[b.offset(idx)] = detail::perm_sign(perm.data(), degree);
        } while (std::next_permutation(perm.begin(), perm.end()));
        basis.push_back(b);
        int i = degree - 1;
        while (i >= 0 && comb[i] == kDim - degree + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (int j = i + 1; j < degree; ++j) comb[j] = comb[j - 1] + 1;
    }
    const int n = static_cast<int>(basis.size());
    const int m = static_cast<int>(ipow6(degree + 1));
    MatX M(m, n);
    for (int j = 0; j < n; ++j) {
        TensorD d = ce_differential(c, basis[j]);
        for (int i = 0; i < m; ++i) M(i, j) = d[i];
    }
    MatX N = null_space(M);
    std::vector<TensorD> out;
    for (int r = 0; r < N.rows(); ++r) {
        TensorD f = TensorD::covariant(degree);
        for (int j = 0; j < n; ++j) f += N(r, j) * basis[j];
        out.push_back(f);
    }
    return out;
}

InvariantSample sample_typeiia_invariant(const std::string& name, const TensorD& c,
                                         std::uint64_t seed, const InvariantSampleOptions& opt) {
    if (!(opt.scale > 0.0)) throw std::invalid_argument("scale must be positive");
    validate_nilpotent(c);
    const auto Z2 = closed_forms(c, 2);
    const auto Z3 = closed_forms(c, 3);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    int attempts = 0;
    bool anySymplectic = false;
    for (int wi = 0; wi < opt.omegaDraws; ++wi) {
        TensorD omega = TensorD::covariant(2);
        for (const auto& z : Z2) omega += nd(rng) * z;
        const double nw = std::max(max_abs(omega), 1e-300);
        const double det = det6(omega);
        if (!(std::abs(det) > 1e-6 * std::pow(nw, 6))) continue;
        anySymplectic = true;
        omega *= std::pow(std::abs(det), -1.0 / 6.0);
        // closed 3-forms that are primitive for this omega
        const TensorD W = inverse2(omega);
        MatX L(kDim, Z3.size());
        for (std::size_t j = 0; j < Z3.size(); ++j) {
            TensorD l = lambda_contraction(Z3[j], W);
            for (int i = 0; i < kDim; ++i) L(i, j) = l(i);
        }
        MatX N = null_space(L);
        if (N.rows() == 0) continue;
        std::vector<TensorD> prim;
        for (int r = 0; r < N.rows(); ++r) {
            TensorD f = TensorD::covariant(3);
            for (std::size_t j = 0; j < Z3.size(); ++j) f += N(r, j) * Z3[j];
            prim.push_back(f);
        }
        for (int pi = 0; pi < opt.phiDrawsPerOmega; ++pi) {
            ++attempts;
            TensorD phi = TensorD::covariant(3);
            for (const auto& p : prim) phi += nd(rng) * p;
            const double fn = form_norm(phi);
            if (fn == 0.0) continue;
            phi *= opt.scale / fn;
            if (!admissible(omega, phi, opt.degeneracyEps, opt.maxCondition)) continue;
            InvariantSample s;
            s.seed = seed;
            s.algebra = name;
            s.c = c;
            s.omega = omega;
            s.phi = phi;
            s.attempts = attempts;
            return s;
        }
    }
    if (!anySymplectic) throw NoSolution("algebra '" + name + "' admits no invariant symplectic form");
    throw SamplingExhausted("no positive primitive closed 3-form found on '" + name + "'");
}

std::shared_ptr<const LieAlgebraBackend> make_backend(const InvariantSample& s) {
    return std::make_shared<LieAlgebraBackend>(s.c, s.omega, s.phi);
}

}  // namespace iia
