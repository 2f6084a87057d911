#include <random>

#include "doctest.h"
#include "iia/catalog.hpp"
#include "iia/geometry.hpp"
#include "iia/sampling.hpp"
#include "test_util.hpp"

using namespace iia;
using test::max_diff;

namespace {

// Component a of the gradient part of a jet tensor.
TensorD grad_part(const TensorJ& t, int a) {
    TensorD out(t.signature());
    for (std::size_t o = 0; o < t.size(); ++o) out[o] = t[o].grad[a];
    return out;
}

double grad_max(const TensorJ& t) {
    double m = 0;
    for (int a = 0; a < kDim; ++a) m = std::max(m, max_abs(grad_part(t, a)));
    return m;
}

Geometry jet_geometry(std::uint64_t seed, const JetSampleOptions& opt = {}) {
    return Geometry(make_backend(sample_typeiia_jet(seed, opt)));
}

std::shared_ptr<const LieAlgebraBackend> lie_backend(const std::string& name, std::uint64_t seed) {
    const AlgebraEntry e = resolve_algebra(name);
    return make_backend(sample_typeiia_invariant(e.name, e.c, seed));
}

TensorJ random_jet_tensor(std::mt19937_64& rng, std::vector<Var> sig) {
    TensorJ t(std::move(sig));
    for (auto& c : t.comps()) c = test::Quadratic::random(rng).jet();
    return t;
}

TensorJ random_jet_form(std::mt19937_64& rng, int k) {
    return alternate(random_jet_tensor(rng, std::vector<Var>(k, Var::Co)));
}

TensorJ scaled(const Jet2& f, TensorJ t) {
    for (auto& c : t.comps()) c = f * c;
    return t;
}

// phi at the point x from its 2-jet coefficients.
TensorD phi_at(const JetCoefficients& jc, const test::Point& x) {
    std::array<double, 20> v{};
    for (int I = 0; I < 20; ++I) {
        double s = jc.value(I);
        for (int a = 0; a < kDim; ++a) {
            s += jc.gradient(I, a) * x[a];
            for (int b = 0; b < kDim; ++b) s += 0.5 * jc.hessian(I, a, b) * x[a] * x[b];
        }
        v[I] = s;
    }
    return form_from_coeffs(v);
}

}  // namespace

TEST_CASE("pair_index and triples") {
    CHECK(triples().size() == 20u);
    std::vector<int> seen(21, 0);
    for (int a = 0; a < kDim; ++a)
        for (int b = a; b < kDim; ++b) {
            CHECK(pair_index(a, b) == pair_index(b, a));
            ++seen[pair_index(a, b)];
        }
    for (int n : seen) CHECK(n == 1);
    std::mt19937_64 rng(41);
    const TensorD f = test::random_form(rng, 3);
    CHECK(max_diff(form_from_coeffs(coeffs_from_form(f)), f) <= 1e-15);
}

TEST_CASE("parse_structure_notation and the Jacobi identity") {
    const TensorD c = parse_structure_notation("0,0,0,0,12,13");
    CHECK(max_diff(c, resolve_algebra("n1").c) == 0.0);
    // d e^5 = e^12 under the CE differential
    CHECK(max_diff(ce_differential(c, basis_form({4})), basis_form({0, 1})) == 0.0);
    CHECK(max_diff(ce_differential(c, basis_form({5})), basis_form({0, 2})) == 0.0);
    CHECK(max_abs(ce_differential(c, basis_form({0}))) == 0.0);

    const TensorD m = parse_structure_notation("0, 0, 0, 0, 0, 12-34");
    CHECK(max_diff(ce_differential(m, basis_form({5})), basis_form({0, 1}) - basis_form({2, 3})) == 0.0);

    for (const auto& e : builtin_catalog()) CHECK(jacobi_defect(e.c) == 0.0);
    CHECK(jacobi_defect(parse_structure_notation("0,0,0,0,12,45")) > 0.5);

    CHECK_THROWS_AS(parse_structure_notation("0,0,0,0,12"), std::invalid_argument);
    CHECK_THROWS_AS(parse_structure_notation("0,0,0,0,11,13"), std::invalid_argument);
    CHECK_THROWS_AS(parse_structure_notation("0,0,0,0,17,13"), std::invalid_argument);
    CHECK_THROWS_AS(parse_structure_notation("0,0,0,0,1213,13"), std::invalid_argument);
    CHECK_THROWS_AS(parse_structure_notation("0,0,0,0,,13"), std::invalid_argument);
}

TEST_CASE("d squares to zero by both routes") {
    std::mt19937_64 rng(42);
    for (const auto& e : builtin_catalog())
        for (int k = 0; k <= 4; ++k) {
            const TensorD f = k == 0 ? TensorD::scalar(1.0) : test::random_form(rng, k);
            CHECK(max_abs(ce_differential(e.c, ce_differential(e.c, f))) <= 1e-12);
        }
    const Geometry geo = jet_geometry(1);
    for (int k = 1; k <= 3; ++k) {
        const TensorJ f = random_jet_form(rng, k);
        CHECK(max_abs(values_of(geo.exterior_d(geo.exterior_d(f)))) <= 1e-12);
    }
}

TEST_CASE("Christoffel symbols vanish on constant data") {
    JetSampleOptions opt;
    opt.zeroDerivatives = true;
    const Geometry flat = jet_geometry(2, opt);
    CHECK(max_abs(values_of(flat.christoffel())) == 0.0);
    CHECK(max_abs(values_of(flat.riemann())) == 0.0);

    const GeometryD ab(lie_backend("abelian", 3));
    CHECK(max_abs(ab.christoffel()) == 0.0);
    CHECK(max_abs(ab.nijenhuis()) == 0.0);
}

TEST_CASE("Levi-Civita connection on jet samples") {
    for (std::uint64_t seed = 10; seed < 15; ++seed) {
        const Geometry geo = jet_geometry(seed);
        const auto& st = geo.structure();
        const TensorJ& G = geo.christoffel();
        // symmetric, including first derivatives
        const TensorJ asym = G - permute(G, {0, 2, 1});
        CHECK(max_abs(values_of(asym)) <= 1e-12);
        CHECK(grad_max(asym) <= 1e-11);

        const TensorJ ng = geo.nabla(st.g);
        CHECK(max_abs(values_of(ng)) <= 1e-11);
        CHECK(grad_max(ng) <= 1e-10);
        CHECK(max_abs(values_of(geo.nabla(st.gInv))) <= 1e-10);

        // coordinate formula from explicit loops
        const TensorD gInv = values_of(st.gInv);
        double err = 0;
        for (int k = 0; k < kDim; ++k)
            for (int i = 0; i < kDim; ++i)
                for (int j = 0; j < kDim; ++j) {
                    double s = 0;
                    for (int l = 0; l < kDim; ++l)
                        s += 0.5 * gInv(k, l) *
                             (st.g(j, l).grad[i] + st.g(i, l).grad[j] - st.g(i, j).grad[l]);
                    err = std::max(err, std::abs(G(k, i, j).val - s));
                }
        CHECK(err <= 1e-11);
    }
}

TEST_CASE("Levi-Civita connection on invariant samples") {
    for (const char* name : {"n1", "n2"})
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const GeometryD geo(lie_backend(name, seed));
            const TensorD& c = geo.backend().brackets();
            const TensorD& G = geo.christoffel();
            // nabla_i e_j - nabla_j e_i = [e_i, e_j]
            CHECK(max_diff(G - permute(G, {0, 2, 1}), c) <= 1e-12);
            CHECK(max_abs(geo.nabla(geo.structure().g)) <= 1e-11);
            CHECK(max_abs(geo.alpha()) == 0.0);
        }
}

TEST_CASE("double and jet geometries agree on invariant data") {
    for (const char* name : {"n1", "n2"}) {
        const auto b = lie_backend(name, 7);
        const PointGeometry d = evaluate_point(GeometryD(b));
        const PointGeometry j = evaluate_point(Geometry(b));
        CHECK(test::rel_diff(d.g, j.g) <= 1e-13);
        CHECK(test::rel_diff(d.gamma, j.gamma) <= 1e-12);
        CHECK(test::rel_diff(d.N, j.N) <= 1e-12);
        CHECK(test::rel_diff(d.riemann, j.riemann) <= 1e-12);
        CHECK(test::rel_diff(d.frakDphi, j.frakDphi) <= 1e-12);
        CHECK(test::rel_diff(d.codiffPhi, j.codiffPhi) <= 1e-12);
        CHECK(d.scalarR == doctest::Approx(j.scalarR).epsilon(1e-12));
    }
}

TEST_CASE("Nijenhuis tensor: connection route against brackets") {
    for (const char* name : {"n1", "n2"})
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const GeometryD geo(lie_backend(name, seed));
            const TensorD Nb = nijenhuis_from_brackets(geo.backend().brackets(), geo.structure().J);
            CHECK(max_diff(geo.nijenhuis(), Nb) <= 1e-10);
            CHECK(max_diff(geo.nijenhuis(), -1.0 * permute(geo.nijenhuis(), {0, 2, 1})) <= 1e-12);
        }

    // coordinate fields: 4N^k_ij = J^a_i d_a J^k_j - J^a_j d_a J^k_i + J^k_a (d_j J^a_i - d_i J^a_j)
    for (std::uint64_t seed = 20; seed < 24; ++seed) {
        const Geometry geo = jet_geometry(seed);
        const TensorJ& J = geo.structure().J;
        const TensorD N = values_of(geo.nijenhuis());
        double err = 0, mag = 0;
        for (int k = 0; k < kDim; ++k)
            for (int i = 0; i < kDim; ++i)
                for (int j = 0; j < kDim; ++j) {
                    double s = 0;
                    for (int a = 0; a < kDim; ++a)
                        s += J(a, i).val * J(k, j).grad[a] - J(a, j).val * J(k, i).grad[a] +
                             J(k, a).val * (J(a, i).grad[j] - J(a, j).grad[i]);
                    err = std::max(err, std::abs(N(k, i, j) - 0.25 * s));
                    mag = std::max(mag, std::abs(s));
                }
        CHECK(mag > 1e-3);
        CHECK(err <= 1e-10 * std::max(1.0, mag));
    }
}

TEST_CASE("Riemann symmetries and first Bianchi identity") {
    auto check = [](const PointGeometry& p) {
        const TensorD& R = p.riemannLower;  // R_{ijkl} = g_{km} R_{ij}^m_l
        const double tol = 1e-10 * std::max(1.0, max_abs(R));
        CHECK(max_diff(R, -1.0 * permute(R, {1, 0, 2, 3})) <= tol);
        CHECK(max_diff(R, -1.0 * permute(R, {0, 1, 3, 2})) <= tol);
        CHECK(max_diff(R, permute(R, {2, 3, 0, 1})) <= tol);
        double bianchi = 0;
        for (int i = 0; i < kDim; ++i)
            for (int j = 0; j < kDim; ++j)
                for (int k = 0; k < kDim; ++k)
                    for (int l = 0; l < kDim; ++l)
                        bianchi = std::max(bianchi,
                                           std::abs(R(i, j, k, l) + R(j, l, k, i) + R(l, i, k, j)));
        CHECK(bianchi <= tol);
        CHECK(max_diff(p.ricci, permute(p.ricci, {1, 0})) <= tol);
    };
    for (std::uint64_t seed = 30; seed < 33; ++seed) check(evaluate_point(jet_geometry(seed)));
    for (const char* name : {"n1", "n2"}) {
        const PointGeometry p = evaluate_point(GeometryD(lie_backend(name, 4)));
        CHECK(max_abs(p.riemann) > 1e-3);
        check(p);
    }
}

TEST_CASE("covariant derivatives commute up to curvature") {
    std::mt19937_64 rng(43);
    for (std::uint64_t seed = 40; seed < 43; ++seed) {
        const Geometry geo = jet_geometry(seed);
        const TensorJ V = random_jet_tensor(rng, {Var::Contra});
        const TensorD nn = values_of(geo.nabla(geo.nabla(V)));  // [i,m,k] = nabla_i nabla_m V^k
        const TensorD R = values_of(geo.riemann());
        const TensorD v = values_of(V);
        const TensorD RV = einsum<double>("ijkl,l->ijk", {&R, &v});
        CHECK(max_diff(nn - permute(nn, {1, 0, 2}), RV) <= 1e-10 * std::max(1.0, max_abs(RV)));
    }
    for (const char* name : {"n1", "n2"}) {
        const GeometryD geo(lie_backend(name, 5));
        const TensorD V = test::random_tensor(rng, {Var::Contra});
        const TensorD nn = geo.nabla(geo.nabla(V));
        const TensorD RV = einsum<double>("ijkl,l->ijk", {&geo.riemann(), &V});
        CHECK(max_abs(RV) > 1e-3);
        CHECK(max_diff(nn - permute(nn, {1, 0, 2}), RV) <= 1e-10 * std::max(1.0, max_abs(RV)));
    }
}

TEST_CASE("the modified connection preserves J, g and omega") {
    auto check = [](const PointGeometry& p) {
        CHECK(max_abs(p.frakDJ) <= 1e-10);
        CHECK(max_abs(p.frakDg) <= 1e-10 * std::max(1.0, max_abs(p.g)));
        CHECK(max_abs(p.frakDomega) <= 1e-10);
    };
    for (std::uint64_t seed = 50; seed < 54; ++seed) check(evaluate_point(jet_geometry(seed)));
    for (const char* name : {"n1", "n2"})
        for (std::uint64_t seed = 0; seed < 2; ++seed)
            check(evaluate_point(GeometryD(lie_backend(name, seed))));
}

TEST_CASE("exterior derivative: partials against the connection") {
    std::mt19937_64 rng(44);
    const Geometry geo = jet_geometry(60);
    for (int k = 1; k <= 4; ++k) {
        const TensorJ f = random_jet_form(rng, k);
        const TensorJ a = geo.exterior_d(f), b = geo.exterior_d_nabla(f);
        CHECK(max_diff(values_of(a), values_of(b)) <= 1e-11 * std::max(1.0, max_abs(values_of(a))));
        for (int m = 0; m < kDim; ++m)
            CHECK(max_diff(grad_part(a, m), grad_part(b, m)) <= 1e-10 * std::max(1.0, grad_max(a)));
    }
    for (const char* name : {"n1", "n2"}) {
        const GeometryD g(lie_backend(name, 6));
        for (int k = 1; k <= 4; ++k) {
            const TensorD f = test::random_form(rng, k);
            CHECK(max_diff(g.exterior_d(f), g.exterior_d_nabla(f)) <= 1e-11);
        }
    }
}

TEST_CASE("codifferential satisfies the Leibniz rule") {
    std::mt19937_64 rng(45);
    const Geometry geo = jet_geometry(61);
    const TensorD gInv = values_of(geo.structure().gInv);
    const Jet2 f = test::Quadratic::random(rng).jet();
    for (int k = 1; k <= 3; ++k) {
        const TensorJ b = random_jet_form(rng, k);
        const TensorD lhs = values_of(geo.codifferential(scaled(f, b)));
        // d*(f b) = f d*b - g^{lm} d_m f b_{l...}
        TensorD grad = TensorD::contravariant(1);
        for (int l = 0; l < kDim; ++l)
            for (int m = 0; m < kDim; ++m) grad(l) += gInv(l, m) * f.grad[m];
        const TensorD bv = values_of(b);
        const TensorD rhs = f.val * values_of(geo.codifferential(b)) - interior(grad, bv);
        CHECK(max_diff(lhs, rhs) <= 1e-10 * std::max(1.0, max_abs(lhs)));
    }
    CHECK_THROWS_AS(geo.codifferential(TensorJ::scalar(Jet2(1.0))), RankError);
}

TEST_CASE("alpha is minus the gradient of log |phi|^2") {
    for (std::uint64_t seed = 70; seed < 74; ++seed) {
        const JetSample s = sample_typeiia_jet(seed);
        const Geometry geo(make_backend(s));
        const TensorD alpha = values_of(geo.alpha());
        const double h = 1e-5;
        for (int i = 0; i < kDim; ++i) {
            test::Point xp{}, xm{};
            xp[i] = h;
            xm[i] = -h;
            StructureOptions opt;
            const double np = build_structure(s.omega, phi_at(s.coeffs, xp), opt).normPhiSq;
            const double nm = build_structure(s.omega, phi_at(s.coeffs, xm), opt).normPhiSq;
            const double fd = -(std::log(np) - std::log(nm)) / (2 * h);
            CHECK(std::abs(alpha(i) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
        }
        // d|phi|^2 = -|phi|^2 alpha
        const PointGeometry p = evaluate_point(geo);
        CHECK(max_diff(p.gradNormPhiSq, -p.normPhiSq * p.alpha) <= 1e-11 * std::max(1.0, p.normPhiSq));
    }
}

TEST_CASE("flat standard structure") {
    JetSampleOptions opt;
    opt.standardBase = true;
    opt.zeroDerivatives = true;
    const PointGeometry p = evaluate_point(jet_geometry(3, opt));
    for (const TensorD* t : {&p.gamma, &p.N, &p.alpha, &p.riemann, &p.ricci, &p.frakDphi,
                             &p.frakDphiHat, &p.nablaPhi, &p.dPhi, &p.codiffPhi})
        CHECK(max_abs(*t) == 0.0);
    // the base value is normalized to form norm 1
    CHECK(p.normPhiSq == doctest::Approx(1.0));
}

TEST_CASE("jet chart rejects value-only derivatives") {
    const auto b = make_backend(sample_typeiia_jet(1));
    CHECK_THROWS_AS(b->partial(TensorD::covariant(1)), std::logic_error);
    CHECK_THROWS_AS(b->exterior_d(TensorD::covariant(1)), std::logic_error);
    CHECK_THROWS_AS(ce_differential(resolve_algebra("n1").c, TensorD::contravariant(1)), SlotError);
}
