#include <cstdio>
#include <set>

#include "doctest.h"
#include "iia/identities.hpp"
#include "iia/sampling.hpp"
#include "test_util.hpp"

using namespace iia;

namespace {

std::shared_ptr<const Backend> flat_standard() {
    JetSampleOptions opt;
    opt.standardBase = true;
    opt.zeroDerivatives = true;
    return make_backend(sample_typeiia_jet(1, opt));
}

std::shared_ptr<const Backend> invariant(const char* name, std::uint64_t seed) {
    const AlgebraEntry e = resolve_algebra(name);
    return make_backend(sample_typeiia_invariant(e.name, e.c, seed));
}

const CheckSummary* find(const SuiteReport& r, const std::string& id) {
    for (const auto& c : r.checks)
        if (c.id == id) return &c;
    return nullptr;
}

}  // namespace

TEST_CASE("identity catalog layout") {
    const auto& cat = identity_catalog();
    REQUIRE(cat.size() == 29u);
    std::set<std::string> ids;
    for (std::size_t i = 0; i < cat.size(); ++i) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "ID-%02zu", i + 1);
        CHECK(cat[i].id == buf);
        CHECK_FALSE(cat[i].anchor.empty());
        CHECK_FALSE(cat[i].description.empty());
        CHECK(static_cast<bool>(cat[i].evaluator));
        ids.insert(cat[i].id);
    }
    CHECK(ids.size() == 29u);
    CHECK(&find_check("ID-13") == &cat[12]);
    CHECK_THROWS_AS(find_check("ID-30"), std::invalid_argument);
    CHECK(find_check("ID-13").applicability == Applicability::Jet);
    CHECK(find_check("ID-01").applicability == Applicability::Both);
}

TEST_CASE("residual normalization") {
    CHECK(residual(1.0, 1.5) == doctest::Approx(0.5 / 1.5));
    CHECK(residual(0.5, 0.25) == doctest::Approx(0.25));
    CHECK(residual(10.0, 12.0) == doctest::Approx(2.0 / 12.0));
    CHECK(residual(0.1, 0.2, {100.0}) == doctest::Approx(0.001));
    TensorD a = TensorD::covariant(1), b = TensorD::covariant(1);
    a(0) = 4.0;
    b(0) = 3.0;
    CHECK(residual(a, b) == doctest::Approx(0.25));
}

TEST_CASE("applicability is enforced") {
    const EvalContext ctx(invariant("n1", 2));
    CHECK(ctx.kind() == BackendKind::LieAlgebra);
    for (const auto& c : identity_catalog()) {
        if (c.applies_to(BackendKind::LieAlgebra)) {
            CHECK(run_check(c, ctx) <= 1e-8);
        } else {
            CHECK_THROWS_AS(run_check(c, ctx), ApplicabilityError);
        }
    }
}

TEST_CASE("every check vanishes on the flat standard structure") {
    const EvalContext ctx(flat_standard());
    for (const auto& c : identity_catalog()) {
        INFO(c.id);
        CHECK(run_check(c, ctx) <= 1e-12);
    }
    CHECK(run_check(find_check("ID-03"), ctx) == 0.0);
}

TEST_CASE("every check passes on jet samples") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const EvalContext ctx(make_backend(sample_typeiia_jet(seed)));
        for (const auto& c : identity_catalog()) {
            INFO(c.id << " seed " << seed);
            CHECK(run_check(c, ctx) <= 1e-8);
        }
    }
}

TEST_CASE("run_suite passes and is deterministic") {
    SuiteConfig cfg;
    cfg.seed = 5;
    cfg.trials = 2;
    cfg.threads = 1;
    const SuiteReport a = run_suite(cfg);
    cfg.threads = 3;
    const SuiteReport b = run_suite(cfg);
    CHECK(a.all_pass());
    REQUIRE(a.checks.size() == 29u);
    REQUIRE(b.checks.size() == 29u);
    for (std::size_t k = 0; k < a.checks.size(); ++k) {
        CHECK(a.checks[k].id == b.checks[k].id);
        CHECK(a.checks[k].max == b.checks[k].max);
        CHECK(a.checks[k].mean == b.checks[k].mean);
        CHECK(a.checks[k].count == b.checks[k].count);
    }
    // jet-only checks see one sample per trial, the others also one per algebra
    CHECK(find(a, "ID-13")->count == 2);
    CHECK(find(a, "ID-01")->count == 8);
}

TEST_CASE("run_suite configuration") {
    SuiteConfig cfg;
    cfg.checkFilter = {"ID-02", "ID-13"};
    cfg.jet = false;
    const SuiteReport r = run_suite(cfg);
    REQUIRE(r.checks.size() == 1u);
    CHECK(r.checks[0].id == "ID-02");
    CHECK(r.checks[0].count == 3);

    cfg = {};
    cfg.trials = 0;
    CHECK_THROWS_AS(run_suite(cfg), std::invalid_argument);
    cfg = {};
    cfg.tolerance = 0.0;
    CHECK_THROWS_AS(run_suite(cfg), std::invalid_argument);
    cfg = {};
    cfg.checkFilter = {"ID-99"};
    CHECK_THROWS_AS(run_suite(cfg), std::invalid_argument);
    cfg = {};
    cfg.algebras = {"0,0,0,0,0,12+34"};
    cfg.jet = false;
    CHECK_THROWS_AS(run_suite(cfg), NoSolution);

    // a tolerance below the rounding floor fails
    cfg = {};
    cfg.tolerance = 1e-30;
    cfg.invariant = false;
    cfg.checkFilter = {"ID-26"};
    CHECK_FALSE(run_suite(cfg).all_pass());
}

TEST_CASE("run_on_backend") {
    SuiteConfig cfg;
    const SuiteReport j = run_on_backend(make_backend(sample_typeiia_jet(3)), cfg);
    CHECK(j.checks.size() == 29u);
    CHECK(j.all_pass());
    const SuiteReport v = run_on_backend(invariant("n2", 3), cfg);
    CHECK(v.all_pass());
    CHECK(v.checks.size() < 29u);
    CHECK(find(v, "ID-13") == nullptr);
    for (const auto& c : v.checks) CHECK(c.count == 1);
}

TEST_CASE("broken closedness is detected") {
    const JetSample s = sample_typeiia_jet(11);
    const EvalContext good(make_backend(s));
    const EvalContext bad(make_backend(break_closedness(s, 1e-3, 2)));
    for (const char* id : {"ID-15", "ID-26"}) {
        CHECK(run_check(find_check(id), good) <= 1e-8);
        CHECK(run_check(find_check(id), bad) > 1e-4);
    }
    // identities that do not use closedness are unaffected
    for (const char* id : {"ID-01", "ID-02", "ID-09", "ID-28"})
        CHECK(run_check(find_check(id), bad) <= 1e-8);
}
