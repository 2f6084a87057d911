#include <cmath>

#include "doctest.h"
#include "iia/catalog.hpp"
#include "iia/report.hpp"
#include "json.hpp"
#include "test_util.hpp"

using namespace iia;
using test::max_diff;

TEST_CASE("suite report JSON round trip") {
    SuiteReport r;
    r.seed = 123;
    r.trials = 4;
    r.tolerance = 1e-8;
    r.checks.push_back({"ID-01", "metric-two-ways", 1.0000000000000002e-15, 3.3e-16, 16, true});
    r.checks.push_back({"ID-13", "riemann-J", 0.1 + 0.2, 0.25, 4, false});
    const std::string text = report_to_json(r);
    const SuiteReport back = report_from_json(text);
    CHECK(back.seed == 123u);
    CHECK(back.trials == 4);
    CHECK(back.tolerance == 1e-8);
    REQUIRE(back.checks.size() == 2u);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(back.checks[k].id == r.checks[k].id);
        CHECK(back.checks[k].anchor == r.checks[k].anchor);
        CHECK(back.checks[k].max == r.checks[k].max);
        CHECK(back.checks[k].mean == r.checks[k].mean);
        CHECK(back.checks[k].count == r.checks[k].count);
        CHECK(back.checks[k].pass == r.checks[k].pass);
    }
    CHECK(report_to_json(back) == text);

    const auto j = nlohmann::ordered_json::parse(text);
    CHECK(j.at("pass") == false);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"seed", "trials", "tolerance", "pass", "checks"});
}

TEST_CASE("non-finite residuals survive serialization as failures") {
    SuiteReport r;
    r.checks.push_back({"ID-02", "volume-form", HUGE_VAL, std::nan(""), 1, false});
    const SuiteReport back = report_from_json(report_to_json(r));
    CHECK(std::isinf(back.checks[0].max));
    CHECK_FALSE(back.all_pass());
}

TEST_CASE("jet sample JSON round trip reproduces the residuals") {
    for (double scale : {1.0, 10.0}) {
        JetSampleOptions opt;
        opt.scale = scale;
        const JetSample s = sample_typeiia_jet(21, opt);
        const std::string text = jet_sample_to_json(s);
        const JetSample back = jet_sample_from_json(text);
        CHECK(back.coeffs.c == s.coeffs.c);
        CHECK(max_diff(back.omega, s.omega) == 0.0);
        CHECK(back.seed == s.seed);
        CHECK(back.scale == s.scale);
        CHECK(jet_sample_to_json(back) == text);

        SuiteConfig cfg;
        const SuiteReport a = run_on_backend(make_backend(s), cfg);
        const SuiteReport b = run_on_backend(make_backend(back), cfg);
        REQUIRE(a.checks.size() == b.checks.size());
        for (std::size_t k = 0; k < a.checks.size(); ++k) CHECK(a.checks[k].max == b.checks[k].max);
        CHECK(b.all_pass());

        const auto j = nlohmann::ordered_json::parse(text);
        CHECK(j.at("kind") == "jet");
        CHECK(j.at("residuals").at("closed").get<double>() <= 1e-12 * scale);
    }
}

TEST_CASE("invariant sample JSON round trip") {
    const AlgebraEntry e = resolve_algebra("n2");
    const InvariantSample s = sample_typeiia_invariant(e.name, e.c, 6);
    const std::string text = invariant_sample_to_json(s);
    const InvariantSample back = invariant_sample_from_json(text);
    CHECK(back.algebra == "n2");
    CHECK(max_diff(back.c, s.c) == 0.0);
    CHECK(max_diff(back.omega, s.omega) == 0.0);
    CHECK(max_diff(back.phi, s.phi) == 0.0);
    CHECK(invariant_sample_to_json(back) == text);
}

TEST_CASE("malformed samples are rejected") {
    const std::string jet = jet_sample_to_json(sample_typeiia_jet(1));
    CHECK_THROWS_AS(invariant_sample_from_json(jet), std::invalid_argument);
    auto j = nlohmann::ordered_json::parse(jet);
    j["coefficients"].erase(0);
    CHECK_THROWS_AS(jet_sample_from_json(j.dump()), std::invalid_argument);
    j = nlohmann::ordered_json::parse(jet);
    j["omega"].erase(0);
    CHECK_THROWS_AS(jet_sample_from_json(j.dump()), std::invalid_argument);
    CHECK_THROWS(jet_sample_from_json("{not json"));
    CHECK_THROWS_AS(report_from_json("{\"seed\": 1}"), nlohmann::json::exception);
}

TEST_CASE("algebra catalog") {
    const auto& cat = builtin_catalog();
    REQUIRE(cat.size() >= 3u);
    CHECK(cat[0].name == "abelian");
    CHECK(max_abs(cat[0].c) == 0.0);
    for (const auto& e : cat) CHECK(max_diff(e.c, parse_structure_notation(e.notation)) == 0.0);

    const AlgebraEntry inl = resolve_algebra("0,0,0,0,12,13");
    CHECK(max_diff(inl.c, resolve_algebra("n1").c) == 0.0);
    CHECK_THROWS_AS(resolve_algebra("no-such-algebra"), std::invalid_argument);

    const TensorD c = parse_structure_notation("0,0,0,0,0,12");
    nlohmann::json arr = nlohmann::json::array();
    for (int k = 0; k < kDim; ++k) {
        nlohmann::json m = nlohmann::json::array();
        for (int i = 0; i < kDim; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int l = 0; l < kDim; ++l) row.push_back(c(k, i, l));
            m.push_back(row);
        }
        arr.push_back(m);
    }
    nlohmann::json doc;
    doc["algebras"] = {{{"name", "m"}, {"notation", "0,0,0,0,0,12"}, {"c", arr}}};
    const auto parsed = parse_catalog(doc.dump());
    REQUIRE(parsed.size() == 1u);
    CHECK(resolve_algebra("m", parsed).c(5, 0, 1) == -1.0);
    CHECK_THROWS(parse_catalog(R"({"algebras": [{"name": "m"}]})"));
    CHECK_THROWS(load_catalog("/nonexistent/catalog.json"));
}
