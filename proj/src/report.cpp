#include "iia/report.hpp"

#include <cmath>

#include "json.hpp"

namespace iia {

using ordered = nlohmann::ordered_json;

namespace {

ordered matrix(const TensorD& m) {
    ordered a = ordered::array();
    for (int i = 0; i < kDim; ++i) {
        ordered row = ordered::array();
        for (int j = 0; j < kDim; ++j) row.push_back(m(i, j));
        a.push_back(row);
    }
    return a;
}

TensorD read_matrix(const ordered& a) {
    TensorD m = TensorD::covariant(2);
    if (a.size() != kDim) throw std::invalid_argument("expected a 6x6 matrix");
    for (int i = 0; i < kDim; ++i) {
        if (a[i].size() != kDim) throw std::invalid_argument("expected a 6x6 matrix");
        for (int j = 0; j < kDim; ++j) m(i, j) = a[i][j].get<double>();
    }
    return m;
}

}  // namespace

std::string report_to_json(const SuiteReport& r) {
    ordered j;
    j["seed"] = r.seed;
    j["trials"] = r.trials;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.all_pass();
    ordered checks = ordered::array();
    for (const auto& c : r.checks) {
        ordered e;
        e["id"] = c.id;
        e["anchor"] = c.anchor;
        e["max"] = c.max;
        e["mean"] = c.mean;
        e["samples"] = c.count;
        e["pass"] = c.pass;
        checks.push_back(e);
    }
    j["checks"] = checks;
    return j.dump(2) + "\n";
}

SuiteReport report_from_json(const std::string& text) {
    const auto j = ordered::parse(text);
    SuiteReport r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.trials = j.at("trials").get<int>();
    r.tolerance = j.at("tolerance").get<double>();
    for (const auto& e : j.at("checks")) {
        CheckSummary c;
        c.id = e.at("id").get<std::string>();
        c.anchor = e.at("anchor").get<std::string>();
        // non-finite residuals serialize as null
        c.max = e.at("max").is_null() ? HUGE_VAL : e.at("max").get<double>();
        c.mean = e.at("mean").is_null() ? HUGE_VAL : e.at("mean").get<double>();
        c.count = e.value("samples", 0L);
        c.pass = e.at("pass").get<bool>();
        r.checks.push_back(c);
    }
    return r;
}

std::string jet_sample_to_json(const JetSample& s) {
    ordered j;
    j["kind"] = "jet";
    j["seed"] = s.seed;
    j["scale"] = s.scale;
    j["omega"] = matrix(s.omega);
    j["coefficients"] = s.coeffs.c;
    const auto res = constraint_residuals(s.omega, s.coeffs);
    j["residuals"] = {{"primitive", res.primitive}, {"closed", res.closed}};
    return j.dump(2) + "\n";
}

JetSample jet_sample_from_json(const std::string& text) {
    const auto j = ordered::parse(text);
    if (j.value("kind", std::string()) != "jet") throw std::invalid_argument("not a jet sample");
    JetSample s;
    s.seed = j.value("seed", std::uint64_t{0});
    s.scale = j.value("scale", 1.0);
    s.omega = read_matrix(j.at("omega"));
    const auto& c = j.at("coefficients");
    if (c.size() != static_cast<std::size_t>(kJetCoeffs))
        throw std::invalid_argument("a jet sample has 560 coefficients");
    for (int i = 0; i < kJetCoeffs; ++i) s.coeffs.c[i] = c[i].get<double>();
    return s;
}

std::string invariant_sample_to_json(const InvariantSample& s) {
    ordered j;
    j["kind"] = "invariant";
    j["seed"] = s.seed;
    j["algebra"] = s.algebra;
    ordered c = ordered::array();
    for (int k = 0; k < kDim; ++k) {
        ordered m = ordered::array();
        for (int i = 0; i < kDim; ++i) {
            ordered row = ordered::array();
            for (int l = 0; l < kDim; ++l) row.push_back(s.c(k, i, l));
            m.push_back(row);
        }
        c.push_back(m);
    }
    j["c"] = c;
    j["omega"] = matrix(s.omega);
    j["phi"] = coeffs_from_form(s.phi);
    j["residuals"] = {{"primitive", max_abs(lambda_contraction(s.phi, inverse2(s.omega)))},
                      {"closed", max_abs(ce_differential(s.c, s.phi))}};
    return j.dump(2) + "\n";
}

InvariantSample invariant_sample_from_json(const std::string& text) {
    const auto j = ordered::parse(text);
    if (j.value("kind", std::string()) != "invariant")
        throw std::invalid_argument("not an invariant sample");
    InvariantSample s;
    s.seed = j.value("seed", std::uint64_t{0});
    s.algebra = j.value("algebra", std::string());
    s.c = TensorD({Var::Contra, Var::Co, Var::Co});
    const auto& c = j.at("c");
    for (int k = 0; k < kDim; ++k)
        for (int i = 0; i < kDim; ++i)
            for (int l = 0; l < kDim; ++l) s.c(k, i, l) = c.at(k).at(i).at(l).get<double>();
    s.omega = read_matrix(j.at("omega"));
    std::array<double, 20> v{};
    const auto& p = j.at("phi");
    if (p.size() != 20) throw std::invalid_argument("phi needs 20 components");
    for (int i = 0; i < 20; ++i) v[i] = p[i].get<double>();
    s.phi = form_from_coeffs(v);
    return s;
}

}  // namespace iia
