// iia: verification suite, invariant flow integration and jet sample generation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "iia/catalog.hpp"
#include "iia/flow.hpp"
#include "iia/identities.hpp"
#include "iia/report.hpp"
#include "iia/sampling.hpp"

namespace {

enum Exit : int {
    kPass = 0,
    kCheckFail = 1,
    kSampling = 2,
    kPositivity = 3,
    kStepReject = 4,
    kUsage = 64,
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << text;
}

std::vector<iia::AlgebraEntry> catalog_for(const std::string& path) {
    return path.empty() ? iia::builtin_catalog() : iia::load_catalog(path);
}

struct VerifyArgs {
    std::uint64_t seed = 0;
    int trials = 10;
    double tol = 1e-8;
    std::vector<std::string> checks;
    std::vector<std::string> algebras;
    double scale = 1.0;
    int threads = 0;
    std::string catalog;
    std::string sample;
    std::string out;
    bool noJet = false;
    bool noInvariant = false;
};

struct FlowArgs {
    std::string algebra = "n1";
    std::uint64_t seed = 0;
    double dt = 1e-3;
    long steps = 1000;
    double scale = 1.0;
    long recordEvery = 1;
    double monitorLimit = 1e-6;
    std::string catalog;
    std::string out;
};

struct JetgenArgs {
    std::uint64_t seed = 0;
    double scale = 1.0;
    bool standard = false;
    std::string out;
};

int cmd_verify(const VerifyArgs& a) {
    iia::SuiteConfig cfg;
    cfg.seed = a.seed;
    cfg.trials = a.trials;
    cfg.tolerance = a.tol;
    cfg.checkFilter = a.checks;
    if (!a.algebras.empty()) cfg.algebras = a.algebras;
    cfg.scale = a.scale;
    cfg.threads = a.threads;
    cfg.jet = !a.noJet;
    cfg.invariant = !a.noInvariant;
    if (!a.catalog.empty()) cfg.catalog = iia::load_catalog(a.catalog);

    iia::SuiteReport rep;
    if (!a.sample.empty()) {
        const std::string text = read_file(a.sample);
        const auto kind = nlohmann::json::parse(text).value("kind", std::string());
        std::shared_ptr<const iia::Backend> b;
        if (kind == "jet")
            b = iia::make_backend(iia::jet_sample_from_json(text));
        else if (kind == "invariant")
            b = iia::make_backend(iia::invariant_sample_from_json(text));
        else
            throw std::invalid_argument("sample kind must be jet or invariant");
        rep = iia::run_on_backend(b, cfg);
    } else {
        rep = iia::run_suite(cfg);
    }
    write_output(a.out, iia::report_to_json(rep));

    int failed = 0;
    for (const auto& c : rep.checks)
        if (!c.pass) {
            ++failed;
            std::fprintf(stderr, "FAIL %s max %.3e\n", c.id.c_str(), c.max);
        }
    std::fprintf(stderr, "%zu checks, %d failed (tol %.1e)\n", rep.checks.size(), failed, a.tol);
    return failed ? kCheckFail : kPass;
}

int cmd_flow(const FlowArgs& a) {
    const auto cat = catalog_for(a.catalog);
    const iia::AlgebraEntry alg = iia::resolve_algebra(a.algebra, cat);
    iia::InvariantSampleOptions so;
    so.scale = a.scale;
    const iia::InvariantSample s = iia::sample_typeiia_invariant(alg.name, alg.c, a.seed, so);

    iia::FlowState state;
    state.c = s.c;
    state.omega = s.omega;
    state.phi = iia::coeffs_from_form(s.phi);
    iia::FlowOptions opt;
    opt.dt = a.dt;
    opt.steps = a.steps;
    opt.recordEvery = a.recordEvery;
    opt.monitorLimit = a.monitorLimit;

    iia::FlowTrace trace;
    int code = kPass;
    try {
        iia::evolve_into(state, opt, trace);
    } catch (const iia::PositivityLost& e) {
        std::fprintf(stderr, "positivity lost: %s (last good t = %.12g)\n", e.what(), e.lastGoodTime);
        code = kPositivity;
    } catch (const iia::StepRejected& e) {
        std::fprintf(stderr, "step rejected: %s (step %ld)\n", e.what(), e.step);
        code = kStepReject;
    }
    std::ostringstream csv;
    trace.write_csv(csv);
    write_output(a.out, csv.str());
    if (code == kPass && !trace.monitors.empty()) {
        const auto& f = trace.monitors.front();
        const auto& l = trace.monitors.back();
        std::fprintf(stderr, "t = %.6g, detG %.12e -> %.12e, |phi|^2 %.6e -> %.6e\n", l.t, f.detG,
                     l.detG, f.normPhiSq, l.normPhiSq);
    }
    return code;
}

int cmd_jetgen(const JetgenArgs& a) {
    iia::JetSampleOptions o;
    o.scale = a.scale;
    o.standardBase = a.standard;
    const iia::JetSample s = iia::sample_typeiia_jet(a.seed, o);
    write_output(a.out, iia::jet_sample_to_json(s));
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Type IIA structure verification and flow tool"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "iia 1.0.0");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Run the identity suite on seeded samples");
    verify->add_option("--seed", va.seed, "Master seed")->capture_default_str();
    verify->add_option("--trials", va.trials, "Samples per backend")
        ->check(CLI::Range(1, 1 << 30))
        ->capture_default_str();
    verify->add_option("--tol", va.tol, "Relative residual tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    verify->add_option("--checks", va.checks, "Check IDs (comma list)")->delimiter(',');
    verify->add_option("--algebra", va.algebras, "Algebra name or notation (repeatable)");
    verify->add_option("--scale", va.scale, "Jet sample scale")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    verify->add_option("--threads", va.threads, "Worker threads, 0 for all cores")
        ->check(CLI::NonNegativeNumber);
    verify->add_option("--catalog", va.catalog, "Algebra catalog JSON")->check(CLI::ExistingFile);
    verify->add_option("--sample", va.sample, "Evaluate one saved sample instead")
        ->check(CLI::ExistingFile);
    verify->add_flag("--no-jet", va.noJet, "Skip jet samples");
    verify->add_flag("--no-invariant", va.noInvariant, "Skip invariant samples");
    verify->add_option("--out", va.out, "Report path (stdout if omitted)");

    FlowArgs fa;
    auto* flow = app.add_subcommand("flow", "Integrate the flow from invariant initial data");
    flow->add_option("--algebra", fa.algebra, "Algebra name or notation")->capture_default_str();
    flow->add_option("--seed", fa.seed, "Sample seed")->capture_default_str();
    flow->add_option("--dt", fa.dt, "Time step")->check(CLI::PositiveNumber)->capture_default_str();
    flow->add_option("--steps", fa.steps, "Number of steps")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    flow->add_option("--scale", fa.scale, "Initial form norm")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    flow->add_option("--record-every", fa.recordEvery, "Trace stride")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    flow->add_option("--monitor-limit", fa.monitorLimit, "Step rejection threshold")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    flow->add_option("--catalog", fa.catalog, "Algebra catalog JSON")->check(CLI::ExistingFile);
    flow->add_option("--out", fa.out, "Trace CSV path (stdout if omitted)");

    JetgenArgs ja;
    auto* jetgen = app.add_subcommand("jetgen", "Write a seeded jet sample as JSON");
    jetgen->add_option("--seed", ja.seed, "Sample seed")->capture_default_str();
    jetgen->add_option("--scale", ja.scale, "Form norm of the base value")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    jetgen->add_flag("--standard", ja.standard, "Use the standard form as base value");
    jetgen->add_option("--out", ja.out, "Sample path (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*verify) return cmd_verify(va);
        if (*flow) return cmd_flow(fa);
        return cmd_jetgen(ja);
    } catch (const iia::SamplingExhausted& e) {
        std::fprintf(stderr, "sampling failed: %s\n", e.what());
        return kSampling;
    } catch (const iia::NoSolution& e) {
        std::fprintf(stderr, "sampling failed: %s\n", e.what());
        return kSampling;
    } catch (const iia::PositivityLost& e) {
        std::fprintf(stderr, "positivity lost: %s (last good t = %.12g)\n", e.what(), e.lastGoodTime);
        return kPositivity;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kCheckFail;
    }
}
