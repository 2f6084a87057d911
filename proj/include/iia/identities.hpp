#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iia/catalog.hpp"
#include "iia/flow.hpp"
#include "iia/geometry.hpp"

namespace iia {

class ApplicabilityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Applicability { Jet, Invariant, Both };

// Everything a check may read about one sample; derived data is computed on
// first use. Not shared between threads.
class EvalContext {
public:
    explicit EvalContext(std::shared_ptr<const Backend> backend, const StructureOptions& opt = {});

    BackendKind kind() const { return geo_.backend().kind(); }
    const Geometry& geo() const { return geo_; }
    const PointGeometry& point() const;
    const LaplacianTerms& laplacian() const;
    const TensorD& original() const;  // dLd(|phi|^2 phi^) with the factor divided out
    const TensorD& interiorTerm() const { return laplacian().interior; }

private:
    Geometry geo_;
    mutable std::optional<PointGeometry> point_;
    mutable std::optional<LaplacianTerms> lap_;
    mutable std::optional<TensorD> orig_;
};

struct IdentityCheck {
    std::string id;
    std::string name;
    std::string description;
    std::string anchor;
    Applicability applicability = Applicability::Both;
    std::function<double(const EvalContext&)> evaluator;

    bool applies_to(BackendKind k) const {
        return applicability == Applicability::Both ||
               (applicability == Applicability::Jet) == (k == BackendKind::JetChart);
    }
};

// ||a - b||_max / max(1, ||a||, ||b||, ||terms||...)
double residual(const TensorD& a, const TensorD& b, std::initializer_list<const TensorD*> terms = {});
double residual(double a, double b, std::initializer_list<double> terms = {});

const std::vector<IdentityCheck>& identity_catalog();
const IdentityCheck& find_check(const std::string& id);

double run_check(const IdentityCheck& check, const EvalContext& ctx);

struct SuiteConfig {
    std::uint64_t seed = 0;
    int trials = 1;
    double tolerance = 1e-8;
    std::vector<std::string> checkFilter;  // empty selects all
    std::vector<std::string> algebras = {"abelian", "n1", "n2"};
    std::vector<AlgebraEntry> catalog;  // empty uses the built-in catalog
    double scale = 1.0;
    int threads = 0;  // 0 uses the hardware concurrency
    bool jet = true;
    bool invariant = true;
};

struct CheckSummary {
    std::string id;
    std::string anchor;
    double max = 0;
    double mean = 0;
    long count = 0;
    bool pass = true;
};

struct SuiteReport {
    std::uint64_t seed = 0;
    int trials = 0;
    double tolerance = 0;
    std::vector<CheckSummary> checks;
    bool all_pass() const;
};

SuiteReport run_suite(const SuiteConfig& cfg);
// The selected checks that apply to one fixed sample; trials, seed and sampling fields are ignored.
SuiteReport run_on_backend(std::shared_ptr<const Backend> backend, const SuiteConfig& cfg);

}  // namespace iia
