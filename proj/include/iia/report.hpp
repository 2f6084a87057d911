#pragma once

#include <string>

#include "iia/identities.hpp"
#include "iia/sampling.hpp"

namespace iia {

// Compact JSON with fixed key order and round-trip precision.
std::string report_to_json(const SuiteReport& r);
SuiteReport report_from_json(const std::string& text);

std::string jet_sample_to_json(const JetSample& s);
JetSample jet_sample_from_json(const std::string& text);

std::string invariant_sample_to_json(const InvariantSample& s);
InvariantSample invariant_sample_from_json(const std::string& text);

}  // namespace iia
