#pragma once

#include <string>
#include <vector>

#include "iia/tensor.hpp"

namespace iia {

struct AlgebraEntry {
    std::string name;
    std::string notation;
    std::string description;
    TensorD c;  // c^k_{ij}, (Contra,Co,Co)
};

// Catalog compiled into the library from data/algebras.json.
const std::vector<AlgebraEntry>& builtin_catalog();
std::vector<AlgebraEntry> parse_catalog(const std::string& json_text);
std::vector<AlgebraEntry> load_catalog(const std::string& path);

// A catalog name, or an inline structure in compact notation ("0,0,0,0,12,13").
AlgebraEntry resolve_algebra(const std::string& name_or_notation,
                             const std::vector<AlgebraEntry>& catalog = builtin_catalog());

}  // namespace iia
