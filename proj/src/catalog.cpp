#include "iia/catalog.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "catalog_data.hpp"
#include "iia/geometry.hpp"
#include "json.hpp"

namespace iia {

std::vector<AlgebraEntry> parse_catalog(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    std::vector<AlgebraEntry> out;
    for (const auto& a : j.at("algebras")) {
        AlgebraEntry e;
        e.name = a.at("name").get<std::string>();
        e.notation = a.value("notation", std::string());
        e.description = a.value("description", std::string());
        e.c = TensorD({Var::Contra, Var::Co, Var::Co});
        const auto& c = a.at("c");
        if (c.size() != kDim) throw std::invalid_argument("catalog entry '" + e.name + "': c must be 6x6x6");
        for (int k = 0; k < kDim; ++k) {
            if (c[k].size() != kDim) throw std::invalid_argument("catalog entry '" + e.name + "': bad row");
            for (int i = 0; i < kDim; ++i) {
                if (c[k][i].size() != kDim)
                    throw std::invalid_argument("catalog entry '" + e.name + "': bad row");
                for (int jj = 0; jj < kDim; ++jj) e.c(k, i, jj) = c[k][i][jj].get<double>();
            }
        }
        out.push_back(std::move(e));
    }
    return out;
}

const std::vector<AlgebraEntry>& builtin_catalog() {
    static const std::vector<AlgebraEntry> cat = parse_catalog(detail::kCatalogJson);
    return cat;
}

std::vector<AlgebraEntry> load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open catalog " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_catalog(ss.str());
}

AlgebraEntry resolve_algebra(const std::string& key, const std::vector<AlgebraEntry>& catalog) {
    for (const auto& e : catalog)
        if (e.name == key) return e;
    if (key.find(',') == std::string::npos)
        throw std::invalid_argument("unknown algebra '" + key + "'");
    AlgebraEntry e;
    e.name = key;
    e.notation = key;
    e.c = parse_structure_notation(key);
    return e;
}

}  // namespace iia
