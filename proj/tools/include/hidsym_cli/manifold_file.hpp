#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "hidsym/catalog.hpp"
#include "hidsym/report.hpp"

namespace hidsym::cli {

/// Malformed input file, unknown names, bad arguments.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ManifoldFile document -> catalog entry. `overrides` replaces parameter values.
CatalogEntry entry_from_json(const nlohmann::json& doc, const ParamEnv& overrides = {});
nlohmann::json entry_to_json(const CatalogEntry& e);
CatalogEntry read_manifold_file(const std::string& path, const ParamEnv& overrides = {});

nlohmann::json report_to_json(const ResidualReport& r, const std::string& target, const CheckOptions& opt);

/// "0,1,2" <-> {0, 1, 2}
Index parse_index(const std::string& s, std::size_t dim);
std::string index_string(const Index& idx);

}  // namespace hidsym::cli
