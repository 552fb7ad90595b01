#pragma once
// Built-in problems with known answers, exposed as schema-1 configurations.

#include "orps/types.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace orps::app {

struct CatalogEntry {
  std::string name;
  std::string description;
  nlohmann::json config;
  /// Closed-form solution on [0, omega] (left limits), when one is known.
  std::function<Vector(double)> exact;
};

const std::vector<CatalogEntry>& catalog();

/// nullopt for unknown names.
std::optional<CatalogEntry> find_catalog(const std::string& name);

}  // namespace orps::app
