#pragma once

#include <filesystem>
#include <span>

#include <json.hpp>

#include "pdfm/grouping.hpp"

namespace pdfm {

// {"L": L, "rows": [[idx-or-"diag", ...], ...]}; idx is 0-based into the
// column's diagram. Only nontrivial rows are written.
nlohmann::json grouping_to_json(const Grouping& g);
Grouping grouping_from_json(const nlohmann::json& j, std::span<const PersistenceDiagram> diagrams);
Grouping load_grouping(const std::filesystem::path& path, std::span<const PersistenceDiagram> diagrams);

nlohmann::json flatness_to_json(const FlatnessReport& r);

}  // namespace pdfm
