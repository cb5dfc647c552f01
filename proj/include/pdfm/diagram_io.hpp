#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "pdfm/diagram.hpp"

namespace pdfm {

// Diagram files are JSON objects of the form {"points": [[birth, death], ...]}.
// Doubles are written in shortest round-trip form, so save/load is exact.

PersistenceDiagram diagram_from_json(const nlohmann::json& j);
nlohmann::json diagram_to_json(const PersistenceDiagram& d);

PersistenceDiagram load_diagram(std::istream& in);
PersistenceDiagram load_diagram(const std::filesystem::path& path);
void save_diagram(const PersistenceDiagram& d, std::ostream& out);
void save_diagram(const PersistenceDiagram& d, const std::filesystem::path& path);

/// All `*.json` files directly inside `dir`, sorted lexicographically by
/// file name. Position in the result is the diagram's index.
std::vector<std::filesystem::path> list_diagram_files(const std::filesystem::path& dir);
std::vector<PersistenceDiagram> load_diagram_directory(const std::filesystem::path& dir);

}  // namespace pdfm
