#include "pdfm/grouping_io.hpp"

#include <cmath>
#include <fstream>

#include "pdfm/errors.hpp"

namespace pdfm {

using nlohmann::json;

json grouping_to_json(const Grouping& g) {
  json rows = json::array();
  for (std::size_t i = 0; i < g.nontrivial_row_count(); ++i) {
    json r = json::array();
    for (const auto& c : g.row(i)) r.push_back(c ? json(*c) : json("diag"));
    rows.push_back(std::move(r));
  }
  return json{{"L", g.column_count()}, {"rows", std::move(rows)}};
}

Grouping grouping_from_json(const json& j, std::span<const PersistenceDiagram> diagrams) {
  if (!j.is_object() || !j.contains("L") || !j.contains("rows")) {
    throw ParseError("grouping: expected an object with \"L\" and \"rows\"");
  }
  if (!j.at("L").is_number_unsigned()) throw ParseError("grouping: \"L\" must be a nonnegative integer");
  const auto L = j.at("L").get<std::size_t>();
  if (L != diagrams.size()) {
    throw ValidationError("grouping: L = " + std::to_string(L) + " but " + std::to_string(diagrams.size()) +
                          " diagrams were supplied");
  }
  const json& rows = j.at("rows");
  if (!rows.is_array()) throw ParseError("grouping: \"rows\" must be an array");

  std::vector<std::vector<Cell>> cells;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const json& r = rows[i];
    if (!r.is_array() || r.size() != L) {
      throw ParseError("grouping: rows[" + std::to_string(i) + "] must be an array of " + std::to_string(L) + " cells");
    }
    std::vector<Cell> row;
    for (std::size_t c = 0; c < L; ++c) {
      if (r[c].is_string() && r[c].get<std::string>() == "diag") {
        row.emplace_back();
      } else if (r[c].is_number_unsigned()) {
        row.emplace_back(r[c].get<std::size_t>());
      } else {
        throw ParseError("grouping: rows[" + std::to_string(i) + "][" + std::to_string(c) +
                         "]: expected a point index or \"diag\", got " + r[c].dump());
      }
    }
    cells.push_back(std::move(row));
  }
  return Grouping({diagrams.begin(), diagrams.end()}, std::move(cells));
}

Grouping load_grouping(const std::filesystem::path& path, std::span<const PersistenceDiagram> diagrams) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return grouping_from_json(j, diagrams);
}

json flatness_to_json(const FlatnessReport& r) {
  auto num = [](double x) -> json { return std::isfinite(x) ? json(x) : json("inf"); };
  json out{{"flat", r.flat},
           {"row_diameters", r.row_diameters},
           {"max_diameter", r.max_diameter},
           {"min_inter_distance", num(r.min_inter_distance)},
           {"min_diagonal_clearance", num(r.min_diagonal_clearance)},
           {"reason", r.reason}};
  out["feasible_interval"] =
      r.feasible_interval ? json::array({num(r.feasible_interval->lo), num(r.feasible_interval->hi)}) : json(nullptr);
  out["witness_lambda"] = r.witness_lambda ? json(*r.witness_lambda) : json(nullptr);
  return out;
}

}  // namespace pdfm
