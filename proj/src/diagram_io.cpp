#include "pdfm/diagram_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "pdfm/errors.hpp"

namespace pdfm {

using nlohmann::json;

PersistenceDiagram diagram_from_json(const json& j) {
  if (!j.is_object() || !j.contains("points")) {
    throw ParseError("diagram: expected an object with a \"points\" array");
  }
  const json& pts = j.at("points");
  if (!pts.is_array()) throw ParseError("diagram: \"points\" must be an array");

  std::vector<PlanePoint> points;
  points.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const json& rec = pts[i];
    if (!rec.is_array() || rec.size() != 2 || !rec[0].is_number() || !rec[1].is_number()) {
      throw ParseError("points[" + std::to_string(i) + "]: expected [birth, death] with two numbers, got " +
                       rec.dump());
    }
    const double b = rec[0].get<double>();
    const double d = rec[1].get<double>();
    try {
      points.emplace_back(b, d);
    } catch (const ValidationError& e) {
      throw ValidationError("point " + std::to_string(i) + ": " + e.what());
    }
  }
  return PersistenceDiagram(std::move(points));
}

json diagram_to_json(const PersistenceDiagram& d) {
  json pts = json::array();
  for (const auto& p : d) pts.push_back({p.birth(), p.death()});
  return json{{"points", std::move(pts)}};
}

PersistenceDiagram load_diagram(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("diagram: ") + e.what());
  }
  return diagram_from_json(j);
}

PersistenceDiagram load_diagram(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return load_diagram(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_diagram(const PersistenceDiagram& d, std::ostream& out) {
  out << diagram_to_json(d).dump() << '\n';
}

void save_diagram(const PersistenceDiagram& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  save_diagram(d, out);
}

std::vector<std::filesystem::path> list_diagram_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ParseError(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
  return files;
}

std::vector<PersistenceDiagram> load_diagram_directory(const std::filesystem::path& dir) {
  std::vector<PersistenceDiagram> out;
  for (const auto& f : list_diagram_files(dir)) out.push_back(load_diagram(f));
  return out;
}

}  // namespace pdfm
