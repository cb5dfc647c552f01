#include "pdfm/diagram.hpp"

#include <algorithm>
#include <sstream>

#include "pdfm/errors.hpp"

namespace pdfm {

bool PlanePoint::admissible(double birth, double death) noexcept {
  return std::isfinite(birth) && std::isfinite(death) && death > birth;
}

PlanePoint::PlanePoint(double birth, double death) : birth_(birth), death_(death) {
  if (!std::isfinite(birth) || !std::isfinite(death)) {
    std::ostringstream msg;
    msg << "non-finite coordinate (" << birth << ", " << death << ")";
    throw ValidationError(msg.str());
  }
  if (!(death > birth)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "death (" << death << ") must exceed birth (" << birth << ")";
    throw ValidationError(msg.str());
  }
}

const PlanePoint& DiagramEntry::point() const {
  if (diagonal_) throw std::logic_error("DiagramEntry::point() called on the diagonal");
  return point_;
}

double distance_squared(const DiagramEntry& a, const DiagramEntry& b) {
  if (a.is_diagonal() && b.is_diagonal()) return 0.0;
  if (a.is_diagonal()) return distance_to_diagonal_squared(b.point());
  if (b.is_diagonal()) return distance_to_diagonal_squared(a.point());
  return norm2(a.point().vec() - b.point().vec());
}

bool operator==(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  if (a.size() != b.size()) return false;
  auto sa = a.points_;
  auto sb = b.points_;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return sa == sb;
}

}  // namespace pdfm
