#include "mapvec/types.hpp"

namespace mapvec {

const char* to_string(MapClass c) {
  switch (c) {
    case MapClass::Divider: return "divider";
    case MapClass::PedCross: return "ped_cross";
    case MapClass::Curb: return "curb";
  }
  throw Error(Errc::Internal, "invalid MapClass value");
}

MapClass map_class_from_string(const std::string& s) {
  if (s == "divider") return MapClass::Divider;
  if (s == "ped_cross") return MapClass::PedCross;
  if (s == "curb") return MapClass::Curb;
  throw Error(Errc::UnknownClass, "unknown map class: '" + s + "'");
}

void GridSpec::validate() const {
  if (!(x_max > x_min) || !(y_max > y_min)) {
    throw Error(Errc::SchemaViolation, "grid extent must satisfy x_max > x_min and y_max > y_min");
  }
  if (!(resolution > 0.0)) {
    throw Error(Errc::SchemaViolation, "grid resolution must be positive");
  }
  if (width() < 1 || height() < 1) {
    throw Error(Errc::SchemaViolation, "grid must span at least one pixel in each axis");
  }
}

void VectorInstance::validate() const {
  if (points.size() < 2) {
    throw Error(Errc::InvalidInstance, "instance needs at least 2 points");
  }
  for (size_t i = 1; i < points.size(); ++i) {
    if (points[i] == points[i - 1]) {
      throw Error(Errc::InvalidInstance, "instance has identical consecutive points");
    }
  }
  if (closed && points.size() < 3) {
    throw Error(Errc::InvalidInstance, "closed instance needs at least 3 points");
  }
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw Error(Errc::InvalidInstance, "confidence must be in [0,1]");
  }
}

}  // namespace mapvec
