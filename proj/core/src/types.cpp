#include "lpsynth/types.hpp"

#include <algorithm>

namespace lpsynth {

PixelRect intersect(const PixelRect& a, const PixelRect& b) {
  const int x0 = std::max(a.x, b.x);
  const int y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.x + a.w, b.x + b.w);
  const int y1 = std::min(a.y + a.h, b.y + b.h);
  if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
  return {x0, y0, x1 - x0, y1 - y0};
}

bool overlaps(const PixelRect& a, const PixelRect& b) { return !intersect(a, b).empty(); }

double iou(const PixelRect& a, const PixelRect& b) {
  const long long inter = intersect(a, b).area();
  const long long uni = a.area() + b.area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

std::string_view to_string(DataType t) {
  switch (t) {
    case DataType::synthetic: return "synthetic";
    case DataType::partly_real: return "partly_real";
    case DataType::real: return "real";
  }
  return "synthetic";
}

DataType parse_data_type(std::string_view s) {
  if (s == "synthetic") return DataType::synthetic;
  if (s == "partly_real") return DataType::partly_real;
  if (s == "real") return DataType::real;
  throw Error("unknown data type '" + std::string(s) + "'");
}

}  // namespace lpsynth
