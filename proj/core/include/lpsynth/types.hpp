#pragma once

#include <Eigen/Core>

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lpsynth {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Four points ordered TL, TR, BR, BL.
using Quad = std::array<Vec2, 4>;

/// Axis-aligned integer pixel rectangle; covers columns [x, x+w) and rows [y, y+h).
struct PixelRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool empty() const { return w <= 0 || h <= 0; }
  long long area() const { return empty() ? 0 : static_cast<long long>(w) * h; }
  bool contains(int px, int py) const { return px >= x && px < x + w && py >= y && py < y + h; }
  bool operator==(const PixelRect&) const = default;
};

PixelRect intersect(const PixelRect& a, const PixelRect& b);
bool overlaps(const PixelRect& a, const PixelRect& b);
double iou(const PixelRect& a, const PixelRect& b);

enum class DataType { synthetic, partly_real, real };

std::string_view to_string(DataType t);
DataType parse_data_type(std::string_view s);

/// Base for all contract violations reported by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lpsynth
