#include <cmath>

#include "gstlab/errors.hpp"
#include "gstlab/spectral.hpp"

namespace gstlab {

void Grid::position(std::size_t i, double* x) const {
  if (d == 1) {
    x[0] = node(static_cast<int>(i));
  } else {
    x[0] = node(static_cast<int>(i / n));
    x[1] = node(static_cast<int>(i % n));
  }
}

double Grid::radius(std::size_t i) const {
  double x[2] = {0.0, 0.0};
  position(i, x);
  return std::hypot(x[0], x[1]);
}

void Grid::validate() const {
  if (d != 1 && d != 2) throw Error(ErrorCode::InvalidArgument, "grid: d must be 1 or 2");
  if (!(half_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid: half width must be positive");
  if (n < 64 || (n & (n - 1)) != 0)
    throw Error(ErrorCode::InvalidArgument, "grid: n must be a power of two >= 64");
}

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace gstlab
