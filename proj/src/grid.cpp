#include "bqp/grid.hpp"

#include "bqp/error.hpp"

#include <cmath>
#include <string>

namespace bqp {

GridPtr Grid::make(int n, Real length, Real dealias_fraction) {
  if (n < 16 || (n & (n - 1)) != 0) {
    throw ArgumentError("grid size must be a power of two >= 16, got " + std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ArgumentError("grid length must be positive and finite");
  }
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) {
    throw ArgumentError("dealias fraction must lie in (0, 1]");
  }
  return GridPtr(new Grid(n, length, dealias_fraction));
}

Grid::Grid(int n, Real length, Real dealias_fraction)
    : n_(n), length_(length), dealias_fraction_(dealias_fraction) {
  cutoff_ = static_cast<int>(std::floor(dealias_fraction * n / 2.0 + 1e-12));
  if (cutoff_ >= n / 2) cutoff_ = n / 2 - 1;

  const int h = half();
  const Real unit = wavenumber_unit();
  kx_.resize(h);
  ky_.resize(n);
  for (int i = 0; i < h; ++i) kx_(i) = unit * (i == n / 2 ? 0 : i);  // Nyquist column carries no derivative
  for (int i = 0; i < n; ++i) ky_(i) = unit * (i == n / 2 ? 0 : signed_index(i));

  k2_.resize(n, h);
  index_radius_.resize(n, h);
  mask_.resize(n, h);
  for (int r = 0; r < n; ++r) {
    const int my = signed_index(r);
    for (int c = 0; c < h; ++c) {
      const int mx = c;
      const Real kxx = unit * mx;
      const Real kyy = unit * my;
      k2_(r, c) = kxx * kxx + kyy * kyy;
      index_radius_(r, c) = std::sqrt(static_cast<Real>(mx * mx + my * my));
      const bool keep = std::abs(mx) <= cutoff_ && std::abs(my) <= cutoff_;
      mask_(r, c) = keep ? 1.0 : 0.0;
      if (keep) max_radius_ = std::max(max_radius_, index_radius_(r, c));
    }
  }
}

}  // namespace bqp
