#pragma once

#include <Eigen/Core>

#include <complex>
#include <memory>
#include <numbers>

namespace bqp {

using Real = double;
using Complex = std::complex<double>;

/// Physical-space samples, indexed (iy, ix), row-major so x runs fastest.
using Values = Eigen::Array<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
/// Half-plane Fourier coefficients, n rows (ky) by n/2+1 columns (kx >= 0).
using Coeffs = Eigen::Array<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
/// Real-valued table over the half-plane spectrum (symbols, masks).
using SpectralTable = Eigen::Array<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Uniform periodic grid on [0, L)^2 with n points per axis.
///
/// Wavenumber of FFT index m is (2*pi/L)*m with m in [-n/2, n/2). Modes with
/// |m_x| or |m_y| above the dealias cutoff K = floor(fraction*n/2) are removed
/// after nonlinear products (2/3 rule by default, which keeps 3K < n).
class Grid {
 public:
  static GridPtr make(int n, Real length = 2.0 * std::numbers::pi, Real dealias_fraction = 2.0 / 3.0);

  int n() const { return n_; }
  int half() const { return n_ / 2 + 1; }
  Real length() const { return length_; }
  Real spacing() const { return length_ / n_; }
  Real cell_area() const { return spacing() * spacing(); }
  Real dealias_fraction() const { return dealias_fraction_; }
  int dealias_cutoff() const { return cutoff_; }

  /// Signed FFT index m in [-n/2, n/2) for storage index i in [0, n).
  int signed_index(int i) const { return i < n_ / 2 ? i : i - n_; }
  Real wavenumber_unit() const { return 2.0 * std::numbers::pi / length_; }

  /// Physical wavenumbers: kx over the n/2+1 stored columns, ky over the n rows.
  const Eigen::ArrayXd& kx() const { return kx_; }
  const Eigen::ArrayXd& ky() const { return ky_; }
  /// |k|^2 in physical units.
  const SpectralTable& k_squared() const { return k2_; }
  /// |m| in index units, used by the dyadic filters.
  const SpectralTable& index_radius() const { return index_radius_; }
  /// 1 on retained modes, 0 on truncated ones.
  const SpectralTable& dealias_mask() const { return mask_; }
  /// Largest index radius among retained modes.
  Real max_retained_radius() const { return max_radius_; }

  Real x(int ix) const { return ix * spacing(); }
  Real y(int iy) const { return iy * spacing(); }

  bool same_shape(const Grid& other) const {
    return n_ == other.n_ && length_ == other.length_ && dealias_fraction_ == other.dealias_fraction_;
  }

 private:
  Grid(int n, Real length, Real dealias_fraction);

  int n_;
  Real length_;
  Real dealias_fraction_;
  int cutoff_;
  Real max_radius_ = 0.0;
  Eigen::ArrayXd kx_;
  Eigen::ArrayXd ky_;
  SpectralTable k2_;
  SpectralTable index_radius_;
  SpectralTable mask_;
};

}  // namespace bqp
