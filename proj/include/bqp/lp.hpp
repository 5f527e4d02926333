#pragma once

#include "bqp/spectral.hpp"

#include <limits>
#include <memory>
#include <vector>

namespace bqp::lp {

inline constexpr Real kInf = std::numeric_limits<Real>::infinity();

/// Besov index triple (s, p, r); the Hoelder-Zygmund scale C^s is p = r = inf.
struct BesovSpec {
  Real s = 0.0;
  Real p = kInf;
  Real r = kInf;

  static BesovSpec holder(Real s) { return {s, kInf, kInf}; }
  void validate() const;
};

/// Smooth radial dyadic partition of unity on a grid.
///
/// phi is built from the exp(-1/t) smooth step so that phi vanishes outside
/// 3/4 <= |xi| <= 8/3 (xi measured in units of 2*pi/L), and the low-pass symbol
/// is defined as chi := 1 - sum_{j>=0} phi(2^-j xi), which makes the partition
/// exact on every retained mode. j_max is the first block whose successor
/// vanishes on all retained modes.
class FilterBank {
 public:
  explicit FilterBank(GridPtr grid, int lag = 4);

  const GridPtr& grid() const { return grid_; }
  int j_min() const { return -1; }
  int j_max() const { return j_max_; }
  int block_count() const { return j_max_ + 2; }
  int lag() const { return lag_; }

  /// Symbol of Delta_j (chi for j = -1), zero for j outside [-1, j_max].
  const SpectralTable& symbol(int j) const;
  /// Symbol of S_j = sum_{j' <= j-1} Delta_j'.
  SpectralTable low_pass_symbol(int j) const;

  /// Delta_j f; throws ArgumentError for j outside [-1, j_max].
  Spectrum block(const Spectrum& f_hat, int j) const;
  ScalarField block(const ScalarField& f, int j) const;
  /// Physical-space blocks for j = -1..j_max (index j+1).
  std::vector<ScalarField> decompose(const ScalarField& f) const;
  std::vector<Spectrum> decompose_spectral(const Spectrum& f_hat) const;

  /// max over retained modes of |chi + sum phi_j - 1|.
  Real partition_defect() const;

  /// Scalar profiles (radius in index units).
  static Real smooth_step(Real t);
  static Real low_profile(Real r);
  static Real annulus_profile(Real r);

 private:
  GridPtr grid_;
  int lag_;
  int j_max_ = 0;
  std::vector<SpectralTable> symbols_;  // index j+1
  SpectralTable zero_;
};

/// Shared immutable filter bank per (grid shape, lag).
std::shared_ptr<const FilterBank> filter_bank(const GridPtr& grid, int lag = 4);

struct NormOptions {
  /// Refine grid maxima by evaluating the trigonometric polynomial on a 4x
  /// oversampled stencil around the largest grid values.
  bool refine_linf = false;
  int lag = 4;
};

/// Rectangle-rule L^p norm over the box; p = inf is the grid maximum.
Real lp_norm(const ScalarField& f, Real p);
/// L^inf of a trigonometric polynomial: grid maximum refined by 4x oversampled
/// spot evaluations around the top candidates.
Real linf_refined(const Spectrum& f_hat, const ScalarField& f);

/// ||Delta_j f||_{L^p} for j = -1..j_max.
std::vector<Real> block_norms(const ScalarField& f, Real p, const NormOptions& opt = {});
/// l^r aggregation of 2^{js} a_j over j >= -1.
Real aggregate(const std::vector<Real>& block_lp, Real s, Real r);

Real besov_norm(const ScalarField& f, const BesovSpec& spec, const NormOptions& opt = {});
/// Maximum of the component norms.
Real besov_norm(const VectorField2& v, const BesovSpec& spec, const NormOptions& opt = {});

/// Bony paraproduct T_u v = sum_j S_{j-N0} u Delta_j v, dealiased.
ScalarField paraproduct(const ScalarField& u, const ScalarField& v, int lag = 4);
/// Remainder R(u, v) = sum_{|j-k| <= N0} Delta_j u Delta_k v, dealiased.
ScalarField remainder(const ScalarField& u, const ScalarField& v, int lag = 4);
/// Para-vector field T_X f = T_{X^1} d1 f + T_{X^2} d2 f.
ScalarField para_vector_field(const VectorField2& X, const ScalarField& f, int lag = 4);
/// Directional derivative d_X f = X . grad f, dealiased.
ScalarField directional_derivative(const VectorField2& X, const ScalarField& f);

/// Source of the div(X omega) equation:
/// nu div(X lap(omega) - lap(X omega)) + div(X d1 theta).
ScalarField striated_source(const VectorField2& X, const ScalarField& omega, const ScalarField& theta, Real nu);

/// Accumulates ||Delta_j f(t)||_{L^p} along a time series and evaluates both
/// the Chemin-Lerner norm ||f||_{L~^rho_t(B^s_{p,r})} and the plain
/// ||f||_{L^rho_t(B^s_{p,r})}. Time integrals use the trapezoid rule.
class TimeNormAccumulator {
 public:
  TimeNormAccumulator(BesovSpec spec, Real rho);

  void add(Real t, const std::vector<Real>& block_lp);
  void add(Real t, const ScalarField& f, const NormOptions& opt = {});

  Real tilde_norm() const;
  Real plain_norm() const;
  const BesovSpec& spec() const { return spec_; }
  Real rho() const { return rho_; }
  std::size_t samples() const { return samples_; }

 private:
  Real time_aggregate(Real integral_or_max) const;

  BesovSpec spec_;
  Real rho_;
  std::size_t samples_ = 0;
  Real last_t_ = 0.0;
  std::vector<Real> last_blocks_;
  Real last_total_ = 0.0;
  std::vector<Real> block_acc_;  // integral of a_j^rho, or running max when rho = inf
  Real total_acc_ = 0.0;
};

}  // namespace bqp::lp
