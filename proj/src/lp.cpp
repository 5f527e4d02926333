#include "bqp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <tuple>

namespace bqp::lp {

namespace {

constexpr Real kLowInner = 0.75;
constexpr Real kLowOuter = 4.0 / 3.0;

ScalarField laplacian(const ScalarField& f) {
  Spectrum s = fft(f);
  s *= -f.grid->k_squared();
  return ifft(s);
}

// Prefix sums of physical blocks: prefix[k] = sum_{k' <= k-1} block[k'] (block indices shifted by one).
std::vector<Values> prefix_sums(const std::vector<ScalarField>& blocks) {
  const int n = blocks.front().n();
  std::vector<Values> prefix(blocks.size() + 1, Values::Zero(n, n));
  for (std::size_t i = 0; i < blocks.size(); ++i) prefix[i + 1] = prefix[i] + blocks[i].values;
  return prefix;
}

Values paraproduct_values(const std::vector<ScalarField>& ub, const std::vector<ScalarField>& vb, int lag) {
  const int n = ub.front().n();
  const std::vector<Values> up = prefix_sums(ub);
  Values out = Values::Zero(n, n);
  // Block j sits at index j+1; S_{j-lag} u = sum of u blocks with index <= j-lag.
  for (int j = lag; j + 1 < static_cast<int>(vb.size()); ++j) {
    out += up[j - lag + 1] * vb[j + 1].values;
  }
  return out;
}

}  // namespace

void BesovSpec::validate() const {
  if (!std::isfinite(s)) throw ArgumentError("Besov regularity must be finite");
  if (!(p >= 1.0)) throw ArgumentError("Besov integrability p must be >= 1");
  if (!(r >= 1.0)) throw ArgumentError("Besov summability r must be >= 1");
}

Real FilterBank::smooth_step(Real t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const Real a = std::exp(-1.0 / t);
  const Real b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

Real FilterBank::low_profile(Real r) {
  return 1.0 - smooth_step((r - kLowInner) / (kLowOuter - kLowInner));
}

Real FilterBank::annulus_profile(Real r) { return low_profile(0.5 * r) - low_profile(r); }

FilterBank::FilterBank(GridPtr grid, int lag) : grid_(std::move(grid)), lag_(lag) {
  if (!grid_) throw ArgumentError("FilterBank: null grid");
  if (lag_ < 2) throw ArgumentError("FilterBank: paraproduct lag must be >= 2");
  const Real rmax = grid_->max_retained_radius();
  while (1.5 * std::ldexp(1.0, j_max_) < rmax) ++j_max_;

  const SpectralTable& radius = grid_->index_radius();
  const SpectralTable& mask = grid_->dealias_mask();
  symbols_.assign(j_max_ + 2, SpectralTable::Zero(radius.rows(), radius.cols()));
  SpectralTable covered = SpectralTable::Zero(radius.rows(), radius.cols());
  for (int j = 0; j <= j_max_; ++j) {
    SpectralTable& t = symbols_[j + 1];
    const Real scale = std::ldexp(1.0, -j);
    for (Eigen::Index r = 0; r < t.rows(); ++r)
      for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = annulus_profile(scale * radius(r, c)) * mask(r, c);
    covered += t;
  }
  symbols_[0] = (1.0 - covered) * mask;
  zero_ = SpectralTable::Zero(radius.rows(), radius.cols());
}

const SpectralTable& FilterBank::symbol(int j) const {
  if (j < -1 || j > j_max_) return zero_;
  return symbols_[j + 1];
}

SpectralTable FilterBank::low_pass_symbol(int j) const {
  SpectralTable out = zero_;
  for (int k = -1; k <= std::min(j - 1, j_max_); ++k) out += symbols_[k + 1];
  return out;
}

Spectrum FilterBank::block(const Spectrum& f_hat, int j) const {
  require_same_grid(f_hat.grid, grid_, "FilterBank::block");
  if (j < -1 || j > j_max_) throw ArgumentError("dyadic block index " + std::to_string(j) + " outside [-1, j_max]");
  return symbol(j) * f_hat;
}

ScalarField FilterBank::block(const ScalarField& f, int j) const { return ifft(block(fft(f), j)); }

std::vector<Spectrum> FilterBank::decompose_spectral(const Spectrum& f_hat) const {
  require_same_grid(f_hat.grid, grid_, "FilterBank::decompose");
  std::vector<Spectrum> out;
  out.reserve(symbols_.size());
  for (const SpectralTable& t : symbols_) out.push_back(t * f_hat);
  return out;
}

std::vector<ScalarField> FilterBank::decompose(const ScalarField& f) const {
  std::vector<ScalarField> out;
  for (const Spectrum& s : decompose_spectral(fft(f))) out.push_back(ifft(s));
  return out;
}

Real FilterBank::partition_defect() const {
  SpectralTable sum = zero_;
  for (const SpectralTable& t : symbols_) sum += t;
  return ((sum - 1.0) * grid_->dealias_mask()).abs().maxCoeff();
}

std::shared_ptr<const FilterBank> filter_bank(const GridPtr& grid, int lag) {
  using Key = std::tuple<int, Real, Real, int>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const FilterBank>> cache;
  const Key key{grid->n(), grid->length(), grid->dealias_fraction(), lag};
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_shared<FilterBank>(grid, lag)).first;
  return it->second;
}

Real lp_norm(const ScalarField& f, Real p) {
  if (std::isinf(p)) return f.values.abs().maxCoeff();
  if (!(p >= 1.0)) throw ArgumentError("lp_norm: p must be >= 1");
  return std::pow(f.values.abs().pow(p).sum() * f.grid->cell_area(), 1.0 / p);
}

Real linf_refined(const Spectrum& f_hat, const ScalarField& f) {
  constexpr int kCandidates = 4;
  constexpr int kHalfStencil = 4;  // 9 x 9 points, spacing h/4
  const Grid& g = *f.grid;
  const int n = g.n();
  const int half = g.half();
  const Real unit = g.wavenumber_unit();
  const Real h = g.spacing();
  Real best = f.values.abs().maxCoeff();

  std::vector<int> order(static_cast<std::size_t>(n) * n);
  std::iota(order.begin(), order.end(), 0);
  const Real* data = f.values.data();
  const int count = std::min<int>(kCandidates, static_cast<int>(order.size()));
  std::partial_sort(order.begin(), order.begin() + count, order.end(),
                    [data](int a, int b) { return std::abs(data[a]) > std::abs(data[b]); });

  // Active rows and columns of the half-plane spectrum.
  std::vector<int> rows;
  std::vector<int> cols;
  for (int r = 0; r < n; ++r)
    if (f_hat.coeffs.row(r).abs().maxCoeff() > 0.0) rows.push_back(r);
  for (int c = 0; c < half; ++c)
    if (f_hat.coeffs.col(c).abs().maxCoeff() > 0.0) cols.push_back(c);
  if (rows.empty()) return best;

  constexpr int kSide = 2 * kHalfStencil + 1;
  std::vector<Complex> partial(rows.size());
  for (int cand = 0; cand < count; ++cand) {
    const int iy = order[cand] / n;
    const int ix = order[cand] % n;
    for (int a = 0; a < kSide; ++a) {
      const Real x = g.x(ix) + (a - kHalfStencil) * 0.25 * h;
      for (std::size_t ri = 0; ri < rows.size(); ++ri) {
        Complex acc = 0.0;
        for (int c : cols) {
          const Real weight = (c == 0 || 2 * c == n) ? 1.0 : 2.0;
          acc += weight * f_hat.coeffs(rows[ri], c) * std::polar(1.0, unit * c * x);
        }
        partial[ri] = acc;
      }
      for (int b = 0; b < kSide; ++b) {
        const Real y = g.y(iy) + (b - kHalfStencil) * 0.25 * h;
        Complex acc = 0.0;
        for (std::size_t ri = 0; ri < rows.size(); ++ri)
          acc += partial[ri] * std::polar(1.0, unit * g.signed_index(rows[ri]) * y);
        best = std::max(best, std::abs(acc.real()));
      }
    }
  }
  return best;
}

std::vector<Real> block_norms(const ScalarField& f, Real p, const NormOptions& opt) {
  require_finite(f, "block_norms");
  const auto bank = filter_bank(f.grid, opt.lag);
  const std::vector<Spectrum> blocks = bank->decompose_spectral(fft(f));
  std::vector<Real> out;
  out.reserve(blocks.size());
  for (const Spectrum& b : blocks) {
    const ScalarField phys = ifft(b);
    out.push_back(std::isinf(p) && opt.refine_linf ? linf_refined(b, phys) : lp_norm(phys, p));
  }
  return out;
}

Real aggregate(const std::vector<Real>& block_lp, Real s, Real r) {
  Real acc = 0.0;
  for (std::size_t i = 0; i < block_lp.size(); ++i) {
    const Real term = std::exp2(s * (static_cast<Real>(i) - 1.0)) * block_lp[i];
    if (std::isinf(r)) acc = std::max(acc, term);
    else acc += std::pow(term, r);
  }
  return std::isinf(r) ? acc : std::pow(acc, 1.0 / r);
}

Real besov_norm(const ScalarField& f, const BesovSpec& spec, const NormOptions& opt) {
  spec.validate();
  return aggregate(block_norms(f, spec.p, opt), spec.s, spec.r);
}

Real besov_norm(const VectorField2& v, const BesovSpec& spec, const NormOptions& opt) {
  return std::max(besov_norm(v.x, spec, opt), besov_norm(v.y, spec, opt));
}

ScalarField paraproduct(const ScalarField& u, const ScalarField& v, int lag) {
  require_same_grid(u.grid, v.grid, "paraproduct");
  const auto bank = filter_bank(u.grid, lag);
  return dealias(ScalarField(u.grid, paraproduct_values(bank->decompose(u), bank->decompose(v), lag)));
}

ScalarField remainder(const ScalarField& u, const ScalarField& v, int lag) {
  require_same_grid(u.grid, v.grid, "remainder");
  const auto bank = filter_bank(u.grid, lag);
  const std::vector<ScalarField> ub = bank->decompose(u);
  const std::vector<ScalarField> vb = bank->decompose(v);
  const std::vector<Values> vp = prefix_sums(vb);
  const int count = static_cast<int>(ub.size());
  Values out = Values::Zero(u.n(), u.n());
  for (int i = 0; i < count; ++i) {
    const int lo = std::max(0, i - lag);
    const int hi = std::min(count, i + lag + 1);
    out += ub[i].values * (vp[hi] - vp[lo]);
  }
  return dealias(ScalarField(u.grid, out));
}

ScalarField para_vector_field(const VectorField2& X, const ScalarField& f, int lag) {
  require_same_grid(X.grid(), f.grid, "para_vector_field");
  const auto bank = filter_bank(f.grid, lag);
  const VectorField2 df = gradient(f);
  Values out = paraproduct_values(bank->decompose(X.x), bank->decompose(df.x), lag);
  out += paraproduct_values(bank->decompose(X.y), bank->decompose(df.y), lag);
  return dealias(ScalarField(f.grid, out));
}

ScalarField directional_derivative(const VectorField2& X, const ScalarField& f) { return convect(X, f); }

ScalarField striated_source(const VectorField2& X, const ScalarField& omega, const ScalarField& theta, Real nu) {
  require_same_grid(X.grid(), omega.grid, "striated_source");
  require_same_grid(X.grid(), theta.grid, "striated_source");
  const ScalarField lap_omega = laplacian(omega);
  const ScalarField d1_theta = derivative(theta, 1, 0);
  VectorField2 viscous(X.grid());
  VectorField2 buoyant(X.grid());
  for (int k = 0; k < 2; ++k) {
    viscous[k] = product(X[k], lap_omega) - laplacian(product(X[k], omega));
    buoyant[k] = product(X[k], d1_theta);
  }
  return nu * divergence(viscous) + divergence(buoyant);
}

TimeNormAccumulator::TimeNormAccumulator(BesovSpec spec, Real rho) : spec_(spec), rho_(rho) {
  spec_.validate();
  if (!(rho_ >= 1.0)) throw ArgumentError("TimeNormAccumulator: rho must be >= 1");
}

void TimeNormAccumulator::add(Real t, const std::vector<Real>& block_lp) {
  const Real total = aggregate(block_lp, spec_.s, spec_.r);
  const bool sup = std::isinf(rho_);
  if (samples_ == 0) {
    block_acc_.assign(block_lp.size(), 0.0);
    if (sup) {
      block_acc_ = block_lp;
      total_acc_ = total;
    }
  } else {
    if (block_lp.size() != block_acc_.size()) throw ArgumentError("TimeNormAccumulator: block count changed");
    const Real dt = t - last_t_;
    if (!(dt > 0.0)) throw ArgumentError("TimeNormAccumulator: times must increase");
    for (std::size_t j = 0; j < block_lp.size(); ++j) {
      if (sup) block_acc_[j] = std::max(block_acc_[j], block_lp[j]);
      else block_acc_[j] += 0.5 * dt * (std::pow(last_blocks_[j], rho_) + std::pow(block_lp[j], rho_));
    }
    if (sup) total_acc_ = std::max(total_acc_, total);
    else total_acc_ += 0.5 * dt * (std::pow(last_total_, rho_) + std::pow(total, rho_));
  }
  last_t_ = t;
  last_blocks_ = block_lp;
  last_total_ = total;
  ++samples_;
}

void TimeNormAccumulator::add(Real t, const ScalarField& f, const NormOptions& opt) {
  add(t, block_norms(f, spec_.p, opt));
}

Real TimeNormAccumulator::time_aggregate(Real value) const {
  return std::isinf(rho_) ? value : std::pow(value, 1.0 / rho_);
}

Real TimeNormAccumulator::tilde_norm() const {
  std::vector<Real> per_block(block_acc_.size());
  for (std::size_t j = 0; j < per_block.size(); ++j) per_block[j] = time_aggregate(block_acc_[j]);
  return aggregate(per_block, spec_.s, spec_.r);
}

Real TimeNormAccumulator::plain_norm() const { return time_aggregate(total_acc_); }

}  // namespace bqp::lp
