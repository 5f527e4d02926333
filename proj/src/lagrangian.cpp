#include "bqp/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bqp::lagrangian {

namespace {

constexpr Real kTwoPi = 2.0 * std::numbers::pi;

Mat2 expm_traceless(const Mat2& m) {
  const Real d = -m.determinant();  // m^2 = d I
  Real c;
  Real s_over;
  if (std::abs(d) < 1e-8) {
    c = 1.0 + d / 2.0 + d * d / 24.0;
    s_over = 1.0 + d / 6.0 + d * d / 120.0;
  } else if (d > 0.0) {
    const Real s = std::sqrt(d);
    c = std::cosh(s);
    s_over = std::sinh(s) / s;
  } else {
    const Real s = std::sqrt(-d);
    c = std::cos(s);
    s_over = std::sin(s) / s;
  }
  return c * Mat2::Identity() + s_over * m;
}

Mat2 trace_free(Mat2 m) {
  const Real half = 0.5 * (m(0, 0) - m(1, 1));
  m(0, 0) = half;
  m(1, 1) = -half;
  return m;
}

std::vector<Real> component(const std::vector<Vec2>& pts, int k) {
  std::vector<Real> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = pts[i](k);
  return out;
}

}  // namespace

Flow Flow::from(const interp::VelocitySampler& s) {
  return {[s](const Vec2& p) { return s.velocity(p.x(), p.y()); },
          [s](const Vec2& p) { return s.gradient(p.x(), p.y()); }};
}

Flow Flow::zero() {
  return {[](const Vec2&) { return Vec2::Zero().eval(); }, [](const Vec2&) { return Mat2::Zero().eval(); }};
}

PeriodicSpline::PeriodicSpline(std::vector<Real> values) : y_(std::move(values)) {
  const std::size_t n = y_.size();
  if (n < 4) throw ArgumentError("PeriodicSpline: at least 4 nodes required");
  h_ = kTwoPi / static_cast<Real>(n);
  std::vector<Real> rhs(n);
  Real scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rhs[i] = 6.0 * (y_[(i + 1) % n] - 2.0 * y_[i] + y_[(i + n - 1) % n]) / (h_ * h_);
    scale = std::max(scale, std::abs(rhs[i]));
  }
  // Strictly diagonally dominant cyclic system; Gauss-Seidel contracts by 1/2 per sweep.
  m_.assign(n, 0.0);
  for (int sweep = 0; sweep < 200; ++sweep) {
    Real change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Real next = (rhs[i] - m_[(i + n - 1) % n] - m_[(i + 1) % n]) / 4.0;
      change = std::max(change, std::abs(next - m_[i]));
      m_[i] = next;
    }
    if (change <= 1e-16 * std::max(scale, 1e-300)) break;
  }
}

Real PeriodicSpline::value(Real sigma) const {
  const std::size_t n = y_.size();
  const Real u = sigma / h_;
  const Real fl = std::floor(u);
  const Real t = u - fl;
  const Real a = 1.0 - t;
  long i = static_cast<long>(fl) % static_cast<long>(n);
  if (i < 0) i += static_cast<long>(n);
  const std::size_t i0 = static_cast<std::size_t>(i);
  const std::size_t i1 = (i0 + 1) % n;
  return a * y_[i0] + t * y_[i1] + ((a * a * a - a) * m_[i0] + (t * t * t - t) * m_[i1]) * h_ * h_ / 6.0;
}

Real PeriodicSpline::derivative(Real sigma) const {
  const std::size_t n = y_.size();
  const Real u = sigma / h_;
  const Real fl = std::floor(u);
  const Real t = u - fl;
  const Real a = 1.0 - t;
  long i = static_cast<long>(fl) % static_cast<long>(n);
  if (i < 0) i += static_cast<long>(n);
  const std::size_t i0 = static_cast<std::size_t>(i);
  const std::size_t i1 = (i0 + 1) % n;
  return (y_[i1] - y_[i0]) / h_ + h_ / 6.0 * (-(3.0 * a * a - 1.0) * m_[i0] + (3.0 * t * t - 1.0) * m_[i1]);
}

Real PeriodicSpline::node_derivative(std::size_t i) const {
  const std::size_t n = y_.size();
  const std::size_t j = (i + 1) % n;
  return (y_[j] - y_[i]) / h_ - h_ * (2.0 * m_[i] + m_[j]) / 6.0;
}

PatchState PatchState::circle(const Vec2& center, Real radius, int count) {
  PatchState p;
  for (int i = 0; i < count; ++i) {
    const Real s = kTwoPi * i / count;
    p.markers.push_back(center + radius * Vec2(std::cos(s), std::sin(s)));
  }
  p.jacobians.assign(count, Mat2::Identity());
  p.x0.assign(count, Vec2::Zero());
  return p;
}

std::vector<Vec2> PatchState::tangents() const {
  const PeriodicSpline sx(component(markers, 0));
  const PeriodicSpline sy(component(markers, 1));
  std::vector<Vec2> out(markers.size());
  for (std::size_t i = 0; i < markers.size(); ++i) out[i] = Vec2(sx.node_derivative(i), sy.node_derivative(i));
  return out;
}

Real PatchState::area() const {
  const std::vector<Vec2> tan = tangents();
  const Real h = kTwoPi / static_cast<Real>(markers.size());
  Real acc = 0.0;
  for (std::size_t i = 0; i < markers.size(); ++i)
    acc += markers[i].x() * tan[i].y() - markers[i].y() * tan[i].x();
  return 0.5 * h * acc;
}

Real PatchState::spacing_ratio() const {
  Real lo = std::numeric_limits<Real>::infinity();
  Real hi = 0.0;
  for (std::size_t i = 0; i < markers.size(); ++i) {
    const Real d = (markers[(i + 1) % markers.size()] - markers[i]).norm();
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return lo > 0.0 ? hi / lo : std::numeric_limits<Real>::infinity();
}

Real PatchState::max_det_defect() const {
  Real out = 0.0;
  for (const Mat2& j : jacobians) out = std::max(out, std::abs(j.determinant() - 1.0));
  return out;
}

void advect_markers(PatchState& patch, const Flow& u_old, const Flow& u_new, Real dt, const SafeRegion& safe) {
  for (std::size_t i = 0; i < patch.markers.size(); ++i) {
    const Vec2 p = patch.markers[i];
    const Vec2 v0 = u_old.velocity(p);
    const Vec2 guess = p + dt * v0;
    const Vec2 q = p + 0.5 * dt * (v0 + u_new.velocity(guess));
    if (!q.allFinite()) throw DataIntegrityError("advect_markers: non-finite marker position");
    if (!safe.contains(q))
      throw DomainTruncationError("marker " + std::to_string(i) + " left the safe region at (" +
                                  std::to_string(q.x()) + ", " + std::to_string(q.y()) + ")");
    const Mat2 a = trace_free(0.5 * dt * (u_old.gradient(p) + u_new.gradient(q)));
    patch.jacobians[i] = expm_traceless(a) * patch.jacobians[i];
    patch.markers[i] = q;
  }
}

void redistribute(PatchState& patch, const std::function<Vec2(const Vec2&)>& x_current) {
  const std::size_t m = patch.markers.size();
  const PeriodicSpline sx(component(patch.markers, 0));
  const PeriodicSpline sy(component(patch.markers, 1));
  const Real h = sx.step();
  constexpr int kSub = 16;
  // Cumulative arc length on a refined parameter grid (Simpson per sub-interval).
  std::vector<Real> sig(m * kSub + 1);
  std::vector<Real> arc(m * kSub + 1, 0.0);
  auto speed = [&](Real s) { return std::hypot(sx.derivative(s), sy.derivative(s)); };
  const Real dh = h / kSub;
  for (std::size_t k = 0; k <= m * kSub; ++k) {
    sig[k] = k * dh;
    if (k > 0) {
      const Real a = sig[k - 1];
      arc[k] = arc[k - 1] + dh / 6.0 * (speed(a) + 4.0 * speed(a + 0.5 * dh) + speed(a + dh));
    }
  }
  const Real total = arc.back();
  std::vector<Vec2> next(m);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const Real target = total * static_cast<Real>(i) / static_cast<Real>(m);
    while (seg + 1 < arc.size() - 1 && arc[seg + 1] < target) ++seg;
    const Real w = (target - arc[seg]) / (arc[seg + 1] - arc[seg]);
    const Real s = sig[seg] + w * dh;
    next[i] = Vec2(sx.value(s), sy.value(s));
  }
  patch.markers = std::move(next);
  patch.jacobians.assign(m, Mat2::Identity());
  for (std::size_t i = 0; i < m; ++i) patch.x0[i] = x_current(patch.markers[i]);
  ++patch.redistributions;
}

std::vector<Vec2> X_from_jacobian(const PatchState& patch) {
  std::vector<Vec2> out(patch.size());
  for (std::size_t i = 0; i < patch.size(); ++i) out[i] = patch.jacobians[i] * patch.x0[i];
  return out;
}

Real band_profile(Real s) {
  // B(s) = int_0^s exp(1 - 1/(1 - t^2)) dt, odd, constant for |s| >= 1.
  const Real a = std::min(std::abs(s), 1.0);
  if (a == 0.0) return 0.0;
  constexpr int kNodes = 64;  // composite Simpson; the integrand is smooth and flat at 1
  const Real step = a / kNodes;
  auto beta = [](Real t) { return t >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - t * t)); };
  Real acc = beta(0.0) + beta(a);
  for (int k = 1; k < kNodes; ++k) acc += (k % 2 ? 4.0 : 2.0) * beta(k * step);
  const Real value = acc * step / 3.0;
  return s < 0.0 ? -value : value;
}

ScalarField levelset_from_distance(const GridPtr& g, const std::function<Real(Real, Real)>& signed_distance, Real width) {
  if (!(width > 0.0)) throw ArgumentError("level-set band width must be positive");
  return ScalarField::sample(g, [&](Real x, Real y) { return width * band_profile(signed_distance(x, y) / width); });
}

VectorField2 tangent_field(const ScalarField& f0) { return perp_gradient(dealias(f0)); }

Values LevelSet::band_mask() const {
  const Real edge = band_width * band_profile(1.0);
  return (f.values.abs() < edge).cast<Real>();
}

LevelSet advect_level_set(const LevelSet& ls, const interp::Departure& d) {
  return {interp::resample(ls.f, d, interp::Kind::lagrange_cubic), ls.band_width};
}

LevelSet advect_level_set(const LevelSet& ls, const VectorField2& u_old, const VectorField2& u_new, Real dt) {
  return advect_level_set(ls, interp::departure_points(u_old, u_new, dt));
}

std::array<Spectrum, 2> x_transport_rhs(const VectorField2& X, const VectorField2& u) {
  std::array<Spectrum, 2> out;
  for (int k = 0; k < 2; ++k) out[k] = fft(convect(X, u[k]) - convect(u, X[k]));
  return out;
}

VectorField2 evolve_X_eulerian(const VectorField2& X, const std::function<VectorField2(Real)>& u, Real t, Real dt,
                               ifrk::Scheme scheme) {
  require_finite(X, "evolve_X_eulerian");
  const ifrk::Rhs rhs = [&](int, Real ts, const ifrk::State& y) {
    const VectorField2 xs(ifft(y[0]), ifft(y[1]));
    auto k = x_transport_rhs(xs, u(ts));
    return ifrk::State{std::move(k[0]), std::move(k[1])};
  };
  const ifrk::State out = ifrk::step({fft(X.x), fft(X.y)}, t, dt, {0.0, 0.0}, scheme, rhs);
  VectorField2 next(ifft(out[0]), ifft(out[1]));
  require_finite(next, "evolve_X_eulerian");
  return next;
}

VectorField2 evolve_X_semilagrangian(const VectorField2& X, const interp::Departure& d, const VectorField2& u_old,
                                     const VectorField2& u_new, Real dt) {
  const GridPtr& g = X.grid();
  const int n = g->n();
  const VectorField2 go_x = gradient(u_old.x);
  const VectorField2 go_y = gradient(u_old.y);
  const VectorField2 gn_x = gradient(u_new.x);
  const VectorField2 gn_y = gradient(u_new.y);
  VectorField2 out(g);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const Real xd = d.x(iy, ix);
      const Real yd = d.y(iy, ix);
      const Vec2 xn(interp::lagrange_cubic(X.x, xd, yd), interp::lagrange_cubic(X.y, xd, yd));
      Mat2 a_old;
      a_old << interp::lagrange_cubic(go_x.x, xd, yd), interp::lagrange_cubic(go_x.y, xd, yd),
          interp::lagrange_cubic(go_y.x, xd, yd), interp::lagrange_cubic(go_y.y, xd, yd);
      Mat2 a_new;
      a_new << gn_x.x(iy, ix), gn_x.y(iy, ix), gn_y.x(iy, ix), gn_y.y(iy, ix);
      const Vec2 rhs = (Mat2::Identity() + 0.5 * dt * a_old) * xn;
      const Vec2 v = (Mat2::Identity() - 0.5 * dt * a_new).inverse() * rhs;
      out.x(iy, ix) = v.x();
      out.y(iy, ix) = v.y();
    }
  }
  require_finite(out, "evolve_X_semilagrangian");
  return out;
}

BoundaryNorm boundary_c1eps_norm(const PatchState& patch, Real eps) {
  const std::size_t m = patch.size();
  if (m < 64) throw ArgumentError("boundary_c1eps_norm: at least 64 markers required");
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("boundary_c1eps_norm: eps must lie in (0, 1)");
  const std::vector<Vec2> tan = patch.tangents();
  const Real h = kTwoPi / static_cast<Real>(m);
  BoundaryNorm out;
  Real sup_pos = 0.0;
  Real sup_tan = 0.0;
  std::vector<Vec2> unit(m);
  std::vector<Real> arc(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const Real speed = tan[i].norm();
    if (!(speed >= 1e-12)) throw DegeneracyError("degenerate boundary tangent at marker " + std::to_string(i));
    unit[i] = tan[i] / speed;
    sup_pos = std::max(sup_pos, patch.markers[i].norm());
    sup_tan = std::max(sup_tan, speed);
  }
  for (std::size_t i = 0; i < m; ++i) {
    const Real s0 = tan[i].norm();
    const Real s1 = tan[(i + 1) % m].norm();
    arc[i + 1] = arc[i] + 0.5 * h * (s0 + s1);
  }
  const Real perimeter = arc[m];
  out.c1 = sup_pos + sup_tan;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const std::size_t gap = std::min(j - i, m - (j - i));
      const Real dsig = h * static_cast<Real>(gap);
      if (dsig <= std::numbers::pi + 1e-12) {
        out.holder = std::max(out.holder, (unit[i] - unit[j]).norm() / std::pow(dsig, eps));
      }
      const Real along = arc[j] - arc[i];
      const Real chord = (patch.markers[i] - patch.markers[j]).norm();
      if (chord > 0.0) out.arc_chord = std::max(out.arc_chord, std::min(along, perimeter - along) / chord);
      else out.arc_chord = std::numeric_limits<Real>::infinity();
    }
  }
  return out;
}

Real holder_quotient_norm(const ScalarField& f, Real eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("holder_quotient_norm: eps must lie in (0, 1)");
  const int n = f.n();
  const Real h = f.grid->spacing();
  std::vector<int> offsets{0};
  for (int k = 1; k <= n / 2; k = (k < 4 ? k + 1 : k + k / 2)) offsets.push_back(k);
  Real best = 0.0;
  for (int dy : offsets) {
    for (int sx : {-1, 1}) {
      for (int dxa : offsets) {
        const int dx = sx * dxa;
        if ((dx == 0 && dy == 0) || (sx < 0 && dxa == 0)) continue;
        const Real dist = h * std::hypot(static_cast<Real>(dx), static_cast<Real>(dy));
        const Real weight = std::pow(dist, -eps);
        Real diff = 0.0;
        for (int iy = 0; iy < n; ++iy) {
          const int jy = (iy + dy) % n;
          for (int ix = 0; ix < n; ++ix) {
            const int jx = ((ix + dx) % n + n) % n;
            diff = std::max(diff, std::abs(f(jy, jx) - f(iy, ix)));
          }
        }
        best = std::max(best, diff * weight);
      }
    }
  }
  return max_abs(f) + best;
}

}  // namespace bqp::lagrangian
