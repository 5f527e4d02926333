#pragma once

#include "bqp/lagrangian.hpp"
#include "bqp/lp.hpp"
#include "bqp/random_fields.hpp"
#include "bqp/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace bqp::diag {

// ---------------------------------------------------------------- energy

/// Integrands of the energy balance at one instant.
struct EnergySample {
  Real t = 0.0;
  Real kinetic = 0.0;      // ||u||_{L^2}^2
  Real dissipation = 0.0;  // ||grad u||_{L^2}^2
  Real work = 0.0;         // int theta_b u^2 with theta_b the buoyancy field the stepper applies
};

EnergySample energy_sample(const solver::SimState& s, const solver::StepperConfig& cfg);

/// R(t) = ||u(t)||^2 + 2 nu int ||grad u||^2 - ||u_0||^2 - 2 int int theta_b u^2,
/// trapezoid rule over the stored samples. Throws ArgumentError on an empty history.
Real energy_equality_residual(const std::vector<EnergySample>& history, Real nu);

// ------------------------------------------------------------- striated

/// Regularity indices (eps, q) of the striated diagnostics; requires
/// 0 < eps < 1 and 1 < q < 2 / (2 - eps), i.e. eps/2 + 1/q > 1.
struct StriatedParams {
  Real eps = 0.5;
  Real q = 1.3;
  void validate() const;
};

/// Quantities integrated in time at step cadence.
struct StepQuantities {
  EnergySample energy;
  Real grad_u_linf = 0.0;
  Real grad_u_besov = 0.0;  // ||grad u||_{B^{2/q}_{q,1}}
  Real omega_besov = 0.0;   // ||omega||_{B^{2/q}_{q,1}}
  Real theta_besov = 0.0;   // ||theta||_{B^{2/q-1}_{q,1}}
};

StepQuantities step_quantities(const solver::SimState& s, const solver::StepperConfig& cfg, const StriatedParams& p);

/// Trapezoid accumulation of V, U_q, the W integrand and the energy balance.
class TimeIntegrals {
 public:
  explicit TimeIntegrals(Real nu) : nu_(nu) {}
  void add(const StepQuantities& q);

  bool empty() const { return count_ == 0; }
  Real t() const { return last_.energy.t; }
  Real energy_residual() const;
  /// ||u_0||_{L^2}^2, the scale of the energy residual.
  Real initial_kinetic() const { return first_.energy.kinetic; }
  Real V() const { return v_; }
  Real U_q() const { return uq_; }
  Real W() const { return uq_ + w_rest_; }

 private:
  Real nu_;
  std::size_t count_ = 0;
  StepQuantities first_, last_;
  Real dissipation_ = 0.0, work_ = 0.0, v_ = 0.0, uq_ = 0.0, w_rest_ = 0.0;
};

/// Norms of the striated system at one instant. d_X theta is evaluated in the
/// weak form div(X theta) - theta div X.
struct StriatedNorms {
  Real X_holder = 0.0;           // ||X||_{C^eps}
  Real divXomega_m1 = 0.0;       // ||div(X omega)||_{C^{eps-1}}
  Real divXomega_m3 = 0.0;       // ||div(X omega)||_{C^{eps-3}}
  Real dXtheta_m2 = 0.0;         // ||d_X theta||_{C^{eps-2}}
  Real dXu_holder = 0.0;         // ||d_X u||_{C^eps}
  Real omega_low = 0.0;          // ||omega||_{B^{2/q-2}_{q,1}}
  Real omega_high = 0.0;         // ||omega||_{B^{2/q}_{q,1}}
  Real theta_besov = 0.0;        // ||theta||_{B^{2/q-1}_{q,1}}
};

ScalarField weak_directional_derivative(const VectorField2& X, const ScalarField& theta);
ScalarField div_product(const VectorField2& X, const ScalarField& w);

StriatedNorms striated_norms(const solver::SimState& s, const StriatedParams& p);

/// Running supremum Z(t) = sup ||X||_{C^eps} + sup ||div(X omega)||_{C^{eps-3}} over
/// the instants passed to add().
class ZTracker {
 public:
  Real add(const StriatedNorms& n);
  Real value() const { return x_sup_ + d_sup_; }

 private:
  Real x_sup_ = 0.0, d_sup_ = 0.0;
};

/// One row of diagnostics.csv: named values in a fixed column order.
struct DiagnosticsRecord {
  Real t = 0.0;
  std::vector<std::pair<std::string, Real>> values;
  Real get(const std::string& name) const;
};

/// Assembles the record from the current state, the step-cadence integrals
/// (which must end at s.t) and the Z tracker (updated here).
DiagnosticsRecord make_record(const solver::SimState& s, const TimeIntegrals& integrals, ZTracker& z,
                              const StriatedParams& p);

std::vector<std::string> record_columns();
void write_record_header(std::ostream& os);
void write_record(std::ostream& os, const DiagnosticsRecord& r, const std::string& config_hash);
/// Shortest decimal form that round-trips to the same double.
std::string format_real(Real v);

// ------------------------------------------------------------- geometry

struct GeometryRecord {
  Real t = 0.0;
  Real area = 0.0;
  Real area_drift = 0.0;         // |area - area_0| / area_0
  Real det_defect = 0.0;         // max |det D psi - 1|
  int redistributions = 0;
  lagrangian::BoundaryNorm boundary;
  Real tangency_sin = 0.0;       // max |sin angle(X, d gamma/d sigma)| at markers
  Real cross_rep = 0.0;          // max |X_euler - D psi X_0| / max |D psi X_0| at markers
  Real hausdorff = 0.0;          // zero contour of f vs marker polygon
  Real theta_linf = 0.0;
  Real div_x_ratio = 0.0;        // ||div X||_inf / ||grad X||_inf
};

GeometryRecord geometry_record(const solver::SimState& s, const lagrangian::PatchState& patch, Real area0,
                               Real level_band, Real eps);
void write_geometry_header(std::ostream& os);
void write_geometry(std::ostream& os, const GeometryRecord& r, const std::string& config_hash);

// ---------------------------------------------------------------- probes

/// Both sides of an inequality with the constant set to 1.
struct Sides {
  Real lhs = 0.0;
  Real rhs = 0.0;
  std::string status = "ok";  // or "degenerate: ..." when the right side vanishes
  Real ratio() const { return lhs / rhs; }
};

/// ||[T_g, d_1] u||_{B^{s-1+eps}_{2,2}} vs ||grad g||_{B^{eps-1}_{inf,inf}} ||u||_{B^s_{2,2}}, s = 1/2.
Sides commutator_sides(const ScalarField& g, const ScalarField& u, Real eps);
/// ||T_X f - d_X f||_{C^{s+eps-2}} vs ||X||_{C^eps} ||grad f||_{B^{s-1}_{2,1}}, s = 1.
Sides para_vector_sides(const VectorField2& X, const ScalarField& f, Real eps);
/// ||[T_X, d_t + v.grad] v||_{C^{eps-2}} vs the three-term bound with p = 2, where
/// d_t X = d_X v - v.grad X.
Sides transport_commutator_sides(const VectorField2& X, const VectorField2& v, Real eps);
/// ||d_X u||_{C^eps} vs ||grad u||_inf ||X||_{C^eps} + ||div(X omega)||_{C^{eps-1}}, u = BS(omega).
Sides striated_velocity_sides(const VectorField2& X, const ScalarField& omega, Real eps);
/// ||div(X omega)||_{C^-3} vs ||X||_{C^eps} ||omega||_{B^{2/q-2}_{q,1}}.
Sides compat_vorticity_sides(const VectorField2& X, const ScalarField& omega, const StriatedParams& p);
/// ||d_X theta||_{C^-2} vs ||X||_{C^eps} ||theta||_{B^{2/q-1}_{q,1}}.
Sides compat_temperature_sides(const VectorField2& X, const ScalarField& theta, const StriatedParams& p);

const std::vector<std::string>& probe_ids();

struct EnsembleConfig {
  int n = 128;
  int size = 64;
  std::uint64_t seed = 1;
  /// Band of the random fields; 0 picks the largest band whose products in the
  /// probe stay below the dealias cutoff of the base grid.
  int band = 0;
  /// Worker threads; samples are merged in index order whatever the count.
  int threads = 1;
  StriatedParams params;
  void validate() const;
};

struct ProbeSample {
  int index = 0;
  Sides base;     // grid n
  Sides refined;  // grid 2n, same fields
};

struct ProbeReport {
  std::string probe;
  EnsembleConfig config;
  std::vector<ProbeSample> samples;
  Real max_ratio = 0.0;          // over non-degenerate samples at n
  Real max_ratio_refined = 0.0;  // same at 2n
  Real p50 = 0.0, p90 = 0.0, p99 = 0.0;
  Real growth = 0.0;             // max_ratio_refined / max_ratio
  bool all_finite = true;
};

/// Evaluates the named inequality on the fixed-seed ensemble at n and 2n.
ProbeReport inequality_probe(const std::string& probe, const EnsembleConfig& cfg);
/// One row per sample plus a summary row.
void write_probe_csv(std::ostream& os, const ProbeReport& r, const std::string& config_hash);

// ------------------------------------------------- transport-diffusion bounds

struct TransDiffSweep {
  int n = 128;
  Real nu = 0.5;
  Real T = 0.5;
  Real dt = 5e-3;
  Real output_dt = 1e-2;
  std::vector<std::string> families{"rotation", "shear", "mixer"};
  std::vector<Real> s_values{-0.5, 0.0, 0.5};
  std::vector<Real> p_values{2.0, lp::kInf};
  std::vector<Real> r_values{1.0, lp::kInf};
  std::vector<Real> rho_values{1.0, 2.0, lp::kInf};
  std::uint64_t seed = 7;
  random::Envelope envelope{8, 1.5};
  void validate() const;
};

struct TransDiffRow {
  std::string family;
  std::string bound;  // "smoothing" (nu > 0) or "transport" (nu = 0, logarithmic growth bound)
  lp::BesovSpec spec;
  Real rho = 0.0;
  Sides base, refined;
  Real growth() const { return refined.ratio() / base.ratio(); }
};

struct TransDiffReport {
  std::vector<TransDiffRow> rows;
  Real max_ratio = 0.0;
  Real max_growth = 0.0;
  bool all_finite = true;
};

/// V(t) = int ||grad v||_{B^0_{inf,inf}} + ||grad v||_inf by the trapezoid rule.
Real velocity_gradient_integral(const std::function<VectorField2(Real)>& v, const std::vector<Real>& times,
                                bool besov_part);
/// nu^{1/rho} ||f||_{L~^rho_t(B^{s+2/rho}_{p,r})} along a stored trajectory.
Real smoothing_lhs(const std::vector<ScalarField>& traj, const std::vector<Real>& times, const lp::BesovSpec& spec,
                   Real rho, Real nu);

TransDiffReport trans_diff_bound_probe(const TransDiffSweep& sweep);
void write_transdiff_csv(std::ostream& os, const TransDiffReport& r, const std::string& config_hash);

}  // namespace bqp::diag
