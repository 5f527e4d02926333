#include "bqp/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace bqp {
namespace {

// FFTW_ESTIMATE keeps plan selection deterministic between runs; FFTW_UNALIGNED
// lets plans run on Eigen-owned storage. Planning is not thread safe, execution is.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

PlanPair plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Values in(n, n);
  Coeffs out(n, n / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_2d(n, n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), flags);
  p.backward = fftw_plan_dft_c2r_2d(n, n, reinterpret_cast<fftw_complex*>(out.data()), in.data(), flags);
  cache.emplace(n, p);
  return p;
}

}  // namespace

Spectrum fft(const ScalarField& f) {
  const int n = f.n();
  Spectrum s(f.grid);
  Values in = f.values;  // r2c may scribble on its input for some plans
  fftw_execute_dft_r2c(plans_for(n).forward, in.data(), reinterpret_cast<fftw_complex*>(s.coeffs.data()));
  s.coeffs /= static_cast<Real>(n) * n;
  return s;
}

ScalarField ifft(const Spectrum& s) {
  const int n = s.grid->n();
  ScalarField f(s.grid);
  Coeffs work = s.coeffs;  // c2r destroys its input
  fftw_execute_dft_c2r(plans_for(n).backward, reinterpret_cast<fftw_complex*>(work.data()), f.values.data());
  return f;
}

}  // namespace bqp
