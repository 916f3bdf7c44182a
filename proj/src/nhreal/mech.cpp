#include "nhreal/mech.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fftw3.h>

#include "nhreal/linalg.hpp"

namespace nhreal::mech {

void OscillatorChain::validate() const {
  if (masses.empty()) throw Error(ErrorCode::InvalidArgument, "chain needs at least one mass");
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (!(masses[i] > 0.0) || !std::isfinite(masses[i])) {
      throw Error(ErrorCode::InvalidArgument,
                  "mass " + std::to_string(i + 1) + " must be positive and finite");
    }
  }
  if (!(spring_k > 0.0) || !std::isfinite(spring_k)) {
    throw Error(ErrorCode::InvalidArgument, "spring_k must be positive");
  }
}

ComplexMatrix dynamical_matrix(const OscillatorChain& chain) {
  chain.validate();
  const auto n = static_cast<Eigen::Index>(chain.n());
  const double k = chain.spring_k;
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double inv = 1.0 / chain.masses[static_cast<std::size_t>(i)];
    m(i, i) = -2.0 * k * inv;
    if (i > 0) m(i, i - 1) = k * inv;
    if (i + 1 < n) m(i, i + 1) = k * inv;
  }
  return m;
}

std::vector<double> eigenfrequencies(const ComplexMatrix& m, const Tolerances& tol) {
  const double scale = std::max(linalg::spectral_norm(m), 1e-300);
  std::vector<double> out;
  for (const cd& lambda : linalg::eigenvalues(m)) {
    if (std::abs(lambda.imag()) > tol.reality * scale || lambda.real() > tol.reality * scale) {
      throw Error(ErrorCode::NotPsd, "non-physical eigenvalue (" + std::to_string(lambda.real()) +
                                         ", " + std::to_string(lambda.imag()) + ")");
    }
    out.push_back(std::sqrt(std::max(-lambda.real(), 0.0)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// x'' = A M0 x without forming M.
RealVector acceleration(const OscillatorChain& c, const RealVector& x) {
  const Eigen::Index n = x.size();
  RealVector a(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double f = -2.0 * x(i);
    if (i > 0) f += x(i - 1);
    if (i + 1 < n) f += x(i + 1);
    a(i) = c.spring_k * f / c.masses[static_cast<std::size_t>(i)];
  }
  return a;
}

}  // namespace

Trajectory integrate(const OscillatorChain& chain, const RealVector& x0, const RealVector& v0,
                     double dt, std::size_t steps, std::size_t stride) {
  chain.validate();
  const auto n = static_cast<Eigen::Index>(chain.n());
  if (x0.size() != n || v0.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "integrate: initial state size differs from chain");
  }
  if (!(dt > 0.0) || stride == 0) {
    throw Error(ErrorCode::InvalidArgument, "integrate: dt and stride must be positive");
  }
  const auto w = eigenfrequencies(dynamical_matrix(chain));
  const double wmax = w.empty() ? 0.0 : w.back();
  if (dt * wmax >= 0.1) {
    throw Error(ErrorCode::InvalidArgument,
                "integrate: dt * w_max = " + std::to_string(dt * wmax) + " violates the 0.1 guard");
  }

  Trajectory tr;
  tr.dt = dt;
  tr.stride = stride;
  RealVector x = x0, v = v0;
  tr.times.push_back(0.0);
  tr.positions.push_back(x);
  tr.velocities.push_back(v);
  for (std::size_t s = 1; s <= steps; ++s) {
    x += 0.5 * dt * v;
    v += dt * acceleration(chain, x);
    x += 0.5 * dt * v;
    if (s % stride == 0) {
      tr.times.push_back(static_cast<double>(s) * dt);
      tr.positions.push_back(x);
      tr.velocities.push_back(v);
    }
  }
  return tr;
}

double mechanical_energy(const OscillatorChain& chain, const RealVector& x, const RealVector& v) {
  const Eigen::Index n = x.size();
  double kinetic = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    kinetic += 0.5 * chain.masses[static_cast<std::size_t>(i)] * v(i) * v(i);
  }
  double stretch = x(0) * x(0) + x(n - 1) * x(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) stretch += (x(i + 1) - x(i)) * (x(i + 1) - x(i));
  return kinetic + 0.5 * chain.spring_k * stretch;
}

std::vector<SpectralPeak> spectral_peaks(const std::vector<double>& signal, double dt,
                                         double rel_floor, std::size_t pad_factor) {
  const std::size_t len = signal.size();
  if (len < 4 || !(dt > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "spectral_peaks: need >= 4 samples and dt > 0");
  }
  std::size_t nfft = 1;
  while (nfft < len * std::max<std::size_t>(pad_factor, 1)) nfft <<= 1;

  const double pi = std::numbers::pi;
  double mean = 0.0;
  for (double s : signal) mean += s;
  mean /= static_cast<double>(len);

  std::vector<double> in(nfft, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    const double hann = 0.5 - 0.5 * std::cos(2.0 * pi * static_cast<double>(i) /
                                             static_cast<double>(len - 1));
    in[i] = (signal[i] - mean) * hann;
  }
  const std::size_t bins = nfft / 2 + 1;
  auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins));
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in.data(), out, FFTW_ESTIMATE);
  fftw_execute(plan);
  std::vector<double> mag(bins);
  for (std::size_t k = 0; k < bins; ++k) mag[k] = std::hypot(out[k][0], out[k][1]);
  fftw_destroy_plan(plan);
  fftw_free(out);

  const double top = *std::max_element(mag.begin(), mag.end());
  std::vector<SpectralPeak> peaks;
  if (!(top > 0.0)) return peaks;
  const double dw = 2.0 * pi / (static_cast<double>(nfft) * dt);
  for (std::size_t k = 1; k + 1 < bins; ++k) {
    if (!(mag[k] > mag[k - 1] && mag[k] >= mag[k + 1]) || mag[k] < rel_floor * top) continue;
    const double a = std::log(mag[k - 1]), b = std::log(mag[k]), c = std::log(mag[k + 1]);
    const double denom = a - 2.0 * b + c;
    const double shift = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
    peaks.push_back({(static_cast<double>(k) + shift) * dw,
                     std::exp(b - 0.25 * (a - c) * shift)});
  }
  return peaks;
}

double dominant_frequency(const std::vector<double>& signal, double dt) {
  const auto peaks = spectral_peaks(signal, dt, 0.0);
  if (peaks.empty()) throw Error(ErrorCode::InvalidArgument, "dominant_frequency: flat signal");
  return std::max_element(peaks.begin(), peaks.end(), [](const auto& l, const auto& r) {
           return l.amplitude < r.amplitude;
         })->frequency;
}

}  // namespace nhreal::mech
