#include "nhreal/model.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "nhreal/linalg.hpp"

namespace nhreal::model {

namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, "lattice: " + what);
}

void require_square_pair(const ComplexMatrix& x, const ComplexMatrix& y, const char* op) {
  if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows()) {
    std::ostringstream msg;
    msg << op << ": dimension mismatch (" << x.rows() << "x" << x.cols() << " vs " << y.rows()
        << "x" << y.cols() << ")";
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
}

}  // namespace

void LatticeSpec::validate() const {
  if (n < 1) invalid("n must be >= 1");
  if (!(t != 0.0) || !std::isfinite(t)) invalid("t must be finite and nonzero");
  if (const auto* g = std::get_if<GeometricScaling>(&scaling)) {
    if (!(g->s > 0.0) || !std::isfinite(g->s)) invalid("geometric s must be positive");
  }
  if (const auto* e = std::get_if<ExplicitScaling>(&scaling)) {
    if (static_cast<int>(e->values.size()) != n) {
      invalid("explicit scaling needs exactly n values");
    }
    for (double v : e->values) {
      if (!std::isfinite(v)) invalid("explicit scaling values must be finite");
      if (v < 0.0 && !allow_indefinite) {
        throw Error(ErrorCode::NotPsd,
                    "lattice: negative explicit a_j requires allow_indefinite");
      }
    }
  }
  if (const auto* h = std::get_if<HarmonicOnsite>(&onsite)) {
    if (!std::isfinite(h->omega2)) invalid("harmonic omega2 must be finite");
  }
  for (int site : zeroed_sites) {
    if (site < 1 || site > n) invalid("zeroed site " + std::to_string(site) + " outside [1, n]");
  }
}

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

ComplexMatrix build_h0(const LatticeSpec& spec) {
  spec.validate();
  const int n = spec.n;
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  for (int j = 0; j + 1 < n; ++j) {
    h(j, j + 1) = spec.t;
    h(j + 1, j) = spec.t;
  }
  if (const auto* harmonic = std::get_if<HarmonicOnsite>(&spec.onsite)) {
    const double center = (n - 1) / 2.0;
    for (int j = 1; j <= n; ++j) {
      const double d = j - center;
      h(j - 1, j - 1) = d * d * harmonic->omega2 / 2.0;
    }
  }
  return h;
}

std::vector<double> scaling_values(const LatticeSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(spec.n);
  std::vector<double> a(n, 1.0);
  std::visit(
      [&](const auto& kind) {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, GeometricScaling>) {
          double value = 1.0;
          for (std::size_t j = 0; j < n; ++j) {
            a[j] = value;
            value *= kind.s;
          }
        } else if constexpr (std::is_same_v<K, RandomScaling>) {
          SplitMix64 rng(kind.seed);
          for (std::size_t j = 0; j < n; ++j) a[j] = 2.0 * (1.0 - rng.next_unit());
        } else if constexpr (std::is_same_v<K, ExplicitScaling>) {
          a = kind.values;
        }
      },
      spec.scaling);
  for (int site : spec.zeroed_sites) a[static_cast<std::size_t>(site - 1)] = 0.0;
  return a;
}

ComplexMatrix build_scaling(const LatticeSpec& spec) {
  const auto a = scaling_values(spec);
  ComplexMatrix m = ComplexMatrix::Zero(spec.n, spec.n);
  for (int j = 0; j < spec.n; ++j) m(j, j) = a[static_cast<std::size_t>(j)];
  return m;
}

ComplexMatrix construct_product(const ComplexMatrix& h0, const ComplexMatrix& a) {
  require_square_pair(h0, a, "construct_product");
  if (!linalg::is_hermitian(h0)) {
    throw Error(ErrorCode::InvalidArgument, "construct_product: H0 is not Hermitian");
  }
  if (!linalg::is_hermitian(a)) {
    throw Error(ErrorCode::InvalidArgument, "construct_product: A is not Hermitian");
  }
  return h0 * a;
}

ComplexMatrix construct_gauge(const ComplexMatrix& h0, const ComplexMatrix& a) {
  require_square_pair(h0, a, "construct_gauge");
  if (linalg::is_diagonal(a)) {
    std::vector<int> zeros;
    for (Eigen::Index j = 0; j < a.rows(); ++j) {
      if (a(j, j) == cd(0.0)) zeros.push_back(static_cast<int>(j + 1));
    }
    if (!zeros.empty()) {
      std::ostringstream msg;
      msg << "construct_gauge: A is singular, zero diagonal at site(s)";
      for (int z : zeros) msg << ' ' << z;
      throw Error(ErrorCode::Singular, msg.str());
    }
    ComplexMatrix out = h0;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) *= a(j, j) / a(i, i);
    }
    return out;
  }
  const double scale = linalg::spectral_norm(a);
  if (scale == 0.0 || linalg::min_singular_value(a) <= 1e-14 * scale) {
    throw Error(ErrorCode::Singular, "construct_gauge: A is numerically singular");
  }
  return a.partialPivLu().solve(h0 * a);
}

ComplexMatrix factor_psd(const ComplexMatrix& a, double psd_tol) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "factor_psd: matrix is not square");
  }
  if (!linalg::is_hermitian(a)) {
    throw Error(ErrorCode::NotPsd, "factor_psd: matrix is not Hermitian");
  }
  const Eigen::Index n = a.rows();
  if (linalg::is_diagonal(a)) {
    const double scale = linalg::max_abs(a);
    ComplexMatrix b = ComplexMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = a(j, j).real();
      if (v < -psd_tol * scale) {
        throw Error(ErrorCode::NotPsd, "factor_psd: negative diagonal entry at site " +
                                           std::to_string(j + 1));
      }
      b(j, j) = std::sqrt(std::max(v, 0.0));
    }
    return b;
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (a + a.adjoint()));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "factor_psd: Hermitian eigensolve failed");
  }
  const RealVector& ev = solver.eigenvalues();
  const double scale = n > 0 ? std::max(std::abs(ev(0)), std::abs(ev(n - 1))) : 0.0;
  if (n > 0 && ev(0) < -psd_tol * scale) {
    throw Error(ErrorCode::NotPsd, "factor_psd: negative eigenvalue beyond tolerance");
  }
  RealVector root = ev.cwiseMax(0.0).cwiseSqrt();
  return root.asDiagonal() * solver.eigenvectors().adjoint();
}

ComplexMatrix hermitian_equivalent(const ComplexMatrix& h0, const ComplexMatrix& b) {
  require_square_pair(h0, b, "hermitian_equivalent");
  ComplexMatrix he = b * h0 * b.adjoint();
  if (!linalg::is_hermitian(he, 1e-10)) {
    throw Error(ErrorCode::InvalidArgument, "hermitian_equivalent: H0 is not Hermitian");
  }
  return 0.5 * (he + he.adjoint());
}

ComplexMatrix shift_spectrum(const ComplexMatrix& h, double c) {
  if (h.rows() != h.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "shift_spectrum: matrix is not square");
  }
  ComplexMatrix out = h;
  out.diagonal().array() += c;
  return out;
}

}  // namespace nhreal::model
