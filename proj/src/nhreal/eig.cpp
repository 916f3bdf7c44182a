#include "nhreal/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "nhreal/linalg.hpp"

namespace nhreal::eig {

std::string to_string(NormStatus status) {
  switch (status) {
    case NormStatus::Biorthonormal:
      return "biorthonormal";
    case NormStatus::SelfOrthogonal:
      return "self_orthogonal";
    case NormStatus::Unpaired:
      return "unpaired";
  }
  return "unpaired";
}

bool EigenSystem::all_biorthonormal() const {
  return std::all_of(status.begin(), status.end(),
                     [](NormStatus s) { return s == NormStatus::Biorthonormal; });
}

double EigenSystem::biorthogonality_error() const {
  double worst = 0.0;
  for (std::size_t u = 0; u < dim; ++u) {
    if (status[u] != NormStatus::Biorthonormal) continue;
    for (std::size_t v = 0; v < dim; ++v) {
      if (status[v] != NormStatus::Biorthonormal) continue;
      const cd bilinear = (left.col(static_cast<Eigen::Index>(v)).transpose() *
                           right.col(static_cast<Eigen::Index>(u)))(0, 0);
      worst = std::max(worst, std::abs(bilinear - (u == v ? cd(1.0) : cd(0.0))));
    }
  }
  return worst;
}

double EigenSystem::max_residual() const {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

namespace {

struct RawSolve {
  std::vector<cd> values;
  ComplexMatrix vectors;  // unit columns, sorted by (Re, Im)
};

RawSolve solve_sorted(const ComplexMatrix& m, const char* which) {
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, true);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eig_full: " << which << " eigensolve did not converge (dim " << m.rows()
        << ", ||M|| = " << linalg::spectral_norm(m)
        << ", sigma_min = " << linalg::min_singular_value(m) << ")";
    throw Error(ErrorCode::NoConvergence, msg.str());
  }
  const auto& ev = solver.eigenvalues();
  std::vector<cd> values(ev.data(), ev.data() + ev.size());
  const auto order = linalg::sorted_order(values);
  RawSolve out;
  out.vectors.resize(m.rows(), m.cols());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto src = static_cast<Eigen::Index>(order[k]);
    out.values.push_back(values[order[k]]);
    ComplexVector v = solver.eigenvectors().col(src);
    const double nv = v.norm();
    if (nv > 0.0) v /= nv;
    out.vectors.col(static_cast<Eigen::Index>(k)) = v;
  }
  return out;
}

// Single-linkage clusters over sorted eigenvalues.
std::vector<std::vector<std::size_t>> cluster_values(const std::vector<cd>& values,
                                                      double radius) {
  const std::size_t n = values.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(values[i] - values[j]) <= radius) parent[find(j)] = find(i);
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> slot(n, kNoPartner);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (slot[root] == kNoPartner) {
      slot[root] = groups.size();
      groups.emplace_back();
    }
    groups[slot[root]].push_back(i);
  }
  return groups;
}

double right_residual(const ComplexMatrix& m, const ComplexVector& r, cd w) {
  const double nr = r.norm();
  return nr == 0.0 ? 0.0 : (m * r - w * r).norm() / nr;
}

// Residual of the left vector at its own Rayleigh value, which is the
// minimiser of ||M^T l - rho l|| over rho.
double left_residual(const ComplexMatrix& mt, const ComplexVector& l, cd* rho) {
  const double nl2 = l.squaredNorm();
  if (nl2 == 0.0) return 0.0;
  const ComplexVector ml = mt * l;
  *rho = l.dot(ml) / nl2;
  return (ml - *rho * l).norm() / std::sqrt(nl2);
}

}  // namespace

EigenSystem eig_full(const ComplexMatrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "eig_full: matrix is not square");
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "eig_full: matrix has non-finite entries");
  }
  const std::size_t n = static_cast<std::size_t>(m.rows());
  EigenSystem es;
  es.dim = n;
  es.matrix_norm = linalg::spectral_norm(m);
  if (n == 0) return es;
  const double scale = es.matrix_norm > 0.0 ? es.matrix_norm : 1.0;

  const ComplexMatrix mt = m.transpose();
  const RawSolve rs = solve_sorted(m, "right");
  const RawSolve ls = solve_sorted(mt, "left");

  es.eigenvalues = rs.values;
  es.left_eigenvalues.assign(n, cd(0.0));
  es.right = rs.vectors;
  es.left = ComplexMatrix::Zero(m.rows(), m.cols());
  es.pairing.assign(n, kNoPartner);
  es.status.assign(n, NormStatus::Unpaired);
  es.residuals.assign(n, 0.0);

  const double radius = tol.cluster * scale;
  std::vector<bool> left_used(n, false);
  std::vector<bool> right_done(n, false);

  for (const auto& cluster : cluster_values(rs.values, radius)) {
    // Left candidates within the cluster radius of any member, nearest first.
    std::vector<std::pair<double, std::size_t>> cand;
    for (std::size_t l = 0; l < n; ++l) {
      if (left_used[l]) continue;
      double d = std::numeric_limits<double>::infinity();
      for (std::size_t r : cluster) d = std::min(d, std::abs(ls.values[l] - rs.values[r]));
      if (d <= radius) cand.emplace_back(d, l);
    }
    if (cand.size() < cluster.size()) continue;  // left as unpaired
    std::sort(cand.begin(), cand.end());
    cand.resize(cluster.size());
    std::vector<std::size_t> lefts;
    for (const auto& c : cand) lefts.push_back(c.second);
    std::sort(lefts.begin(), lefts.end());
    for (std::size_t l : lefts) left_used[l] = true;

    const auto k = static_cast<Eigen::Index>(cluster.size());
    ComplexMatrix R(m.rows(), k), L(m.rows(), k);
    for (Eigen::Index c = 0; c < k; ++c) {
      R.col(c) = rs.vectors.col(static_cast<Eigen::Index>(cluster[static_cast<std::size_t>(c)]));
      L.col(c) = ls.vectors.col(static_cast<Eigen::Index>(lefts[static_cast<std::size_t>(c)]));
    }
    const ComplexMatrix G = L.transpose() * R;  // G(a, b) = l_a^T r_b

    if (k == 1) {
      const std::size_t u = cluster[0];
      es.pairing[u] = lefts[0];
      es.left_eigenvalues[u] = ls.values[lefts[0]];
      const cd g = G(0, 0);
      ComplexVector r = R.col(0), l = L.col(0);
      if (std::abs(g) < tol.self_orthogonal) {
        es.status[u] = NormStatus::SelfOrthogonal;
      } else {
        const cd root = std::sqrt(g);
        r /= root;
        l /= root;
        es.status[u] = NormStatus::Biorthonormal;
      }
      es.right.col(static_cast<Eigen::Index>(u)) = r;
      es.left.col(static_cast<Eigen::Index>(u)) = l;
      right_done[u] = true;
      continue;
    }

    Eigen::JacobiSVD<ComplexMatrix> svd(G);
    const double smin = svd.singularValues()(k - 1);
    if (smin >= tol.self_orthogonal) {
      // Non-defective cluster: dual basis within the cluster.
      const ComplexMatrix Ld = L * G.transpose().inverse();
      for (Eigen::Index c = 0; c < k; ++c) {
        const std::size_t u = cluster[static_cast<std::size_t>(c)];
        ComplexVector r = R.col(c), l = Ld.col(c);
        const double balance = std::sqrt(l.norm() / r.norm());
        r *= balance;
        l /= balance;
        Eigen::Index best = 0;
        G.col(c).cwiseAbs().maxCoeff(&best);
        es.pairing[u] = lefts[static_cast<std::size_t>(best)];
        es.status[u] = NormStatus::Biorthonormal;
        es.right.col(static_cast<Eigen::Index>(u)) = r;
        es.left.col(static_cast<Eigen::Index>(u)) = l;
        right_done[u] = true;
      }
      continue;
    }

    // Cluster containing coalesced directions: greedy pairing by overlap.
    std::vector<bool> row_used(static_cast<std::size_t>(k), false);
    std::vector<bool> col_used(static_cast<std::size_t>(k), false);
    for (Eigen::Index step = 0; step < k; ++step) {
      double best = -1.0;
      Eigen::Index ba = 0, bb = 0;
      for (Eigen::Index a = 0; a < k; ++a) {
        if (row_used[static_cast<std::size_t>(a)]) continue;
        for (Eigen::Index b = 0; b < k; ++b) {
          if (col_used[static_cast<std::size_t>(b)]) continue;
          if (std::abs(G(a, b)) > best) {
            best = std::abs(G(a, b));
            ba = a;
            bb = b;
          }
        }
      }
      row_used[static_cast<std::size_t>(ba)] = true;
      col_used[static_cast<std::size_t>(bb)] = true;
      const std::size_t u = cluster[static_cast<std::size_t>(bb)];
      es.pairing[u] = lefts[static_cast<std::size_t>(ba)];
      es.left_eigenvalues[u] = ls.values[lefts[static_cast<std::size_t>(ba)]];
      ComplexVector r = R.col(bb), l = L.col(ba);
      if (best < tol.self_orthogonal) {
        es.status[u] = NormStatus::SelfOrthogonal;
      } else {
        // Ambiguous when a competitor overlap is within the tracking margin.
        double runner = 0.0;
        for (Eigen::Index a = 0; a < k; ++a) {
          if (a != ba && !row_used[static_cast<std::size_t>(a)]) {
            runner = std::max(runner, std::abs(G(a, bb)));
          }
        }
        for (Eigen::Index b = 0; b < k; ++b) {
          if (b != bb && !col_used[static_cast<std::size_t>(b)]) {
            runner = std::max(runner, std::abs(G(ba, b)));
          }
        }
        if (runner >= (1.0 - tol.tracking_ambiguity) * best) {
          es.status[u] = NormStatus::Unpaired;
        } else {
          const cd root = std::sqrt(G(ba, bb));
          r /= root;
          l /= root;
          es.status[u] = NormStatus::Biorthonormal;
        }
      }
      es.right.col(static_cast<Eigen::Index>(u)) = r;
      es.left.col(static_cast<Eigen::Index>(u)) = l;
      right_done[u] = true;
    }
  }

  // Anything still unmatched receives a leftover left vector, flagged unpaired.
  std::vector<std::size_t> spare;
  for (std::size_t l = 0; l < n; ++l) {
    if (!left_used[l]) spare.push_back(l);
  }
  std::size_t next_spare = 0;
  for (std::size_t u = 0; u < n; ++u) {
    if (right_done[u]) continue;
    const std::size_t l = spare[next_spare++];
    es.pairing[u] = l;
    es.left_eigenvalues[u] = ls.values[l];
    es.status[u] = NormStatus::Unpaired;
    es.left.col(static_cast<Eigen::Index>(u)) = ls.vectors.col(static_cast<Eigen::Index>(l));
  }

  for (std::size_t u = 0; u < n; ++u) {
    const auto col = static_cast<Eigen::Index>(u);
    cd rho = es.left_eigenvalues[u];
    const double rr = right_residual(m, es.right.col(col), es.eigenvalues[u]);
    const double lr = left_residual(mt, es.left.col(col), &rho);
    es.left_eigenvalues[u] = rho;
    es.residuals[u] = std::max(rr, lr);
  }
  return es;
}

MetricPairingReport apply_metric_pairing(const EigenSystem& es, const ComplexMatrix& a,
                                         const Tolerances& tol) {
  if (static_cast<std::size_t>(a.rows()) != es.dim || a.rows() != a.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "apply_metric_pairing: A has the wrong size");
  }
  const double a_norm = linalg::spectral_norm(a);
  const double scale = es.matrix_norm > 0.0 ? es.matrix_norm : 1.0;
  MetricPairingReport report;
  report.all_same_index = true;
  for (std::size_t u = 0; u < es.dim; ++u) {
    MetricPair pair;
    pair.right_index = u;
    const ComplexVector psi = es.right.col(static_cast<Eigen::Index>(u));
    const ComplexVector a_psi = a * psi;
    if (a_psi.norm() <= tol.kernel * std::max(a_norm, 1.0) * psi.norm()) {
      pair.kernel = true;
      pair.same_index = true;
      report.pairs.push_back(pair);
      continue;
    }
    const ComplexVector target = a_psi.conjugate();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < es.dim; ++v) {
      const double res =
          linalg::collinearity_residual(target, es.left.col(static_cast<Eigen::Index>(v)));
      if (res < best) {
        best = res;
        pair.left_index = v;
      }
    }
    // A degenerate partner cluster only fixes the left vector up to the span.
    std::vector<std::size_t> members;
    for (std::size_t v = 0; v < es.dim; ++v) {
      if (std::abs(es.eigenvalues[v] - es.eigenvalues[pair.left_index]) <= tol.cluster * scale) {
        members.push_back(v);
      }
    }
    if (members.size() > 1 && best > tol.collinearity) {
      ComplexMatrix span(static_cast<Eigen::Index>(es.dim), static_cast<Eigen::Index>(members.size()));
      for (std::size_t c = 0; c < members.size(); ++c) {
        span.col(static_cast<Eigen::Index>(c)) = es.left.col(static_cast<Eigen::Index>(members[c]));
      }
      const ComplexVector coeff = span.completeOrthogonalDecomposition().solve(target);
      best = (target - span * coeff).norm() / target.norm();
    }
    pair.collinearity = best;
    pair.same_index = pair.left_index == u ||
                      (std::find(members.begin(), members.end(), u) != members.end());
    report.all_same_index = report.all_same_index && pair.same_index;
    report.max_collinearity = std::max(report.max_collinearity, best);
    report.pairs.push_back(pair);
  }
  return report;
}

}  // namespace nhreal::eig
