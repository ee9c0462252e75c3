#pragma once

// Reference implementations used only by tests. Each one follows a different
// computational route from the library code it checks.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "nnse/random.hpp"

namespace oracle {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  nnse::Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

inline Eigen::MatrixXd random_symmetric(Eigen::Index n, std::uint64_t seed) {
  Eigen::MatrixXd m = random_matrix(n, n, seed);
  Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  s.diagonal().setOnes();
  return s;
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  nnse::Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

// Element-by-element double sum of the objective terms.
inline double naive_objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& a, const Eigen::MatrixXd& d,
                              double lambda) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      double recon = 0.0;
      for (Eigen::Index j = 0; j < a.cols(); ++j) recon += a(i, j) * d(j, c);
      const double e = x(i, c) - recon;
      row += e * e;
    }
    double l1 = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) l1 += std::abs(a(i, j));
    total += row + lambda * l1;
  }
  return total;
}

inline double naive_joint_objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& a,
                                    const Eigen::MatrixXd& dx, const Eigen::MatrixXd& dy, double lambda) {
  return naive_objective(x, a, dx, lambda) + naive_objective(y, a, dy, 0.0);
}

// Row objective evaluated by explicit reconstruction.
inline double row_objective(const Eigen::VectorXd& x, const Eigen::VectorXd& a, const Eigen::MatrixXd& d,
                            double lambda) {
  double f = 0.0;
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    double r = x(c);
    for (Eigen::Index j = 0; j < a.size(); ++j) r -= a(j) * d(j, c);
    f += r * r;
  }
  for (Eigen::Index j = 0; j < a.size(); ++j) f += lambda * std::abs(a(j));
  return f;
}

// Minimum of the row objective over a regular grid on [0, hi]^p.
inline double grid_minimum(const Eigen::VectorXd& x, const Eigen::MatrixXd& d, double lambda, double step = 0.01,
                           double hi = 2.0) {
  const Eigen::Index p = d.rows();
  const int n = static_cast<int>(std::lround(hi / step)) + 1;
  const Eigen::MatrixXd g = d * d.transpose();
  const Eigen::VectorXd b = d * x;
  const double xx = x.squaredNorm();
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(static_cast<std::size_t>(p), 0);
  Eigen::VectorXd a(p);
  while (true) {
    for (Eigen::Index j = 0; j < p; ++j) a(j) = idx[static_cast<std::size_t>(j)] * step;
    best = std::min(best, xx - 2.0 * b.dot(a) + a.dot(g * a) + lambda * a.sum());
    Eigen::Index k = 0;
    while (k < p && ++idx[static_cast<std::size_t>(k)] == n) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == p) break;
  }
  return best;
}

// O(n^2) average rank: 1 + #smaller + (#equal - 1) / 2.
inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double smaller = 0, equal = 0;
    for (double u : v) {
      if (u < v[i]) ++smaller;
      if (u == v[i]) ++equal;
    }
    r[i] = 1.0 + smaller + 0.5 * (equal - 1.0);
  }
  return r;
}

// Sample covariance over sample standard deviations.
inline double covariance_pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
  }
  const double ma = sa / n, mb = sb / n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb) / (n - 1.0);
    va += (a[i] - ma) * (a[i] - ma) / (n - 1.0);
    vb += (b[i] - mb) * (b[i] - mb) / (n - 1.0);
  }
  return cov / (std::sqrt(va) * std::sqrt(vb));
}

inline double rank_spearman(const std::vector<double>& a, const std::vector<double>& b) {
  return covariance_pearson(ranks(a), ranks(b));
}

// All C(N, 2) pairs, each row copied then the two pair columns erased.
inline double brute_two_vs_two(const Eigen::MatrixXd& md, const Eigen::MatrixXd& mb) {
  const Eigen::Index n = md.rows();
  auto row_without = [&](const Eigen::MatrixXd& m, Eigen::Index r, Eigen::Index i, Eigen::Index j) {
    std::vector<double> v;
    for (Eigen::Index c = 0; c < n; ++c) v.push_back(m(r, c));
    v.erase(v.begin() + std::max(i, j));
    v.erase(v.begin() + std::min(i, j));
    return v;
  };
  int positive = 0, total = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j <= i) continue;
      const auto d1 = row_without(md, i, i, j), d2 = row_without(md, j, i, j);
      const auto b1 = row_without(mb, i, i, j), b2 = row_without(mb, j, i, j);
      const double lhs = covariance_pearson(d1, b1) + covariance_pearson(d2, b2);
      const double rhs = covariance_pearson(d1, b2) + covariance_pearson(d2, b1);
      positive += lhs > rhs ? 1 : 0;
      ++total;
    }
  }
  return static_cast<double>(positive) / total;
}

inline std::vector<double> flatten_upper(const Eigen::MatrixXd& m) {
  std::vector<double> v;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (j > i) v.push_back(m(i, j));
  return v;
}

// Frobenius residual of the best rank-r approximation from the eigenvalues of X'X.
inline double gram_residual(const Eigen::MatrixXd& x, Eigen::Index r) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x.transpose() * x);
  Eigen::VectorXd ev = eig.eigenvalues();  // ascending
  double tail = 0.0;
  for (Eigen::Index i = 0; i < ev.size() - r; ++i) tail += std::max(0.0, ev(i));
  return std::sqrt(tail);
}

inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& at, double h) {
  Eigen::VectorXd g(at.size());
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    Eigen::VectorXd up = at, dn = at;
    up(i) += h;
    dn(i) -= h;
    g(i) = (f(up) - f(dn)) / (2.0 * h);
  }
  return g;
}

inline double f1(const std::vector<int>& pred, const std::vector<int>& truth) {
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    tp += pred[i] && truth[i];
    fp += pred[i] && !truth[i];
    fn += !pred[i] && truth[i];
  }
  return tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
}

}  // namespace oracle
