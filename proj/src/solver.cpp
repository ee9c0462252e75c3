#include "nnse/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nnse/errors.hpp"
#include "nnse/parallel.hpp"
#include "nnse/random.hpp"

namespace nnse {

namespace {

constexpr double kCoordTol = 1e-10;
constexpr int kMaxCoordSweeps = 1000;
constexpr double kDictTol = 1e-10;
constexpr int kMaxDictSweeps = 25;

void project_rows_to_ball(Eigen::MatrixXd& basis) {
  for (Eigen::Index j = 0; j < basis.rows(); ++j) {
    const double n = basis.row(j).norm();
    if (n > 1.0) basis.row(j) /= n;
  }
}

double reconstruction_error(const Eigen::MatrixXd& x, const Eigen::MatrixXd& codes, const Eigen::MatrixXd& basis) {
  if (x.cols() == 0) return 0.0;
  return (x - codes * basis).squaredNorm();
}

}  // namespace

bool Dictionary::feasible(double slack) const {
  for (Eigen::Index j = 0; j < basis.rows(); ++j)
    if (basis.row(j).squaredNorm() > 1.0 + slack) return false;
  return true;
}

void SolverConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DataError("lambda must be a finite value >= 0");
  if (p < 1) throw DataError("latent dimension p must be >= 1");
  if (max_outer_iters < 1) throw DataError("max_outer_iters must be >= 1");
  if (!(tol > 0.0)) throw DataError("tol must be > 0");
  if (!(init_noise >= 0.0)) throw DataError("init_noise must be >= 0");
}

double nnse_objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& codes, const Eigen::MatrixXd& basis,
                      double lambda) {
  if (codes.rows() != x.rows() || codes.cols() != basis.rows() || basis.cols() != x.cols()) {
    throw DataError("nnse_objective: shape mismatch (X " + std::to_string(x.rows()) + "x" +
                    std::to_string(x.cols()) + ", A " + std::to_string(codes.rows()) + "x" +
                    std::to_string(codes.cols()) + ", D " + std::to_string(basis.rows()) + "x" +
                    std::to_string(basis.cols()) + ")");
  }
  return reconstruction_error(x, codes, basis) + lambda * codes.cwiseAbs().sum();
}

double nnse_objective(const EmbeddingSpace& x, const SparseEmbedding& a, const Dictionary& d, double lambda) {
  return nnse_objective(x.values(), a.codes, d.basis, lambda);
}

namespace detail {

void coordinate_descent(const Eigen::MatrixXd& gram, const Eigen::VectorXd& corr, double lambda,
                        Eigen::VectorXd& a) {
  const Eigen::Index p = gram.rows();
  const double half_lambda = 0.5 * lambda;
  Eigen::VectorXd q(p);
  for (int sweep = 0; sweep < kMaxCoordSweeps; ++sweep) {
    q.noalias() = gram * a;
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double g = gram(j, j);
      double next = 0.0;
      if (g > 0.0) {
        // <r_j, d_j> with r_j the residual excluding atom j.
        const double rj = corr(j) - (q(j) - g * a(j));
        next = std::max(0.0, (rj - half_lambda) / g);
      }
      const double delta = next - a(j);
      if (delta != 0.0) {
        a(j) = next;
        q += gram.col(j) * delta;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (max_change < kCoordTol) break;
  }
}

Eigen::MatrixXd update_dictionary_rows(const Eigen::MatrixXd& x, const Eigen::MatrixXd& codes,
                                       const Eigen::MatrixXd& basis) {
  Eigen::MatrixXd d = basis;
  if (x.cols() == 0) return d;
  const Eigen::MatrixXd ata = codes.transpose() * codes;
  const Eigen::MatrixXd atx = codes.transpose() * x;
  Eigen::RowVectorXd u(d.cols());
  for (int sweep = 0; sweep < kMaxDictSweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < d.rows(); ++j) {
      const double h = ata(j, j);
      // Dead atom: unused by every code, left as is.
      if (!(h > 0.0)) continue;
      u = (atx.row(j) - ata.row(j) * d) / h + d.row(j);
      const double n = u.norm();
      if (n > 1.0) u /= n;
      max_change = std::max(max_change, (u - d.row(j)).cwiseAbs().maxCoeff());
      d.row(j) = u;
    }
    if (max_change < kDictTol) break;
  }
  return d;
}

BlockFit fit_blocks(const std::vector<const Eigen::MatrixXd*>& blocks, const SolverConfig& cfg,
                    const IterationObserver& observer) {
  cfg.validate();
  if (blocks.empty()) throw DataError("no input blocks");
  const Eigen::Index w = blocks.front()->rows();
  if (w == 0) throw DataError("cannot factorize an empty lexicon");
  for (const auto* b : blocks) {
    if (b->rows() != w) throw DataError("all blocks must share the same row count");
    if (!b->allFinite()) throw NumericalError("input contains non-finite values");
  }
  const Eigen::Index p = cfg.p;

  // Seed rows are chosen once, among rows that are not identically zero in
  // every block, and shared by every block; each block's noise stream
  // restarts from the same seed so block order does not matter.
  std::vector<Eigen::Index> candidates;
  for (Eigen::Index i = 0; i < w; ++i) {
    double norm2 = 0.0;
    for (const auto* b : blocks) norm2 += b->row(i).squaredNorm();
    if (norm2 > 0.0) candidates.push_back(i);
  }
  if (candidates.empty()) {
    candidates.resize(static_cast<std::size_t>(w));
    std::iota(candidates.begin(), candidates.end(), Eigen::Index{0});
  }
  const auto pool = static_cast<Eigen::Index>(candidates.size());
  std::vector<Eigen::Index> seed_rows(static_cast<std::size_t>(p));
  {
    Rng rng(mix_seed(cfg.seed, 0));
    if (p <= pool) {
      for (Eigen::Index j = 0; j < p; ++j) {
        const auto pick = static_cast<std::size_t>(j) + rng.below(static_cast<std::uint64_t>(pool - j));
        std::swap(candidates[static_cast<std::size_t>(j)], candidates[pick]);
        seed_rows[static_cast<std::size_t>(j)] = candidates[static_cast<std::size_t>(j)];
      }
    } else {
      for (auto& r : seed_rows) r = candidates[rng.below(static_cast<std::uint64_t>(pool))];
    }
  }

  BlockFit fit;
  for (const auto* b : blocks) {
    Rng noise(mix_seed(cfg.seed, 1));
    Eigen::MatrixXd d(p, b->cols());
    for (Eigen::Index j = 0; j < p; ++j)
      for (Eigen::Index c = 0; c < b->cols(); ++c)
        d(j, c) = (*b)(seed_rows[static_cast<std::size_t>(j)], c) + noise.uniform(-cfg.init_noise, cfg.init_noise);
    project_rows_to_ball(d);
    fit.dictionaries.push_back(std::move(d));
  }
  fit.codes = Eigen::MatrixXd::Zero(w, p);

  auto objective = [&] {
    double f = 0.0;
    for (std::size_t b = 0; b < blocks.size(); ++b) f += reconstruction_error(*blocks[b], fit.codes, fit.dictionaries[b]);
    return f + cfg.lambda * fit.codes.sum();
  };

  double prev = objective();
  Eigen::MatrixXd gram(p, p);
  Eigen::MatrixXd corr(w, p);
  for (int it = 1; it <= cfg.max_outer_iters; ++it) {
    gram.setZero();
    corr.setZero();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      gram.noalias() += fit.dictionaries[b] * fit.dictionaries[b].transpose();
      corr.noalias() += *blocks[b] * fit.dictionaries[b].transpose();
    }
    parallel_for(static_cast<std::size_t>(w), cfg.threads, [&](std::size_t i) {
      const auto r = static_cast<Eigen::Index>(i);
      Eigen::VectorXd a = fit.codes.row(r).transpose();
      coordinate_descent(gram, corr.row(r).transpose(), cfg.lambda, a);
      fit.codes.row(r) = a.transpose();
    });
    for (std::size_t b = 0; b < blocks.size(); ++b)
      fit.dictionaries[b] = update_dictionary_rows(*blocks[b], fit.codes, fit.dictionaries[b]);

    const double f = objective();
    if (!std::isfinite(f)) {
      throw NumericalError("objective became non-finite at outer iteration " + std::to_string(it));
    }
    IterationRecord rec{it, f, sparsity(fit.codes)};
    fit.log.push_back(rec);
    if (observer) observer(rec);
    const double rel = std::abs(prev - f) / std::max(std::abs(prev), 1e-300);
    prev = f;
    if (rel < cfg.tol) {
      fit.converged = true;
      break;
    }
  }
  return fit;
}

}  // namespace detail

Eigen::VectorXd sparse_code_row(const Eigen::VectorXd& x, const Dictionary& d, double lambda) {
  if (x.size() != d.basis.cols()) throw DataError("sparse_code_row: x length does not match dictionary width");
  const Eigen::MatrixXd gram = d.basis * d.basis.transpose();
  const Eigen::VectorXd corr = d.basis * x;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(d.basis.rows());
  detail::coordinate_descent(gram, corr, lambda, a);
  return a;
}

Dictionary update_dictionary(const Eigen::MatrixXd& x, const Eigen::MatrixXd& codes, const Dictionary& d) {
  if (codes.rows() != x.rows() || codes.cols() != d.basis.rows() || d.basis.cols() != x.cols())
    throw DataError("update_dictionary: shape mismatch");
  return Dictionary{detail::update_dictionary_rows(x, codes, d.basis)};
}

NnseFit nnse_fit(const EmbeddingSpace& x, const SolverConfig& cfg, const IterationObserver& observer) {
  auto fit = detail::fit_blocks({&x.values()}, cfg, observer);
  NnseFit out;
  out.embedding.lexicon = x.lexicon();
  out.embedding.codes = std::move(fit.codes);
  out.embedding.lambda = cfg.lambda;
  out.dictionary.basis = std::move(fit.dictionaries.front());
  out.log = std::move(fit.log);
  out.converged = fit.converged;
  return out;
}

double sparsity(const Eigen::MatrixXd& codes) {
  if (codes.size() == 0) return 1.0;
  const auto zeros = (codes.array() <= kZeroThreshold).count();
  return static_cast<double>(zeros) / static_cast<double>(codes.size());
}

double lambda_kill(const Eigen::MatrixXd& x) {
  if (x.rows() == 0) return 0.0;
  return 2.0 * x.rowwise().norm().maxCoeff();
}

LambdaSearch tune_lambda(const EmbeddingSpace& x, const SolverConfig& cfg, double target_sparsity) {
  if (!(target_sparsity > 0.0 && target_sparsity < 1.0)) throw DataError("target sparsity must lie in (0, 1)");
  LambdaSearch search;
  auto probe = [&](double lambda) {
    SolverConfig c = cfg;
    c.lambda = lambda;
    const double s = sparsity(nnse_fit(x, c).embedding.codes);
    search.probes.push_back({lambda, s});
    return s;
  };
  auto within = [&](double s) { return std::abs(s - target_sparsity) <= kSparsityTolerance; };
  auto settle_on_best = [&] {
    const auto best = std::min_element(search.probes.begin(), search.probes.end(), [&](const auto& a, const auto& b) {
      return std::abs(a.sparsity - target_sparsity) < std::abs(b.sparsity - target_sparsity);
    });
    search.lambda = best->lambda;
    search.achieved_sparsity = best->sparsity;
    search.reached = within(best->sparsity);
  };

  double lo = 1e-6;
  double hi = lambda_kill(x.values());
  if (!(hi > lo)) {
    // Degenerate bracket: every admissible lambda already zeroes all codes.
    search.lambda = hi;
    search.achieved_sparsity = 1.0;
    search.probes.push_back({hi, 1.0});
    search.reached = false;
    return search;
  }
  search.probes.push_back({hi, 1.0});
  const double s_lo = probe(lo);
  if (within(s_lo) || s_lo > target_sparsity) {
    settle_on_best();
    return search;
  }
  for (int step = 0; step < 20; ++step) {
    const double mid = std::sqrt(lo * hi);
    const double s = probe(mid);
    if (within(s)) break;
    if (s < target_sparsity) lo = mid; else hi = mid;
  }
  settle_on_best();
  return search;
}

}  // namespace nnse
