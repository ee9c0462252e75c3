#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nnse/embedspace.hpp"

namespace nnse {

// Entries at or below this value count as zero when measuring sparsity.
inline constexpr double kZeroThreshold = 1e-12;

// Non-negative code matrix A (words x p) with the settings that produced it.
struct SparseEmbedding {
  std::vector<std::string> lexicon;
  Eigen::MatrixXd codes;
  double lambda = 0.0;
  std::vector<std::string> sources;

  Eigen::Index p() const { return codes.cols(); }
  EmbeddingSpace to_space() const { return EmbeddingSpace(lexicon, codes, Modality::sparse); }
};

// Basis D (p x k); every row lies inside the unit L2 ball.
struct Dictionary {
  Eigen::MatrixXd basis;

  Eigen::Index atoms() const { return basis.rows(); }
  bool feasible(double slack = 1e-9) const;
};

struct SolverConfig {
  double lambda = 0.05;
  Eigen::Index p = 200;
  int max_outer_iters = 200;
  double tol = 1e-6;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  // Half-width of the uniform perturbation added to the seeded dictionary rows.
  double init_noise = 0.01;

  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double sparsity = 0.0;
};

struct NnseFit {
  SparseEmbedding embedding;
  Dictionary dictionary;
  std::vector<IterationRecord> log;
  bool converged = false;
};

// Called after every outer iteration; lets callers stream the log.
using IterationObserver = std::function<void(const IterationRecord&)>;

double nnse_objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& codes, const Eigen::MatrixXd& basis,
                      double lambda);
double nnse_objective(const EmbeddingSpace& x, const SparseEmbedding& a, const Dictionary& d, double lambda);

// argmin_{a >= 0} ||x - a D||^2 + lambda ||a||_1 by cyclic coordinate descent.
Eigen::VectorXd sparse_code_row(const Eigen::VectorXd& x, const Dictionary& d, double lambda);

// One block-coordinate pass set over the rows of D with A held fixed.
Dictionary update_dictionary(const Eigen::MatrixXd& x, const Eigen::MatrixXd& codes, const Dictionary& d);

NnseFit nnse_fit(const EmbeddingSpace& x, const SolverConfig& cfg, const IterationObserver& observer = {});

double sparsity(const Eigen::MatrixXd& codes);
inline double sparsity(const SparseEmbedding& a) { return sparsity(a.codes); }

// Smallest lambda for which A = 0 is optimal for every unit-ball dictionary.
double lambda_kill(const Eigen::MatrixXd& x);

struct LambdaProbe {
  double lambda = 0.0;
  double sparsity = 0.0;
};

struct LambdaSearch {
  double lambda = 0.0;
  double achieved_sparsity = 0.0;
  // False when no probe landed within the tolerance band of the target.
  bool reached = false;
  std::vector<LambdaProbe> probes;
};

inline constexpr double kSparsityTolerance = 0.02;

// Geometric bisection on lambda in [1e-6, lambda_kill(x)] until the fitted
// sparsity is within kSparsityTolerance of target (at most 20 steps).
LambdaSearch tune_lambda(const EmbeddingSpace& x, const SolverConfig& cfg, double target_sparsity);

namespace detail {

// Coordinate descent on f(a) = a'Ga - 2 b'a + lambda 1'a over a >= 0, warm
// started from `a`. G = D D', b = D x for the (possibly concatenated) dictionary.
void coordinate_descent(const Eigen::MatrixXd& gram, const Eigen::VectorXd& corr, double lambda,
                        Eigen::VectorXd& a);

// Alternating minimization with one shared code matrix and one dictionary per
// block. Shared by the single-space and joint solvers.
struct BlockFit {
  Eigen::MatrixXd codes;
  std::vector<Eigen::MatrixXd> dictionaries;
  std::vector<IterationRecord> log;
  bool converged = false;
};

BlockFit fit_blocks(const std::vector<const Eigen::MatrixXd*>& blocks, const SolverConfig& cfg,
                    const IterationObserver& observer);

Eigen::MatrixXd update_dictionary_rows(const Eigen::MatrixXd& x, const Eigen::MatrixXd& codes,
                                       const Eigen::MatrixXd& basis);

}  // namespace detail

}  // namespace nnse
