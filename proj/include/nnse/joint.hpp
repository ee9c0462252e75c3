#pragma once

#include <Eigen/Dense>

#include "nnse/embedspace.hpp"
#include "nnse/solver.hpp"

namespace nnse {

// Shared code A reconstructing X through dict_x and Y through dict_y.
struct JointModel {
  SparseEmbedding codes;
  Dictionary dict_x;
  Dictionary dict_y;
  double lambda = 0.0;
};

struct JointFit {
  JointModel model;
  std::vector<IterationRecord> log;
  bool converged = false;
};

double jnnse_objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& codes,
                       const Eigen::MatrixXd& dict_x, const Eigen::MatrixXd& dict_y, double lambda);
double jnnse_objective(const EmbeddingSpace& x, const EmbeddingSpace& y, const JointModel& model);

// Codes one row against the column-concatenated dictionary [Dx | Dy] and
// target [x | y]. Concatenated atoms may have squared norm up to 2.
Eigen::VectorXd sparse_code_row_joint(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Dictionary& dict_x,
                                      const Dictionary& dict_y, double lambda);

// X and Y must have identical lexicons (intersect first).
JointFit jnnse_fit(const EmbeddingSpace& x, const EmbeddingSpace& y, const SolverConfig& cfg,
                   const IterationObserver& observer = {});

}  // namespace nnse
