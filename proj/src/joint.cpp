#include "nnse/joint.hpp"

#include "nnse/errors.hpp"

namespace nnse {

double jnnse_objective(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& codes,
                       const Eigen::MatrixXd& dict_x, const Eigen::MatrixXd& dict_y, double lambda) {
  if (x.rows() != y.rows()) throw DataError("jnnse_objective: X and Y row counts differ");
  // Each half is checked by the single-space objective; lambda enters once.
  return nnse_objective(x, codes, dict_x, 0.0) + nnse_objective(y, codes, dict_y, 0.0) +
         lambda * codes.cwiseAbs().sum();
}

double jnnse_objective(const EmbeddingSpace& x, const EmbeddingSpace& y, const JointModel& model) {
  if (x.lexicon() != y.lexicon()) throw DataError("jnnse_objective: lexicons are not aligned");
  return jnnse_objective(x.values(), y.values(), model.codes.codes, model.dict_x.basis, model.dict_y.basis,
                         model.lambda);
}

Eigen::VectorXd sparse_code_row_joint(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Dictionary& dict_x,
                                      const Dictionary& dict_y, double lambda) {
  if (dict_x.atoms() != dict_y.atoms()) throw DataError("joint dictionaries must have the same number of atoms");
  if (x.size() != dict_x.basis.cols() || y.size() != dict_y.basis.cols())
    throw DataError("sparse_code_row_joint: vector length does not match dictionary width");
  Eigen::MatrixXd concat(dict_x.atoms(), dict_x.basis.cols() + dict_y.basis.cols());
  concat << dict_x.basis, dict_y.basis;
  Eigen::VectorXd target(x.size() + y.size());
  target << x, y;
  const Eigen::MatrixXd gram = concat * concat.transpose();
  const Eigen::VectorXd corr = concat * target;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(concat.rows());
  detail::coordinate_descent(gram, corr, lambda, a);
  return a;
}

JointFit jnnse_fit(const EmbeddingSpace& x, const EmbeddingSpace& y, const SolverConfig& cfg,
                   const IterationObserver& observer) {
  if (x.lexicon() != y.lexicon()) throw DataError("jnnse_fit: lexicons of X and Y differ; intersect first");
  auto fit = detail::fit_blocks({&x.values(), &y.values()}, cfg, observer);
  JointFit out;
  out.model.codes.lexicon = x.lexicon();
  out.model.codes.codes = std::move(fit.codes);
  out.model.codes.lambda = cfg.lambda;
  out.model.dict_x.basis = std::move(fit.dictionaries[0]);
  out.model.dict_y.basis = std::move(fit.dictionaries[1]);
  out.model.lambda = cfg.lambda;
  out.log = std::move(fit.log);
  out.converged = fit.converged;
  return out;
}

}  // namespace nnse
