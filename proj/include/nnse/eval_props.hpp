#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nnse/embedspace.hpp"

namespace nnse {

enum class PropertyClass { visual, functional, taxonomic, encyclopedic, other_perceptual };

inline constexpr std::array<PropertyClass, 5> kPropertyClasses{
    PropertyClass::visual, PropertyClass::functional, PropertyClass::taxonomic, PropertyClass::encyclopedic,
    PropertyClass::other_perceptual};

std::string_view to_string(PropertyClass c);
// Accepts the hyphenated names; throws DataError on anything else.
PropertyClass property_class_from_string(std::string_view s);

// Binary concept x property matrix.
struct PropertyNorms {
  std::vector<std::string> concepts;
  std::vector<std::string> properties;
  Eigen::MatrixXi truth;  // concepts x properties, entries in {0, 1}
  std::vector<PropertyClass> class_of;  // one per property

  std::size_t positives(std::size_t property) const;
  // v_P as reals, in concept order.
  std::vector<double> values(std::size_t property) const;
  // Fraction of zero cells.
  double sparsity() const;
};

// csv with columns concept,property,class (header row optional). Repeated
// rows collapse to a single positive cell.
PropertyNorms parse_property_norms(std::string_view text, const std::string& source = "<memory>");
PropertyNorms load_property_norms(const std::string& path);
std::string serialize_property_norms(const PropertyNorms& norms);

// Keeps only the concepts present in the space, preserving norm order.
PropertyNorms restrict_norms(const PropertyNorms& norms, const EmbeddingSpace& space);

struct FilteredNorms {
  PropertyNorms norms;
  std::size_t dropped = 0;
  // Set when no property survived.
  bool empty_warning = false;
};

FilteredNorms filter_properties(const PropertyNorms& norms, std::size_t min_concepts = 5);

struct LogisticModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  double l2 = 1.0;
  int iterations = 0;
  bool converged = false;

  Eigen::VectorXd decision(const Eigen::MatrixXd& features) const;
  std::vector<int> predict(const Eigen::MatrixXd& features) const;
};

// Class-weighted negative log-likelihood plus l2 * ||w||^2 (bias not
// penalized), over parameters theta = [w; bias].
class LogisticObjective {
public:
  LogisticObjective(const Eigen::MatrixXd& features, const std::vector<int>& labels, double l2, bool balanced);

  double value(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const;
  double value_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const;

  Eigen::Index parameters() const { return features_.cols() + 1; }
  const Eigen::VectorXd& sample_weights() const { return sample_weights_; }
  // Weight N / (2 N_c) applied to class c, or 1 when unbalanced.
  double class_weight(int label) const { return label ? weight_pos_ : weight_neg_; }

private:
  Eigen::MatrixXd features_;
  Eigen::VectorXd targets_;
  Eigen::VectorXd sample_weights_;
  double l2_;
  double weight_pos_ = 1.0;
  double weight_neg_ = 1.0;
};

// Full-batch gradient descent with Armijo backtracking; stops when the
// gradient infinity norm drops below 1e-6 or after 5000 iterations.
LogisticModel fit_logistic(const Eigen::MatrixXd& features, const std::vector<int>& labels, double l2 = 1.0,
                           bool balanced = true);

// 2PR / (P + R), 0 when undefined.
double f1_score(const std::vector<int>& predicted, const std::vector<int>& actual);

struct CrossValidation {
  double mean_f1 = 0.0;
  std::vector<double> fold_f1;
  Eigen::MatrixXd coef_by_fold;  // folds x dims
  std::vector<int> fold_of;      // per concept
};

struct CvOptions {
  int folds = 5;
  std::uint64_t seed = 1;
  double l2 = 1.0;
  bool balanced = true;
};

// Stratified k-fold: positives and negatives are shuffled separately and dealt
// round-robin. Every norm concept must be in the space.
CrossValidation cross_validate_property(const EmbeddingSpace& space, const PropertyNorms& norms,
                                        std::size_t property, const CvOptions& opts = {});

struct PropertyScore {
  std::string property;
  PropertyClass cls = PropertyClass::visual;
  double mean_f1 = 0.0;
  Eigen::MatrixXd coef_by_fold;
};

struct NormsReport {
  std::vector<PropertyScore> properties;
  std::array<std::optional<double>, 5> class_mean;
  std::array<std::size_t, 5> class_count{};
  double overall = 0.0;
};

// Class means and the overall mean of already-scored properties.
NormsReport summarize_norms(std::vector<PropertyScore> scores);

NormsReport evaluate_norms(const EmbeddingSpace& space, const PropertyNorms& norms, const CvOptions& opts = {},
                           unsigned threads = 1);

// Per property: fold-average the weights, take magnitudes, sort descending,
// truncate or zero-pad to top_n. Then average element-wise over properties.
Eigen::VectorXd coefficient_profile(const std::vector<Eigen::MatrixXd>& coef_sets, Eigen::Index top_n = 20);

struct ContestResult {
  double fraction = 0.0;
  std::size_t sparse_wins = 0;
  std::size_t valid_properties = 0;
};

// Fraction of properties whose best-correlated sparse column (Spearman)
// strictly beats the best dense column.
ContestResult max_correlation_contest(const EmbeddingSpace& dense, const EmbeddingSpace& sparse,
                                      const PropertyNorms& norms);

}  // namespace nnse
