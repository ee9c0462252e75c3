#include "nnse/eval_props.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "nnse/correlation.hpp"
#include "nnse/csv.hpp"
#include "nnse/errors.hpp"
#include "nnse/io.hpp"
#include "nnse/parallel.hpp"
#include "nnse/random.hpp"

namespace nnse {

std::string_view to_string(PropertyClass c) {
  switch (c) {
    case PropertyClass::visual: return "visual";
    case PropertyClass::functional: return "functional";
    case PropertyClass::taxonomic: return "taxonomic";
    case PropertyClass::encyclopedic: return "encyclopedic";
    case PropertyClass::other_perceptual: return "other-perceptual";
  }
  return "visual";
}

PropertyClass property_class_from_string(std::string_view s) {
  for (auto c : kPropertyClasses)
    if (to_string(c) == s) return c;
  throw DataError("unknown property class: '" + std::string(s) + "'");
}

std::size_t PropertyNorms::positives(std::size_t property) const {
  return static_cast<std::size_t>(truth.col(static_cast<Eigen::Index>(property)).sum());
}

std::vector<double> PropertyNorms::values(std::size_t property) const {
  std::vector<double> v(concepts.size());
  for (std::size_t i = 0; i < concepts.size(); ++i)
    v[i] = truth(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(property));
  return v;
}

double PropertyNorms::sparsity() const {
  if (truth.size() == 0) return 1.0;
  return 1.0 - static_cast<double>(truth.sum()) / static_cast<double>(truth.size());
}

PropertyNorms parse_property_norms(std::string_view text, const std::string& source) {
  auto records = csv::parse(text, source);
  PropertyNorms norms;
  std::map<std::string, std::size_t, std::less<>> concept_idx;
  std::map<std::string, std::size_t, std::less<>> prop_idx;
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != 3) throw ParseError(source, rec.line, "expected concept,property,class");
    if (r == 0 && rec.fields[0] == "concept" && rec.fields[1] == "property" && rec.fields[2] == "class") continue;
    PropertyClass cls;
    try {
      cls = property_class_from_string(rec.fields[2]);
    } catch (const DataError& e) {
      throw ParseError(source, rec.line, e.what());
    }
    auto [cit, cnew] = concept_idx.emplace(rec.fields[0], norms.concepts.size());
    if (cnew) norms.concepts.push_back(rec.fields[0]);
    auto [pit, pnew] = prop_idx.emplace(rec.fields[1], norms.properties.size());
    if (pnew) {
      norms.properties.push_back(rec.fields[1]);
      norms.class_of.push_back(cls);
    } else if (norms.class_of[pit->second] != cls) {
      throw ParseError(source, rec.line, "property '" + rec.fields[1] + "' listed under two classes");
    }
    cells.emplace_back(cit->second, pit->second);
  }
  norms.truth = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(norms.concepts.size()),
                                      static_cast<Eigen::Index>(norms.properties.size()));
  for (auto [c, p] : cells) norms.truth(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(p)) = 1;
  return norms;
}

PropertyNorms load_property_norms(const std::string& path) { return parse_property_norms(io::read_file(path), path); }

std::string serialize_property_norms(const PropertyNorms& norms) {
  std::string out = "concept,property,class\n";
  for (std::size_t c = 0; c < norms.concepts.size(); ++c) {
    for (std::size_t p = 0; p < norms.properties.size(); ++p) {
      if (!norms.truth(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(p))) continue;
      out += csv::join({norms.concepts[c], norms.properties[p], std::string(to_string(norms.class_of[p]))});
      out.push_back('\n');
    }
  }
  return out;
}

PropertyNorms restrict_norms(const PropertyNorms& norms, const EmbeddingSpace& space) {
  PropertyNorms out;
  out.properties = norms.properties;
  out.class_of = norms.class_of;
  std::vector<Eigen::Index> rows;
  for (std::size_t c = 0; c < norms.concepts.size(); ++c) {
    if (!space.contains(norms.concepts[c])) continue;
    out.concepts.push_back(norms.concepts[c]);
    rows.push_back(static_cast<Eigen::Index>(c));
  }
  out.truth.resize(static_cast<Eigen::Index>(rows.size()), norms.truth.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.truth.row(static_cast<Eigen::Index>(i)) = norms.truth.row(rows[i]);
  return out;
}

FilteredNorms filter_properties(const PropertyNorms& norms, std::size_t min_concepts) {
  FilteredNorms out;
  out.norms.concepts = norms.concepts;
  std::vector<Eigen::Index> keep;
  for (std::size_t p = 0; p < norms.properties.size(); ++p) {
    if (norms.positives(p) >= min_concepts) {
      keep.push_back(static_cast<Eigen::Index>(p));
      out.norms.properties.push_back(norms.properties[p]);
      out.norms.class_of.push_back(norms.class_of[p]);
    } else {
      ++out.dropped;
    }
  }
  out.norms.truth.resize(norms.truth.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) out.norms.truth.col(static_cast<Eigen::Index>(j)) = norms.truth.col(keep[j]);
  out.empty_warning = keep.empty();
  return out;
}

// ---------------------------------------------------------------------------
// Logistic regression

namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

LogisticObjective::LogisticObjective(const Eigen::MatrixXd& features, const std::vector<int>& labels, double l2,
                                     bool balanced)
    : features_(features), l2_(l2) {
  if (static_cast<Eigen::Index>(labels.size()) != features.rows()) throw DataError("label count does not match rows");
  if (!(l2 >= 0.0)) throw DataError("l2 must be >= 0");
  const auto n = static_cast<double>(labels.size());
  const auto pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  if (std::any_of(labels.begin(), labels.end(), [](int y) { return y != 0 && y != 1; }))
    throw DataError("labels must be 0 or 1");
  if (pos == 0.0 || pos == n) throw DataError("logistic regression needs both classes in the training labels");
  if (balanced) {
    weight_pos_ = n / (2.0 * pos);
    weight_neg_ = n / (2.0 * (n - pos));
  }
  targets_.resize(features.rows());
  sample_weights_.resize(features.rows());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    targets_(static_cast<Eigen::Index>(i)) = labels[i];
    sample_weights_(static_cast<Eigen::Index>(i)) = labels[i] ? weight_pos_ : weight_neg_;
  }
}

double LogisticObjective::value_and_gradient(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
  const Eigen::Index d = features_.cols();
  const auto w = theta.head(d);
  const double b = theta(d);
  const Eigen::VectorXd z = (features_ * w).array() + b;
  double f = 0.0;
  Eigen::VectorXd residual(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    f += sample_weights_(i) * (softplus(z(i)) - targets_(i) * z(i));
    residual(i) = sample_weights_(i) * (sigmoid(z(i)) - targets_(i));
  }
  f += l2_ * w.squaredNorm();
  grad.resize(d + 1);
  grad.head(d) = features_.transpose() * residual + 2.0 * l2_ * w;
  grad(d) = residual.sum();
  return f;
}

double LogisticObjective::value(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd g;
  return value_and_gradient(theta, g);
}

Eigen::VectorXd LogisticObjective::gradient(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd g;
  value_and_gradient(theta, g);
  return g;
}

Eigen::VectorXd LogisticModel::decision(const Eigen::MatrixXd& features) const {
  return (features * weights).array() + bias;
}

std::vector<int> LogisticModel::predict(const Eigen::MatrixXd& features) const {
  const Eigen::VectorXd z = decision(features);
  std::vector<int> out(static_cast<std::size_t>(z.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) out[static_cast<std::size_t>(i)] = z(i) > 0.0 ? 1 : 0;
  return out;
}

LogisticModel fit_logistic(const Eigen::MatrixXd& features, const std::vector<int>& labels, double l2, bool balanced) {
  constexpr int kMaxIters = 5000;
  constexpr double kGradTol = 1e-6;
  constexpr double kArmijo = 1e-4;
  const LogisticObjective obj(features, labels, l2, balanced);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(obj.parameters());
  Eigen::VectorXd grad;
  double f = obj.value_and_gradient(theta, grad);
  double step = 1.0;
  Eigen::VectorXd next, next_grad;
  LogisticModel model;
  model.l2 = l2;
  int it = 0;
  for (; it < kMaxIters; ++it) {
    if (grad.lpNorm<Eigen::Infinity>() < kGradTol) {
      model.converged = true;
      break;
    }
    const double gg = grad.squaredNorm();
    double fn = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      next = theta - step * grad;
      fn = obj.value_and_gradient(next, next_grad);
      if (std::isfinite(fn) && fn <= f - kArmijo * step * gg) break;
      step *= 0.5;
    }
    if (!(fn <= f)) break;  // no descent possible at machine precision
    // Barzilai-Borwein trial step for the next iteration.
    const Eigen::VectorXd s = next - theta;
    const Eigen::VectorXd y = next_grad - grad;
    const double sy = s.dot(y);
    step = sy > 0 ? s.squaredNorm() / sy : step * 2.0;
    theta.swap(next);
    grad.swap(next_grad);
    f = fn;
  }
  if (!theta.allFinite()) throw NumericalError("logistic regression diverged");
  model.iterations = it;
  model.weights = theta.head(features.cols());
  model.bias = theta(features.cols());
  return model;
}

double f1_score(const std::vector<int>& predicted, const std::vector<int>& actual) {
  if (predicted.size() != actual.size()) throw DataError("f1_score: length mismatch");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] && actual[i]) ++tp;
    else if (predicted[i]) ++fp;
    else if (actual[i]) ++fn;
  }
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

// ---------------------------------------------------------------------------
// Cross-validation

namespace {

Eigen::MatrixXd features_for(const EmbeddingSpace& space, const std::vector<std::string>& concepts) {
  Eigen::MatrixXd f(static_cast<Eigen::Index>(concepts.size()), space.dims());
  for (std::size_t i = 0; i < concepts.size(); ++i) f.row(static_cast<Eigen::Index>(i)) = space.values().row(space.index_of(concepts[i]));
  return f;
}

std::vector<int> assign_folds(const std::vector<int>& labels, int folds, std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
  Rng rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  std::vector<int> fold_of(labels.size(), -1);
  std::size_t t = 0;
  for (auto i : pos) fold_of[i] = static_cast<int>(t++ % static_cast<std::size_t>(folds));
  for (auto i : neg) fold_of[i] = static_cast<int>(t++ % static_cast<std::size_t>(folds));
  return fold_of;
}

CrossValidation cross_validate(const Eigen::MatrixXd& features, const std::vector<int>& labels, const CvOptions& opts) {
  if (opts.folds < 2) throw DataError("cross-validation needs at least 2 folds");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives < static_cast<std::size_t>(opts.folds)) {
    throw DataError("cannot stratify: " + std::to_string(positives) + " positives for " +
                    std::to_string(opts.folds) + " folds");
  }
  CrossValidation cv;
  cv.fold_of = assign_folds(labels, opts.folds, opts.seed);
  cv.coef_by_fold.resize(opts.folds, features.cols());
  for (int k = 0; k < opts.folds; ++k) {
    std::vector<Eigen::Index> train, test;
    for (std::size_t i = 0; i < labels.size(); ++i) (cv.fold_of[i] == k ? test : train).push_back(static_cast<Eigen::Index>(i));
    Eigen::MatrixXd xtr(static_cast<Eigen::Index>(train.size()), features.cols());
    Eigen::MatrixXd xte(static_cast<Eigen::Index>(test.size()), features.cols());
    std::vector<int> ytr, yte;
    for (std::size_t r = 0; r < train.size(); ++r) {
      xtr.row(static_cast<Eigen::Index>(r)) = features.row(train[r]);
      ytr.push_back(labels[static_cast<std::size_t>(train[r])]);
    }
    for (std::size_t r = 0; r < test.size(); ++r) {
      xte.row(static_cast<Eigen::Index>(r)) = features.row(test[r]);
      yte.push_back(labels[static_cast<std::size_t>(test[r])]);
    }
    const auto model = fit_logistic(xtr, ytr, opts.l2, opts.balanced);
    cv.fold_f1.push_back(f1_score(model.predict(xte), yte));
    cv.coef_by_fold.row(k) = model.weights.transpose();
  }
  double total = 0.0;
  for (double f : cv.fold_f1) total += f;
  cv.mean_f1 = total / static_cast<double>(cv.fold_f1.size());
  return cv;
}

std::vector<int> labels_for(const PropertyNorms& norms, std::size_t property) {
  std::vector<int> y(norms.concepts.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = norms.truth(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(property));
  return y;
}

}  // namespace

CrossValidation cross_validate_property(const EmbeddingSpace& space, const PropertyNorms& norms, std::size_t property,
                                        const CvOptions& opts) {
  if (property >= norms.properties.size()) throw DataError("property index out of range");
  return cross_validate(features_for(space, norms.concepts), labels_for(norms, property), opts);
}

NormsReport evaluate_norms(const EmbeddingSpace& space, const PropertyNorms& norms, const CvOptions& opts,
                           unsigned threads) {
  if (norms.properties.empty()) throw DataError("no properties to evaluate");
  const Eigen::MatrixXd features = features_for(space, norms.concepts);
  NormsReport report;
  report.properties.resize(norms.properties.size());
  parallel_for(norms.properties.size(), threads, [&](std::size_t p) {
    CvOptions o = opts;
    o.seed = mix_seed(opts.seed, p);
    auto cv = cross_validate(features, labels_for(norms, p), o);
    report.properties[p] = PropertyScore{norms.properties[p], norms.class_of[p], cv.mean_f1, std::move(cv.coef_by_fold)};
  });
  return summarize_norms(std::move(report.properties));
}

NormsReport summarize_norms(std::vector<PropertyScore> scores) {
  if (scores.empty()) throw DataError("no property scores to summarize");
  NormsReport report;
  report.properties = std::move(scores);
  std::array<double, 5> sums{};
  double total = 0.0;
  for (const auto& s : report.properties) {
    const auto c = static_cast<std::size_t>(s.cls);
    sums[c] += s.mean_f1;
    ++report.class_count[c];
    total += s.mean_f1;
  }
  for (std::size_t c = 0; c < 5; ++c)
    if (report.class_count[c]) report.class_mean[c] = sums[c] / static_cast<double>(report.class_count[c]);
  report.overall = total / static_cast<double>(report.properties.size());
  return report;
}

Eigen::VectorXd coefficient_profile(const std::vector<Eigen::MatrixXd>& coef_sets, Eigen::Index top_n) {
  if (coef_sets.empty()) throw DataError("coefficient_profile: no properties supplied");
  if (top_n < 1) throw DataError("coefficient_profile: top_n must be >= 1");
  Eigen::VectorXd profile = Eigen::VectorXd::Zero(top_n);
  for (const auto& folds : coef_sets) {
    if (folds.rows() < 1) throw DataError("coefficient_profile: property without fitted models");
    Eigen::VectorXd mag = folds.colwise().mean().transpose().cwiseAbs();
    std::sort(mag.begin(), mag.end(), std::greater<>());
    const Eigen::Index n = std::min(top_n, mag.size());
    profile.head(n) += mag.head(n);
  }
  return profile / static_cast<double>(coef_sets.size());
}

ContestResult max_correlation_contest(const EmbeddingSpace& dense, const EmbeddingSpace& sparse,
                                      const PropertyNorms& norms) {
  std::vector<std::size_t> keep;
  std::vector<std::string> concepts;
  for (std::size_t c = 0; c < norms.concepts.size(); ++c) {
    if (dense.contains(norms.concepts[c]) && sparse.contains(norms.concepts[c])) {
      keep.push_back(c);
      concepts.push_back(norms.concepts[c]);
    }
  }
  if (concepts.size() < 2) throw DataError("contest: fewer than two norm concepts present in both spaces");

  // Column ranks are computed once; Spearman is Pearson on ranks.
  auto ranked_columns = [&](const EmbeddingSpace& s) {
    const Eigen::MatrixXd f = features_for(s, concepts);
    std::vector<std::vector<double>> cols;
    for (Eigen::Index j = 0; j < f.cols(); ++j) {
      std::vector<double> col(f.rows());
      for (Eigen::Index i = 0; i < f.rows(); ++i) col[static_cast<std::size_t>(i)] = f(i, j);
      cols.push_back(average_ranks(col));
    }
    return cols;
  };
  const auto dense_cols = ranked_columns(dense);
  const auto sparse_cols = ranked_columns(sparse);

  auto best = [](const std::vector<std::vector<double>>& cols, const std::vector<double>& target) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& c : cols) {
      if (std::all_of(c.begin(), c.end(), [&](double v) { return v == c.front(); })) continue;
      m = std::max(m, pearson(c, target));
    }
    return m;
  };

  ContestResult result;
  for (std::size_t p = 0; p < norms.properties.size(); ++p) {
    std::vector<double> v(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i)
      v[i] = norms.truth(static_cast<Eigen::Index>(keep[i]), static_cast<Eigen::Index>(p));
    if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) continue;
    const auto target = average_ranks(v);
    ++result.valid_properties;
    if (best(dense_cols, target) < best(sparse_cols, target)) ++result.sparse_wins;
  }
  if (result.valid_properties == 0) throw DataError("contest: no property varies over the shared concepts");
  result.fraction = static_cast<double>(result.sparse_wins) / static_cast<double>(result.valid_properties);
  return result;
}

}  // namespace nnse
