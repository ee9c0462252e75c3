#include "nnse/eval_brain.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <set>

#include "nnse/correlation.hpp"
#include "nnse/csv.hpp"
#include "nnse/errors.hpp"
#include "nnse/io.hpp"
#include "nnse/parallel.hpp"

namespace nnse {

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> concepts, Eigen::MatrixXd values, double symmetry_tol)
    : concepts_(std::move(concepts)), values_(std::move(values)) {
  if (values_.rows() != values_.cols()) throw DataError("similarity matrix is not square");
  if (static_cast<Eigen::Index>(concepts_.size()) != values_.rows())
    throw DataError("similarity matrix concept count does not match its size");
  if (!values_.allFinite()) throw DataError("similarity matrix contains non-finite values");
  std::set<std::string> seen(concepts_.begin(), concepts_.end());
  if (seen.size() != concepts_.size()) throw DataError("similarity matrix has duplicate concept names");
  for (Eigen::Index i = 0; i < values_.rows(); ++i)
    for (Eigen::Index j = i + 1; j < values_.cols(); ++j)
      if (std::abs(values_(i, j) - values_(j, i)) > symmetry_tol)
        throw DataError("similarity matrix is not symmetric at (" + concepts_[static_cast<std::size_t>(i)] + ", " +
                        concepts_[static_cast<std::size_t>(j)] + ")");
}

SimilarityMatrix similarity_matrix(const EmbeddingSpace& space, const std::vector<std::string>& concepts) {
  const auto n = static_cast<Eigen::Index>(concepts.size());
  Eigen::MatrixXd rows(n, space.dims());
  for (Eigen::Index i = 0; i < n; ++i) rows.row(i) = space.values().row(space.index_of(concepts[static_cast<std::size_t>(i)]));
  // Center and scale each row once; the correlation is then a dot product.
  for (Eigen::Index i = 0; i < n; ++i) {
    rows.row(i).array() -= rows.row(i).mean();
    const double norm = rows.row(i).norm();
    if (norm == 0.0) throw NumericalError("constant embedding row for concept " + concepts[static_cast<std::size_t>(i)]);
    rows.row(i) /= norm;
  }
  Eigen::MatrixXd m = rows * rows.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::clamp(0.5 * (m(i, j) + m(j, i)), -1.0, 1.0);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return SimilarityMatrix(concepts, std::move(m));
}

namespace {

void require_matched(const SimilarityMatrix& a, const SimilarityMatrix& b) {
  if (a.concepts() != b.concepts()) throw DataError("similarity matrices cover different concepts or orderings");
}

}  // namespace

double two_vs_two(const SimilarityMatrix& model, const SimilarityMatrix& brain) {
  require_matched(model, brain);
  const Eigen::Index n = model.size();
  if (n < 4) throw DataError("2 vs. 2 test needs at least 4 concepts");
  const auto& md = model.values();
  const auto& mb = brain.values();
  const auto len = static_cast<std::size_t>(n - 2);
  std::vector<double> d1(len), d2(len), b1(len), b2(len);
  std::size_t positive = 0;
  std::size_t total = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      std::size_t t = 0;
      for (Eigen::Index c = 0; c < n; ++c) {
        if (c == i || c == j) continue;
        d1[t] = md(i, c);
        d2[t] = md(j, c);
        b1[t] = mb(i, c);
        b2[t] = mb(j, c);
        ++t;
      }
      const double matched = pearson(d1, b1) + pearson(d2, b2);
      const double crossed = pearson(d1, b2) + pearson(d2, b1);
      if (matched > crossed) ++positive;
      ++total;
    }
  }
  return static_cast<double>(positive) / static_cast<double>(total);
}

std::vector<double> upper_triangle(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.rows() * (m.rows() - 1) / 2));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

double rsa(const SimilarityMatrix& model, const SimilarityMatrix& brain) {
  require_matched(model, brain);
  if (model.size() < 3) throw DataError("RSA needs at least 3 concepts");
  return spearman(upper_triangle(model.values()), upper_triangle(brain.values()));
}

SimilarityMatrix parse_brain_matrix(std::string_view text, const std::string& source) {
  auto records = csv::parse(text, source);
  if (records.empty()) throw ParseError(source, 1, "empty brain matrix file");
  const auto& header = records.front();
  std::vector<std::string> concepts(header.fields.begin() + (header.fields.empty() ? 0 : 1), header.fields.end());
  const auto n = static_cast<Eigen::Index>(concepts.size());
  if (static_cast<Eigen::Index>(records.size()) - 1 != n)
    throw DataError(source + ": matrix is not square (" + std::to_string(records.size() - 1) + " rows, " +
                    std::to_string(n) + " columns)");
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& rec = records[static_cast<std::size_t>(i + 1)];
    if (static_cast<Eigen::Index>(rec.fields.size()) != n + 1)
      throw ParseError(source, rec.line, "expected " + std::to_string(n + 1) + " fields");
    if (rec.fields[0] != concepts[static_cast<std::size_t>(i)])
      throw ParseError(source, rec.line,
                       "row label '" + rec.fields[0] + "' does not match column '" + concepts[static_cast<std::size_t>(i)] + "'");
    for (Eigen::Index j = 0; j < n; ++j) {
      double v = 0;
      if (!io::parse_double(rec.fields[static_cast<std::size_t>(j + 1)], v) || !std::isfinite(v))
        throw ParseError(source, rec.line, "invalid value '" + rec.fields[static_cast<std::size_t>(j + 1)] + "'");
      m(i, j) = v;
    }
  }
  try {
    return SimilarityMatrix(std::move(concepts), std::move(m), 1e-6);
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
}

SimilarityMatrix load_brain_matrix(const std::string& path) { return parse_brain_matrix(io::read_file(path), path); }

std::string serialize_similarity_matrix(const SimilarityMatrix& m) {
  std::vector<std::string> header{""};
  header.insert(header.end(), m.concepts().begin(), m.concepts().end());
  std::string out = csv::join(header) + "\n";
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    out += csv::escape(m.concepts()[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < m.size(); ++j) {
      out.push_back(',');
      out += io::format_double(m.values()(i, j));
    }
    out.push_back('\n');
  }
  return out;
}

std::vector<BrainRecording> load_brain_manifest(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": invalid JSON: " + e.what());
  }
  const auto base = std::filesystem::path(path).parent_path();
  std::vector<BrainRecording> out;
  if (!doc.contains("recordings") || !doc["recordings"].is_array())
    throw DataError(path + ": manifest needs a 'recordings' array");
  for (const auto& r : doc["recordings"]) {
    if (!r.contains("participant") || !r.contains("modality") || !r.contains("matrix"))
      throw DataError(path + ": each recording needs participant, modality and matrix");
    const std::string modality = r["modality"].get<std::string>();
    if (modality != "fMRI" && modality != "MEG") throw DataError(path + ": unknown modality '" + modality + "'");
    auto mpath = std::filesystem::path(r["matrix"].get<std::string>());
    if (mpath.is_relative()) mpath = base / mpath;
    out.push_back({r["participant"].get<std::string>(), modality, load_brain_matrix(mpath.string())});
  }
  if (out.empty()) throw DataError(path + ": manifest lists no recordings");
  return out;
}

std::map<std::string, BrainScores> evaluate_brain(const EmbeddingSpace& space,
                                                  const std::vector<BrainRecording>& recordings, unsigned threads) {
  if (recordings.empty()) throw DataError("no brain recordings supplied");
  std::vector<std::pair<double, double>> scores(recordings.size());
  parallel_for(recordings.size(), threads, [&](std::size_t r) {
    const auto& rec = recordings[r];
    const auto model = similarity_matrix(space, rec.matrix.concepts());
    scores[r] = {two_vs_two(model, rec.matrix), rsa(model, rec.matrix)};
  });
  std::map<std::string, BrainScores> out;
  for (std::size_t r = 0; r < recordings.size(); ++r) {
    auto& s = out[recordings[r].modality];
    s.two_vs_two += scores[r].first;
    s.rsa += scores[r].second;
    ++s.participants;
  }
  for (auto& [_, s] : out) {
    s.two_vs_two /= static_cast<double>(s.participants);
    s.rsa /= static_cast<double>(s.participants);
  }
  return out;
}

}  // namespace nnse
