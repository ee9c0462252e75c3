#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nnse/embedspace.hpp"

namespace nnse {

// Square symmetric concept x concept similarity matrix.
class SimilarityMatrix {
public:
  SimilarityMatrix() = default;
  // Throws DataError unless square, symmetric within `symmetry_tol`, with
  // unique concept names.
  SimilarityMatrix(std::vector<std::string> concepts, Eigen::MatrixXd values, double symmetry_tol = 1e-9);

  const std::vector<std::string>& concepts() const { return concepts_; }
  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::Index size() const { return values_.rows(); }

private:
  std::vector<std::string> concepts_;
  Eigen::MatrixXd values_;
};

// Entry (i, j) is the Pearson correlation of the embedding rows of concepts i and j.
SimilarityMatrix similarity_matrix(const EmbeddingSpace& space, const std::vector<std::string>& concepts);

// Fraction of concept pairs passing the 2 vs. 2 test. Row vectors omit the two
// columns of the pair under test; ties count as failures. Requires N >= 4.
double two_vs_two(const SimilarityMatrix& model, const SimilarityMatrix& brain);

// Spearman over the strict upper triangles, flattened row-major.
double rsa(const SimilarityMatrix& model, const SimilarityMatrix& brain);

// Upper triangle (diagonal excluded) in row-major order.
std::vector<double> upper_triangle(const Eigen::MatrixXd& m);

// csv: header row `,c1,...,cN`, then one labeled row per concept.
SimilarityMatrix parse_brain_matrix(std::string_view text, const std::string& source = "<memory>");
SimilarityMatrix load_brain_matrix(const std::string& path);
std::string serialize_similarity_matrix(const SimilarityMatrix& m);

struct BrainRecording {
  std::string participant;
  std::string modality;  // "fMRI" or "MEG"
  SimilarityMatrix matrix;
};

// JSON manifest: {"recordings": [{"participant": .., "modality": .., "matrix": path}, ..]}
// with matrix paths relative to the manifest's directory.
std::vector<BrainRecording> load_brain_manifest(const std::string& path);

struct BrainScores {
  double two_vs_two = 0.0;
  double rsa = 0.0;
  std::size_t participants = 0;
};

// Per-modality mean of two_vs_two and rsa over participants. The model
// similarity matrix is built over each recording's concepts.
std::map<std::string, BrainScores> evaluate_brain(const EmbeddingSpace& space,
                                                  const std::vector<BrainRecording>& recordings, unsigned threads = 1);

}  // namespace nnse
