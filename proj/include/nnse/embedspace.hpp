#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nnse {

enum class Modality { text, image, multimodal, sparse };

std::string_view to_string(Modality m);
Modality modality_from_string(std::string_view s);

enum class EmbeddingFormat { word2vec_text, csv };

EmbeddingFormat format_from_string(std::string_view s);

// Lexicon-aligned dense matrix: row i holds the vector of lexicon()[i].
//
// Construction validates that the lexicon matches the row count, that words
// are unique and that every value is finite; instances are immutable after.
class EmbeddingSpace {
public:
  EmbeddingSpace() = default;
  EmbeddingSpace(std::vector<std::string> lexicon, Eigen::MatrixXd values,
                 Modality modality = Modality::text);

  const std::vector<std::string>& lexicon() const { return lexicon_; }
  const Eigen::MatrixXd& values() const { return values_; }
  Modality modality() const { return modality_; }

  Eigen::Index words() const { return values_.rows(); }
  Eigen::Index dims() const { return values_.cols(); }
  bool empty() const { return lexicon_.empty(); }

  bool contains(const std::string& word) const { return index_.count(word) != 0; }
  std::optional<Eigen::Index> find(const std::string& word) const;
  // Throws DataError when the word is absent.
  Eigen::Index index_of(const std::string& word) const;
  Eigen::RowVectorXd row(const std::string& word) const { return values_.row(index_of(word)); }

private:
  std::vector<std::string> lexicon_;
  Eigen::MatrixXd values_;
  Modality modality_ = Modality::text;
  std::unordered_map<std::string, Eigen::Index> index_;
};

struct FusionConfig {
  double alpha = 0.5;
};

struct Restriction {
  EmbeddingSpace space;
  std::size_t covered = 0;
  std::vector<std::string> missing;
};

EmbeddingSpace load_embeddings(const std::string& path, EmbeddingFormat format);
EmbeddingSpace parse_embeddings(std::string_view text, EmbeddingFormat format,
                                const std::string& source = "<memory>");

void save_embeddings(const EmbeddingSpace& space, const std::string& path, EmbeddingFormat format);
std::string serialize_embeddings(const EmbeddingSpace& space, EmbeddingFormat format);

// Per row: subtract the row mean, then scale to unit L2 norm.
EmbeddingSpace normalize(const EmbeddingSpace& space);

// Restricts every space to the sorted common lexicon.
std::vector<EmbeddingSpace> intersect(const std::vector<EmbeddingSpace>& spaces);

// alpha * text || (1 - alpha) * image; lexicons must already be aligned.
EmbeddingSpace fuse(const EmbeddingSpace& text, const EmbeddingSpace& image, const FusionConfig& cfg);

// Truncated SVD scores U_r * S_r, one column per retained singular direction.
EmbeddingSpace svd_reduce(const EmbeddingSpace& space, Eigen::Index target_dim);

// Keeps requested words that exist, in request order.
Restriction restrict(const EmbeddingSpace& space, const std::vector<std::string>& words);

// One word per line, blank lines and '#' comments skipped.
std::vector<std::string> load_word_list(const std::string& path);

}  // namespace nnse
