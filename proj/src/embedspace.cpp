#include "nnse/embedspace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "nnse/csv.hpp"
#include "nnse/errors.hpp"
#include "nnse/io.hpp"

namespace nnse {

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::text: return "text";
    case Modality::image: return "image";
    case Modality::multimodal: return "multimodal";
    case Modality::sparse: return "sparse";
  }
  return "text";
}

Modality modality_from_string(std::string_view s) {
  if (s == "text") return Modality::text;
  if (s == "image") return Modality::image;
  if (s == "multimodal") return Modality::multimodal;
  if (s == "sparse") return Modality::sparse;
  throw DataError("unknown modality: " + std::string(s));
}

EmbeddingFormat format_from_string(std::string_view s) {
  if (s == "word2vec" || s == "word2vec-text" || s == "txt") return EmbeddingFormat::word2vec_text;
  if (s == "csv") return EmbeddingFormat::csv;
  throw DataError("unknown embedding format: " + std::string(s));
}

EmbeddingSpace::EmbeddingSpace(std::vector<std::string> lexicon, Eigen::MatrixXd values,
                               Modality modality)
    : lexicon_(std::move(lexicon)), values_(std::move(values)), modality_(modality) {
  if (static_cast<Eigen::Index>(lexicon_.size()) != values_.rows()) {
    throw DataError("lexicon size " + std::to_string(lexicon_.size()) + " does not match row count " +
                    std::to_string(values_.rows()));
  }
  if (!values_.allFinite()) throw DataError("embedding contains non-finite values");
  index_.reserve(lexicon_.size());
  for (std::size_t i = 0; i < lexicon_.size(); ++i) {
    if (!index_.emplace(lexicon_[i], static_cast<Eigen::Index>(i)).second) {
      throw DataError("duplicate word in lexicon: " + lexicon_[i]);
    }
  }
}

std::optional<Eigen::Index> EmbeddingSpace::find(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Eigen::Index EmbeddingSpace::index_of(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) throw DataError("word not in lexicon: " + word);
  return it->second;
}

namespace {

struct RowAccumulator {
  std::vector<std::string> words;
  std::vector<double> values;
  std::set<std::string, std::less<>> seen;
  long dims = -1;
  std::size_t dims_line = 0;

  void add(std::string word, const std::vector<double>& row, const std::string& source, std::size_t line) {
    if (dims < 0) {
      dims = static_cast<long>(row.size());
      dims_line = line;
    } else if (static_cast<long>(row.size()) != dims) {
      throw ParseError(source, line,
                       "dimension mismatch: expected " + std::to_string(dims) + " values (from line " +
                           std::to_string(dims_line) + "), found " + std::to_string(row.size()));
    }
    if (!seen.insert(word).second) throw ParseError(source, line, "duplicate word: " + word);
    words.push_back(std::move(word));
    values.insert(values.end(), row.begin(), row.end());
  }

  EmbeddingSpace finish() {
    const Eigen::Index w = static_cast<Eigen::Index>(words.size());
    const Eigen::Index k = dims < 0 ? 0 : dims;
    Eigen::MatrixXd m(w, k);
    for (Eigen::Index i = 0; i < w; ++i)
      for (Eigen::Index j = 0; j < k; ++j) m(i, j) = values[static_cast<std::size_t>(i * k + j)];
    return EmbeddingSpace(std::move(words), std::move(m));
  }
};

double parse_value(std::string_view tok, const std::string& source, std::size_t line) {
  double v = 0;
  if (!io::parse_double(tok, v)) throw ParseError(source, line, "not a number: '" + std::string(tok) + "'");
  if (!std::isfinite(v)) throw ParseError(source, line, "non-finite value: '" + std::string(tok) + "'");
  return v;
}

bool is_count(std::string_view tok) {
  return !tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; });
}

EmbeddingSpace parse_word2vec(std::string_view text, const std::string& source) {
  RowAccumulator acc;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  long header_w = -1;
  long header_k = -1;
  std::vector<double> row;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    auto toks = io::split_whitespace(line);
    if (toks.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    if (line_no == 1 && toks.size() == 2 && is_count(toks[0]) && is_count(toks[1])) {
      header_w = std::stol(std::string(toks[0]));
      header_k = std::stol(std::string(toks[1]));
      continue;
    }
    if (toks.size() < 2) throw ParseError(source, line_no, "expected a word followed by values");
    row.clear();
    for (std::size_t t = 1; t < toks.size(); ++t) row.push_back(parse_value(toks[t], source, line_no));
    acc.add(std::string(toks[0]), row, source, line_no);
    if (nl == text.size()) break;
  }
  if (header_k >= 0 && acc.dims >= 0 && acc.dims != header_k) {
    throw ParseError(source, acc.dims_line,
                     "dimension mismatch: header declares " + std::to_string(header_k) + " dimensions");
  }
  if (header_w >= 0 && static_cast<long>(acc.words.size()) != header_w) {
    throw ParseError(source, 1,
                     "header declares " + std::to_string(header_w) + " words, file has " +
                         std::to_string(acc.words.size()));
  }
  return acc.finish();
}

EmbeddingSpace parse_csv(std::string_view text, const std::string& source) {
  auto records = csv::parse(text, source);
  if (records.empty()) throw ParseError(source, 1, "missing csv header");
  const auto& header = records.front();
  if (header.fields.empty() || header.fields[0] != "word")
    throw ParseError(source, header.line, "csv header must start with 'word'");
  for (std::size_t j = 1; j < header.fields.size(); ++j) {
    if (header.fields[j] != "d" + std::to_string(j - 1))
      throw ParseError(source, header.line, "unexpected csv header column '" + header.fields[j] + "'");
  }
  RowAccumulator acc;
  acc.dims = static_cast<long>(header.fields.size()) - 1;
  acc.dims_line = header.line;
  std::vector<double> row;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    row.clear();
    for (std::size_t j = 1; j < rec.fields.size(); ++j) row.push_back(parse_value(rec.fields[j], source, rec.line));
    acc.add(rec.fields[0], row, source, rec.line);
  }
  return acc.finish();
}

}  // namespace

EmbeddingSpace parse_embeddings(std::string_view text, EmbeddingFormat format, const std::string& source) {
  return format == EmbeddingFormat::csv ? parse_csv(text, source) : parse_word2vec(text, source);
}

EmbeddingSpace load_embeddings(const std::string& path, EmbeddingFormat format) {
  return parse_embeddings(io::read_file(path), format, path);
}

std::string serialize_embeddings(const EmbeddingSpace& space, EmbeddingFormat format) {
  if (space.empty()) throw DataError("refusing to serialize an empty lexicon");
  const auto& m = space.values();
  std::string out;
  if (format == EmbeddingFormat::csv) {
    std::vector<std::string> header{"word"};
    for (Eigen::Index j = 0; j < m.cols(); ++j) header.push_back("d" + std::to_string(j));
    out += csv::join(header);
    out.push_back('\n');
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      out += csv::escape(space.lexicon()[static_cast<std::size_t>(i)]);
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        out.push_back(',');
        out += io::format_double(m(i, j));
      }
      out.push_back('\n');
    }
  } else {
    for (const auto& w : space.lexicon()) {
      if (w.find_first_of(" \t\r\n") != std::string::npos)
        throw DataError("word contains whitespace and cannot be written as word2vec text: '" + w + "'");
    }
    out += std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      out += space.lexicon()[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        out.push_back(' ');
        out += io::format_double(m(i, j));
      }
      out.push_back('\n');
    }
  }
  return out;
}

void save_embeddings(const EmbeddingSpace& space, const std::string& path, EmbeddingFormat format) {
  io::write_file(path, serialize_embeddings(space, format));
}

EmbeddingSpace normalize(const EmbeddingSpace& space) {
  Eigen::MatrixXd m = space.values();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    r.array() -= r.mean();
    const double norm = r.norm();
    // Tolerates round-off from an exactly constant row.
    if (!(norm > 1e-12 * std::max(1.0, space.values().row(i).cwiseAbs().maxCoeff()))) {
      throw DataError("row is constant and cannot be normalized: " + space.lexicon()[static_cast<std::size_t>(i)]);
    }
    r /= norm;
  }
  return EmbeddingSpace(space.lexicon(), std::move(m), space.modality());
}

std::vector<EmbeddingSpace> intersect(const std::vector<EmbeddingSpace>& spaces) {
  if (spaces.empty()) throw DataError("intersect needs at least one space");
  std::vector<std::string> common = spaces.front().lexicon();
  std::sort(common.begin(), common.end());
  for (std::size_t s = 1; s < spaces.size(); ++s) {
    std::vector<std::string> kept;
    for (auto& w : common)
      if (spaces[s].contains(w)) kept.push_back(std::move(w));
    common = std::move(kept);
  }
  if (common.empty()) throw DataError("lexicon intersection is empty");
  std::vector<EmbeddingSpace> out;
  out.reserve(spaces.size());
  for (const auto& s : spaces) out.push_back(restrict(s, common).space);
  return out;
}

EmbeddingSpace fuse(const EmbeddingSpace& text, const EmbeddingSpace& image, const FusionConfig& cfg) {
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) throw DataError("fusion alpha must lie in [0, 1]");
  if (text.lexicon() != image.lexicon()) throw DataError("fuse requires aligned lexicons; intersect first");
  Eigen::MatrixXd m(text.words(), text.dims() + image.dims());
  m.leftCols(text.dims()) = cfg.alpha * text.values();
  m.rightCols(image.dims()) = (1.0 - cfg.alpha) * image.values();
  return EmbeddingSpace(text.lexicon(), std::move(m), Modality::multimodal);
}

EmbeddingSpace svd_reduce(const EmbeddingSpace& space, Eigen::Index target_dim) {
  const Eigen::Index limit = std::min(space.words(), space.dims());
  if (target_dim < 1 || target_dim > limit) {
    throw DataError("svd target dimension " + std::to_string(target_dim) + " outside [1, " +
                    std::to_string(limit) + "]");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(space.values(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd u = svd.matrixU().leftCols(target_dim);
  const Eigen::MatrixXd& v = svd.matrixV();
  for (Eigen::Index c = 0; c < target_dim; ++c) {
    // Sign convention: the largest-magnitude loading of each direction is positive.
    Eigen::Index arg = 0;
    v.col(c).cwiseAbs().maxCoeff(&arg);
    if (v(arg, c) < 0) u.col(c) = -u.col(c);
  }
  Eigen::MatrixXd scores = u * svd.singularValues().head(target_dim).asDiagonal();
  return EmbeddingSpace(space.lexicon(), std::move(scores), space.modality());
}

Restriction restrict(const EmbeddingSpace& space, const std::vector<std::string>& words) {
  std::vector<std::string> kept;
  std::vector<Eigen::Index> rows;
  std::set<std::string, std::less<>> taken;
  Restriction out;
  for (const auto& w : words) {
    auto idx = space.find(w);
    if (!idx) {
      out.missing.push_back(w);
      continue;
    }
    if (!taken.insert(w).second) continue;
    kept.push_back(w);
    rows.push_back(*idx);
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), space.dims());
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = space.values().row(rows[i]);
  out.covered = kept.size();
  out.space = EmbeddingSpace(std::move(kept), std::move(m), space.modality());
  return out;
}

std::vector<std::string> load_word_list(const std::string& path) {
  const std::string text = io::read_file(path);
  std::vector<std::string> words;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    auto toks = io::split_whitespace(std::string_view(text).substr(pos, nl - pos));
    pos = nl + 1;
    if (toks.empty() || toks[0].front() == '#') continue;
    words.emplace_back(toks[0]);
  }
  return words;
}

}  // namespace nnse
