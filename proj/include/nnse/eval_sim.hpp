#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nnse/embedspace.hpp"

namespace nnse {

struct WordPair {
  std::string first;
  std::string second;
  double score = 0.0;
};

struct Benchmark {
  std::string name;
  std::vector<WordPair> pairs;
};

struct BenchmarkResult {
  double rho = 0.0;
  std::size_t covered = 0;
  std::size_t total = 0;
};

// Lines of `word1 word2 score` separated by tabs or spaces; '#' starts a
// comment line. Duplicate unordered pairs are rejected.
Benchmark parse_benchmark(std::string_view text, const std::string& name, const std::string& source = "<memory>");
Benchmark load_benchmark(const std::string& path);

// Cosine of the two rows.
double pair_similarity(const EmbeddingSpace& space, const std::string& w1, const std::string& w2);

// Spearman between model and human scores over the pairs the lexicon covers.
BenchmarkResult evaluate_benchmark(const EmbeddingSpace& space, const Benchmark& bench);

}  // namespace nnse
