#include "nnse/eval_sim.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "nnse/correlation.hpp"
#include "nnse/errors.hpp"
#include "nnse/io.hpp"

namespace nnse {

Benchmark parse_benchmark(std::string_view text, const std::string& name, const std::string& source) {
  Benchmark bench;
  bench.name = name;
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    auto toks = io::split_whitespace(line);
    if (toks.empty() || toks[0].front() == '#') continue;
    if (toks.size() != 3) throw ParseError(source, line_no, "expected 'word1 word2 score'");
    WordPair pair{std::string(toks[0]), std::string(toks[1]), 0.0};
    if (!io::parse_double(toks[2], pair.score) || !std::isfinite(pair.score))
      throw ParseError(source, line_no, "invalid score '" + std::string(toks[2]) + "'");
    auto key = pair.first < pair.second ? std::make_pair(pair.first, pair.second)
                                        : std::make_pair(pair.second, pair.first);
    if (!seen.insert(key).second)
      throw ParseError(source, line_no, "duplicate pair " + pair.first + " / " + pair.second);
    bench.pairs.push_back(std::move(pair));
  }
  return bench;
}

Benchmark load_benchmark(const std::string& path) {
  return parse_benchmark(io::read_file(path), std::filesystem::path(path).stem().string(), path);
}

double pair_similarity(const EmbeddingSpace& space, const std::string& w1, const std::string& w2) {
  const auto a = space.values().row(space.index_of(w1));
  const auto b = space.values().row(space.index_of(w2));
  const double denom = a.norm() * b.norm();
  if (denom == 0.0) throw NumericalError("cosine is undefined for a zero vector");
  return std::clamp(a.dot(b) / denom, -1.0, 1.0);
}

BenchmarkResult evaluate_benchmark(const EmbeddingSpace& space, const Benchmark& bench) {
  std::vector<double> model;
  std::vector<double> human;
  for (const auto& pair : bench.pairs) {
    if (!space.contains(pair.first) || !space.contains(pair.second)) continue;
    model.push_back(pair_similarity(space, pair.first, pair.second));
    human.push_back(pair.score);
  }
  BenchmarkResult r;
  r.covered = model.size();
  r.total = bench.pairs.size();
  if (r.covered < 2) {
    throw DataError("benchmark " + bench.name + ": only " + std::to_string(r.covered) +
                    " pairs covered by the lexicon (need >= 2)");
  }
  r.rho = spearman(model, human);
  return r;
}

}  // namespace nnse
