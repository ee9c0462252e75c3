#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "manifest.hpp"
#include "nnse/embedspace.hpp"
#include "nnse/eval_props.hpp"
#include "nnse/io.hpp"
#include "nnse/solver.hpp"
#include "oracles.hpp"
#include "planted.hpp"

using namespace nnse;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "nnse");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("nnse_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

std::string write_space(const TempDir& dir, const std::string& file, const EmbeddingSpace& s) {
  const auto path = dir / file;
  save_embeddings(s, path, fs::path(file).extension() == ".csv" ? EmbeddingFormat::csv : EmbeddingFormat::word2vec_text);
  return path;
}

// Digest from the system tool, independent of the library the CLI links.
std::string system_sha256(const std::string& path) {
  const std::string cmd = "sha256sum '" + path + "'";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[65] = {0};
  const std::size_t n = std::fread(buf, 1, 64, p);
  pclose(p);
  return std::string(buf, n);
}

}  // namespace

TEST_CASE("cli usage errors exit with 1") {
  TempDir dir("usage");
  const auto x = write_space(dir, "x.txt", test_data::random_space(10, 4, 1));
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"transmogrify"}).code == cli::kUsage);
  CHECK(run({"factorize", "--out", dir / "o"}).code == cli::kUsage);
  CHECK(run({"factorize", "--input", dir / "absent.txt", "--out", dir / "o"}).code == cli::kUsage);
  CHECK(run({"factorize", "--input", x, "--out", dir / "o", "--lambda", "0.1", "--target-sparsity", "0.9"}).code ==
        cli::kUsage);
  CHECK(run({"factorize", "--input", x, "--out", dir / "o", "--match-norm-sparsity"}).code == cli::kUsage);
  CHECK(run({"fuse", "--text", x, "--image", x, "--alpha", "1.5", "--out", dir / "o"}).code == cli::kUsage);
  CHECK(run({"fuse", "--text", x, "--image", x, "--alpha", "-0.1", "--out", dir / "o"}).code == cli::kUsage);
  CHECK(run({"eval"}).code == cli::kUsage);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("cli data and numerical errors") {
  TempDir dir("errors");
  const auto x = write_space(dir, "x.txt", test_data::random_space(10, 4, 1));
  const auto y = write_space(dir, "y.txt", EmbeddingSpace(test_data::words(10, "other"), oracle::random_matrix(10, 3, 2)));
  const auto r = run({"joint", "--x", x, "--y", y, "--p", "3", "--out", dir / "j"});
  CHECK(r.code == cli::kDataError);
  CHECK(r.err.find("intersection") != std::string::npos);

  io::write_file(dir / "broken.txt", "a 1 2\nb 1\n");
  CHECK(run({"factorize", "--input", dir / "broken.txt", "--out", dir / "b"}).code == cli::kDataError);

  // A zero vector makes the cosine undefined.
  const auto z = write_space(dir, "z.txt", EmbeddingSpace({"a", "b", "c"}, Eigen::MatrixXd{{1, 0}, {0, 0}, {1, 1}}));
  io::write_file(dir / "bench.txt", "a b 1\na c 2\nb c 3\n");
  CHECK(run({"eval", "sim", "--embeddings", z, "--benchmark", dir / "bench.txt", "--out", dir / "s"}).code ==
        cli::kNumericalError);
}

TEST_CASE("factorize restricted to a 2234-word concept list") {
  TempDir dir("restrict");
  const auto space = test_data::random_space(2400, 6, 11);
  const auto x = write_space(dir, "x.txt", space);
  std::string list = "# concept words\n";
  for (int i = 0; i < 2234; ++i) list += space.lexicon()[static_cast<std::size_t>(2400 - 1 - i)] + "\n";
  list += "not_a_word\n";
  io::write_file(dir / "concepts.txt", list);
  const auto r = run({"factorize", "--input", x, "--restrict", dir / "concepts.txt", "--p", "4", "--max-iters", "3",
                      "--out", dir / "o"});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.err.find("1 of 2235") != std::string::npos);
  const auto codes = load_embeddings(dir / "o/codes.csv", EmbeddingFormat::csv);
  CHECK(codes.words() == 2234);
  CHECK(codes.dims() == 4);
  CHECK(codes.lexicon().front() == space.lexicon().back());
  const auto dict = load_embeddings(dir / "o/dictionary.csv", EmbeddingFormat::csv);
  CHECK(dict.words() == 4);
  CHECK(dict.dims() == 6);
}

TEST_CASE("factorize output round-trips and matches the library fit") {
  TempDir dir("roundtrip");
  const auto space = test_data::random_space(30, 8, 5);
  const auto x = write_space(dir, "x.csv", space);
  REQUIRE(run({"--seed", "9", "factorize", "--input", x, "--p", "5", "--lambda", "0.05", "--out", dir / "o"}).code ==
          cli::kOk);
  SolverConfig cfg;
  cfg.p = 5;
  cfg.seed = 9;
  const auto fit = nnse_fit(normalize(parse_embeddings(io::read_file(x), EmbeddingFormat::csv)), cfg);
  const auto codes = load_embeddings(dir / "o/codes.csv", EmbeddingFormat::csv);
  CHECK((codes.values() - fit.embedding.codes).cwiseAbs().maxCoeff() <= 1e-6);
  const auto dict = load_embeddings(dir / "o/dictionary.csv", EmbeddingFormat::csv);
  CHECK((dict.values() - fit.dictionary.basis).cwiseAbs().maxCoeff() <= 1e-6);

  std::istringstream log(io::read_file(dir / "o/iteration_log.jsonl"));
  std::string line;
  std::size_t n = 0;
  while (std::getline(log, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("objective").get<double>() == fit.log[n].objective);
    ++n;
  }
  CHECK(n == fit.log.size());
}

TEST_CASE("identical runs give byte-identical outputs") {
  TempDir dir("determinism");
  const auto x = write_space(dir, "x.txt", test_data::random_space(40, 10, 3));
  const auto y = write_space(dir, "y.txt", test_data::random_space(40, 7, 4));
  const std::vector<std::vector<std::string>> commands{
      {"factorize", "--input", x, "--p", "6", "--out"},
      {"factorize", "--input", x, "--p", "6", "--target-sparsity", "0.8", "--out"},
      {"joint", "--x", x, "--y", y, "--p", "5", "--out"},
      {"fuse", "--text", x, "--image", y, "--out"},
  };
  for (const auto& cmd : commands) {
    for (const std::string& tag : {"a", "b", "c"}) {
      auto args = cmd;
      args.push_back(dir / tag);
      args.insert(args.begin(), {"--seed", "4", "--threads", tag == "c" ? "3" : "1"});
      REQUIRE(run(args).code == cli::kOk);
    }
    for (const auto& entry : fs::directory_iterator(dir.path / "a")) {
      const auto name = entry.path().filename().string();
      if (name == "manifest.json") continue;
      const auto a = io::read_file(entry.path().string());
      CHECK_MESSAGE(a == io::read_file(dir / ("b/" + name)), cmd.front() << " " << name);
      CHECK_MESSAGE(a == io::read_file(dir / ("c/" + name)), cmd.front() << " " << name << " with 3 threads");
    }
    for (const std::string& tag : {"a", "b", "c"}) fs::remove_all(dir.path / tag);
  }
}

TEST_CASE("manifest digests verify against the system sha256") {
  TempDir dir("manifest");
  const auto x = write_space(dir, "x.txt", test_data::random_space(20, 5, 8));
  REQUIRE(run({"factorize", "--input", x, "--p", "3", "--out", dir / "o"}).code == cli::kOk);
  const auto m = nlohmann::json::parse(io::read_file(dir / "o/manifest.json"));
  CHECK(m.at("command") == "factorize");
  CHECK(m.at("config").at("options").at("p") == "3");
  CHECK(m.at("config").at("seed") == 1);
  CHECK(m.at("inputs").at(0).at("sha256") == system_sha256(x));
  std::set<std::string> files;
  for (const auto& o : m.at("outputs")) {
    const auto f = o.at("file").get<std::string>();
    files.insert(f);
    CHECK(o.at("sha256") == system_sha256(dir / ("o/" + f)));
  }
  CHECK(files == std::set<std::string>{"codes.csv", "dictionary.csv", "iteration_log.jsonl"});
  CHECK(cli::sha256_bytes("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

  CHECK(run({"verify", "--dir", dir / "o"}).code == cli::kOk);
  io::write_file(dir / "o/codes.csv", "tampered\n");
  const auto r = run({"verify", "--dir", dir / "o"});
  CHECK(r.code == cli::kDataError);
  CHECK(r.out.find("MISMATCH codes.csv") != std::string::npos);
}

TEST_CASE("config file values apply unless a flag overrides them") {
  TempDir dir("config");
  const auto x = write_space(dir, "x.txt", test_data::random_space(20, 5, 8));
  io::write_file(dir / "run.toml", "seed = 5\n[factorize]\np = 3\nlambda = 0.2\n");
  REQUIRE(run({"--config", dir / "run.toml", "factorize", "--input", x, "--lambda", "0.1", "--out", dir / "o"}).code ==
          cli::kOk);
  const auto m = nlohmann::json::parse(io::read_file(dir / "o/manifest.json"));
  CHECK(m.at("config").at("seed") == 5);
  CHECK(m.at("config").at("options").at("p") == "3");
  CHECK(m.at("result").at("lambda") == 0.1);
  CHECK(load_embeddings(dir / "o/codes.csv", EmbeddingFormat::csv).dims() == 3);
}

TEST_CASE("joint and fuse outputs") {
  TempDir dir("joint_fuse");
  const auto x = write_space(dir, "x.txt", test_data::random_space(30, 6, 1));
  auto ys = test_data::random_space(35, 4, 2);
  const auto y = write_space(dir, "y.csv", EmbeddingSpace(test_data::words(35, "w"), ys.values()));
  REQUIRE(run({"joint", "--x", x, "--y", y, "--p", "4", "--out", dir / "j"}).code == cli::kOk);
  CHECK(load_embeddings(dir / "j/codes.csv", EmbeddingFormat::csv).words() == 30);
  CHECK(load_embeddings(dir / "j/dict_x.csv", EmbeddingFormat::csv).dims() == 6);
  CHECK(load_embeddings(dir / "j/dict_y.csv", EmbeddingFormat::csv).dims() == 4);
  const auto jm = nlohmann::json::parse(io::read_file(dir / "j/manifest.json"));
  CHECK(jm.at("config").at("options").at("lambda") == "0.025");
  CHECK(jm.at("config").at("options").at("p") == "4");

  REQUIRE(run({"fuse", "--text", x, "--image", y, "--out", dir / "f"}).code == cli::kOk);
  const auto fused = load_embeddings(dir / "f/embeddings.csv", EmbeddingFormat::csv);
  CHECK(fused.dims() == 10);
  CHECK(fused.words() == 30);
  // Halves of unit rows: squared norm 0.25 + 0.25.
  for (Eigen::Index i = 0; i < fused.words(); ++i) CHECK(std::abs(fused.values().row(i).squaredNorm() - 0.5) <= 1e-12);
}

TEST_CASE("eval props on indicator norms writes the class table and profile") {
  TempDir dir("props");
  const auto fx = test_data::indicator_fixture(100, 10, 0.0, 6);
  const auto e = write_space(dir, "codes.csv", fx.space);
  io::write_file(dir / "norms.csv", serialize_property_norms(fx.norms));
  const auto r = run({"eval", "props", "--embeddings", e, "--norms", dir / "norms.csv", "--model-name", "toy",
                      "--svd-control", "4", "--contest-dense", e, "--out", dir / "o"});
  REQUIRE(r.code == cli::kOk);
  std::istringstream table(io::read_file(dir / "o/props.csv"));
  std::string header, row, svd_row;
  std::getline(table, header);
  std::getline(table, row);
  std::getline(table, svd_row);
  CHECK(header == "model,visual,functional,taxonomic,encyclopedic,other-perceptual,overall");
  CHECK(row.rfind("toy,", 0) == 0);
  CHECK(svd_row.rfind("toy-svd4,", 0) == 0);
  double overall = 0;
  REQUIRE(io::parse_double(row.substr(row.rfind(',') + 1), overall));
  CHECK(overall >= 95.0);
  const auto contest = nlohmann::json::parse(io::read_file(dir / "o/contest.json"));
  CHECK(contest.at("fraction") == 0.0);
  CHECK(io::read_file(dir / "o/profile.csv").rfind("rank,magnitude\n1,", 0) == 0);
  CHECK(run({"verify", "--dir", dir / "o"}).code == cli::kOk);
}
