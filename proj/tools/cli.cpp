#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <optional>
#include <ostream>

#include "manifest.hpp"
#include "nnse/csv.hpp"
#include "nnse/embedspace.hpp"
#include "nnse/errors.hpp"
#include "nnse/eval_brain.hpp"
#include "nnse/eval_props.hpp"
#include "nnse/eval_sim.hpp"
#include "nnse/io.hpp"
#include "nnse/joint.hpp"
#include "nnse/solver.hpp"

namespace nnse::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct FactorizeOptions {
  std::string input;
  std::string format = "auto";
  std::string out;
  Eigen::Index p = 200;
  double lambda = 0.05;
  std::string restrict_words;
  std::string restrict_norms;
  std::optional<double> target_sparsity;
  bool match_norm_sparsity = false;
  std::size_t min_concepts = 5;
  int max_iters = 200;
  double tol = 1e-6;
};

struct JointOptions {
  std::string x;
  std::string y;
  std::string x_format = "auto";
  std::string y_format = "auto";
  std::string out;
  Eigen::Index p = 200;
  double lambda = 0.025;
  int max_iters = 200;
  double tol = 1e-6;
};

struct FuseOptions {
  std::string text;
  std::string image;
  std::string text_format = "auto";
  std::string image_format = "auto";
  std::string out;
  std::string out_format = "csv";
  double alpha = 0.5;
};

struct EvalInput {
  std::string embeddings;
  std::string format = "auto";
  bool normalize = false;
  std::string out;
};

struct SimOptions {
  EvalInput in;
  std::vector<std::string> benchmarks;
};

struct PropsOptions {
  EvalInput in;
  std::string norms;
  std::string model_name;
  int folds = 5;
  double l2 = 1.0;
  bool unbalanced = false;
  std::size_t min_concepts = 5;
  Eigen::Index top_n = 20;
  std::string contest_dense;
  std::string contest_dense_format = "auto";
  Eigen::Index svd_control = 0;
};

struct BrainOptions {
  EvalInput in;
  std::string manifest;
};

const std::vector<std::string> kFormats{"auto", "word2vec", "csv"};

EmbeddingFormat resolve_format(const std::string& fmt, const std::string& path) {
  if (fmt == "auto") return fs::path(path).extension() == ".csv" ? EmbeddingFormat::csv : EmbeddingFormat::word2vec_text;
  return format_from_string(fmt);
}

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw DataError("cannot create output directory " + dir);
}

void emit(RunManifest& m, const std::string& dir, const std::string& file, const std::string& contents) {
  io::write_file((fs::path(dir) / file).string(), contents);
  m.add_output(dir, file);
}

// Every option of a subcommand with its resolved value; config files and
// defaults both show up here.
json options_json(const CLI::App* app) {
  json j = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    const bool flag = opt->get_expected_max() == 0;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      if (flag)
        j[name] = true;
      else if (r.size() == 1)
        j[name] = r.front();
      else
        j[name] = r;
    } else if (flag) {
      j[name] = false;
    } else {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

json config_for(const CLI::App* sub, const GlobalOptions& g) {
  json j;
  j["seed"] = g.seed;
  j["threads"] = g.threads;
  j["options"] = options_json(sub);
  return j;
}

std::string log_jsonl(const std::vector<IterationRecord>& log) {
  std::string s;
  for (const auto& r : log)
    s += json{{"iteration", r.iteration}, {"objective", r.objective}, {"sparsity", r.sparsity}}.dump() + "\n";
  return s;
}

std::string matrix_csv(const Eigen::MatrixXd& m, const std::string& prefix) {
  std::vector<std::string> lex;
  for (Eigen::Index i = 0; i < m.rows(); ++i) lex.push_back(prefix + std::to_string(i));
  return serialize_embeddings(EmbeddingSpace(std::move(lex), m), EmbeddingFormat::csv);
}

EmbeddingSpace load_input(RunManifest& m, const std::string& path, const std::string& fmt) {
  auto s = load_embeddings(path, resolve_format(fmt, path));
  m.add_input(path);
  return s;
}

EmbeddingSpace restricted(const EmbeddingSpace& x, const std::vector<std::string>& words, const std::string& what,
                          std::ostream& err) {
  auto r = restrict(x, words);
  if (r.covered == 0) throw DataError(what + ": none of the listed words are in the lexicon");
  if (!r.missing.empty())
    err << "warning: " << r.missing.size() << " of " << words.size() << " " << what
        << " words are not in the lexicon\n";
  return r.space;
}

SolverConfig solver_config(double lambda, Eigen::Index p, int max_iters, double tol, const GlobalOptions& g) {
  SolverConfig cfg;
  cfg.lambda = lambda;
  cfg.p = p;
  cfg.max_outer_iters = max_iters;
  cfg.tol = tol;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  return cfg;
}

void cmd_factorize(const FactorizeOptions& o, const GlobalOptions& g, RunManifest& m, std::ostream& out,
                   std::ostream& err) {
  if (o.match_norm_sparsity && o.restrict_norms.empty())
    throw UsageError("--match-norm-sparsity requires --restrict-norms");
  if (o.match_norm_sparsity && o.target_sparsity) throw UsageError("--match-norm-sparsity excludes --target-sparsity");

  EmbeddingSpace x = normalize(load_input(m, o.input, o.format));
  if (!o.restrict_words.empty()) {
    x = restricted(x, load_word_list(o.restrict_words), "restriction", err);
    m.add_input(o.restrict_words);
  }
  std::optional<PropertyNorms> norms;
  if (!o.restrict_norms.empty()) {
    norms = load_property_norms(o.restrict_norms);
    m.add_input(o.restrict_norms);
    x = restricted(x, norms->concepts, "norm concept", err);
  }
  make_dir(o.out);

  SolverConfig cfg = solver_config(o.lambda, o.p, o.max_iters, o.tol, g);
  std::optional<double> target = o.target_sparsity;
  if (o.match_norm_sparsity) {
    const auto filtered = filter_properties(restrict_norms(*norms, x), o.min_concepts);
    if (filtered.empty_warning) throw DataError("no norm property has enough concepts to define a target sparsity");
    target = filtered.norms.sparsity();
  }

  json result;
  if (target) {
    const auto search = tune_lambda(x, cfg, *target);
    cfg.lambda = search.lambda;
    std::string probes;
    for (const auto& pr : search.probes) probes += json{{"lambda", pr.lambda}, {"sparsity", pr.sparsity}}.dump() + "\n";
    emit(m, o.out, "lambda_search.jsonl", probes);
    result["target_sparsity"] = *target;
    result["target_reached"] = search.reached;
    if (!search.reached)
      err << "warning: target sparsity " << io::format_double(*target) << " not reached; closest is "
          << io::format_double(search.achieved_sparsity) << "\n";
  }

  const auto fit = nnse_fit(x, cfg);
  emit(m, o.out, "codes.csv", serialize_embeddings(fit.embedding.to_space(), EmbeddingFormat::csv));
  emit(m, o.out, "dictionary.csv", matrix_csv(fit.dictionary.basis, "atom"));
  emit(m, o.out, "iteration_log.jsonl", log_jsonl(fit.log));

  result["lambda"] = cfg.lambda;
  result["words"] = x.words();
  result["sparsity"] = sparsity(fit.embedding);
  result["iterations"] = fit.log.size();
  result["converged"] = fit.converged;
  result["objective"] = fit.log.empty() ? 0.0 : fit.log.back().objective;
  m.set_result(result);
  out << "factorize: " << x.words() << " words, p=" << cfg.p << ", lambda=" << io::format_double(cfg.lambda)
      << ", sparsity=" << io::format_double(sparsity(fit.embedding)) << ", iterations=" << fit.log.size()
      << (fit.converged ? "" : " (not converged)") << "\n";
}

void cmd_joint(const JointOptions& o, const GlobalOptions& g, RunManifest& m, std::ostream& out) {
  const auto x = normalize(load_input(m, o.x, o.x_format));
  const auto y = normalize(load_input(m, o.y, o.y_format));
  const auto aligned = intersect({x, y});
  make_dir(o.out);
  const auto fit = jnnse_fit(aligned[0], aligned[1], solver_config(o.lambda, o.p, o.max_iters, o.tol, g));
  emit(m, o.out, "codes.csv", serialize_embeddings(fit.model.codes.to_space(), EmbeddingFormat::csv));
  emit(m, o.out, "dict_x.csv", matrix_csv(fit.model.dict_x.basis, "atom"));
  emit(m, o.out, "dict_y.csv", matrix_csv(fit.model.dict_y.basis, "atom"));
  emit(m, o.out, "iteration_log.jsonl", log_jsonl(fit.log));
  const double s = sparsity(fit.model.codes);
  m.set_result({{"lambda", o.lambda},
                {"words", aligned[0].words()},
                {"sparsity", s},
                {"iterations", fit.log.size()},
                {"converged", fit.converged}});
  out << "joint: " << aligned[0].words() << " shared words, p=" << o.p << ", sparsity=" << io::format_double(s)
      << ", iterations=" << fit.log.size() << (fit.converged ? "" : " (not converged)") << "\n";
}

void cmd_fuse(const FuseOptions& o, RunManifest& m, std::ostream& out) {
  const auto t = normalize(load_input(m, o.text, o.text_format));
  const auto i = normalize(load_input(m, o.image, o.image_format));
  const auto aligned = intersect({t, i});
  const auto fused = fuse(aligned[0], aligned[1], FusionConfig{o.alpha});
  make_dir(o.out);
  const auto fmt = format_from_string(o.out_format);
  const std::string file = fmt == EmbeddingFormat::csv ? "embeddings.csv" : "embeddings.txt";
  emit(m, o.out, file, serialize_embeddings(fused, fmt));
  m.set_result({{"words", fused.words()}, {"dims", fused.dims()}});
  out << "fuse: " << fused.words() << " words, " << aligned[0].dims() << " + " << aligned[1].dims() << " = "
      << fused.dims() << " dims\n";
}

EmbeddingSpace load_eval_space(RunManifest& m, const EvalInput& in) {
  auto s = load_input(m, in.embeddings, in.format);
  make_dir(in.out);
  return in.normalize ? normalize(s) : s;
}

void cmd_sim(const SimOptions& o, RunManifest& m, std::ostream& out) {
  const auto space = load_eval_space(m, o.in);
  std::string lines;
  for (const auto& path : o.benchmarks) {
    const auto bench = load_benchmark(path);
    m.add_input(path);
    const auto r = evaluate_benchmark(space, bench);
    lines += json{{"benchmark", bench.name}, {"rho", r.rho}, {"covered", r.covered}, {"total", r.total}}.dump() + "\n";
    out << bench.name << ": rho=" << io::format_double(r.rho) << " (" << r.covered << "/" << r.total << " pairs)\n";
  }
  emit(m, o.in.out, "sim.jsonl", lines);
}

std::string props_row(const std::string& model, const NormsReport& r) {
  std::string row = csv::escape(model);
  for (std::size_t c = 0; c < kPropertyClasses.size(); ++c) {
    row += ",";
    if (r.class_mean[c]) row += io::format_double(*r.class_mean[c] * 100.0);
  }
  return row + "," + io::format_double(r.overall * 100.0) + "\n";
}

std::string props_header() {
  std::string h = "model";
  for (auto c : kPropertyClasses) h += "," + std::string(to_string(c));
  return h + ",overall\n";
}

std::string profile_csv(const Eigen::VectorXd& profile) {
  std::string s = "rank,magnitude\n";
  for (Eigen::Index i = 0; i < profile.size(); ++i) s += std::to_string(i + 1) + "," + io::format_double(profile(i)) + "\n";
  return s;
}

std::vector<Eigen::MatrixXd> coef_sets(const NormsReport& r) {
  std::vector<Eigen::MatrixXd> sets;
  for (const auto& p : r.properties) sets.push_back(p.coef_by_fold);
  return sets;
}

void cmd_props(const PropsOptions& o, const GlobalOptions& g, RunManifest& m, std::ostream& out, std::ostream& err) {
  const auto space = load_eval_space(m, o.in);
  const auto norms = load_property_norms(o.norms);
  m.add_input(o.norms);
  const auto covered = restrict_norms(norms, space);
  const auto filtered = filter_properties(covered, o.min_concepts);
  if (filtered.empty_warning) throw DataError("no property has at least " + std::to_string(o.min_concepts) + " concepts in the lexicon");
  if (filtered.dropped)
    err << "warning: " << filtered.dropped << " properties with fewer than " << o.min_concepts
        << " concepts were dropped\n";

  CvOptions cv;
  cv.folds = o.folds;
  cv.seed = g.seed;
  cv.l2 = o.l2;
  cv.balanced = !o.unbalanced;
  const std::string name = o.model_name.empty() ? fs::path(o.in.embeddings).stem().string() : o.model_name;

  const auto report = evaluate_norms(space, filtered.norms, cv, g.threads);
  std::string table = props_header() + props_row(name, report);
  std::string per_property = "model,property,class,f1\n";
  auto add_properties = [&](const std::string& model, const NormsReport& r) {
    for (const auto& p : r.properties)
      per_property += csv::join({model, p.property, std::string(to_string(p.cls)), io::format_double(p.mean_f1)}) + "\n";
  };
  add_properties(name, report);
  emit(m, o.in.out, "profile.csv", profile_csv(coefficient_profile(coef_sets(report), o.top_n)));
  out << name << ": overall F1 " << io::format_double(report.overall * 100.0) << " over "
      << report.properties.size() << " properties\n";

  json result{{"properties", report.properties.size()}, {"dropped", filtered.dropped}, {"overall", report.overall}};
  if (o.svd_control > 0) {
    const auto reduced = svd_reduce(space, o.svd_control);
    const auto svd_report = evaluate_norms(reduced, filtered.norms, cv, g.threads);
    const std::string svd_name = name + "-svd" + std::to_string(o.svd_control);
    table += props_row(svd_name, svd_report);
    add_properties(svd_name, svd_report);
    emit(m, o.in.out, "profile_svd.csv", profile_csv(coefficient_profile(coef_sets(svd_report), o.top_n)));
    result["svd_overall"] = svd_report.overall;
    out << svd_name << ": overall F1 " << io::format_double(svd_report.overall * 100.0) << "\n";
  }
  if (!o.contest_dense.empty()) {
    const auto dense = load_input(m, o.contest_dense, o.contest_dense_format);
    const auto c = max_correlation_contest(o.in.normalize ? normalize(dense) : dense, space, filtered.norms);
    emit(m, o.in.out, "contest.json",
         json{{"fraction", c.fraction}, {"sparse_wins", c.sparse_wins}, {"valid_properties", c.valid_properties}}
                 .dump(2) +
             "\n");
    result["contest_fraction"] = c.fraction;
    out << "contest: sparse wins " << c.sparse_wins << " of " << c.valid_properties << " properties\n";
  }
  emit(m, o.in.out, "props.csv", table);
  emit(m, o.in.out, "properties.csv", per_property);
  m.set_result(result);
}

void cmd_brain(const BrainOptions& o, const GlobalOptions& g, RunManifest& m, std::ostream& out) {
  const auto space = load_eval_space(m, o.in);
  const auto recordings = load_brain_manifest(o.manifest);
  m.add_input(o.manifest);
  const auto base = fs::path(o.manifest).parent_path();
  const auto index = nlohmann::json::parse(io::read_file(o.manifest));
  for (const auto& r : index.at("recordings")) m.add_input((base / r.at("matrix").get<std::string>()).string());

  std::string lines;
  for (const auto& [modality, s] : evaluate_brain(space, recordings, g.threads)) {
    lines += json{{"modality", modality}, {"two_vs_two", s.two_vs_two}, {"rsa", s.rsa}, {"participants", s.participants}}
                 .dump() +
             "\n";
    out << modality << ": 2v2=" << io::format_double(s.two_vs_two) << " rsa=" << io::format_double(s.rsa) << " ("
        << s.participants << " participants)\n";
  }
  emit(m, o.in.out, "brain.jsonl", lines);
}

int cmd_verify(const std::string& dir, std::ostream& out) {
  int bad = 0;
  for (const auto& c : verify_manifest(dir)) {
    out << (c.ok ? "ok       " : "MISMATCH ") << c.file << "\n";
    bad += !c.ok;
  }
  return bad ? kDataError : kOk;
}

void add_eval_input(CLI::App* sub, EvalInput& in) {
  sub->add_option("--embeddings", in.embeddings, "Embedding file")->required()->check(CLI::ExistingFile);
  sub->add_option("--format", in.format, "Embedding format")->check(CLI::IsMember(kFormats))->capture_default_str();
  sub->add_flag("--normalize", in.normalize, "Centre and unit-normalize rows before evaluating");
  sub->add_option("--out", in.out, "Output directory")->required();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Non-negative sparse embeddings: factorization and evaluation", "nnse"};
  app.set_config("--config", "", "TOML or INI file; command-line flags override it");
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  FactorizeOptions fo;
  auto* fac = app.add_subcommand("factorize", "Normalize, optionally restrict, and factorize one space");
  fac->add_option("--input", fo.input, "Embedding file")->required()->check(CLI::ExistingFile);
  fac->add_option("--format", fo.format, "Input format")->check(CLI::IsMember(kFormats))->capture_default_str();
  fac->add_option("--out", fo.out, "Output directory")->required();
  fac->add_option("--p", fo.p, "Sparse dimensions")->check(CLI::PositiveNumber)->capture_default_str();
  auto* lam = fac->add_option("--lambda", fo.lambda, "L1 weight")->check(CLI::NonNegativeNumber)->capture_default_str();
  fac->add_option("--restrict", fo.restrict_words, "Word list to keep")->check(CLI::ExistingFile);
  fac->add_option("--restrict-norms", fo.restrict_norms, "Keep only the concepts of a norms file")
      ->check(CLI::ExistingFile);
  fac->add_option("--target-sparsity", fo.target_sparsity, "Tune lambda to this fraction of zeros")
      ->check(CLI::Range(0.0, 1.0))
      ->excludes(lam);
  fac->add_flag("--match-norm-sparsity", fo.match_norm_sparsity, "Tune lambda to the sparsity of the norms")
      ->excludes(lam);
  fac->add_option("--min-concepts", fo.min_concepts, "Property filter used by --match-norm-sparsity")
      ->capture_default_str();
  fac->add_option("--max-iters", fo.max_iters, "Outer iterations")->check(CLI::PositiveNumber)->capture_default_str();
  fac->add_option("--tol", fo.tol, "Relative objective change for convergence")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  JointOptions jo;
  auto* joint = app.add_subcommand("joint", "Factorize two spaces over their shared lexicon");
  joint->add_option("--x", jo.x, "First embedding file")->required()->check(CLI::ExistingFile);
  joint->add_option("--y", jo.y, "Second embedding file")->required()->check(CLI::ExistingFile);
  joint->add_option("--x-format", jo.x_format)->check(CLI::IsMember(kFormats))->capture_default_str();
  joint->add_option("--y-format", jo.y_format)->check(CLI::IsMember(kFormats))->capture_default_str();
  joint->add_option("--out", jo.out, "Output directory")->required();
  joint->add_option("--p", jo.p, "Sparse dimensions")->check(CLI::PositiveNumber)->capture_default_str();
  joint->add_option("--lambda", jo.lambda, "L1 weight")->check(CLI::NonNegativeNumber)->capture_default_str();
  joint->add_option("--max-iters", jo.max_iters)->check(CLI::PositiveNumber)->capture_default_str();
  joint->add_option("--tol", jo.tol)->check(CLI::NonNegativeNumber)->capture_default_str();

  FuseOptions uo;
  auto* fu = app.add_subcommand("fuse", "Weighted concatenation of a text and an image space");
  fu->add_option("--text", uo.text, "Text embedding file")->required()->check(CLI::ExistingFile);
  fu->add_option("--image", uo.image, "Image embedding file")->required()->check(CLI::ExistingFile);
  fu->add_option("--text-format", uo.text_format)->check(CLI::IsMember(kFormats))->capture_default_str();
  fu->add_option("--image-format", uo.image_format)->check(CLI::IsMember(kFormats))->capture_default_str();
  fu->add_option("--out", uo.out, "Output directory")->required();
  fu->add_option("--out-format", uo.out_format)->check(CLI::IsMember({"word2vec", "csv"}))->capture_default_str();
  fu->add_option("--alpha", uo.alpha, "Text weight in [0, 1]")->check(CLI::Range(0.0, 1.0))->capture_default_str();

  auto* ev = app.add_subcommand("eval", "Evaluate an embedding space");
  ev->require_subcommand(1);
  SimOptions so;
  auto* sim = ev->add_subcommand("sim", "Word-similarity benchmarks");
  add_eval_input(sim, so.in);
  sim->add_option("--benchmark", so.benchmarks, "Benchmark file (repeatable)")->required()->check(CLI::ExistingFile);

  PropsOptions po;
  auto* props = ev->add_subcommand("props", "Property-norm prediction");
  add_eval_input(props, po.in);
  props->add_option("--norms", po.norms, "concept,property,class csv")->required()->check(CLI::ExistingFile);
  props->add_option("--model-name", po.model_name, "Row label in props.csv");
  props->add_option("--folds", po.folds)->check(CLI::Range(2, 1000))->capture_default_str();
  props->add_option("--l2", po.l2)->check(CLI::NonNegativeNumber)->capture_default_str();
  props->add_flag("--unbalanced", po.unbalanced, "Disable class weighting");
  props->add_option("--min-concepts", po.min_concepts)->capture_default_str();
  props->add_option("--top-n", po.top_n)->check(CLI::PositiveNumber)->capture_default_str();
  props->add_option("--contest-dense", po.contest_dense, "Dense space for the max-correlation contest")
      ->check(CLI::ExistingFile);
  props->add_option("--contest-dense-format", po.contest_dense_format)
      ->check(CLI::IsMember(kFormats))
      ->capture_default_str();
  props->add_option("--svd-control", po.svd_control, "Also evaluate a truncated SVD of this many dimensions")
      ->check(CLI::NonNegativeNumber);

  BrainOptions bo;
  auto* brain = ev->add_subcommand("brain", "2 vs. 2 and RSA against brain similarity matrices");
  add_eval_input(brain, bo.in);
  brain->add_option("--manifest", bo.manifest, "Recording index (JSON)")->required()->check(CLI::ExistingFile);

  std::string verify_dir;
  auto* ver = app.add_subcommand("verify", "Check the digests recorded in an output manifest");
  ver->add_option("--dir", verify_dir, "Output directory")->required()->check(CLI::ExistingDirectory);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  const std::vector<std::string> argv_copy(args.begin(), args.end());
  try {
    if (ver->parsed()) return cmd_verify(verify_dir, out);
    CLI::App* sub = fac->parsed() ? fac : joint->parsed() ? joint : fu->parsed() ? fu : nullptr;
    std::string name = sub ? sub->get_name() : "";
    if (!sub) {
      sub = sim->parsed() ? sim : props->parsed() ? props : brain;
      name = "eval " + sub->get_name();
    }
    RunManifest manifest(name, argv_copy);
    manifest.set_config(config_for(sub, g));
    std::string dir;
    if (sub == fac) {
      cmd_factorize(fo, g, manifest, out, err);
      dir = fo.out;
    } else if (sub == joint) {
      cmd_joint(jo, g, manifest, out);
      dir = jo.out;
    } else if (sub == fu) {
      cmd_fuse(uo, manifest, out);
      dir = uo.out;
    } else if (sub == sim) {
      cmd_sim(so, manifest, out);
      dir = so.in.out;
    } else if (sub == props) {
      cmd_props(po, g, manifest, out, err);
      dir = po.in.out;
    } else {
      cmd_brain(bo, g, manifest, out);
      dir = bo.in.out;
    }
    manifest.write(dir);
    return kOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const nlohmann::json::exception& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace nnse::cli
