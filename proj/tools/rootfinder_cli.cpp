// rootfinder: command-line front end over the header library.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "rootfinder/rootfinder.hpp"

namespace {

using namespace rootfinder;

constexpr std::uint64_t kDefaultSeed = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t resolve_seed(const std::string& text) {
  if (text == "random") {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-') {
    throw UsageError("--seed expects a non-negative integer or 'random', got '" + text + "'");
  }
  return v;
}

/// Writes to --out when given, else stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  return in;
}

void print_config(const std::string& command, const std::vector<std::pair<std::string, std::string>>& fields) {
  std::cerr << "# " << command;
  for (const auto& [key, value] : fields) std::cerr << ' ' << key << '=' << value;
  std::cerr << '\n';
}

template <class T>
std::string str(const T& v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

struct Flags {
  std::string model = "ua";
  double alpha = 0.0;
  std::uint64_t n = 0;
  std::string seed = std::to_string(kDefaultSeed);
  std::string out;
  std::string estimator = "psi";
  std::size_t k = 1;
  std::string in;
  std::string format = "json";
  std::uint64_t trials = 0;
  std::string config;
  std::string suite;
  std::uint32_t n_max = 0;
  std::string kind;
  unsigned jobs = 1;
  bool allow_large_exact = false;
};

int run_generate(const Flags& f) {
  const ModelSpec model = parse_model(f.model, f.alpha);
  const std::uint64_t seed = resolve_seed(f.seed);
  print_config("generate", {{"model", model_label(model)}, {"n", str(f.n)}, {"seed", str(seed)}});
  RngStream rng(seed);
  const GrowthTree tree = sample_tree(model, f.n, rng);
  Output out(f.out);
  write_growth_tree(out.stream(), tree);
  return 0;
}

int run_score(const Flags& f) {
  const Estimator estimator = parse_estimator(f.estimator);
  auto in = open_input(f.in);
  const LabeledShape parsed = read_edge_list(in);
  print_config("score", {{"estimator", str(to_string(estimator))}, {"k", str(f.k)}, {"in", f.in}, {"format", f.format}});
  const ScoreVector scores = compute_scores(parsed.shape, estimator);
  const ConfidenceSet set = select_smallest(parsed.shape, scores, f.k);
  Output out(f.out);
  if (f.format == "json") {
    nlohmann::ordered_json doc;
    doc["estimator"] = to_string(estimator);
    doc["n"] = parsed.shape.size();
    doc["k"] = f.k;
    doc["vertices"] = nlohmann::json::array();
    doc["scores"] = nlohmann::json::array();
    for (Vertex v : set.vertices) {
      doc["vertices"].push_back(parsed.labels[v]);
      doc["scores"].push_back(scores[v]);
    }
    out.stream() << doc.dump() << '\n';
  } else {
    out.stream() << "vertex,score\n" << std::setprecision(17);
    for (Vertex v : set.vertices) out.stream() << parsed.labels[v] << ',' << scores[v] << '\n';
  }
  return 0;
}

int run_experiment(const Flags& f) {
  ExperimentConfig c;
  c.model = parse_model(f.model, f.alpha);
  c.estimator = parse_estimator(f.estimator);
  if (f.n > std::numeric_limits<std::uint32_t>::max()) throw UsageError("--n is too large");
  c.n = static_cast<std::uint32_t>(f.n);
  c.k = f.k;
  c.trials = f.trials;
  c.seed = resolve_seed(f.seed);
  c.allow_large_exact = f.allow_large_exact;
  print_config("experiment", {{"model", model_label(c.model)},
                              {"estimator", str(to_string(c.estimator))},
                              {"n", str(c.n)},
                              {"k", str(c.k)},
                              {"trials", str(c.trials)},
                              {"seed", str(c.seed)},
                              {"jobs", str(f.jobs)}});
  const ExperimentResult r = run_trials(c, f.jobs);
  Output out(f.out);
  out.stream() << kResultCsvHeader << '\n';
  write_result_row(out.stream(), c, r);
  return 0;
}

int run_sweep(const Flags& f) {
  auto in = open_input(f.config);
  const auto grid = parse_sweep_grid(in);
  print_config("sweep", {{"config", f.config}, {"cells", str(grid.size())}, {"seed", str(grid.front().seed)},
                         {"jobs", str(f.jobs)}});
  const auto rows = sweep(grid, f.jobs);
  Output out(f.out);
  out.stream() << kResultCsvHeader << '\n';
  for (const auto& row : rows) write_result_row(out.stream(), row.config, row.result);
  return 0;
}

int run_verify(const Flags& f) {
  const std::uint64_t seed = resolve_seed(f.seed);
  print_config("verify", {{"suite", f.suite}, {"n-max", f.n_max ? str(f.n_max) : "default"}, {"seed", str(seed)}});
  const auto lines = verify::run_suite(f.suite, f.n_max, seed);
  Output out(f.out);
  for (const auto& line : lines) out.stream() << verify::format(line) << '\n';
  return verify::all_passed(lines) ? 0 : 1;
}

int run_enumerate(const Flags& f) {
  print_config("enumerate", {{"kind", f.kind}, {"n", str(f.n)}});
  if (f.n > 9) throw UsageError("--n must be at most 9 for enumeration");
  const auto n = static_cast<std::uint32_t>(f.n);
  Output out(f.out);
  std::uint64_t count = 0;
  if (f.kind == "recursive") {
    out.stream() << "# parent[2..n]\n";
    oracle::enumerate_recursive(n, [&](const GrowthTree& t) {
      for (Vertex i = 2; i <= t.size(); ++i) out.stream() << (i > 2 ? " " : "") << t.parent(i);
      out.stream() << '\n';
      ++count;
    });
  } else {
    out.stream() << "# vertex:ordered children\n";
    oracle::enumerate_plane_recursive(n, [&](const oracle::PlaneRecursiveTree& t) {
      bool first = true;
      for (Vertex v = 1; v < t.children.size(); ++v) {
        if (t.children[v].empty()) continue;
        out.stream() << (first ? "" : " ") << v << ':';
        for (std::size_t i = 0; i < t.children[v].size(); ++i) out.stream() << (i ? "," : "") << t.children[v][i];
        first = false;
      }
      out.stream() << '\n';
      ++count;
    });
  }
  out.stream() << "# total " << count << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Root finding in random growth trees"};
  app.require_subcommand(1);
  Flags f;

  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", f.seed, "integer seed, or 'random'")->capture_default_str();
  };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", f.out, "output file (default: stdout)"); };
  auto add_jobs = [&](CLI::App* sub) {
    sub->add_option("--jobs", f.jobs, "worker threads")
        ->envname("ROOTFINDER_JOBS")
        ->check(CLI::Range(1u, 4096u))
        ->capture_default_str();
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", f.model, "ua | pa | alpha")->check(CLI::IsMember({"ua", "pa", "alpha"}));
    sub->add_option("--alpha", f.alpha, "exponent for --model alpha");
  };
  const auto estimators = CLI::IsMember({"psi", "phi", "zeta", "xi"});

  auto* generate = app.add_subcommand("generate", "sample a growth tree");
  add_model(generate);
  generate->add_option("--n", f.n, "vertex count")->required()->check(CLI::Range(std::uint64_t{2}, std::uint64_t{4294967295u}));
  add_seed(generate);
  add_out(generate);

  auto* score = app.add_subcommand("score", "confidence set for the first vertex of an edge list");
  score->add_option("--estimator", f.estimator, "psi | phi | zeta | xi")->check(estimators)->capture_default_str();
  score->add_option("--k", f.k, "confidence set size")->check(CLI::PositiveNumber)->capture_default_str();
  score->add_option("--in", f.in, "edge list file")->required();
  score->add_option("--format", f.format, "json | csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  add_out(score);

  auto* experiment = app.add_subcommand("experiment", "Monte Carlo success rate of one cell");
  add_model(experiment);
  experiment->add_option("--estimator", f.estimator, "psi | phi | zeta | xi")->check(estimators)->required();
  experiment->add_option("--n", f.n, "tree size")->required();
  experiment->add_option("--k", f.k, "confidence set size")->required();
  experiment->add_option("--trials", f.trials, "number of trees")->required();
  experiment->add_flag("--allow-large-exact", f.allow_large_exact, "lift the size cap on zeta/xi cells");
  add_seed(experiment);
  add_jobs(experiment);
  add_out(experiment);

  auto* sweep_cmd = app.add_subcommand("sweep", "run a grid of experiment cells");
  sweep_cmd->add_option("--config", f.config, "key=value grid file")->required();
  add_jobs(sweep_cmd);
  add_out(sweep_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "run an exact or Monte Carlo self-check suite");
  verify_cmd->add_option("--suite", f.suite, "counting | plane-counting | posterior | partitions | gamma | product-tail")
      ->required()
      ->check(CLI::IsMember({"counting", "plane-counting", "posterior", "partitions", "gamma", "product-tail"}));
  verify_cmd->add_option("--n-max", f.n_max, "largest n (or s) checked; suite default if omitted");
  add_seed(verify_cmd);
  add_out(verify_cmd);

  auto* enumerate = app.add_subcommand("enumerate", "list every recursive or plane-oriented tree");
  enumerate->add_option("--kind", f.kind, "recursive | plane")->required()->check(CLI::IsMember({"recursive", "plane"}));
  enumerate->add_option("--n", f.n, "vertex count")->required();
  add_out(enumerate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*generate) return run_generate(f);
    if (*score) return run_score(f);
    if (*experiment) return run_experiment(f);
    if (*sweep_cmd) return run_sweep(f);
    if (*verify_cmd) return run_verify(f);
    if (*enumerate) return run_enumerate(f);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const rootfinder::Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return 2;
  }
  return 2;
}
