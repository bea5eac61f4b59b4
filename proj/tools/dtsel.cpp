// dtsel: decision-theoretic structure selection for discrete Bayesian networks.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dtsel/dataset.hpp"
#include "dtsel/error.hpp"
#include "dtsel/formats.hpp"
#include "dtsel/network.hpp"
#include "dtsel/scoring.hpp"
#include "dtsel/search.hpp"
#include "dtsel/verify.hpp"

#ifndef DTSEL_VERSION
#define DTSEL_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace dtsel;

namespace {

enum Exit { ok = 0, verify_failed = 1, invalid_input = 2, over_capacity = 3 };

struct PriorFlags {
  double alpha = 1.0;
  std::string scheme = "uniform";
  double fixed_cell = 1.0;

  DirichletPrior prior() const {
    DirichletPrior p;
    p.total_precision = alpha;
    p.scheme = scheme == "fixed" ? PriorScheme::fixed_cell : PriorScheme::uniform_precision;
    p.fixed_cell_value = fixed_cell;
    // Surface a bad value before any data is read.
    (void)p.cell_alpha(2, 1);
    return p;
  }

  Json to_json() const {
    Json j;
    j["alpha"] = alpha;
    j["scheme"] = scheme;
    j["fixed_cell"] = fixed_cell;
    return j;
  }
};

void add_prior_flags(CLI::App* cmd, PriorFlags& f) {
  cmd->add_option("--alpha", f.alpha, "Total prior precision per family (uniform scheme)");
  cmd->add_option("--prior-scheme", f.scheme, "Dirichlet hyperparameter scheme")
      ->check(CLI::IsMember({"uniform", "fixed"}));
  cmd->add_option("--fixed-cell", f.fixed_cell, "Per-cell hyperparameter (fixed scheme)");
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

Json manifest(const std::string& command) {
  Json m;
  m["command"] = command;
  m["inputs"] = Json::object();
  m["prior"] = nullptr;
  m["loss"] = nullptr;
  m["ordering"] = nullptr;
  m["seed"] = nullptr;
  m["version"] = DTSEL_VERSION;
  m["timestamp"] = utc_timestamp();
  return m;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::validation, "cannot write '" + path.string() + "'");
  out << text;
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorKind::validation, "cannot create '" + dir + "': " + ec.message());
  return p;
}

// An ordering is a file holding one comma-separated line, or that line inline.
VariableOrdering read_ordering(const std::string& arg, const std::vector<std::string>& names) {
  std::string line = arg;
  if (fs::is_regular_file(arg)) {
    std::istringstream in(read_text_file(arg));
    line.clear();
    while (line.find_first_not_of(" \t\r") == std::string::npos && std::getline(in, line)) {
    }
  }
  return parse_ordering(line, names);
}

// --loss takes "zero-one", inline JSON, or a path to a JSON file.
Json read_loss(const std::string& arg) {
  if (arg == "zero-one") return Json{{"type", "zero-one"}};
  if (!arg.empty() && arg.front() == '{') {
    try {
      return Json::parse(arg);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::parse, std::string("--loss: ") + e.what());
    }
  }
  return read_json_file(arg);
}

std::vector<VarIndex> parse_name_list(const std::string& list, const CategoricalDataset& data) {
  std::vector<VarIndex> out;
  std::istringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    const auto b = name.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = name.find_last_not_of(" \t");
    out.push_back(data.index_of(name.substr(b, e - b + 1)));
  }
  return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---- score --------------------------------------------------------------

struct ScoreArgs {
  std::string data, dag, out_dir;
  PriorFlags prior;
};

int cmd_score(const ScoreArgs& a) {
  const auto data = load_csv_file(a.data);
  const auto names = variable_names(data);
  const auto dag = load_dag_file(a.dag, names);
  const auto prior = a.prior.prior();
  const auto scores = family_log_marginals(data, dag, prior);

  Json report;
  double total = 0.0;
  Json families = Json::array();
  for (VarIndex v = 0; v < names.size(); ++v) {
    Json f;
    f["child"] = names[v];
    Json ps = Json::array();
    for (VarIndex p : dag.parents(v)) ps.push_back(names[p]);
    f["parents"] = ps;
    f["log_marginal"] = scores[v];
    families.push_back(f);
    total += scores[v];
  }
  report["log_marginal"] = total;
  report["families"] = families;
  std::cout << dump(report);

  if (!a.out_dir.empty()) {
    const auto dir = prepare_out_dir(a.out_dir);
    auto m = manifest("score");
    m["inputs"] = {{"data", a.data}, {"dag", a.dag}};
    m["prior"] = a.prior.to_json();
    write_file(dir / "score.json", dump(report));
    write_file(dir / "manifest.json", dump(m));
  }
  return ok;
}

// ---- learn --------------------------------------------------------------

struct LearnArgs {
  std::string data, ordering, loss = "zero-one", out_dir = ".", format = "dot";
  std::size_t cap = kDefaultParentCap;
  bool serial = false;
  PriorFlags prior;
};

int cmd_learn(const LearnArgs& a) {
  const auto data = load_csv_file(a.data);
  const auto names = variable_names(data);
  const auto prior = a.prior.prior();
  if (a.cap > kMaxParentCap)
    throw Error(ErrorKind::capacity, "--cap may not exceed " + std::to_string(kMaxParentCap));

  LearnConfig config;
  config.ordering = read_ordering(a.ordering, names);
  config.prior = prior;
  config.cap = a.cap;
  config.exec = a.serial ? Execution::serial : Execution::parallel;
  const auto families = families_for(config);
  const Json loss_json = read_loss(a.loss);
  config.loss = parse_loss_spec(loss_json, data, families);

  const auto result = learn(data, config);

  const auto dir = prepare_out_dir(a.out_dir);
  const std::string dot = to_dot(result.dag, names);
  const Json dag_json = dag_to_json(result.dag, names);
  Json diag;
  Json locals = Json::array();
  for (const auto& sel : result.locals) locals.push_back(selection_to_json(sel, names));
  diag["locals"] = locals;
  diag["total_bayes_risk"] = result.total_bayes_risk;

  auto m = manifest("learn");
  m["inputs"] = {{"data", a.data}};
  m["prior"] = a.prior.to_json();
  m["loss"] = loss_json;
  Json ord = Json::array();
  for (VarIndex v : config.ordering.order()) ord.push_back(names[v]);
  m["ordering"] = ord;
  m["cap"] = a.cap;

  write_file(dir / "dag.dot", dot);
  write_file(dir / "dag.json", dump(dag_json));
  write_file(dir / "diagnostics.json", dump(diag));
  write_file(dir / "manifest.json", dump(m));
  std::cout << (a.format == "json" ? dump(dag_json) : dot);
  return ok;
}

// ---- posterior ----------------------------------------------------------

struct PosteriorArgs {
  std::string data, child, candidates;
  std::size_t cap = kDefaultParentCap;
  PriorFlags prior;
};

int cmd_posterior(const PosteriorArgs& a) {
  const auto data = load_csv_file(a.data);
  const auto names = variable_names(data);
  const auto prior = a.prior.prior();
  CandidateParents fam;
  fam.child = data.index_of(a.child);
  fam.candidates = parse_name_list(a.candidates, data);
  for (VarIndex c : fam.candidates)
    if (c == fam.child) throw Error(ErrorKind::validation, "the child cannot be its own candidate");
  if (a.cap > kMaxParentCap || fam.q() > a.cap)
    throw Error(ErrorKind::capacity, std::to_string(fam.q()) + " candidates exceed the cap of " +
                                         std::to_string(std::min(a.cap, kMaxParentCap)));
  const auto lp = local_posterior(data, fam, prior, {}, Execution::parallel, a.cap);
  auto j = posterior_to_json(lp, names);
  double sum = 0.0;
  for (double p : lp.probs) sum += p;
  j["prob_sum"] = sum;
  std::cout << dump(j);
  return ok;
}

// ---- verify -------------------------------------------------------------

struct VerifyArgs {
  VerifyOptions options;
  std::string fault = "none";
};

int cmd_verify(VerifyArgs a) {
  if (a.fault == "linear-rule") a.options.fault = Fault::linear_rule;
  else if (a.fault == "polya") a.options.fault = Fault::polya;
  else if (a.fault == "fold") a.options.fault = Fault::fold;
  if (a.options.trials == 0) std::cerr << "warning: --trials 0, nothing is checked\n";

  const auto report = run_verification(a.options);
  for (const auto& s : report.suites) {
    std::cout << s.name << ": " << (s.trials - s.failures) << "/" << s.trials << " passed\n";
    if (s.failures > 0) std::cout << "  reproduce: " << s.first_failure << "\n";
  }
  std::cout << (report.passed() ? "verify: PASS\n" : "verify: FAIL\n");
  return report.passed() ? ok : verify_failed;
}

// ---- sample -------------------------------------------------------------

struct SampleArgs {
  std::string cpt, dag, out_dir;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
};

int cmd_sample(const SampleArgs& a) {
  auto net = parse_network(read_json_file(a.cpt));
  if (!a.dag.empty()) {
    std::vector<std::string> names;
    for (const auto& v : net.variables) names.push_back(v.name);
    const auto dag = load_dag_file(a.dag, names);
    for (VarIndex v = 0; v < names.size(); ++v) {
      auto want = dag.parents(v);
      auto have = net.dag.parents(v);
      if (std::vector<VarIndex>(want.begin(), want.end()) !=
          std::vector<VarIndex>(have.begin(), have.end()))
        throw Error(ErrorKind::validation,
                    a.dag + ": parents of '" + names[v] + "' differ from the CPT file");
    }
  }
  const auto data = sample_network(net, a.n, a.seed);
  std::ostringstream csv;
  write_csv(csv, data);
  if (a.out_dir.empty()) {
    std::cout << csv.str();
    return ok;
  }
  const auto dir = prepare_out_dir(a.out_dir);
  auto m = manifest("sample");
  m["inputs"] = {{"cpt", a.cpt}, {"dag", a.dag}};
  m["seed"] = a.seed;
  m["n"] = a.n;
  write_file(dir / "data.csv", csv.str());
  write_file(dir / "manifest.json", dump(m));
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decision-theoretic structure selection for discrete Bayesian networks"};
  app.set_version_flag("--version", DTSEL_VERSION);
  app.require_subcommand(1);

  ScoreArgs score;
  auto* sc = app.add_subcommand("score", "Log marginal likelihood of a DAG");
  sc->add_option("--data", score.data, "CSV dataset")->required();
  sc->add_option("--dag", score.dag, "DAG file (DOT or JSON)")->required();
  sc->add_option("--out-dir", score.out_dir, "Also write score.json and manifest.json here");
  add_prior_flags(sc, score.prior);

  LearnArgs lrn;
  auto* lc = app.add_subcommand("learn", "Select a DAG by minimizing posterior expected loss");
  lc->add_option("--data", lrn.data, "CSV dataset")->required();
  lc->add_option("--ordering", lrn.ordering, "Variable ordering: file or comma-separated names")
      ->required();
  lc->add_option("--loss", lrn.loss, "\"zero-one\", inline JSON, or a loss spec file");
  lc->add_option("--cap", lrn.cap, "Maximum candidate parents per child");
  lc->add_option("--out-dir", lrn.out_dir, "Directory for dag.dot, dag.json, diagnostics.json");
  lc->add_option("--format", lrn.format, "DAG format printed to stdout")
      ->check(CLI::IsMember({"dot", "json"}));
  lc->add_flag("--serial", lrn.serial, "Use the serial reference kernels");
  add_prior_flags(lc, lrn.prior);

  PosteriorArgs post;
  auto* pc = app.add_subcommand("posterior", "Posterior over one child's parent-set lattice");
  pc->add_option("--data", post.data, "CSV dataset")->required();
  pc->add_option("--child", post.child, "Child variable")->required();
  pc->add_option("--candidates", post.candidates, "Comma-separated candidate parents")
      ->required();
  pc->add_option("--cap", post.cap, "Maximum candidate parents");
  add_prior_flags(pc, post.prior);

  VerifyArgs ver;
  auto* vc = app.add_subcommand("verify", "Check the shortcuts against brute-force oracles");
  vc->add_option("--trials", ver.options.trials, "Random trials per suite");
  vc->add_option("--seed", ver.options.seed, "Seed");
  vc->add_option("--max-q", ver.options.max_q, "Largest lattice in the linear-rule suite")
      ->check(CLI::Range(1, 12));
  vc->add_option("--max-cases", ver.options.max_cases, "Largest dataset in the urn suite");
  vc->add_option("--fault", ver.fault, "Inject a defect (negative control)")
      ->check(CLI::IsMember({"none", "linear-rule", "polya", "fold"}))
      ->group("");

  SampleArgs smp;
  auto* spc = app.add_subcommand("sample", "Forward-sample a dataset from a network");
  spc->add_option("--cpt", smp.cpt, "Network JSON (parents, states, tables)")->required();
  spc->add_option("--dag", smp.dag, "Optional DAG file checked against the CPT parents");
  spc->add_option("--n", smp.n, "Number of cases");
  spc->add_option("--seed", smp.seed, "Seed");
  spc->add_option("--out-dir", smp.out_dir, "Write data.csv and manifest.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* failed = &app;
    for (auto* sub : app.get_subcommands()) failed = sub;
    std::cerr << failed->help();
    return invalid_input;
  }

  try {
    if (sc->parsed()) return cmd_score(score);
    if (lc->parsed()) return cmd_learn(lrn);
    if (pc->parsed()) return cmd_posterior(post);
    if (vc->parsed()) return cmd_verify(ver);
    if (spc->parsed()) return cmd_sample(smp);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::capacity ? over_capacity : invalid_input;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << "\n";
    return invalid_input;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return invalid_input;
  }
  return invalid_input;
}
