// Command-line front end: simulate, rho, rho-star, gap, verify, marginal.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or configuration
// error, 3 resource limit.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "inarlab/inarlab.hpp"

namespace {

using inarlab::io::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

constexpr const char* kOutputDirEnv = "INARLAB_OUTPUT_DIR";

// Options that can also come from a JSON config file. Flags given on the
// command line win over file values.
class Fields {
 public:
  explicit Fields(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& key, T& var, const std::string& help) {
    auto* opt = app_->add_option("--" + key, var, help);
    fields_.push_back({key, opt, [&var](const json& j) { var = j.get<T>(); }, [&var] { return json(var); }});
    return opt;
  }

  void overlay_file(const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw inarlab::invalid_config("cannot read config file '" + path + "'");
    json file;
    try {
      file = json::parse(in);
    } catch (const json::exception& e) {
      throw inarlab::invalid_config("malformed config file '" + path + "': " + e.what());
    }
    if (!file.is_object()) throw inarlab::invalid_config("config file must hold a JSON object");
    for (const auto& [k, v] : file.items()) {
      const Field* f = find(k);
      if (!f) throw inarlab::invalid_config("unknown config field '" + k + "'");
      if (f->opt->count() > 0) continue;
      try {
        f->from(v);
      } catch (const json::exception& e) {
        throw inarlab::invalid_config("config field '" + k + "': " + e.what());
      }
    }
  }

  [[nodiscard]] json effective() const {
    json j = json::object();
    for (const auto& f : fields_) j[f.key] = f.to();
    return j;
  }

 private:
  struct Field {
    std::string key;
    CLI::Option* opt;
    std::function<void(const json&)> from;
    std::function<json()> to;
  };

  [[nodiscard]] const Field* find(const std::string& key) const {
    for (const auto& f : fields_) {
      if (f.key == key) return &f;
    }
    return nullptr;
  }

  CLI::App* app_;
  std::vector<Field> fields_;
};

struct ChainArgs {
  std::string construction = "inar";
  double a = 0.5;
  double lambda = 1.0;
  double p = 0.5;
  std::uint64_t N = 4;
  double p0 = 0.5;
  double budget = inarlab::kDefaultTailBudget;

  void bind(Fields& f, const std::string& constructions) {
    f.add("construction", construction, "Construction: " + constructions);
    f.add("a", a, "Thinning (retention) probability in (0,1)");
    f.add("lambda", lambda, "Poisson innovation mean / death-chain start mean");
    f.add("p", p, "Binomial start probability (death-binomial)");
    f.add("N", N, "Binomial start size (death-binomial)");
    f.add("p0", p0, "P(zeta_0 = 1) (indicator)");
    f.add("budget", budget, "Truncation tail budget");
  }
};

inarlab::MarkovChainSpec build_spec(const ChainArgs& c) {
  using namespace inarlab;
  if (c.construction == "inar" || c.construction == "direct" || c.construction == "superposition") {
    return inar_kernel({c.a, c.lambda}, c.budget);
  }
  if (c.construction == "death-poisson") return poisson_death_chain(c.lambda, c.a, c.budget);
  if (c.construction == "death-binomial") return binomial_death_chain(c.N, c.p, c.a);
  if (c.construction == "indicator") return indicator_chain_spec(c.p0, c.a);
  if (c.construction == "iid") {
    detail::require(c.lambda > 0.0, "iid: lambda must be positive");
    return iid_chain(poisson_pmf(c.lambda, c.budget), {{"lambda", c.lambda}});
  }
  throw CLI::ValidationError("--construction", "unknown construction '" + c.construction + "'");
}

// Prints the document and writes it to `out`, or to $INARLAB_OUTPUT_DIR/<name>.json.
void emit(const json& doc, const std::string& out, const std::string& name) {
  const std::string text = inarlab::io::dump(doc);
  std::cout << text;
  fs::path target;
  if (!out.empty()) {
    target = out;
  } else if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
    target = fs::path(dir) / (name + ".json");
  } else {
    return;
  }
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  std::ofstream os(target, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + target.string());
  os << text;
}

json command_doc(const std::string& command, const json& config) {
  return {{"command", command}, {"config", config}};
}

// --- simulate -------------------------------------------------------------

struct SimulateCmd {
  ChainArgs chain;
  std::size_t length = 100;
  std::size_t paths = 1000;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  std::uint64_t depth = 0;
  std::string out;
  std::string config;
  unsigned threads = inarlab::default_threads();

  void attach(CLI::App* app, Fields& f) {
    chain.construction = "direct";
    chain.bind(f, "direct|superposition|death-poisson|death-binomial|indicator");
    f.add("length", length, "Path length");
    f.add("paths", paths, "Number of paths");
    f.add("seed", seed, "Root seed");
    f.add("stream", stream, "Stream index");
    f.add("depth", depth, "Superposition depth J (0 = smallest meeting the budget)");
    app->add_option("--out", out, "Output directory (default $INARLAB_OUTPUT_DIR or .)");
    app->add_option("--config", config, "JSON config file");
    app->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  }

  int run(const Fields& f) const {
    using namespace inarlab;
    const inarlab::SeedSpec s{seed, stream};
    const SimulationOptions opts{threads, std::max(kDefaultSamplingThreshold, chain.budget)};
    const json cfg = f.effective();
    const std::vector<std::string> extra{"config: " + cfg.dump()};
    fs::path dir = out;
    if (dir.empty()) {
      const char* env = std::getenv(kOutputDirEnv);
      dir = env && *env ? fs::path(env) : fs::path(".");
    }
    fs::create_directories(dir);
    std::vector<std::string> files;
    auto write = [&](const std::string& name, const std::function<void(std::ostream&)>& body) {
      const fs::path p = dir / name;
      std::ofstream os(p, std::ios::binary);
      if (!os) throw std::runtime_error("cannot write " + p.string());
      body(os);
      files.push_back(p.string());
    };
    const std::string& c = chain.construction;
    const InarParams params{chain.a, chain.lambda};
    if (c == "direct" || c == "superposition") {
      DecomposedEnsemble d;
      if (c == "direct") {
        d = simulate_inar_direct(params, length, paths, s, opts);
      } else {
        auto sc = SuperpositionConfig::for_budget(params, chain.budget);
        if (depth > 0) {
          sc.depth = depth;
          sc.warmup = std::max<std::uint64_t>(1, depth - 1);
        }
        d = simulate_inar_superposition(params, sc, length, paths, s, opts);
      }
      write(c + "_paths.csv", [&](std::ostream& os) { write_paths_csv(os, d.x, extra); });
      write(c + "_decomposition.csv", [&](std::ostream& os) { write_decomposition_csv(os, d, extra); });
    } else if (c == "death-poisson" || c == "death-binomial") {
      const auto e = simulate_chain(build_spec(chain), length, paths, s, opts);
      write(c + "_paths.csv", [&](std::ostream& os) { write_paths_csv(os, e, extra); });
    } else if (c == "indicator") {
      const auto e = indicator_chain(chain.p0, chain.a, length, paths, s, opts);
      write(c + "_paths.csv", [&](std::ostream& os) { write_paths_csv(os, e, extra); });
    } else {
      throw CLI::ValidationError("--construction", "unknown construction '" + c + "'");
    }
    json doc = command_doc("simulate", cfg);
    doc["files"] = files;
    std::cout << io::dump(doc);
    return kExitOk;
  }
};

// --- rho ------------------------------------------------------------------

// Cap 0 selects the chain's own cap; smaller explicit caps cannot honour the
// truncation budget.
std::uint64_t resolve_cap(const inarlab::MarkovChainSpec& spec, std::uint64_t cap, double budget) {
  if (cap == 0) return spec.state_cap();
  if (cap < spec.state_cap()) {
    throw inarlab::resource_limit("cap " + std::to_string(cap) + " is below " + std::to_string(spec.state_cap()) +
                                  ", the state cap needed for truncation budget " + inarlab::detail::format_double(budget) +
                                  "; raise --cap or --budget");
  }
  return cap;
}

struct RhoCmd {
  ChainArgs chain;
  std::uint64_t n_max = 6;
  std::uint64_t cap = 0;
  std::string out;
  std::string config;

  void attach(CLI::App* app, Fields& f) {
    chain.bind(f, "inar|direct|superposition|death-poisson|death-binomial|indicator|iid");
    f.add("n_max", n_max, "Largest gap n")->check(CLI::PositiveNumber);
    f.add("cap", cap, "State cap (0 = from the budget)");
    app->add_option("--out", out, "Output JSON file");
    app->add_option("--config", config, "JSON config file");
  }

  int run(const Fields& f) const {
    using namespace inarlab;
    const auto spec = build_spec(chain);
    const std::uint64_t c = resolve_cap(spec, cap, chain.budget);
    json entries = json::array();
    std::vector<std::pair<double, double>> pts;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
      const auto r = rho_markov(spec, n, c);
      entries.push_back({{"n", n}, {"rho", r.value}, {"truncation_error", r.truncation_error}});
      pts.emplace_back(static_cast<double>(n), r.value);
    }
    json doc = command_doc("rho", f.effective());
    doc["construction"] = spec.name();
    doc["params"] = io::to_json(spec.params());
    doc["cap"] = c;
    doc["entries"] = std::move(entries);
    try {
      const auto fit = fit_decay_rate(pts);
      doc["fit"] = {{"rate", fit.rate},
                    {"slope", fit.slope},
                    {"intercept", fit.intercept},
                    {"r_squared", fit.r_squared},
                    {"points_used", fit.points_used}};
    } catch (const insufficient_data& e) {
      doc["fit"] = nullptr;
      doc["fit_note"] = e.what();
    }
    emit(doc, out, "rho");
    return kExitOk;
  }
};

// --- rho-star -------------------------------------------------------------

struct RhoStarCmd {
  ChainArgs chain;
  std::uint64_t width = 4;
  std::uint64_t gap = 1;
  std::uint64_t cap = 0;
  std::uint64_t atom_limit = inarlab::kDefaultAtomLimit;
  std::string out;
  std::string config;
  unsigned threads = inarlab::default_threads();

  void attach(CLI::App* app, Fields& f) {
    chain.construction = "death-poisson";
    chain.bind(f, "inar|death-poisson|death-binomial|indicator|iid");
    f.add("width", width, "Window width W (at most 8)");
    f.add("gap", gap, "Minimum distance n between S and T");
    f.add("cap", cap, "State cap (0 = from the budget)");
    f.add("atom_limit", atom_limit, "Largest window atom count");
    app->add_option("--out", out, "Output JSON file");
    app->add_option("--config", config, "JSON config file");
    app->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  }

  int run(const Fields& f) const {
    using namespace inarlab;
    const auto spec = build_spec(chain);
    const std::uint64_t c = resolve_cap(spec, cap, chain.budget);
    RhoStarOptions opts;
    opts.atom_limit = atom_limit;
    opts.threads = threads;
    RhoStarResult r;
    try {
      r = rho_star_window(spec, width, gap, c, opts);
    } catch (const resource_limit& e) {
      throw resource_limit(std::string(e.what()) + "; reduce --width or --cap, or raise --atom-limit");
    }
    json doc = command_doc("rho-star", f.effective());
    doc["construction"] = spec.name();
    doc["params"] = io::to_json(spec.params());
    doc["cap"] = c;
    doc["result"] = io::to_json(r);
    emit(doc, out, "rho-star");
    return kExitOk;
  }
};

// --- gap ------------------------------------------------------------------

struct GapCmd {
  double a = 0.5;
  double epsilon = 0.5;
  std::string bound = "identity";
  std::string out;
  std::string config;

  void attach(CLI::App* app, Fields& f) {
    f.add("a", a, "Retention probability in (0,1)");
    f.add("epsilon", epsilon, "Target rho* level in (0,1]");
    f.add("bound", bound, "Registered delta bound name");
    app->add_option("--out", out, "Output JSON file");
    app->add_option("--config", config, "JSON config file");
  }

  int run(const Fields& f) const {
    const inarlab::DeltaBoundRegistry registry;
    const auto cert = inarlab::gap_for_epsilon(a, epsilon, registry.find(bound));
    json doc = command_doc("gap", f.effective());
    doc["certificate"] = inarlab::io::to_json(cert);
    emit(doc, out, "gap");
    return kExitOk;
  }
};

// --- marginal -------------------------------------------------------------

struct MarginalCmd {
  ChainArgs chain;
  std::uint64_t j = 0;
  std::string out;
  std::string config;

  void attach(CLI::App* app, Fields& f) {
    chain.bind(f, "inar|death-poisson|death-binomial|indicator|iid");
    f.add("j", j, "Time index");
    app->add_option("--out", out, "Output JSON file");
    app->add_option("--config", config, "JSON config file");
  }

  int run(const Fields& f) const {
    using namespace inarlab;
    const auto spec = build_spec(chain);
    const Pmf m = marginal_at(spec, j);
    json doc = command_doc("marginal", f.effective());
    doc["construction"] = spec.name();
    doc["params"] = io::to_json(spec.params());
    doc["j"] = j;
    doc["pmf"] = io::to_json(m);
    doc["mean"] = m.mean();
    emit(doc, out, "marginal");
    return kExitOk;
  }
};

// --- verify ---------------------------------------------------------------

struct VerifyCmd {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_paths;
  std::optional<double> significance;
  std::optional<std::string> corruption;
  unsigned threads = inarlab::default_threads();
  std::string out;

  void attach(CLI::App* app) {
    app->add_option("config_path,--config", config, "JSON campaign config (defaults apply when absent)");
    app->add_option("--seed", seed, "Override the root seed");
    app->add_option("--n-paths", n_paths, "Override n_paths");
    app->add_option("--significance", significance, "Override the campaign significance");
    app->add_option("--corruption", corruption, "Override the corruption mode (none|innovation|parameter)");
    app->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    app->add_option("--out", out, "Output JSON report file");
  }

  int run() const {
    using namespace inarlab;
    McConfig cfg;
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw invalid_config("cannot read config file '" + config + "'");
      json file;
      try {
        file = json::parse(in);
      } catch (const json::exception& e) {
        throw invalid_config("malformed config file '" + config + "': " + e.what());
      }
      cfg = io::config_from_json(file);
    }
    if (seed) cfg.seed = {*seed, 0};
    if (n_paths) cfg.n_paths = *n_paths;
    if (significance) cfg.significance = *significance;
    if (corruption) cfg.corruption = *corruption;
    cfg.threads = threads;
    const CampaignResult result = run_all(cfg);
    json doc = io::to_json(result);
    emit(doc, out, "verify");
    if (!result.all_pass()) {
      for (const auto& name : result.failed()) std::cerr << "FAILED: " << name << '\n';
      return kExitVerifyFailed;
    }
    return kExitOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"INAR(1) simulation and exact mixing-coefficient laboratory"};
  app.require_subcommand(1);

  SimulateCmd simulate;
  RhoCmd rho;
  RhoStarCmd rho_star;
  GapCmd gap;
  MarginalCmd marginal;
  VerifyCmd verify;

  auto* sim_app = app.add_subcommand("simulate", "Simulate paths and write CSV");
  auto* rho_app = app.add_subcommand("rho", "rho(X_0, X_n) for n = 1..n_max with a fitted decay rate");
  auto* star_app = app.add_subcommand("rho-star", "Exact finite-window interlaced coefficient");
  auto* gap_app = app.add_subcommand("gap", "Gap certificate m(a, epsilon)");
  auto* marg_app = app.add_subcommand("marginal", "Exact marginal law at time j");
  auto* ver_app = app.add_subcommand("verify", "Run the verification campaign");

  Fields sim_fields(sim_app);
  Fields rho_fields(rho_app);
  Fields star_fields(star_app);
  Fields gap_fields(gap_app);
  Fields marg_fields(marg_app);
  simulate.attach(sim_app, sim_fields);
  rho.attach(rho_app, rho_fields);
  rho_star.attach(star_app, star_fields);
  gap.attach(gap_app, gap_fields);
  marginal.attach(marg_app, marg_fields);
  verify.attach(ver_app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim_app->parsed()) {
      sim_fields.overlay_file(simulate.config);
      return simulate.run(sim_fields);
    }
    if (rho_app->parsed()) {
      rho_fields.overlay_file(rho.config);
      return rho.run(rho_fields);
    }
    if (star_app->parsed()) {
      star_fields.overlay_file(rho_star.config);
      return rho_star.run(star_fields);
    }
    if (gap_app->parsed()) {
      gap_fields.overlay_file(gap.config);
      return gap.run(gap_fields);
    }
    if (marg_app->parsed()) {
      marg_fields.overlay_file(marginal.config);
      return marginal.run(marg_fields);
    }
    if (ver_app->parsed()) return verify.run();
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const inarlab::resource_limit& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const inarlab::refuse_to_sample& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitVerifyFailed;
  }
  return kExitUsage;
}
