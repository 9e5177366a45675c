// Command-line harness: sample, dirichlet, blr, check, stepsize.
// Exit codes: 0 success, 1 property-check failures, 2 config or IO errors.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mapla/checks.hpp"
#include "mapla/config.hpp"
#include "mapla/diagnostics.hpp"
#include "mapla/errors.hpp"
#include "mapla/experiments.hpp"
#include "mapla/io.hpp"
#include "mapla/stepsize.hpp"

#ifndef MAPLA_VERSION
#define MAPLA_VERSION "dev"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mapla;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;

// ---- option <-> JSON binding ------------------------------------------------
//
// Each subcommand option is mirrored by a snake_case key in its JSON config.
// Explicit flags win over the file; the manifest echoes the merged values.

struct Binding {
  std::string key;
  CLI::Option* option;
  std::function<void(const JsonView&)> load;
  std::function<json()> dump;
};

class Options {
 public:
  explicit Options(CLI::App* app) : app_(app) {}

  template <typename T>
  void add(const std::string& key, T& ref, const std::string& help) {
    std::string flag = "--" + key;
    for (auto& c : flag) c = c == '_' ? '-' : c;
    CLI::Option* opt = app_->add_option(flag, ref, help)->capture_default_str();
    bindings_.push_back(Binding{key, opt, [&ref](const JsonView& v) { read(v, ref); },
                                [&ref] { return json(ref); }});
  }

  void add_config_flag() {
    app_->add_option("--config", config_path_, "JSON config or manifest; flags override it");
  }

  void add_out_flag() { app_->add_option("--out", out_dir_, "Output directory")->capture_default_str(); }

  /// Fills unset options from the config file, if any.
  void merge() {
    if (config_path_.empty()) return;
    doc_ = JsonDoc::load(config_path_);
    const JsonView root = config_root(*doc_);
    std::vector<std::string> keys;
    for (const auto& b : bindings_) keys.push_back(b.key);
    root.only_keys(keys);
    for (const auto& b : bindings_) {
      if (b.option->count() == 0 && root.has(b.key)) b.load(root.at(b.key));
    }
  }

  json echo() const {
    json j = json::object();
    for (const auto& b : bindings_) j[b.key] = b.dump();
    return j;
  }

  const fs::path& out_dir() const { return out_dir_; }

 private:
  CLI::App* app_;
  std::vector<Binding> bindings_;
  std::string config_path_;
  fs::path out_dir_ = ".";
  std::optional<JsonDoc> doc_;

  static void read(const JsonView& v, double& out) { out = v.number(); }
  static void read(const JsonView& v, long& out) { out = v.integer(); }
  static void read(const JsonView& v, std::string& out) { out = v.string(); }
  static void read(const JsonView& v, std::vector<double>& out) {
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(v.at(i).number());
  }
  static void read(const JsonView& v, std::vector<long>& out) {
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(v.at(i).integer());
  }
  static void read(const JsonView& v, std::vector<std::string>& out) {
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(v.at(i).string());
  }
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

/// %g with enough digits to tell grid values apart; used in file names only.
std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

class Manifest {
 public:
  Manifest(std::string command, json config)
      : start_(std::chrono::steady_clock::now()) {
    j_["command"] = std::move(command);
    j_["version"] = MAPLA_VERSION;
    j_["config"] = std::move(config);
    j_["outputs"] = json::array();
  }

  void output(const fs::path& p) { j_["outputs"].push_back(p.filename().string()); }
  json& operator[](const std::string& key) { return j_[key]; }

  void write(const fs::path& dir) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    j_["wall_clock_seconds"] = secs;
    write_json(dir / "manifest.json", j_);
  }

 private:
  json j_;
  std::chrono::steady_clock::time_point start_;
};

unsigned to_workers(long w) {
  require(w >= 1, "workers must be >= 1");
  return static_cast<unsigned>(w);
}

std::vector<Algorithm> to_algorithms(const std::vector<std::string>& names) {
  require(!names.empty(), "need at least one algorithm");
  std::vector<Algorithm> out;
  for (const auto& n : names) out.push_back(parse_algorithm(n));
  return out;
}

// ---- sample -------------------------------------------------------------------

/// Replaces {"file": ...} bodies with their contents so a manifest is self-contained.
json inline_body(const json& body, const fs::path& base_dir) {
  if (body.is_object() && body.contains("file") && body["file"].is_string()) {
    const fs::path path = base_dir / body["file"].get<std::string>();
    const JsonDoc sub = JsonDoc::load(path);
    return inline_body(sub.root(), path.parent_path());
  }
  return body;
}

struct SampleCli {
  std::string config_path;
  fs::path out_dir = ".";
  std::optional<long> seed, n_chains, n_iters, record_every, workers;
  std::optional<double> step_size;
};

int cmd_sample(const SampleCli& cli) {
  const JsonDoc doc = JsonDoc::load(cli.config_path);
  const fs::path base_dir = fs::path(cli.config_path).parent_path();
  SampleSettings s = parse_sample_config(doc, base_dir);

  json echo = config_root(doc).value();
  echo["body"] = inline_body(echo["body"], base_dir);
  if (cli.seed) {
    require(*cli.seed >= 0, "seed must be nonnegative");
    s.sampler.master_seed = static_cast<std::uint64_t>(*cli.seed);
    echo["seed"] = *cli.seed;
  }
  if (cli.n_chains) {
    require(*cli.n_chains >= 1, "need at least one chain");
    s.run.n_chains = static_cast<std::size_t>(*cli.n_chains);
    echo["n_chains"] = *cli.n_chains;
  }
  if (cli.n_iters) {
    require(*cli.n_iters >= 0, "n_iters must be >= 0");
    s.run.n_iters = *cli.n_iters;
    echo["n_iters"] = *cli.n_iters;
  }
  if (cli.record_every) {
    require(*cli.record_every >= 1, "record_every must be >= 1");
    s.run.record_every = *cli.record_every;
    echo["record_every"] = *cli.record_every;
  }
  if (cli.step_size) {
    require(*cli.step_size > 0.0, "step size must be positive");
    s.sampler.step_size = *cli.step_size;
    echo["step_size"] = *cli.step_size;
  }
  if (cli.workers) s.run.workers = to_workers(*cli.workers);
  echo.erase("workers");  // scheduling only; output does not depend on it

  ensure_dir(cli.out_dir);
  Manifest manifest("sample", echo);
  manifest["master_seed"] = s.sampler.master_seed;

  const Eigen::Index d = s.metric->dim();
  std::vector<std::string> header{"chain", "iter"};
  for (Eigen::Index i = 1; i <= d; ++i) header.push_back("x_" + std::to_string(i));
  CsvWriter samples(cli.out_dir / "samples.csv", header);
  SampleBatch last;
  run_chains(s.sampler, s.run, s.init, [&](const SampleBatch& b) {
    for (Eigen::Index c = 0; c < b.points.rows(); ++c) {
      samples.cell(static_cast<long>(c)).cell(b.iteration);
      for (Eigen::Index i = 0; i < d; ++i) samples.cell(b.points(c, i));
      samples.end_row();
    }
    last = b;
  });
  manifest.output(samples.path());

  CsvWriter tallies(cli.out_dir / "tallies.csv",
                    {"chain", "iter", "accepted", "rejected_mh", "rejected_outside",
                     "rejected_factorization", "held"});
  for (std::size_t c = 0; c < last.per_chain.size(); ++c) {
    const Tallies& t = last.per_chain[c];
    tallies.cell(c).cell(last.iteration).cell(t.accepted).cell(t.rejected_mh);
    tallies.cell(t.rejected_outside).cell(t.rejected_factorization).cell(t.held);
    tallies.end_row();
  }
  manifest.output(tallies.path());
  manifest.write(cli.out_dir);
  return 0;
}

// ---- dirichlet ----------------------------------------------------------------

struct DirichletCli {
  std::string mode = "all";
  std::vector<long> dims{10};
  double a_min = 1.0;
  double a_max = 3.0;
  std::vector<double> c_h{0.1, 0.2};
  std::vector<std::string> algs{"MAPLA", "DikinWalk"};
  std::vector<long> seeds{1, 2, 3, 4, 5};
  long n_chains = 200;
  long n_iters = 1000;
  long record_every = 10;
  long w2_every = 100;
  double delta_factor = 2.0;
  double sinkhorn_reg = 1e-3;
  double init_radius = 0.5;
  std::vector<long> acc_dims{16, 32, 64};
  std::vector<double> gammas{0.75, 1.0, 1.5};
  double acc_a = 2.0;
  long acc_chains = 200;
  long acc_iters = 2000;
  long burn_in = 500;
  long workers = 1;

  void bind(Options& o) {
    o.add("mode", mode, "all | mixing | acceptance");
    o.add("dims", dims, "Dimensions for the mixing-time runs");
    o.add("a_min", a_min, "Ramp start");
    o.add("a_max", a_max, "Ramp end");
    o.add("c_h", c_h, "Step constants, h = C_h / (a_max d)");
    o.add("algs", algs, "MAPLA and/or DikinWalk");
    o.add("seeds", seeds, "Master seeds");
    o.add("n_chains", n_chains, "Chains per run (N)");
    o.add("n_iters", n_iters, "Iterations per run (K)");
    o.add("record_every", record_every, "Distance recording stride");
    o.add("w2_every", w2_every, "W2sq stride, multiple of record_every; 0 disables");
    o.add("delta_factor", delta_factor, "delta = factor x distance between two reference batches");
    o.add("sinkhorn_reg", sinkhorn_reg, "Entropic regularization on the normalized cost");
    o.add("init_radius", init_radius, "Dikin-ball radius of the initial distribution");
    o.add("acc_dims", acc_dims, "Dimensions for the acceptance sweep");
    o.add("gammas", gammas, "Sweep exponents, h = 1 / (10 d^gamma)");
    o.add("acc_a", acc_a, "Constant concentration for the sweep");
    o.add("acc_chains", acc_chains, "Chains per sweep point");
    o.add("acc_iters", acc_iters, "Iterations per sweep point");
    o.add("burn_in", burn_in, "Sweep burn-in");
    o.add("workers", workers, "Worker threads");
  }

  void validate() const {
    require(mode == "all" || mode == "mixing" || mode == "acceptance", "mode must be all, mixing or acceptance");
    require(n_chains >= 1, "n_chains must be >= 1");
    require(acc_chains >= 1, "acc_chains must be >= 1");
    require(n_iters >= 1 && acc_iters >= 1, "iteration counts must be >= 1");
    require(record_every >= 1, "record_every must be >= 1");
    require(w2_every >= 0 && (w2_every == 0 || w2_every % record_every == 0),
            "w2_every must be 0 or a multiple of record_every");
    require(burn_in >= 0 && burn_in < acc_iters, "need 0 <= burn_in < acc_iters");
    require(!seeds.empty(), "need at least one seed");
    for (long s : seeds) require(s >= 0, "seeds must be nonnegative");
    for (long d : dims) require(d >= 1, "dims must be >= 1");
    for (long d : acc_dims) require(d >= 1, "acc_dims must be >= 1");
    for (double c : c_h) require(c > 0.0, "C_h must be positive");
    require(a_min > -1.0 && a_max > -1.0 && acc_a > -1.0, "concentrations must exceed -1");
    require(a_max > 0.0, "a_max must be positive for the step rule");
    require(init_radius > 0.0 && init_radius < 1.0, "init_radius must lie in (0, 1)");
    require(sinkhorn_reg > 0.0 && delta_factor > 0.0, "sinkhorn_reg and delta_factor must be positive");
  }
};

int cmd_dirichlet(const DirichletCli& o, const Options& opts) {
  o.validate();
  const auto algs = to_algorithms(o.algs);
  const unsigned workers = to_workers(o.workers);
  const fs::path dir = opts.out_dir();
  ensure_dir(dir);
  json echo = opts.echo();
  echo.erase("workers");
  Manifest manifest("dirichlet", echo);
  manifest["reference_sampler"] = "gamma ratio, shapes a_i + 1";
  manifest["sinkhorn"] = {{"reg", o.sinkhorn_reg},
                          {"cost_normalization", "median pairwise squared distance"},
                          {"tol", 1e-9}};
  json deltas = json::array();
  long unconverged = 0;  // W2sq evaluations that hit max_iter

  if (o.mode != "acceptance") {
    CsvWriter mixing(dir / "mixing.csv", {"alg", "C_h", "d", "seed", "measure", "tau_hat"});
    const auto n = static_cast<std::size_t>(o.n_chains);
    SinkhornOptions sk;
    sk.reg = o.sinkhorn_reg;
    for (long d : o.dims) {
      const DirichletSetup setup = make_dirichlet_setup(ramp_concentration(d, o.a_min, o.a_max));
      const InitialDistribution init = dirichlet_init(setup, o.init_radius);
      for (double c_h : o.c_h) {
        CsvWriter series(dir / ("series_d" + std::to_string(d) + "_ch" + short_number(c_h) + ".csv"),
                         {"alg", "seed", "iter", "measure", "value"});
        for (long seed : o.seeds) {
          RngStream ref_rng = aux_stream(static_cast<std::uint64_t>(seed), 10);
          const EnergyReference ref(dirichlet_reference_sample(setup.a, n, ref_rng));
          RngStream alt_rng = aux_stream(static_cast<std::uint64_t>(seed), 11);
          const Mat alt = dirichlet_reference_sample(setup.a, n, alt_rng);
          const double delta_ed = o.delta_factor * ref.distance_to(alt);
          double delta_w2 = 0.0;
          if (o.w2_every > 0) delta_w2 = o.delta_factor * sinkhorn_w2sq(alt, ref.points(), sk).value;
          deltas.push_back({{"d", d}, {"C_h", c_h}, {"seed", seed}, {"ED", delta_ed}, {"W2sq", delta_w2}});

          for (Algorithm alg : algs) {
            SamplerConfig cfg{setup.metric, setup.potential, ramp_step_size(c_h, o.a_max, d), alg,
                              static_cast<std::uint64_t>(seed), 0.0};
            SeriesOptions so{n, o.n_iters, o.record_every, o.w2_every, workers, sk};
            const SeriesRun run = run_distance_series(cfg, so, init, ref);
            unconverged += run.sinkhorn_unconverged;
            for (const auto& s : run.series) {
              for (std::size_t k = 0; k < s.iterations.size(); ++k) {
                series.cell(algorithm_name(alg)).cell(seed).cell(s.iterations[k]);
                series.cell(measure_name(s.measure)).cell(s.values[k]);
                series.end_row();
              }
              const auto tau = empirical_mixing_time(s, s.measure == Measure::ED ? delta_ed : delta_w2);
              mixing.cell(algorithm_name(alg)).cell(c_h).cell(d).cell(seed).cell(measure_name(s.measure));
              mixing.cell(tau ? std::to_string(*tau) : std::string("NA"));
              mixing.end_row();
            }
          }
        }
        manifest.output(series.path());
      }
    }
    manifest.output(mixing.path());
    manifest["deltas"] = deltas;
    manifest["sinkhorn_unconverged"] = unconverged;
  }

  if (o.mode != "mixing") {
    CsvWriter acc(dir / "acceptance.csv", {"alg", "gamma", "d", "seed", "rate"});
    for (long d : o.acc_dims) {
      const DirichletSetup setup = make_dirichlet_setup(Vec::Constant(d + 1, o.acc_a));
      const InitialDistribution init = dirichlet_init(setup, o.init_radius);
      for (double gamma : o.gammas) {
        for (Algorithm alg : algs) {
          for (long seed : o.seeds) {
            SamplerConfig cfg{setup.metric, setup.potential, sweep_step_size(gamma, d), alg,
                              static_cast<std::uint64_t>(seed), 0.0};
            const double rate = run_acceptance(cfg, static_cast<std::size_t>(o.acc_chains), o.acc_iters,
                                               o.burn_in, init, workers);
            acc.cell(algorithm_name(alg)).cell(gamma).cell(d).cell(seed).cell(rate);
            acc.end_row();
          }
        }
      }
    }
    manifest.output(acc.path());
  }
  manifest.write(dir);
  return 0;
}

// ---- blr ----------------------------------------------------------------------

struct BlrCli {
  long d = 32;
  long n_factor = 20;
  std::vector<double> c_h{0.1, 0.2};
  std::vector<std::string> algs{"MAPLA", "DikinWalk"};
  std::vector<long> seeds{1, 2, 3};
  long n_chains = 200;
  long n_iters = 3000;
  long record_every = 10;
  double init_radius = 0.5;
  long workers = 1;

  void bind(Options& o) {
    o.add("d", d, "Parameter dimension");
    o.add("n_factor", n_factor, "n = n_factor x d observations");
    o.add("c_h", c_h, "Step constants, h = C_h / (lambda_max d)");
    o.add("algs", algs, "MAPLA and/or DikinWalk");
    o.add("seeds", seeds, "Seeds; each draws its own data set and rotations");
    o.add("n_chains", n_chains, "Chains per run (N)");
    o.add("n_iters", n_iters, "Iterations per run (K)");
    o.add("record_every", record_every, "Recording stride");
    o.add("init_radius", init_radius, "Dikin-ball radius of the initial distribution");
    o.add("workers", workers, "Worker threads");
  }

  void validate() const {
    require(d >= 2, "d must be >= 2");
    require(n_factor >= 1, "n_factor must be >= 1");
    require(n_chains >= 1, "n_chains must be >= 1");
    require(n_iters >= 0, "n_iters must be >= 0");
    require(record_every >= 1, "record_every must be >= 1");
    require(!seeds.empty(), "need at least one seed");
    for (long s : seeds) require(s >= 0, "seeds must be nonnegative");
    for (double c : c_h) require(c > 0.0, "C_h must be positive");
    require(init_radius > 0.0 && init_radius < 1.0, "init_radius must lie in (0, 1)");
  }
};

int cmd_blr(const BlrCli& o, const Options& opts) {
  o.validate();
  const auto algs = to_algorithms(o.algs);
  const unsigned workers = to_workers(o.workers);
  const fs::path dir = opts.out_dir();
  ensure_dir(dir);
  json echo = opts.echo();
  echo.erase("workers");
  Manifest manifest("blr", echo);

  CsvWriter series(dir / "blr_series.csv", {"alg", "C_h", "seed", "iter", "measure", "value"});
  CsvWriter diff(dir / "blr_diff.csv", {"alg", "C_h", "seed", "iter", "q25", "q75"});
  json problems = json::array();
  for (long seed : o.seeds) {
    const BlrProblem p = generate_blr_problem(o.d, static_cast<int>(o.n_factor),
                                              static_cast<std::uint64_t>(seed));
    problems.push_back({{"seed", seed},
                        {"lambda_max", p.lambda_max},
                        {"bai_yin_prediction", std::pow(std::sqrt(static_cast<double>(o.n_factor)) + 1.0, 2)},
                        {"rotation_planes", "(2i-1, 2i), applied for i = 1.. in order"},
                        {"angles", to_json(p.angles)},
                        {"translation", to_json(p.translation)},
                        {"box_half_width", 2.0}});
    const InitialDistribution init = blr_init(p, o.init_radius);
    for (double c_h : o.c_h) {
      for (Algorithm alg : algs) {
        SamplerConfig cfg{p.metric, p.potential, blr_step_size(p, c_h), alg,
                          static_cast<std::uint64_t>(seed), 0.0};
        const auto records = run_blr_series(cfg, p, static_cast<std::size_t>(o.n_chains), o.n_iters,
                                            o.record_every, init, workers);
        for (const auto& r : records) {
          series.cell(algorithm_name(alg)).cell(c_h).cell(seed).cell(r.iteration).cell("Err");
          series.cell(r.measures.err).end_row();
          series.cell(algorithm_name(alg)).cell(c_h).cell(seed).cell(r.iteration).cell("NLL");
          series.cell(r.measures.nll).end_row();
          diff.cell(algorithm_name(alg)).cell(c_h).cell(seed).cell(r.iteration);
          diff.cell(r.diff.q25).cell(r.diff.q75).end_row();
        }
      }
    }
  }
  manifest["problems"] = problems;
  manifest.output(series.path());
  manifest.output(diff.path());
  manifest.write(dir);
  return 0;
}

// ---- check --------------------------------------------------------------------

struct CheckCli {
  std::string spec_path;
  fs::path out_dir = ".";
  long n_probes = 200;
  long seed = 0;
  double tol_rel = 1e-3;
  double alpha = 4.0;
  double asc_eps = 0.1;
  long asc_draws = 200;
  double asc_r_factor = 0.1;
  long dikin_dirs = 5;
};

int cmd_check(const CheckCli& o) {
  require(o.n_probes >= 0, "n_probes must be >= 0");
  require(o.seed >= 0, "seed must be nonnegative");
  require(o.tol_rel >= 0.0, "tol_rel must be >= 0");
  require(o.asc_eps > 0.0 && o.asc_eps < 1.0, "asc_eps must lie in (0, 1)");
  require(o.asc_draws >= 1 && o.dikin_dirs >= 1, "asc_draws and dikin_dirs must be >= 1");
  require(o.asc_r_factor > 0.0, "asc_r_factor must be positive");

  const JsonDoc doc = JsonDoc::load(o.spec_path);
  const fs::path base_dir = fs::path(o.spec_path).parent_path();
  const JsonView root = config_root(doc);
  root.only_keys({"body", "metric", "potential", "center"});
  const BodySpec body = parse_body(root.at("body"), base_dir);
  const MetricPtr metric = parse_metric(root.at("metric"), body);
  PotentialPtr potential;
  if (root.has("potential")) potential = parse_potential(root.at("potential"), metric->dim(), base_dir);
  Vec center;
  if (root.has("center")) {
    center = root.at("center").vector();
    if (center.size() != metric->dim() || !body.body->interior_contains(center)) {
      root.at("center").fail("center must be an interior point of matching dimension");
    }
  } else {
    if (!body.center) root.fail("missing 'center' and the body has no default center");
    center = *body.center;
  }

  ensure_dir(o.out_dir);
  json echo = root.value();
  echo["body"] = inline_body(echo["body"], base_dir);
  Manifest manifest("check", {{"spec", echo},
                              {"n_probes", o.n_probes},
                              {"seed", o.seed},
                              {"tol_rel", o.tol_rel},
                              {"alpha", o.alpha},
                              {"asc_eps", o.asc_eps},
                              {"asc_draws", o.asc_draws},
                              {"asc_r_factor", o.asc_r_factor},
                              {"dikin_dirs", o.dikin_dirs}});
  CsvWriter report(o.out_dir / "check_report.csv", {"probe", "property", "lhs", "rhs", "pass"});

  SuiteOptions so;
  so.n_probes = o.n_probes;
  so.seed = static_cast<std::uint64_t>(o.seed);
  so.tol_rel = o.tol_rel;
  so.alpha = o.alpha;
  so.asc_eps = o.asc_eps;
  so.asc_draws = o.asc_draws;
  so.asc_r_factor = o.asc_r_factor;
  so.dikin_dirs = o.dikin_dirs;
  const long failures = run_property_suite(*metric, potential.get(), center, so, [&](const SuiteRow& r) {
    report.cell(r.probe).cell(r.property).cell(r.lhs).cell(r.rhs).cell(r.pass ? "1" : "0");
    report.end_row();
  });
  manifest["failures"] = failures;
  manifest.output(report.path());
  manifest.write(o.out_dir);
  std::cout << metric->name() << ": " << o.n_probes << " probes, " << failures << " failed rows\n";
  return failures > 0 ? kExitCheckFailed : 0;
}

// ---- stepsize -------------------------------------------------------------------

struct StepCli {
  std::string regime = "SC";
  StepSizeParams params;
};

int cmd_stepsize(const StepCli& o) {
  StepRegime regime;
  if (o.regime == "SC") regime = StepRegime::SelfConcordant;
  else if (o.regime == "SCpp") regime = StepRegime::SelfConcordantPlus;
  else if (o.regime == "Exp") regime = StepRegime::Exponential;
  else throw ConfigError("unknown regime '" + o.regime + "' (expected SC, SCpp or Exp)");
  double h = 0.0;
  try {
    h = recommend_step_size(regime, o.params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  std::cout << format_double(h) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metropolis-adjusted preconditioned Langevin sampling over convex bodies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MAPLA_VERSION);

  SampleCli sample;
  CLI::App* sample_cmd = app.add_subcommand("sample", "Run chains from a JSON config");
  sample_cmd->add_option("--config", sample.config_path, "Config or manifest")->required();
  sample_cmd->add_option("--out", sample.out_dir, "Output directory")->capture_default_str();
  sample_cmd->add_option("--seed", sample.seed, "Override master seed");
  sample_cmd->add_option("--n-chains", sample.n_chains, "Override chain count");
  sample_cmd->add_option("--n-iters", sample.n_iters, "Override iterations");
  sample_cmd->add_option("--record-every", sample.record_every, "Override recording stride");
  sample_cmd->add_option("--step-size", sample.step_size, "Override h");
  sample_cmd->add_option("--workers", sample.workers, "Worker threads");

  DirichletCli dirichlet;
  CLI::App* dirichlet_cmd = app.add_subcommand("dirichlet", "Dirichlet mixing-time and acceptance benchmarks");
  Options dirichlet_opts(dirichlet_cmd);
  dirichlet.bind(dirichlet_opts);
  dirichlet_opts.add_config_flag();
  dirichlet_opts.add_out_flag();

  BlrCli blr;
  CLI::App* blr_cmd = app.add_subcommand("blr", "Bayesian logistic regression benchmark");
  Options blr_opts(blr_cmd);
  blr.bind(blr_opts);
  blr_opts.add_config_flag();
  blr_opts.add_out_flag();

  CheckCli check;
  CLI::App* check_cmd = app.add_subcommand("check", "Finite-difference property checks of a metric");
  check_cmd->add_option("--config", check.spec_path, "JSON with body, metric, optional potential and center")
      ->required();
  check_cmd->add_option("--out", check.out_dir, "Output directory")->capture_default_str();
  check_cmd->add_option("--n-probes", check.n_probes, "Random interior points")->capture_default_str();
  check_cmd->add_option("--seed", check.seed, "Probe seed")->capture_default_str();
  check_cmd->add_option("--tol-rel", check.tol_rel, "Relative tolerance")->capture_default_str();
  check_cmd->add_option("--alpha", check.alpha, "Lower-trace parameter")->capture_default_str();
  check_cmd->add_option("--asc-eps", check.asc_eps, "Average self-concordance epsilon")->capture_default_str();
  check_cmd->add_option("--asc-draws", check.asc_draws, "Monte-Carlo draws per probe")->capture_default_str();
  check_cmd->add_option("--asc-r-factor", check.asc_r_factor, "r = factor * eps / d for the ASC step")
      ->capture_default_str();
  check_cmd->add_option("--dikin-dirs", check.dikin_dirs, "Directions per Dikin probe")->capture_default_str();

  StepCli step;
  CLI::App* step_cmd = app.add_subcommand("stepsize", "Print the theoretical step-size bound");
  step_cmd->add_option("--regime", step.regime, "SC | SCpp | Exp")->capture_default_str();
  step_cmd->add_option("--d", step.params.d, "Dimension")->capture_default_str();
  step_cmd->add_option("--lambda", step.params.lambda, "Curvature upper bound")->capture_default_str();
  step_cmd->add_option("--beta", step.params.beta, "Gradient bound")->capture_default_str();
  step_cmd->add_option("--alpha", step.params.alpha, "Lower-trace parameter")->capture_default_str();
  step_cmd->add_option("--M", step.params.warmness, "Warmness")->capture_default_str();
  step_cmd->add_option("--delta", step.params.delta, "Target accuracy")->capture_default_str();
  step_cmd->add_option("--c1", step.params.c1, "Universal constant")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sample_cmd) return cmd_sample(sample);
    if (*dirichlet_cmd) {
      dirichlet_opts.merge();
      return cmd_dirichlet(dirichlet, dirichlet_opts);
    }
    if (*blr_cmd) {
      blr_opts.merge();
      return cmd_blr(blr, blr_opts);
    }
    if (*check_cmd) return cmd_check(check);
    if (*step_cmd) return cmd_stepsize(step);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InitNotInterior& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
