#pragma once

// The facies_qc command line: generate, condition, check, experiment.
// Exit code 0 iff every requested output was written; otherwise one diagnostic line on stderr.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "facies_qc/checks.hpp"
#include "facies_qc/conditioning.hpp"
#include "facies_qc/error.hpp"
#include "facies_qc/external_generator.hpp"
#include "facies_qc/generator.hpp"
#include "facies_qc/io.hpp"
#include "facies_qc/random.hpp"
#include "facies_qc/report.hpp"

namespace facies_qc::cli {

namespace fs = std::filesystem;

inline std::string realization_name(std::size_t i, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "real_%04zu.%s", i, ext);
  return buf;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Generator selection

struct GeneratorFlags {
  std::string spec = "procedural";
  std::size_t latent_dim = 0;  // 0: generator default
  std::size_t rows = 0;
  std::size_t cols = 0;
  double timeout_s = 30.0;
};

inline void add_generator_flags(CLI::App* app, GeneratorFlags& g) {
  app->add_option("--generator", g.spec, "procedural or exec:<command line>")->capture_default_str();
  app->add_option("--latent-dim", g.latent_dim, "procedural latent dimension (multiple of 5)");
  app->add_option("--rows", g.rows, "grid rows");
  app->add_option("--cols", g.cols, "grid columns");
  app->add_option("--timeout", g.timeout_s, "external generator response timeout, seconds")->capture_default_str();
}

/// Owns the generator; `external` is set when it lives in a child process.
struct GeneratorHandle {
  std::unique_ptr<Generator> gen;
  ExternalGenerator* external = nullptr;
};

inline GeneratorHandle make_generator(const GeneratorFlags& f) {
  GeneratorHandle h;
  if (f.spec == "procedural") {
    auto info = procedural_info();
    if (f.latent_dim) {
      if (f.latent_dim % procedural::params_per_channel != 0) {
        throw invalid_argument("--latent-dim must be a positive multiple of 5 for the procedural generator");
      }
      info = procedural_info(f.latent_dim / procedural::params_per_channel, info.n_rows, info.n_cols);
    }
    if (f.rows) info.n_rows = f.rows;
    if (f.cols) info.n_cols = f.cols;
    h.gen = std::make_unique<ProceduralGenerator>(info);
    return h;
  }
  if (f.spec.rfind("exec:", 0) == 0) {
    if (!(f.timeout_s > 0.0)) throw invalid_argument("--timeout must be positive");
    auto argv = split_command(f.spec.substr(5));
    if (argv.empty()) throw invalid_argument("exec: generator needs a command");
    auto ext = std::make_unique<ExternalGenerator>(
        argv, std::chrono::milliseconds(static_cast<long long>(f.timeout_s * 1000.0)));
    const auto info = ext->info();
    if ((f.latent_dim && f.latent_dim != info.latent_dim) || (f.rows && f.rows != info.n_rows) ||
        (f.cols && f.cols != info.n_cols)) {
      throw invalid_argument("external generator declares latent_dim " + std::to_string(info.latent_dim) + " and " +
                             to_string(info.shape()) + ", which contradicts the command-line overrides");
    }
    h.external = ext.get();
    h.gen = std::move(ext);
    return h;
  }
  throw invalid_argument("unknown generator '" + f.spec + "' (expected procedural or exec:<command>)");
}

inline Json generator_json(const GeneratorInfo& info, const std::string& spec) {
  return Json{{"spec", spec},
              {"name", info.name},
              {"latent_dim", info.latent_dim},
              {"n_rows", info.n_rows},
              {"n_cols", info.n_cols},
              {"supports_discriminator", info.supports_discriminator}};
}

// ---------------------------------------------------------------------------
// Conditioning flags

struct ConditioningFlags {
  double lambda = 5.0;
  double epsilon = 1e-6;
  double threshold = 0.5;
  std::size_t max_evals = 0;
  std::size_t restarts = 3;
  double tolerance = 1e-6;
  double initial_step = 0.5;
  std::string discriminator = "auto";
  std::string ti;
};

inline void add_conditioning_flags(CLI::App* app, ConditioningFlags& c) {
  app->add_option("--lambda", c.lambda, "content-term weight (0 disables the content term)")->capture_default_str();
  app->add_option("--epsilon", c.epsilon, "clamp on the discriminator score inside the log term")->capture_default_str();
  app->add_option("--threshold", c.threshold, "cutoff mapping raw grids to facies codes")->capture_default_str();
  app->add_option("--max-evals", c.max_evals, "objective evaluations per restart (0: 500 x latent dim)");
  app->add_option("--restarts", c.restarts, "optimizer restarts")->capture_default_str();
  app->add_option("--tolerance", c.tolerance, "simplex size tolerance")->capture_default_str();
  app->add_option("--initial-step", c.initial_step, "initial simplex step")->capture_default_str();
  app->add_option("--discriminator", c.discriminator, "auto, plausibility or external")
      ->check(CLI::IsMember({"auto", "plausibility", "external"}))
      ->capture_default_str();
  app->add_option("--ti", c.ti, "training image providing the plausibility statistics");
}

inline ConditioningConfig conditioning_config(const ConditioningFlags& f, DiscriminatorMode mode) {
  ConditioningConfig c;
  c.lambda = f.lambda;
  c.epsilon_clamp = f.epsilon;
  c.threshold = f.threshold;
  c.discriminator_mode = mode;
  c.optimizer.max_evaluations = f.max_evals;
  c.optimizer.restarts = f.restarts;
  c.optimizer.tolerance = f.tolerance;
  c.optimizer.initial_step = f.initial_step;
  c.validate();
  return c;
}

inline TIStats average_stats(const std::vector<TIStats>& all) {
  TIStats s = all.front();
  for (std::size_t i = 1; i < all.size(); ++i) {
    s.target_proportion += all[i].target_proportion;
    for (std::size_t k = 0; k < s.target_gamma_major.size(); ++k) s.target_gamma_major[k] += all[i].target_gamma_major[k];
    for (std::size_t k = 0; k < s.target_gamma_minor.size(); ++k) s.target_gamma_minor[k] += all[i].target_gamma_minor[k];
  }
  const double n = static_cast<double>(all.size());
  s.target_proportion /= n;
  for (auto& g : s.target_gamma_major) g /= n;
  for (auto& g : s.target_gamma_minor) g /= n;
  return s;
}

inline constexpr std::size_t reference_ensemble_size = 20;

/// Picks D. Without a TI, the plausibility targets are the generator's own unconditional
/// statistics averaged over a seeded reference ensemble.
struct DiscriminatorChoice {
  std::unique_ptr<Discriminator> disc;
  DiscriminatorMode mode = DiscriminatorMode::plausibility;
  Json source;
};

inline DiscriminatorChoice choose_discriminator(const ConditioningFlags& f, GeneratorHandle& h,
                                                const CategoricalGrid* ti, const std::string& ti_label,
                                                std::uint64_t seed, FaciesCode positive) {
  DiscriminatorChoice out;
  const auto info = h.gen->info();
  bool external = f.discriminator == "external" || (f.discriminator == "auto" && h.external && info.supports_discriminator);
  if (external) {
    if (!h.external || !info.supports_discriminator) {
      throw invalid_argument("--discriminator external needs an exec: generator that declares a discriminator");
    }
    out.disc = std::make_unique<ExternalDiscriminator>(*h.external);
    out.mode = DiscriminatorMode::external;
    out.source = Json{{"kind", "external"}};
    return out;
  }
  if (ti) {
    if (ti->shape() != info.shape()) {
      throw invalid_argument("TI " + to_string(ti->shape()) + " does not match generator " + to_string(info.shape()));
    }
    out.disc = std::make_unique<PlausibilityDiscriminator>(compute_ti_stats(*ti, positive));
    out.source = Json{{"kind", "plausibility"}, {"targets", ti_label}};
    return out;
  }
  std::vector<TIStats> stats;
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < reference_ensemble_size; ++i) {
    seeds.push_back(derive_seed(seed, stream_id("reference"), i));
    auto g = threshold_grid(h.gen->generate(sample_latent(seeds.back(), info.latent_dim)), f.threshold);
    stats.push_back(compute_ti_stats(g, positive));
  }
  out.disc = std::make_unique<PlausibilityDiscriminator>(average_stats(stats));
  out.source = Json{{"kind", "plausibility"}, {"targets", "generator-reference-ensemble"}, {"reference_seeds", seeds}};
  return out;
}

// ---------------------------------------------------------------------------
// Check flags

struct CheckFlags {
  std::size_t window = 0;
  std::size_t max_lag = 0;
  std::size_t stride = 1;
  int connectivity = 8;
  int positive = 1;
  std::vector<double> percentiles;
  std::vector<double> f1_percentiles;
  std::vector<double> window_percentiles;
  std::vector<double> semivariogram_percentiles;
};

inline void add_check_flags(CLI::App* app, CheckFlags& c) {
  app->add_option("--window", c.window, "moving-window size (0: half the shorter grid side)");
  app->add_option("--stride", c.stride, "moving-window stride")->capture_default_str();
  app->add_option("--max-lag", c.max_lag, "largest semivariogram lag (0: half the shorter grid side)");
  app->add_option("--connectivity", c.connectivity, "geobody connectivity")
      ->check(CLI::IsMember({4, 8}))
      ->capture_default_str();
  app->add_option("--positive", c.positive, "facies code treated as the channel class")->capture_default_str();
  app->add_option("--percentiles", c.percentiles, "LO,HI applied to every envelope")->delimiter(',')->expected(2);
  app->add_option("--f1-percentiles", c.f1_percentiles, "LO,HI for the F1 box")->delimiter(',')->expected(2);
  app->add_option("--window-percentiles", c.window_percentiles, "LO,HI for the window envelope")
      ->delimiter(',')
      ->expected(2);
  app->add_option("--semivariogram-percentiles", c.semivariogram_percentiles, "LO,HI for semivariogram envelopes")
      ->delimiter(',')
      ->expected(2);
}

inline CheckConfig check_config(const CheckFlags& f) {
  CheckConfig c;
  if (f.positive < 0 || f.positive > 255) throw invalid_argument("--positive must be a facies code in [0, 255]");
  if (f.stride < 1) throw invalid_argument("--stride must be >= 1");
  c.positive = static_cast<FaciesCode>(f.positive);
  c.window = f.window;
  c.max_lag = f.max_lag;
  c.stride = f.stride;
  c.connectivity = f.connectivity == 4 ? Connectivity::four : Connectivity::eight;
  auto pair = [](const std::vector<double>& v, PercentilePair& dst) {
    if (v.empty()) return;
    dst = {v[0], v[1]};
    check_percentiles(dst);
  };
  pair(f.percentiles, c.f1_percentiles);
  pair(f.percentiles, c.window_percentiles);
  pair(f.percentiles, c.semivariogram_percentiles);
  pair(f.f1_percentiles, c.f1_percentiles);
  pair(f.window_percentiles, c.window_percentiles);
  pair(f.semivariogram_percentiles, c.semivariogram_percentiles);
  return c;
}

// ---------------------------------------------------------------------------
// Input helpers

struct LoadedGrid {
  CategoricalGrid grid;
  std::string hash;
};

inline LoadedGrid load_grid(const std::string& path, const GslibReadOptions& opts = {}) {
  auto text = read_text_file(path);
  try {
    return {parse_gslib_categorical(text, opts), content_hash(text)};
  } catch (const error& e) {
    throw parse_error(path + ": " + e.what());
  }
}

struct LoadedEnsemble {
  std::vector<CategoricalGrid> members;
  Json files = Json::array();
  Json seeds = Json::array();
};

inline LoadedEnsemble load_ensemble_dir(const std::string& dir, const GslibReadOptions& opts) {
  if (!fs::is_directory(dir)) throw error("ensemble directory " + dir + " does not exist");
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".gslib" || ext == ".dat" || ext == ".gslb")) paths.push_back(entry.path());
  }
  if (paths.empty()) throw invalid_argument("ensemble directory " + dir + " contains no grid files");
  std::sort(paths.begin(), paths.end());
  LoadedEnsemble out;
  for (const auto& p : paths) {
    auto g = load_grid(p.string(), opts);
    out.members.push_back(std::move(g.grid));
    out.files.push_back(Json{{"name", p.filename().string()}, {"hash", g.hash}});
  }
  // Echo generation seeds when the directory came from this tool.
  const auto manifest = fs::path(dir) / "manifest.json";
  if (fs::is_regular_file(manifest)) {
    try {
      auto m = nlohmann::json::parse(read_text_file(manifest));
      if (m.contains("seeds")) out.seeds = m["seeds"];
    } catch (const nlohmann::json::exception&) {
    }
  }
  return out;
}

/// Brings grids to a common alphabet so they can share an ensemble.
inline void unify_alphabets(std::vector<CategoricalGrid*> grids) {
  std::size_t a = 2;
  for (auto* g : grids) a = std::max(a, g->alphabet_size());
  for (auto* g : grids) *g = g->with_alphabet(a);
}

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw error("cannot create output directory " + dir);
}

// ---------------------------------------------------------------------------
// Subcommands

struct GenerateArgs {
  GeneratorFlags gen;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  double threshold = 0.5;
};

inline void run_generate(const GenerateArgs& a) {
  if (a.count < 1) throw invalid_argument("count must be >= 1");
  auto h = make_generator(a.gen);
  const auto info = h.gen->info();
  ensure_dir(a.out_dir);
  Json reals = Json::array();
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < a.count; ++i) {
    const auto seed = derive_seed(a.seed, stream_id("generate"), i);
    seeds.push_back(seed);
    auto grid = threshold_grid(h.gen->generate(sample_latent(seed, info.latent_dim)), a.threshold);
    const auto text = write_gslib_grid(grid);
    write_text_file(fs::path(a.out_dir) / realization_name(i, "gslib"), text);
    reals.push_back(Json{{"file", realization_name(i, "gslib")}, {"seed", seed}, {"hash", content_hash(text)}});
  }
  Json m;
  m["schema_version"] = schema_version;
  m["kind"] = "generate";
  m["metadata"] = metadata_json();
  m["generator"] = generator_json(info, a.gen.spec);
  m["master_seed"] = a.seed;
  m["threshold"] = a.threshold;
  m["seeds"] = seeds;
  m["realizations"] = reals;
  write_text_file(fs::path(a.out_dir) / "manifest.json", dump(m));
  if (h.external && h.external->shutdown() != 0) throw protocol_error("external generator exited with nonzero status");
}

struct ConditionArgs {
  GeneratorFlags gen;
  ConditioningFlags cond;
  std::string data;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

inline void run_condition(const ConditionArgs& a) {
  if (a.count < 1) throw invalid_argument("count must be >= 1");
  auto h = make_generator(a.gen);
  const auto info = h.gen->info();
  const auto data_text = read_text_file(a.data);
  ConditioningSet data = parse_points_csv(data_text, info.shape());
  if (data.empty()) throw invalid_argument(a.data + " holds no conditioning points");

  std::optional<LoadedGrid> ti;
  if (!a.cond.ti.empty()) ti = load_grid(a.cond.ti, {info.shape(), std::nullopt});
  auto choice = choose_discriminator(a.cond, h, ti ? &ti->grid : nullptr, a.cond.ti, a.seed, channel);
  auto cfg = conditioning_config(a.cond, choice.mode);

  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < a.count; ++i) seeds.push_back(derive_seed(a.seed, stream_id("condition"), i));
  auto job = [&](std::size_t i) { return condition(*h.gen, *choice.disc, data, info.shape(), cfg, seeds[i]); };
  std::vector<ConditionalRealization> results;
  if (h.gen->thread_safe() && choice.disc->thread_safe()) {
    results = parallel_map(a.count, job);
  } else {
    for (std::size_t i = 0; i < a.count; ++i) results.push_back(job(i));
  }

  ensure_dir(a.out_dir);
  Json reals = Json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto text = write_gslib_grid(results[i].grid);
    write_text_file(fs::path(a.out_dir) / realization_name(i, "gslib"), text);
    Json r = to_json(results[i]);
    r["file"] = realization_name(i, "gslib");
    write_text_file(fs::path(a.out_dir) / realization_name(i, "json"), dump(r));
    reals.push_back(Json{{"file", realization_name(i, "gslib")},
                         {"details", realization_name(i, "json")},
                         {"seed", seeds[i]},
                         {"hash", content_hash(text)},
                         {"loss_final", results[i].loss_final},
                         {"f1_at_data", results[i].f1_at_data}});
  }
  Json m;
  m["schema_version"] = schema_version;
  m["kind"] = "condition";
  m["metadata"] = metadata_json();
  m["generator"] = generator_json(info, a.gen.spec);
  m["discriminator"] = Json{{"name", choice.disc->name()}, {"source", choice.source}};
  m["config"] = to_json(cfg, info.latent_dim);
  m["content_term_disabled"] = cfg.lambda == 0.0;
  Json inputs{{"data", {{"path", a.data}, {"hash", content_hash(data_text)}, {"points", points_json(data)}}}};
  if (ti) inputs["ti"] = Json{{"path", a.cond.ti}, {"hash", ti->hash}};
  m["inputs"] = inputs;
  m["master_seed"] = a.seed;
  m["seeds"] = seeds;
  m["realizations"] = reals;
  write_text_file(fs::path(a.out_dir) / "manifest.json", dump(m));
  if (h.external && h.external->shutdown() != 0) throw protocol_error("external generator exited with nonzero status");
}

struct CheckArgs {
  CheckFlags checks;
  std::string ti;
  std::string ensemble;
  std::string baseline;
  std::string data;
  std::string out_dir = ".";
  std::size_t rows = 0;
  std::size_t cols = 0;
};

inline void run_check(const CheckArgs& a) {
  const auto cfg = check_config(a.checks);
  GslibReadOptions opts;
  if (a.rows || a.cols) {
    if (!a.rows || !a.cols) throw invalid_argument("--rows and --cols must be given together");
    opts.dims = GridShape{a.rows, a.cols};
  }
  auto ti = load_grid(a.ti, opts);
  auto ens = load_ensemble_dir(a.ensemble, opts);
  std::optional<LoadedEnsemble> base;
  if (!a.baseline.empty()) base = load_ensemble_dir(a.baseline, opts);

  std::vector<CategoricalGrid*> all{&ti.grid};
  for (auto& g : ens.members) all.push_back(&g);
  if (base) {
    for (auto& g : base->members) all.push_back(&g);
  }
  unify_alphabets(all);
  for (auto* g : all) {
    if (g->shape() != ti.grid.shape()) {
      throw invalid_argument("shape mismatch: TI is " + to_string(ti.grid.shape()) + ", ensemble member is " +
                             to_string(g->shape()));
    }
  }

  std::optional<ConditioningSet> data;
  std::string data_hash;
  if (!a.data.empty()) {
    auto text = read_text_file(a.data);
    data = parse_points_csv(text, ti.grid.shape());
    data_hash = content_hash(text);
  }
  const ConditioningSet* dp = data ? &*data : nullptr;

  const auto ti_ref = compute_ti_reference(ti.grid, cfg);
  const auto main_check = check_ensemble(Ensemble(ens.members, "ensemble"), ti.grid, dp, cfg);
  std::optional<EnsembleCheck> base_check;
  if (base) base_check = check_ensemble(Ensemble(base->members, "baseline"), ti.grid, dp, cfg);

  Json inputs{{"ti", {{"path", a.ti}, {"hash", ti.hash}}},
              {"ensemble", {{"dir", a.ensemble}, {"files", ens.files}}}};
  if (base) inputs["baseline"] = Json{{"dir", a.baseline}, {"files", base->files}};
  if (data) inputs["data"] = Json{{"path", a.data}, {"hash", data_hash}, {"points", points_json(*data)}};
  Json seeds{{"ensemble", ens.seeds}};
  if (base) seeds["baseline"] = base->seeds;

  Json j;
  j["schema_version"] = schema_version;
  j["kind"] = "check";
  Json meta = metadata_json();
  meta["config"] = to_json(cfg, ti.grid.shape());
  meta["inputs"] = inputs;
  meta["seeds"] = seeds;
  j["metadata"] = meta;
  j["ti_reference"] = to_json(ti_ref);
  Json sections{{"ensemble", to_json(main_check, cfg.connectivity)}};
  if (base_check) sections["baseline"] = to_json(*base_check, cfg.connectivity);
  j["ensembles"] = sections;

  std::vector<NamedCheck> named{{"ensemble", &main_check}};
  if (base_check) named.push_back({"baseline", &*base_check});
  auto csvs = check_csv_series(named, ti_ref);

  ensure_dir(a.out_dir);
  write_text_file(fs::path(a.out_dir) / "report.json", dump(j));
  for (const auto& [name, text] : csvs) write_text_file(fs::path(a.out_dir) / name, text);
}

struct ExperimentArgs {
  GeneratorFlags gen;
  ConditioningFlags cond;
  CheckFlags checks;
  std::string truth;
  std::vector<std::size_t> n_values{10, 20, 30, 40, 50, 60, 70, 80};
  std::size_t per_n = 20;
  std::size_t unconditional = 0;  // 0: same as per_n
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

/// "seed:<n>" or a bare integer selects a generated truth; anything else is a grid path.
inline TruthSource parse_truth(const std::string& s, std::uint64_t master) {
  TruthSource t;
  std::string digits = s.rfind("seed:", 0) == 0 ? s.substr(5) : s;
  if (s.empty()) {
    t.seed = derive_seed(master, stream_id("truth"));
  } else if (auto v = detail::parse_integer<std::uint64_t>(digits); v && (s != digits || !fs::exists(s))) {
    t.seed = *v;
  } else {
    t.path = s;
  }
  return t;
}

inline void run_experiment_command(const ExperimentArgs& a) {
  auto h = make_generator(a.gen);
  const auto info = h.gen->info();
  const auto truth_source = parse_truth(a.truth, a.seed);

  ExperimentConfig cfg;
  if (truth_source.seed) {
    cfg.truth = threshold_grid(h.gen->generate(sample_latent(*truth_source.seed, info.latent_dim)), a.cond.threshold);
  } else {
    cfg.truth = load_grid(truth_source.path, {info.shape(), std::nullopt}).grid;
  }
  std::optional<LoadedGrid> ti;
  if (!a.cond.ti.empty()) {
    ti = load_grid(a.cond.ti, {info.shape(), std::nullopt});
    cfg.ti = ti->grid;
  } else {
    cfg.ti = cfg.truth;
  }
  {
    std::vector<CategoricalGrid*> both{&cfg.truth, &cfg.ti};
    unify_alphabets(both);
  }
  cfg.checks = check_config(a.checks);
  // The truth doubles as TI unless one is given, so D's targets always come from cfg.ti.
  auto flags = a.cond;
  auto choice = choose_discriminator(flags, h, &cfg.ti, ti ? a.cond.ti : "truth", a.seed, cfg.checks.positive);
  cfg.conditioning = conditioning_config(a.cond, choice.mode);
  cfg.conditioning.positive = cfg.checks.positive;
  cfg.n_values = a.n_values;
  cfg.realizations_per_n = a.per_n;
  cfg.unconditional_count = a.unconditional ? a.unconditional : a.per_n;
  cfg.master_seed = a.seed;

  auto rep = run_experiment(cfg, *h.gen, *choice.disc);
  Json j = experiment_json(rep, truth_source, a.cond.ti);
  j["metadata"]["generator_spec"] = generator_json(info, a.gen.spec);
  j["metadata"]["discriminator_source"] = choice.source;

  ensure_dir(a.out_dir);
  write_text_file(fs::path(a.out_dir) / "report.json", dump(j));
  write_text_file(fs::path(a.out_dir) / "summary.csv", summary_csv(summary_table(rep)));
  if (h.external && h.external->shutdown() != 0) throw protocol_error("external generator exited with nonzero status");
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Quality checks and data conditioning for generated facies models", "facies_qc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version);

  GenerateArgs ga;
  auto* gen_cmd = app.add_subcommand("generate", "write unconditional realizations");
  add_generator_flags(gen_cmd, ga.gen);
  gen_cmd->add_option("--count", ga.count, "number of realizations")->capture_default_str();
  gen_cmd->add_option("--seed", ga.seed, "master seed")->capture_default_str();
  gen_cmd->add_option("--out-dir", ga.out_dir, "output directory")->capture_default_str();
  gen_cmd->add_option("--threshold", ga.threshold, "cutoff mapping raw grids to facies codes")->capture_default_str();

  ConditionArgs ca;
  auto* cond_cmd = app.add_subcommand("condition", "write realizations conditioned to point data");
  add_generator_flags(cond_cmd, ca.gen);
  add_conditioning_flags(cond_cmd, ca.cond);
  cond_cmd->add_option("--data", ca.data, "points CSV (row,col,facies)")->required();
  cond_cmd->add_option("--count", ca.count, "number of realizations")->capture_default_str();
  cond_cmd->add_option("--seed", ca.seed, "master seed")->capture_default_str();
  cond_cmd->add_option("--out-dir", ca.out_dir, "output directory")->capture_default_str();

  CheckArgs ka;
  auto* check_cmd = app.add_subcommand("check", "run the check suite on an ensemble directory");
  add_check_flags(check_cmd, ka.checks);
  check_cmd->add_option("--ti", ka.ti, "training image grid")->required();
  check_cmd->add_option("--ensemble", ka.ensemble, "directory of realization grids")->required();
  check_cmd->add_option("--baseline", ka.baseline, "directory of baseline (e.g. unconditional) grids");
  check_cmd->add_option("--data", ka.data, "points CSV enabling the at-data checks");
  check_cmd->add_option("--rows", ka.rows, "grid rows when files do not carry dimensions");
  check_cmd->add_option("--cols", ka.cols, "grid columns when files do not carry dimensions");
  check_cmd->add_option("--out-dir", ka.out_dir, "output directory")->capture_default_str();

  ExperimentArgs ea;
  auto* exp_cmd = app.add_subcommand("experiment", "sweep the number of conditioning points");
  add_generator_flags(exp_cmd, ea.gen);
  add_conditioning_flags(exp_cmd, ea.cond);
  add_check_flags(exp_cmd, ea.checks);
  exp_cmd->add_option("--truth", ea.truth, "truth grid path, or seed:<n> to generate one");
  exp_cmd->add_option("--n-values", ea.n_values, "conditioning point counts")->delimiter(',')->capture_default_str();
  exp_cmd->add_option("--per-n", ea.per_n, "conditional realizations per N")->capture_default_str();
  exp_cmd->add_option("--unconditional", ea.unconditional, "unconditional realizations (0: same as --per-n)");
  exp_cmd->add_option("--seed", ea.seed, "master seed")->capture_default_str();
  exp_cmd->add_option("--out-dir", ea.out_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "facies_qc: usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*gen_cmd) run_generate(ga);
    if (*cond_cmd) run_condition(ca);
    if (*check_cmd) run_check(ka);
    if (*exp_cmd) run_experiment_command(ea);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "facies_qc: error: " << msg << "\n";
    return 1;
  }
  return 0;
}

}  // namespace facies_qc::cli
