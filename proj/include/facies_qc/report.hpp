#pragma once

// JSON reports (schema_version 1) and plot-ready CSV series.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "facies_qc/checks.hpp"
#include "facies_qc/conditioning.hpp"
#include "facies_qc/grid.hpp"
#include "facies_qc/io.hpp"

namespace facies_qc {

using Json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;
inline constexpr const char* tool_name = "facies_qc";
inline constexpr const char* tool_version = "0.1.0";

/// FNV-1a 64-bit, as 16 lowercase hex digits.
inline std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string grid_hash(const CategoricalGrid& g) { return content_hash(write_gslib_grid(g)); }

/// Shortest text that parses back to the same double.
inline std::string csv_number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// JSON

inline Json to_json(const RealGrid& g) {
  return Json{{"n_rows", g.n_rows()}, {"n_cols", g.n_cols()}, {"values", std::vector<double>(g.cells().begin(), g.cells().end())}};
}

inline Json to_json(const PercentilePair& p) { return Json{{"p_lo", p.lo}, {"p_hi", p.hi}}; }

inline Json to_json(const Histogram& h) {
  return Json{{"bin_width", h.bin_width}, {"edges", h.edges}, {"counts", h.counts}};
}

inline Json to_json(const DistributionSummary& s) {
  return Json{{"values", s.values}, {"mean", s.mean}, {"p_lo", s.percentiles.lo}, {"p_hi", s.percentiles.hi},
              {"lower", s.p_lo}, {"upper", s.p_hi}};
}

inline Json to_json(const F1Check& f) {
  Json j = to_json(f.f1);
  j["accuracy"] = f.accuracy;
  return j;
}

inline Json to_json(const Semivariogram& sv) {
  Json lags = Json::array();
  for (const auto& l : sv.lags) lags.push_back(Json{{"lag", l.h}, {"gamma", l.gamma}, {"n_pairs", l.n_pairs}});
  return Json{{"direction", {sv.direction.d_row, sv.direction.d_col}}, {"lags", lags}};
}

inline Json to_json(const SemivariogramCheck& s) {
  return Json{{"direction", {s.direction.d_row, s.direction.d_col}},
              {"lags", s.lags},
              {"members", s.member_gammas},
              {"envelope",
               {{"p_lo", s.envelope.percentiles.lo},
                {"p_hi", s.envelope.percentiles.hi},
                {"lower", s.envelope.lower},
                {"upper", s.envelope.upper}}}};
}

inline Json to_json(const WindowEnvelope& w) {
  Json bins = Json::array();
  for (const auto& b : w.bins) {
    bins.push_back(Json{{"ti_lo", b.ti_lo}, {"ti_hi", b.ti_hi}, {"n", b.n}, {"lower", b.lower}, {"upper", b.upper}});
  }
  return Json{{"p_lo", w.percentiles.lo}, {"p_hi", w.percentiles.hi}, {"bin_width", w.bin_width}, {"bins", bins}};
}

inline Json to_json(const EnsembleCheck& c, Connectivity conn) {
  Json j;
  j["members"] = c.members;
  if (c.f1) j["f1"] = to_json(*c.f1);
  Json entropy{{"map", to_json(c.entropy_map)}};
  if (c.entropy_at_data) entropy["at_data"] = *c.entropy_at_data;
  if (c.entropy_histogram) entropy["at_data_histogram"] = to_json(*c.entropy_histogram);
  j["entropy"] = entropy;
  j["semivariograms"] = Json{{"major", to_json(c.major)}, {"minor", to_json(c.minor)}};
  j["proportions"] = Json{{"values", c.proportions}, {"mean", c.proportion_mean}, {"histogram", to_json(c.proportion_histogram)}};
  j["pixel_maps"] = Json{{"average", to_json(c.pixel_average)}, {"dispersion", to_json(c.pixel_dispersion)}};
  Json scatter = Json::array();
  for (const auto& p : c.window_scatter_sample) scatter.push_back({p.ti, p.realization});
  j["window"] = Json{{"window", c.window}, {"stride", c.stride}, {"envelope", to_json(c.window_envelope)}, {"scatter", scatter}};
  j["geobodies"] = Json{{"connectivity", static_cast<int>(conn)}, {"counts", c.geobody_counts}, {"mean", c.geobody_mean}};
  return j;
}

inline Json to_json(const TIReference& t) {
  return Json{{"proportion", t.proportion},
              {"geobody_count", t.geobody_count},
              {"semivariogram_major", to_json(t.major)},
              {"semivariogram_minor", to_json(t.minor)}};
}

inline Json to_json(const CheckConfig& c, GridShape shape) {
  return Json{{"positive", static_cast<int>(c.positive)},
              {"max_lag", c.resolved_max_lag(shape)},
              {"window", c.resolved_window(shape)},
              {"stride", c.stride},
              {"connectivity", static_cast<int>(c.connectivity)},
              {"f1_percentiles", to_json(c.f1_percentiles)},
              {"window_percentiles", to_json(c.window_percentiles)},
              {"semivariogram_percentiles", to_json(c.semivariogram_percentiles)},
              {"proportion_bin_width", c.proportion_bin_width},
              {"entropy_bin_width", c.entropy_bin_width},
              {"window_bin_width", c.window_bin_width},
              {"scatter_sample", c.scatter_sample}};
}

inline Json to_json(const OptOptions& o, std::size_t dimension) {
  return Json{{"algorithm", "nelder-mead-adaptive"},
              {"max_evaluations", effective_max_evaluations(o, dimension)},
              {"initial_step", o.initial_step},
              {"tolerance", o.tolerance},
              {"restarts", o.restarts}};
}

inline Json to_json(const ConditioningConfig& c, std::size_t latent_dim) {
  return Json{{"lambda", c.lambda},
              {"content_term_disabled", c.lambda == 0.0},
              {"epsilon_clamp", c.epsilon_clamp},
              {"threshold", c.threshold},
              {"positive", static_cast<int>(c.positive)},
              {"discriminator_mode", to_string(c.discriminator_mode)},
              {"optimizer", to_json(c.optimizer, latent_dim)}};
}

inline Json points_json(const ConditioningSet& data) {
  Json pts = Json::array();
  for (const auto& p : data.points()) pts.push_back({p.row, p.col, static_cast<int>(p.value)});
  return pts;
}

inline Json to_json(const ConditionalRealization& r) {
  return Json{{"seed", r.seed},
              {"z_opt", std::vector<double>(r.z_opt.values().begin(), r.z_opt.values().end())},
              {"loss_initial", r.loss_initial},
              {"loss_final", r.loss_final},
              {"f1_at_data", r.f1_at_data},
              {"evaluations", r.evaluations},
              {"converged", r.converged},
              {"restart_index", r.restart_index},
              {"grid_hash", grid_hash(r.grid)}};
}

inline Json metadata_json() { return Json{{"tool", tool_name}, {"tool_version", tool_version}}; }

struct SummaryTable {
  std::vector<std::string> columns;
  struct Row {
    std::string check;
    std::vector<std::optional<double>> values;
  };
  std::vector<Row> rows;
};

/// Averages per N in the row layout of the classic summary table: TI column, then one per N.
inline SummaryTable summary_table(const ExperimentReport& rep) {
  SummaryTable t;
  t.columns.push_back("TI");
  for (const auto& c : rep.cases) t.columns.push_back(std::to_string(c.n));
  SummaryTable::Row f1{"F1 Score", {std::nullopt}};
  SummaryTable::Row prop{"Channel Proportions Distribution", {rep.ti_reference.proportion}};
  SummaryTable::Row geo{"Number of Geobodies", {static_cast<double>(rep.ti_reference.geobody_count)}};
  for (const auto& c : rep.cases) {
    f1.values.push_back(c.conditional.f1 ? std::optional<double>(c.conditional.f1->f1.mean) : std::nullopt);
    prop.values.push_back(c.conditional.proportion_mean);
    geo.values.push_back(c.conditional.geobody_mean);
  }
  t.rows = {f1, prop, geo};
  return t;
}

inline Json to_json(const SummaryTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json vals = Json::array();
    for (const auto& v : r.values) vals.push_back(v ? Json(*v) : Json(nullptr));
    rows.push_back(Json{{"check", r.check}, {"values", vals}});
  }
  return Json{{"columns", t.columns}, {"rows", rows}};
}

inline std::string summary_csv(const SummaryTable& t) {
  std::string out = "check";
  for (const auto& c : t.columns) out += "," + c;
  out += "\n";
  for (const auto& r : t.rows) {
    out += r.check;
    for (const auto& v : r.values) out += "," + (v ? csv_number(*v) : std::string("-"));
    out += "\n";
  }
  return out;
}

/// Where the experiment's truth grid came from; echoed so the run can be replayed.
struct TruthSource {
  std::optional<std::uint64_t> seed;
  std::string path;
};

inline Json experiment_json(const ExperimentReport& rep, const TruthSource& truth_source, const std::string& ti_path) {
  const auto& cfg = rep.config;
  const auto shape = cfg.truth.shape();
  const std::size_t latent_dim = rep.cases.empty() || rep.cases.front().realizations.empty()
                                     ? 0
                                     : rep.cases.front().realizations.front().z_opt.size();
  Json j;
  j["schema_version"] = schema_version;
  j["kind"] = "experiment";
  Json meta = metadata_json();
  meta["generator"] = rep.generator;
  meta["discriminator"] = rep.discriminator;
  meta["optimizer_defaults_are_engineering_choices"] = true;
  meta["config"] = Json{{"master_seed", cfg.master_seed},
                        {"n_values", cfg.n_values},
                        {"realizations_per_n", cfg.realizations_per_n},
                        {"unconditional_count", cfg.unconditional_count},
                        {"n_rows", shape.n_rows},
                        {"n_cols", shape.n_cols},
                        {"conditioning", to_json(cfg.conditioning, latent_dim)},
                        {"checks", to_json(cfg.checks, shape)}};
  Json truth{{"hash", grid_hash(cfg.truth)}};
  if (truth_source.seed) {
    truth["source"] = "seed";
    truth["seed"] = *truth_source.seed;
  } else {
    truth["source"] = "file";
    truth["path"] = truth_source.path;
  }
  Json ti{{"hash", grid_hash(cfg.ti)}, {"source", ti_path.empty() ? "truth" : "file"}};
  if (!ti_path.empty()) ti["path"] = ti_path;
  meta["inputs"] = Json{{"truth", truth}, {"ti", ti}};
  j["metadata"] = meta;

  j["ti_reference"] = to_json(rep.ti_reference);
  j["unconditional"] = Json{{"seeds", rep.unconditional_seeds}, {"checks", to_json(rep.unconditional, cfg.checks.connectivity)}};
  Json cases = Json::array();
  for (const auto& c : rep.cases) {
    Json reals = Json::array();
    for (const auto& r : c.realizations) reals.push_back(to_json(r));
    cases.push_back(Json{{"n", c.n},
                         {"wells_seed", c.wells_seed},
                         {"wells", points_json(c.data)},
                         {"realizations", reals},
                         {"conditional", to_json(c.conditional, cfg.checks.connectivity)},
                         {"baseline", {{"f1", to_json(c.baseline_f1)}, {"entropy_at_data", c.baseline_entropy_at_data}}}});
  }
  j["cases"] = cases;
  j["summary"] = to_json(summary_table(rep));
  return j;
}

// ---------------------------------------------------------------------------
// CSV series for the check command

/// One labelled ensemble section of a check run.
struct NamedCheck {
  std::string label;
  const EnsembleCheck* check;
};

inline std::map<std::string, std::string> check_csv_series(const std::vector<NamedCheck>& sections,
                                                           const TIReference& ti) {
  std::map<std::string, std::string> files;
  auto& f1 = files["f1_box.csv"] = "ensemble,realization,f1,accuracy\n";
  auto& ent_hist = files["entropy_hist.csv"] = "ensemble,bin_lo,bin_hi,count\n";
  auto& ent_map = files["entropy_map.csv"] = "ensemble,row,col,entropy\n";
  auto& sv_major = files["semivariogram_major.csv"] = "ensemble,lag,lower,upper,ti_gamma\n";
  auto& sv_minor = files["semivariogram_minor.csv"] = "ensemble,lag,lower,upper,ti_gamma\n";
  auto& prop = files["proportion_hist.csv"] = "ensemble,bin_lo,bin_hi,count,ti_proportion\n";
  auto& avg = files["pixel_average.csv"] = "ensemble,row,col,average\n";
  auto& disp = files["pixel_dispersion.csv"] = "ensemble,row,col,dispersion\n";
  auto& wenv = files["window_envelope.csv"] = "ensemble,ti_lo,ti_hi,n,lower,upper\n";
  auto& wsc = files["window_scatter.csv"] = "ensemble,ti_proportion,realization_proportion\n";
  auto& geo = files["geobodies.csv"] = "ensemble,realization,count,ti_count\n";

  auto n = [](double v) { return csv_number(v); };
  auto map_rows = [](std::string& out, const std::string& label, const RealGrid& g) {
    for (std::size_t r = 0; r < g.n_rows(); ++r) {
      for (std::size_t c = 0; c < g.n_cols(); ++c) {
        out += label + "," + std::to_string(r) + "," + std::to_string(c) + "," + csv_number(g.at(r, c)) + "\n";
      }
    }
  };
  auto sv_rows = [&](std::string& out, const std::string& label, const SemivariogramCheck& s, const Semivariogram& tis) {
    for (std::size_t k = 0; k < s.envelope.lags.size(); ++k) {
      std::string tig;
      for (const auto& l : tis.lags) {
        if (l.h == s.envelope.lags[k]) tig = n(l.gamma);
      }
      out += label + "," + std::to_string(s.envelope.lags[k]) + "," + n(s.envelope.lower[k]) + "," +
             n(s.envelope.upper[k]) + "," + tig + "\n";
    }
  };

  for (const auto& [label, c] : sections) {
    if (c->f1) {
      for (std::size_t i = 0; i < c->f1->f1.values.size(); ++i) {
        f1 += label + "," + std::to_string(i) + "," + n(c->f1->f1.values[i]) + "," + n(c->f1->accuracy[i]) + "\n";
      }
    }
    if (c->entropy_histogram) {
      const auto& h = *c->entropy_histogram;
      for (std::size_t b = 0; b < h.counts.size(); ++b) {
        ent_hist += label + "," + n(h.edges[b]) + "," + n(h.edges[b + 1]) + "," + std::to_string(h.counts[b]) + "\n";
      }
    }
    map_rows(ent_map, label, c->entropy_map);
    sv_rows(sv_major, label, c->major, ti.major);
    sv_rows(sv_minor, label, c->minor, ti.minor);
    const auto& h = c->proportion_histogram;
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      if (h.counts[b] == 0) continue;
      prop += label + "," + n(h.edges[b]) + "," + n(h.edges[b + 1]) + "," + std::to_string(h.counts[b]) + "," +
              n(ti.proportion) + "\n";
    }
    map_rows(avg, label, c->pixel_average);
    map_rows(disp, label, c->pixel_dispersion);
    for (const auto& b : c->window_envelope.bins) {
      wenv += label + "," + n(b.ti_lo) + "," + n(b.ti_hi) + "," + std::to_string(b.n) + "," + n(b.lower) + "," +
              n(b.upper) + "\n";
    }
    for (const auto& p : c->window_scatter_sample) wsc += label + "," + n(p.ti) + "," + n(p.realization) + "\n";
    for (std::size_t i = 0; i < c->geobody_counts.size(); ++i) {
      geo += label + "," + std::to_string(i) + "," + n(c->geobody_counts[i]) + "," + std::to_string(ti.geobody_count) + "\n";
    }
  }
  return files;
}

}  // namespace facies_qc
