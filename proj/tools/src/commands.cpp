#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cascadex/cli/app.hpp"
#include "cascadex/error.hpp"
#include "cascadex/simulate.hpp"
#include "output.hpp"

namespace cascadex::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Command-line values; unset ones leave the config alone.
struct Flags {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<double> dt;
  std::optional<std::string> model;
  std::optional<std::size_t> workers;
  std::optional<std::string> out;
  std::optional<std::string> graph;
  std::optional<std::string> graph_format;
  std::optional<std::string> sessions;
  std::optional<std::string> scores;
  std::vector<double> alpha_sweep;
  std::optional<std::size_t> horizon;
  std::optional<std::string> variant;
  std::optional<std::string> weighting;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON experiment config");
  sub->add_option("--seed", f.seed, "random seed");
  sub->add_option("--alpha", f.alpha, "observer-bias correction strength");
  sub->add_option("--dt", f.dt, "window width in minutes");
  sub->add_option("--model", f.model, "endogenous model: si, exp or log");
  sub->add_option("--workers", f.workers, "worker threads for the per-window fits");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--graph", f.graph, "graph file");
  sub->add_option("--graph-format", f.graph_format, "edge-list or gml");
  sub->add_option("--sessions", f.sessions, "session CSV");
  sub->add_option("--scores", f.scores, "score,label CSV (evaluate only)");
  sub->add_option("--alpha-sweep", f.alpha_sweep, "comma-separated alpha values (infer only)")->delimiter(',');
  sub->add_option("--horizon", f.horizon, "number of windows");
  sub->add_option("--variant", f.variant, "responsibility variant: ratio, softmax or multiply");
  sub->add_option("--weighting", f.weighting, "influence weighting: uniform or exp-decay");
}

template <class Parse>
auto parse_flag(const std::string& flag, const std::string& value, Parse parse) {
  try {
    return parse(value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(flag, e.what());
  }
}

void apply(const Flags& f, const std::string& command, ExperimentConfig& cfg) {
  if (f.seed) cfg.seed = *f.seed;
  if (f.alpha) {
    if (*f.alpha < 0) throw ConfigError("--alpha", "must be >= 0");
    cfg.inference.settings.correction.alpha = *f.alpha;
  }
  if (f.dt) {
    if (!(*f.dt > 0)) throw ConfigError("--dt", "must be > 0");
    cfg.dt = *f.dt;
  }
  if (f.model) {
    const auto kind = parse_flag("--model", *f.model, parse_model_kind);
    if (command == "simulate") {
      auto& m = cfg.simulation.model;
      if (kind == ModelKind::LOG && m.kind != ModelKind::LOG && m.k == 0.0) {
        m.k = 1.0;
        m.a0 = 1.0;
      }
      m.kind = kind;
    } else {
      cfg.inference.model = kind;
    }
  }
  if (f.workers) {
    if (*f.workers < 1) throw ConfigError("--workers", "must be >= 1");
    cfg.inference.settings.workers = *f.workers;
  }
  if (f.out) cfg.output = *f.out;
  if (f.graph) {
    cfg.graph.file = *f.graph;
    cfg.graph.degrees.clear();
    cfg.graph.degree_file.reset();
  }
  if (f.graph_format) {
    if (*f.graph_format == "gml") {
      cfg.graph.format = GraphFormat::Gml;
    } else if (*f.graph_format == "edge-list" || *f.graph_format == "edgelist") {
      cfg.graph.format = GraphFormat::EdgeList;
    } else {
      throw ConfigError("--graph-format", "unknown graph format '" + *f.graph_format + "'");
    }
  }
  if (f.sessions) cfg.sessions = *f.sessions;
  if (f.scores) cfg.scores = *f.scores;
  if (!f.alpha_sweep.empty()) {
    for (double a : f.alpha_sweep) {
      if (a < 0) throw ConfigError("--alpha-sweep", "values must be >= 0");
    }
    cfg.inference.alpha_sweep = f.alpha_sweep;
  }
  if (f.horizon) {
    if (*f.horizon < 1) throw ConfigError("--horizon", "must be >= 1");
    cfg.horizon = *f.horizon;
  }
  if (f.variant) cfg.attribution.variant = parse_flag("--variant", *f.variant, parse_responsibility_variant);
  if (f.weighting) cfg.attribution.weighting = parse_flag("--weighting", *f.weighting, parse_influence_weighting);
}

// Graph generation and the simulation draw from separate seeds.
std::uint64_t simulation_seed(std::uint64_t seed) { return seed ^ 0x9e3779b97f4a7c15ULL; }

SocialGraph build_graph(const GraphSource& s, std::uint64_t seed) {
  if (s.file) return load_graph(*s.file, s.format);
  try {
    if (s.generator == "configuration") {
      DegreeSequence seq{s.degrees};
      if (s.degree_file) {
        std::ifstream in(*s.degree_file);
        if (!in) throw ConfigError("graph.degree_file", "cannot open " + s.degree_file->string());
        long long d = 0;
        while (in >> d) {
          if (d < 0) throw ConfigError("graph.degree_file", "negative degree");
          seq.degrees.push_back(static_cast<std::size_t>(d));
        }
      }
      if (seq.degrees.empty()) throw ConfigError("graph.degrees", "configuration generator needs degrees");
      return configuration_model(seq, seed);
    }
    return powerlaw_cluster_graph(s.n, s.m, s.p, seed);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("graph", e.what());
  }
}

SimConfig sim_config(const ExperimentConfig& cfg) {
  SimConfig sc;
  sc.model = cfg.simulation.model;
  sc.profile = cfg.simulation.profile;
  sc.n_seeds = cfg.simulation.n_seeds;
  sc.horizon = cfg.horizon.value_or(cfg.simulation.horizon);
  sc.seed = simulation_seed(cfg.seed);
  sc.window_width = cfg.dt;
  return sc;
}

struct Observed {
  SocialGraph g;
  Cascade c;
};

// The cascade comes from a session file when one is given, otherwise from an
// in-process simulation of the configured spec.
Observed observe(const ExperimentConfig& cfg, std::ostream& err) {
  Observed o{build_graph(cfg.graph, cfg.seed), {}};
  if (!cfg.sessions) {
    o.c = simulate(o.g, sim_config(cfg)).cascade;
    return o;
  }
  const auto table = load_sessions(*cfg.sessions);
  std::vector<ExternalId> ids;
  ids.reserve(table.rows.size());
  for (const auto& row : table.rows) ids.push_back(row.user_id);
  const std::size_t before = o.g.n_nodes();
  o.g = o.g.with_nodes(ids);
  if (o.g.n_nodes() > before) {
    err << "warning: " << o.g.n_nodes() - before << " session users are not in the graph; added as isolated nodes\n";
  }
  o.c = discretize(table, cfg.dt, o.g, cfg.horizon);
  return o;
}

std::vector<std::string> inference_warnings(const InferenceResult& r) {
  std::vector<std::string> out;
  if (!r.converged) out.push_back("inference did not converge within " + std::to_string(r.iterations) + " rounds");
  const bool identified = std::any_of(r.init.windows.begin(), r.init.windows.end(),
                                      [](const WindowEstimate& w) { return w.identified; });
  if (!identified) out.push_back("no activations after window 0; endogenous parameters are not identified");
  return out;
}

InferenceResult infer_with(const Observed& o, const ExperimentConfig& cfg, double alpha, std::ostream& err) {
  InferenceSettings settings = cfg.inference.settings;
  settings.correction.alpha = alpha;
  auto result = alternate(o.g, o.c, cfg.inference.model, settings);
  for (const auto& w : inference_warnings(result)) err << "warning: " << w << " (alpha " << num(alpha) << ")\n";
  return result;
}

json model_json(const EndogenousModel& m, double dt) {
  json j;
  j["kind"] = std::string(to_string(m.kind));
  switch (m.kind) {
    case ModelKind::SI:
      j["p0"] = m.p0;
      break;
    case ModelKind::EXP:
      j["p0"] = m.p0;
      j["lambda"] = m.lambda;
      if (m.lambda > 0) {
        j["half_decay_windows"] = m.half_decay_windows();
        j["half_decay_hours"] = m.half_decay_windows() * dt / 60.0;
      }
      break;
    case ModelKind::LOG:
      j["k"] = m.k;
      j["a0"] = m.a0;
      break;
  }
  return j;
}

std::string param_header(ModelKind kind) {
  switch (kind) {
    case ModelKind::SI: return "p0";
    case ModelKind::EXP: return "p0,lambda";
    case ModelKind::LOG: return "k,a0";
  }
  return "";
}

std::string param_values(const EndogenousModel& m) {
  switch (m.kind) {
    case ModelKind::SI: return num(m.p0);
    case ModelKind::EXP: return num(m.p0) + "," + num(m.lambda);
    case ModelKind::LOG: return num(m.k) + "," + num(m.a0);
  }
  return "";
}

void write_counts_plot(const fs::path& path, const CountSeries& counts) {
  PlotSeries endo{"endogenous", {}, counts.endogenous, "#1f77b4"};
  PlotSeries exo{"exogenous", {}, counts.exogenous, "#d62728"};
  for (std::size_t t = 0; t < counts.endogenous.size(); ++t) {
    endo.x.push_back(static_cast<double>(t));
    exo.x.push_back(static_cast<double>(t));
  }
  write_text(path, svg_plot("Expected activations per window", "window", "activations", {endo, exo}));
}

json write_inference(const fs::path& dir, const InferenceResult& r, const Observed& o, const ExperimentConfig& cfg,
                     double alpha) {
  fs::create_directories(dir);
  json doc;
  doc["model"] = model_json(r.model, cfg.dt);
  doc["alpha"] = alpha;
  doc["n_all"] = cfg.inference.settings.correction.n_all.value_or(o.g.n_nodes());
  doc["dt_minutes"] = cfg.dt;
  doc["horizon"] = o.c.horizon();
  doc["n_users"] = o.c.n_users();
  doc["n_activated"] = o.c.n_activated();
  doc["loglik"] = r.loglik;
  doc["initial_loglik"] = r.initial_loglik;
  doc["iterations"] = r.iterations;
  doc["converged"] = r.converged;
  doc["clamp_hits"] = r.clamp_hits;
  doc["fallbacks"] = r.fallbacks;
  doc["monotonicity_violations"] = r.monotonicity_violations;
  doc["warnings"] = inference_warnings(r);
  doc["p_ext"] = r.series.p_ext;
  write_json(dir / "result.json", doc);

  const auto counts = expected_counts(r, o.g, o.c);
  std::ostringstream w;
  w << "window,p_ext,n_activated,n_inactive,expected_endogenous,expected_exogenous\n";
  for (std::size_t t = 0; t < o.c.horizon(); ++t) {
    const auto tw = static_cast<Window>(t);
    w << t << ',' << num(r.series[t]) << ',' << o.c.activated_in(tw).size() << ',' << o.c.n_inactive_at(tw) << ','
      << num(counts.endogenous[t]) << ',' << num(counts.exogenous[t]) << '\n';
  }
  write_text(dir / "windows.csv", w.str());
  write_counts_plot(dir / "counts.svg", counts);

  std::ostringstream tr;
  tr << "iteration," << param_header(r.model.kind)
     << ",delta_peer,delta_ext,loglik_after_endogenous,loglik_after_exogenous\n";
  for (const auto& it : r.trace) {
    tr << it.iteration << ',' << param_values(it.model) << ',' << num(it.delta_peer) << ',' << num(it.delta_ext)
       << ',' << num(it.loglik_after_endogenous) << ',' << num(it.loglik_after_exogenous) << '\n';
  }
  write_text(dir / "trace.csv", tr.str());
  return doc;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out) {
  const auto g = build_graph(cfg.graph, cfg.seed);
  const auto sc = sim_config(cfg);
  const auto outcome = simulate(g, sc);
  const auto& c = outcome.cascade;

  save_edge_list(g, cfg.output / "edges.txt");
  save_sessions(to_sessions(outcome, g), cfg.output / "sessions.csv");

  std::ostringstream truth;
  truth << "user_id,window,minute,truth\n";
  std::size_t n_endo = 0, n_exo = 0, n_seed = 0;
  for (NodeIndex i = 0; i < g.n_nodes(); ++i) {
    truth << g.external_id(i) << ',' << c.window(i) << ',' << c.minutes(i) << ',' << to_string(outcome.truth[i])
          << '\n';
    n_endo += outcome.truth[i] == TruthLabel::Endogenous;
    n_exo += outcome.truth[i] == TruthLabel::Exogenous;
    n_seed += outcome.truth[i] == TruthLabel::Seed;
  }
  write_text(cfg.output / "truth.csv", truth.str());

  json doc;
  doc["timestamp"] = utc_timestamp();
  doc["seed"] = cfg.seed;
  doc["graph"] = {{"n_nodes", g.n_nodes()}, {"n_edges", g.n_edges()}, {"max_degree", g.max_degree()}};
  doc["model"] = model_json(sc.model, sc.window_width);
  doc["profile"] = std::string(to_string(sc.profile.shape));
  doc["n_seeds"] = sc.n_seeds;
  doc["horizon"] = sc.horizon;
  doc["dt_minutes"] = sc.window_width;
  doc["activations"] = {{"total", c.n_activated()}, {"endogenous", n_endo}, {"exogenous", n_exo}, {"seeds", n_seed}};
  doc["p_ext"] = outcome.p_ext.p_ext;
  doc["true_endogenous"] = outcome.true_endogenous;
  doc["true_exogenous"] = outcome.true_exogenous;
  write_json(cfg.output / "summary.json", doc);

  out << "simulated " << c.n_activated() << " activations on " << g.n_nodes() << " nodes (" << n_endo
      << " endogenous, " << n_exo << " exogenous, " << n_seed << " seeds)\n";
  return kOk;
}

int cmd_infer(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto o = observe(cfg, err);
  const auto& sweep = cfg.inference.alpha_sweep;
  if (sweep.empty()) {
    const double alpha = cfg.inference.settings.correction.alpha;
    const auto r = infer_with(o, cfg, alpha, err);
    write_inference(cfg.output, r, o, cfg, alpha);
    out << "model " << to_string(r.model.kind) << " " << param_values(r.model) << " loglik " << num(r.loglik)
        << (r.converged ? " converged" : " not converged") << " after " << r.iterations << " rounds\n";
    return kOk;
  }
  json runs = json::array();
  for (double alpha : sweep) {
    const std::string name = "alpha_" + num(alpha);
    const auto r = infer_with(o, cfg, alpha, err);
    const auto doc = write_inference(cfg.output / name, r, o, cfg, alpha);
    runs.push_back({{"alpha", alpha},
                    {"dir", name},
                    {"model", doc["model"]},
                    {"loglik", r.loglik},
                    {"converged", r.converged}});
    out << name << ": " << param_values(r.model) << " loglik " << num(r.loglik)
        << (r.converged ? " converged" : " not converged") << '\n';
  }
  write_json(cfg.output / "sweep.json", json{{"runs", runs}});
  return kOk;
}

// score,label CSV with a header naming both columns.
struct ScoredRows {
  std::vector<double> scores;
  std::vector<bool> labels;
};

ScoredRows read_scores(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
      out.push_back(cell);
    }
    return out;
  };
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string(), 1, "empty file");
  const auto header = split(line);
  const auto col = [&](const char* name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError(path.string(), 1, std::string("header lacks a '") + name + "' column");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t cs = col("score"), cl = col("label");
  ScoredRows rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() <= std::max(cs, cl)) throw ParseError(path.string(), lineno, "too few columns");
    try {
      std::size_t used = 0;
      const double s = std::stod(cells[cs], &used);
      if (used != cells[cs].size()) throw std::invalid_argument("trailing text");
      rows.scores.push_back(s);
    } catch (const std::exception&) {
      throw ParseError(path.string(), lineno, "bad score '" + cells[cs] + "'");
    }
    const auto& l = cells[cl];
    if (l == "1" || l == "true") {
      rows.labels.push_back(true);
    } else if (l == "0" || l == "false") {
      rows.labels.push_back(false);
    } else {
      throw ParseError(path.string(), lineno, "bad label '" + l + "'");
    }
  }
  return rows;
}

std::string roc_csv(const RocCurve& roc) {
  std::ostringstream o;
  o << "threshold,fpr,tpr\n";
  for (std::size_t k = 0; k < roc.tpr.size(); ++k) {
    o << num(roc.thresholds[k]) << ',' << num(roc.fpr[k]) << ',' << num(roc.tpr[k]) << '\n';
  }
  return o.str();
}

PlotSeries roc_series(const std::string& name, const RocCurve& roc, const std::string& color) {
  return {name, roc.fpr, roc.tpr, color};
}

RocCurve roc_of(const std::vector<double>& scores, const std::vector<bool>& labels) {
  const auto flags = std::make_unique<bool[]>(labels.size());
  for (std::size_t k = 0; k < labels.size(); ++k) flags[k] = labels[k];
  return roc_auc(scores, std::span<const bool>(flags.get(), labels.size()));
}

int cmd_evaluate_scores(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto rows = read_scores(*cfg.scores);
  const auto n_pos = static_cast<std::size_t>(std::count(rows.labels.begin(), rows.labels.end(), true));
  const auto n_neg = rows.labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    err << "warning: scores need both positive and negative labels; AUC omitted\n";
    return kOk;
  }
  const auto roc = roc_of(rows.scores, rows.labels);
  write_text(cfg.output / "roc.csv", roc_csv(roc));
  write_text(cfg.output / "roc.svg",
             svg_plot("ROC", "false positive rate", "true positive rate", {roc_series("scores", roc, "#1f77b4")},
                      true));
  write_json(cfg.output / "auc.json", json{{"auc", roc.auc}, {"n_positive", n_pos}, {"n_negative", n_neg}});
  out << "AUC " << num(roc.auc) << '\n';
  return kOk;
}

int cmd_evaluate(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.scores) return cmd_evaluate_scores(cfg, out, err);
  const auto o = observe(cfg, err);
  const double alpha = cfg.inference.settings.correction.alpha;
  const auto r = infer_with(o, cfg, alpha, err);
  write_inference(cfg.output, r, o, cfg, alpha);
  const auto scores = responsibility(r, o.g, o.c, cfg.attribution.variant);
  const auto base = baseline_scores(o.g, o.c);
  const bool labeled = o.c.has_labels();

  std::ostringstream rc;
  rc << "user_id,window,responsibility,p_peer,p_ext,active_peers" << (labeled ? ",class" : "") << '\n';
  for (std::size_t k = 0; k < scores.size(); ++k) {
    const auto& s = scores[k];
    rc << o.g.external_id(s.user) << ',' << s.window << ',' << num(s.r) << ',' << num(s.p_peer) << ','
       << num(s.p_ext) << ',' << base[k].active_peers;
    if (labeled) rc << ',' << to_string(o.c.labels()[s.user]);
    rc << '\n';
  }
  write_text(cfg.output / "responsibility.csv", rc.str());

  // Histogram over [0, 1]; split by evaluation label when labels exist.
  const std::size_t bins = cfg.attribution.histogram_bins;
  std::vector<double> all(bins, 0.0), endo(bins, 0.0), exo(bins, 0.0);
  std::vector<double> roc_ours, roc_base;
  std::vector<bool> roc_labels;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    const auto& s = scores[k];
    const auto b = std::min(bins - 1, static_cast<std::size_t>(std::clamp(s.r, 0.0, 1.0) * static_cast<double>(bins)));
    all[b] += 1;
    if (!labeled) continue;
    const auto label = exogenous_label(o.c.labels()[s.user]);
    if (!label) continue;
    (*label ? exo : endo)[b] += 1;
    roc_ours.push_back(s.r);
    roc_base.push_back(base[k].score);
    roc_labels.push_back(*label);
  }
  std::ostringstream h;
  h << "bin_lo,bin_hi,all" << (labeled ? ",share,external" : "") << '\n';
  std::vector<double> centers(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const double lo = static_cast<double>(b) / static_cast<double>(bins);
    const double hi = static_cast<double>(b + 1) / static_cast<double>(bins);
    centers[b] = lo;
    h << num(lo) << ',' << num(hi) << ',' << num(all[b]);
    if (labeled) h << ',' << num(endo[b]) << ',' << num(exo[b]);
    h << '\n';
  }
  write_text(cfg.output / "responsibility_hist.csv", h.str());
  std::vector<PlotSeries> bars;
  if (labeled) {
    bars.push_back({"share", centers, endo, "#1f77b4", true});
    bars.push_back({"external", centers, exo, "#d62728", true});
  } else {
    bars.push_back({"all", centers, all, "#7f7f7f", true});
  }
  write_text(cfg.output / "responsibility_hist.svg",
             svg_plot("Exogenous responsibility", "responsibility", "users", bars));

  const auto n_pos = static_cast<std::size_t>(std::count(roc_labels.begin(), roc_labels.end(), true));
  const auto n_neg = roc_labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    err << "warning: no usable share/external labels; AUC omitted\n";
    out << "scored " << scores.size() << " activations\n";
    return kOk;
  }
  const auto ours = roc_of(roc_ours, roc_labels);
  const auto baseline = roc_of(roc_base, roc_labels);
  write_text(cfg.output / "roc_responsibility.csv", roc_csv(ours));
  write_text(cfg.output / "roc_baseline.csv", roc_csv(baseline));
  write_text(cfg.output / "roc.svg",
             svg_plot("ROC", "false positive rate", "true positive rate",
                      {roc_series("responsibility", ours, "#1f77b4"), roc_series("active peers", baseline, "#ff7f0e")},
                      true));
  write_json(cfg.output / "auc.json", json{{"auc_our", ours.auc},
                                           {"auc_base", baseline.auc},
                                           {"variant", std::string(to_string(cfg.attribution.variant))},
                                           {"n_positive", n_pos},
                                           {"n_negative", n_neg}});
  out << "AUC_our " << num(ours.auc) << " AUC_base " << num(baseline.auc) << '\n';
  return kOk;
}

std::vector<double> min_max(const std::vector<InfluenceScore>& s) {
  std::vector<double> out(s.size(), 0.0);
  if (s.empty()) return out;
  double lo = s[0].value, hi = s[0].value;
  for (const auto& x : s) {
    lo = std::min(lo, x.value);
    hi = std::max(hi, x.value);
  }
  if (hi > lo) {
    for (std::size_t k = 0; k < s.size(); ++k) out[k] = (s[k].value - lo) / (hi - lo);
  }
  return out;
}

double mean_over(const std::vector<double>& v, const std::vector<NodeIndex>& group) {
  double sum = 0.0;
  for (auto i : group) sum += v[i];
  return sum / static_cast<double>(group.size());
}

int cmd_influence(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto o = observe(cfg, err);
  const double alpha = cfg.inference.settings.correction.alpha;
  const auto r = infer_with(o, cfg, alpha, err);
  const auto n = o.c.n_users();

  double lambda = 0.0;
  if (cfg.attribution.weighting == InfluenceWeighting::ExpDecay) {
    if (cfg.attribution.lambda) {
      lambda = *cfg.attribution.lambda;
    } else if (r.model.kind == ModelKind::EXP) {
      lambda = r.model.lambda;
    } else {
      throw ConfigError("attribution.lambda", "exp-decay weighting needs a lambda unless the model is exp");
    }
  }

  const auto model_mass = endogenous_mass(responsibility(r, o.g, o.c, cfg.attribution.variant), n);
  const auto model_scores = individual_influence(o.g, o.c, model_mass, cfg.attribution.weighting, lambda);
  const bool labeled = o.c.has_labels();
  std::vector<InfluenceScore> raw_scores;
  if (labeled) {
    std::vector<double> raw_mass(n, 0.0);
    for (NodeIndex i = 0; i < n; ++i) {
      if (o.c.activated(i) && o.c.window(i) > 0 && o.c.labels()[i] == ReferralClass::Share) raw_mass[i] = 1.0;
    }
    raw_scores = individual_influence(o.g, o.c, raw_mass, cfg.attribution.weighting, lambda);
  } else {
    err << "warning: sessions carry no referral labels; raw influence omitted\n";
  }

  std::ostringstream csv;
  csv << "user_id,window,class,model" << (labeled ? ",raw" : "") << '\n';
  std::vector<NodeIndex> by_id(n);
  for (NodeIndex i = 0; i < n; ++i) by_id[i] = i;
  std::sort(by_id.begin(), by_id.end(),
            [&](NodeIndex a, NodeIndex b) { return o.g.external_id(a) < o.g.external_id(b); });
  for (const NodeIndex i : by_id) {
    csv << o.g.external_id(i) << ',' << o.c.window(i) << ','
        << (labeled ? std::string(to_string(o.c.labels()[i])) : std::string("unlabeled")) << ','
        << num(model_scores[i].value);
    if (labeled) csv << ',' << num(raw_scores[i].value);
    csv << '\n';
  }
  write_text(cfg.output / "influence.csv", csv.str());

  const auto model_norm = min_max(model_scores);
  const auto raw_norm = min_max(raw_scores);
  std::vector<double> model_values(n), raw_values(raw_scores.size());
  for (std::size_t k = 0; k < n; ++k) model_values[k] = model_scores[k].value;
  for (std::size_t k = 0; k < raw_scores.size(); ++k) raw_values[k] = raw_scores[k].value;

  json groups = json::object();
  for (const auto& name : cfg.attribution.groups) {
    std::vector<NodeIndex> members;
    if (labeled) {
      for (NodeIndex i = 0; i < n; ++i) {
        if (o.c.activated(i) && to_string(o.c.labels()[i]) == name) members.push_back(i);
      }
    }
    if (members.empty()) {
      err << "warning: group '" << name << "' has no members; omitted\n";
      continue;
    }
    json g;
    g["n"] = members.size();
    g["model"] = {{"mean", collective_influence(model_scores, members)},
                  {"normalized_mean", mean_over(model_norm, members)}};
    if (labeled) {
      g["raw"] = {{"mean", collective_influence(raw_scores, members)}, {"normalized_mean", mean_over(raw_norm, members)}};
    }
    groups[name] = g;
    out << name << ": n=" << members.size() << " model " << num(g["model"]["mean"].get<double>());
    if (labeled) out << " raw " << num(g["raw"]["mean"].get<double>());
    out << '\n';
  }
  write_json(cfg.output / "groups.json",
             json{{"weighting", std::string(to_string(cfg.attribution.weighting))},
                  {"lambda", lambda},
                  {"model", model_json(r.model, cfg.dt)},
                  {"groups", groups}});
  return kOk;
}

std::optional<json> read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

std::string model_line(const json& m) {
  std::string s = m.value("kind", "?");
  for (const char* key : {"p0", "lambda", "k", "a0", "half_decay_hours"}) {
    if (m.contains(key)) s += std::string(", ") + key + " = " + num(m[key].get<double>());
  }
  return s;
}

void report_inference(std::ostringstream& md, const json& r) {
  md << "- model: " << model_line(r["model"]) << "\n";
  md << "- log-likelihood: " << num(r["loglik"].get<double>()) << " (start " << num(r["initial_loglik"].get<double>())
     << ")\n";
  md << "- rounds: " << r["iterations"].get<int>() << (r["converged"].get<bool>() ? ", converged" : ", NOT converged")
     << "\n";
  const auto p = r["p_ext"].get<std::vector<double>>();
  if (!p.empty()) {
    double sum = 0.0;
    for (double v : p) sum += v;
    md << "- mean p_ext over " << p.size() << " windows: " << num(sum / static_cast<double>(p.size())) << "\n";
  }
}

int cmd_report(const ExperimentConfig& cfg, std::ostream& out) {
  const fs::path& dir = cfg.output;
  std::ostringstream md;
  md << "# cascadex report\n\n";
  bool any = false;
  if (const auto s = read_json(dir / "summary.json")) {
    any = true;
    const auto& a = (*s)["activations"];
    md << "## Simulation\n\n";
    md << "- graph: " << (*s)["graph"]["n_nodes"].get<std::size_t>() << " nodes, "
       << (*s)["graph"]["n_edges"].get<std::size_t>() << " edges\n";
    md << "- model: " << model_line((*s)["model"]) << "\n";
    md << "- activations: " << a["total"].get<std::size_t>() << " (" << a["endogenous"].get<std::size_t>()
       << " endogenous, " << a["exogenous"].get<std::size_t>() << " exogenous, " << a["seeds"].get<std::size_t>()
       << " seeds)\n\n";
  }
  if (const auto r = read_json(dir / "result.json")) {
    any = true;
    md << "## Inference\n\n";
    report_inference(md, *r);
    md << "\n";
  }
  if (const auto sw = read_json(dir / "sweep.json")) {
    any = true;
    md << "## Alpha sweep\n\n";
    for (const auto& run : (*sw)["runs"]) {
      md << "### alpha = " << num(run["alpha"].get<double>()) << "\n\n";
      if (const auto r = read_json(dir / run["dir"].get<std::string>() / "result.json")) report_inference(md, *r);
      md << "\n";
    }
  }
  if (const auto a = read_json(dir / "auc.json")) {
    any = true;
    md << "## Evaluation\n\n";
    if (a->contains("auc_our")) {
      md << "- AUC (responsibility, " << (*a)["variant"].get<std::string>()
         << "): " << num((*a)["auc_our"].get<double>()) << "\n";
      md << "- AUC (active-peer baseline): " << num((*a)["auc_base"].get<double>()) << "\n";
    } else {
      md << "- AUC: " << num((*a)["auc"].get<double>()) << "\n";
    }
    md << "- labeled activations: " << (*a)["n_positive"].get<std::size_t>() << " external, "
       << (*a)["n_negative"].get<std::size_t>() << " share\n\n";
  }
  if (const auto gr = read_json(dir / "groups.json")) {
    any = true;
    md << "## Collective influence (" << (*gr)["weighting"].get<std::string>() << ")\n\n";
    md << "| group | n | model | model (normalized) | raw | raw (normalized) |\n";
    md << "|---|---|---|---|---|---|\n";
    for (const auto& [name, g] : (*gr)["groups"].items()) {
      md << "| " << name << " | " << g["n"].get<std::size_t>() << " | " << num(g["model"]["mean"].get<double>())
         << " | " << num(g["model"]["normalized_mean"].get<double>()) << " | ";
      if (g.contains("raw")) {
        md << num(g["raw"]["mean"].get<double>()) << " | " << num(g["raw"]["normalized_mean"].get<double>());
      } else {
        md << "- | -";
      }
      md << " |\n";
    }
    md << "\n";
  }
  if (!any) throw Error("no artifacts to report in " + dir.string());
  write_text(dir / "report.md", md.str());
  out << "wrote " << (dir / "report.md").string() << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Separates endogenous (peer) from exogenous (external) influence in activation cascades."};
  app.name("cascadex");
  app.require_subcommand(1);
  Flags flags;
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "generate a graph and simulate a cascade"},
      {"infer", "fit endogenous parameters and the exogenous series"},
      {"evaluate", "score activations and compare against referral labels"},
      {"influence", "per-user and per-group influence"},
      {"report", "summarize the artifacts in the output directory"},
  };
  for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    ExperimentConfig cfg = flags.config ? load_config(*flags.config) : ExperimentConfig{};
    apply(flags, command, cfg);
    if (command == "report") return cmd_report(cfg, out);
    fs::create_directories(cfg.output);
    if (command == "simulate") return cmd_simulate(cfg, out);
    if (command == "infer") return cmd_infer(cfg, out, err);
    if (command == "evaluate") return cmd_evaluate(cfg, out, err);
    return cmd_influence(cfg, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace cascadex::cli
