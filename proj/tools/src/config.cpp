#include <fstream>
#include <set>

#include "cascadex/cli/app.hpp"

namespace cascadex::cli {

namespace {

using nlohmann::json;

// A JSON object together with its dotted path, for error messages.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items()) {
      if (!ok.count(k)) throw ConfigError(field(k), "unknown key");
    }
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  Node child(const char* key) const { return Node(j_.at(key), field(key)); }
  const json& raw(const char* key) const { return j_.at(key); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    return v.get<double>();
  }

  std::size_t count(const char* key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      throw ConfigError(field(key), "expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char* key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(field(key), "expected an array of numbers");
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(field(key), "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  optimize::Bound bound(const char* key, optimize::Bound fallback) const {
    if (!has(key)) return fallback;
    const auto v = numbers(key);
    if (v.size() != 2 || !(v[0] <= v[1])) throw ConfigError(field(key), "expected [lo, hi] with lo <= hi");
    return {v[0], v[1]};
  }

 private:
  const json& j_;
  std::string path_;
};

template <class Parse>
auto parse_enum(const Node& node, const char* key, Parse parse, decltype(parse("")) fallback) {
  if (!node.has(key)) return fallback;
  const auto name = node.text(key, "");
  try {
    return parse(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(node.field(key), e.what());
  }
}

void read_graph(const Node& n, GraphSource& g) {
  n.allow({"file", "format", "generator", "n", "m", "p", "degrees", "degree_file"});
  if (n.has("file")) g.file = n.text("file", "");
  const auto format = n.text("format", "edge-list");
  if (format == "edge-list" || format == "edgelist") {
    g.format = GraphFormat::EdgeList;
  } else if (format == "gml") {
    g.format = GraphFormat::Gml;
  } else {
    throw ConfigError(n.field("format"), "unknown graph format '" + format + "' (expected edge-list or gml)");
  }
  g.generator = n.text("generator", g.generator);
  if (g.generator != "holme-kim" && g.generator != "configuration") {
    throw ConfigError(n.field("generator"), "unknown generator '" + g.generator + "' (expected holme-kim or configuration)");
  }
  g.n = n.count("n", g.n);
  g.m = n.count("m", g.m);
  g.p = n.number("p", g.p);
  for (double d : n.numbers("degrees")) {
    if (d < 0 || d != static_cast<double>(static_cast<std::size_t>(d))) {
      throw ConfigError(n.field("degrees"), "degrees must be non-negative integers");
    }
    g.degrees.push_back(static_cast<std::size_t>(d));
  }
  if (n.has("degree_file")) g.degree_file = n.text("degree_file", "");
  if (g.file && (n.has("generator") || !g.degrees.empty() || g.degree_file)) {
    throw ConfigError(n.field("file"), "give either a graph file or a generator, not both");
  }
}

EndogenousModel read_model(const Node& n) {
  n.allow({"kind", "p0", "lambda", "k", "a0"});
  EndogenousModel m;
  m.kind = parse_enum(n, "kind", parse_model_kind, ModelKind::SI);
  m.p0 = n.number("p0", 0.01);
  m.lambda = n.number("lambda", 0.0);
  m.k = n.number("k", 1.0);
  m.a0 = n.number("a0", 1.0);
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(n.field("kind"), e.what());
  }
  return m;
}

ExogenousProfile read_profile(const Node& n) {
  n.allow({"shape", "level", "events", "duration", "omega", "phase", "series", "file"});
  ExogenousProfile p;
  p.shape = parse_enum(n, "shape", parse_profile_shape, ProfileShape::Constant);
  p.level = n.number("level", 0.0);
  p.duration = n.number("duration", 1.0);
  p.omega = n.number("omega", 0.0);
  p.phase = n.number("phase", 0.0);
  p.series = n.numbers("series");
  if (n.has("file")) {
    p.shape = ProfileShape::Custom;
    p.series = load_series_csv(n.text("file", "")).p_ext;
  }
  if (n.has("events")) {
    const auto& ev = n.raw("events");
    if (!ev.is_array()) throw ConfigError(n.field("events"), "expected an array");
    for (std::size_t k = 0; k < ev.size(); ++k) {
      const Node e(ev[k], n.field("events") + "[" + std::to_string(k) + "]");
      e.allow({"start", "peak", "rate"});
      p.events.push_back({e.number("start", 0.0), e.number("peak", 0.0), e.number("rate", 0.0)});
    }
  }
  if (p.level < 0.0 || p.level > 1.0) throw ConfigError(n.field("level"), "must lie in [0, 1]");
  return p;
}

void read_simulation(const Node& n, SimulationSpec& s) {
  n.allow({"model", "profile", "n_seeds", "horizon"});
  if (n.has("model")) s.model = read_model(n.child("model"));
  if (n.has("profile")) s.profile = read_profile(n.child("profile"));
  s.n_seeds = n.count("n_seeds", s.n_seeds);
  s.horizon = n.count("horizon", s.horizon);
  if (s.n_seeds < 1) throw ConfigError(n.field("n_seeds"), "must be >= 1");
  if (s.horizon < 1) throw ConfigError(n.field("horizon"), "must be >= 1");
}

void read_inference(const Node& n, InferenceSpec& s) {
  n.allow({"model", "alpha", "alpha_sweep", "n_all", "epsilon", "max_outer", "lattice", "lattice_size",
           "max_inner", "tolerance", "bounds"});
  auto& st = s.settings;
  auto& opt = st.optimizer;
  s.model = parse_enum(n, "model", parse_model_kind, s.model);
  st.correction.alpha = n.number("alpha", st.correction.alpha);
  if (st.correction.alpha < 0) throw ConfigError(n.field("alpha"), "must be >= 0");
  s.alpha_sweep = n.numbers("alpha_sweep");
  for (double a : s.alpha_sweep) {
    if (a < 0) throw ConfigError(n.field("alpha_sweep"), "values must be >= 0");
  }
  if (n.has("n_all")) st.correction.n_all = n.count("n_all", 0);
  st.epsilon = n.number("epsilon", st.epsilon);
  if (!(st.epsilon > 0)) throw ConfigError(n.field("epsilon"), "must be > 0");
  st.max_outer = static_cast<int>(n.count("max_outer", static_cast<std::size_t>(st.max_outer)));
  opt.lattice = parse_enum(n, "lattice", parse_lattice_mode, opt.lattice);
  opt.lattice_size = n.count("lattice_size", opt.lattice_size);
  if (opt.lattice_size < 1) throw ConfigError(n.field("lattice_size"), "must be >= 1");
  opt.max_inner = static_cast<int>(n.count("max_inner", static_cast<std::size_t>(opt.max_inner)));
  opt.tolerance = n.number("tolerance", opt.tolerance);
  if (n.has("bounds")) {
    const Node b = n.child("bounds");
    b.allow({"p0", "p_ext", "lambda", "k", "a0"});
    opt.p0 = b.bound("p0", opt.p0);
    opt.p_ext = b.bound("p_ext", opt.p_ext);
    opt.lambda = b.bound("lambda", opt.lambda);
    opt.k = b.bound("k", opt.k);
    if (b.has("a0")) opt.a0 = b.bound("a0", {});
    if (opt.p0.lo <= 0 || opt.p0.hi >= 1) throw ConfigError(b.field("p0"), "must lie inside (0, 1)");
    if (opt.p_ext.lo <= 0 || opt.p_ext.hi >= 1) throw ConfigError(b.field("p_ext"), "must lie inside (0, 1)");
    if (opt.lambda.lo < 0) throw ConfigError(b.field("lambda"), "must be >= 0");
  }
}

void read_attribution(const Node& n, AttributionSpec& a) {
  n.allow({"variant", "weighting", "lambda", "groups", "histogram_bins"});
  a.variant = parse_enum(n, "variant", parse_responsibility_variant, a.variant);
  a.weighting = parse_enum(n, "weighting", parse_influence_weighting, a.weighting);
  if (n.has("lambda")) a.lambda = n.number("lambda", 0.0);
  if (n.has("groups")) {
    const auto& g = n.raw("groups");
    if (!g.is_array()) throw ConfigError(n.field("groups"), "expected an array of class names");
    a.groups.clear();
    for (const auto& x : g) {
      if (!x.is_string()) throw ConfigError(n.field("groups"), "expected an array of class names");
      a.groups.push_back(x.get<std::string>());
    }
  }
  a.histogram_bins = n.count("histogram_bins", a.histogram_bins);
  if (a.histogram_bins < 1) throw ConfigError(n.field("histogram_bins"), "must be >= 1");
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& doc) {
  ExperimentConfig cfg;
  const Node root(doc, "");
  root.allow({"seed", "output", "dt", "horizon", "workers", "graph", "sessions", "scores", "simulation",
              "inference", "attribution"});
  if (root.has("seed")) cfg.seed = root.count("seed", 0);
  cfg.output = root.text("output", cfg.output.string());
  cfg.dt = root.number("dt", cfg.dt);
  if (!(cfg.dt > 0)) throw ConfigError("dt", "must be > 0");
  if (root.has("horizon")) cfg.horizon = root.count("horizon", 0);
  if (root.has("graph")) read_graph(root.child("graph"), cfg.graph);
  if (root.has("sessions")) cfg.sessions = root.text("sessions", "");
  if (root.has("scores")) cfg.scores = root.text("scores", "");
  if (root.has("simulation")) read_simulation(root.child("simulation"), cfg.simulation);
  if (root.has("inference")) read_inference(root.child("inference"), cfg.inference);
  if (root.has("attribution")) read_attribution(root.child("attribution"), cfg.attribution);
  cfg.inference.settings.workers = root.count("workers", cfg.inference.settings.workers);
  if (cfg.inference.settings.workers < 1) throw ConfigError("workers", "must be >= 1");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace cascadex::cli
