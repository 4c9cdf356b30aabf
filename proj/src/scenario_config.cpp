#include "dmas/scenario_config.hpp"

#include "dmas/errors.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

namespace dmas {

using nlohmann::json;

const char* to_string(ControllerKind k) { return k == ControllerKind::Baseline ? "baseline" : "resilient"; }

ModelPreset model_preset(const std::string& name) {
  if (name == "auv_diving") {
    Mat A(4, 4), B(4, 2), K0(2, 4);
    A << 0.65, 0.54, 0.0, -0.0019,
         0.21, 1.48, 0.0, -0.01,
         0.83, 0.84, 1.0, 0.99,
         0.11, 1.21, 0.0, 0.99;
    B << 0.08, 0.13,
         -0.13, 0.20,
         0.02, 0.09,
         -0.07, 0.09;
    K0 << -0.18, -2.25, 0.13, -0.21,
          1.56, 5.39, 0.49, 1.59;
    return {name, A, B, K0};
  }
  if (name == "single_integrator") return {name, Mat::Ones(1, 1), Mat::Ones(1, 1), std::nullopt};
  if (name == "rotation2d") {
    Mat A(2, 2), B(2, 1);
    A << 0.0, -1.0, 1.0, 0.0;
    B << 0.0, 1.0;
    return {name, A, B, std::nullopt};
  }
  throw ConfigError("/model", "unknown preset '" + name + "'");
}

std::vector<std::string> model_preset_names() { return {"auv_diving", "single_integrator", "rotation2d"}; }

namespace {

std::string join(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string join(const std::string& path, std::size_t idx) { return path + "/" + std::to_string(idx); }

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

std::int64_t get_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::size_t get_index(const json& j, const std::string& path) {
  const auto v = get_integer(j, path);
  if (v < 0) throw ConfigError(path, "must be nonnegative");
  return static_cast<std::size_t>(v);
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

Vec get_vector(const json& j, const std::string& path) {
  if (j.is_number()) return Vec::Constant(1, get_number(j, path));
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a nonempty array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = get_number(j[i], join(path, i));
  return v;
}

Mat get_matrix(const json& j, const std::string& path) {
  if (j.is_number()) return Mat::Constant(1, 1, get_number(j, path));
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a nonempty array of rows");
  if (!j[0].is_array()) {
    // a flat array is read as a single row
    const Vec row = get_vector(j, path);
    return row.transpose();
  }
  const std::size_t cols = j[0].size();
  Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto rp = join(path, r);
    if (!j[r].is_array() || j[r].size() != cols) throw ConfigError(rp, "rows must all have " + std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = get_number(j[r][c], join(rp, c));
  }
  return m;
}

Mat get_weight(const json& j, const std::string& path, Eigen::Index dim) {
  // scalar s means s * I
  if (j.is_number()) return get_number(j, path) * Mat::Identity(dim, dim);
  Mat m = get_matrix(j, path);
  if (m.rows() != dim || m.cols() != dim)
    throw ConfigError(path, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
  return m;
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

SignalGenerator parse_signal(const json& j, const std::string& path, std::size_t dim) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  const auto type_path = join(path, "type");
  if (!j.contains("type")) throw ConfigError(type_path, "missing");
  const std::string type = get_string(j["type"], type_path);
  auto sized = [&](Vec v, const std::string& p) {
    if (v.size() == 1 && dim > 1) v = Vec::Constant(static_cast<Eigen::Index>(dim), v(0));
    if (static_cast<std::size_t>(v.size()) != dim)
      throw ConfigError(p, "expected " + std::to_string(dim) + " components");
    return v;
  };
  if (type == "constant") {
    const auto p = join(path, "value");
    if (!j.contains("value")) throw ConfigError(p, "missing");
    return SignalGenerator::constant(sized(get_vector(j["value"], p), p));
  }
  if (type == "sin") {
    const auto p = join(path, "amplitude");
    if (!j.contains("amplitude")) throw ConfigError(p, "missing");
    const Vec amp = sized(get_vector(j["amplitude"], p), p);
    const auto op = join(path, "omega");
    if (!j.contains("omega")) throw ConfigError(op, "missing");
    double omega = 0.0;
    if (j["omega"].is_string()) {
      // exact multiples of pi avoid round-off in the IMP classification
      const std::string s = j["omega"].get<std::string>();
      if (s == "pi/2") omega = std::numbers::pi / 2;
      else if (s == "pi") omega = std::numbers::pi;
      else if (s == "pi/4") omega = std::numbers::pi / 4;
      else throw ConfigError(op, "expected a number or one of pi, pi/2, pi/4");
    } else {
      omega = get_number(j["omega"], op);
    }
    const double phase = j.contains("phase") ? get_number(j["phase"], join(path, "phase")) : 0.0;
    return SignalGenerator::sinusoid(amp, omega, phase);
  }
  if (type == "exogenous") {
    const auto wp = join(path, "W");
    const auto fp = join(path, "f0");
    if (!j.contains("W")) throw ConfigError(wp, "missing");
    if (!j.contains("f0")) throw ConfigError(fp, "missing");
    const Mat W = get_matrix(j["W"], wp);
    const Vec f0 = get_vector(j["f0"], fp);
    if (W.rows() != W.cols() || static_cast<std::size_t>(W.rows()) != dim)
      throw ConfigError(wp, "must be square with " + std::to_string(dim) + " rows");
    if (f0.size() != W.rows()) throw ConfigError(fp, "size must match W");
    return SignalGenerator::exogenous(W, f0);
  }
  throw ConfigError(type_path, "unknown signal type '" + type + "' (constant, sin, exogenous)");
}

void parse_graph(const json& j, ScenarioConfig& cfg) {
  const std::string path = "/graph";
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  if (const json* adj = find(j, "adjacency")) {
    const Mat a = get_matrix(*adj, join(path, "adjacency"));
    if (a.rows() != a.cols()) throw ConfigError(join(path, "adjacency"), "must be square");
    cfg.n_agents = static_cast<std::size_t>(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index k = 0; k < a.cols(); ++k)
        if (i != k && a(i, k) != 0.0)
          cfg.edges.push_back({static_cast<AgentIndex>(k), static_cast<AgentIndex>(i), a(i, k)});
    return;
  }
  const auto np = join(path, "agents");
  if (!j.contains("agents")) throw ConfigError(np, "missing (or give an adjacency matrix)");
  cfg.n_agents = get_index(j["agents"], np);
  if (cfg.n_agents < 2) throw ConfigError(np, "need at least 2 agents");
  const auto ep = join(path, "edges");
  if (!j.contains("edges") || !j["edges"].is_array()) throw ConfigError(ep, "expected an array of [from, to, weight]");
  const json& edges = j["edges"];
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto p = join(ep, e);
    const json& item = edges[e];
    if (!item.is_array() || item.size() < 2 || item.size() > 3) throw ConfigError(p, "expected [from, to] or [from, to, weight]");
    Edge edge;
    edge.from = get_index(item[0], join(p, 0));
    edge.to = get_index(item[1], join(p, 1));
    edge.weight = item.size() == 3 ? get_number(item[2], join(p, 2)) : 1.0;
    if (edge.from >= cfg.n_agents) throw ConfigError(join(p, 0), "agent index out of range");
    if (edge.to >= cfg.n_agents) throw ConfigError(join(p, 1), "agent index out of range");
    if (edge.from == edge.to) throw ConfigError(p, "self loops are not allowed");
    if (edge.weight < 0.0) throw ConfigError(join(p, 2), "weight must be nonnegative");
    cfg.edges.push_back(edge);
  }
}

Vec parse_x0(const json& j, const ScenarioConfig& cfg, std::optional<std::uint64_t> seed) {
  const std::string path = "/x0";
  const auto n = static_cast<Eigen::Index>(cfg.A.rows());
  const auto total = static_cast<Eigen::Index>(cfg.n_agents) * n;
  if (j.is_object()) {
    const auto rp = join(path, "random");
    if (!j.contains("random")) throw ConfigError(rp, "missing; x0 objects describe a random draw");
    const double scale = get_number(j["random"], rp);
    if (!seed && j.contains("seed")) seed = static_cast<std::uint64_t>(get_index(j["seed"], join(path, "seed")));
    std::mt19937_64 rng(seed.value_or(0));
    std::uniform_real_distribution<double> dist(-scale, scale);
    Vec x(total);
    for (Eigen::Index i = 0; i < total; ++i) x(i) = dist(rng);
    return x;
  }
  if (!j.is_array()) throw ConfigError(path, "expected an array or {\"random\": scale}");
  Vec x(total);
  if (!j.empty() && j[0].is_array()) {
    if (j.size() != cfg.n_agents) throw ConfigError(path, "expected one entry per agent");
    for (std::size_t i = 0; i < j.size(); ++i) {
      const Vec xi = get_vector(j[i], join(path, i));
      if (xi.size() != n) throw ConfigError(join(path, i), "expected " + std::to_string(n) + " components");
      x.segment(static_cast<Eigen::Index>(i) * n, n) = xi;
    }
    return x;
  }
  const Vec flat = get_vector(j, path);
  if (flat.size() != total) throw ConfigError(path, "expected " + std::to_string(total) + " entries");
  return flat;
}

}  // namespace

ScenarioConfig parse_scenario(const json& doc, const ParseOptions& opts) {
  if (!doc.is_object()) throw ConfigError("", "scenario must be a JSON object");
  ScenarioConfig cfg;
  cfg.name = doc.contains("name") ? get_string(doc["name"], "/name") : "unnamed";
  if (doc.contains("description")) cfg.description = get_string(doc["description"], "/description");

  std::optional<Mat> preset_k0;
  if (!doc.contains("model")) throw ConfigError("/model", "missing");
  const json& model = doc["model"];
  if (model.is_string()) {
    const ModelPreset p = model_preset(model.get<std::string>());
    cfg.model_name = p.name;
    cfg.A = p.A;
    cfg.B = p.B;
    preset_k0 = p.K0;
  } else if (model.is_object()) {
    if (!model.contains("A")) throw ConfigError("/model/A", "missing");
    if (!model.contains("B")) throw ConfigError("/model/B", "missing");
    cfg.model_name = "custom";
    cfg.A = get_matrix(model["A"], "/model/A");
    cfg.B = get_matrix(model["B"], "/model/B");
    if (cfg.A.rows() != cfg.A.cols()) throw ConfigError("/model/A", "must be square");
    if (cfg.B.rows() != cfg.A.rows()) throw ConfigError("/model/B", "must have as many rows as A");
  } else {
    throw ConfigError("/model", "expected a preset name or {\"A\": ..., \"B\": ...}");
  }
  const auto n = cfg.A.rows();
  const auto m = cfg.B.cols();

  if (!doc.contains("graph")) throw ConfigError("/graph", "missing");
  parse_graph(doc["graph"], cfg);

  if (opts.horizon) {
    cfg.horizon = *opts.horizon;
  } else {
    if (!doc.contains("horizon")) throw ConfigError("/horizon", "missing");
    cfg.horizon = get_integer(doc["horizon"], "/horizon");
  }
  if (cfg.horizon < 1) throw ConfigError("/horizon", "must be at least 1");

  cfg.seed = opts.seed;
  if (!cfg.seed && doc.contains("seed")) cfg.seed = static_cast<std::uint64_t>(get_index(doc["seed"], "/seed"));
  if (!doc.contains("x0")) throw ConfigError("/x0", "missing");
  cfg.x0 = parse_x0(doc["x0"], cfg, cfg.seed);

  if (doc.contains("controller")) {
    const std::string c = get_string(doc["controller"], "/controller");
    if (c == "baseline") cfg.controller = ControllerKind::Baseline;
    else if (c == "resilient") cfg.controller = ControllerKind::Resilient;
    else throw ConfigError("/controller", "expected \"baseline\" or \"resilient\"");
  }

  cfg.design.Q1 = Mat::Identity(n, n);
  cfg.design.R1 = Mat::Identity(m, m);
  if (doc.contains("design")) {
    const json& d = doc["design"];
    if (!d.is_object()) throw ConfigError("/design", "expected an object");
    if (d.contains("Q1")) cfg.design.Q1 = get_weight(d["Q1"], "/design/Q1", n);
    if (d.contains("R1")) cfg.design.R1 = get_weight(d["R1"], "/design/R1", m);
    if (d.contains("K")) {
      Mat K = get_matrix(d["K"], "/design/K");
      if (K.rows() != m || K.cols() != n)
        throw ConfigError("/design/K", "expected " + std::to_string(m) + "x" + std::to_string(n));
      cfg.design.K = K;
    }
    if (d.contains("c")) {
      const double c = get_number(d["c"], "/design/c");
      if (c <= 0.0) throw ConfigError("/design/c", "must be positive");
      cfg.design.c = c;
    }
    if (d.contains("theta")) {
      const double th = get_number(d["theta"], "/design/theta");
      if (th <= 0.0 || th >= 1.0) throw ConfigError("/design/theta", "must lie in (0, 1)");
      cfg.design.theta = th;
    }
    if (d.contains("zeta")) {
      cfg.zeta = get_number(d["zeta"], "/design/zeta");
      if (cfg.zeta < 0.0) throw ConfigError("/design/zeta", "must be nonnegative");
    }
  }

  if (doc.contains("attacks")) {
    const json& arr = doc["attacks"];
    if (!arr.is_array()) throw ConfigError("/attacks", "expected an array");
    for (std::size_t a = 0; a < arr.size(); ++a) {
      const auto p = join("/attacks", a);
      const json& item = arr[a];
      if (!item.is_object()) throw ConfigError(p, "expected an object");
      AttackSpec spec;
      if (!item.contains("agent")) throw ConfigError(join(p, "agent"), "missing");
      spec.target_agent = get_index(item["agent"], join(p, "agent"));
      if (spec.target_agent >= cfg.n_agents) throw ConfigError(join(p, "agent"), "agent index out of range");
      const std::string ch = item.contains("channel") ? get_string(item["channel"], join(p, "channel")) : "actuator";
      if (ch == "actuator") spec.channel = Channel::Actuator;
      else if (ch == "sensor") spec.channel = Channel::Sensor;
      else throw ConfigError(join(p, "channel"), "expected \"actuator\" or \"sensor\"");
      if (item.contains("start")) {
        spec.start_step = get_integer(item["start"], join(p, "start"));
        if (spec.start_step < 0) throw ConfigError(join(p, "start"), "must be nonnegative");
      }
      if (!item.contains("signal")) throw ConfigError(join(p, "signal"), "missing");
      const auto dim = static_cast<std::size_t>(spec.channel == Channel::Actuator ? m : n);
      spec.generator = parse_signal(item["signal"], join(p, "signal"), dim);
      cfg.attacks.push_back(std::move(spec));
    }
  }

  if (doc.contains("compensator_start")) {
    cfg.compensator_start = get_integer(doc["compensator_start"], "/compensator_start");
    if (cfg.compensator_start < 0) throw ConfigError("/compensator_start", "must be nonnegative");
  }

  if (doc.contains("predictor_init")) {
    const json& pi = doc["predictor_init"];
    if (pi.is_string()) {
      if (pi.get<std::string>() != "match") throw ConfigError("/predictor_init", "expected \"match\" or a state vector");
    } else {
      const Vec v = get_vector(pi, "/predictor_init");
      if (v.size() != cfg.x0.size())
        throw ConfigError("/predictor_init", "expected " + std::to_string(cfg.x0.size()) + " entries");
      cfg.predictor_init = v;
    }
  }

  if (doc.contains("leader")) {
    const json& l = doc["leader"];
    if (!l.is_object()) throw ConfigError("/leader", "expected an object");
    LeaderConfig leader;
    leader.agent = l.contains("agent") ? get_index(l["agent"], "/leader/agent") : 0;
    if (leader.agent >= cfg.n_agents) throw ConfigError("/leader/agent", "agent index out of range");
    if (l.contains("K0")) {
      leader.K0 = get_matrix(l["K0"], "/leader/K0");
    } else if (preset_k0) {
      leader.K0 = *preset_k0;
    } else {
      throw ConfigError("/leader/K0", "missing and the model preset has no leader gain");
    }
    if (leader.K0.rows() != m || leader.K0.cols() != n)
      throw ConfigError("/leader/K0", "expected " + std::to_string(m) + "x" + std::to_string(n));
    if (l.contains("reference"))
      leader.reference = parse_signal(l["reference"], "/leader/reference", static_cast<std::size_t>(m));
    else
      leader.reference = SignalGenerator::constant(Vec::Zero(m));
    for (const auto& e : cfg.edges)
      if (e.to == leader.agent) throw ConfigError("/leader/agent", "the leader must not have incoming edges");
    for (std::size_t a = 0; a < cfg.attacks.size(); ++a)
      if (cfg.attacks[a].target_agent == leader.agent)
        throw ConfigError(join(join("/attacks", a), "agent"), "the leader is assumed attack-free");
    cfg.leader = std::move(leader);
  }

  if (doc.contains("divergence_threshold")) {
    cfg.divergence_threshold = get_number(doc["divergence_threshold"], "/divergence_threshold");
    if (cfg.divergence_threshold <= 0.0) throw ConfigError("/divergence_threshold", "must be positive");
  }
  return cfg;
}

ScenarioConfig load_scenario_file(const std::filesystem::path& path, const ParseOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", path.string() + ": " + e.what());
  }
  return parse_scenario(doc, opts);
}

DirectedGraph build_graph(const ScenarioConfig& cfg) { return DirectedGraph::from_edges(cfg.n_agents, cfg.edges); }

}  // namespace dmas
