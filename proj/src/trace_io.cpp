#include "dmas/trace_io.hpp"


#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dmas {

namespace {

void header_block(std::ostream& os, const char* name, std::size_t agents, std::size_t dim) {
  for (std::size_t i = 0; i < agents; ++i)
    for (std::size_t j = 0; j < dim; ++j) os << ',' << name << '[' << i << "][" << j << ']';
}

void put(std::ostream& os, double v) {
  if (std::isfinite(v)) {
    os << v;
  } else {
    os << (std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf"));
  }
}

void row_block(std::ostream& os, const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    os << ',';
    put(os, v(i));
  }
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json vec_json(const Vec& v) {
  auto a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number_or_null(v(i)));
  return a;
}

nlohmann::json opt_json(const std::optional<double>& v) { return v ? number_or_null(*v) : nlohmann::json(nullptr); }

void write_atomic(const std::filesystem::path& target, const std::string& content) {
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace

std::string csv_header(const SimulationTrace& t) {
  std::ostringstream os;
  const std::size_t N = t.n_agents;
  os << 'k';
  header_block(os, "x", N, t.state_dim);
  header_block(os, "xhat", N, t.state_dim);
  header_block(os, "u", N, t.input_dim);
  header_block(os, "d", N, t.input_dim);
  header_block(os, "eps", N, t.state_dim);
  os << ",gamma";
  header_block(os, "xc", N, t.state_dim);
  header_block(os, "f", N, t.input_dim);
  header_block(os, "epsbar", N, t.state_dim);
  for (std::size_t i = 0; i < N; ++i) os << ",err[" << i << ']';
  return os.str();
}

void write_csv(std::ostream& os, const SimulationTrace& t) {
  os.precision(17);
  os << csv_header(t) << '\n';
  for (const auto& s : t.steps) {
    os << s.k;
    row_block(os, s.x);
    row_block(os, s.x_hat);
    row_block(os, s.u);
    row_block(os, s.d);
    row_block(os, s.metrics.eps);
    os << ',';
    put(os, s.metrics.gamma_global);
    row_block(os, s.x_c);
    row_block(os, s.f);
    row_block(os, s.metrics.eps_bar);
    row_block(os, s.metrics.consensus_err);
    os << '\n';
  }
}

nlohmann::json summary_json(const SimulationTrace& t) {
  const auto& s = t.summary;
  nlohmann::json j;
  j["scenario"] = s.scenario;
  j["controller"] = s.controller;
  j["agents"] = t.n_agents;
  j["state_dim"] = t.state_dim;
  j["input_dim"] = t.input_dim;
  j["horizon"] = s.horizon;
  j["steps_completed"] = s.steps_completed;
  j["verdict"] = to_string(s.predicted);
  j["verdict_matches_simulation"] = s.predicted_matches_empirical;
  j["divergence"] = {
      {"diverged", s.divergence.diverged},
      {"first_step", s.divergence.first_step ? nlohmann::json(*s.divergence.first_step) : nlohmann::json(nullptr)},
      {"secular_growth", s.divergence.secular_growth},
      {"growth_rate", number_or_null(s.divergence.growth_rate)},
      {"final_state_norm", number_or_null(s.divergence.final_state_norm)},
  };
  const auto& tail = s.tail;
  nlohmann::json agent_err = nlohmann::json::array();
  for (double v : tail.agent_consensus_err) agent_err.push_back(number_or_null(v));
  nlohmann::json agent_eps = nlohmann::json::array();
  for (double v : tail.agent_eps) agent_eps.push_back(number_or_null(v));
  j["tail"] = {
      {"consensus_err", number_or_null(tail.consensus_err)},
      {"agent_consensus_err", agent_err},
      {"agent_eps", agent_eps},
      {"gamma_min", number_or_null(tail.gamma_min)},
      {"gamma_max", number_or_null(tail.gamma_max)},
      {"state_max", number_or_null(tail.state_max)},
      {"dtilde", number_or_null(tail.dtilde)},
      {"stationary", tail.stationary},
  };
  j["design"] = {
      {"K_inf_norm", number_or_null(s.K_norm)},
      {"c", number_or_null(s.c)},
      {"theta", number_or_null(s.theta)},
      {"theta_max", number_or_null(s.theta_max)},
  };
  j["bounds"] = {
      {"dtilde", opt_json(s.dtilde_bound)},
      {"consensus_threshold", opt_json(s.consensus_threshold)},
      {"deviation", opt_json(s.deviation_bound)},
  };
  j["energy"] = {{"eps", number_or_null(s.eps_energy)}, {"attack", number_or_null(s.attack_energy)}};
  j["notes"] = s.notes;
  return j;
}

void write_plot_data(std::ostream& os, const SimulationTrace& t, std::size_t stride) {
  if (stride == 0) stride = 1;
  os.precision(10);
  os << 'k';
  header_block(os, "x", t.n_agents, t.state_dim);
  os << ",gamma,consensus_err\n";
  for (std::size_t i = 0; i < t.steps.size(); i += stride) {
    const auto& s = t.steps[i];
    os << s.k;
    row_block(os, s.x);
    os << ',';
    put(os, s.metrics.gamma_global);
    os << ',';
    put(os, s.metrics.consensus_err_global);
    os << '\n';
  }
}

EmitResult emit(const SimulationTrace& t, const std::filesystem::path& dir, OutputFormat format,
                std::size_t plot_stride) {
  std::filesystem::create_directories(dir);
  const std::string stem = t.summary.scenario.empty() ? "scenario" : t.summary.scenario;
  EmitResult res;
  if (format == OutputFormat::Csv) {
    std::ostringstream os;
    write_csv(os, t);
    res.trace_file = dir / (stem + ".csv");
    write_atomic(res.trace_file, os.str());
  } else {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : t.steps) {
      steps.push_back({{"k", s.k},
                       {"x", vec_json(s.x)},
                       {"x_c", vec_json(s.x_c)},
                       {"x_hat", vec_json(s.x_hat)},
                       {"u", vec_json(s.u)},
                       {"d", vec_json(s.d)},
                       {"f", vec_json(s.f)},
                       {"eps", vec_json(s.metrics.eps)},
                       {"eps_bar", vec_json(s.metrics.eps_bar)},
                       {"gamma", number_or_null(s.metrics.gamma_global)},
                       {"consensus_err", vec_json(s.metrics.consensus_err)}});
    }
    res.trace_file = dir / (stem + ".trace.json");
    write_atomic(res.trace_file, steps.dump() + "\n");
  }
  res.summary_file = dir / (stem + ".summary.json");
  write_atomic(res.summary_file, summary_json(t).dump(2) + "\n");
  if (plot_stride > 0) {
    std::ostringstream os;
    write_plot_data(os, t, plot_stride);
    res.plot_file = dir / (stem + ".plot.csv");
    write_atomic(res.plot_file, os.str());
  }
  return res;
}

}  // namespace dmas
