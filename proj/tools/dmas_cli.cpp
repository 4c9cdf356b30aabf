// Command-line front end: run, run-all, validate, list.

#include "dmas/bundled_scenarios.hpp"
#include "dmas/errors.hpp"
#include "dmas/scenario_config.hpp"
#include "dmas/simulation.hpp"
#include "dmas/trace_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;
constexpr int kDiverged = 4;

struct Flags {
  std::optional<std::int64_t> horizon;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
  bool fail_on_divergence = false;
  std::size_t plot_stride = 0;
  unsigned jobs = 0;
};

fs::path output_dir(const Flags& f) {
  if (!f.out.empty()) return f.out;
  if (const char* env = std::getenv("DMAS_OUT_DIR"); env && *env) return env;
  return "dmas_out";
}

dmas::ScenarioConfig load(const std::string& ref, const Flags& f) {
  const dmas::ParseOptions opts{f.horizon, f.seed};
  if (fs::exists(ref)) return dmas::load_scenario_file(ref, opts);
  if (auto doc = dmas::find_bundled(ref)) return dmas::parse_scenario(*doc, opts);
  throw dmas::ConfigError("", "no scenario file or bundled scenario named '" + ref + "'");
}

// Runs one scenario and returns its exit code. Messages go to err.
int run_one(const std::string& ref, const Flags& f, std::ostream& out, std::ostream& err) {
  try {
    const auto cfg = load(ref, f);
    const auto trace = dmas::run(cfg);
    const auto fmt = f.format == "json" ? dmas::OutputFormat::Json : dmas::OutputFormat::Csv;
    const auto files = dmas::emit(trace, output_dir(f), fmt, f.plot_stride);
    const auto& s = trace.summary;
    out << s.scenario << ": " << dmas::to_string(s.predicted) << ", "
        << (s.divergence.diverged ? "diverged" : "bounded") << ", tail error " << s.tail.consensus_err << " -> "
        << files.summary_file.string() << '\n';
    if (f.fail_on_divergence && s.divergence.diverged) return kDiverged;
    return kOk;
  } catch (const dmas::ConfigError& e) {
    err << ref << ": config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const dmas::DimensionError& e) {
    err << ref << ": config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::out_of_range& e) {
    err << ref << ": config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const dmas::NumericalError& e) {
    err << ref << ": numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    err << ref << ": " << e.what() << '\n';
    return kNumericalError;
  }
}

int run_all(const Flags& f) {
  const auto& all = dmas::bundled_scenarios();
  std::vector<int> codes(all.size(), kOk);
  std::vector<std::string> lines(all.size());
  std::atomic<std::size_t> next{0};
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n_workers = std::min<unsigned>(f.jobs ? f.jobs : hw, static_cast<unsigned>(all.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n_workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < all.size(); i = next++) {
        std::ostringstream os;
        codes[i] = run_one(all[i].name, f, os, os);
        lines[i] = os.str();
      }
    });
  }
  for (auto& t : pool) t.join();
  // print in bundle order so output does not depend on scheduling
  for (const auto& l : lines) std::cout << l;
  int worst = kOk;
  for (int c : codes) worst = std::max(worst, c);
  return worst;
}

int validate_cmd(const std::string& ref, const Flags& f) {
  dmas::ScenarioConfig cfg;
  try {
    cfg = load(ref, f);
  } catch (const dmas::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  const auto diag = dmas::validate(cfg);
  for (const auto& w : diag.warnings) std::cout << "warning: " << w << '\n';
  for (const auto& e : diag.errors) std::cout << "error: " << e << '\n';
  std::cout << cfg.name << ": " << (diag.ok ? "ok" : "invalid") << '\n';
  return diag.ok ? kOk : kNumericalError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-time multi-agent consensus under sensor and actuator attacks"};
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--horizon", flags.horizon, "Override the scenario horizon (steps)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", flags.seed, "Seed for randomized initial conditions");
    sub->add_option("--out", flags.out, "Output directory (default $DMAS_OUT_DIR or ./dmas_out)");
    sub->add_option("--format", flags.format, "Trace format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--plot-stride", flags.plot_stride, "Also write every n-th step to <name>.plot.csv");
    sub->add_flag("--fail-on-divergence", flags.fail_on_divergence, "Exit with 4 if any run diverges");
  };

  std::string target;
  auto* run = app.add_subcommand("run", "Run a scenario file or bundled scenario");
  run->add_option("config", target, "Scenario JSON file or bundled name")->required();
  add_common(run);

  auto* all = app.add_subcommand("run-all", "Run every bundled scenario");
  all->add_option("-j,--jobs", flags.jobs, "Worker threads (default: hardware concurrency)");
  add_common(all);

  auto* val = app.add_subcommand("validate", "Static checks without simulating");
  val->add_option("config", target, "Scenario JSON file or bundled name")->required();
  val->add_option("--horizon", flags.horizon, "Override the scenario horizon (steps)");

  app.add_subcommand("list", "List bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  if (run->parsed()) return run_one(target, flags, std::cout, std::cerr);
  if (all->parsed()) return run_all(flags);
  if (val->parsed()) return validate_cmd(target, flags);
  for (const auto& s : dmas::bundled_scenarios()) std::cout << s.name << "  " << s.description << '\n';
  return kOk;
}
