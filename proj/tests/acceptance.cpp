// Acceptance checks 1-8. One PASS/FAIL line per criterion, details indented
// below it. Exit status is the number of failed criteria.

#include "fixtures.hpp"

#include "dmas/bundled_scenarios.hpp"
#include "dmas/metrics.hpp"
#include "dmas/simulation.hpp"
#include "dmas/trace_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

using namespace dmas;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Report {
  int failures = 0;
  std::vector<std::string> details;

  void note(const std::string& s) { details.push_back(s); }
  bool check(bool ok, const std::string& what) {
    details.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
    return ok;
  }
  void finish(int id, const char* title, bool ok) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, title);
    for (const auto& d : details) std::printf("      %s\n", d.c_str());
    std::fflush(stdout);
    details.clear();
    failures += ok ? 0 : 1;
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

json four_agent(int horizon) {
  auto j = json::parse(R"({
    "name": "acc_four_agent", "model": "single_integrator",
    "graph": {"agents": 4, "edges": [[1, 0], [0, 1], [1, 2], [0, 3]]},
    "x0": [2, 4, 9, -3], "design": {"K": 1, "c": 1}})");
  j["horizon"] = horizon;
  return j;
}

json unit_attack(int agent) {
  return json::array({{{"agent", agent}, {"channel", "actuator"}, {"signal", {{"type", "constant"}, {"value", 1}}}}});
}

json bundled(const std::string& name) {
  auto doc = find_bundled(name);
  if (!doc) throw std::runtime_error("missing bundled scenario " + name);
  return *doc;
}

// 1. attack-free consensus
void criterion1(Report& r) {
  const auto t0 = Clock::now();
  const auto tr = run(parse_scenario(four_agent(200)));
  const double elapsed = seconds_since(t0);
  std::int64_t hit = -1;
  for (const auto& s : tr.steps)
    if ((s.x - Vec::Constant(4, 3.0)).cwiseAbs().maxCoeff() < 1e-6) {
      hit = s.k;
      break;
    }
  bool ok = r.check(hit >= 0, "max |x_i - 3| < 1e-6 reached at step " + std::to_string(hit) + " (< 200)");
  ok &= r.check(elapsed < 1.0, "runtime " + num(elapsed) + " s < 1 s");
  r.finish(1, "attack-free consensus to the root average", ok);
}

// 2. root-node IMP destabilization
void criterion2(Report& r) {
  auto doc = four_agent(100000);
  doc["attacks"] = unit_attack(0);
  doc["divergence_threshold"] = 1e6;
  const auto cfg = parse_scenario(doc);
  const auto prep = prepare(cfg);
  const auto tr = run(prep);
  const auto& s = tr.summary;

  bool ok = r.check(s.divergence.diverged, "divergence flag set (secular growth " +
                                               std::string(s.divergence.secular_growth ? "yes" : "no") + ")");
  ok &= r.check(prep.predicted == Verdict::Destabilize, std::string("verdict ") + to_string(prep.predicted));
  ok &= r.check(s.predicted_matches_empirical, "verdict agrees with the simulation");

  // at least linear growth: ||x(k)||_inf / k bounded below over the second half
  double min_ratio = std::numeric_limits<double>::infinity();
  double peak = 0.0;
  for (std::size_t k = tr.steps.size() / 2; k < tr.steps.size(); ++k) {
    const double nx = tr.steps[k].x.cwiseAbs().maxCoeff();
    peak = std::max(peak, nx);
    min_ratio = std::min(min_ratio, nx / static_cast<double>(k));
  }
  const std::size_t last = tr.steps.size() - 1;
  ok &= r.check(min_ratio > 0.1, "growth at least linear: min ||x(k)|| / k over second half = " + num(min_ratio));
  ok &= r.check(peak > 1e6, "||x||_inf exceeds 1e6 within 1e5 steps (reached " + num(peak) + " at step " +
                                std::to_string(tr.steps[last].k) + ")");
  r.note("the projected attack r'f = 0.5 per step bounds growth to about 0.5 k, so 1e6 needs about 2e6 steps");
  r.finish(2, "root-node IMP attack destabilizes the network", ok);
}

// 3. non-root bounded deviation and tracking-error blindness
void criterion3(Report& r) {
  auto doc = four_agent(10000);
  doc["attacks"] = unit_attack(2);
  const auto tr = run(parse_scenario(doc));
  double max_state = 0.0;
  for (const auto& s : tr.steps) max_state = std::max(max_state, s.x.cwiseAbs().maxCoeff());
  bool ok = r.check(max_state < 1e3, "||x||_inf over 1e4 steps = " + num(max_state) + " < 1e3");
  const std::vector<AgentIndex> hit{2};
  const auto rep = hinf_bypass_report(tr, hit, 0.1, 1e-8);
  ok &= r.check(rep.intact_tail_eps < 1e-8, "tail eps of intact agents = " + num(rep.intact_tail_eps) + " < 1e-8");
  ok &= r.check(rep.tail_gamma > 0.1, "tail Gamma = " + num(rep.tail_gamma) + " > 0.1");

  // five agents: 2 is attacked, 3 and 4 are reachable from it, 0 and 1 are not
  auto five = bundled("five_agent_nonroot_constant");
  five["horizon"] = 10000;
  const auto attacked = run(parse_scenario(five));
  five.erase("attacks");
  const auto clean = run(parse_scenario(five));
  const auto g = fixtures::five_agent_graph();
  const std::size_t tb = tail_begin(attacked.steps.size());
  for (std::size_t i : {0u, 1u, 3u, 4u}) {
    double dev = 0.0;
    for (std::size_t k = tb; k < attacked.steps.size(); ++k)
      dev = std::max(dev, std::abs(attacked.steps[k].x(static_cast<Eigen::Index>(i)) -
                                   clean.steps[k].x(static_cast<Eigen::Index>(i))));
    if (is_reachable(g, 2, i))
      ok &= r.check(dev > 1e-3, "reachable agent " + std::to_string(i) + " deviates " + num(dev) + " > 1e-3");
    else
      ok &= r.check(dev < 1e-8, "unreachable agent " + std::to_string(i) + " deviates " + num(dev) + " < 1e-8");
  }
  r.finish(3, "non-root attack: bounded deviation, intact tracking errors vanish", ok);
}

// 4. spectral invariants on random digraphs
void criterion4(Report& r) {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<std::size_t> size(2, 12);
  std::uniform_real_distribution<double> density(0.0, 0.4);
  int disc_bad = 0, lemma_bad = 0, root_bad = 0, quad_bad = 0;
  double worst_disc = 0.0, worst_lemma = -std::numeric_limits<double>::infinity(), worst_quad = worst_lemma;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = size(rng);
    const auto g = fixtures::random_spanning_digraph(rng, n, density(rng));
    const auto s = normalized_laplacian(g);
    for (const auto& l : s.nonzero_eigenvalues()) {
      const double d = std::abs(l - Complex(1.0, 0.0));
      worst_disc = std::max(worst_disc, d);
      if (d > 1.0 + 1e-9) ++disc_bad;
    }
    const Mat& L = s.normalized_laplacian;
    const Mat M = L.transpose() * L - 2.0 * L;
    const double lam = eigenvalues(M).real().maxCoeff();
    worst_lemma = std::max(worst_lemma, lam);
    if (lam > 1e-9) ++lemma_bad;
    const Mat sym = 0.5 * (M + M.transpose());
    const double q = Eigen::SelfAdjointEigenSolver<Mat>(sym).eigenvalues().maxCoeff();
    worst_quad = std::max(worst_quad, q);
    if (q > 1e-9) ++quad_bad;
    const auto oracle = fixtures::root_oracle(g.adjacency());
    for (std::size_t i = 0; i < n; ++i)
      if (s.is_root(i) != oracle[i]) ++root_bad;
  }
  bool ok = r.check(disc_bad == 0, "|lambda - 1| <= 1 + 1e-9 for all nonzero eigenvalues (worst " +
                                       num(worst_disc) + ", violations " + std::to_string(disc_bad) + ")");
  ok &= r.check(lemma_bad == 0, "max Re eig(Lhat'Lhat - 2 Lhat) <= 1e-9 (worst " + num(worst_lemma) +
                                    ", violating graphs " + std::to_string(lemma_bad) + " of 500)");
  ok &= r.check(root_bad == 0, "root set equals reachability oracle (mismatches " + std::to_string(root_bad) + ")");
  r.note("info: quadratic-form reading, max eig of the symmetric part: worst " + num(worst_quad) + ", positive on " +
         std::to_string(quad_bad) + " of 500");
  r.finish(4, "spectral invariants over 500 random spanning-tree digraphs", ok);
}

// 5. Riccati correctness and Schur designs
void criterion5(Report& r) {
  bool ok = true;
  const Mat one = Mat::Ones(1, 1);
  const auto golden = solve_dare(one, one, one, one);
  ok &= r.check(golden.residual < 1e-8 && std::abs(golden.P(0, 0) - (1 + std::sqrt(5.0)) / 2) < 1e-10,
                "scalar: P = " + num(golden.P(0, 0)) + ", residual " + num(golden.residual));
  const auto rot = model_preset("rotation2d");
  const auto pr = solve_dare(rot.A, rot.B, Mat::Identity(2, 2), Mat::Identity(1, 1));
  ok &= r.check(pr.residual < 1e-8, "rotation2d residual " + num(pr.residual));
  const auto auv = model_preset("auv_diving");
  const auto pa = solve_dare(auv.A, auv.B, Mat::Identity(4, 4), Mat::Identity(2, 2));
  ok &= r.check(pa.residual < 1e-8, "auv_diving residual " + num(pa.residual));

  for (const auto& b : bundled_scenarios()) {
    const auto prep = prepare(parse_scenario(b.doc));
    double worst = 0.0;
    for (const auto& l : prep.spectrum.nonzero_eigenvalues())
      worst = std::max(worst, mode_radius(prep.model, l, prep.ctrl.K, prep.ctrl.c));
    ok &= r.check(worst < 1.0, b.name + ": max rho(A - c lambda_i B K) = " + num(worst));
  }
  r.finish(5, "Riccati residuals and Schur consensus modes", ok);
}

// 6. resilient mitigation
void criterion6(Report& r) {
  const auto t0 = Clock::now();
  bool ok = true;
  const std::vector<std::pair<std::string, std::string>> pairs{
      {"auv_sin_agent3_baseline", "auv_sin_agent3_resilient"},
      {"auv_const_agent2_baseline", "auv_const_agent2_resilient"},
      {"rotation_root_imp_baseline", "rotation_root_imp_resilient"},
      {"rotation_nonroot_imp_baseline", "rotation_nonroot_imp_resilient"},
  };
  for (const auto& [base_name, res_name] : pairs) {
    const auto base = run(parse_scenario(bundled(base_name)));
    const auto res_cfg = parse_scenario(bundled(res_name));
    const auto res = run(res_cfg);
    const auto& bs = base.summary;
    const auto& rs = res.summary;
    const double thr = rs.consensus_threshold.value_or(std::numeric_limits<double>::quiet_NaN());
    const std::string tag = res_name + ": ";
    const bool res_bounded = !rs.divergence.diverged;
    ok &= r.check(res_bounded, tag + "resilient run stays bounded");
    ok &= r.check(res_bounded && rs.tail.consensus_err < thr,
                  tag + "tail ||x - xhat||_inf = " + num(rs.tail.consensus_err) + " < threshold " + num(thr));
    const bool reduced = bs.divergence.diverged || rs.tail.consensus_err * 100.0 <= bs.tail.consensus_err;
    ok &= r.check(res_bounded && reduced, tag + "baseline tail " + num(bs.tail.consensus_err) +
                                              (bs.divergence.diverged ? " (diverged)" : "") + " vs resilient " +
                                              num(rs.tail.consensus_err) + ", need 100x");
    for (const auto& a : res_cfg.attacks) {
      if (a.channel != Channel::Actuator) continue;
      const double own = rs.tail.agent_consensus_err[a.target_agent];
      ok &= r.check(res_bounded && own < thr,
                    tag + "compromised agent " + std::to_string(a.target_agent) + " tail error " + num(own));
    }
    r.note(tag + "theta " + num(rs.theta) + " (bound " + num(rs.theta_max) + "), tail ||d - f||_inf " +
           num(rs.tail.dtilde) + ", dtilde bound " + num(rs.dtilde_bound.value_or(NAN)));
  }
  const double elapsed = seconds_since(t0);
  ok &= r.check(elapsed < 10.0, "runtime " + num(elapsed) + " s < 10 s");
  r.finish(6, "resilient controller mitigates the bundled attacks", ok);
}

// 7. compensator bound over a theta grid
void criterion7(Report& r) {
  bool ok = true;
  struct Case {
    std::string label;
    json doc;
  };
  std::vector<Case> cases;
  {
    auto d = four_agent(3000);
    d["attacks"] = unit_attack(2);
    d["controller"] = "resilient";
    cases.push_back({"four_agent agent 2", d});
  }
  {
    auto d = bundled("auv_const_agent2_resilient");
    d["horizon"] = 4000;
    cases.push_back({"auv agent 2", d});
  }
  for (auto& c : cases) {
    const auto theta_max = prepare(parse_scenario(c.doc)).ctrl.theta_max;
    for (int i = 1; i <= 9; ++i) {
      const double theta = 0.1 * i * theta_max;
      c.doc["design"]["theta"] = theta;
      const auto cfg = parse_scenario(c.doc);
      const auto prep = prepare(cfg);
      const auto tr = run(prep);
      // 2-norm over the network, after the compensator and attack are both on
      double f_norm = 0.0;
      double lim_sup = 0.0;
      for (std::size_t k = tail_begin(tr.steps.size()); k < tr.steps.size(); ++k) {
        const auto& s = tr.steps[k];
        f_norm = std::max(f_norm, s.f.norm());
        lim_sup = std::max(lim_sup, (s.d - s.f).norm());
      }
      std::string bound_text = "undefined";
      bool pass = false;
      if (tr.summary.divergence.diverged) {
        bound_text = "run diverged";
      } else {
        try {
          const double bound = dtilde_bound(prep.ctrl, f_norm, cfg.zeta);
          bound_text = num(bound);
          pass = lim_sup <= bound;
        } catch (const std::exception& e) {
          bound_text = e.what();
        }
      }
      ok &= r.check(pass, c.label + ", theta " + num(theta) + " (" + std::to_string(i) + "0% of bound): lim sup ||d - f|| = " +
                              num(lim_sup) + ", bound " + bound_text + ", compensated radius " +
                              num(prep.ctrl.compensated_radius));
    }
  }
  r.finish(7, "compensator error stays within its bound for constant attacks", ok);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// 8. determinism and superposition
void criterion8(Report& r) {
  bool ok = true;
  const auto dir = std::filesystem::temp_directory_path() / "dmas_acceptance";
  std::filesystem::remove_all(dir);
  for (const char* name : {"auv_sin_agent3_resilient", "rotation_root_imp_baseline", "four_agent_sensor_attack_resilient"}) {
    const auto a = emit(run(parse_scenario(bundled(name))), dir / "a", OutputFormat::Csv, 5);
    const auto b = emit(run(parse_scenario(bundled(name))), dir / "b", OutputFormat::Csv, 5);
    const bool same = slurp(a.trace_file) == slurp(b.trace_file) && slurp(a.summary_file) == slurp(b.summary_file) &&
                      slurp(a.plot_file) == slurp(b.plot_file);
    ok &= r.check(same, std::string(name) + ": re-run output byte-identical");
  }
  std::filesystem::remove_all(dir);

  // x(k) = A_c^k x(0) + sum_j A_c^{k-1-j} (I (x) B) f(j), and the split of a
  // run into initial-condition and per-attack parts.
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> agents(3, 6), sdim(1, 3), idim(1, 2), pick(0, 1000);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst_closed = 0.0, worst_split = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const int N = agents(rng), n = sdim(rng), m = idim(rng);
    Mat A(n, n), B(n, m), K(m, n);
    for (int i = 0; i < n * n; ++i) A.data()[i] = 0.5 * gauss(rng);
    for (int i = 0; i < n * m; ++i) B.data()[i] = gauss(rng);
    for (int i = 0; i < n * m; ++i) K.data()[i] = 0.3 * gauss(rng);
    json doc;
    doc["name"] = "superposition";
    doc["model"] = {{"A", json::array()}, {"B", json::array()}};
    for (int i = 0; i < n; ++i) {
      json ra = json::array(), rb = json::array();
      for (int j = 0; j < n; ++j) ra.push_back(A(i, j));
      for (int j = 0; j < m; ++j) rb.push_back(B(i, j));
      doc["model"]["A"].push_back(ra);
      doc["model"]["B"].push_back(rb);
    }
    json edges = json::array();
    for (int i = 1; i < N; ++i) edges.push_back({pick(rng) % i, i});
    edges.push_back({N - 1, 0});
    doc["graph"] = {{"agents", N}, {"edges", edges}};
    doc["horizon"] = 50;
    json krows = json::array();
    for (int i = 0; i < m; ++i) {
      json row = json::array();
      for (int j = 0; j < n; ++j) row.push_back(K(i, j));
      krows.push_back(row);
    }
    doc["design"] = {{"K", krows}, {"c", 0.7}};
    json x0 = json::array();
    for (int i = 0; i < N * n; ++i) x0.push_back(gauss(rng));
    doc["x0"] = x0;
    const int t1 = pick(rng) % N, t2 = pick(rng) % N;
    json a1 = {{"agent", t1}, {"channel", "actuator"}, {"start", 3},
               {"signal", {{"type", "sin"}, {"amplitude", gauss(rng)}, {"omega", 0.4}, {"phase", 0.3}}}};
    json a2 = {{"agent", t2}, {"channel", "sensor"},
               {"signal", {{"type", "constant"}, {"value", gauss(rng)}}}};
    doc["attacks"] = json::array({a1, a2});
    doc["divergence_threshold"] = 1e300;

    const auto prep = prepare(parse_scenario(doc));
    const auto full = run(prep);
    const Mat Ac = assemble_closed_loop(prep.model, prep.spectrum, prep.ctrl).matrix;
    const Mat IB = kron(Mat::Identity(N, N), prep.model.B());
    Vec x = prep.config.x0;
    for (std::size_t k = 0; k < full.steps.size(); ++k) {
      const double scale = std::max(1.0, x.norm());
      worst_closed = std::max(worst_closed, (full.steps[k].x - x).norm() / scale);
      x = Ac * x + IB * full.steps[k].f;
    }

    auto only = [&](json attacks, bool zero_x0) {
      json d = doc;
      d["attacks"] = attacks;
      if (zero_x0) d["x0"] = json::array();
      if (zero_x0)
        for (int i = 0; i < N * n; ++i) d["x0"].push_back(0.0);
      return run(parse_scenario(d));
    };
    const auto free_run = only(json::array(), false);
    const auto part1 = only(json::array({a1}), true);
    const auto part2 = only(json::array({a2}), true);
    for (std::size_t k = 0; k < full.steps.size(); ++k) {
      const Vec sum = free_run.steps[k].x + part1.steps[k].x + part2.steps[k].x;
      const double scale = std::max(1.0, full.steps[k].x.norm());
      worst_split = std::max(worst_split, (full.steps[k].x - sum).norm() / scale);
    }
  }
  ok &= r.check(worst_closed <= 1e-10, "closed-form propagation, worst relative error " + num(worst_closed));
  ok &= r.check(worst_split <= 1e-10, "superposition of x0 and attack parts, worst relative error " + num(worst_split));
  r.finish(8, "determinism and linearity", ok);
}

}  // namespace

int main() {
  Report r;
  const std::vector<void (*)(Report&)> all{criterion1, criterion2, criterion3, criterion4,
                                           criterion5, criterion6, criterion7, criterion8};
  for (std::size_t i = 0; i < all.size(); ++i) {
    try {
      all[i](r);
    } catch (const std::exception& e) {
      r.note(std::string("exception: ") + e.what());
      r.finish(static_cast<int>(i + 1), "aborted", false);
    }
  }
  std::printf("%d of %zu criteria failed\n", r.failures, all.size());
  return r.failures == 0 ? 0 : 1;
}
