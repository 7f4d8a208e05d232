// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: `run` executes a configured Monte-Carlo sweep,
// `demo` solves one default scenario and prints its trace, `check` runs a
// quick invariant suite on small instances.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <random>

#include "fasisac/fasisac.hpp"

namespace {

using namespace fasisac;

int apply_thread_override(int threads) {
  if (const char* env = std::getenv("THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return threads;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::string> out, std::optional<int> trials,
            std::optional<int> threads) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (out) cfg.output = *out;
    if (trials) cfg.trials = *trials;
    if (threads) cfg.threads = *threads;
    cfg.threads = apply_thread_override(cfg.threads);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  }
  try {
    const auto records = run_sweep(cfg);
    write_records(records, cfg.output);
    std::printf("wrote %zu records to %s\n", records.size(), cfg.output.c_str());
    int failures = 0;
    for (const auto& r : records)
      if (!r.converged) ++failures;
    if (failures > 0)
      std::printf("%d record(s) did not converge (kept in-band)\n", failures);
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return 2;
  }
}

int cmd_demo(std::uint64_t seed) {
  try {
    PopulationConfig pop;  // headline defaults
    const ArrayGeometry geom(8, 8, 0.0075, 4, 0.03, 0.0075, 0.015);
    const Scenario sc = generate_scenario(pop, seed, 0);
    SolverConfig cfg;
    cfg.rng_seed = seed;

    const SolveResult res = solve(sc, geom, cfg);
    std::printf("demo seed=%llu M=%d N=%d K=%d I=%d\n",
                static_cast<unsigned long long>(seed), geom.m(), geom.n_rx,
                sc.num_users(), sc.num_clutter());
    for (std::size_t t = 0; t < res.trace.outer.size(); ++t) {
      const OuterRecord& r = res.trace.outer[t];
      std::printf("iter %zu: scnr_db=%.9g power=%.9g min_dist=%.9g", t + 1,
                  to_db(r.scnr), r.power, r.min_dist);
      std::printf(" sinr=[");
      for (int k = 0; k < r.sinr.size(); ++k)
        std::printf(k ? ",%.9g" : "%.9g", r.sinr(k));
      std::printf("]\n");
    }
    const char* status = res.trace.status == SolveStatus::Converged
                             ? "converged"
                             : res.trace.status == SolveStatus::Infeasible
                                   ? "infeasible"
                                   : "max-iterations";
    std::printf("status=%s scnr_db=%.9g\n", status,
                to_db(scnr(res.w, res.pos, sc, geom)));
    std::printf("positions=");
    for (int n = 0; n < res.pos.count(); ++n)
      std::printf("%s(%.9g,%.9g)", n ? " " : "", res.pos.xy(0, n),
                  res.pos.xy(1, n));
    std::printf("\n");
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return 2;
  }
}

bool report(const char* name, bool ok) {
  std::printf("%s %s\n", ok ? "PASS" : "FAIL", name);
  return ok;
}

int cmd_check(std::uint64_t seed) {
  try {
    bool all = true;
    const ArrayGeometry geom(2, 4, 0.0075, 3, 0.03, 0.0075, 0.015);
    PopulationConfig pop;
    pop.users = 2;
    pop.paths = 3;
    pop.clutters = 3;
    pop.noise_user = 0.1;
    pop.noise_radar = 0.1;
    pop.power_budget = 10.0;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    bool tangency_ok = true, major_ok = true, grad_ok = true, dist_ok = true;
    for (int inst = 0; inst < 5; ++inst) {
      const Scenario sc = generate_scenario(pop, seed, inst);
      const Positions pos = centered_grid(geom);
      const auto w0 = initialize_precoder(sc, geom);
      if (!w0) continue;
      const PrecoderExpansion exp = make_precoder_expansion(*w0, pos, sc, geom);
      const double s0 = scnr(*w0, pos, sc, geom);
      tangency_ok &= std::abs(surrogate_precoder_objective(*w0, exp) - s0) <=
                     1e-8 * std::max(1.0, s0);
      for (int draw = 0; draw < 50; ++draw) {
        Precoder w(geom.m(), w0->cols());
        for (Eigen::Index i = 0; i < w.size(); ++i)
          w.data()[i] = cplx(unit(rng), unit(rng));
        w *= std::sqrt(sc.power_budget) / w.norm();
        const double s = scnr(w, pos, sc, geom);
        major_ok &= surrogate_precoder_objective(w, exp) <=
                    s + 1e-8 * std::max(1.0, std::abs(s));
      }
      const QCoefficients qc = q_coefficients(*w0, pos, sc, geom);
      for (int draw = 0; draw < 20; ++draw) {
        const Vec2 r(geom.region * 0.5 * (1 + 0.5 * unit(rng)),
                     geom.region * 0.5 * (1 + 0.5 * unit(rng)));
        const Vec2 g = q_gradient(r, 0, qc, pos);
        const double h = 1e-6 * geom.lambda;
        Vec2 fd;
        for (int d = 0; d < 2; ++d) {
          Vec2 rp = r, rm = r;
          rp(d) += h;
          rm(d) -= h;
          fd(d) = (q_single(rp, 0, qc, pos) - q_single(rm, 0, qc, pos)) / (2 * h);
        }
        grad_ok &= (g - fd).norm() <= 1e-5 * std::max(1.0, g.norm());
      }
      SolverConfig scfg;
      scfg.max_outer = 3;
      const SolveResult res = solve(sc, geom, scfg);
      if (res.trace.status != SolveStatus::Infeasible)
        dist_ok &= res.pos.feasible(geom);
    }
    all &= report("surrogate tangency", tangency_ok);
    all &= report("surrogate majorization (sampled)", major_ok);
    all &= report("q gradient vs finite differences", grad_ok);
    all &= report("solver output positions feasible", dist_ok);
    return all ? 0 : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fluid-antenna MIMO ISAC SCNR maximization"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_opt;
  std::optional<std::string> out_opt;
  std::optional<int> trials_opt, threads_opt;
  std::uint64_t seed_val = 7;

  CLI::App* run = app.add_subcommand("run", "execute a sweep from a config file");
  run->add_option("--config", config_path, "config file path")->required();
  run->add_option("--seed", seed_opt, "override base seed");
  run->add_option("--out", out_opt, "override output CSV path");
  run->add_option("--trials", trials_opt, "override trial count");
  run->add_option("--threads", threads_opt, "override worker thread count");

  CLI::App* demo = app.add_subcommand("demo", "solve one default scenario");
  demo->add_option("--seed", seed_val, "scenario seed");
  demo->add_option("--threads", threads_opt, "ignored (single solve)");

  CLI::App* check = app.add_subcommand("check", "run quick invariant checks");
  check->add_option("--seed", seed_val, "rng seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 1 : 0;
  }

  if (run->parsed())
    return cmd_run(config_path, seed_opt, out_opt, trials_opt, threads_opt);
  if (demo->parsed()) return cmd_demo(seed_val);
  return cmd_check(seed_val);
}
