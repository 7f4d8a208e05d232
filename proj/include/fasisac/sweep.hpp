// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo sweep execution and CSV persistence. Cells are independent
// (paired scenarios within a cell) and run on a worker pool; output order is
// deterministic regardless of completion order.

#pragma once

#include <atomic>
#include <cstdio>
#include <thread>

#include "fasisac/baselines.hpp"
#include "fasisac/config.hpp"

namespace fasisac {

struct SweepRecord {
  std::string scheme;
  std::string sweep_var;
  double sweep_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double scnr_linear = 0.0;
  bool converged = false;
  int iterations = 0;
  double ms = 0.0;
};

inline double to_db(double linear) {
  return linear > 0.0 ? 10.0 * std::log10(linear)
                      : -std::numeric_limits<double>::infinity();
}

/// One (sweep point, trial) cell: a shared scenario consumed by each scheme.
inline std::vector<SweepRecord> run_cell(const ExperimentConfig& cfg,
                                         double value, int trial) {
  PopulationConfig pop = cfg.population;
  double region = cfg.region;
  switch (cfg.sweep) {
    case SweepVariable::Region: region = value; break;
    case SweepVariable::Power: pop.power_budget = value; break;
    case SweepVariable::Gamma: pop.gamma = value; break;
  }
  const std::uint64_t cell_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(trial));
  const Scenario sc = generate_scenario(pop, cfg.seed, static_cast<std::uint64_t>(trial));
  const ArrayGeometry geom = cfg.geometry(region);

  std::vector<SweepRecord> out;
  for (Scheme s : cfg.schemes) {
    SweepRecord rec;
    rec.scheme = scheme_name(s);
    rec.sweep_var = sweep_name(cfg.sweep);
    rec.sweep_value = value;
    rec.trial = trial;
    rec.seed = cell_seed;
    try {
      if (s == Scheme::Fas) {
        const auto t0 = std::chrono::steady_clock::now();
        const SolveResult sr = solve(sc, geom, cfg.solver);
        rec.ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
        rec.iterations = sr.trace.iterations;
        rec.converged = sr.trace.status == SolveStatus::Converged;
        if (sr.trace.status != SolveStatus::Infeasible)
          rec.scnr_linear = scnr(sr.w, sr.pos, sc, geom);
      } else {
        const BaselineResult r = run_scheme(s, sc, geom, cfg.solver);
        rec.scnr_linear = r.scnr_value;
        rec.converged = r.status == BaselineStatus::Ok;
        rec.ms = r.ms;
        rec.iterations = 1;
      }
    } catch (const std::exception&) {
      rec.converged = false;  // per-trial failures stay in-band
    }
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<SweepRecord> run_sweep(const ExperimentConfig& cfg) {
  const std::vector<double> values = cfg.sweep_values();
  struct Cell {
    double value;
    int trial;
  };
  std::vector<Cell> cells;
  for (double v : values)
    for (int t = 0; t < cfg.trials; ++t) cells.push_back({v, t});

  std::vector<std::vector<SweepRecord>> results(cells.size());
  std::atomic<std::size_t> next{0};
  const int threads = std::max(1, cfg.threads);
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      results[i] = run_cell(cfg, cells[i].value, cells[i].trial);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<SweepRecord> flat;
  for (auto& cell : results)
    for (auto& r : cell) flat.push_back(std::move(r));
  // Deterministic order: scheme, sweep value, trial.
  std::sort(flat.begin(), flat.end(), [](const SweepRecord& a, const SweepRecord& b) {
    if (a.scheme != b.scheme) return a.scheme < b.scheme;
    if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
    return a.trial < b.trial;
  });
  return flat;
}

/// CSV with round-trip precision for reals; LF line endings.
inline void write_records(const std::vector<SweepRecord>& records,
                          const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
  std::fputs("scheme,sweep_var,sweep_value,trial,seed,scnr_db,scnr_linear,"
             "converged,iterations,ms\n",
             f);
  for (const SweepRecord& r : records) {
    std::fprintf(f, "%s,%s,%.17g,%d,%llu,%.17g,%.17g,%d,%d,%.17g\n",
                 r.scheme.c_str(), r.sweep_var.c_str(), r.sweep_value, r.trial,
                 static_cast<unsigned long long>(r.seed), to_db(r.scnr_linear),
                 r.scnr_linear, r.converged ? 1 : 0, r.iterations, r.ms);
  }
  if (std::fclose(f) != 0)
    throw std::runtime_error("error writing output file '" + path + "'");
}

/// Minimal reader for the writer's own format (round-trip checks, plotting).
inline std::vector<SweepRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
  std::string line;
  std::getline(in, line);  // header
  std::vector<SweepRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    SweepRecord r;
    std::getline(ss, r.scheme, ',');
    std::getline(ss, r.sweep_var, ',');
    std::getline(ss, field, ','); r.sweep_value = std::strtod(field.c_str(), nullptr);
    std::getline(ss, field, ','); r.trial = std::atoi(field.c_str());
    std::getline(ss, field, ','); r.seed = std::strtoull(field.c_str(), nullptr, 10);
    std::getline(ss, field, ',');  // scnr_db (derived)
    std::getline(ss, field, ','); r.scnr_linear = std::strtod(field.c_str(), nullptr);
    std::getline(ss, field, ','); r.converged = field == "1";
    std::getline(ss, field, ','); r.iterations = std::atoi(field.c_str());
    std::getline(ss, field, ','); r.ms = std::strtod(field.c_str(), nullptr);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace fasisac
