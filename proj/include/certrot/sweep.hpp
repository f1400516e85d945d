#pragma once

// Monte Carlo sweeps over (outlier_ratio, sigma) grids: every cell runs
// mc_runs instances (seed = base + flat index, shared across methods so
// methods see identical data), collects per-run rows and per-cell mean/SD
// aggregates, and round-trips through CSV. Cells execute on a small worker
// pool; row order and content are deterministic (wall-clock columns aside).

#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "certrot/io.hpp"
#include "certrot/pipeline.hpp"
#include "certrot/synthetic.hpp"

namespace certrot {

struct SweepGrid {
  std::vector<double> outlier_ratios;
  std::vector<double> sigmas;
  int n = 20;
  int mc_runs = 1;
  std::vector<std::string> methods;  // subset of quasar|naive|wahba|ransac|brute
  std::uint64_t seed = 0;
  SolverSettings solver;
  int max_workers = 0;  // 0: hardware concurrency
};

struct BenchRow {
  std::string method;
  double outlier_ratio = 0.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  double rotation_error_rad = std::numeric_limits<double>::quiet_NaN();
  double f_qcqp = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  double rank = std::numeric_limits<double>::quiet_NaN();
  double stable_rank = std::numeric_limits<double>::quiet_NaN();
  double wall_time_s = 0.0;
  std::string status = "ok";
};

struct BenchAggregate {
  std::string method;
  double outlier_ratio = 0.0;
  double sigma = 0.0;
  int runs = 0;
  // Same column layout as rows; each field is the mean (or SD) over runs,
  // NaN-propagating only where every run was NaN.
  double rotation_error_rad = 0.0;
  double f_qcqp = 0.0;
  double gap = 0.0;
  double rank = 0.0;
  double stable_rank = 0.0;
  double wall_time_s = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<BenchAggregate> means;
  std::vector<BenchAggregate> sds;
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

// Sample standard deviation (n-1 normalization); 0 for a single run.
inline double sd_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (v.size() == 1) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

inline void aggregate_cells(BenchReport& report, const std::vector<std::string>& methods,
                            const std::vector<double>& ratios, const std::vector<double>& sigmas) {
  for (const std::string& method : methods) {
    for (double ratio : ratios) {
      for (double sigma : sigmas) {
        std::vector<double> err, f, gap, rank, stable, wall;
        int runs = 0;
        for (const BenchRow& r : report.rows) {
          if (r.method != method || r.outlier_ratio != ratio || r.sigma != sigma) continue;
          ++runs;
          if (std::isfinite(r.rotation_error_rad)) err.push_back(r.rotation_error_rad);
          if (std::isfinite(r.f_qcqp)) f.push_back(r.f_qcqp);
          if (std::isfinite(r.gap)) gap.push_back(r.gap);
          if (std::isfinite(r.rank)) rank.push_back(r.rank);
          if (std::isfinite(r.stable_rank)) stable.push_back(r.stable_rank);
          wall.push_back(r.wall_time_s);
        }
        if (runs == 0) continue;
        BenchAggregate mean{method, ratio, sigma, runs,
                            mean_of(err), mean_of(f), mean_of(gap),
                            mean_of(rank), mean_of(stable), mean_of(wall)};
        BenchAggregate sd{method, ratio, sigma, runs,
                          sd_of(err), sd_of(f), sd_of(gap),
                          sd_of(rank), sd_of(stable), sd_of(wall)};
        report.means.push_back(std::move(mean));
        report.sds.push_back(std::move(sd));
      }
    }
  }
}

inline std::string csv_num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

}  // namespace detail

inline BenchReport run_sweep(const SweepGrid& grid) {
  if (grid.mc_runs < 1) throw std::invalid_argument("run_sweep: mc_runs must be >= 1");
  if (grid.methods.empty()) throw std::invalid_argument("run_sweep: no methods selected");
  if (grid.outlier_ratios.empty() || grid.sigmas.empty()) {
    throw std::invalid_argument("run_sweep: empty grid");
  }
  std::vector<Method> methods;
  for (const std::string& name : grid.methods) methods.push_back(parse_method(name));

  struct Task {
    int ratio_idx, sigma_idx, run_idx;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  {
    int flat = 0;
    for (int ri = 0; ri < static_cast<int>(grid.outlier_ratios.size()); ++ri) {
      for (int si = 0; si < static_cast<int>(grid.sigmas.size()); ++si) {
        for (int run = 0; run < grid.mc_runs; ++run) {
          tasks.push_back({ri, si, run, grid.seed + static_cast<std::uint64_t>(flat)});
          ++flat;
        }
      }
    }
  }

  BenchReport report;
  report.rows.resize(tasks.size() * methods.size());

  auto run_task = [&](const Task& task) {
    SyntheticConfig cfg;
    cfg.n = grid.n;
    cfg.sigma = grid.sigmas[static_cast<std::size_t>(task.sigma_idx)];
    cfg.outlier_ratio = grid.outlier_ratios[static_cast<std::size_t>(task.ratio_idx)];
    cfg.seed = task.seed;
    const SyntheticInstance inst = generate_instance(cfg);
    const std::size_t task_index =
        (static_cast<std::size_t>(task.ratio_idx) * grid.sigmas.size() +
         static_cast<std::size_t>(task.sigma_idx)) * static_cast<std::size_t>(grid.mc_runs) +
        static_cast<std::size_t>(task.run_idx);
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      BenchRow row;
      row.method = grid.methods[mi];
      row.outlier_ratio = cfg.outlier_ratio;
      row.sigma = cfg.sigma;
      row.seed = task.seed;
      try {
        RansacParams rp;
        rp.seed = task.seed;
        const SolveOutcome outcome = solve_with_method(inst.problem, methods[mi],
                                                       grid.solver, rp);
        row.status = outcome.status;
        row.wall_time_s = outcome.wall_time_s;
        if (outcome.solver_ok || outcome.certificate.has_value()) {
          row.rotation_error_rad = rotation_geodesic_error(outcome.estimate.R, inst.r_true);
          row.f_qcqp = outcome.estimate.f_qcqp;
        }
        if (outcome.certificate) {
          row.gap = outcome.certificate->relative_gap;
          row.rank = outcome.certificate->rank;
          row.stable_rank = outcome.certificate->stable_rank;
        }
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
      }
      report.rows[task_index * methods.size() + mi] = std::move(row);
    }
  };

  unsigned workers = grid.max_workers > 0
                         ? static_cast<unsigned>(grid.max_workers)
                         : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(tasks.size()));
  if (workers <= 1) {
    for (const Task& t : tasks) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) return;
          run_task(tasks[i]);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  detail::aggregate_cells(report, grid.methods, grid.outlier_ratios, grid.sigmas);
  return report;
}

inline void write_report_csv(const std::string& path, const BenchReport& report) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_report_csv: cannot open " + path);
  os << "kind,method,outlier_ratio,sigma,seed_or_runs,rotation_error_rad,f_qcqp,gap,rank,"
        "stable_rank,wall_time_s,status\n";
  for (const BenchRow& r : report.rows) {
    os << "run," << r.method << ',' << detail::csv_num(r.outlier_ratio) << ','
       << detail::csv_num(r.sigma) << ',' << r.seed << ','
       << detail::csv_num(r.rotation_error_rad) << ',' << detail::csv_num(r.f_qcqp) << ','
       << detail::csv_num(r.gap) << ',' << detail::csv_num(r.rank) << ','
       << detail::csv_num(r.stable_rank) << ',' << detail::csv_num(r.wall_time_s) << ','
       << r.status << '\n';
  }
  auto write_agg = [&](const char* kind, const BenchAggregate& a) {
    os << kind << ',' << a.method << ',' << detail::csv_num(a.outlier_ratio) << ','
       << detail::csv_num(a.sigma) << ',' << a.runs << ','
       << detail::csv_num(a.rotation_error_rad) << ',' << detail::csv_num(a.f_qcqp) << ','
       << detail::csv_num(a.gap) << ',' << detail::csv_num(a.rank) << ','
       << detail::csv_num(a.stable_rank) << ',' << detail::csv_num(a.wall_time_s) << ",\n";
  };
  for (const BenchAggregate& a : report.means) write_agg("mean", a);
  for (const BenchAggregate& a : report.sds) write_agg("sd", a);
  if (!os) throw std::runtime_error("write_report_csv: write failed for " + path);
}

// Loads a report CSV and re-derives the aggregates from the run rows,
// failing (ParseError) if the stored aggregates disagree beyond 1e-12.
inline BenchReport load_report_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError(path, 0, "cannot open file");
  std::string line;
  if (!std::getline(is, line)) throw ParseError(path, 1, "empty file");
  if (detail::strip_cr(line) !=
      "kind,method,outlier_ratio,sigma,seed_or_runs,rotation_error_rad,f_qcqp,gap,rank,"
      "stable_rank,wall_time_s,status") {
    throw ParseError(path, 1, "bad report header");
  }
  BenchReport loaded;
  std::vector<BenchAggregate> stored_means, stored_sds;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string row = detail::strip_cr(line);
    if (row.empty()) continue;
    auto fields = detail::split_csv_line(row);
    if (fields.size() != 12) {
      throw ParseError(path, lineno, "expected 12 fields, got " + std::to_string(fields.size()));
    }
    auto num = [&](const std::string& s) -> double {
      if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
      return detail::parse_double_field(s, path, lineno);
    };
    if (fields[0] == "run") {
      BenchRow r;
      r.method = fields[1];
      r.outlier_ratio = num(fields[2]);
      r.sigma = num(fields[3]);
      r.seed = static_cast<std::uint64_t>(std::stoull(fields[4]));
      r.rotation_error_rad = num(fields[5]);
      r.f_qcqp = num(fields[6]);
      r.gap = num(fields[7]);
      r.rank = num(fields[8]);
      r.stable_rank = num(fields[9]);
      r.wall_time_s = num(fields[10]);
      r.status = fields[11];
      loaded.rows.push_back(std::move(r));
    } else if (fields[0] == "mean" || fields[0] == "sd") {
      BenchAggregate a;
      a.method = fields[1];
      a.outlier_ratio = num(fields[2]);
      a.sigma = num(fields[3]);
      a.runs = static_cast<int>(std::stol(fields[4]));
      a.rotation_error_rad = num(fields[5]);
      a.f_qcqp = num(fields[6]);
      a.gap = num(fields[7]);
      a.rank = num(fields[8]);
      a.stable_rank = num(fields[9]);
      a.wall_time_s = num(fields[10]);
      (fields[0] == "mean" ? stored_means : stored_sds).push_back(std::move(a));
    } else {
      throw ParseError(path, lineno, "unknown record kind '" + fields[0] + "'");
    }
  }

  // Recompute aggregates from rows over the distinct cells in stored order.
  std::vector<std::string> methods;
  std::vector<double> ratios, sigmas;
  for (const BenchRow& r : loaded.rows) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
      methods.push_back(r.method);
    }
    if (std::find(ratios.begin(), ratios.end(), r.outlier_ratio) == ratios.end()) {
      ratios.push_back(r.outlier_ratio);
    }
    if (std::find(sigmas.begin(), sigmas.end(), r.sigma) == sigmas.end()) {
      sigmas.push_back(r.sigma);
    }
  }
  detail::aggregate_cells(loaded, methods, ratios, sigmas);

  auto matches = [](const std::vector<BenchAggregate>& got,
                    const std::vector<BenchAggregate>& want) {
    if (got.size() != want.size()) return false;
    auto close = [](double a, double b) {
      if (std::isnan(a) && std::isnan(b)) return true;
      return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a) + std::abs(b));
    };
    for (const BenchAggregate& w : want) {
      bool found = false;
      for (const BenchAggregate& g : got) {
        if (g.method == w.method && g.outlier_ratio == w.outlier_ratio && g.sigma == w.sigma) {
          found = g.runs == w.runs && close(g.rotation_error_rad, w.rotation_error_rad) &&
                  close(g.f_qcqp, w.f_qcqp) && close(g.gap, w.gap) && close(g.rank, w.rank) &&
                  close(g.stable_rank, w.stable_rank) && close(g.wall_time_s, w.wall_time_s);
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  };
  if (!matches(loaded.means, stored_means) || !matches(loaded.sds, stored_sds)) {
    throw ParseError(path, 0, "stored aggregates do not match recomputation from rows");
  }
  return loaded;
}

}  // namespace certrot
