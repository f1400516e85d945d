// Command-line front end for the certified rotation-search library.
//
// Subcommands:
//   generate  synthesize a random instance and write it as JSON
//   solve     run a method on an instance (JSON or CSV) and write a report
//   certify   independently re-check a solve report against its instance
//   sweep     Monte Carlo grid over (outlier ratio, sigma), CSV output
//
// Exit codes: 0 success, 2 input/parse error, 3 solver or verification
// failure, 4 certificate not tight while --require-tight was given.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <certrot/certrot.hpp>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;
constexpr int kExitNotTight = 4;

json quaternion_to_json(const certrot::UnitQuaternion& q) {
  return json{q.coeffs()[0], q.coeffs()[1], q.coeffs()[2], q.coeffs()[3]};
}

json rotation_to_json(const certrot::Rotation3& rot) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) {
    rows.push_back({rot.matrix()(r, 0), rot.matrix()(r, 1), rot.matrix()(r, 2)});
  }
  return rows;
}

json estimate_to_json(const certrot::RobustRotationEstimate& est) {
  json j;
  j["q"] = quaternion_to_json(est.q);
  j["R"] = rotation_to_json(est.R);
  j["theta"] = est.theta;
  j["inliers"] = est.inliers;
  j["f_qcqp"] = est.f_qcqp;
  return j;
}

json outcome_to_json(const certrot::SolveOutcome& out, const certrot::RobustWahbaProblem& p,
                     const std::optional<certrot::UnitQuaternion>& q_true) {
  json j;
  j["method"] = certrot::to_string(out.method);
  j["n"] = p.size();
  j["cbar_sq"] = p.cbar_sq();
  j["estimate"] = estimate_to_json(out.estimate);
  if (out.certificate) j["certificate"] = certrot::certificate_to_json(*out.certificate);
  if (out.sdp) {
    json s;
    s["status"] = certrot::to_string(out.sdp->status);
    s["iterations"] = out.sdp->iterations;
    s["primal_obj"] = out.sdp->primal_obj;
    s["dual_obj"] = out.sdp->dual_obj;
    s["residuals"] = {{"primal_infeas", out.sdp->residuals.primal_infeas},
                      {"dual_infeas", out.sdp->residuals.dual_infeas},
                      {"duality_gap", out.sdp->residuals.duality_gap}};
    j["solver"] = std::move(s);
  } else {
    j["solver"] = {{"status", out.status}};
  }
  if (q_true) {
    j["rotation_error_rad"] =
        certrot::rotation_geodesic_error(out.estimate.R, certrot::quat_to_rot(*q_true));
  }
  j["wall_time_s"] = out.wall_time_s;
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw std::runtime_error("write failed for " + path);
}

json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw certrot::ParseError(path, 0, "cannot open file");
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw certrot::ParseError(path, 0, std::string("invalid JSON: ") + e.what());
  }
  return j;
}

struct SolveArgs {
  std::string in_path;
  std::string csv_path;
  std::string method = "quasar";
  std::string report_path;
  std::string sdpa_path;
  bool require_tight = false;
  double p_quantile = 1.0 - 1e-4;
  int max_iters = 100000;
  double eps_rel = 1e-8;
  double rho = 1.0;
  bool no_polish = false;
  int ransac_iters = 1000;
  std::uint64_t seed = 0;
};

int run_solve(const SolveArgs& a) {
  certrot::LoadedInstance inst = [&]() -> certrot::LoadedInstance {
    if (!a.in_path.empty()) return certrot::load_instance(a.in_path);
    auto corrs = certrot::load_correspondences(a.csv_path);
    return certrot::LoadedInstance{
        certrot::RobustWahbaProblem::with_default_threshold(std::move(corrs), a.p_quantile),
        std::nullopt, std::nullopt};
  }();

  const certrot::Method method = certrot::parse_method(a.method);
  certrot::SolverSettings settings;
  settings.max_iters = a.max_iters;
  settings.eps_rel = a.eps_rel;
  settings.rho_initial = a.rho;
  settings.polish = !a.no_polish;
  certrot::RansacParams rp;
  rp.max_iters = a.ransac_iters;
  rp.seed = a.seed;

  if (!a.sdpa_path.empty()) {
    if (method != certrot::Method::Quasar && method != certrot::Method::Naive) {
      std::cerr << "error: --sdpa-out requires --method quasar or naive\n";
      return kExitParse;
    }
    const certrot::CostMatrices cm = certrot::build_cost_matrices(inst.problem);
    const certrot::SdpProblem sdp = (method == certrot::Method::Quasar)
                                        ? certrot::build_quasar_sdp(cm.big_q, inst.problem.size())
                                        : certrot::build_naive_sdp(cm.big_q, inst.problem.size());
    certrot::write_sdpa_sparse(sdp, a.sdpa_path);
  }

  const certrot::SolveOutcome out = certrot::solve_with_method(inst.problem, method, settings, rp);
  const json report = outcome_to_json(out, inst.problem, inst.q_true);
  if (!a.report_path.empty()) {
    write_json_file(a.report_path, report);
  } else {
    std::cout << report.dump(2) << '\n';
  }
  if (!out.solver_ok) {
    std::cerr << "error: solver failed (" << out.status << ")\n";
    return kExitSolver;
  }
  if (a.require_tight) {
    if (!out.certificate) {
      std::cerr << "error: --require-tight needs a relaxation method (quasar or naive)\n";
      return kExitParse;
    }
    if (!out.certificate->is_tight) {
      std::cerr << "not tight: relative gap " << out.certificate->relative_gap << ", rank "
                << out.certificate->rank << '\n';
      return kExitNotTight;
    }
  }
  return kExitOk;
}

struct CertifyArgs {
  std::string in_path;
  std::string solution_path;
  bool require_tight = false;
};

// Independent re-verification of a solve report. Everything re-derivable is
// re-derived from the instance: the lifted cost at the reported (q, theta),
// the gap arithmetic, the tightness flag, and weak duality. For noiseless
// all-inlier reports the closed-form dual certificate supplies a solver-free
// global optimality proof.
int run_certify(const CertifyArgs& a) {
  const certrot::LoadedInstance inst = certrot::load_instance(a.in_path);
  const json sol = read_json_file(a.solution_path);

  json checks = json::array();
  bool all_pass = true;
  auto record = [&](const std::string& name, bool pass, const std::string& detail) {
    checks.push_back({{"name", name}, {"pass", pass}, {"detail", detail}});
    all_pass = all_pass && pass;
  };

  certrot::UnitQuaternion q = certrot::UnitQuaternion::identity();
  std::vector<int> theta;
  double f_reported = 0.0;
  try {
    const auto& est = sol.at("estimate");
    const auto& qj = est.at("q");
    if (qj.size() != 4) throw certrot::ParseError(a.solution_path, 0, "estimate.q needs 4 entries");
    q = certrot::UnitQuaternion(certrot::Vec4(qj[0].get<double>(), qj[1].get<double>(),
                                              qj[2].get<double>(), qj[3].get<double>()));
    theta = est.at("theta").get<std::vector<int>>();
    f_reported = est.at("f_qcqp").get<double>();
  } catch (const json::exception& e) {
    throw certrot::ParseError(a.solution_path, 0, std::string("bad report: ") + e.what());
  }
  if (static_cast<int>(theta.size()) != inst.problem.size()) {
    throw certrot::ParseError(a.solution_path, 0, "estimate.theta length does not match instance");
  }
  for (int t : theta) {
    if (t != 1 && t != -1) {
      throw certrot::ParseError(a.solution_path, 0, "estimate.theta entries must be +1 or -1");
    }
  }

  // 1. The reported cost must be the lifted cost at the reported point.
  const certrot::CostMatrices cm = certrot::build_cost_matrices(inst.problem);
  const double f_recomputed = certrot::qcqp_cost(cm, q, theta);
  const double f_tol = 1e-6 * (1.0 + std::abs(f_recomputed));
  record("f_qcqp_recomputation", std::abs(f_recomputed - f_reported) <= f_tol,
         "reported " + std::to_string(f_reported) + ", recomputed " + std::to_string(f_recomputed));

  const bool have_cert = sol.contains("certificate");
  std::optional<certrot::Certificate> cert;
  if (have_cert) {
    cert = certrot::certificate_from_json(sol.at("certificate"));

    // 2. Gap arithmetic and the tightness flag must be self-consistent.
    const certrot::GapValue gap = certrot::relative_gap(cert->f_qcqp, cert->f_sdp);
    const bool gap_ok = std::abs(gap.value - cert->relative_gap) <=
                            1e-9 * (1.0 + std::abs(gap.value)) &&
                        gap.is_absolute == cert->gap_is_absolute;
    record("gap_arithmetic", gap_ok,
           "recomputed gap " + std::to_string(gap.value));
    record("tightness_flag",
           cert->is_tight == (cert->rank == 1 && cert->relative_gap <= 1e-6),
           cert->is_tight ? "tight" : "not tight");

    // 3. The certificate's own f_qcqp must match the estimate's.
    record("certificate_cost_consistency",
           std::abs(cert->f_qcqp - f_reported) <= 1e-9 * (1.0 + std::abs(f_reported)),
           "certificate f_qcqp " + std::to_string(cert->f_qcqp));

    // 4. Weak duality: the relaxation value cannot exceed the lifted cost.
    record("weak_duality", cert->f_sdp <= f_recomputed + f_tol,
           "f_sdp " + std::to_string(cert->f_sdp));
  }

  // 5. Noiseless all-inlier reports admit a closed-form dual certificate that
  // proves global optimality without trusting any solver output.
  bool all_inlier = true;
  for (int t : theta) all_inlier = all_inlier && (t == 1);
  bool noiseless = true;
  const certrot::Rotation3 rot = certrot::quat_to_rot(q);
  for (const certrot::Correspondence& c : inst.problem.correspondences()) {
    noiseless = noiseless && (c.b - rot.matrix() * c.a).norm() <= 1e-9 * (1.0 + c.b.norm());
  }
  if (all_inlier && noiseless) {
    const certrot::NoiselessCertificate nc =
        certrot::construct_noiseless_certificate(inst.problem, q);
    const certrot::DualCheck dc = certrot::check_dual_certificate(
        cm.big_q, nc.mu, certrot::assemble_lambda(nc.lambda_blocks), nc.x_star);
    record("analytic_dual_certificate", dc.verdict,
           "min_eig " + std::to_string(dc.min_eig) + ", multiplicity " +
               std::to_string(dc.zero_eig_multiplicity));
  }

  json verdict;
  verdict["checks"] = std::move(checks);
  verdict["all_pass"] = all_pass;
  std::cout << verdict.dump(2) << '\n';

  if (!all_pass) return kExitSolver;
  if (a.require_tight) {
    if (!have_cert) {
      std::cerr << "error: --require-tight needs a report with a certificate\n";
      return kExitParse;
    }
    if (!cert->is_tight) {
      std::cerr << "not tight: relative gap " << cert->relative_gap << ", rank " << cert->rank
                << '\n';
      return kExitNotTight;
    }
  }
  return kExitOk;
}

struct SweepArgs {
  std::string config_path;
  std::string out_path;
};

int run_sweep_cmd(const SweepArgs& a) {
  const json cfg = read_json_file(a.config_path);
  certrot::SweepGrid grid;
  try {
    grid.outlier_ratios = cfg.at("outlier_ratios").get<std::vector<double>>();
    grid.sigmas = cfg.at("sigmas").get<std::vector<double>>();
    grid.n = cfg.value("n", 20);
    grid.mc_runs = cfg.value("mc_runs", 1);
    grid.methods = cfg.at("methods").get<std::vector<std::string>>();
    grid.seed = cfg.value("seed", std::uint64_t{0});
    grid.max_workers = cfg.value("max_workers", 0);
    if (cfg.contains("solver")) {
      const auto& s = cfg.at("solver");
      grid.solver.max_iters = s.value("max_iters", grid.solver.max_iters);
      grid.solver.eps_rel = s.value("eps_rel", grid.solver.eps_rel);
      grid.solver.rho_initial = s.value("rho_initial", grid.solver.rho_initial);
      grid.solver.polish = s.value("polish", grid.solver.polish);
    }
  } catch (const json::exception& e) {
    throw certrot::ParseError(a.config_path, 0, std::string("bad sweep config: ") + e.what());
  }
  const certrot::BenchReport report = certrot::run_sweep(grid);
  certrot::write_report_csv(a.out_path, report);
  int failures = 0;
  for (const certrot::BenchRow& r : report.rows) {
    if (r.status.rfind("error:", 0) == 0 || r.status == "NumericalFailure") ++failures;
  }
  std::cout << "wrote " << report.rows.size() << " rows (" << failures << " failed runs) to "
            << a.out_path << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certifiably optimal rotation search with outlier rejection"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Synthesize a random instance as JSON");
  certrot::SyntheticConfig gen_cfg;
  std::string gen_out;
  gen->add_option("--n", gen_cfg.n, "Number of correspondences")->capture_default_str();
  gen->add_option("--sigma", gen_cfg.sigma, "Inlier noise std-dev (0 = noiseless)")
      ->capture_default_str();
  gen->add_option("--outlier-ratio", gen_cfg.outlier_ratio, "Fraction of planted outliers")
      ->capture_default_str();
  gen->add_option("--seed", gen_cfg.seed, "Generator seed")->capture_default_str();
  gen->add_option("--p-quantile", gen_cfg.p_quantile,
                  "Inlier quantile defining the rejection threshold")
      ->capture_default_str();
  gen->add_flag_callback("--general-vectors",
                         [&gen_cfg]() { gen_cfg.unit_vectors = false; },
                         "Sample model vectors with random magnitudes instead of unit norm");
  gen->add_option("--out", gen_out, "Output instance path")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "Solve an instance and write a report");
  SolveArgs sa;
  auto* opt_in = solve->add_option("--in", sa.in_path, "Instance JSON path");
  auto* opt_csv = solve->add_option("--csv", sa.csv_path, "Correspondence CSV path");
  opt_in->excludes(opt_csv);
  solve->add_option("--method", sa.method, "quasar|naive|wahba|ransac|brute")
      ->capture_default_str();
  solve->add_option("--report", sa.report_path, "Report JSON path (default: stdout)");
  solve->add_option("--sdpa-out", sa.sdpa_path, "Also export the SDP in sparse SDPA format");
  solve->add_flag("--require-tight", sa.require_tight,
                  "Exit 4 unless the certificate reports tightness");
  solve->add_option("--p-quantile", sa.p_quantile,
                    "Threshold quantile when loading bare CSV correspondences")
      ->capture_default_str();
  solve->add_option("--max-iters", sa.max_iters, "Solver iteration cap")->capture_default_str();
  solve->add_option("--eps-rel", sa.eps_rel, "Solver relative KKT tolerance")
      ->capture_default_str();
  solve->add_option("--rho", sa.rho, "Initial penalty")->capture_default_str();
  solve->add_flag("--no-polish", sa.no_polish, "Disable the dual polishing pass");
  solve->add_option("--ransac-iters", sa.ransac_iters, "RANSAC iteration count")
      ->capture_default_str();
  solve->add_option("--seed", sa.seed, "RANSAC sampling seed")->capture_default_str();

  // certify
  auto* certify = app.add_subcommand("certify", "Re-check a solve report independently");
  CertifyArgs ca;
  certify->add_option("--in", ca.in_path, "Instance JSON path")->required();
  certify->add_option("--solution", ca.solution_path, "Solve report JSON path")->required();
  certify->add_flag("--require-tight", ca.require_tight,
                    "Exit 4 unless the certificate reports tightness");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo grid benchmark, CSV output");
  SweepArgs wa;
  sweep->add_option("--config", wa.config_path, "Sweep configuration JSON")->required();
  sweep->add_option("--out", wa.out_path, "Report CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, returns 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (gen->parsed()) {
      const certrot::SyntheticInstance inst = certrot::generate_instance(gen_cfg);
      write_json_file(gen_out, certrot::instance_to_json(inst));
      std::cout << "wrote n=" << inst.problem.size() << " instance (" << inst.outlier_count
                << " outliers) to " << gen_out << '\n';
      return kExitOk;
    }
    if (solve->parsed()) {
      if (sa.in_path.empty() && sa.csv_path.empty()) {
        std::cerr << "error: solve needs --in or --csv\n";
        return kExitParse;
      }
      return run_solve(sa);
    }
    if (certify->parsed()) return run_certify(ca);
    if (sweep->parsed()) return run_sweep_cmd(wa);
  } catch (const certrot::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const certrot::UnsupportedFormatError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitOk;
}
