#pragma once

// One entry point that runs any of the supported methods on a problem and
// returns a uniform outcome: rotation estimate, inlier signs, achieved TLS
// cost, and (for the relaxation methods) the solver state and certificate.

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>

#include "certrot/baselines.hpp"
#include "certrot/certify.hpp"
#include "certrot/problem.hpp"
#include "certrot/relaxation.hpp"
#include "certrot/sdp_solver.hpp"

namespace certrot {

enum class Method { Quasar, Naive, Wahba, Ransac, Brute };

inline Method parse_method(const std::string& name) {
  if (name == "quasar") return Method::Quasar;
  if (name == "naive") return Method::Naive;
  if (name == "wahba") return Method::Wahba;
  if (name == "ransac") return Method::Ransac;
  if (name == "brute") return Method::Brute;
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected quasar|naive|wahba|ransac|brute)");
}

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Quasar: return "quasar";
    case Method::Naive: return "naive";
    case Method::Wahba: return "wahba";
    case Method::Ransac: return "ransac";
    case Method::Brute: return "brute";
  }
  return "unknown";
}

struct SolveOutcome {
  Method method = Method::Quasar;
  RobustRotationEstimate estimate{UnitQuaternion::identity(), Rotation3::identity(), {}, {}, 0.0};
  std::optional<Certificate> certificate;  // relaxation methods only
  std::optional<SdpSolution> sdp;          // relaxation methods only
  bool solver_ok = true;
  std::string status = "ok";
  double wall_time_s = 0.0;
};

// Builds the estimate record for a rotation produced by a baseline: signs are
// the residual-optimal classification, and the reported cost is the TLS cost
// (equal to the lifted cost at that rotation with those signs).
inline RobustRotationEstimate estimate_from_rotation(const Rotation3& rot,
                                                     const RobustWahbaProblem& p) {
  RobustRotationEstimate est{rot_to_quat(rot), rot, classify_inliers(rot, p), {}, 0.0};
  for (int i = 0; i < p.size(); ++i) {
    if (est.theta[static_cast<std::size_t>(i)] == 1) est.inliers.push_back(i);
  }
  est.f_qcqp = tls_cost(rot, p);
  return est;
}

inline SolveOutcome solve_with_method(const RobustWahbaProblem& p, Method method,
                                      const SolverSettings& settings = {},
                                      const RansacParams& ransac_params = {}) {
  SolveOutcome out;
  out.method = method;
  const auto t0 = std::chrono::steady_clock::now();
  switch (method) {
    case Method::Quasar:
    case Method::Naive: {
      const CostMatrices cm = build_cost_matrices(p);
      const SdpProblem sdp = (method == Method::Quasar)
                                 ? build_quasar_sdp(cm.big_q, p.size())
                                 : build_naive_sdp(cm.big_q, p.size());
      SdpSolution sol = solve_sdp(sdp, settings);
      out.status = to_string(sol.status);
      if (sol.status == SolverStatus::NumericalFailure) {
        out.solver_ok = false;
        out.sdp = std::move(sol);
        break;
      }
      out.estimate = round_solution(sol.Z, cm.big_q);
      out.certificate = make_certificate(sdp, sol, out.estimate);
      out.sdp = std::move(sol);
      break;
    }
    case Method::Wahba: {
      const Rotation3 rot = wahba_closed_form(p.correspondences(), inverse_variance_weights(p));
      out.estimate = estimate_from_rotation(rot, p);
      break;
    }
    case Method::Ransac: {
      const RansacResult res = ransac_rotation(p, ransac_params);
      out.estimate = estimate_from_rotation(res.rotation, p);
      out.solver_ok = res.success;
      out.status = res.success ? "ok" : "ransac-no-consensus";
      break;
    }
    case Method::Brute: {
      const BruteForceResult res = brute_force_tls(p);
      out.estimate = estimate_from_rotation(res.rotation, p);
      // Keep the enumerated assignment and its exact optimum (the rotation's
      // residual-optimal signs coincide except on threshold ties).
      out.estimate.theta = res.theta;
      out.estimate.inliers.clear();
      for (int i = 0; i < p.size(); ++i) {
        if (res.theta[static_cast<std::size_t>(i)] == 1) out.estimate.inliers.push_back(i);
      }
      out.estimate.f_qcqp = res.f_star;
      break;
    }
  }
  const auto t1 = std::chrono::steady_clock::now();
  out.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
  return out;
}

}  // namespace certrot
