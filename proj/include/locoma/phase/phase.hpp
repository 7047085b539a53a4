#pragma once

#include <algorithm>
#include <cmath>

#include "locoma/core/demo.hpp"
#include "locoma/core/pose.hpp"

namespace locoma {

enum class PhaseEngine { adaptive = 0, nominal = 1, nns = 2 };

inline const char* engine_name(PhaseEngine e) {
  switch (e) {
    case PhaseEngine::adaptive: return "adaptive";
    case PhaseEngine::nominal: return "nominal";
    case PhaseEngine::nns: return "nns";
  }
  return "?";
}

inline PhaseEngine engine_from_name(const std::string& s) {
  if (s == "adaptive") return PhaseEngine::adaptive;
  if (s == "nominal") return PhaseEngine::nominal;
  if (s == "nns") return PhaseEngine::nns;
  throw ContractViolation("unknown phase engine: " + s);
}

struct PhaseConfig {
  double k = 10.0;       // > 1
  double lambda = -50.0; // < 0
  double sigma1 = 0.01;  // residual rate scale
  double T_task = 15.0;
  double dt = 0.02;
  // weights of the three task-level tracking terms (base position, base
  // orientation, object joint)
  double w1 = -0.2;
  double w2 = -0.2;
  double w4 = -0.2;
  double nns_window = 0.05;
  double delta_v_clamp = 10.0;
  PhaseEngine engine = PhaseEngine::adaptive;
};

struct PhaseState {
  double phi = 0.0;
  double phi_bar = 0.0;
  double vhat = 1.0;  // last reference rate
  double phi_init = 0.0;

  static PhaseState reset(double phi_init) { return {phi_init, phi_init, 1.0, phi_init}; }
};

/// Squared task-level tracking errors used by the reference phase rate.
struct TrackErrors {
  double base_pos_sq = 0.0;  // m^2
  double base_yaw_sq = 0.0;  // rad^2
  double object_sq = 0.0;    // rad^2 or m^2
};

/// Reference phase rate: product of clipped exponentials of the task-level
/// tracking rewards r_i = w_i * error_i (r_i <= 0). Perfect tracking within
/// the margin ln(k)/lambda gives exactly 1.
inline double phase_rate_ref(const TrackErrors& e, const PhaseConfig& cfg) {
  double v = 1.0;
  const double r[3] = {cfg.w1 * e.base_pos_sq, cfg.w2 * e.base_yaw_sq, cfg.w4 * e.object_sq};
  for (double ri : r) v *= std::min(cfg.k * std::exp(-cfg.lambda * ri), 1.0);
  return v;
}

/// Adaptive dynamics: phi' = phi + (vhat + sigma1 * delta_v) * dt / T_task.
/// The residual can drive the phase backwards. The nominal twin advances at
/// unit rate. Both are clamped to [0, 1].
inline PhaseState phase_step_adaptive(const PhaseState& ps, double vhat, double delta_v,
                                      const PhaseConfig& cfg) {
  const double dv = std::clamp(delta_v, -cfg.delta_v_clamp, cfg.delta_v_clamp);
  PhaseState out = ps;
  out.phi = std::clamp(ps.phi + (vhat + cfg.sigma1 * dv) * cfg.dt / cfg.T_task, 0.0, 1.0);
  out.phi_bar = std::clamp(ps.phi_bar + cfg.dt / cfg.T_task, 0.0, 1.0);
  out.vhat = vhat;
  return out;
}

inline PhaseState phase_step_nominal(const PhaseState& ps, const PhaseConfig& cfg) {
  PhaseState out = ps;
  out.phi_bar = std::clamp(ps.phi_bar + cfg.dt / cfg.T_task, 0.0, 1.0);
  out.phi = out.phi_bar;
  out.vhat = 1.0;
  return out;
}

/// Nearest-neighbor phase update: pick the knot phase minimizing the weighted
/// state distance within a +-window around the current phase. Ties break
/// toward the larger phase.
inline PhaseState phase_step_nns(const PhaseState& ps, const Pose2& base, double q_o,
                                 const Demonstration& demo, const PhaseConfig& cfg) {
  const int n = demo.knot_count();
  if (n < 2) throw ContractViolation("phase_step_nns: empty demonstration");
  const double lo = ps.phi - cfg.nns_window;
  const double hi = ps.phi + cfg.nns_window;
  int j_lo = std::max(0, static_cast<int>(std::ceil(lo * (n - 1) - 1e-12)));
  int j_hi = std::min(n - 1, static_cast<int>(std::floor(hi * (n - 1) + 1e-12)));
  if (j_hi < j_lo) j_lo = j_hi = std::clamp(static_cast<int>(std::lround(ps.phi * (n - 1))), 0, n - 1);

  double best = std::numeric_limits<double>::infinity();
  int best_j = j_lo;
  for (int j = j_lo; j <= j_hi; ++j) {
    const DemoKnot& k = demo.knots[j];
    const PoseDelta d = pose_boxminus(base, k.robot.base);
    const double dist = std::abs(cfg.w1) * (d.dx * d.dx + d.dy * d.dy) +
                        std::abs(cfg.w2) * d.dyaw * d.dyaw +
                        std::abs(cfg.w4) * (q_o - k.q_o) * (q_o - k.q_o);
    if (dist <= best) {  // <= keeps the larger phase on ties
      best = dist;
      best_j = j;
    }
  }
  PhaseState out = ps;
  const double phi_new = demo.knot_phase(best_j);
  out.vhat = (phi_new - ps.phi) * cfg.T_task / cfg.dt;  // implied rate, logged only
  out.phi = phi_new;
  out.phi_bar = std::clamp(ps.phi_bar + cfg.dt / cfg.T_task, 0.0, 1.0);
  return out;
}

/// Task-phase progress relative to the nominal twin. By convention 1 at
/// episode start (phi_bar == phi_init).
inline double phase_progress(const PhaseState& ps) {
  const double denom = ps.phi_bar - ps.phi_init;
  if (denom <= 0.0) return 1.0;
  return (ps.phi - ps.phi_init) / denom;
}

}  // namespace locoma
