#pragma once

#include <array>
#include <cmath>
#include <string>

#include "locoma/core/demo.hpp"
#include "locoma/core/types.hpp"
#include "locoma/phase/phase.hpp"

namespace locoma {

/// Reward weights. Tracking and regularization weights are non-positive;
/// progress gains are positive. When dt_scale is set every term is multiplied
/// by the control time-step.
struct RewardWeights {
  double w1 = -0.2;    // base position tracking
  double w2 = -0.2;    // base orientation tracking
  double w3 = -0.2;    // arm joint tracking
  double w4 = -0.2;    // object joint tracking (gated by the object indicator)
  double w5 = -10.0;   // EE-to-handle tracking (gated by the prehensile indicator)
  double kappa1 = 25.0;
  double kappa2 = 10.0;
  double beta1 = -2.5e-5;  // applied actuation ||tau||^2
  double beta2 = -1.0e-5;  // joint accelerations
  double beta3 = -1.0e-5;  // joint velocities
  double beta4 = -0.5;     // base lateral slip velocity (body frame)
  double beta5 = -0.05;    // yaw-rate deviation from reference
  double beta6 = -0.05;    // action rate
  bool dt_scale = true;
};

constexpr int kNumRewardTerms = 12;
inline const std::array<std::string, kNumRewardTerms>& reward_term_names() {
  static const std::array<std::string, kNumRewardTerms> names{
      "track_base_pos", "track_base_yaw", "track_joint",   "track_object",
      "track_ee_handle", "phase_progress", "pen_torque",    "pen_joint_acc",
      "pen_joint_vel",   "pen_base_slip",  "pen_yaw_rate",  "pen_action_rate"};
  return names;
}

struct RewardBreakdown {
  double r_track = 0.0;
  double r_phase = 0.0;
  double r_regularize = 0.0;
  double r_total = 0.0;
  std::array<double, kNumRewardTerms> terms{};
};

/// Reference-tracking reward. Indicators come from the reference mode m*:
/// the object term is active when any end-effector interacts, the EE-handle
/// term when the prehensile interaction is scheduled. The joint term covers
/// the two arm joints; the base is tracked by the dedicated pose terms.
inline double reward_track(const RobotState& s, const ObjectState& o, const DemoSample& ref,
                           const RewardWeights& w, double dt, const Vec2& handle_pos,
                           std::array<double, kNumRewardTerms>* terms = nullptr) {
  const double scale = w.dt_scale ? dt : 1.0;
  const PoseDelta d = pose_boxminus(s.base, ref.robot.base);
  const double t_pos = w.w1 * (d.dx * d.dx + d.dy * d.dy) * scale;
  const double t_yaw = w.w2 * d.dyaw * d.dyaw * scale;
  double qj = 0.0;
  for (int j = 0; j < 2; ++j) {
    const double e = s.q_arm[j] - ref.robot.q_arm[j];
    qj += e * e;
  }
  const double t_joint = w.w3 * qj * scale;
  const double ind_object = ref.mode.any_contact() ? 1.0 : 0.0;
  const double eo = o.q_o - ref.q_o;
  const double t_object = w.w4 * ind_object * eo * eo * scale;
  const double ind_preh = ref.mode.prehensile_active() ? 1.0 : 0.0;
  const double t_ee = w.w5 * ind_preh * (s.ee_pos - handle_pos).squaredNorm() * scale;
  if (terms) {
    (*terms)[0] = t_pos;
    (*terms)[1] = t_yaw;
    (*terms)[2] = t_joint;
    (*terms)[3] = t_object;
    (*terms)[4] = t_ee;
  }
  return t_pos + t_yaw + t_joint + t_object + t_ee;
}

/// Task-progress reward: kappa1 * vhat * exp(-kappa2 (phi - phi_bar)^2).
inline double reward_phase(double vhat, double phi, double phi_bar, const RewardWeights& w,
                           double dt) {
  const double scale = w.dt_scale ? dt : 1.0;
  const double gap = phi - phi_bar;
  return w.kappa1 * vhat * std::exp(-w.kappa2 * gap * gap) * scale;
}

/// Inputs to the regularization penalties, read from the simulator's
/// actuation stage (post-saturation).
struct RegularizeInputs {
  std::array<double, 5> tau{};
  std::array<double, 5> qdd{};
  std::array<double, 5> qd{};
  double base_slip_vel = 0.0;     // body-frame lateral velocity
  double yaw_rate_dev = 0.0;      // yaw rate minus reference yaw rate
  std::array<double, 6> action{};
  std::array<double, 6> prev_action{};
};

inline double reward_regularize(const RegularizeInputs& in, const RewardWeights& w, double dt,
                                std::array<double, kNumRewardTerms>* terms = nullptr) {
  const double scale = w.dt_scale ? dt : 1.0;
  double tau2 = 0.0, qdd2 = 0.0, qd2 = 0.0, da2 = 0.0;
  for (int i = 0; i < 5; ++i) {
    tau2 += in.tau[i] * in.tau[i];
    qdd2 += in.qdd[i] * in.qdd[i];
    qd2 += in.qd[i] * in.qd[i];
  }
  for (int i = 0; i < 6; ++i) {
    const double d = in.action[i] - in.prev_action[i];
    da2 += d * d;
  }
  const double t1 = w.beta1 * tau2 * scale;
  const double t2 = w.beta2 * qdd2 * scale;
  const double t3 = w.beta3 * qd2 * scale;
  const double t4 = w.beta4 * in.base_slip_vel * in.base_slip_vel * scale;
  const double t5 = w.beta5 * in.yaw_rate_dev * in.yaw_rate_dev * scale;
  const double t6 = w.beta6 * da2 * scale;
  if (terms) {
    (*terms)[6] = t1;
    (*terms)[7] = t2;
    (*terms)[8] = t3;
    (*terms)[9] = t4;
    (*terms)[10] = t5;
    (*terms)[11] = t6;
  }
  return t1 + t2 + t3 + t4 + t5 + t6;
}

/// Curriculum-weighted composition. The progress reward enters only with the
/// adaptive phase engine.
inline RewardBreakdown reward_total(double r_track, double r_phase, double r_regularize,
                                    double l_rand, PhaseEngine engine) {
  RewardBreakdown b;
  b.r_track = r_track;
  b.r_regularize = r_regularize;
  b.r_phase = (engine == PhaseEngine::adaptive) ? r_phase : 0.0;
  b.r_total = r_track + l_rand * r_regularize + b.r_phase;
  return b;
}

}  // namespace locoma
