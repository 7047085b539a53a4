#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "locoma/core/rng.hpp"
#include "locoma/core/types.hpp"

namespace locoma {

struct SimDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Position targets for the 5 actuated DOF: base-x, base-y, base-yaw, arm-1, arm-2.
struct JointCommand {
  std::array<double, 5> q_cmd{0, 0, 0, 0, 0};
};

struct Attachment {
  double break_force = 0.0;  // N
  double engaged_since = 0.0;
};

struct ContactInfo {
  bool in_contact = false;
  double normal_force = 0.0;
};

constexpr double kSimDt = 0.005;
constexpr double kContactStiffness = 5000.0;  // N/m
constexpr double kContactDamping = 50.0;      // N s/m
constexpr double kGraspRadius = 0.05;
constexpr double kAttachStiffness = 2000.0;
constexpr double kAttachDamping = 50.0;
constexpr int kArmEe = 0;
constexpr int kBumperEe = 1;

/// Deterministic planar rigid-body world: PD-actuated robot, spring-loaded
/// articulated object, penalty contacts, breakaway grasp attachment.
class SimWorld {
 public:
  RobotModel model;
  RobotState robot;
  ObjectState object;
  ObjectSpec object_spec;
  std::optional<Attachment> attachment;
  double sim_dt = kSimDt;
  uint64_t rng_seed = 0;
  long step_count = 0;

  // per-episode randomized physics
  double friction = 0.7;
  double base_mass_scale = 1.0;
  std::array<double, 2> break_force_range{120.0, 120.0};

  // diagnostics from the last step
  std::array<ContactInfo, 2> contacts{};
  std::array<double, 5> last_tau{};   // applied actuation, post-saturation
  std::array<double, 5> last_qdd{};   // realized accelerations
  double attach_force = 0.0;          // attachment spring force magnitude
  double object_force = 0.0;          // net generalized force on the object joint

  SimWorld() : rng_(0) {}

  SimWorld(const ObjectSpec& spec, uint64_t seed)
      : object_spec(spec), rng_seed(seed), rng_(seed) {
    object.refresh(object_spec);
    robot.refresh_ee(model);
  }

  void set_state(const RobotState& r, double q_o, double qd_o) {
    robot = r;
    robot.refresh_ee(model);
    object.q_o = q_o;
    object.qd_o = qd_o;
    object.refresh(object_spec);
  }

  /// Engages the grasp attachment iff the EE is within the grasp radius of the
  /// handle. A failed attempt is a no-op. The break force is drawn from the
  /// configured range on engagement.
  void try_grasp() {
    if (attachment) return;
    if ((robot.ee_pos - object.handle_pos).norm() <= kGraspRadius) {
      const double bf = break_force_range[0] +
                        (break_force_range[1] - break_force_range[0]) * rng_.uniform();
      attachment = Attachment{bf, step_count * sim_dt};
    }
  }

  void release() { attachment.reset(); }

  /// Instantaneous base impulse (N s, N s, N m s): velocity jump.
  void apply_base_impulse(const Vec2& lin, double ang) {
    robot.base_vel += lin / (model.base_mass * base_mass_scale);
    robot.yaw_rate += ang / model.base_inertia;
    robot.refresh_ee(model);
  }

  /// Constant external generalized force on the object joint for a duration.
  void apply_panel_force(double generalized_force, double duration) {
    if (duration > 0.0) panel_pushes_.push_back({generalized_force, duration});
  }

  std::array<ContactInfo, 2> contact_report() const {
    auto r = contacts;
    if (attachment) r[kArmEe].in_contact = true;
    return r;
  }

  /// Advances one sim_dt with semi-implicit Euler.
  void step(const JointCommand& cmd) {
    for (double v : cmd.q_cmd)
      if (!std::isfinite(v)) throw SimDiverged("sim_step: non-finite command");

    const double m_b = model.base_mass * base_mass_scale;
    const std::array<double, 5> mass{m_b, m_b, model.base_inertia, model.arm_inertia1,
                                     model.arm_inertia2};

    // actuation
    std::array<double, 5> force{};
    auto sat = [](double v, double lim) { return std::clamp(v, -lim, lim); };
    force[0] = sat(model.kp_lin * (cmd.q_cmd[0] - robot.base.x) - model.kd_lin * robot.base_vel.x(),
                   model.f_lin_max);
    force[1] = sat(model.kp_lin * (cmd.q_cmd[1] - robot.base.y) - model.kd_lin * robot.base_vel.y(),
                   model.f_lin_max);
    force[2] = sat(model.kp_yaw * wrap_angle(cmd.q_cmd[2] - robot.base.yaw) -
                       model.kd_yaw * robot.yaw_rate,
                   model.tau_yaw_max);
    for (int j = 0; j < 2; ++j) {
      const double target = std::clamp(cmd.q_cmd[3 + j], model.arm_lo[j], model.arm_hi[j]);
      force[3 + j] = sat(model.kp_arm * (target - robot.q_arm[j]) - model.kd_arm * robot.qd_arm[j],
                         model.tau_arm_max);
    }
    last_tau = force;

    double object_tau = -object_spec.stiffness * (object.q_o - object_spec.q_rest) -
                        object_spec.damping * object.qd_o + object_spec.bias;

    // external panel pushes
    for (auto& p : panel_pushes_) {
      object_tau += p.force;
      p.time_left -= sim_dt;
    }
    std::erase_if(panel_pushes_, [](const PanelPush& p) { return p.time_left <= 0.0; });

    // penalty contacts: arm EE disk and base bumper disk against the panel
    contacts = {};
    Vec2 seg_a, seg_b;
    panel_segment(object_spec, object.q_o, seg_a, seg_b);
    for (int e = 0; e < 2; ++e) {
      const Vec2 center = (e == kArmEe) ? robot.ee_pos : robot.base.position();
      const double radius = (e == kArmEe) ? model.ee_radius : model.base_radius;
      Vec2 p, n;
      const double dist = point_segment(center, seg_a, seg_b, p, n);
      const double depth = radius + kPanelHalfThickness - dist;
      if (depth <= 0.0) continue;

      const Vec2 v_obj = object_point_velocity(p);
      const Vec2 v_rob = (e == kArmEe)
                             ? robot.ee_vel
                             : robot.base_vel + robot.yaw_rate * perp(p - robot.base.position());
      const Vec2 v_rel = v_rob - v_obj;
      const double depth_rate = -v_rel.dot(n);
      double normal = kContactStiffness * depth + kContactDamping * depth_rate;
      if (normal < 0.0) normal = 0.0;
      const Vec2 t = perp(n);
      const double v_t = v_rel.dot(t);
      const double ft = -friction * normal * std::clamp(v_t / 0.05, -1.0, 1.0);
      const Vec2 f_robot = normal * n + ft * t;

      if (e == kArmEe) {
        std::array<Vec2, 5> jac;
        model.ee_jacobian(robot.base, robot.q_arm, jac);
        for (int c = 0; c < 5; ++c) force[c] += jac[c].dot(f_robot);
      } else {
        force[0] += f_robot.x();
        force[1] += f_robot.y();
        force[2] += cross2(p - robot.base.position(), f_robot);
      }
      object_tau += object_generalized_force(p, -f_robot);
      contacts[e] = {true, normal};
    }

    // grasp attachment: spring-damper to the handle with breakaway
    attach_force = 0.0;
    if (attachment) {
      const Vec2 f = kAttachStiffness * (object.handle_pos - robot.ee_pos) +
                     kAttachDamping * (object.handle_vel - robot.ee_vel);
      attach_force = f.norm();
      if (attach_force >= attachment->break_force) {
        attachment.reset();  // handle slipped away
      } else {
        std::array<Vec2, 5> jac;
        model.ee_jacobian(robot.base, robot.q_arm, jac);
        for (int c = 0; c < 5; ++c) force[c] += jac[c].dot(f);
        object_tau += object_generalized_force(object.handle_pos, -f);
      }
    }

    // object joint: dry friction with stiction
    object_force = object_tau;
    double qdd_o;
    if (std::abs(object.qd_o) < 1e-3 && std::abs(object_tau) <= object_spec.dry_friction) {
      qdd_o = 0.0;
      object.qd_o = 0.0;
    } else {
      const double s = (std::abs(object.qd_o) >= 1e-3) ? (object.qd_o > 0 ? 1.0 : -1.0)
                                                       : (object_tau > 0 ? 1.0 : -1.0);
      qdd_o = (object_tau - object_spec.dry_friction * s) / object_spec.inertia;
    }

    // integrate (semi-implicit Euler)
    std::array<double, 5> qd_old{robot.base_vel.x(), robot.base_vel.y(), robot.yaw_rate,
                                 robot.qd_arm[0], robot.qd_arm[1]};
    std::array<double, 5> qd_new;
    for (int c = 0; c < 5; ++c) qd_new[c] = qd_old[c] + sim_dt * force[c] / mass[c];

    robot.base_vel = {qd_new[0], qd_new[1]};
    robot.yaw_rate = qd_new[2];
    robot.qd_arm = {qd_new[3], qd_new[4]};
    robot.base.x += sim_dt * qd_new[0];
    robot.base.y += sim_dt * qd_new[1];
    robot.base.yaw = wrap_angle(robot.base.yaw + sim_dt * qd_new[2]);
    for (int j = 0; j < 2; ++j) {
      robot.q_arm[j] += sim_dt * robot.qd_arm[j];
      if (robot.q_arm[j] < model.arm_lo[j]) {
        robot.q_arm[j] = model.arm_lo[j];
        robot.qd_arm[j] = 0.0;
      } else if (robot.q_arm[j] > model.arm_hi[j]) {
        robot.q_arm[j] = model.arm_hi[j];
        robot.qd_arm[j] = 0.0;
      }
    }

    object.qd_o += sim_dt * qdd_o;
    object.q_o += sim_dt * object.qd_o;
    if (object.q_o < object_spec.q_min) {
      object.q_o = object_spec.q_min;
      if (object.qd_o < 0.0) object.qd_o = 0.0;
    } else if (object.q_o > object_spec.q_max) {
      object.q_o = object_spec.q_max;
      if (object.qd_o > 0.0) object.qd_o = 0.0;
    }

    for (int c = 0; c < 5; ++c) {
      // realized accelerations (joint limits may zero them)
      const double qd_final = (c == 0)   ? robot.base_vel.x()
                              : (c == 1) ? robot.base_vel.y()
                              : (c == 2) ? robot.yaw_rate
                                         : robot.qd_arm[c - 3];
      last_qdd[c] = (qd_final - qd_old[c]) / sim_dt;
    }

    robot.refresh_ee(model);
    object.refresh(object_spec);
    ++step_count;

    if (!all_finite())
      throw SimDiverged("sim_step: state diverged at step " + std::to_string(step_count));
  }

  RngStream& rng() { return rng_; }

 private:
  struct PanelPush {
    double force;
    double time_left;
  };
  std::vector<PanelPush> panel_pushes_;
  RngStream rng_;

  static double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

  /// Distance from c to segment [a, b]; p = closest point, n = unit normal
  /// from the segment toward c.
  static double point_segment(const Vec2& c, const Vec2& a, const Vec2& b, Vec2& p, Vec2& n) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    double t = len2 > 0.0 ? (c - a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    p = a + t * ab;
    const Vec2 d = c - p;
    const double dist = d.norm();
    n = dist > 1e-12 ? Vec2(d / dist) : perp(ab.normalized());
    return dist;
  }

  Vec2 object_point_velocity(const Vec2& p) const {
    if (object_spec.kind == ObjectKind::hinged_door) return object.qd_o * perp(p);
    return {object.qd_o, 0.0};
  }

  double object_generalized_force(const Vec2& p, const Vec2& f) const {
    if (object_spec.kind == ObjectKind::hinged_door) return cross2(p, f);
    return f.x();
  }

  bool all_finite() const {
    auto ok = [](double v) { return std::isfinite(v); };
    return ok(robot.base.x) && ok(robot.base.y) && ok(robot.base.yaw) &&
           ok(robot.base_vel.x()) && ok(robot.base_vel.y()) && ok(robot.yaw_rate) &&
           ok(robot.q_arm[0]) && ok(robot.q_arm[1]) && ok(robot.qd_arm[0]) &&
           ok(robot.qd_arm[1]) && ok(object.q_o) && ok(object.qd_o);
  }
};

}  // namespace locoma
