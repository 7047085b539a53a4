#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "locoma/core/pose.hpp"

namespace locoma {

struct ContractViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TaskId { door_push = 0, door_pull = 1, tray_open = 2, tray_close = 3 };
constexpr int kNumTasks = 4;

inline const char* task_name(TaskId t) {
  switch (t) {
    case TaskId::door_push: return "door_push";
    case TaskId::door_pull: return "door_pull";
    case TaskId::tray_open: return "tray_open";
    case TaskId::tray_close: return "tray_close";
  }
  return "?";
}

inline TaskId task_from_name(const std::string& s) {
  for (int i = 0; i < kNumTasks; ++i)
    if (s == task_name(static_cast<TaskId>(i))) return static_cast<TaskId>(i);
  throw ContractViolation("unknown task id: " + s);
}

// ---------------------------------------------------------------------------
// Robot model: planar base (3 actuated virtual DOF) + 2-link arm.
// Two end-effectors: the arm tip (prehensile-capable) and the base bumper.
// ---------------------------------------------------------------------------

struct RobotModel {
  double base_mass = 40.0;
  double base_inertia = 2.0;
  double base_radius = 0.25;
  double arm_mount = 0.20;   // shoulder offset along body x
  double link1 = 0.45;
  double link2 = 0.35;
  double arm_inertia1 = 0.15;
  double arm_inertia2 = 0.05;
  double ee_radius = 0.04;
  std::array<double, 2> arm_lo{-2.6, -2.8};
  std::array<double, 2> arm_hi{2.6, 2.8};

  // PD actuation (position targets on all 5 DOF) with saturation
  double kp_lin = 2000.0, kd_lin = 300.0, f_lin_max = 300.0;
  double kp_yaw = 300.0, kd_yaw = 60.0, tau_yaw_max = 100.0;
  double kp_arm = 80.0, kd_arm = 8.0, tau_arm_max = 30.0;

  double reach() const { return link1 + link2; }

  Vec2 shoulder(const Pose2& base) const {
    return base.position() + rot2(base.yaw) * Vec2(arm_mount, 0.0);
  }

  Vec2 elbow(const Pose2& base, const std::array<double, 2>& q) const {
    const double a1 = base.yaw + q[0];
    return shoulder(base) + link1 * Vec2(std::cos(a1), std::sin(a1));
  }

  Vec2 ee_position(const Pose2& base, const std::array<double, 2>& q) const {
    const double a1 = base.yaw + q[0];
    const double a2 = a1 + q[1];
    return shoulder(base) + link1 * Vec2(std::cos(a1), std::sin(a1)) +
           link2 * Vec2(std::cos(a2), std::sin(a2));
  }

  /// World-frame EE velocity from the full rate vector.
  Vec2 ee_velocity(const Pose2& base, const std::array<double, 2>& q, const Vec2& base_vel,
                   double yaw_rate, const std::array<double, 2>& qd) const {
    const Vec2 ee = ee_position(base, q);
    const Vec2 sh = shoulder(base);
    const Vec2 el = elbow(base, q);
    return base_vel + yaw_rate * perp(ee - base.position()) + qd[0] * perp(ee - sh) +
           qd[1] * perp(ee - el);
  }

  /// 2x5 EE Jacobian columns: d(ee)/d(x, y, yaw, q1, q2).
  void ee_jacobian(const Pose2& base, const std::array<double, 2>& q,
                   std::array<Vec2, 5>& cols) const {
    const Vec2 ee = ee_position(base, q);
    cols[0] = {1.0, 0.0};
    cols[1] = {0.0, 1.0};
    cols[2] = perp(ee - base.position());
    cols[3] = perp(ee - shoulder(base));
    cols[4] = perp(ee - elbow(base, q));
  }

  /// Closed-form 2-link IK in the world frame. elbow_sign selects the branch.
  /// Throws ContractViolation when the target is unreachable or outside limits.
  std::array<double, 2> arm_ik(const Pose2& base, const Vec2& target, int elbow_sign) const {
    const Vec2 t = rot2(-base.yaw) * (target - shoulder(base));
    const double d2 = t.squaredNorm();
    const double c2 = (d2 - link1 * link1 - link2 * link2) / (2.0 * link1 * link2);
    if (c2 < -1.0 || c2 > 1.0)
      throw ContractViolation("arm_ik: target out of reach (d=" + std::to_string(std::sqrt(d2)) +
                              ")");
    const double q2 = (elbow_sign >= 0 ? 1.0 : -1.0) * std::acos(c2);
    const double q1 = wrap_angle(std::atan2(t.y(), t.x()) -
                                 std::atan2(link2 * std::sin(q2), link1 + link2 * std::cos(q2)));
    if (q1 < arm_lo[0] || q1 > arm_hi[0] || q2 < arm_lo[1] || q2 > arm_hi[1])
      throw ContractViolation("arm_ik: solution outside joint limits");
    return {q1, q2};
  }
};

/// Full kinematic state of the robot at one instant. ee_pos/ee_vel are
/// derived quantities and kept consistent with forward kinematics.
struct RobotState {
  Pose2 base;
  Vec2 base_vel{0.0, 0.0};
  double yaw_rate = 0.0;
  std::array<double, 2> q_arm{0.0, 0.0};
  std::array<double, 2> qd_arm{0.0, 0.0};
  Vec2 ee_pos{0.0, 0.0};
  Vec2 ee_vel{0.0, 0.0};

  void refresh_ee(const RobotModel& model) {
    ee_pos = model.ee_position(base, q_arm);
    ee_vel = model.ee_velocity(base, q_arm, base_vel, yaw_rate, qd_arm);
  }
};

// ---------------------------------------------------------------------------
// Articulated object: spring-loaded hinged door or prismatic tray.
// The object anchor (hinge / slide origin) sits at the world origin.
// ---------------------------------------------------------------------------

enum class ObjectKind { hinged_door = 0, prismatic_tray = 1 };

struct ObjectSpec {
  ObjectKind kind = ObjectKind::hinged_door;
  // geometry
  double panel_length = 0.9;   // W: door panel length / tray front width (m)
  double handle_offset = 0.75; // h along the panel from its origin end, 0 < h <= W
  int handle_shape = 0;        // 0 cylinder, 1 box (tag only)
  // dynamics
  double inertia = 3.2;        // kg m^2 (door) or kg (tray)
  double stiffness = 6.0;      // spring toward q_rest
  double damping = 12.0;
  double dry_friction = 0.3;   // N m (door) / N (tray)
  double q_min = 0.0;
  double q_max = 2.0;
  double q_rest = 0.0;
  double bias = 0.0;           // constant joint force/torque offset

  void validate() const {
    if (!(panel_length > 0.0 && handle_offset > 0.0 && handle_offset <= panel_length))
      throw ContractViolation("ObjectSpec: handle offset must satisfy 0 < h <= W");
    if (!(inertia > 0.0 && stiffness > 0.0 && damping > 0.0 && dry_friction > 0.0))
      throw ContractViolation("ObjectSpec: physical constants must be positive");
    if (!(q_min < q_max)) throw ContractViolation("ObjectSpec: empty joint range");
  }

  static ObjectSpec nominal_door() { return ObjectSpec{}; }

  static ObjectSpec nominal_tray() {
    ObjectSpec s;
    s.kind = ObjectKind::prismatic_tray;
    s.panel_length = 0.6;
    s.handle_offset = 0.3;
    s.inertia = 25.0;
    s.stiffness = 15.0;
    s.damping = 30.0;
    s.dry_friction = 8.0;
    s.q_min = 0.0;
    s.q_max = 0.45;
    return s;
  }
};

// Shared contact constants of the planar world.
constexpr double kPanelHalfThickness = 0.02;
constexpr double kHandleStub = 0.08;        // handle protrusion off the panel face
constexpr double kTrayClosedFront = 0.35;   // x of the tray front at q = 0

/// Direction of the door panel (unit) at joint angle q. q = 0 points along +y;
/// increasing q swings the panel toward -x.
inline Vec2 door_panel_dir(double q) { return {-std::sin(q), std::cos(q)}; }

/// Outward normal on the side the door opens toward.
inline Vec2 door_open_normal(double q) { return {-std::cos(q), -std::sin(q)}; }

/// Panel segment endpoints in the world.
inline void panel_segment(const ObjectSpec& spec, double q, Vec2& a, Vec2& b) {
  if (spec.kind == ObjectKind::hinged_door) {
    a = {0.0, 0.0};
    b = spec.panel_length * door_panel_dir(q);
  } else {
    const double xf = kTrayClosedFront + q;
    a = {xf, -0.5 * spec.panel_length};
    b = {xf, 0.5 * spec.panel_length};
  }
}

inline Vec2 handle_position(const ObjectSpec& spec, double q) {
  if (spec.kind == ObjectKind::hinged_door) {
    return spec.handle_offset * door_panel_dir(q) + kHandleStub * door_open_normal(q);
  }
  const double xf = kTrayClosedFront + q;
  return {xf + kHandleStub, -0.5 * spec.panel_length + spec.handle_offset};
}

inline Vec2 handle_velocity(const ObjectSpec& spec, double q, double qd) {
  if (spec.kind == ObjectKind::hinged_door)
    return qd * perp(handle_position(spec, q));
  return {qd, 0.0};
}

/// Kinematic state of the object; handle fields are derived.
struct ObjectState {
  double q_o = 0.0;
  double qd_o = 0.0;
  Vec2 handle_pos{0.0, 0.0};
  Vec2 handle_vel{0.0, 0.0};

  void refresh(const ObjectSpec& spec) {
    handle_pos = handle_position(spec, q_o);
    handle_vel = handle_velocity(spec, q_o, qd_o);
  }
};

// ---------------------------------------------------------------------------
// Manipulation modes
// ---------------------------------------------------------------------------

enum class Interaction { none = 0, prehensile = 1, nonprehensile = 2 };
enum class Affordance { none = 0, handle = 1, panel = 2 };

/// Contact mode per end-effector. Index 0 = arm EE, index 1 = base bumper.
struct ManipMode {
  std::array<Interaction, 2> interaction{Interaction::none, Interaction::none};
  std::array<Affordance, 2> target{Affordance::none, Affordance::none};

  static ManipMode free_motion() { return {}; }

  static ManipMode arm_grasp() {
    ManipMode m;
    m.interaction[0] = Interaction::prehensile;
    m.target[0] = Affordance::handle;
    return m;
  }

  static ManipMode arm_push() {
    ManipMode m;
    m.interaction[0] = Interaction::nonprehensile;
    m.target[0] = Affordance::panel;
    return m;
  }

  static ManipMode bumper_push() {
    ManipMode m;
    m.interaction[1] = Interaction::nonprehensile;
    m.target[1] = Affordance::panel;
    return m;
  }

  static ManipMode grasp_and_block() {
    ManipMode m = arm_grasp();
    m.interaction[1] = Interaction::nonprehensile;
    m.target[1] = Affordance::panel;
    return m;
  }

  bool any_contact() const {
    return interaction[0] != Interaction::none || interaction[1] != Interaction::none;
  }

  bool prehensile_active() const { return interaction[0] == Interaction::prehensile; }

  void validate() const {
    if (interaction[1] == Interaction::prehensile)
      throw ContractViolation("ManipMode: prehensile interaction is arm-only");
    for (int e = 0; e < 2; ++e) {
      const bool has_target = target[e] != Affordance::none;
      if (has_target != (interaction[e] != Interaction::none))
        throw ContractViolation("ManipMode: target must be none iff interaction is none");
    }
  }

  bool operator==(const ManipMode&) const = default;
};

}  // namespace locoma
