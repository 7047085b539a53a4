#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "locoma/core/demo.hpp"
#include "locoma/sim/world.hpp"

namespace locoma {

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Quintic min-jerk blend: zero velocity and acceleration at both ends.
inline double minjerk01(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

inline double minjerk(double a, double b, double t) { return a + (b - a) * minjerk01(t); }

// ---------------------------------------------------------------------------
// Task templates
// ---------------------------------------------------------------------------

enum class BasePathKind {
  waypoints,        // min-jerk legs through the waypoint list
  door_tangent,     // disk kept tangent to the door panel while it opens
  handle_standoff,  // base follows the handle at a fixed standoff
  hold              // stay at the segment-start pose
};

struct SegmentSpec {
  double duration = 1.0;
  ManipMode mode;
  BasePathKind base_path = BasePathKind::waypoints;
  std::vector<Pose2> waypoints;  // used by BasePathKind::waypoints
  double q_o_end = 0.0;          // object joint target at segment end (min-jerk)
  // analytic path parameters
  double tangent_r0 = 0.55, tangent_r1 = 0.62;  // door_tangent: hinge distance profile
  double standoff = 0.45;                       // handle_standoff
  double press_y = 0.18;                        // arm_push: lateral press coordinate
};

struct TaskSpec {
  TaskId task_id = TaskId::door_push;
  ObjectSpec object_spec_nominal;
  double q_o_start = 0.0;
  double q_o_goal = 0.0;
  double T_task = 8.0;
  std::vector<SegmentSpec> segments;
  int elbow_sign = -1;
  std::array<double, 2> folded_arm{2.4, 2.6};

  void validate() const {
    double total = 0.0;
    for (const auto& s : segments) {
      if (s.duration <= 0.0) throw GenerationError("task spec: nonpositive segment duration");
      s.mode.validate();
      total += s.duration;
    }
    if (std::abs(total - T_task) > 1e-9)
      throw GenerationError("task spec: segment durations do not sum to T_task");
  }
};

/// Hand-templated segment plans for the four tasks. Numbers are chosen for
/// the nominal objects and checked by the closed-loop validator.
inline TaskSpec build_task_spec(TaskId task) {
  TaskSpec spec;
  spec.task_id = task;
  switch (task) {
    case TaskId::door_push: {
      // Single non-prehensile segment: the bumper rides the panel through the
      // doorway and props it open at the end.
      spec.object_spec_nominal = ObjectSpec::nominal_door();
      spec.q_o_start = 0.0;
      spec.q_o_goal = 1.6;
      spec.T_task = 8.0;
      SegmentSpec s;
      s.duration = 8.0;
      s.mode = ManipMode::bumper_push();
      s.base_path = BasePathKind::door_tangent;
      s.q_o_end = 1.6;
      spec.segments = {s};
      break;
    }
    case TaskId::door_pull: {
      // Multi-mode schedule: approach, grasp and pull open, walk around the
      // panel tip to the blocking pose, brace with the bumper, release the
      // handle and hold the door open.
      spec.object_spec_nominal = ObjectSpec::nominal_door();
      spec.q_o_start = 0.0;
      spec.q_o_goal = 1.35;
      spec.T_task = 10.0;
      spec.elbow_sign = -1;

      SegmentSpec approach;
      approach.duration = 1.6;
      approach.mode = ManipMode::free_motion();
      approach.waypoints = {{-0.53, 0.75, 0.0}};
      approach.q_o_end = 0.0;

      SegmentSpec pull;
      pull.duration = 3.4;
      pull.mode = ManipMode::arm_grasp();
      pull.base_path = BasePathKind::handle_standoff;
      pull.standoff = 0.45;
      pull.q_o_end = 1.3;

      SegmentSpec trek;  // around the panel tip into the closing sweep
      trek.duration = 2.6;
      trek.mode = ManipMode::arm_grasp();
      trek.waypoints = {{-1.26, 0.03, 0.55}, {-1.06, 0.55, -0.35}, {-0.4775, 0.3839, -1.35}};
      trek.q_o_end = 1.35;

      SegmentSpec block;
      block.duration = 0.8;
      block.mode = ManipMode::grasp_and_block();
      block.base_path = BasePathKind::hold;
      block.q_o_end = 1.35;

      SegmentSpec hold;
      hold.duration = 1.6;
      hold.mode = ManipMode::bumper_push();
      hold.base_path = BasePathKind::hold;
      hold.q_o_end = 1.35;

      spec.segments = {approach, pull, trek, block, hold};
      break;
    }
    case TaskId::tray_open: {
      spec.object_spec_nominal = ObjectSpec::nominal_tray();
      spec.q_o_start = 0.0;
      spec.q_o_goal = 0.4;
      spec.T_task = 8.0;
      spec.elbow_sign = 1;

      SegmentSpec approach;
      approach.duration = 1.6;
      approach.mode = ManipMode::free_motion();
      approach.waypoints = {{0.95, 0.0, M_PI}};
      approach.q_o_end = 0.0;

      SegmentSpec pull;
      pull.duration = 4.4;
      pull.mode = ManipMode::arm_grasp();
      pull.base_path = BasePathKind::handle_standoff;
      pull.standoff = 0.52;
      pull.q_o_end = 0.4;

      SegmentSpec retreat;
      retreat.duration = 2.0;
      retreat.mode = ManipMode::free_motion();
      retreat.waypoints = {{1.55, 0.15, M_PI}};
      retreat.q_o_end = 0.4;  // dry friction holds the tray out

      spec.segments = {approach, pull, retreat};
      break;
    }
    case TaskId::tray_close: {
      spec.object_spec_nominal = ObjectSpec::nominal_tray();
      spec.q_o_start = 0.4;
      spec.q_o_goal = 0.0;
      spec.T_task = 8.0;
      spec.elbow_sign = 1;

      SegmentSpec approach;
      approach.duration = 1.6;
      approach.mode = ManipMode::free_motion();
      approach.waypoints = {{1.28, 0.18, M_PI}};
      approach.q_o_end = 0.4;

      SegmentSpec push;
      push.duration = 4.8;
      push.mode = ManipMode::arm_push();
      push.base_path = BasePathKind::handle_standoff;  // follows the moving front
      push.standoff = 0.53;
      push.press_y = 0.18;
      push.q_o_end = 0.0;

      SegmentSpec retreat;
      retreat.duration = 1.6;
      retreat.mode = ManipMode::free_motion();
      retreat.waypoints = {{1.3, 0.3, M_PI}};
      retreat.q_o_end = 0.0;

      spec.segments = {approach, push, retreat};
      break;
    }
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Demonstration generation
// ---------------------------------------------------------------------------

namespace detail {

constexpr double kPressDepth = 0.004;  // commanded EE press into the panel

/// Disk center kept tangent to the door panel on the trailing (pushing) side.
inline Pose2 door_tangent_pose(double q, double r, double disk_radius) {
  const double reff = disk_radius + kPanelHalfThickness;
  const double alpha = q - std::asin(std::min(reff / r, 1.0));
  const Vec2 c = r * Vec2(-std::sin(alpha), std::cos(alpha));
  return {c.x(), c.y(), wrap_angle(alpha + M_PI)};
}

inline Pose2 handle_standoff_pose(const ObjectSpec& obj, double q, double standoff) {
  if (obj.kind == ObjectKind::hinged_door) {
    const Vec2 h = handle_position(obj, q);
    const Vec2 n = door_open_normal(q);
    const Vec2 c = h + standoff * n;
    return {c.x(), c.y(), wrap_angle(q)};
  }
  // tray: stand in front of the moving panel, facing it
  const double xf = kTrayClosedFront + q;
  return {xf + standoff, 0.18 * 0.0 + 0.0 + 0.0, M_PI};
}

inline Vec2 press_point(const ObjectSpec& obj, double q, double press_y, double ee_radius) {
  const double xf = kTrayClosedFront + q;
  return {xf + kPanelHalfThickness + ee_radius - kPressDepth,
          -0.5 * obj.panel_length + press_y + (0.5 * obj.panel_length - 0.0) * 0.0 + press_y * 0.0};
}

}  // namespace detail

/// Generates one physically validated reference trajectory from a task
/// template. Object motion is min-jerk per segment; arm references come from
/// closed-form IK with a fixed elbow branch; non-contact stretches bridge the
/// arm between configurations with min-jerk; knots are emitted at dt_ref.
inline Demonstration generate_demo(const TaskSpec& spec) {
  spec.validate();
  const RobotModel model;
  const ObjectSpec& obj = spec.object_spec_nominal;
  const int n_knots = static_cast<int>(std::llround(spec.T_task / kDtRef)) + 1;
  const int n_segs = static_cast<int>(spec.segments.size());

  // segment boundaries
  std::vector<double> seg_start(n_segs + 1, 0.0);
  for (int s = 0; s < n_segs; ++s) seg_start[s + 1] = seg_start[s] + spec.segments[s].duration;

  auto segment_at = [&](double t) {
    for (int s = 0; s < n_segs; ++s)
      if (t < seg_start[s + 1] - 1e-12) return s;
    return n_segs - 1;
  };

  // pass 1: object joint and base pose per knot
  std::vector<double> q_o(n_knots);
  std::vector<Pose2> base(n_knots);
  std::vector<int> seg_of(n_knots);
  std::vector<double> seg_tau(n_knots);

  double q_prev_end = spec.q_o_start;
  std::vector<double> seg_q_start(n_segs);
  std::vector<Pose2> seg_base_start(n_segs);
  for (int s = 0; s < n_segs; ++s) {
    seg_q_start[s] = q_prev_end;
    q_prev_end = spec.segments[s].q_o_end;
  }

  // base start of each segment is the end pose of the previous one
  auto base_at = [&](int s, double tau, const Pose2& start) -> Pose2 {
    const SegmentSpec& seg = spec.segments[s];
    const double qo = minjerk(seg_q_start[s], seg.q_o_end, tau);
    switch (seg.base_path) {
      case BasePathKind::door_tangent:
        return detail::door_tangent_pose(qo, lerp(seg.tangent_r0, seg.tangent_r1, minjerk01(tau)),
                                         model.base_radius);
      case BasePathKind::handle_standoff:
        return detail::handle_standoff_pose(obj, qo, seg.standoff);
      case BasePathKind::hold:
        return start;
      case BasePathKind::waypoints: {
        // min-jerk legs through the waypoint list, time split by distance
        std::vector<Pose2> pts;
        pts.push_back(start);
        for (const auto& w : seg.waypoints) pts.push_back(w);
        const int legs = static_cast<int>(pts.size()) - 1;
        std::vector<double> len(legs);
        double total = 0.0;
        for (int l = 0; l < legs; ++l) {
          len[l] = std::max(1e-6, (pts[l + 1].position() - pts[l].position()).norm() +
                                      0.3 * std::abs(wrap_angle(pts[l + 1].yaw - pts[l].yaw)));
          total += len[l];
        }
        double u = tau * total;
        for (int l = 0; l < legs; ++l) {
          if (u <= len[l] || l == legs - 1)
            return lerp_pose(pts[l], pts[l + 1], minjerk01(u / len[l]));
          u -= len[l];
        }
        return pts.back();
      }
    }
    return start;
  };

  Pose2 cursor;
  {
    // initial base pose: segment 0 start
    const SegmentSpec& s0 = spec.segments[0];
    if (s0.base_path == BasePathKind::door_tangent)
      cursor = detail::door_tangent_pose(spec.q_o_start, s0.tangent_r0, model.base_radius);
    else if (s0.base_path == BasePathKind::handle_standoff)
      cursor = detail::handle_standoff_pose(obj, spec.q_o_start, s0.standoff);
    else if (!s0.waypoints.empty())
      cursor = Pose2(s0.waypoints.front().x - 0.45, s0.waypoints.front().y + 0.12,
                     s0.waypoints.front().yaw);
    seg_base_start[0] = cursor;
  }
  for (int s = 1; s < n_segs; ++s) seg_base_start[s] = base_at(s - 1, 1.0, seg_base_start[s - 1]);

  for (int i = 0; i < n_knots; ++i) {
    const double t = std::min(i * kDtRef, spec.T_task);
    const int s = segment_at(t);
    const double tau = std::clamp((t - seg_start[s]) / spec.segments[s].duration, 0.0, 1.0);
    seg_of[i] = s;
    seg_tau[i] = tau;
    q_o[i] = minjerk(seg_q_start[s], spec.segments[s].q_o_end, tau);
    base[i] = base_at(s, tau, seg_base_start[s]);
  }

  // pass 2: arm references. Contact segments use IK on the EE target; free
  // stretches bridge min-jerk between the bounding configurations.
  auto arm_contact = [&](int s) {
    return spec.segments[s].mode.interaction[0] != Interaction::none;
  };
  auto ee_target = [&](int s, double qo) -> Vec2 {
    const SegmentSpec& seg = spec.segments[s];
    if (seg.mode.interaction[0] == Interaction::prehensile) return handle_position(obj, qo);
    return detail::press_point(obj, qo, seg.press_y, model.ee_radius);
  };
  auto ik_checked = [&](int s, const Pose2& b, const Vec2& target) {
    const Vec2 sh = model.shoulder(b);
    const double d = (target - sh).norm();
    if (d > model.reach() - 0.03)
      throw GenerationError("segment " + std::to_string(s) + ": handle unreachable (d=" +
                            std::to_string(d) + ")");
    try {
      return model.arm_ik(b, target, spec.elbow_sign);
    } catch (const ContractViolation& e) {
      throw GenerationError("segment " + std::to_string(s) + ": " + e.what());
    }
  };

  std::vector<std::array<double, 2>> q_arm(n_knots, spec.folded_arm);
  // arm configuration at the start of each segment
  std::array<double, 2> arm_cursor = spec.folded_arm;
  int i0 = 0;
  for (int s = 0; s < n_segs; ++s) {
    int i1 = i0;
    while (i1 + 1 < n_knots && seg_of[i1 + 1] == s) ++i1;
    if (arm_contact(s)) {
      for (int i = i0; i <= i1; ++i) q_arm[i] = ik_checked(s, base[i], ee_target(s, q_o[i]));
      arm_cursor = q_arm[i1];
    } else {
      // bridge toward the next contact segment's first configuration, or fold
      std::array<double, 2> goal = spec.folded_arm;
      if (s + 1 < n_segs && arm_contact(s + 1)) {
        const Pose2 b_end = base_at(s, 1.0, seg_base_start[s]);
        goal = ik_checked(s + 1, b_end, ee_target(s + 1, spec.segments[s].q_o_end));
      }
      for (int i = i0; i <= i1; ++i) {
        const double tau = seg_tau[i];
        q_arm[i] = {minjerk(arm_cursor[0], goal[0], tau), minjerk(arm_cursor[1], goal[1], tau)};
      }
      arm_cursor = goal;
    }
    i0 = i1 + 1;
  }

  // assemble knots; velocities by central differences, EE from FK
  Demonstration demo;
  demo.task_id = spec.task_id;
  demo.dt_ref = kDtRef;
  demo.T_task = spec.T_task;
  demo.object_spec = obj;
  demo.knots.resize(n_knots);
  for (int i = 0; i < n_knots; ++i) {
    DemoKnot& k = demo.knots[i];
    k.robot.base = base[i];
    k.robot.q_arm = q_arm[i];
    k.q_o = q_o[i];
    k.mode = spec.segments[seg_of[i]].mode;
  }
  auto diff = [&](int i, auto&& get) {
    const int a = std::max(0, i - 1), b = std::min(n_knots - 1, i + 1);
    return (get(demo.knots[b]) - get(demo.knots[a])) / ((b - a) * kDtRef);
  };
  for (int i = 0; i < n_knots; ++i) {
    DemoKnot& k = demo.knots[i];
    k.robot.base_vel = {diff(i, [](const DemoKnot& d) { return d.robot.base.x; }),
                        diff(i, [](const DemoKnot& d) { return d.robot.base.y; })};
    {
      const int a = std::max(0, i - 1), b = std::min(n_knots - 1, i + 1);
      k.robot.yaw_rate =
          wrap_angle(demo.knots[b].robot.base.yaw - demo.knots[a].robot.base.yaw) /
          ((b - a) * kDtRef);
    }
    k.robot.qd_arm = {diff(i, [](const DemoKnot& d) { return d.robot.q_arm[0]; }),
                      diff(i, [](const DemoKnot& d) { return d.robot.q_arm[1]; })};
    k.qd_o = diff(i, [](const DemoKnot& d) { return d.q_o; });
    k.robot.refresh_ee(RobotModel{});
  }
  demo.validate();
  return demo;
}

inline Demonstration generate_task_demo(TaskId task) { return generate_demo(build_task_spec(task)); }

// ---------------------------------------------------------------------------
// Closed-loop validation
// ---------------------------------------------------------------------------

struct ValidationReport {
  double max_base_err = 0.0;
  double max_object_err = 0.0;
  double base_threshold = 0.15;
  double object_threshold = 0.1;
  bool success = false;
};

/// Replays the demonstration on the nominal object with a pure PD tracker on
/// the joint references and the scheduled grasp commands.
inline ValidationReport validate_demo(const Demonstration& demo,
                                      const ObjectSpec* override_spec = nullptr) {
  demo.validate();
  const ObjectSpec spec = override_spec ? *override_spec : demo.object_spec;
  SimWorld world(spec, 0);
  world.break_force_range = {1e6, 1e6};
  const DemoKnot& k0 = demo.knots.front();
  world.set_state(k0.robot, k0.q_o, k0.qd_o);

  ValidationReport report;
  report.object_threshold = spec.kind == ObjectKind::hinged_door ? 0.1 : 0.05;
  const int n = demo.knot_count();
  const int substeps = static_cast<int>(std::llround(demo.dt_ref / world.sim_dt));
  for (int i = 0; i + 1 < n; ++i) {
    const DemoKnot& target = demo.knots[i + 1];
    const ManipMode& mode = demo.knots[i].mode;
    if (mode.prehensile_active()) {
      if (!world.attachment) world.try_grasp();
    } else if (world.attachment) {
      world.release();
    }
    JointCommand cmd;
    cmd.q_cmd = {target.robot.base.x, target.robot.base.y, target.robot.base.yaw,
                 target.robot.q_arm[0], target.robot.q_arm[1]};
    for (int u = 0; u < substeps; ++u) world.step(cmd);

    const double base_err = (world.robot.base.position() - target.robot.base.position()).norm();
    const double obj_err = std::abs(world.object.q_o - target.q_o);
    report.max_base_err = std::max(report.max_base_err, base_err);
    report.max_object_err = std::max(report.max_object_err, obj_err);
  }
  report.success = report.max_base_err <= report.base_threshold &&
                   report.max_object_err <= report.object_threshold;
  return report;
}

}  // namespace locoma
