#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "locoma/core/types.hpp"

namespace locoma {

constexpr int kDemoFormatVersion = 1;
constexpr double kDtRef = 0.02;

/// One reference knot: robot state, object joint position/rate, contact mode.
struct DemoKnot {
  RobotState robot;
  double q_o = 0.0;
  double qd_o = 0.0;
  ManipMode mode;
};

/// Sampled reference at an arbitrary phase. Continuous fields are
/// interpolated; the mode is piecewise constant (floor knot).
struct DemoSample {
  RobotState robot;
  double q_o = 0.0;
  double qd_o = 0.0;
  ManipMode mode;
};

/// Time-indexed reference states X* and manipulation schedule M* for one task.
class Demonstration {
 public:
  int version = kDemoFormatVersion;
  TaskId task_id = TaskId::door_push;
  double dt_ref = kDtRef;
  double T_task = 0.0;
  std::vector<DemoKnot> knots;
  ObjectSpec object_spec;  // nominal object the references were generated for

  int knot_count() const { return static_cast<int>(knots.size()); }

  void validate() const {
    if (version != kDemoFormatVersion)
      throw ContractViolation("demonstration: unsupported version " + std::to_string(version));
    if (!(dt_ref > 0.0 && T_task > 0.0))
      throw ContractViolation("demonstration: nonpositive dt_ref or T_task");
    const int expected = static_cast<int>(std::llround(T_task / dt_ref)) + 1;
    if (knot_count() != expected)
      throw ContractViolation("demonstration: knot count " + std::to_string(knot_count()) +
                              " != round(T_task/dt_ref)+1 = " + std::to_string(expected));
    object_spec.validate();
    for (const auto& k : knots) k.mode.validate();
    // prehensile segments must be contiguous runs of >= 2 knots
    int run = 0;
    for (int i = 0; i <= knot_count(); ++i) {
      const bool preh = i < knot_count() && knots[i].mode.prehensile_active();
      if (preh) {
        ++run;
      } else {
        if (run == 1)
          throw ContractViolation("demonstration: single-knot prehensile flicker at knot " +
                                  std::to_string(i - 1));
        run = 0;
      }
    }
  }

  /// Reference at phase phi in [0, 1]. States are lerped (yaw via shortest
  /// arc); the mode comes from the floor knot.
  DemoSample sample(double phi) const {
    if (!(phi >= 0.0 && phi <= 1.0))
      throw ContractViolation("demo_sample: phase " + std::to_string(phi) + " outside [0, 1]");
    const int n = knot_count();
    const double u = phi * (n - 1);
    int i = static_cast<int>(std::floor(u));
    const int mode_knot = std::min(i, n - 1);
    double t = u - i;
    if (i >= n - 1) {
      i = n - 2;
      t = 1.0;
    }
    const DemoKnot& a = knots[i];
    const DemoKnot& b = knots[i + 1];
    DemoSample s;
    s.robot.base = lerp_pose(a.robot.base, b.robot.base, t);
    s.robot.base_vel = a.robot.base_vel + t * (b.robot.base_vel - a.robot.base_vel);
    s.robot.yaw_rate = lerp(a.robot.yaw_rate, b.robot.yaw_rate, t);
    for (int j = 0; j < 2; ++j) {
      s.robot.q_arm[j] = lerp(a.robot.q_arm[j], b.robot.q_arm[j], t);
      s.robot.qd_arm[j] = lerp(a.robot.qd_arm[j], b.robot.qd_arm[j], t);
    }
    s.robot.ee_pos = a.robot.ee_pos + t * (b.robot.ee_pos - a.robot.ee_pos);
    s.robot.ee_vel = a.robot.ee_vel + t * (b.robot.ee_vel - a.robot.ee_vel);
    s.q_o = lerp(a.q_o, b.q_o, t);
    s.qd_o = lerp(a.qd_o, b.qd_o, t);
    s.mode = knots[mode_knot].mode;
    return s;
  }

  /// Phase of knot j.
  double knot_phase(int j) const { return static_cast<double>(j) / (knot_count() - 1); }
};

// ---------------------------------------------------------------------------
// JSON serialization (flat numeric arrays per field, full double precision)
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json object_spec_to_json(const ObjectSpec& s) {
  return {{"kind", s.kind == ObjectKind::hinged_door ? "hinged_door" : "prismatic_tray"},
          {"panel_length", s.panel_length},
          {"handle_offset", s.handle_offset},
          {"handle_shape", s.handle_shape},
          {"inertia", s.inertia},
          {"stiffness", s.stiffness},
          {"damping", s.damping},
          {"dry_friction", s.dry_friction},
          {"q_min", s.q_min},
          {"q_max", s.q_max},
          {"q_rest", s.q_rest},
          {"bias", s.bias}};
}

inline ObjectSpec object_spec_from_json(const nlohmann::json& j) {
  ObjectSpec s;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "hinged_door")
    s.kind = ObjectKind::hinged_door;
  else if (kind == "prismatic_tray")
    s.kind = ObjectKind::prismatic_tray;
  else
    throw ContractViolation("object spec: unknown kind " + kind);
  s.panel_length = j.at("panel_length").get<double>();
  s.handle_offset = j.at("handle_offset").get<double>();
  s.handle_shape = j.at("handle_shape").get<int>();
  s.inertia = j.at("inertia").get<double>();
  s.stiffness = j.at("stiffness").get<double>();
  s.damping = j.at("damping").get<double>();
  s.dry_friction = j.at("dry_friction").get<double>();
  s.q_min = j.at("q_min").get<double>();
  s.q_max = j.at("q_max").get<double>();
  s.q_rest = j.at("q_rest").get<double>();
  s.bias = j.at("bias").get<double>();
  return s;
}

}  // namespace detail

inline void demo_save(const Demonstration& d, const std::string& path) {
  d.validate();
  nlohmann::json j;
  j["version"] = d.version;
  j["task_id"] = task_name(d.task_id);
  j["dt_ref"] = d.dt_ref;
  j["T_task"] = d.T_task;
  j["object_spec"] = detail::object_spec_to_json(d.object_spec);

  auto col = [&](auto&& get) {
    std::vector<double> v;
    v.reserve(d.knots.size());
    for (const auto& k : d.knots) v.push_back(get(k));
    return v;
  };
  auto icol = [&](auto&& get) {
    std::vector<int> v;
    v.reserve(d.knots.size());
    for (const auto& k : d.knots) v.push_back(get(k));
    return v;
  };

  nlohmann::json knots;
  knots["base_x"] = col([](const DemoKnot& k) { return k.robot.base.x; });
  knots["base_y"] = col([](const DemoKnot& k) { return k.robot.base.y; });
  knots["base_yaw"] = col([](const DemoKnot& k) { return k.robot.base.yaw; });
  knots["base_vx"] = col([](const DemoKnot& k) { return k.robot.base_vel.x(); });
  knots["base_vy"] = col([](const DemoKnot& k) { return k.robot.base_vel.y(); });
  knots["yaw_rate"] = col([](const DemoKnot& k) { return k.robot.yaw_rate; });
  knots["q_arm1"] = col([](const DemoKnot& k) { return k.robot.q_arm[0]; });
  knots["q_arm2"] = col([](const DemoKnot& k) { return k.robot.q_arm[1]; });
  knots["qd_arm1"] = col([](const DemoKnot& k) { return k.robot.qd_arm[0]; });
  knots["qd_arm2"] = col([](const DemoKnot& k) { return k.robot.qd_arm[1]; });
  knots["ee_x"] = col([](const DemoKnot& k) { return k.robot.ee_pos.x(); });
  knots["ee_y"] = col([](const DemoKnot& k) { return k.robot.ee_pos.y(); });
  knots["ee_vx"] = col([](const DemoKnot& k) { return k.robot.ee_vel.x(); });
  knots["ee_vy"] = col([](const DemoKnot& k) { return k.robot.ee_vel.y(); });
  knots["q_o"] = col([](const DemoKnot& k) { return k.q_o; });
  knots["qd_o"] = col([](const DemoKnot& k) { return k.qd_o; });
  knots["arm_interaction"] = icol([](const DemoKnot& k) { return int(k.mode.interaction[0]); });
  knots["arm_target"] = icol([](const DemoKnot& k) { return int(k.mode.target[0]); });
  knots["bumper_interaction"] = icol([](const DemoKnot& k) { return int(k.mode.interaction[1]); });
  knots["bumper_target"] = icol([](const DemoKnot& k) { return int(k.mode.target[1]); });
  j["knots"] = std::move(knots);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("demo_save: cannot open " + path);
  out << j.dump(1) << "\n";
}

inline Demonstration demo_load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("demo_load: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ContractViolation(std::string("demo_load: malformed file: ") + e.what());
  }

  Demonstration d;
  try {
    d.version = j.at("version").get<int>();
    if (d.version != kDemoFormatVersion)
      throw ContractViolation("demo_load: unsupported version " + std::to_string(d.version));
    d.task_id = task_from_name(j.at("task_id").get<std::string>());
    d.dt_ref = j.at("dt_ref").get<double>();
    d.T_task = j.at("T_task").get<double>();
    d.object_spec = detail::object_spec_from_json(j.at("object_spec"));

    const auto& k = j.at("knots");
    const auto& bx = k.at("base_x");
    const size_t n = bx.size();
    auto need = [&](const char* name) -> const nlohmann::json& {
      const auto& arr = k.at(name);
      if (arr.size() != n) throw ContractViolation(std::string("demo_load: ragged column ") + name);
      return arr;
    };
    const auto& by = need("base_y");
    const auto& byaw = need("base_yaw");
    const auto& bvx = need("base_vx");
    const auto& bvy = need("base_vy");
    const auto& yr = need("yaw_rate");
    const auto& q1 = need("q_arm1");
    const auto& q2 = need("q_arm2");
    const auto& qd1 = need("qd_arm1");
    const auto& qd2 = need("qd_arm2");
    const auto& eex = need("ee_x");
    const auto& eey = need("ee_y");
    const auto& eevx = need("ee_vx");
    const auto& eevy = need("ee_vy");
    const auto& qo = need("q_o");
    const auto& qdo = need("qd_o");
    const auto& ai = need("arm_interaction");
    const auto& at = need("arm_target");
    const auto& bi = need("bumper_interaction");
    const auto& bt = need("bumper_target");

    d.knots.resize(n);
    for (size_t i = 0; i < n; ++i) {
      DemoKnot& kn = d.knots[i];
      kn.robot.base = Pose2(bx[i].get<double>(), by[i].get<double>(), byaw[i].get<double>());
      kn.robot.base.yaw = byaw[i].get<double>();  // keep stored value bit-exact
      kn.robot.base_vel = {bvx[i].get<double>(), bvy[i].get<double>()};
      kn.robot.yaw_rate = yr[i].get<double>();
      kn.robot.q_arm = {q1[i].get<double>(), q2[i].get<double>()};
      kn.robot.qd_arm = {qd1[i].get<double>(), qd2[i].get<double>()};
      kn.robot.ee_pos = {eex[i].get<double>(), eey[i].get<double>()};
      kn.robot.ee_vel = {eevx[i].get<double>(), eevy[i].get<double>()};
      kn.q_o = qo[i].get<double>();
      kn.qd_o = qdo[i].get<double>();
      kn.mode.interaction = {Interaction(ai[i].get<int>()), Interaction(bi[i].get<int>())};
      kn.mode.target = {Affordance(at[i].get<int>()), Affordance(bt[i].get<int>())};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ContractViolation(std::string("demo_load: malformed file: ") + e.what());
  }
  d.validate();
  return d;
}

}  // namespace locoma
