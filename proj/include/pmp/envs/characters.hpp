#pragma once

#include "pmp/sim/types.hpp"

namespace pmp::envs {

/// Planar biped, ~0.76 m tall: torso root, two 2-link legs, two 1-link arms.
/// Standing root height is 0.58 m (feet = shin lower ends).
inline sim::BodyDef make_walker() {
  using sim::JointDef;
  using sim::LinkDef;
  using sim::ShapeDef;
  sim::BodyDef def;

  auto link = [&](const std::string& name, double mass, double inertia, double hx, double hy) {
    LinkDef l;
    l.name = name;
    l.mass = mass;
    l.inertia = inertia;
    l.shapes.push_back(ShapeDef::box(hx, hy));
    def.links.push_back(std::move(l));
  };
  link("torso", 3.0, 0.035, 0.05, 0.18);
  link("thigh_l", 1.0, 0.004, 0.03, 0.10);
  link("shin_l", 0.6, 0.002, 0.025, 0.10);
  link("thigh_r", 1.0, 0.004, 0.03, 0.10);
  link("shin_r", 0.6, 0.002, 0.025, 0.10);
  link("arm_l", 0.4, 0.0015, 0.025, 0.10);
  link("arm_r", 0.4, 0.0015, 0.025, 0.10);

  auto joint = [&](const std::string& name, const std::string& parent, const std::string& child,
                   Vector2d ap, Vector2d ac, double lo, double hi, double tl, double kp,
                   double kd) {
    JointDef j;
    j.name = name;
    j.parent = parent;
    j.child = child;
    j.anchor_parent = ap;
    j.anchor_child = ac;
    j.lo = lo;
    j.hi = hi;
    j.torque_limit = tl;
    j.kp = kp;
    j.kd = kd;
    def.joints.push_back(std::move(j));
  };
  joint("hip_l", "torso", "thigh_l", {0, -0.18}, {0, 0.10}, -1.2, 2.2, 60, 80, 3);
  joint("knee_l", "thigh_l", "shin_l", {0, -0.10}, {0, 0.10}, -2.4, 0.05, 60, 80, 3);
  joint("hip_r", "torso", "thigh_r", {0, -0.18}, {0, 0.10}, -1.2, 2.2, 60, 80, 3);
  joint("knee_r", "thigh_r", "shin_r", {0, -0.10}, {0, 0.10}, -2.4, 0.05, 60, 80, 3);
  joint("shoulder_l", "torso", "arm_l", {0, 0.12}, {0, 0.10}, -2.8, 2.8, 30, 40, 1.5);
  joint("shoulder_r", "torso", "arm_r", {0, 0.12}, {0, 0.10}, -2.8, 2.8, 30, 40, 1.5);

  def.foot_links = {"shin_l", "shin_r"};
  return def;
}

/// Standing torso-centre height for make_walker().
inline double walker_stand_height() { return 0.58; }

/// Planar pincer for the interaction gym: fixed base, 1-DoF wrist, two
/// 2-link fingers opening toward +x. MCP joints are the two proximal ones.
inline sim::BodyDef make_gripper() {
  using sim::JointDef;
  using sim::LinkDef;
  using sim::ShapeDef;
  sim::BodyDef def;

  auto link = [&](const std::string& name, double mass, double inertia, double hx, double hy) {
    LinkDef l;
    l.name = name;
    l.mass = mass;
    l.inertia = inertia;
    l.shapes.push_back(ShapeDef::box(hx, hy));
    def.links.push_back(std::move(l));
  };
  link("base", 1.0, 0.01, 0.015, 0.015);
  link("palm", 0.5, 0.0012, 0.02, 0.06);
  link("f1_prox", 0.12, 0.0002, 0.035, 0.012);
  link("f1_dist", 0.08, 0.0001, 0.030, 0.009);
  link("f2_prox", 0.12, 0.0002, 0.035, 0.012);
  link("f2_dist", 0.08, 0.0001, 0.030, 0.009);

  auto joint = [&](const std::string& name, const std::string& parent, const std::string& child,
                   Vector2d ap, Vector2d ac, double lo, double hi, double tl, double kp,
                   double kd) {
    JointDef j;
    j.name = name;
    j.parent = parent;
    j.child = child;
    j.anchor_parent = ap;
    j.anchor_child = ac;
    j.lo = lo;
    j.hi = hi;
    j.torque_limit = tl;
    j.kp = kp;
    j.kd = kd;
    def.joints.push_back(std::move(j));
  };
  joint("wrist", "base", "palm", {0, 0}, {0, 0}, -0.6, 0.6, 6, 25, 1.0);
  joint("f1_mcp", "palm", "f1_prox", {0, 0.07}, {-0.035, 0}, -1.6, 0.3, 2.5, 12, 0.4);
  joint("f1_pip", "f1_prox", "f1_dist", {0.035, 0}, {-0.030, 0}, -1.6, 0.1, 1.5, 8, 0.25);
  joint("f2_mcp", "palm", "f2_prox", {0, -0.07}, {-0.035, 0}, -0.3, 1.6, 2.5, 12, 0.4);
  joint("f2_pip", "f2_prox", "f2_dist", {0.035, 0}, {-0.030, 0}, -0.1, 1.6, 1.5, 8, 0.25);

  def.fixed_base = true;
  def.fingertip_links = {"f1_dist", "f2_dist"};
  def.palm_link = "palm";
  return def;
}

/// MCP joint names of make_gripper(), the set excluded from torque penalties.
inline std::vector<std::string> gripper_mcp_joints() { return {"f1_mcp", "f2_mcp"}; }

/// Generic dynamic disk prop (balls, rod cross-sections, cart handles).
inline sim::ObjectDef ball_object(double mass, double start_y, double radius = 0.08,
                                  const std::string& name = "ball") {
  sim::ObjectDef o;
  o.name = name;
  o.mass = mass;
  o.inertia = 0.5 * mass * radius * radius;
  o.shapes = {sim::ShapeDef::disk(radius)};
  o.start_pos = Vector2d(0.0, start_y);
  return o;
}

}  // namespace pmp::envs
