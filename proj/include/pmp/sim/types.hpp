#pragma once

#include <string>
#include <vector>

#include "pmp/common.hpp"

namespace pmp::sim {

/// Collision shape attached to a body, expressed in the body frame.
struct ShapeDef {
  enum class Type { Disk, Box };
  Type type = Type::Disk;
  double radius = 0.0;        // Disk
  double hx = 0.0, hy = 0.0;  // Box half extents
  Vector2d offset{0.0, 0.0};

  static ShapeDef disk(double r, Vector2d off = {0, 0}) {
    ShapeDef s;
    s.type = Type::Disk;
    s.radius = r;
    s.offset = off;
    return s;
  }
  static ShapeDef box(double hx, double hy, Vector2d off = {0, 0}) {
    ShapeDef s;
    s.type = Type::Box;
    s.hx = hx;
    s.hy = hy;
    s.offset = off;
    return s;
  }
};

struct LinkDef {
  std::string name;
  double mass = 1.0;
  double inertia = 0.01;
  std::vector<ShapeDef> shapes;
};

/// Planar revolute joint; the only supported axis is the out-of-plane z.
struct JointDef {
  std::string name;
  std::string parent, child;
  Vector2d anchor_parent{0, 0};  // pivot in parent frame
  Vector2d anchor_child{0, 0};   // pivot in child frame
  double lo = -3.14, hi = 3.14;  // position limits, rad
  double torque_limit = 50.0;
  double kp = 50.0, kd = 2.0;
};

/// Articulated character: a tree of links rooted at links[0].
struct BodyDef {
  std::vector<LinkDef> links;
  std::vector<JointDef> joints;
  bool fixed_base = false;
  std::vector<std::string> fingertip_links;
  std::string palm_link;
  std::vector<std::string> foot_links;
};

/// Free (or static) scene body: rod, ball, cart, rung...
struct ObjectDef {
  std::string name;
  double mass = 1.0;
  double inertia = 0.01;
  std::vector<ShapeDef> shapes;
  bool gravity = true;
  bool fixed = false;  // infinite mass, e.g. climbing rungs
  Vector2d start_pos{0, 0};
  double start_ang = 0.0;
};

struct SimParams {
  int substeps = 4;
  double control_hz = 30.0;
  Vector2d gravity{0.0, -9.81};
  bool enable_gravity = true;
  bool enable_contacts = true;
  bool ground = true;
  double ground_y = 0.0;
  double contact_kn = 6000.0;  // normal penalty stiffness, N/m
  double contact_kd = 30.0;    // normal damping, N·s/m
  double contact_kt = 30.0;    // tangential viscosity, N·s/m
  double friction = 1.0;       // Coulomb cap on tangential force
  double contact_f_min = 0.5;  // N, binary contact flag threshold
  double penetration_tol = 0.002;
  double constraint_reg = 1e-10;

  double control_dt() const { return 1.0 / control_hz; }
};

/// One resolved contact, recorded per touching dynamic body (mirrored entries
/// for body-body contacts). `body` indexes links first, then scene objects;
/// `other` is -1 for the ground.
struct Contact {
  int body = -1;
  int other = -1;
  Vector2d point{0, 0};
  Vector2d normal{0, 0};  // pushes `body` away from `other`
  Vector2d force{0, 0};   // on `body`, N
  double penetration = 0.0;
};

struct Wrench {
  Vector2d force{0, 0};
  double torque = 0.0;
};

struct PDTarget {
  VectorXd q_star;
};

/// Full simulator state. Root pose plus joint coordinates are the canonical
/// positions; per-link world velocities are the canonical velocities (changed
/// only by forces and by the equal-and-opposite joint impulses, which keeps
/// total momentum exact). qd and root velocity are extracted mirrors.
struct SimState {
  Vector2d root_pos{0, 0};
  double root_ang = 0.0;
  Vector2d root_vel{0, 0};
  double root_angvel = 0.0;
  VectorXd q, qd;

  std::vector<Vector2d> link_vel;
  std::vector<double> link_angvel;

  // Scene objects: pose and velocity per ObjectDef, in definition order.
  std::vector<Vector2d> obj_pos;
  std::vector<double> obj_ang;
  std::vector<Vector2d> obj_vel;
  std::vector<double> obj_angvel;

  std::vector<Contact> contacts;   // from the most recent substep
  VectorXd applied_torque;         // actuator torque per joint, period average
  std::vector<Wrench> ext;         // pending external wrench per body
  double time = 0.0;
};

/// World-frame placement and velocity of one body.
struct BodyFrame {
  Vector2d pos{0, 0};
  double ang = 0.0;
  Vector2d vel{0, 0};
  double angvel = 0.0;
};

inline Vector2d rotate(double ang, const Vector2d& v) {
  const double c = std::cos(ang), s = std::sin(ang);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

inline Vector2d perp(const Vector2d& v) { return {-v.y(), v.x()}; }

inline double cross2(const Vector2d& a, const Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Velocity of a world point rigidly attached to a body.
inline Vector2d point_velocity(const BodyFrame& f, const Vector2d& point) {
  return f.vel + f.angvel * perp(point - f.pos);
}

}  // namespace pmp::sim
