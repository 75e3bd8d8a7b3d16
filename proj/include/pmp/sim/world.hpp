#pragma once

#include <algorithm>

#include "pmp/sim/types.hpp"

namespace pmp::sim {

struct ContactFeatures {
  std::vector<int> flag;             // any single contact force above f_min
  std::vector<Vector2d> direction;   // unit net contact force, zero if none
};

/// Planar articulated world. Joint coordinates are the canonical positions
/// (links never drift apart); per-link world velocities are the canonical
/// velocities and change only through applied forces and the equal-and-
/// opposite joint impulses of a direct LDLT solve, so internal actuation
/// cannot leak linear momentum.
class World {
 public:
  World(BodyDef character, std::vector<ObjectDef> objects, SimParams params)
      : def_(std::move(character)), objects_(std::move(objects)), params_(std::move(params)) {
    validate();
  }

  const BodyDef& character() const { return def_; }
  const std::vector<ObjectDef>& objects() const { return objects_; }
  const SimParams& params() const { return params_; }
  SimParams& params() { return params_; }

  int link_count() const { return static_cast<int>(def_.links.size()); }
  int object_count() const { return static_cast<int>(objects_.size()); }
  int body_count() const { return link_count() + object_count(); }
  int joint_count() const { return static_cast<int>(def_.joints.size()); }

  int link_index(const std::string& name) const {
    for (int i = 0; i < link_count(); ++i)
      if (def_.links[i].name == name) return i;
    throw ConfigError("unknown link: " + name);
  }
  int object_index(const std::string& name) const {
    for (int i = 0; i < object_count(); ++i)
      if (objects_[i].name == name) return i;
    throw ConfigError("unknown object: " + name);
  }
  /// Body index (links first, then objects) by name.
  int body_index(const std::string& name) const {
    for (int i = 0; i < link_count(); ++i)
      if (def_.links[i].name == name) return i;
    for (int i = 0; i < object_count(); ++i)
      if (objects_[i].name == name) return link_count() + i;
    throw ConfigError("unknown body: " + name);
  }
  int joint_index(const std::string& name) const {
    for (int i = 0; i < joint_count(); ++i)
      if (def_.joints[i].name == name) return i;
    throw ConfigError("unknown joint: " + name);
  }

  SimState make_state() const {
    SimState s;
    s.q = VectorXd::Zero(joint_count());
    for (int j = 0; j < joint_count(); ++j)
      s.q[j] = clampd(0.0, def_.joints[j].lo, def_.joints[j].hi);
    s.qd = VectorXd::Zero(joint_count());
    s.applied_torque = VectorXd::Zero(joint_count());
    s.link_vel.assign(link_count(), Vector2d::Zero());
    s.link_angvel.assign(link_count(), 0.0);
    s.obj_pos.resize(object_count());
    s.obj_ang.resize(object_count());
    s.obj_vel.assign(object_count(), Vector2d::Zero());
    s.obj_angvel.assign(object_count(), 0.0);
    for (int i = 0; i < object_count(); ++i) {
      s.obj_pos[i] = objects_[i].start_pos;
      s.obj_ang[i] = objects_[i].start_ang;
    }
    s.ext.assign(body_count(), Wrench{});
    return s;
  }

  /// Forward kinematics from the reduced coordinates; velocities are copied
  /// from the canonical per-link arrays.
  std::vector<BodyFrame> link_frames(const SimState& s) const {
    std::vector<BodyFrame> f(link_count());
    f[0].pos = s.root_pos;
    f[0].ang = s.root_ang;
    for (int oi : order_) {
      const JointDef& j = def_.joints[oi];
      const int p = parent_idx_[oi], c = child_idx_[oi];
      f[c].ang = f[p].ang + s.q[oi];
      f[c].pos = f[p].pos + rotate(f[p].ang, j.anchor_parent) - rotate(f[c].ang, j.anchor_child);
    }
    for (int i = 0; i < link_count(); ++i) {
      f[i].vel = s.link_vel[i];
      f[i].angvel = s.link_angvel[i];
    }
    return f;
  }

  BodyFrame object_frame(const SimState& s, int i) const {
    BodyFrame f;
    f.pos = s.obj_pos[i];
    f.ang = s.obj_ang[i];
    f.vel = s.obj_vel[i];
    f.angvel = s.obj_angvel[i];
    return f;
  }

  /// Rebuild the canonical link velocities from root velocity and qd. Call
  /// after writing reduced velocities directly (resets, clip playback).
  void refresh_velocities(SimState& s) const {
    std::vector<BodyFrame> f = link_frames(s);
    if (def_.fixed_base) {
      s.root_vel.setZero();
      s.root_angvel = 0.0;
    }
    f[0].vel = s.root_vel;
    f[0].angvel = s.root_angvel;
    for (int oi : order_) {
      const JointDef& j = def_.joints[oi];
      const int p = parent_idx_[oi], c = child_idx_[oi];
      f[c].angvel = f[p].angvel + s.qd[oi];
      f[c].vel = f[p].vel + f[p].angvel * perp(rotate(f[p].ang, j.anchor_parent)) -
                 f[c].angvel * perp(rotate(f[c].ang, j.anchor_child));
    }
    for (int i = 0; i < link_count(); ++i) {
      s.link_vel[i] = f[i].vel;
      s.link_angvel[i] = f[i].angvel;
    }
  }

  /// Queue an external wrench on a link or scene object for the next control
  /// period only.
  SimState apply_wrench(const SimState& s, const std::string& body, const Vector2d& force,
                        double torque) const {
    if (!force.allFinite() || !std::isfinite(torque))
      throw ConfigError("apply_wrench: non-finite wrench");
    SimState out = s;
    const int b = body_index(body);
    if (out.ext.size() != static_cast<std::size_t>(body_count()))
      out.ext.assign(body_count(), Wrench{});
    out.ext[b].force += force;
    out.ext[b].torque += torque;
    return out;
  }

  /// Advance exactly one control period (1/control_hz seconds).
  SimState step(const SimState& s, const PDTarget& target, int substeps_override = 0) const {
    const int substeps = substeps_override > 0 ? substeps_override : params_.substeps;
    check_state(s, target);
    SimState st = s;
    st.applied_torque = VectorXd::Zero(joint_count());
    const double dt = params_.control_dt() / substeps;
    for (int k = 0; k < substeps; ++k) substep(st, target, dt);
    st.applied_torque /= substeps;
    st.ext.assign(body_count(), Wrench{});
    if (!finite_state(st))
      throw SimDivergedError("simulation diverged", std::lround(st.time * params_.control_hz));
    return st;
  }

  ContactFeatures contact_features(const SimState& s, const std::vector<int>& bodies) const {
    ContactFeatures out;
    out.flag.assign(bodies.size(), 0);
    out.direction.assign(bodies.size(), Vector2d::Zero());
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      if (bodies[i] < 0 || bodies[i] >= body_count())
        throw ConfigError("contact_features: bad body index");
      Vector2d net = Vector2d::Zero();
      for (const Contact& c : s.contacts) {
        if (c.body != bodies[i]) continue;
        net += c.force;
        if (c.force.norm() >= params_.contact_f_min) out.flag[i] = 1;
      }
      const double n = net.norm();
      if (n > 1e-12) out.direction[i] = net / n;
    }
    return out;
  }

  /// Sum of m·v over all dynamic bodies.
  Vector2d linear_momentum(const SimState& s) const {
    Vector2d p = Vector2d::Zero();
    for (int i = 0; i < link_count(); ++i)
      if (inv_mass_[i] > 0.0) p += def_.links[i].mass * s.link_vel[i];
    for (int i = 0; i < object_count(); ++i)
      if (!objects_[i].fixed) p += objects_[i].mass * s.obj_vel[i];
    return p;
  }

  double kinetic_energy(const SimState& s) const {
    double e = 0.0;
    for (int i = 0; i < link_count(); ++i) {
      if (inv_mass_[i] == 0.0) continue;
      e += 0.5 * def_.links[i].mass * s.link_vel[i].squaredNorm() +
           0.5 * def_.links[i].inertia * s.link_angvel[i] * s.link_angvel[i];
    }
    for (int i = 0; i < object_count(); ++i) {
      if (objects_[i].fixed) continue;
      e += 0.5 * objects_[i].mass * s.obj_vel[i].squaredNorm() +
           0.5 * objects_[i].inertia * s.obj_angvel[i] * s.obj_angvel[i];
    }
    return e;
  }

  double potential_energy(const SimState& s) const {
    if (!params_.enable_gravity) return 0.0;
    double e = 0.0;
    std::vector<BodyFrame> f = link_frames(s);
    for (int i = 0; i < link_count(); ++i)
      if (inv_mass_[i] > 0.0) e -= def_.links[i].mass * params_.gravity.dot(f[i].pos);
    for (int i = 0; i < object_count(); ++i)
      if (!objects_[i].fixed && objects_[i].gravity)
        e -= objects_[i].mass * params_.gravity.dot(s.obj_pos[i]);
    return e;
  }

  double max_penetration(const SimState& s) const {
    double m = 0.0;
    for (const Contact& c : s.contacts) m = std::max(m, c.penetration);
    return m;
  }

 private:
  BodyDef def_;
  std::vector<ObjectDef> objects_;
  SimParams params_;
  std::vector<int> parent_idx_, child_idx_;  // per joint
  std::vector<int> order_;                   // joints in root-to-leaf order
  std::vector<double> inv_mass_, inv_inertia_;  // links then objects

  void validate() {
    if (def_.links.empty()) throw ConfigError("character needs at least one link");
    if (params_.substeps < 1) throw ConfigError("substeps must be >= 1");
    if (params_.control_hz <= 0) throw ConfigError("control_hz must be positive");
    for (const LinkDef& l : def_.links)
      if (l.mass <= 0 || l.inertia <= 0)
        throw ConfigError("link " + l.name + ": mass and inertia must be positive");
    for (const ObjectDef& o : objects_)
      if (o.mass <= 0 || o.inertia <= 0)
        throw ConfigError("object " + o.name + ": mass and inertia must be positive");
    for (int i = 0; i < link_count(); ++i)
      for (int k = i + 1; k < link_count(); ++k)
        if (def_.links[i].name == def_.links[k].name)
          throw ConfigError("duplicate link name: " + def_.links[i].name);

    parent_idx_.resize(joint_count());
    child_idx_.resize(joint_count());
    std::vector<int> parent_joint(link_count(), -1);
    for (int j = 0; j < joint_count(); ++j) {
      const JointDef& jd = def_.joints[j];
      if (jd.lo >= jd.hi) throw ConfigError("joint " + jd.name + ": limits need lo < hi");
      if (jd.torque_limit <= 0) throw ConfigError("joint " + jd.name + ": torque limit must be positive");
      if (jd.kp < 0 || jd.kd < 0) throw ConfigError("joint " + jd.name + ": gains must be non-negative");
      parent_idx_[j] = link_index(jd.parent);
      child_idx_[j] = link_index(jd.child);
      if (child_idx_[j] == 0) throw ConfigError("joint " + jd.name + ": root cannot be a child");
      if (parent_idx_[j] == child_idx_[j])
        throw ConfigError("joint " + jd.name + ": parent equals child");
      if (parent_joint[child_idx_[j]] != -1)
        throw ConfigError("link " + jd.child + " has two parent joints");
      parent_joint[child_idx_[j]] = j;
    }
    // Root-to-leaf order; every non-root link must be reachable.
    order_.clear();
    std::vector<int> placed(link_count(), 0);
    placed[0] = 1;
    bool progress = true;
    while (progress) {
      progress = false;
      for (int j = 0; j < joint_count(); ++j) {
        if (placed[child_idx_[j]] || !placed[parent_idx_[j]]) continue;
        order_.push_back(j);
        placed[child_idx_[j]] = 1;
        progress = true;
      }
    }
    for (int i = 0; i < link_count(); ++i)
      if (!placed[i]) throw ConfigError("link " + def_.links[i].name + " is not connected to the root");

    inv_mass_.assign(body_count(), 0.0);
    inv_inertia_.assign(body_count(), 0.0);
    for (int i = 0; i < link_count(); ++i) {
      const bool stat = def_.fixed_base && i == 0;
      inv_mass_[i] = stat ? 0.0 : 1.0 / def_.links[i].mass;
      inv_inertia_[i] = stat ? 0.0 : 1.0 / def_.links[i].inertia;
    }
    for (int i = 0; i < object_count(); ++i) {
      inv_mass_[link_count() + i] = objects_[i].fixed ? 0.0 : 1.0 / objects_[i].mass;
      inv_inertia_[link_count() + i] = objects_[i].fixed ? 0.0 : 1.0 / objects_[i].inertia;
    }
    for (const std::string& n : def_.fingertip_links) link_index(n);
    for (const std::string& n : def_.foot_links) link_index(n);
    if (!def_.palm_link.empty()) link_index(def_.palm_link);
  }

  void check_state(const SimState& s, const PDTarget& target) const {
    if (s.q.size() != joint_count() || s.qd.size() != joint_count())
      throw ConfigError("step: q/qd dimension mismatch");
    if (target.q_star.size() != joint_count())
      throw ConfigError("step: PD target dimension mismatch");
    if (s.link_vel.size() != static_cast<std::size_t>(link_count()) ||
        s.link_angvel.size() != static_cast<std::size_t>(link_count()))
      throw ConfigError("step: link velocity arrays not initialized (use make_state)");
    if (s.obj_pos.size() != static_cast<std::size_t>(object_count()))
      throw ConfigError("step: object array mismatch");
    if (!finite_state(s) || !target.q_star.allFinite())
      throw ConfigError("step: non-finite input state");
  }

  bool finite_state(const SimState& s) const {
    if (!s.root_pos.allFinite() || !std::isfinite(s.root_ang) || !s.root_vel.allFinite() ||
        !std::isfinite(s.root_angvel) || !s.q.allFinite() || !s.qd.allFinite())
      return false;
    for (int i = 0; i < link_count(); ++i)
      if (!s.link_vel[i].allFinite() || !std::isfinite(s.link_angvel[i])) return false;
    for (int i = 0; i < object_count(); ++i)
      if (!s.obj_pos[i].allFinite() || !std::isfinite(s.obj_ang[i]) ||
          !s.obj_vel[i].allFinite() || !std::isfinite(s.obj_angvel[i]))
        return false;
    return true;
  }

  struct ShapeWorld {
    const ShapeDef* shape;
    int body;
    Vector2d center;  // shape offset in world
    double ang;       // body angle
  };

  void substep(SimState& s, const PDTarget& target, double dt) const {
    const int nl = link_count(), nb = body_count();
    std::vector<BodyFrame> frames(nb);
    {
      std::vector<BodyFrame> lf = link_frames(s);
      for (int i = 0; i < nl; ++i) frames[i] = lf[i];
      for (int i = 0; i < object_count(); ++i) frames[nl + i] = object_frame(s, i);
    }

    // Force accumulation: gravity, queued wrenches, PD pairs, contacts.
    std::vector<Vector2d> force(nb, Vector2d::Zero());
    std::vector<double> torque(nb, 0.0);
    if (params_.enable_gravity) {
      for (int i = 0; i < nl; ++i)
        if (inv_mass_[i] > 0.0) force[i] += def_.links[i].mass * params_.gravity;
      for (int i = 0; i < object_count(); ++i)
        if (!objects_[i].fixed && objects_[i].gravity)
          force[nl + i] += objects_[i].mass * params_.gravity;
    }
    if (s.ext.size() == static_cast<std::size_t>(nb)) {
      for (int i = 0; i < nb; ++i) {
        force[i] += s.ext[i].force;
        torque[i] += s.ext[i].torque;
      }
    }
    for (int j = 0; j < joint_count(); ++j) {
      const JointDef& jd = def_.joints[j];
      const double tau = clampd(jd.kp * (target.q_star[j] - s.q[j]) - jd.kd * s.qd[j],
                                -jd.torque_limit, jd.torque_limit);
      torque[child_idx_[j]] += tau;
      torque[parent_idx_[j]] -= tau;
      s.applied_torque[j] += tau;
    }
    if (params_.enable_contacts) collide(s, frames, force, torque);

    // Predicted velocities.
    for (int i = 0; i < nb; ++i) {
      if (inv_mass_[i] == 0.0) continue;
      Vector2d v = i < nl ? s.link_vel[i] : s.obj_vel[i - nl];
      double w = i < nl ? s.link_angvel[i] : s.obj_angvel[i - nl];
      v += dt * inv_mass_[i] * force[i];
      w += dt * inv_inertia_[i] * torque[i];
      if (i < nl) {
        s.link_vel[i] = v;
        s.link_angvel[i] = w;
      } else {
        s.obj_vel[i - nl] = v;
        s.obj_angvel[i - nl] = w;
      }
    }

    solve_joint_impulses(s, frames);

    // Reduced-rate extraction, then position integration.
    if (!def_.fixed_base) {
      s.root_vel = s.link_vel[0];
      s.root_angvel = s.link_angvel[0];
      s.root_pos += dt * s.root_vel;
      s.root_ang += dt * s.root_angvel;
    } else {
      s.root_vel.setZero();
      s.root_angvel = 0.0;
    }
    for (int j = 0; j < joint_count(); ++j) {
      s.qd[j] = s.link_angvel[child_idx_[j]] - s.link_angvel[parent_idx_[j]];
      s.q[j] = clampd(s.q[j] + dt * s.qd[j], def_.joints[j].lo, def_.joints[j].hi);
    }
    for (int i = 0; i < object_count(); ++i) {
      if (objects_[i].fixed) continue;
      s.obj_pos[i] += dt * s.obj_vel[i];
      s.obj_ang[i] += dt * s.obj_angvel[i];
    }
    s.time += dt;
  }

  /// Equality rows: two per joint anchor; plus one angular row per joint at a
  /// position limit and still moving outward.
  void solve_joint_impulses(SimState& s, const std::vector<BodyFrame>& frames) const {
    const int nj = joint_count();
    if (nj == 0) return;
    std::vector<int> limit_rows;
    for (int j = 0; j < nj; ++j) {
      const double rel = s.link_angvel[child_idx_[j]] - s.link_angvel[parent_idx_[j]];
      if ((s.q[j] <= def_.joints[j].lo + 1e-9 && rel < 0.0) ||
          (s.q[j] >= def_.joints[j].hi - 1e-9 && rel > 0.0))
        limit_rows.push_back(j);
    }
    const int nl = link_count();
    const int rows = 2 * nj + static_cast<int>(limit_rows.size());
    MatrixXd J = MatrixXd::Zero(rows, 3 * nl);
    VectorXd u(3 * nl);
    VectorXd minv(3 * nl);
    for (int i = 0; i < nl; ++i) {
      u[3 * i] = s.link_vel[i].x();
      u[3 * i + 1] = s.link_vel[i].y();
      u[3 * i + 2] = s.link_angvel[i];
      minv[3 * i] = inv_mass_[i];
      minv[3 * i + 1] = inv_mass_[i];
      minv[3 * i + 2] = inv_inertia_[i];
    }
    for (int j = 0; j < nj; ++j) {
      const int p = parent_idx_[j], c = child_idx_[j];
      const Vector2d rp = rotate(frames[p].ang, def_.joints[j].anchor_parent);
      const Vector2d rc = rotate(frames[c].ang, def_.joints[j].anchor_child);
      // anchor velocity difference: v_p + w_p x r_p - v_c - w_c x r_c
      J(2 * j, 3 * p) = 1.0;
      J(2 * j, 3 * p + 2) = -rp.y();
      J(2 * j, 3 * c) = -1.0;
      J(2 * j, 3 * c + 2) = rc.y();
      J(2 * j + 1, 3 * p + 1) = 1.0;
      J(2 * j + 1, 3 * p + 2) = rp.x();
      J(2 * j + 1, 3 * c + 1) = -1.0;
      J(2 * j + 1, 3 * c + 2) = -rc.x();
    }
    for (std::size_t k = 0; k < limit_rows.size(); ++k) {
      const int j = limit_rows[k];
      J(2 * nj + static_cast<int>(k), 3 * child_idx_[j] + 2) = 1.0;
      J(2 * nj + static_cast<int>(k), 3 * parent_idx_[j] + 2) = -1.0;
    }
    MatrixXd A = J * minv.asDiagonal() * J.transpose();
    A.diagonal().array() += params_.constraint_reg;
    VectorXd lambda = A.ldlt().solve(-(J * u));
    VectorXd du = minv.asDiagonal() * (J.transpose() * lambda);
    for (int i = 0; i < nl; ++i) {
      s.link_vel[i].x() += du[3 * i];
      s.link_vel[i].y() += du[3 * i + 1];
      s.link_angvel[i] += du[3 * i + 2];
    }
  }

  void collide(SimState& s, const std::vector<BodyFrame>& frames, std::vector<Vector2d>& force,
               std::vector<double>& torque) const {
    s.contacts.clear();
    std::vector<ShapeWorld> shapes;
    for (int i = 0; i < link_count(); ++i)
      for (const ShapeDef& sh : def_.links[i].shapes)
        shapes.push_back({&sh, i, frames[i].pos + rotate(frames[i].ang, sh.offset), frames[i].ang});
    for (int i = 0; i < object_count(); ++i) {
      const int b = link_count() + i;
      for (const ShapeDef& sh : objects_[i].shapes)
        shapes.push_back({&sh, b, frames[b].pos + rotate(frames[b].ang, sh.offset), frames[b].ang});
    }

    for (const ShapeWorld& sw : shapes) {
      if (params_.ground) collide_ground(s, frames, sw, force, torque);
    }
    const int nl = link_count();
    for (std::size_t a = 0; a < shapes.size(); ++a) {
      for (std::size_t b = a + 1; b < shapes.size(); ++b) {
        const ShapeWorld& A = shapes[a];
        const ShapeWorld& B = shapes[b];
        if (A.body == B.body) continue;
        // Character links never collide with each other (no self collision).
        if (A.body < nl && B.body < nl) continue;
        if (inv_mass_[A.body] == 0.0 && inv_mass_[B.body] == 0.0) continue;
        if (A.shape->type == ShapeDef::Type::Disk && B.shape->type == ShapeDef::Type::Disk)
          disk_disk(s, frames, A, B, force, torque);
        else if (A.shape->type == ShapeDef::Type::Disk && B.shape->type == ShapeDef::Type::Box)
          disk_box(s, frames, A, B, force, torque);
        else if (A.shape->type == ShapeDef::Type::Box && B.shape->type == ShapeDef::Type::Disk)
          disk_box(s, frames, B, A, force, torque);
        // Box-box pairs are not resolved; scenes keep dynamic interactions
        // disk-mediated.
      }
    }
  }

  void collide_ground(SimState& s, const std::vector<BodyFrame>& frames, const ShapeWorld& sw,
                      std::vector<Vector2d>& force, std::vector<double>& torque) const {
    if (inv_mass_[sw.body] == 0.0) return;
    if (sw.shape->type == ShapeDef::Type::Disk) {
      const double pen = params_.ground_y - (sw.center.y() - sw.shape->radius);
      if (pen > 0.0)
        add_contact(s, frames, sw.body, -1, {sw.center.x(), sw.center.y() - sw.shape->radius},
                    {0.0, 1.0}, pen, force, torque);
    } else {
      for (int cx = -1; cx <= 1; cx += 2) {
        for (int cy = -1; cy <= 1; cy += 2) {
          const Vector2d corner =
              sw.center + rotate(sw.ang, Vector2d(cx * sw.shape->hx, cy * sw.shape->hy));
          const double pen = params_.ground_y - corner.y();
          if (pen > 0.0)
            add_contact(s, frames, sw.body, -1, corner, {0.0, 1.0}, pen, force, torque);
        }
      }
    }
  }

  void disk_disk(SimState& s, const std::vector<BodyFrame>& frames, const ShapeWorld& A,
                 const ShapeWorld& B, std::vector<Vector2d>& force,
                 std::vector<double>& torque) const {
    const Vector2d d = A.center - B.center;
    const double dist = d.norm();
    const double pen = A.shape->radius + B.shape->radius - dist;
    if (pen <= 0.0) return;
    const Vector2d n = dist > 1e-12 ? Vector2d(d / dist) : Vector2d(0.0, 1.0);
    const Vector2d point = A.center - n * (A.shape->radius - 0.5 * pen);
    add_contact(s, frames, A.body, B.body, point, n, pen, force, torque);
  }

  void disk_box(SimState& s, const std::vector<BodyFrame>& frames, const ShapeWorld& D,
                const ShapeWorld& B, std::vector<Vector2d>& force,
                std::vector<double>& torque) const {
    // Work in the box frame.
    const Vector2d local = rotate(-B.ang, D.center - B.center);
    const Vector2d cp(clampd(local.x(), -B.shape->hx, B.shape->hx),
                      clampd(local.y(), -B.shape->hy, B.shape->hy));
    Vector2d n_local;
    double pen;
    Vector2d point_local;
    const Vector2d diff = local - cp;
    const double dist = diff.norm();
    if (dist > 1e-12) {  // center outside the box
      pen = D.shape->radius - dist;
      if (pen <= 0.0) return;
      n_local = diff / dist;
      point_local = cp;
    } else {  // center inside: push out through the nearest face
      const double dxp = B.shape->hx - local.x(), dxm = local.x() + B.shape->hx;
      const double dyp = B.shape->hy - local.y(), dym = local.y() + B.shape->hy;
      const double m = std::min({dxp, dxm, dyp, dym});
      if (m == dxp) n_local = {1, 0};
      else if (m == dxm) n_local = {-1, 0};
      else if (m == dyp) n_local = {0, 1};
      else n_local = {0, -1};
      pen = D.shape->radius + m;
      point_local = local + n_local * m;  // projection onto that face
    }
    const Vector2d n = rotate(B.ang, n_local);
    const Vector2d point = B.center + rotate(B.ang, point_local);
    add_contact(s, frames, D.body, B.body, point, n, pen, force, torque);
  }

  void add_contact(SimState& s, const std::vector<BodyFrame>& frames, int a, int b,
                   const Vector2d& point, const Vector2d& n, double pen,
                   std::vector<Vector2d>& force, std::vector<double>& torque) const {
    const Vector2d va = point_velocity(frames[a], point);
    const Vector2d vb = b >= 0 ? point_velocity(frames[b], point) : Vector2d::Zero();
    const Vector2d vrel = va - vb;
    const double vn = vrel.dot(n);
    const double fn = params_.contact_kn * pen - params_.contact_kd * vn;
    if (fn <= 0.0) return;
    const Vector2d t = perp(n);
    const double cap = params_.friction * fn;
    const double ft = clampd(-params_.contact_kt * vrel.dot(t), -cap, cap);
    const Vector2d F = fn * n + ft * t;

    if (inv_mass_[a] > 0.0) {
      force[a] += F;
      torque[a] += cross2(point - frames[a].pos, F);
    }
    if (b >= 0 && inv_mass_[b] > 0.0) {
      force[b] -= F;
      torque[b] -= cross2(point - frames[b].pos, F);
    }
    s.contacts.push_back({a, b, point, n, F, pen});
    if (b >= 0) s.contacts.push_back({b, a, point, -n, -F, pen});
  }
};

}  // namespace pmp::sim
