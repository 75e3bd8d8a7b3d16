#pragma once

#include <ostream>

#include "pmp/sim/world.hpp"

namespace pmp::sim {

/// Line-per-step scene snapshot columns for offline plotting.
inline void csv_header(const World& w, std::ostream& os) {
  os << "time,root_x,root_y,root_ang,root_vx,root_vy,root_angvel";
  for (const JointDef& j : w.character().joints) os << ",q_" << j.name;
  for (const JointDef& j : w.character().joints) os << ",qd_" << j.name;
  for (const JointDef& j : w.character().joints) os << ",tau_" << j.name;
  for (const ObjectDef& o : w.objects())
    os << ',' << o.name << "_x," << o.name << "_y," << o.name << "_ang," << o.name << "_vx,"
       << o.name << "_vy," << o.name << "_angvel";
  os << '\n';
}

inline void csv_row(const World& w, const SimState& s, std::ostream& os) {
  os << s.time << ',' << s.root_pos.x() << ',' << s.root_pos.y() << ',' << s.root_ang << ','
     << s.root_vel.x() << ',' << s.root_vel.y() << ',' << s.root_angvel;
  for (int j = 0; j < w.joint_count(); ++j) os << ',' << s.q[j];
  for (int j = 0; j < w.joint_count(); ++j) os << ',' << s.qd[j];
  for (int j = 0; j < w.joint_count(); ++j)
    os << ',' << (s.applied_torque.size() == w.joint_count() ? s.applied_torque[j] : 0.0);
  for (int i = 0; i < w.object_count(); ++i)
    os << ',' << s.obj_pos[i].x() << ',' << s.obj_pos[i].y() << ',' << s.obj_ang[i] << ','
       << s.obj_vel[i].x() << ',' << s.obj_vel[i].y() << ',' << s.obj_angvel[i];
  os << '\n';
}

}  // namespace pmp::sim
