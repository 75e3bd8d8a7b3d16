#pragma once

#include <string>
#include <vector>

#include "pmp/common.hpp"
#include "pmp/sim/world.hpp"

namespace pmp::gym {

/// Hand-centric grasp state: proprioception plus the rod expressed in the
/// palm frame, with contact and force-alignment features.
struct InteractionState {
  VectorXd q;         // hand joint positions
  VectorXd qd;        // hand joint velocities
  MatrixXd tips;      // 2 x T fingertip positions, palm-local
  MatrixXd rod_ends;  // 2 x 2 rod endpoint positions, palm-local
  VectorXd contact;   // T binary fingertip contact flags
  VectorXd align;     // per hand link: <inside axis, contact direction>

  VectorXd flat() const {
    VectorXd v(q.size() + qd.size() + tips.size() + rod_ends.size() + contact.size() +
               align.size());
    Eigen::Index at = 0;
    auto put = [&](const VectorXd& x) {
      v.segment(at, x.size()) = x;
      at += x.size();
    };
    put(q);
    put(qd);
    put(VectorXd(Eigen::Map<const VectorXd>(tips.data(), tips.size())));
    put(VectorXd(Eigen::Map<const VectorXd>(rod_ends.data(), rod_ends.size())));
    put(contact);
    put(align);
    return v;
  }

  static int flat_dim(int joints, int tip_count, int link_count) {
    return 2 * joints + 2 * tip_count + 4 + tip_count + link_count;
  }
};

/// Index bundle tying a gripper character and its rod object together.
struct GripperLayout {
  std::vector<int> joints;       // all hand joints, world order
  std::vector<int> mcp_joints;   // grasp-closing joints
  std::vector<int> other_joints; // complement, used by the effort regularizer
  int wrist_joint = -1;
  std::vector<int> tip_links;
  std::vector<int> hand_links;          // links carrying alignment features
  std::vector<Vector2d> inside_axis;    // body-frame grasp-facing axis per hand link
  std::vector<double> close_sign;       // +1 if closing increases the mcp angle
  int palm_link = -1;
  int rod_object = 0;
  double rod_radius = 0.03;

  static GripperLayout make(const sim::World& w, const std::vector<std::string>& mcp_names,
                            double rod_radius) {
    GripperLayout lay;
    lay.rod_radius = rod_radius;
    for (int j = 0; j < w.joint_count(); ++j) lay.joints.push_back(j);
    for (const auto& name : mcp_names) lay.mcp_joints.push_back(w.joint_index(name));
    for (int j = 0; j < w.joint_count(); ++j) {
      bool mcp = false;
      for (int m : lay.mcp_joints) mcp |= (m == j);
      if (!mcp) lay.other_joints.push_back(j);
    }
    lay.wrist_joint = w.joint_index("wrist");
    lay.palm_link = w.link_index(w.character().palm_link);
    for (const auto& name : w.character().fingertip_links)
      lay.tip_links.push_back(w.link_index(name));
    // Alignment features for every link distal to the base. The grasp cavity
    // sits on +x of the palm; finger 1 closes downward (-y), finger 2 upward.
    for (const auto& link : w.character().links) {
      if (link.name == "base") continue;
      lay.hand_links.push_back(w.link_index(link.name));
      if (link.name == "palm")
        lay.inside_axis.emplace_back(1.0, 0.0);
      else if (link.name.rfind("f1", 0) == 0)
        lay.inside_axis.emplace_back(0.0, -1.0);
      else
        lay.inside_axis.emplace_back(0.0, 1.0);
    }
    // Closing direction per grasp joint: toward whichever limit moves the
    // finger into the cavity. Finger 1 closes toward its lower limit.
    for (int m : lay.mcp_joints) {
      const auto& jd = w.character().joints[static_cast<std::size_t>(m)];
      lay.close_sign.push_back(jd.name.rfind("f1", 0) == 0 ? -1.0 : 1.0);
    }
    return lay;
  }
};

inline Vector2d to_local(const sim::BodyFrame& frame, const Vector2d& world) {
  return sim::rotate(-frame.ang, world - frame.pos);
}

/// Rod endpoints in world coordinates (virtual tips along the body x axis).
inline std::pair<Vector2d, Vector2d> rod_endpoints(const sim::SimState& s,
                                                   const GripperLayout& lay) {
  const Vector2d c = s.obj_pos[static_cast<std::size_t>(lay.rod_object)];
  const double a = s.obj_ang[static_cast<std::size_t>(lay.rod_object)];
  const Vector2d axis = sim::rotate(a, Vector2d(1.0, 0.0)) * lay.rod_radius;
  return {c + axis, c - axis};
}

inline double wrist_object_distance(const sim::World& w, const sim::SimState& s,
                                    const GripperLayout& lay) {
  const auto frames = w.link_frames(s);
  return (frames[static_cast<std::size_t>(lay.palm_link)].pos -
          s.obj_pos[static_cast<std::size_t>(lay.rod_object)])
      .norm();
}

inline InteractionState build_interaction_state(const sim::World& w,
                                                const sim::SimState& s,
                                                const GripperLayout& lay) {
  const auto frames = w.link_frames(s);
  const sim::BodyFrame& palm = frames[static_cast<std::size_t>(lay.palm_link)];

  InteractionState u;
  const int nj = static_cast<int>(lay.joints.size());
  u.q.resize(nj);
  u.qd.resize(nj);
  for (int i = 0; i < nj; ++i) {
    u.q[i] = s.q[lay.joints[static_cast<std::size_t>(i)]];
    u.qd[i] = s.qd[lay.joints[static_cast<std::size_t>(i)]];
  }

  const int nt = static_cast<int>(lay.tip_links.size());
  u.tips.resize(2, nt);
  for (int i = 0; i < nt; ++i)
    u.tips.col(i) = to_local(palm, frames[static_cast<std::size_t>(lay.tip_links[static_cast<std::size_t>(i)])].pos);

  const auto [end_a, end_b] = rod_endpoints(s, lay);
  u.rod_ends.resize(2, 2);
  u.rod_ends.col(0) = to_local(palm, end_a);
  u.rod_ends.col(1) = to_local(palm, end_b);

  const sim::ContactFeatures tipc = w.contact_features(s, lay.tip_links);
  u.contact.resize(nt);
  for (int i = 0; i < nt; ++i) u.contact[i] = tipc.flag[static_cast<std::size_t>(i)];

  const sim::ContactFeatures linkc = w.contact_features(s, lay.hand_links);
  const int nl = static_cast<int>(lay.hand_links.size());
  u.align = VectorXd::Zero(nl);
  for (int i = 0; i < nl; ++i) {
    const Vector2d dir = linkc.direction[static_cast<std::size_t>(i)];
    if (dir.squaredNorm() == 0.0) continue;
    const double ang = frames[static_cast<std::size_t>(lay.hand_links[static_cast<std::size_t>(i)])].ang;
    u.align[i] = sim::rotate(ang, lay.inside_axis[static_cast<std::size_t>(i)]).dot(dir);
  }
  return u;
}

/// True when the two bodies touch in the recorded contact set.
inline bool bodies_in_contact(const sim::SimState& s, int body, int other) {
  for (const auto& c : s.contacts)
    if (c.body == body && c.other == other) return true;
  return false;
}

}  // namespace pmp::gym
