#pragma once

#include <string>
#include <vector>

#include "pmp/common.hpp"
#include "pmp/sim/world.hpp"

namespace pmp::tasks {

struct TerminationRule {
  bool fall = true;             // any non-foot link touching the ground
  bool ball_drop = false;       // a carried object sinking below drop_height
  int ball_object = 0;
  double drop_height = 0.1;     // m
  bool ground_deadline = false; // any ground contact past the allowed time
  double deadline_s = 0.7;

  void validate() const {
    if (deadline_s <= 0.0) throw ConfigError("termination deadline must be positive");
    if (drop_height < 0.0) throw ConfigError("drop height must be non-negative");
  }
};

enum class TerminationReason { None, Fall, BallDrop, Deadline };

inline std::string termination_reason_name(TerminationReason r) {
  switch (r) {
    case TerminationReason::None: return "none";
    case TerminationReason::Fall: return "fall";
    case TerminationReason::BallDrop: return "ball_drop";
    case TerminationReason::Deadline: return "deadline";
  }
  return "none";
}

/// Episode failure detector. Latches: once a reason fires it is returned for
/// the rest of the episode regardless of later states.
class TerminationTracker {
 public:
  explicit TerminationTracker(const sim::World& w) {
    for (const auto& name : w.character().foot_links)
      feet_.push_back(w.link_index(name));
    link_count_ = w.link_count();
  }

  void reset() { latched_ = TerminationReason::None; }

  TerminationReason check(const sim::SimState& s, const TerminationRule& rule,
                          double elapsed) {
    if (latched_ != TerminationReason::None) return latched_;
    if (rule.fall) {
      for (const auto& c : s.contacts) {
        if (c.other != -1 || c.body >= link_count_) continue;
        bool foot = false;
        for (int f : feet_) foot |= (f == c.body);
        if (!foot) {
          latched_ = TerminationReason::Fall;
          return latched_;
        }
      }
    }
    if (rule.ball_drop &&
        s.obj_pos[static_cast<std::size_t>(rule.ball_object)].y() < rule.drop_height) {
      latched_ = TerminationReason::BallDrop;
      return latched_;
    }
    if (rule.ground_deadline && elapsed > rule.deadline_s) {
      for (const auto& c : s.contacts) {
        if (c.other == -1 && c.body < link_count_) {
          latched_ = TerminationReason::Deadline;
          return latched_;
        }
      }
    }
    return latched_;
  }

  TerminationReason latched() const { return latched_; }

 private:
  std::vector<int> feet_;
  int link_count_ = 0;
  TerminationReason latched_ = TerminationReason::None;
};

}  // namespace pmp::tasks
