#pragma once

#include <fstream>
#include <set>

#include <json.hpp>

#include "pmp/sim/types.hpp"

namespace pmp::sim {

using nlohmann::json;

inline void require_keys(const json& j, const std::set<std::string>& allowed,
                         const std::set<std::string>& required, const std::string& ctx) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw ConfigError(ctx + ": unknown key '" + item.key() + "'");
  for (const std::string& k : required)
    if (!j.contains(k)) throw ConfigError(ctx + ": missing key '" + k + "'");
}

inline Vector2d parse_vec2(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(ctx + ": expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline ShapeDef parse_shape(const json& j, const std::string& ctx) {
  require_keys(j, {"type", "radius", "hx", "hy", "offset"}, {"type"}, ctx);
  ShapeDef s;
  const std::string type = j.at("type").get<std::string>();
  if (type == "disk") {
    if (!j.contains("radius")) throw ConfigError(ctx + ": disk needs 'radius'");
    s = ShapeDef::disk(j.at("radius").get<double>());
    if (s.radius <= 0) throw ConfigError(ctx + ": radius must be positive");
  } else if (type == "box") {
    if (!j.contains("hx") || !j.contains("hy")) throw ConfigError(ctx + ": box needs 'hx','hy'");
    s = ShapeDef::box(j.at("hx").get<double>(), j.at("hy").get<double>());
    if (s.hx <= 0 || s.hy <= 0) throw ConfigError(ctx + ": half extents must be positive");
  } else {
    throw ConfigError(ctx + ": unknown shape type '" + type + "'");
  }
  if (j.contains("offset")) s.offset = parse_vec2(j.at("offset"), ctx + ".offset");
  return s;
}

inline BodyDef parse_character(const json& j) {
  try {
    require_keys(j, {"links", "joints", "fixed_base", "markers"}, {"links"}, "character");
    BodyDef def;
    for (const json& lj : j.at("links")) {
      require_keys(lj, {"name", "mass", "inertia", "shapes"}, {"name", "mass", "inertia"},
                   "link");
      LinkDef l;
      l.name = lj.at("name").get<std::string>();
      l.mass = lj.at("mass").get<double>();
      l.inertia = lj.at("inertia").get<double>();
      if (lj.contains("shapes"))
        for (const json& sj : lj.at("shapes"))
          l.shapes.push_back(parse_shape(sj, "link " + l.name + " shape"));
      def.links.push_back(std::move(l));
    }
    if (j.contains("joints")) {
      for (const json& jj : j.at("joints")) {
        require_keys(jj,
                     {"name", "parent", "child", "axis", "anchor_parent", "anchor_child",
                      "limits", "torque_limit", "kp", "kd"},
                     {"name", "parent", "child", "anchor_parent", "anchor_child", "limits",
                      "torque_limit", "kp", "kd"},
                     "joint");
        JointDef jd;
        jd.name = jj.at("name").get<std::string>();
        jd.parent = jj.at("parent").get<std::string>();
        jd.child = jj.at("child").get<std::string>();
        if (jj.contains("axis") && jj.at("axis").get<std::string>() != "z")
          throw ConfigError("joint " + jd.name + ": only the planar 'z' axis is supported");
        jd.anchor_parent = parse_vec2(jj.at("anchor_parent"), "joint " + jd.name);
        jd.anchor_child = parse_vec2(jj.at("anchor_child"), "joint " + jd.name);
        const json& lim = jj.at("limits");
        if (!lim.is_array() || lim.size() != 2)
          throw ConfigError("joint " + jd.name + ": limits must be [lo, hi]");
        jd.lo = lim[0].get<double>();
        jd.hi = lim[1].get<double>();
        jd.torque_limit = jj.at("torque_limit").get<double>();
        jd.kp = jj.at("kp").get<double>();
        jd.kd = jj.at("kd").get<double>();
        def.joints.push_back(std::move(jd));
      }
    }
    if (j.contains("fixed_base")) def.fixed_base = j.at("fixed_base").get<bool>();
    if (j.contains("markers")) {
      const json& m = j.at("markers");
      require_keys(m, {"fingertips", "palm", "feet"}, {}, "markers");
      if (m.contains("fingertips"))
        for (const json& n : m.at("fingertips"))
          def.fingertip_links.push_back(n.get<std::string>());
      if (m.contains("palm")) def.palm_link = m.at("palm").get<std::string>();
      if (m.contains("feet"))
        for (const json& n : m.at("feet")) def.foot_links.push_back(n.get<std::string>());
    }
    return def;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("character file: ") + e.what());
  }
}

inline BodyDef load_character(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open character file: " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ConfigError("character file " + path + ": " + e.what());
  }
  return parse_character(j);
}

}  // namespace pmp::sim
