#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hullas/error.hpp"
#include "hullas/ffd.hpp"

namespace hullas::ffd {

namespace {

using nlohmann::json;

int axis_from_name(const json& value) {
  if (value.is_number_integer()) return value.get<int>();
  const auto s = value.get<std::string>();
  if (s == "x") return 0;
  if (s == "y") return 1;
  if (s == "z") return 2;
  throw ValidationError("unknown axis '" + s + "' (expected x, y or z)");
}

Vec3 vec3_from(const json& value, const char* field) {
  if (!value.is_array() || value.size() != 3) {
    throw ValidationError(std::string("profile field '") + field + "' must be a 3-element array");
  }
  return {value[0].get<double>(), value[1].get<double>(), value[2].get<double>()};
}

json vec3_to(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

constexpr const char* kAxisNames[] = {"x", "y", "z"};

}  // namespace

void LatticeProfile::validate() const {
  if (!(lengths.array() > 0.0).all()) throw ValidationError("profile lengths must be positive");
  for (int d : degrees) {
    if (d < 1 || d > 20) throw ValidationError("profile degrees must lie in [1, 20]");
  }
  if (mirror_axis < -1 || mirror_axis > 2) throw ValidationError("mirror_axis must be -1, 0, 1 or 2");
  for (const auto& p : parameters) {
    if (p.axis < 0 || p.axis > 2) throw ValidationError("parameter '" + p.name + "' has an invalid axis");
    for (int k = 0; k < 3; ++k) {
      if (p.point[k] < 0 || p.point[k] > degrees[k]) {
        throw ValidationError("parameter '" + p.name + "' refers to a control point outside the lattice");
      }
    }
    if (!(p.lower <= p.upper)) throw ValidationError("parameter '" + p.name + "' has lower > upper");
  }
}

FfdLattice LatticeProfile::make_lattice() const {
  validate();
  return FfdLattice(origin, axis_angle_rotation(rotation_axis, rotation_angle_deg), lengths, degrees);
}

LatticeProfile default_hull_profile(const Vec3& lo, const Vec3& hi) {
  LatticeProfile p;
  p.origin = lo;
  p.lengths = hi - lo;
  p.degrees = {2, 2, 2};
  p.mirror_axis = 1;
  // Points 1-4 live on the outer side-wall layer (m = 2): 1 and 2 on the
  // upper layer, 3 and 4 on the keel layer, amidships and forward.
  const std::array<int, 3> p1{1, 2, 2}, p2{2, 2, 2}, p3{1, 2, 0}, p4{2, 2, 0};
  p.parameters = {
      {"mu_1", p1, 1, -0.2, 0.3}, {"mu_2", p2, 1, -0.2, 0.3}, {"mu_3", p3, 1, -0.2, 0.3},
      {"mu_4", p4, 1, -0.2, 0.3}, {"mu_5", p3, 2, -0.2, 0.5}, {"mu_6", p4, 2, -0.2, 0.5},
  };
  return p;
}

FfdLattice hull_lattice(const GeoParams& params, const LatticeProfile& profile) {
  FfdLattice lattice = profile.make_lattice();
  if (params.values.size() != profile.parameters.size()) {
    throw ValidationError("expected " + std::to_string(profile.parameters.size()) +
                          " geometric parameters, got " + std::to_string(params.values.size()));
  }
  for (std::size_t i = 0; i < params.values.size(); ++i) {
    const auto& b = profile.parameters[i];
    const double v = params.values[i];
    if (!(v >= b.lower && v <= b.upper)) {
      throw ValidationError("parameter " + b.name + " = " + std::to_string(v) + " outside [" +
                            std::to_string(b.lower) + ", " + std::to_string(b.upper) + "]");
    }
    auto [l, m, n] = b.point;
    lattice.displacement(l, m, n)[b.axis] += v;
    if (profile.mirror_axis >= 0) {
      std::array<int, 3> twin{l, m, n};
      twin[profile.mirror_axis] = profile.degrees[profile.mirror_axis] - twin[profile.mirror_axis];
      if (twin != b.point) {
        const double sign = b.axis == profile.mirror_axis ? -1.0 : 1.0;
        lattice.displacement(twin[0], twin[1], twin[2])[b.axis] += sign * v;
      }
    }
  }
  return lattice;
}

LatticeProfile profile_from_json_text(const std::string& text) {
  LatticeProfile p;
  try {
    const json j = json::parse(text);
    p.origin = vec3_from(j.at("origin"), "origin");
    p.lengths = vec3_from(j.at("lengths"), "lengths");
    if (j.contains("rotation")) {
      const auto& r = j.at("rotation");
      p.rotation_axis = vec3_from(r.at("axis"), "rotation.axis");
      p.rotation_angle_deg = r.at("angle_deg").get<double>();
    }
    const auto deg = j.at("degrees");
    if (!deg.is_array() || deg.size() != 3) throw ValidationError("profile field 'degrees' must have 3 entries");
    p.degrees = {deg[0].get<int>(), deg[1].get<int>(), deg[2].get<int>()};
    p.mirror_axis = j.contains("mirror_axis") && !j.at("mirror_axis").is_null()
                        ? axis_from_name(j.at("mirror_axis"))
                        : -1;
    for (const auto& item : j.at("parameters")) {
      ParameterBinding b;
      b.name = item.at("name").get<std::string>();
      const auto pt = item.at("point");
      b.point = {pt.at(0).get<int>(), pt.at(1).get<int>(), pt.at(2).get<int>()};
      b.axis = axis_from_name(item.at("axis"));
      b.lower = item.at("lower").get<double>();
      b.upper = item.at("upper").get<double>();
      p.parameters.push_back(std::move(b));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid lattice profile: ") + e.what());
  }
  p.validate();
  return p;
}

std::string profile_to_json_text(const LatticeProfile& p) {
  json j;
  j["origin"] = vec3_to(p.origin);
  j["lengths"] = vec3_to(p.lengths);
  j["rotation"] = {{"axis", vec3_to(p.rotation_axis)}, {"angle_deg", p.rotation_angle_deg}};
  j["degrees"] = {p.degrees[0], p.degrees[1], p.degrees[2]};
  j["mirror_axis"] = p.mirror_axis >= 0 ? json(kAxisNames[p.mirror_axis]) : json(nullptr);
  j["parameters"] = json::array();
  for (const auto& b : p.parameters) {
    j["parameters"].push_back({{"name", b.name},
                               {"point", {b.point[0], b.point[1], b.point[2]}},
                               {"axis", kAxisNames[b.axis]},
                               {"lower", b.lower},
                               {"upper", b.upper}});
  }
  return j.dump(2) + "\n";
}

LatticeProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open lattice profile '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return profile_from_json_text(ss.str());
}

void save_profile(const LatticeProfile& profile, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write lattice profile '" + path.string() + "'");
  out << profile_to_json_text(profile);
}

}  // namespace hullas::ffd
