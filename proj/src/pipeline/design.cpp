#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <string>

#include <json.hpp>

#include "hullas/error.hpp"
#include "hullas/pipeline.hpp"

namespace hullas::pipeline {

using nlohmann::json;

void DesignSpace::validate() const {
  if (bounds.empty()) throw ValidationError("design space has no parameters");
  if (names.size() != bounds.size()) throw ValidationError("design space needs one name per parameter");
  for (std::size_t j = 0; j < bounds.size(); ++j) {
    if (!(bounds[j].lower < bounds[j].upper)) {
      throw ValidationError("design parameter '" + names[j] + "' has lower >= upper");
    }
  }
  std::set<std::size_t> seen;
  for (auto i : geometric_mask) {
    if (i >= bounds.size()) throw ValidationError("geometric mask index " + std::to_string(i) + " out of range");
    if (!seen.insert(i).second) throw ValidationError("geometric mask repeats index " + std::to_string(i));
  }
}

DesignSpace table1_space() {
  DesignSpace s;
  s.names = {"ffd_p1_y", "ffd_p2_y", "ffd_p3_y", "ffd_p4_y", "ffd_p3_z", "ffd_p4_z", "weight_kg", "velocity_ms"};
  s.bounds = {{-0.2, 0.3}, {-0.2, 0.3}, {-0.2, 0.3}, {-0.2, 0.3},
              {-0.2, 0.5}, {-0.2, 0.5}, {500.0, 800.0}, {1.87, 2.70}};
  s.geometric_mask = {0, 1, 2, 3, 4, 5};
  return s;
}

DesignSpace load_design_space(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open design space '" + path.string() + "'");
  DesignSpace s;
  try {
    const json j = json::parse(in);
    s.names = j.at("names").get<std::vector<std::string>>();
    const auto lo = j.at("lower").get<std::vector<double>>();
    const auto hi = j.at("upper").get<std::vector<double>>();
    if (lo.size() != hi.size()) throw ValidationError("design space lower/upper lengths differ");
    for (std::size_t i = 0; i < lo.size(); ++i) s.bounds.push_back({lo[i], hi[i]});
    s.geometric_mask = j.value("geometric", std::vector<std::size_t>{});
  } catch (const json::exception& e) {
    throw ValidationError("invalid design space '" + path.string() + "': " + e.what());
  }
  s.validate();
  return s;
}

void save_design_space(const DesignSpace& space, const std::filesystem::path& path) {
  json j;
  j["names"] = space.names;
  std::vector<double> lo, hi;
  for (const auto& b : space.bounds) {
    lo.push_back(b.lower);
    hi.push_back(b.upper);
  }
  j["lower"] = lo;
  j["upper"] = hi;
  j["geometric"] = space.geometric_mask;
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write design space '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

subspace::SampleSet sample_designs(const DesignSpace& space, std::size_t n, std::uint64_t seed) {
  space.validate();
  if (n < 1) throw ValidationError("sample count must be at least 1");
  subspace::SampleSet s;
  s.box = space.bounds;
  const auto m = static_cast<Eigen::Index>(space.dimension());
  s.inputs.resize(static_cast<Eigen::Index>(n), m);
  s.outputs = Vector::Constant(static_cast<Eigen::Index>(n), std::numeric_limits<double>::quiet_NaN());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Eigen::Index i = 0; i < s.inputs.rows(); ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& b = space.bounds[static_cast<std::size_t>(j)];
      // lower + u (upper - lower) with u in [0, 1) stays inside the box.
      s.inputs(i, j) = std::min(b.upper, b.lower + unit(rng) * (b.upper - b.lower));
    }
  }
  return s;
}

}  // namespace hullas::pipeline
