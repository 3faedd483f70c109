#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>

#include <json.hpp>

#include "hullas/csv.hpp"
#include "hullas/error.hpp"
#include "hullas/pipeline.hpp"

namespace hullas::pipeline {

using nlohmann::json;

void OracleSpec::validate(std::size_t m) const {
  switch (kind) {
    case OracleKind::AnalyticRidge:
      if (static_cast<std::size_t>(direction.size()) != m) {
        throw ValidationError("ridge direction has " + std::to_string(direction.size()) + " entries, expected " +
                              std::to_string(m));
      }
      if (!(direction.norm() > 0.0)) throw ValidationError("ridge direction must be non-zero");
      if (ridge_coefficients.empty()) throw ValidationError("ridge profile needs at least one coefficient");
      break;
    case OracleKind::AnalyticQuadratic:
      if (hessian.rows() != static_cast<Eigen::Index>(m) || hessian.cols() != static_cast<Eigen::Index>(m)) {
        throw ValidationError("quadratic oracle Hessian must be m x m");
      }
      if (linear.size() != 0 && linear.size() != static_cast<Eigen::Index>(m)) {
        throw ValidationError("quadratic oracle linear term must have m entries");
      }
      break;
    case OracleKind::HydroSurrogate:
      flow.validate();
      if (!(wave_coefficient >= 0.0)) throw ValidationError("wave coefficient must be non-negative");
      break;
    case OracleKind::ExternalTable:
      if (table_path.empty()) throw ValidationError("external-table oracle needs a table path");
      break;
  }
}

OracleSpec oracle_from_json_text(const std::string& text) {
  OracleSpec spec;
  try {
    const json j = json::parse(text);
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "analytic-ridge") {
      spec.kind = OracleKind::AnalyticRidge;
      const auto a = j.at("direction").get<std::vector<double>>();
      spec.direction = Eigen::Map<const Vector>(a.data(), static_cast<Eigen::Index>(a.size()));
      if (j.contains("coefficients")) spec.ridge_coefficients = j.at("coefficients").get<std::vector<double>>();
    } else if (kind == "analytic-quadratic") {
      spec.kind = OracleKind::AnalyticQuadratic;
      const auto h = j.at("hessian").get<std::vector<std::vector<double>>>();
      const auto m = static_cast<Eigen::Index>(h.size());
      spec.hessian.resize(m, m);
      for (Eigen::Index r = 0; r < m; ++r) {
        if (static_cast<Eigen::Index>(h[static_cast<std::size_t>(r)].size()) != m) {
          throw ValidationError("quadratic oracle Hessian must be square");
        }
        for (Eigen::Index c = 0; c < m; ++c) spec.hessian(r, c) = h[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      }
      spec.hessian = 0.5 * (spec.hessian + spec.hessian.transpose()).eval();
      if (j.contains("linear")) {
        const auto g = j.at("linear").get<std::vector<double>>();
        spec.linear = Eigen::Map<const Vector>(g.data(), static_cast<Eigen::Index>(g.size()));
      }
      spec.constant = j.value("constant", 0.0);
    } else if (kind == "hydro-surrogate") {
      spec.kind = OracleKind::HydroSurrogate;
      if (j.contains("mesh")) spec.mesh_path = j.at("mesh").get<std::string>();
      if (j.contains("profile")) spec.profile_path = j.at("profile").get<std::string>();
      if (j.contains("flow")) {
        const auto& f = j.at("flow");
        spec.flow.rho = f.value("rho", spec.flow.rho);
        spec.flow.g = f.value("g", spec.flow.g);
        spec.flow.nu = f.value("nu", spec.flow.nu);
        spec.flow.lref = f.value("lref", spec.flow.lref);
      }
      spec.wave_coefficient = j.value("wave_coefficient", spec.wave_coefficient);
    } else if (kind == "external-table") {
      spec.kind = OracleKind::ExternalTable;
      spec.table_path = j.at("table").get<std::string>();
    } else {
      throw ValidationError("unknown oracle kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid oracle specification: ") + e.what());
  }
  return spec;
}

OracleSpec load_oracle(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open oracle specification '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  OracleSpec spec = oracle_from_json_text(ss.str());
  // Relative file references are resolved against the specification's folder.
  const auto base = path.parent_path();
  auto resolve = [&](std::filesystem::path p) { return p.is_relative() ? base / p : p; };
  if (spec.mesh_path) spec.mesh_path = resolve(*spec.mesh_path);
  if (spec.profile_path) spec.profile_path = resolve(*spec.profile_path);
  if (!spec.table_path.empty()) spec.table_path = resolve(spec.table_path);
  return spec;
}

geometry::TriMesh default_hull_mesh() {
  return geometry::make_box(Vec3(-2.86, -0.385, 0.0), Vec3(2.86, 0.385, 0.40), 8);
}

ffd::LatticeProfile default_hull_profile_for(const geometry::TriMesh& hull) {
  const auto [lo, hi] = hull.bounds();
  return ffd::default_hull_profile(lo, hi);
}

namespace {

std::pair<std::size_t, std::size_t> physical_indices(const DesignSpace& space) {
  std::vector<std::size_t> rest;
  for (std::size_t j = 0; j < space.dimension(); ++j) {
    if (std::find(space.geometric_mask.begin(), space.geometric_mask.end(), j) == space.geometric_mask.end()) {
      rest.push_back(j);
    }
  }
  if (rest.size() != 2) {
    throw ValidationError("hydro surrogate expects exactly two non-geometric parameters (weight, speed)");
  }
  return {rest[0], rest[1]};
}

double ridge_value(const OracleSpec& spec, const Vector& x) {
  const double t = spec.direction.dot(x);
  double f = 0.0;
  for (std::size_t k = spec.ridge_coefficients.size(); k-- > 0;) f = f * t + spec.ridge_coefficients[k];
  return f;
}

double ridge_slope(const OracleSpec& spec, double t) {
  double d = 0.0;
  for (std::size_t k = spec.ridge_coefficients.size(); k-- > 1;) d = d * t + double(k) * spec.ridge_coefficients[k];
  return d;
}

double quadratic_value(const OracleSpec& spec, const Vector& x) {
  double f = x.dot(spec.hessian * x) + spec.constant;
  if (spec.linear.size() != 0) f += spec.linear.dot(x);
  return f;
}

}  // namespace

HydroBreakdown hydro_surrogate(const geometry::TriMesh& hull, const ffd::LatticeProfile& profile,
                               const DesignSpace& space, const Vector& design,
                               const geometry::FlowConstants& flow, double wave_coefficient) {
  const auto [weight_idx, speed_idx] = physical_indices(space);
  ffd::GeoParams params;
  for (auto j : space.geometric_mask) params.values.push_back(design(static_cast<Eigen::Index>(j)));
  const auto lattice = ffd::hull_lattice(params, profile);
  const auto deformed = ffd::deform_mesh(lattice, hull);

  HydroBreakdown out;
  out.hydro = geometry::hydrostatic_equilibrium(deformed, design(static_cast<Eigen::Index>(weight_idx)), flow);
  const double speed = design(static_cast<Eigen::Index>(speed_idx));
  out.friction = geometry::viscous_drag(speed, out.hydro.wetted_area, flow);
  const double fr = geometry::froude(speed, flow);
  out.wave = wave_coefficient * flow.rho * flow.g * out.hydro.submerged_volume * std::pow(fr, 4);
  out.resistance = out.friction + out.wave;
  return out;
}

Matrix oracle_gradients(const OracleSpec& spec, const Matrix& x) {
  Matrix g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Vector xi = x.row(i).transpose();
    switch (spec.kind) {
      case OracleKind::AnalyticRidge:
        g.row(i) = (ridge_slope(spec, spec.direction.dot(xi)) * spec.direction).transpose();
        break;
      case OracleKind::AnalyticQuadratic: {
        Vector grad = 2.0 * spec.hessian * xi;
        if (spec.linear.size() != 0) grad += spec.linear;
        g.row(i) = grad.transpose();
        break;
      }
      default:
        throw ValidationError("exact gradients are only available for analytic oracles");
    }
  }
  return g;
}

Evaluation evaluate_oracle(const OracleSpec& spec, const subspace::SampleSet& designs, const DesignSpace& space) {
  space.validate();
  if (designs.dimension() != space.dimension()) {
    throw ValidationError("designs have " + std::to_string(designs.dimension()) + " columns, design space has " +
                          std::to_string(space.dimension()));
  }
  spec.validate(space.dimension());

  const auto n = static_cast<Eigen::Index>(designs.size());
  Vector values = Vector::Constant(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<RowFailure> failures;
  const auto start = std::chrono::steady_clock::now();

  switch (spec.kind) {
    case OracleKind::AnalyticRidge:
    case OracleKind::AnalyticQuadratic:
      for (Eigen::Index i = 0; i < n; ++i) {
        const Vector x = subspace::normalize_point(designs.inputs.row(i).transpose(), space.bounds);
        values(i) = spec.kind == OracleKind::AnalyticRidge ? ridge_value(spec, x) : quadratic_value(spec, x);
      }
      break;
    case OracleKind::HydroSurrogate: {
      const auto hull = spec.mesh_path ? geometry::read_stl(*spec.mesh_path) : default_hull_mesh();
      const auto profile = spec.profile_path ? ffd::load_profile(*spec.profile_path) : default_hull_profile_for(hull);
      // Rows are independent; workers claim rows and write only their own
      // slots, so the result does not depend on scheduling.
      std::vector<std::string> messages(static_cast<std::size_t>(n));
      std::atomic<Eigen::Index> next{0};
      auto worker = [&] {
        for (Eigen::Index i = next++; i < n; i = next++) {
          try {
            values(i) = hydro_surrogate(hull, profile, space, designs.inputs.row(i).transpose(), spec.flow,
                                        spec.wave_coefficient)
                            .resistance;
          } catch (const Error& e) {
            messages[static_cast<std::size_t>(i)] = e.what();
          }
        }
      };
      const auto workers = std::clamp<Eigen::Index>(std::thread::hardware_concurrency(), 1, std::max<Eigen::Index>(n, 1));
      std::vector<std::thread> pool;
      for (Eigen::Index w = 1; w < workers; ++w) pool.emplace_back(worker);
      worker();
      for (auto& t : pool) t.join();
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!messages[static_cast<std::size_t>(i)].empty()) failures.push_back({static_cast<std::size_t>(i), messages[static_cast<std::size_t>(i)]});
      }
      break;
    }
    case OracleKind::ExternalTable: {
      const csv::Table table = csv::read(spec.table_path, true);
      const std::size_t m = space.dimension();
      if (table.header.size() != m + 1 || table.header.back() != "f") {
        throw ValidationError("external table must have columns mu_1..mu_" + std::to_string(m) + ",f");
      }
      std::map<std::vector<double>, double> lookup;
      for (const auto& row : table.rows) lookup[std::vector<double>(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(m))] = row[m];
      std::string missing;
      std::size_t missing_count = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<double> key(m);
        for (std::size_t j = 0; j < m; ++j) key[j] = designs.inputs(i, static_cast<Eigen::Index>(j));
        auto it = lookup.find(key);
        if (it == lookup.end()) {
          if (missing_count++ < 20) missing += (missing.empty() ? "" : ", ") + std::to_string(i);
        } else {
          values(i) = it->second;
        }
      }
      if (missing_count > 0) {
        throw ValidationError("external table lacks " + std::to_string(missing_count) + " design(s); rows: " + missing +
                              (missing_count > 20 ? ", ..." : ""));
      }
      break;
    }
  }

  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(values(i)) &&
        std::none_of(failures.begin(), failures.end(), [&](const RowFailure& f) { return f.row == std::size_t(i); })) {
      failures.push_back({static_cast<std::size_t>(i), "oracle returned a non-finite value"});
    }
  }

  Evaluation out;
  out.seconds_per_row = n > 0 ? elapsed / static_cast<double>(n) : 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isfinite(values(i))) out.kept.push_back(static_cast<std::size_t>(i));
  }
  out.samples = designs.rows(out.kept);
  for (std::size_t r = 0; r < out.kept.size(); ++r) {
    out.samples.outputs(static_cast<Eigen::Index>(r)) = values(static_cast<Eigen::Index>(out.kept[r]));
  }
  std::sort(failures.begin(), failures.end(), [](const auto& a, const auto& b) { return a.row < b.row; });
  out.failures = std::move(failures);
  return out;
}

}  // namespace hullas::pipeline
