#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hullas/ffd.hpp"
#include "hullas/geometry.hpp"
#include "hullas/subspace.hpp"
#include "hullas/surface.hpp"

namespace hullas::pipeline {

struct DesignSpace {
  std::vector<std::string> names;
  std::vector<subspace::Bounds> bounds;
  std::vector<std::size_t> geometric_mask;  // indices fed to the lattice, in binding order

  std::size_t dimension() const { return bounds.size(); }
  void validate() const;
};

/// Six lattice displacements, hull weight (kg) and speed (m/s).
DesignSpace table1_space();

DesignSpace load_design_space(const std::filesystem::path& path);
void save_design_space(const DesignSpace& space, const std::filesystem::path& path);

/// n i.i.d. uniform rows inside the bounds; outputs are NaN.
subspace::SampleSet sample_designs(const DesignSpace& space, std::size_t n, std::uint64_t seed);

enum class OracleKind { AnalyticRidge, AnalyticQuadratic, HydroSurrogate, ExternalTable };

/**
 * Stand-in for the flow solver.
 *
 * Analytic kinds act on normalized coordinates x in [-1, 1]^m:
 *   ridge:      f = sum_k ridge_coefficients[k] * (a^T x)^k
 *   quadratic:  f = x^T H x + g^T x + c0
 * The hydro surrogate deforms the hull with the geometric parameters, floats
 * it at the given weight and returns friction plus a Froude-scaled wave term.
 * The external table looks rows up in a dataset CSV.
 */
struct OracleSpec {
  OracleKind kind = OracleKind::AnalyticRidge;

  Vector direction;                          // ridge a
  std::vector<double> ridge_coefficients{0.0, 0.0, 1.0};

  Matrix hessian;                            // quadratic H (symmetric)
  Vector linear;                             // quadratic g
  double constant = 0.0;

  std::optional<std::filesystem::path> mesh_path;     // hydro: default box hull when empty
  std::optional<std::filesystem::path> profile_path;  // hydro: default profile when empty
  geometry::FlowConstants flow;
  double wave_coefficient = 0.05;                     // k_w

  std::filesystem::path table_path;                   // external table

  void validate(std::size_t dimension) const;
};

OracleSpec load_oracle(const std::filesystem::path& path);
OracleSpec oracle_from_json_text(const std::string& text);

/// Hull used when the hydro oracle has no mesh: a 5.72 x 0.77 x 0.40 m box,
/// keel at Z = 0, subdivided so the lattice has vertices to move.
geometry::TriMesh default_hull_mesh();
ffd::LatticeProfile default_hull_profile_for(const geometry::TriMesh& hull);

struct HydroBreakdown {
  double resistance = 0.0;
  double friction = 0.0;
  double wave = 0.0;
  geometry::HydroState hydro;
};

/// R = 0.5 rho C_F(Re) S_wet V^2 + k_w rho g V_sub Fr^4 for one design row (physical units).
HydroBreakdown hydro_surrogate(const geometry::TriMesh& hull, const ffd::LatticeProfile& profile,
                               const DesignSpace& space, const Vector& design,
                               const geometry::FlowConstants& flow, double wave_coefficient);

struct RowFailure {
  std::size_t row = 0;
  std::string message;
};

struct Evaluation {
  subspace::SampleSet samples;       // successful rows only, original order
  std::vector<std::size_t> kept;     // source row of each kept sample
  std::vector<RowFailure> failures;
  double seconds_per_row = 0.0;
};

Evaluation evaluate_oracle(const OracleSpec& spec, const subspace::SampleSet& designs,
                           const DesignSpace& space);

/// Exact gradients (normalized coordinates) for the analytic kinds.
Matrix oracle_gradients(const OracleSpec& spec, const Matrix& normalized_inputs);

struct StudyConfig {
  std::uint64_t seed = 0;
  std::size_t sample_count = 130;
  double split = 0.8;
  int k_neighbors = 14;
  int bootstrap_replicates = 1000;
  subspace::IntervalKind interval = subspace::IntervalKind::MinMax;
  std::vector<int> dims{1, 2, 3};
  std::vector<int> degrees{1, 2, 3, 4};
  int repetitions = 20;
  bool exact_gradients = false;
  bool report_timing = false;

  void validate() const;
};

StudyConfig load_study_config(const std::filesystem::path& path);

struct StudyReport {
  std::size_t evaluated = 0;
  std::vector<RowFailure> failures;
  subspace::ActiveSubspace subspace;      // partitioned at the suggested dimension
  int suggested_dim = 0;
  subspace::BootstrapSummary bootstrap;
  surface::ErrorMatrix errors;
  std::vector<std::filesystem::path> artifacts;
  double seconds_per_evaluation = 0.0;
};

/**
 * Sample -> evaluate -> split -> gradients -> covariance -> eigenpairs ->
 * bootstrap -> summary plots -> error matrix. Every artifact is written to
 * `out_dir`; with timing off, all files are byte-identical for a fixed seed.
 */
StudyReport run_study(const StudyConfig& config, const DesignSpace& space, const OracleSpec& spec,
                      const std::filesystem::path& out_dir);

}  // namespace hullas::pipeline
