#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hullas/csv.hpp"
#include "hullas/error.hpp"
#include "hullas/extrapolate.hpp"
#include "hullas/ffd.hpp"
#include "hullas/geometry.hpp"
#include "hullas/pipeline.hpp"
#include "hullas/subspace.hpp"
#include "hullas/surface.hpp"

namespace fs = std::filesystem;
using namespace hullas;

namespace {

pipeline::DesignSpace space_or_default(const std::string& path) {
  return path.empty() ? pipeline::table1_space() : pipeline::load_design_space(path);
}

std::string join(const Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + csv::format_double(v(i));
  return s;
}

// Training subset used by the study when split < 1, else every row.
subspace::SampleSet training_rows(const subspace::SampleSet& normalized, double split, std::uint64_t seed) {
  if (split >= 1.0) return normalized;
  return normalized.rows(subspace::split_indices(normalized.size(), split, seed).first);
}

subspace::SampleSet require_outputs(const fs::path& path) {
  auto data = subspace::read_dataset(path);
  if (data.outputs.array().isNaN().any()) {
    throw ValidationError("dataset '" + path.string() + "' has rows without an output value");
  }
  return data;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hull shape study toolkit: deformation, hydrostatics, active subspaces, response surfaces"};
  app.require_subcommand(1);

  // deform
  std::string d_in, d_out, d_profile;
  std::vector<double> d_params;
  bool d_ascii = false;
  auto* deform = app.add_subcommand("deform", "Deform an STL hull with the lattice profile");
  deform->add_option("-i,--input", d_in, "Input STL")->required()->check(CLI::ExistingFile);
  deform->add_option("-o,--output", d_out, "Output STL")->required();
  deform->add_option("-p,--profile", d_profile, "Lattice profile JSON (default: profile fitted to the mesh box)");
  deform->add_option("--params", d_params, "Parameter values in profile order (default: all zero)")->delimiter(',');
  deform->add_flag("--ascii", d_ascii, "Write ASCII STL");

  // sample
  std::string s_space, s_out;
  std::size_t s_count = 130;
  std::uint64_t s_seed = 0;
  auto* sample = app.add_subcommand("sample", "Draw uniform designs over the design space");
  sample->add_option("--space", s_space, "Design space JSON (default: eight hull parameters)");
  sample->add_option("-n,--count", s_count, "Number of designs");
  sample->add_option("--seed", s_seed, "Random seed");
  sample->add_option("-o,--output", s_out, "Designs CSV")->required();

  // evaluate
  std::string e_designs, e_oracle, e_space, e_out, e_failures;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate the oracle on a designs CSV");
  evaluate->add_option("-d,--designs", e_designs, "Designs CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--oracle", e_oracle, "Oracle JSON (default: hydro surrogate)");
  evaluate->add_option("--space", e_space, "Design space JSON (default: eight hull parameters)");
  evaluate->add_option("-o,--output", e_out, "Dataset CSV")->required();
  evaluate->add_option("--failures", e_failures, "Write the failed-row manifest here");

  // fit-resistance
  std::string f_in, f_json;
  int f_window = 5;
  auto* fitres = app.add_subcommand("fit-resistance", "Steady value of a resistance time series");
  fitres->add_option("-i,--input", f_in, "Time-series CSV (t, value)")->required()->check(CLI::ExistingFile);
  fitres->add_option("--window", f_window, "Smoothing window (odd)");
  fitres->add_option("--json", f_json, "Write envelope parameters as JSON");

  // subspace
  std::string a_data, a_out, a_boot_out, a_oracle;
  int a_k = 14, a_boot = 0;
  double a_split = 1.0;
  std::uint64_t a_seed = 0;
  std::string a_interval = "minmax";
  auto* sub = app.add_subcommand("subspace", "Active subspace of a dataset");
  sub->add_option("-d,--dataset", a_data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  sub->add_option("-k,--neighbors", a_k, "Neighbours for local linear gradients");
  sub->add_option("--split", a_split, "Training fraction (1 = all rows)")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--seed", a_seed, "Seed for the split and the bootstrap");
  sub->add_option("--exact-oracle", a_oracle, "Use exact gradients of this analytic oracle");
  sub->add_option("-o,--output", a_out, "Subspace JSON");
  sub->add_option("--bootstrap", a_boot, "Bootstrap replicates (0 = none)");
  sub->add_option("--bootstrap-output", a_boot_out, "Bootstrap CSV");
  sub->add_option("--interval", a_interval, "minmax or percentile")->check(CLI::IsMember({"minmax", "percentile"}));

  // surface
  std::string r_data, r_sub, r_out;
  int r_dim = 1, r_degree = 2;
  auto* surf = app.add_subcommand("surface", "Fit a polynomial response surface on the active variables");
  surf->add_option("-d,--dataset", r_data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  surf->add_option("-s,--subspace", r_sub, "Subspace JSON")->required()->check(CLI::ExistingFile);
  surf->add_option("--dim", r_dim, "Active dimension");
  surf->add_option("--degree", r_degree, "Polynomial degree");
  surf->add_option("-o,--output", r_out, "Surface JSON");

  // heatmap
  std::string h_data, h_out, h_long;
  surface::ErrorMatrixOptions h_opts;
  auto* heat = app.add_subcommand("heatmap", "Test-error matrix over active dimension and degree");
  heat->add_option("-d,--dataset", h_data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  heat->add_option("--dims", h_opts.dims, "Active dimensions")->delimiter(',');
  heat->add_option("--degrees", h_opts.degrees, "Polynomial degrees")->delimiter(',');
  heat->add_option("--repetitions", h_opts.repetitions, "Random splits to average");
  heat->add_option("--split", h_opts.split, "Training fraction")->check(CLI::Range(0.0, 1.0));
  heat->add_option("--seed", h_opts.seed, "Seed");
  heat->add_option("-k,--neighbors", h_opts.k_neighbors, "Neighbours for local linear gradients");
  heat->add_option("-o,--output", h_out, "Wide CSV")->required();
  heat->add_option("--long-output", h_long, "Long-form CSV (default: <output>.long.csv)");

  // study
  std::string t_config, t_oracle, t_space, t_out;
  std::optional<std::uint64_t> t_seed;
  std::optional<std::size_t> t_samples;
  bool t_timing = false;
  auto* study = app.add_subcommand("study", "Full pipeline: sample, evaluate, subspace, bootstrap, error matrix");
  study->add_option("-c,--config", t_config, "Study configuration JSON")->check(CLI::ExistingFile);
  study->add_option("--oracle", t_oracle, "Oracle JSON (default: hydro surrogate)");
  study->add_option("--space", t_space, "Design space JSON (default: eight hull parameters)");
  study->add_option("-o,--out", t_out, "Output directory")->required();
  study->add_option("--seed", t_seed, "Override the configured seed");
  study->add_option("-n,--samples", t_samples, "Override the configured sample count");
  study->add_flag("--timing", t_timing, "Report oracle latency (outputs then vary between runs)");

  // ssp
  std::string p_data, p_sub, p_out;
  int p_dim = 1;
  auto* ssp = app.add_subcommand("ssp", "Sufficient-summary export: active variables and outputs");
  ssp->add_option("-d,--dataset", p_data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  ssp->add_option("-s,--subspace", p_sub, "Subspace JSON")->required()->check(CLI::ExistingFile);
  ssp->add_option("--dim", p_dim, "Number of active variables")->check(CLI::Range(1, 1000));
  ssp->add_option("-o,--output", p_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*deform) {
      const auto mesh = geometry::read_stl(d_in);
      const auto profile = d_profile.empty() ? pipeline::default_hull_profile_for(mesh) : ffd::load_profile(d_profile);
      ffd::GeoParams params;
      params.values = d_params.empty() ? std::vector<double>(profile.parameters.size(), 0.0) : d_params;
      const auto lattice = ffd::hull_lattice(params, profile);
      geometry::write_stl(ffd::deform_mesh(lattice, mesh), d_out, !d_ascii);
    } else if (*sample) {
      const auto space = space_or_default(s_space);
      subspace::write_dataset(pipeline::sample_designs(space, s_count, s_seed), s_out, space.names);
    } else if (*evaluate) {
      const auto space = space_or_default(e_space);
      const auto spec = e_oracle.empty() ? pipeline::OracleSpec{.kind = pipeline::OracleKind::HydroSurrogate}
                                         : pipeline::load_oracle(e_oracle);
      auto designs = subspace::read_dataset(e_designs);
      designs.box = space.bounds;
      const auto eval = pipeline::evaluate_oracle(spec, designs, space);
      subspace::write_dataset(eval.samples, e_out, space.names);
      for (const auto& f : eval.failures) std::cerr << "row " << f.row << " failed: " << f.message << '\n';
      if (!e_failures.empty()) {
        csv::Table t{{"row"}, {}};
        for (const auto& f : eval.failures) t.rows.push_back({double(f.row)});
        csv::write(e_failures, t);
      }
      std::cout << eval.samples.size() << " of " << designs.size() << " designs evaluated\n";
    } else if (*fitres) {
      const auto result = extrapolate::steady_state(extrapolate::read_series_csv(f_in), f_window);
      std::printf("%.17g\n", result.value);
      if (!f_json.empty()) {
        std::ofstream out(f_json);
        if (!out) throw ValidationError("cannot write '" + f_json + "'");
        out << extrapolate::steady_result_json(result);
      }
    } else if (*sub) {
      const auto normalized = subspace::normalize(require_outputs(a_data));
      const auto train = training_rows(normalized, a_split, a_seed);
      const auto grads = a_oracle.empty()
                             ? subspace::local_linear_gradients(train, a_k)
                             : subspace::gradients_from_matrix(pipeline::oracle_gradients(pipeline::load_oracle(a_oracle), train.inputs));
      for (const auto& w : grads.warnings) std::cerr << "warning: " << w << '\n';
      const auto full = subspace::eigendecompose(subspace::covariance(grads));
      const int dim = subspace::suggest_dim(full.eigenvalues);
      const auto as = subspace::partition(full, dim);
      std::cout << "eigenvalues: " << join(full.eigenvalues) << "\nsuggested dimension: " << dim << '\n';
      if (!a_out.empty()) subspace::write_subspace(as, a_out);
      if (a_boot > 0) {
        const auto kind = a_interval == "percentile" ? subspace::IntervalKind::Percentile : subspace::IntervalKind::MinMax;
        const auto b = subspace::bootstrap_eigenvalues(grads, a_boot, a_seed, kind);
        if (!a_boot_out.empty()) {
          csv::Table t{{"index", "eigenvalue", "lower", "upper"}, {}};
          for (Eigen::Index i = 0; i < b.estimate.size(); ++i) t.rows.push_back({double(i + 1), b.estimate(i), b.lower(i), b.upper(i)});
          csv::write(a_boot_out, t);
        } else {
          std::cout << "bootstrap lower: " << join(b.lower) << "\nbootstrap upper: " << join(b.upper) << '\n';
        }
      }
    } else if (*surf) {
      const auto normalized = subspace::normalize(require_outputs(r_data));
      const auto as = subspace::partition(subspace::read_subspace(r_sub), r_dim);
      const Matrix active = subspace::project_rows(as, normalized.inputs);
      const auto poly = surface::fit(active, normalized.outputs, r_degree);
      for (const auto& w : poly.warnings) std::cerr << "warning: " << w << '\n';
      std::printf("training relative RMSE: %.17g\n", surface::relative_rmse(poly, active, normalized.outputs));
      if (!r_out.empty()) surface::write_surface(poly, r_out);
    } else if (*heat) {
      const auto em = surface::error_matrix(require_outputs(h_data), h_opts);
      surface::write_error_matrix(em, h_out, h_long.empty() ? fs::path(h_out + ".long.csv") : fs::path(h_long));
    } else if (*study) {
      auto config = t_config.empty() ? pipeline::StudyConfig{} : pipeline::load_study_config(t_config);
      if (t_seed) config.seed = *t_seed;
      if (t_samples) config.sample_count = *t_samples;
      if (t_timing) config.report_timing = true;
      const auto space = space_or_default(t_space);
      const auto spec = t_oracle.empty() ? pipeline::OracleSpec{.kind = pipeline::OracleKind::HydroSurrogate}
                                         : pipeline::load_oracle(t_oracle);
      const auto report = pipeline::run_study(config, space, spec, t_out);
      std::cout << "evaluated " << report.evaluated << " designs, " << report.failures.size() << " failed\n"
                << "eigenvalues: " << join(report.bootstrap.estimate) << "\nsuggested dimension: "
                << report.suggested_dim << '\n';
      if (config.report_timing) std::cout << "seconds per evaluation: " << report.seconds_per_evaluation << '\n';
    } else if (*ssp) {
      const auto data = require_outputs(p_data);
      const auto normalized = subspace::normalize(data);
      const auto as = subspace::partition(subspace::read_subspace(p_sub), p_dim);
      surface::write_sufficient_summary(subspace::project_rows(as, normalized.inputs), data.outputs, p_out);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
