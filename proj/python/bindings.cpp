#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hullas/error.hpp"
#include "hullas/extrapolate.hpp"
#include "hullas/ffd.hpp"
#include "hullas/geometry.hpp"
#include "hullas/pipeline.hpp"
#include "hullas/subspace.hpp"
#include "hullas/surface.hpp"

namespace py = pybind11;
using namespace hullas;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using IndexMatrix = Eigen::Matrix<std::uint32_t, Eigen::Dynamic, 3, Eigen::RowMajor>;

subspace::SampleSet make_samples(const Matrix& inputs, const Vector& outputs, const std::optional<Vector>& lower,
                                 const std::optional<Vector>& upper) {
  subspace::SampleSet s;
  s.inputs = inputs;
  s.outputs = outputs;
  if (lower.has_value() != upper.has_value()) throw ValidationError("give both lower and upper bounds or neither");
  if (lower) {
    if (lower->size() != inputs.cols() || upper->size() != inputs.cols())
      throw ValidationError("bounds must have one entry per input column");
    for (Eigen::Index j = 0; j < inputs.cols(); ++j) s.box.push_back({(*lower)(j), (*upper)(j)});
  } else {
    s.box = subspace::unit_box(static_cast<std::size_t>(inputs.cols()));
  }
  s.validate();
  return s;
}

geometry::TriMesh make_mesh(const RowMatrix& vertices, const IndexMatrix& triangles) {
  if (vertices.cols() != 3) throw ValidationError("vertices must be an (n, 3) array");
  std::vector<Vec3> v;
  v.reserve(static_cast<std::size_t>(vertices.rows()));
  for (Eigen::Index i = 0; i < vertices.rows(); ++i) v.emplace_back(vertices(i, 0), vertices(i, 1), vertices(i, 2));
  std::vector<geometry::Triangle> t;
  t.reserve(static_cast<std::size_t>(triangles.rows()));
  for (Eigen::Index i = 0; i < triangles.rows(); ++i) t.push_back({triangles(i, 0), triangles(i, 1), triangles(i, 2)});
  return {std::move(v), std::move(t)};
}

py::tuple mesh_arrays(const geometry::TriMesh& mesh) {
  RowMatrix v(static_cast<Eigen::Index>(mesh.vertex_count()), 3);
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) v.row(static_cast<Eigen::Index>(i)) = mesh.vertices()[i];
  IndexMatrix t(static_cast<Eigen::Index>(mesh.triangle_count()), 3);
  for (std::size_t i = 0; i < mesh.triangle_count(); ++i)
    for (int k = 0; k < 3; ++k) t(static_cast<Eigen::Index>(i), k) = mesh.triangles()[i][static_cast<std::size_t>(k)];
  return py::make_tuple(v, t);
}

subspace::IntervalKind interval_kind(const std::string& name) {
  if (name == "minmax") return subspace::IntervalKind::MinMax;
  if (name == "percentile") return subspace::IntervalKind::Percentile;
  throw ValidationError("interval must be 'minmax' or 'percentile', got '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Active-subspace hull design: subspaces, response surfaces, FFD, hydrostatics";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  // ---- subspace ----

  m.def(
      "local_linear_gradients",
      [](const Matrix& inputs, const Vector& outputs, int k) {
        return subspace::local_linear_gradients(make_samples(inputs, outputs, std::nullopt, std::nullopt), k).gradients;
      },
      py::arg("inputs"), py::arg("outputs"), py::arg("k") = 14,
      "Gradient rows from k-nearest-neighbour linear fits; inputs must already lie in [-1, 1]^m.");

  m.def(
      "normalize",
      [](const Matrix& inputs, const Vector& lower, const Vector& upper) {
        const auto s = make_samples(inputs, Vector::Zero(inputs.rows()), lower, upper);
        return subspace::normalize(s).inputs;
      },
      py::arg("inputs"), py::arg("lower"), py::arg("upper"));

  m.def("covariance", py::overload_cast<const Matrix&>(&subspace::covariance), py::arg("gradients"));

  m.def(
      "eigendecompose",
      [](const Matrix& sigma) {
        const auto as = subspace::eigendecompose(sigma);
        return py::make_tuple(as.eigenvalues, as.eigenvectors);
      },
      py::arg("sigma"), "Eigenvalues (descending) and eigenvectors (columns).");

  m.def("suggest_dim", &subspace::suggest_dim, py::arg("eigenvalues"));

  m.def("subspace_distance", &subspace::subspace_distance, py::arg("w1_a"), py::arg("w1_b"));

  m.def(
      "bootstrap_eigenvalues",
      [](const Matrix& gradients, int replicates, std::uint64_t seed, const std::string& interval) {
        const auto b = subspace::bootstrap_eigenvalues(subspace::gradients_from_matrix(gradients), replicates, seed,
                                                       interval_kind(interval));
        py::dict d;
        d["estimate"] = b.estimate;
        d["lower"] = b.lower;
        d["upper"] = b.upper;
        d["subspace_distance"] = b.subspace_distance;
        d["replicates"] = b.replicates;
        return d;
      },
      py::arg("gradients"), py::arg("replicates") = 1000, py::arg("seed") = 0, py::arg("interval") = "minmax");

  // ---- response surfaces ----

  py::class_<surface::PolySurface>(m, "PolySurface")
      .def_readonly("active_dim", &surface::PolySurface::active_dim)
      .def_readonly("degree", &surface::PolySurface::degree)
      .def_readonly("exponents", &surface::PolySurface::exponents)
      .def_readonly("coefficients", &surface::PolySurface::coefficients)
      .def_readonly("warnings", &surface::PolySurface::warnings)
      .def("predict", [](const surface::PolySurface& s, const Matrix& x) { return surface::predict_rows(s, x); },
           py::arg("active_inputs"))
      .def("relative_rmse", &surface::relative_rmse, py::arg("test_active"), py::arg("test_outputs"));

  m.def("graded_exponents", &surface::graded_exponents, py::arg("dims"), py::arg("degree"));
  m.def("fit_surface", &surface::fit, py::arg("active_inputs"), py::arg("outputs"), py::arg("degree"));

  m.def(
      "error_matrix",
      [](const Matrix& inputs, const Vector& outputs, std::vector<int> dims, std::vector<int> degrees,
         int repetitions, double split, std::uint64_t seed, int k, const std::optional<Vector>& lower,
         const std::optional<Vector>& upper, const std::optional<Matrix>& gradients) {
        surface::ErrorMatrixOptions opt;
        opt.dims = std::move(dims);
        opt.degrees = std::move(degrees);
        opt.repetitions = repetitions;
        opt.split = split;
        opt.seed = seed;
        opt.k_neighbors = k;
        return surface::error_matrix(make_samples(inputs, outputs, lower, upper), opt, gradients).values;
      },
      py::arg("inputs"), py::arg("outputs"), py::arg("dims") = std::vector<int>{1, 2, 3},
      py::arg("degrees") = std::vector<int>{1, 2, 3, 4}, py::arg("repetitions") = 20, py::arg("split") = 0.8,
      py::arg("seed") = 0, py::arg("k") = 14, py::arg("lower") = py::none(), py::arg("upper") = py::none(),
      py::arg("gradients") = py::none(),
      "Mean relative test RMSE, rows = dims, columns = degrees.");

  // ---- extrapolation ----

  m.def(
      "steady_value",
      [](std::vector<double> times, std::vector<double> values, int window) {
        return extrapolate::steady_value({std::move(times), std::move(values)}, window);
      },
      py::arg("times"), py::arg("values"), py::arg("window") = 5);

  // ---- geometry ----

  m.def(
      "read_stl", [](const std::filesystem::path& p) { return mesh_arrays(geometry::read_stl(p)); }, py::arg("path"),
      "(vertices, triangles) arrays.");
  m.def(
      "write_stl",
      [](const RowMatrix& v, const IndexMatrix& t, const std::filesystem::path& p, bool binary) {
        geometry::write_stl(make_mesh(v, t), p, binary);
      },
      py::arg("vertices"), py::arg("triangles"), py::arg("path"), py::arg("binary") = true);
  m.def(
      "signed_volume", [](const RowMatrix& v, const IndexMatrix& t) { return geometry::signed_volume(make_mesh(v, t)); },
      py::arg("vertices"), py::arg("triangles"));
  m.def(
      "icosphere",
      [](double radius, int subdivisions) { return mesh_arrays(geometry::make_icosphere(radius, subdivisions)); },
      py::arg("radius") = 1.0, py::arg("subdivisions") = 3);
  m.def(
      "hydrostatic_equilibrium",
      [](const RowMatrix& v, const IndexMatrix& t, double weight, double rho, double g) {
        geometry::FlowConstants flow;
        flow.rho = rho;
        flow.g = g;
        const auto h = geometry::hydrostatic_equilibrium(make_mesh(v, t), weight, flow);
        py::dict d;
        d["sinkage"] = h.sinkage;
        d["submerged_volume"] = h.submerged_volume;
        d["wetted_area"] = h.wetted_area;
        d["buoyancy_force"] = Vector(h.buoyancy_force);
        d["iterations"] = h.iterations;
        return d;
      },
      py::arg("vertices"), py::arg("triangles"), py::arg("weight"), py::arg("rho") = 998.0, py::arg("g") = 9.81);

  // ---- free-form deformation ----

  m.def(
      "deform_hull",
      [](const RowMatrix& v, const IndexMatrix& t, std::vector<double> params,
         const std::optional<std::filesystem::path>& profile) {
        const auto mesh = make_mesh(v, t);
        const auto prof = profile ? ffd::load_profile(*profile) : pipeline::default_hull_profile_for(mesh);
        return mesh_arrays(ffd::deform_mesh(ffd::hull_lattice({std::move(params)}, prof), mesh));
      },
      py::arg("vertices"), py::arg("triangles"), py::arg("params"), py::arg("profile") = py::none(),
      "Deform a hull with six lattice parameters; default profile spans the mesh bounds.");

  m.def("default_hull", []() { return mesh_arrays(pipeline::default_hull_mesh()); });

  // ---- pipeline ----

  m.def(
      "run_study",
      [](const std::filesystem::path& out_dir, const std::optional<std::filesystem::path>& config,
         const std::optional<std::filesystem::path>& oracle, const std::optional<std::filesystem::path>& space,
         std::optional<std::uint64_t> seed, std::optional<std::size_t> samples) {
        auto cfg = config ? pipeline::load_study_config(*config) : pipeline::StudyConfig{};
        if (seed) cfg.seed = *seed;
        if (samples) cfg.sample_count = *samples;
        pipeline::OracleSpec spec;
        if (oracle) spec = pipeline::load_oracle(*oracle);
        const auto ds = space ? pipeline::load_design_space(*space) : pipeline::table1_space();
        const auto r = [&] {
          py::gil_scoped_release release;
          return pipeline::run_study(cfg, ds, spec, out_dir);
        }();
        py::dict d;
        d["evaluated"] = r.evaluated;
        d["failed"] = r.failures.size();
        d["eigenvalues"] = r.subspace.eigenvalues;
        d["eigenvectors"] = r.subspace.eigenvectors;
        d["suggested_dim"] = r.suggested_dim;
        d["error_matrix"] = r.errors.values;
        std::vector<std::string> files;
        for (const auto& a : r.artifacts) files.push_back(a.string());
        d["artifacts"] = files;
        return d;
      },
      py::arg("out_dir"), py::arg("config") = py::none(), py::arg("oracle") = py::none(), py::arg("space") = py::none(),
      py::arg("seed") = py::none(), py::arg("samples") = py::none());
}
