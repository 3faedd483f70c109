#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hullas/csv.hpp"
#include "hullas/error.hpp"
#include "hullas/subspace.hpp"

namespace hullas::subspace {

using nlohmann::json;

std::filesystem::path meta_path(const std::filesystem::path& csv) {
  auto p = csv;
  p += ".meta.json";
  return p;
}

void write_dataset(const SampleSet& samples, const std::filesystem::path& csv,
                   const std::vector<std::string>& names) {
  const auto m = samples.dimension();
  if (samples.box.size() != m) throw ValidationError("write_dataset: box/dimension mismatch");
  if (!names.empty() && names.size() != m) throw ValidationError("write_dataset: one name per input expected");

  const bool has_outputs = samples.outputs.size() == samples.inputs.rows() &&
                           !(samples.outputs.array().isNaN().all() && samples.outputs.size() > 0);
  std::ofstream out(csv);
  if (!out) throw ValidationError("cannot write dataset '" + csv.string() + "'");
  for (std::size_t j = 0; j < m; ++j) out << (j ? "," : "") << "mu_" << (j + 1);
  if (has_outputs) out << ",f";
  out << '\n';
  for (Eigen::Index i = 0; i < samples.inputs.rows(); ++i) {
    for (Eigen::Index j = 0; j < samples.inputs.cols(); ++j) {
      out << (j ? "," : "") << csv::format_double(samples.inputs(i, j));
    }
    if (has_outputs) {
      const double f = samples.outputs(i);
      out << ',' << (std::isnan(f) ? std::string() : csv::format_double(f));
    }
    out << '\n';
  }

  json meta;
  meta["names"] = json::array();
  meta["lower"] = json::array();
  meta["upper"] = json::array();
  for (std::size_t j = 0; j < m; ++j) {
    meta["names"].push_back(names.empty() ? "mu_" + std::to_string(j + 1) : names[j]);
    meta["lower"].push_back(samples.box[j].lower);
    meta["upper"].push_back(samples.box[j].upper);
  }
  std::ofstream mout(meta_path(csv));
  if (!mout) throw ValidationError("cannot write dataset metadata for '" + csv.string() + "'");
  mout << meta.dump(2) << '\n';
}

SampleSet read_dataset(const std::filesystem::path& path) {
  const csv::Table table = csv::read(path, /*require_header=*/true);
  const auto& header = table.header;
  std::size_t m = header.size();
  const bool has_f = !header.empty() && header.back() == "f";
  if (has_f) --m;
  if (m == 0) throw ValidationError("dataset '" + path.string() + "' has no input columns");
  for (std::size_t j = 0; j < m; ++j) {
    if (header[j] != "mu_" + std::to_string(j + 1)) {
      throw ValidationError("dataset column " + std::to_string(j + 1) + " should be named mu_" +
                            std::to_string(j + 1) + ", found '" + header[j] + "'");
    }
  }

  SampleSet s;
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  s.inputs.resize(n, static_cast<Eigen::Index>(m));
  s.outputs = Vector::Constant(n, std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < m; ++j) s.inputs(i, static_cast<Eigen::Index>(j)) = row[j];
    if (has_f) s.outputs(i) = row[m];
  }

  const auto mp = meta_path(path);
  std::ifstream min(mp);
  if (!min) throw ValidationError("dataset metadata '" + mp.string() + "' not found (box bounds are required)");
  try {
    const json meta = json::parse(min);
    const auto& lo = meta.at("lower");
    const auto& hi = meta.at("upper");
    if (lo.size() != m || hi.size() != m) throw ValidationError("dataset metadata has the wrong number of bounds");
    for (std::size_t j = 0; j < m; ++j) s.box.push_back({lo[j].get<double>(), hi[j].get<double>()});
  } catch (const json::exception& e) {
    throw ValidationError("invalid dataset metadata '" + mp.string() + "': " + e.what());
  }
  return s;
}

void write_subspace(const ActiveSubspace& as, const std::filesystem::path& path) {
  json j;
  j["dimension"] = as.dimension();
  j["active_dim"] = as.active_dim;
  j["eigenvalues"] = std::vector<double>(as.eigenvalues.data(), as.eigenvalues.data() + as.eigenvalues.size());
  j["eigenvectors"] = json::array();  // one array per column
  for (Eigen::Index c = 0; c < as.eigenvectors.cols(); ++c) {
    const Vector col = as.eigenvectors.col(c);
    j["eigenvectors"].push_back(std::vector<double>(col.data(), col.data() + col.size()));
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write subspace '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

ActiveSubspace read_subspace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open subspace '" + path.string() + "'");
  ActiveSubspace as;
  try {
    const json j = json::parse(in);
    const auto vals = j.at("eigenvalues").get<std::vector<double>>();
    const auto m = static_cast<Eigen::Index>(vals.size());
    as.eigenvalues = Eigen::Map<const Vector>(vals.data(), m);
    const auto& cols = j.at("eigenvectors");
    if (static_cast<Eigen::Index>(cols.size()) != m) throw ValidationError("subspace file: eigenvector count mismatch");
    as.eigenvectors.resize(m, m);
    for (Eigen::Index c = 0; c < m; ++c) {
      const auto col = cols[static_cast<std::size_t>(c)].get<std::vector<double>>();
      if (static_cast<Eigen::Index>(col.size()) != m) throw ValidationError("subspace file: eigenvector length mismatch");
      as.eigenvectors.col(c) = Eigen::Map<const Vector>(col.data(), m);
    }
    as.active_dim = j.value("active_dim", 0);
  } catch (const json::exception& e) {
    throw ValidationError("invalid subspace file '" + path.string() + "': " + e.what());
  }
  if (as.active_dim != 0) as = partition(as, as.active_dim);
  return as;
}

}  // namespace hullas::subspace
