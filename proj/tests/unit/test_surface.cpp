#include <cmath>
#include <random>

#include <doctest.h>

#include "hullas/error.hpp"
#include "hullas/surface.hpp"
#include "oracles.hpp"

using namespace hullas;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::Vector4d;
using namespace hullas::surface;

namespace {

Matrix uniform(int n, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix x(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) x(i, j) = u(rng);
  return x;
}

// Direct evaluation of a bivariate polynomial given as {coef, px, py} terms.
struct Term {
  double c;
  int px, py;
};
double eval_terms(const std::vector<Term>& terms, double x, double y) {
  double s = 0.0;
  for (const auto& t : terms) s += t.c * std::pow(x, t.px) * std::pow(y, t.py);
  return s;
}

}  // namespace

TEST_SUITE("surface") {

TEST_CASE("graded lexicographic exponents") {
  const auto e = graded_exponents(2, 2);
  const std::vector<Exponent> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  CHECK(e == expected);
  CHECK(graded_exponents(3, 4).size() == oracle::choose(7, 4));
  CHECK(graded_exponents(1, 3).size() == 4);
  CHECK_THROWS_AS(graded_exponents(0, 2), ValidationError);
}

TEST_CASE("exact univariate recovery and prediction") {
  Matrix x(10, 1);
  Vector f(10);
  for (int i = 0; i < 10; ++i) {
    x(i, 0) = -1.0 + 0.2 * i;
    f(i) = 2.0 + 3.0 * x(i, 0) - x(i, 0) * x(i, 0);
  }
  const auto s = fit(x, f, 2);
  CHECK(std::abs(s.coefficients(0) - 2.0) <= 1e-10);
  CHECK(std::abs(s.coefficients(1) - 3.0) <= 1e-10);
  CHECK(std::abs(s.coefficients(2) + 1.0) <= 1e-10);
  CHECK(predict(s, Vector::Constant(1, 2.0)) == doctest::Approx(4.0).epsilon(1e-10));

  const auto c = fit(x, Vector::Constant(10, 3.5), 3);
  CHECK(std::abs(c.coefficients(0) - 3.5) <= 1e-12);
  CHECK(c.coefficients.tail(3).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(predict(c, Vector::Constant(1, -7.0)) == doctest::Approx(3.5).epsilon(1e-11));

  PolySurface zero;
  zero.active_dim = 2;
  zero.degree = 2;
  zero.exponents = graded_exponents(2, 2);
  zero.coefficients = Vector::Zero(6);
  CHECK(predict(zero, Vector2d(0.3, -4.0)) == 0.0);
}

TEST_CASE("bivariate quartic is recovered and reproduced") {
  const std::vector<Term> p{{1.0, 0, 0}, {-0.5, 1, 0}, {2.0, 0, 1}, {0.7, 2, 0}, {-1.1, 1, 1}, {0.3, 0, 2},
                            {0.4, 3, 0}, {0.2, 1, 2}, {1.5, 4, 0}, {-0.8, 2, 2}, {0.6, 1, 3}, {0.25, 0, 4}};
  const Matrix x = uniform(40, 2, 3);
  Vector f(40);
  for (int i = 0; i < 40; ++i) f(i) = eval_terms(p, x(i, 0), x(i, 1));
  const auto s = fit(x, f, 4);
  const Matrix y = uniform(200, 2, 4);
  for (int i = 0; i < 200; ++i) CHECK(std::abs(predict(s, y.row(i).transpose()) - eval_terms(p, y(i, 0), y(i, 1))) <= 1e-8);
  CHECK(relative_rmse(s, x, f) <= 1e-10);
}

TEST_CASE("relative RMSE") {
  PolySurface mid;
  mid.active_dim = 1;
  mid.degree = 0;
  mid.exponents = graded_exponents(1, 0);
  mid.coefficients = Vector::Constant(1, 0.5);
  Matrix x(2, 1);
  x << 0.0, 1.0;
  CHECK(relative_rmse(mid, x, Vector2d(0.0, 1.0)) == doctest::Approx(0.5));

  // Shift invariance.
  const Matrix t = uniform(30, 2, 9);
  Vector f(30);
  for (int i = 0; i < 30; ++i) f(i) = std::sin(2 * t(i, 0)) + t(i, 1);
  auto s = fit(t, f, 2);
  const double e0 = relative_rmse(s, t, f);
  s.coefficients(0) += 100.0;
  CHECK(relative_rmse(s, t, (f.array() + 100.0).matrix()) == doctest::Approx(e0).epsilon(1e-9));
  CHECK_THROWS_AS(relative_rmse(s, t, Vector::Constant(30, 1.0)), ValidationError);
}

TEST_CASE("underdetermined fits warn") {
  const Matrix x = uniform(5, 2, 1);
  const auto s = fit(x, Vector::Ones(5), 3);
  CHECK_FALSE(s.warnings.empty());
}

TEST_CASE("error matrix on a one-dimensional quadratic ridge") {
  Vector a(5);
  a << 0.5, -0.3, 0.6, 0.2, 0.4;
  a.normalize();
  subspace::SampleSet s;
  s.inputs = uniform(100, 5, 17);
  s.box = subspace::unit_box(5);
  s.outputs.resize(100);
  Matrix g(100, 5);
  for (int i = 0; i < 100; ++i) {
    const double t = a.dot(s.inputs.row(i).transpose());
    s.outputs(i) = 1.0 + t + 2.0 * t * t;
    g.row(i) = ((1.0 + 4.0 * t) * a).transpose();
  }
  ErrorMatrixOptions opt;
  opt.dims = {1, 2};
  opt.degrees = {1, 2, 3};
  opt.repetitions = 3;
  const auto em = error_matrix(s, opt, g);
  CHECK(em.values(0, 1) <= 1e-10);
  CHECK(em.values(0, 2) <= 1e-10);
  CHECK(em.values(0, 0) > 1e-3);

  const auto est = error_matrix(s, opt);
  CHECK(est.values.allFinite());
  CHECK(est.values(0, 1) < est.values(0, 0));

  opt.repetitions = 1;
  const auto r1 = error_matrix(s, opt);
  CHECK(r1.values == error_matrix(s, opt).values);
}

TEST_CASE("error matrix outputs") {
  const auto dir = oracle::scratch("surface_io");
  ErrorMatrix em;
  em.dims = {1, 2};
  em.degrees = {1, 2};
  em.values.resize(2, 2);
  em.values << 0.1, 0.2, 0.3, 0.4;
  em.repetitions = 2;
  write_error_matrix(em, dir / "w.csv", dir / "l.csv");
  CHECK(oracle::slurp(dir / "w.csv") == "dim,degree_1,degree_2\n1,0.10000000000000001,0.20000000000000001\n2,0.29999999999999999,0.40000000000000002\n");
  CHECK(oracle::slurp(dir / "l.csv").rfind("dim,degree,error\n1,1,", 0) == 0);
}

}  // TEST_SUITE
