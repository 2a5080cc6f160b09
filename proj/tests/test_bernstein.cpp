#include <doctest.h>

#include <random>

#include "bernloc/bernstein.hpp"
#include "bernloc/quadrature.hpp"
#include "oracles.hpp"

using namespace bernloc;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

BernsteinPolyd scalar_poly(std::initializer_list<double> c, double t0 = 0.0, double tf = 1.0) {
  VectorXd v(c.size());
  int i = 0;
  for (double x : c) v(i++) = x;
  return BernsteinPolyd::scalar(v, t0, tf);
}

}  // namespace

TEST_CASE("basis values") {
  CHECK(basis(0, 5, 2.0, 2.0, 7.0) == doctest::Approx(1.0));
  double total = 0.0;
  for (int j = 0; j <= 4; ++j) total += basis(j, 4, 0.37, 0.0, 1.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(basis(1, 2, 0.5, 0.0, 1.0) == doctest::Approx(0.5));

  CHECK_THROWS_AS(basis(3, 2, 0.5, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(basis(-1, 2, 0.5, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(basis(0, 2, 1.5, 0.0, 1.0), std::domain_error);
}

TEST_CASE("partition of unity up to degree 20") {
  for (int m = 0; m <= 20; ++m) {
    for (int k = 0; k <= 10; ++k) {
      const double t = -1.0 + 4.0 * k / 10.0;
      double total = 0.0;
      for (int j = 0; j <= m; ++j) {
        const double b = basis(j, m, t, -1.0, 3.0);
        CHECK(b >= 0.0);
        CHECK(b <= 1.0);
        total += b;
      }
      CHECK(std::abs(total - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("construction invariants") {
  CHECK_THROWS_AS(BernsteinPolyd(MatrixXd::Ones(1, 3), 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(BernsteinPolyd(MatrixXd::Ones(1, 3), 2.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(BernsteinPolyd(MatrixXd::Ones(0, 3), 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(BernsteinPolyd(MatrixXd::Ones(1, kMaxDegree + 2), 0.0, 1.0), std::domain_error);
  CHECK_NOTHROW(BernsteinPolyd(MatrixXd::Ones(1, kMaxDegree + 1), 0.0, 1.0));
}

TEST_CASE("binomials stay exact for large degree") {
  CHECK(binomial<double>(10, 3) == 120.0);
  CHECK(binomial<double>(60, 30) == doctest::Approx(oracle::choose(60, 30)).epsilon(1e-13));
  CHECK(binomial<double>(139, 0) == 1.0);
}

TEST_CASE("eval: constants, endpoints, domain") {
  const VectorXd v = (VectorXd(2) << 1.5, -3.0).finished();
  const auto p = BernsteinPolyd::constant(v, 6, 0.0, 4.0);
  for (double t : {0.0, 0.3, 2.2, 4.0}) CHECK((eval(p, t) - v).norm() < 1e-14);

  std::mt19937_64 rng(7);
  const auto q = oracle::random_poly(rng, 3, 7, -2.0, 5.0);
  CHECK(eval(q, -2.0) == q.coeff(0));
  CHECK(eval(q, 5.0) == q.coeff(7));
  CHECK_THROWS_AS(eval(q, 5.1), std::domain_error);
  CHECK_THROWS_AS(eval(q, -2.5), std::domain_error);
}

TEST_CASE("eval matches monomial expansion (degree 6, 25 points)") {
  std::mt19937_64 rng(11);
  const auto p = oracle::random_poly(rng, 1, 6, 1.0, 3.0);
  const auto mono = oracle::to_monomial(p.coeffs().row(0));
  for (int k = 0; k < 25; ++k) {
    const double t = 1.0 + 2.0 * k / 24.0;
    CHECK(std::abs(eval_scalar(p, t) - oracle::horner(mono, (t - 1.0) / 2.0)) < 1e-10);
  }
}

TEST_CASE("diff matrix rows sum to zero") {
  for (int m = 1; m <= 12; ++m) {
    const auto d = diff_matrix(m, 0.5, 3.0);
    CHECK(d.entries.rows() == m + 1);
    CHECK(d.entries.cols() == m + 1);
    CHECK(d.entries.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("derivative examples") {
  const auto c = BernsteinPolyd::constant(VectorXd::Constant(1, 4.0), 5, 0.0, 2.0);
  CHECK(derivative(c).coeffs().cwiseAbs().maxCoeff() < 1e-12);

  const auto line = scalar_poly({2.0, 5.0});
  const auto dl = derivative(line);
  for (double t : {0.0, 0.4, 1.0}) CHECK(eval_scalar(dl, t) == doctest::Approx(3.0));

  const auto deg0 = scalar_poly({3.0});
  const auto d0 = derivative(deg0);
  CHECK(d0.degree() == 0);
  CHECK(d0.coeffs()(0, 0) == 0.0);
}

TEST_CASE("derivative vs central differences (degree 5, 20 points)") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = oracle::random_poly(rng, 2, 5, 0.0, 4.0);
    const auto dp = derivative(p);
    const auto ddp = derivative(dp);
    const double h = 1e-5;
    for (int k = 1; k <= 20; ++k) {
      const double t = 4.0 * k / 21.0;
      const Eigen::Vector2d fd = (eval(p, t + h) - eval(p, t - h)) / (2 * h);
      const Eigen::Vector2d an = eval(dp, t);
      CHECK((fd - an).norm() <= 1e-6 * std::max(1.0, an.norm()));
      // Second derivative via the matrix applied twice.
      const Eigen::Vector2d fd2 = (eval(dp, t + h) - eval(dp, t - h)) / (2 * h);
      CHECK((fd2 - eval(ddp, t)).norm() <= 1e-6 * std::max(1.0, fd2.norm()));
    }
  }
}

TEST_CASE("integral examples") {
  const auto c = BernsteinPolyd::constant(VectorXd::Constant(1, 2.5), 4, 1.0, 5.0);
  CHECK(integrate(c)(0) == doctest::Approx(10.0));
  CHECK(integral_weight(4, 0.0, 10.0) == 2.0);
  for (int m = 1; m <= 20; ++m) CHECK(integral_weight(m, 0.0, 3.0) == 3.0 / (m + 1));
}

TEST_CASE("integral vs 64-node Gauss-Legendre (degree 7)") {
  const auto rule = oracle::gauss_legendre_newton(64);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = oracle::random_poly(rng, 1, 7, -1.0, 2.5);
    const double ref = oracle::quad(rule, -1.0, 2.5, [&](double t) { return eval_scalar(p, t); });
    CHECK(std::abs(integrate(p)(0) - ref) < 1e-9);
  }
}

TEST_CASE("library Gauss-Legendre agrees with the Newton oracle") {
  for (int n : {1, 2, 5, 30, 64}) {
    const auto lib = gauss_legendre(n);
    const auto ref = oracle::gauss_legendre_newton(n);
    std::vector<double> xs(lib.nodes.data(), lib.nodes.data() + n);
    std::vector<double> ws(lib.weights.data(), lib.weights.data() + n);
    std::vector<std::size_t> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] > xs[b]; });
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(xs[order[i]] - ref.x[i]) < 1e-12);
      CHECK(std::abs(ws[order[i]] - ref.w[i]) < 1e-12);
    }
  }
}

TEST_CASE("fundamental theorem ties derivative and integral") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = oracle::random_poly(rng, 2, 1 + trial % 8, 0.0, 3.0);
    const VectorXd lhs = integrate(derivative(p));
    CHECK((lhs - (eval(p, 3.0) - eval(p, 0.0))).norm() < 1e-9);
  }
}

TEST_CASE("sum, scale, product examples") {
  const auto f = scalar_poly({1.0, 0.0});
  const auto g = scalar_poly({0.0, 1.0});
  const auto fg = product(f, g);
  REQUIRE(fg.degree() == 2);
  CHECK(fg.coeffs()(0, 0) == doctest::Approx(0.0));
  CHECK(fg.coeffs()(0, 1) == doctest::Approx(0.5));
  CHECK(fg.coeffs()(0, 2) == doctest::Approx(0.0));

  std::mt19937_64 rng(13);
  const auto p = oracle::random_poly(rng, 2, 5, 0.0, 1.0);
  CHECK(sum(p, scale(p, -1.0)).coeffs().cwiseAbs().maxCoeff() == 0.0);

  const auto other = oracle::random_poly(rng, 2, 5, 0.0, 2.0);
  CHECK_THROWS_AS(sum(p, other), std::domain_error);
  CHECK_THROWS_AS(product(p, other), std::domain_error);
}

TEST_CASE("product vs pointwise sampling (degrees 3 and 2, 50 samples)") {
  std::mt19937_64 rng(17);
  const auto f = oracle::random_poly(rng, 1, 3, 0.0, 2.0);
  const auto g = oracle::random_poly(rng, 1, 2, 0.0, 2.0);
  const auto fg = product(f, g);
  CHECK(fg.degree() == 5);
  for (int k = 0; k < 50; ++k) {
    const double t = 2.0 * k / 49.0;
    CHECK(std::abs(eval_scalar(fg, t) - eval_scalar(f, t) * eval_scalar(g, t)) < 1e-10);
  }
}

TEST_CASE("operations commute with evaluation (random degree <= 8)") {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<int> deg(0, 8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = oracle::random_poly(rng, 2, deg(rng), 1.0, 4.0);
    const auto g = oracle::random_poly(rng, 2, deg(rng), 1.0, 4.0);
    const auto s = sum(f, g);
    const auto pr = product(f, g);
    const auto el = degree_elevate(f, 1 + trial % 4);
    const auto sc = scalar_poly({1.0, -2.0, 0.5}, 1.0, 4.0);
    const auto bc = product(sc, f);
    for (int k = 0; k <= 20; ++k) {
      const double t = 1.0 + 3.0 * k / 20.0;
      const VectorXd ft = eval(f, t), gt = eval(g, t);
      CHECK((eval(s, t) - (ft + gt)).norm() < 1e-10);
      CHECK((eval(pr, t) - ft.cwiseProduct(gt)).norm() < 1e-10);
      CHECK((eval(el, t) - ft).norm() < 1e-10);
      CHECK((eval(bc, t) - eval_scalar(sc, t) * ft).norm() < 1e-10);
    }
  }
}

TEST_CASE("degree elevation") {
  std::mt19937_64 rng(23);
  const auto p = oracle::random_poly(rng, 2, 4, 0.0, 1.0);
  CHECK(degree_elevate(p, 0).coeffs() == p.coeffs());
  const auto c = BernsteinPolyd::constant(VectorXd::Constant(1, -1.25), 3, 0.0, 1.0);
  const auto ce = degree_elevate(c, 5);
  CHECK(ce.degree() == 8);
  CHECK((ce.coeffs().array() + 1.25).abs().maxCoeff() < 1e-15);

  const auto e3 = degree_elevate(p, 3);
  CHECK(e3.degree() == 7);
  for (int k = 0; k < 30; ++k) {
    const double t = k / 29.0;
    CHECK((eval(e3, t) - eval(p, t)).norm() < 1e-12);
  }
}

TEST_CASE("squared norm compositions") {
  const VectorXd v = (VectorXd(2) << 1.0, -2.0).finished();
  const auto c = BernsteinPolyd::constant(v, 3, 0.0, 1.0);
  const auto n = squared_norm_polys(c, std::optional<VectorXd>(v));
  REQUIRE(n.distance);
  CHECK(n.distance->coeffs().cwiseAbs().maxCoeff() < 1e-15);

  MatrixXd seg(2, 2);
  seg << 0.0, 1.0, 0.0, 0.0;
  const auto line = squared_norm_polys(BernsteinPolyd(seg, 0.0, 1.0));
  CHECK((line.velocity.coeffs().array() - 1.0).abs().maxCoeff() < 1e-14);

  std::mt19937_64 rng(29);
  const auto p = oracle::random_poly(rng, 2, 4, 0.0, 3.0);
  const VectorXd pt = (VectorXd(2) << 0.3, -0.7).finished();
  const auto sq = squared_norm_polys(p, std::optional<VectorXd>(pt));
  CHECK(sq.velocity.degree() == 8);  // same-degree derivative, so 2m
  CHECK(sq.distance->degree() == 8);
  const auto dp = derivative(p);
  const auto ddp = derivative(dp);
  for (int k = 0; k < 40; ++k) {
    const double t = 3.0 * k / 39.0;
    CHECK(std::abs(eval_scalar(sq.velocity, t) - eval(dp, t).squaredNorm()) < 1e-9);
    CHECK(std::abs(eval_scalar(sq.acceleration, t) - eval(ddp, t).squaredNorm()) < 1e-9);
    CHECK(std::abs(eval_scalar(*sq.distance, t) - (eval(p, t) - pt).squaredNorm()) < 1e-9);
  }
}

TEST_CASE("coefficient bounds contain the sampled range") {
  const auto c = scalar_poly({2.0, 2.0, 2.0});
  CHECK(coeff_bounds(c) == std::pair<double, double>{2.0, 2.0});
  const auto hat = scalar_poly({0.0, 1.0, 0.0});
  CHECK(coeff_bounds(hat) == std::pair<double, double>{0.0, 1.0});
  CHECK(eval_scalar(hat, 0.5) == doctest::Approx(0.5));

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = oracle::random_poly(rng, 1, 1 + trial % 8, -1.0, 1.0);
    const auto [lo, hi] = coeff_bounds(p);
    for (int k = 0; k < 1000; ++k) {
      const double v = eval_scalar(p, -1.0 + 2.0 * k / 999.0);
      CHECK(v >= lo - 1e-12);
      CHECK(v <= hi + 1e-12);
    }
  }
  CHECK_THROWS_AS(coeff_bounds(oracle::random_poly(rng, 2, 3, 0.0, 1.0)), std::domain_error);
}

TEST_CASE("convex hull containment of evaluations") {
  std::mt19937_64 rng(37);
  const auto p = oracle::random_poly(rng, 1, 6, 0.0, 1.0);
  const double lo = p.coeffs().minCoeff(), hi = p.coeffs().maxCoeff();
  for (int k = 0; k <= 100; ++k) {
    const double v = eval_scalar(p, k / 100.0);
    CHECK(v >= lo - 1e-12);
    CHECK(v <= hi + 1e-12);
  }
}

TEST_CASE("restriction to a sub-interval") {
  std::mt19937_64 rng(41);
  const auto p = oracle::random_poly(rng, 2, 5, 0.0, 10.0);
  const auto r = restrict_to(p, 2.5, 7.0);
  CHECK(r.t0() == 2.5);
  CHECK(r.tf() == 7.0);
  for (int k = 0; k <= 30; ++k) {
    const double t = 2.5 + 4.5 * k / 30.0;
    CHECK((eval(r, t) - eval(p, t)).norm() < 1e-10);
  }
  CHECK_THROWS_AS(restrict_to(p, 3.0, 2.0), std::domain_error);
}
