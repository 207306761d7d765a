#include "doctest.h"
#include "helpers.hpp"
#include "qdx/numkernel.hpp"
#include "qdx/theta.hpp"

using namespace qdx;
using namespace qdx::test;

TEST_CASE("QParams derives q from tau and rejects |q| <= 1") {
  const QParams qp = QParams::from_q(4.0);
  CHECK(std::abs(qp.q() - 4.0) < 1e-13);
  CHECK_THROWS_AS(QParams(cplx(0.0, 0.22)), Error);
  CHECK_THROWS_AS(QParams(cplx(0.3, 0.0)), Error);
  CHECK_THROWS_AS(QParams(cplx(0.0, -0.2), 0), Error);
  CHECK_THROWS_AS(QParams(cplx(0.0, -0.2), 1, 0.0), Error);
}

TEST_CASE("coherent roots of q and of the base point") {
  const QParams qp(cplx(0.17, -0.31), 1, cplx(-0.7, 0.4));
  for (int r = 1; r <= 6; ++r)
    for (int s = 1; s <= 6; ++s) {
      CHECK(std::abs(std::pow(qp.q_root(r * s), s) - qp.q_root(r)) < 1e-12);
      CHECK(std::abs(std::pow(qp.z0_root(r * s), s) - qp.z0_root(r)) < 1e-12);
    }
  CHECK(std::abs(std::pow(qp.q_root(5), 5) - qp.q()) < 1e-12);
}

TEST_CASE("unit roots are exact on quadrant points") {
  CHECK(unit_root(1, 2) == cplx(-1.0, 0.0));
  CHECK(unit_root(1, 4) == cplx(0.0, 1.0));
  CHECK(unit_root(-1, 4) == cplx(0.0, -1.0));
  CHECK(unit_root(7, 7) == cplx(1.0, 0.0));
  CHECK(std::abs(unit_root(1, 3) - std::polar(1.0, 2 * kPi / 3)) < 1e-15);
}

TEST_CASE("sigma_q examples") {
  const QParams qp = QParams::from_q(4.0);
  CHECK(sigma_q(LaurentSeries::constant(1.0), qp) == LaurentSeries::constant(1.0));
  const auto s = sigma_q(LaurentSeries::monomial(1.0, 1), qp);
  CHECK(std::abs(s.coeff(1) - 4.0) < 1e-13);
  CHECK(s.lo() == 1);
  CHECK(s.hi() == 1);

  // Truncated theta: σ_q θ = z θ away from the truncation edges.
  std::vector<cplx> c;
  for (int m = -25; m <= 25; ++m) c.push_back(qp.qpow(-0.5 * m * (m + 1.0)));
  const LaurentSeries th(-25, c);
  const LaurentSeries lhs = sigma_q(th, qp);
  const LaurentSeries rhs = th.shifted(1);
  // Compare against the all-positive majorant so that zeros of θ do not inflate the error.
  std::vector<cplx> absc;
  for (const auto& v : th.dense()) absc.push_back(std::abs(v));
  const LaurentSeries major(th.lo(), absc);
  // Pruning is relative to the series max and σ_q amplifies the pruned tail by
  // q^m, so samples stay in the inner part 1 ≤ |z| ≤ 2 of the annulus.
  for (int i = 0; i < 10; ++i) {
    const cplx z = std::polar(uniform(1.0, 2.0), uniform(-kPi, kPi));
    const double scale = major.evaluate(std::abs(qp.q() * z)).real();
    CHECK(std::abs(lhs.evaluate(z) - rhs.evaluate(z)) < 1e-10 * scale);
  }
}

TEST_CASE("dilate examples and composition") {
  const QParams qp = QParams::from_q(cplx(2.0, 1.0));
  const LaurentSeries f = random_series(-4, 5);
  CHECK(max_abs_diff(dilate(f, 1.0), f) == 0.0);
  CHECK(max_abs_diff(dilate(f, qp.q()), sigma_q(f, qp)) < 1e-12 * f.max_abs() * std::pow(std::abs(qp.q()), 5));
  const auto z2 = dilate(LaurentSeries::monomial(1.0, 2), 3.0);
  CHECK(std::abs(z2.coeff(2) - 9.0) < 1e-14);
  CHECK_THROWS_AS(dilate(f, 0.0), Error);
  const cplx l = random_complex(), m = random_complex();
  const auto a = dilate(dilate(f, l), m), b = dilate(f, l * m);
  CHECK(max_abs_diff(a, b) <= 1e-13 * std::max(a.max_abs(), b.max_abs()));
}

TEST_CASE("ramify_series substitution") {
  const auto r1 = ramify_series(LaurentSeries::monomial(1.0, 1), 2);
  CHECK(r1.lo() == 2);
  CHECK(r1.hi() == 2);
  const auto r2 = ramify_series(LaurentSeries::from_map({{0, 1.0}, {-1, 1.0}}), 3);
  CHECK(r2.coeffs() == std::map<int, cplx>{{-3, 1.0}, {0, 1.0}});
  const LaurentSeries f = random_series(-3, 3), g = random_series(-2, 4);
  for (int r = 1; r <= 4; ++r) {
    const cplx c = random_annulus(QParams::from_q(2.0));
    CHECK(rel_err(ramify_series(f, r).evaluate(c), f.evaluate(std::pow(c, r))) < 1e-12);
    CHECK(ramify_series(f + g, r) == ramify_series(f, r) + ramify_series(g, r));
    CHECK(max_abs_diff(ramify_series(f * g, r), ramify_series(f, r) * ramify_series(g, r)) < 1e-14);
  }
}

TEST_CASE("evaluate examples") {
  CHECK(LaurentSeries::from_map({{0, 1.0}, {1, 1.0}}).evaluate(2.0) == cplx(3.0));
  CHECK(LaurentSeries::monomial(1.0, -1).evaluate(2.0) == cplx(0.5));
  CHECK_THROWS_AS(LaurentSeries::constant(1.0).evaluate(0.0), Error);
  const QParams qp = QParams::from_q(cplx(-3.0, 0.5));
  const LaurentSeries f = random_series(-5, 5);
  const cplx c = random_unit_disk();
  CHECK(rel_err(sigma_q(f, qp).evaluate(c), f.evaluate(qp.q() * c)) < 1e-10);
}

TEST_CASE("sigma_q is multiplicative and products track windows") {
  const QParams qp = QParams::from_q(cplx(1.5, 1.5));
  const LaurentSeries f = random_series(-3, 2), g = random_series(-1, 4);
  const auto fg = f * g;
  CHECK(fg.lo() == -4);
  CHECK(fg.hi() == 6);
  const auto a = sigma_q(fg, qp), b = sigma_q(f, qp) * sigma_q(g, qp);
  CHECK(max_abs_diff(a, b) <= 1e-13 * a.max_abs());
  // Clipping to the cap.
  const auto big = LaurentSeries::monomial(1.0, 40) * LaurentSeries::monomial(1.0, 40);
  CHECK(big.is_zero());
}

TEST_CASE("Laurent matrices: products, kron, sigma") {
  const QParams qp = QParams::from_q(3.0);
  LaurentMatrix A(2, 2), B(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      A(i, j) = random_series(-1, 1);
      B(i, j) = random_series(0, 2);
    }
  const cplx z = cplx(0.7, 0.4);
  CHECK((A * B).evaluate(z).isApprox(A.evaluate(z) * B.evaluate(z), 1e-12));
  CHECK(sigma_q(A, qp).evaluate(z).isApprox(A.evaluate(qp.q() * z), 1e-12));
  const CMatrix C = CMatrix::Random(3, 2);
  const CMatrix K = kron(A, C).evaluate(z);
  CMatrix Kref(6, 4);
  const CMatrix Az = A.evaluate(z);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) Kref.block(3 * i, 2 * j, 3, 2) = Az(i, j) * C;
  CHECK(K.isApprox(Kref, 1e-12));
  CHECK(LaurentMatrix::identity(3).evaluate(z).isApprox(CMatrix::Identity(3, 3)));
}
