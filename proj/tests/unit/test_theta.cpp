#include "doctest.h"
#include "helpers.hpp"
#include "qdx/theta.hpp"

using namespace qdx;
using namespace qdx::test;

namespace {

const std::vector<cplx> kQs = {4.0, cplx(2.0, 1.0), -3.0};

// Kronecker symbol (−3/d).
int chi3(long d) {
  const long m = d % 3;
  return m == 0 ? 0 : (m == 1 ? 1 : -1);
}

}  // namespace

TEST_CASE("theta functional equations on the fundamental annulus") {
  for (cplx q : kQs) {
    const QParams qp = QParams::from_q(q);
    for (int i = 0; i < 50; ++i) {
      const cplx z = random_annulus(qp);
      const cplx t = theta(qp, z);
      CHECK(rel_err(theta(qp, qp.q() * z), z * t) < 1e-10);
      CHECK(rel_err(theta(qp, 1.0 / z), z * t) < 1e-10);
    }
  }
  CHECK_THROWS_AS(theta(QParams::from_q(4.0), 0.0), Error);
}

TEST_CASE("theta vanishes on the spiral [-1; q]") {
  const QParams qp = QParams::from_q(4.0);
  for (int k = 0; k <= 2; ++k) CHECK(std::abs(theta(qp, -qp.qpow(-k))) < 1e-9);
  CHECK(std::abs(triple_product(qp, -1.0)) < 1e-10);
}

TEST_CASE("triple product agrees with the series") {
  for (cplx q : kQs) {
    const QParams qp = QParams::from_q(q);
    for (int i = 0; i < 20; ++i) {
      const cplx z = random_annulus(qp);
      CHECK(rel_err(triple_product(qp, z), theta(qp, z)) < 1e-10);
    }
  }
  const QParams qp = QParams::from_q(5.0);
  for (double x : {0.3, 1.0, 2.5, 7.0}) {
    CHECK(triple_product(qp, x).real() > 0.0);
    CHECK(std::abs(triple_product(qp, x).imag()) < 1e-12 * std::abs(triple_product(qp, x)));
  }
}

TEST_CASE("shifted theta quasi-periodicity in c") {
  const QParams qp = QParams::from_q(cplx(2.0, 1.0));
  for (int i = 0; i < 10; ++i) {
    const cplx c = random_annulus(qp), z = random_annulus(qp);
    CHECK(rel_err(theta_c(qp, qp.q() * c, z), (qp.q() * c / z) * theta_c(qp, c, z)) < 1e-10);
  }
}

TEST_CASE("theta power coefficients") {
  for (cplx q : {cplx(4.0), cplx(2.0, 1.0)}) {
    const QParams qp = QParams::from_q(q);
    const QParams q2(2.0 * qp.tau());
    ThetaCoeffTable table(qp, 5, 20);
    for (int n = -10; n <= 10; ++n) {
      CHECK(rel_err(table.t(1, n), qp.qpow(-0.5 * n * (n + 1.0))) < 1e-13);
      CHECK(rel_err(theta_power_coeff(qp, 2, n), qp.qpow(-0.5 * n * (n + 1.0)) * theta(q2, qp.qpow(n + 1.0))) < 1e-10);
    }
    for (int d = 1; d <= 3; ++d)
      for (int n = -15; n <= 15; ++n)
        CHECK(rel_err(table.t(d, n), theta_power_coeff_direct(qp, d, n)) < 1e-10);
    // Splitting of θ_q² into even and odd parts.
    for (int i = 0; i < 10; ++i) {
      const cplx z = random_annulus(qp);
      const cplx lhs = theta(qp, z) * theta(qp, z);
      const cplx rhs = theta(q2, qp.q()) * theta(q2, z * z) + theta(q2, 1.0) * theta(q2, qp.q() * z * z) / z;
      CHECK(rel_err(lhs, rhs) < 1e-10);
    }
    // θ_{q,c}^δ series matches pointwise powers.
    const cplx c = cplx(1.3, -0.4);
    const LaurentSeries s = theta_power_series(table, c, 3, 20);
    const cplx z = cplx(0.9, 0.5);
    CHECK(rel_err(s.evaluate(z), std::pow(theta_c(qp, c, z), 3)) < 1e-10);
  }
}

TEST_CASE("good values of q") {
  const auto rep = is_good_value(QParams::from_q(4.0), 4, 20);
  CHECK_FALSE(rep.bad);
  CHECK(rep.min_abs > 1e-3);
  for (cplx q : kQs) {
    const auto r1 = is_good_value(QParams::from_q(q), 1, 20);
    CHECK_FALSE(r1.bad);
  }
  const BadQResult bad = find_bad_q();
  const auto rb = is_good_value(QParams::from_q(bad.q_star), 3, 5);
  CHECK(rb.bad);
  CHECK(rb.argmin_delta == 3);
  // t_{n−3}^(3) = q^n t_n^(3), so the zero propagates to every n ≡ 0 mod 3.
  CHECK(rb.argmin_n % 3 == 0);
  CHECK_THROWS_AS(is_good_value(QParams::from_q(4.0), 2, 3, 0.0), Error);
}

TEST_CASE("hexagonal form counts and series") {
  const auto r = hex_counts(200);
  CHECK(r[0] == 1);
  CHECK(r[1] == 6);
  for (int n = 1; n <= 200; ++n) {
    long ref = 0;
    for (long d = 1; d <= n; ++d)
      if (n % d == 0) ref += chi3(d);
    CHECK(r[static_cast<size_t>(n)] == 6 * ref);
  }
  const auto big = hex_counts(10000);
  long R = 0;
  for (long v : big) R += v;
  CHECK(std::abs(static_cast<double>(R) / 1e4 / (2 * kPi / std::sqrt(3.0)) - 1.0) < 0.05);

  CHECK(hex_series(0.0) == 1.0);
  CHECK(std::abs(hex_series(1e-3) - (1.0 + 6e-3)) < 1e-8);
  for (double x : {0.3, 0.6, 0.9})
    CHECK(std::abs(hex_series(-x) - (2.0 * hex_series(std::pow(x, 4)) - hex_series(x))) < 1e-12 * hex_series(x));
  CHECK_THROWS_AS(hex_series(1.0), Error);
  CHECK(hex_series(-0.1) > 0.0);
  CHECK(hex_series(-0.99) < 0.0);
}

TEST_CASE("t_0^(3) is the hexagonal series and vanishes at q*") {
  const QParams q3 = QParams::from_q(3.0);
  CHECK(rel_err(theta_power_coeff(q3, 3, 0), hex_series(1.0 / 3.0)) < 1e-10);
  const BadQResult bad = find_bad_q();
  // Frozen from an independent mpmath root of f on (−1, 0).
  CHECK(std::abs(bad.x_star - (-0.16303353482158046486)) < 1e-12);
  CHECK(std::abs(bad.q_star - (-6.1337074062362275595)) < 1e-9);
  CHECK(bad.q_star < -1.0);
  CHECK(bad.t0 < 1e-9);
  CHECK(bad.f_vs_t0 < 1e-10);
}
