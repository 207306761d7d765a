#include "doctest.h"
#include "helpers.hpp"
#include "qdx/elliptic.hpp"
#include "qdx/theta.hpp"

using namespace qdx;
using namespace qdx::test;

TEST_CASE("canonicalize") {
  const QParams qp = QParams::from_q(4.0);
  CHECK(canonicalize(1.0, qp).rep == cplx(1.0));
  CHECK(std::abs(canonicalize(qp.q() * qp.q(), qp).rep - 1.0) < 1e-12);
  CHECK_THROWS_AS(canonicalize(0.0, qp), Error);
  const QParams qc = QParams::from_q(cplx(2.0, 1.5));
  for (int i = 0; i < 30; ++i) {
    const cplx c = std::polar(std::exp(uniform(-5.0, 5.0)), uniform(-kPi, kPi));
    const auto a = canonicalize(c, qc), b = canonicalize(qc.q() * c, qc);
    CHECK(std::abs(a.rep - b.rep) < 1e-9);
    CHECK(std::abs(a.rep) >= 1.0 - 1e-12);
    CHECK(std::abs(a.rep) < qc.abs_q());
    CHECK(std::abs(canonicalize(a.rep, qc).rep - a.rep) == 0.0);
    CHECK(same_point(a, EllipticPoint{c, Base::Q}, qc));
  }
}

TEST_CASE("canonicalize in base q_r") {
  const QParams qp = QParams::from_q(8.0, 3);
  const auto p = canonicalize(qp.qr() * qp.qr() * cplx(1.1, 0.2), qp, Base::QR);
  CHECK(std::abs(p.rep - cplx(1.1, 0.2)) < 1e-12);
  CHECK(p.base == Base::QR);
  CHECK_FALSE(same_class(1.0, qp.qr(), qp, Base::Q));
  CHECK(same_class(1.0, qp.qr(), qp, Base::QR));
}

TEST_CASE("characters gamma1 and gamma2") {
  const QParams qp = QParams::from_q(cplx(3.0, 1.0));
  CHECK(std::abs(character_gamma(1, qp.q(), qp) - 1.0) < 1e-12);
  CHECK(std::abs(character_gamma(2, qp.q(), qp) - 1.0) < 1e-12);
  for (int r = 1; r <= 5; ++r) {
    CHECK(std::abs(character_gamma(2, qp.q_root(r), qp) - unit_root(1, r)) < 1e-12);
    CHECK(std::abs(character_gamma(1, unit_root(1, r), qp) - unit_root(1, r)) < 1e-12);
    CHECK(character_gamma(2, unit_root(1, r), qp) == cplx(1.0));
    CHECK(std::abs(character_gamma(1, qp.q_root(r), qp) - 1.0) < 1e-12);
  }
  for (int i = 0; i < 20; ++i) {
    const cplx c = std::polar(std::exp(uniform(-3.0, 3.0)), uniform(-kPi, kPi));
    const cplx d = std::polar(std::exp(uniform(-3.0, 3.0)), uniform(-kPi, kPi));
    for (int k = 1; k <= 2; ++k)
      CHECK(std::abs(character_gamma(k, c * d, qp) - character_gamma(k, c, qp) * character_gamma(k, d, qp)) < 1e-12);
    CHECK(std::abs(character_gamma(2, qp.q() * c, qp) - character_gamma(2, c, qp)) < 1e-12);
    CHECK(std::abs(character_gamma(1, qp.q() * c, qp) - character_gamma(1, c, qp)) < 1e-12);
  }
  CHECK_THROWS_AS(character_gamma(1, 0.0, qp), Error);
}

TEST_CASE("root grid") {
  const QParams qp = QParams::from_q(cplx(3.0, 2.0));
  const auto g1 = root_grid(1, canonicalize(cplx(1.5, 0.7), qp), qp);
  CHECK(std::abs(g1.c - g1.d) < 1e-14);
  // d = 1: the square root with argument in (−π, 0] is 1 itself.
  const auto g2 = root_grid(2, EllipticPoint{1.0, Base::Q}, qp);
  CHECK(std::abs(g2.c - 1.0) < 1e-15);
  CHECK(std::abs(g2.at(1, 0) + 1.0) < 1e-15);
  for (int t = 0; t < 10; ++t) {
    const auto beta = canonicalize(std::polar(std::exp(uniform(0.0, 3.0)), uniform(-kPi, kPi)), qp);
    for (int delta = 1; delta <= 4; ++delta) {
      const auto g = root_grid(delta, beta, qp);
      const double qd = std::pow(qp.abs_q(), 1.0 / delta);
      double ac = std::arg(g.c);
      if (ac > 1e-12) ac -= 2 * kPi;
      CHECK(ac > -2 * kPi / delta - 1e-12);
      for (int l = 0; l < delta; ++l)
        for (int m = 0; m < delta; ++m) {
          const cplx c = g.at(l, m);
          CHECK(rel_err(std::pow(c, delta) * qp.qpow(m), g.d) < 1e-12);
          CHECK(std::abs(c) <= std::pow(qd, -m) * (1 + 1e-12));
          CHECK(std::abs(c) > std::pow(qd, -m - 1) * (1 - 1e-12));
        }
      for (int l = 0; l < delta; ++l) {
        double a = std::arg(g.at(l, 0));
        if (a > 1e-12) a -= 2 * kPi;
        CHECK(a <= -2 * kPi * l / delta + 1e-12);
        CHECK(a > -2 * kPi * (l + 1) / delta - 1e-12);
      }
      const auto again = root_grid(delta, beta, qp);
      CHECK(again.grid == g.grid);
    }
  }
}

TEST_CASE("shift ell") {
  CHECK(shift_ell(3, EllipticPoint{1.0, Base::QR}, 3) == -1);
  CHECK(shift_ell(1, EllipticPoint{-1.0, Base::QR}, 2) == 0);
  // ζ_r c_0 is the grid point c'_ℓ for β' = ζ_r^{-δ} β, in base q_r.
  for (int t = 0; t < 20; ++t) {
    const int r = uniform_int(1, 4), delta = uniform_int(1, 5);
    const QParams qp = QParams::from_q(std::polar(uniform(2.0, 9.0), uniform(-kPi, kPi)), r);
    const auto beta = canonicalize(std::polar(std::exp(uniform(0.0, qp.log_abs_q() / r)), uniform(-kPi, kPi)), qp, Base::QR);
    const auto g = root_grid(delta, beta, qp);
    const auto beta2 = canonicalize(unit_root(-delta, r) * beta.rep, qp, Base::QR);
    const auto g2 = root_grid(delta, beta2, qp);
    const int ell = shift_ell(delta, beta, r);
    CHECK(std::abs(unit_root(1, r) * g.c - g2.at(ell, 0)) < 1e-12 * std::abs(g.c));
  }
}

TEST_CASE("residue on E_q") {
  const QParams qp = QParams::from_q(4.0);
  const cplx c0 = cplx(1.3, 0.8);
  auto g = [](cplx c) { return std::exp(c) + c * c; };
  const cplx res = residue_on_Eq([&](cplx c) { return g(c) / (c - c0); }, c0);
  CHECK(rel_err(res, g(c0) / c0) < 1e-8);
  CHECK(std::abs(residue_on_Eq([&](cplx c) { return g(c); }, c0)) < 1e-10);
  // q-invariant theta quotient with a simple pole on the spiral of c0 (ab = c0·e).
  const cplx a = 2.0, b = cplx(0.0, 1.5), e = a * b / c0;
  auto phi = [&](cplx c) {
    return theta(qp, -c / a) * theta(qp, -c / b) / (theta(qp, -c / c0) * theta(qp, -c / e));
  };
  CHECK(rel_err(phi(qp.q() * cplx(0.3, 1.1)), phi(cplx(0.3, 1.1))) < 1e-10);
  const cplx r1 = residue_on_Eq(phi, c0), r2 = residue_on_Eq(phi, qp.q() * c0);
  CHECK(std::abs(r1 - r2) < 1e-8);
  CHECK(std::abs(r1) > 1e-3);
  // Matrix version.
  const CMatrix R = residue_on_Eq(
      [&](cplx c) {
        CMatrix m(1, 2);
        m << 1.0 / (c - c0), c;
        return m;
      },
      c0);
  CHECK(std::abs(R(0, 0) - 1.0 / c0) < 1e-10);
  CHECK(std::abs(R(0, 1)) < 1e-10);
  CHECK_THROWS_AS(residue_on_Eq([](cplx) { return cplx(NAN, 0.0); }, c0), Error);
}
