#include "doctest.h"
#include "helpers.hpp"
#include "qdx/alien.hpp"
#include "qdx/theta.hpp"

using namespace qdx;
using namespace qdx::test;

namespace {

const QParams kQ = QParams::from_q(4.0, 1, cplx(1.3, 0.4));
const QParams kQc = QParams::from_q(cplx(2.5, 1.0), 1, cplx(0.9, -0.7));

LaurentMatrix random_laurent(int rows, int cols, int lo, int hi) {
  LaurentMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = random_series(lo, hi);
  return m;
}

CMatrix random_invertible(int n) {
  CMatrix m = CMatrix::Random(n, n);
  m += 2.0 * CMatrix::Identity(n, n);
  return m;
}

TwoByTwo random_two_by_two(int delta) {
  TwoByTwo A;
  A.a = std::polar(uniform(0.5, 3.0), uniform(-kPi, kPi));
  A.delta = delta;
  A.u = random_series(-2, 2);
  return A;
}

double rel(const CMatrix& a, const CMatrix& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-300});
}

// α^δ β = 1 in E_q.
bool lemma_constraint(const AlienBlock& b, const QParams& qp, Base base = Base::Q) {
  return same_class(std::pow(b.alpha.rep, b.delta) * b.beta.rep, 1.0, qp, base, 1e-9);
}

}  // namespace

TEST_CASE("u = 0 gives zero blocks") {
  TwoByTwo A;
  A.a = cplx(1.5, 0.5);
  A.delta = 2;
  const auto blocks = alien_two_by_two(A, kQ);
  CHECK(blocks.size() == 4);
  for (const auto& b : blocks) CHECK(b.N(0, 0) == 0.0);
}

TEST_CASE("u = z^j: every block nonzero for good q") {
  for (int delta = 1; delta <= 4; ++delta)
    for (int j = -1; j <= delta; ++j) {
      TwoByTwo A;
      A.a = cplx(0.4, -0.3);
      A.delta = delta;
      A.u = LaurentSeries::monomial(1.0, j);
      for (const auto& b : alien_two_by_two(A, kQ)) CHECK(std::abs(b.N(0, 0)) > 1e-12);
    }
}

TEST_CASE("closed form vs residue oracle, and the shifted numerator") {
  int instances = 0;
  double worst_closed = 0.0, best_shifted = 1e300;
  for (const QParams& qp : {kQ, kQc})
    for (int n = 0; n < 12; ++n) {
      const TwoByTwo A = random_two_by_two(uniform_int(1, 3));
      for (const auto& b : alien_two_by_two(A, qp)) {
        const cplx oracle = alien_oracle_two_by_two(A, b.c, qp);
        const cplx p12 = b.N(0, 0);
        const cplx c7 = alien_two_by_two_at(A, b.c, qp, Numerator::Shifted);
        worst_closed = std::max(worst_closed, rel_err(p12, oracle));
        // The shifted numerator agrees only at m = 0.
        if (std::abs(c7 - p12) > 1e-8 * std::abs(p12)) best_shifted = std::min(best_shifted, rel_err(c7, oracle));
        CHECK(lemma_constraint(b, qp));
      }
      ++instances;
    }
  CHECK(instances >= 20);
  CHECK(worst_closed < 1e-6);
  CHECK(best_shifted > 1e-3);
}

TEST_CASE("general slopes k, b match the oracle") {
  for (int n = 0; n < 10; ++n) {
    TwoByTwo A = random_two_by_two(uniform_int(1, 3));
    A.k = uniform_int(-2, 2);
    A.b = std::polar(uniform(0.5, 2.0), uniform(-kPi, kPi));
    for (const auto& b : alien_two_by_two(A, kQc)) {
      CHECK(rel_err(b.N(0, 0), alien_oracle_two_by_two(A, b.c, kQc)) < 1e-6);
      CHECK(lemma_constraint(b, kQc));
    }
  }
}

TEST_CASE("value depends only on the class of c") {
  for (int n = 0; n < 10; ++n) {
    const TwoByTwo A = random_two_by_two(uniform_int(1, 3));
    for (const auto& b : alien_two_by_two(A, kQ)) {
      const cplx at_c = alien_two_by_two_at(A, b.c, kQ);
      CHECK(rel_err(alien_two_by_two_at(A, kQ.q() * b.c, kQ), at_c) < 1e-9);
      CHECK(rel_err(alien_two_by_two_at(A, b.c / kQ.q(), kQ), at_c) < 1e-9);
    }
  }
}

TEST_CASE("non-resonant points give zero") {
  const TwoByTwo A = random_two_by_two(2);
  CHECK(alien_two_by_two_at(A, cplx(1.1, 0.3), kQ) == 0.0);
  CHECK(alien_general(A.system(), canonicalize(cplx(1.1, 0.3), kQ), kQ).empty());
}

TEST_CASE("alien_general agrees with the two-by-two closed form") {
  for (int n = 0; n < 8; ++n) {
    TwoByTwo A = random_two_by_two(uniform_int(1, 3));
    A.k = uniform_int(-1, 1);
    A.b = cplx(0.8, 0.6);
    for (const auto& b : alien_two_by_two(A, kQc)) {
      const auto g = alien_general(A.system(), b.alpha, kQc);
      REQUIRE(g.size() == 1);
      CHECK(rel_err(g[0].N(0, 0), b.N(0, 0)) < 1e-12);
    }
  }
}

TEST_CASE("general constant pairs: closed form vs direct definition") {
  for (int n = 0; n < 6; ++n) {
    const int ni = uniform_int(1, 2), nj = uniform_int(1, 2), delta = uniform_int(1, 2);
    BlockSystem A;
    A.diag.push_back(DiagBlock::constant(0, random_invertible(ni)));
    A.diag.push_back(DiagBlock::constant(delta, random_invertible(nj)));
    A.upper[{0, 1}] = random_laurent(ni, nj, -1, 1);
    const auto rs = resonance_set(A, kQc);
    REQUIRE(!rs.points.empty());
    for (const auto& p : rs.points) {
      const CMatrix N = alien_matrix(A, p.point, kQc);
      const CMatrix direct = alien_direct(A, p.point.rep, cplx(1.7, 0.9), kQc);
      CHECK(rel(N, direct) < 1e-8);
      for (const auto& b : alien_general(A, p.point, kQc)) CHECK(lemma_constraint(b, kQc));
    }
  }
}

TEST_CASE("Jordan blocks go through the numeric residue") {
  BlockSystem A;
  CMatrix J = 1.3 * jordan_unipotent(2);
  A.diag.push_back(DiagBlock::constant(0, J));
  A.diag.push_back(DiagBlock::constant(1, random_invertible(2)));
  A.upper[{0, 1}] = random_laurent(2, 2, -1, 1);
  for (const auto& p : resonance_set(A, kQc).points) {
    const CMatrix N = alien_matrix(A, p.point, kQc);
    CHECK(rel(N, alien_direct(A, p.point.rep, cplx(1.7, 0.9), kQc)) < 1e-8);
  }
}

TEST_CASE("functoriality under a constant block-diagonal gauge") {
  BlockSystem A;
  A.diag.push_back(DiagBlock::constant(0, random_invertible(2)));
  A.diag.push_back(DiagBlock::constant(2, random_invertible(2)));
  A.upper[{0, 1}] = random_laurent(2, 2, -2, 2);
  const CMatrix P = random_invertible(2), Q = random_invertible(2);
  BlockSystem B;
  B.diag.push_back(DiagBlock::constant(0, CMatrix(P * A.diag[0].A * P.inverse())));
  B.diag.push_back(DiagBlock::constant(2, CMatrix(Q * A.diag[1].A * Q.inverse())));
  B.upper[{0, 1}] = P * A.upper[{0, 1}] * CMatrix(Q.inverse());
  CMatrix Phi = CMatrix::Zero(4, 4);
  Phi.block(0, 0, 2, 2) = P;
  Phi.block(2, 2, 2, 2) = Q;
  for (const auto& p : resonance_set(A, kQ).points)
    CHECK(rel(alien_matrix(B, p.point, kQ), Phi * alien_matrix(A, p.point, kQ) * Phi.inverse()) < 1e-9);
}

TEST_CASE("dilation covariance") {
  for (int delta = 1; delta <= 4; ++delta) {
    TwoByTwo A = random_two_by_two(delta);
    CHECK(alien_dilated(A, 1.0, kQ) < 1e-14);
    CHECK(alien_dilated(A, unit_root(1, delta), kQ) < 1e-8);
    CHECK(alien_dilated(A, kQ.qpow(1.0 / delta), kQ) < 1e-8);
    CHECK(alien_dilated(A, std::polar(uniform(0.7, 1.5), uniform(-kPi, kPi)), kQ) < 1e-8);
    A.k = 1;
    CHECK(alien_dilated(A, cplx(0.9, 0.4), kQc) < 1e-8);
  }
  CHECK_THROWS_AS(alien_dilated(random_two_by_two(1), 0.0, kQ), Error);
}

TEST_CASE("root-of-unity and q_delta shifts of Psi") {
  for (int delta = 1; delta <= 4; ++delta) {
    // a^{-1} canonical: 1 ≤ |a^{-1}| < |q|.
    const cplx a = 1.0 / std::polar(uniform(1.1, 3.5), uniform(-kPi, kPi));
    CHECK(root_of_unity_shift_check(delta, a, kQ) < 1e-8);
    CHECK(q_delta_shift_check(delta, a, kQ) < 1e-8);
    CHECK(root_of_unity_shift_check(delta, a, kQc.with_z0(1.0)) < 1e-8);
  }
  CHECK_THROWS_AS(root_of_unity_shift_check(2, cplx(3.0, 0.0), kQ), Error);
}

TEST_CASE("canonical basis for good q") {
  for (int delta = 1; delta <= 5; ++delta) {
    const cplx a = 1.0 / cplx(1.6, 0.7);
    const auto cb = canonical_basis(delta, a, kQ);
    CHECK(cb.entries.size() == static_cast<size_t>(delta));
    CHECK(cb.vandermonde_residual < 1e-8);
    CHECK(std::isfinite(cb.condition));
    for (const auto& e : cb.entries) CHECK(std::abs(e.theta_factor) > 1e-12);
    const auto cb2 = canonical_basis(delta, cb.beta, kQ);
    CHECK((cb2.M - cb.M).norm() < 1e-12 * cb.M.norm());
  }
}

TEST_CASE("canonical basis is refused for the bad q") {
  const QParams bad = QParams::from_q(find_bad_q().q_star);
  CHECK_THROWS_AS(canonical_basis(3, 1.0 / cplx(2.0, 0.5), bad), Error);
  try {
    canonical_basis(3, 1.0 / cplx(2.0, 0.5), bad);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadQValue);
  }
}

TEST_CASE("pairing is linear with rank delta") {
  for (int delta = 1; delta <= 4; ++delta) {
    const cplx a = cplx(0.3, 0.2);
    const LaurentSeries u = random_series(0, delta - 1), v = random_series(0, delta - 1);
    const CMatrix lhs = pairing(delta, a, u + v, kQ);
    CHECK((lhs - pairing(delta, a, u, kQ) - pairing(delta, a, v, kQ)).norm() < 1e-10 * lhs.norm());
    CHECK(pairing_rank(delta, a, kQ) == delta);
  }
}

TEST_CASE("layer additivity on a three-slope system") {
  BlockSystem A;
  A.diag.push_back(DiagBlock::constant(0, CMatrix::Constant(1, 1, cplx(1.2, 0.4))));
  A.diag.push_back(DiagBlock::constant(1, CMatrix::Constant(1, 1, cplx(-0.7, 0.9))));
  A.diag.push_back(DiagBlock::constant(2, CMatrix::Constant(1, 1, cplx(0.5, -1.1))));
  A.upper[{0, 1}] = random_laurent(1, 1, -1, 1);
  A.upper[{1, 2}] = random_laurent(1, 1, -1, 1);
  A.upper[{0, 2}] = random_laurent(1, 1, -1, 1);
  const auto rs = resonance_set(A, kQc);
  int checked = 0;
  for (const auto& p : rs.points) {
    for (int delta = 1; delta <= 2; ++delta) {
      CHECK(layer_additivity(A, p.point.rep, delta, cplx(1.7, 0.9), kQc) < 1e-8);
      ++checked;
    }
  }
  CHECK(checked > 0);
  CHECK(truncate_levels(A, 1, true).upper.size() == 2);
  CHECK(truncate_levels(A, 2, true).upper.size() == 1);
  CHECK(truncate_levels(A, 2, false).upper.size() == 3);
}

TEST_CASE("E-block reduction is a gauge in base q_r") {
  BlockSystem A;
  A.diag.push_back(DiagBlock::e_sum({EData{2, 1, cplx(1.5, 0.7), 1}}));
  A.diag.push_back(DiagBlock::e_sum({EData{3, 4, cplx(-1.2, 1.9), 2}}));
  A.upper[{0, 1}] = random_laurent(2, 6, -1, 1);
  const auto red = reduce_ramified(A, kQc);
  CHECK(red.r == 6);
  const LaurentMatrix Ar = ramify_matrix(A.matrix(kQc), red.r);
  const auto g = is_gauge_between(red.F, Ar, red.B.matrix(red.qp_r), red.qp_r);
  CHECK(g.residual < 1e-10);
  for (const auto& b : red.B.diag) CHECK(b.kind == BlockKind::Const);
  // Alien blocks of the original satisfy the lemma constraint in base q_r.
  const QParams qpr = kQc.with_r(red.r);
  for (const auto& b : alien_all(A, kQc)) CHECK(lemma_constraint(b, qpr, Base::QR));
}

TEST_CASE("alien derivatives of a system with a random upper block are nilpotent") {
  BlockSystem A;
  A.diag.push_back(DiagBlock::constant(0, random_invertible(2)));
  A.diag.push_back(DiagBlock::constant(1, random_invertible(1)));
  A.diag.push_back(DiagBlock::constant(3, random_invertible(2)));
  A.upper[{0, 1}] = random_laurent(2, 1, -1, 1);
  A.upper[{0, 2}] = random_laurent(2, 2, -1, 1);
  A.upper[{1, 2}] = random_laurent(1, 2, -1, 1);
  const auto off = A.offsets();
  for (const auto& b : alien_all(A, kQ)) {
    const CMatrix M = b.embed(off);
    CHECK(M.norm() > 0.0);
    CHECK((M * M * M).norm() < 1e-12 * std::pow(M.norm(), 3));
    CHECK(b.i < b.j);
  }
}
