#include "doctest.h"
#include "helpers.hpp"
#include "qdx/qdmod.hpp"

using namespace qdx;
using namespace qdx::test;

namespace {

CMatrix random_invertible(int n) {
  CMatrix m = CMatrix::Random(n, n);
  m += 2.0 * CMatrix::Identity(n, n);
  return m;
}

LaurentMatrix random_laurent(int rows, int cols, int lo, int hi) {
  LaurentMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = random_series(lo, hi);
  return m;
}

BlockSystem random_system(const std::vector<int>& mus, const std::vector<int>& sizes, int spread = 2) {
  BlockSystem A;
  for (size_t i = 0; i < mus.size(); ++i) A.diag.push_back(DiagBlock::constant(mus[i], random_invertible(sizes[i])));
  for (size_t i = 0; i < mus.size(); ++i)
    for (size_t j = i + 1; j < mus.size(); ++j)
      A.upper[{static_cast<int>(i), static_cast<int>(j)}] = random_laurent(sizes[i], sizes[j], -spread, spread);
  return A;
}

LaurentMatrix random_unipotent(const BlockSystem& shape) {
  const auto off = shape.offsets();
  LaurentMatrix F = LaurentMatrix::identity(shape.dim());
  for (int i = 0; i < shape.blocks(); ++i)
    for (int j = i + 1; j < shape.blocks(); ++j)
      F.set_block(off[i], off[j], random_laurent(shape.diag[i].size(), shape.diag[j].size(), -1, 1));
  return F;
}

}  // namespace

TEST_CASE("rationals") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(3, -6) == Rational(-1, 2));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
  CHECK(Rational(-4, 2).is_integer());
  CHECK(Rational(5, 3).str() == "5/3");
}

TEST_CASE("gauge action basics") {
  const QParams qp = QParams::from_q(cplx(3.0, 1.0));
  const BlockSystem A = random_system({0, 1, 3}, {1, 2, 1});
  const auto off = A.offsets();
  const LaurentMatrix M = A.matrix(qp);
  CHECK(max_abs_diff(gauge(LaurentMatrix::identity(A.dim()), M, qp, off), M) == 0.0);
  const LaurentMatrix F = random_unipotent(A), G = random_unipotent(A);
  const LaurentMatrix lhs = gauge(F * G, M, qp, off);
  const LaurentMatrix rhs = gauge(F, gauge(G, M, qp, off), qp, off);
  CHECK(max_abs_diff(lhs, rhs) < 1e-10 * std::max(1.0, lhs.max_abs()));
  const LaurentMatrix Fi = block_inverse(F, off);
  CHECK(max_abs_diff(F * Fi, LaurentMatrix::identity(A.dim())) < 1e-12);
  const LaurentMatrix back = gauge(F, gauge(Fi, M, qp, off), qp, off);
  CHECK(max_abs_diff(back, M) < 1e-10 * std::max(1.0, M.max_abs()));
  // Block-system form keeps the diagonal.
  const BlockSystem B = gauge(F, A, qp);
  CHECK(max_abs_diff(B.matrix(qp), gauge(F, M, qp, off)) < 1e-12 * std::max(1.0, B.matrix(qp).max_abs()));
  CHECK(is_gauge_between(F, M, B.matrix(qp), qp, 1e-9).ok);
}

TEST_CASE("block inverse with graded diagonal") {
  // Diagonal blocks C·Diag(z^k) (as for the G conjugators).
  LaurentMatrix F(3, 3);
  F(0, 0) = LaurentSeries::monomial(2.0, 1);
  F(1, 1) = LaurentSeries::monomial(1.0, -2);
  F(2, 1) = LaurentSeries::monomial(3.0, -2);
  F(2, 2) = LaurentSeries::monomial(cplx(0.0, 1.0), 0);
  F(0, 1) = random_series(-1, 2);
  F(0, 2) = random_series(0, 1);
  const LaurentMatrix Fi = block_inverse(F, {0, 1, 3});
  CHECK(max_abs_diff(F * Fi, LaurentMatrix::identity(3)) < 1e-12);
  CHECK(max_abs_diff(Fi * F, LaurentMatrix::identity(3)) < 1e-12);
  LaurentMatrix S = LaurentMatrix::identity(2);
  S(0, 0) = LaurentSeries::from_map({{0, 1.0}, {1, 1.0}});
  CHECK_THROWS_AS(block_inverse(S, {0, 1, 2}), Error);
}

TEST_CASE("is_gauge_between") {
  const QParams qp = QParams::from_q(4.0);
  const BlockSystem A = random_system({0, 2}, {2, 1});
  const LaurentMatrix M = A.matrix(qp);
  const auto g = is_gauge_between(LaurentMatrix::identity(3), M, M, qp);
  CHECK(g.ok);
  CHECK(g.residual == 0.0);
  const NormalForm nf = bg_normalize(A, qp);
  CHECK(is_gauge_between(nf.F, M, nf.normal.matrix(qp), qp, 1e-10).ok);
  LaurentMatrix P = nf.F;
  P(0, 2) += LaurentSeries::monomial(1e-3, 1);
  CHECK_FALSE(is_gauge_between(P, M, nf.normal.matrix(qp), qp, 1e-10).ok);
}

TEST_CASE("scalar Newton polygon") {
  for (int mu = -3; mu <= 3; ++mu) {
    const NewtonData n = newton_polygon_scalar({{0, mu}, {1, 0}});
    REQUIRE(n.slopes.size() == 1);
    CHECK(n.slopes[0] == Rational(mu));
    CHECK(n.mults[0] == 1);
  }
  const NewtonData n2 = newton_polygon_scalar({{0, -1}, {1, -1}, {2, 0}});
  CHECK(n2.slopes == std::vector<Rational>{Rational(-1), Rational(0)});
  CHECK(n2.mults == std::vector<int>{1, 1});
  const NewtonData flat = newton_polygon_scalar({{0, 0}, {1, 0}, {2, 0}, {3, 0}});
  CHECK(flat.slopes == std::vector<Rational>{Rational(0)});
  CHECK(flat.mults == std::vector<int>{3});
  // Fractional slope: σ² − z (points (0,1), (2,0)) has slope 1/2 with multiplicity 2.
  const NewtonData half = newton_polygon_scalar({{0, 1}, {2, 0}});
  CHECK(half.slopes == std::vector<Rational>{Rational(1, 2)});
  CHECK(half.mults == std::vector<int>{2});
  CHECK_NOTHROW(half.validate());
  // Interior point above the hull is ignored.
  const NewtonData n3 = newton_polygon_scalar({{0, 0}, {1, 5}, {2, 0}});
  CHECK(n3.mults == std::vector<int>{2});
  CHECK_THROWS_AS(newton_polygon_scalar({{1, 0}, {2, 0}}), Error);
  CHECK_THROWS_AS(newton_polygon_scalar({{0, 0}}), Error);
}

TEST_CASE("Newton data of block systems") {
  BlockSystem A;
  A.diag.push_back(DiagBlock::constant(0, CMatrix::Constant(1, 1, 2.0)));
  A.diag.push_back(DiagBlock::constant(1, CMatrix::Constant(1, 1, 3.0)));
  const NewtonData n = newton_of_block(A);
  CHECK(n.slopes == std::vector<Rational>{Rational(0), Rational(1)});
  CHECK(n.mults == std::vector<int>{1, 1});
  // Tensor rule against the slopes of the explicit Kronecker product of two diagonal systems.
  const NewtonData t = newton_tensor(n, n);
  CHECK(t.slopes == std::vector<Rational>{Rational(0), Rational(1), Rational(2)});
  CHECK(t.mults == std::vector<int>{1, 2, 1});
  NewtonData b;
  b.slopes = {Rational(-1, 2), Rational(1)};
  b.mults = {2, 1};
  const NewtonData tb = newton_tensor(n, b);
  CHECK(tb.dim() == n.dim() * b.dim());
  CHECK(tb.slopes == std::vector<Rational>{Rational(-1, 2), Rational(1, 2), Rational(1), Rational(2)});
  CHECK(tb.mults == std::vector<int>{2, 2, 1, 1});
  const NewtonData ext = newton_extension(n, b);
  CHECK(ext.dim() == n.dim() + b.dim());
  CHECK(ext.mults == std::vector<int>{2, 1, 2});
  const NewtonData ram = newton_ramify(b, 2);
  CHECK(ram.slopes == std::vector<Rational>{Rational(-1), Rational(2)});
  CHECK(ram.mults == b.mults);
  NewtonData bad;
  bad.slopes = {Rational(1, 2)};
  bad.mults = {1};
  CHECK_THROWS_AS(bad.validate(), Error);
  // E blocks carry slope d/r.
  BlockSystem E;
  E.diag.push_back(DiagBlock::e_sum({EData{2, 1, 1.5, 1}, EData{2, 1, 2.0, 2}}));
  CHECK(E.newton().slopes == std::vector<Rational>{Rational(1, 2)});
  CHECK(E.newton().mults == std::vector<int>{6});
}

TEST_CASE("graded objects") {
  const QParams qp = QParams::from_q(4.0);
  const BlockSystem A = random_system({0, 1, 2}, {1, 1, 2});
  const BlockSystem g = graded(A);
  CHECK(g.upper.empty());
  CHECK(graded(g).matrix(qp) == g.matrix(qp));
  const auto off = A.offsets();
  for (int i = 0; i < 3; ++i) {
    const int s = A.diag[i].size();
    CHECK(g.matrix(qp).block(off[i], off[i], s, s) == A.matrix(qp).block(off[i], off[i], s, s));
  }
  const LaurentMatrix F = random_laurent(3, 4, -1, 1);
  const LaurentMatrix gF = graded_morphism(F, {Rational(0), Rational(1)}, {1, 2}, {Rational(1), Rational(0), Rational(2)}, {1, 2, 1});
  CHECK(gF.block(0, 1, 1, 2) == F.block(0, 1, 1, 2));
  CHECK(gF.block(1, 0, 2, 1) == F.block(1, 0, 2, 1));
  CHECK(gF.block(0, 0, 1, 1).is_zero());
  CHECK(gF.block(0, 3, 3, 1).is_zero());
  CHECK(gF.block(1, 1, 2, 2).is_zero());
}

TEST_CASE("Birkhoff-Guenther normalization") {
  const QParams qp = QParams::from_q(cplx(2.5, 1.0));
  SUBCASE("one-layer example") {
    BlockSystem A;
    A.diag.push_back(DiagBlock::constant(0, CMatrix::Constant(1, 1, 2.0)));
    A.diag.push_back(DiagBlock::constant(1, CMatrix::Constant(1, 1, 3.0)));
    LaurentMatrix U(1, 1);
    U(0, 0) = LaurentSeries::monomial(1.0, 2);
    A.upper[{0, 1}] = U;
    const NormalForm nf = bg_normalize(A, qp);
    const LaurentSeries& v = nf.normal.upper.at({0, 1})(0, 0);
    CHECK(v.lo() == 0);
    CHECK(v.hi() == 0);
    // Hand solution: f₁ = −1/(3q), f₀ = 2f₁/3, V₀ = −2f₀.
    const cplx f1 = -1.0 / (3.0 * qp.q()), f0 = 2.0 * f1 / 3.0;
    CHECK(std::abs(v.coeff(0) + 2.0 * f0) < 1e-14);
    CHECK(std::abs(nf.F(0, 1).coeff(1) - f1) < 1e-14);
    CHECK(is_gauge_between(nf.F, A.matrix(qp), nf.normal.matrix(qp), qp, 1e-10).ok);
  }
  SUBCASE("random shapes: windows, certificate, idempotence and dimension") {
    const std::vector<std::vector<int>> shapes_mu = {{0, 1}, {-1, 2}, {0, 1, 3}, {0, 2, 3, 5}, {1, 1, 2}};
    const std::vector<std::vector<int>> shapes_r = {{2, 1}, {1, 2}, {1, 2, 1}, {1, 1, 2, 1}, {1, 1, 2}};
    for (size_t s = 0; s < shapes_mu.size(); ++s) {
      const BlockSystem A = random_system(shapes_mu[s], shapes_r[s], 3);
      const NormalForm nf = bg_normalize(A, qp);
      CHECK(in_normal_form(nf.normal));
      CHECK(is_member_of_G_A0(nf.F, A.offsets()));
      const auto chk = is_gauge_between(nf.F, A.matrix(qp), nf.normal.matrix(qp), qp, 1e-10);
      CHECK(chk.ok);
      const NormalForm again = bg_normalize(nf.normal, qp);
      CHECK(max_abs_diff(again.F, LaurentMatrix::identity(A.dim())) < 1e-12);
      CHECK(max_abs_diff(again.normal.matrix(qp), nf.normal.matrix(qp)) < 1e-12);
      // Generic data fill every coordinate slot of the normal form.
      long slots = 0;
      for (const auto& [ij, V] : nf.normal.upper) {
        if (A.diag[ij.first].slope == A.diag[ij.second].slope) continue;
        for (int i = 0; i < V.rows(); ++i)
          for (int j = 0; j < V.cols(); ++j) slots += static_cast<long>(V(i, j).coeffs().size());
      }
      NewtonData strict;
      for (const auto& b : A.diag) {
        strict.slopes.push_back(b.slope);
        strict.mults.push_back(b.size());
      }
      // Equal slopes contribute no coordinates.
      long expected = 0;
      for (size_t i = 0; i < strict.slopes.size(); ++i)
        for (size_t j = i + 1; j < strict.slopes.size(); ++j)
          expected += static_cast<long>(strict.mults[i]) * strict.mults[j] * (strict.slopes[j] - strict.slopes[i]).num;
      CHECK(slots == expected);
      CHECK(normal_form_dimension(A.newton()) == expected);
    }
  }
  SUBCASE("already normal input") {
    BlockSystem A = random_system({0, 2}, {1, 1}, 0);
    A.upper[{0, 1}](0, 0) = LaurentSeries::from_map({{0, 1.0}, {1, 2.0}});
    CHECK(in_normal_form(A));
    const NormalForm nf = bg_normalize(A, qp);
    CHECK(max_abs_diff(nf.F, LaurentMatrix::identity(2)) == 0.0);
    CHECK(nf.normal.matrix(qp) == A.matrix(qp));
  }
  SUBCASE("unsupported diagonal blocks") {
    BlockSystem A;
    A.diag.push_back(DiagBlock::e_sum({EData{2, 1, 1.5, 1}}));
    CHECK_THROWS_AS(bg_normalize(A, qp), Error);
  }
}

TEST_CASE("q-Gevrey filtration") {
  const BlockSystem shape = random_system({0, 1, 3}, {1, 1, 1});
  const LaurentMatrix F = random_unipotent(shape);
  CHECK(gevrey_truncate(F, shape, Rational(1), GevreyMode::Geq) == F);
  CHECK(gevrey_levels(F, shape) == std::vector<Rational>{Rational(1), Rational(2), Rational(3)});
  for (int d = 1; d <= 3; ++d) {
    const LaurentMatrix geq = gevrey_truncate(F, shape, Rational(d), GevreyMode::Geq);
    const LaurentMatrix gt = gevrey_truncate(F, shape, Rational(d), GevreyMode::Gt);
    const LaurentMatrix layer = gevrey_truncate(F, shape, Rational(d), GevreyMode::Layer);
    CHECK(max_abs_diff(geq, gt + layer - LaurentMatrix::identity(3)) == 0.0);
  }
  // Product of elements of levels ≥ 1 lies in level ≥ 2 (nilpotent parts multiply).
  const LaurentMatrix I = LaurentMatrix::identity(3);
  const LaurentMatrix X = gevrey_truncate(F, shape, Rational(1), GevreyMode::Geq) - I;
  const LaurentMatrix Y = gevrey_truncate(random_unipotent(shape), shape, Rational(1), GevreyMode::Geq) - I;
  for (const Rational& l : gevrey_levels(X * Y + I, shape)) CHECK(Rational(2) <= l);
  const LaurentMatrix Z = gevrey_truncate(random_unipotent(shape), shape, Rational(2), GevreyMode::Geq) - I;
  for (const Rational& l : gevrey_levels(X * Z + I, shape)) CHECK(Rational(3) <= l);
}

TEST_CASE("nilpotent log and exp") {
  const BlockSystem shape = random_system({0, 1, 2, 4}, {1, 2, 1, 1});
  const LaurentMatrix F = random_unipotent(shape);
  const LaurentMatrix L = nilpotent_log(F);
  CHECK(max_abs_diff(nilpotent_exp(L), F) < 1e-12 * std::max(1.0, F.max_abs()));
  // Nilpotency degree is bounded by the number of slope levels.
  const LaurentMatrix X = F - LaurentMatrix::identity(F.rows());
  CHECK((X * X * X * X).is_zero());
  CMatrix N = CMatrix::Zero(4, 4);
  N.triangularView<Eigen::StrictlyUpper>() = CMatrix::Random(4, 4);
  const CMatrix U = CMatrix::Identity(4, 4) + N;
  CHECK((nilpotent_exp(nilpotent_log(U)) - U).norm() < 1e-12);
}
