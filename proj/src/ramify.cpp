#include "qdx/ramify.hpp"

#include <cmath>

#include "qdx/alien.hpp"
#include "qdx/formal.hpp"

namespace qdx {

namespace {

void require_r(int r) {
  if (r < 1) throw Error(ErrorCode::InvalidInput, "ramification index must be positive");
}

LaurentSeries tau_series(const LaurentSeries& s, int r, int j) {
  if (s.is_zero()) return s;
  std::vector<cplx> f;
  for (int k = s.lo(); k <= s.hi(); ++k) f.push_back(unit_root(static_cast<long>(j) * k, r));
  return s.map_coeffs(f);
}

LaurentSeries project_series(const LaurentSeries& s, int r) {
  std::map<int, cplx> m;
  for (const auto& [k, v] : s.coeffs())
    if (k % r == 0) m[k / r] = v;
  return LaurentSeries::from_map(m, std::max(1, s.cap() / r));
}

}  // namespace

RamifiedSystem ram(const LaurentMatrix& A, int r) {
  require_r(r);
  RamifiedSystem out;
  out.r = r;
  out.A_prime = ramify_matrix(A, r);
  out.offsets = {0, A.rows()};
  out.origin = A;
  return out;
}

RamifiedSystem ram(const BlockSystem& A, int r, const QParams& qp) {
  A.validate();
  RamifiedSystem out = ram(A.matrix(qp), r);
  out.offsets = A.offsets();
  for (const auto& b : A.diag) out.slopes.push_back(b.slope * Rational(r));
  return out;
}

LaurentMatrix tau(const LaurentMatrix& M, int r, int j) {
  require_r(r);
  return M.map([&](const LaurentSeries& s) { return tau_series(s, r, j); });
}

LaurentMatrix mu_r_project(const LaurentMatrix& G, int r) {
  require_r(r);
  return G.map([&](const LaurentSeries& s) { return project_series(s, r); });
}

Descent hilbert90_descend(const RamifiedSystem& B, const LaurentMatrix& G, const QParams& qp) {
  const int r = B.r, n = B.A_prime.rows();
  const QParams qr = qp.base(r);
  const LaurentMatrix I = LaurentMatrix::identity(n);
  const double scale = std::max(1.0, B.A_prime.max_abs());
  if (!is_gauge_between(G, B.A_prime, tau(B.A_prime, r), qr, 1e-8 * scale * std::max(1.0, G.max_abs())).ok)
    throw Error(ErrorCode::InvalidInput, "G is not a gauge B -> tau B");
  Descent d;
  // P_k = τ^{k−1}G ⋯ τG·G, P_0 = I.
  LaurentMatrix P = I, H = I;
  for (int k = 1; k < r; ++k) {
    P = tau(G, r, k - 1) * P;
    H += P;
  }
  d.closure = max_abs_diff(tau(G, r, r - 1) * P, I);
  if (d.closure > 1e-8) throw Error(ErrorCode::CocycleNotClosed, "r-fold product of the twists is not the identity");
  d.H = H * cplx(1.0 / r);
  d.h_relation = max_abs_diff(tau(d.H, r) * G, d.H);
  LaurentMatrix Hinv;
  try {
    Hinv = block_inverse(d.H, B.offsets);
  } catch (const Error&) {
    throw Error(ErrorCode::DescentFailed, "averaged gauge H is not invertible");
  }
  if (max_abs_diff(d.H * Hinv, I) > 1e-9) throw Error(ErrorCode::DescentFailed, "averaged gauge H is not invertible");
  d.C_r = sigma_q(d.H, qr) * B.A_prime * Hinv;
  d.invariance = max_abs_diff(tau(d.C_r, r), d.C_r) / std::max(1.0, d.C_r.max_abs());
  if (d.invariance > 1e-9) throw Error(ErrorCode::DescentFailed, "descended system is not tau-invariant");
  d.C = mu_r_project(d.C_r, r);
  return d;
}

Embedding embed_in_restriction(const RamifiedSystem& A, const QParams& qp) {
  const int r = A.r, n = A.A_prime.rows();
  if (A.A_prime.cols() != n) throw Error(ErrorCode::InvalidInput, "A' must be square");
  Embedding e;
  e.r = r;
  e.D = LaurentMatrix(n * r, n * r);
  // C_ab keeps the z_r-exponents m ≡ a − b (mod r); D_ab = q_r^{-a} z_r^{b−a} C_ab.
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          std::map<int, cplx> m;
          for (const auto& [k, v] : A.A_prime(i, j).coeffs()) {
            const int ex = k - a + b;
            if (((ex % r) + r) % r == 0) m[ex / r] = qp.qpow(-static_cast<double>(a) / r) * v;
          }
          e.D(a * n + i, b * n + j) = LaurentSeries::from_map(m);
        }
  e.inclusion = LaurentMatrix(n * r, n);
  for (int a = 0; a < r; ++a)
    for (int i = 0; i < n; ++i) e.inclusion(a * n + i, i) = LaurentSeries::monomial(1.0, -a);
  if (r == 2) {
    // Diag(I, zI)[D] and the inclusion (I, z_r I).
    std::vector<cplx> c(static_cast<size_t>(2 * n), 1.0);
    std::vector<int> k(static_cast<size_t>(2 * n), 0);
    for (int i = n; i < 2 * n; ++i) k[static_cast<size_t>(i)] = 1;
    const LaurentMatrix Fz = LaurentMatrix::diag_monomials(c, k);
    for (int i = n; i < 2 * n; ++i) k[static_cast<size_t>(i)] = -1;
    const LaurentMatrix Fzi = LaurentMatrix::diag_monomials(c, k);
    e.D = sigma_q(Fz, qp) * e.D * Fzi;
    e.inclusion = ramify_matrix(Fz, 2) * e.inclusion;
  }
  return e;
}

double fiber_functor_check(const RamifiedSystem& A, const QParams& qp) {
  if (!A.origin) throw Error(ErrorCode::InvalidInput, "system has no unramified origin");
  return (A.A_prime.evaluate(qp.z0_root(A.r)) - A.origin->evaluate(qp.z0())).cwiseAbs().maxCoeff();
}

double tau_conjugation_check(const BlockSystem& A, const QParams& qp) {
  const RamifiedReduction red = reduce_ramified(A, qp);
  const LaurentMatrix B = red.B.matrix(red.qp_r);
  const int n = A.dim();
  CMatrix T = CMatrix::Zero(n, n);
  int off = 0;
  for (const auto& blk : A.diag) {
    if (blk.kind == BlockKind::Const) {
      T.block(off, off, blk.size(), blk.size()).setIdentity();
      off += blk.size();
      continue;
    }
    for (const auto& e : blk.parts) {
      const CMatrix Te = matrix_power(T_r(e.r), e.d);
      for (int a = 0; a < e.r; ++a)
        for (int b = 0; b < e.r; ++b)
          T.block(off + a * e.m, off + b * e.m, e.m, e.m) = Te(a, b) * CMatrix::Identity(e.m, e.m);
      off += e.size();
    }
  }
  return max_abs_diff(tau(B, red.r), T * B * CMatrix(T.inverse())) / std::max(1.0, B.max_abs());
}

}  // namespace qdx
