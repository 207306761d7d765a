#include "qdx/qdmod.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace qdx {

// ---------------------------------------------------------------- rationals

Rational::Rational(long n, long d) {
  if (d == 0) throw Error(ErrorCode::InvalidInput, "zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const long g = std::gcd(n < 0 ? -n : n, d);
  num = g ? n / g : 0;
  den = g ? d / g : 1;
}

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational operator+(Rational a, Rational b) { return Rational(a.num * b.den + b.num * a.den, a.den * b.den); }
Rational operator-(Rational a, Rational b) { return Rational(a.num * b.den - b.num * a.den, a.den * b.den); }
Rational operator*(Rational a, Rational b) { return Rational(a.num * b.num, a.den * b.den); }

// ---------------------------------------------------------------- Newton data

int NewtonData::dim() const { return std::accumulate(mults.begin(), mults.end(), 0); }

void NewtonData::validate() const {
  if (slopes.size() != mults.size()) throw Error(ErrorCode::InvalidInput, "slopes/mults size mismatch");
  for (size_t i = 0; i < slopes.size(); ++i) {
    if (mults[i] <= 0) throw Error(ErrorCode::InvalidInput, "multiplicities must be positive");
    if ((Rational(mults[i]) * slopes[i]).den != 1)
      throw Error(ErrorCode::InvalidInput, "r_i μ_i must be integral");
    if (i > 0 && !(slopes[i - 1] < slopes[i])) throw Error(ErrorCode::InvalidInput, "slopes must increase");
  }
}

namespace {

NewtonData from_counts(const std::map<std::pair<long, long>, int>& counts) {
  NewtonData out;
  for (const auto& [s, m] : counts) {
    if (m == 0) continue;
    out.slopes.emplace_back(s.first, s.second);
    out.mults.push_back(m);
  }
  return out;
}

std::pair<long, long> key(Rational r) { return {r.num, r.den}; }

// Map keyed by (num, den) is not ordered by value; sort after collecting.
NewtonData sorted(NewtonData n) {
  std::vector<size_t> idx(n.slopes.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return n.slopes[a] < n.slopes[b]; });
  NewtonData out;
  for (size_t i : idx) {
    out.slopes.push_back(n.slopes[i]);
    out.mults.push_back(n.mults[i]);
  }
  return out;
}

}  // namespace

NewtonData newton_tensor(const NewtonData& a, const NewtonData& b) {
  std::map<std::pair<long, long>, int> counts;
  for (size_t i = 0; i < a.slopes.size(); ++i)
    for (size_t j = 0; j < b.slopes.size(); ++j) counts[key(a.slopes[i] + b.slopes[j])] += a.mults[i] * b.mults[j];
  return sorted(from_counts(counts));
}

NewtonData newton_extension(const NewtonData& sub, const NewtonData& quot) {
  std::map<std::pair<long, long>, int> counts;
  for (size_t i = 0; i < sub.slopes.size(); ++i) counts[key(sub.slopes[i])] += sub.mults[i];
  for (size_t i = 0; i < quot.slopes.size(); ++i) counts[key(quot.slopes[i])] += quot.mults[i];
  return sorted(from_counts(counts));
}

NewtonData newton_ramify(const NewtonData& n, int r) {
  NewtonData out = n;
  for (auto& s : out.slopes) s = s * Rational(r);
  return out;
}

// ---------------------------------------------------------------- blocks

CMatrix jordan_unipotent(int m) {
  CMatrix u = CMatrix::Identity(m, m);
  for (int i = 0; i + 1 < m; ++i) u(i, i + 1) = 1.0;
  return u;
}

LaurentMatrix e_matrix(const EData& e, const QParams& qp) {
  if (e.r < 1 || e.m < 1) throw Error(ErrorCode::InvalidInput, "E(r,d,c) needs r, m ≥ 1");
  if (std::gcd(e.r, std::abs(e.d)) != 1) throw Error(ErrorCode::InvalidInput, "E(r,d,c) needs gcd(d, r) = 1");
  LaurentMatrix E(e.r, e.r);
  for (int i = 0; i + 1 < e.r; ++i) E(i, i + 1) = LaurentSeries::constant(1.0);
  E(e.r - 1, 0) = LaurentSeries::monomial(qp.qpow(0.5 * e.d * (e.r - 1)) * e.c, e.d);
  return e.m == 1 ? E : kron(E, jordan_unipotent(e.m));
}

DiagBlock DiagBlock::constant(int mu, const CMatrix& A) {
  DiagBlock b;
  b.kind = BlockKind::Const;
  b.slope = Rational(mu);
  b.A = A;
  return b;
}

DiagBlock DiagBlock::e_sum(const std::vector<EData>& parts) {
  if (parts.empty()) throw Error(ErrorCode::InvalidInput, "empty E block");
  DiagBlock b;
  b.kind = BlockKind::E;
  b.slope = parts.front().slope();
  for (const auto& p : parts)
    if (!(p.slope() == b.slope)) throw Error(ErrorCode::InvalidInput, "E parts of one block must share the slope");
  b.parts = parts;
  return b;
}

DiagBlock DiagBlock::laurent(Rational slope, const LaurentMatrix& M) {
  DiagBlock b;
  b.kind = BlockKind::Laurent;
  b.slope = slope;
  b.M = M;
  return b;
}

int DiagBlock::size() const {
  switch (kind) {
    case BlockKind::Const:
      return static_cast<int>(A.rows());
    case BlockKind::E: {
      int n = 0;
      for (const auto& p : parts) n += p.size();
      return n;
    }
    case BlockKind::Laurent:
      return M.rows();
  }
  return 0;
}

LaurentMatrix DiagBlock::matrix(const QParams& qp) const {
  switch (kind) {
    case BlockKind::Const:
      return LaurentMatrix::monomial(A, static_cast<int>(slope.num));
    case BlockKind::E: {
      LaurentMatrix out(size(), size());
      int off = 0;
      for (const auto& p : parts) {
        out.set_block(off, off, e_matrix(p, qp));
        off += p.size();
      }
      return out;
    }
    case BlockKind::Laurent:
      return M;
  }
  return {};
}

int BlockSystem::dim() const { return offsets().back(); }

std::vector<int> BlockSystem::offsets() const {
  std::vector<int> off{0};
  for (const auto& b : diag) off.push_back(off.back() + b.size());
  return off;
}

NewtonData BlockSystem::newton() const {
  NewtonData n;
  for (const auto& b : diag) {
    if (!n.slopes.empty() && n.slopes.back() == b.slope) {
      n.mults.back() += b.size();
    } else {
      n.slopes.push_back(b.slope);
      n.mults.push_back(b.size());
    }
  }
  return n;
}

LaurentMatrix BlockSystem::upper_or_zero(int i, int j) const {
  auto it = upper.find({i, j});
  if (it != upper.end()) return it->second;
  return LaurentMatrix(diag[static_cast<size_t>(i)].size(), diag[static_cast<size_t>(j)].size());
}

LaurentMatrix BlockSystem::matrix(const QParams& qp) const {
  const auto off = offsets();
  LaurentMatrix out(off.back(), off.back());
  for (int i = 0; i < blocks(); ++i) out.set_block(off[static_cast<size_t>(i)], off[static_cast<size_t>(i)], diag[static_cast<size_t>(i)].matrix(qp));
  for (const auto& [ij, U] : upper) out.set_block(off[static_cast<size_t>(ij.first)], off[static_cast<size_t>(ij.second)], U);
  return out;
}

void BlockSystem::validate() const {
  if (diag.empty()) throw Error(ErrorCode::InvalidInput, "system without blocks");
  for (size_t i = 0; i < diag.size(); ++i) {
    const auto& b = diag[i];
    if (b.size() == 0) throw Error(ErrorCode::InvalidInput, "empty diagonal block");
    if (i > 0 && diag[i].slope < diag[i - 1].slope) throw Error(ErrorCode::InvalidInput, "slopes must be non-decreasing");
    if (b.kind == BlockKind::Const) {
      if (b.A.rows() != b.A.cols()) throw Error(ErrorCode::InvalidInput, "constant block must be square");
      if (!b.slope.is_integer()) throw Error(ErrorCode::InvalidInput, "constant block needs an integral slope");
      if (std::abs(b.A.determinant()) < 1e-12) throw Error(ErrorCode::InvalidInput, "constant block is singular");
    }
    if (b.kind == BlockKind::Laurent && b.M.rows() != b.M.cols())
      throw Error(ErrorCode::InvalidInput, "Laurent block must be square");
  }
  for (const auto& [ij, U] : upper) {
    const auto [i, j] = ij;
    if (!(0 <= i && i < j && j < blocks())) throw Error(ErrorCode::InvalidInput, "upper block index out of range");
    if (U.rows() != diag[static_cast<size_t>(i)].size() || U.cols() != diag[static_cast<size_t>(j)].size())
      throw Error(ErrorCode::InvalidInput, "upper block shape mismatch");
  }
}

// ---------------------------------------------------------------- gauge

namespace {

// Diagonal block with one exponent per column: D = C·Diag(z^{k_j}).
LaurentMatrix invert_column_monomial(const LaurentMatrix& D) {
  const int n = D.rows();
  std::vector<int> k(static_cast<size_t>(n), 0);
  CMatrix C = CMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    bool seen = false;
    for (int i = 0; i < n; ++i) {
      const auto& s = D(i, j);
      if (s.is_zero()) continue;
      if (s.lo() != s.hi() || (seen && s.lo() != k[static_cast<size_t>(j)]))
        throw Error(ErrorCode::SingularGauge, "diagonal block is not column-monomial");
      k[static_cast<size_t>(j)] = s.lo();
      C(i, j) = s.coeff(s.lo());
      seen = true;
    }
    if (!seen) throw Error(ErrorCode::SingularGauge, "zero column in diagonal block");
  }
  Eigen::FullPivLU<CMatrix> lu(C);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularGauge, "singular constant part of diagonal block");
  const CMatrix Ci = lu.inverse();
  LaurentMatrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (Ci(i, j) != 0.0) out(i, j) = LaurentSeries::monomial(Ci(i, j), -k[static_cast<size_t>(i)]);
  return out;
}

}  // namespace

LaurentMatrix block_inverse(const LaurentMatrix& F, const std::vector<int>& offsets) {
  const int n = F.rows();
  if (F.cols() != n || offsets.empty() || offsets.back() != n)
    throw Error(ErrorCode::InvalidInput, "block_inverse shape mismatch");
  const int k = static_cast<int>(offsets.size()) - 1;
  LaurentMatrix Dinv(n, n), N(n, n);
  for (int b = 0; b < k; ++b) {
    const int o = offsets[static_cast<size_t>(b)], s = offsets[static_cast<size_t>(b) + 1] - o;
    Dinv.set_block(o, o, invert_column_monomial(F.block(o, o, s, s)));
  }
  for (int bi = 0; bi < k; ++bi)
    for (int bj = 0; bj < k; ++bj) {
      const int oi = offsets[static_cast<size_t>(bi)], si = offsets[static_cast<size_t>(bi) + 1] - oi;
      const int oj = offsets[static_cast<size_t>(bj)], sj = offsets[static_cast<size_t>(bj) + 1] - oj;
      const LaurentMatrix blk = F.block(oi, oj, si, sj);
      if (bi > bj && !blk.is_zero()) throw Error(ErrorCode::SingularGauge, "gauge is not block upper triangular");
      if (bi < bj) N.set_block(oi, oj, blk);
    }
  // F = D(I + D^{-1}N) and D^{-1}N is block-strictly-upper, so the Neumann series stops.
  const LaurentMatrix X = Dinv * N;
  LaurentMatrix term = LaurentMatrix::identity(n), sum = LaurentMatrix::identity(n);
  for (int p = 1; p < k; ++p) {
    term = term * X * cplx(-1.0);
    if (term.is_zero()) break;
    sum += term;
  }
  return sum * Dinv;
}

LaurentMatrix gauge(const LaurentMatrix& F, const LaurentMatrix& A, const QParams& qp,
                    const std::vector<int>& offsets) {
  return sigma_q(F, qp) * A * block_inverse(F, offsets);
}

BlockSystem gauge(const LaurentMatrix& F, const BlockSystem& A, const QParams& qp) {
  const auto off = A.offsets();
  if (!is_member_of_G_A0(F, off)) throw Error(ErrorCode::SingularGauge, "gauge is not in the unipotent group of A0");
  const LaurentMatrix B = gauge(F, A.matrix(qp), qp, off);
  BlockSystem out;
  out.diag = A.diag;
  for (int i = 0; i < A.blocks(); ++i)
    for (int j = i + 1; j < A.blocks(); ++j) {
      LaurentMatrix U = B.block(off[static_cast<size_t>(i)], off[static_cast<size_t>(j)], A.diag[static_cast<size_t>(i)].size(), A.diag[static_cast<size_t>(j)].size());
      if (!U.is_zero()) out.upper[{i, j}] = std::move(U);
    }
  return out;
}

GaugeCheck is_gauge_between(const LaurentMatrix& F, const LaurentMatrix& A, const LaurentMatrix& B,
                            const QParams& qp, double tol) {
  GaugeCheck g;
  g.residual = (sigma_q(F, qp) * A - B * F).max_abs();
  g.ok = g.residual < tol;
  return g;
}

bool is_member_of_G_A0(const LaurentMatrix& F, const std::vector<int>& offsets, double tol) {
  const int k = static_cast<int>(offsets.size()) - 1;
  if (F.rows() != offsets.back() || F.cols() != offsets.back()) return false;
  const LaurentMatrix I = LaurentMatrix::identity(F.rows());
  for (int bi = 0; bi < k; ++bi)
    for (int bj = 0; bj <= bi; ++bj) {
      const int oi = offsets[static_cast<size_t>(bi)], si = offsets[static_cast<size_t>(bi) + 1] - oi;
      const int oj = offsets[static_cast<size_t>(bj)], sj = offsets[static_cast<size_t>(bj) + 1] - oj;
      const LaurentMatrix d = F.block(oi, oj, si, sj) - I.block(oi, oj, si, sj);
      if (d.max_abs() > tol) return false;
    }
  return true;
}

// ---------------------------------------------------------------- Newton polygon

NewtonData newton_polygon_scalar(const std::vector<std::pair<int, int>>& pts_in) {
  std::map<int, int> best;  // k → smallest valuation
  for (const auto& [k, v] : pts_in) {
    auto it = best.find(k);
    if (it == best.end() || v < it->second) best[k] = v;
  }
  if (best.size() < 2 || best.begin()->first != 0)
    throw Error(ErrorCode::EmptyOperator, "operator needs a₀ ≠ 0 and order ≥ 1");
  std::vector<std::pair<int, int>> pts(best.begin(), best.end());
  // Lower convex hull (monotone chain).
  std::vector<std::pair<int, int>> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const long cross = static_cast<long>(b.first - a.first) * (p.second - a.second) -
                         static_cast<long>(b.second - a.second) * (p.first - a.first);
      if (cross <= 0) hull.pop_back();
      else break;
    }
    hull.push_back(p);
  }
  NewtonData out;
  for (size_t i = 0; i + 1 < hull.size(); ++i) {
    const int dk = hull[i + 1].first - hull[i].first;
    const int dv = hull[i + 1].second - hull[i].second;
    out.slopes.emplace_back(-dv, dk);
    out.mults.push_back(dk);
  }
  return sorted(out);
}

// ---------------------------------------------------------------- graded objects

BlockSystem graded(const BlockSystem& A) {
  BlockSystem out;
  out.diag = A.diag;
  return out;
}

LaurentMatrix graded_morphism(const LaurentMatrix& F, const std::vector<Rational>& row_slopes,
                              const std::vector<int>& row_sizes, const std::vector<Rational>& col_slopes,
                              const std::vector<int>& col_sizes) {
  LaurentMatrix out(F.rows(), F.cols());
  int oi = 0;
  for (size_t i = 0; i < row_slopes.size(); ++i) {
    int oj = 0;
    for (size_t j = 0; j < col_slopes.size(); ++j) {
      if (row_slopes[i] == col_slopes[j]) out.set_block(oi, oj, F.block(oi, oj, row_sizes[i], col_sizes[j]));
      oj += col_sizes[j];
    }
    oi += row_sizes[i];
  }
  return out;
}

// ---------------------------------------------------------------- Birkhoff-Guenther

namespace {

// Solve (σ_q f) z^{μj} Aj − z^{μi} Ai f − V = R for f (Laurent polynomial) and
// V supported on [μi, μj). Square system in coefficient space.
std::pair<LaurentMatrix, LaurentMatrix> solve_block(const CMatrix& Ai, int mui, const CMatrix& Aj, int muj,
                                                    const LaurentMatrix& R, const QParams& qp, int bi, int bj) {
  const int ri = static_cast<int>(Ai.rows()), rj = static_cast<int>(Aj.rows());
  const int delta = muj - mui;
  LaurentMatrix f(ri, rj), V(ri, rj);
  const bool rzero = R.is_zero();
  if (rzero) return {f, V};
  const int a = R.min_exp(), b = R.max_exp();
  const int L = std::min(0, a - mui), H = std::max(-1, b - muj);
  const int nf = H - L + 1, blk = ri * rj;
  const int n_unknown = (nf + delta) * blk;
  const int nlo = L + mui, nhi = H + muj;
  if (nhi - nlo + 1 != nf + delta) throw Error(ErrorCode::ResonantNormalization, "non-square normalization system");
  CMatrix M = CMatrix::Zero(n_unknown, n_unknown);
  CVector rhs = CVector::Zero(n_unknown);
  const CMatrix Ii = CMatrix::Identity(ri, ri), Ij = CMatrix::Identity(rj, rj);
  // vec(X Aj) = (Ajᵀ ⊗ I) vec X, vec(Ai X) = (I ⊗ Ai) vec X, column-major vec.
  CMatrix right(blk, blk), left(blk, blk);
  for (int p = 0; p < rj; ++p)
    for (int s = 0; s < rj; ++s) right.block(p * ri, s * ri, ri, ri) = Aj(s, p) * Ii;
  left.setZero();
  for (int p = 0; p < rj; ++p) left.block(p * ri, p * ri, ri, ri) = Ai;
  auto fcol = [&](int m) { return (m - L) * blk; };
  auto vcol = [&](int n) { return (nf + n - mui) * blk; };
  for (int n = nlo; n <= nhi; ++n) {
    const int row = (n - nlo) * blk;
    const int m1 = n - muj;  // q^{m1} f_{m1} Aj
    if (m1 >= L && m1 <= H) M.block(row, fcol(m1), blk, blk) += qp.qpow(m1) * right;
    const int m2 = n - mui;  // −Ai f_{m2}
    if (m2 >= L && m2 <= H) M.block(row, fcol(m2), blk, blk) -= left;
    if (n >= mui && n < muj) M.block(row, vcol(n), blk, blk) -= CMatrix::Identity(blk, blk);
    const CMatrix Rn = R.coeff(n);
    for (int p = 0; p < rj; ++p)
      for (int s = 0; s < ri; ++s) rhs(row + p * ri + s) = Rn(s, p);
  }
  Eigen::FullPivLU<CMatrix> lu(M);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::ResonantNormalization,
                "singular layer system for block (" + std::to_string(bi) + "," + std::to_string(bj) +
                    "), rank " + std::to_string(lu.rank()) + " of " + std::to_string(n_unknown));
  }
  const CVector x = lu.solve(rhs);
  std::vector<std::map<int, cplx>> fm(static_cast<size_t>(blk)), vm(static_cast<size_t>(blk));
  for (int m = L; m <= H; ++m)
    for (int e = 0; e < blk; ++e) fm[static_cast<size_t>(e)][m] = x(fcol(m) + e);
  for (int n = mui; n < muj; ++n)
    for (int e = 0; e < blk; ++e) vm[static_cast<size_t>(e)][n] = x(vcol(n) + e);
  for (int p = 0; p < rj; ++p)
    for (int s = 0; s < ri; ++s) {
      f(s, p) = LaurentSeries::from_map(fm[static_cast<size_t>(p * ri + s)]);
      V(s, p) = LaurentSeries::from_map(vm[static_cast<size_t>(p * ri + s)]);
    }
  return {f, V};
}

}  // namespace

NormalForm bg_normalize(const BlockSystem& A, const QParams& qp) {
  A.validate();
  const int k = A.blocks();
  for (const auto& b : A.diag)
    if (b.kind != BlockKind::Const) throw Error(ErrorCode::Unsupported, "bg_normalize needs constant blocks z^μ A");
  const auto off = A.offsets();
  std::map<std::pair<int, int>, LaurentMatrix> Fb, Vb;
  auto sz = [&](int i) { return A.diag[static_cast<size_t>(i)].size(); };
  auto mu = [&](int i) { return static_cast<int>(A.diag[static_cast<size_t>(i)].slope.num); };
  for (int gap = 1; gap < k; ++gap)
    for (int i = 0; i + gap < k; ++i) {
      const int j = i + gap;
      LaurentMatrix R = A.upper_or_zero(i, j) * cplx(-1.0);
      for (int l = i + 1; l < j; ++l) {
        R += Vb.at({i, l}) * Fb.at({l, j});
        R -= sigma_q(Fb.at({i, l}), qp) * A.upper_or_zero(l, j);
      }
      if (mu(i) == mu(j)) {
        // Same slope: no level, the block cannot be removed; keep it as part of V.
        Fb[{i, j}] = LaurentMatrix(sz(i), sz(j));
        Vb[{i, j}] = R * cplx(-1.0);
        continue;
      }
      auto [f, V] = solve_block(A.diag[static_cast<size_t>(i)].A, mu(i), A.diag[static_cast<size_t>(j)].A, mu(j), R, qp, i, j);
      Fb[{i, j}] = std::move(f);
      Vb[{i, j}] = std::move(V);
    }
  NormalForm nf;
  nf.normal.diag = A.diag;
  nf.F = LaurentMatrix::identity(A.dim());
  for (const auto& [ij, f] : Fb) nf.F.set_block(off[static_cast<size_t>(ij.first)], off[static_cast<size_t>(ij.second)], f);
  for (const auto& [ij, v] : Vb)
    if (!v.is_zero()) nf.normal.upper[ij] = v;
  return nf;
}

long normal_form_dimension(const NewtonData& n) {
  long dim = 0;
  for (size_t i = 0; i < n.slopes.size(); ++i)
    for (size_t j = i + 1; j < n.slopes.size(); ++j) {
      const Rational gap = n.slopes[j] - n.slopes[i];
      if (!gap.is_integer()) throw Error(ErrorCode::Unsupported, "normal-form count needs integral slopes");
      dim += static_cast<long>(n.mults[i]) * n.mults[j] * gap.num;
    }
  return dim;
}

bool in_normal_form(const BlockSystem& A) {
  for (const auto& [ij, U] : A.upper) {
    const Rational mi = A.diag[static_cast<size_t>(ij.first)].slope, mj = A.diag[static_cast<size_t>(ij.second)].slope;
    if (!mi.is_integer() || !mj.is_integer()) return false;
    if (U.is_zero()) continue;
    if (mi == mj) continue;
    if (U.min_exp() < mi.num || U.max_exp() >= mj.num) return false;
  }
  return true;
}

// ---------------------------------------------------------------- filtration

LaurentMatrix gevrey_truncate(const LaurentMatrix& F, const BlockSystem& shape, Rational delta, GevreyMode mode) {
  const auto off = shape.offsets();
  LaurentMatrix out = F;
  for (int i = 0; i < shape.blocks(); ++i)
    for (int j = i + 1; j < shape.blocks(); ++j) {
      const Rational level = shape.diag[static_cast<size_t>(j)].slope - shape.diag[static_cast<size_t>(i)].slope;
      bool keep = true;
      switch (mode) {
        case GevreyMode::Geq: keep = delta <= level; break;
        case GevreyMode::Gt: keep = delta < level; break;
        case GevreyMode::Layer: keep = level == delta; break;
      }
      if (!keep) {
        const int si = shape.diag[static_cast<size_t>(i)].size(), sj = shape.diag[static_cast<size_t>(j)].size();
        out.set_block(off[static_cast<size_t>(i)], off[static_cast<size_t>(j)], LaurentMatrix(si, sj));
      }
    }
  return out;
}

std::vector<Rational> gevrey_levels(const LaurentMatrix& F, const BlockSystem& shape) {
  const auto off = shape.offsets();
  std::vector<Rational> levels;
  for (int i = 0; i < shape.blocks(); ++i)
    for (int j = i + 1; j < shape.blocks(); ++j) {
      const int si = shape.diag[static_cast<size_t>(i)].size(), sj = shape.diag[static_cast<size_t>(j)].size();
      if (F.block(off[static_cast<size_t>(i)], off[static_cast<size_t>(j)], si, sj).is_zero()) continue;
      const Rational level = shape.diag[static_cast<size_t>(j)].slope - shape.diag[static_cast<size_t>(i)].slope;
      if (std::find(levels.begin(), levels.end(), level) == levels.end()) levels.push_back(level);
    }
  std::sort(levels.begin(), levels.end());
  return levels;
}

// ---------------------------------------------------------------- log / exp

namespace {

template <class M>
M series_log(const M& unipotent, const M& I, int n) {
  const M X = unipotent - I;
  M term = X, sum = X;
  for (int p = 2; p <= n; ++p) {
    term = term * X;
    sum = sum + term * cplx((p % 2 == 0 ? -1.0 : 1.0) / p);
  }
  return sum;
}

template <class M>
M series_exp(const M& X, const M& I, int n) {
  M term = I, sum = I;
  for (int p = 1; p <= n; ++p) {
    term = term * X * cplx(1.0 / p);
    sum = sum + term;
  }
  return sum;
}

}  // namespace

LaurentMatrix nilpotent_log(const LaurentMatrix& u) {
  return series_log(u, LaurentMatrix::identity(u.rows()), u.rows());
}

LaurentMatrix nilpotent_exp(const LaurentMatrix& x) {
  return series_exp(x, LaurentMatrix::identity(x.rows()), x.rows());
}

CMatrix nilpotent_log(const CMatrix& u) {
  const CMatrix I = CMatrix::Identity(u.rows(), u.cols());
  return series_log<CMatrix>(u, I, static_cast<int>(u.rows()));
}

CMatrix nilpotent_exp(const CMatrix& x) {
  const CMatrix I = CMatrix::Identity(x.rows(), x.cols());
  return series_exp<CMatrix>(x, I, static_cast<int>(x.rows()));
}

}  // namespace qdx
