#include "qdx/alien.hpp"

#include <cmath>
#include <numeric>

namespace qdx {

CMatrix AlienBlock::embed(const std::vector<int>& offsets) const {
  const int n = offsets.back();
  CMatrix out = CMatrix::Zero(n, n);
  out.block(offsets[static_cast<size_t>(i)], offsets[static_cast<size_t>(j)], N.rows(), N.cols()) = N;
  return out;
}

BlockSystem TwoByTwo::system() const {
  BlockSystem A;
  A.diag.push_back(DiagBlock::constant(k, CMatrix::Constant(1, 1, a)));
  A.diag.push_back(DiagBlock::constant(k + delta, CMatrix::Constant(1, 1, b)));
  LaurentMatrix U(1, 1);
  U(0, 0) = u;
  A.upper[{0, 1}] = U;
  return A;
}

namespace {

// m with q^m x = target, or nullopt when no integer power matches within tol.
std::optional<int> q_exponent(cplx x, cplx target, const QParams& qp, double tol = 1e-9) {
  const double m = std::round(std::log(std::abs(target / x)) / qp.log_abs_q());
  if (std::abs(qp.qpow(m) * x - target) > tol * std::abs(target)) return std::nullopt;
  return static_cast<int>(m);
}

cplx theta_at_base(const QParams& qp, cplx c) {
  const cplx th = theta(qp, qp.z0() / c);
  if (std::abs(th) < 1e-12) throw Error(ErrorCode::BasePointOnSpiral, "theta(z0/c) vanishes");
  return th;
}

// t_n^(δ) over the exponents in [lo, hi].
std::vector<cplx> theta_coeffs(const QParams& qp, int delta, int lo, int hi) {
  const ThetaCoeffTable table(qp, delta, std::max(std::abs(lo), std::abs(hi)) + 2);
  std::vector<cplx> t;
  for (int n = lo; n <= hi; ++n) t.push_back(table.t(delta, n));
  return t;
}

std::vector<cplx> eigenvalues(const CMatrix& M) { return clustered_eigenvalues(M); }

int mod(int a, int n) { return ((a % n) + n) % n; }

}  // namespace

cplx alien_two_by_two_at(const TwoByTwo& A, cplx c, const QParams& qp, Numerator num) {
  const cplx d = A.a / A.b;
  const auto mp = q_exponent(std::pow(c, A.delta), d, qp);
  if (!mp || A.u.is_zero()) return 0.0;
  const int m = *mp;
  const cplx th = theta_at_base(qp, c);
  // v_m(c) = Σ_j u_j t_{m+k−j} c^{−(m+k−j)}.
  const int lo = m + A.k - A.u.hi(), hi = m + A.k - A.u.lo();
  const auto t = theta_coeffs(qp, A.delta, lo, hi);
  cplx v = 0.0;
  for (int j = A.u.lo(); j <= A.u.hi(); ++j) {
    const int n = m + A.k - j;
    v += A.u.coeff(j) * t[static_cast<size_t>(n - lo)] * std::pow(c, -n);
  }
  cplx f = std::pow(qp.z0(), m) * v / (A.b * std::pow(th, A.delta));
  if (num == Numerator::Shifted) f *= qp.qpow(-m);
  return f / (static_cast<double>(A.delta) * d);
}

std::vector<AlienBlock> alien_two_by_two(const TwoByTwo& A, const QParams& qp, Numerator num) {
  if (A.delta < 1) throw Error(ErrorCode::InvalidInput, "delta must be positive");
  const cplx d = A.a / A.b;
  const EllipticPoint beta = canonicalize(1.0 / d, qp);
  const RootGrid g = root_grid(A.delta, beta, qp);
  std::vector<AlienBlock> out;
  for (int l = 0; l < A.delta; ++l)
    for (int m = 0; m < A.delta; ++m) {
      AlienBlock b;
      b.delta = A.delta;
      b.c = g.at(l, m);
      b.alpha = canonicalize(b.c, qp);
      b.beta = beta;
      b.N = CMatrix::Constant(1, 1, alien_two_by_two_at(A, b.c, qp, num));
      b.l = l;
      b.m = m;
      out.push_back(b);
    }
  return out;
}

namespace {

double residue_radius_levels(cplx c0, const std::vector<std::pair<int, cplx>>& level_ratios, const QParams& qp) {
  double best = 1e300;
  auto consider = [&](cplx p) {
    const double dist = std::abs(p - c0);
    if (dist > 1e-9 * std::abs(c0)) best = std::min(best, dist);
  };
  for (const auto& [delta, rho] : level_ratios) {
    const double m0 = std::round(std::log(std::abs(rho / std::pow(c0, delta))) / qp.log_abs_q());
    for (int dm = -2; dm <= 2; ++dm) {
      const cplx root = std::pow(rho * qp.qpow(-(m0 + dm)), 1.0 / delta);
      for (int k = 0; k < delta; ++k) consider(root * unit_root(k, delta));
    }
  }
  const double n0 = std::round(std::log(std::abs(c0 / qp.z0())) / qp.log_abs_q());
  for (int dn = -2; dn <= 2; ++dn) consider(-qp.z0() * qp.qpow(n0 + dn));
  return std::min(0.2, 0.3 * best / std::abs(c0));
}

}  // namespace

double residue_radius(cplx c0, int delta, const std::vector<cplx>& ratios, const QParams& qp) {
  std::vector<std::pair<int, cplx>> lr;
  for (cplx r : ratios) lr.emplace_back(delta, r);
  return residue_radius_levels(c0, lr, qp);
}

cplx alien_oracle_two_by_two(const TwoByTwo& A, cplx c0, const QParams& qp, int samples) {
  const Summer s(A.system(), qp);
  const cplx z0 = qp.z0();
  const double rad = residue_radius(c0, A.delta, {A.a / A.b}, qp);
  return residue_on_Eq([&](cplx c) { return s.sum(c).F(z0)(0, 1); }, c0, rad, samples);
}

// ---------------------------------------------------------------- pairs

namespace {

struct PairData {
  CMatrix Ai, Aj;
  int mui = 0, muj = 0;
  LaurentMatrix U;
};

std::vector<cplx> pair_ratios(const PairData& p) {
  std::vector<cplx> out;
  for (cplx a : eigenvalues(p.Ai))
    for (cplx b : eigenvalues(p.Aj)) out.push_back(a / b);
  return out;
}

bool resonant(const PairData& p, cplx c0, const QParams& qp) {
  const cplx cd = std::pow(c0, p.muj - p.mui);
  for (cplx rho : pair_ratios(p))
    if (q_exponent(cd, rho, qp)) return true;
  return false;
}

// A = P D P^{-1} with a well conditioned P, or nullopt.
struct Diagonalization {
  CMatrix P, Pinv;
  std::vector<cplx> D;
};
std::optional<Diagonalization> diagonalize(const CMatrix& A) {
  Eigen::ComplexEigenSolver<CMatrix> es(A);
  Diagonalization out;
  out.P = es.eigenvectors();
  Eigen::JacobiSVD<CMatrix> svd(out.P);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) < 1e-8 * s(0)) return std::nullopt;
  out.Pinv = out.P.inverse();
  out.D.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  const CMatrix back = out.P * es.eigenvalues().asDiagonal() * out.Pinv;
  if ((back - A).norm() > 1e-10 * std::max(1.0, A.norm())) return std::nullopt;
  return out;
}

// Closed-form residue for a diagonalizable pair:
// Y_ab = θ(z₀/c₀)^{−δ} z₀^{m} [P^{-1}V_m Q]_ab/(δρ_ab) over the (a, b) with q^m c₀^δ = ρ_ab,
// V = θ_{q,c₀}^δ z^{−μ_i} U A_j^{-1}, and N = P Y Q^{-1}.
CMatrix pair_closed_form(const PairData& p, const Diagonalization& di, const Diagonalization& dj, cplx c0,
                         const QParams& qp) {
  const int delta = p.muj - p.mui;
  const cplx th = theta_at_base(qp, c0);
  const cplx cd = std::pow(c0, delta);
  const LaurentMatrix W = p.U * CMatrix(p.Aj.inverse());
  const int wlo = W.min_exp() - p.mui, whi = W.max_exp() - p.mui;
  const cplx z0 = qp.z0();
  CMatrix Y = CMatrix::Zero(p.Ai.rows(), p.Aj.rows());
  std::map<int, CMatrix> Vm;
  for (size_t a = 0; a < di.D.size(); ++a)
    for (size_t b = 0; b < dj.D.size(); ++b) {
      const cplx rho = di.D[a] / dj.D[b];
      const auto mp = q_exponent(cd, rho, qp);
      if (!mp) continue;
      const int m = *mp;
      auto it = Vm.find(m);
      if (it == Vm.end()) {
        // V_m = Σ_w t_{m−w} c₀^{−(m−w)} W_{w+μ_i}.
        const auto t = theta_coeffs(qp, delta, m - whi, m - wlo);
        CMatrix V = CMatrix::Zero(p.Ai.rows(), p.Aj.rows());
        for (int w = wlo; w <= whi; ++w) {
          const int n = m - w;
          V += t[static_cast<size_t>(n - (m - whi))] * std::pow(c0, -n) * W.coeff(w + p.mui);
        }
        it = Vm.emplace(m, di.Pinv * V * dj.P).first;
      }
      Y(static_cast<long>(a), static_cast<long>(b)) =
          std::pow(z0, m) * it->second(static_cast<long>(a), static_cast<long>(b)) /
          (std::pow(th, delta) * static_cast<double>(delta) * rho);
    }
  return di.P * Y * dj.Pinv;
}

BlockSystem pair_system(const PairData& p) {
  BlockSystem S;
  S.diag.push_back(DiagBlock::constant(p.mui, p.Ai));
  S.diag.push_back(DiagBlock::constant(p.muj, p.Aj));
  S.upper[{0, 1}] = p.U;
  return S;
}

CMatrix pair_numeric(const PairData& p, cplx c0, const QParams& qp) {
  const Summer s(pair_system(p), qp);
  const cplx z0 = qp.z0();
  const int ni = static_cast<int>(p.Ai.rows()), nj = static_cast<int>(p.Aj.rows());
  const double rad = residue_radius(c0, p.muj - p.mui, pair_ratios(p), qp);
  return residue_on_Eq(std::function<CMatrix(cplx)>([&](cplx c) { return CMatrix(s.sum(c).F(z0).block(0, ni, ni, nj)); }),
                       c0, rad, 256);
}

CMatrix pair_alien(const PairData& p, cplx c0, const QParams& qp) {
  const auto di = diagonalize(p.Ai), dj = diagonalize(p.Aj);
  if (di && dj) return pair_closed_form(p, *di, *dj, c0, qp);
  return pair_numeric(p, c0, qp);
}

// All-constant system with integral slopes: (μ_i, A_i).
void require_constant(const BlockSystem& A) {
  for (const auto& b : A.diag) {
    if (b.kind != BlockKind::Const) throw Error(ErrorCode::Unsupported, "expected constant diagonal blocks");
    if (!b.slope.is_integer()) throw Error(ErrorCode::Unsupported, "constant block with fractional slope");
  }
}

std::vector<AlienBlock> alien_constant(const BlockSystem& A, cplx c0, const QParams& qp, Base base) {
  require_constant(A);
  std::vector<AlienBlock> out;
  for (const auto& [ij, U] : A.upper) {
    if (U.is_zero()) continue;
    PairData p;
    p.Ai = A.diag[static_cast<size_t>(ij.first)].A;
    p.Aj = A.diag[static_cast<size_t>(ij.second)].A;
    p.mui = static_cast<int>(A.diag[static_cast<size_t>(ij.first)].slope.num);
    p.muj = static_cast<int>(A.diag[static_cast<size_t>(ij.second)].slope.num);
    p.U = U;
    if (p.muj <= p.mui) throw Error(ErrorCode::Unsupported, "alien derivatives need increasing slopes");
    if (!resonant(p, c0, qp)) continue;
    AlienBlock b;
    b.delta = p.muj - p.mui;
    b.c = c0;
    b.alpha = canonicalize(c0, qp);
    b.alpha.base = base;
    b.beta = canonicalize(std::pow(c0, -b.delta), qp);
    b.beta.base = base;
    b.N = pair_alien(p, c0, qp);
    b.i = ij.first;
    b.j = ij.second;
    out.push_back(std::move(b));
  }
  return out;
}

int ramification_index(const BlockSystem& A) {
  int r = 1;
  for (const auto& b : A.diag) {
    if (b.kind == BlockKind::Laurent) throw Error(ErrorCode::Unsupported, "declared-pure Laurent blocks");
    r = std::lcm(r, static_cast<int>(b.slope.den));
  }
  return r;
}

bool has_e_blocks(const BlockSystem& A) {
  for (const auto& b : A.diag)
    if (b.kind == BlockKind::E) return true;
  return false;
}

LaurentMatrix kron_identity(const LaurentMatrix& M, int m) { return m == 1 ? M : kron(M, CMatrix(CMatrix::Identity(m, m))); }

}  // namespace

RamifiedReduction reduce_ramified(const BlockSystem& A, const QParams& qp) {
  A.validate();
  RamifiedReduction red;
  red.r = ramification_index(A);
  const int r = red.r;
  red.qp_r = qp.base(r);
  const cplx z0r = qp.z0_root(r);
  const auto off = A.offsets();
  const int n = A.dim();
  LaurentMatrix F(n, n), Finv(n, n);
  red.F0 = CMatrix::Zero(n, n);
  for (int i = 0; i < A.blocks(); ++i) {
    const DiagBlock& blk = A.diag[static_cast<size_t>(i)];
    const int o = off[static_cast<size_t>(i)], sz = blk.size();
    const int mu = static_cast<int>((blk.slope * Rational(r)).num);
    if (blk.kind == BlockKind::Const) {
      red.B.diag.push_back(DiagBlock::constant(mu, blk.A));
      F.set_block(o, o, LaurentMatrix::identity(sz));
      Finv.set_block(o, o, LaurentMatrix::identity(sz));
      red.F0.block(o, o, sz, sz).setIdentity();
      continue;
    }
    CMatrix M = CMatrix::Zero(sz, sz);
    int po = 0;
    for (const auto& e : blk.parts) {
      const IrreducibleObject obj(e);
      const int s = r / e.r, ps = e.size();
      const CMatrix D = obj.a * D_r(e.r);
      const CMatrix U = jordan_unipotent(e.m);
      for (int a = 0; a < e.r; ++a) M.block(po + a * e.m, po + a * e.m, e.m, e.m) = D(a, a) * U;
      const Conjugators cj = conjugators(obj, qp);
      // G^{-1} Z^{-1} with G diagonal monomial.
      LaurentMatrix Gi(e.r, e.r);
      for (int a = 0; a < e.r; ++a) {
        const LaurentSeries& g = cj.G(a, a);
        Gi(a, a) = LaurentSeries::monomial(1.0 / g.coeff(g.lo()), -g.lo());
      }
      const LaurentMatrix Fi = Gi * CMatrix(Z_r(e.r).inverse());
      F.set_block(o + po, o + po, kron_identity(ramify_matrix(cj.F, s), e.m));
      Finv.set_block(o + po, o + po, kron_identity(ramify_matrix(Fi, s), e.m));
      const CMatrix F0p = conjugator_F(obj, qp, std::pow(z0r, s));
      for (int a = 0; a < e.r; ++a)
        for (int b = 0; b < e.r; ++b)
          red.F0.block(o + po + a * e.m, o + po + b * e.m, e.m, e.m) = F0p(a, b) * CMatrix::Identity(e.m, e.m);
      po += ps;
    }
    red.B.diag.push_back(DiagBlock::constant(mu, M));
  }
  red.F = F;
  const LaurentMatrix sF = sigma_q(F, red.qp_r);
  for (const auto& [ij, U] : A.upper) {
    if (U.is_zero()) continue;
    const int oi = off[static_cast<size_t>(ij.first)], oj = off[static_cast<size_t>(ij.second)];
    const int ni = A.diag[static_cast<size_t>(ij.first)].size(), nj = A.diag[static_cast<size_t>(ij.second)].size();
    red.B.upper[ij] = sF.block(oi, oi, ni, ni) * ramify_matrix(U, r) * Finv.block(oj, oj, nj, nj);
  }
  return red;
}

std::vector<AlienBlock> alien_general(const BlockSystem& A, const EllipticPoint& alpha, const QParams& qp) {
  A.validate();
  if (!has_e_blocks(A)) {
    if (ramification_index(A) != 1) throw Error(ErrorCode::Unsupported, "fractional constant slopes");
    return alien_constant(A, alpha.rep, qp, Base::Q);
  }
  const RamifiedReduction red = reduce_ramified(A, qp);
  auto blocks = alien_constant(red.B, alpha.rep, red.qp_r, Base::QR);
  const auto off = A.offsets();
  for (auto& b : blocks) {
    const int oi = off[static_cast<size_t>(b.i)], oj = off[static_cast<size_t>(b.j)];
    const int ni = static_cast<int>(b.N.rows()), nj = static_cast<int>(b.N.cols());
    const CMatrix Fi = red.F0.block(oi, oi, ni, ni), Fj = red.F0.block(oj, oj, nj, nj);
    b.N = Fi.inverse() * b.N * Fj;
  }
  return blocks;
}

CMatrix alien_matrix(const BlockSystem& A, const EllipticPoint& alpha, const QParams& qp) {
  CMatrix out = CMatrix::Zero(A.dim(), A.dim());
  const auto off = A.offsets();
  for (const auto& b : alien_general(A, alpha, qp)) out += b.embed(off);
  return out;
}

std::vector<AlienBlock> alien_all(const BlockSystem& A, const QParams& qp) {
  const ResonanceSet rs = resonance_set(A, qp);
  const QParams qb = rs.base == Base::QR ? qp.with_r(ramification_index(A)) : qp;
  std::vector<EllipticPoint> seen;
  std::vector<AlienBlock> out;
  for (const auto& p : rs.points) {
    bool dup = false;
    for (const auto& s : seen) dup = dup || same_point(s, p.point, qb);
    if (dup) continue;
    seen.push_back(p.point);
    for (auto& b : alien_general(A, p.point, qp)) out.push_back(std::move(b));
  }
  return out;
}

CMatrix alien_direct(const BlockSystem& A, cplx alpha, cplx c, const QParams& qp) {
  require_constant(A);
  const Summer s(A, qp);
  const cplx z0 = qp.z0();
  const CMatrix Fc_inv = s.sum(c).F_inverse(z0);
  std::vector<std::pair<int, cplx>> lr;
  for (int i = 0; i < A.blocks(); ++i)
    for (int j = i + 1; j < A.blocks(); ++j) {
      const int delta = static_cast<int>(A.diag[static_cast<size_t>(j)].slope.num - A.diag[static_cast<size_t>(i)].slope.num);
      for (cplx a : eigenvalues(A.diag[static_cast<size_t>(i)].A))
        for (cplx b : eigenvalues(A.diag[static_cast<size_t>(j)].A)) lr.emplace_back(delta, a / b);
    }
  const double rad = residue_radius_levels(alpha, lr, qp);
  return residue_on_Eq(std::function<CMatrix(cplx)>([&](cplx d) { return nilpotent_log(CMatrix(Fc_inv * s.sum(d).F(z0))); }),
                       alpha, rad, 256);
}

BlockSystem truncate_levels(const BlockSystem& A, int delta, bool exact) {
  BlockSystem out;
  out.diag = A.diag;
  for (const auto& [ij, U] : A.upper) {
    const Rational lev = A.diag[static_cast<size_t>(ij.second)].slope - A.diag[static_cast<size_t>(ij.first)].slope;
    const bool keep = exact ? lev == Rational(delta) : lev <= Rational(delta);
    if (keep) out.upper[ij] = U;
  }
  return out;
}

double layer_additivity(const BlockSystem& A, cplx alpha, int delta, cplx c, const QParams& qp) {
  require_constant(A);
  const CMatrix lhs = alien_direct(truncate_levels(A, delta, false), alpha, c, qp);
  CMatrix rhs = CMatrix::Zero(A.dim(), A.dim());
  if (delta > 1) rhs = alien_direct(truncate_levels(A, delta - 1, false), alpha, c, qp);
  rhs += alien_matrix(truncate_levels(A, delta, true), canonicalize(alpha, qp), qp);
  const auto off = A.offsets();
  double err = 0.0;
  const double scale = std::max({lhs.cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff(), 1e-300});
  for (int i = 0; i < A.blocks(); ++i)
    for (int j = i + 1; j < A.blocks(); ++j) {
      const long lev = A.diag[static_cast<size_t>(j)].slope.num - A.diag[static_cast<size_t>(i)].slope.num;
      if (lev > delta) continue;
      const int oi = off[static_cast<size_t>(i)], oj = off[static_cast<size_t>(j)];
      const int ni = A.diag[static_cast<size_t>(i)].size(), nj = A.diag[static_cast<size_t>(j)].size();
      err = std::max(err, (lhs.block(oi, oj, ni, nj) - rhs.block(oi, oj, ni, nj)).cwiseAbs().maxCoeff());
    }
  return err / scale;
}

// ---------------------------------------------------------------- dilation

double alien_dilated(const TwoByTwo& A, cplx lambda, const QParams& qp) {
  if (lambda == 0.0) throw Error(ErrorCode::ZeroDilation, "lambda = 0");
  TwoByTwo Ad = A;
  Ad.a = A.a * std::pow(lambda, A.k);
  Ad.b = A.b * std::pow(lambda, A.k + A.delta);
  Ad.u = dilate(A.u, lambda);
  const auto blocks = alien_two_by_two(A, qp);
  const auto dblocks = alien_two_by_two(Ad, qp);
  const cplx d = A.a / A.b;
  double scale = 1e-300;
  for (const auto& b : blocks) scale = std::max(scale, std::abs(b.N(0, 0)));
  double err = 0.0;
  for (const auto& b : blocks) {
    const cplx c = b.c, cd = c / lambda;
    const int m = *q_exponent(std::pow(c, A.delta), d, qp);
    const cplx pred = std::pow(theta_at_base(qp, c) / theta_at_base(qp, cd), A.delta) * std::pow(lambda, m) * b.N(0, 0);
    const AlienBlock* match = nullptr;
    for (const auto& db : dblocks)
      if (same_class(db.c, cd, qp)) match = &db;
    if (!match) return 1.0;
    const cplx got = match->N(0, 0);
    err = std::max(err, std::abs(pred - got) / std::max({std::abs(pred), std::abs(got), 1e-12 * scale}));
  }
  return err;
}

cplx psi_value(int delta, cplx a, int l, int m, const LaurentSeries& u, const QParams& qp) {
  const RootGrid g = root_grid(delta, canonicalize(1.0 / a, qp), qp);
  const cplx c = g.at(l, m);
  TwoByTwo A;
  A.a = a;
  A.delta = delta;
  A.u = u;
  return std::pow(theta_at_base(qp, c), delta) * alien_two_by_two_at(A, c, qp);
}

namespace {

void require_canonical(cplx a, const QParams& qp) {
  const cplx e = canonicalize(1.0 / a, qp).rep;
  if (std::abs(e - 1.0 / a) > 1e-12 * std::abs(e))
    throw Error(ErrorCode::InvalidInput, "a^{-1} must be the canonical representative of beta");
}

}  // namespace

double root_of_unity_shift_check(int delta, cplx a, const QParams& qp) {
  require_canonical(a, qp);
  double err = 0.0;
  for (int j = 0; j < delta; ++j) {
    const LaurentSeries u = LaurentSeries::monomial(1.0, j);
    for (int l = 0; l < delta; ++l)
      for (int m = 0; m < delta; ++m) {
        const cplx lhs = psi_value(delta, a, l + 1, m, u, qp);
        const cplx rhs = unit_root(m - j, delta) * psi_value(delta, a, l, m, u, qp);
        err = std::max(err, std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300}));
      }
  }
  return err;
}

double q_delta_shift_check(int delta, cplx a, const QParams& qp) {
  require_canonical(a, qp);
  const cplx z0 = qp.z0(), qd = qp.qpow(1.0 / delta);
  double err = 0.0;
  for (int j = 0; j < delta; ++j)
    for (int l = 0; l < delta; ++l)
      for (int m = 0; m < delta; ++m) {
        const cplx lhs = psi_value(delta, a, l, mod(m + 1, delta), LaurentSeries::monomial(1.0, mod(j + 1, delta)), qp);
        cplx factor = z0 * std::pow(qd, m - j);
        if (m == delta - 1) factor *= a / std::pow(z0, delta);
        if (j == delta - 1) factor /= a;
        const cplx rhs = factor * psi_value(delta, a, l, m, LaurentSeries::monomial(1.0, j), qp);
        err = std::max(err, std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300}));
      }
  return err;
}

// ---------------------------------------------------------------- canonical basis

CanonicalBasis canonical_basis(int delta, cplx a, const QParams& qp) {
  CanonicalBasis cb;
  cb.delta = delta;
  cb.a = a;
  cb.beta = canonicalize(1.0 / a, qp);
  const RootGrid g = root_grid(delta, cb.beta, qp);
  cb.M = CMatrix::Zero(delta, delta);
  for (int l = 0; l < delta; ++l) {
    CanonicalBasisEntry e;
    e.l = l;
    e.c = g.at(l, 0);
    e.alpha = canonicalize(e.c, qp);
    e.theta_factor = std::pow(theta_at_base(qp, e.c), delta);
    for (int j = 0; j < delta; ++j) {
      TwoByTwo A;
      A.a = a;
      A.delta = delta;
      A.u = LaurentSeries::monomial(1.0, j);
      const cplx D = alien_two_by_two_at(A, e.c, qp);
      e.delta_on_u.push_back(D);
      e.psi_on_u.push_back(e.theta_factor * D);
      cb.M(l, j) = e.theta_factor * D;
    }
    cb.entries.push_back(std::move(e));
  }
  // Ψ_{i,0}(u_j) = ζ_δ^{i(m′−j)}Ψ_{0,0}(u_j) with q^{m′}c_0^δ = a (m′ = 0 for canonical a^{-1}).
  const int mp = *q_exponent(std::pow(g.at(0, 0), delta), a, qp);
  CMatrix pred(delta, delta);
  for (int i = 0; i < delta; ++i)
    for (int j = 0; j < delta; ++j) pred(i, j) = unit_root(static_cast<long>(i) * (mp - j), delta) * cb.M(0, j);
  cb.vandermonde_residual = (cb.M - pred).norm() / std::max(1e-300, cb.M.norm());
  Eigen::JacobiSVD<CMatrix> svd(cb.M);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1), smax = s(0);
  cb.condition = smin > 0.0 ? smax / smin : INFINITY;
  if (!(smin > 1e-12 * smax)) throw Error(ErrorCode::BadQValue, "independence matrix is singular");
  return cb;
}

CanonicalBasis canonical_basis(int delta, const EllipticPoint& beta, const QParams& qp) {
  return canonical_basis(delta, 1.0 / canonicalize(beta.rep, qp).rep, qp);
}

CMatrix pairing(int delta, cplx a, const LaurentSeries& u, const QParams& qp) {
  TwoByTwo A;
  A.a = a;
  A.delta = delta;
  A.u = u;
  CMatrix P(delta, delta);
  for (const auto& b : alien_two_by_two(A, qp)) P(b.l, b.m) = b.N(0, 0);
  return P;
}

int pairing_rank(int delta, cplx a, const QParams& qp, double tol) {
  CMatrix R(delta, delta);
  for (int j = 0; j < delta; ++j) R.col(j) = pairing(delta, a, LaurentSeries::monomial(1.0, j), qp).col(0);
  Eigen::JacobiSVD<CMatrix> svd(R);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++rank;
  return rank;
}

// ---------------------------------------------------------------- Galois action

double ActionCheck::max() const { return std::max({h, gamma1, gamma2, psi_gamma2, commutation}); }

CMatrix evaluate_on_system(const FormalElement& phi, const BlockSystem& A, const QParams& qp) {
  const int r = ramification_index(A);
  const int n = A.dim();
  CMatrix out = CMatrix::Zero(n, n);
  int off = 0;
  for (const auto& b : A.diag) {
    if (b.kind != BlockKind::E) throw Error(ErrorCode::Unsupported, "evaluation needs E blocks");
    for (const auto& e : b.parts) {
      FormalElement f = phi;
      f.t = std::pow(phi.t, r / e.r);
      out.block(off, off, e.size(), e.size()) = evaluate_element(f, IrreducibleObject(e), qp);
      off += e.size();
    }
  }
  return out;
}

ActionCheck act_unramified_check(const BlockSystem& A, cplx t, const QParams& qp) {
  if (A.blocks() != 2) throw Error(ErrorCode::InvalidInput, "expected a two-block system");
  ActionCheck out;
  out.r = ramification_index(A);
  const int r = out.r;
  const QParams qpr = qp.with_r(r), qb = qp.base(r);
  out.delta = static_cast<int>(((A.diag[1].slope - A.diag[0].slope) * Rational(r)).num);
  const int delta = out.delta;
  auto phi_of = [&](cplx tt, int k1, int k2, cplx lambda) {
    FormalElement f;
    f.t = tt;
    f.k1 = k1;
    f.k2 = k2;
    f.lambda = lambda;
    return evaluate_on_system(f, A, qp);
  };
  const CMatrix Ph = phi_of(t, 0, 0, 0.0), P1 = phi_of(1.0, 1, 0, 0.0), P2 = phi_of(1.0, 0, 1, 0.0);
  const CMatrix Pu = phi_of(1.0, 0, 0, cplx(0.3, 0.7));
  const CMatrix Phi = Ph.inverse(), P1i = P1.inverse(), P2i = P2.inverse();
  auto rel = [](const CMatrix& a, const CMatrix& b) { return (a - b).norm() / std::max(a.norm(), b.norm()); };
  const cplx zr = unit_root(1, r);
  for (const auto& p : resonance_set(A, qp).points) {
    const cplx c = p.point.rep;
    const CMatrix D = alien_matrix(A, p.point, qp);
    if (D.norm() == 0.0) continue;
    ++out.points;
    out.h = std::max(out.h, rel(Phi * D * Ph, std::pow(t, delta) * D));
    out.gamma1 = std::max(out.gamma1, rel(P1i * D * P1, character_gamma(1, std::pow(c, -delta), qp) * D));
    const cplx gbar = character_gamma(2, 1.0 / c, qp) * theta(qb, qb.z0() / (zr * c)) / theta(qb, qb.z0() / c);
    const CMatrix D2 = alien_matrix(A, canonicalize(zr * c, qpr, Base::QR), qp);
    out.gamma2 = std::max(out.gamma2, rel(P2i * D * P2, std::pow(gbar, delta) * D2));
    out.commutation = std::max(out.commutation, (Pu * D - D * Pu).norm() / (Pu.norm() * D.norm()));
    // Ψ_l = θ_{q_r}(z_{0,r}/c_l)^δ Δ_l on the grid of β, moved by γ₂ per the symbol rule.
    const EllipticPoint beta = canonicalize(std::pow(c, -delta), qpr, Base::QR);
    const RootGrid grid = root_grid(delta, beta, qpr);
    for (int l = 0; l < delta; ++l) {
      const cplx cl = grid.at(l, 0);
      const CMatrix Psi = std::pow(theta(qb, qb.z0() / cl), delta) * alien_matrix(A, canonicalize(cl, qpr, Base::QR), qp);
      if (Psi.norm() == 0.0) continue;
      PsiSymbol sym;
      sym.delta = delta;
      sym.beta = beta;
      sym.l = l;
      const PsiSymbol moved = act_on_psi(Generator{Generator::Kind::Gamma2}, sym, qpr);
      const cplx cl2 = root_grid(delta, moved.beta, qpr).at(moved.l, 0);
      const CMatrix Psi2 =
          std::pow(theta(qb, qb.z0() / cl2), delta) * alien_matrix(A, canonicalize(cl2, qpr, Base::QR), qp);
      out.psi_gamma2 = std::max(out.psi_gamma2, rel(P2i * Psi * P2, moved.coeff * Psi2));
    }
  }
  return out;
}

}  // namespace qdx
