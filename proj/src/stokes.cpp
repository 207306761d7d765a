#include "qdx/stokes.hpp"

#include <cmath>
#include <numeric>
#include <random>

namespace qdx {

std::vector<cplx> clustered_eigenvalues(const CMatrix& M, double tol) {
  Eigen::ComplexEigenSolver<CMatrix> es(M, false);
  const int n = static_cast<int>(es.eigenvalues().size());
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  // Single-link clusters by union-find.
  std::vector<int> parent(static_cast<size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[static_cast<size_t>(i)] != i) i = parent[static_cast<size_t>(i)];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double scale = std::max(std::abs(ev[static_cast<size_t>(i)]), std::abs(ev[static_cast<size_t>(j)]));
      if (std::abs(ev[static_cast<size_t>(i)] - ev[static_cast<size_t>(j)]) <= tol * scale)
        parent[static_cast<size_t>(find(i))] = find(j);
    }
  std::vector<cplx> sum(static_cast<size_t>(n), 0.0);
  std::vector<int> count(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    sum[static_cast<size_t>(find(i))] += ev[static_cast<size_t>(i)];
    ++count[static_cast<size_t>(find(i))];
  }
  std::vector<cplx> out;
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    out.push_back(sum[static_cast<size_t>(root)] / static_cast<double>(count[static_cast<size_t>(root)]));
  }
  return out;
}

namespace {

std::vector<cplx> eigenvalues(const CMatrix& M) { return clustered_eigenvalues(M); }

// Spectrum and slope of one diagonal block in the working base (q or q_r).
struct BlockSpectrum {
  long mu;
  std::vector<cplx> eig;
};

BlockSpectrum block_spectrum(const DiagBlock& b, int r) {
  BlockSpectrum s;
  if (b.kind == BlockKind::Const) {
    s.mu = b.slope.num * r;
    s.eig = eigenvalues(b.A);
    return s;
  }
  if (b.kind == BlockKind::E) {
    s.mu = (b.slope * Rational(r)).num;
    for (const auto& p : b.parts) {
      // Diagonal form a z_{r_i}^{d} D_{r_i}: eigenvalues a ζ_{r_i}^k, a^{r_i} = c.
      const cplx a = std::pow(p.c, 1.0 / p.r);
      for (int k = 0; k < p.r; ++k)
        for (int t = 0; t < p.m; ++t) s.eig.push_back(a * unit_root(k, p.r));
    }
    return s;
  }
  throw Error(ErrorCode::Unsupported, "resonance set needs constant or E(r,d,c) blocks");
}

int global_r(const BlockSystem& A) {
  int r = 1;
  for (const auto& b : A.diag)
    if (b.kind == BlockKind::E)
      for (const auto& p : b.parts) r = std::lcm(r, p.r);
  return r;
}

}  // namespace

bool ResonanceSet::contains(cplx c, const QParams& qp, double tol) const {
  for (const auto& p : points)
    if (same_class(c, p.point.rep, qp, base, tol)) return true;
  return false;
}

ResonanceSet resonance_set(const BlockSystem& A0, const QParams& qp_in) {
  const int r = global_r(A0);
  bool any_e = false;
  for (const auto& b : A0.diag) any_e = any_e || b.kind == BlockKind::E;
  const QParams qp = any_e ? qp_in.with_r(r) : qp_in;
  ResonanceSet out;
  out.base = any_e ? Base::QR : Base::Q;
  std::vector<BlockSpectrum> spec;
  for (const auto& b : A0.diag) spec.push_back(block_spectrum(b, any_e ? r : 1));
  for (int i = 0; i < A0.blocks(); ++i)
    for (int j = i + 1; j < A0.blocks(); ++j) {
      const long delta = spec[static_cast<size_t>(j)].mu - spec[static_cast<size_t>(i)].mu;
      if (delta <= 0) continue;
      for (cplx li : spec[static_cast<size_t>(i)].eig)
        for (cplx lj : spec[static_cast<size_t>(j)].eig) {
          const auto beta = canonicalize(lj / li, qp, out.base);
          const RootGrid g = root_grid(static_cast<int>(delta), beta, qp);
          for (cplx c : g.grid) {
            if (out.contains(c, qp)) continue;
            out.points.push_back({canonicalize(c, qp, out.base), i, j, li, lj});
          }
        }
    }
  return out;
}

std::function<CMatrix(const CMatrix&)> spectral_projector(const CharBlocks& P, const CharBlocks& Q, cplx lambda,
                                                          double tol) {
  auto block_eigs = [](const CharBlocks& B) {
    std::vector<cplx> e;
    int off = 0;
    for (int s : B.sizes) {
      e.push_back(B.M.block(off, off, s, s).trace() / static_cast<double>(s));
      off += s;
    }
    return e;
  };
  const auto lp = block_eigs(P), lq = block_eigs(Q);
  const std::vector<int> ps = P.sizes, qs = Q.sizes;
  return [=](const CMatrix& X) {
    CMatrix out = CMatrix::Zero(X.rows(), X.cols());
    int oi = 0;
    for (size_t i = 0; i < ps.size(); ++i) {
      int oj = 0;
      for (size_t j = 0; j < qs.size(); ++j) {
        const cplx ratio = lp[i] / lq[j];
        if (std::abs(ratio - lambda) <= tol * std::max(1.0, std::abs(lambda)))
          out.block(oi, oj, ps[i], qs[j]) = X.block(oi, oj, ps[i], qs[j]);
        oj += qs[j];
      }
      oi += ps[i];
    }
    return out;
  };
}

namespace {

void check_ratios(const std::vector<cplx>& ratios, cplx cd, const QParams& qp, int i, int j) {
  for (cplx e : ratios) {
    const double m = std::round(std::log(std::abs(e / cd)) / qp.log_abs_q());
    if (std::abs(qp.qpow(m) * cd - e) < 1e-6 * std::abs(e))
      throw Error(ErrorCode::ForbiddenDirection, "direction resonates with blocks (" + std::to_string(i) + "," +
                                                     std::to_string(j) + ") at m = " + std::to_string(static_cast<long>(m)));
  }
}

std::vector<int> integer_slopes(const BlockSystem& A) {
  std::vector<int> mu;
  for (const auto& b : A.diag) {
    if (b.kind != BlockKind::Const)
      throw Error(ErrorCode::Unsupported, "summation needs constant diagonal blocks z^μ A");
    mu.push_back(static_cast<int>(b.slope.num));
  }
  for (size_t i = 1; i < mu.size(); ++i)
    if (mu[i] <= mu[i - 1]) throw Error(ErrorCode::Unsupported, "summation needs strictly increasing slopes");
  return mu;
}

// Kronecker matrix of Φ(X) = Ai X Aj^{-1} on column-major vec X.
CMatrix phi_kron(const CMatrix& Ai, const CMatrix& Aj_inv) {
  const CMatrix T = Aj_inv.transpose();
  CMatrix K(Ai.rows() * T.rows(), Ai.cols() * T.cols());
  for (int a = 0; a < T.rows(); ++a)
    for (int b = 0; b < T.cols(); ++b) K.block(a * Ai.rows(), b * Ai.cols(), Ai.rows(), Ai.cols()) = T(a, b) * Ai;
  return K;
}

// Solve (s − Φ) X = B using the Schur form of Φ's Kronecker matrix.
CMatrix resolvent_solve(const Eigen::ComplexSchur<CMatrix>& schur, cplx s, const CMatrix& B) {
  const CMatrix& U = schur.matrixU();
  const CMatrix& T = schur.matrixT();
  const Eigen::Map<const CVector> b(B.data(), B.size());
  CVector y = U.adjoint() * b;
  CMatrix S = -T;
  S.diagonal().array() += s;
  y = S.triangularView<Eigen::Upper>().solve(y);
  const CVector x = U * y;
  return Eigen::Map<const CMatrix>(x.data(), B.rows(), B.cols());
}

int theta_window(const QParams& qp, int delta_max) {
  // |t_n^(δ)| ~ |q|^{−n²/(2δ)}: keep terms above e^{−45} of the peak, plus slack.
  const int n = static_cast<int>(std::ceil(std::sqrt(2.0 * delta_max * 45.0 / qp.log_abs_q()))) + 8;
  if (n > 200) throw Error(ErrorCode::WindowOverflow, "theta window too wide for this q");
  return n;
}

}  // namespace

void check_allowed_direction(const BlockSystem& A, cplx c, const QParams& qp) {
  if (c == 0.0) throw Error(ErrorCode::ZeroPoint, "direction c = 0");
  const auto mu = integer_slopes(A);
  for (int i = 0; i < A.blocks(); ++i)
    for (int j = i + 1; j < A.blocks(); ++j) {
      const auto li = eigenvalues(A.diag[static_cast<size_t>(i)].A), lj = eigenvalues(A.diag[static_cast<size_t>(j)].A);
      std::vector<cplx> ratios;
      for (cplx a : li)
        for (cplx b : lj) ratios.push_back(a / b);
      check_ratios(ratios, std::pow(c, mu[static_cast<size_t>(j)] - mu[static_cast<size_t>(i)]), qp, i, j);
    }
}

// ---------------------------------------------------------------- dense series

CMatrix DenseBlock::evaluate(cplx z) const {
  if (c.empty()) return CMatrix();
  CMatrix acc = CMatrix::Zero(c.front().rows(), c.front().cols());
  for (size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
  return acc * std::pow(z, lo);
}

namespace {

DenseBlock to_dense(const LaurentMatrix& M) {
  DenseBlock d;
  if (M.is_zero()) return d;
  d.lo = M.min_exp();
  for (int m = d.lo; m <= M.max_exp(); ++m) d.c.push_back(M.coeff(m));
  return d;
}

DenseBlock multiply(const DenseBlock& a, const DenseBlock& b) {
  DenseBlock out;
  if (a.c.empty() || b.c.empty()) return out;
  out.lo = a.lo + b.lo;
  out.c.assign(a.c.size() + b.c.size() - 1, CMatrix::Zero(a.c.front().rows(), b.c.front().cols()));
  for (size_t i = 0; i < a.c.size(); ++i)
    for (size_t j = 0; j < b.c.size(); ++j) out.c[i + j] += a.c[i] * b.c[j];
  return out;
}

// a(z) · s(z) for a scalar series s = Σ s[k] z^{slo+k}.
DenseBlock multiply(const DenseBlock& a, int slo, const std::vector<cplx>& s) {
  DenseBlock out;
  if (a.c.empty()) return out;
  out.lo = a.lo + slo;
  out.c.assign(a.c.size() + s.size() - 1, CMatrix::Zero(a.c.front().rows(), a.c.front().cols()));
  for (size_t i = 0; i < a.c.size(); ++i)
    for (size_t j = 0; j < s.size(); ++j) out.c[i + j] += a.c[i] * s[j];
  return out;
}

void add_to(DenseBlock& a, const DenseBlock& b) {
  if (b.c.empty()) return;
  if (a.c.empty()) {
    a = b;
    return;
  }
  const int lo = std::min(a.lo, b.lo), hi = std::max(a.hi(), b.hi());
  std::vector<CMatrix> c(static_cast<size_t>(hi - lo + 1), CMatrix::Zero(a.c.front().rows(), a.c.front().cols()));
  for (size_t i = 0; i < a.c.size(); ++i) c[static_cast<size_t>(a.lo - lo) + i] += a.c[i];
  for (size_t i = 0; i < b.c.size(); ++i) c[static_cast<size_t>(b.lo - lo) + i] += b.c[i];
  a.lo = lo;
  a.c = std::move(c);
}

LaurentMatrix to_laurent(const DenseBlock& d, int rows, int cols) {
  LaurentMatrix out(rows, cols);
  if (d.c.empty()) return out;
  const int cap = std::max({LaurentSeries::kDefaultCap, std::abs(d.lo), std::abs(d.hi())});
  for (int a = 0; a < rows; ++a)
    for (int b = 0; b < cols; ++b) {
      std::vector<cplx> v;
      for (const auto& m : d.c) v.push_back(m(a, b));
      out(a, b) = LaurentSeries(d.lo, std::move(v), cap);
    }
  return out;
}

// θ_{q,c}^p = Σ_{|n| ≤ N} t_n^(p) c^{−n} z^n, unpruned.
std::vector<cplx> theta_dense(const ThetaCoeffTable& table, cplx c, int p, int N) {
  std::vector<cplx> v;
  for (int n = -N; n <= N; ++n) v.push_back(table.t(p, n) * std::pow(c, -n));
  return v;
}

}  // namespace

// ---------------------------------------------------------------- results

CMatrix SummationResult::F(cplx z) const {
  CMatrix out = CMatrix::Identity(offsets.back(), offsets.back());
  const cplx th = theta_c(qp, c, z);
  for (const auto& [ij, g] : dense) {
    if (g.c.empty()) continue;
    const auto [i, j] = ij;
    out.block(offsets[static_cast<size_t>(i)], offsets[static_cast<size_t>(j)], g.c.front().rows(), g.c.front().cols()) =
        g.evaluate(z) / std::pow(th, mus[static_cast<size_t>(j)] - mus[static_cast<size_t>(i)]);
  }
  return out;
}

CMatrix SummationResult::F_inverse(cplx z) const {
  const CMatrix f = F(z);
  return f.triangularView<Eigen::Upper>().solve(CMatrix::Identity(f.rows(), f.cols()));
}

CMatrix SummationResult::block(cplx z, int i, int j) const {
  const int oi = offsets[static_cast<size_t>(i)], si = offsets[static_cast<size_t>(i) + 1] - oi;
  const int oj = offsets[static_cast<size_t>(j)], sj = offsets[static_cast<size_t>(j) + 1] - oj;
  return F(z).block(oi, oj, si, sj);
}

namespace {

SummationResult assemble(cplx c, const QParams& qp, const std::vector<int>& off, const std::vector<int>& mu,
                         std::map<std::pair<int, int>, DenseBlock> blocks) {
  SummationResult res{c, qp, off, mu, LaurentMatrix::identity(off.back()), {}, {}};
  for (const auto& [ij, g] : blocks) {
    const auto [i, j] = ij;
    const int si = off[static_cast<size_t>(i) + 1] - off[static_cast<size_t>(i)];
    const int sj = off[static_cast<size_t>(j) + 1] - off[static_cast<size_t>(j)];
    res.G.set_block(off[static_cast<size_t>(i)], off[static_cast<size_t>(j)], to_laurent(g, si, sj));
    res.poles.push_back({i, j, -c, mu[static_cast<size_t>(j)] - mu[static_cast<size_t>(i)]});
  }
  res.dense = std::move(blocks);
  return res;
}

}  // namespace

// ---------------------------------------------------------------- summation

Summer::Summer(const BlockSystem& A, const QParams& qp) : A_(A), qp_(qp) {
  A_.validate();
  mu_ = integer_slopes(A_);
  off_ = A_.offsets();
  const int gap = mu_.back() - mu_.front();
  n_theta_ = theta_window(qp_, std::max(1, gap));
  table_ = std::make_shared<ThetaCoeffTable>(qp_, std::max(1, gap), n_theta_);
  for (int i = 0; i < A_.blocks(); ++i)
    for (int j = i + 1; j < A_.blocks(); ++j) {
      PairData pd;
      pd.Aj_inv = A_.diag[static_cast<size_t>(j)].A.inverse();
      pd.schur.compute(phi_kron(A_.diag[static_cast<size_t>(i)].A, pd.Aj_inv));
      for (int t = 0; t < pd.schur.matrixT().rows(); ++t) pd.ratios.push_back(pd.schur.matrixT()(t, t));
      pairs_.emplace(std::make_pair(i, j), std::move(pd));
    }
}

SummationResult Summer::sum(cplx c) const {
  if (c == 0.0) throw Error(ErrorCode::ZeroPoint, "direction c = 0");
  const int k = A_.blocks();
  auto mu = [&](int i) { return mu_[static_cast<size_t>(i)]; };
  for (const auto& [ij, pd] : pairs_)
    check_ratios(pd.ratios, std::pow(c, mu(ij.second) - mu(ij.first)), qp_, ij.first, ij.second);

  std::map<int, std::vector<cplx>> th;
  auto theta_pow = [&](int p) -> const std::vector<cplx>& {
    auto it = th.find(p);
    if (it == th.end()) it = th.emplace(p, theta_dense(*table_, c, p, n_theta_)).first;
    return it->second;
  };

  // Upper blocks of Ã = Θ(qz)^{-1} A Θ: c^{μi} z^{−μi} θ^{μj−μi} U_ij.
  std::map<std::pair<int, int>, DenseBlock> tilde;
  for (const auto& [ij, U] : A_.upper) {
    if (U.is_zero()) continue;
    DenseBlock t = multiply(to_dense(U), -n_theta_, theta_pow(mu(ij.second) - mu(ij.first)));
    t.lo -= mu(ij.first);
    for (auto& m : t.c) m *= std::pow(c, mu(ij.first));
    tilde[ij] = std::move(t);
  }

  std::map<std::pair<int, int>, DenseBlock> G;
  for (int gap = 1; gap < k; ++gap)
    for (int i = 0; i + gap < k; ++i) {
      const int j = i + gap;
      DenseBlock W;
      if (auto it = tilde.find({i, j}); it != tilde.end()) W = it->second;
      for (int l = i + 1; l < j; ++l)
        if (auto it = tilde.find({i, l}); it != tilde.end()) add_to(W, multiply(it->second, G.at({l, j})));
      const auto& pd = pairs_.at({i, j});
      const cplx cd = std::pow(c, mu(j) - mu(i)), ci = std::pow(c, -mu(i));
      DenseBlock g = W;
      for (size_t t = 0; t < W.c.size(); ++t)
        g.c[t] = resolvent_solve(pd.schur, qp_.qpow(W.lo + static_cast<int>(t)) * cd, ci * W.c[t] * pd.Aj_inv);
      G[{i, j}] = std::move(g);
    }
  return assemble(c, qp_, off_, mu_, std::move(G));
}

SummationResult multi_slope_sum(const BlockSystem& A, cplx c, const QParams& qp) { return Summer(A, qp).sum(c); }

SummationResult algebraic_sum_two_slopes(const BlockSystem& A, cplx c, const QParams& qp) {
  A.validate();
  if (A.blocks() != 2) throw Error(ErrorCode::InvalidInput, "two-slope summation needs exactly two blocks");
  const auto mu = integer_slopes(A);
  const int delta = mu[1] - mu[0];
  const CMatrix A2i = A.diag[1].A.inverse();
  check_allowed_direction(A, c, qp);
  // Upper block written z^{μ1} U A2.
  DenseBlock U = to_dense(A.upper_or_zero(0, 1) * A2i);
  U.lo -= mu[0];
  const int n = theta_window(qp, delta);
  const ThetaCoeffTable table(qp, delta, n);
  const DenseBlock V = multiply(U, -n, theta_dense(table, c, delta, n));
  const CMatrix K = phi_kron(A.diag[0].A, A2i);
  const cplx cd = std::pow(c, delta);
  DenseBlock g = V;
  for (size_t t = 0; t < V.c.size(); ++t) {
    CMatrix S = -K;
    S.diagonal().array() += qp.qpow(V.lo + static_cast<int>(t)) * cd;
    const CVector x = S.partialPivLu().solve(Eigen::Map<const CVector>(V.c[t].data(), V.c[t].size()));
    g.c[t] = Eigen::Map<const CMatrix>(x.data(), V.c[t].rows(), V.c[t].cols());
  }
  std::map<std::pair<int, int>, DenseBlock> blocks;
  if (!g.c.empty()) blocks[{0, 1}] = std::move(g);
  return assemble(c, qp, A.offsets(), mu, std::move(blocks));
}

Cocycle stokes_cocycle(const BlockSystem& A, cplx c, cplx d, const QParams& qp) {
  const Summer s(A, qp);
  return Cocycle{s.sum(c), s.sum(d)};
}

std::vector<cplx> sample_points_avoiding(const QParams& qp, const std::vector<cplx>& spirals, int count, double radius,
                                         unsigned seed, double margin) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> arg(-kPi, kPi);
  std::vector<cplx> pts;
  for (int tries = 0; static_cast<int>(pts.size()) < count && tries < 100 * count; ++tries) {
    const cplx z = std::polar(radius, arg(gen));
    bool ok = true;
    for (cplx s : spirals) {
      const cplx rep = canonicalize(-z / s, qp).rep;
      if (std::abs(rep - 1.0) < margin || std::abs(rep / qp.q() - 1.0) < margin) ok = false;
    }
    if (ok) pts.push_back(z);
  }
  return pts;
}

}  // namespace qdx
