#include "qdx/formal.hpp"

#include <cmath>
#include <numeric>

namespace qdx {

CMatrix D_r(int r) {
  CMatrix D = CMatrix::Zero(r, r);
  for (int i = 0; i < r; ++i) D(i, i) = unit_root(i, r);
  return D;
}

CMatrix T_r(int r) {
  CMatrix T = CMatrix::Zero(r, r);
  for (int i = 0; i < r; ++i) T(i, (i + 1) % r) = 1.0;
  return T;
}

CMatrix Z_r(int r) {
  CMatrix Z(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) Z(i, j) = unit_root(-static_cast<long>(i) * j, r);
  return Z;
}

CMatrix matrix_power(const CMatrix& M, int k) {
  CMatrix base = k >= 0 ? M : CMatrix(M.inverse());
  CMatrix out = CMatrix::Identity(M.rows(), M.cols());
  for (int n = std::abs(k); n > 0; n >>= 1) {
    if (n & 1) out = out * base;
    base = base * base;
  }
  return out;
}

FormulaireReport formulaire_check(int r) {
  if (r < 1) throw Error(ErrorCode::InvalidInput, "r must be positive");
  FormulaireReport rep;
  rep.r = r;
  const CMatrix D = D_r(r), T = T_r(r), Z = Z_r(r);
  const CMatrix Zi = Z.inverse();
  auto add = [&](const std::string& name, double dev) {
    rep.items.push_back({name, dev});
    rep.max_deviation = std::max(rep.max_deviation, dev);
  };
  add("Z^-1 = conj(Z)/r", (Zi - Z.conjugate() / static_cast<double>(r)).cwiseAbs().maxCoeff());
  add("Z^T = Z", (Z.transpose() - Z).cwiseAbs().maxCoeff());
  add("D^-1 = conj(D)", (D.inverse() - D.conjugate()).cwiseAbs().maxCoeff());
  double dev = 0.0;
  for (int k = -3; k <= 3; ++k)
    for (int l = -3; l <= 3; ++l) {
      const CMatrix lhs = matrix_power(T, k) * matrix_power(D, l);
      const CMatrix rhs = unit_root(static_cast<long>(k) * l, r) * matrix_power(D, l) * matrix_power(T, k);
      dev = std::max(dev, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  add("T^k D^l = zeta^kl D^l T^k", dev);
  add("T = Z^-1 D Z", (T - Zi * D * Z).cwiseAbs().maxCoeff());
  add("T = Z D^-1 Z^-1", (T - Z * D.inverse() * Zi).cwiseAbs().maxCoeff());
  add("Z T Z^-1 = D", (Z * T * Zi - D).cwiseAbs().maxCoeff());
  return rep;
}

IrreducibleObject::IrreducibleObject(const EData& e_) : e(e_), a(std::pow(e_.c, 1.0 / e_.r)) {}

IrreducibleObject::IrreducibleObject(const EData& e_, cplx a_) : e(e_), a(a_) {
  if (std::abs(std::pow(a, e.r) - e.c) > 1e-9 * std::abs(e.c))
    throw Error(ErrorCode::InvalidInput, "a is not an r-th root of c");
}

namespace {

// Coefficient of g_j: 1/(q^{j(j−1)d/2r} a^j).
cplx g_coeff(const IrreducibleObject& obj, const QParams& qp, int j) {
  const int r = obj.e.r, d = obj.e.d;
  return 1.0 / (qp.qpow(0.5 * j * (j - 1) * d / r) * std::pow(obj.a, j));
}

}  // namespace

Conjugators conjugators(const IrreducibleObject& obj, const QParams& qp) {
  const int r = obj.e.r;
  std::vector<cplx> c(r);
  std::vector<int> k(r);
  for (int j = 0; j < r; ++j) {
    c[j] = g_coeff(obj, qp, j);
    k[j] = -j * obj.e.d;
  }
  Conjugators out;
  out.G = LaurentMatrix::diag_monomials(c, k);
  out.F = Z_r(r) * out.G;
  return out;
}

CMatrix conjugator_G(const IrreducibleObject& obj, const QParams& qp, cplx zr) {
  const int r = obj.e.r;
  CMatrix G = CMatrix::Zero(r, r);
  for (int j = 0; j < r; ++j) G(j, j) = g_coeff(obj, qp, j) * std::pow(zr, -j * obj.e.d);
  return G;
}

CMatrix conjugator_F(const IrreducibleObject& obj, const QParams& qp, cplx zr) {
  return Z_r(obj.e.r) * conjugator_G(obj, qp, zr);
}

CMatrix unipotent_power(int m, cplx lambda) {
  return nilpotent_exp(CMatrix(lambda * nilpotent_log(jordan_unipotent(m))));
}

namespace {

cplx gamma_value(const FormalElement& phi, cplx a, const QParams& qp) {
  return std::pow(character_gamma(1, a, qp), phi.k1) * std::pow(character_gamma(2, a, qp), phi.k2);
}

}  // namespace

CMatrix evaluate_element(const FormalElement& phi, const IrreducibleObject& obj, const QParams& qp) {
  const int r = obj.e.r, d = obj.e.d;
  const CMatrix G0 = conjugator_G(obj, qp, qp.z0_root(r));
  const CMatrix core = std::pow(phi.t, d) * gamma_value(phi, obj.a, qp) * matrix_power(T_r(r), phi.k1) *
                       matrix_power(D_r(r), phi.k2 * d);
  const CMatrix E = G0.inverse() * core * G0;
  const CMatrix U = unipotent_power(obj.e.m, phi.lambda);
  CMatrix out(E.rows() * U.rows(), E.cols() * U.cols());
  for (int i = 0; i < E.rows(); ++i)
    for (int j = 0; j < E.cols(); ++j) out.block(i * U.rows(), j * U.cols(), U.rows(), U.cols()) = E(i, j) * U;
  return out;
}

CMatrix evaluate_element(const FormalElement& phi, const std::vector<IrreducibleObject>& parts, const QParams& qp) {
  int n = 0;
  for (const auto& p : parts) n += p.e.size();
  CMatrix out = CMatrix::Zero(n, n);
  int off = 0;
  for (const auto& p : parts) {
    out.block(off, off, p.e.size(), p.e.size()) = evaluate_element(phi, p, qp);
    off += p.e.size();
  }
  return out;
}

cplx eta(int k1, int k2, int l1, int l2, int r) {
  (void)k1;
  (void)l2;
  return unit_root(-static_cast<long>(k2) * l1, r);
}

FormalElement multiply(const FormalElement& phi, const FormalElement& phi2, int r) {
  FormalElement out;
  out.lambda = phi.lambda + phi2.lambda;
  out.t = phi.t * phi2.t * eta(phi.k1, phi.k2, phi2.k1, phi2.k2, r);
  out.k1 = phi.k1 + phi2.k1;
  out.k2 = phi.k2 + phi2.k2;
  return out;
}

Rational mod_one(Rational x) {
  long n = x.num % x.den;
  if (n < 0) n += x.den;
  return Rational(n, x.den);
}

WildGroupElement::WildGroupElement(Rational x_, int k1_, int k2_) : x(mod_one(x_)), k1(k1_), k2(k2_) {}

WildGroupElement wild_multiply(const WildGroupElement& g, const WildGroupElement& g2, int r) {
  return WildGroupElement(g.x + g2.x - Rational(static_cast<long>(g.k2) * g2.k1, r), g.k1 + g2.k1, g.k2 + g2.k2);
}

namespace {

cplx grid_c(int delta, const EllipticPoint& beta, int l, const QParams& qp) {
  return root_grid(delta, beta, qp).at(l, 0);
}

int mod(int a, int n) { return ((a % n) + n) % n; }

PsiSymbol gamma2_step(const PsiSymbol& s, const QParams& qp) {
  const int r = qp.r();
  const cplx cl = grid_c(s.delta, s.beta, s.l, qp);
  PsiSymbol out = s;
  out.coeff *= std::pow(character_gamma(2, 1.0 / cl, qp), s.delta);
  out.l = mod(s.l + shift_ell(s.delta, s.beta, r), s.delta);
  out.beta = canonicalize(unit_root(-s.delta, r) * s.beta.rep, qp, Base::QR);
  return out;
}

PsiSymbol gamma2_inverse_step(const PsiSymbol& s, const QParams& qp) {
  const int r = qp.r();
  PsiSymbol out = s;
  out.beta = canonicalize(unit_root(s.delta, r) * s.beta.rep, qp, Base::QR);
  out.l = mod(s.l - shift_ell(s.delta, out.beta, r), s.delta);
  const cplx cl = grid_c(s.delta, out.beta, out.l, qp);
  out.coeff /= std::pow(character_gamma(2, 1.0 / cl, qp), s.delta);
  return out;
}

}  // namespace

PsiSymbol act_on_psi(const Generator& g, const PsiSymbol& sym, const QParams& qp) {
  if (sym.kind == PsiSymbol::Kind::Tau) return sym;
  PsiSymbol s = sym;
  s.beta = canonicalize(sym.beta.rep, qp, Base::QR);
  s.l = mod(sym.l, sym.delta);
  switch (g.kind) {
    case Generator::Kind::H:
      s.coeff *= std::pow(g.t, s.delta);
      return s;
    case Generator::Kind::Gamma1:
      s.coeff *= character_gamma(1, s.beta.rep, qp);
      return s;
    case Generator::Kind::Gamma2:
      return gamma2_step(s, qp);
  }
  return s;
}

PsiSymbol act_on_psi(const WildGroupElement& g, const PsiSymbol& sym, const QParams& qp) {
  if (sym.kind == PsiSymbol::Kind::Tau) return sym;
  PsiSymbol s = sym;
  s.beta = canonicalize(sym.beta.rep, qp, Base::QR);
  s.l = mod(sym.l, sym.delta);
  s.coeff *= unit_root(static_cast<long>(s.delta) * g.x.num, g.x.den);
  const cplx g1 = character_gamma(1, s.beta.rep, qp);
  s.coeff *= std::pow(g1, g.k1);
  for (int k = 0; k < g.k2; ++k) s = gamma2_step(s, qp);
  for (int k = 0; k > g.k2; --k) s = gamma2_inverse_step(s, qp);
  return s;
}

}  // namespace qdx
