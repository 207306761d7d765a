#include "qdx/elliptic.hpp"

#include <cmath>

namespace qdx {

cplx base_q(const QParams& qp, Base base) { return base == Base::Q ? qp.q() : qp.qr(); }

double base_log_abs_q(const QParams& qp, Base base) {
  return base == Base::Q ? qp.log_abs_q() : qp.log_abs_q() / qp.r();
}

namespace {

double base_exponent(const QParams& qp, Base base) { return base == Base::Q ? 1.0 : 1.0 / qp.r(); }

}  // namespace

EllipticPoint canonicalize(cplx c, const QParams& qp, Base base) {
  if (c == 0.0) throw Error(ErrorCode::ZeroPoint, "0 has no class in E_q");
  const double t = std::log(std::abs(c)) / base_log_abs_q(qp, base);
  // The small slack keeps |c| = |q|^k (up to rounding) on the closed end.
  const double k = std::floor(t + 1e-11);
  if (k == 0.0) return {c, base};
  return {c * qp.qpow(-k * base_exponent(qp, base)), base};
}

bool same_class(cplx c1, cplx c2, const QParams& qp, Base base, double tol) {
  if (c1 == 0.0 || c2 == 0.0) return c1 == c2;
  const double k = std::round(std::log(std::abs(c1 / c2)) / base_log_abs_q(qp, base));
  const cplx shifted = c2 * qp.qpow(k * base_exponent(qp, base));
  return std::abs(c1 - shifted) <= tol * std::max(1.0, std::abs(c1));
}

bool same_point(const EllipticPoint& a, const EllipticPoint& b, const QParams& qp, double tol) {
  return a.base == b.base && same_class(a.rep, b.rep, qp, a.base, tol);
}

cplx RootGrid::at(int l, int m) const {
  l = ((l % delta) + delta) % delta;
  return grid[static_cast<size_t>(l * delta + m)];
}

RootGrid root_grid(int delta, const EllipticPoint& beta, const QParams& qp) {
  if (delta < 1) throw Error(ErrorCode::DomainError, "delta must be positive");
  RootGrid g;
  g.delta = delta;
  g.base = beta.base;
  const cplx e = canonicalize(beta.rep, qp, beta.base).rep;
  g.d = 1.0 / e;
  double phi = std::arg(e);
  if (phi < 0.0) phi += 2.0 * kPi;
  if (phi >= 2.0 * kPi) phi -= 2.0 * kPi;
  // arg d = −φ ∈ (−2π, 0], so c = |d|^{1/δ} e^{−iφ/δ} has argument in (−2π/δ, 0].
  g.c = std::polar(std::pow(std::abs(g.d), 1.0 / delta), -phi / delta);
  const double qexp = base_exponent(qp, beta.base) / delta;  // q_δ = q_base^{1/δ}
  g.grid.resize(static_cast<size_t>(delta * delta));
  for (int l = 0; l < delta; ++l)
    for (int m = 0; m < delta; ++m)
      g.grid[static_cast<size_t>(l * delta + m)] = unit_root(-l, delta) * qp.qpow(-m * qexp) * g.c;
  return g;
}

int shift_ell(int delta, const EllipticPoint& beta, int r) {
  double phi = std::arg(beta.rep);
  if (phi < 0.0) phi += 2.0 * kPi;
  if (phi >= 2.0 * kPi) phi -= 2.0 * kPi;
  return static_cast<int>(std::floor(phi / (2.0 * kPi) - static_cast<double>(delta) / r));
}

cplx character_gamma(int kind, cplx c, const QParams& qp) {
  if (c == 0.0) throw Error(ErrorCode::ZeroPoint, "character at 0");
  double y = std::log(std::abs(c)) / qp.log_abs_q();
  if (std::abs(std::abs(c) - 1.0) < 4e-16) y = 0.0;
  if (kind == 1) return c * qp.qpow(-y);
  if (kind == 2) return std::polar(1.0, 2.0 * kPi * y);
  throw Error(ErrorCode::InvalidInput, "character kind must be 1 or 2");
}

namespace {

template <class T, class Fn>
T trapezoid_residue(const Fn& phi, cplx c0, double rel_radius, int samples, T zero) {
  if (c0 == 0.0) throw Error(ErrorCode::ZeroPoint, "residue at 0");
  double rho = rel_radius * std::abs(c0);
  for (int attempt = 0; attempt < 4; ++attempt, rho *= 0.5) {
    T acc = zero;
    bool ok = true;
    for (int k = 0; k < samples && ok; ++k) {
      const cplx w = std::polar(rho, 2.0 * kPi * k / samples);
      T v = phi(c0 + w);
      if constexpr (std::is_same_v<T, cplx>) {
        ok = std::isfinite(v.real()) && std::isfinite(v.imag());
        acc += v * w;
      } else {
        ok = v.allFinite();
        acc += v * w;
      }
    }
    if (ok) return acc / (static_cast<double>(samples) * c0);
  }
  throw Error(ErrorCode::PoleOnCircle, "non-finite samples on every trial circle");
}

}  // namespace

cplx residue_on_Eq(const std::function<cplx(cplx)>& phi, cplx c0, double rel_radius, int samples) {
  return trapezoid_residue<cplx>(phi, c0, rel_radius, samples, cplx(0.0));
}

CMatrix residue_on_Eq(const std::function<CMatrix(cplx)>& phi, cplx c0, double rel_radius, int samples) {
  const CMatrix first = phi(c0 + std::polar(rel_radius * std::abs(c0), 0.0));
  return trapezoid_residue<CMatrix>(phi, c0, rel_radius, samples,
                                    CMatrix::Zero(first.rows(), first.cols()).eval());
}

}  // namespace qdx
