#pragma once

// Points of E_q = C*/q^Z, root grids and characters.

#include <functional>
#include <vector>

#include "qdx/numkernel.hpp"

namespace qdx {

// Working base: q itself, or q_r = q^{1/r} with r taken from QParams.
enum class Base { Q, QR };

struct EllipticPoint {
  cplx rep;  // canonical: 1 ≤ |rep| < |q_base|
  Base base = Base::Q;
};

cplx base_q(const QParams& qp, Base base);
double base_log_abs_q(const QParams& qp, Base base);

EllipticPoint canonicalize(cplx c, const QParams& qp, Base base = Base::Q);
// c1 ≡ c2 mod q_base^Z within tol (relative to |c1|).
bool same_class(cplx c1, cplx c2, const QParams& qp, Base base = Base::Q, double tol = 1e-9);
bool same_point(const EllipticPoint& a, const EllipticPoint& b, const QParams& qp, double tol = 1e-9);

// δ-th roots of d = e^{-1}, e the canonical representative of β:
// c has argument in (−2π/δ, 0] and c_{l,m} = ζ_δ^{-l} q_δ^{-m} c.
struct RootGrid {
  int delta = 1;
  Base base = Base::Q;
  cplx d;
  cplx c;
  std::vector<cplx> grid;  // row-major in (l, m)
  cplx at(int l, int m) const;
};
RootGrid root_grid(int delta, const EllipticPoint& beta, const QParams& qp);

// ℓ(δ,β) = floor(φ/2π − δ/r), φ = arg of the canonical representative in [0, 2π).
int shift_ell(int delta, const EllipticPoint& beta, int r);

// γ₁(u q^y) = u, γ₂(u q^y) = e^{2iπy}; y = log|c|/log|q| is taken relative to q.
cplx character_gamma(int kind, cplx c, const QParams& qp);

// (1/c0) res_{c=c0} phi, trapezoidal rule on |c − c0| = rel_radius·|c0|.
cplx residue_on_Eq(const std::function<cplx(cplx)>& phi, cplx c0, double rel_radius = 0.05,
                   int samples = 256);
// Same for matrix-valued maps.
CMatrix residue_on_Eq(const std::function<CMatrix(cplx)>& phi, cplx c0, double rel_radius = 0.05,
                      int samples = 256);

}  // namespace qdx
