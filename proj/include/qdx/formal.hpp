#pragma once

// The formal (pure) Galois group: D/T/Z matrices, the conjugators G and F of
// E(r,d,c), evaluation of group elements, twisted products, the wild group
// law and the action on Ψ-symbols.

#include <string>
#include <vector>

#include "qdx/elliptic.hpp"
#include "qdx/qdmod.hpp"

namespace qdx {

CMatrix D_r(int r);  // Diag(1, ζ_r, ..., ζ_r^{r−1})
CMatrix T_r(int r);  // cyclic permutation, (T v)_i = v_{i+1}
CMatrix Z_r(int r);  // (ζ_r^{−ij})
// Integer powers of the above, negative exponents allowed.
CMatrix matrix_power(const CMatrix& M, int k);

struct FormulaireItem {
  std::string name;
  double deviation = 0.0;
};
struct FormulaireReport {
  int r = 1;
  std::vector<FormulaireItem> items;
  double max_deviation = 0.0;
};
// Z^{-1} = Z̄/r, ᵗZ = Z, D^{-1} = D̄, T^kD^l = ζ^{kl}D^lT^k for k, l ∈ [−3, 3],
// T = Z^{-1}DZ = ZD^{-1}Z^{-1}.
FormulaireReport formulaire_check(int r);

// E(r,d,c) with a chosen r-th root a of c (principal by default).
struct IrreducibleObject {
  EData e;
  cplx a;
  IrreducibleObject(const EData& e);
  IrreducibleObject(const EData& e, cplx a);
};

// G = Diag(g_j), g_j = 1/(q^{j(j−1)d/2r} a^j z_r^{jd}), and F = Z_r G, as
// matrices of Laurent series in z_r. Both conjugate E(r,d,c) in base q_r:
// G[E] = a z_r^d T_r and F[E] = a z_r^d D_r.
struct Conjugators {
  LaurentMatrix G;
  LaurentMatrix F;
};
Conjugators conjugators(const IrreducibleObject& obj, const QParams& qp);
// Pointwise values at z_r.
CMatrix conjugator_G(const IrreducibleObject& obj, const QParams& qp, cplx zr);
CMatrix conjugator_F(const IrreducibleObject& obj, const QParams& qp, cplx zr);

// φ ↔ (λ, h, γ) with t = h(1/r) and γ = γ₁^{k1}γ₂^{k2}.
struct FormalElement {
  cplx lambda = 0.0;
  cplx t = 1.0;
  int k1 = 0;
  int k2 = 0;
};

// U_m^λ = exp(λ log U_m), an exact polynomial in λ.
CMatrix unipotent_power(int m, cplx lambda);

// φ(E(r,d,c) ⊗ U_m) = G₀^{-1}(t^d γ(a) T_r^{k1} D_r^{k2·d})G₀ ⊗ U_m^λ with
// G₀ = G(z_{0,r}).
CMatrix evaluate_element(const FormalElement& phi, const IrreducibleObject& obj, const QParams& qp);
// Block diagonal evaluation on a sum of E parts.
CMatrix evaluate_element(const FormalElement& phi, const std::vector<IrreducibleObject>& parts,
                         const QParams& qp);

// (λ+λ′, t t′ ζ_r^{−k2·k1′}, k1+k1′, k2+k2′).
FormalElement multiply(const FormalElement& phi, const FormalElement& phi2, int r);
// η(γ₁^{k1}γ₂^{k2}, γ₁^{l1}γ₂^{l2}) at 1/r.
cplx eta(int k1, int k2, int l1, int l2, int r);

// (x, k1, k2) with x ∈ Q/Z stored reduced in [0, 1).
struct WildGroupElement {
  Rational x;
  int k1 = 0;
  int k2 = 0;
  WildGroupElement(Rational x = Rational(0), int k1 = 0, int k2 = 0);
  bool operator==(const WildGroupElement& o) const { return x == o.x && k1 == o.k1 && k2 == o.k2; }
};
Rational mod_one(Rational x);
WildGroupElement wild_multiply(const WildGroupElement& g, const WildGroupElement& g2, int r);

// Ψ^(0) (kind Tau) or coefficient·Ψ_l^{(δ,β)} with β a point of E_{q_r}.
struct PsiSymbol {
  enum class Kind { Tau, Graded };
  Kind kind = Kind::Graded;
  int delta = 1;
  EllipticPoint beta;
  int l = 0;
  cplx coeff = 1.0;
};

struct Generator {
  enum class Kind { H, Gamma1, Gamma2 };
  Kind kind = Kind::H;
  cplx t = 1.0;  // h(1/r) for H
};

// Right action of a generator on a symbol. H: t^δ. γ₁: γ₁(β). γ₂: γ₂(c_l^{-1})^δ,
// l → l + ℓ(δ,β) mod δ, β → ζ_r^{−δ}β, with c_l the grid point α_{l,0} in base q_r.
PsiSymbol act_on_psi(const Generator& g, const PsiSymbol& sym, const QParams& qp);
// Action of (x, k1, k2) = (x,0,0)·γ₁^{k1}·γ₂^{k2}: scalar e^{2iπδx}, then k1
// γ₁ steps, then k2 γ₂ steps (inverse steps for negative exponents).
PsiSymbol act_on_psi(const WildGroupElement& g, const PsiSymbol& sym, const QParams& qp);

}  // namespace qdx
