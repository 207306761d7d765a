#pragma once

// q-alien derivatives Δ_α^{(δ,β)}: closed-form residues, the numeric residue
// oracle, pairwise reduction, dilation covariance and canonical bases.

#include <optional>
#include <vector>

#include "qdx/elliptic.hpp"
#include "qdx/formal.hpp"
#include "qdx/qdmod.hpp"
#include "qdx/stokes.hpp"
#include "qdx/theta.hpp"

namespace qdx {

struct AlienBlock {
  int delta = 1;
  EllipticPoint alpha;
  EllipticPoint beta;
  CMatrix N;       // block (i, j) of Δ_α, the only nonzero one
  int i = 0, j = 1;
  cplx c;          // representative of α used for the θ factors
  int l = -1, m = -1;  // root grid labels when the block comes from a grid
  // Strictly upper block matrix of size offsets.back().
  CMatrix embed(const std::vector<int>& offsets) const;
};

// A = (a z^k, u; 0, b z^{k+δ}).
struct TwoByTwo {
  cplx a = 1.0;
  int delta = 1;
  LaurentSeries u;
  cplx b = 1.0;
  int k = 0;
  BlockSystem system() const;
};

// Plain: f_m(c) = z₀^m v_m(c)/(b θ(z₀/c)^δ). Shifted: the same with (z₀/q)^m.
enum class Numerator { Plain, Shifted };

// Δ at the class of c for A (N = f_{m′}(c)/(δd), q^{m′}c^δ = d = a/b); zero when
// c is not resonant.
cplx alien_two_by_two_at(const TwoByTwo& A, cplx c, const QParams& qp, Numerator num = Numerator::Plain);
// The δ² blocks Δ_{α_{l,m}} on root_grid(δ, class of d^{-1}).
std::vector<AlienBlock> alien_two_by_two(const TwoByTwo& A, const QParams& qp, Numerator num = Numerator::Plain);

// Res_q at c0 of c ↦ F_c̄(z₀)_{01} from the two-slope summation, by circle sampling.
cplx alien_oracle_two_by_two(const TwoByTwo& A, cplx c0, const QParams& qp, int samples = 256);

// Relative contour radius for a residue at c0: 0.3 × distance to the nearest
// other pole among q^m c^δ = ρ (ρ in ratios) and −z₀q^Z, capped at 0.2.
double residue_radius(cplx c0, int delta, const std::vector<cplx>& ratios, const QParams& qp);

// Δ_α^{(i,j)} for every block pair of A with a resonance at α. Constant blocks
// use the closed form when both are diagonalizable and the numeric residue
// otherwise; E(r,d,c) blocks are conjugated by F_{a,r,d} into diagonal form in
// base q_r and transported back by F₀ = F(z_{0,r}). α lives in base q_r when
// some block is ramified (r = lcm of the denominators), in base q otherwise.
std::vector<AlienBlock> alien_general(const BlockSystem& A, const EllipticPoint& alpha, const QParams& qp);
// Sum of the embedded blocks.
CMatrix alien_matrix(const BlockSystem& A, const EllipticPoint& alpha, const QParams& qp);
// Every nonzero Δ_α over the resonance set.
std::vector<AlienBlock> alien_all(const BlockSystem& A, const QParams& qp);
// Direct definition on the full system: Res_q over d = α of log(F_c^{-1}F_d)(z₀),
// numerically, for constant integral-slope blocks.
CMatrix alien_direct(const BlockSystem& A, cplx alpha, cplx c, const QParams& qp);

// Working data of the E-block reduction: B = F[A'] over z_r.
struct RamifiedReduction {
  int r = 1;
  QParams qp_r{cplx(0.0, -1.0)};  // base q_r with base point z_{0,r}
  BlockSystem B;           // constant blocks a_i D_{r_i} ⊗ U_{m_i}, integral slopes
  LaurentMatrix F;         // B = (σ_{q_r}F) A(z_r^r) F^{-1}
  CMatrix F0;              // F(z_{0,r}), block diagonal
};
RamifiedReduction reduce_ramified(const BlockSystem& A, const QParams& qp);

// Dilation: max relative discrepancy between the blocks of A(λz) and the
// prediction (θ(z₀/c)/θ(z₀/c′))^δ λ^m N on the classes c′ = λ^{-1}c.
double alien_dilated(const TwoByTwo& A, cplx lambda, const QParams& qp);

// Ψ_{l,m}(u) := θ(z₀/c_{l,m})^δ Δ_{α_{l,m}}(A_u), A_u = (a, u; 0, z^δ), on the grid of β = class(a^{-1}).
cplx psi_value(int delta, cplx a, int l, int m, const LaurentSeries& u, const QParams& qp);
// Ψ_{l+1,m}(u_j) = ζ_δ^{m−j}Ψ_{l,m}(u_j). Max relative discrepancy.
double root_of_unity_shift_check(int delta, cplx a, const QParams& qp);
// Ψ_{l,m+1}(u_{j+1}) = [a/z₀^δ]_{m=δ−1}[1/a]_{j=δ−1} z₀ q_δ^{m−j} Ψ_{l,m}(u_j), indices mod δ.
double q_delta_shift_check(int delta, cplx a, const QParams& qp);

struct CanonicalBasisEntry {
  int l = 0;
  cplx c;                      // c_l = c_{l,0}
  EllipticPoint alpha;
  cplx theta_factor;           // θ(z₀/c_l)^δ
  std::vector<cplx> delta_on_u;  // Δ_l(u_j), j = 0..δ−1
  std::vector<cplx> psi_on_u;    // Ψ_l(u_j)
};
struct CanonicalBasis {
  int delta = 1;
  cplx a;
  EllipticPoint beta;
  std::vector<CanonicalBasisEntry> entries;
  CMatrix M;                     // (Ψ_{i,0}(u_j))
  double vandermonde_residual = 0.0;  // ‖M − V·Diag(Ψ_{0,0}(u_j))‖/‖M‖
  double condition = 0.0;
};
// Throws BadQValue when M is numerically singular.
CanonicalBasis canonical_basis(int delta, cplx a, const QParams& qp);
CanonicalBasis canonical_basis(int delta, const EllipticPoint& beta, const QParams& qp);

// ⟨Δ_{α_{l,m}}, u⟩ = Δ_{α_{l,m}}(A_u) as a δ×δ matrix indexed by (l, m).
CMatrix pairing(int delta, cplx a, const LaurentSeries& u, const QParams& qp);
// Rank of u ↦ (⟨Δ_{l,0}, u⟩)_l over K_{0,δ} = span(1, ..., z^{δ−1}).
int pairing_rank(int delta, cplx a, const QParams& qp, double tol = 1e-10);

// Layer additivity Δ_α(A^{≤δ}) = Δ_α(A^{≤δ−1}) + Δ_α^{(δ)}(A^{(δ)}) on levels ≤ δ,
// with Δ from the direct definition. Returns the max relative discrepancy.
double layer_additivity(const BlockSystem& A, cplx alpha, int delta, cplx c, const QParams& qp);
// Keep upper blocks with level μ_j − μ_i ≤ delta (A^{≤δ}) or equal to delta (A^{(δ)}).
BlockSystem truncate_levels(const BlockSystem& A, int delta, bool exact);

// Galois action cross-check on a two-block system with E(r_i,d_i,c_i)⊗U_{m_i} diagonals:
// max relative discrepancy between φ(A)^{-1}Δφ(A) and the predicted action over
// the resonance set, for h (t), γ₁, γ₂ (with γ̄₂^δ and the ζ̄_r shift) and the
// Ψ-symbol rule; commutation is ‖[U^λ, Δ]‖/(‖U^λ‖‖Δ‖).
struct ActionCheck {
  int r = 1;
  int delta = 0;
  int points = 0;
  double h = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double psi_gamma2 = 0.0;
  double commutation = 0.0;
  double max() const;
};
ActionCheck act_unramified_check(const BlockSystem& A, cplx t, const QParams& qp);
// φ(A) on the diagonal of an E-block system, h(1/r) = t with r the lcm of the parts.
CMatrix evaluate_on_system(const FormalElement& phi, const BlockSystem& A, const QParams& qp);

}  // namespace qdx
