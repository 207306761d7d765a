#pragma once

// Ramification z = z_r^r, the μ_r-averaging projector, Hilbert-90 descent of
// τ-twisted systems and the embedding of a ramified object into the
// restriction of an unramified one.

#include <optional>
#include <vector>

#include "qdx/qdmod.hpp"

namespace qdx {

// A′(z_r) over base q_r; origin is A(z) when A′ = A(z_r^r).
struct RamifiedSystem {
  int r = 1;
  LaurentMatrix A_prime;
  std::vector<int> offsets;     // block structure, {0, n} when unstructured
  std::vector<Rational> slopes; // slopes in base q_r (r times the originals)
  std::optional<LaurentMatrix> origin;
};

RamifiedSystem ram(const BlockSystem& A, int r, const QParams& qp);
RamifiedSystem ram(const LaurentMatrix& A, int r);

// τ^j: f(z_r) ↦ f(ζ_r^j z_r), exponentwise.
LaurentMatrix tau(const LaurentMatrix& M, int r, int j = 1);

// (1/r)Σ_j G(ζ_r^j z_r): keeps the exponents divisible by r and re-indexes in z.
LaurentMatrix mu_r_project(const LaurentMatrix& G, int r);

struct Descent {
  LaurentMatrix H;    // (1/r)(I + G + τG·G + …), over z_r
  LaurentMatrix C_r;  // H[B] over z_r
  LaurentMatrix C;    // C_r re-indexed in z
  double closure = 0.0;     // ‖τ^{r−1}G ⋯ τG·G − I‖
  double invariance = 0.0;  // ‖τC_r − C_r‖ relative
  double h_relation = 0.0;  // ‖τH·G − H‖
};
// B over z_r (block upper with offsets), G: B → τB in the unipotent group of
// the block structure. Throws InvalidInput if G is not a gauge B → τB,
// CocycleNotClosed above 1e-8, DescentFailed if H is singular or C is not
// τ-invariant within 1e-9.
Descent hilbert90_descend(const RamifiedSystem& B, const LaurentMatrix& G, const QParams& qp);

struct Embedding {
  int r = 1;
  LaurentMatrix D;          // nr × nr over z
  LaurentMatrix inclusion;  // nr × n over z_r: σ(M)A′ = D(z_r^r)M
};
// D = F̄^{-1}[(Z_r ⊗ I)Diag(τ^iA′)(Z_r ⊗ I)^{-1}] with F = Diag(1, z_r, …, z_r^{r−1}).
// For r = 2 the extra gauge Diag(I, zI) gives the form (B, C; q_r z C, q_r B).
Embedding embed_in_restriction(const RamifiedSystem& A, const QParams& qp);

// max ‖A′(z_{0,r}) − A(z₀)‖ over the fibre: ω′_{z_{0,r}}∘Ram_r = ω_{z₀}.
double fiber_functor_check(const RamifiedSystem& A, const QParams& qp);

// τB = TBT^{-1}, T = Diag(T_{r_i}^{d_i} ⊗ I_{m_i}), for B the diagonalized form
// of a system with E(r_i,d_i,c_i)⊗U_{m_i} diagonals. Max coefficient deviation.
double tau_conjugation_check(const BlockSystem& A, const QParams& qp);

}  // namespace qdx
