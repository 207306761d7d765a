#pragma once

// Resonance sets, allowed directions, algebraic summation and Stokes cocycles
// for block systems with integral slopes and constant diagonal blocks.

#include <functional>
#include <memory>
#include <vector>

#include "qdx/elliptic.hpp"
#include "qdx/qdmod.hpp"
#include "qdx/theta.hpp"

namespace qdx {

struct ResonancePoint {
  EllipticPoint point;
  int i = 0, j = 0;       // block pair
  cplx lambda_i, lambda_j;  // eigenvalues with q^m c^δ = λ_i/λ_j
};

struct ResonanceSet {
  std::vector<ResonancePoint> points;
  Base base = Base::Q;
  bool contains(cplx c, const QParams& qp, double tol = 1e-9) const;
};

// Classes c̄ with q^m c^{μ_j−μ_i} = λ_i/λ_j. Constant blocks give points of E_q;
// E(r,d,c) blocks are read through their diagonal form a z_r^{d} D_r in base q_r.
// Eigenvalues with multiplicity; values within tol (relative) of each other are
// replaced by their cluster mean, which undoes the O(eps^{1/k}) splitting of
// k×k Jordan blocks.
std::vector<cplx> clustered_eigenvalues(const CMatrix& M, double tol = 1e-4);

ResonanceSet resonance_set(const BlockSystem& A0, const QParams& qp);

// Π_λ for Φ(X) = P X Q^{-1}, P and Q block diagonal with one eigenvalue per block.
struct CharBlocks {
  CMatrix M;
  std::vector<int> sizes;
};
std::function<CMatrix(const CMatrix&)> spectral_projector(const CharBlocks& P, const CharBlocks& Q, cplx lambda,
                                                          double tol = 1e-9);

// Throws ForbiddenDirection when some q^m c^δ is within 1e-6 relative of an
// eigenvalue ratio λ_i/λ_j of a block pair at level δ.
void check_allowed_direction(const BlockSystem& A, cplx c, const QParams& qp);

struct PoleCertificate {
  int i = 0, j = 0;
  cplx spiral;    // poles on [−c; q]
  int max_order;  // μ_j − μ_i
};

// Matrix Laurent series Σ c[k] z^{lo+k}, kept unpruned so that evaluation off
// the unit circle keeps the small tail coefficients.
struct DenseBlock {
  int lo = 0;
  std::vector<CMatrix> c;
  int hi() const { return lo + static_cast<int>(c.size()) - 1; }
  CMatrix evaluate(cplx z) const;
};

// F_c̄ = Θ G Θ^{-1} with G entire on C*: F_ij = G_ij / θ_{q,c}^{μ_j−μ_i}.
struct SummationResult {
  cplx c;
  QParams qp;
  std::vector<int> offsets;
  std::vector<int> mus;
  LaurentMatrix G;  // entire part, unipotent block upper triangular (pruned)
  std::map<std::pair<int, int>, DenseBlock> dense;  // unpruned upper blocks of G, used for evaluation
  std::vector<PoleCertificate> poles;

  CMatrix F(cplx z) const;
  CMatrix F_inverse(cplx z) const;
  // Upper block (i, j) of F.
  CMatrix block(cplx z, int i, int j) const;
};

// Pair-independent data reused across many directions c.
class Summer {
 public:
  Summer(const BlockSystem& A, const QParams& qp);
  SummationResult sum(cplx c) const;
  const BlockSystem& system() const { return A_; }
  const QParams& qparams() const { return qp_; }
  int theta_terms() const { return n_theta_; }

 private:
  BlockSystem A_;
  QParams qp_;
  std::vector<int> mu_;
  std::vector<int> off_;
  int n_theta_;
  std::shared_ptr<ThetaCoeffTable> table_;
  // Schur form of the Kronecker matrix of Φ_{A_i,A_j} per pair.
  struct PairData {
    Eigen::ComplexSchur<CMatrix> schur;
    CMatrix Aj_inv;
    std::vector<cplx> ratios;  // Sp Φ
  };
  std::map<std::pair<int, int>, PairData> pairs_;
};

// Multi-slope summation through the θ-transform (any number of integral slopes).
SummationResult multi_slope_sum(const BlockSystem& A, cplx c, const QParams& qp);

// Two slopes: f = θ_{q,c}^{−δ} Σ_m (q^m c^δ − Φ_{A1,A2})^{-1}(V_m),
// V = θ_{q,c}^δ U with the upper block written z^{μ1} U A2.
SummationResult algebraic_sum_two_slopes(const BlockSystem& A, cplx c, const QParams& qp);

struct Cocycle {
  SummationResult Fc, Fd;
  CMatrix eval(cplx z) const { return Fc.F_inverse(z) * Fd.F(z); }
};
Cocycle stokes_cocycle(const BlockSystem& A, cplx c, cplx d, const QParams& qp);

// Evaluation points on |z| = |z0| kept 0.05 (in log-canonical distance) away from the given spirals.
std::vector<cplx> sample_points_avoiding(const QParams& qp, const std::vector<cplx>& spirals, int count,
                                         double radius, unsigned seed = 7, double margin = 0.05);

}  // namespace qdx
