#pragma once

// Block q-difference systems, gauge action, Newton data and the
// Birkhoff-Guenther normal form for integral slopes.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qdx/numkernel.hpp"

namespace qdx {

struct Rational {
  long num = 0;
  long den = 1;
  Rational(long n = 0, long d = 1);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_integer() const { return den == 1; }
  std::string str() const;
  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
  friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
  friend bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }
  friend bool operator<=(Rational a, Rational b) { return !(b < a); }
};

struct NewtonData {
  std::vector<Rational> slopes;  // strictly increasing
  std::vector<int> mults;
  int dim() const;
  void validate() const;  // throws InvalidInput
  bool operator==(const NewtonData& o) const { return slopes == o.slopes && mults == o.mults; }
};

// Tensor and extension rules on Newton data.
NewtonData newton_tensor(const NewtonData& a, const NewtonData& b);
NewtonData newton_extension(const NewtonData& sub, const NewtonData& quot);
// Slopes of A(z_r^r): rμ_i, multiplicities unchanged.
NewtonData newton_ramify(const NewtonData& n, int r);

// E(r,d,c) ⊗ U_m: r×r companion matrix with bottom-left u = q^{d(r−1)/2} c z^d.
struct EData {
  int r = 1;
  int d = 0;
  cplx c = 1.0;
  int m = 1;
  Rational slope() const { return Rational(d, r); }
  int size() const { return r * m; }
};

// Standard unipotent Jordan block U_m.
CMatrix jordan_unipotent(int m);
LaurentMatrix e_matrix(const EData& e, const QParams& qp);

enum class BlockKind { Const, E, Laurent };

// A pure isoclinic diagonal block: z^μ·A (Const), Diag of E(r,d,c)⊗U_m (E),
// or an explicit declared-pure Laurent matrix (Laurent).
struct DiagBlock {
  BlockKind kind = BlockKind::Const;
  Rational slope;
  CMatrix A;
  std::vector<EData> parts;
  LaurentMatrix M;

  static DiagBlock constant(int mu, const CMatrix& A);
  static DiagBlock e_sum(const std::vector<EData>& parts);
  static DiagBlock laurent(Rational slope, const LaurentMatrix& M);

  int size() const;
  LaurentMatrix matrix(const QParams& qp) const;
};

struct BlockSystem {
  std::vector<DiagBlock> diag;
  std::map<std::pair<int, int>, LaurentMatrix> upper;  // (i, j) with i < j

  int blocks() const { return static_cast<int>(diag.size()); }
  int dim() const;
  std::vector<int> offsets() const;  // size blocks()+1
  NewtonData newton() const;
  LaurentMatrix matrix(const QParams& qp) const;
  LaurentMatrix upper_or_zero(int i, int j) const;
  // Checks block sizes, slope order and invertibility of constant blocks.
  void validate() const;
};

// B = (σ_q F) A F^{-1}.
LaurentMatrix gauge(const LaurentMatrix& F, const LaurentMatrix& A, const QParams& qp,
                    const std::vector<int>& offsets);
// Gauge by an element of 𝔊_{A0}: diagonal blocks are kept and the upper blocks re-read.
BlockSystem gauge(const LaurentMatrix& F, const BlockSystem& A, const QParams& qp);

// Inverse of a block upper-triangular F whose diagonal blocks have one
// exponent per column (graded part times unipotent). Throws SingularGauge.
LaurentMatrix block_inverse(const LaurentMatrix& F, const std::vector<int>& offsets);

struct GaugeCheck {
  bool ok = false;
  double residual = 0.0;
};
// max coefficient of (σ_q F)A − BF.
GaugeCheck is_gauge_between(const LaurentMatrix& F, const LaurentMatrix& A, const LaurentMatrix& B,
                            const QParams& qp, double tol = 1e-10);
// Relative pointwise residual ‖F(qz)A(z) − B(z)F(z)‖ / (‖F(qz)A(z)‖ + ‖B(z)F(z)‖) over pts.
template <class FFn, class AFn, class BFn>
GaugeCheck is_gauge_between_at(const FFn& F, const AFn& A, const BFn& B, const QParams& qp,
                               const std::vector<cplx>& pts, double tol = 1e-9) {
  GaugeCheck g;
  for (cplx z : pts) {
    const CMatrix lhs = F(qp.q() * z) * A(z);
    const CMatrix rhs = B(z) * F(z);
    const double scale = lhs.norm() + rhs.norm();
    g.residual = std::max(g.residual, (lhs - rhs).norm() / (scale > 0.0 ? scale : 1.0));
  }
  g.ok = g.residual < tol;
  return g;
}

bool is_member_of_G_A0(const LaurentMatrix& F, const std::vector<int>& offsets, double tol = 0.0);

// Module slopes are the negatives of the lower hull's geometric slopes.
NewtonData newton_polygon_scalar(const std::vector<std::pair<int, int>>& coeff_valuations);
inline NewtonData newton_of_block(const BlockSystem& A) { return A.newton(); }

BlockSystem graded(const BlockSystem& A);
// gr of a block morphism: zero F_{j,i} unless ν_j = μ_i.
LaurentMatrix graded_morphism(const LaurentMatrix& F, const std::vector<Rational>& row_slopes,
                              const std::vector<int>& row_sizes, const std::vector<Rational>& col_slopes,
                              const std::vector<int>& col_sizes);

struct NormalForm {
  BlockSystem normal;  // A_V
  LaurentMatrix F;     // F[A_U] = A_V, F ∈ 𝔊_{A0}
};
NormalForm bg_normalize(const BlockSystem& A, const QParams& qp);
// Σ_{i<j} r_i r_j (μ_j − μ_i).
long normal_form_dimension(const NewtonData& n);
// True when every V_{i,j} is supported on [μ_i, μ_j).
bool in_normal_form(const BlockSystem& A);

enum class GevreyMode { Geq, Gt, Layer };
LaurentMatrix gevrey_truncate(const LaurentMatrix& F, const BlockSystem& shape, Rational delta, GevreyMode mode);
// Sorted distinct levels μ_j − μ_i of the nonzero upper blocks of F.
std::vector<Rational> gevrey_levels(const LaurentMatrix& F, const BlockSystem& shape);

// Finite log/exp series for unipotent I + X, X nilpotent.
LaurentMatrix nilpotent_log(const LaurentMatrix& unipotent);
LaurentMatrix nilpotent_exp(const LaurentMatrix& nilpotent);
CMatrix nilpotent_log(const CMatrix& unipotent);
CMatrix nilpotent_exp(const CMatrix& nilpotent);

}  // namespace qdx
