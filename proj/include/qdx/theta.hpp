#pragma once

// Jacobi theta θ_q(z) = Σ q^{-m(m+1)/2} z^m and the coefficients t_n^(δ) of its powers.

#include <vector>

#include "qdx/numkernel.hpp"

namespace qdx {

cplx theta(const QParams& qp, cplx z);
// θ_{q,c}(z) = θ_q(z/c).
cplx theta_c(const QParams& qp, cplx c, cplx z);

// (a; x)_∞ truncated at 200 factors or when |a x^k| < 1e-16.
cplx pochhammer_inf(cplx a, cplx x);
// Jacobi triple product (q^{-1};q^{-1})_∞ (−q^{-1}z;q^{-1})_∞ (−z^{-1};q^{-1})_∞.
cplx triple_product(const QParams& qp, cplx z);

// t_n^(δ) for δ ≤ delta_max and |n| ≤ n_max, built by convolution of t^(1).
class ThetaCoeffTable {
 public:
  ThetaCoeffTable(const QParams& qp, int delta_max, int n_max);
  cplx t(int delta, int n) const;
  int delta_max() const { return delta_max_; }
  int n_max() const { return n_max_; }

 private:
  int delta_max_;
  int n_max_;
  int inner_;  // half-width of the internally stored range
  std::vector<std::vector<cplx>> rows_;
};

// Direct multi-index sum over m_1 + ... + m_δ = n, |m_i| ≤ bound.
cplx theta_power_coeff_direct(const QParams& qp, int delta, int n, int bound = 40);
// Direct sum for δ ≤ 3, convolution beyond.
cplx theta_power_coeff(const QParams& qp, int delta, int n);

// θ_{q,c}^δ(z) = Σ_n t_n^(δ) c^{-n} z^n truncated to |n| ≤ cap.
LaurentSeries theta_power_series(const ThetaCoeffTable& table, cplx c, int delta, int cap);

struct GoodValueReport {
  double min_abs = 0.0;  // min |t_n^(δ)(q)| / t_n^(δ)(|q|) over the tested range
  int argmin_delta = 0;
  int argmin_n = 0;
  double tol = 0.0;
  bool bad = false;  // "bad within tested range"
};
GoodValueReport is_good_value(const QParams& qp, int delta_max, int n_bound, double tol = 1e-12);

// f(x) = Σ_{a,b ∈ Z} x^{a²+ab+b²}, |x| < 1.
double hex_series(double x);
// r(n) = #{(a,b) : a² + ab + b² = n} for 0 ≤ n ≤ N, by enumeration.
std::vector<long> hex_counts(int N);

struct BadQResult {
  double x_star = 0.0;   // zero of f in (−1, 0)
  double q_star = 0.0;   // 1/x*
  double t0 = 0.0;       // |t_0^(3)(q*)|
  double f_vs_t0 = 0.0;  // |t_0^(3)(q*) − f(1/q*)|
};
BadQResult find_bad_q();

}  // namespace qdx
