#pragma once

// q-parameters and truncated Laurent series over C.

#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "qdx/errors.hpp"

namespace qdx {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

// exp(2iπ k/n), exact on the four quadrant points.
cplx unit_root(long k, long n);

// q = e^{2iπτ} with |q| > 1. Every fractional power q^x is e^{2iπτx}, and the
// roots of the base point are principal, z_{0,r} = exp(log z0 / r), so that
// z_{0,rs}^s = z_{0,r}.
class QParams {
 public:
  explicit QParams(cplx tau, int r = 1, cplx z0 = cplx(1.0, 0.0));
  // τ = log(q)/(2iπ) with the principal logarithm.
  static QParams from_q(cplx q, int r = 1, cplx z0 = cplx(1.0, 0.0));

  cplx tau() const { return tau_; }
  int r() const { return r_; }
  cplx z0() const { return z0_; }
  cplx q() const { return q_; }
  double abs_q() const { return std::abs(q_); }
  double log_abs_q() const { return log_abs_q_; }

  cplx qpow(double x) const;
  cplx q_root(int s) const { return qpow(1.0 / s); }
  cplx qr() const { return q_root(r_); }
  cplx z0_root(int s) const;
  cplx z0r() const { return z0_root(r_); }

  // Working base q_s with base point z_{0,s}; the result has r = 1.
  QParams base(int s) const;
  QParams with_r(int r) const { return QParams(tau_, r, z0_); }
  QParams with_z0(cplx z0) const { return QParams(tau_, r_, z0); }

 private:
  cplx tau_;
  int r_;
  cplx z0_;
  cplx q_;
  double log_abs_q_;
};

// Finite Laurent series Σ_{lo ≤ m ≤ hi} f_m z^m. The stored range is the
// truncation window; products are clipped to |m| ≤ cap.
class LaurentSeries {
 public:
  static constexpr int kDefaultCap = 60;
  static constexpr double kPruneRel = 1e-15;

  LaurentSeries() = default;
  LaurentSeries(int lo, std::vector<cplx> coeffs, int cap = kDefaultCap);

  static LaurentSeries monomial(cplx c, int k, int cap = kDefaultCap);
  static LaurentSeries constant(cplx c, int cap = kDefaultCap) { return monomial(c, 0, cap); }
  static LaurentSeries from_map(const std::map<int, cplx>& m, int cap = kDefaultCap);

  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(c_.size()) - 1; }
  int cap() const { return cap_; }
  bool is_zero() const { return c_.empty(); }
  cplx coeff(int m) const;
  const std::vector<cplx>& dense() const { return c_; }
  std::map<int, cplx> coeffs() const;
  double max_abs() const;
  cplx evaluate(cplx z) const;

  LaurentSeries with_cap(int cap) const;
  // Exponents k with keep(k) retained.
  template <class Pred>
  LaurentSeries filter(Pred keep) const {
    std::vector<cplx> c(c_);
    for (size_t i = 0; i < c.size(); ++i)
      if (!keep(lo_ + static_cast<int>(i))) c[i] = 0.0;
    return LaurentSeries(lo_, std::move(c), cap_);
  }
  LaurentSeries shifted(int k) const;  // z^k f
  LaurentSeries map_coeffs(const std::vector<cplx>& factor_from_lo) const;

  LaurentSeries operator-() const;
  LaurentSeries& operator+=(const LaurentSeries& o);
  LaurentSeries& operator-=(const LaurentSeries& o);
  LaurentSeries& operator*=(cplx s);
  friend LaurentSeries operator+(LaurentSeries a, const LaurentSeries& b) { return a += b; }
  friend LaurentSeries operator-(LaurentSeries a, const LaurentSeries& b) { return a -= b; }
  friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b);
  friend LaurentSeries operator*(LaurentSeries a, cplx s) { return a *= s; }
  friend LaurentSeries operator*(cplx s, LaurentSeries a) { return a *= s; }
  bool operator==(const LaurentSeries& o) const { return lo_ == o.lo_ && c_ == o.c_; }

 private:
  void normalize();

  int lo_ = 0;
  std::vector<cplx> c_;
  int cap_ = kDefaultCap;
};

LaurentSeries sigma_q(const LaurentSeries& f, const QParams& qp);
LaurentSeries dilate(const LaurentSeries& f, cplx lambda);
LaurentSeries ramify_series(const LaurentSeries& f, int r);
cplx evaluate(const LaurentSeries& f, cplx c);
double max_abs_diff(const LaurentSeries& a, const LaurentSeries& b);

// Rectangular matrix with LaurentSeries entries.
class LaurentMatrix {
 public:
  LaurentMatrix() = default;
  LaurentMatrix(int rows, int cols) : rows_(rows), cols_(cols), e_(static_cast<size_t>(rows) * cols) {}

  static LaurentMatrix identity(int n);
  static LaurentMatrix constant(const CMatrix& m, int cap = LaurentSeries::kDefaultCap);
  static LaurentMatrix monomial(const CMatrix& m, int k, int cap = LaurentSeries::kDefaultCap);
  // Diagonal matrix Diag(c_i z^{k_i}).
  static LaurentMatrix diag_monomials(const std::vector<cplx>& c, const std::vector<int>& k,
                                      int cap = LaurentSeries::kDefaultCap);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  LaurentSeries& operator()(int i, int j) { return e_[static_cast<size_t>(i) * cols_ + j]; }
  const LaurentSeries& operator()(int i, int j) const { return e_[static_cast<size_t>(i) * cols_ + j]; }

  CMatrix evaluate(cplx z) const;
  CMatrix coeff(int k) const;
  int min_exp() const;
  int max_exp() const;
  bool is_zero() const;
  double max_abs() const;

  LaurentMatrix block(int i0, int j0, int nr, int nc) const;
  void set_block(int i0, int j0, const LaurentMatrix& b);
  template <class Fn>
  LaurentMatrix map(Fn fn) const {
    LaurentMatrix out(rows_, cols_);
    for (size_t i = 0; i < e_.size(); ++i) out.e_[i] = fn(e_[i]);
    return out;
  }

  LaurentMatrix& operator+=(const LaurentMatrix& o);
  LaurentMatrix& operator-=(const LaurentMatrix& o);
  friend LaurentMatrix operator+(LaurentMatrix a, const LaurentMatrix& b) { return a += b; }
  friend LaurentMatrix operator-(LaurentMatrix a, const LaurentMatrix& b) { return a -= b; }
  friend LaurentMatrix operator*(const LaurentMatrix& a, const LaurentMatrix& b);
  friend LaurentMatrix operator*(const LaurentMatrix& a, cplx s);
  friend LaurentMatrix operator*(cplx s, const LaurentMatrix& a) { return a * s; }
  // Constant-matrix products.
  friend LaurentMatrix operator*(const CMatrix& a, const LaurentMatrix& b);
  friend LaurentMatrix operator*(const LaurentMatrix& a, const CMatrix& b);
  bool operator==(const LaurentMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<LaurentSeries> e_;
};

LaurentMatrix sigma_q(const LaurentMatrix& m, const QParams& qp);
LaurentMatrix dilate(const LaurentMatrix& m, cplx lambda);
LaurentMatrix ramify_matrix(const LaurentMatrix& m, int r);
LaurentMatrix kron(const LaurentMatrix& a, const LaurentMatrix& b);
LaurentMatrix kron(const LaurentMatrix& a, const CMatrix& b);
double max_abs_diff(const LaurentMatrix& a, const LaurentMatrix& b);

}  // namespace qdx
