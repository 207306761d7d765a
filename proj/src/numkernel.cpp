#include "qdx/numkernel.hpp"

#include <algorithm>
#include <cmath>

namespace qdx {

cplx unit_root(long k, long n) {
  if (n <= 0) throw Error(ErrorCode::DomainError, "unit_root needs n > 0");
  long m = ((k % n) + n) % n;
  if (m == 0) return {1.0, 0.0};
  if (2 * m == n) return {-1.0, 0.0};
  if (4 * m == n) return {0.0, 1.0};
  if (4 * m == 3 * n) return {0.0, -1.0};
  double t = 2.0 * kPi * static_cast<double>(m) / static_cast<double>(n);
  return {std::cos(t), std::sin(t)};
}

QParams::QParams(cplx tau, int r, cplx z0) : tau_(tau), r_(r), z0_(z0) {
  if (r < 1) throw Error(ErrorCode::InvalidInput, "ramification index must be positive");
  if (z0 == 0.0) throw Error(ErrorCode::InvalidInput, "base point must be nonzero");
  log_abs_q_ = -2.0 * kPi * tau.imag();
  if (!(log_abs_q_ > 0.0))
    throw Error(ErrorCode::InvalidInput, "|q| = e^{-2π Im τ} must exceed 1 (need Im τ < 0)");
  q_ = qpow(1.0);
}

QParams QParams::from_q(cplx q, int r, cplx z0) {
  if (q == 0.0) throw Error(ErrorCode::InvalidInput, "q must be nonzero");
  cplx tau = std::log(q) / cplx(0.0, 2.0 * kPi);
  return QParams(tau, r, z0);
}

cplx QParams::qpow(double x) const { return std::exp(cplx(0.0, 2.0 * kPi) * tau_ * x); }

cplx QParams::z0_root(int s) const { return std::exp(std::log(z0_) / static_cast<double>(s)); }

QParams QParams::base(int s) const { return QParams(tau_ / static_cast<double>(s), 1, z0_root(s)); }

// ---------------------------------------------------------------- series

LaurentSeries::LaurentSeries(int lo, std::vector<cplx> coeffs, int cap)
    : lo_(lo), c_(std::move(coeffs)), cap_(cap) {
  normalize();
}

void LaurentSeries::normalize() {
  double mx = 0.0;
  for (const auto& v : c_) mx = std::max(mx, std::abs(v));
  if (mx == 0.0) {
    c_.clear();
    lo_ = 0;
    return;
  }
  const double thr = kPruneRel * mx;
  for (auto& v : c_)
    if (std::abs(v) < thr) v = 0.0;
  size_t a = 0;
  while (a < c_.size() && c_[a] == 0.0) ++a;
  size_t b = c_.size();
  while (b > a && c_[b - 1] == 0.0) --b;
  if (a == b) {
    c_.clear();
    lo_ = 0;
    return;
  }
  if (a > 0 || b < c_.size()) {
    c_ = std::vector<cplx>(c_.begin() + static_cast<long>(a), c_.begin() + static_cast<long>(b));
    lo_ += static_cast<int>(a);
  }
}

LaurentSeries LaurentSeries::monomial(cplx c, int k, int cap) { return LaurentSeries(k, {c}, cap); }

LaurentSeries LaurentSeries::from_map(const std::map<int, cplx>& m, int cap) {
  if (m.empty()) return LaurentSeries(0, {}, cap);
  int lo = m.begin()->first, hi = m.rbegin()->first;
  std::vector<cplx> c(static_cast<size_t>(hi - lo + 1));
  for (const auto& [k, v] : m) c[static_cast<size_t>(k - lo)] = v;
  return LaurentSeries(lo, std::move(c), cap);
}

cplx LaurentSeries::coeff(int m) const {
  if (c_.empty() || m < lo_ || m > hi()) return 0.0;
  return c_[static_cast<size_t>(m - lo_)];
}

std::map<int, cplx> LaurentSeries::coeffs() const {
  std::map<int, cplx> out;
  for (size_t i = 0; i < c_.size(); ++i)
    if (c_[i] != 0.0) out[lo_ + static_cast<int>(i)] = c_[i];
  return out;
}

double LaurentSeries::max_abs() const {
  double mx = 0.0;
  for (const auto& v : c_) mx = std::max(mx, std::abs(v));
  return mx;
}

cplx LaurentSeries::evaluate(cplx z) const {
  if (z == 0.0) throw Error(ErrorCode::ZeroEvaluationPoint, "evaluation at z = 0");
  if (c_.empty()) return 0.0;
  // Horner in z from the top, then multiply by z^lo.
  cplx acc = 0.0;
  for (size_t i = c_.size(); i-- > 0;) acc = acc * z + c_[i];
  return acc * std::pow(z, lo_);
}

LaurentSeries LaurentSeries::with_cap(int cap) const {
  LaurentSeries out(*this);
  out.cap_ = cap;
  return out;
}

LaurentSeries LaurentSeries::shifted(int k) const {
  LaurentSeries out(*this);
  if (!out.c_.empty()) out.lo_ += k;
  return out;
}

LaurentSeries LaurentSeries::map_coeffs(const std::vector<cplx>& f) const {
  std::vector<cplx> c(c_);
  for (size_t i = 0; i < c.size() && i < f.size(); ++i) c[i] *= f[i];
  return LaurentSeries(lo_, std::move(c), cap_);
}

LaurentSeries LaurentSeries::operator-() const {
  LaurentSeries out(*this);
  for (auto& v : out.c_) v = -v;
  return out;
}

LaurentSeries& LaurentSeries::operator+=(const LaurentSeries& o) {
  cap_ = std::max(cap_, o.cap_);
  if (o.c_.empty()) return *this;
  if (c_.empty()) {
    lo_ = o.lo_;
    c_ = o.c_;
    return *this;
  }
  int lo = std::min(lo_, o.lo_), hi = std::max(this->hi(), o.hi());
  std::vector<cplx> c(static_cast<size_t>(hi - lo + 1));
  for (size_t i = 0; i < c_.size(); ++i) c[static_cast<size_t>(lo_ - lo) + i] += c_[i];
  for (size_t i = 0; i < o.c_.size(); ++i) c[static_cast<size_t>(o.lo_ - lo) + i] += o.c_[i];
  lo_ = lo;
  c_ = std::move(c);
  normalize();
  return *this;
}

LaurentSeries& LaurentSeries::operator-=(const LaurentSeries& o) { return *this += -o; }

LaurentSeries& LaurentSeries::operator*=(cplx s) {
  for (auto& v : c_) v *= s;
  normalize();
  return *this;
}

LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
  const int cap = std::max(a.cap_, b.cap_);
  if (a.c_.empty() || b.c_.empty()) return LaurentSeries(0, {}, cap);
  int lo = std::max(a.lo_ + b.lo_, -cap);
  int hi = std::min(a.hi() + b.hi(), cap);
  if (lo > hi) return LaurentSeries(0, {}, cap);
  std::vector<cplx> c(static_cast<size_t>(hi - lo + 1));
  for (size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i] == 0.0) continue;
    const int ei = a.lo_ + static_cast<int>(i);
    for (size_t j = 0; j < b.c_.size(); ++j) {
      const int e = ei + b.lo_ + static_cast<int>(j);
      if (e < lo || e > hi) continue;
      c[static_cast<size_t>(e - lo)] += a.c_[i] * b.c_[j];
    }
  }
  return LaurentSeries(lo, std::move(c), cap);
}

LaurentSeries sigma_q(const LaurentSeries& f, const QParams& qp) {
  std::vector<cplx> c(f.dense());
  for (size_t i = 0; i < c.size(); ++i) c[i] *= qp.qpow(f.lo() + static_cast<double>(i));
  return LaurentSeries(f.lo(), std::move(c), f.cap());
}

LaurentSeries dilate(const LaurentSeries& f, cplx lambda) {
  if (lambda == 0.0) throw Error(ErrorCode::ZeroDilation, "dilation by 0");
  std::vector<cplx> c(f.dense());
  for (size_t i = 0; i < c.size(); ++i) c[i] *= std::pow(lambda, f.lo() + static_cast<int>(i));
  return LaurentSeries(f.lo(), std::move(c), f.cap());
}

LaurentSeries ramify_series(const LaurentSeries& f, int r) {
  if (r < 1) throw Error(ErrorCode::InvalidInput, "ramification index must be positive");
  if (f.is_zero()) return LaurentSeries(0, {}, f.cap() * r);
  std::vector<cplx> c(static_cast<size_t>((f.hi() - f.lo()) * r + 1));
  for (int m = f.lo(); m <= f.hi(); ++m) c[static_cast<size_t>((m - f.lo()) * r)] = f.coeff(m);
  return LaurentSeries(f.lo() * r, std::move(c), f.cap() * r);
}

cplx evaluate(const LaurentSeries& f, cplx c) { return f.evaluate(c); }

double max_abs_diff(const LaurentSeries& a, const LaurentSeries& b) {
  int lo = std::min(a.lo(), b.lo()), hi = std::max(a.hi(), b.hi());
  double mx = 0.0;
  for (int m = lo; m <= hi; ++m) mx = std::max(mx, std::abs(a.coeff(m) - b.coeff(m)));
  return mx;
}

// ---------------------------------------------------------------- matrices

LaurentMatrix LaurentMatrix::identity(int n) {
  LaurentMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = LaurentSeries::constant(1.0);
  return m;
}

LaurentMatrix LaurentMatrix::constant(const CMatrix& c, int cap) { return monomial(c, 0, cap); }

LaurentMatrix LaurentMatrix::monomial(const CMatrix& c, int k, int cap) {
  LaurentMatrix m(static_cast<int>(c.rows()), static_cast<int>(c.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (c(i, j) != 0.0) m(i, j) = LaurentSeries::monomial(c(i, j), k, cap);
  return m;
}

LaurentMatrix LaurentMatrix::diag_monomials(const std::vector<cplx>& c, const std::vector<int>& k, int cap) {
  const int n = static_cast<int>(c.size());
  LaurentMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = LaurentSeries::monomial(c[static_cast<size_t>(i)], k[static_cast<size_t>(i)], cap);
  return m;
}

CMatrix LaurentMatrix::evaluate(cplx z) const {
  CMatrix out(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j).evaluate(z);
  return out;
}

CMatrix LaurentMatrix::coeff(int k) const {
  CMatrix out(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j).coeff(k);
  return out;
}

int LaurentMatrix::min_exp() const {
  int mn = 0;
  bool any = false;
  for (const auto& e : e_)
    if (!e.is_zero()) {
      mn = any ? std::min(mn, e.lo()) : e.lo();
      any = true;
    }
  return mn;
}

int LaurentMatrix::max_exp() const {
  int mx = 0;
  bool any = false;
  for (const auto& e : e_)
    if (!e.is_zero()) {
      mx = any ? std::max(mx, e.hi()) : e.hi();
      any = true;
    }
  return mx;
}

bool LaurentMatrix::is_zero() const {
  return std::all_of(e_.begin(), e_.end(), [](const LaurentSeries& s) { return s.is_zero(); });
}

double LaurentMatrix::max_abs() const {
  double mx = 0.0;
  for (const auto& e : e_) mx = std::max(mx, e.max_abs());
  return mx;
}

LaurentMatrix LaurentMatrix::block(int i0, int j0, int nr, int nc) const {
  LaurentMatrix out(nr, nc);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j) out(i, j) = (*this)(i0 + i, j0 + j);
  return out;
}

void LaurentMatrix::set_block(int i0, int j0, const LaurentMatrix& b) {
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) (*this)(i0 + i, j0 + j) = b(i, j);
}

LaurentMatrix& LaurentMatrix::operator+=(const LaurentMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorCode::InvalidInput, "shape mismatch in +");
  for (size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
  return *this;
}

LaurentMatrix& LaurentMatrix::operator-=(const LaurentMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorCode::InvalidInput, "shape mismatch in -");
  for (size_t i = 0; i < e_.size(); ++i) e_[i] -= o.e_[i];
  return *this;
}

LaurentMatrix operator*(const LaurentMatrix& a, const LaurentMatrix& b) {
  if (a.cols_ != b.rows_) throw Error(ErrorCode::InvalidInput, "shape mismatch in *");
  LaurentMatrix out(a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int j = 0; j < b.cols_; ++j) {
      LaurentSeries acc;
      for (int k = 0; k < a.cols_; ++k) {
        const auto& x = a(i, k);
        const auto& y = b(k, j);
        if (x.is_zero() || y.is_zero()) continue;
        acc += x * y;
      }
      out(i, j) = std::move(acc);
    }
  return out;
}

LaurentMatrix operator*(const LaurentMatrix& a, cplx s) {
  LaurentMatrix out(a);
  for (auto& e : out.e_) e *= s;
  return out;
}

LaurentMatrix operator*(const CMatrix& a, const LaurentMatrix& b) {
  if (a.cols() != b.rows_) throw Error(ErrorCode::InvalidInput, "shape mismatch in *");
  LaurentMatrix out(static_cast<int>(a.rows()), b.cols_);
  for (int i = 0; i < out.rows_; ++i)
    for (int j = 0; j < out.cols_; ++j) {
      LaurentSeries acc;
      for (int k = 0; k < b.rows_; ++k)
        if (a(i, k) != 0.0 && !b(k, j).is_zero()) acc += b(k, j) * a(i, k);
      out(i, j) = std::move(acc);
    }
  return out;
}

LaurentMatrix operator*(const LaurentMatrix& a, const CMatrix& b) {
  if (a.cols_ != b.rows()) throw Error(ErrorCode::InvalidInput, "shape mismatch in *");
  LaurentMatrix out(a.rows_, static_cast<int>(b.cols()));
  for (int i = 0; i < out.rows_; ++i)
    for (int j = 0; j < out.cols_; ++j) {
      LaurentSeries acc;
      for (int k = 0; k < a.cols_; ++k)
        if (b(k, j) != 0.0 && !a(i, k).is_zero()) acc += a(i, k) * b(k, j);
      out(i, j) = std::move(acc);
    }
  return out;
}

LaurentMatrix sigma_q(const LaurentMatrix& m, const QParams& qp) {
  return m.map([&](const LaurentSeries& s) { return sigma_q(s, qp); });
}

LaurentMatrix dilate(const LaurentMatrix& m, cplx lambda) {
  return m.map([&](const LaurentSeries& s) { return dilate(s, lambda); });
}

LaurentMatrix ramify_matrix(const LaurentMatrix& m, int r) {
  return m.map([&](const LaurentSeries& s) { return ramify_series(s, r); });
}

LaurentMatrix kron(const LaurentMatrix& a, const LaurentMatrix& b) {
  LaurentMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

LaurentMatrix kron(const LaurentMatrix& a, const CMatrix& b) {
  LaurentMatrix out(a.rows() * static_cast<int>(b.rows()), a.cols() * static_cast<int>(b.cols()));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l)
          out(i * static_cast<int>(b.rows()) + k, j * static_cast<int>(b.cols()) + l) = a(i, j) * b(k, l);
  return out;
}

double max_abs_diff(const LaurentMatrix& a, const LaurentMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  double mx = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) mx = std::max(mx, max_abs_diff(a(i, j), b(i, j)));
  return mx;
}

}  // namespace qdx
