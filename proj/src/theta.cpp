#include "qdx/theta.hpp"

#include <algorithm>
#include <cmath>

namespace qdx {

namespace {

// log of the m-th theta term: −2iπτ·m(m+1)/2 + m·Log z.
cplx theta_term_log(const QParams& qp, double m, cplx logz) {
  return -cplx(0.0, 2.0 * kPi) * qp.tau() * (m * (m + 1.0) / 2.0) + m * logz;
}

}  // namespace

cplx theta(const QParams& qp, cplx z) {
  if (z == 0.0) throw Error(ErrorCode::ZeroArgument, "theta at z = 0");
  const cplx logz = std::log(z);
  const double lq = qp.log_abs_q();
  // Real part of the exponent is maximal near m* = log|z|/log|q| − 1/2.
  const long peak = std::lround(logz.real() / lq - 0.5);
  const double peak_re = theta_term_log(qp, static_cast<double>(peak), logz).real();
  const double cutoff = peak_re - 39.0;  // e^{-39} ≈ 1.2e-17 relative
  cplx sum = 0.0;
  for (long m = peak; m < peak + 4000; ++m) {
    cplx e = theta_term_log(qp, static_cast<double>(m), logz);
    if (e.real() < cutoff && m > peak) break;
    sum += std::exp(e);
  }
  for (long m = peak - 1; m > peak - 4000; --m) {
    cplx e = theta_term_log(qp, static_cast<double>(m), logz);
    if (e.real() < cutoff) break;
    sum += std::exp(e);
  }
  return sum;
}

cplx theta_c(const QParams& qp, cplx c, cplx z) {
  if (c == 0.0) throw Error(ErrorCode::ZeroArgument, "theta_{q,c} with c = 0");
  return theta(qp, z / c);
}

cplx pochhammer_inf(cplx a, cplx x) {
  cplx prod = 1.0;
  cplx ak = a;
  for (int k = 0; k < 200; ++k) {
    if (std::abs(ak) < 1e-16) break;
    prod *= (1.0 - ak);
    ak *= x;
  }
  return prod;
}

cplx triple_product(const QParams& qp, cplx z) {
  if (z == 0.0) throw Error(ErrorCode::ZeroArgument, "triple product at z = 0");
  const cplx p = qp.qpow(-1.0);
  return pochhammer_inf(p, p) * pochhammer_inf(-p * z, p) * pochhammer_inf(-1.0 / z, p);
}

ThetaCoeffTable::ThetaCoeffTable(const QParams& qp, int delta_max, int n_max)
    : delta_max_(std::max(1, delta_max)), n_max_(std::max(0, n_max)) {
  inner_ = 2 * std::max(n_max_, 30) + 10;
  const int w = 2 * inner_ + 1;
  rows_.assign(static_cast<size_t>(delta_max_), std::vector<cplx>(static_cast<size_t>(w)));
  auto& t1 = rows_[0];
  for (int n = -inner_; n <= inner_; ++n) t1[static_cast<size_t>(n + inner_)] = qp.qpow(-0.5 * n * (n + 1.0));
  for (int d = 1; d < delta_max_; ++d) {
    const auto& prev = rows_[static_cast<size_t>(d - 1)];
    auto& cur = rows_[static_cast<size_t>(d)];
    for (int n = -inner_; n <= inner_; ++n) {
      cplx acc = 0.0;
      const int mlo = std::max(-inner_, n - inner_), mhi = std::min(inner_, n + inner_);
      for (int m = mlo; m <= mhi; ++m)
        acc += prev[static_cast<size_t>(n - m + inner_)] * t1[static_cast<size_t>(m + inner_)];
      cur[static_cast<size_t>(n + inner_)] = acc;
    }
  }
}

cplx ThetaCoeffTable::t(int delta, int n) const {
  if (delta < 1 || delta > delta_max_) throw Error(ErrorCode::DomainError, "delta outside table");
  if (n < -inner_ || n > inner_) return 0.0;
  return rows_[static_cast<size_t>(delta - 1)][static_cast<size_t>(n + inner_)];
}

cplx theta_power_coeff_direct(const QParams& qp, int delta, int n, int bound) {
  if (delta < 1) throw Error(ErrorCode::DomainError, "delta must be positive");
  std::vector<cplx> t1(static_cast<size_t>(2 * bound + 1));
  for (int m = -bound; m <= bound; ++m) t1[static_cast<size_t>(m + bound)] = qp.qpow(-0.5 * m * (m + 1.0));
  auto at = [&](int m) -> cplx { return (m < -bound || m > bound) ? cplx(0.0) : t1[static_cast<size_t>(m + bound)]; };
  if (delta == 1) return qp.qpow(-0.5 * n * (n + 1.0));
  // Enumerate m_1..m_{δ-1}; m_δ is forced.
  std::vector<int> m(static_cast<size_t>(delta - 1), -bound);
  cplx sum = 0.0;
  while (true) {
    int rest = n;
    cplx term = 1.0;
    for (int v : m) {
      rest -= v;
      term *= at(v);
    }
    sum += term * at(rest);
    size_t k = 0;
    while (k < m.size() && ++m[k] > bound) m[k++] = -bound;
    if (k == m.size()) break;
  }
  return sum;
}

cplx theta_power_coeff(const QParams& qp, int delta, int n) {
  if (delta <= 3) return theta_power_coeff_direct(qp, delta, n);
  ThetaCoeffTable table(qp, delta, std::abs(n) + 10);
  return table.t(delta, n);
}

LaurentSeries theta_power_series(const ThetaCoeffTable& table, cplx c, int delta, int cap) {
  const int w = std::min(cap, table.n_max());
  std::vector<cplx> coef(static_cast<size_t>(2 * w + 1));
  for (int n = -w; n <= w; ++n) coef[static_cast<size_t>(n + w)] = table.t(delta, n) * std::pow(c, -n);
  return LaurentSeries(-w, std::move(coef), cap);
}

GoodValueReport is_good_value(const QParams& qp, int delta_max, int n_bound, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidInput, "tolerance must be positive");
  ThetaCoeffTable table(qp, delta_max, n_bound);
  // Majorant t_n^(δ)(|q|): the same sum with every term replaced by its modulus.
  ThetaCoeffTable major(QParams(cplx(0.0, qp.tau().imag())), delta_max, n_bound);
  GoodValueReport rep;
  rep.tol = tol;
  rep.min_abs = INFINITY;
  for (int d = 1; d <= delta_max; ++d)
    for (int n = -n_bound; n <= n_bound; ++n) {
      const double ref = std::abs(major.t(d, n));
      const double v = ref > 0.0 ? std::abs(table.t(d, n)) / ref : 0.0;
      if (v < rep.min_abs) {
        rep.min_abs = v;
        rep.argmin_delta = d;
        rep.argmin_n = n;
      }
    }
  rep.bad = rep.min_abs < tol;
  return rep;
}

std::vector<long> hex_counts(int N) {
  std::vector<long> r(static_cast<size_t>(std::max(N, 0) + 1), 0);
  const long B = static_cast<long>(std::sqrt(2.0 * N)) + 2;
  for (long a = -B; a <= B; ++a)
    for (long b = -B; b <= B; ++b) {
      const long n = a * a + a * b + b * b;
      if (n <= N) ++r[static_cast<size_t>(n)];
    }
  return r;
}

double hex_series(double x) {
  if (!(std::abs(x) < 1.0)) throw Error(ErrorCode::DomainError, "hex_series needs |x| < 1");
  if (x == 0.0) return 1.0;
  // r(n) ≤ 6(n+1); stop once 6(N+1)|x|^N/(1−|x|) is below 1e-16.
  const double lx = std::log(std::abs(x));
  int N = 16;
  while (std::log(6.0 * (N + 1)) + N * lx - std::log(1.0 - std::abs(x)) > std::log(1e-16)) N *= 2;
  const auto r = hex_counts(N);
  double sum = 0.0, xn = 1.0;
  for (int n = 0; n <= N; ++n) {
    sum += static_cast<double>(r[static_cast<size_t>(n)]) * xn;
    xn *= x;
  }
  return sum;
}

BadQResult find_bad_q() {
  // f(0) = 1 > 0 and f → −∞ as x → −1⁺; take the sign change nearest to 0.
  double hi = -1e-3, lo = 0.0;
  double fhi = hex_series(hi);
  bool found = false;
  for (double x = hi - 0.01; x > -0.999; x -= 0.01) {
    const double fx = hex_series(x);
    if ((fx < 0.0) != (fhi < 0.0)) {
      lo = x;
      found = true;
      break;
    }
    hi = x;
    fhi = fx;
  }
  if (!found) throw Error(ErrorCode::BracketingFailed, "no sign change of f on (-0.999, 0)");
  double flo = hex_series(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = hex_series(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  BadQResult out;
  out.x_star = 0.5 * (lo + hi);
  out.q_star = 1.0 / out.x_star;
  const QParams qp = QParams::from_q(cplx(out.q_star, 0.0));
  const cplx t0 = theta_power_coeff_direct(qp, 3, 0);
  out.t0 = std::abs(t0);
  out.f_vs_t0 = std::abs(t0 - hex_series(1.0 / out.q_star));
  return out;
}

}  // namespace qdx
