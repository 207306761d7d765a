#pragma once

#include <cmath>
#include <random>

#include "qdx/numkernel.hpp"

namespace qdx::test {

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20241015);
  return g;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }
inline int uniform_int(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng()); }

inline cplx random_unit_disk() { return std::polar(uniform(0.1, 1.0), uniform(-kPi, kPi)); }
inline cplx random_complex(double scale = 1.0) { return cplx(uniform(-scale, scale), uniform(-scale, scale)); }

// A point of the fundamental annulus 1 ≤ |z| < |q|.
inline cplx random_annulus(const QParams& qp) {
  return std::polar(std::exp(uniform(0.0, qp.log_abs_q())), uniform(-kPi, kPi));
}

inline double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::max(1e-300, std::max(std::abs(a), std::abs(b))); }

inline LaurentSeries random_series(int lo, int hi) {
  std::vector<cplx> c;
  for (int k = lo; k <= hi; ++k) c.push_back(random_complex());
  return LaurentSeries(lo, c);
}

}  // namespace qdx::test
