#pragma once

// Property checks behind `qdx verify` and the acceptance binary. Every check
// reports its measured deviation against a threshold; checks that need a good
// value of q are reported as SKIP when q is bad within the tested range.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "qdx/numkernel.hpp"

namespace qdx {

struct RunConfig {
  cplx tau{0.0, -std::log(4.0) / (2.0 * kPi)};  // q = 4
  int r = 1;
  cplx z0{1.0, 0.0};
  int window = LaurentSeries::kDefaultCap;
  std::map<std::string, double> tolerances;  // overrides by check name
  std::uint64_t seed = 20241015;

  QParams qparams() const;
  double tol(const std::string& name, double fallback) const;
  // Throws InvalidInput: Im τ ≥ 0, r < 1, z0 = 0, window < 1 or a tolerance ≤ 0.
  void validate() const;
};
RunConfig parse_run_config(const nlohmann::json& j, RunConfig base = {});

enum class CheckStatus { Pass, Fail, Skip };

struct CheckResult {
  std::string name;
  double deviation = 0.0;
  double threshold = 0.0;
  CheckStatus status = CheckStatus::Pass;
  std::string note;
  bool tunable = true;  // threshold may be overridden from the config
};

struct Report {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const;  // no Fail
  int count(CheckStatus s) const;
  void add(const std::vector<CheckResult>& more);
};
nlohmann::json emit(const Report& r);

// deviation < threshold (NaN fails).
CheckResult make_check(const std::string& name, double deviation, double threshold, const std::string& note = "");
CheckResult make_flag(const std::string& name, bool ok, const std::string& note = "");
CheckResult make_skip(const std::string& name, const std::string& note);

using Rng = std::mt19937_64;

namespace checks {

// θ(qz) = zθ(z) = θ(1/z) and the triple product at random annulus points.
std::vector<CheckResult> theta_identities(const QParams& qp, int points, Rng& rng, double tol = 1e-10);
// t^(2) closed form for |n| ≤ 10, the θ² splitting identity, zeros on [−1; q].
std::vector<CheckResult> theta_powers(const QParams& qp, Rng& rng, double tol = 1e-10);
// Nonvanishing of t_n^(δ) for δ ≤ 5, |n| ≤ 10: SKIP when q is bad.
std::vector<CheckResult> good_value(const QParams& qp);
// q* < −1 with |t_0^(3)(q*)| < 1e-9 and f(−x) = 2f(x⁴) − f(x).
std::vector<CheckResult> bad_q(Rng& rng);
// Random two-slope systems: gauge residual, c → qc invariance, cocycle relation.
std::vector<CheckResult> summation(const QParams& qp, int trials, Rng& rng, double tol = 1e-9);
// Normal form windows, gauge certificate, idempotence, coordinate count.
std::vector<CheckResult> normal_form(const QParams& qp, Rng& rng);
// Closed-form Δ vs the residue oracle, the α^δβ = 1 constraint and the rejected (z₀/q)^m numerator.
std::vector<CheckResult> alien_oracle(const QParams& qp, int instances, Rng& rng);
// Dilation for λ ∈ {ζ_δ, q_δ, random} and the ζ_δ and q_δ index shifts, δ ≤ 4.
std::vector<CheckResult> dilation(const QParams& qp, Rng& rng);
// Vandermonde factorization of (Ψ_{i,0}(u_j)), δ ≤ delta_max: SKIP when q is bad.
std::vector<CheckResult> canonical_basis(const QParams& qp, int delta_max);
// Formulaire r ≤ 6, multiplicativity of evaluate_element, η table.
std::vector<CheckResult> formal_group(const QParams& qp, int pairs, Rng& rng);
// Galois action on alien blocks of two-block E-systems with r ≤ r_max.
std::vector<CheckResult> galois_action(const QParams& qp, int r_max, Rng& rng, double tol = 1e-8);
// Wild group law and the right action on Ψ-symbols.
std::vector<CheckResult> wild_group(const QParams& qp, int draws, Rng& rng);
// Hilbert 90 round trips, the r = 2 embedding, τB = TBT⁻¹, the fibre functor.
std::vector<CheckResult> ramification(const QParams& qp, Rng& rng);

}  // namespace checks

// suite ∈ {theta, stokes, alien, formal, ramify, all}; throws UnknownSuite.
Report run_suite(const std::string& suite, const RunConfig& cfg);

}  // namespace qdx
