// Acceptance run: one [PASS]/[FAIL] line per criterion, subchecks indented.
// A SKIP counts as a failure here since every criterion fixes a good q.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qdx/verify.hpp"

using namespace qdx;

namespace {

const cplx kZ0(1.3, 0.4);

struct Criterion {
  int id;
  std::string title;
  std::function<std::vector<CheckResult>(Rng&)> run;
};

const char* status_text(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skip: return "SKIP";
  }
  return "?";
}

// Runs fn at each q and tags check names with the q used.
std::vector<CheckResult> over(const std::vector<QParams>& qs,
                              const std::function<std::vector<CheckResult>(const QParams&)>& fn) {
  std::vector<CheckResult> out;
  for (const auto& qp : qs) {
    char tag[96];
    std::snprintf(tag, sizeof tag, " [q=%.4g%+.4gi, z0=%.3g%+.3gi]", qp.q().real(), qp.q().imag(), qp.z0().real(),
                  qp.z0().imag());
    for (auto c : fn(qp)) {
      c.name += tag;
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace

int main() {
  const QParams q4 = QParams::from_q(4.0);
  const QParams q2i = QParams::from_q(cplx(2.0, 1.0));
  const QParams qm3 = QParams::from_q(-3.0);
  const QParams q25 = QParams::from_q(cplx(2.5, 1.0), 1, kZ0);
  const QParams flagship(cplx(0.05, -0.6), 1, kZ0);

  const std::vector<Criterion> criteria = {
      {1, "theta identities at 50 annulus points, q in {4, 2+i, -3}",
       [&](Rng& rng) { return over({q4, q2i, qm3}, [&](const QParams& qp) { return checks::theta_identities(qp, 50, rng, 1e-10); }); }},
      {2, "t^(2) closed form and theta^2 splitting, q in {4, 2+i}",
       [&](Rng& rng) { return over({q4, q2i}, [&](const QParams& qp) { return checks::theta_powers(qp, rng, 1e-10); }); }},
      {3, "bad q: real q* < -1 with t_0^(3)(q*) = 0", [&](Rng& rng) { return checks::bad_q(rng); }},
      {4, "algebraic summation on 20 random two-slope systems",
       [&](Rng& rng) { return over({q4, q25}, [&](const QParams& qp) { return checks::summation(qp, 20, rng, 1e-9); }); }},
      {5, "closed-form alien derivative vs residue oracle, 20 instances",
       [&](Rng& rng) { return over({q4, q25}, [&](const QParams& qp) { return checks::alien_oracle(qp, 20, rng); }); }},
      {6, "dilation covariance and index shifts, delta <= 4",
       [&](Rng& rng) { return over({q4, q25}, [&](const QParams& qp) { return checks::dilation(qp, rng); }); }},
      {7, "canonical basis at q = 4, delta <= 5", [&](Rng&) { return over({q4}, [](const QParams& qp) { return checks::canonical_basis(qp, 5); }); }},
      {8, "formal group formulaire, multiplicativity, eta table",
       [&](Rng& rng) { return over({q4, q25}, [&](const QParams& qp) { return checks::formal_group(qp, 30, rng); }); }},
      {9, "Galois action on alien blocks, r <= 3",
       [&](Rng& rng) { return over({flagship}, [&](const QParams& qp) { return checks::galois_action(qp, 3, rng, 1e-8); }); }},
      {10, "wild group law and symbol action, 200 draws",
       [&](Rng& rng) { return over({q4, q25}, [&](const QParams& qp) { return checks::wild_group(qp, 200, rng); }); }},
      {11, "ramification, Hilbert 90 descent and restriction embedding",
       [&](Rng& rng) { return over({q4, q25}, [&](const QParams& qp) { return checks::ramification(qp, rng); }); }},
      {12, "Birkhoff-Guenther normal form",
       [&](Rng& rng) { return over({q4, q2i}, [&](const QParams& qp) { return checks::normal_form(qp, rng); }); }},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    Rng rng(20241015 + static_cast<std::uint64_t>(cr.id));
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<CheckResult> res;
    std::string error;
    try {
      res = cr.run(rng);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = error.empty() && !res.empty();
    for (const auto& c : res) ok = ok && c.status == CheckStatus::Pass;
    if (!ok) ++failed;
    std::printf("[%s] %2d. %s (%.1fs)\n", ok ? "PASS" : "FAIL", cr.id, cr.title.c_str(), secs);
    for (const auto& c : res)
      std::printf("         %s %-60s dev %.3e thr %.1e%s%s\n", status_text(c.status), c.name.c_str(), c.deviation,
                  c.threshold, c.note.empty() ? "" : "  ", c.note.c_str());
    if (!error.empty()) std::printf("         error: %s\n", error.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
