// qdx: command-line front end. JSON reports on stdout, a one-line summary on
// stderr. Exit codes: 0 pass, 1 check failure, 2 input error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qdx/json_io.hpp"
#include "qdx/verify.hpp"

using namespace qdx;
using io::json;

namespace {

constexpr int kPass = 0, kCheckFailure = 1, kInputError = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

json parse_json_text(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

std::vector<cplx> sample_points(const QParams& qp, const std::vector<cplx>& spirals) {
  return sample_points_avoiding(qp, spirals, 20, std::abs(qp.z0()));
}

// The index-th allowed direction of a fixed deterministic sequence.
cplx default_direction(const BlockSystem& A, const QParams& qp, int index = 0) {
  for (int k = 0; k < 400; ++k) {
    const cplx c = std::polar(std::exp((0.37 + 0.013 * k) * qp.log_abs_q()), 0.3 + 0.61 * k);
    try {
      check_allowed_direction(A, c, qp);
      if (index-- == 0) return c;
    } catch (const Error&) {
    }
  }
  throw Error(ErrorCode::ForbiddenDirection, "no allowed direction found");
}

// Options shared by every subcommand.
struct Common {
  std::string config;
  std::string tau, q, z0;
  int r = 0;
  long long seed = -1;
  std::string system;
};

struct Ctx {
  RunConfig cfg;
  QParams qp{cplx(0.0, -1.0)};
};

Ctx make_context(const Common& c) {
  Ctx ctx;
  std::string path = c.config;
  if (path.empty())
    if (const char* env = std::getenv("QDX_CONFIG")) path = env;
  if (!path.empty()) ctx.cfg = parse_run_config(read_json_file(path));
  if (!c.tau.empty()) ctx.cfg.tau = io::parse_complex_text(c.tau);
  if (!c.q.empty()) {
    const cplx q = io::parse_complex_text(c.q);
    if (!(std::abs(q) > 1.0)) throw Error(ErrorCode::InvalidInput, "|q| must exceed 1");
    ctx.cfg.tau = QParams::from_q(q).tau();
  }
  if (!c.z0.empty()) ctx.cfg.z0 = io::parse_complex_text(c.z0);
  if (c.r > 0) ctx.cfg.r = c.r;
  if (c.seed >= 0) ctx.cfg.seed = static_cast<std::uint64_t>(c.seed);
  ctx.cfg.validate();
  ctx.qp = ctx.cfg.qparams();
  return ctx;
}

BlockSystem load_system(const Common& c) {
  if (c.system.empty()) throw InputError("--system is required");
  return io::parse<BlockSystem>(read_json_file(c.system));
}

// A bare LaurentMatrix, or the matrix of a BlockSystem.
LaurentMatrix load_matrix(const json& j, const QParams& qp) {
  if (j.contains("entries")) return io::parse<LaurentMatrix>(j);
  if (j.contains("diag")) return io::parse<BlockSystem>(j).matrix(qp);
  throw Error(ErrorCode::InvalidInput, "expected a LaurentMatrix or a BlockSystem");
}

void emit_out(const json& j) { std::cout << j.dump(2) << "\n"; }
void summary(const std::string& s) { std::cerr << s << "\n"; }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

// ------------------------------------------------------------ subcommands

int cmd_good_q(const Ctx& ctx, int delta_max, int n_bound, double tol) {
  const auto rep = is_good_value(ctx.qp, delta_max, n_bound, tol);
  json j = io::emit(rep);
  j["qparams"] = io::emit(ctx.qp);
  emit_out(j);
  summary(std::string("good-q: ") + j["verdict"].get<std::string>() + " (delta <= " + std::to_string(delta_max) +
          ", |n| <= " + std::to_string(n_bound) + ", min ratio " + fmt(rep.min_abs) + ")");
  return rep.bad ? kCheckFailure : kPass;
}

int cmd_bad_q() {
  const auto b = find_bad_q();
  json j = io::emit(b);
  j["tau"] = io::emit(QParams::from_q(b.q_star).tau());
  emit_out(j);
  summary("bad-q: q* = " + fmt(b.q_star) + ", |t_0^(3)(q*)| = " + fmt(b.t0));
  return b.t0 < 1e-9 ? kPass : kCheckFailure;
}

json newton_of_file(const json& j) {
  if (j.contains("operator")) {
    const json& op = j.at("operator");
    std::vector<std::pair<int, int>> pts;
    if (op.is_object() && op.contains("valuations")) {
      for (const auto& kv : op.at("valuations")) pts.emplace_back(kv.at(0).get<int>(), kv.at(1).get<int>());
    } else if (op.is_array()) {
      for (size_t k = 0; k < op.size(); ++k) {
        const LaurentSeries a = io::parse<LaurentSeries>(op[k]);
        if (!a.is_zero()) pts.emplace_back(static_cast<int>(k), a.lo());
      }
    } else {
      throw Error(ErrorCode::InvalidInput, "operator must be {\"valuations\": [[k, v], ...]} or a list of series");
    }
    return io::emit(newton_polygon_scalar(pts));
  }
  return io::emit(io::parse<BlockSystem>(j).newton());
}

int cmd_newton(const Common& c) {
  if (c.system.empty()) throw InputError("--system is required");
  const json out = newton_of_file(read_json_file(c.system));
  emit_out(out);
  summary("newton: slopes " + out["slopes"].dump() + ", multiplicities " + out["mults"].dump());
  return kPass;
}

int cmd_gr(const Common& c) {
  const BlockSystem g = graded(load_system(c));
  emit_out(io::emit(g));
  summary("gr: " + std::to_string(g.blocks()) + " diagonal blocks");
  return kPass;
}

json normalize_json(const BlockSystem& A, const QParams& qp, double& residual) {
  const NormalForm nf = bg_normalize(A, qp);
  const LaurentMatrix N = nf.normal.matrix(qp);
  residual = is_gauge_between(nf.F, A.matrix(qp), N, qp).residual / std::max(1.0, N.max_abs());
  json j = io::emit(nf);
  j["gauge_residual"] = residual;
  j["in_normal_form"] = in_normal_form(nf.normal);
  return j;
}

int cmd_normalize(const Ctx& ctx, const Common& c) {
  double residual = 0.0;
  emit_out(normalize_json(load_system(c), ctx.qp, residual));
  summary("normalize: gauge residual " + fmt(residual));
  return residual < 1e-10 ? kPass : kCheckFailure;
}

json sum_json(const BlockSystem& A, cplx c, const QParams& qp, double& residual) {
  const SummationResult s = multi_slope_sum(A, c, qp);
  const LaurentMatrix M = A.matrix(qp), M0 = graded(A).matrix(qp);
  residual = is_gauge_between_at([&](cplx z) { return s.F(z); }, [&](cplx z) { return M0.evaluate(z); },
                                 [&](cplx z) { return M.evaluate(z); }, qp, sample_points(qp, {c}))
                 .residual;
  json j = io::emit(s);
  j["gauge_residual"] = residual;
  return j;
}

int cmd_sum(const Ctx& ctx, const Common& c, const std::string& direction) {
  const BlockSystem A = load_system(c);
  const cplx dir = direction.empty() ? default_direction(A, ctx.qp) : io::parse_complex_text(direction);
  double residual = 0.0;
  emit_out(sum_json(A, dir, ctx.qp, residual));
  summary("sum: gauge residual " + fmt(residual) + " at 20 points");
  return residual < 1e-9 ? kPass : kCheckFailure;
}

json cocycle_json(const BlockSystem& A, cplx c, cplx d, const QParams& qp, double& residual) {
  const Cocycle F = stokes_cocycle(A, c, d, qp);
  const LaurentMatrix M0 = graded(A).matrix(qp);
  const auto pts = sample_points(qp, {c, d});
  const auto off = A.offsets();
  double automorphism = 0.0, unipotent = 0.0;
  json samples = json::array();
  for (cplx z : pts) {
    const CMatrix v = F.eval(z), vq = F.eval(qp.q() * z);
    const CMatrix lhs = vq * M0.evaluate(z), rhs = M0.evaluate(z) * v;
    automorphism = std::max(automorphism, (lhs - rhs).norm() / std::max(1e-300, lhs.norm() + rhs.norm()));
    for (int b = 0; b + 1 < static_cast<int>(off.size()); ++b) {
      const int n = off[b + 1] - off[b];
      unipotent = std::max(unipotent, (v.block(off[b], off[b], n, n) - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff());
    }
    samples.push_back({{"z", io::emit(z)}, {"value", io::emit(v)}});
  }
  residual = std::max(automorphism, unipotent);
  return {{"c", io::emit(c)},
          {"d", io::emit(d)},
          {"samples", samples},
          {"residuals", {{"graded_automorphism", automorphism}, {"diagonal_identity", unipotent}}}};
}

int cmd_cocycle(const Ctx& ctx, const Common& c, const std::string& cs, const std::string& ds) {
  if (cs.empty() || ds.empty()) throw InputError("--c and --d are required");
  double residual = 0.0;
  emit_out(cocycle_json(load_system(c), io::parse_complex_text(cs), io::parse_complex_text(ds), ctx.qp, residual));
  summary("cocycle: residual " + fmt(residual));
  return residual < 1e-9 ? kPass : kCheckFailure;
}

json alien_json(const BlockSystem& A, const QParams& qp, const std::string& alpha) {
  const auto blocks = alpha.empty() ? alien_all(A, qp) : alien_general(A, EllipticPoint{io::parse_complex_text(alpha)}, qp);
  json arr = json::array();
  for (const auto& b : blocks) arr.push_back(io::emit(b));
  return arr;
}

int cmd_alien(const Ctx& ctx, const Common& c, bool all, const std::string& alpha) {
  if (all == !alpha.empty()) throw InputError("give exactly one of --all and --alpha");
  const json arr = alien_json(load_system(c), ctx.qp, alpha);
  emit_out(arr);
  summary("alien: " + std::to_string(arr.size()) + " nonzero blocks");
  return kPass;
}

int cmd_act(const Ctx& ctx, const std::string& element, const std::string& symbol) {
  if (element.empty() || symbol.empty()) throw InputError("--element and --symbol are required");
  const json ej = parse_json_text(element, "--element"), sj = parse_json_text(symbol, "--symbol");
  PsiSymbol s = io::parse<PsiSymbol>(sj);
  if (s.kind == PsiSymbol::Kind::Graded) s.beta = canonicalize(s.beta.rep, ctx.qp, Base::QR);
  PsiSymbol out;
  if (ej.contains("x")) {
    out = act_on_psi(io::parse<WildGroupElement>(ej), s, ctx.qp);
  } else {
    // (λ, h, γ₁^{k1}γ₂^{k2}): U^λ acts trivially, then h, then the γ steps.
    const FormalElement phi = io::parse<FormalElement>(ej);
    out = act_on_psi(WildGroupElement(Rational(0), phi.k1, phi.k2),
                     act_on_psi(Generator{Generator::Kind::H, phi.t}, s, ctx.qp), ctx.qp);
  }
  emit_out({{"symbol", io::emit(out)}, {"coefficient", io::emit(out.coeff)}});
  summary("act: coefficient " + fmt(std::abs(out.coeff)) + " in modulus, l = " + std::to_string(out.l));
  return kPass;
}

int cmd_formulaire(int r) {
  if (r < 1) throw InputError("--r must be positive");
  const auto rep = formulaire_check(r);
  emit_out(io::emit(rep));
  summary("formulaire: r = " + std::to_string(r) + ", max deviation " + fmt(rep.max_deviation));
  return rep.max_deviation < 1e-12 ? kPass : kCheckFailure;
}

int cmd_ramify(const Ctx& ctx, const Common& c, int r, bool descend, bool embed) {
  if (c.system.empty()) throw InputError("--system is required");
  if (descend && embed) throw InputError("--descend and --embed are exclusive");
  const json j = read_json_file(c.system);
  if (descend) {
    // {"B": LaurentMatrix over z_r, "G": LaurentMatrix, "offsets": [...], "r": R}
    RamifiedSystem B;
    B.r = j.contains("r") ? j.at("r").get<int>() : r;
    B.A_prime = io::parse<LaurentMatrix>(j.at("B"));
    B.offsets = j.contains("offsets") ? j.at("offsets").get<std::vector<int>>() : std::vector<int>{0, B.A_prime.rows()};
    const auto d = hilbert90_descend(B, io::parse<LaurentMatrix>(j.at("G")), ctx.qp);
    emit_out(io::emit(d));
    summary("ramify --descend: closure " + fmt(d.closure) + ", tau-invariance " + fmt(d.invariance));
    return kPass;
  }
  if (r < 1) throw InputError("--r must be positive");
  if (embed) {
    RamifiedSystem A;
    A.r = r;
    A.A_prime = load_matrix(j, ctx.qp.base(r));
    const auto e = embed_in_restriction(A, ctx.qp);
    emit_out(io::emit(e));
    summary("ramify --embed: D is " + std::to_string(e.D.rows()) + "x" + std::to_string(e.D.cols()));
    return kPass;
  }
  const RamifiedSystem R = j.contains("diag") ? ram(io::parse<BlockSystem>(j), r, ctx.qp) : ram(load_matrix(j, ctx.qp), r);
  const double fibre = fiber_functor_check(R, ctx.qp);
  json out = io::emit(R);
  out["fibre_functor_residual"] = fibre;
  emit_out(out);
  summary("ramify: r = " + std::to_string(r) + ", fibre functor residual " + fmt(fibre));
  return fibre < 1e-12 ? kPass : kCheckFailure;
}

int cmd_verify(const Ctx& ctx, const std::string& suite) {
  const Report rep = run_suite(suite, ctx.cfg);
  json j = emit(rep);
  j["config"] = {{"qparams", io::emit(ctx.qp)}, {"seed", ctx.cfg.seed}, {"window", ctx.cfg.window}};
  emit_out(j);
  summary("verify " + suite + ": " + std::to_string(rep.count(CheckStatus::Pass)) + " pass, " +
          std::to_string(rep.count(CheckStatus::Fail)) + " fail, " + std::to_string(rep.count(CheckStatus::Skip)) + " skip");
  for (const auto& c : rep.checks)
    if (c.status != CheckStatus::Pass)
      summary(std::string(c.status == CheckStatus::Fail ? "  FAIL " : "  SKIP ") + c.name + (c.note.empty() ? "" : ": " + c.note));
  return rep.passed() ? kPass : kCheckFailure;
}

struct PipelineArgs {
  std::vector<std::string> steps;
  std::string direction, c, d, alpha, element;
  int r = 2;
};

int cmd_pipeline(const Ctx& ctx, const Common& common, const PipelineArgs& p) {
  const BlockSystem input = load_system(common);
  BlockSystem A = input;
  json out = {{"input", io::emit(input)}, {"steps", json::array()}};
  bool ok = true;
  for (size_t i = 0; i < p.steps.size(); ++i) {
    const std::string& s = p.steps[i];
    json res;
    try {
      double residual = 0.0;
      if (s == "newton") {
        res = io::emit(A.newton());
      } else if (s == "gr") {
        A = graded(A);
        res = io::emit(A);
      } else if (s == "normalize") {
        res = normalize_json(A, ctx.qp, residual);
        A = io::parse<NormalForm>(res).normal;
        ok = ok && residual < 1e-10;
      } else if (s == "sum") {
        res = sum_json(A, p.direction.empty() ? default_direction(A, ctx.qp) : io::parse_complex_text(p.direction), ctx.qp,
                       residual);
        ok = ok && residual < 1e-9;
      } else if (s == "cocycle") {
        const cplx c = p.c.empty() ? default_direction(A, ctx.qp) : io::parse_complex_text(p.c);
        const cplx d = p.d.empty() ? default_direction(A, ctx.qp, 1) : io::parse_complex_text(p.d);
        res = cocycle_json(A, c, d, ctx.qp, residual);
        ok = ok && residual < 1e-9;
      } else if (s == "alien") {
        res = alien_json(A, ctx.qp, p.alpha);
      } else if (s == "act") {
        const FormalElement phi = p.element.empty() ? FormalElement{} : io::parse<FormalElement>(parse_json_text(p.element, "--element"));
        const auto chk = act_unramified_check(A, phi.t, ctx.qp);
        res = io::emit(chk);
        ok = ok && chk.max() < 1e-8;
      } else if (s == "ramify") {
        const auto R = ram(A, p.r, ctx.qp);
        res = io::emit(R);
      } else {
        throw Error(ErrorCode::InvalidInput, "unknown step '" + s + "'");
      }
    } catch (const Error& e) {
      out["error"] = {{"step", i}, {"name", s}, {"code", error_name(e.code())}, {"message", e.what()}};
      emit_out(out);
      summary("pipeline: step " + std::to_string(i) + " (" + s + ") failed: " + e.what());
      return kInputError;
    }
    out["steps"].push_back({{"step", s}, {"output", res}});
  }
  emit_out(out);
  summary("pipeline: " + std::to_string(p.steps.size()) + " steps" + (ok ? "" : ", a check failed"));
  return ok ? kPass : kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qdx: q-difference systems, Stokes data and q-alien derivatives"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config, "JSON run configuration (QDX_CONFIG is the fallback)");
  app.add_option("--tau", common.tau, "tau with q = exp(2 i pi tau), Im tau < 0 (e.g. -0.22i or 0.1,-0.3)");
  app.add_option("--q", common.q, "q directly, |q| > 1 (principal log)");
  app.add_option("--r", common.r, "ramification index");
  app.add_option("--z0", common.z0, "base point");
  app.add_option("--seed", common.seed, "seed for randomized checks");
  app.add_option("--system", common.system, "system JSON file");

  int delta_max = 5, n_bound = 10;
  double tol = 1e-12;
  auto* good = app.add_subcommand("good-q", "test whether q is a good value");
  good->add_option("--delta-max", delta_max, "largest theta power delta")->capture_default_str();
  good->add_option("--n-bound", n_bound, "coefficients t_n with |n| <= bound")->capture_default_str();
  good->add_option("--tol", tol, "a coefficient below tol counts as zero")->capture_default_str();
  auto* badq = app.add_subcommand("bad-q", "locate the real bad value q* < -1");
  auto* newton = app.add_subcommand("newton", "Newton data of a system or scalar operator");
  auto* gr = app.add_subcommand("gr", "graded system");
  auto* normalize = app.add_subcommand("normalize", "Birkhoff-Guenther normal form");
  std::string direction, cs, ds, alpha, element, symbol, suite;
  auto* sum = app.add_subcommand("sum", "summation in an allowed direction");
  sum->add_option("--direction", direction, "direction c (re,im)");
  auto* cocycle = app.add_subcommand("cocycle", "Stokes cocycle F_c^{-1} F_d");
  cocycle->add_option("--c", cs, "first direction (default: first allowed)");
  cocycle->add_option("--d", ds, "second direction (default: next allowed)");
  bool all = false;
  auto* alien = app.add_subcommand("alien", "q-alien derivatives");
  alien->add_flag("--all", all, "every nonzero alien derivative");
  alien->add_option("--alpha", alpha, "single point alpha of E_q");
  auto* act = app.add_subcommand("act", "action of a formal group element on a Psi symbol");
  act->add_option("--element", element, "formal or wild element as inline JSON");
  act->add_option("--symbol", symbol, "Psi symbol as inline JSON");
  int fr = 0;
  auto* formulaire = app.add_subcommand("formulaire", "D/T/Z identities");
  formulaire->add_option("--r", fr)->required();
  int rr = 0;
  bool descend = false, embed = false;
  auto* ramify = app.add_subcommand("ramify", "ramification, descent and embedding");
  ramify->add_option("--r", rr, "ramification index");
  ramify->add_flag("--descend", descend, "Hilbert 90 descent of a {B, G, offsets, r} file");
  ramify->add_flag("--embed", embed, "embed the system into the restriction of its ramification");
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", suite, "theta, stokes, alien, formal, ramify or all")->required();
  PipelineArgs pipe;
  std::string steps;
  auto* pipeline = app.add_subcommand("pipeline", "thread a system through steps");
  pipeline->add_option("--steps", steps, "comma-separated: newton,gr,normalize,sum,cocycle,alien,act,ramify");
  pipeline->add_option("--direction", pipe.direction, "direction for the sum step");
  pipeline->add_option("--c", pipe.c, "first direction for the cocycle step");
  pipeline->add_option("--d", pipe.d, "second direction for the cocycle step");
  pipeline->add_option("--alpha", pipe.alpha, "point for the alien step (default: all)");
  pipeline->add_option("--element", pipe.element, "formal element JSON for the act step");
  pipeline->add_option("--ram", pipe.r, "ramification index for the ramify step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    const Ctx ctx = make_context(common);
    if (*good) return cmd_good_q(ctx, delta_max, n_bound, tol);
    if (*badq) return cmd_bad_q();
    if (*newton) return cmd_newton(common);
    if (*gr) return cmd_gr(common);
    if (*normalize) return cmd_normalize(ctx, common);
    if (*sum) return cmd_sum(ctx, common, direction);
    if (*cocycle) return cmd_cocycle(ctx, common, cs, ds);
    if (*alien) return cmd_alien(ctx, common, all, alpha);
    if (*act) return cmd_act(ctx, element, symbol);
    if (*formulaire) return cmd_formulaire(fr);
    if (*ramify) return cmd_ramify(ctx, common, rr > 0 ? rr : ctx.cfg.r, descend, embed);
    if (*verify) return cmd_verify(ctx, suite);
    if (*pipeline) {
      std::stringstream ss(steps);
      for (std::string s; std::getline(ss, s, ',');)
        if (!s.empty()) pipe.steps.push_back(s);
      return cmd_pipeline(ctx, common, pipe);
    }
  } catch (const Error& e) {
    emit_out({{"error", error_name(e.code())}, {"message", e.what()}});
    summary(std::string("error: ") + e.what());
    return kInputError;
  } catch (const InputError& e) {
    emit_out({{"error", "InvalidInput"}, {"message", e.what()}});
    summary(std::string("error: ") + e.what());
    return kInputError;
  } catch (const json::exception& e) {
    emit_out({{"error", "InvalidInput"}, {"message", e.what()}});
    summary(std::string("error: malformed JSON input: ") + e.what());
    return kInputError;
  }
  return kInputError;
}
