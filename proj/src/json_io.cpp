#include "qdx/json_io.hpp"

#include <cctype>
#include <cstdlib>

namespace qdx::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

int get_int(const json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string(what) + " must be an integer");
  return j.get<int>();
}

double get_double(const std::string& s, size_t& pos) {
  const char* begin = s.c_str() + pos;
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) bad("cannot read a number in '" + s + "'");
  pos += static_cast<size_t>(end - begin);
  return v;
}

std::string base_name(Base b) { return b == Base::Q ? "q" : "qr"; }

Base parse_base(const json& j) {
  const std::string s = j.get<std::string>();
  if (s == "q") return Base::Q;
  if (s == "qr") return Base::QR;
  bad("base must be \"q\" or \"qr\"");
}

std::string kind_name(BlockKind k) {
  switch (k) {
    case BlockKind::Const:
      return "const";
    case BlockKind::E:
      return "E";
    case BlockKind::Laurent:
      return "laurent";
  }
  return "";
}

}  // namespace

cplx parse_complex_text(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) bad("empty complex number");
  if (const auto comma = s.find(','); comma != std::string::npos) {
    size_t p = 0;
    const std::string re = s.substr(0, comma), im = s.substr(comma + 1);
    const double a = get_double(re, p);
    if (p != re.size()) bad("cannot read '" + text + "'");
    p = 0;
    const double b = get_double(im, p);
    if (p != im.size()) bad("cannot read '" + text + "'");
    return {a, b};
  }
  // a, bi, a+bi, a-bi, i, -i.
  cplx out = 0.0;
  size_t p = 0;
  while (p < s.size()) {
    size_t q = p;
    if (s[q] == '+' || s[q] == '-') ++q;
    const bool bare_i = q < s.size() && s[q] == 'i' && (q + 1 == s.size() || s[q + 1] == '+' || s[q + 1] == '-');
    double v;
    if (bare_i) {
      v = s[p] == '-' ? -1.0 : 1.0;
      p = q;
    } else {
      v = get_double(s, p);
    }
    if (p < s.size() && s[p] == 'i') {
      out += cplx(0.0, v);
      ++p;
    } else {
      out += v;
    }
    if (p < s.size() && s[p] != '+' && s[p] != '-') bad("cannot read '" + text + "'");
  }
  return out;
}

Rational parse_rational_text(const std::string& s) {
  size_t p = 0;
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      const long n = std::stol(s, &p);
      if (p != s.size()) bad("cannot read rational '" + s + "'");
      return Rational(n);
    }
    const std::string a = s.substr(0, slash), b = s.substr(slash + 1);
    size_t pa = 0, pb = 0;
    const long n = std::stol(a, &pa), d = std::stol(b, &pb);
    if (pa != a.size() || pb != b.size()) bad("cannot read rational '" + s + "'");
    return Rational(n, d);
  } catch (const std::logic_error&) {
    bad("cannot read rational '" + s + "'");
  }
}

// ------------------------------------------------------------------ emit

json emit(cplx c) { return json::array({c.real(), c.imag()}); }

json emit(const QParams& qp) { return {{"tau", emit(qp.tau())}, {"r", qp.r()}, {"z0", emit(qp.z0())}}; }

json emit(const LaurentSeries& s) {
  json coeffs = json::object();
  for (const auto& [k, v] : s.coeffs()) coeffs[std::to_string(k)] = emit(v);
  return {{"window", json::array({s.lo(), s.hi()})}, {"coeffs", coeffs}, {"cap", s.cap()}};
}

json emit(const LaurentMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(emit(m(i, j)));
    rows.push_back(row);
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", rows}};
}

json emit(const CMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(emit(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json emit(Rational x) { return x.str(); }

json emit(const NewtonData& n) {
  json slopes = json::array();
  for (const auto& s : n.slopes) slopes.push_back(emit(s));
  return {{"slopes", slopes}, {"mults", n.mults}};
}

json emit(const EData& e) { return {{"r", e.r}, {"d", e.d}, {"c", emit(e.c)}, {"m", e.m}}; }

json emit(const DiagBlock& b) {
  json j = {{"kind", kind_name(b.kind)}, {"slope", emit(b.slope)}};
  switch (b.kind) {
    case BlockKind::Const:
      j["A"] = emit(b.A);
      break;
    case BlockKind::E: {
      json parts = json::array();
      for (const auto& e : b.parts) parts.push_back(emit(e));
      j["parts"] = parts;
      break;
    }
    case BlockKind::Laurent:
      j["M"] = emit(b.M);
      break;
  }
  return j;
}

json emit(const BlockSystem& A) {
  json diag = json::array();
  for (const auto& b : A.diag) diag.push_back(emit(b));
  json upper = json::object();
  for (const auto& [ij, U] : A.upper) upper[std::to_string(ij.first) + "," + std::to_string(ij.second)] = emit(U);
  return {{"newton", emit(A.newton())}, {"diag", diag}, {"upper", upper}};
}

json emit(const EllipticPoint& p) { return {{"rep", emit(p.rep)}, {"base", base_name(p.base)}}; }

json emit(const AlienBlock& b) {
  return {{"delta", b.delta}, {"alpha", emit(b.alpha)},  {"beta", emit(b.beta)}, {"block", json::array({b.i, b.j})},
          {"N", emit(b.N)},   {"c", emit(b.c)},          {"l", b.l},            {"m", b.m}};
}

json emit(const FormalElement& phi) {
  return {{"lambda", emit(phi.lambda)}, {"t", emit(phi.t)}, {"k1", phi.k1}, {"k2", phi.k2}};
}

json emit(const WildGroupElement& g) { return {{"x", emit(g.x)}, {"k1", g.k1}, {"k2", g.k2}}; }

json emit(const PsiSymbol& s) {
  if (s.kind == PsiSymbol::Kind::Tau) return {{"kind", "tau"}, {"coeff", emit(s.coeff)}};
  return {{"kind", "graded"}, {"delta", s.delta}, {"beta", emit(s.beta)}, {"l", s.l}, {"coeff", emit(s.coeff)}};
}

json emit(const NormalForm& nf) { return {{"normal", emit(nf.normal)}, {"F", emit(nf.F)}}; }

json emit(const GoodValueReport& r) {
  return {{"min_abs", r.min_abs},
          {"argmin", json::array({r.argmin_delta, r.argmin_n})},
          {"tol", r.tol},
          {"verdict", r.bad ? "bad within tested range" : "good within tested range"}};
}

json emit(const BadQResult& r) {
  return {{"q_star", r.q_star}, {"x_star", r.x_star}, {"t0_abs", r.t0}, {"t0_vs_hex_series", r.f_vs_t0}};
}

json emit(const SummationResult& s) {
  json poles = json::array();
  for (const auto& p : s.poles)
    poles.push_back({{"block", json::array({p.i, p.j})}, {"spiral", emit(p.spiral)}, {"max_order", p.max_order}});
  return {{"c", emit(s.c)}, {"qparams", emit(s.qp)}, {"offsets", s.offsets}, {"mus", s.mus}, {"G", emit(s.G)},
          {"poles", poles}};
}

json emit(const FormulaireReport& r) {
  json items = json::array();
  for (const auto& it : r.items) items.push_back({{"name", it.name}, {"deviation", it.deviation}});
  return {{"r", r.r}, {"items", items}, {"max_deviation", r.max_deviation}};
}

json emit(const Descent& d) {
  return {{"H", emit(d.H)},
          {"C", emit(d.C)},
          {"C_r", emit(d.C_r)},
          {"closure", d.closure},
          {"invariance", d.invariance},
          {"h_relation", d.h_relation}};
}

json emit(const Embedding& e) { return {{"r", e.r}, {"D", emit(e.D)}, {"inclusion", emit(e.inclusion)}}; }

json emit(const RamifiedSystem& R) {
  json slopes = json::array();
  for (const auto& s : R.slopes) slopes.push_back(emit(s));
  return {{"r", R.r}, {"A_prime", emit(R.A_prime)}, {"offsets", R.offsets}, {"slopes", slopes}};
}

json emit(const ActionCheck& c) {
  return {{"r", c.r},           {"delta", c.delta},           {"points", c.points},
          {"h", c.h},           {"gamma1", c.gamma1},         {"gamma2", c.gamma2},
          {"psi_gamma2", c.psi_gamma2}, {"commutation", c.commutation}, {"max", c.max()}};
}

// ----------------------------------------------------------------- parse

template <>
cplx parse<cplx>(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_string()) return parse_complex_text(j.get<std::string>());
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  bad("complex number must be [re, im], a number or a string");
}

template <>
QParams parse<QParams>(const json& j) {
  const int r = j.contains("r") ? get_int(j.at("r"), "r") : 1;
  const cplx z0 = j.contains("z0") ? parse<cplx>(j.at("z0")) : cplx(1.0, 0.0);
  if (r < 1) bad("r must be positive");
  if (j.contains("tau")) {
    const cplx tau = parse<cplx>(j.at("tau"));
    if (!(tau.imag() < 0.0)) bad("Im tau must be negative (|q| > 1)");
    return QParams(tau, r, z0);
  }
  if (j.contains("q")) {
    const cplx q = parse<cplx>(j.at("q"));
    if (!(std::abs(q) > 1.0)) bad("|q| must exceed 1");
    return QParams::from_q(q, r, z0);
  }
  bad("q-parameters need 'tau' or 'q'");
}

template <>
LaurentSeries parse<LaurentSeries>(const json& j) {
  const json& w = field(j, "window");
  if (!w.is_array() || w.size() != 2) bad("window must be [lo, hi]");
  const int lo = get_int(w[0], "window"), hi = get_int(w[1], "window");
  const int cap = j.contains("cap") ? get_int(j.at("cap"), "cap") : LaurentSeries::kDefaultCap;
  const json& c = field(j, "coeffs");
  if (!c.is_object()) bad("coeffs must be an object keyed by exponent");
  if (hi < lo) {
    if (!c.empty()) bad("coefficients outside the window");
    return LaurentSeries(0, {}, cap);
  }
  std::vector<cplx> dense(static_cast<size_t>(hi - lo + 1), 0.0);
  for (const auto& [key, val] : c.items()) {
    const Rational k = parse_rational_text(key);
    if (!k.is_integer() || k.num < lo || k.num > hi) bad("exponent " + key + " outside the window");
    dense[static_cast<size_t>(k.num - lo)] = parse<cplx>(val);
  }
  return LaurentSeries(lo, dense, cap);
}

template <>
LaurentMatrix parse<LaurentMatrix>(const json& j) {
  const json& e = field(j, "entries");
  const int rows = j.contains("rows") ? get_int(j.at("rows"), "rows") : static_cast<int>(e.size());
  const int cols = j.contains("cols") ? get_int(j.at("cols"), "cols") : (e.empty() ? 0 : static_cast<int>(e[0].size()));
  if (!e.is_array() || static_cast<int>(e.size()) != rows) bad("entries do not match rows");
  LaurentMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!e[i].is_array() || static_cast<int>(e[i].size()) != cols) bad("entries do not match cols");
    for (int k = 0; k < cols; ++k) m(i, k) = parse<LaurentSeries>(e[i][k]);
  }
  return m;
}

template <>
CMatrix parse<CMatrix>(const json& j) {
  if (!j.is_array()) bad("matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols) bad("ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = parse<cplx>(j[i][k]);
  }
  return m;
}

template <>
Rational parse<Rational>(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) return parse_rational_text(j.get<std::string>());
  if (j.is_array() && j.size() == 2) return Rational(j[0].get<long>(), j[1].get<long>());
  bad("rational must be \"p/q\", an integer or [p, q]");
}

template <>
NewtonData parse<NewtonData>(const json& j) {
  NewtonData n;
  for (const auto& s : field(j, "slopes")) n.slopes.push_back(parse<Rational>(s));
  for (const auto& m : field(j, "mults")) n.mults.push_back(get_int(m, "mult"));
  n.validate();
  return n;
}

template <>
EData parse<EData>(const json& j) {
  EData e;
  e.r = get_int(field(j, "r"), "r");
  e.d = get_int(field(j, "d"), "d");
  e.c = parse<cplx>(field(j, "c"));
  e.m = j.contains("m") ? get_int(j.at("m"), "m") : 1;
  if (e.r < 1 || e.m < 1) bad("E block needs r, m >= 1");
  if (e.c == 0.0) bad("E block needs c != 0");
  return e;
}

template <>
DiagBlock parse<DiagBlock>(const json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "const") {
    const Rational s = parse<Rational>(field(j, "slope"));
    if (!s.is_integer()) bad("constant blocks need an integral slope");
    return DiagBlock::constant(static_cast<int>(s.num), parse<CMatrix>(field(j, "A")));
  }
  if (kind == "E") {
    std::vector<EData> parts;
    for (const auto& p : field(j, "parts")) parts.push_back(parse<EData>(p));
    DiagBlock b = DiagBlock::e_sum(parts);
    if (j.contains("slope") && !(parse<Rational>(j.at("slope")) == b.slope)) bad("declared slope differs from d/r");
    return b;
  }
  if (kind == "laurent") return DiagBlock::laurent(parse<Rational>(field(j, "slope")), parse<LaurentMatrix>(field(j, "M")));
  bad("block kind must be const, E or laurent");
}

template <>
BlockSystem parse<BlockSystem>(const json& j) {
  BlockSystem A;
  for (const auto& b : field(j, "diag")) A.diag.push_back(parse<DiagBlock>(b));
  if (j.contains("upper"))
    for (const auto& [key, val] : j.at("upper").items()) {
      const auto comma = key.find(',');
      if (comma == std::string::npos) bad("upper keys are \"i,j\"");
      int i = 0, k = 0;
      try {
        i = std::stoi(key.substr(0, comma));
        k = std::stoi(key.substr(comma + 1));
      } catch (const std::logic_error&) {
        bad("upper keys are \"i,j\"");
      }
      if (!(0 <= i && i < k && k < A.blocks())) bad("upper block " + key + " out of range");
      A.upper[{i, k}] = parse<LaurentMatrix>(val);
    }
  A.validate();
  for (const auto& [ij, U] : A.upper)
    if (U.rows() != A.diag[ij.first].size() || U.cols() != A.diag[ij.second].size())
      bad("upper block has the wrong shape");
  if (j.contains("newton") && !(parse<NewtonData>(j.at("newton")) == A.newton()))
    bad("declared Newton data differs from the blocks");
  return A;
}

template <>
EllipticPoint parse<EllipticPoint>(const json& j) {
  if (!j.is_object()) return EllipticPoint{parse<cplx>(j), Base::Q};
  EllipticPoint p;
  p.rep = parse<cplx>(field(j, "rep"));
  p.base = j.contains("base") ? parse_base(j.at("base")) : Base::Q;
  return p;
}

template <>
AlienBlock parse<AlienBlock>(const json& j) {
  AlienBlock b;
  b.delta = get_int(field(j, "delta"), "delta");
  b.alpha = parse<EllipticPoint>(field(j, "alpha"));
  b.beta = parse<EllipticPoint>(field(j, "beta"));
  const json& blk = field(j, "block");
  b.i = get_int(blk.at(0), "block");
  b.j = get_int(blk.at(1), "block");
  b.N = parse<CMatrix>(field(j, "N"));
  b.c = j.contains("c") ? parse<cplx>(j.at("c")) : b.alpha.rep;
  b.l = j.contains("l") ? get_int(j.at("l"), "l") : -1;
  b.m = j.contains("m") ? get_int(j.at("m"), "m") : -1;
  return b;
}

template <>
FormalElement parse<FormalElement>(const json& j) {
  FormalElement f;
  if (j.contains("lambda")) f.lambda = parse<cplx>(j.at("lambda"));
  if (j.contains("t")) f.t = parse<cplx>(j.at("t"));
  if (j.contains("k1")) f.k1 = get_int(j.at("k1"), "k1");
  if (j.contains("k2")) f.k2 = get_int(j.at("k2"), "k2");
  if (f.t == 0.0) bad("t = h(1/r) must be nonzero");
  return f;
}

template <>
WildGroupElement parse<WildGroupElement>(const json& j) {
  return WildGroupElement(j.contains("x") ? parse<Rational>(j.at("x")) : Rational(0),
                          j.contains("k1") ? get_int(j.at("k1"), "k1") : 0,
                          j.contains("k2") ? get_int(j.at("k2"), "k2") : 0);
}

template <>
PsiSymbol parse<PsiSymbol>(const json& j) {
  PsiSymbol s;
  const std::string kind = j.contains("kind") ? j.at("kind").get<std::string>() : "graded";
  if (j.contains("coeff")) s.coeff = parse<cplx>(j.at("coeff"));
  if (kind == "tau") {
    s.kind = PsiSymbol::Kind::Tau;
    return s;
  }
  if (kind != "graded") bad("symbol kind must be tau or graded");
  s.delta = get_int(field(j, "delta"), "delta");
  if (s.delta < 1) bad("delta must be positive");
  const json& b = field(j, "beta");
  s.beta = parse<EllipticPoint>(b);
  if (!b.is_object()) s.beta.base = Base::QR;
  s.l = get_int(field(j, "l"), "l");
  return s;
}

template <>
NormalForm parse<NormalForm>(const json& j) {
  return NormalForm{parse<BlockSystem>(field(j, "normal")), parse<LaurentMatrix>(field(j, "F"))};
}

}  // namespace qdx::io
