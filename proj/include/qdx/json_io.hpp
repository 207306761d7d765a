#pragma once

// JSON forms of the library artifacts. emit/parse pairs round-trip exactly;
// report types are emit-only. Malformed input raises InvalidInput.

#include <string>

#include "json.hpp"
#include "qdx/alien.hpp"
#include "qdx/formal.hpp"
#include "qdx/ramify.hpp"
#include "qdx/stokes.hpp"
#include "qdx/theta.hpp"

namespace qdx::io {

using json = nlohmann::json;

// "1.5", "-0.22i", "0.1-0.2i", "re,im".
cplx parse_complex_text(const std::string& s);
Rational parse_rational_text(const std::string& s);

json emit(cplx c);
json emit(const QParams& qp);
json emit(const LaurentSeries& s);
json emit(const LaurentMatrix& m);
json emit(const CMatrix& m);
json emit(Rational x);
json emit(const NewtonData& n);
json emit(const EData& e);
json emit(const DiagBlock& b);
json emit(const BlockSystem& A);
json emit(const EllipticPoint& p);
json emit(const AlienBlock& b);
json emit(const FormalElement& phi);
json emit(const WildGroupElement& g);
json emit(const PsiSymbol& s);
json emit(const NormalForm& nf);

template <class T>
T parse(const json& j);
template <> cplx parse<cplx>(const json& j);
template <> QParams parse<QParams>(const json& j);
template <> LaurentSeries parse<LaurentSeries>(const json& j);
template <> LaurentMatrix parse<LaurentMatrix>(const json& j);
template <> CMatrix parse<CMatrix>(const json& j);
template <> Rational parse<Rational>(const json& j);
template <> NewtonData parse<NewtonData>(const json& j);
template <> EData parse<EData>(const json& j);
template <> DiagBlock parse<DiagBlock>(const json& j);
template <> BlockSystem parse<BlockSystem>(const json& j);
template <> EllipticPoint parse<EllipticPoint>(const json& j);
template <> AlienBlock parse<AlienBlock>(const json& j);
template <> FormalElement parse<FormalElement>(const json& j);
template <> WildGroupElement parse<WildGroupElement>(const json& j);
template <> PsiSymbol parse<PsiSymbol>(const json& j);
template <> NormalForm parse<NormalForm>(const json& j);

// Emit-only reports.
json emit(const GoodValueReport& r);
json emit(const BadQResult& r);
json emit(const SummationResult& s);
json emit(const FormulaireReport& r);
json emit(const Descent& d);
json emit(const Embedding& e);
json emit(const RamifiedSystem& R);
json emit(const ActionCheck& c);

}  // namespace qdx::io
