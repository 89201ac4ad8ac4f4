#pragma once

#include "n2alg/expmap.hpp"
#include "n2alg/ns_fields.hpp"

#include "json.hpp"

namespace n2alg {

using Json = nlohmann::json;

/// Series fixture: {spec: {even: [{name, lo, hi}], odd: [..]},
///                  generators, terms: [{exponents, odd_monomial, coeff}]}
/// with coefficients in the exact Grassmann grammar.
Json series_to_json(const SuperSeries& s);
SuperSeries series_from_json(const Json& j);

Json infinitesimal_to_json(const InfinitesimalData& g);
InfinitesimalData infinitesimal_from_json(const Json& j);

Json coordmap_to_json(const CoordMap& m);
CoordMap coordmap_from_json(const Json& j);

Json field_to_json(const NsField& f);

} // namespace n2alg
