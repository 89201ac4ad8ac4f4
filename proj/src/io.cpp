#include "n2alg/io.hpp"

#include <stdexcept>

namespace n2alg {

Json series_to_json(const SuperSeries& s) {
    Json j;
    j["spec"]["even"] = Json::array();
    for (auto& e : s.spec->even)
        j["spec"]["even"].push_back({{"name", e.name}, {"lo", e.lo}, {"hi", e.hi}});
    j["spec"]["odd"] = s.spec->odd;
    j["generators"] = s.generators;
    j["terms"] = Json::array();
    for (auto& [key, g] : s.terms) {
        Json t;
        t["exponents"] = Json::array();
        for (int v = 0; v < s.n_even(); ++v) t["exponents"].push_back(key.e[v]);
        t["odd_monomial"] = Json::array();
        for (std::size_t v = 0; v < s.spec->odd.size(); ++v)
            if (key.mask & (1u << v)) t["odd_monomial"].push_back(s.spec->odd[v]);
        t["coeff"] = g.str();
        j["terms"].push_back(t);
    }
    return j;
}

SuperSeries series_from_json(const Json& j) {
    std::vector<VariableSpec::EvenVar> even;
    for (auto& e : j.at("spec").at("even"))
        even.push_back({e.at("name").get<std::string>(), e.at("lo").get<int>(),
                        e.at("hi").get<int>()});
    std::vector<std::string> odd = j.at("spec").at("odd").get<std::vector<std::string>>();
    auto spec = make_spec(even, odd);
    int L = j.value("generators", 4);
    SuperSeries s = SuperSeries::zero(spec, L);
    for (auto& t : j.at("terms")) {
        TermKey key;
        auto exps = t.at("exponents");
        for (std::size_t v = 0; v < exps.size() && v < 4; ++v) key.e[v] = exps[v].get<int>();
        for (auto& name : t.at("odd_monomial")) {
            int idx = spec->odd_index(name.get<std::string>());
            if (idx < 0) throw std::invalid_argument("series_from_json: unknown odd variable");
            key.mask |= (std::uint8_t)(1u << idx);
        }
        s.add_term(key, GrassmannElement::parse(L, t.at("coeff").get<std::string>()));
    }
    return s;
}

namespace {

Json sequence_to_json(const std::vector<GrassmannElement>& v) {
    Json a = Json::array();
    for (auto& g : v) a.push_back(g.str());
    return a;
}

std::vector<GrassmannElement> sequence_from_json(const Json& a, int L) {
    std::vector<GrassmannElement> v;
    for (auto& s : a) v.push_back(GrassmannElement::parse(L, s.get<std::string>()));
    return v;
}

} // namespace

Json infinitesimal_to_json(const InfinitesimalData& g) {
    Json j;
    j["generators"] = g.generators;
    j["weight"] = g.weight;
    j["a0_1"] = g.a0_1.str();
    j["a0_2"] = g.a0_2.str();
    j["A1"] = sequence_to_json(g.A1);
    j["A2"] = sequence_to_json(g.A2);
    j["M1"] = sequence_to_json(g.M1);
    j["M2"] = sequence_to_json(g.M2);
    return j;
}

InfinitesimalData infinitesimal_from_json(const Json& j) {
    int L = j.value("generators", 4);
    int N = j.at("weight").get<int>();
    InfinitesimalData g = InfinitesimalData::identity(L, N);
    g.a0_1 = GrassmannElement::parse(L, j.at("a0_1").get<std::string>());
    g.a0_2 = GrassmannElement::parse(L, j.at("a0_2").get<std::string>());
    auto pad = [&](std::vector<GrassmannElement> v) {
        v.resize(N, GrassmannElement(L));
        return v;
    };
    g.A1 = pad(sequence_from_json(j.at("A1"), L));
    g.A2 = pad(sequence_from_json(j.at("A2"), L));
    g.M1 = pad(sequence_from_json(j.at("M1"), L));
    g.M2 = pad(sequence_from_json(j.at("M2"), L));
    return g;
}

namespace {

const char* flavor_name(EFlavor f) {
    switch (f) {
        case EFlavor::e2_homo: return "e2-homo";
        case EFlavor::e2_nonhomo: return "e2-nonhomo";
        case EFlavor::e1: return "e1";
    }
    return "?";
}

EFlavor flavor_from_name(const std::string& s) {
    if (s == "e2-homo") return EFlavor::e2_homo;
    if (s == "e2-nonhomo") return EFlavor::e2_nonhomo;
    if (s == "e1") return EFlavor::e1;
    throw std::invalid_argument("unknown flavor: " + s);
}

} // namespace

Json coordmap_to_json(const CoordMap& m) {
    Json j;
    j["flavor"] = flavor_name(m.flavor);
    j["locus"] = m.locus == Locus::zero ? "zero" : "infinity";
    j["weight"] = m.weight;
    j["components"] = Json::array();
    j["components"].push_back(series_to_json(m.comps.x));
    for (auto& p : m.comps.phi) j["components"].push_back(series_to_json(p));
    return j;
}

CoordMap coordmap_from_json(const Json& j) {
    CoordMap m;
    m.flavor = flavor_from_name(j.at("flavor").get<std::string>());
    m.locus = j.at("locus").get<std::string>() == "zero" ? Locus::zero : Locus::infinity;
    m.weight = j.at("weight").get<int>();
    auto comps = j.at("components");
    if (comps.empty()) throw std::invalid_argument("coordmap_from_json: no components");
    m.comps.x = series_from_json(comps[0]);
    for (std::size_t i = 1; i < comps.size(); ++i)
        m.comps.phi.push_back(series_from_json(comps[i]));
    return m;
}

Json field_to_json(const NsField& f) {
    Json j;
    j["flavor"] = f.flavor == FieldFlavor::homo      ? "homo"
                  : f.flavor == FieldFlavor::nonhomo ? "nonhomo"
                                                     : "one-var";
    j["window"] = f.window;
    auto names = flavor_odd_names(f.flavor);
    j["terms"] = Json::array();
    for (auto& [k, e] : f.coeffs) {
        Json t;
        t["exponent"] = k.first;
        t["odd_monomial"] = Json::array();
        for (std::size_t v = 0; v < names.size(); ++v)
            if (k.second & (1u << v)) t["odd_monomial"].push_back(names[v]);
        t["coeff"] = e.str();
        j["terms"].push_back(t);
    }
    return j;
}

} // namespace n2alg
