#pragma once

// JSON wire formats: group input specs, relation reports, and unit-group
// reports. Insertion-ordered objects keep every serialization byte-stable.

#include <json.hpp>

#include "normrel/abelian.hpp"
#include "normrel/multiquadratic.hpp"
#include "normrel/relations.hpp"

namespace normrel {

using Json = nlohmann::ordered_json;

// Group input: {"kind":"perm","generators":[[1,0,2],...]}
//            | {"kind":"abelian","invariants":[2,2]}
//            | {"kind":"product","factors":[spec,...]}
//            | {"kind":"named","name":"A5"}
inline GroupPtr parse_group_spec(const Json& spec, long cap = default_order_cap()) {
    if (!spec.is_object() || !spec.contains("kind"))
        throw std::invalid_argument("group spec must be an object with a \"kind\"");
    std::string kind = spec.at("kind").get<std::string>();
    if (kind == "perm") {
        std::vector<std::vector<int32_t>> gens;
        for (const auto& p : spec.at("generators")) gens.push_back(p.get<std::vector<int32_t>>());
        return group_from_permutations(gens, cap);
    }
    if (kind == "abelian") {
        return group_from_abelian_invariants(spec.at("invariants").get<std::vector<long>>(), cap);
    }
    if (kind == "product") {
        const auto& factors = spec.at("factors");
        if (!factors.is_array() || factors.empty())
            throw std::invalid_argument("product needs a nonempty factor list");
        GroupPtr g = parse_group_spec(factors[0], cap);
        for (std::size_t i = 1; i < factors.size(); ++i)
            g = direct_product(g, parse_group_spec(factors[i], cap), cap);
        return g;
    }
    if (kind == "named") {
        return named_group(spec.at("name").get<std::string>(), cap);
    }
    throw std::invalid_argument("unknown group kind: " + kind);
}

// CLI shorthand: "abelian:2,2", "named:A5", "@file.json", or inline JSON.
inline Json group_shorthand_to_spec(const std::string& text) {
    if (!text.empty() && text[0] == '{') return Json::parse(text);
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("group shorthand must look like kind:payload");
    std::string kind = text.substr(0, colon);
    std::string payload = text.substr(colon + 1);
    if (kind == "named") return Json{{"kind", "named"}, {"name", payload}};
    if (kind == "abelian") {
        std::vector<long> invariants;
        std::size_t pos = 0;
        while (pos < payload.size()) {
            std::size_t next = payload.find(',', pos);
            if (next == std::string::npos) next = payload.size();
            invariants.push_back(std::stol(payload.substr(pos, next - pos)));
            pos = next + 1;
        }
        return Json{{"kind", "abelian"}, {"invariants", invariants}};
    }
    if (kind == "perm") return Json{{"kind", "perm"}, {"generators", Json::parse(payload)}};
    throw std::invalid_argument("unknown group shorthand kind: " + kind);
}

inline Json group_summary(const GroupPtr& g) {
    return Json{{"label", g->label}, {"order", g->order}};
}

inline Json algebra_element_to_json(const AlgebraElement& a) {
    Json coeffs = Json::array();
    for (const auto& c : a.coeffs) coeffs.push_back(c.get_str());
    return coeffs;
}

// {"denominator":d, "terms":[{"a":[...],"H":[...elements...],"b":[...]}]}
inline Json norm_relation_to_json(const NormRelation& rel) {
    Json terms = Json::array();
    for (const auto& t : rel.terms) {
        Json term;
        term["a"] = algebra_element_to_json(t.a);
        term["H"] = t.subgroup.elements;
        term["b"] = algebra_element_to_json(t.b);
        terms.push_back(std::move(term));
    }
    return Json{{"denominator", checked_long(rel.denominator, "denominator")},
                {"terms", std::move(terms)}};
}

// Scalar relations address subgroups by their index in the all_subgroups
// ordering: {"denominator":d, "coefficients":{"<subgroup-id>":b_H}}
inline Json scalar_relation_to_json(const ScalarRelation& rel,
                                    const std::vector<Subgroup>& universe) {
    Json coeffs = Json::object();
    for (const auto& [h, c] : rel.coefficients) {
        long id = -1;
        for (std::size_t i = 0; i < universe.size(); ++i)
            if (universe[i].elements == h.elements) {
                id = static_cast<long>(i);
                break;
            }
        if (id < 0) throw std::invalid_argument("subgroup not in the provided universe");
        coeffs[std::to_string(id)] = checked_long(c, "coefficient");
    }
    return Json{{"denominator", checked_long(rel.denominator, "denominator")},
                {"coefficients", std::move(coeffs)}};
}

inline Json subgroup_list_json(const std::vector<Subgroup>& subs) {
    Json out = Json::array();
    for (const auto& h : subs)
        out.push_back(Json{{"order", h.order()}, {"index", h.index()}, {"elements", h.elements}});
    return out;
}

inline Json mq_element_to_json(const MQElement& x) {
    Json coords = Json::array();
    for (const auto& c : x.coords) coords.push_back(c.get_str());
    return Json{{"coords", std::move(coords)}};
}

inline Json unit_group_report_to_json(const UnitGroupReport& report) {
    Json units = Json::array();
    for (const auto& g : report.group.generators) units.push_back(mq_element_to_json(g));
    return Json{{"field", report.group.field->generators},
                {"degree", report.group.field->degree},
                {"rank", report.group.generators.size()},
                {"units", std::move(units)},
                {"regulator", Json{{"lo", report.regulator.lo_double()},
                                   {"hi", report.regulator.hi_double()}}},
                {"initial_index_exponent", report.initial_index_exponent},
                {"certified_to_bound", report.certified_to_bound},
                {"grh_conditional", report.grh_conditional},
                {"saturation_passes", report.saturation_passes},
                {"characters_used", report.characters_used}};
}

inline Json ideal_basis_to_json(const IdealBasis& basis) {
    Json rows = Json::array();
    if (basis.ring.kind == Ring::Kind::rationals) {
        for (const auto& r : basis.zbasis) {
            Json row = Json::array();
            for (const auto& x : r) row.push_back(x.get_str());
            rows.push_back(std::move(row));
        }
    } else {
        for (const auto& r : basis.pbasis) rows.push_back(r);
    }
    Json gens = Json::array();
    for (const auto& g : basis.generators_used)
        gens.push_back(Json{{"H", g.subgroup.elements}, {"left", g.left}, {"right", g.right}});
    return Json{{"ring", basis.ring.kind == Ring::Kind::rationals
                             ? Json("Q")
                             : Json("F" + std::to_string(basis.ring.p))},
                {"rank", basis.rank},
                {"generators", std::move(gens)},
                {"basis", std::move(rows)}};
}

}  // namespace normrel
