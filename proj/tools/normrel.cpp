// Batch CLI for norm relation computations with reproducible JSON output.
//
//   normrel relations --group abelian:2,2
//   normrel relations --group named:A5 --max-index 12
//   normrel funakura  --group abelian:18,2
//   normrel mqunits   --field 2,3
//
// Exit codes: 0 success, 2 input error, 3 budget exceeded, 4 internal
// verification failure.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "normrel/json_io.hpp"

namespace {

using namespace normrel;

struct Options {
    std::string group_text;
    std::string field_text;
    long max_index = 0;  // 0 = unbounded
    bool cyclic_only = false;
    long mod_p = 0;
    std::string out_path;
    uint64_t seed = 0;
    long precision_cap = 8192;
    long char_cap = 512;
    bool pretty = false;
};

GroupPtr load_group(const std::string& text) {
    Json spec;
    if (!text.empty() && text[0] == '@') {
        std::ifstream in(text.substr(1));
        if (!in) throw std::invalid_argument("cannot open group spec file " + text.substr(1));
        spec = Json::parse(in);
    } else {
        spec = group_shorthand_to_spec(text);
    }
    return parse_group_spec(spec);
}

std::vector<long> parse_field_list(const std::string& text) {
    std::vector<long> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = text.find(',', pos);
        if (next == std::string::npos) next = text.size();
        out.push_back(std::stol(text.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

Json cmd_relations(const Options& opt) {
    GroupPtr g = load_group(opt.group_text);
    std::optional<long> max_index =
        opt.max_index > 0 ? std::optional<long>(opt.max_index) : std::nullopt;
    std::vector<Subgroup> universe = all_subgroups(g, max_index, opt.cyclic_only);
    std::vector<Subgroup> family;
    for (const auto& h : universe)
        if (!h.is_trivial()) family.push_back(h);

    Json report;
    report["command"] = "relations";
    report["seed"] = opt.seed;
    report["group"] = group_summary(g);
    report["filters"] =
        Json{{"max_index", opt.max_index}, {"cyclic_only", opt.cyclic_only}};
    report["subgroup_count"] = family.size();

    auto admits = admits_norm_relation(g);
    report["admits_norm_relation"] = admits.admits;
    report["pq_witness"] =
        admits.pq_witness ? Json(admits.pq_witness->elements) : Json(nullptr);

    mpz_class d = optimal_denominator(g, family);
    report["optimal_denominator"] = checked_long(d, "denominator");
    if (d > 0) {
        Json support = Json::array();
        for (long p : denominator_support(d)) support.push_back(p);
        report["denominator_support"] = std::move(support);
        auto rel = find_norm_relation(g, family);
        report["relation"] = norm_relation_to_json(*rel);
        report["relation_verified"] = true;  // find_norm_relation re-checks
    } else {
        report["denominator_support"] = Json::array();
        report["relation"] = nullptr;
        report["relation_verified"] = false;
    }

    auto scalar = find_scalar_relation(g, family);
    Json scalar_json;
    scalar_json["exists"] = scalar.has_value();
    if (scalar) {
        scalar_json["denominator"] = checked_long(scalar->denominator, "denominator");
        Json support = Json::array();
        for (long p : denominator_support(scalar->denominator)) support.push_back(p);
        scalar_json["support"] = std::move(support);
        // subgroup ids index the unfiltered all_subgroups ordering
        scalar_json["relation"] = scalar_relation_to_json(*scalar, all_subgroups(g));
    }
    report["scalar"] = std::move(scalar_json);

    report["minimal_index"] =
        Json{{"general", minimal_relation_index(g, RelationKind::general, std::nullopt, max_index)},
             {"scalar", minimal_relation_index(g, RelationKind::scalar, std::nullopt, max_index)}};

    if (opt.mod_p > 0)
        report["mod_p"] =
            Json{{"p", opt.mod_p}, {"exists", exists_relation_mod_p(g, family, opt.mod_p)}};
    return report;
}

Json cmd_funakura(const Options& opt) {
    GroupPtr g = load_group(opt.group_text);
    ScalarRelation rel = funakura_relation(g);  // rejects cyclic input
    std::vector<Subgroup> universe = all_subgroups(g);

    DualityTable table(g);
    bool agree = true;
    for (long chi = 0; chi < g->order; ++chi)
        if (funakura_coefficient(table, table.character(chi), CoefficientFormula::product) !=
            funakura_coefficient(table, table.character(chi), CoefficientFormula::moebius)) {
            agree = false;
            break;
        }

    Json report;
    report["command"] = "funakura";
    report["seed"] = opt.seed;
    report["group"] = group_summary(g);
    report["denominator"] = checked_long(rel.denominator, "denominator");
    report["relation"] = scalar_relation_to_json(rel, universe);
    report["formulas_agree"] = agree;
    long bound = g->order / radical(g->order);
    report["denominator_bound"] = bound;
    report["denominator_divides_bound"] = bound % checked_long(rel.denominator, "d") == 0;

    auto opt_rel = optimal_abelian_relation(g);
    Json optimal;
    optimal["exists"] = opt_rel.has_value();
    if (opt_rel) {
        optimal["denominator"] = checked_long(opt_rel->relation.denominator, "denominator");
        optimal["n0"] = opt_rel->n0;
        long max_index = 1;
        for (const auto& [h, c] : opt_rel->relation.coefficients)
            max_index = std::max(max_index, h.index());
        optimal["max_subgroup_index"] = max_index;
        optimal["relation"] = scalar_relation_to_json(opt_rel->relation, universe);
    }
    report["optimal"] = std::move(optimal);
    return report;
}

Json cmd_mqunits(const Options& opt) {
    std::vector<long> gens = parse_field_list(opt.field_text);
    FieldPtr f = make_field(gens);
    SaturationBudget budget{opt.char_cap, opt.precision_cap};
    UnitGroupReport report = unit_group(f, budget);
    Json out = unit_group_report_to_json(report);
    out["command"] = "mqunits";
    out["seed"] = opt.seed;
    Json subfields = Json::array();
    for (long d : quad_subfields(f)) subfields.push_back(d);
    out["subfields"] = std::move(subfields);
    return out;
}

void emit(const Json& report, const Options& opt) {
    std::string text = opt.pretty ? report.dump(2) : report.dump();
    text += "\n";
    if (opt.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(opt.out_path, std::ios::binary);
        if (!out) throw std::invalid_argument("cannot open output file " + opt.out_path);
        out << text;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"norm relations in rational group algebras"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", opt.out_path, "write the JSON report to a file");
        cmd->add_option("--seed", opt.seed, "seed recorded in the report");
        cmd->add_flag("--pretty", opt.pretty, "indent the JSON output");
    };

    CLI::App* relations = app.add_subcommand("relations", "norm and scalar relation search");
    relations->add_option("--group", opt.group_text, "group spec (kind:payload, inline JSON, or @file)")
        ->required();
    relations->add_option("--max-index", opt.max_index, "only subgroups of index at most this");
    relations->add_flag("--cyclic-only", opt.cyclic_only, "restrict to cyclic subgroups");
    relations->add_option("--mod-p", opt.mod_p, "also test existence over F_p");
    add_common(relations);

    CLI::App* funakura = app.add_subcommand("funakura", "explicit abelian relations");
    funakura->add_option("--group", opt.group_text, "abelian group spec")->required();
    add_common(funakura);

    CLI::App* mqunits = app.add_subcommand("mqunits", "multiquadratic unit groups");
    mqunits->add_option("--field", opt.field_text, "comma separated squarefree radicands")
        ->required();
    mqunits->add_option("--precision-cap", opt.precision_cap, "square root precision ladder cap");
    mqunits->add_option("--char-cap", opt.char_cap, "character budget for saturation");
    add_common(mqunits);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (relations->parsed()) {
            emit(cmd_relations(opt), opt);
        } else if (funakura->parsed()) {
            emit(cmd_funakura(opt), opt);
        } else if (mqunits->parsed()) {
            emit(cmd_mqunits(opt), opt);
        }
        return 0;
    } catch (const normrel::verification_failure& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 4;
    } catch (const normrel::cap_exceeded& e) {
        std::cerr << "budget: " << e.what() << "\n";
        return 3;
    } catch (const normrel::budget_exhausted& e) {
        std::cerr << "budget: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
