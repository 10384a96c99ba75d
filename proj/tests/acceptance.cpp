// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits nonzero if any fails.

#include <array>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

#include "normrel/abelian.hpp"
#include "normrel/json_io.hpp"
#include "normrel/multiquadratic.hpp"
#include "normrel/relations.hpp"
#include "normrel/zg_module.hpp"

using namespace normrel;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double elapsed(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int criterion, const std::string& label, bool pass, double seconds,
            const std::string& detail = "") {
    std::printf("%s criterion %2d: %s (%.2fs)%s%s\n", pass ? "PASS" : "FAIL", criterion,
                label.c_str(), seconds, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::vector<Subgroup> nontrivial(const std::vector<Subgroup>& subs) {
    std::vector<Subgroup> out;
    for (const auto& h : subs)
        if (!h.is_trivial()) out.push_back(h);
    return out;
}

// ---- corpus ----------------------------------------------------------------

void partitions_of(int n, std::vector<std::vector<int>>& out, std::vector<int> prefix = {},
                   int max_part = 0) {
    if (max_part == 0) max_part = n;
    if (n == 0) {
        out.push_back(prefix);
        return;
    }
    for (int k = std::min(n, max_part); k >= 1; --k) {
        auto next = prefix;
        next.push_back(k);
        partitions_of(n - k, out, next, k);
    }
}

// All isomorphism types of abelian groups of order <= cap, as primary
// invariant lists.
std::vector<std::vector<long>> abelian_types_up_to(long cap) {
    std::vector<std::vector<long>> out;
    for (long n = 1; n <= cap; ++n) {
        std::vector<std::vector<std::vector<long>>> per_prime;
        for (auto& [p, e] : factorize(n)) {
            std::vector<std::vector<int>> parts;
            partitions_of(e, parts);
            std::vector<std::vector<long>> lists;
            for (const auto& part : parts) {
                std::vector<long> l;
                for (int k : part) {
                    long q = 1;
                    for (int i = 0; i < k; ++i) q *= p;
                    l.push_back(q);
                }
                lists.push_back(l);
            }
            per_prime.push_back(lists);
        }
        std::vector<std::vector<long>> combos{{}};
        for (const auto& lists : per_prime) {
            std::vector<std::vector<long>> next;
            for (const auto& combo : combos)
                for (const auto& l : lists) {
                    auto merged = combo;
                    merged.insert(merged.end(), l.begin(), l.end());
                    next.push_back(merged);
                }
            combos = std::move(next);
        }
        for (auto& c : combos) {
            if (c.empty()) c.push_back(1);
            out.push_back(c);
        }
    }
    return out;
}

struct CorpusEntry {
    GroupPtr group;
    std::vector<Subgroup> all_family;     // all nontrivial subgroups
    std::vector<Subgroup> cyclic_family;  // nontrivial cyclic subgroups
    bool has_pq = false;
    bool admits = false;
    mpz_class d_all;
    mpz_class d_cyclic;
};

std::vector<CorpusEntry> build_corpus() {
    std::vector<GroupPtr> groups;
    for (const auto& inv : abelian_types_up_to(64))
        groups.push_back(group_from_abelian_invariants(inv));
    for (auto name : {"S2", "S3", "S4", "S5", "A3", "A4", "A5", "Q8"})
        groups.push_back(named_group(name));
    for (long n = 1; 2 * n <= 120; ++n) groups.push_back(named_group("D" + std::to_string(n)));
    std::vector<CorpusEntry> corpus;
    for (auto& g : groups) {
        CorpusEntry e;
        e.group = g;
        e.all_family = nontrivial(all_subgroups(g));
        e.cyclic_family = nontrivial(all_subgroups(g, std::nullopt, true));
        e.has_pq = find_noncyclic_pq_subgroup(g).has_value();
        e.admits = admits_norm_relation(g).admits;
        e.d_all = e.all_family.empty() ? 0 : optimal_denominator(g, e.all_family);
        e.d_cyclic = e.cyclic_family.empty() ? 0 : optimal_denominator(g, e.cyclic_family);
        corpus.push_back(std::move(e));
    }
    return corpus;
}

// ---- individual criteria -----------------------------------------------

void criterion_1() {
    auto t0 = Clock::now();
    auto g = group_from_abelian_invariants({2, 2});
    auto rel = find_norm_relation(g, nontrivial(all_subgroups(g)));
    bool ok = rel.has_value() && rel->denominator == 2 && verify_norm_relation(*rel);
    // the classical witness 2 = N_<s> + N_<t> - s N_<st>
    NormRelation witness{g, 2, {}};
    auto one = AlgebraElement::one(g, Ring::Z());
    witness.terms.push_back({one, Subgroup{g, {0, 1}}, one});
    witness.terms.push_back({one, Subgroup{g, {0, 2}}, one});
    AlgebraElement ms = AlgebraElement::zero(g, Ring::Z());
    ms.coeffs[1] = -1;
    witness.terms.push_back({ms, Subgroup{g, {0, 3}}, one});
    ok = ok && verify_norm_relation(witness);
    double secs = elapsed(t0);
    report(1, "C2xC2 norm relation d=2 with verified classical witness", ok && secs < 1.0, secs);
}

void criterion_2() {
    auto t0 = Clock::now();
    auto g = group_from_abelian_invariants({3, 3});
    auto rel = find_norm_relation(g, nontrivial(all_subgroups(g)));
    bool ok = rel.has_value() && rel->denominator == 3 && verify_norm_relation(*rel);
    // witness: 3 = N_<u> + N_<v> + N_<uv> - (u + uv) N_<u^2 v>
    NormRelation witness{g, 3, {}};
    auto one = AlgebraElement::one(g, Ring::Z());
    witness.terms.push_back({one, generated_subgroup(g, {1}), one});
    witness.terms.push_back({one, generated_subgroup(g, {3}), one});
    witness.terms.push_back({one, generated_subgroup(g, {4}), one});
    AlgebraElement a = AlgebraElement::zero(g, Ring::Z());
    a.coeffs[1] = -1;
    a.coeffs[4] = -1;
    witness.terms.push_back({a, generated_subgroup(g, {5}), one});
    ok = ok && verify_norm_relation(witness);
    double secs = elapsed(t0);
    report(2, "C3xC3 norm relation d=3 with verified classical witness", ok && secs < 1.0, secs);
}

void criterion_3() {
    auto t0 = Clock::now();
    auto g = named_group("A5");
    auto family = nontrivial(all_subgroups(g, 12));
    std::string detail;
    bool ok = family.size() == 28;
    auto scalar = find_scalar_relation(g, family);
    ok = ok && scalar.has_value();
    if (scalar) {
        auto support = denominator_support(scalar->denominator);
        for (long p : support) ok = ok && (p == 2 || p == 3 || p == 5);
        detail += "scalar d=" + scalar->denominator.get_str();
    }
    auto rel = find_norm_relation(g, family);
    ok = ok && rel.has_value();
    if (rel) {
        ok = ok && verify_norm_relation(*rel);
        auto support = denominator_support(rel->denominator);
        for (long p : support) ok = ok && (p == 2 || p == 5);
        detail += " general d=" + rel->denominator.get_str();
    }
    double secs = elapsed(t0);
    report(3, "A5 at index <= 12: scalar support in {2,3,5}, general in {2,5}",
           ok && secs < 60.0, secs, detail);
}

void criterion_4(const std::vector<CorpusEntry>& corpus, double sweep_seconds) {
    auto t0 = Clock::now();
    bool ok = true;
    std::string bad;
    for (const auto& e : corpus) {
        bool d_pos = e.d_cyclic > 0;
        if (e.admits != e.has_pq || e.admits != d_pos) {
            ok = false;
            bad = e.group->label;
            break;
        }
    }
    double secs = sweep_seconds + elapsed(t0);
    report(4, "classification agreement over the corpus (" + std::to_string(corpus.size()) +
                  " groups)",
           ok && secs < 300.0, secs, bad.empty() ? "" : "disagreement at " + bad);
}

void criterion_5(const std::vector<CorpusEntry>& corpus) {
    auto t0 = Clock::now();
    bool ok = true;
    std::string bad;
    for (const auto& e : corpus) {
        mpz_class bound = mpz_class(e.group->order) * e.group->order * e.group->order;
        for (const mpz_class& d : {e.d_all, e.d_cyclic}) {
            if (d > 0 && bound % d != 0) {
                ok = false;
                bad = e.group->label;
            }
        }
    }
    report(5, "d(H) divides |G|^3 for both conjugation-closed families", ok, elapsed(t0),
           bad.empty() ? "" : "violated at " + bad);
}

void criterion_6(const std::vector<CorpusEntry>& corpus) {
    auto t0 = Clock::now();
    bool ok = true;
    std::string bad;
    for (const auto& e : corpus) {
        for (int which = 0; which < 2 && ok; ++which) {
            const auto& family = which == 0 ? e.all_family : e.cyclic_family;
            const mpz_class& d = which == 0 ? e.d_all : e.d_cyclic;
            if (d == 0 || family.empty()) continue;
            for (long p : {2L, 3L, 5L, 7L}) {
                bool exists = exists_relation_mod_p(e.group, family, p);
                if (exists != (d % p != 0)) {
                    ok = false;
                    bad = e.group->label + " p=" + std::to_string(p);
                    break;
                }
            }
        }
        if (!ok) break;
    }
    report(6, "mod-p existence matches p not dividing d(H), p in {2,3,5,7}", ok, elapsed(t0),
           bad.empty() ? "" : "violated at " + bad);
}

void criterion_7() {
    auto t0 = Clock::now();
    bool ok = true;
    std::string bad;
    for (const auto& inv : abelian_types_up_to(64)) {
        auto g = group_from_abelian_invariants(inv);
        AbelianStructure st = abelian_structure(g);
        if (st.invariant_factors.size() < 2) continue;  // cyclic
        DualityTable t(g);
        for (long chi = 0; chi < g->order && ok; ++chi) {
            if (funakura_coefficient(t, t.character(chi), CoefficientFormula::product) !=
                funakura_coefficient(t, t.character(chi), CoefficientFormula::moebius)) {
                ok = false;
                bad = g->label + " formulas disagree";
            }
        }
        if (!ok) break;
        ScalarRelation rel = funakura_relation(g);
        long bound = g->order / radical(g->order);
        if (!verify_scalar_relation(rel) || bound % checked_long(rel.denominator, "d") != 0) {
            ok = false;
            bad = g->label + " denominator bound";
            break;
        }
        if (prime_support(g->order).size() == 1 && rel.denominator != bound) {
            ok = false;
            bad = g->label + " p-group equality";
            break;
        }
        if (g->label == "C18xC2" && rel.denominator != 2) {
            ok = false;
            bad = "C18xC2 denominator";
            break;
        }
    }
    // the worked example, explicitly
    auto g36 = group_from_abelian_invariants({18, 2});
    if (funakura_relation(g36).denominator != 2) {
        ok = false;
        bad = "C18xC2 denominator";
    }
    double secs = elapsed(t0);
    report(7, "Funakura formulas agree; denominator bound with p-group equality; C18xC2 = 2",
           ok && secs < 120.0, secs, bad);
}

void criterion_8() {
    auto t0 = Clock::now();
    bool ok = true;
    std::string bad;
    for (const auto& inv : abelian_types_up_to(36)) {
        auto g = group_from_abelian_invariants(inv);
        auto opt = optimal_abelian_relation(g);
        AbelianStructure st = abelian_structure(g);
        if (st.invariant_factors.size() < 2) {
            if (opt.has_value()) {
                ok = false;
                bad = g->label + " unexpected relation";
                break;
            }
            continue;
        }
        if (!opt) {
            ok = false;
            bad = g->label + " missing relation";
            break;
        }
        if (!verify_scalar_relation(opt->relation)) {
            ok = false;
            bad = g->label + " relation failed verification";
            break;
        }
        for (const auto& [h, c] : opt->relation.coefficients)
            if (h.index() > opt->n0) {
                ok = false;
                bad = g->label + " index above n0";
            }
        long found = opt->denominator_one
                         ? minimal_relation_index(g, RelationKind::general, mpz_class(1))
                         : minimal_relation_index(g, RelationKind::general);
        if (found != opt->n0) {
            ok = false;
            bad = g->label + " n0=" + std::to_string(opt->n0) + " exhaustive=" +
                  std::to_string(found);
            break;
        }
    }
    report(8, "optimal abelian relations: indices <= n0 and n0 tight for |G| <= 36", ok,
           elapsed(t0), bad);
}

void criterion_9(const std::vector<CorpusEntry>& corpus) {
    auto t0 = Clock::now();
    bool ok = true;
    std::string bad;
    for (const auto& e : corpus) {
        for (int which = 0; which < 2 && ok; ++which) {
            const auto& family = which == 0 ? e.all_family : e.cyclic_family;
            const mpz_class& d = which == 0 ? e.d_all : e.d_cyclic;
            if (d == 0 || family.empty()) continue;
            if (regular_index(e.group, family) != d) {
                ok = false;
                bad = e.group->label;
            }
        }
        if (!ok) break;
    }
    report(9, "sharpness: regular module order of 1 equals d(H) on all corpus pairs", ok,
           elapsed(t0), bad.empty() ? "" : "violated at " + bad);
}

void criterion_10(const std::vector<CorpusEntry>& corpus) {
    auto t0 = Clock::now();
    bool ok = true;
    std::string bad;
    std::mt19937_64 rng(20240807);
    std::uniform_int_distribution<long> coef(-2, 2);
    for (const auto& e : corpus) {
        if (e.d_cyclic == 0) continue;
        auto rel = find_norm_relation(e.group, e.cyclic_family);
        if (!rel || !verify_norm_relation(*rel)) {
            ok = false;
            bad = e.group->label + " relation";
            break;
        }
        // candidate coset modules of rank <= 8
        std::vector<Subgroup> candidates;
        for (const auto& h : all_subgroups(e.group))
            if (e.group->order / h.order() <= 8) candidates.push_back(h);
        for (int trial = 0; trial < 5 && ok; ++trial) {
            const Subgroup& h = candidates[rng() % candidates.size()];
            ZGModule base = coset_permutation_module(e.group, h);
            long r = base.rank;
            // random unimodular conjugation
            ZMat u = mat_identity(r), uinv = mat_identity(r);
            for (int step = 0; step < 3 * r; ++step) {
                long i = static_cast<long>(rng() % r), j = static_cast<long>(rng() % r);
                if (i == j) continue;
                long c = coef(rng);
                for (long t = 0; t < r; ++t) u[i][t] += c * u[j][t];
                for (long t = 0; t < r; ++t) uinv[t][j] -= c * uinv[t][i];
            }
            ZGModule m{e.group, r, std::vector<ZMat>(e.group->order)};
            for (int32_t x = 0; x < e.group->order; ++x)
                m.action[x] = mat_mul(u, mat_mul(base.act(x), uinv));
            mpz_class exponent = quotient_exponent(mat_identity(r), relation_submodule(m, *rel));
            if (rel->denominator % exponent != 0) {
                ok = false;
                bad = e.group->label;
            }
        }
        if (!ok) break;
    }
    report(10, "exponent bound: quotient exponent divides d on 5 random modules per group", ok,
           elapsed(t0), bad);
}

void criterion_11() {
    auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    auto f = make_field({2, 3});
    auto rep = unit_group(f);
    ok = ok && rep.group.generators.size() == 3;
    // the saturation step adjoined a square root of eps_6 = 5 + 2 sqrt6
    UnitSubgroup initial{f, {}, true, 128};
    for (long d : quad_subfields(f))
        initial.generators.push_back(embed_subfield_element(f, d, fundamental_unit(d)));
    auto sat = two_saturate(initial);
    MQElement e6 = MQElement::zero(f);
    e6.coords[0] = 5;
    e6.coords[3] = 2;
    bool square_found = false;
    for (const auto& g : sat.group.generators)
        if (mul(g, g) == e6) square_found = true;
    ok = ok && square_found;
    detail += square_found ? "sqrt(5+2sqrt6) adjoined" : "sqrt(5+2sqrt6) missing";
    // quotient of final by initial has 2-power exponent
    for (const auto& g : rep.group.generators) {
        bool member = false;
        MQElement y = g;
        for (int k = 0; k <= 6 && !member; ++k) {
            if (unit_membership(initial, y).has_value()) member = true;
            y = mul(y, y);
        }
        ok = ok && member;
    }
    // norm relation power identity for 100 random elements
    auto klein = group_from_abelian_invariants({2, 2});
    auto rel = find_norm_relation(klein, nontrivial(all_subgroups(klein)));
    ok = ok && rel.has_value() && rel->denominator == 2;
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> small(-3, 3);
    int tested = 0;
    while (tested < 100 && ok) {
        MQElement x = MQElement::zero(f);
        for (long t = 0; t < 4; ++t) x.coords[t] = small(rng);
        if (x.is_zero()) continue;
        ++tested;
        MQElement rhs = MQElement::of_q(f, 1);
        for (const auto& term : rel->terms) {
            MQElement t1 = apply_algebra_element(x, term.b);
            MQElement t2 = apply_algebra_element(t1, norm_element(term.subgroup, Ring::Z()));
            rhs = mul(rhs, apply_algebra_element(t2, term.a));
        }
        if (!(mul(x, x) == rhs)) ok = false;
    }
    double secs = elapsed(t0);
    report(11, "Q(sqrt2,sqrt3): rank 3, saturation, 2-power quotient, 100 power identities",
           ok && secs < 30.0, secs, detail);
}

void criterion_12() {
    auto t0 = Clock::now();
    bool ok = true;
    std::string bad;
    auto f = make_field({2, 3, 5});
    auto rep = unit_group(f);
    ok = rep.group.generators.size() == 7;
    if (!ok) bad = "rank";
    for (const auto& g : rep.group.generators) {
        mpq_class nrm = field_norm(g);
        if (!(nrm == 1 || nrm == -1)) {
            ok = false;
            bad = "norm";
        }
    }
    UnitSubgroup initial{f, {}, true, 128};
    for (long d : quad_subfields(f))
        initial.generators.push_back(embed_subfield_element(f, d, fundamental_unit(d)));
    for (const auto& g : rep.group.generators) {
        bool member = false;
        MQElement y = g;
        for (int k = 0; k <= 9 && !member; ++k) {
            if (unit_membership(initial, y).has_value()) member = true;
            y = mul(y, y);
        }
        if (!member) {
            ok = false;
            bad = "2-power quotient";
        }
    }
    // height inequality h(x) <= sqrt(2^n) ||log embedding||_2
    for (const auto& g : rep.group.generators) {
        auto logs = log_embedding(g, 256);
        double h = 0, norm2 = 0;
        for (const auto& iv : logs) {
            h += std::max(0.0, iv.mid_double());
            norm2 += iv.mid_double() * iv.mid_double();
        }
        if (h > std::sqrt(8.0) * std::sqrt(norm2) + 1e-9) {
            ok = false;
            bad = "height bound";
        }
    }
    double secs = elapsed(t0);
    report(12, "Q(sqrt2,sqrt3,sqrt5): rank 7, exact units, 2-power quotient, height bound",
           ok && secs < 300.0, secs, bad);
}

void criterion_13() {
    auto t0 = Clock::now();
    double v = grunwald_wang_bound(2, 1, 0, 0);
    double expected = 72.0 * std::pow(6.0 * std::log(2.0), 2);
    bool ok = std::abs(v - expected) <= 1e-9 * expected;
    report(13, "effective Grunwald-Wang bound gw(2,1,0,0) = 72 (6 ln 2)^2", ok, elapsed(t0));
}

struct CliRun {
    int exit_code;
    std::string output;
};

CliRun run_cli(const std::string& cli, const std::string& args) {
    std::string cmd = cli + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, {}};
    std::string out;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

void criterion_14() {
    auto t0 = Clock::now();
    const char* env = std::getenv("NORMREL_CLI");
    std::string cli = env ? env : "./build/normrel";
    bool ok = true;
    std::string bad;
    for (std::string args : {std::string("relations --group abelian:2,2 --seed 42"),
                             std::string("relations --group abelian:3,3 --seed 42"),
                             std::string("relations --group named:A5 --max-index 12 --seed 42"),
                             std::string("relations --group named:C7 --seed 42"),
                             std::string("funakura --group abelian:18,2 --seed 42"),
                             std::string("mqunits --field 2,3 --seed 42"),
                             std::string("mqunits --field 2 --seed 42")}) {
        auto a = run_cli(cli, args);
        auto b = run_cli(cli, args);
        if (a.exit_code != 0 || b.exit_code != 0 || a.output != b.output || a.output.empty()) {
            ok = false;
            bad = args;
            break;
        }
    }
    report(14, "CLI determinism: identical seeds give byte-identical JSON", ok, elapsed(t0), bad);
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_1();
    criterion_2();
    criterion_3();
    auto sweep_start = Clock::now();
    auto corpus = build_corpus();
    double sweep_seconds = elapsed(sweep_start);
    std::printf("  [corpus sweep: %zu groups in %.2fs]\n", corpus.size(), sweep_seconds);
    criterion_4(corpus, sweep_seconds);
    criterion_5(corpus);
    criterion_6(corpus);
    criterion_7();
    criterion_8();
    criterion_9(corpus);
    criterion_10(corpus);
    criterion_11();
    criterion_12();
    criterion_13();
    criterion_14();
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criteria failed\n", g_failures);
    return 1;
}
