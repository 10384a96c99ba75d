#include <catch2/catch_amalgamated.hpp>

#include <thread>

#include "normrel/relations.hpp"

using namespace normrel;

namespace {

std::vector<Subgroup> nontrivial_subgroups(const GroupPtr& g) {
    std::vector<Subgroup> out;
    for (const auto& h : all_subgroups(g))
        if (!h.is_trivial()) out.push_back(h);
    return out;
}

mpz_class coefficient_of(const ScalarRelation& rel, const Subgroup& h) {
    for (const auto& [s, c] : rel.coefficients)
        if (s.elements == h.elements) return c;
    return 0;
}

}  // namespace

TEST_CASE("scalar relation for the Klein four group") {
    auto klein = group_from_abelian_invariants({2, 2});
    auto subs = nontrivial_subgroups(klein);
    auto rel = find_scalar_relation(klein, subs);
    REQUIRE(rel.has_value());
    CHECK(rel->denominator == 2);
    CHECK(verify_scalar_relation(*rel));
    // the relation 2 = N_A + N_B + N_C - N_G is the unique witness
    for (const auto& h : subs) {
        if (h.order() == 2) CHECK(coefficient_of(*rel, h) == 1);
        if (h.order() == 4) CHECK(coefficient_of(*rel, h) == -1);
    }
}

TEST_CASE("scalar relation for S3") {
    auto s3 = named_group("S3");
    auto subs = nontrivial_subgroups(s3);
    auto rel = find_scalar_relation(s3, subs);
    REQUIRE(rel.has_value());
    CHECK(rel->denominator == 3);
    for (const auto& h : subs) {
        if (h.order() == 2 || h.order() == 3) CHECK(coefficient_of(*rel, h) == 1);
        if (h.order() == 6) CHECK(coefficient_of(*rel, h) == -1);
    }
}

TEST_CASE("no scalar relation for cyclic groups") {
    auto c5 = named_group("C5");
    CHECK(!find_scalar_relation(c5, nontrivial_subgroups(c5)).has_value());
    auto c30 = named_group("C30");
    CHECK(!find_scalar_relation(c30, nontrivial_subgroups(c30)).has_value());
}

TEST_CASE("norm relation for the Klein four group matches the classical witness") {
    auto klein = group_from_abelian_invariants({2, 2});
    // sigma = (1,0) -> index 1, tau = (0,1) -> index 2, sigma*tau -> index 3
    auto rel = find_norm_relation(klein, nontrivial_subgroups(klein));
    REQUIRE(rel.has_value());
    CHECK(rel->denominator == 2);
    CHECK(verify_norm_relation(*rel));

    // the classical witness 2 = N_<s> + N_<t> - s N_<st> re-verifies
    NormRelation witness{klein, 2, {}};
    auto one = AlgebraElement::one(klein, Ring::Z());
    witness.terms.push_back({one, Subgroup{klein, {0, 1}}, one});
    witness.terms.push_back({one, Subgroup{klein, {0, 2}}, one});
    AlgebraElement minus_sigma = AlgebraElement::zero(klein, Ring::Z());
    minus_sigma.coeffs[1] = -1;
    witness.terms.push_back({minus_sigma, Subgroup{klein, {0, 3}}, one});
    CHECK(verify_norm_relation(witness));
}

TEST_CASE("norm relation for C3xC3 matches the classical witness") {
    auto g = group_from_abelian_invariants({3, 3});
    auto rel = find_norm_relation(g, nontrivial_subgroups(g));
    REQUIRE(rel.has_value());
    CHECK(rel->denominator == 3);
    CHECK(verify_norm_relation(*rel));

    // u = (1,0) -> 1, v = (0,1) -> 3, uv -> 4, u^2 v -> 5
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
    CHECK(verify_norm_relation(witness));
}

TEST_CASE("C6xC6 has a denominator 1 relation") {
    auto g = group_from_abelian_invariants({6, 6});
    auto rel = find_norm_relation(g, nontrivial_subgroups(g));
    REQUIRE(rel.has_value());
    CHECK(rel->denominator == 1);
    CHECK(verify_norm_relation(*rel));
}

TEST_CASE("optimal denominators") {
    auto klein = group_from_abelian_invariants({2, 2});
    CHECK(optimal_denominator(klein, nontrivial_subgroups(klein)) == 2);
    CHECK(optimal_denominator(klein, {full_subgroup(klein)}) == 0);
    auto c30 = named_group("C30");
    CHECK(optimal_denominator(c30, nontrivial_subgroups(c30)) == 0);
    auto c33 = group_from_abelian_invariants({3, 3});
    CHECK(optimal_denominator(c33, nontrivial_subgroups(c33)) == 3);
}

TEST_CASE("relations over prime fields") {
    auto klein = group_from_abelian_invariants({2, 2});
    auto subs = nontrivial_subgroups(klein);
    CHECK(exists_relation_mod_p(klein, subs, 3));
    CHECK(!exists_relation_mod_p(klein, subs, 2));
    auto c66 = group_from_abelian_invariants({6, 6});
    CHECK(exists_relation_mod_p(c66, nontrivial_subgroups(c66), 2));
    CHECK_THROWS_AS(exists_relation_mod_p(klein, subs, 4), std::invalid_argument);
}

TEST_CASE("mod-p existence matches the optimal denominator") {
    for (auto name : {"S3", "A4", "Q8", "D4", "C12"}) {
        auto g = named_group(name);
        auto subs = nontrivial_subgroups(g);
        mpz_class d = optimal_denominator(g, subs);
        if (d == 0) continue;
        for (long p : {2L, 3L, 5L, 7L})
            CHECK(exists_relation_mod_p(g, subs, p) == (d % p != 0));
    }
}

TEST_CASE("classification") {
    CHECK(!admits_norm_relation(named_group("Q8")).admits);
    auto s3 = admits_norm_relation(named_group("S3"));
    CHECK(s3.admits);
    REQUIRE(s3.pq_witness.has_value());
    CHECK(s3.pq_witness->order() == 6);
    for (auto name : {"C7", "C12", "C30", "C64"})
        CHECK(!admits_norm_relation(named_group(name)).admits);
    CHECK(admits_norm_relation(named_group("A4")).admits);
    CHECK(!admits_norm_relation(named_group("SL2_3")).admits);  // binary tetrahedral
}

TEST_CASE("denominator bound d | |G|^3") {
    for (auto name : {"S3", "S4", "A4", "D6", "Q8"}) {
        auto g = named_group(name);
        mpz_class d = optimal_denominator(g, nontrivial_subgroups(g));
        if (d == 0) continue;
        mpz_class bound = mpz_class(g->order) * g->order * g->order;
        CHECK(bound % d == 0);
    }
}

TEST_CASE("scalar to Brauer") {
    auto klein = group_from_abelian_invariants({2, 2});
    auto subs = nontrivial_subgroups(klein);
    auto rel = find_scalar_relation(klein, subs);
    REQUIRE(rel.has_value());
    auto brel = scalar_to_brauer(*rel);
    CHECK(verify_brauer_relation(brel));

    // frozen fixed-coset counts for C2xC2: Ind_{G/1} = (4,0,0,0) on classes,
    // Ind_{G/H}(e) = 2 and 2 on H, Ind_{G/G} = 1 everywhere; the Brauer
    // coefficients are -2 on 1, +2 on each order-2 subgroup, -4 on G
    for (const auto& [h, c] : brel.coefficients) {
        if (h.order() == 1) CHECK(c == -2);
        if (h.order() == 2) CHECK(c == 2);
        if (h.order() == 4) CHECK(c == -4);
    }
    // independent oracle for the induced character values used above
    Subgroup a{klein, {0, 1}};
    CHECK(induced_trivial_character(trivial_subgroup(klein), 0) == 4);
    CHECK(induced_trivial_character(trivial_subgroup(klein), 1) == 0);
    CHECK(induced_trivial_character(a, 0) == 2);
    CHECK(induced_trivial_character(a, 1) == 2);
    CHECK(induced_trivial_character(a, 2) == 0);
    CHECK(induced_trivial_character(full_subgroup(klein), 3) == 1);

    // S3 scalar relation maps to a Brauer relation with -3 on the trivial group
    auto s3 = named_group("S3");
    auto rel3 = find_scalar_relation(s3, nontrivial_subgroups(s3));
    REQUIRE(rel3.has_value());
    auto brel3 = scalar_to_brauer(*rel3);
    for (const auto& [h, c] : brel3.coefficients)
        if (h.order() == 1) CHECK(c == -3);
}

TEST_CASE("Brauer to scalar round trip") {
    auto klein = group_from_abelian_invariants({2, 2});
    auto rel = find_scalar_relation(klein, nontrivial_subgroups(klein));
    REQUIRE(rel.has_value());
    auto back = brauer_to_scalar(scalar_to_brauer(*rel));
    REQUIRE(back.has_value());
    CHECK(back->denominator == 2);
    CHECK(denominator_support(back->denominator) == denominator_support(rel->denominator));

    // S3 with all subgroups: support is conjugation closed, so the round trip
    // also goes through
    auto s3 = named_group("S3");
    auto rel3 = find_scalar_relation(s3, nontrivial_subgroups(s3));
    REQUIRE(rel3.has_value());
    auto back3 = brauer_to_scalar(scalar_to_brauer(*rel3));
    REQUIRE(back3.has_value());
    CHECK(denominator_support(back3->denominator) == denominator_support(rel3->denominator));
}

TEST_CASE("Brauer to scalar rejects non conjugation closed support") {
    // S3 admits 0 = Ind_1 + 2 Ind_G - Ind_C3 - 2 Ind_C2 with a single C2
    auto s3 = named_group("S3");
    Subgroup c3, c2;
    for (const auto& h : all_subgroups(s3)) {
        if (h.order() == 3) c3 = h;
        if (h.order() == 2 && c2.elements.empty()) c2 = h;
    }
    BrauerRelation brel{s3, {}};
    brel.coefficients.emplace_back(trivial_subgroup(s3), 1);
    brel.coefficients.emplace_back(full_subgroup(s3), 2);
    brel.coefficients.emplace_back(c3, -1);
    brel.coefficients.emplace_back(c2, -2);
    CHECK(verify_brauer_relation(brel));
    CHECK_THROWS_AS(brauer_to_scalar(brel), std::invalid_argument);

    // all-zero relation is rejected as useless
    BrauerRelation zero{s3, {}};
    zero.coefficients.emplace_back(trivial_subgroup(s3), 0);
    CHECK_THROWS_AS(brauer_to_scalar(zero), std::invalid_argument);
}

TEST_CASE("denominator support") {
    CHECK(denominator_support(mpz_class(2)) == std::set<long>{2});
    CHECK(denominator_support(mpz_class(1)).empty());
    CHECK(denominator_support(mpz_class(12)) == std::set<long>{2, 3});
}

TEST_CASE("minimal relation index") {
    auto klein = group_from_abelian_invariants({2, 2});
    CHECK(minimal_relation_index(klein, RelationKind::general) == 2);
    CHECK(minimal_relation_index(named_group("C7"), RelationKind::general) == 0);
    CHECK(minimal_relation_index(klein, RelationKind::scalar) == 2);
    // S3: the scalar relation needs the order-2 subgroups (index 3)
    CHECK(minimal_relation_index(named_group("S3"), RelationKind::scalar) == 3);
}

TEST_CASE("returned relations always verify and use nontrivial subgroups") {
    for (auto name : {"S3", "S4", "A4", "D4", "D6", "Q8"}) {
        auto g = named_group(name);
        auto subs = nontrivial_subgroups(g);
        auto rel = find_norm_relation(g, subs);
        auto srel = find_scalar_relation(g, subs);
        CHECK(rel.has_value() == (optimal_denominator(g, subs) > 0));
        if (rel) {
            CHECK(verify_norm_relation(*rel));
            CHECK(rel->denominator == optimal_denominator(g, subs));
            for (const auto& t : rel->terms) CHECK(!t.subgroup.is_trivial());
        }
        if (srel) CHECK(verify_scalar_relation(*srel));
        if (rel && srel) CHECK(srel->denominator % rel->denominator == 0);
    }
    auto klein = group_from_abelian_invariants({2, 2});
    CHECK_THROWS_AS(find_norm_relation(klein, {trivial_subgroup(klein)}), std::invalid_argument);

    // zero denominators never pass verification
    ScalarRelation bogus{klein, 0, {}};
    CHECK(!verify_scalar_relation(bogus));
    NormRelation bogus2{klein, 0, {}};
    CHECK(!verify_norm_relation(bogus2));
}

TEST_CASE("concurrent searches share a group") {
    auto g = named_group("S4");
    auto subs = nontrivial_subgroups(g);
    std::vector<mpz_class> results(4);
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&, t] { results[t] = optimal_denominator(g, subs); });
    for (auto& th : threads) th.join();
    for (int t = 1; t < 4; ++t) CHECK(results[t] == results[0]);
    CHECK(results[0] > 0);
}
