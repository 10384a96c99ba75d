#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "normrel/linalg.hpp"

using namespace normrel;

namespace {

ZVec zvec(std::initializer_list<long> xs) {
    ZVec v;
    for (long x : xs) v.emplace_back(x);
    return v;
}

}  // namespace

TEST_CASE("lattice builder basics") {
    LatticeBuilder b(3);
    CHECK(b.insert(zvec({2, 0, 0})));
    CHECK(b.insert(zvec({0, 3, 0})));
    CHECK(!b.insert(zvec({2, 3, 0})));
    CHECK(b.rank() == 2);
    CHECK(b.insert(zvec({3, 0, 0})));  // pivot shrinks to 1
    CHECK(b.rank() == 2);
    ZMat basis = b.basis();
    CHECK(basis[0] == zvec({1, 0, 0}));
    CHECK(b.contains(zvec({5, 3, 0})));
    CHECK(!b.contains(zvec({0, 1, 0})));
    CHECK(!b.contains(zvec({0, 0, 1})));
}

TEST_CASE("lattice membership certificates") {
    LatticeBuilder b(2, {}, true);
    b.insert(zvec({2, 1}));
    b.insert(zvec({1, 2}));
    auto combo = b.represent(zvec({3, 3}));
    REQUIRE(combo.has_value());
    mpz_class c0 = combo->count(0) ? combo->at(0) : 0;
    mpz_class c1 = combo->count(1) ? combo->at(1) : 0;
    CHECK(c0 * 2 + c1 * 1 == 3);
    CHECK(c0 * 1 + c1 * 2 == 3);
    CHECK(!b.represent(zvec({1, 0})).has_value());
}

TEST_CASE("line intersection via column order") {
    // lattice spanned by (1,1,1), (0,2,0), (0,0,2) meets the first coordinate
    // line in 2Z x 0 x 0
    auto order = column_order_with_last(3, 0);
    LatticeBuilder b(3, order, true);
    b.insert(zvec({1, 1, 1}));
    b.insert(zvec({0, 2, 0}));
    b.insert(zvec({0, 0, 2}));
    CHECK(b.last_line_pivot() == 2);
    Combo combo = b.last_line_combo();
    ZVec sum(3, 0);
    ZMat inputs{zvec({1, 1, 1}), zvec({0, 2, 0}), zvec({0, 0, 2})};
    for (auto& [k, c] : combo)
        for (int i = 0; i < 3; ++i) sum[i] += c * inputs[k][i];
    CHECK(sum == zvec({2, 0, 0}));
}

TEST_CASE("ambient index") {
    LatticeBuilder b(2);
    b.insert(zvec({2, 0}));
    CHECK(b.index_in_ambient() == 0);
    b.insert(zvec({0, 3}));
    CHECK(b.index_in_ambient() == 6);
    b.insert(zvec({1, 1}));
    CHECK(b.index_in_ambient() == 1);  // (0,1) = (2,0)+(0,3)-2(1,1), so all of Z^2

    LatticeBuilder c(2);
    c.insert(zvec({2, 0}));
    c.insert(zvec({0, 4}));
    c.insert(zvec({1, 2}));
    CHECK(c.index_in_ambient() == 4);  // {(1,2),(0,4)}
}

TEST_CASE("smith invariants") {
    CHECK(smith_invariants({zvec({2, 0}), zvec({0, 3})}) == std::vector<mpz_class>{1, 6});
    CHECK(smith_invariants({zvec({1, 0}), zvec({0, 1})}) == std::vector<mpz_class>{1, 1});
    CHECK(smith_invariants({zvec({4, 0}), zvec({0, 6})}) == std::vector<mpz_class>{2, 12});
    CHECK(smith_invariants({zvec({0, 0}), zvec({0, 0})}).empty());
    // rank-deficient
    CHECK(smith_invariants({zvec({2, 4}), zvec({1, 2})}) == std::vector<mpz_class>{1});
}

TEST_CASE("smith invariants against determinant, randomized") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> d(-4, 4);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 3;
        ZMat a(n, ZVec(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a[i][j] = d(rng);
        // determinant by cofactor expansion
        auto det3 = [&](const ZMat& m) -> mpz_class {
            return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                   m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                   m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        };
        mpz_class det = det3(a);
        auto inv = smith_invariants(a);
        if (det == 0) {
            CHECK(inv.size() < 3);
        } else {
            REQUIRE(inv.size() == 3);
            CHECK(inv[0] * inv[1] * inv[2] == abs(det));
            CHECK(inv[1] % inv[0] == 0);
            CHECK(inv[2] % inv[1] == 0);
        }
    }
}

TEST_CASE("left kernel") {
    ZMat rows{zvec({1, 2}), zvec({2, 4}), zvec({0, 1})};
    ZMat k = left_kernel(rows);
    REQUIRE(k.size() == 1);
    // kernel combination annihilates the rows
    ZVec sum(2, 0);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < 2; ++j) sum[j] += k[0][i] * rows[i][j];
    CHECK(sum == zvec({0, 0}));
    CHECK(k[0][2] == 0);
    CHECK(abs(k[0][0]) == 2);

    // full-rank rows have trivial kernel
    CHECK(left_kernel({zvec({1, 0}), zvec({0, 1})}).empty());
}

TEST_CASE("kernel lattice is saturated, randomized") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> d(-3, 3);
    for (int trial = 0; trial < 30; ++trial) {
        ZMat rows(4, ZVec(2));
        for (auto& r : rows)
            for (auto& x : r) x = d(rng);
        ZMat k = left_kernel(rows);
        // every kernel vector annihilates
        for (const auto& v : k) {
            ZVec sum(2, 0);
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (int j = 0; j < 2; ++j) sum[j] += v[i] * rows[i][j];
            CHECK(sum == zvec({0, 0}));
        }
        // rank-nullity over Q
        LatticeBuilder b(2);
        for (const auto& r : rows) b.insert(r);
        CHECK(k.size() == 4 - b.rank());
    }
}

TEST_CASE("prime field elimination") {
    FpBuilder b(3, 2, true);
    CHECK(b.insert({1, 1, 0}));
    CHECK(b.insert({0, 1, 1}));
    CHECK(!b.insert({1, 0, 1}));
    CHECK(b.rank() == 2);
    CHECK(b.contains({1, 0, 1}));
    CHECK(!b.contains({1, 0, 0}));
    auto combo = b.represent({1, 0, 1});
    REQUIRE(combo.has_value());
    std::vector<long> sum(3, 0);
    std::vector<std::vector<long>> inputs{{1, 1, 0}, {0, 1, 1}, {1, 0, 1}};
    for (std::size_t i = 0; i < combo->size(); ++i)
        for (int j = 0; j < 3; ++j) sum[j] = (sum[j] + (*combo)[i] * inputs[i][j]) % 2;
    CHECK(sum == std::vector<long>{1, 0, 1});
}

TEST_CASE("prime field elimination mod 5") {
    FpBuilder b(2, 5, false);
    b.insert({2, 1});
    b.insert({1, 1});
    CHECK(b.rank() == 2);
    CHECK(b.contains({1, 0}));
    FpBuilder c(2, 5, false);
    c.insert({2, 1});
    c.insert({4, 2});
    CHECK(c.rank() == 1);
    CHECK(!c.contains({1, 0}));
    CHECK(c.contains({1, 3}));  // (1,3) = 3*(2,1) mod 5
}
