#include <catch2/catch_amalgamated.hpp>

#include "roselora/rng.hpp"
#include "roselora/sparsity_analysis.hpp"

using namespace roselora;

TEST_CASE("sparsity basics") {
    CHECK(sparsity(Matrix::zeros(3, 3)) == 1.0);
    Rng rng(1);
    CHECK(sparsity(Matrix::uniform(5, 5, 0.5, 1.5, rng)) == 0.0);
    Matrix m(2, 2, {1.0, 0.0, 2.0, 3.0});
    CHECK(sparsity(m) == 0.25);
}

TEST_CASE("rank_one_sparsity formula") {
    CHECK(rank_one_sparsity(0.0, 0.0) == 0.0);
    CHECK(rank_one_sparsity(1.0, 0.3) == 1.0);
    CHECK(rank_one_sparsity(0.5, 1.0) == 1.0);
    CHECK(rank_one_sparsity(0.9, 0.9) == Catch::Approx(0.99).margin(1e-15));
    CHECK_THROWS_AS(rank_one_sparsity(-0.1, 0.5), ContractError);
    CHECK_THROWS_AS(rank_one_sparsity(0.5, 1.1), ContractError);
}

TEST_CASE("rank-one measured sparsity matches the formula exactly") {
    const std::size_t d = 1000;
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        auto [a, b] = random_masked_factors(0.9, 0.9, 1, d, d, rng);
        const auto za = static_cast<std::size_t>(
            std::llround(sparsity(a) * static_cast<double>(d)));
        const auto zb = static_cast<std::size_t>(
            std::llround(sparsity(b) * static_cast<double>(d)));
        // Exact integer zero-count identity from the rank-one case.
        Matrix product = matmul(b, a);
        std::size_t zeros = 0;
        for (std::size_t i = 0; i < product.size(); ++i) {
            if (product.at(i) == 0.0) ++zeros;
        }
        CHECK(zeros == zb * d + za * d - za * zb);
    }
}

TEST_CASE("product sparsity lower bound") {
    CHECK(product_sparsity_lower_bound({0.9}, {0.9}) == Catch::Approx(0.99).margin(1e-15));
    CHECK(product_sparsity_lower_bound({0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}) == 0.0);
    std::vector<double> s(4, 0.95);
    CHECK(product_sparsity_lower_bound(s, s) == Catch::Approx(0.99).margin(1e-12));
    CHECK_THROWS_AS(product_sparsity_lower_bound({0.5}, {0.5, 0.5}), ShapeError);
}

TEST_CASE("lower bound is symmetric and permutation-invariant") {
    std::vector<double> row{0.1, 0.5, 0.9};
    std::vector<double> col{0.3, 0.7, 0.2};
    const double base = product_sparsity_lower_bound(row, col);
    CHECK(product_sparsity_lower_bound(col, row) == base);
    std::vector<double> row_p{0.9, 0.1, 0.5};
    std::vector<double> col_p{0.2, 0.3, 0.7};
    // Permutation changes the summation order, so equality is up to rounding.
    CHECK(product_sparsity_lower_bound(row_p, col_p) == Catch::Approx(base).margin(1e-12));
}

TEST_CASE("dense counterexample: sparse factors, fully dense product") {
    for (std::size_t r : {std::size_t{2}, std::size_t{4}, std::size_t{10}}) {
        const std::size_t d = r == 10 ? 32 : 8;
        auto [a, b] = example1_counterexample(r, d, d, 7);
        const double expected = static_cast<double>(r - 1) / static_cast<double>(r);
        CHECK(sparsity(a) == expected);
        CHECK(sparsity(b) == expected);
        CHECK(sparsity(matmul(b, a)) == 0.0);
    }
    CHECK_THROWS_AS(example1_counterexample(1, 4, 4, 1), ContractError);
}

TEST_CASE("random masked products never violate the lower bound") {
    Rng rng(9);
    const std::size_t d = 32;
    const double grid[] = {0.0, 0.25, 0.5, 0.75, 0.9};
    for (std::size_t r : {std::size_t{1}, std::size_t{2}, std::size_t{4}}) {
        for (double row_s : grid) {
            for (double col_s : grid) {
                for (int trial = 0; trial < 10; ++trial) {
                    auto [a, b] = random_masked_factors(row_s, col_s, r, d, d, rng);
                    std::vector<double> rs(r), cs(r);
                    for (std::size_t i = 0; i < r; ++i) {
                        std::size_t za = 0, zb = 0;
                        for (std::size_t j = 0; j < d; ++j) {
                            if (a(i, j) == 0.0) ++za;
                            if (b(j, i) == 0.0) ++zb;
                        }
                        rs[i] = static_cast<double>(za) / static_cast<double>(d);
                        cs[i] = static_cast<double>(zb) / static_cast<double>(d);
                    }
                    CHECK(sparsity(matmul(b, a)) >=
                          product_sparsity_lower_bound(rs, cs) - 1e-12);
                }
            }
        }
    }
}

TEST_CASE("bound sweep: dense grid cell gives dense products") {
    auto rows = empirical_bound_sweep({0.0}, 3, 16, 16, 5, 21);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].empirical_product_sparsity == 0.0);
    CHECK(rows[0].theoretical_bound == 0.0);
}

TEST_CASE("bound sweep at high sparsity stays above 0.99") {
    auto rows = empirical_bound_sweep({0.95}, 4, 64, 64, 100, 22);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].empirical_product_sparsity >= 0.99);
    CHECK(rows[0].empirical_product_sparsity >= rows[0].theoretical_bound - 1e-12);
}

TEST_CASE("bound sweep rows respect the per-row invariant") {
    auto rows = empirical_bound_sweep({0.0, 0.5, 0.9}, 2, 24, 24, 20, 23);
    REQUIRE(rows.size() == 9);
    for (const auto& r : rows) {
        CHECK(r.empirical_product_sparsity >= r.theoretical_bound - 1e-12);
        CHECK(r.empirical_product_sparsity <= 1.0);
    }
}

TEST_CASE("empirical product sparsity trends upward in row sparsity") {
    auto rows = empirical_bound_sweep({0.0, 0.25, 0.5, 0.75}, 2, 32, 32, 100, 24);
    // Fixed col sparsity = first grid value: rows 0, 4, 8, 12.
    for (std::size_t i = 0; i + 4 < rows.size(); i += 4) {
        CHECK(rows[i + 4].empirical_product_sparsity >=
              rows[i].empirical_product_sparsity - 1e-9);
    }
}

TEST_CASE("bound sweep validates its inputs") {
    CHECK_THROWS_AS(empirical_bound_sweep({1.0}, 2, 8, 8, 5, 1), ContractError);
    CHECK_THROWS_AS(empirical_bound_sweep({0.5}, 2, 8, 8, 0, 1), ContractError);
}
