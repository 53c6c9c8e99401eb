#include <catch2/catch_amalgamated.hpp>

#include "roselora/pruner.hpp"
#include "roselora/rng.hpp"

using namespace roselora;

namespace {

SparsitySchedule schedule(double keep, std::size_t ti, std::size_t tf, std::size_t total) {
    return SparsitySchedule{keep, ti, tf, total};
}

} // namespace

TEST_CASE("keep fraction boundary values") {
    SparsitySchedule s = schedule(0.05, 100, 300, 500);
    CHECK(keep_fraction_at(s, 1) == 1.0);
    CHECK(keep_fraction_at(s, 99) == 1.0);
    CHECK(keep_fraction_at(s, 100) == 1.0);  // cubic term is 1 at t_i
    CHECK(keep_fraction_at(s, 300) == 0.05);
    CHECK(keep_fraction_at(s, 500) == 0.05);
}

TEST_CASE("keep fraction midpoint of the cubic ramp") {
    SparsitySchedule s = schedule(0.05, 100, 300, 500);
    // 0.05 + 0.95 * 0.5^3, cross-checked by independent arithmetic.
    CHECK(keep_fraction_at(s, 200) == Catch::Approx(0.16875).margin(1e-15));
}

TEST_CASE("keep fraction rejects out-of-range steps") {
    SparsitySchedule s = schedule(0.1, 10, 20, 30);
    CHECK_THROWS_AS(keep_fraction_at(s, 0), ContractError);
    CHECK_THROWS_AS(keep_fraction_at(s, 31), ContractError);
}

TEST_CASE("keep fraction is continuous and non-increasing on a dense grid") {
    SparsitySchedule s = schedule(0.135, 37, 211, 400);
    double prev = 1.0;
    for (std::size_t t = 1; t <= 400; ++t) {
        const double k = keep_fraction_at(s, t);
        CHECK(k <= prev + 1e-15);
        CHECK(k >= 0.135 - 1e-15);
        CHECK(k <= 1.0 + 1e-15);
        prev = k;
    }
    // Continuity at the joins: one-step jumps stay small near t_i and t_f.
    CHECK(std::fabs(keep_fraction_at(s, 37) - keep_fraction_at(s, 38)) < 0.05);
    CHECK(std::fabs(keep_fraction_at(s, 210) - keep_fraction_at(s, 211)) < 0.05);
}

TEST_CASE("prune_vector keeps the top-scored entries") {
    auto [pruned, mask] = prune_vector({10, 20, 30, 40}, {0.5, 0.1, 0.9, 0.3}, 0.5);
    CHECK(pruned == std::vector<double>{10, 0, 30, 0});
    CHECK(mask == std::vector<double>{1, 0, 1, 0});
}

TEST_CASE("prune_vector with keep 1 is the identity") {
    auto [pruned, mask] = prune_vector({1, 2, 3}, {0, 0, 0}, 1.0);
    CHECK(pruned == std::vector<double>{1, 2, 3});
    CHECK(mask == std::vector<double>{1, 1, 1});
}

TEST_CASE("prune_vector breaks ties toward the lower index") {
    auto [pruned, mask] = prune_vector({1, 2, 3, 4}, {7, 7, 7, 7}, 0.5);
    CHECK(mask == std::vector<double>{1, 1, 0, 0});
    CHECK(pruned == std::vector<double>{1, 2, 0, 0});
}

TEST_CASE("prune_vector rejects mismatched lengths") {
    CHECK_THROWS_AS(prune_vector({1, 2}, {1, 2, 3}, 0.5), ShapeError);
}

TEST_CASE("prune_vector never evicts a strictly higher-scored entry") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 2 + rng.next_below(20);
        std::vector<double> values(d), scores(d);
        for (std::size_t i = 0; i < d; ++i) {
            values[i] = rng.uniform(-1.0, 1.0);
            scores[i] = rng.uniform(0.0, 1.0);
        }
        const double keep = rng.uniform(0.05, 1.0);
        auto [pruned, mask] = prune_vector(values, scores, keep);
        double min_kept = 1e300;
        for (std::size_t i = 0; i < d; ++i) {
            if (mask[i] == 1.0) min_kept = std::min(min_kept, scores[i]);
        }
        for (std::size_t i = 0; i < d; ++i) {
            if (mask[i] == 0.0) CHECK(scores[i] <= min_kept);
        }
    }
}

TEST_CASE("prune_adapter enforces the per-row and per-column budgets") {
    Rng rng(13);
    const std::size_t d1 = 24, d2 = 18, r = 3;
    LoraAdapter ad = init_adapter(Matrix::uniform(d1, d2, -1.0, 1.0, rng), r, 5);
    ad.a = Matrix::uniform(r, d2, -1.0, 1.0, rng);
    ad.b = Matrix::uniform(d1, r, -1.0, 1.0, rng);
    SensitivityState st = init_sensitivity(d1, d2, r, 0.8);
    st.ema_a = Matrix::uniform(r, d2, 0.0, 1.0, rng);
    st.ema_b = Matrix::uniform(d1, r, 0.0, 1.0, rng);

    for (double keep : {1.0, 0.5, 0.2, 0.03}) {
        LoraAdapter trial = ad;
        prune_adapter(trial, st, keep);
        const std::size_t row_budget = keep_count(keep, d2);
        const std::size_t col_budget = keep_count(keep, d1);
        for (std::size_t i = 0; i < r; ++i) {
            std::size_t row_nnz = 0, col_nnz = 0;
            for (std::size_t j = 0; j < d2; ++j) {
                if (trial.a(i, j) != 0.0) ++row_nnz;
            }
            for (std::size_t j = 0; j < d1; ++j) {
                if (trial.b(j, i) != 0.0) ++col_nnz;
            }
            CHECK(row_nnz <= row_budget);
            CHECK(col_nnz <= col_budget);
        }
        // Idempotent at fixed keep and scores.
        LoraAdapter again = trial;
        prune_adapter(again, st, keep);
        CHECK(again.a == trial.a);
        CHECK(again.b == trial.b);
        CHECK(again.mask_a == trial.mask_a);
        CHECK(again.mask_b == trial.mask_b);
    }
}

TEST_CASE("prune_adapter with keep 1 is the identity") {
    Rng rng(14);
    LoraAdapter ad = init_adapter(Matrix::uniform(5, 6, -1.0, 1.0, rng), 2, 8);
    ad.b = Matrix::uniform(5, 2, -1.0, 1.0, rng);
    SensitivityState st = init_sensitivity(5, 6, 2, 0.8);
    LoraAdapter before = ad;
    prune_adapter(ad, st, 1.0);
    CHECK(ad.a == before.a);
    CHECK(ad.b == before.b);
    CHECK(ad.mask_a == Matrix::ones(2, 6));
    CHECK(ad.mask_b == Matrix::ones(5, 2));
}

TEST_CASE("single-row adapter keeps exactly two of four entries at keep 0.5") {
    Rng rng(15);
    LoraAdapter ad = init_adapter(Matrix::uniform(4, 4, -1.0, 1.0, rng), 1, 3);
    ad.a = Matrix(1, 4, {1.0, 2.0, 3.0, 4.0});
    SensitivityState st = init_sensitivity(4, 4, 1, 0.8);
    st.ema_a = Matrix(1, 4, {0.4, 0.3, 0.2, 0.1});
    prune_adapter(ad, st, 0.5);
    std::size_t nnz = 0;
    for (std::size_t j = 0; j < 4; ++j) {
        if (ad.a(0, j) != 0.0) ++nnz;
    }
    CHECK(nnz == 2);
    CHECK(ad.a(0, 0) == 1.0);
    CHECK(ad.a(0, 1) == 2.0);
}
