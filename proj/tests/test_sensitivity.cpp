#include <catch2/catch_amalgamated.hpp>

#include "roselora/rng.hpp"
#include "roselora/sensitivity.hpp"

using namespace roselora;

TEST_CASE("instantaneous sensitivity is |param * grad|") {
    Matrix p(1, 3, {2.0, 0.0, -1.5});
    Matrix g(1, 3, {-3.0, 4.0, 2.0});
    Matrix s = instantaneous_sensitivity(p, g);
    CHECK(s(0, 0) == 6.0);
    CHECK(s(0, 1) == 0.0);
    CHECK(s(0, 2) == 3.0);
}

TEST_CASE("instantaneous sensitivity matches a scalar loop oracle") {
    Rng rng(3);
    Matrix p = Matrix::uniform(5, 7, -2.0, 2.0, rng);
    Matrix g = Matrix::uniform(5, 7, -2.0, 2.0, rng);
    Matrix s = instantaneous_sensitivity(p, g);
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(s.at(i) == std::fabs(p.at(i) * g.at(i)));
    }
}

TEST_CASE("sensitivity is invariant to parameter and gradient signs") {
    Rng rng(4);
    Matrix p = Matrix::uniform(4, 4, -1.0, 1.0, rng);
    Matrix g = Matrix::uniform(4, 4, -1.0, 1.0, rng);
    CHECK(instantaneous_sensitivity(p, g) == instantaneous_sensitivity(scale(p, -1.0), g));
    CHECK(instantaneous_sensitivity(p, g) == instantaneous_sensitivity(p, scale(g, -1.0)));
}

TEST_CASE("instantaneous sensitivity rejects mismatched shapes") {
    CHECK_THROWS_AS(instantaneous_sensitivity(Matrix::ones(2, 3), Matrix::ones(3, 2)),
                    ShapeError);
}

TEST_CASE("first observation seeds the EMA") {
    SensitivityState st = init_sensitivity(2, 3, 1, 0.8);
    Matrix ia = Matrix(1, 3, {5.0, 5.0, 5.0});
    Matrix ib = Matrix(2, 1, {1.0, 2.0});
    update_ema(st, ia, ib);
    CHECK(st.ema_a == ia);
    CHECK(st.ema_b == ib);
    CHECK(st.steps_seen == 1);
}

TEST_CASE("EMA arithmetic") {
    SensitivityState st = init_sensitivity(1, 1, 1, 0.8);
    update_ema(st, Matrix(1, 1, {0.0}), Matrix(1, 1, {0.0}));
    update_ema(st, Matrix(1, 1, {1.0}), Matrix(1, 1, {1.0}));
    CHECK(st.ema_a(0, 0) == Catch::Approx(0.2).margin(1e-15));
}

TEST_CASE("EMA converges to a constant signal") {
    SensitivityState st = init_sensitivity(1, 1, 1, 0.8);
    update_ema(st, Matrix(1, 1, {3.0}), Matrix(1, 1, {3.0}));
    const Matrix c(1, 1, {7.0});
    for (int i = 0; i < 50; ++i) update_ema(st, c, c);
    // |ema - c| <= beta^50 * |seed - c| = 0.8^50 * 4 < 1e-4.
    CHECK(std::fabs(st.ema_a(0, 0) - 7.0) < 1e-4);
}

TEST_CASE("EMA stays within the observed score range") {
    Rng rng(5);
    SensitivityState st = init_sensitivity(2, 2, 2, 0.6);
    double lo = 1e300, hi = -1e300;
    for (int step = 0; step < 40; ++step) {
        Matrix ia = Matrix::uniform(2, 2, 0.0, 3.0, rng);
        Matrix ib = Matrix::uniform(2, 2, 0.0, 3.0, rng);
        for (std::size_t i = 0; i < ia.size(); ++i) {
            lo = std::min({lo, ia.at(i), ib.at(i)});
            hi = std::max({hi, ia.at(i), ib.at(i)});
        }
        update_ema(st, ia, ib);
        for (std::size_t i = 0; i < st.ema_a.size(); ++i) {
            CHECK(st.ema_a.at(i) >= 0.0);
            CHECK(st.ema_a.at(i) >= lo - 1e-12);
            CHECK(st.ema_a.at(i) <= hi + 1e-12);
        }
    }
}

TEST_CASE("beta zero reproduces the instantaneous score") {
    Rng rng(6);
    SensitivityState st = init_sensitivity(3, 3, 3, 0.0);
    for (int step = 0; step < 5; ++step) {
        Matrix ia = Matrix::uniform(3, 3, 0.0, 2.0, rng);
        Matrix ib = Matrix::uniform(3, 3, 0.0, 2.0, rng);
        update_ema(st, ia, ib);
        CHECK(st.ema_a == ia);
        CHECK(st.ema_b == ib);
    }
}

TEST_CASE("init_sensitivity rejects beta outside [0,1)") {
    CHECK_THROWS_AS(init_sensitivity(2, 2, 1, 1.0), ContractError);
    CHECK_THROWS_AS(init_sensitivity(2, 2, 1, -0.1), ContractError);
}
