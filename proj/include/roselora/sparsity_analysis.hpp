#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "roselora/matrix.hpp"
#include "roselora/rng.hpp"

namespace roselora {

// Exact-zero sparsity; no tolerance on purpose, sampled nonzero values are
// drawn from continuous distributions so survivors stay nonzero.
inline double sparsity(const Matrix& m) {
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.at(i) == 0.0) ++zeros;
    }
    return static_cast<double>(zeros) / static_cast<double>(m.size());
}

// Sparsity of a rank-one product b*a from the factor sparsities.
inline double rank_one_sparsity(double s_a, double s_b) {
    if (s_a < 0.0 || s_a > 1.0 || s_b < 0.0 || s_b > 1.0) {
        throw ContractError("rank_one_sparsity: sparsities must be in [0, 1]");
    }
    return s_a + s_b - s_a * s_b;
}

// Lower bound on sparsity(B*A) from per-row sparsities of A and per-column
// sparsities of B. Reduces to rank_one_sparsity at r = 1.
inline double product_sparsity_lower_bound(const std::vector<double>& row_s,
                                           const std::vector<double>& col_s) {
    if (row_s.size() != col_s.size()) {
        throw ShapeError("product_sparsity_lower_bound: length mismatch");
    }
    double acc = 1.0 - static_cast<double>(row_s.size());
    for (std::size_t i = 0; i < row_s.size(); ++i) {
        if (row_s[i] < 0.0 || row_s[i] > 1.0 || col_s[i] < 0.0 || col_s[i] > 1.0) {
            throw ContractError("product_sparsity_lower_bound: sparsities must be in [0, 1]");
        }
        acc += rank_one_sparsity(row_s[i], col_s[i]);
    }
    return std::max(0.0, acc);
}

// Sparse factors whose product is fully dense: A carries one dense row,
// B one dense column, everything else zero. Both factors have sparsity
// (r-1)/r yet B*A has sparsity 0.
inline std::pair<Matrix, Matrix> example1_counterexample(std::size_t r, std::size_t d1,
                                                         std::size_t d2, std::uint64_t seed) {
    if (r < 2) {
        throw ContractError("example1_counterexample: requires r >= 2");
    }
    Rng rng = Rng::derived(seed, 0xe9a1ULL);
    Matrix a_full = Matrix::zeros(r, d2);
    Matrix b_full = Matrix::zeros(d1, r);
    for (std::size_t j = 0; j < d2; ++j) a_full(0, j) = rng.uniform(0.5, 1.5);
    for (std::size_t i = 0; i < d1; ++i) b_full(i, 0) = rng.uniform(0.5, 1.5);
    return {std::move(a_full), std::move(b_full)};
}

// One random mask placement: exactly `zeros` zero entries among d slots,
// survivors drawn positive so sums of products cannot cancel to zero.
inline void fill_masked_row(double* dst, std::size_t stride, std::size_t d,
                            std::size_t zeros, Rng& rng) {
    std::vector<std::size_t> idx(d);
    for (std::size_t i = 0; i < d; ++i) idx[i] = i;
    rng.shuffle(idx);
    for (std::size_t i = 0; i < d; ++i) {
        dst[idx[i] * stride] = (i < zeros) ? 0.0 : rng.uniform(0.5, 1.5);
    }
}

// Random (A, B) with exactly round(row_s*d2) zeros per row of A and
// round(col_s*d1) zeros per column of B.
inline std::pair<Matrix, Matrix> random_masked_factors(double row_s, double col_s,
                                                       std::size_t r, std::size_t d1,
                                                       std::size_t d2, Rng& rng) {
    const auto za = static_cast<std::size_t>(std::llround(row_s * static_cast<double>(d2)));
    const auto zb = static_cast<std::size_t>(std::llround(col_s * static_cast<double>(d1)));
    Matrix a(r, d2), b(d1, r);
    for (std::size_t i = 0; i < r; ++i) {
        fill_masked_row(&a.data()[i * d2], 1, d2, za, rng);
        fill_masked_row(&b.data()[i], r, d1, zb, rng);
    }
    return {std::move(a), std::move(b)};
}

struct BoundSweepRow {
    double row_sparsity = 0.0;
    double col_sparsity = 0.0;
    std::size_t rank = 0;
    std::size_t trials = 0;
    double empirical_product_sparsity = 0.0;
    double theoretical_bound = 0.0;
};

// Empirical sweep over a sparsity grid: for each (row_s, col_s) pair,
// samples random mask placements and compares the measured product
// sparsity against the lower bound.
inline std::vector<BoundSweepRow> empirical_bound_sweep(const std::vector<double>& grid,
                                                        std::size_t rank, std::size_t d1,
                                                        std::size_t d2, std::size_t trials,
                                                        std::uint64_t seed) {
    if (trials < 1) {
        throw ContractError("empirical_bound_sweep: trials must be >= 1");
    }
    for (double g : grid) {
        if (g < 0.0 || g >= 1.0) {
            throw ContractError("empirical_bound_sweep: grid values must be in [0, 1)");
        }
    }
    std::vector<BoundSweepRow> out;
    std::uint64_t cell = 0;
    for (double row_s : grid) {
        for (double col_s : grid) {
            // Masks have integer cardinalities; the bound uses the realized
            // sparsities, identical across trials.
            const double za = std::llround(row_s * static_cast<double>(d2));
            const double zb = std::llround(col_s * static_cast<double>(d1));
            const double real_row_s = za / static_cast<double>(d2);
            const double real_col_s = zb / static_cast<double>(d1);
            const double bound = product_sparsity_lower_bound(
                std::vector<double>(rank, real_row_s), std::vector<double>(rank, real_col_s));
            double mean = 0.0;
            for (std::size_t trial = 0; trial < trials; ++trial) {
                Rng rng = Rng::derived(seed, cell * 1000003ULL + trial);
                auto [a, b] = random_masked_factors(row_s, col_s, rank, d1, d2, rng);
                mean += sparsity(matmul(b, a));
            }
            mean /= static_cast<double>(trials);
            out.push_back(BoundSweepRow{real_row_s, real_col_s, rank, trials, mean, bound});
            ++cell;
        }
    }
    return out;
}

} // namespace roselora
