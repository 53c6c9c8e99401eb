#pragma once

#include <cstdint>

#include "roselora/matrix.hpp"
#include "roselora/rng.hpp"

namespace roselora {

// Frozen base weight plus a masked low-rank update: W = W0 + B*A.
// The masks are enforced, not advisory: entries under a zero mask are
// exactly 0 after apply_masks(), which the trainer calls every step.
struct LoraAdapter {
    Matrix w0;      // d1 x d2, never touched by training
    Matrix a;       // r x d2
    Matrix b;       // d1 x r
    Matrix mask_a;  // 0/1, r x d2
    Matrix mask_b;  // 0/1, d1 x r
    std::size_t rank = 0;

    std::size_t d1() const { return w0.rows(); }
    std::size_t d2() const { return w0.cols(); }
};

// B starts at zero so the adapter is a no-op at init; A is small uniform.
inline LoraAdapter init_adapter(Matrix w0, std::size_t rank, std::uint64_t seed) {
    const std::size_t d1 = w0.rows();
    const std::size_t d2 = w0.cols();
    if (rank < 1 || rank > std::min(d1, d2)) {
        throw ContractError("init_adapter: rank " + std::to_string(rank) +
                            " out of range for " + w0.shape_str());
    }
    LoraAdapter ad;
    ad.rank = rank;
    ad.w0 = std::move(w0);
    Rng rng = Rng::derived(seed, 0x4c6f5241ULL);
    const double bound = 1.0 / std::sqrt(static_cast<double>(d2));
    ad.a = Matrix::uniform(rank, d2, -bound, bound, rng);
    ad.b = Matrix::zeros(d1, rank);
    ad.mask_a = Matrix::ones(rank, d2);
    ad.mask_b = Matrix::ones(d1, rank);
    return ad;
}

inline Matrix effective_weight(const LoraAdapter& ad) {
    return add(ad.w0, matmul(ad.b, ad.a));
}

// w0*x + b*(a*x); cheaper than forming the dense effective weight.
inline Matrix adapter_forward(const LoraAdapter& ad, const Matrix& x) {
    return add(matmul(ad.w0, x), matmul(ad.b, matmul(ad.a, x)));
}

// Fraction of exactly-zero entries of the update b*a.
inline double delta_sparsity(const LoraAdapter& ad) {
    Matrix delta = matmul(ad.b, ad.a);
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < delta.size(); ++i) {
        if (delta.at(i) == 0.0) ++zeros;
    }
    return static_cast<double>(zeros) / static_cast<double>(delta.size());
}

inline void apply_masks(LoraAdapter& ad) {
    for (std::size_t i = 0; i < ad.a.size(); ++i) {
        if (ad.mask_a.at(i) == 0.0) ad.a.at(i) = 0.0;
    }
    for (std::size_t i = 0; i < ad.b.size(); ++i) {
        if (ad.mask_b.at(i) == 0.0) ad.b.at(i) = 0.0;
    }
}

} // namespace roselora
