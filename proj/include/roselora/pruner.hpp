#pragma once

#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

#include "roselora/adapter.hpp"
#include "roselora/matrix.hpp"
#include "roselora/sensitivity.hpp"

namespace roselora {

// Cubic keep-fraction trajectory: hold at 1 until warmup_end, decay
// cubically to final_keep by ramp_end, then hold.
struct SparsitySchedule {
    double final_keep = 1.0;       // kappa in (0, 1]
    std::size_t warmup_end = 0;    // t_i
    std::size_t ramp_end = 1;      // t_f
    std::size_t total_steps = 1;   // T

    void validate() const {
        if (!(final_keep > 0.0 && final_keep <= 1.0)) {
            throw ContractError("schedule: final_keep must be in (0, 1]");
        }
        if (!(warmup_end < ramp_end && ramp_end <= total_steps)) {
            throw ContractError("schedule: need warmup_end < ramp_end <= total_steps");
        }
    }
};

inline double keep_fraction_at(const SparsitySchedule& s, std::size_t t) {
    s.validate();
    if (t < 1 || t > s.total_steps) {
        throw ContractError("keep_fraction_at: step " + std::to_string(t) + " out of range");
    }
    if (t < s.warmup_end) return 1.0;
    if (t >= s.ramp_end) return s.final_keep;
    const double progress = static_cast<double>(t - s.warmup_end) /
                            static_cast<double>(s.ramp_end - s.warmup_end);
    const double c = 1.0 - progress;
    return s.final_keep + (1.0 - s.final_keep) * c * c * c;
}

inline std::size_t keep_count(double keep, std::size_t d) {
    const auto k = static_cast<std::size_t>(std::floor(keep * static_cast<double>(d)));
    return std::max<std::size_t>(1, k);
}

// Retains the max(1, floor(keep*d)) highest-scoring entries, zeroes the rest.
// Ties break toward the lower index.
inline std::pair<std::vector<double>, std::vector<double>>
prune_vector(const std::vector<double>& values, const std::vector<double>& scores, double keep) {
    if (values.size() != scores.size()) {
        throw ShapeError("prune_vector: values/scores length mismatch");
    }
    if (!(keep > 0.0 && keep <= 1.0)) {
        throw ContractError("prune_vector: keep must be in (0, 1]");
    }
    const std::size_t d = values.size();
    const std::size_t k = keep_count(keep, d);
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return scores[i] > scores[j];
    });
    std::vector<double> pruned(d, 0.0);
    std::vector<double> mask(d, 0.0);
    for (std::size_t i = 0; i < k && i < d; ++i) {
        pruned[order[i]] = values[order[i]];
        mask[order[i]] = 1.0;
    }
    return {std::move(pruned), std::move(mask)};
}

// Top-k per row of A and per column of B, scored by the smoothed sensitivity.
inline void prune_adapter(LoraAdapter& ad, const SensitivityState& st, double keep) {
    const std::size_t r = ad.rank;
    const std::size_t d1 = ad.d1();
    const std::size_t d2 = ad.d2();
    for (std::size_t i = 0; i < r; ++i) {
        std::vector<double> vals(d2), scores(d2);
        for (std::size_t j = 0; j < d2; ++j) {
            vals[j] = ad.a(i, j);
            scores[j] = st.ema_a(i, j);
        }
        auto [pruned, mask] = prune_vector(vals, scores, keep);
        for (std::size_t j = 0; j < d2; ++j) {
            ad.a(i, j) = pruned[j];
            ad.mask_a(i, j) = mask[j];
        }
    }
    for (std::size_t i = 0; i < r; ++i) {
        std::vector<double> vals(d1), scores(d1);
        for (std::size_t j = 0; j < d1; ++j) {
            vals[j] = ad.b(j, i);
            scores[j] = st.ema_b(j, i);
        }
        auto [pruned, mask] = prune_vector(vals, scores, keep);
        for (std::size_t j = 0; j < d1; ++j) {
            ad.b(j, i) = pruned[j];
            ad.mask_b(j, i) = mask[j];
        }
    }
}

} // namespace roselora
