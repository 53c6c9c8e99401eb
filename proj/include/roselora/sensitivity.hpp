#pragma once

#include "roselora/matrix.hpp"

namespace roselora {

// EMA-smoothed importance scores for both low-rank factors.
// Score of an entry is |weight * gradient|, smoothed across mini-batches.
struct SensitivityState {
    Matrix ema_a;  // r x d2
    Matrix ema_b;  // d1 x r
    double beta = 0.0;
    std::size_t steps_seen = 0;
};

inline SensitivityState init_sensitivity(std::size_t d1, std::size_t d2,
                                         std::size_t rank, double beta) {
    if (beta < 0.0 || beta >= 1.0) {
        throw ContractError("sensitivity beta must be in [0, 1)");
    }
    SensitivityState st;
    st.ema_a = Matrix::zeros(rank, d2);
    st.ema_b = Matrix::zeros(d1, rank);
    st.beta = beta;
    return st;
}

inline Matrix instantaneous_sensitivity(const Matrix& param, const Matrix& grad) {
    if (!param.same_shape(grad)) {
        throw ShapeError("instantaneous_sensitivity shape mismatch: " +
                         param.shape_str() + " vs " + grad.shape_str());
    }
    Matrix out = param;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.at(i) = std::fabs(param.at(i) * grad.at(i));
    }
    return out;
}

// First observation seeds the EMA; afterwards ema <- beta*ema + (1-beta)*inst.
inline void update_ema(SensitivityState& st, const Matrix& inst_a, const Matrix& inst_b) {
    if (!st.ema_a.same_shape(inst_a) || !st.ema_b.same_shape(inst_b)) {
        throw ShapeError("update_ema shape mismatch");
    }
    if (st.steps_seen == 0) {
        st.ema_a = inst_a;
        st.ema_b = inst_b;
    } else {
        for (std::size_t i = 0; i < st.ema_a.size(); ++i) {
            st.ema_a.at(i) = st.beta * st.ema_a.at(i) + (1.0 - st.beta) * inst_a.at(i);
        }
        for (std::size_t i = 0; i < st.ema_b.size(); ++i) {
            st.ema_b.at(i) = st.beta * st.ema_b.at(i) + (1.0 - st.beta) * inst_b.at(i);
        }
    }
    ++st.steps_seen;
}

} // namespace roselora
