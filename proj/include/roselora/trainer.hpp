#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "roselora/adapter.hpp"
#include "roselora/autograd.hpp"
#include "roselora/matrix.hpp"
#include "roselora/pruner.hpp"
#include "roselora/rng.hpp"
#include "roselora/sensitivity.hpp"

namespace roselora {

struct TrainingDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrainConfig {
    double learning_rate = 0.0;
    SparsitySchedule schedule;
    double beta = 0.8;
    std::optional<double> edit_alpha;  // Frobenius-ball radius squared; absent = unconstrained
    std::size_t batch_size = 1;
    std::uint64_t seed = 0;

    void validate() const {
        if (learning_rate < 0.0) {
            throw ContractError("TrainConfig: learning_rate must be >= 0");
        }
        if (edit_alpha && !(*edit_alpha > 0.0)) {
            throw ContractError("TrainConfig: edit_alpha must be > 0");
        }
        if (batch_size < 1) {
            throw ContractError("TrainConfig: batch_size must be >= 1");
        }
        schedule.validate();
    }
};

struct StepReport {
    std::size_t step = 0;
    double loss = 0.0;
    double keep_fraction = 0.0;
    double delta_sparsity = 0.0;  // mean over adapted layers
    double a_frob_sq = 0.0;       // max over adapted layers
    double b_frob_sq = 0.0;       // max over adapted layers
};

struct Batch {
    Matrix inputs;                     // d2 x batch, one sample per column
    std::vector<std::size_t> targets;  // class index per column
};

// Adapter parameter leaves registered by a model's build_loss.
struct AdapterLeaves {
    NodeId a = 0;
    NodeId b = 0;
};

struct AdapterSlot {
    LoraAdapter* adapter = nullptr;
    SensitivityState* state = nullptr;
};

// Rescales m onto the Frobenius ball of squared radius alpha; identity if
// already inside. Direction is preserved.
inline Matrix clip_frobenius(const Matrix& m, double alpha) {
    if (!(alpha > 0.0)) {
        throw ContractError("clip_frobenius: alpha must be > 0");
    }
    const double fsq = m.frobenius_sq();
    if (fsq <= alpha) return m;
    return scale(m, std::sqrt(alpha / fsq));
}

template <class Model>
concept TrainableModel = requires(Model m, Graph& g, const Batch& batch,
                                  std::vector<AdapterLeaves>& leaves) {
    { m.build_loss(g, batch, leaves) } -> std::convertible_to<NodeId>;
    { m.slots() } -> std::convertible_to<std::vector<AdapterSlot>>;
};

// One full update: forward/backward, score pre-update parameters, SGD step,
// row/column top-k prune at the scheduled keep fraction, optional norm clip.
template <TrainableModel Model>
StepReport roselora_step(Model& model, const TrainConfig& cfg, const Batch& batch,
                         std::size_t t) {
    cfg.validate();
    Graph g;
    std::vector<AdapterLeaves> leaves;
    const NodeId loss_node = model.build_loss(g, batch, leaves);
    const double loss = g.value(loss_node)(0, 0);
    if (!std::isfinite(loss)) {
        throw TrainingDiverged("non-finite loss at step " + std::to_string(t));
    }
    g.backward(loss_node);

    std::vector<AdapterSlot> slots = model.slots();
    if (slots.size() != leaves.size()) {
        throw ContractError("roselora_step: slot/leaf count mismatch");
    }
    const double keep = keep_fraction_at(cfg.schedule, t);

    StepReport report;
    report.step = t;
    report.loss = loss;
    report.keep_fraction = keep;
    for (std::size_t s = 0; s < slots.size(); ++s) {
        LoraAdapter& ad = *slots[s].adapter;
        SensitivityState& st = *slots[s].state;
        const Matrix& grad_a = g.grad(leaves[s].a);
        const Matrix& grad_b = g.grad(leaves[s].b);

        update_ema(st, instantaneous_sensitivity(ad.a, grad_a),
                   instantaneous_sensitivity(ad.b, grad_b));

        for (std::size_t i = 0; i < ad.a.size(); ++i) {
            ad.a.at(i) -= cfg.learning_rate * grad_a.at(i);
        }
        for (std::size_t i = 0; i < ad.b.size(); ++i) {
            ad.b.at(i) -= cfg.learning_rate * grad_b.at(i);
        }

        prune_adapter(ad, st, keep);
        if (cfg.edit_alpha) {
            ad.a = clip_frobenius(ad.a, *cfg.edit_alpha);
            ad.b = clip_frobenius(ad.b, *cfg.edit_alpha);
        }
        apply_masks(ad);

        report.delta_sparsity += delta_sparsity(ad);
        report.a_frob_sq = std::max(report.a_frob_sq, ad.a.frobenius_sq());
        report.b_frob_sq = std::max(report.b_frob_sq, ad.b.frobenius_sq());
    }
    if (!slots.empty()) {
        report.delta_sparsity /= static_cast<double>(slots.size());
    }
    return report;
}

// Deterministic mini-batch index stream shared by paired runs.
inline std::vector<std::size_t> sample_batch_indices(Rng& rng, std::size_t n,
                                                     std::size_t batch_size) {
    std::vector<std::size_t> idx(batch_size);
    for (auto& v : idx) v = static_cast<std::size_t>(rng.next_below(n));
    return idx;
}

inline Batch gather_batch(const Matrix& inputs, const std::vector<std::size_t>& labels,
                          const std::vector<std::size_t>& idx) {
    Batch batch;
    batch.inputs = Matrix(inputs.rows(), idx.size());
    batch.targets.resize(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
        for (std::size_t i = 0; i < inputs.rows(); ++i) {
            batch.inputs(i, j) = inputs(i, idx[j]);
        }
        batch.targets[j] = labels[idx[j]];
    }
    return batch;
}

// Full run over schedule.total_steps seeded mini-batches.
template <TrainableModel Model>
std::vector<StepReport> train(Model& model, const Matrix& inputs,
                              const std::vector<std::size_t>& labels,
                              const TrainConfig& cfg) {
    cfg.validate();
    if (inputs.cols() == 0 || labels.size() != inputs.cols()) {
        throw ContractError("train: empty or inconsistent dataset");
    }
    Rng batch_rng = Rng::derived(cfg.seed, 0xba7c4e5ULL);
    std::vector<StepReport> reports;
    reports.reserve(cfg.schedule.total_steps);
    for (std::size_t t = 1; t <= cfg.schedule.total_steps; ++t) {
        const auto idx = sample_batch_indices(batch_rng, inputs.cols(), cfg.batch_size);
        reports.push_back(roselora_step(model, cfg, gather_batch(inputs, labels, idx), t));
    }
    return reports;
}

} // namespace roselora
