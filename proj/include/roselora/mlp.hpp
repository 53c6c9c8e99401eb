#pragma once

#include <cstdint>
#include <vector>

#include "roselora/adapter.hpp"
#include "roselora/autograd.hpp"
#include "roselora/matrix.hpp"
#include "roselora/sensitivity.hpp"
#include "roselora/trainer.hpp"

namespace roselora {

// Two-layer ReLU classifier without biases: logits = W2 * relu(W1 * x).
struct PlainMlp {
    Matrix w1;  // hidden x input
    Matrix w2;  // classes x hidden

    Matrix forward(const Matrix& x) const {
        return matmul(w2, relu(matmul(w1, x)));
    }
};

inline PlainMlp random_mlp(std::size_t input_dim, std::size_t hidden_dim,
                           std::size_t num_classes, std::uint64_t seed) {
    Rng rng = Rng::derived(seed, 0x3117ULL);
    const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    PlainMlp m;
    m.w1 = Matrix::uniform(hidden_dim, input_dim, -s1, s1, rng);
    m.w2 = Matrix::uniform(num_classes, hidden_dim, -s2, s2, rng);
    return m;
}

inline std::vector<std::size_t> argmax_columns(const Matrix& logits) {
    std::vector<std::size_t> out(logits.cols());
    for (std::size_t j = 0; j < logits.cols(); ++j) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < logits.rows(); ++i) {
            if (logits(i, j) > logits(best, j)) best = i;
        }
        out[j] = best;
    }
    return out;
}

inline double accuracy(const std::vector<std::size_t>& predictions,
                       const std::vector<std::size_t>& labels) {
    if (predictions.size() != labels.size() || predictions.empty()) {
        throw ContractError("accuracy: prediction/label size mismatch");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] == labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

// Plain SGD on both dense weights; plays the role of the pre-training phase
// that produces the frozen base model.
inline double pretrain_sgd(PlainMlp& model, const Matrix& inputs,
                           const std::vector<std::size_t>& labels, double learning_rate,
                           std::size_t steps, std::size_t batch_size, std::uint64_t seed) {
    Rng batch_rng = Rng::derived(seed, 0x9e7a11ULL);
    double last_loss = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
        const auto idx = sample_batch_indices(batch_rng, inputs.cols(), batch_size);
        Batch batch = gather_batch(inputs, labels, idx);
        Graph g;
        NodeId x = g.constant(batch.inputs);
        NodeId w1 = g.leaf(model.w1);
        NodeId w2 = g.leaf(model.w2);
        NodeId h = g.relu(g.matmul(w1, x));
        NodeId logits = g.matmul(w2, h);
        NodeId loss = g.softmax_cross_entropy(logits, batch.targets);
        last_loss = g.value(loss)(0, 0);
        if (!std::isfinite(last_loss)) {
            throw TrainingDiverged("pretrain_sgd: non-finite loss at step " + std::to_string(t));
        }
        g.backward(loss);
        const Matrix& g1 = g.grad(w1);
        const Matrix& g2 = g.grad(w2);
        for (std::size_t i = 0; i < model.w1.size(); ++i) {
            model.w1.at(i) -= learning_rate * g1.at(i);
        }
        for (std::size_t i = 0; i < model.w2.size(); ++i) {
            model.w2.at(i) -= learning_rate * g2.at(i);
        }
    }
    return last_loss;
}

// The frozen base MLP with one adapter per weight matrix.
struct LoraMlp {
    LoraAdapter layer1;
    LoraAdapter layer2;
    SensitivityState sens1;
    SensitivityState sens2;

    static LoraMlp wrap(const PlainMlp& base, std::size_t rank, double beta,
                        std::uint64_t seed) {
        LoraMlp m;
        m.layer1 = init_adapter(base.w1, rank, splitmix64(seed ^ 1));
        m.layer2 = init_adapter(base.w2, rank, splitmix64(seed ^ 2));
        m.sens1 = init_sensitivity(m.layer1.d1(), m.layer1.d2(), rank, beta);
        m.sens2 = init_sensitivity(m.layer2.d1(), m.layer2.d2(), rank, beta);
        return m;
    }

    Matrix forward(const Matrix& x) const {
        return adapter_forward(layer2, relu(adapter_forward(layer1, x)));
    }

    std::vector<std::size_t> predict(const Matrix& x) const {
        return argmax_columns(forward(x));
    }

    // Registers A/B of both layers as leaves; base weights enter as constants.
    NodeId build_loss(Graph& g, const Batch& batch, std::vector<AdapterLeaves>& leaves) {
        leaves.clear();
        NodeId x = g.constant(batch.inputs);
        NodeId w1c = g.constant(layer1.w0);
        NodeId a1 = g.leaf(layer1.a);
        NodeId b1 = g.leaf(layer1.b);
        NodeId a1x = g.matmul(a1, x);
        NodeId b1a1x = g.matmul(b1, a1x);
        NodeId w1x = g.matmul(w1c, x);
        NodeId h = g.relu(g.add(w1x, b1a1x));
        NodeId w2c = g.constant(layer2.w0);
        NodeId a2 = g.leaf(layer2.a);
        NodeId b2 = g.leaf(layer2.b);
        NodeId a2h = g.matmul(a2, h);
        NodeId b2a2h = g.matmul(b2, a2h);
        NodeId w2h = g.matmul(w2c, h);
        NodeId logits = g.add(w2h, b2a2h);
        leaves.push_back(AdapterLeaves{a1, b1});
        leaves.push_back(AdapterLeaves{a2, b2});
        return g.softmax_cross_entropy(logits, batch.targets);
    }

    std::vector<AdapterSlot> slots() {
        return {AdapterSlot{&layer1, &sens1}, AdapterSlot{&layer2, &sens2}};
    }
};

} // namespace roselora
