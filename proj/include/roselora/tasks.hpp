#pragma once

#include <cstdint>
#include <vector>

#include "roselora/matrix.hpp"
#include "roselora/mlp.hpp"
#include "roselora/rng.hpp"

namespace roselora {

enum class TaskKind { Classification, FactEdit };

struct Split {
    Matrix inputs;  // input_dim x n, one sample per column
    std::vector<std::size_t> labels;
};

// Synthetic stand-in for a real dataset: a pre-train split the base model
// learns, an adaptation split to fine-tune or edit on, and a locality split
// whose behavior must not change.
struct TaskBundle {
    Split pretrain;
    Split adapt;
    Split locality;
    std::uint64_t seed = 0;
    TaskKind kind = TaskKind::Classification;
    std::size_t input_dim = 0;
    std::size_t num_classes = 0;
};

namespace detail {

inline Matrix gaussian_samples(std::size_t dim, std::size_t n, Rng& rng) {
    Matrix x(dim, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < dim; ++i) {
            x(i, j) = rng.normal();
        }
    }
    return x;
}

} // namespace detail

// Labels come from a hidden random teacher network. The adaptation split is
// drawn from a shifted input distribution so fine-tuning actually moves the
// decision boundary; the locality split stays on the pre-train distribution.
inline TaskBundle gen_classification_task(std::uint64_t seed, std::size_t input_dim,
                                          std::size_t num_classes, std::size_t n_pretrain,
                                          std::size_t n_adapt) {
    if (input_dim == 0 || num_classes < 2 || n_pretrain == 0 || n_adapt == 0) {
        throw ContractError("gen_classification_task: dimensions must be positive");
    }
    const std::size_t teacher_hidden = 4 * input_dim;
    PlainMlp teacher = random_mlp(input_dim, teacher_hidden, num_classes, splitmix64(seed ^ 0x7eacULL));

    Rng rng = Rng::derived(seed, 0xc1a55ULL);
    TaskBundle task;
    task.seed = seed;
    task.kind = TaskKind::Classification;
    task.input_dim = input_dim;
    task.num_classes = num_classes;

    task.pretrain.inputs = detail::gaussian_samples(input_dim, n_pretrain, rng);
    task.pretrain.labels = argmax_columns(teacher.forward(task.pretrain.inputs));

    // Fixed per-task shift applied to every adaptation sample.
    std::vector<double> shift(input_dim);
    for (auto& v : shift) v = rng.uniform(1.0, 2.0) * (rng.next_double() < 0.5 ? -1.0 : 1.0);
    task.adapt.inputs = detail::gaussian_samples(input_dim, n_adapt, rng);
    for (std::size_t j = 0; j < n_adapt; ++j) {
        for (std::size_t i = 0; i < input_dim; ++i) {
            task.adapt.inputs(i, j) += shift[i];
        }
    }
    task.adapt.labels = argmax_columns(teacher.forward(task.adapt.inputs));

    task.locality.inputs = detail::gaussian_samples(input_dim, n_adapt, rng);
    task.locality.labels = argmax_columns(teacher.forward(task.locality.inputs));
    return task;
}

// Toy knowledge base: random key vectors mapped to value classes. The
// adaptation split reassigns new values to a subset of keys; the locality
// split is the untouched remainder with its original values.
inline TaskBundle gen_fact_edit_task(std::uint64_t seed, std::size_t n_facts,
                                     std::size_t n_edit, std::size_t key_dim,
                                     std::size_t num_values) {
    if (n_edit >= n_facts) {
        throw ContractError("gen_fact_edit_task: n_edit must be < n_facts");
    }
    if (key_dim == 0 || num_values < 2) {
        throw ContractError("gen_fact_edit_task: dimensions must be positive");
    }
    Rng rng = Rng::derived(seed, 0xfac7ULL);
    TaskBundle task;
    task.seed = seed;
    task.kind = TaskKind::FactEdit;
    task.input_dim = key_dim;
    task.num_classes = num_values;

    task.pretrain.inputs = detail::gaussian_samples(key_dim, n_facts, rng);
    task.pretrain.labels.resize(n_facts);
    for (auto& v : task.pretrain.labels) {
        v = static_cast<std::size_t>(rng.next_below(num_values));
    }

    std::vector<std::size_t> order(n_facts);
    for (std::size_t i = 0; i < n_facts; ++i) order[i] = i;
    rng.shuffle(order);

    // n_edit may be 0 (no-op edit); the adapt split is then empty.
    if (n_edit > 0) task.adapt.inputs = Matrix(key_dim, n_edit);
    task.adapt.labels.resize(n_edit);
    for (std::size_t j = 0; j < n_edit; ++j) {
        const std::size_t src = order[j];
        for (std::size_t i = 0; i < key_dim; ++i) {
            task.adapt.inputs(i, j) = task.pretrain.inputs(i, src);
        }
        // New value, guaranteed different from the original.
        std::size_t nv = static_cast<std::size_t>(rng.next_below(num_values - 1));
        if (nv >= task.pretrain.labels[src]) ++nv;
        task.adapt.labels[j] = nv;
    }

    const std::size_t n_keep = n_facts - n_edit;
    task.locality.inputs = Matrix(key_dim, n_keep);
    task.locality.labels.resize(n_keep);
    for (std::size_t j = 0; j < n_keep; ++j) {
        const std::size_t src = order[n_edit + j];
        for (std::size_t i = 0; i < key_dim; ++i) {
            task.locality.inputs(i, j) = task.pretrain.inputs(i, src);
        }
        task.locality.labels[j] = task.pretrain.labels[src];
    }
    return task;
}

} // namespace roselora
