#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "roselora/config.hpp"
#include "roselora/mlp.hpp"
#include "roselora/tasks.hpp"
#include "roselora/trainer.hpp"

namespace roselora {

struct EditMetrics {
    double edit_success = 0.0;
    double locality = 0.0;
};

struct ForgettingResult {
    double adapt_accuracy = 0.0;
    double pre_accuracy = 0.0;   // base model on the pre-train split
    double post_accuracy = 0.0;  // adapted model on the pre-train split
    double retention = 0.0;      // post / pre
};

struct DataScalingRow {
    double fraction = 0.0;
    std::size_t n_train = 0;
    double lora_accuracy = 0.0;
    double roselora_accuracy = 0.0;
};

struct AdaptationRun {
    LoraMlp model;
    std::vector<StepReport> reports;
};

// Same schedule length and seed stream, but no pruning and no norm clip:
// plain LoRA under an identical budget.
inline TrainConfig dense_baseline_config(TrainConfig cfg) {
    cfg.schedule.final_keep = 1.0;
    cfg.edit_alpha.reset();
    return cfg;
}

inline PlainMlp pretrain_base(const ExperimentConfig& cfg, const TaskBundle& task,
                              std::uint64_t seed) {
    PlainMlp base = random_mlp(task.input_dim, cfg.hidden_dim, task.num_classes,
                               splitmix64(seed ^ 0xba5eULL));
    pretrain_sgd(base, task.pretrain.inputs, task.pretrain.labels, cfg.pretrain_lr,
                 cfg.pretrain_steps, cfg.pretrain_batch, splitmix64(seed ^ 0x5d9ULL));
    return base;
}

inline AdaptationRun adapt_model(const PlainMlp& base, const Matrix& inputs,
                                 const std::vector<std::size_t>& labels,
                                 const ExperimentConfig& cfg, const TrainConfig& tcfg) {
    AdaptationRun run{LoraMlp::wrap(base, cfg.rank, tcfg.beta, tcfg.seed), {}};
    run.reports = train(run.model, inputs, labels, tcfg);
    return run;
}

// Locality is agreement with the pre-edit model's own predictions, not with
// ground-truth labels.
inline double locality_score(const std::vector<std::size_t>& pre_edit_preds,
                             const std::vector<std::size_t>& post_edit_preds) {
    if (pre_edit_preds.size() != post_edit_preds.size() || pre_edit_preds.empty()) {
        throw ContractError("locality_score: prediction size mismatch");
    }
    std::size_t same = 0;
    for (std::size_t i = 0; i < pre_edit_preds.size(); ++i) {
        if (pre_edit_preds[i] == post_edit_preds[i]) ++same;
    }
    return static_cast<double>(same) / static_cast<double>(pre_edit_preds.size());
}

inline EditMetrics evaluate_edit(const LoraMlp& model,
                                 const std::vector<std::size_t>& pre_edit_locality_preds,
                                 const TaskBundle& task) {
    EditMetrics m;
    // Zero edits succeed vacuously.
    m.edit_success = task.adapt.labels.empty()
                         ? 1.0
                         : accuracy(model.predict(task.adapt.inputs), task.adapt.labels);
    m.locality = locality_score(pre_edit_locality_preds, model.predict(task.locality.inputs));
    return m;
}

inline std::pair<EditMetrics, AdaptationRun> run_edit_experiment(const TaskBundle& task,
                                                                 const ExperimentConfig& cfg,
                                                                 const TrainConfig& tcfg,
                                                                 const PlainMlp& base) {
    if (task.kind != TaskKind::FactEdit) {
        throw ContractError("run_edit_experiment: task kind must be fact-edit");
    }
    const std::vector<std::size_t> pre_preds = argmax_columns(base.forward(task.locality.inputs));
    AdaptationRun run{LoraMlp::wrap(base, cfg.rank, tcfg.beta, tcfg.seed), {}};
    if (!task.adapt.labels.empty()) {
        run.reports = train(run.model, task.adapt.inputs, task.adapt.labels, tcfg);
    }
    EditMetrics metrics = evaluate_edit(run.model, pre_preds, task);
    return {metrics, std::move(run)};
}

inline std::pair<ForgettingResult, AdaptationRun> run_forgetting_experiment(
    const TaskBundle& task, const ExperimentConfig& cfg, const TrainConfig& tcfg,
    const PlainMlp& base) {
    if (task.kind != TaskKind::Classification) {
        throw ContractError("run_forgetting_experiment: task kind must be classification");
    }
    ForgettingResult result;
    result.pre_accuracy =
        accuracy(argmax_columns(base.forward(task.pretrain.inputs)), task.pretrain.labels);
    AdaptationRun run = adapt_model(base, task.adapt.inputs, task.adapt.labels, cfg, tcfg);
    result.adapt_accuracy = accuracy(run.model.predict(task.adapt.inputs), task.adapt.labels);
    result.post_accuracy = accuracy(run.model.predict(task.pretrain.inputs), task.pretrain.labels);
    result.retention = result.post_accuracy / result.pre_accuracy;
    return {result, std::move(run)};
}

// Paired LoRA/RoseLoRA runs trained on deterministic prefixes of the
// adaptation split, both evaluated on the full split.
inline std::vector<DataScalingRow> run_data_scaling(const TaskBundle& task,
                                                    const ExperimentConfig& cfg,
                                                    const TrainConfig& tcfg,
                                                    const PlainMlp& base,
                                                    const std::vector<double>& fractions) {
    std::vector<DataScalingRow> rows;
    for (double f : fractions) {
        if (!(f > 0.0 && f <= 1.0)) {
            throw ContractError("run_data_scaling: fractions must be in (0, 1]");
        }
        const std::size_t n_full = task.adapt.labels.size();
        const std::size_t n = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(f * static_cast<double>(n_full))));
        Matrix sub_inputs(task.adapt.inputs.rows(), n);
        std::vector<std::size_t> sub_labels(n);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < sub_inputs.rows(); ++i) {
                sub_inputs(i, j) = task.adapt.inputs(i, j);
            }
            sub_labels[j] = task.adapt.labels[j];
        }
        AdaptationRun sparse = adapt_model(base, sub_inputs, sub_labels, cfg, tcfg);
        AdaptationRun dense =
            adapt_model(base, sub_inputs, sub_labels, cfg, dense_baseline_config(tcfg));
        DataScalingRow row;
        row.fraction = f;
        row.n_train = n;
        row.roselora_accuracy =
            accuracy(sparse.model.predict(task.adapt.inputs), task.adapt.labels);
        row.lora_accuracy = accuracy(dense.model.predict(task.adapt.inputs), task.adapt.labels);
        rows.push_back(row);
    }
    return rows;
}

} // namespace roselora
