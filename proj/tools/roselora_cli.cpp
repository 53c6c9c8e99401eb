// Command-line harness for the RoseLoRA toy experiments.
//
// Subcommands: pretrain, train, edit, forgetting, data-scaling,
// analyze-bound, eval. All outputs are deterministic functions of
// (config, seed).

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "roselora/roselora.hpp"

namespace {

using namespace roselora;

struct CommonOpts {
    std::string config_path;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::string checkpoint_path;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required = true) {
    auto* c = cmd->add_option("--config", opts.config_path, "Path to JSON config");
    if (config_required) c->required();
    cmd->add_option("--seed", opts.seed, "Experiment seed (overrides train.seed)");
    cmd->add_option("--out", opts.out_dir, "Output directory");
    cmd->add_option("--checkpoint", opts.checkpoint_path, "Checkpoint path");
}

ExperimentConfig load_experiment(const CommonOpts& opts) {
    ExperimentConfig cfg = load_config(opts.config_path);
    cfg.train.seed = opts.seed;
    return cfg;
}

std::string out_path(const CommonOpts& opts, const std::string& name) {
    std::filesystem::create_directories(opts.out_dir);
    return (std::filesystem::path(opts.out_dir) / name).string();
}

Checkpoint base_checkpoint(const PlainMlp& base, const ExperimentConfig& cfg) {
    Checkpoint cp;
    cp.step = cfg.pretrain_steps;
    cp.config_digest = config_digest(cfg);
    cp.tensors.emplace_back("w1", base.w1);
    cp.tensors.emplace_back("w2", base.w2);
    return cp;
}

PlainMlp base_from_checkpoint(const Checkpoint& cp) {
    return PlainMlp{cp.tensor("w1"), cp.tensor("w2")};
}

Checkpoint adapter_checkpoint(const LoraMlp& model, const ExperimentConfig& cfg,
                              std::size_t step) {
    Checkpoint cp;
    cp.step = step;
    cp.config_digest = config_digest(cfg);
    auto put_layer = [&](const std::string& prefix, const LoraAdapter& ad,
                         const SensitivityState& st) {
        cp.tensors.emplace_back(prefix + ".w0", ad.w0);
        cp.tensors.emplace_back(prefix + ".a", ad.a);
        cp.tensors.emplace_back(prefix + ".b", ad.b);
        cp.tensors.emplace_back(prefix + ".mask_a", ad.mask_a);
        cp.tensors.emplace_back(prefix + ".mask_b", ad.mask_b);
        cp.tensors.emplace_back(prefix + ".ema_a", st.ema_a);
        cp.tensors.emplace_back(prefix + ".ema_b", st.ema_b);
    };
    put_layer("layer1", model.layer1, model.sens1);
    put_layer("layer2", model.layer2, model.sens2);
    return cp;
}

LoraAdapter adapter_from_checkpoint(const Checkpoint& cp, const std::string& prefix) {
    LoraAdapter ad;
    ad.w0 = cp.tensor(prefix + ".w0");
    ad.a = cp.tensor(prefix + ".a");
    ad.b = cp.tensor(prefix + ".b");
    ad.mask_a = cp.tensor(prefix + ".mask_a");
    ad.mask_b = cp.tensor(prefix + ".mask_b");
    ad.rank = ad.a.rows();
    return ad;
}

PlainMlp obtain_base(const CommonOpts& opts, const ExperimentConfig& cfg,
                     const TaskBundle& task) {
    if (!opts.checkpoint_path.empty()) {
        return base_from_checkpoint(load_checkpoint(opts.checkpoint_path));
    }
    return pretrain_base(cfg, task, opts.seed);
}

int cmd_pretrain(const CommonOpts& opts) {
    ExperimentConfig cfg = load_experiment(opts);
    TaskBundle task = cfg.make_task(opts.seed);
    PlainMlp base = pretrain_base(cfg, task, opts.seed);
    const double acc =
        accuracy(argmax_columns(base.forward(task.pretrain.inputs)), task.pretrain.labels);
    const std::string path = out_path(opts, "base.ckpt");
    save_checkpoint(path, base_checkpoint(base, cfg));
    std::cout << "pretrain_accuracy," << format_double(acc) << "\n";
    std::cout << "checkpoint," << path << "\n";
    return 0;
}

int cmd_train(const CommonOpts& opts) {
    ExperimentConfig cfg = load_experiment(opts);
    TaskBundle task = cfg.make_task(opts.seed);
    PlainMlp base = obtain_base(opts, cfg, task);
    AdaptationRun run = adapt_model(base, task.adapt.inputs, task.adapt.labels, cfg, cfg.train);
    write_text_file(out_path(opts, "steps.csv"), step_reports_csv(run.reports));
    save_checkpoint(out_path(opts, "adapter.ckpt"),
                    adapter_checkpoint(run.model, cfg, cfg.train.schedule.total_steps));
    const double acc = accuracy(run.model.predict(task.adapt.inputs), task.adapt.labels);
    std::ostringstream summary;
    summary << "metric,value\n";
    summary << "adapt_accuracy," << format_double(acc) << "\n";
    summary << "final_delta_sparsity," << format_double(run.reports.back().delta_sparsity)
            << "\n";
    write_text_file(out_path(opts, "summary.csv"), summary.str());
    std::cout << summary.str();
    return 0;
}

int cmd_edit(const CommonOpts& opts) {
    ExperimentConfig cfg = load_experiment(opts);
    if (cfg.kind != TaskKind::FactEdit) {
        throw ConfigError("edit subcommand requires task.kind = fact-edit");
    }
    TaskBundle task = cfg.make_task(opts.seed);
    PlainMlp base = obtain_base(opts, cfg, task);
    auto [sparse_metrics, sparse_run] = run_edit_experiment(task, cfg, cfg.train, base);
    auto [dense_metrics, dense_run] =
        run_edit_experiment(task, cfg, dense_baseline_config(cfg.train), base);
    write_text_file(out_path(opts, "steps.csv"), step_reports_csv(sparse_run.reports));
    save_checkpoint(out_path(opts, "adapter.ckpt"),
                    adapter_checkpoint(sparse_run.model, cfg, cfg.train.schedule.total_steps));
    std::ostringstream summary;
    summary << "method,edit_success,locality\n";
    summary << "roselora," << format_double(sparse_metrics.edit_success) << ','
            << format_double(sparse_metrics.locality) << "\n";
    summary << "lora," << format_double(dense_metrics.edit_success) << ','
            << format_double(dense_metrics.locality) << "\n";
    write_text_file(out_path(opts, "summary.csv"), summary.str());
    std::cout << summary.str();
    return 0;
}

int cmd_forgetting(const CommonOpts& opts) {
    ExperimentConfig cfg = load_experiment(opts);
    if (cfg.kind != TaskKind::Classification) {
        throw ConfigError("forgetting subcommand requires task.kind = classification");
    }
    TaskBundle task = cfg.make_task(opts.seed);
    PlainMlp base = obtain_base(opts, cfg, task);
    auto [sparse_result, sparse_run] = run_forgetting_experiment(task, cfg, cfg.train, base);
    auto [dense_result, dense_run] =
        run_forgetting_experiment(task, cfg, dense_baseline_config(cfg.train), base);
    write_text_file(out_path(opts, "steps.csv"), step_reports_csv(sparse_run.reports));
    save_checkpoint(out_path(opts, "adapter.ckpt"),
                    adapter_checkpoint(sparse_run.model, cfg, cfg.train.schedule.total_steps));
    std::ostringstream summary;
    summary << "method,adapt_accuracy,pre_accuracy,post_accuracy,retention\n";
    summary << "roselora," << format_double(sparse_result.adapt_accuracy) << ','
            << format_double(sparse_result.pre_accuracy) << ','
            << format_double(sparse_result.post_accuracy) << ','
            << format_double(sparse_result.retention) << "\n";
    summary << "lora," << format_double(dense_result.adapt_accuracy) << ','
            << format_double(dense_result.pre_accuracy) << ','
            << format_double(dense_result.post_accuracy) << ','
            << format_double(dense_result.retention) << "\n";
    write_text_file(out_path(opts, "summary.csv"), summary.str());
    std::cout << summary.str();
    return 0;
}

int cmd_data_scaling(const CommonOpts& opts, const std::vector<double>& fractions) {
    ExperimentConfig cfg = load_experiment(opts);
    TaskBundle task = cfg.make_task(opts.seed);
    PlainMlp base = obtain_base(opts, cfg, task);
    auto rows = run_data_scaling(task, cfg, cfg.train, base, fractions);
    std::ostringstream csv;
    csv << "fraction,n_train,lora_accuracy,roselora_accuracy\n";
    for (const auto& r : rows) {
        csv << format_double(r.fraction) << ',' << r.n_train << ','
            << format_double(r.lora_accuracy) << ',' << format_double(r.roselora_accuracy)
            << "\n";
    }
    write_text_file(out_path(opts, "data_scaling.csv"), csv.str());
    std::cout << csv.str();
    return 0;
}

int cmd_analyze_bound(const CommonOpts& opts, const std::vector<double>& grid,
                      std::size_t rank, std::size_t dim, std::size_t trials) {
    auto rows = empirical_bound_sweep(grid, rank, dim, dim, trials, opts.seed);
    const std::string csv = bound_sweep_csv(rows);
    write_text_file(out_path(opts, "bound_sweep.csv"), csv);
    std::cout << csv;
    return 0;
}

int cmd_eval(const CommonOpts& opts) {
    ExperimentConfig cfg = load_experiment(opts);
    TaskBundle task = cfg.make_task(opts.seed);
    Checkpoint cp = load_checkpoint(opts.checkpoint_path);
    LoraMlp model;
    model.layer1 = adapter_from_checkpoint(cp, "layer1");
    model.layer2 = adapter_from_checkpoint(cp, "layer2");
    std::cout << "split,accuracy\n";
    if (!task.adapt.labels.empty()) {
        std::cout << "adapt,"
                  << format_double(accuracy(model.predict(task.adapt.inputs), task.adapt.labels))
                  << "\n";
    }
    std::cout << "pretrain,"
              << format_double(
                     accuracy(model.predict(task.pretrain.inputs), task.pretrain.labels))
              << "\n";
    std::cout << "locality,"
              << format_double(
                     accuracy(model.predict(task.locality.inputs), task.locality.labels))
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"RoseLoRA sparse low-rank adaptation harness"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::vector<double> fractions{1.0, 0.5, 0.25, 0.125};
    std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 0.9, 0.95};
    std::size_t rank = 4, dim = 64, trials = 100;

    auto* pretrain = app.add_subcommand("pretrain", "Pre-train a base model and save it");
    add_common(pretrain, opts);
    auto* train = app.add_subcommand("train", "Fine-tune with RoseLoRA, write step metrics");
    add_common(train, opts);
    auto* edit = app.add_subcommand("edit", "Paired edit experiment (RoseLoRA vs dense LoRA)");
    add_common(edit, opts);
    auto* forgetting = app.add_subcommand("forgetting", "Paired forgetting experiment");
    add_common(forgetting, opts);
    auto* scaling = app.add_subcommand("data-scaling", "Paired runs over training-set fractions");
    add_common(scaling, opts);
    scaling->add_option("--fractions", fractions, "Training-set fractions in (0, 1]");
    auto* bound = app.add_subcommand("analyze-bound", "Empirical product-sparsity bound sweep");
    add_common(bound, opts, /*config_required=*/false);
    bound->add_option("--grid", grid, "Sparsity grid values in [0, 1)");
    bound->add_option("--rank", rank, "Rank of the factor matrices");
    bound->add_option("--dim", dim, "Square matrix dimension");
    bound->add_option("--trials", trials, "Trials per grid cell");
    auto* eval = app.add_subcommand("eval", "Evaluate a saved adapter checkpoint");
    add_common(eval, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (pretrain->parsed()) return cmd_pretrain(opts);
        if (train->parsed()) return cmd_train(opts);
        if (edit->parsed()) return cmd_edit(opts);
        if (forgetting->parsed()) return cmd_forgetting(opts);
        if (scaling->parsed()) return cmd_data_scaling(opts, fractions);
        if (bound->parsed()) return cmd_analyze_bound(opts, grid, rank, dim, trials);
        if (eval->parsed()) return cmd_eval(opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
