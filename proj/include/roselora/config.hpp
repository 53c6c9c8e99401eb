#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "roselora/tasks.hpp"
#include "roselora/trainer.hpp"

namespace roselora {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything one experiment needs: task generation, base-model pre-training
// and the adaptation run. Parsed from a JSON config file.
struct ExperimentConfig {
    // task
    TaskKind kind = TaskKind::Classification;
    std::size_t input_dim = 16;
    std::size_t num_classes = 4;
    std::size_t n_pretrain = 2048;
    std::size_t n_adapt = 256;
    std::size_t n_facts = 32;
    std::size_t n_edit = 4;
    std::size_t key_dim = 16;
    std::size_t num_values = 8;

    // base model / pre-training
    std::size_t hidden_dim = 32;
    double pretrain_lr = 0.5;
    std::size_t pretrain_steps = 3000;
    std::size_t pretrain_batch = 32;

    // adaptation
    std::size_t rank = 4;
    TrainConfig train;

    TaskBundle make_task(std::uint64_t seed) const {
        if (kind == TaskKind::Classification) {
            return gen_classification_task(seed, input_dim, num_classes, n_pretrain, n_adapt);
        }
        return gen_fact_edit_task(seed, n_facts, n_edit, key_dim, num_values);
    }
};

namespace detail {

inline std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace detail

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["task"]["kind"] = cfg.kind == TaskKind::Classification ? "classification" : "fact-edit";
    j["task"]["input_dim"] = cfg.input_dim;
    j["task"]["num_classes"] = cfg.num_classes;
    j["task"]["n_pretrain"] = cfg.n_pretrain;
    j["task"]["n_adapt"] = cfg.n_adapt;
    j["task"]["n_facts"] = cfg.n_facts;
    j["task"]["n_edit"] = cfg.n_edit;
    j["task"]["key_dim"] = cfg.key_dim;
    j["task"]["num_values"] = cfg.num_values;
    j["pretrain"]["hidden_dim"] = cfg.hidden_dim;
    j["pretrain"]["learning_rate"] = cfg.pretrain_lr;
    j["pretrain"]["steps"] = cfg.pretrain_steps;
    j["pretrain"]["batch_size"] = cfg.pretrain_batch;
    j["adapter"]["rank"] = cfg.rank;
    j["train"]["learning_rate"] = cfg.train.learning_rate;
    j["train"]["beta"] = cfg.train.beta;
    j["train"]["batch_size"] = cfg.train.batch_size;
    j["train"]["seed"] = cfg.train.seed;
    if (cfg.train.edit_alpha) j["train"]["edit_alpha"] = *cfg.train.edit_alpha;
    j["train"]["schedule"]["final_keep"] = cfg.train.schedule.final_keep;
    j["train"]["schedule"]["t_i"] = cfg.train.schedule.warmup_end;
    j["train"]["schedule"]["t_f"] = cfg.train.schedule.ramp_end;
    j["train"]["schedule"]["total_steps"] = cfg.train.schedule.total_steps;
    return j;
}

inline std::string config_digest(const ExperimentConfig& cfg) {
    return detail::fnv1a_hex(config_to_json(cfg).dump());
}

// Accepts either "final_keep" or its complement "sparsity" (e.g. 0.95 zeros
// means final_keep 0.05); specifying both is an error.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
    ExperimentConfig cfg;
    try {
        if (j.contains("task")) {
            const auto& t = j["task"];
            if (t.contains("kind")) {
                const std::string kind = t["kind"].get<std::string>();
                if (kind == "classification") {
                    cfg.kind = TaskKind::Classification;
                } else if (kind == "fact-edit") {
                    cfg.kind = TaskKind::FactEdit;
                } else {
                    throw ConfigError("unknown task kind: " + kind);
                }
            }
            cfg.input_dim = t.value("input_dim", cfg.input_dim);
            cfg.num_classes = t.value("num_classes", cfg.num_classes);
            cfg.n_pretrain = t.value("n_pretrain", cfg.n_pretrain);
            cfg.n_adapt = t.value("n_adapt", cfg.n_adapt);
            cfg.n_facts = t.value("n_facts", cfg.n_facts);
            cfg.n_edit = t.value("n_edit", cfg.n_edit);
            cfg.key_dim = t.value("key_dim", cfg.key_dim);
            cfg.num_values = t.value("num_values", cfg.num_values);
        }
        if (j.contains("pretrain")) {
            const auto& p = j["pretrain"];
            cfg.hidden_dim = p.value("hidden_dim", cfg.hidden_dim);
            cfg.pretrain_lr = p.value("learning_rate", cfg.pretrain_lr);
            cfg.pretrain_steps = p.value("steps", cfg.pretrain_steps);
            cfg.pretrain_batch = p.value("batch_size", cfg.pretrain_batch);
        }
        if (j.contains("adapter")) {
            cfg.rank = j["adapter"].value("rank", cfg.rank);
        }
        if (j.contains("train")) {
            const auto& tr = j["train"];
            cfg.train.learning_rate = tr.value("learning_rate", 0.1);
            cfg.train.beta = tr.value("beta", 0.8);
            cfg.train.batch_size = tr.value("batch_size", std::size_t{8});
            cfg.train.seed = tr.value("seed", std::uint64_t{0});
            if (tr.contains("edit_alpha")) {
                cfg.train.edit_alpha = tr["edit_alpha"].get<double>();
            }
            const auto& sch = tr.at("schedule");
            if (sch.contains("final_keep") && sch.contains("sparsity")) {
                throw ConfigError("specify either final_keep or sparsity, not both");
            }
            if (sch.contains("sparsity")) {
                cfg.train.schedule.final_keep = 1.0 - sch["sparsity"].get<double>();
            } else {
                cfg.train.schedule.final_keep = sch.value("final_keep", 1.0);
            }
            cfg.train.schedule.warmup_end = sch.value("t_i", std::size_t{0});
            cfg.train.schedule.ramp_end = sch.value("t_f", std::size_t{1});
            cfg.train.schedule.total_steps = sch.value("total_steps", cfg.train.schedule.ramp_end);
            cfg.train.validate();
        } else {
            throw ConfigError("config is missing the train section");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw ConfigError("cannot open config file " + path);
    }
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("cannot parse ") + path + ": " + e.what());
    }
    return parse_config(j);
}

} // namespace roselora
