#pragma once

#include "aigiqa/prompt_model.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>

namespace aigiqa {

struct TrainConfig {
    double lr = 0.002;
    int epochs = 100;
    int batch_size = 32;
    int warmup_epochs = 1;
    double warmup_lr = 1e-5;
    double momentum = 0.0;
    std::uint64_t seed = 0;
    int eval_interval = 10;
    std::string target_dim = "quality";
    double split_ratio = 0.8;
    std::uint64_t split_seed = 0;
    /// Hash the frozen encoder every epoch and abort if it ever changes.
    bool verify_frozen = true;

    void validate() const;
};

/// Full description of one run; its hash names the run directory.
struct ExperimentConfig {
    std::string dataset = "agiqa-3k";
    std::string variant = "full";
    ModelConfig model;
    TrainConfig train;
};

nlohmann::json to_json(const ModelConfig & c);
nlohmann::json to_json(const TrainConfig & c);
nlohmann::json to_json(const ExperimentConfig & c);

ModelConfig model_config_from_json(const nlohmann::json & j);
TrainConfig train_config_from_json(const nlohmann::json & j);
ExperimentConfig experiment_config_from_json(const nlohmann::json & j);

/// First 16 hex digits of SHA-256 over the canonical (key-sorted) JSON.
std::string config_hash(const ExperimentConfig & c);

} // namespace aigiqa
