#include "aigiqa/config.hpp"

#include "aigiqa/error.hpp"
#include "aigiqa/hashing.hpp"

namespace aigiqa {

void TrainConfig::validate() const {
    auto fail = [](const std::string & what) { throw Error(ErrorCode::InvalidConfig, what); };
    if (!(lr > 0.0)) fail("lr must be > 0");
    if (!(warmup_lr > 0.0)) fail("warmup_lr must be > 0");
    if (epochs < 0) fail("epochs must be >= 0");
    if (warmup_epochs < 0) fail("warmup_epochs must be >= 0");
    if (epochs > 0 && warmup_epochs >= epochs) fail("warmup_epochs must be < epochs");
    if (batch_size < 1) fail("batch_size must be >= 1");
    if (momentum < 0.0 || momentum >= 1.0) fail("momentum must lie in [0, 1)");
    if (eval_interval < 1) fail("eval_interval must be >= 1");
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) fail("split_ratio must lie in (0, 1)");
}

nlohmann::json to_json(const ModelConfig & c) {
    return {
        {"backbone", c.backbone},
        {"context_length", c.context_length},
        {"category_words", c.category_words},
        {"category_levels", c.category_levels},
        {"hidden_width", c.hidden_width},
        {"activation", to_string(c.activation)},
        {"normalize_features", c.normalize_features},
        {"scoring", to_string(c.scoring)},
        {"logit_scale", c.logit_scale},
        {"context_init_std", c.context_init_std},
    };
}

nlohmann::json to_json(const TrainConfig & c) {
    return {
        {"lr", c.lr},
        {"epochs", c.epochs},
        {"batch_size", c.batch_size},
        {"warmup_epochs", c.warmup_epochs},
        {"warmup_lr", c.warmup_lr},
        {"momentum", c.momentum},
        {"seed", c.seed},
        {"eval_interval", c.eval_interval},
        {"target_dim", c.target_dim},
        {"split_ratio", c.split_ratio},
        {"split_seed", c.split_seed},
        {"verify_frozen", c.verify_frozen},
    };
}

nlohmann::json to_json(const ExperimentConfig & c) {
    return {{"dataset", c.dataset}, {"variant", c.variant}, {"model", to_json(c.model)}, {"train", to_json(c.train)}};
}

ModelConfig model_config_from_json(const nlohmann::json & j) {
    ModelConfig c;
    c.backbone = j.at("backbone").get<std::string>();
    c.context_length = j.at("context_length").get<int>();
    c.category_words = j.at("category_words").get<std::vector<std::string>>();
    c.category_levels = j.at("category_levels").get<std::vector<double>>();
    c.hidden_width = j.at("hidden_width").get<int>();
    c.activation = activation_from_string(j.at("activation").get<std::string>());
    c.normalize_features = j.at("normalize_features").get<bool>();
    c.scoring = scoring_mode_from_string(j.at("scoring").get<std::string>());
    c.logit_scale = j.at("logit_scale").get<double>();
    c.context_init_std = j.at("context_init_std").get<double>();
    return c;
}

TrainConfig train_config_from_json(const nlohmann::json & j) {
    TrainConfig c;
    c.lr = j.at("lr").get<double>();
    c.epochs = j.at("epochs").get<int>();
    c.batch_size = j.at("batch_size").get<int>();
    c.warmup_epochs = j.at("warmup_epochs").get<int>();
    c.warmup_lr = j.at("warmup_lr").get<double>();
    c.momentum = j.at("momentum").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.eval_interval = j.at("eval_interval").get<int>();
    c.target_dim = j.at("target_dim").get<std::string>();
    c.split_ratio = j.at("split_ratio").get<double>();
    c.split_seed = j.at("split_seed").get<std::uint64_t>();
    c.verify_frozen = j.at("verify_frozen").get<bool>();
    return c;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json & j) {
    try {
        ExperimentConfig c;
        c.dataset = j.at("dataset").get<std::string>();
        c.variant = j.at("variant").get<std::string>();
        c.model = model_config_from_json(j.at("model"));
        c.train = train_config_from_json(j.at("train"));
        return c;
    } catch (const nlohmann::json::exception & e) {
        throw Error(ErrorCode::InvalidConfig, std::string("malformed experiment config: ") + e.what());
    }
}

std::string config_hash(const ExperimentConfig & c) {
    return sha256_hex(to_json(c).dump()).substr(0, 16);
}

} // namespace aigiqa
