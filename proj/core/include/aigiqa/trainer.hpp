#pragma once

#include "aigiqa/config.hpp"
#include "aigiqa/dataset.hpp"
#include "aigiqa/image.hpp"
#include "aigiqa/metrics.hpp"
#include "aigiqa/prompt_model.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace aigiqa {

/// Per-epoch learning rate: constant warmup_lr during warm-up, then cosine
/// annealing from lr towards 0 over the remaining epochs. Non-integer epochs
/// evaluate the same closed form.
double lr_at(double epoch, const TrainConfig & cfg);

/// Image features and normalized targets of one split, in manifest order.
struct FeatureSet {
    std::vector<Vector> features;
    std::vector<double> targets;
    std::vector<std::string> ids;

    std::size_t size() const { return features.size(); }
};

/// Preprocesses and encodes the records of `split`, spreading work over
/// `threads` workers (0 = hardware concurrency). Output order is the
/// manifest order regardless of thread count. `manifest` must be normalized.
FeatureSet extract_features(const DatasetManifest & manifest, Split split, const std::string & target_dim,
                            const DualEncoder & encoder, const PreprocessSpec & spec = {}, unsigned threads = 0);

struct TrainState {
    int epoch = 0;
    std::int64_t step = 0;
    TrainableParams params;
    TrainableParams velocity;
    std::string rng_state;

    bool operator==(const TrainState &) const = default;
};

struct EpochRecord {
    int epoch = 0;
    double lr = 0.0;
    double loss = 0.0;
    std::optional<Correlations> metrics;
};

nlohmann::json to_json(const EpochRecord & r);

struct TrainResult {
    TrainState last;
    std::optional<TrainState> best;
    double best_srcc = 0.0;
    std::vector<EpochRecord> history;
};

struct Evaluation {
    Correlations metrics;
    std::vector<double> predictions;  // denormalized
    std::vector<double> targets;      // denormalized
};

/// Correlations of denormalized predictions against denormalized targets.
Evaluation evaluate_predictions(std::span<const double> normalized_predictions, std::span<const double> normalized_targets,
                                const LabelScaler & scaler, bool logistic_plcc = false);

Evaluation evaluate(const QualityModel & model, const TrainableParams & params, const FeatureSet & test,
                    const LabelScaler & scaler, bool logistic_plcc = false);

/// Single-writer SGD loop over {context, head}. The encoder is never
/// written; with verify_frozen its hash is re-checked every epoch.
class Trainer {
public:
    using EpochCallback = std::function<void(const EpochRecord &, const TrainState &)>;

    Trainer(std::shared_ptr<const DualEncoder> encoder, ExperimentConfig config);

    const ExperimentConfig & config() const { return config_; }
    const QualityModel & model() const { return model_; }

    TrainState initial_state() const;

    /// Runs epochs [start.epoch, stop_epoch) (stop_epoch < 0 means cfg.epochs)
    /// and evaluates on `test` every eval_interval epochs and after the last.
    /// `prior_best` carries the best state of an interrupted run into best tracking.
    TrainResult train(TrainState start, const FeatureSet & train_set, const FeatureSet * test_set,
                      const LabelScaler & scaler, int stop_epoch = -1, const EpochCallback & on_epoch = {},
                      const std::optional<TrainState> & prior_best = std::nullopt) const;

    /// One SGD step on a batch; returns the batch loss.
    double step(TrainState & state, std::span<const Vector> features, std::span<const double> targets, double lr,
                const std::vector<std::string> & batch_ids) const;

private:
    std::shared_ptr<const DualEncoder> encoder_;
    ExperimentConfig config_;
    QualityModel model_;
};

} // namespace aigiqa
