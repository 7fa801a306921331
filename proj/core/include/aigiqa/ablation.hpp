#pragma once

#include "aigiqa/checkpoint.hpp"
#include "aigiqa/config.hpp"
#include "aigiqa/dataset.hpp"
#include "aigiqa/encoder.hpp"
#include "aigiqa/image.hpp"
#include "aigiqa/report.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace aigiqa {

enum class VariantId { Full, NoRegression, BackboneSwap, ContextLength, CategoryLength, CategoryType };

std::string to_string(VariantId id);
VariantId variant_from_string(const std::string & name);
/// Position of a variant name in the canonical ordering; unknown names sort last.
int variant_rank(const std::string & name);
/// Row label used in the ablation table ("full model", "without regression", ...).
std::string variant_label(const std::string & name);

/// "horrible" below "terrible" and "excellent" below "perfect".
std::vector<std::string> eight_adjectives();
/// "1" .. "6".
std::vector<std::string> numeric_categories();

/// One row of the ablation matrix: a variant id plus the setting it changes.
/// Unset fields keep the base configuration.
struct AblationVariant {
    VariantId id = VariantId::Full;
    std::optional<std::string> backbone;
    std::optional<int> context_length;
    std::optional<std::vector<std::string>> category_words;

    /// Throws InvalidVariantParams when the parameters do not fit the id
    /// (e.g. context length outside {8, 16, 32}).
    void validate() const;

    /// Complete runnable configuration derived from `base`.
    ExperimentConfig apply(const ExperimentConfig & base) const;

    /// "ViT-B/16, 16, 6 adjectives" style description of the applied config.
    std::string setting(const ExperimentConfig & base) const;

    /// Full model, no regression, ViT-B/32, RN101, context 8, context 32,
    /// 8 adjectives, 6 numeric scores.
    static std::vector<AblationVariant> default_matrix();
};

std::string describe_setting(const ExperimentConfig & cfg);

struct RunOptions {
    EncoderOptions encoder;
    PreprocessSpec preprocess;
    /// When set, the run writes checkpoints, the training log, the split
    /// sidecar and its report under run_root / config_hash.
    std::optional<std::filesystem::path> run_root;
    std::string timestamp;
    bool logistic_plcc = false;
    unsigned threads = 0;
    /// Continue from this state instead of a fresh initialization. The
    /// training log is appended to rather than truncated.
    std::optional<TrainState> resume;
    /// Best-by-SRCC state of the interrupted run, kept unless a later evaluation beats it.
    std::optional<TrainState> resume_best;
    /// Stop after this epoch instead of cfg.train.epochs (negative = run to the end).
    int stop_epoch = -1;
};

struct VariantResult {
    EvalReport last;
    std::optional<EvalReport> best;
    std::filesystem::path run_dir;
};

/// Trains and evaluates one configuration on a manifest with raw labels. If
/// the manifest has no test records it is split with cfg.train.split_ratio /
/// split_seed first.
VariantResult run_experiment(const ExperimentConfig & cfg, const DatasetManifest & manifest, const RunOptions & options);

VariantResult run_variant(const AblationVariant & variant, const DatasetManifest & manifest,
                          const ExperimentConfig & base, const RunOptions & options);

} // namespace aigiqa
