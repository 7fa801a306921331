#include "aigiqa/ablation.hpp"

#include "aigiqa/error.hpp"
#include "aigiqa/trainer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>

namespace aigiqa {

namespace {

constexpr std::array<const char *, 6> kVariantNames{"full",          "no_regression",   "backbone_swap",
                                                    "context_length", "category_length", "category_type"};
constexpr std::array<const char *, 6> kVariantLabels{"full model",            "without regression",
                                                     "- (backbone)",          "- (context length)",
                                                     "- (category length)",   "- (category type)"};

bool all_numeric(const std::vector<std::string> & words) {
    return std::all_of(words.begin(), words.end(), [](const std::string & w) {
        return !w.empty() && std::all_of(w.begin(), w.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
    });
}

} // namespace

std::string to_string(VariantId id) { return kVariantNames[static_cast<std::size_t>(id)]; }

VariantId variant_from_string(const std::string & name) {
    for (std::size_t i = 0; i < kVariantNames.size(); ++i) {
        if (name == kVariantNames[i]) return static_cast<VariantId>(i);
    }
    throw Error(ErrorCode::InvalidVariantParams, "unknown variant '" + name + "'");
}

int variant_rank(const std::string & name) {
    for (std::size_t i = 0; i < kVariantNames.size(); ++i) {
        if (name == kVariantNames[i]) return static_cast<int>(i);
    }
    return static_cast<int>(kVariantNames.size());
}

std::string variant_label(const std::string & name) {
    const int r = variant_rank(name);
    return r < static_cast<int>(kVariantLabels.size()) ? kVariantLabels[static_cast<std::size_t>(r)] : name;
}

std::vector<std::string> eight_adjectives() {
    return {"horrible", "terrible", "bad", "poor", "average", "good", "excellent", "perfect"};
}

std::vector<std::string> numeric_categories() { return {"1", "2", "3", "4", "5", "6"}; }

void AblationVariant::validate() const {
    const auto fail = [&](const std::string & why) {
        throw Error(ErrorCode::InvalidVariantParams, to_string(id) + ": " + why);
    };
    if (context_length) {
        const int m = *context_length;
        if (m != 8 && m != 16 && m != 32) fail("context length must be 8, 16 or 32, got " + std::to_string(m));
    }
    if (backbone) {
        const auto known = known_backbones();
        if (std::find(known.begin(), known.end(), *backbone) == known.end()) fail("unknown backbone '" + *backbone + "'");
    }
    if (category_words) {
        const auto & w = *category_words;
        if (w.size() < 2) fail("at least two categories are required");
        if (std::set<std::string>(w.begin(), w.end()).size() != w.size()) fail("category words must be distinct");
    }
    switch (id) {
    case VariantId::BackboneSwap:
        if (!backbone) fail("a backbone is required");
        break;
    case VariantId::ContextLength:
        if (!context_length) fail("a context length is required");
        break;
    case VariantId::CategoryLength:
    case VariantId::CategoryType:
        if (!category_words) fail("a category list is required");
        break;
    default:
        break;
    }
}

ExperimentConfig AblationVariant::apply(const ExperimentConfig & base) const {
    validate();
    ExperimentConfig cfg = base;
    cfg.variant = to_string(id);
    if (id == VariantId::NoRegression) {
        cfg.model.scoring = ScoringMode::Similarity;
    }
    if (backbone) cfg.model.backbone = *backbone;
    if (context_length) cfg.model.context_length = *context_length;
    if (category_words) {
        cfg.model.category_words = *category_words;
        cfg.model.category_levels.clear();
    }
    return cfg;
}

std::string describe_setting(const ExperimentConfig & cfg) {
    const auto & words = cfg.model.category_words;
    std::string cats = std::to_string(words.size()) + (all_numeric(words) ? " scores" : " adjectives");
    std::string s = cfg.model.backbone + ", " + std::to_string(cfg.model.context_length) + ", " + cats;
    if (cfg.model.scoring == ScoringMode::Similarity) s += ", similarity";
    return s;
}

std::string AblationVariant::setting(const ExperimentConfig & base) const { return describe_setting(apply(base)); }

std::vector<AblationVariant> AblationVariant::default_matrix() {
    return {
        {VariantId::Full, {}, {}, {}},
        {VariantId::NoRegression, {}, {}, {}},
        {VariantId::BackboneSwap, "ViT-B/32", {}, {}},
        {VariantId::BackboneSwap, "RN101", {}, {}},
        {VariantId::ContextLength, {}, 8, {}},
        {VariantId::ContextLength, {}, 32, {}},
        {VariantId::CategoryLength, {}, {}, eight_adjectives()},
        {VariantId::CategoryType, {}, {}, numeric_categories()},
    };
}

VariantResult run_experiment(const ExperimentConfig & cfg, const DatasetManifest & manifest, const RunOptions & options) {
    cfg.train.validate();
    DatasetManifest raw = manifest.normalized ? denormalize_labels(manifest) : manifest;
    if (raw.count(Split::Test) == 0) {
        raw = make_split(raw, cfg.train.split_ratio, cfg.train.split_seed);
    }
    const DatasetManifest data = normalize_labels(raw);
    const LabelScaler scaler = data.scaler();

    auto encoder = make_encoder(cfg.model.backbone, options.encoder);
    const FeatureSet train_set = extract_features(data, Split::Train, cfg.train.target_dim, *encoder, options.preprocess,
                                                  options.threads);
    const FeatureSet test_set = extract_features(data, Split::Test, cfg.train.target_dim, *encoder, options.preprocess,
                                                 options.threads);

    const std::string hash = config_hash(cfg);
    VariantResult out;
    std::ofstream log;
    if (options.run_root) {
        out.run_dir = *options.run_root / hash;
        std::filesystem::create_directories(out.run_dir);
        log.open(out.run_dir / "train_log.jsonl", options.resume ? std::ios::app : std::ios::trunc);
        if (!log) {
            throw Error(ErrorCode::UnwritablePath, "cannot write '" + (out.run_dir / "train_log.jsonl").string() + "'");
        }
        if (data.split) write_split_sidecar(*data.split, out.run_dir / "split.json");
    }

    const Trainer trainer(encoder, cfg);
    const auto on_epoch = [&](const EpochRecord & rec, const TrainState &) {
        if (log.is_open()) log << to_json(rec).dump() << "\n";
    };
    const TrainState start = options.resume ? *options.resume : trainer.initial_state();
    const TrainResult result = trainer.train(start, train_set, &test_set, scaler, options.stop_epoch, on_epoch,
                                              options.resume ? options.resume_best : std::nullopt);

    const auto report_for = [&](const TrainState & state, const std::string & kind) {
        const Evaluation ev = evaluate(trainer.model(), state.params, test_set, scaler, options.logistic_plcc);
        EvalReport r;
        r.dataset = cfg.dataset;
        r.target_dim = cfg.train.target_dim;
        r.plcc = ev.metrics.plcc;
        r.srcc = ev.metrics.srcc;
        r.krcc = ev.metrics.krcc;
        r.variant = cfg.variant;
        r.setting = describe_setting(cfg);
        r.config_hash = hash;
        r.timestamp = options.timestamp;
        r.checkpoint = kind;
        return r;
    };

    out.last = report_for(result.last, "last");
    if (result.best) out.best = report_for(*result.best, "best");

    if (options.run_root) {
        save_checkpoint(make_checkpoint(cfg, *encoder, scaler, result.last, "last"), out.run_dir / "last.ckpt");
        std::vector<EvalReport> reports{out.last};
        if (result.best) {
            save_checkpoint(make_checkpoint(cfg, *encoder, scaler, *result.best, "best"), out.run_dir / "best.ckpt");
            reports.push_back(*out.best);
        }
        emit_report(reports, ReportFormat::Json, out.run_dir / "report.json");
    }
    return out;
}

VariantResult run_variant(const AblationVariant & variant, const DatasetManifest & manifest,
                          const ExperimentConfig & base, const RunOptions & options) {
    return run_experiment(variant.apply(base), manifest, options);
}

} // namespace aigiqa
