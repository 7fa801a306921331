#pragma once

#include "aigiqa/encoder.hpp"
#include "aigiqa/types.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace aigiqa {

/// M x embedding_width trainable context shared by every prompt.
struct LearnableContext {
    Matrix vectors;

    int length() const { return static_cast<int>(vectors.rows()); }
    int width() const { return static_cast<int>(vectors.cols()); }

    /// Zero-mean Gaussian init.
    static LearnableContext gaussian(int length, int width, double stddev, std::uint64_t seed);
};

struct QualityCategorySet {
    std::vector<std::string> words;
    std::vector<double> levels;
    std::vector<std::vector<int>> token_ids;

    int size() const { return static_cast<int>(words.size()); }

    /// Validates K >= 2, distinct words, strictly increasing levels. Empty
    /// `levels` selects equal-width bin centers over [0, 1].
    static QualityCategorySet create(std::vector<std::string> words, std::vector<double> levels, const WordTokenizer & tokenizer);

    static std::vector<std::string> default_words();
    static std::vector<double> bin_center_levels(int k);
};

enum class Activation { Relu, Identity };

std::string to_string(Activation a);
Activation activation_from_string(const std::string & name);

/// Two affine layers with one nonlinearity in between: in -> hidden -> 1.
struct RegressionHead {
    Matrix w1;  // hidden x in
    Vector b1;  // hidden
    Vector w2;  // hidden
    double b2 = 0.0;
    Activation activation = Activation::Relu;

    int input_width() const { return static_cast<int>(w1.cols()); }
    int hidden_width() const { return static_cast<int>(w1.rows()); }
    bool empty() const { return w1.size() == 0; }

    /// U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases of each layer.
    static RegressionHead uniform(int input_width, int hidden_width, Activation activation, std::uint64_t seed);
    static RegressionHead zeros(int input_width, int hidden_width, Activation activation);
};

enum class ScoringMode {
    Regression,  // fused features -> regression head, MSE loss
    Similarity,  // cosine(image, category) softmax -> expected level, cross-entropy loss
};

std::string to_string(ScoringMode m);
ScoringMode scoring_mode_from_string(const std::string & name);

struct ModelConfig {
    std::string backbone = "ViT-B/16";
    int context_length = 16;
    std::vector<std::string> category_words = QualityCategorySet::default_words();
    std::vector<double> category_levels;  // empty = bin centers
    int hidden_width = 512;
    Activation activation = Activation::Relu;
    bool normalize_features = false;
    ScoringMode scoring = ScoringMode::Regression;
    double logit_scale = 100.0;
    double context_init_std = 0.02;
};

/// Everything the optimizer updates. `head` is empty in similarity mode.
struct TrainableParams {
    LearnableContext context;
    RegressionHead head;

    /// Same shapes, every entry zero.
    TrainableParams zeros_like() const;
    /// this += scale * other
    void axpy(double scale, const TrainableParams & other);
    bool all_finite() const;
    bool operator==(const TrainableParams & other) const;
};

PromptEmbeddingBatch assemble_prompts(const LearnableContext & context, const QualityCategorySet & categories,
                                      const DualEncoder & encoder);

/// [image_feature, text_features.row(0), ..., text_features.row(K-1)]
Vector fuse_features(const Vector & image_feature, const Matrix & text_features);

double predict_score(const Vector & fused, const RegressionHead & head);

double mse_loss(std::span<const double> predictions, std::span<const double> targets);

struct LossAndGradient {
    double loss = 0.0;
    TrainableParams gradient;
    std::vector<double> predictions;
};

class QualityModel {
public:
    QualityModel(std::shared_ptr<const DualEncoder> encoder, ModelConfig config, TrainableParams params);

    /// Fresh context and head drawn from `seed`.
    static QualityModel initialize(std::shared_ptr<const DualEncoder> encoder, ModelConfig config, std::uint64_t seed);

    const ModelConfig & config() const { return config_; }
    const QualityCategorySet & categories() const { return categories_; }
    const DualEncoder & encoder() const { return *encoder_; }
    std::shared_ptr<const DualEncoder> encoder_ptr() const { return encoder_; }
    const TrainableParams & params() const { return params_; }
    TrainableParams & params() { return params_; }

    /// F_p for the current context (K x d).
    Matrix text_features() const { return text_features(params_); }
    Matrix text_features(const TrainableParams & params) const;

    /// Score of one image in normalized label space given precomputed F_p.
    double score(const Vector & image_feature, const Matrix & text_features) const {
        return score(params_, image_feature, text_features);
    }
    double score(const TrainableParams & params, const Vector & image_feature, const Matrix & text_features) const;

    std::vector<double> predict(std::span<const Vector> image_features) const { return predict(params_, image_features); }
    std::vector<double> predict(const TrainableParams & params, std::span<const Vector> image_features) const;

    /// Encodes every image (text features once, shared by the batch) and scores it.
    std::vector<double> forward(std::span<const PixelTensor> images) const;

    /// Mean loss over the batch (MSE or cross-entropy depending on scoring
    /// mode) and its exact gradient w.r.t. the trainable parameters.
    LossAndGradient loss_and_gradient(std::span<const Vector> image_features, std::span<const double> targets) const {
        return loss_and_gradient(params_, image_features, targets);
    }
    /// Same computation for an externally owned parameter set with the
    /// shapes of params().
    LossAndGradient loss_and_gradient(const TrainableParams & params, std::span<const Vector> image_features,
                                      std::span<const double> targets) const;

    /// Category index for a normalized target (equal-width bins over [0, 1]).
    int target_bin(double normalized_target) const;

private:
    std::shared_ptr<const DualEncoder> encoder_;
    ModelConfig config_;
    QualityCategorySet categories_;
    TrainableParams params_;
};

} // namespace aigiqa
