#include "aigiqa/prompt_model.hpp"

#include "aigiqa/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace aigiqa {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Matrix apply_activation(const Matrix & z, Activation a) {
    return a == Activation::Relu ? Matrix(z.cwiseMax(0.0)) : z;
}

Matrix activation_derivative(const Matrix & z, Activation a) {
    if (a == Activation::Identity) {
        return Matrix::Ones(z.rows(), z.cols());
    }
    return (z.array() > 0.0).cast<double>().matrix();
}

Matrix l2_normalize_rows(const Matrix & m) {
    Matrix out = m;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const double n = m.row(r).norm();
        if (n == 0.0) {
            throw Error(ErrorCode::ZeroVector, "cannot L2-normalize a zero feature");
        }
        out.row(r) /= n;
    }
    return out;
}

Vector l2_normalize(const Vector & v) {
    const double n = v.norm();
    if (n == 0.0) {
        throw Error(ErrorCode::ZeroVector, "cannot L2-normalize a zero feature");
    }
    return v / n;
}

// Backprop through row-wise L2 normalization: d(raw) = (g - (g.u)u) / |raw|.
Matrix normalize_rows_backward(const Matrix & raw, const Matrix & grad_normalized) {
    Matrix out(raw.rows(), raw.cols());
    for (Eigen::Index r = 0; r < raw.rows(); ++r) {
        const double n = raw.row(r).norm();
        const Eigen::RowVectorXd u = raw.row(r) / n;
        const double proj = grad_normalized.row(r).dot(u);
        out.row(r) = (grad_normalized.row(r) - proj * u) / n;
    }
    return out;
}

Eigen::RowVectorXd softmax(const Eigen::RowVectorXd & logits) {
    const double mx = logits.maxCoeff();
    Eigen::RowVectorXd e = (logits.array() - mx).exp().matrix();
    return e / e.sum();
}

} // namespace

LearnableContext LearnableContext::gaussian(int length, int width, double stddev, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, stddev);
    LearnableContext ctx;
    ctx.vectors.resize(length, width);
    for (Eigen::Index i = 0; i < ctx.vectors.size(); ++i) {
        ctx.vectors.data()[i] = dist(rng);
    }
    return ctx;
}

std::vector<std::string> QualityCategorySet::default_words() {
    return {"terrible", "bad", "poor", "average", "good", "perfect"};
}

std::vector<double> QualityCategorySet::bin_center_levels(int k) {
    std::vector<double> levels(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        levels[i] = (i + 0.5) / k;
    }
    return levels;
}

QualityCategorySet QualityCategorySet::create(std::vector<std::string> words, std::vector<double> levels,
                                              const WordTokenizer & tokenizer) {
    if (words.empty()) {
        throw Error(ErrorCode::EmptyCategorySet, "no quality categories given");
    }
    if (words.size() < 2) {
        throw Error(ErrorCode::InvalidConfig, "at least two quality categories are required");
    }
    if (std::set<std::string>(words.begin(), words.end()).size() != words.size()) {
        throw Error(ErrorCode::InvalidConfig, "quality category words must be distinct");
    }
    if (levels.empty()) {
        levels = bin_center_levels(static_cast<int>(words.size()));
    }
    if (levels.size() != words.size()) {
        throw Error(ErrorCode::InvalidConfig, "one level per category word is required");
    }
    for (std::size_t i = 1; i < levels.size(); ++i) {
        if (!(levels[i] > levels[i - 1])) {
            throw Error(ErrorCode::InvalidConfig, "category levels must be strictly increasing");
        }
    }
    QualityCategorySet set;
    for (const auto & w : words) {
        auto ids = tokenizer.encode(w);
        if (ids.empty()) {
            throw Error(ErrorCode::InvalidConfig, "category word '" + w + "' has no tokens");
        }
        set.token_ids.push_back(std::move(ids));
    }
    set.words = std::move(words);
    set.levels = std::move(levels);
    return set;
}

std::string to_string(Activation a) { return a == Activation::Relu ? "relu" : "identity"; }

Activation activation_from_string(const std::string & name) {
    if (name == "relu") return Activation::Relu;
    if (name == "identity") return Activation::Identity;
    throw Error(ErrorCode::InvalidConfig, "unknown activation '" + name + "'");
}

std::string to_string(ScoringMode m) { return m == ScoringMode::Regression ? "regression" : "similarity"; }

ScoringMode scoring_mode_from_string(const std::string & name) {
    if (name == "regression") return ScoringMode::Regression;
    if (name == "similarity") return ScoringMode::Similarity;
    throw Error(ErrorCode::InvalidConfig, "unknown scoring mode '" + name + "'");
}

RegressionHead RegressionHead::uniform(int input_width, int hidden_width, Activation activation, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto fill = [&rng](auto & m, double bound) {
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            m.data()[i] = dist(rng);
        }
    };
    RegressionHead head;
    head.activation = activation;
    head.w1.resize(hidden_width, input_width);
    head.b1.resize(hidden_width);
    head.w2.resize(hidden_width);
    const double bound1 = 1.0 / std::sqrt(double(input_width));
    const double bound2 = 1.0 / std::sqrt(double(hidden_width));
    fill(head.w1, bound1);
    fill(head.b1, bound1);
    fill(head.w2, bound2);
    head.b2 = std::uniform_real_distribution<double>(-bound2, bound2)(rng);
    return head;
}

RegressionHead RegressionHead::zeros(int input_width, int hidden_width, Activation activation) {
    RegressionHead head;
    head.activation = activation;
    head.w1 = Matrix::Zero(hidden_width, input_width);
    head.b1 = Vector::Zero(hidden_width);
    head.w2 = Vector::Zero(hidden_width);
    return head;
}

TrainableParams TrainableParams::zeros_like() const {
    TrainableParams z;
    z.context.vectors = Matrix::Zero(context.vectors.rows(), context.vectors.cols());
    z.head = RegressionHead::zeros(head.input_width(), head.hidden_width(), head.activation);
    if (head.empty()) {
        z.head = RegressionHead{};
        z.head.activation = head.activation;
    }
    return z;
}

void TrainableParams::axpy(double scale, const TrainableParams & other) {
    context.vectors += scale * other.context.vectors;
    if (!head.empty()) {
        head.w1 += scale * other.head.w1;
        head.b1 += scale * other.head.b1;
        head.w2 += scale * other.head.w2;
        head.b2 += scale * other.head.b2;
    }
}

bool TrainableParams::all_finite() const {
    return context.vectors.allFinite() && head.w1.allFinite() && head.b1.allFinite() && head.w2.allFinite() &&
           std::isfinite(head.b2);
}

bool TrainableParams::operator==(const TrainableParams & o) const {
    auto same = [](const auto & a, const auto & b) { return a.rows() == b.rows() && a.cols() == b.cols() && a == b; };
    return same(context.vectors, o.context.vectors) && same(head.w1, o.head.w1) && same(head.b1, o.head.b1) &&
           same(head.w2, o.head.w2) && head.b2 == o.head.b2 && head.activation == o.head.activation;
}

PromptEmbeddingBatch assemble_prompts(const LearnableContext & context, const QualityCategorySet & categories,
                                      const DualEncoder & encoder) {
    if (categories.size() == 0) {
        throw Error(ErrorCode::EmptyCategorySet, "no quality categories to assemble");
    }
    const int width = encoder.embedding_width();
    const int window = encoder.context_window();
    const int m = context.length();
    if (m > 0 && context.width() != width) {
        throw Error(ErrorCode::WidthMismatch, "context width " + std::to_string(context.width()) +
                                                  " != token embedding width " + std::to_string(width));
    }
    const int room = window - m - 2;
    const auto & tok = encoder.tokenizer();
    const Vector start = encoder.token_embedding(tok.start_id());
    const Vector end = encoder.token_embedding(tok.end_id());
    const Vector pad = encoder.token_embedding(tok.pad_id());

    PromptEmbeddingBatch batch;
    batch.context_offset = 1;
    batch.context_length = m;
    for (int k = 0; k < categories.size(); ++k) {
        const auto & ids = categories.token_ids[k];
        if (static_cast<int>(ids.size()) > room) {
            throw Error(ErrorCode::CategoryTooLong, "category '" + categories.words[k] + "' needs " +
                                                        std::to_string(ids.size()) + " tokens, " +
                                                        std::to_string(std::max(room, 0)) + " available");
        }
        Matrix emb(window, width);
        int pos = 0;
        emb.row(pos++) = start.transpose();
        if (m > 0) {
            emb.middleRows(pos, m) = context.vectors;
            pos += m;
        }
        for (int id : ids) {
            emb.row(pos++) = encoder.token_embedding(id).transpose();
        }
        batch.eos_positions.push_back(pos);
        emb.row(pos++) = end.transpose();
        for (; pos < window; ++pos) {
            emb.row(pos) = pad.transpose();
        }
        batch.embeddings.push_back(std::move(emb));
    }
    return batch;
}

Vector fuse_features(const Vector & image_feature, const Matrix & text_features) {
    const Eigen::Index d = image_feature.size();
    if (text_features.cols() != d) {
        throw Error(ErrorCode::WidthMismatch, "image feature width " + std::to_string(d) + " != text feature width " +
                                                  std::to_string(text_features.cols()));
    }
    Vector fused(d * (text_features.rows() + 1));
    fused.head(d) = image_feature;
    for (Eigen::Index k = 0; k < text_features.rows(); ++k) {
        fused.segment((k + 1) * d, d) = text_features.row(k).transpose();
    }
    return fused;
}

double predict_score(const Vector & fused, const RegressionHead & head) {
    if (fused.size() != head.input_width()) {
        throw Error(ErrorCode::WidthMismatch, "fused width " + std::to_string(fused.size()) + " != head input " +
                                                  std::to_string(head.input_width()));
    }
    Vector z = head.w1 * fused + head.b1;
    if (head.activation == Activation::Relu) {
        z = z.cwiseMax(0.0);
    }
    const double s = head.w2.dot(z) + head.b2;
    if (!std::isfinite(s)) {
        throw Error(ErrorCode::NonFiniteScore, "predicted score is not finite");
    }
    return s;
}

double mse_loss(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.empty()) {
        throw Error(ErrorCode::EmptyBatch, "mse over an empty batch");
    }
    if (predictions.size() != targets.size()) {
        throw Error(ErrorCode::ShapeMismatch, "prediction/target length mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = predictions[i] - targets[i];
        sum += e * e;
    }
    return sum / double(predictions.size());
}

QualityModel::QualityModel(std::shared_ptr<const DualEncoder> encoder, ModelConfig config, TrainableParams params)
    : encoder_(std::move(encoder)), config_(std::move(config)),
      categories_(QualityCategorySet::create(config_.category_words, config_.category_levels, encoder_->tokenizer())),
      params_(std::move(params)) {
    if (params_.context.length() != config_.context_length) {
        throw Error(ErrorCode::InvalidConfig, "context length " + std::to_string(params_.context.length()) +
                                                  " != configured " + std::to_string(config_.context_length));
    }
    if (config_.context_length > 0 && params_.context.width() != encoder_->embedding_width()) {
        throw Error(ErrorCode::WidthMismatch, "context width does not match the encoder token embedding width");
    }
    if (config_.scoring == ScoringMode::Regression) {
        const int fused = (categories_.size() + 1) * encoder_->feature_width();
        if (params_.head.input_width() != fused || params_.head.hidden_width() != config_.hidden_width) {
            throw Error(ErrorCode::WidthMismatch, "regression head must map " + std::to_string(fused) + " -> " +
                                                      std::to_string(config_.hidden_width) + " -> 1");
        }
    }
}

QualityModel QualityModel::initialize(std::shared_ptr<const DualEncoder> encoder, ModelConfig config, std::uint64_t seed) {
    TrainableParams p;
    p.context = LearnableContext::gaussian(config.context_length, encoder->embedding_width(), config.context_init_std,
                                           splitmix(seed));
    if (config.scoring == ScoringMode::Regression) {
        const int k = static_cast<int>(config.category_words.size());
        p.head = RegressionHead::uniform((k + 1) * encoder->feature_width(), config.hidden_width, config.activation,
                                         splitmix(seed + 1));
    } else {
        p.head.activation = config.activation;
    }
    return QualityModel(std::move(encoder), std::move(config), std::move(p));
}

Matrix QualityModel::text_features(const TrainableParams & params) const {
    return encode_text(assemble_prompts(params.context, categories_, *encoder_), *encoder_);
}

int QualityModel::target_bin(double y) const {
    const int k = categories_.size();
    return std::clamp(static_cast<int>(std::floor(y * k)), 0, k - 1);
}

double QualityModel::score(const TrainableParams & params, const Vector & image_feature,
                           const Matrix & text_features) const {
    if (config_.scoring == ScoringMode::Regression) {
        if (config_.normalize_features) {
            return predict_score(fuse_features(l2_normalize(image_feature), l2_normalize_rows(text_features)),
                                 params.head);
        }
        return predict_score(fuse_features(image_feature, text_features), params.head);
    }
    if (image_feature.size() != text_features.cols()) {
        throw Error(ErrorCode::WidthMismatch, "image/text feature width mismatch");
    }
    const Eigen::RowVectorXd cos = (l2_normalize_rows(text_features) * l2_normalize(image_feature)).transpose();
    const Eigen::RowVectorXd p = softmax(config_.logit_scale * cos);
    double s = 0.0;
    for (int k = 0; k < categories_.size(); ++k) {
        s += p(k) * categories_.levels[k];
    }
    if (!std::isfinite(s)) {
        throw Error(ErrorCode::NonFiniteScore, "similarity read-out is not finite");
    }
    return s;
}

std::vector<double> QualityModel::predict(const TrainableParams & params, std::span<const Vector> image_features) const {
    const Matrix tf = text_features(params);
    std::vector<double> out;
    out.reserve(image_features.size());
    for (const auto & f : image_features) {
        out.push_back(score(params, f, tf));
    }
    return out;
}

std::vector<double> QualityModel::forward(std::span<const PixelTensor> images) const {
    const Matrix tf = text_features();
    std::vector<double> out;
    out.reserve(images.size());
    for (const auto & img : images) {
        out.push_back(score(encode_image(img, *encoder_), tf));
    }
    return out;
}

LossAndGradient QualityModel::loss_and_gradient(const TrainableParams & params, std::span<const Vector> image_features,
                                                std::span<const double> targets) const {
    if (image_features.empty()) {
        throw Error(ErrorCode::EmptyBatch, "loss over an empty batch");
    }
    if (image_features.size() != targets.size()) {
        throw Error(ErrorCode::ShapeMismatch, "feature/target count mismatch");
    }
    const auto n = static_cast<Eigen::Index>(image_features.size());
    const Eigen::Index d = encoder_->feature_width();
    const int k = categories_.size();

    const PromptEmbeddingBatch prompts = assemble_prompts(params.context, categories_, *encoder_);
    const Matrix raw_text = encode_text(prompts, *encoder_);

    LossAndGradient out;
    out.gradient = params.zeros_like();
    Matrix grad_text;  // dLoss / d raw text features, K x d

    if (config_.scoring == ScoringMode::Regression) {
        const bool norm = config_.normalize_features;
        const Matrix text = norm ? l2_normalize_rows(raw_text) : raw_text;
        const RegressionHead & head = params.head;

        Matrix x(n, (k + 1) * d);
        const Eigen::Map<const Eigen::RowVectorXd> text_flat(text.data(), text.size());
        for (Eigen::Index b = 0; b < n; ++b) {
            const Vector & f = image_features[b];
            if (f.size() != d) {
                throw Error(ErrorCode::WidthMismatch, "image feature width mismatch");
            }
            if (norm) {
                x.row(b).head(d) = l2_normalize(f).transpose();
            } else {
                x.row(b).head(d) = f.transpose();
            }
            x.row(b).tail(k * d) = text_flat;
        }
        Matrix z = x * head.w1.transpose();
        z.rowwise() += head.b1.transpose();
        const Matrix h = apply_activation(z, head.activation);
        const Vector s = (h * head.w2).array() + head.b2;
        if (!s.allFinite()) {
            throw Error(ErrorCode::NonFiniteScore, "predicted score is not finite");
        }

        Vector ds(n);
        double loss = 0.0;
        for (Eigen::Index b = 0; b < n; ++b) {
            const double e = s(b) - targets[b];
            loss += e * e;
            ds(b) = 2.0 * e / double(n);
        }
        out.loss = loss / double(n);
        out.predictions.assign(s.data(), s.data() + n);

        RegressionHead & g = out.gradient.head;
        g.w2 = h.transpose() * ds;
        g.b2 = ds.sum();
        const Matrix dz = (ds * head.w2.transpose()).cwiseProduct(activation_derivative(z, head.activation));
        g.w1 = dz.transpose() * x;
        g.b1 = dz.colwise().sum().transpose();

        // Text columns are shared by every row, so their gradient is the
        // column-summed dz through the text block of w1.
        const Eigen::RowVectorXd dtext = dz.colwise().sum() * head.w1.rightCols(k * d);
        Matrix grad_fused_text = Eigen::Map<const Matrix>(dtext.data(), k, d);
        grad_text = norm ? normalize_rows_backward(raw_text, grad_fused_text) : grad_fused_text;
    } else {
        const Matrix text_hat = l2_normalize_rows(raw_text);
        Matrix x_hat(n, d);
        for (Eigen::Index b = 0; b < n; ++b) {
            if (image_features[b].size() != d) {
                throw Error(ErrorCode::WidthMismatch, "image feature width mismatch");
            }
            x_hat.row(b) = l2_normalize(image_features[b]).transpose();
        }
        const Matrix cos = x_hat * text_hat.transpose();  // n x K
        Matrix dlogits(n, k);
        double loss = 0.0;
        out.predictions.resize(n);
        for (Eigen::Index b = 0; b < n; ++b) {
            const Eigen::RowVectorXd p = softmax(config_.logit_scale * cos.row(b));
            const int c = target_bin(targets[b]);
            loss -= std::log(std::max(p(c), 1e-300));
            dlogits.row(b) = p / double(n);
            dlogits(b, c) -= 1.0 / double(n);
            double s = 0.0;
            for (int j = 0; j < k; ++j) {
                s += p(j) * categories_.levels[j];
            }
            out.predictions[b] = s;
        }
        out.loss = loss / double(n);
        const Matrix grad_text_hat = (config_.logit_scale * dlogits).transpose() * x_hat;  // K x d
        grad_text = normalize_rows_backward(raw_text, grad_text_hat);
    }

    if (config_.context_length > 0) {
        const std::vector<Matrix> grad_emb = encoder_->text_backward(prompts, grad_text);
        for (const auto & ge : grad_emb) {
            out.gradient.context.vectors += ge.middleRows(prompts.context_offset, prompts.context_length);
        }
    }
    if (!std::isfinite(out.loss)) {
        throw Error(ErrorCode::NonFiniteScore, "loss is not finite");
    }
    return out;
}

} // namespace aigiqa
