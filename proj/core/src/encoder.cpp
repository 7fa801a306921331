#include "aigiqa/encoder.hpp"

#include "aigiqa/error.hpp"
#include "aigiqa/hashing.hpp"

#include <cmath>
#include <cstdlib>
#include <random>

namespace aigiqa {

namespace {

Matrix gaussian(std::mt19937_64 & rng, Eigen::Index rows, Eigen::Index cols, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = dist(rng);
    }
    return m;
}

std::uint64_t seed_from_name(const std::string & name) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

std::vector<std::string> known_backbones() { return {"ViT-B/16", "ViT-B/32", "RN101"}; }

StubEncoderSpec stub_spec_for(const std::string & backbone) {
    StubEncoderSpec spec;
    spec.backbone = backbone;
    spec.seed = seed_from_name(backbone);
    if (backbone == "ViT-B/16") {
        spec.patch_size = 16;
    } else if (backbone == "ViT-B/32") {
        spec.patch_size = 32;
    } else if (backbone == "RN101") {
        spec.patch_size = 8;
    } else {
        throw Error(ErrorCode::BackboneUnavailable, "unknown backbone '" + backbone + "'");
    }
    return spec;
}

StubDualEncoder::StubDualEncoder(StubEncoderSpec spec) : spec_(std::move(spec)), tokenizer_(spec_.vocab_size) {
    if (spec_.feature_width <= 0 || spec_.embedding_width <= 0 || spec_.context_window < 3 || spec_.patch_size <= 0 ||
        spec_.image_size % spec_.patch_size != 0) {
        throw Error(ErrorCode::InvalidConfig, "invalid stub encoder spec for " + spec_.backbone);
    }
    std::mt19937_64 rng(spec_.seed);
    const int grid = spec_.image_size / spec_.patch_size;
    const int patch_inputs = grid * grid * 3;
    token_table_ = gaussian(rng, spec_.vocab_size, spec_.embedding_width, 0.02);
    positional_ = gaussian(rng, spec_.context_window, spec_.embedding_width, 0.01);
    text_projection_ = gaussian(rng, spec_.embedding_width, spec_.feature_width, 1.0 / std::sqrt(double(spec_.embedding_width)));
    image_projection_ = gaussian(rng, patch_inputs, spec_.feature_width, 1.0 / std::sqrt(double(patch_inputs)));
    image_bias_ = gaussian(rng, spec_.feature_width, 1, 0.1).col(0);
}

Vector StubDualEncoder::token_embedding(int token_id) const {
    if (token_id < 0 || token_id >= spec_.vocab_size) {
        throw Error(ErrorCode::ShapeMismatch, "token id out of range: " + std::to_string(token_id));
    }
    return token_table_.row(token_id).transpose();
}

// Hidden state at position j is the causal mean of (embedding + position)
// over positions 0..j; the feature is that state at the end token, projected.
Matrix StubDualEncoder::text_forward(const PromptEmbeddingBatch & batch) const {
    Matrix out(batch.size(), spec_.feature_width);
    for (int k = 0; k < batch.size(); ++k) {
        const Matrix & emb = batch.embeddings[k];
        if (emb.rows() != spec_.context_window || emb.cols() != spec_.embedding_width) {
            throw Error(ErrorCode::ShapeMismatch, "prompt embedding must be " + std::to_string(spec_.context_window) + "x" +
                                                      std::to_string(spec_.embedding_width));
        }
        const int eos = batch.eos_positions[k];
        if (eos < 0 || eos >= spec_.context_window) {
            throw Error(ErrorCode::ShapeMismatch, "eos position out of window");
        }
        const Eigen::RowVectorXd pooled =
            (emb.topRows(eos + 1) + positional_.topRows(eos + 1)).colwise().sum() / double(eos + 1);
        out.row(k) = pooled * text_projection_;
    }
    return out;
}

std::vector<Matrix> StubDualEncoder::text_backward(const PromptEmbeddingBatch & batch, const Matrix & grad_features) const {
    std::vector<Matrix> grads;
    grads.reserve(batch.size());
    for (int k = 0; k < batch.size(); ++k) {
        const int eos = batch.eos_positions[k];
        Matrix g = Matrix::Zero(spec_.context_window, spec_.embedding_width);
        const Eigen::RowVectorXd per_position = (grad_features.row(k) * text_projection_.transpose()) / double(eos + 1);
        g.topRows(eos + 1).rowwise() = per_position;
        grads.push_back(std::move(g));
    }
    return grads;
}

Vector StubDualEncoder::image_forward(const PixelTensor & image) const {
    if (image.channels != 3 || image.height != spec_.image_size || image.width != spec_.image_size) {
        throw Error(ErrorCode::ShapeMismatch, "expected 3x" + std::to_string(spec_.image_size) + "x" +
                                                  std::to_string(spec_.image_size) + " input, got " +
                                                  std::to_string(image.channels) + "x" + std::to_string(image.height) +
                                                  "x" + std::to_string(image.width));
    }
    const int p = spec_.patch_size;
    const int grid = spec_.image_size / p;
    Eigen::RowVectorXd patches(grid * grid * 3);
    for (int c = 0; c < 3; ++c) {
        for (int gy = 0; gy < grid; ++gy) {
            for (int gx = 0; gx < grid; ++gx) {
                double sum = 0.0;
                for (int y = gy * p; y < (gy + 1) * p; ++y) {
                    for (int x = gx * p; x < (gx + 1) * p; ++x) {
                        sum += image.at(c, y, x);
                    }
                }
                patches((c * grid + gy) * grid + gx) = sum / double(p * p);
            }
        }
    }
    return (patches * image_projection_).transpose() + image_bias_;
}

std::string StubDualEncoder::parameter_hash() const {
    Sha256 h;
    h.update(spec_.backbone);
    h.update(token_table_).update(positional_).update(text_projection_).update(image_projection_).update(image_bias_);
    return h.hex_digest();
}

std::shared_ptr<const DualEncoder> make_encoder(const std::string & backbone, const EncoderOptions & options) {
    if (options.stub) {
        return std::make_shared<StubDualEncoder>(stub_spec_for(backbone));
    }
    std::string dir = options.weights_dir;
    if (dir.empty()) {
        if (const char * env = std::getenv("AIGIQA_WEIGHTS_DIR")) {
            dir = env;
        }
    }
    throw Error(ErrorCode::BackboneUnavailable,
                "pretrained weights for '" + backbone + "' cannot be loaded by this build" +
                    (dir.empty() ? std::string() : " (weights dir: " + dir + ")") + "; use the stub encoder");
}

Matrix encode_text(const PromptEmbeddingBatch & batch, const DualEncoder & encoder) {
    Matrix features = encoder.text_forward(batch);
    if (!all_finite(features)) {
        throw Error(ErrorCode::NonFiniteFeature, "text features contain NaN/Inf");
    }
    return features;
}

Vector encode_image(const PixelTensor & image, const DualEncoder & encoder) {
    Vector feature = encoder.image_forward(image);
    if (!all_finite(feature)) {
        throw Error(ErrorCode::NonFiniteFeature, "image feature contains NaN/Inf");
    }
    return feature;
}

PromptEmbeddingBatch embed_plain_prompts(const std::vector<std::string> & prompts, const DualEncoder & encoder) {
    const auto & tok = encoder.tokenizer();
    const int window = encoder.context_window();
    PromptEmbeddingBatch batch;
    const Vector pad = encoder.token_embedding(tok.pad_id());
    for (const auto & text : prompts) {
        std::vector<int> ids{tok.start_id()};
        for (int id : tok.encode(text)) {
            ids.push_back(id);
        }
        ids.push_back(tok.end_id());
        if (static_cast<int>(ids.size()) > window) {
            throw Error(ErrorCode::CategoryTooLong, "prompt '" + text + "' exceeds the context window");
        }
        Matrix emb(window, encoder.embedding_width());
        for (int j = 0; j < window; ++j) {
            emb.row(j) = (j < static_cast<int>(ids.size()) ? encoder.token_embedding(ids[j]) : pad).transpose();
        }
        batch.embeddings.push_back(std::move(emb));
        batch.eos_positions.push_back(static_cast<int>(ids.size()) - 1);
    }
    batch.context_length = 0;
    return batch;
}

} // namespace aigiqa
