#pragma once

#include "aigiqa/tokenizer.hpp"
#include "aigiqa/types.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace aigiqa {

/// K prompt embedding sequences, each L x embedding_width, laid out as
/// [start][context 1..M][category tokens][end][pad...].
struct PromptEmbeddingBatch {
    std::vector<Matrix> embeddings;
    std::vector<int> eos_positions;
    int context_offset = 1;
    int context_length = 0;

    int size() const { return static_cast<int>(embeddings.size()); }
};

/// Frozen contrastive dual encoder. All methods are const: an encoder never
/// changes after construction, which is what makes it safe to share between
/// a training loop and concurrent evaluators.
class DualEncoder {
public:
    virtual ~DualEncoder() = default;

    virtual std::string backbone() const = 0;
    /// Width of the shared image/text feature space (d).
    virtual int feature_width() const = 0;
    /// Width of token embeddings and therefore of learnable context vectors.
    virtual int embedding_width() const = 0;
    /// Text context window L.
    virtual int context_window() const = 0;
    virtual int image_size() const = 0;
    virtual const WordTokenizer & tokenizer() const = 0;

    virtual Vector token_embedding(int token_id) const = 0;

    /// Feature of prompt k is the projected hidden state at eos_positions[k].
    /// Returns K x feature_width. No finiteness checks here; see encode_text().
    virtual Matrix text_forward(const PromptEmbeddingBatch & batch) const = 0;

    /// Vector-Jacobian product of text_forward: given dLoss/dFeatures (K x d),
    /// returns dLoss/dEmbeddings, one L x embedding_width matrix per prompt.
    virtual std::vector<Matrix> text_backward(const PromptEmbeddingBatch & batch, const Matrix & grad_features) const = 0;

    virtual Vector image_forward(const PixelTensor & image) const = 0;

    /// Digest over every frozen parameter.
    virtual std::string parameter_hash() const = 0;

    virtual bool is_stub() const = 0;
};

/// Shape of a deterministic stub backbone. The stub keeps the real backbone's
/// interface (token table, positional table, eos pooling, projection heads)
/// but every map is a fixed seeded linear map.
struct StubEncoderSpec {
    std::string backbone = "ViT-B/16";
    int feature_width = 512;
    int embedding_width = 512;
    int context_window = 77;
    int vocab_size = 2048;
    int image_size = 224;
    int patch_size = 16;
    std::uint64_t seed = 0;
};

/// Stub layout for one of the known backbone identifiers
/// (ViT-B/16, ViT-B/32, RN101). Throws BackboneUnavailable otherwise.
StubEncoderSpec stub_spec_for(const std::string & backbone);

std::vector<std::string> known_backbones();

class StubDualEncoder final : public DualEncoder {
public:
    explicit StubDualEncoder(StubEncoderSpec spec);

    std::string backbone() const override { return spec_.backbone; }
    int feature_width() const override { return spec_.feature_width; }
    int embedding_width() const override { return spec_.embedding_width; }
    int context_window() const override { return spec_.context_window; }
    int image_size() const override { return spec_.image_size; }
    const WordTokenizer & tokenizer() const override { return tokenizer_; }

    Vector token_embedding(int token_id) const override;
    Matrix text_forward(const PromptEmbeddingBatch & batch) const override;
    std::vector<Matrix> text_backward(const PromptEmbeddingBatch & batch, const Matrix & grad_features) const override;
    Vector image_forward(const PixelTensor & image) const override;
    std::string parameter_hash() const override;
    bool is_stub() const override { return true; }

    const StubEncoderSpec & spec() const { return spec_; }

private:
    StubEncoderSpec spec_;
    WordTokenizer tokenizer_;
    Matrix token_table_;       // vocab x embedding_width
    Matrix positional_;        // L x embedding_width
    Matrix text_projection_;   // embedding_width x feature_width
    Matrix image_projection_;  // (grid*grid*3) x feature_width
    Vector image_bias_;        // feature_width
};

struct EncoderOptions {
    bool stub = false;
    /// Directory holding pretrained weights; defaults to $AIGIQA_WEIGHTS_DIR.
    std::string weights_dir;
};

/// Builds the frozen encoder for a backbone identifier. Pretrained backbones
/// are not bundled with this build, so only `stub = true` succeeds.
std::shared_ptr<const DualEncoder> make_encoder(const std::string & backbone, const EncoderOptions & options);

/// Checked wrappers used by the model and baseline.
Matrix encode_text(const PromptEmbeddingBatch & batch, const DualEncoder & encoder);
Vector encode_image(const PixelTensor & image, const DualEncoder & encoder);

/// Embeds a plain text prompt through the token table ([start] words [end] pad).
PromptEmbeddingBatch embed_plain_prompts(const std::vector<std::string> & prompts, const DualEncoder & encoder);

} // namespace aigiqa
