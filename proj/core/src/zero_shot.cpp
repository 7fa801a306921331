#include "aigiqa/zero_shot.hpp"

#include "aigiqa/error.hpp"

#include <algorithm>
#include <cmath>

namespace aigiqa {

void AntonymPromptPair::validate() const {
    if (positive.empty() || negative.empty()) {
        throw Error(ErrorCode::InvalidConfig, "antonym prompts must be non-empty");
    }
    if (positive == negative) {
        throw Error(ErrorCode::InvalidConfig, "antonym prompts must differ");
    }
}

double cosine_similarity(const Vector & x, const Vector & t) {
    if (x.size() != t.size()) {
        throw Error(ErrorCode::WidthMismatch, "cosine of vectors with different widths");
    }
    const double nx = x.norm();
    const double nt = t.norm();
    if (nx == 0.0 || nt == 0.0) {
        throw Error(ErrorCode::ZeroVector, "cosine similarity of a zero vector");
    }
    return std::clamp(x.dot(t) / (nx * nt), -1.0, 1.0);
}

double antonym_score(double s1, double s2) {
    // identical to the two-way softmax; exact 0.5 when s1 == s2
    return 1.0 / (1.0 + std::exp(s2 - s1));
}

double zero_shot_quality(const Vector & image_feature, const Vector & positive_feature, const Vector & negative_feature) {
    return antonym_score(cosine_similarity(image_feature, positive_feature),
                         cosine_similarity(image_feature, negative_feature));
}

double zero_shot_quality(const PixelTensor & image, const AntonymPromptPair & pair, const DualEncoder & encoder) {
    pair.validate();
    const Matrix text = encode_text(embed_plain_prompts({pair.positive, pair.negative}, encoder), encoder);
    const Vector x = encode_image(image, encoder);
    return zero_shot_quality(x, text.row(0).transpose(), text.row(1).transpose());
}

} // namespace aigiqa
