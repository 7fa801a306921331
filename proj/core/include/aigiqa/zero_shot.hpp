#pragma once

#include "aigiqa/encoder.hpp"
#include "aigiqa/types.hpp"

#include <string>

namespace aigiqa {

struct AntonymPromptPair {
    std::string positive = "Good photo.";
    std::string negative = "Bad photo.";

    /// Throws InvalidConfig unless both prompts are non-empty and distinct.
    void validate() const;
    AntonymPromptPair swapped() const { return {negative, positive}; }
};

/// (x . t) / (|x| |t|); throws ZeroVector if either input is zero.
double cosine_similarity(const Vector & x, const Vector & t);

/// e^s1 / (e^s1 + e^s2), computed as a logistic of the difference.
double antonym_score(double s1, double s2);

/// Score from precomputed features: x the image feature, t_pos/t_neg the two
/// prompt features.
double zero_shot_quality(const Vector & image_feature, const Vector & positive_feature, const Vector & negative_feature);

/// Zero-shot quality of a preprocessed image using the plain (non-learnable)
/// prompt path of the frozen encoder.
double zero_shot_quality(const PixelTensor & image, const AntonymPromptPair & pair, const DualEncoder & encoder);

} // namespace aigiqa
