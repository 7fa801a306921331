#pragma once

#include "aigiqa/config.hpp"
#include "aigiqa/encoder.hpp"
#include "aigiqa/trainer.hpp"

#include <filesystem>
#include <memory>
#include <string>

namespace aigiqa {

/// Everything needed to resume or serve a run. Encoder weights are never
/// stored: only the backbone identifier and the digest of its parameters,
/// which is re-validated on load.
struct Checkpoint {
    ExperimentConfig config;
    std::string config_hash;
    std::string backbone;
    std::string encoder_hash;
    bool stub_encoder = true;
    double label_lo = 0.0;
    double label_hi = 1.0;
    std::string kind = "last";  // "last" or "best"
    TrainState state;

    std::vector<std::string> category_words() const { return config.model.category_words; }
    LabelScaler scaler() const { return {label_lo, label_hi}; }
};

Checkpoint make_checkpoint(const ExperimentConfig & config, const DualEncoder & encoder, const LabelScaler & scaler,
                           const TrainState & state, const std::string & kind = "last");

/// Single binary archive: 8-byte magic, u32 version, u64 header length, JSON
/// header (metadata + tensor table), then little-endian float64 tensor data.
void save_checkpoint(const Checkpoint & ckpt, const std::filesystem::path & path);
Checkpoint load_checkpoint(const std::filesystem::path & path);

/// Rebuilds the frozen encoder named by the checkpoint and verifies its
/// parameter digest. Throws BackboneMismatch on a digest mismatch.
std::shared_ptr<const DualEncoder> restore_encoder(const Checkpoint & ckpt, EncoderOptions options = {});

/// Model with the checkpoint's trained parameters.
QualityModel restore_model(const Checkpoint & ckpt, std::shared_ptr<const DualEncoder> encoder);

} // namespace aigiqa
