#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace aigiqa {

enum class Split { Train, Test };

std::string to_string(Split s);

struct ImageRecord {
    std::string image;                  // identifier exactly as written in the manifest
    std::filesystem::path image_path;   // resolved against the manifest directory
    double mos = 0.0;
    std::map<std::string, double> aux_scores;
    Split split = Split::Train;

    /// "quality" maps to mos; anything else is looked up in aux_scores.
    double target(const std::string & dim) const;
};

/// Declared label range and target dimensions of a benchmark.
struct DatasetProfile {
    std::string name;
    double label_lo = 0.0;
    double label_hi = 5.0;
    std::vector<std::string> target_dims{"quality"};
    std::optional<std::size_t> expected_records;

    /// "agiqa-3k" (0-5, 2982 images), "aigciqa2023" (0-100, quality +
    /// authenticity) or "generic" (0-5 unless overridden).
    static DatasetProfile by_name(const std::string & name);
};

struct SplitInfo {
    std::uint64_t seed = 0;
    double ratio = 0.8;
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;

    bool operator==(const SplitInfo &) const = default;
};

/// Affine map between a label range and [0, 1].
struct LabelScaler {
    double lo = 0.0;
    double hi = 1.0;

    double normalize(double y) const { return (y - lo) / (hi - lo); }
    double denormalize(double y) const { return lo + y * (hi - lo); }
};

struct DatasetManifest {
    std::string name;
    double label_lo = 0.0;
    double label_hi = 5.0;
    std::vector<std::string> target_dims{"quality"};
    std::vector<ImageRecord> records;
    bool normalized = false;
    std::optional<SplitInfo> split;

    LabelScaler scaler() const { return {label_lo, label_hi}; }
    std::vector<std::size_t> indices(Split s) const;
    std::size_t count(Split s) const { return indices(s).size(); }
};

struct LoadOptions {
    /// Check every image file is readable at load time.
    bool eager_validation = false;
};

/// Reads a CSV manifest with header `image,mos[,authenticity][,split]`.
/// Paths are resolved relative to the manifest's directory.
DatasetManifest load_manifest(const std::filesystem::path & path, const DatasetProfile & profile,
                              const LoadOptions & options = {});

DatasetManifest parse_manifest(std::istream & in, const std::filesystem::path & base_dir, const DatasetProfile & profile,
                               const LoadOptions & options = {});

void write_manifest(const DatasetManifest & manifest, const std::filesystem::path & path);

/// Deterministic shuffled partition: floor(ratio * n) train records, clamped
/// so both sides are non-empty.
DatasetManifest make_split(const DatasetManifest & manifest, double ratio, std::uint64_t seed);

/// Reassigns splits from a recorded sidecar. Every record id must appear on
/// exactly one side.
DatasetManifest apply_split(const DatasetManifest & manifest, const SplitInfo & info);

void write_split_sidecar(const SplitInfo & info, const std::filesystem::path & path);
SplitInfo read_split_sidecar(const std::filesystem::path & path);

/// Maps every target into [0, 1] using the declared label range.
DatasetManifest normalize_labels(const DatasetManifest & manifest);
DatasetManifest denormalize_labels(const DatasetManifest & manifest);

} // namespace aigiqa
