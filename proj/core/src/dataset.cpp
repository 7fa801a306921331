#include "aigiqa/dataset.hpp"

#include "aigiqa/error.hpp"

#include "csv.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace aigiqa {

namespace {

using csv::format_number;
using csv::trim;

double parse_number(const std::string & text, std::size_t line_no, const std::string & column) {
    double value = 0.0;
    const auto t = trim(text);
    if (!csv::parse_number(t, value) || !std::isfinite(value)) {
        throw Error(ErrorCode::MalformedManifest,
                    "line " + std::to_string(line_no) + ": column '" + column + "' is not a number: '" + t + "'");
    }
    return value;
}

void check_range(double v, const DatasetManifest & m, std::size_t line_no, const std::string & column) {
    if (v < m.label_lo || v > m.label_hi) {
        throw Error(ErrorCode::OutOfRangeLabel, "line " + std::to_string(line_no) + ": " + column + " = " +
                                                    format_number(v) + " outside [" + format_number(m.label_lo) +
                                                    ", " + format_number(m.label_hi) + "] for " + m.name);
    }
}

} // namespace

std::string to_string(Split s) { return s == Split::Train ? "train" : "test"; }

double ImageRecord::target(const std::string & dim) const {
    if (dim == "quality" || dim == "mos") {
        return mos;
    }
    const auto it = aux_scores.find(dim);
    if (it == aux_scores.end()) {
        throw Error(ErrorCode::MissingColumn, "record '" + image + "' has no '" + dim + "' score");
    }
    return it->second;
}

DatasetProfile DatasetProfile::by_name(const std::string & name) {
    DatasetProfile p;
    p.name = name;
    if (name == "agiqa-3k") {
        p.label_lo = 0.0;
        p.label_hi = 5.0;
        p.expected_records = 2982;
    } else if (name == "aigciqa2023") {
        p.label_lo = 0.0;
        p.label_hi = 100.0;
        p.target_dims = {"quality", "authenticity"};
    } else if (name != "generic") {
        throw Error(ErrorCode::InvalidConfig, "unknown dataset profile '" + name + "'");
    }
    return p;
}

std::vector<std::size_t> DatasetManifest::indices(Split s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].split == s) {
            out.push_back(i);
        }
    }
    return out;
}

DatasetManifest parse_manifest(std::istream & in, const std::filesystem::path & base_dir, const DatasetProfile & profile,
                               const LoadOptions & options) {
    if (!(profile.label_hi > profile.label_lo)) {
        throw Error(ErrorCode::ZeroRange, "profile '" + profile.name + "' has an empty label range");
    }
    DatasetManifest m;
    m.name = profile.name;
    m.label_lo = profile.label_lo;
    m.label_hi = profile.label_hi;
    m.target_dims = profile.target_dims;

    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::MissingColumn, "manifest is empty; expected header image,mos[,authenticity]");
    }
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
        line.erase(0, 3);  // UTF-8 BOM
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = csv::split_line(line);
    for (auto & h : header) h = trim(h);

    auto column = [&](const std::string & name) -> std::optional<std::size_t> {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto image_col = column("image");
    const auto mos_col = column("mos");
    if (!image_col) throw Error(ErrorCode::MissingColumn, "manifest lacks an 'image' column");
    if (!mos_col) throw Error(ErrorCode::MissingColumn, "manifest lacks a 'mos' column");
    std::map<std::string, std::size_t> aux_cols;
    for (const auto & dim : profile.target_dims) {
        if (dim == "quality") continue;
        const auto c = column(dim);
        if (!c) {
            throw Error(ErrorCode::MissingColumn, "profile '" + profile.name + "' requires a '" + dim + "' column");
        }
        aux_cols[dim] = *c;
    }
    if (const auto c = column("authenticity"); c && !aux_cols.contains("authenticity")) {
        aux_cols["authenticity"] = *c;
    }
    const auto split_col = column("split");

    std::set<std::string> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = csv::split_line(line);
        if (fields.size() < header.size()) {
            throw Error(ErrorCode::MalformedManifest, "line " + std::to_string(line_no) + " has " +
                                                          std::to_string(fields.size()) + " fields, header has " +
                                                          std::to_string(header.size()));
        }
        ImageRecord r;
        r.image = trim(fields[*image_col]);
        if (r.image.empty()) {
            throw Error(ErrorCode::MalformedManifest, "line " + std::to_string(line_no) + ": empty image path");
        }
        if (!seen.insert(r.image).second) {
            throw Error(ErrorCode::DuplicateRecord, "line " + std::to_string(line_no) + ": duplicate image '" + r.image + "'");
        }
        r.image_path = std::filesystem::path(r.image).is_absolute() ? std::filesystem::path(r.image) : base_dir / r.image;
        r.mos = parse_number(fields[*mos_col], line_no, "mos");
        check_range(r.mos, m, line_no, "mos");
        for (const auto & [dim, col] : aux_cols) {
            const double v = parse_number(fields[col], line_no, dim);
            check_range(v, m, line_no, dim);
            r.aux_scores[dim] = v;
        }
        if (split_col) {
            const auto s = trim(fields[*split_col]);
            if (s == "train") {
                r.split = Split::Train;
            } else if (s == "test") {
                r.split = Split::Test;
            } else {
                throw Error(ErrorCode::MalformedManifest, "line " + std::to_string(line_no) + ": split must be train|test");
            }
        }
        if (options.eager_validation) {
            std::ifstream probe(r.image_path, std::ios::binary);
            if (!probe || probe.peek() == std::ifstream::traits_type::eof()) {
                throw Error(ErrorCode::UnreadableImage, "cannot read image '" + r.image_path.string() + "'");
            }
        }
        m.records.push_back(std::move(r));
    }
    return m;
}

DatasetManifest load_manifest(const std::filesystem::path & path, const DatasetProfile & profile,
                              const LoadOptions & options) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::MalformedManifest, "cannot open manifest '" + path.string() + "'");
    }
    return parse_manifest(in, path.parent_path(), profile, options);
}

void write_manifest(const DatasetManifest & manifest, const std::filesystem::path & path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::UnwritablePath, "cannot write '" + path.string() + "'");
    }
    std::vector<std::string> aux;
    if (!manifest.records.empty()) {
        for (const auto & [k, v] : manifest.records.front().aux_scores) aux.push_back(k);
    }
    out << "image,mos";
    for (const auto & a : aux) out << ',' << a;
    out << ",split\n";
    for (const auto & r : manifest.records) {
        out << csv::quote(r.image) << ',' << format_number(r.mos);
        for (const auto & a : aux) out << ',' << format_number(r.aux_scores.at(a));
        out << ',' << to_string(r.split) << '\n';
    }
}

DatasetManifest make_split(const DatasetManifest & manifest, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "split ratio must lie in (0, 1)");
    }
    const std::size_t n = manifest.records.size();
    if (n < 2) {
        throw Error(ErrorCode::EmptySplit, "cannot split " + std::to_string(n) + " record(s) into two non-empty sides");
    }
    auto n_train = static_cast<std::size_t>(std::floor(ratio * double(n) + 1e-9));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    // Fisher-Yates with raw engine output keeps the permutation identical
    // across standard library implementations.
    std::mt19937_64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(order[i], order[j]);
    }

    DatasetManifest out = manifest;
    SplitInfo info;
    info.seed = seed;
    info.ratio = ratio;
    std::vector<bool> is_train(n, false);
    for (std::size_t i = 0; i < n_train; ++i) is_train[order[i]] = true;
    for (std::size_t i = 0; i < n; ++i) {
        out.records[i].split = is_train[i] ? Split::Train : Split::Test;
        (is_train[i] ? info.train_ids : info.test_ids).push_back(out.records[i].image);
    }
    out.split = std::move(info);
    return out;
}

DatasetManifest apply_split(const DatasetManifest & manifest, const SplitInfo & info) {
    std::map<std::string, Split> assignment;
    for (const auto & id : info.train_ids) assignment[id] = Split::Train;
    for (const auto & id : info.test_ids) {
        if (!assignment.emplace(id, Split::Test).second) {
            throw Error(ErrorCode::MalformedManifest, "split lists '" + id + "' on both sides");
        }
    }
    DatasetManifest out = manifest;
    for (auto & r : out.records) {
        const auto it = assignment.find(r.image);
        if (it == assignment.end()) {
            throw Error(ErrorCode::MalformedManifest, "split does not assign '" + r.image + "'");
        }
        r.split = it->second;
    }
    if (assignment.size() != out.records.size()) {
        throw Error(ErrorCode::MalformedManifest, "split lists records missing from the manifest");
    }
    out.split = info;
    return out;
}

void write_split_sidecar(const SplitInfo & info, const std::filesystem::path & path) {
    nlohmann::json j;
    j["seed"] = info.seed;
    j["ratio"] = info.ratio;
    j["train_ids"] = info.train_ids;
    j["test_ids"] = info.test_ids;
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::UnwritablePath, "cannot write '" + path.string() + "'");
    }
    out << j.dump(2) << '\n';
}

SplitInfo read_split_sidecar(const std::filesystem::path & path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::MalformedManifest, "cannot open split sidecar '" + path.string() + "'");
    }
    try {
        const auto j = nlohmann::json::parse(in);
        SplitInfo info;
        info.seed = j.at("seed").get<std::uint64_t>();
        info.ratio = j.at("ratio").get<double>();
        info.train_ids = j.at("train_ids").get<std::vector<std::string>>();
        info.test_ids = j.at("test_ids").get<std::vector<std::string>>();
        return info;
    } catch (const nlohmann::json::exception & e) {
        throw Error(ErrorCode::MalformedManifest, "bad split sidecar '" + path.string() + "': " + e.what());
    }
}

DatasetManifest normalize_labels(const DatasetManifest & manifest) {
    if (!(manifest.label_hi > manifest.label_lo)) {
        throw Error(ErrorCode::ZeroRange, "label range of '" + manifest.name + "' is empty");
    }
    if (manifest.normalized) {
        return manifest;
    }
    const LabelScaler s = manifest.scaler();
    DatasetManifest out = manifest;
    for (auto & r : out.records) {
        r.mos = s.normalize(r.mos);
        for (auto & [k, v] : r.aux_scores) v = s.normalize(v);
    }
    out.normalized = true;
    return out;
}

DatasetManifest denormalize_labels(const DatasetManifest & manifest) {
    if (!manifest.normalized) {
        return manifest;
    }
    const LabelScaler s = manifest.scaler();
    DatasetManifest out = manifest;
    for (auto & r : out.records) {
        r.mos = s.denormalize(r.mos);
        for (auto & [k, v] : r.aux_scores) v = s.denormalize(v);
    }
    out.normalized = false;
    return out;
}

} // namespace aigiqa
