#pragma once

// Independent reference implementations used only by tests. Everything here
// is written from the textbook definitions, deliberately O(n^2), and shares
// no code with the library.

#include "aigiqa/encoder.hpp"
#include "aigiqa/prompt_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace oracle {

inline double mean(const std::vector<double> & v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double pearson(const std::vector<double> & x, const std::vector<double> & y) {
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

// rank_i = 1 + #{j : x_j < x_i} + (#{j : x_j == x_i} - 1) / 2
inline std::vector<double> fractional_ranks(const std::vector<double> & x) {
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double less = 0.0;
        double equal = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (x[j] < x[i]) less += 1.0;
            if (x[j] == x[i]) equal += 1.0;
        }
        r[i] = 1.0 + less + (equal - 1.0) / 2.0;
    }
    return r;
}

inline double spearman(const std::vector<double> & x, const std::vector<double> & y) {
    return pearson(fractional_ranks(x), fractional_ranks(y));
}

// Kendall tau-b by enumerating every pair.
inline double kendall_tau_b(const std::vector<double> & x, const std::vector<double> & y) {
    double concordant = 0.0;
    double discordant = 0.0;
    double ties_x = 0.0;
    double ties_y = 0.0;
    double pairs = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            pairs += 1.0;
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx == 0.0) ties_x += 1.0;
            if (dy == 0.0) ties_y += 1.0;
            if (dx == 0.0 || dy == 0.0) continue;
            if ((dx > 0) == (dy > 0)) {
                concordant += 1.0;
            } else {
                discordant += 1.0;
            }
        }
    }
    return (concordant - discordant) / std::sqrt((pairs - ties_x) * (pairs - ties_y));
}

inline bool constant(const std::vector<double> & v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

// Small stub encoder for gradient and shape checks (fixed seeded linear maps).
inline std::shared_ptr<const aigiqa::DualEncoder> tiny_encoder(int width, int window = 16, std::uint64_t seed = 7) {
    aigiqa::StubEncoderSpec spec;
    spec.backbone = "tiny-" + std::to_string(width);
    spec.feature_width = width;
    spec.embedding_width = width;
    spec.context_window = window;
    spec.vocab_size = 64;
    spec.image_size = 32;
    spec.patch_size = 16;
    spec.seed = seed;
    return std::make_shared<aigiqa::StubDualEncoder>(spec);
}

inline std::vector<aigiqa::Vector> random_features(int n, int width, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, scale);
    std::vector<aigiqa::Vector> out;
    for (int i = 0; i < n; ++i) {
        aigiqa::Vector v(width);
        for (int k = 0; k < width; ++k) v(k) = g(rng);
        out.push_back(v);
    }
    return out;
}

// Calls fn(pointer, count) for every trainable tensor, context first.
inline void for_each_tensor(aigiqa::TrainableParams & p, const std::function<void(const char *, double *, long)> & fn) {
    fn("context", p.context.vectors.data(), static_cast<long>(p.context.vectors.size()));
    if (p.head.empty()) return;
    fn("head.w1", p.head.w1.data(), static_cast<long>(p.head.w1.size()));
    fn("head.b1", p.head.b1.data(), static_cast<long>(p.head.b1.size()));
    fn("head.w2", p.head.w2.data(), static_cast<long>(p.head.w2.size()));
    fn("head.b2", &p.head.b2, 1);
}

struct GradientReport {
    double context_rel_error = 0.0;
    double head_rel_error = 0.0;
    double max_abs_gradient = 0.0;
    long checked = 0;
};

// Central differences of the model loss against its analytic gradient.
// Relative error per entry is |a - n| / max(|a|, |n|, floor).
inline GradientReport check_gradients(const aigiqa::QualityModel & model, const std::vector<aigiqa::Vector> & feats,
                                      const std::vector<double> & targets, double h = 1e-6, double floor = 1e-6) {
    const aigiqa::TrainableParams base = model.params();
    const auto analytic = model.loss_and_gradient(base, feats, targets).gradient;

    aigiqa::TrainableParams probe = base;
    aigiqa::TrainableParams grad = analytic;
    std::vector<std::pair<double *, long>> probe_tensors;
    std::vector<std::pair<double *, long>> grad_tensors;
    std::vector<std::string> names;
    for_each_tensor(probe, [&](const char * name, double * p, long n) {
        probe_tensors.emplace_back(p, n);
        names.emplace_back(name);
    });
    for_each_tensor(grad, [&](const char *, double * p, long n) { grad_tensors.emplace_back(p, n); });

    GradientReport rep;
    for (std::size_t t = 0; t < probe_tensors.size(); ++t) {
        auto [p, n] = probe_tensors[t];
        const double * g = grad_tensors[t].first;
        for (long i = 0; i < n; ++i) {
            const double saved = p[i];
            p[i] = saved + h;
            const double up = model.loss_and_gradient(probe, feats, targets).loss;
            p[i] = saved - h;
            const double down = model.loss_and_gradient(probe, feats, targets).loss;
            p[i] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double a = g[i];
            const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
            double & slot = names[t] == "context" ? rep.context_rel_error : rep.head_rel_error;
            slot = std::max(slot, rel);
            rep.max_abs_gradient = std::max(rep.max_abs_gradient, std::abs(a));
            ++rep.checked;
        }
    }
    return rep;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string & tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("aigiqa-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir &) = delete;
    TempDir & operator=(const TempDir &) = delete;

    const std::filesystem::path & path() const { return path_; }
    std::filesystem::path operator/(const std::string & name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_bytes(const std::filesystem::path & p) {
    std::FILE * f = std::fopen(p.c_str(), "rb");
    if (!f) return {};
    std::string out;
    char buf[65536];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) out.append(buf, n);
    std::fclose(f);
    return out;
}

} // namespace oracle
