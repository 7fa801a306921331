#include "aigiqa/ablation.hpp"
#include "aigiqa/checkpoint.hpp"
#include "aigiqa/hashing.hpp"
#include "aigiqa/metrics.hpp"
#include "aigiqa/report.hpp"
#include "aigiqa/synthetic.hpp"
#include "aigiqa/trainer.hpp"
#include "aigiqa/zero_shot.hpp"
#include "oracles.hpp"
#include "process.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

using namespace aigiqa;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char * f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string params_hash(const TrainableParams & p, bool head) {
    Sha256 h;
    if (head) {
        h.update(p.head.w1).update(p.head.b1).update(p.head.w2).update(p.head.b2);
    } else {
        h.update(p.context.vectors);
    }
    return h.hex_digest();
}

// Small values with frequent ties.
std::vector<double> tied_series(std::mt19937_64 & rng, int n) {
    std::uniform_int_distribution<int> level(0, 3);
    std::vector<double> v(n);
    for (auto & x : v) x = level(rng) * 0.5;
    return v;
}

Outcome metric_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> size(3, 8);
    int checked = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 1000 && checked < 300; ++trial) {
        const int n = size(rng);
        const auto x = tied_series(rng, n);
        const auto y = tied_series(rng, n);
        if (oracle::constant(x) || oracle::constant(y)) continue;
        worst = std::max({worst, std::abs(plcc(x, y) - oracle::pearson(x, y)),
                          std::abs(srcc(x, y) - oracle::spearman(x, y)),
                          std::abs(krcc(x, y) - oracle::kendall_tau_b(x, y))});
        ++checked;
    }
    const double t = seconds_since(t0);
    return {checked >= 200 && worst <= 1e-9 && t < 10.0,
            fmt("%d instances, max |delta| %.3g, %.3f s", checked, worst, t)};
}

Outcome metric_invariance() {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(40);
        std::vector<double> y(40);
        for (int i = 0; i < 40; ++i) {
            x[i] = g(rng);
            y[i] = x[i] + g(rng);
        }
        std::vector<double> mx(40);
        std::vector<double> my(40);
        std::vector<double> ax(40);
        for (int i = 0; i < 40; ++i) {
            mx[i] = std::exp(x[i]) + x[i] * x[i] * x[i];
            my[i] = std::atan(y[i]);
            ax[i] = 3.5 * x[i] + 11.0;
        }
        worst = std::max({worst, std::abs(srcc(mx, y) - srcc(x, y)), std::abs(srcc(x, my) - srcc(x, y)),
                          std::abs(krcc(mx, y) - krcc(x, y)), std::abs(krcc(x, my) - krcc(x, y)),
                          std::abs(plcc(ax, y) - plcc(x, y))});
    }
    return {worst <= 1e-12, fmt("100 trials, max |delta| %.3g", worst)};
}

Outcome zero_shot_antisymmetry() {
    const auto enc = make_encoder("ViT-B/16", {true, ""});
    const AntonymPromptPair pair;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const PixelTensor img = random_pixel_tensor(1000 + seed);
        worst = std::max(worst, std::abs(zero_shot_quality(img, pair, *enc) + zero_shot_quality(img, pair.swapped(), *enc) - 1.0));
    }
    const Vector x = encode_image(random_pixel_tensor(5), *enc);
    const Vector t = oracle::random_features(1, enc->feature_width(), 9)[0];
    const double equal = zero_shot_quality(x, t, t);
    return {worst <= 1e-6 && equal == 0.5, fmt("50 images, max |s+s'-1| %.3g, equal case %.17g", worst, equal)};
}

Outcome frozen_partition() {
    const auto enc = make_encoder("ViT-B/16", {true, ""});
    ExperimentConfig cfg;
    const Trainer trainer(enc, cfg);
    const auto feats = oracle::random_features(8, enc->feature_width(), 3, 0.05);
    std::vector<double> targets;
    for (int i = 0; i < 8; ++i) targets.push_back(i / 7.0);
    const std::vector<std::string> ids(8, "x");

    const std::string enc_before = enc->parameter_hash();
    TrainState state = trainer.initial_state();
    const std::string ctx_before = params_hash(state.params, false);
    const std::string head_before = params_hash(state.params, true);
    for (int i = 0; i < 10; ++i) trainer.step(state, feats, targets, 0.002, ids);
    const bool enc_same = enc->parameter_hash() == enc_before;
    const bool ctx_changed = params_hash(state.params, false) != ctx_before;
    const bool head_changed = params_hash(state.params, true) != head_before;
    return {enc_same && ctx_changed && head_changed,
            fmt("encoder unchanged %d, context changed %d, head changed %d", enc_same, ctx_changed, head_changed)};
}

Outcome gradient_check() {
    const auto enc = oracle::tiny_encoder(8);
    ModelConfig mc;
    mc.backbone = enc->backbone();
    mc.context_length = 2;
    mc.category_words = {"bad", "fair", "good"};
    mc.hidden_width = 5;
    mc.context_init_std = 0.5;
    const auto model = QualityModel::initialize(enc, mc, 11);
    const auto feats = oracle::random_features(6, 8, 21);
    const std::vector<double> targets{0.1, 0.9, 0.4, 0.6, 0.3, 0.8};
    const auto rep = oracle::check_gradients(model, feats, targets);
    const double worst = std::max(rep.context_rel_error, rep.head_rel_error);
    return {worst < 1e-4 && rep.checked > 0,
            fmt("%ld entries, context %.3g, head %.3g", rep.checked, rep.context_rel_error, rep.head_rel_error)};
}

Outcome shape_contract() {
    const auto enc = make_encoder("ViT-B/16", {true, ""});
    const auto model = QualityModel::initialize(enc, ModelConfig{}, 0);
    const Vector x = encode_image(random_pixel_tensor(0), *enc);
    const long fused = fuse_features(x, model.text_features()).size();
    bool ok = fused == 3584 && model.params().head.input_width() == 3584;

    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> kd(1, 12);
    std::uniform_int_distribution<int> dd(1, 64);
    for (int i = 0; i < 20; ++i) {
        const int k = kd(rng);
        const int d = dd(rng);
        const Vector img = Vector::Ones(d);
        const Matrix txt = Matrix::Ones(k, d);
        ok = ok && fuse_features(img, txt).size() == static_cast<long>(k + 1) * d;
    }
    return {ok, fmt("default fused width %ld, 20 random (K, d) checked", fused)};
}

Outcome overfit_smoke() {
    const auto t0 = Clock::now();
    const auto enc = make_encoder("ViT-B/16", {true, ""});
    FeatureSet set;
    for (int i = 0; i < 16; ++i) {
        set.features.push_back(encode_image(random_pixel_tensor(100 + i), *enc));
        set.ids.push_back("s" + std::to_string(i));
    }
    // targets produced by an independently initialized model of the same family
    const auto teacher = QualityModel::initialize(enc, ModelConfig{}, 999);
    const auto raw = teacher.predict(set.features);
    const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
    for (double r : raw) set.targets.push_back((r - *lo) / (*hi - *lo));

    ExperimentConfig cfg;
    cfg.train.batch_size = 16;
    cfg.train.epochs = 200;
    cfg.train.eval_interval = cfg.train.epochs;
    const Trainer trainer(enc, cfg);
    const auto res = trainer.train(trainer.initial_state(), set, nullptr, {0.0, 1.0});
    const auto pred = trainer.model().predict(res.last.params, set.features);
    const double mse = mse_loss(pred, set.targets);
    const double rho = srcc(pred, set.targets);
    const double t = seconds_since(t0);
    return {res.last.step == 200 && mse < 0.01 && rho >= 0.99 && t < 60.0,
            fmt("%lld steps, MSE %.5f, SRCC %.4f, %.1f s", static_cast<long long>(res.last.step), mse, rho, t)};
}

Outcome schedule() {
    const TrainConfig cfg;
    const double a = lr_at(0, cfg);
    const double b = lr_at(1, cfg);
    const double mid = lr_at(1.0 + (cfg.epochs - 1) / 2.0, cfg);
    const double last = lr_at(cfg.epochs - 1, cfg);
    const bool ok = a == 1e-5 && b == 0.002 && std::abs(mid - 0.001) <= 1e-12 && last < 2e-6;
    return {ok, fmt("lr(0) %.3g, lr(1) %.3g, midpoint %.15g, final %.3g", a, b, mid, last)};
}

Outcome determinism() {
    oracle::TempDir dir("determinism");
    const auto manifest = write_synthetic_dataset(dir / "data", 24, 17, DatasetProfile::by_name("agiqa-3k"), 64);
    ExperimentConfig cfg;
    cfg.train.epochs = 6;
    cfg.train.batch_size = 8;
    cfg.train.eval_interval = 2;
    RunOptions opt;
    opt.encoder.stub = true;
    opt.timestamp = "2026-01-01T00:00:00Z";
    opt.run_root = dir / "a";
    const auto ra = run_experiment(cfg, manifest, opt);
    opt.run_root = dir / "b";
    opt.threads = 3;
    const auto rb = run_experiment(cfg, manifest, opt);
    int identical = 0;
    for (const char * f : {"last.ckpt", "best.ckpt", "report.json", "train_log.jsonl", "split.json"}) {
        const std::string x = oracle::read_bytes(ra.run_dir / f);
        if (!x.empty() && x == oracle::read_bytes(rb.run_dir / f)) ++identical;
    }
    return {identical == 5, fmt("%d of 5 run artifacts byte-identical", identical)};
}

Outcome cli_round_trip() {
    oracle::TempDir dir("cli");
    const std::string cli = proc::quote(AIGIQA_CLI);
    const auto q = [](const fs::path & p) { return proc::quote(p.string()); };
    const auto synth = proc::run(cli + " synth --out " + q(dir / "data") + " --count 16 --size 48", dir.path());
    const auto train = proc::run(cli + " train --stub-encoder --epochs 3 --batch-size 8 --manifest " +
                                     q(dir / "data" / "manifest.csv") + " --run-root " + q(dir / "runs"),
                                 dir.path());
    if (synth.exit_code != 0 || train.exit_code != 0) {
        return {false, "synth/train exit " + std::to_string(synth.exit_code) + "/" + std::to_string(train.exit_code)};
    }
    const fs::path run = nlohmann::json::parse(train.out).at("run_dir").get<std::string>();
    const auto eval = proc::run(cli + " eval --stub-encoder --checkpoint " + q(run / "last.ckpt") + " --manifest " +
                                    q(dir / "data" / "manifest.csv") + " --format json --out " + q(dir / "eval.json"),
                                dir.path());
    const auto report = proc::run(cli + " report " + q(dir / "eval.json") + " --format csv --out " + q(dir / "r.csv"),
                                  dir.path());
    if (eval.exit_code != 0 || report.exit_code != 0) {
        return {false, "eval/report exit " + std::to_string(eval.exit_code) + "/" + std::to_string(report.exit_code)};
    }
    const auto rows = read_reports(dir / "r.csv");
    const bool finite = rows.size() == 1 && std::isfinite(rows[0].plcc) && std::isfinite(rows[0].srcc) &&
                        std::isfinite(rows[0].krcc);
    return {finite, finite ? fmt("exit 0; PLCC %.4f, SRCC %.4f, KRCC %.4f", rows[0].plcc, rows[0].srcc, rows[0].krcc)
                           : std::string("report lacks three finite metrics")};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"metric oracle equivalence", metric_oracle},
        {"metric invariances", metric_invariance},
        {"zero-shot antisymmetry", zero_shot_antisymmetry},
        {"frozen/trainable partition", frozen_partition},
        {"gradient check", gradient_check},
        {"shape contract", shape_contract},
        {"overfit smoke", overfit_smoke},
        {"learning-rate schedule", schedule},
        {"determinism", determinism},
        {"CLI end-to-end", cli_round_trip},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception & e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("%s criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
