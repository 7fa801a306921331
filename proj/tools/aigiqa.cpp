#include "aigiqa/ablation.hpp"
#include "aigiqa/checkpoint.hpp"
#include "aigiqa/error.hpp"
#include "aigiqa/metrics.hpp"
#include "aigiqa/synthetic.hpp"
#include "aigiqa/trainer.hpp"
#include "aigiqa/zero_shot.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace aigiqa;
namespace fs = std::filesystem;

namespace {

struct ModelFlags {
    std::string categories;
    std::string activation = "relu";
    std::string scoring = "regression";
};

void add_experiment_flags(CLI::App & cmd, ExperimentConfig & cfg, ModelFlags & mf) {
    cmd.add_option("--dataset", cfg.dataset, "Dataset profile: agiqa-3k, aigciqa2023 or generic")->capture_default_str();
    cmd.add_option("--backbone", cfg.model.backbone, "Frozen encoder backbone")->capture_default_str();
    cmd.add_option("--context-length", cfg.model.context_length, "Learnable context tokens per prompt")
        ->capture_default_str();
    cmd.add_option("--categories", mf.categories, "Comma-separated quality category words");
    cmd.add_option("--hidden", cfg.model.hidden_width, "Regression head hidden width")->capture_default_str();
    cmd.add_option("--activation", mf.activation, "Head activation: relu or identity")->capture_default_str();
    cmd.add_option("--scoring", mf.scoring, "regression or similarity")->capture_default_str();
    cmd.add_flag("--normalize-features", cfg.model.normalize_features, "L2-normalize features before fusion");
    cmd.add_option("--lr", cfg.train.lr, "Peak learning rate")->capture_default_str();
    cmd.add_option("--epochs", cfg.train.epochs, "Training epochs")->capture_default_str();
    cmd.add_option("--batch-size", cfg.train.batch_size, "Minibatch size")->capture_default_str();
    cmd.add_option("--warmup-epochs", cfg.train.warmup_epochs, "Constant warm-up epochs")->capture_default_str();
    cmd.add_option("--warmup-lr", cfg.train.warmup_lr, "Warm-up learning rate")->capture_default_str();
    cmd.add_option("--momentum", cfg.train.momentum, "SGD momentum")->capture_default_str();
    cmd.add_option("--seed", cfg.train.seed, "Initialization and shuffling seed")->capture_default_str();
    cmd.add_option("--eval-interval", cfg.train.eval_interval, "Evaluate every N epochs")->capture_default_str();
    cmd.add_option("--target-dim", cfg.train.target_dim, "quality or authenticity")->capture_default_str();
    cmd.add_option("--split-ratio", cfg.train.split_ratio, "Train fraction when the manifest has no split")
        ->capture_default_str();
    cmd.add_option("--split-seed", cfg.train.split_seed, "Seed of the train/test partition")->capture_default_str();
}

std::vector<std::string> split_commas(const std::string & text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void finish_config(ExperimentConfig & cfg, const ModelFlags & mf) {
    if (!mf.categories.empty()) cfg.model.category_words = split_commas(mf.categories);
    cfg.model.activation = activation_from_string(mf.activation);
    cfg.model.scoring = scoring_mode_from_string(mf.scoring);
    if (cfg.model.scoring == ScoringMode::Similarity && cfg.variant == "full") cfg.variant = "no_regression";
    cfg.train.validate();
}

DatasetManifest load_dataset(const fs::path & manifest, const std::string & dataset) {
    return load_manifest(manifest, DatasetProfile::by_name(dataset));
}

std::string render(const std::vector<EvalReport> & reports, ReportFormat fmt) {
    switch (fmt) {
    case ReportFormat::Csv: return render_csv(reports);
    case ReportFormat::Markdown: return render_markdown(reports);
    default: return render_json(reports);
    }
}

void output_reports(const std::vector<EvalReport> & reports, const std::string & format, const std::string & out) {
    const ReportFormat fmt = report_format_from_string(format);
    if (fmt == ReportFormat::Plot) {
        if (out.empty() || out == "-") throw Error(ErrorCode::InvalidConfig, "--format plot needs --out");
        emit_report(reports, fmt, out);
        return;
    }
    if (reports.empty()) throw Error(ErrorCode::EmptyReportList, "no reports to emit");
    if (out.empty() || out == "-") {
        std::cout << render(reports, fmt);
    } else {
        emit_report(reports, fmt, out);
    }
}

struct TrainArgs {
    ExperimentConfig cfg;
    ModelFlags mf;
    std::string manifest;
    std::string run_root = "runs";
    std::string resume;
    std::string timestamp;
    int stop_epoch = -1;
    bool stub = false;
    bool logistic = false;
    unsigned threads = 0;
};

int cmd_train(TrainArgs & a) {
    RunOptions opt;
    opt.encoder.stub = a.stub;
    opt.run_root = fs::path(a.run_root);
    opt.timestamp = a.timestamp.empty() ? utc_timestamp() : a.timestamp;
    opt.logistic_plcc = a.logistic;
    opt.threads = a.threads;
    opt.stop_epoch = a.stop_epoch;

    ExperimentConfig cfg = a.cfg;
    if (!a.resume.empty()) {
        const Checkpoint ck = load_checkpoint(a.resume);
        cfg = ck.config;
        opt.encoder.stub = opt.encoder.stub || ck.stub_encoder;
        opt.resume = ck.state;
        const fs::path best = fs::path(a.resume).parent_path() / "best.ckpt";
        if (fs::exists(best)) {
            const Checkpoint bk = load_checkpoint(best);
            if (bk.config_hash == ck.config_hash && bk.state.epoch <= ck.state.epoch) opt.resume_best = bk.state;
        }
    } else {
        finish_config(cfg, a.mf);
    }
    DatasetManifest data = load_dataset(a.manifest, cfg.dataset);
    const fs::path sidecar = fs::path(a.run_root) / config_hash(cfg) / "split.json";
    if (opt.resume && data.count(Split::Test) == 0 && fs::exists(sidecar)) {
        data = apply_split(data, read_split_sidecar(sidecar));
    }
    const VariantResult res = run_experiment(cfg, data, opt);
    nlohmann::json out = {{"run_dir", res.run_dir.string()}, {"last", to_json(res.last)}};
    if (res.best) out["best"] = to_json(*res.best);
    std::cout << out.dump(2) << "\n";
    return 0;
}

struct EvalArgs {
    std::string checkpoint;
    std::string manifest;
    std::string split_file;
    std::string format = "json";
    std::string out;
    std::string timestamp;
    bool stub = false;
    bool logistic = false;
    bool all = false;
    unsigned threads = 0;
};

int cmd_eval(const EvalArgs & a) {
    const Checkpoint ck = load_checkpoint(a.checkpoint);
    EncoderOptions eo;
    eo.stub = a.stub;
    auto encoder = restore_encoder(ck, eo);
    const QualityModel model = restore_model(ck, encoder);

    DatasetManifest data = load_dataset(a.manifest, ck.config.dataset);
    data.label_lo = ck.label_lo;
    data.label_hi = ck.label_hi;
    fs::path sidecar = a.split_file;
    if (sidecar.empty()) {
        const fs::path beside = fs::path(a.checkpoint).parent_path() / "split.json";
        if (fs::exists(beside)) sidecar = beside;
    }
    if (a.all) {
        for (auto & r : data.records) r.split = Split::Test;
    } else if (!sidecar.empty()) {
        data = apply_split(data, read_split_sidecar(sidecar));
    } else if (data.count(Split::Test) == 0) {
        data = make_split(data, ck.config.train.split_ratio, ck.config.train.split_seed);
    }
    const DatasetManifest norm = normalize_labels(data);
    const FeatureSet test = extract_features(norm, Split::Test, ck.config.train.target_dim, *encoder, {}, a.threads);
    const Evaluation ev = evaluate(model, ck.state.params, test, ck.scaler(), a.logistic);

    EvalReport r;
    r.dataset = ck.config.dataset;
    r.target_dim = ck.config.train.target_dim;
    r.plcc = ev.metrics.plcc;
    r.srcc = ev.metrics.srcc;
    r.krcc = ev.metrics.krcc;
    r.variant = ck.config.variant;
    r.setting = describe_setting(ck.config);
    r.config_hash = ck.config_hash;
    r.timestamp = a.timestamp.empty() ? utc_timestamp() : a.timestamp;
    r.checkpoint = ck.kind;
    output_reports({r}, a.format, a.out);
    return 0;
}

struct ScoreArgs {
    std::string mode = "tuned";
    std::string checkpoint;
    std::string backbone = "ViT-B/16";
    std::string positive = "Good photo.";
    std::string negative = "Bad photo.";
    std::vector<std::string> images;
    bool stub = false;
};

int cmd_score(const ScoreArgs & a) {
    if (a.mode == "zero-shot") {
        EncoderOptions eo;
        eo.stub = a.stub;
        auto encoder = make_encoder(a.backbone, eo);
        const AntonymPromptPair pair{a.positive, a.negative};
        pair.validate();
        for (const auto & img : a.images) {
            const double s = zero_shot_quality(preprocess_image(img), pair, *encoder);
            std::cout << img << " " << nlohmann::json(s).dump() << "\n";
        }
        return 0;
    }
    if (a.mode != "tuned") throw Error(ErrorCode::InvalidConfig, "--mode must be tuned or zero-shot");
    if (a.checkpoint.empty()) throw Error(ErrorCode::InvalidConfig, "--mode tuned needs --checkpoint");
    const Checkpoint ck = load_checkpoint(a.checkpoint);
    EncoderOptions eo;
    eo.stub = a.stub;
    auto encoder = restore_encoder(ck, eo);
    const QualityModel model = restore_model(ck, encoder);
    const Matrix text = model.text_features();
    const LabelScaler scaler = ck.scaler();
    for (const auto & img : a.images) {
        const Vector f = encode_image(preprocess_image(img), *encoder);
        const double s = scaler.denormalize(model.score(f, text));
        std::cout << img << " " << nlohmann::json(s).dump() << "\n";
    }
    return 0;
}

struct AblateArgs {
    ExperimentConfig cfg;
    ModelFlags mf;
    std::string manifest;
    std::string run_root = "runs";
    std::string format = "markdown";
    std::string out;
    std::string timestamp;
    std::vector<std::string> variants;
    int jobs = 1;
    bool stub = false;
    bool logistic = false;
    bool include_best = false;
};

int cmd_ablate(AblateArgs & a) {
    ExperimentConfig base = a.cfg;
    finish_config(base, a.mf);
    DatasetManifest data = load_dataset(a.manifest, base.dataset);
    if (data.count(Split::Test) == 0) data = make_split(data, base.train.split_ratio, base.train.split_seed);

    std::vector<AblationVariant> matrix;
    for (const auto & v : AblationVariant::default_matrix()) {
        if (a.variants.empty() ||
            std::find(a.variants.begin(), a.variants.end(), to_string(v.id)) != a.variants.end()) {
            matrix.push_back(v);
        }
    }
    for (const auto & v : matrix) v.validate();

    RunOptions opt;
    opt.encoder.stub = a.stub;
    opt.run_root = fs::path(a.run_root);
    opt.timestamp = a.timestamp.empty() ? utc_timestamp() : a.timestamp;
    opt.logistic_plcc = a.logistic;

    std::vector<EvalReport> reports;
    if (a.jobs <= 1) {
        for (const auto & v : matrix) {
            const VariantResult r = run_variant(v, data, base, opt);
            reports.push_back(r.last);
            if (a.include_best && r.best) reports.push_back(*r.best);
        }
    } else {
        // Each variant runs in its own process; results are collected from
        // the per-run report files so no state is shared between workers.
        opt.threads = 1;
        std::size_t next = 0;
        int running = 0;
        bool failed = false;
        while (next < matrix.size() || running > 0) {
            while (running < a.jobs && next < matrix.size()) {
                const pid_t pid = fork();
                if (pid < 0) throw Error(ErrorCode::InvalidConfig, "fork failed");
                if (pid == 0) {
                    int code = 0;
                    try {
                        run_variant(matrix[next], data, base, opt);
                    } catch (const std::exception & e) {
                        std::cerr << e.what() << "\n";
                        code = 1;
                    }
                    std::fflush(nullptr);
                    _exit(code);
                }
                ++next;
                ++running;
            }
            int status = 0;
            if (wait(&status) > 0) {
                --running;
                if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) failed = true;
            }
        }
        if (failed) throw Error(ErrorCode::InvalidConfig, "one or more ablation workers failed");
        for (const auto & v : matrix) {
            const fs::path file = fs::path(a.run_root) / config_hash(v.apply(base)) / "report.json";
            for (const auto & r : read_reports(file)) {
                if (r.checkpoint == "last" || a.include_best) reports.push_back(r);
            }
        }
    }
    output_reports(ordered_by_variant(reports), a.format, a.out);
    return 0;
}

int cmd_metrics(const std::string & input, bool logistic) {
    std::ifstream in(input);
    if (!in) throw Error(ErrorCode::MalformedManifest, "cannot read '" + input + "'");
    std::vector<double> pred;
    std::vector<double> mos;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::string a;
        std::string b;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        try {
            std::size_t pa = 0;
            std::size_t pb = 0;
            const double x = std::stod(a, &pa);
            const double y = std::stod(b, &pb);
            pred.push_back(x);
            mos.push_back(y);
        } catch (const std::exception &) {
            if (line_no == 1) continue;  // header
            throw Error(ErrorCode::MalformedManifest, "line " + std::to_string(line_no) + ": expected two numbers");
        }
    }
    const Correlations c = correlations(pred, mos, logistic);
    std::printf("PLCC %.6f\nSRCC %.6f\nKRCC %.6f\n", c.plcc, c.srcc, c.krcc);
    return 0;
}

int cmd_report(const std::vector<std::string> & inputs, const std::string & format, const std::string & out) {
    std::vector<EvalReport> reports;
    for (const auto & in : inputs) {
        for (auto & r : read_reports(in)) reports.push_back(std::move(r));
    }
    output_reports(ordered_by_variant(reports), format, out);
    return 0;
}

int cmd_synth(const std::string & out, std::size_t count, std::uint64_t seed, const std::string & dataset, int size) {
    const DatasetManifest m = write_synthetic_dataset(out, count, seed, DatasetProfile::by_name(dataset), size);
    std::cout << (fs::path(out) / "manifest.csv").string() << " (" << m.records.size() << " records)\n";
    return 0;
}

int run(int argc, char ** argv) {
    CLI::App app{"Quality assessment for generated images with learnable prompts"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "aigiqa 0.1.0");

    TrainArgs ta;
    auto * train = app.add_subcommand("train", "Train one configuration and write its run directory");
    add_experiment_flags(*train, ta.cfg, ta.mf);
    train->add_option("--manifest", ta.manifest, "CSV manifest (image,mos[,authenticity][,split])")->required();
    train->add_option("--run-root", ta.run_root, "Directory receiving <config-hash>/ run folders")->capture_default_str();
    train->add_option("--resume", ta.resume, "Continue from a checkpoint (its config wins)");
    train->add_option("--stop-epoch", ta.stop_epoch, "Stop after this epoch");
    train->add_option("--timestamp", ta.timestamp, "Timestamp recorded in reports");
    train->add_option("--threads", ta.threads, "Feature extraction workers (0 = all cores)");
    train->add_flag("--stub-encoder", ta.stub, "Use the deterministic stub encoder");
    train->add_flag("--logistic", ta.logistic, "Report PLCC after a 4-parameter logistic fit");

    EvalArgs ea;
    auto * eval = app.add_subcommand("eval", "Evaluate a checkpoint on the test split of a manifest");
    eval->add_option("--checkpoint", ea.checkpoint, "Checkpoint file")->required();
    eval->add_option("--manifest", ea.manifest, "CSV manifest")->required();
    eval->add_option("--split-file", ea.split_file, "Split sidecar JSON (defaults to split.json beside the checkpoint)");
    eval->add_option("--format", ea.format, "json, csv, markdown or plot")->capture_default_str();
    eval->add_option("--out", ea.out, "Output path (stdout when omitted)");
    eval->add_option("--timestamp", ea.timestamp, "Timestamp recorded in the report");
    eval->add_option("--threads", ea.threads, "Feature extraction workers");
    eval->add_flag("--stub-encoder", ea.stub, "Use the deterministic stub encoder");
    eval->add_flag("--logistic", ea.logistic, "Report PLCC after a 4-parameter logistic fit");
    eval->add_flag("--all", ea.all, "Evaluate every record instead of the test split");

    ScoreArgs sa;
    auto * score = app.add_subcommand("score", "Predict quality scores for images");
    score->add_option("--mode", sa.mode, "tuned or zero-shot")->capture_default_str();
    score->add_option("--checkpoint", sa.checkpoint, "Checkpoint for tuned mode");
    score->add_option("--backbone", sa.backbone, "Backbone for zero-shot mode")->capture_default_str();
    score->add_option("--positive", sa.positive, "Positive prompt for zero-shot mode")->capture_default_str();
    score->add_option("--negative", sa.negative, "Negative prompt for zero-shot mode")->capture_default_str();
    score->add_option("images", sa.images, "Image files")->required();
    score->add_flag("--stub-encoder", sa.stub, "Use the deterministic stub encoder");

    AblateArgs aa;
    auto * ablate = app.add_subcommand("ablate", "Run the ablation matrix and tabulate the results");
    add_experiment_flags(*ablate, aa.cfg, aa.mf);
    ablate->add_option("--manifest", aa.manifest, "CSV manifest")->required();
    ablate->add_option("--run-root", aa.run_root, "Directory receiving run folders")->capture_default_str();
    ablate->add_option("--format", aa.format, "json, csv, markdown or plot")->capture_default_str();
    ablate->add_option("--out", aa.out, "Output path (stdout when omitted)");
    ablate->add_option("--timestamp", aa.timestamp, "Timestamp recorded in reports");
    ablate->add_option("--variants", aa.variants, "Restrict to these variant ids")->delimiter(',');
    ablate->add_option("--jobs", aa.jobs, "Variants trained in parallel processes")->capture_default_str();
    ablate->add_flag("--stub-encoder", aa.stub, "Use the deterministic stub encoder");
    ablate->add_flag("--logistic", aa.logistic, "Report PLCC after a 4-parameter logistic fit");
    ablate->add_flag("--include-best", aa.include_best, "Also list best-by-SRCC checkpoints");

    std::string metrics_input;
    bool metrics_logistic = false;
    auto * metrics = app.add_subcommand("metrics", "PLCC/SRCC/KRCC of a two-column CSV (predicted,subjective)");
    metrics->add_option("input", metrics_input, "CSV file")->required();
    metrics->add_flag("--logistic", metrics_logistic, "Fit a 4-parameter logistic before PLCC");

    std::vector<std::string> report_inputs;
    std::string report_format = "markdown";
    std::string report_out;
    auto * report = app.add_subcommand("report", "Merge report files into one table or plot");
    report->add_option("inputs", report_inputs, "report.json or .csv files")->required();
    report->add_option("--format", report_format, "json, csv, markdown or plot")->capture_default_str();
    report->add_option("--out", report_out, "Output path (stdout when omitted)");

    std::string synth_out;
    std::size_t synth_count = 32;
    std::uint64_t synth_seed = 0;
    std::string synth_dataset = "agiqa-3k";
    int synth_size = 96;
    auto * synth = app.add_subcommand("synth", "Write a small synthetic dataset for smoke tests");
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->add_option("--count", synth_count, "Number of images")->capture_default_str();
    synth->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();
    synth->add_option("--dataset", synth_dataset, "Profile giving the label range")->capture_default_str();
    synth->add_option("--size", synth_size, "Image side length")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError & e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (*train) return cmd_train(ta);
    if (*eval) return cmd_eval(ea);
    if (*score) return cmd_score(sa);
    if (*ablate) return cmd_ablate(aa);
    if (*metrics) return cmd_metrics(metrics_input, metrics_logistic);
    if (*report) return cmd_report(report_inputs, report_format, report_out);
    if (*synth) return cmd_synth(synth_out, synth_count, synth_seed, synth_dataset, synth_size);
    return 2;
}

} // namespace

int main(int argc, char ** argv) {
    try {
        return run(argc, argv);
    } catch (const Error & e) {
        std::cerr << nlohmann::json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump() << "\n";
        return 1;
    } catch (const std::exception & e) {
        std::cerr << nlohmann::json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
}
