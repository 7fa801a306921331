#include "aigiqa/trainer.hpp"

#include "aigiqa/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace aigiqa {

namespace {

std::string save_rng(const std::mt19937_64 & rng) {
    std::ostringstream os;
    os << rng;
    return os.str();
}

std::mt19937_64 load_rng(const std::string & state) {
    std::mt19937_64 rng;
    std::istringstream is(state);
    is >> rng;
    if (!is) {
        throw Error(ErrorCode::InvalidCheckpoint, "corrupt RNG state");
    }
    return rng;
}

std::string describe_batch(const std::vector<std::string> & ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size() && i < 8; ++i) {
        out += (i ? "," : "") + ids[i];
    }
    if (ids.size() > 8) out += ",...";
    return out;
}

} // namespace

double lr_at(double epoch, const TrainConfig & cfg) {
    if (!(epoch >= 0.0) || epoch >= double(cfg.epochs)) {
        throw Error(ErrorCode::EpochOutOfRange,
                    "epoch " + std::to_string(epoch) + " outside [0, " + std::to_string(cfg.epochs) + ")");
    }
    if (epoch < double(cfg.warmup_epochs)) {
        return cfg.warmup_lr;
    }
    const double progress = (epoch - cfg.warmup_epochs) / double(cfg.epochs - cfg.warmup_epochs);
    return cfg.lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

FeatureSet extract_features(const DatasetManifest & manifest, Split split, const std::string & target_dim,
                            const DualEncoder & encoder, const PreprocessSpec & spec, unsigned threads) {
    if (!manifest.normalized) {
        throw Error(ErrorCode::InvalidConfig, "extract_features expects a normalized manifest");
    }
    const auto idx = manifest.indices(split);
    FeatureSet out;
    out.features.resize(idx.size());
    out.targets.resize(idx.size());
    out.ids.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const auto & r = manifest.records[idx[i]];
        out.targets[i] = r.target(target_dim);
        out.ids[i] = r.image;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < idx.size(); i = next++) {
            try {
                out.features[i] = encode_image(preprocess_image(manifest.records[idx[i]].image_path, spec), encoder);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = idx.size();
            }
        }
    };
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(idx.size(), 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return out;
}

nlohmann::json to_json(const EpochRecord & r) {
    nlohmann::json j = {{"epoch", r.epoch}, {"lr", r.lr}, {"loss", r.loss}};
    if (r.metrics) {
        j["metrics"] = {{"plcc", r.metrics->plcc}, {"srcc", r.metrics->srcc}, {"krcc", r.metrics->krcc}};
    }
    return j;
}

Evaluation evaluate_predictions(std::span<const double> normalized_predictions,
                                std::span<const double> normalized_targets, const LabelScaler & scaler,
                                bool logistic_plcc) {
    Evaluation e;
    for (double p : normalized_predictions) e.predictions.push_back(scaler.denormalize(p));
    for (double t : normalized_targets) e.targets.push_back(scaler.denormalize(t));
    e.metrics = correlations(e.predictions, e.targets, logistic_plcc);
    return e;
}

Evaluation evaluate(const QualityModel & model, const TrainableParams & params, const FeatureSet & test,
                    const LabelScaler & scaler, bool logistic_plcc) {
    if (test.size() == 0) {
        throw Error(ErrorCode::EmptySplit, "evaluation split is empty");
    }
    const auto preds = model.predict(params, test.features);
    return evaluate_predictions(preds, test.targets, scaler, logistic_plcc);
}

Trainer::Trainer(std::shared_ptr<const DualEncoder> encoder, ExperimentConfig config)
    : encoder_(encoder), config_(std::move(config)),
      model_(QualityModel::initialize(std::move(encoder), config_.model, config_.train.seed)) {
    config_.train.validate();
}

TrainState Trainer::initial_state() const {
    TrainState s;
    s.params = model_.params();
    s.velocity = s.params.zeros_like();
    s.rng_state = save_rng(std::mt19937_64(config_.train.seed ^ 0x5eedULL));
    return s;
}

double Trainer::step(TrainState & state, std::span<const Vector> features, std::span<const double> targets, double lr,
                     const std::vector<std::string> & batch_ids) const {
    auto diagnostic = [&](const std::string & why) {
        return Error(ErrorCode::NonFiniteLoss, why + " at step " + std::to_string(state.step) + " (epoch " +
                                                   std::to_string(state.epoch) + ", lr " + std::to_string(lr) +
                                                   ", batch " + describe_batch(batch_ids) + ")");
    };
    LossAndGradient lg;
    try {
        lg = model_.loss_and_gradient(state.params, features, targets);
    } catch (const Error & e) {
        if (e.code() == ErrorCode::NonFiniteScore || e.code() == ErrorCode::NonFiniteFeature) {
            throw diagnostic(e.what());
        }
        throw;
    }
    if (!std::isfinite(lg.loss) || !lg.gradient.all_finite()) {
        throw diagnostic("non-finite loss or gradient");
    }
    // v <- momentum * v + g ; p <- p - lr * v
    TrainableParams update = std::move(lg.gradient);
    update.axpy(config_.train.momentum, state.velocity);
    state.params.axpy(-lr, update);
    state.velocity = std::move(update);
    ++state.step;
    return lg.loss;
}

TrainResult Trainer::train(TrainState start, const FeatureSet & train_set, const FeatureSet * test_set,
                           const LabelScaler & scaler, int stop_epoch, const EpochCallback & on_epoch,
                           const std::optional<TrainState> & prior_best) const {
    const TrainConfig & cfg = config_.train;
    if (stop_epoch < 0 || stop_epoch > cfg.epochs) {
        stop_epoch = cfg.epochs;
    }
    TrainResult result;
    result.last = std::move(start);
    TrainState & state = result.last;
    if (prior_best && test_set != nullptr && test_set->size() >= 2) {
        result.best = *prior_best;
        result.best_srcc = evaluate(model_, prior_best->params, *test_set, scaler).metrics.srcc;
    }
    if (state.epoch >= stop_epoch) {
        return result;
    }
    if (train_set.size() == 0) {
        throw Error(ErrorCode::EmptySplit, "training split is empty");
    }

    std::mt19937_64 rng = load_rng(state.rng_state);
    const std::string frozen_hash = cfg.verify_frozen ? encoder_->parameter_hash() : std::string();
    const std::size_t n = train_set.size();
    const auto batch = static_cast<std::size_t>(cfg.batch_size);
    std::vector<std::size_t> order(n);
    std::vector<Vector> batch_features;
    std::vector<double> batch_targets;
    std::vector<std::string> batch_ids;

    for (int epoch = state.epoch; epoch < stop_epoch; ++epoch) {
        const double lr = lr_at(double(epoch), cfg);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        for (std::size_t i = n - 1; i > 0; --i) {
            std::swap(order[i], order[static_cast<std::size_t>(rng() % (i + 1))]);
        }

        double loss_sum = 0.0;
        for (std::size_t begin = 0; begin < n; begin += batch) {
            const std::size_t end = std::min(n, begin + batch);
            batch_features.clear();
            batch_targets.clear();
            batch_ids.clear();
            for (std::size_t i = begin; i < end; ++i) {
                batch_features.push_back(train_set.features[order[i]]);
                batch_targets.push_back(train_set.targets[order[i]]);
                batch_ids.push_back(train_set.ids.empty() ? std::to_string(order[i]) : train_set.ids[order[i]]);
            }
            loss_sum += step(state, batch_features, batch_targets, lr, batch_ids) * double(end - begin);
        }
        state.epoch = epoch + 1;
        state.rng_state = save_rng(rng);

        if (cfg.verify_frozen && encoder_->parameter_hash() != frozen_hash) {
            throw Error(ErrorCode::BackboneMismatch, "frozen encoder parameters changed during epoch " + std::to_string(epoch));
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.lr = lr;
        rec.loss = loss_sum / double(n);
        const bool eval_now = (epoch + 1) % cfg.eval_interval == 0 || epoch + 1 == stop_epoch;
        if (test_set != nullptr && test_set->size() >= 2 && eval_now) {
            try {
                rec.metrics = evaluate(model_, state.params, *test_set, scaler).metrics;
            } catch (const Error & e) {
                if (e.code() != ErrorCode::DegenerateSeries) throw;
            }
            if (rec.metrics && (!result.best || rec.metrics->srcc > result.best_srcc)) {
                result.best = state;
                result.best_srcc = rec.metrics->srcc;
            }
        }
        result.history.push_back(rec);
        if (on_epoch) {
            on_epoch(rec, state);
        }
    }
    return result;
}

} // namespace aigiqa
