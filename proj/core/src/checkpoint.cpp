#include "aigiqa/checkpoint.hpp"

#include "aigiqa/error.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace aigiqa {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 8> kMagic{'A', 'I', 'G', 'I', 'Q', 'A', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

struct TensorTable {
    nlohmann::json entries = nlohmann::json::array();
    std::vector<double> payload;

    void add(const std::string & name, const double * data, Eigen::Index rows, Eigen::Index cols) {
        entries.push_back({{"name", name}, {"rows", rows}, {"cols", cols}, {"offset", payload.size()}});
        payload.insert(payload.end(), data, data + rows * cols);
    }
};

void add_params(TensorTable & t, const std::string & prefix, const TrainableParams & p) {
    t.add(prefix + "context", p.context.vectors.data(), p.context.vectors.rows(), p.context.vectors.cols());
    t.add(prefix + "head.w1", p.head.w1.data(), p.head.w1.rows(), p.head.w1.cols());
    t.add(prefix + "head.b1", p.head.b1.data(), p.head.b1.size(), 1);
    t.add(prefix + "head.w2", p.head.w2.data(), p.head.w2.size(), 1);
    t.add(prefix + "head.b2", &p.head.b2, 1, 1);
}

const nlohmann::json & find_entry(const nlohmann::json & entries, const std::string & name) {
    for (const auto & e : entries) {
        if (e.at("name") == name) return e;
    }
    throw Error(ErrorCode::InvalidCheckpoint, "missing tensor '" + name + "'");
}

template <typename Dense>
void read_tensor(const nlohmann::json & entries, const std::vector<double> & payload, const std::string & name, Dense & out) {
    const auto & e = find_entry(entries, name);
    const auto rows = e.at("rows").get<Eigen::Index>();
    const auto cols = e.at("cols").get<Eigen::Index>();
    const auto offset = e.at("offset").get<std::size_t>();
    if (rows < 0 || cols < 0 || offset + static_cast<std::size_t>(rows * cols) > payload.size()) {
        throw Error(ErrorCode::InvalidCheckpoint, "tensor '" + name + "' exceeds the payload");
    }
    if constexpr (Dense::ColsAtCompileTime == 1) {
        out.resize(rows);
    } else {
        out.resize(rows, cols);
    }
    std::memcpy(out.data(), payload.data() + offset, static_cast<std::size_t>(rows * cols) * sizeof(double));
}

TrainableParams read_params(const nlohmann::json & entries, const std::vector<double> & payload,
                            const std::string & prefix, Activation activation) {
    TrainableParams p;
    read_tensor(entries, payload, prefix + "context", p.context.vectors);
    read_tensor(entries, payload, prefix + "head.w1", p.head.w1);
    read_tensor(entries, payload, prefix + "head.b1", p.head.b1);
    read_tensor(entries, payload, prefix + "head.w2", p.head.w2);
    Vector b2;
    read_tensor(entries, payload, prefix + "head.b2", b2);
    p.head.b2 = b2(0);
    p.head.activation = activation;
    return p;
}

} // namespace

Checkpoint make_checkpoint(const ExperimentConfig & config, const DualEncoder & encoder, const LabelScaler & scaler,
                           const TrainState & state, const std::string & kind) {
    Checkpoint c;
    c.config = config;
    c.config_hash = config_hash(config);
    c.backbone = encoder.backbone();
    c.encoder_hash = encoder.parameter_hash();
    c.stub_encoder = encoder.is_stub();
    c.label_lo = scaler.lo;
    c.label_hi = scaler.hi;
    c.kind = kind;
    c.state = state;
    return c;
}

void save_checkpoint(const Checkpoint & ckpt, const std::filesystem::path & path) {
    TensorTable table;
    add_params(table, "", ckpt.state.params);
    add_params(table, "velocity.", ckpt.state.velocity);

    nlohmann::json header = {
        {"config", to_json(ckpt.config)},
        {"config_hash", ckpt.config_hash},
        {"backbone", ckpt.backbone},
        {"encoder_hash", ckpt.encoder_hash},
        {"stub_encoder", ckpt.stub_encoder},
        {"category_words", ckpt.config.model.category_words},
        {"label_range", {ckpt.label_lo, ckpt.label_hi}},
        {"kind", ckpt.kind},
        {"epoch", ckpt.state.epoch},
        {"step", ckpt.state.step},
        {"rng_state", ckpt.state.rng_state},
        {"tensors", table.entries},
    };
    const std::string text = header.dump();

    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::UnwritablePath, "cannot write checkpoint '" + path.string() + "'");
    }
    const std::uint64_t header_len = text.size();
    out.write(kMagic.data(), kMagic.size());
    out.write(reinterpret_cast<const char *>(&kVersion), sizeof(kVersion));
    out.write(reinterpret_cast<const char *>(&header_len), sizeof(header_len));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.write(reinterpret_cast<const char *>(table.payload.data()),
              static_cast<std::streamsize>(table.payload.size() * sizeof(double)));
    if (!out) {
        throw Error(ErrorCode::UnwritablePath, "short write to '" + path.string() + "'");
    }
}

Checkpoint load_checkpoint(const std::filesystem::path & path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::InvalidCheckpoint, "cannot open checkpoint '" + path.string() + "'");
    }
    std::array<char, 8> magic{};
    std::uint32_t version = 0;
    std::uint64_t header_len = 0;
    in.read(magic.data(), magic.size());
    in.read(reinterpret_cast<char *>(&version), sizeof(version));
    in.read(reinterpret_cast<char *>(&header_len), sizeof(header_len));
    if (!in || magic != kMagic) {
        throw Error(ErrorCode::InvalidCheckpoint, "'" + path.string() + "' is not a checkpoint archive");
    }
    if (version != kVersion) {
        throw Error(ErrorCode::InvalidCheckpoint, "unsupported checkpoint version " + std::to_string(version));
    }
    if (header_len > (1ULL << 30)) {
        throw Error(ErrorCode::InvalidCheckpoint, "implausible header length");
    }
    std::string text(header_len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(header_len));
    if (!in) {
        throw Error(ErrorCode::InvalidCheckpoint, "truncated checkpoint header");
    }
    std::vector<char> rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (rest.size() % sizeof(double) != 0) {
        throw Error(ErrorCode::InvalidCheckpoint, "truncated checkpoint payload");
    }
    std::vector<double> payload(rest.size() / sizeof(double));
    std::memcpy(payload.data(), rest.data(), rest.size());

    try {
        const auto header = nlohmann::json::parse(text);
        Checkpoint c;
        c.config = experiment_config_from_json(header.at("config"));
        c.config_hash = header.at("config_hash").get<std::string>();
        c.backbone = header.at("backbone").get<std::string>();
        c.encoder_hash = header.at("encoder_hash").get<std::string>();
        c.stub_encoder = header.at("stub_encoder").get<bool>();
        c.label_lo = header.at("label_range").at(0).get<double>();
        c.label_hi = header.at("label_range").at(1).get<double>();
        c.kind = header.at("kind").get<std::string>();
        c.state.epoch = header.at("epoch").get<int>();
        c.state.step = header.at("step").get<std::int64_t>();
        c.state.rng_state = header.at("rng_state").get<std::string>();
        const auto & entries = header.at("tensors");
        const Activation act = c.config.model.activation;
        c.state.params = read_params(entries, payload, "", act);
        c.state.velocity = read_params(entries, payload, "velocity.", act);
        if (config_hash(c.config) != c.config_hash) {
            throw Error(ErrorCode::InvalidCheckpoint, "config hash does not match the stored config");
        }
        return c;
    } catch (const nlohmann::json::exception & e) {
        throw Error(ErrorCode::InvalidCheckpoint, std::string("malformed checkpoint header: ") + e.what());
    }
}

std::shared_ptr<const DualEncoder> restore_encoder(const Checkpoint & ckpt, EncoderOptions options) {
    if (ckpt.stub_encoder) {
        options.stub = true;
    }
    auto encoder = make_encoder(ckpt.backbone, options);
    if (encoder->parameter_hash() != ckpt.encoder_hash) {
        throw Error(ErrorCode::BackboneMismatch, "encoder weights for '" + ckpt.backbone +
                                                     "' do not match the checkpoint digest " + ckpt.encoder_hash);
    }
    return encoder;
}

QualityModel restore_model(const Checkpoint & ckpt, std::shared_ptr<const DualEncoder> encoder) {
    return QualityModel(std::move(encoder), ckpt.config.model, ckpt.state.params);
}

} // namespace aigiqa
