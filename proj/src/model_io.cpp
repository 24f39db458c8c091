#include "foodscore/model_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "foodscore/error.hpp"
#include "foodscore/hashing.hpp"
#include "foodscore/ingest.hpp"
#include "foodscore/text.hpp"

namespace foodscore {
namespace {

constexpr std::string_view kMagic = "FSNMODEL";
constexpr std::size_t kHeaderSize = 8 + 4 + 8;
constexpr std::size_t kDigestSize = 64;

template <class T>
void put_le(std::string& out, T value)
{
    static_assert(std::is_integral_v<T> || std::is_same_v<T, double>);
    std::uint64_t bits = 0;
    if constexpr (std::is_same_v<T, double>) {
        bits = std::bit_cast<std::uint64_t>(value);
    } else {
        bits = static_cast<std::uint64_t>(value);
    }
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(std::string_view bytes, std::size_t offset, std::size_t width)
{
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
    return v;
}

struct BlockWriter {
    std::string payload;
    nlohmann::json table = nlohmann::json::array();

    void add(const std::string& name, const double* data, std::size_t rows, std::size_t cols)
    {
        table.push_back({{"name", name}, {"rows", rows}, {"cols", cols}, {"offset", payload.size()}, {"count", rows * cols}});
        for (std::size_t i = 0; i < rows * cols; ++i) put_le(payload, data[i]);
    }
};

struct BlockReader {
    std::string_view payload;
    std::map<std::string, nlohmann::json> table;

    std::vector<double> read(const std::string& name, std::size_t rows, std::size_t cols) const
    {
        auto it = table.find(name);
        if (it == table.end()) throw Error(ErrorKind::CorruptFile, "model file lacks block '" + name + "'");
        const auto& b = it->second;
        const auto count = b.at("count").get<std::size_t>();
        const auto offset = b.at("offset").get<std::size_t>();
        if (b.at("rows").get<std::size_t>() != rows || b.at("cols").get<std::size_t>() != cols || count != rows * cols) {
            throw Error(ErrorKind::CorruptFile, "block '" + name + "' has an unexpected shape");
        }
        if (offset > payload.size() || count > (payload.size() - offset) / 8) {
            throw Error(ErrorKind::CorruptFile, "block '" + name + "' extends past the payload");
        }
        std::vector<double> out(count);
        for (std::size_t i = 0; i < count; ++i) out[i] = std::bit_cast<double>(get_le(payload, offset + 8 * i, 8));
        return out;
    }
};

std::string write_bytes(const std::filesystem::path& path, const std::string& bytes)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Config, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    return sha256_hex(bytes);
}

std::string format_metric(double v)
{
    if (std::isnan(v)) return "NA";
    std::ostringstream s;
    s << std::setprecision(6) << v;
    return s.str();
}

} // namespace

std::string serialize_model(const NutrientModel& model, std::uint32_t format_version)
{
    BlockWriter blocks;
    blocks.add("scaler.mean", model.scaler.mean.data(), 1, model.scaler.mean.size());
    blocks.add("scaler.scale", model.scaler.scale.data(), 1, model.scaler.scale.size());
    for (std::size_t l = 0; l < model.params.layers.size(); ++l) {
        const auto& layer = model.params.layers[l];
        blocks.add("layer" + std::to_string(l) + ".weight", layer.weight.data(), static_cast<std::size_t>(layer.weight.rows()),
                   static_cast<std::size_t>(layer.weight.cols()));
        blocks.add("layer" + std::to_string(l) + ".bias", layer.bias.data(), static_cast<std::size_t>(layer.bias.size()), 1);
    }
    nlohmann::ordered_json manifest;
    manifest["format_version"] = format_version;
    manifest["target"] = target_name(model.target);
    manifest["config"] = model.config.to_json();
    manifest["target_scale"] = model.target_scale;
    manifest["fingerprint"] = model.fingerprint;
    manifest["report"] = model.report.to_json();
    manifest["blocks"] = blocks.table;
    const auto manifest_text = manifest.dump();

    std::string out(kMagic);
    put_le(out, format_version);
    put_le(out, static_cast<std::uint64_t>(manifest_text.size()));
    out += manifest_text;
    out += blocks.payload;
    out += sha256_hex(out);
    return out;
}

NutrientModel deserialize_model(std::string_view bytes)
{
    if (bytes.size() < kHeaderSize + kDigestSize || bytes.substr(0, kMagic.size()) != kMagic) {
        throw Error(ErrorKind::CorruptFile, "not a model file or truncated header");
    }
    const auto version = static_cast<std::uint32_t>(get_le(bytes, 8, 4));
    if (version != kModelFormatVersion) {
        throw Error(ErrorKind::VersionMismatch, "model format version " + std::to_string(version) + " (expected " +
                                                    std::to_string(kModelFormatVersion) + ")");
    }
    const auto body = bytes.substr(0, bytes.size() - kDigestSize);
    if (sha256_hex(body) != bytes.substr(bytes.size() - kDigestSize)) throw Error(ErrorKind::CorruptFile, "checksum mismatch");

    const auto manifest_len = get_le(bytes, 12, 8);
    if (manifest_len > body.size() - kHeaderSize) throw Error(ErrorKind::CorruptFile, "manifest length exceeds file size");
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(body.substr(kHeaderSize, manifest_len));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::CorruptFile, std::string("manifest: ") + e.what());
    }
    if (manifest.at("format_version").get<std::uint32_t>() != version) throw Error(ErrorKind::CorruptFile, "manifest version disagrees with header");

    BlockReader reader{body.substr(kHeaderSize + manifest_len), {}};
    for (const auto& b : manifest.at("blocks")) reader.table.emplace(b.at("name").get<std::string>(), b);

    NutrientModel model;
    model.target = parse_target(manifest.at("target").get<std::string>());
    model.config = ModelConfig::from_json(manifest.at("config"));
    model.target_scale = manifest.at("target_scale").get<double>();
    model.fingerprint = manifest.at("fingerprint").get<std::string>();
    model.report = TrainReport::from_json(manifest.at("report"));
    model.scaler.mean = reader.read("scaler.mean", 1, model.config.input_dim);
    model.scaler.scale = reader.read("scaler.scale", 1, model.config.input_dim);
    const auto widths = model.config.layer_widths();
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const auto rows = widths[l + 1];
        const auto cols = widths[l];
        const auto w = reader.read("layer" + std::to_string(l) + ".weight", rows, cols);
        const auto b = reader.read("layer" + std::to_string(l) + ".bias", rows, 1);
        DenseLayer layer{Eigen::Map<const Eigen::MatrixXd>(w.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)),
                         Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(rows))};
        model.params.layers.push_back(std::move(layer));
    }
    return model;
}

void save_model(const NutrientModel& model, const std::filesystem::path& path) { write_bytes(path, serialize_model(model)); }

NutrientModel load_model(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path)) throw Error(ErrorKind::MissingArtifact, "model file not found: " + path.string());
    return deserialize_model(read_file(path));
}

void ModelBundle::require_scorer_targets() const
{
    for (auto key : scorer_required_targets()) {
        if (!models.contains(key)) throw Error(ErrorKind::MissingModel, "bundle has no model for " + std::string(target_name(key)));
    }
}

bool ModelBundle::saw_description(std::string_view description) const
{
    return std::binary_search(train_description_hashes.begin(), train_description_hashes.end(), description_hash(description));
}

std::string metrics_table_csv(const std::map<TargetKey, NutrientModel>& models)
{
    std::ostringstream out;
    out << "target,unit,r2,rmse,mae,epochs_run,best_epoch,n_train,n_val,n_test\n";
    for (const auto& [key, m] : models) {
        const auto& r = m.report;
        out << target_name(key) << ',' << unit_name(target_info(key).unit) << ',' << format_metric(r.test.r2) << ','
            << format_metric(r.test.rmse) << ',' << format_metric(r.test.mae) << ',' << r.epochs_run << ',' << r.best_epoch << ','
            << r.n_train << ',' << r.n_val << ',' << r.n_test << '\n';
    }
    return out.str();
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& dir)
{
    if (!bundle.featurizer) throw Error(ErrorKind::Invariant, "bundle has no featurizer");
    std::filesystem::create_directories(dir / "models");
    const auto featurizer_sha = write_bytes(dir / "featurizer.json", bundle.featurizer->to_json().dump(1) + "\n");

    nlohmann::ordered_json index;
    index["format_version"] = kBundleFormatVersion;
    index["seed"] = bundle.seed;
    index["featurizer"] = {{"file", "featurizer.json"}, {"sha256", featurizer_sha}, {"fingerprint", bundle.featurizer->shared_fingerprint()}};
    auto targets = nlohmann::ordered_json::array();
    for (const auto& [key, model] : bundle.models) {
        const std::string file = "models/" + std::string(target_name(key)) + ".fsm";
        const auto sha = write_bytes(dir / file, serialize_model(model));
        nlohmann::json r2 = model.report.test.r2_defined ? nlohmann::json(model.report.test.r2) : nlohmann::json(nullptr);
        targets.push_back({{"key", target_name(key)},
                           {"file", file},
                           {"sha256", sha},
                           {"fingerprint", model.fingerprint},
                           {"metrics", {{"r2", r2}, {"rmse", model.report.test.rmse}, {"mae", model.report.test.mae}, {"epochs_run", model.report.epochs_run}}}});
    }
    index["targets"] = std::move(targets);
    std::vector<std::string> hashes;
    for (auto h : bundle.train_description_hashes) hashes.push_back(hex64(h));
    index["train_description_hashes"] = hashes;
    write_bytes(dir / "index.json", index.dump(1) + "\n");
    write_bytes(dir / "metrics.csv", metrics_table_csv(bundle.models));
}

ModelBundle load_bundle(const std::filesystem::path& dir, std::shared_ptr<const EmbeddingProvider> embedding)
{
    const auto index_path = dir / "index.json";
    if (!std::filesystem::exists(index_path)) throw Error(ErrorKind::MissingArtifact, "model bundle not found: " + dir.string());
    nlohmann::json index;
    try {
        index = nlohmann::json::parse(read_file(index_path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::CorruptFile, "index.json: " + std::string(e.what()));
    }
    if (index.at("format_version").get<std::uint32_t>() != kBundleFormatVersion) throw Error(ErrorKind::VersionMismatch, "bundle format version");

    ModelBundle bundle;
    bundle.seed = index.at("seed").get<std::uint64_t>();
    const auto& feat = index.at("featurizer");
    const auto feat_bytes = read_file(dir / feat.at("file").get<std::string>());
    if (sha256_hex(feat_bytes) != feat.at("sha256").get<std::string>()) throw Error(ErrorKind::CorruptFile, "featurizer.json checksum mismatch");
    bundle.featurizer = std::make_shared<const Featurizer>(Featurizer::from_json(nlohmann::json::parse(feat_bytes), std::move(embedding)));

    for (const auto& t : index.at("targets")) {
        const auto key = parse_target(t.at("key").get<std::string>());
        const auto bytes = read_file(dir / t.at("file").get<std::string>());
        if (sha256_hex(bytes) != t.at("sha256").get<std::string>()) {
            throw Error(ErrorKind::CorruptFile, "checksum mismatch for " + t.at("file").get<std::string>());
        }
        auto model = deserialize_model(bytes);
        if (model.target != key) throw Error(ErrorKind::CorruptFile, "model file target disagrees with index");
        if (model.fingerprint != bundle.featurizer->fingerprint(key)) {
            throw Error(ErrorKind::CorruptFile, "featurizer fingerprint mismatch for " + std::string(target_name(key)));
        }
        bundle.models.emplace(key, std::move(model));
    }
    for (const auto& h : index.at("train_description_hashes")) bundle.train_description_hashes.push_back(std::stoull(h.get<std::string>(), nullptr, 16));
    std::sort(bundle.train_description_hashes.begin(), bundle.train_description_hashes.end());
    return bundle;
}

double clamp_prediction(TargetKey key, double raw) noexcept
{
    if (std::isnan(raw)) raw = 0.0;
    switch (key) {
    case TargetKey::nova_class: return std::clamp(raw, 1.0, 4.0);
    case TargetKey::fermented_pct: return std::clamp(raw, 0.0, 100.0);
    case TargetKey::fried_flag: return raw >= 0.5 ? 1.0 : 0.0;
    default: return std::max(raw, 0.0);
    }
}

NutrientProfile predict_profile(const ModelBundle& bundle, std::string_view description)
{
    bundle.require_scorer_targets();
    NutrientProfile profile(Basis::per_100kcal);
    const auto shared = bundle.featurizer->shared_segment(description);
    for (const auto& [key, model] : bundle.models) {
        const auto hybrid = bundle.featurizer->featurize(shared, description, key);
        profile.set(key, clamp_prediction(key, model.predict(hybrid.values)));
    }
    return profile;
}

} // namespace foodscore
