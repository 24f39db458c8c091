#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "foodscore/augment.hpp"
#include "foodscore/embedding.hpp"
#include "foodscore/featurizer.hpp"
#include "foodscore/ingest.hpp"
#include "foodscore/model_io.hpp"
#include "foodscore/scorer.hpp"
#include "foodscore/trainer.hpp"
#include "foodscore/validate.hpp"

namespace foodscore {

struct SourceConfig {
    SourceTag tag = SourceTag::nutrients;
    std::filesystem::path path;
    /// Absent: every header naming a registered target (or published_fcs) is read.
    std::optional<TableSchema> schema;
};

/// Single configuration shared by every subcommand. Relative paths resolve
/// against the directory holding the config file.
struct PipelineConfig {
    std::filesystem::path base_dir = ".";
    std::uint64_t seed = 0;
    std::vector<SourceConfig> sources;
    std::filesystem::path dataset = "dataset.jsonl";
    std::optional<std::filesystem::path> validation_dataset;
    std::filesystem::path bundle = "bundle";
    std::filesystem::path validation_dir = "validation";
    std::optional<std::filesystem::path> stop_words;
    std::optional<std::filesystem::path> denylist;
    std::optional<std::filesystem::path> augmentation;
    bool augment = true;
    /// Drop records carrying a published score before training.
    bool holdout_published = false;
    std::optional<std::filesystem::path> heuristics;
    std::optional<std::filesystem::path> embedding_file;
    std::size_t embedding_dim = kDefaultEmbeddingDim;
    std::optional<std::filesystem::path> scoring_tables;
    nlohmann::json scorer_overrides = nlohmann::json::object();
    FeaturizerConfig featurizer;
    TrainConfig training;
    nlohmann::json model_defaults = nlohmann::json::object();
    std::map<TargetKey, nlohmann::json> model_overrides;
    std::vector<RegistryEntry> registry = default_registry_entries();
    std::vector<TargetKey> targets;  // empty: every registered target
    unsigned jobs = 1;

    /// Throws Error(Config) for unknown keys, bad values or referenced input files that do not exist.
    static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
    static PipelineConfig load(const std::filesystem::path& path);

    std::filesystem::path resolve(const std::filesystem::path& p) const;
    ScoringConfig scoring() const;
    ModelConfig model_config(TargetKey key, std::size_t input_dim) const;
    std::shared_ptr<const EmbeddingProvider> make_embedding() const;
};

/// One JSON object per line on the given stream.
class Logger {
public:
    explicit Logger(std::ostream* out = nullptr) : out_(out) {}
    void info(std::string_view event, const nlohmann::json& fields = nlohmann::json::object()) const;
    void warn(std::string_view event, const nlohmann::json& fields = nlohmann::json::object()) const;

private:
    void emit(std::string_view level, std::string_view event, const nlohmann::json& fields) const;
    std::ostream* out_;
};

/// Header-driven schema for tables that follow the canonical column names.
TableSchema infer_schema(const std::filesystem::path& path);

IngestResult cmd_ingest(const PipelineConfig& config, const Logger& log = Logger());

struct TrainOutcome {
    ModelBundle bundle;
    std::vector<std::string> skipped;
};

/// Trains the requested targets (all configured targets when empty) and writes the bundle.
TrainOutcome cmd_train(const PipelineConfig& config, const std::vector<TargetKey>& targets, const Logger& log = Logger());
/// In-memory variant used by cmd_train.
TrainOutcome train_bundle(const PipelineConfig& config, const std::vector<FoodRecord>& records, const std::vector<TargetKey>& targets,
                          const Logger& log = Logger());

ModelBundle load_configured_bundle(const PipelineConfig& config);

/// {"description": ..., "basis": ..., "profile": {...}}
nlohmann::ordered_json prediction_to_json(std::string_view description, const NutrientProfile& profile);

ValidationReport cmd_validate(const PipelineConfig& config, bool oracle, const Logger& log = Logger());

} // namespace foodscore
