#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "foodscore/featurizer.hpp"
#include "foodscore/records.hpp"
#include "foodscore/trainer.hpp"

namespace foodscore {

/// Model file layout (all integers little-endian):
///
///   bytes 0..7    magic "FSNMODEL"
///   bytes 8..11   u32 format version
///   bytes 12..19  u64 manifest length M
///   next M bytes  JSON manifest: target, config, scaler/target scale, fingerprint,
///                 report, and a block table {name, rows, cols, offset, count}
///   payload       float64 blocks; offsets are relative to the payload start,
///                 matrices are stored column-major
///   last 64 bytes lowercase hex SHA-256 of everything before it
inline constexpr std::uint32_t kModelFormatVersion = 1;
inline constexpr std::uint32_t kBundleFormatVersion = 1;

std::string serialize_model(const NutrientModel& model, std::uint32_t format_version = kModelFormatVersion);
/// Throws Error(VersionMismatch) or Error(CorruptFile).
NutrientModel deserialize_model(std::string_view bytes);

void save_model(const NutrientModel& model, const std::filesystem::path& path);
NutrientModel load_model(const std::filesystem::path& path);

/// Featurizer plus one model per trained target.
struct ModelBundle {
    std::shared_ptr<const Featurizer> featurizer;
    std::map<TargetKey, NutrientModel> models;
    std::vector<std::uint64_t> train_description_hashes;  // sorted
    std::uint64_t seed = 0;

    /// Throws Error(MissingModel) if a scorer input has no model.
    void require_scorer_targets() const;
    bool saw_description(std::string_view description) const;
};

/// Directory: index.json, featurizer.json, metrics.csv, models/<target>.fsm.
void save_bundle(const ModelBundle& bundle, const std::filesystem::path& dir);
/// `embedding` must match the provider the bundle was trained with.
ModelBundle load_bundle(const std::filesystem::path& dir, std::shared_ptr<const EmbeddingProvider> embedding);

/// Per-target table: target,unit,r2,rmse,mae,epochs_run,best_epoch,n_train,n_val,n_test.
std::string metrics_table_csv(const std::map<TargetKey, NutrientModel>& models);

/// Featurizes once, runs every head in eval mode, clamps to physical ranges:
/// values >= 0, nova_class in [1, 4], fermented_pct in [0, 100], fried_flag in {0, 1}.
NutrientProfile predict_profile(const ModelBundle& bundle, std::string_view description);

/// Applies the clamping rules to raw head outputs.
double clamp_prediction(TargetKey key, double raw) noexcept;

} // namespace foodscore
