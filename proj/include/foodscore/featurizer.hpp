#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "foodscore/embedding.hpp"
#include "foodscore/heuristics.hpp"
#include "foodscore/tfidf.hpp"

namespace foodscore {

inline constexpr double kScalerEpsilon = 1e-8;

/// Column-wise standardization fitted on the training split.
struct ScalerParams {
    std::vector<double> mean;
    std::vector<double> scale;  // std, or 1 where std < 1e-8

    std::size_t size() const noexcept { return mean.size(); }
    nlohmann::json to_json() const;
    static ScalerParams from_json(const nlohmann::json& j);
};

/// `rows` holds one sample per row. Needs at least two rows (TooFewRows otherwise).
/// Uses the population standard deviation. Columns with std below 1e-8 keep
/// scale 1, so a feature unseen in training cannot be amplified at inference.
/// The mean is accumulated relative to the first row so a constant column
/// standardizes to exact zeros.
ScalerParams fit_scaler(const Eigen::MatrixXd& rows);
std::vector<double> apply_scaler(const ScalerParams& params, std::span<const double> x);
Eigen::MatrixXd apply_scaler(const ScalerParams& params, const Eigen::MatrixXd& rows);

/// [embedding | tfidf | heuristics] with the start offset of each segment.
struct HybridVector {
    std::vector<double> values;
    std::array<std::size_t, 3> offsets{};
};

struct SegmentSizes {
    std::size_t embedding = 0;
    std::size_t tfidf = 0;
    std::size_t heuristics = 0;

    std::size_t total() const noexcept { return embedding + tfidf + heuristics; }
};

/// Throws Error(DimensionMismatch) when a segment length differs from `expected`.
HybridVector assemble_hybrid(std::span<const double> embedding, std::span<const double> tfidf,
                             std::span<const double> heuristics, const SegmentSizes& expected);

struct FeaturizerConfig {
    std::size_t embedding_dim = kDefaultEmbeddingDim;
    std::size_t tfidf_max_features = kDefaultTfidfFeatures;
};

/// Fitted text-to-vector state shared by every target model.
class Featurizer {
public:
    Featurizer(std::shared_ptr<const EmbeddingProvider> embedding, TfidfModel tfidf, HeuristicSpec heuristics);

    /// Fits TF-IDF on `corpus`.
    static Featurizer fit(const std::vector<std::string>& corpus, std::shared_ptr<const EmbeddingProvider> embedding,
                          HeuristicSpec heuristics, const std::set<std::string>& stop_words, const FeaturizerConfig& config);

    SegmentSizes segment_sizes(TargetKey target) const;

    /// Embedding and TF-IDF segments, which do not depend on the target.
    std::vector<double> shared_segment(std::string_view text) const;
    HybridVector featurize(std::string_view text, TargetKey target) const;
    /// Completes a hybrid vector from a precomputed shared segment.
    HybridVector featurize(std::span<const double> shared, std::string_view text, TargetKey target) const;

    /// Hash over embedding provider identity, TF-IDF state and the target's heuristic list.
    std::string fingerprint(TargetKey target) const;
    std::string shared_fingerprint() const;

    const TfidfModel& tfidf() const noexcept { return tfidf_; }
    const HeuristicSpec& heuristics() const noexcept { return heuristics_; }
    const EmbeddingProvider& embedding() const noexcept { return *embedding_; }

    nlohmann::json to_json() const;
    /// `embedding` must reproduce the fingerprint recorded at save time.
    static Featurizer from_json(const nlohmann::json& j, std::shared_ptr<const EmbeddingProvider> embedding);

private:
    std::shared_ptr<const EmbeddingProvider> embedding_;
    TfidfModel tfidf_;
    HeuristicSpec heuristics_;
};

} // namespace foodscore
