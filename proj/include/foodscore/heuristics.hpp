#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "foodscore/targets.hpp"

namespace foodscore {

struct HeuristicFeature {
    enum class Kind { cooking, flag, word_count, char_count };

    Kind kind = Kind::flag;
    std::string name;
    std::vector<std::pair<std::string, double>> cooking_terms;  // first match in order wins
    std::vector<std::string> terms;                             // flag fires on any whole-word match
};

inline constexpr std::size_t kMinHeuristicFeatures = 15;
inline constexpr std::size_t kMaxHeuristicFeatures = 20;

/// Per-target keyword features. Loaded from a JSON file with a shared cooking
/// indicator, ten common flags, five flags per target group (overridable per
/// target) and two trailing text statistics.
struct HeuristicSpec {
    int version = 1;
    std::map<TargetKey, std::vector<HeuristicFeature>> features;

    const std::vector<HeuristicFeature>& features_for(TargetKey target) const;
    /// Canonical text of one target's feature list, used in fingerprints.
    std::string describe(TargetKey target) const;

    static HeuristicSpec from_json(const nlohmann::json& j);
    static HeuristicSpec load(const std::filesystem::path& path);
    nlohmann::json source;  // JSON the spec was built from, persisted with models
};

/// Fixed-order feature vector: cooking indicator, flags, word count, character count.
std::vector<double> heuristic_features(const HeuristicSpec& spec, TargetKey target, std::string_view text);

std::string_view group_name(TargetGroup group) noexcept;

} // namespace foodscore
