#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "foodscore/random.hpp"
#include "foodscore/records.hpp"

namespace foodscore {

struct SynonymEntry {
    std::string word;
    std::vector<std::string> replacements;
    /// When non-empty, the entry only fires if one of these words also appears in the description.
    std::vector<std::string> context;
};

/// A word prepended to a description together with per-target value multipliers.
struct Modifier {
    std::string word;
    /// Applied to every mass-basis target without an explicit entry.
    double default_multiplier = 1.0;
    std::map<TargetKey, double> multipliers;
    bool sets_fried = false;

    double multiplier(TargetKey key) const;
};

struct AugmentationRules {
    std::vector<SynonymEntry> synonyms;
    std::vector<Modifier> cooking;
    std::vector<Modifier> portions;
    double sample_fraction = 0.30;
    std::uint64_t seed = 0;

    /// Throws Error(Config) on a non-positive multiplier, a fraction outside (0, 1],
    /// or a portion multiplier on a categorical target.
    void validate() const;

    const Modifier* find_modifier(std::string_view word) const;

    static AugmentationRules from_json(const nlohmann::json& j);
    static AugmentationRules load(const std::filesystem::path& path);
    nlohmann::json to_json() const;
};

/// floor(fraction * n) distinct indices in ascending order.
std::vector<std::size_t> select_sample(std::size_t n, double fraction, std::uint64_t seed);

/// Replaces one keyword occurrence, picked uniformly among all matches. Returns
/// the input unchanged when no keyword matches.
std::string synonym_replace(std::string_view description, const AugmentationRules& rules, Rng& rng);

/// Prepends the modifier and scales the profile by its multipliers.
std::pair<std::string, NutrientProfile> add_modifier(std::string_view description, std::string_view modifier,
                                                     const NutrientProfile& profile, const AugmentationRules& rules);

/// Originals followed by one variant per sampled record.
std::vector<FoodRecord> augment_dataset(const std::vector<FoodRecord>& records, const AugmentationRules& rules);

} // namespace foodscore
