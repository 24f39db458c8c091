#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "foodscore/records.hpp"

namespace foodscore {

enum class Direction : std::uint8_t { ascending, descending };

/// One scored attribute. Its input is the sum of `keys` (several keys for
/// composite rows such as EPA+DHA).
struct AttributeParams {
    std::string name;
    std::vector<TargetKey> keys;
    double l = 0.0;
    double h = 1.0;
    double p_min = 0.0;
    double p_max = 10.0;
    Direction direction = Direction::ascending;
    double weight = 1.0;

    void validate() const;
    nlohmann::json to_json() const;
    static AttributeParams from_json(const nlohmann::json& j);
};

enum class GateMode : std::uint8_t { at_least, below };
enum class Aggregation : std::uint8_t { mean, sum };

struct ScoringConfig {
    std::vector<AttributeParams> vitamins;
    std::vector<AttributeParams> minerals;
    std::vector<AttributeParams> ingredients;
    std::vector<AttributeParams> lipids;

    // D1 log-ratio ranges, scored ascending onto [-10, 10]
    std::pair<double, double> fat_ratio_range{-0.66, 1.77};
    std::pair<double, double> carb_ratio_range{-7.02, -0.78};
    std::pair<double, double> kna_ratio_range{-2.02, 3.30};
    GateMode gate_mode = GateMode::at_least;
    double fat_energy_gate = 10.0;
    double carb_energy_gate = 10.0;
    double potassium_gate_mg = 10.0;
    double sodium_gate_mg = 10.0;
    Aggregation d1_aggregation = Aggregation::mean;
    double dairy_fat_multiplier = 0.5;
    double epsilon = 1e-6;

    double atwater_carb = 4.0;
    double atwater_sugar = 4.0;
    double atwater_fat = 9.0;

    double sugar_h = 60.0;
    /// Optional (P_sugar, score) points; replaces the linear descent when non-empty.
    std::vector<std::pair<double, double>> sugar_breakpoints;
    double cured_meat_kcal_per_oz_eq = 50.0;
    double nitrate_cap = 100.0;
    double nitrate_h = 50.0;

    std::vector<std::pair<double, double>> nova_anchors{{1.0, 10.0}, {2.0, 7.5}, {3.0, 5.0}, {4.0, -10.0}};
    double fermented_override_pct = 50.0;

    double fiber_h = 9.5;
    double protein_h = 14.0;
    double protein_weight = 0.5;
    double flavonoid_h = 23.53;
    double carotenoid_h = 8746.81;

    bool mct_includes_lauric = true;

    double low_clip = -12.43;
    double high_clip = 29.94;
    double span = 42.37;

    std::vector<std::string> dairy_keywords;
    std::vector<std::string> fermentation_keywords;
    std::vector<std::string> frying_keywords;

    /// Scores (p_min, p_max) = (-10, 0) rows by substituting directly into the
    /// ascending formula, so l maps to -10 and h to 0.
    bool literal_formula_mode = false;

    /// Defaults: embedded attribute tables and the clip constants of the final transform.
    static ScoringConfig defaults();
    void use_prose_clip();

    /// Throws Error(Config) on any broken invariant.
    void validate() const;
    nlohmann::json to_json() const;
    /// Overrides `base` with the keys present in `j`; unknown keys are rejected.
    static ScoringConfig from_json(const nlohmann::json& j, ScoringConfig base = defaults());
    static ScoringConfig load(const std::filesystem::path& path);
};

double scale_score(double v, const AttributeParams& params, bool literal = false) noexcept;

struct DomainResult {
    double score = 0.0;
    std::vector<SubScore> subs;
};

DomainResult score_nutrient_ratios(const NutrientProfile& p, std::string_view description, const ScoringConfig& c);
DomainResult score_vitamins(const NutrientProfile& p, const ScoringConfig& c);
DomainResult score_minerals(const NutrientProfile& p, const ScoringConfig& c);
DomainResult score_ingredients(const NutrientProfile& p, const ScoringConfig& c);
DomainResult score_additives(const NutrientProfile& p, const ScoringConfig& c);
double nova_interpolate(double nova, const std::vector<std::pair<double, double>>& anchors) noexcept;
DomainResult score_processing(const NutrientProfile& p, std::string_view description, const ScoringConfig& c);
DomainResult score_lipids(const NutrientProfile& p, const ScoringConfig& c);
DomainResult score_fiber_protein(const NutrientProfile& p, const ScoringConfig& c);
DomainResult score_phytochemicals(const NutrientProfile& p, const ScoringConfig& c);

/// 100 - 99 (high - clip(raw)) / span, rounded half away from zero after
/// snapping to a 1e-9 grid.
int final_transform(double raw_sum, const ScoringConfig& c) noexcept;

/// Throws Error(MissingTarget) when a scorer input is absent and Error(Config)
/// if the profile is not on the per-100-kcal basis.
FcsBreakdown total_fcs(const NutrientProfile& profile, std::string_view description, const ScoringConfig& c);

} // namespace foodscore
