#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "foodscore/records.hpp"
#include "foodscore/scorer.hpp"

namespace foodscore {

struct PearsonResult {
    double r = 0.0;
    double p = 1.0;
};

/// Sample correlation with a two-sided p-value from the t transform.
/// Needs n >= 3 (TooFewRows) and non-constant inputs (ConstantInput).
PearsonResult pearson(std::span<const double> x, std::span<const double> y);

struct ErrorStats {
    double mad = 0.0;
    double median_ad = 0.0;
    double mean_difference = 0.0;  // mean(actual - predicted)
    double predicted_mean = 0.0;
    double predicted_sd = 0.0;
    double actual_mean = 0.0;
    double actual_sd = 0.0;  // sample SDs; 0 for a single pair

    bool operator==(const ErrorStats&) const = default;
};

ErrorStats error_stats(std::span<const double> predicted, std::span<const double> actual);

/// Fraction of |actual - predicted| <= tau for each threshold.
std::vector<double> threshold_rates(std::span<const double> predicted, std::span<const double> actual,
                                    std::span<const double> thresholds);

struct CategoryError {
    std::string category;
    std::size_t n = 0;
    double mad = 0.0;

    bool operator==(const CategoryError&) const = default;
};

inline constexpr std::string_view kUncategorized = "uncategorized";

/// Per-category MAD, largest first (ties by name).
std::vector<CategoryError> category_breakdown(const std::vector<std::optional<std::string>>& categories,
                                              std::span<const double> predicted, std::span<const double> actual);

struct ValidationItem {
    std::string food_code;
    std::string description;
    std::optional<std::string> category;
    double actual = 0.0;
    double predicted = 0.0;
    double abs_diff = 0.0;
    bool seen_in_training = false;

    bool operator==(const ValidationItem&) const = default;
};

struct ValidationReport {
    std::size_t n = 0;
    std::size_t excluded_unlabeled = 0;
    std::size_t training_overlap = 0;
    std::optional<PearsonResult> correlation;  // absent when undefined
    ErrorStats errors;
    std::vector<double> thresholds;
    std::vector<double> within;
    std::vector<CategoryError> categories;
    std::vector<ValidationItem> worst;
    std::vector<ValidationItem> items;  // every scored row, input order

    nlohmann::json to_json() const;
    static ValidationReport from_json(const nlohmann::json& j);
    bool operator==(const ValidationReport& other) const;
};

struct ValidationOptions {
    std::size_t worst_k = 20;
    std::vector<double> thresholds{15.0, 25.0};
    /// True if a description was part of the training data.
    std::function<bool(std::string_view)> seen;
};

using ProfileSource = std::function<NutrientProfile(const FoodRecord&)>;

/// Scores every labeled record; unlabeled ones are counted and skipped.
/// Throws Error(EmptyDataset) when nothing is labeled.
ValidationReport run_validation(const std::vector<FoodRecord>& dataset, const ProfileSource& profiles, const ScoringConfig& scoring,
                                const ValidationOptions& options = {});

/// description,actual,predicted,abs_diff (plus code and category)
std::string items_csv(const ValidationReport& report);
/// actual,predicted
std::string scatter_csv(const ValidationReport& report);

void write_validation_outputs(const ValidationReport& report, const std::filesystem::path& dir);

} // namespace foodscore
