#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "foodscore/targets.hpp"

namespace foodscore {

enum class Basis : std::uint8_t { per_100g, per_100kcal };

std::string_view basis_name(Basis basis) noexcept;
Basis parse_basis(std::string_view name);

/// Target values for one food. A NaN slot means "not present"; ingestion
/// guarantees every slot is filled before records leave the clean step.
class NutrientProfile {
public:
    explicit NutrientProfile(Basis basis = Basis::per_100kcal) : basis_(basis)
    {
        values_.fill(std::numeric_limits<double>::quiet_NaN());
    }

    Basis basis() const noexcept { return basis_; }
    void set_basis(Basis basis) noexcept { basis_ = basis; }

    bool has(TargetKey key) const noexcept { return !std::isnan(values_[index_of(key)]); }
    double get(TargetKey key) const noexcept { return values_[index_of(key)]; }
    double operator[](TargetKey key) const noexcept { return get(key); }
    void set(TargetKey key, double value) noexcept { values_[index_of(key)] = value; }
    void clear(TargetKey key) noexcept { values_[index_of(key)] = std::numeric_limits<double>::quiet_NaN(); }

    /// Value or throw Error(MissingTarget).
    double require(TargetKey key) const;

    bool is_complete() const noexcept;

    const std::array<double, kTargetCount>& values() const noexcept { return values_; }

    bool operator==(const NutrientProfile& other) const noexcept;

private:
    std::array<double, kTargetCount> values_{};
    Basis basis_;
};

/// Marks a record synthesized by the augmenter.
struct Provenance {
    std::size_t source_index = 0;
    std::string mechanism;  // synonym | cooking | portion | identity
    std::string detail;

    bool operator==(const Provenance&) const = default;
};

struct FoodRecord {
    std::string food_code;
    std::string description;
    std::optional<std::string> category;
    NutrientProfile profile;
    std::optional<int> published_fcs;
    bool flavonoid_imputed = false;
    std::optional<Provenance> provenance;
};

/// Checks the FoodRecord invariants (non-empty trimmed description, published score in [1, 100]).
void validate_record(const FoodRecord& record);

struct SubScore {
    std::string domain;
    std::string name;
    double input = 0.0;
    double score = 0.0;
    bool applied = true;
};

struct FcsBreakdown {
    std::array<double, 9> domains{};
    double raw_sum = 0.0;
    double clipped_sum = 0.0;
    int final_score = 1;
    std::vector<SubScore> audit;

    double d(int i) const { return domains.at(static_cast<std::size_t>(i - 1)); }
};

nlohmann::json profile_to_json(const NutrientProfile& profile);
/// Accepts {"basis": ..., "profile": {target: value}} or a flat {target: value, "basis": ...} object.
NutrientProfile profile_from_json(const nlohmann::json& j);

nlohmann::json breakdown_to_json(const FcsBreakdown& breakdown);

} // namespace foodscore
