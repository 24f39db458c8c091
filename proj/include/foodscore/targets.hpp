#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace foodscore {

/// Closed set of prediction targets. Declaration order is the registry order.
enum class TargetKey : std::uint8_t {
    calories,
    protein_g,
    carbohydrate_g,
    fiber_g,
    saturated_fat_g,
    unsaturated_fat_g,
    cholesterol_mg,
    epa_g,
    dha_g,
    ala_g,
    caprylic_g,
    capric_g,
    lauric_g,
    added_sugar_g,
    flavonoids_mg,
    carotenoids_mcg,
    // vitamins
    vitamin_a_rae_mcg,
    thiamin_mg,
    riboflavin_mg,
    niacin_mg,
    vitamin_b6_mg,
    folate_dfe_mcg,
    vitamin_b12_mcg,
    vitamin_c_mg,
    vitamin_d_mcg,
    vitamin_e_mg,
    vitamin_k_mcg,
    choline_mg,
    // minerals
    calcium_mg,
    iron_mg,
    magnesium_mg,
    phosphorus_mg,
    potassium_mg,
    zinc_mg,
    copper_mg,
    selenium_mcg,
    sodium_mg,
    // food pattern equivalents
    fruits,
    nonstarchy_vegetables,
    beans_legumes,
    nuts_seeds,
    whole_grains,
    refined_grains,
    total_grains,
    seafood,
    yogurt,
    red_meat,
    cured_meat,
    plant_oils_g,
    // processing attributes
    nova_class,
    fermented_pct,
    fried_flag,
};

inline constexpr std::size_t kTargetCount = static_cast<std::size_t>(TargetKey::fried_flag) + 1;

enum class Unit : std::uint8_t { kcal, g, mg, mcg, cup_eq, oz_eq, nova_class, percent, flag };

enum class TargetGroup : std::uint8_t { energy, macronutrient, lipid, sugar, phytochemical, vitamin, mineral, ingredient, processing };

struct TargetInfo {
    TargetKey key;
    std::string_view name;
    Unit unit;
    TargetGroup group;
    int default_embedding_dim;
};

constexpr std::size_t index_of(TargetKey key) noexcept { return static_cast<std::size_t>(key); }

/// All registered targets in declaration order.
std::span<const TargetInfo> target_registry() noexcept;

const TargetInfo& target_info(TargetKey key) noexcept;
std::string_view target_name(TargetKey key) noexcept;
std::string_view unit_name(Unit unit) noexcept;

/// Throws Error(UnknownKey) for names outside the registry.
TargetKey parse_target(std::string_view name);
std::optional<TargetKey> find_target(std::string_view name) noexcept;

/// Values that scale with the amount of food eaten. Energy density, NOVA class,
/// fermented share and the fried flag are not per-mass quantities.
bool is_mass_basis(TargetKey key) noexcept;

/// Targets whose values the scorer reads.
std::span<const TargetKey> scorer_required_targets() noexcept;

/// Registry view with per-target embedding dimensions, as persisted in config files.
struct RegistryEntry {
    TargetKey key;
    Unit unit;
    int embedding_dim;

    bool operator==(const RegistryEntry&) const = default;
};

std::vector<RegistryEntry> default_registry_entries();
nlohmann::json registry_to_json(std::span<const RegistryEntry> entries);
std::vector<RegistryEntry> registry_from_json(const nlohmann::json& j);

} // namespace foodscore
