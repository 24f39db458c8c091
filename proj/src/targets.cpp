#include "foodscore/targets.hpp"

#include <algorithm>

#include "foodscore/error.hpp"

namespace foodscore {
namespace {

using G = TargetGroup;
using K = TargetKey;
using U = Unit;

constexpr std::array<TargetInfo, kTargetCount> kRegistry{{
    {K::calories, "calories", U::kcal, G::energy, 512},
    {K::protein_g, "protein_g", U::g, G::macronutrient, 512},
    {K::carbohydrate_g, "carbohydrate_g", U::g, G::macronutrient, 512},
    {K::fiber_g, "fiber_g", U::g, G::macronutrient, 256},
    {K::saturated_fat_g, "saturated_fat_g", U::g, G::lipid, 512},
    {K::unsaturated_fat_g, "unsaturated_fat_g", U::g, G::lipid, 512},
    {K::cholesterol_mg, "cholesterol_mg", U::mg, G::lipid, 256},
    {K::epa_g, "epa_g", U::g, G::lipid, 128},
    {K::dha_g, "dha_g", U::g, G::lipid, 128},
    {K::ala_g, "ala_g", U::g, G::lipid, 128},
    {K::caprylic_g, "caprylic_g", U::g, G::lipid, 128},
    {K::capric_g, "capric_g", U::g, G::lipid, 128},
    {K::lauric_g, "lauric_g", U::g, G::lipid, 128},
    {K::added_sugar_g, "added_sugar_g", U::g, G::sugar, 256},
    {K::flavonoids_mg, "flavonoids_mg", U::mg, G::phytochemical, 128},
    {K::carotenoids_mcg, "carotenoids_mcg", U::mcg, G::phytochemical, 256},
    {K::vitamin_a_rae_mcg, "vitamin_a_rae_mcg", U::mcg, G::vitamin, 256},
    {K::thiamin_mg, "thiamin_mg", U::mg, G::vitamin, 256},
    {K::riboflavin_mg, "riboflavin_mg", U::mg, G::vitamin, 256},
    {K::niacin_mg, "niacin_mg", U::mg, G::vitamin, 256},
    {K::vitamin_b6_mg, "vitamin_b6_mg", U::mg, G::vitamin, 256},
    {K::folate_dfe_mcg, "folate_dfe_mcg", U::mcg, G::vitamin, 256},
    {K::vitamin_b12_mcg, "vitamin_b12_mcg", U::mcg, G::vitamin, 256},
    {K::vitamin_c_mg, "vitamin_c_mg", U::mg, G::vitamin, 256},
    {K::vitamin_d_mcg, "vitamin_d_mcg", U::mcg, G::vitamin, 256},
    {K::vitamin_e_mg, "vitamin_e_mg", U::mg, G::vitamin, 256},
    {K::vitamin_k_mcg, "vitamin_k_mcg", U::mcg, G::vitamin, 256},
    {K::choline_mg, "choline_mg", U::mg, G::vitamin, 256},
    {K::calcium_mg, "calcium_mg", U::mg, G::mineral, 256},
    {K::iron_mg, "iron_mg", U::mg, G::mineral, 256},
    {K::magnesium_mg, "magnesium_mg", U::mg, G::mineral, 256},
    {K::phosphorus_mg, "phosphorus_mg", U::mg, G::mineral, 256},
    {K::potassium_mg, "potassium_mg", U::mg, G::mineral, 256},
    {K::zinc_mg, "zinc_mg", U::mg, G::mineral, 256},
    {K::copper_mg, "copper_mg", U::mg, G::mineral, 256},
    {K::selenium_mcg, "selenium_mcg", U::mcg, G::mineral, 256},
    {K::sodium_mg, "sodium_mg", U::mg, G::mineral, 512},
    {K::fruits, "fruits", U::cup_eq, G::ingredient, 256},
    {K::nonstarchy_vegetables, "nonstarchy_vegetables", U::cup_eq, G::ingredient, 256},
    {K::beans_legumes, "beans_legumes", U::cup_eq, G::ingredient, 256},
    {K::nuts_seeds, "nuts_seeds", U::oz_eq, G::ingredient, 256},
    {K::whole_grains, "whole_grains", U::oz_eq, G::ingredient, 256},
    {K::refined_grains, "refined_grains", U::oz_eq, G::ingredient, 256},
    {K::total_grains, "total_grains", U::oz_eq, G::ingredient, 256},
    {K::seafood, "seafood", U::oz_eq, G::ingredient, 256},
    {K::yogurt, "yogurt", U::cup_eq, G::ingredient, 128},
    {K::red_meat, "red_meat", U::oz_eq, G::ingredient, 256},
    {K::cured_meat, "cured_meat", U::oz_eq, G::ingredient, 256},
    {K::plant_oils_g, "plant_oils_g", U::g, G::ingredient, 256},
    {K::nova_class, "nova_class", U::nova_class, G::processing, 1024},
    {K::fermented_pct, "fermented_pct", U::percent, G::processing, 128},
    {K::fried_flag, "fried_flag", U::flag, G::processing, 128},
}};

constexpr std::array kScorerTargets{
    K::protein_g, K::carbohydrate_g, K::fiber_g, K::saturated_fat_g, K::unsaturated_fat_g,
    K::cholesterol_mg, K::epa_g, K::dha_g, K::ala_g, K::caprylic_g, K::capric_g, K::lauric_g,
    K::added_sugar_g, K::flavonoids_mg, K::carotenoids_mcg,
    K::vitamin_a_rae_mcg, K::thiamin_mg, K::riboflavin_mg, K::niacin_mg, K::vitamin_b6_mg,
    K::folate_dfe_mcg, K::vitamin_b12_mcg, K::vitamin_c_mg, K::vitamin_d_mcg, K::vitamin_e_mg,
    K::vitamin_k_mcg, K::choline_mg,
    K::calcium_mg, K::iron_mg, K::magnesium_mg, K::phosphorus_mg, K::potassium_mg, K::zinc_mg,
    K::copper_mg, K::selenium_mcg, K::sodium_mg,
    K::fruits, K::nonstarchy_vegetables, K::beans_legumes, K::nuts_seeds, K::whole_grains,
    K::refined_grains, K::seafood, K::yogurt, K::red_meat, K::cured_meat, K::plant_oils_g,
    K::nova_class, K::fermented_pct, K::fried_flag,
};

static_assert(kRegistry.size() >= 48 && kRegistry.size() <= 54);

constexpr bool registry_is_ordered()
{
    for (std::size_t i = 0; i < kRegistry.size(); ++i) {
        if (index_of(kRegistry[i].key) != i) return false;
    }
    return true;
}
static_assert(registry_is_ordered());

} // namespace

std::span<const TargetInfo> target_registry() noexcept { return kRegistry; }

const TargetInfo& target_info(TargetKey key) noexcept { return kRegistry[index_of(key)]; }

std::string_view target_name(TargetKey key) noexcept { return target_info(key).name; }

std::string_view unit_name(Unit unit) noexcept
{
    switch (unit) {
    case Unit::kcal: return "kcal";
    case Unit::g: return "g";
    case Unit::mg: return "mg";
    case Unit::mcg: return "mcg";
    case Unit::cup_eq: return "cup_eq";
    case Unit::oz_eq: return "oz_eq";
    case Unit::nova_class: return "class";
    case Unit::percent: return "percent";
    case Unit::flag: return "flag";
    }
    return "?";
}

std::optional<TargetKey> find_target(std::string_view name) noexcept
{
    auto it = std::find_if(kRegistry.begin(), kRegistry.end(), [&](const TargetInfo& t) { return t.name == name; });
    if (it == kRegistry.end()) return std::nullopt;
    return it->key;
}

TargetKey parse_target(std::string_view name)
{
    if (auto key = find_target(name)) return *key;
    throw Error(ErrorKind::UnknownKey, "unknown target '" + std::string(name) + "'");
}

bool is_mass_basis(TargetKey key) noexcept
{
    switch (key) {
    case K::calories:
    case K::nova_class:
    case K::fermented_pct:
    case K::fried_flag:
        return false;
    default:
        return true;
    }
}

std::span<const TargetKey> scorer_required_targets() noexcept { return kScorerTargets; }

std::vector<RegistryEntry> default_registry_entries()
{
    std::vector<RegistryEntry> out;
    out.reserve(kRegistry.size());
    for (const auto& t : kRegistry) out.push_back({t.key, t.unit, t.default_embedding_dim});
    return out;
}

nlohmann::json registry_to_json(std::span<const RegistryEntry> entries)
{
    auto arr = nlohmann::json::array();
    for (const auto& e : entries) {
        arr.push_back({{"key", target_name(e.key)}, {"unit", unit_name(e.unit)}, {"embedding_dim", e.embedding_dim}});
    }
    return arr;
}

std::vector<RegistryEntry> registry_from_json(const nlohmann::json& j)
{
    if (!j.is_array()) throw Error(ErrorKind::Parse, "registry must be a JSON array");
    std::vector<RegistryEntry> out;
    for (const auto& item : j) {
        const auto key = parse_target(item.at("key").get<std::string>());
        const auto unit = item.at("unit").get<std::string>();
        if (unit != unit_name(target_info(key).unit)) {
            throw Error(ErrorKind::Parse, "unit '" + unit + "' does not match registry for " + std::string(target_name(key)));
        }
        const int dim = item.at("embedding_dim").get<int>();
        if (dim < 1) throw Error(ErrorKind::Parse, "embedding_dim must be >= 1");
        out.push_back({key, target_info(key).unit, dim});
    }
    return out;
}

} // namespace foodscore
