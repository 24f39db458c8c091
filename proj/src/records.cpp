#include "foodscore/records.hpp"

#include <algorithm>
#include <cstring>

#include "foodscore/error.hpp"
#include "foodscore/text.hpp"

namespace foodscore {

std::string_view basis_name(Basis basis) noexcept
{
    return basis == Basis::per_100g ? "per_100g" : "per_100kcal";
}

Basis parse_basis(std::string_view name)
{
    if (name == "per_100g") return Basis::per_100g;
    if (name == "per_100kcal") return Basis::per_100kcal;
    throw Error(ErrorKind::Parse, "unknown basis '" + std::string(name) + "'");
}

double NutrientProfile::require(TargetKey key) const
{
    if (!has(key)) throw Error(ErrorKind::MissingTarget, "profile lacks " + std::string(target_name(key)));
    return get(key);
}

bool NutrientProfile::is_complete() const noexcept
{
    return std::none_of(values_.begin(), values_.end(), [](double v) { return std::isnan(v); });
}

bool NutrientProfile::operator==(const NutrientProfile& other) const noexcept
{
    if (basis_ != other.basis_) return false;
    // bitwise so that NaN slots compare equal
    return std::memcmp(values_.data(), other.values_.data(), sizeof(double) * kTargetCount) == 0;
}

void validate_record(const FoodRecord& record)
{
    if (trim(record.description).empty()) {
        throw Error(ErrorKind::Parse, "record '" + record.food_code + "' has an empty description");
    }
    if (record.published_fcs && (*record.published_fcs < 1 || *record.published_fcs > 100)) {
        throw Error(ErrorKind::Parse, "record '" + record.food_code + "' has published_fcs outside [1, 100]");
    }
}

nlohmann::json profile_to_json(const NutrientProfile& profile)
{
    nlohmann::json values = nlohmann::json::object();
    for (const auto& t : target_registry()) {
        if (profile.has(t.key)) values[std::string(t.name)] = profile.get(t.key);
    }
    return {{"basis", basis_name(profile.basis())}, {"profile", std::move(values)}};
}

NutrientProfile profile_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw Error(ErrorKind::Parse, "profile must be a JSON object");
    Basis basis = Basis::per_100kcal;
    if (auto it = j.find("basis"); it != j.end()) basis = parse_basis(it->get<std::string>());
    NutrientProfile profile(basis);
    const nlohmann::json& values = j.contains("profile") ? j.at("profile") : j;
    for (const auto& [name, value] : values.items()) {
        if (&values == &j && name == "basis") continue;
        if (!value.is_number()) throw Error(ErrorKind::Parse, "value for '" + name + "' is not a number");
        profile.set(parse_target(name), value.get<double>());
    }
    return profile;
}

nlohmann::json breakdown_to_json(const FcsBreakdown& b)
{
    nlohmann::json domains = nlohmann::json::object();
    for (int i = 1; i <= 9; ++i) domains["d" + std::to_string(i)] = b.d(i);
    auto audit = nlohmann::json::array();
    for (const auto& s : b.audit) {
        audit.push_back({{"domain", s.domain}, {"name", s.name}, {"input", s.input}, {"score", s.score}, {"applied", s.applied}});
    }
    return {{"domains", std::move(domains)},
            {"raw_sum", b.raw_sum},
            {"clipped_sum", b.clipped_sum},
            {"final_score", b.final_score},
            {"audit", std::move(audit)}};
}

} // namespace foodscore
