#include "foodscore/heuristics.hpp"

#include <set>
#include <sstream>

#include "foodscore/error.hpp"
#include "foodscore/text.hpp"

namespace foodscore {
namespace {

std::vector<HeuristicFeature> parse_flags(const nlohmann::json& arr)
{
    std::vector<HeuristicFeature> out;
    for (const auto& f : arr) {
        HeuristicFeature feat;
        feat.kind = HeuristicFeature::Kind::flag;
        feat.name = f.at("name").get<std::string>();
        for (const auto& t : f.at("terms")) feat.terms.push_back(to_lower(t.get<std::string>()));
        if (feat.terms.empty()) throw Error(ErrorKind::Config, "heuristic flag '" + feat.name + "' has no terms");
        out.push_back(std::move(feat));
    }
    return out;
}

} // namespace

std::string_view group_name(TargetGroup group) noexcept
{
    switch (group) {
    case TargetGroup::energy: return "energy";
    case TargetGroup::macronutrient: return "macronutrient";
    case TargetGroup::lipid: return "lipid";
    case TargetGroup::sugar: return "sugar";
    case TargetGroup::phytochemical: return "phytochemical";
    case TargetGroup::vitamin: return "vitamin";
    case TargetGroup::mineral: return "mineral";
    case TargetGroup::ingredient: return "ingredient";
    case TargetGroup::processing: return "processing";
    }
    return "?";
}

const std::vector<HeuristicFeature>& HeuristicSpec::features_for(TargetKey target) const
{
    auto it = features.find(target);
    if (it == features.end()) throw Error(ErrorKind::UnknownTarget, "no heuristic features for " + std::string(target_name(target)));
    return it->second;
}

std::string HeuristicSpec::describe(TargetKey target) const
{
    std::ostringstream out;
    out << "v" << version;
    for (const auto& f : features_for(target)) {
        out << '|' << static_cast<int>(f.kind) << ':' << f.name;
        for (const auto& [term, value] : f.cooking_terms) out << ',' << term << '=' << value;
        for (const auto& term : f.terms) out << ',' << term;
    }
    return out.str();
}

HeuristicSpec HeuristicSpec::from_json(const nlohmann::json& j)
{
    static const std::set<std::string> kKnown{"version", "comment", "cooking_terms", "common_flags", "group_flags", "target_flags"};
    for (const auto& [key, value] : j.items()) {
        if (!kKnown.contains(key)) throw Error(ErrorKind::Config, "unknown heuristic spec key '" + key + "'");
    }
    HeuristicSpec spec;
    spec.source = j;
    spec.version = j.at("version").get<int>();

    HeuristicFeature cooking;
    cooking.kind = HeuristicFeature::Kind::cooking;
    cooking.name = "cooking_method";
    for (const auto& pair : j.at("cooking_terms")) {
        cooking.cooking_terms.emplace_back(to_lower(pair.at(0).get<std::string>()), pair.at(1).get<double>());
    }
    const auto common = parse_flags(j.at("common_flags"));
    std::map<std::string, std::vector<HeuristicFeature>> groups;
    for (const auto& [name, arr] : j.at("group_flags").items()) groups[name] = parse_flags(arr);
    std::map<TargetKey, std::vector<HeuristicFeature>> overrides;
    if (j.contains("target_flags")) {
        for (const auto& [name, arr] : j.at("target_flags").items()) overrides[parse_target(name)] = parse_flags(arr);
    }

    for (const auto& t : target_registry()) {
        std::vector<HeuristicFeature> feats{cooking};
        feats.insert(feats.end(), common.begin(), common.end());
        if (auto o = overrides.find(t.key); o != overrides.end()) {
            feats.insert(feats.end(), o->second.begin(), o->second.end());
        } else {
            auto g = groups.find(std::string(group_name(t.group)));
            if (g == groups.end()) throw Error(ErrorKind::Config, "no heuristic flags for group '" + std::string(group_name(t.group)) + "'");
            feats.insert(feats.end(), g->second.begin(), g->second.end());
        }
        feats.push_back({HeuristicFeature::Kind::word_count, "word_count", {}, {}});
        feats.push_back({HeuristicFeature::Kind::char_count, "char_count", {}, {}});
        if (feats.size() < kMinHeuristicFeatures || feats.size() > kMaxHeuristicFeatures) {
            throw Error(ErrorKind::Config, std::string(t.name) + " has " + std::to_string(feats.size()) + " heuristic features; expected 15-20");
        }
        spec.features.emplace(t.key, std::move(feats));
    }
    return spec;
}

HeuristicSpec HeuristicSpec::load(const std::filesystem::path& path)
{
    try {
        return from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, path.string() + ": " + e.what());
    }
}

std::vector<double> heuristic_features(const HeuristicSpec& spec, TargetKey target, std::string_view text)
{
    const auto& feats = spec.features_for(target);
    const auto tokens = tokenize(text);
    const auto trimmed = trim(text);
    std::vector<double> out;
    out.reserve(feats.size());
    for (const auto& f : feats) {
        switch (f.kind) {
        case HeuristicFeature::Kind::cooking: {
            double value = 0.0;
            for (const auto& [term, v] : f.cooking_terms) {
                if (contains_phrase(tokens, term)) {
                    value = v;
                    break;
                }
            }
            out.push_back(value);
            break;
        }
        case HeuristicFeature::Kind::flag: {
            bool hit = false;
            for (const auto& term : f.terms) hit = hit || contains_phrase(tokens, term);
            out.push_back(hit ? 1.0 : 0.0);
            break;
        }
        case HeuristicFeature::Kind::word_count:
            out.push_back(static_cast<double>(word_count(trimmed)));
            break;
        case HeuristicFeature::Kind::char_count:
            out.push_back(static_cast<double>(trimmed.size()));
            break;
        }
    }
    return out;
}

} // namespace foodscore
