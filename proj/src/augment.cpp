#include "foodscore/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "foodscore/error.hpp"
#include "foodscore/text.hpp"

namespace foodscore {
namespace {

constexpr std::uint64_t kSampleStream = 0x5A3D1E;

Modifier modifier_from_json(const nlohmann::json& j)
{
    Modifier m;
    for (const auto& [key, value] : j.items()) {
        if (key == "word") {
            m.word = to_lower(trim(value.get<std::string>()));
        } else if (key == "default_multiplier") {
            m.default_multiplier = value.get<double>();
        } else if (key == "multipliers") {
            for (const auto& [name, mult] : value.items()) m.multipliers[parse_target(name)] = mult.get<double>();
        } else if (key == "sets_fried") {
            m.sets_fried = value.get<bool>();
        } else {
            throw Error(ErrorKind::Config, "unknown modifier key '" + key + "'");
        }
    }
    if (m.word.empty()) throw Error(ErrorKind::Config, "modifier without a word");
    return m;
}

nlohmann::json modifier_to_json(const Modifier& m)
{
    nlohmann::json mults = nlohmann::json::object();
    for (const auto& [key, value] : m.multipliers) mults[std::string(target_name(key))] = value;
    return {{"word", m.word}, {"default_multiplier", m.default_multiplier}, {"multipliers", mults}, {"sets_fried", m.sets_fried}};
}

std::string match_case(std::string replacement, std::string_view original)
{
    if (!original.empty() && original.front() >= 'A' && original.front() <= 'Z' && !replacement.empty() &&
        replacement.front() >= 'a' && replacement.front() <= 'z') {
        replacement.front() = static_cast<char>(replacement.front() - 'a' + 'A');
    }
    return replacement;
}

struct SynonymMatch {
    std::size_t span;
    std::size_t entry;
};

std::vector<SynonymMatch> synonym_matches(const std::vector<TokenSpan>& spans, const AugmentationRules& rules)
{
    std::set<std::string> present;
    for (const auto& s : spans) present.insert(s.token);
    std::vector<SynonymMatch> out;
    for (std::size_t i = 0; i < spans.size(); ++i) {
        for (std::size_t e = 0; e < rules.synonyms.size(); ++e) {
            const auto& entry = rules.synonyms[e];
            if (spans[i].token != entry.word) continue;
            const bool context_ok = entry.context.empty() ||
                std::any_of(entry.context.begin(), entry.context.end(), [&](const std::string& c) { return present.contains(c); });
            if (context_ok) out.push_back({i, e});
        }
    }
    return out;
}

std::vector<const Modifier*> applicable(const std::vector<Modifier>& mods, std::string_view description)
{
    const auto tokens = tokenize(description);
    std::vector<const Modifier*> out;
    for (const auto& m : mods) {
        if (!contains_phrase(tokens, m.word)) out.push_back(&m);
    }
    return out;
}

} // namespace

double Modifier::multiplier(TargetKey key) const
{
    if (auto it = multipliers.find(key); it != multipliers.end()) return it->second;
    return is_mass_basis(key) ? default_multiplier : 1.0;
}

void AugmentationRules::validate() const
{
    if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) {
        throw Error(ErrorKind::Config, "sample_fraction must lie in (0, 1]");
    }
    auto check = [](const Modifier& m, bool portion) {
        if (!(m.default_multiplier > 0.0)) throw Error(ErrorKind::Config, "modifier '" + m.word + "' has a non-positive multiplier");
        for (const auto& [key, value] : m.multipliers) {
            if (!(value > 0.0)) throw Error(ErrorKind::Config, "modifier '" + m.word + "' has a non-positive multiplier");
            if (portion && !is_mass_basis(key)) {
                throw Error(ErrorKind::Config, "portion qualifier '" + m.word + "' may not scale " + std::string(target_name(key)));
            }
        }
        if (portion && m.sets_fried) throw Error(ErrorKind::Config, "portion qualifier '" + m.word + "' may not set the fried flag");
    };
    for (const auto& m : cooking) check(m, false);
    for (const auto& m : portions) check(m, true);
    for (const auto& s : synonyms) {
        if (tokenize(s.word).size() != 1) throw Error(ErrorKind::Config, "synonym keyword '" + s.word + "' must be a single word");
        if (s.replacements.empty()) throw Error(ErrorKind::Config, "synonym '" + s.word + "' has no replacements");
    }
}

const Modifier* AugmentationRules::find_modifier(std::string_view word) const
{
    for (const auto* list : {&cooking, &portions}) {
        for (const auto& m : *list) {
            if (m.word == word) return &m;
        }
    }
    return nullptr;
}

AugmentationRules AugmentationRules::from_json(const nlohmann::json& j)
{
    AugmentationRules rules;
    for (const auto& [key, value] : j.items()) {
        if (key == "sample_fraction") {
            rules.sample_fraction = value.get<double>();
        } else if (key == "seed") {
            rules.seed = value.get<std::uint64_t>();
        } else if (key == "synonyms") {
            for (const auto& s : value) {
                SynonymEntry entry;
                entry.word = to_lower(trim(s.at("word").get<std::string>()));
                entry.replacements = s.at("replacements").get<std::vector<std::string>>();
                if (s.contains("context")) {
                    for (const auto& c : s.at("context")) entry.context.push_back(to_lower(c.get<std::string>()));
                }
                rules.synonyms.push_back(std::move(entry));
            }
        } else if (key == "cooking") {
            for (const auto& m : value) rules.cooking.push_back(modifier_from_json(m));
        } else if (key == "portions") {
            for (const auto& m : value) rules.portions.push_back(modifier_from_json(m));
        } else if (key == "comment") {
            continue;
        } else {
            throw Error(ErrorKind::Config, "unknown augmentation key '" + key + "'");
        }
    }
    rules.validate();
    return rules;
}

AugmentationRules AugmentationRules::load(const std::filesystem::path& path)
{
    try {
        return from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, path.string() + ": " + e.what());
    }
}

nlohmann::json AugmentationRules::to_json() const
{
    auto syn = nlohmann::json::array();
    for (const auto& s : synonyms) syn.push_back({{"word", s.word}, {"replacements", s.replacements}, {"context", s.context}});
    auto cook = nlohmann::json::array();
    for (const auto& m : cooking) cook.push_back(modifier_to_json(m));
    auto port = nlohmann::json::array();
    for (const auto& m : portions) port.push_back(modifier_to_json(m));
    return {{"sample_fraction", sample_fraction}, {"seed", seed}, {"synonyms", syn}, {"cooking", cook}, {"portions", port}};
}

std::vector<std::size_t> select_sample(std::size_t n, double fraction, std::uint64_t seed)
{
    if (!(fraction > 0.0 && fraction <= 1.0)) throw Error(ErrorKind::Config, "sample fraction must lie in (0, 1]");
    // the epsilon keeps products such as 0.3 * 10 from flooring to 2
    const auto k = std::min(n, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9)));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(derive_seed(seed, kSampleStream));
    // partial Fisher-Yates: the first k slots become a uniform k-subset
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::string synonym_replace(std::string_view description, const AugmentationRules& rules, Rng& rng)
{
    const auto spans = tokenize_with_spans(description);
    const auto matches = synonym_matches(spans, rules);
    if (matches.empty()) return std::string(description);
    const auto& pick = matches[rng.below(matches.size())];
    const auto& entry = rules.synonyms[pick.entry];
    const auto& replacement = entry.replacements[rng.below(entry.replacements.size())];
    const auto& span = spans[pick.span];
    std::string out(description.substr(0, span.begin));
    out += match_case(replacement, description.substr(span.begin, span.length));
    out += description.substr(span.begin + span.length);
    return out;
}

std::pair<std::string, NutrientProfile> add_modifier(std::string_view description, std::string_view modifier,
                                                     const NutrientProfile& profile, const AugmentationRules& rules)
{
    const Modifier* m = rules.find_modifier(to_lower(modifier));
    if (!m) throw Error(ErrorKind::UnknownModifier, "no modifier named '" + std::string(modifier) + "'");
    if (contains_phrase(tokenize(description), m->word)) {
        throw Error(ErrorKind::ModifierAlreadyPresent, "'" + std::string(description) + "' already contains '" + m->word + "'");
    }
    NutrientProfile out = profile;
    for (const auto& t : target_registry()) {
        if (t.key == TargetKey::fried_flag && m->sets_fried) continue;
        if (profile.has(t.key)) out.set(t.key, profile.get(t.key) * m->multiplier(t.key));
    }
    if (m->sets_fried) out.set(TargetKey::fried_flag, 1.0);
    return {m->word + " " + std::string(trim(description)), out};
}

std::vector<FoodRecord> augment_dataset(const std::vector<FoodRecord>& records, const AugmentationRules& rules)
{
    rules.validate();
    std::vector<FoodRecord> out(records.begin(), records.end());
    const auto sample = select_sample(records.size(), rules.sample_fraction, rules.seed);
    out.reserve(records.size() + sample.size());

    for (auto i : sample) {
        const auto& src = records[i];
        Rng rng(derive_seed(rules.seed, i));
        FoodRecord variant = src;
        variant.food_code = src.food_code + "~aug";
        variant.published_fcs.reset();

        const auto first = rng.below(3);
        bool done = false;
        for (std::uint64_t attempt = 0; attempt < 3 && !done; ++attempt) {
            const auto mechanism = (first + attempt) % 3;
            if (mechanism == 0) {
                if (synonym_matches(tokenize_with_spans(src.description), rules).empty()) continue;
                variant.description = synonym_replace(src.description, rules, rng);
                variant.provenance = Provenance{i, "synonym", variant.description};
                done = true;
            } else {
                const auto options = applicable(mechanism == 1 ? rules.cooking : rules.portions, src.description);
                if (options.empty()) continue;
                const Modifier* m = options[rng.below(options.size())];
                auto [desc, profile] = add_modifier(src.description, m->word, src.profile, rules);
                variant.description = std::move(desc);
                variant.profile = std::move(profile);
                variant.provenance = Provenance{i, mechanism == 1 ? "cooking" : "portion", m->word};
                done = true;
            }
        }
        if (!done) variant.provenance = Provenance{i, "identity", ""};
        out.push_back(std::move(variant));
    }
    return out;
}

} // namespace foodscore
