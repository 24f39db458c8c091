#include "foodscore/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "foodscore/error.hpp"
#include "foodscore/text.hpp"

namespace foodscore {
namespace {

using TK = TargetKey;

AttributeParams row(std::string name, std::vector<TK> keys, double h, bool harmful = false, double weight = 1.0)
{
    AttributeParams p;
    p.name = std::move(name);
    p.keys = std::move(keys);
    p.l = 0.0;
    p.h = h;
    p.p_min = harmful ? -10.0 : 0.0;
    p.p_max = harmful ? 0.0 : 10.0;
    p.direction = harmful ? Direction::descending : Direction::ascending;
    p.weight = weight;
    return p;
}

AttributeParams range(std::string name, double l, double h, double p_min, double p_max, Direction d = Direction::ascending)
{
    AttributeParams p;
    p.name = std::move(name);
    p.l = l;
    p.h = h;
    p.p_min = p_min;
    p.p_max = p_max;
    p.direction = d;
    return p;
}

double input_of(const NutrientProfile& p, const AttributeParams& a)
{
    double v = 0.0;
    for (auto k : a.keys) v += p.require(k);
    return v;
}

/// Indices of the k largest |score|; ties keep table order.
std::vector<std::size_t> top_by_magnitude(const std::vector<double>& scores, std::size_t k)
{
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return std::abs(scores[a]) > std::abs(scores[b]); });
    idx.resize(std::min(k, idx.size()));
    return idx;
}

DomainResult top_k_mean(const NutrientProfile& p, const std::vector<AttributeParams>& table, std::size_t k, const char* domain,
                        bool literal)
{
    DomainResult r;
    std::vector<double> scores;
    for (const auto& a : table) {
        const double v = input_of(p, a);
        scores.push_back(scale_score(v, a, literal));
        r.subs.push_back({domain, a.name, v, scores.back(), false});
    }
    const auto chosen = top_by_magnitude(scores, k);
    double sum = 0.0;
    for (auto i : chosen) {
        sum += scores[i];
        r.subs[i].applied = true;
    }
    r.score = chosen.empty() ? 0.0 : sum / static_cast<double>(chosen.size());
    return r;
}

bool any_keyword(const std::vector<std::string>& tokens, const std::vector<std::string>& keywords)
{
    return std::any_of(keywords.begin(), keywords.end(), [&](const std::string& k) { return contains_phrase(tokens, k); });
}

bool gate(double value, double threshold, GateMode mode) { return mode == GateMode::at_least ? value >= threshold : value < threshold; }

nlohmann::json pairs_to_json(const std::vector<std::pair<double, double>>& v)
{
    auto out = nlohmann::json::array();
    for (const auto& [a, b] : v) out.push_back({a, b});
    return out;
}

std::vector<std::pair<double, double>> pairs_from_json(const nlohmann::json& j)
{
    std::vector<std::pair<double, double>> out;
    for (const auto& e : j) out.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    return out;
}

std::vector<AttributeParams> table_from_json(const nlohmann::json& j)
{
    std::vector<AttributeParams> out;
    for (const auto& e : j) out.push_back(AttributeParams::from_json(e));
    return out;
}

nlohmann::json table_to_json(const std::vector<AttributeParams>& t)
{
    auto out = nlohmann::json::array();
    for (const auto& a : t) out.push_back(a.to_json());
    return out;
}

} // namespace

void AttributeParams::validate() const
{
    if (!(h > l)) throw Error(ErrorKind::Config, "scoring row '" + name + "': h must exceed l");
    if (!(p_max > p_min)) throw Error(ErrorKind::Config, "scoring row '" + name + "': p_max must exceed p_min");
    if (!(weight > 0.0)) throw Error(ErrorKind::Config, "scoring row '" + name + "': weight must be positive");
    for (auto k : keys) {
        if (index_of(k) >= kTargetCount) throw Error(ErrorKind::Config, "scoring row '" + name + "' names an unregistered target");
    }
}

nlohmann::json AttributeParams::to_json() const
{
    std::vector<std::string> names;
    for (auto k : keys) names.emplace_back(target_name(k));
    return {{"name", name},
            {"targets", names},
            {"l", l},
            {"h", h},
            {"p_min", p_min},
            {"p_max", p_max},
            {"direction", direction == Direction::ascending ? "ascending" : "descending"},
            {"weight", weight}};
}

AttributeParams AttributeParams::from_json(const nlohmann::json& j)
{
    static const std::set<std::string> known{"name", "targets", "l", "h", "p_min", "p_max", "direction", "weight"};
    for (const auto& [k, v] : j.items()) {
        if (!known.contains(k)) throw Error(ErrorKind::Config, "unknown scoring row field '" + k + "'");
    }
    AttributeParams a;
    a.name = j.at("name").get<std::string>();
    for (const auto& t : j.at("targets")) a.keys.push_back(parse_target(t.get<std::string>()));
    a.l = j.value("l", 0.0);
    a.h = j.at("h").get<double>();
    a.p_min = j.value("p_min", 0.0);
    a.p_max = j.value("p_max", 10.0);
    const auto dir = j.value("direction", std::string(a.p_min < 0.0 && a.p_max <= 0.0 ? "descending" : "ascending"));
    if (dir != "ascending" && dir != "descending") throw Error(ErrorKind::Config, "direction must be ascending or descending");
    a.direction = dir == "ascending" ? Direction::ascending : Direction::descending;
    a.weight = j.value("weight", 1.0);
    a.validate();
    return a;
}

ScoringConfig ScoringConfig::defaults()
{
    ScoringConfig c;
    c.vitamins = {
        row("vitamin_a", {TK::vitamin_a_rae_mcg}, 225.0),  row("niacin", {TK::niacin_mg}, 4.0),
        row("vitamin_c", {TK::vitamin_c_mg}, 22.5),        row("vitamin_b6", {TK::vitamin_b6_mg}, 0.325),
        row("vitamin_d", {TK::vitamin_d_mcg}, 3.75),       row("folate", {TK::folate_dfe_mcg}, 100.0),
        row("vitamin_e", {TK::vitamin_e_mg}, 3.75),        row("vitamin_b12", {TK::vitamin_b12_mcg}, 0.6),
        row("vitamin_k", {TK::vitamin_k_mcg}, 30.0),       row("choline", {TK::choline_mg}, 137.5),
        row("thiamin", {TK::thiamin_mg}, 0.3),             row("riboflavin", {TK::riboflavin_mg}, 0.325),
    };
    c.minerals = {
        row("calcium", {TK::calcium_mg}, 250.0),   row("iron", {TK::iron_mg}, 4.5),       row("magnesium", {TK::magnesium_mg}, 105.0),
        row("phosphorus", {TK::phosphorus_mg}, 175.0), row("potassium", {TK::potassium_mg}, 1175.0), row("zinc", {TK::zinc_mg}, 2.75),
        row("copper", {TK::copper_mg}, 0.225),     row("selenium", {TK::selenium_mcg}, 13.75), row("sodium", {TK::sodium_mg}, 575.0, true),
    };
    c.ingredients = {
        row("fruits", {TK::fruits}, 1.75),
        row("nonstarchy_vegetables", {TK::nonstarchy_vegetables}, 4.77),
        row("beans_legumes", {TK::beans_legumes}, 0.50),
        row("nuts_seeds", {TK::nuts_seeds}, 1.35),
        row("whole_grains", {TK::whole_grains}, 1.12),
        row("seafood", {TK::seafood}, 3.86),
        row("yogurt", {TK::yogurt}, 0.81),
        row("plant_oils", {TK::plant_oils_g}, 11.31),
        row("refined_carbohydrates", {TK::refined_grains}, 1.38, true),
        row("red_processed_meat", {TK::red_meat, TK::cured_meat}, 2.69, true),
    };
    c.lipids = {
        row("cholesterol", {TK::cholesterol_mg}, 75.0, true, 0.5),
        row("epa_dha", {TK::epa_g, TK::dha_g}, 0.0625, false, 1.0),
        row("ala", {TK::ala_g}, 0.4, false, 0.5),
        row("mct", {TK::caprylic_g, TK::capric_g, TK::lauric_g}, 0.32, false, 0.5),
    };
    c.dairy_keywords = {"milk", "cheese", "yogurt", "yoghurt", "cream", "butter", "kefir", "whey", "buttermilk", "ice cream", "custard", "dairy"};
    c.fermentation_keywords = {"fermented", "yogurt", "yoghurt", "kefir", "sauerkraut", "kimchi", "miso", "tempeh", "natto",
                               "kombucha", "sourdough", "buttermilk", "pickled"};
    c.frying_keywords = {"fried", "deep fried", "fries", "fritter", "fritters", "tempura", "battered", "doughnut", "donut"};
    return c;
}

void ScoringConfig::use_prose_clip()
{
    low_clip = -12.80;
    high_clip = 29.42;
    span = high_clip - low_clip;
}

void ScoringConfig::validate() const
{
    for (const auto* t : {&vitamins, &minerals, &ingredients, &lipids}) {
        if (t->empty()) throw Error(ErrorKind::Config, "scoring tables must not be empty");
        for (const auto& a : *t) {
            a.validate();
            if (a.keys.empty()) throw Error(ErrorKind::Config, "scoring row '" + a.name + "' has no targets");
        }
    }
    for (const auto& [lo, hi] : {fat_ratio_range, carb_ratio_range, kna_ratio_range}) {
        if (!(hi > lo)) throw Error(ErrorKind::Config, "ratio ranges need h > l");
    }
    if (!(high_clip > low_clip) || std::abs((high_clip - low_clip) - span) > 1e-9) {
        throw Error(ErrorKind::Config, "clip bounds must satisfy high - low = span");
    }
    if (nova_anchors.size() < 2) throw Error(ErrorKind::Config, "need at least two NOVA anchors");
    for (std::size_t i = 1; i < nova_anchors.size(); ++i) {
        if (!(nova_anchors[i].first > nova_anchors[i - 1].first) || !(nova_anchors[i].second < nova_anchors[i - 1].second)) {
            throw Error(ErrorKind::Config, "NOVA anchors must increase in class and strictly decrease in score");
        }
    }
    for (std::size_t i = 1; i < sugar_breakpoints.size(); ++i) {
        if (!(sugar_breakpoints[i].first > sugar_breakpoints[i - 1].first)) throw Error(ErrorKind::Config, "sugar breakpoints must increase");
    }
    if (!(epsilon > 0.0) || !(sugar_h > 0.0) || !(nitrate_h > 0.0) || !(fiber_h > 0.0) || !(protein_h > 0.0) || !(flavonoid_h > 0.0) ||
        !(carotenoid_h > 0.0)) {
        throw Error(ErrorKind::Config, "scoring constants must be positive");
    }
}

nlohmann::json ScoringConfig::to_json() const
{
    auto rng = [](const std::pair<double, double>& r) { return nlohmann::json::array({r.first, r.second}); };
    return {{"vitamins", table_to_json(vitamins)},
            {"minerals", table_to_json(minerals)},
            {"ingredients", table_to_json(ingredients)},
            {"lipids", table_to_json(lipids)},
            {"fat_ratio_range", rng(fat_ratio_range)},
            {"carb_ratio_range", rng(carb_ratio_range)},
            {"kna_ratio_range", rng(kna_ratio_range)},
            {"gate_mode", gate_mode == GateMode::at_least ? "at_least" : "below"},
            {"fat_energy_gate", fat_energy_gate},
            {"carb_energy_gate", carb_energy_gate},
            {"potassium_gate_mg", potassium_gate_mg},
            {"sodium_gate_mg", sodium_gate_mg},
            {"d1_aggregation", d1_aggregation == Aggregation::mean ? "mean" : "sum"},
            {"dairy_fat_multiplier", dairy_fat_multiplier},
            {"epsilon", epsilon},
            {"atwater_carb", atwater_carb},
            {"atwater_sugar", atwater_sugar},
            {"atwater_fat", atwater_fat},
            {"sugar_h", sugar_h},
            {"sugar_breakpoints", pairs_to_json(sugar_breakpoints)},
            {"cured_meat_kcal_per_oz_eq", cured_meat_kcal_per_oz_eq},
            {"nitrate_cap", nitrate_cap},
            {"nitrate_h", nitrate_h},
            {"nova_anchors", pairs_to_json(nova_anchors)},
            {"fermented_override_pct", fermented_override_pct},
            {"fiber_h", fiber_h},
            {"protein_h", protein_h},
            {"protein_weight", protein_weight},
            {"flavonoid_h", flavonoid_h},
            {"carotenoid_h", carotenoid_h},
            {"mct_includes_lauric", mct_includes_lauric},
            {"clip", {{"low", low_clip}, {"high", high_clip}, {"span", span}}},
            {"dairy_keywords", dairy_keywords},
            {"fermentation_keywords", fermentation_keywords},
            {"frying_keywords", frying_keywords},
            {"literal_formula_mode", literal_formula_mode}};
}

ScoringConfig ScoringConfig::from_json(const nlohmann::json& j, ScoringConfig c)
{
    if (!j.is_object()) throw Error(ErrorKind::Config, "scoring config must be a JSON object");
    auto rng = [](const nlohmann::json& v) { return std::pair<double, double>{v.at(0).get<double>(), v.at(1).get<double>()}; };
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "comment") continue;
            else if (key == "vitamins") c.vitamins = table_from_json(v);
            else if (key == "minerals") c.minerals = table_from_json(v);
            else if (key == "ingredients") c.ingredients = table_from_json(v);
            else if (key == "lipids") c.lipids = table_from_json(v);
            else if (key == "fat_ratio_range") c.fat_ratio_range = rng(v);
            else if (key == "carb_ratio_range") c.carb_ratio_range = rng(v);
            else if (key == "kna_ratio_range") c.kna_ratio_range = rng(v);
            else if (key == "gate_mode") {
                const auto m = v.get<std::string>();
                if (m != "at_least" && m != "below") throw Error(ErrorKind::Config, "gate_mode must be at_least or below");
                c.gate_mode = m == "at_least" ? GateMode::at_least : GateMode::below;
            }
            else if (key == "fat_energy_gate") c.fat_energy_gate = v.get<double>();
            else if (key == "carb_energy_gate") c.carb_energy_gate = v.get<double>();
            else if (key == "potassium_gate_mg") c.potassium_gate_mg = v.get<double>();
            else if (key == "sodium_gate_mg") c.sodium_gate_mg = v.get<double>();
            else if (key == "d1_aggregation") {
                const auto m = v.get<std::string>();
                if (m != "mean" && m != "sum") throw Error(ErrorKind::Config, "d1_aggregation must be mean or sum");
                c.d1_aggregation = m == "mean" ? Aggregation::mean : Aggregation::sum;
            }
            else if (key == "dairy_fat_multiplier") c.dairy_fat_multiplier = v.get<double>();
            else if (key == "epsilon") c.epsilon = v.get<double>();
            else if (key == "atwater_carb") c.atwater_carb = v.get<double>();
            else if (key == "atwater_sugar") c.atwater_sugar = v.get<double>();
            else if (key == "atwater_fat") c.atwater_fat = v.get<double>();
            else if (key == "sugar_h") c.sugar_h = v.get<double>();
            else if (key == "sugar_breakpoints") c.sugar_breakpoints = pairs_from_json(v);
            else if (key == "cured_meat_kcal_per_oz_eq") c.cured_meat_kcal_per_oz_eq = v.get<double>();
            else if (key == "nitrate_cap") c.nitrate_cap = v.get<double>();
            else if (key == "nitrate_h") c.nitrate_h = v.get<double>();
            else if (key == "nova_anchors") c.nova_anchors = pairs_from_json(v);
            else if (key == "fermented_override_pct") c.fermented_override_pct = v.get<double>();
            else if (key == "fiber_h") c.fiber_h = v.get<double>();
            else if (key == "protein_h") c.protein_h = v.get<double>();
            else if (key == "protein_weight") c.protein_weight = v.get<double>();
            else if (key == "flavonoid_h") c.flavonoid_h = v.get<double>();
            else if (key == "carotenoid_h") c.carotenoid_h = v.get<double>();
            else if (key == "mct_includes_lauric") c.mct_includes_lauric = v.get<bool>();
            else if (key == "clip_preset") {
                const auto m = v.get<std::string>();
                if (m == "prose") c.use_prose_clip();
                else if (m == "formula") {
                    const auto d = defaults();
                    c.low_clip = d.low_clip;
                    c.high_clip = d.high_clip;
                    c.span = d.span;
                } else throw Error(ErrorKind::Config, "clip_preset must be formula or prose");
            }
            else if (key == "clip") {
                c.low_clip = v.at("low").get<double>();
                c.high_clip = v.at("high").get<double>();
                c.span = v.value("span", c.high_clip - c.low_clip);
            }
            else if (key == "dairy_keywords") c.dairy_keywords = v.get<std::vector<std::string>>();
            else if (key == "fermentation_keywords") c.fermentation_keywords = v.get<std::vector<std::string>>();
            else if (key == "frying_keywords") c.frying_keywords = v.get<std::vector<std::string>>();
            else if (key == "literal_formula_mode") c.literal_formula_mode = v.get<bool>();
            else throw Error(ErrorKind::Config, "unknown scoring config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("scoring config: ") + e.what());
    }
    c.validate();
    return c;
}

ScoringConfig ScoringConfig::load(const std::filesystem::path& path)
{
    const auto text = read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Config, path.string() + ": " + e.what());
    }
    return from_json(j);
}

double scale_score(double v, const AttributeParams& a, bool literal) noexcept
{
    const double frac = (std::clamp(v, a.l, a.h) - a.l) / (a.h - a.l);
    if (literal || a.direction == Direction::ascending) return a.p_min + (a.p_max - a.p_min) * frac;
    return a.p_max + (a.p_min - a.p_max) * frac;
}

DomainResult score_nutrient_ratios(const NutrientProfile& p, std::string_view description, const ScoringConfig& c)
{
    DomainResult r;
    const auto eps = c.epsilon;
    const auto tokens = tokenize(description);

    const double sat = p.require(TK::saturated_fat_g);
    const double unsat = p.require(TK::unsaturated_fat_g);
    const double fat_ratio = std::log(std::max(unsat, eps) / std::max(sat, eps));
    const bool fat_on = gate(c.atwater_fat * (sat + unsat), c.fat_energy_gate, c.gate_mode);
    double fat = scale_score(fat_ratio, range("fat", c.fat_ratio_range.first, c.fat_ratio_range.second, -10, 10));
    if (any_keyword(tokens, c.dairy_keywords)) fat *= c.dairy_fat_multiplier;
    r.subs.push_back({"D1", "fat_ratio", fat_ratio, fat, fat_on});

    const double carb = p.require(TK::carbohydrate_g);
    const double fiber = p.require(TK::fiber_g);
    const double carb_ratio = std::log(std::max(fiber, eps) / std::max(carb, eps));
    const bool carb_on = gate(c.atwater_carb * carb, c.carb_energy_gate, c.gate_mode);
    r.subs.push_back({"D1", "carb_ratio", carb_ratio,
                      scale_score(carb_ratio, range("carb", c.carb_ratio_range.first, c.carb_ratio_range.second, -10, 10)), carb_on});

    const double k = p.require(TK::potassium_mg);
    const double na = p.require(TK::sodium_mg);
    const double kna_ratio = std::log(std::max(k, eps) / std::max(na, eps));
    const bool kna_on = gate(k, c.potassium_gate_mg, c.gate_mode) && gate(na, c.sodium_gate_mg, c.gate_mode);
    r.subs.push_back({"D1", "potassium_sodium_ratio", kna_ratio,
                      scale_score(kna_ratio, range("kna", c.kna_ratio_range.first, c.kna_ratio_range.second, -10, 10)), kna_on});

    double sum = 0.0;
    int n = 0;
    for (const auto& s : r.subs) {
        if (!s.applied) continue;
        sum += s.score;
        ++n;
    }
    r.score = n == 0 ? 0.0 : (c.d1_aggregation == Aggregation::mean ? sum / n : sum);
    return r;
}

DomainResult score_vitamins(const NutrientProfile& p, const ScoringConfig& c)
{
    return top_k_mean(p, c.vitamins, 5, "D2", c.literal_formula_mode);
}

DomainResult score_minerals(const NutrientProfile& p, const ScoringConfig& c)
{
    return top_k_mean(p, c.minerals, 5, "D3", c.literal_formula_mode);
}

DomainResult score_ingredients(const NutrientProfile& p, const ScoringConfig& c)
{
    DomainResult r;
    for (const auto& a : c.ingredients) {
        const double v = input_of(p, a);
        const double s = scale_score(v, a, c.literal_formula_mode);
        r.score += s;
        r.subs.push_back({"D4", a.name, v, s, true});
    }
    return r;
}

DomainResult score_additives(const NutrientProfile& p, const ScoringConfig& c)
{
    DomainResult r;
    const double p_sugar = c.atwater_sugar * p.require(TK::added_sugar_g);
    double sugar = 0.0;
    if (c.sugar_breakpoints.empty()) {
        sugar = scale_score(p_sugar, range("sugar", 0.0, c.sugar_h, -10.0, 0.0, Direction::descending), c.literal_formula_mode);
    } else {
        const auto& bp = c.sugar_breakpoints;
        if (p_sugar <= bp.front().first) {
            sugar = bp.front().second;
        } else if (p_sugar >= bp.back().first) {
            sugar = bp.back().second;
        } else {
            for (std::size_t i = 1; i < bp.size(); ++i) {
                if (p_sugar <= bp[i].first) {
                    const double t = (p_sugar - bp[i - 1].first) / (bp[i].first - bp[i - 1].first);
                    sugar = bp[i - 1].second + t * (bp[i].second - bp[i - 1].second);
                    break;
                }
            }
        }
    }
    r.subs.push_back({"D5", "added_sugar", p_sugar, sugar, true});

    const double p_nitrate = std::min(c.nitrate_cap, p.require(TK::cured_meat) * c.cured_meat_kcal_per_oz_eq);
    const double nitrate =
        scale_score(p_nitrate, range("nitrate", 0.0, c.nitrate_h, -10.0, 0.0, Direction::descending), c.literal_formula_mode);
    r.subs.push_back({"D5", "nitrite_meat", p_nitrate, nitrate, true});
    r.score = (sugar + nitrate) / 2.0;
    return r;
}

double nova_interpolate(double nova, const std::vector<std::pair<double, double>>& anchors) noexcept
{
    if (anchors.empty()) return 0.0;
    if (nova <= anchors.front().first) return anchors.front().second;
    if (nova >= anchors.back().first) return anchors.back().second;
    for (std::size_t i = 1; i < anchors.size(); ++i) {
        const auto& [x1, y1] = anchors[i];
        if (nova <= x1) {
            const auto& [x0, y0] = anchors[i - 1];
            return y0 + (y1 - y0) * (nova - x0) / (x1 - x0);
        }
    }
    return anchors.back().second;
}

DomainResult score_processing(const NutrientProfile& p, std::string_view description, const ScoringConfig& c)
{
    DomainResult r;
    const auto tokens = tokenize(description);
    const double nova = p.require(TK::nova_class);
    const double s_nova = nova_interpolate(nova, c.nova_anchors);
    r.subs.push_back({"D6", "nova", nova, s_nova, true});

    double fermented = p.require(TK::fermented_pct);
    if (any_keyword(tokens, c.fermentation_keywords) || fermented > c.fermented_override_pct) fermented = 100.0;
    const double s_ferm = scale_score(fermented, range("fermentation", 0.0, 100.0, 0.0, 10.0));
    r.subs.push_back({"D6", "fermentation", fermented, s_ferm, true});

    const double fried_flag = p.require(TK::fried_flag);
    const bool fried = fried_flag >= 0.5 || any_keyword(tokens, c.frying_keywords);
    const double s_fry = fried ? -10.0 : 0.0;
    r.subs.push_back({"D6", "frying", fried ? 1.0 : 0.0, s_fry, true});

    r.score = (s_nova + 0.5 * s_ferm + 0.5 * s_fry) / 2.0;
    return r;
}

DomainResult score_lipids(const NutrientProfile& p, const ScoringConfig& c)
{
    DomainResult r;
    std::vector<double> scores;
    for (const auto& a : c.lipids) {
        double v = 0.0;
        for (auto k : a.keys) {
            if (k == TK::lauric_g && !c.mct_includes_lauric) continue;
            v += p.require(k);
        }
        scores.push_back(scale_score(v, a, c.literal_formula_mode));
        r.subs.push_back({"D7", a.name, v, scores.back(), false});
    }
    double num = 0.0;
    double den = 0.0;
    for (auto i : top_by_magnitude(scores, 3)) {
        num += c.lipids[i].weight * scores[i];
        den += c.lipids[i].weight;
        r.subs[i].applied = true;
    }
    r.score = den > 0.0 ? 0.5 * num / den : 0.0;
    return r;
}

DomainResult score_fiber_protein(const NutrientProfile& p, const ScoringConfig& c)
{
    DomainResult r;
    const double fiber = p.require(TK::fiber_g);
    const double protein = p.require(TK::protein_g);
    const double s_fiber = scale_score(fiber, range("fiber", 0.0, c.fiber_h, 0.0, 10.0));
    const double s_protein = scale_score(protein, range("protein", 0.0, c.protein_h, 0.0, 10.0));
    r.subs.push_back({"D8", "fiber", fiber, s_fiber, true});
    r.subs.push_back({"D8", "protein", protein, s_protein, true});
    r.score = (s_fiber + c.protein_weight * s_protein) / (1.0 + c.protein_weight);
    return r;
}

DomainResult score_phytochemicals(const NutrientProfile& p, const ScoringConfig& c)
{
    DomainResult r;
    const double flav = p.require(TK::flavonoids_mg);
    const double carot = p.require(TK::carotenoids_mcg);
    const double s_flav = scale_score(flav, range("flavonoids", 0.0, c.flavonoid_h, 0.0, 10.0));
    const double s_carot = scale_score(carot, range("carotenoids", 0.0, c.carotenoid_h, 0.0, 10.0));
    r.subs.push_back({"D9", "flavonoids", flav, s_flav, true});
    r.subs.push_back({"D9", "carotenoids", carot, s_carot, true});
    r.score = 0.5 * (s_flav + s_carot) / 2.0;
    return r;
}

int final_transform(double raw_sum, const ScoringConfig& c) noexcept
{
    const double clipped = std::clamp(raw_sum, c.low_clip, c.high_clip);
    const double x = 100.0 - 99.0 * (c.high_clip - clipped) / c.span;
    // 8.755 evaluates to 50.49999999999999 in binary; the grid snap restores the exact half
    const double snapped = std::round(x * 1e9) / 1e9;
    return static_cast<int>(std::clamp(std::round(snapped), 1.0, 100.0));
}

FcsBreakdown total_fcs(const NutrientProfile& profile, std::string_view description, const ScoringConfig& c)
{
    if (profile.basis() != Basis::per_100kcal) throw Error(ErrorKind::Config, "scoring needs a per_100kcal profile");
    for (auto k : scorer_required_targets()) profile.require(k);

    FcsBreakdown b;
    const DomainResult parts[9] = {
        score_nutrient_ratios(profile, description, c), score_vitamins(profile, c),     score_minerals(profile, c),
        score_ingredients(profile, c),                  score_additives(profile, c),    score_processing(profile, description, c),
        score_lipids(profile, c),                       score_fiber_protein(profile, c), score_phytochemicals(profile, c),
    };
    for (std::size_t i = 0; i < 9; ++i) {
        b.domains[i] = parts[i].score;
        b.raw_sum += parts[i].score;
        b.audit.insert(b.audit.end(), parts[i].subs.begin(), parts[i].subs.end());
    }
    b.clipped_sum = std::clamp(b.raw_sum, c.low_clip, c.high_clip);
    b.final_score = final_transform(b.raw_sum, c);
    return b;
}

} // namespace foodscore
