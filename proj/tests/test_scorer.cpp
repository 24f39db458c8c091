#include <cmath>

#include <gtest/gtest.h>

#include "fcs_cases.hpp"
#include "foodscore/error.hpp"
#include "foodscore/random.hpp"
#include "foodscore/scorer.hpp"
#include "support.hpp"

using namespace foodscore;
using TK = TargetKey;
using fcs_cases::oracle_values;
using fcs_cases::with;

namespace {

const ScoringConfig& cfg()
{
    static const ScoringConfig c = ScoringConfig::defaults();
    return c;
}

AttributeParams attr(double l, double h, double p_min, double p_max, Direction d = Direction::ascending)
{
    AttributeParams a;
    a.name = "x";
    a.keys = {TK::vitamin_c_mg};
    a.l = l;
    a.h = h;
    a.p_min = p_min;
    a.p_max = p_max;
    a.direction = d;
    return a;
}

void expect_domain(const DomainResult& r, double want, double tol = 1e-9) { EXPECT_NEAR(r.score, want, tol); }

} // namespace

TEST(ScaleScore, Examples)
{
    EXPECT_DOUBLE_EQ(scale_score(22.5, attr(0, 22.5, 0, 10)), 10.0);
    EXPECT_DOUBLE_EQ(scale_score(11.25, attr(0, 22.5, 0, 10)), 5.0);
    EXPECT_DOUBLE_EQ(scale_score(500.0, attr(0, 22.5, 0, 10)), 10.0);
    EXPECT_DOUBLE_EQ(scale_score(287.5, attr(0, 575, -10, 0, Direction::descending)), -5.0);
    EXPECT_DOUBLE_EQ(scale_score(0.0, attr(0, 575, -10, 0, Direction::descending)), 0.0);
    EXPECT_DOUBLE_EQ(scale_score(575.0, attr(0, 575, -10, 0, Direction::descending)), -10.0);
}

TEST(ScaleScore, LiteralReading)
{
    const auto a = attr(0, 575, -10, 0, Direction::descending);
    EXPECT_DOUBLE_EQ(scale_score(0.0, a, true), -10.0);
    EXPECT_DOUBLE_EQ(scale_score(575.0, a, true), 0.0);
}

TEST(ScaleScore, MonotoneAndBounded)
{
    Rng rng(1);
    for (int i = 0; i < 500; ++i) {
        const double l = rng.uniform(-50, 50);
        const double h = l + rng.uniform(0.01, 100);
        const auto up = attr(l, h, 0, 10);
        const auto down = attr(l, h, -10, 0, Direction::descending);
        const double a = rng.uniform(-200, 200), b = a + rng.uniform(0, 50);
        EXPECT_LE(scale_score(a, up), scale_score(b, up));
        EXPECT_GE(scale_score(a, down), scale_score(b, down));
        for (double v : {a, b}) {
            EXPECT_GE(scale_score(v, up), 0.0);
            EXPECT_LE(scale_score(v, up), 10.0);
            EXPECT_GE(scale_score(v, down), -10.0);
            EXPECT_LE(scale_score(v, down), 0.0);
        }
    }
}

TEST(D1, FatRatio)
{
    const auto r = score_nutrient_ratios(with({{TK::unsaturated_fat_g, 2}, {TK::saturated_fat_g, 1}}), "nuts", cfg());
    expect_domain(r, 1.137, 1e-3);
    EXPECT_EQ(r.subs.size(), 3u);
    EXPECT_TRUE(r.subs[0].applied);
    EXPECT_FALSE(r.subs[1].applied);
}

TEST(D1, DairyFatHalved)
{
    const auto plain = score_nutrient_ratios(with({{TK::unsaturated_fat_g, 2}, {TK::saturated_fat_g, 1}}), "nuts", cfg());
    const auto dairy = score_nutrient_ratios(with({{TK::unsaturated_fat_g, 2}, {TK::saturated_fat_g, 1}}), "whole milk", cfg());
    EXPECT_NEAR(dairy.score, plain.score / 2.0, 1e-12);
}

TEST(D1, CarbRatio)
{
    expect_domain(score_nutrient_ratios(with({{TK::fiber_g, 2}, {TK::carbohydrate_g, 15}}), "bread", cfg()), 6.042, 1e-3);
}

TEST(D1, PotassiumSodiumRatio)
{
    const auto r = score_nutrient_ratios(with({{TK::potassium_mg, 200}, {TK::sodium_mg, 200}}), "broth", cfg());
    expect_domain(r, -10.0 + 20.0 * (2.02 / 5.32), 1e-12);
    EXPECT_NEAR(r.score, -2.406, 1e-3);
}

TEST(D1, GatesClosed)
{
    const auto r = score_nutrient_ratios(with({{TK::saturated_fat_g, 0.5}, {TK::carbohydrate_g, 1}, {TK::potassium_mg, 5}, {TK::sodium_mg, 50}}),
                                         "x", cfg());
    EXPECT_EQ(r.score, 0.0);
    for (const auto& s : r.subs) EXPECT_FALSE(s.applied);
}

TEST(D1, MeanOfApplicable)
{
    const auto p = with({{TK::unsaturated_fat_g, 2}, {TK::saturated_fat_g, 1}, {TK::fiber_g, 2}, {TK::carbohydrate_g, 15}});
    const double fat = -10.0 + 20.0 * (std::log(2.0) + 0.66) / 2.43;
    const double carb = -10.0 + 20.0 * (std::log(2.0 / 15.0) + 7.02) / 6.24;
    expect_domain(score_nutrient_ratios(p, "x", cfg()), (fat + carb) / 2.0, 1e-12);
    auto sum_cfg = cfg();
    sum_cfg.d1_aggregation = Aggregation::sum;
    expect_domain(score_nutrient_ratios(p, "x", sum_cfg), fat + carb, 1e-12);
}

TEST(D1, BelowGateMode)
{
    auto c = cfg();
    c.gate_mode = GateMode::below;
    const auto r = score_nutrient_ratios(with({{TK::unsaturated_fat_g, 0.5}, {TK::saturated_fat_g, 0.5}}), "x", c);
    EXPECT_TRUE(r.subs[0].applied);
}

TEST(D2, Examples)
{
    expect_domain(score_vitamins(fs_test::zero_profile(), cfg()), 0.0);
    expect_domain(score_vitamins(with({{TK::vitamin_c_mg, 22.5}}), cfg()), 2.0);
    auto p = fs_test::zero_profile();
    for (const auto& a : cfg().vitamins) p.set(a.keys.front(), a.h);
    expect_domain(score_vitamins(p, cfg()), 10.0);
    EXPECT_EQ(cfg().vitamins.size(), 12u);
}

TEST(D3, Examples)
{
    expect_domain(score_minerals(with({{TK::calcium_mg, 250}, {TK::sodium_mg, 575}}), cfg()), 0.0);
    expect_domain(score_minerals(fs_test::zero_profile(), cfg()), 0.0);
    expect_domain(score_minerals(with({{TK::potassium_mg, 587.5}}), cfg()), 1.0);
    EXPECT_EQ(cfg().minerals.size(), 9u);
}

TEST(D3, MagnitudeSelectionKeepsSodium)
{
    // five positive scores of 4 and sodium -10: sodium displaces one of the ties
    const auto p = with({{TK::calcium_mg, 100}, {TK::iron_mg, 1.8}, {TK::magnesium_mg, 42}, {TK::phosphorus_mg, 70},
                         {TK::potassium_mg, 470}, {TK::sodium_mg, 575}});
    expect_domain(score_minerals(p, cfg()), (4.0 * 4 - 10.0) / 5.0);
}

TEST(D4, Examples)
{
    expect_domain(score_ingredients(with({{TK::fruits, 0.875}, {TK::refined_grains, 1.38}}), cfg()), -5.0);
    expect_domain(score_ingredients(fs_test::zero_profile(), cfg()), 0.0);
    auto p = fs_test::zero_profile();
    for (const auto& a : cfg().ingredients) {
        if (a.direction == Direction::ascending) p.set(a.keys.front(), a.h);
    }
    expect_domain(score_ingredients(p, cfg()), 80.0);
}

TEST(D4, RedAndProcessedMeatSummed)
{
    expect_domain(score_ingredients(with({{TK::red_meat, 1.345}}), cfg()), -5.0);
    expect_domain(score_ingredients(with({{TK::red_meat, 1.0}, {TK::cured_meat, 1.69}}), cfg()), -10.0);
}

TEST(D5, Examples)
{
    expect_domain(score_additives(with({{TK::added_sugar_g, 7.5}}), cfg()), -2.5);
    expect_domain(score_additives(fs_test::zero_profile(), cfg()), 0.0);
    const auto r = score_additives(with({{TK::added_sugar_g, 15}}), cfg());
    EXPECT_DOUBLE_EQ(r.subs[0].score, -10.0);
    EXPECT_DOUBLE_EQ(score_additives(with({{TK::added_sugar_g, 40}}), cfg()).subs[0].score, -10.0);
}

TEST(D5, SugarBreakpoints)
{
    auto c = cfg();
    c.sugar_breakpoints = {{0, 0}, {20, -2}, {60, -10}};
    EXPECT_DOUBLE_EQ(score_additives(with({{TK::added_sugar_g, 2.5}}), c).subs[0].score, -1.0);
    EXPECT_DOUBLE_EQ(score_additives(with({{TK::added_sugar_g, 10}}), c).subs[0].score, -6.0);
}

TEST(D5, NitriteCapped)
{
    const auto r = score_additives(with({{TK::cured_meat, 0.5}}), cfg());
    EXPECT_DOUBLE_EQ(r.subs[1].input, 25.0);
    EXPECT_DOUBLE_EQ(r.subs[1].score, -5.0);
    EXPECT_DOUBLE_EQ(score_additives(with({{TK::cured_meat, 5}}), cfg()).subs[1].input, 100.0);
}

TEST(Nova, Interpolation)
{
    const auto& a = cfg().nova_anchors;
    EXPECT_DOUBLE_EQ(nova_interpolate(1.0, a), 10.0);
    EXPECT_DOUBLE_EQ(nova_interpolate(2.5, a), 6.25);
    EXPECT_DOUBLE_EQ(nova_interpolate(4.0, a), -10.0);
    EXPECT_DOUBLE_EQ(nova_interpolate(0.2, a), 10.0);
}

TEST(D6, Examples)
{
    expect_domain(score_processing(with({{TK::fried_flag, 1}}, 4.0), "snack", cfg()), -7.5);
    expect_domain(score_processing(with({{TK::fermented_pct, 100}}, 1.0), "x", cfg()), 7.5);
    expect_domain(score_processing(fs_test::zero_profile(), "apple", cfg()), 5.0);
}

TEST(D6, KeywordOverrides)
{
    expect_domain(score_processing(fs_test::zero_profile(4.0), "fried chicken", cfg()), -7.5);
    expect_domain(score_processing(fs_test::zero_profile(), "plain yogurt", cfg()), 7.5);
    expect_domain(score_processing(with({{TK::fermented_pct, 51}}), "x", cfg()), 7.5);
    expect_domain(score_processing(with({{TK::fermented_pct, 50}}), "x", cfg()), 6.25);
    expect_domain(score_processing(fs_test::zero_profile(), "frieda's salad", cfg()), 5.0);
}

TEST(D7, Examples)
{
    expect_domain(score_lipids(with({{TK::epa_g, 0.0625}, {TK::cholesterol_mg, 75}}), cfg()), 1.25);
    expect_domain(score_lipids(fs_test::zero_profile(), cfg()), 0.0);
}

TEST(D7, OnlyAla)
{
    // table order breaks the zero ties: cholesterol (0.5) and EPA+DHA (1.0) join ALA
    expect_domain(score_lipids(with({{TK::ala_g, 0.4}}), cfg()), 0.5 * (10.0 * 0.5) / (0.5 + 1.0 + 0.5));
}

TEST(D7, MctIncludesLauric)
{
    expect_domain(score_lipids(with({{TK::lauric_g, 0.32}}), cfg()), 0.5 * 5.0 / 2.0);
    auto c = cfg();
    c.mct_includes_lauric = false;
    expect_domain(score_lipids(with({{TK::lauric_g, 0.32}}), c), 0.0);
}

TEST(D8, Examples)
{
    expect_domain(score_fiber_protein(with({{TK::fiber_g, 9.5}, {TK::protein_g, 7}}), cfg()), 8.333, 1e-3);
    expect_domain(score_fiber_protein(fs_test::zero_profile(), cfg()), 0.0);
    expect_domain(score_fiber_protein(with({{TK::protein_g, 14}}), cfg()), 3.333, 1e-3);
}

TEST(D9, Examples)
{
    expect_domain(score_phytochemicals(with({{TK::flavonoids_mg, 23.53}}), cfg()), 2.5);
    expect_domain(score_phytochemicals(with({{TK::flavonoids_mg, 23.53}, {TK::carotenoids_mcg, 8746.81}}), cfg()), 5.0);
    expect_domain(score_phytochemicals(fs_test::zero_profile(), cfg()), 0.0);
}

TEST(Final, FixedPoints)
{
    EXPECT_EQ(final_transform(29.94, cfg()), 100);
    EXPECT_EQ(final_transform(1000.0, cfg()), 100);
    EXPECT_EQ(final_transform(-12.43, cfg()), 1);
    EXPECT_EQ(final_transform(-500.0, cfg()), 1);
    EXPECT_EQ(final_transform(8.755, cfg()), 51);
    EXPECT_EQ(final_transform(5.0, cfg()), 42);
}

TEST(Final, MonotoneInRawSum)
{
    int prev = 0;
    for (double x = -20.0; x <= 40.0; x += 0.001) {
        const int s = final_transform(x, cfg());
        EXPECT_GE(s, prev);
        EXPECT_GE(s, 1);
        EXPECT_LE(s, 100);
        prev = s;
    }
}

TEST(Total, ZeroProfileGolden)
{
    const auto b = total_fcs(fs_test::zero_profile(), "water", cfg());
    for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(b.domains[i], i == 5 ? 5.0 : 0.0);
    EXPECT_EQ(b.raw_sum, 5.0);
    EXPECT_EQ(b.final_score, 42);
}

TEST(Total, BeneficialMaximaScore100)
{
    auto p = fs_test::zero_profile();
    for (const auto* table : {&cfg().vitamins, &cfg().minerals, &cfg().ingredients}) {
        for (const auto& a : *table) {
            if (a.direction == Direction::ascending) p.set(a.keys.front(), a.h);
        }
    }
    p.set(TK::fiber_g, 9.5);
    p.set(TK::protein_g, 14);
    EXPECT_EQ(total_fcs(p, "x", cfg()).final_score, 100);
}

TEST(Total, AuditCoversEveryDomain)
{
    const auto b = total_fcs(fs_test::zero_profile(), "water", cfg());
    std::set<std::string> domains;
    for (const auto& s : b.audit) domains.insert(s.domain);
    EXPECT_EQ(domains.size(), 9u);
    EXPECT_EQ(b.audit.size(), 3u + 12 + 9 + 10 + 2 + 3 + 4 + 2 + 2);
}

TEST(Total, Errors)
{
    auto p = fs_test::zero_profile();
    p.clear(TK::sodium_mg);
    try {
        total_fcs(p, "x", cfg());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MissingTarget);
    }
    NutrientProfile mass(Basis::per_100g);
    for (const auto& t : target_registry()) mass.set(t.key, 1.0);
    try {
        total_fcs(mass, "x", cfg());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
    }
}

TEST(Total, LiteralModeChangesZeroProfile)
{
    auto c = cfg();
    c.literal_formula_mode = true;
    const auto b = total_fcs(fs_test::zero_profile(), "water", c);
    EXPECT_DOUBLE_EQ(b.domains[4], -10.0);
    EXPECT_DOUBLE_EQ(b.domains[3], -20.0);
    EXPECT_LT(b.final_score, 42);
}

TEST(Total, ProseClip)
{
    auto c = cfg();
    c.use_prose_clip();
    EXPECT_DOUBLE_EQ(c.low_clip, -12.80);
    EXPECT_DOUBLE_EQ(c.high_clip, 29.42);
    EXPECT_EQ(final_transform(29.42, c), 100);
    EXPECT_EQ(final_transform(-12.80, c), 1);
}

TEST(Oracle, HandProfilesAgree)
{
    const auto cases = fcs_cases::hand_cases();
    ASSERT_GE(cases.size(), 20u);
    for (const auto& k : cases) {
        const auto got = total_fcs(k.profile, k.description, cfg());
        const auto want = fcs_oracle::evaluate(oracle_values(k.profile), k.description);
        for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(got.domains[i], want.d[i], 1e-9) << k.description << " D" << i + 1;
        EXPECT_EQ(got.final_score, want.final_score) << k.description;
    }
}

TEST(Oracle, RandomProfilesAgree)
{
    Rng rng(31);
    const std::vector<std::string> words{"fried", "yogurt", "milk", "bread", "kimchi", "chicken", "salad", "donut"};
    for (int n = 0; n < 300; ++n) {
        auto p = fs_test::zero_profile(rng.uniform(1.0, 4.0));
        for (const auto& t : target_registry()) {
            if (t.key == TK::nova_class) continue;
            if (rng.uniform() < 0.6) p.set(t.key, rng.uniform(0.0, 2.0) * (t.unit == Unit::mg ? 200.0 : t.unit == Unit::mcg ? 500.0 : 5.0));
        }
        p.set(TK::fried_flag, rng.uniform() < 0.2 ? 1.0 : 0.0);
        p.set(TK::fermented_pct, rng.uniform(0.0, 100.0));
        const std::string desc = words[rng.below(words.size())] + " " + words[rng.below(words.size())];
        const auto got = total_fcs(p, desc, cfg());
        const auto want = fcs_oracle::evaluate(oracle_values(p), desc);
        for (std::size_t i = 0; i < 9; ++i) ASSERT_NEAR(got.domains[i], want.d[i], 1e-9) << desc << " D" << i + 1;
        ASSERT_EQ(got.final_score, want.final_score);
    }
}

TEST(Config, JsonRoundTrip)
{
    const auto c = cfg();
    const auto back = ScoringConfig::from_json(nlohmann::json::parse(c.to_json().dump()));
    EXPECT_EQ(back.to_json(), c.to_json());
    EXPECT_EQ(total_fcs(fs_test::zero_profile(), "x", back).final_score, 42);
}

TEST(Config, OverridesAndRejects)
{
    const auto c = ScoringConfig::from_json({{"literal_formula_mode", true}, {"clip_preset", "prose"}});
    EXPECT_TRUE(c.literal_formula_mode);
    EXPECT_DOUBLE_EQ(c.high_clip, 29.42);
    EXPECT_EQ(c.vitamins.size(), 12u);
    EXPECT_THROW(ScoringConfig::from_json({{"unknown", 1}}), Error);
    EXPECT_THROW(ScoringConfig::from_json({{"fiber_h", -1.0}}), Error);
}

TEST(Property, FiberNeverLowersScore)
{
    Rng rng(12);
    for (int i = 0; i < 1000; ++i) {
        auto p = with({{TK::fiber_g, rng.uniform(0, 12)}, {TK::carbohydrate_g, rng.uniform(0, 30)}, {TK::protein_g, rng.uniform(0, 20)},
                       {TK::sodium_mg, rng.uniform(0, 800)}, {TK::potassium_mg, rng.uniform(0, 800)}},
                      rng.uniform(1, 4));
        const int base = total_fcs(p, "food", cfg()).final_score;
        p.set(TK::fiber_g, p.get(TK::fiber_g) + rng.uniform(0, 10));
        ASSERT_GE(total_fcs(p, "food", cfg()).final_score, base);
    }
}

TEST(Property, SodiumNeverRaisesScoreWhileGateStateHolds)
{
    Rng rng(13);
    for (int i = 0; i < 1000; ++i) {
        auto p = with({{TK::sodium_mg, rng.uniform(10, 800)}, {TK::potassium_mg, rng.uniform(0, 800)}, {TK::fiber_g, rng.uniform(0, 5)},
                       {TK::carbohydrate_g, rng.uniform(0, 30)}, {TK::saturated_fat_g, rng.uniform(0, 5)}},
                      rng.uniform(1, 4));
        const int base = total_fcs(p, "food", cfg()).final_score;
        p.set(TK::sodium_mg, p.get(TK::sodium_mg) + rng.uniform(0, 600));
        ASSERT_LE(total_fcs(p, "food", cfg()).final_score, base);
    }
}

TEST(Property, SodiumOpeningRatioGateCanRaiseScore)
{
    // known gap in sodium monotonicity: crossing the 10 mg gate adds a K/Na sub-score to the D1 mean
    const auto before = with({{TK::saturated_fat_g, 2}, {TK::unsaturated_fat_g, 0.2}, {TK::potassium_mg, 300}, {TK::sodium_mg, 5}});
    auto after = before;
    after.set(TK::sodium_mg, 15);
    EXPECT_GT(total_fcs(after, "x", cfg()).raw_sum, total_fcs(before, "x", cfg()).raw_sum);
}
