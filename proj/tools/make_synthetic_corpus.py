#!/usr/bin/env python3
"""Writes the bundled synthetic corpus under data/synthetic.

57 nutrient rows go in. Seven carry a known defect, so 50 records survive
ingestion:

  S900  only in the nutrient table (dropped by the join)
  S901  N/A sodium (missing value)
  S902  negative iron
  S903  "Pickup truck tires" (non-food)
  S904  "Laptop computer charger" (non-food)
  S905  0.5 kcal per 100 g (near-zero energy)
  S906  "12345" (no alphabetic token)

Published scores come from the package's own scorer applied to the cleaned
per-100-kcal profile. They are needed only for validation runs.
"""

import argparse
import csv
import json
import random
from pathlib import Path

NUTRIENT_FIELDS = [
    "calories", "protein_g", "carbohydrate_g", "fiber_g", "saturated_fat_g", "unsaturated_fat_g",
    "cholesterol_mg", "epa_g", "dha_g", "ala_g", "caprylic_g", "capric_g", "lauric_g", "added_sugar_g",
    "carotenoids_mcg",
    "vitamin_a_rae_mcg", "thiamin_mg", "riboflavin_mg", "niacin_mg", "vitamin_b6_mg", "folate_dfe_mcg",
    "vitamin_b12_mcg", "vitamin_c_mg", "vitamin_d_mcg", "vitamin_e_mg", "vitamin_k_mcg", "choline_mg",
    "calcium_mg", "iron_mg", "magnesium_mg", "phosphorus_mg", "potassium_mg", "zinc_mg", "copper_mg",
    "selenium_mcg", "sodium_mg",
    "nova_class", "fermented_pct", "fried_flag",
]
PATTERN_FIELDS = [
    "fruits", "nonstarchy_vegetables", "beans_legumes", "nuts_seeds", "whole_grains", "refined_grains",
    "total_grains", "seafood", "yogurt", "red_meat", "cured_meat", "plant_oils_g",
]
NOT_MASS = {"calories", "nova_class", "fermented_pct", "fried_flag"}

BASE = {
    "protein_g": 2, "carbohydrate_g": 10, "fiber_g": 1, "saturated_fat_g": 0.3, "unsaturated_fat_g": 0.6,
    "cholesterol_mg": 0, "epa_g": 0, "dha_g": 0, "ala_g": 0.02, "caprylic_g": 0, "capric_g": 0, "lauric_g": 0,
    "added_sugar_g": 0, "carotenoids_mcg": 50, "flavonoids_mg": 1,
    "vitamin_a_rae_mcg": 10, "thiamin_mg": 0.05, "riboflavin_mg": 0.05, "niacin_mg": 0.5, "vitamin_b6_mg": 0.05,
    "folate_dfe_mcg": 10, "vitamin_b12_mcg": 0, "vitamin_c_mg": 2, "vitamin_d_mcg": 0, "vitamin_e_mg": 0.3,
    "vitamin_k_mcg": 2, "choline_mg": 10, "calcium_mg": 15, "iron_mg": 0.4, "magnesium_mg": 12,
    "phosphorus_mg": 30, "potassium_mg": 150, "zinc_mg": 0.3, "copper_mg": 0.05, "selenium_mcg": 1,
    "sodium_mg": 10, "nova_class": 1, "fermented_pct": 0, "fried_flag": 0,
}

ARCHETYPES = {
    "fruit": dict(calories=55, carbohydrate_g=14, fiber_g=2.4, vitamin_c_mg=30, potassium_mg=180, carotenoids_mcg=150,
                  flavonoids_mg=12, fruits=0.6, protein_g=0.6, unsaturated_fat_g=0.2, saturated_fat_g=0.05),
    "vegetable": dict(calories=30, carbohydrate_g=6, fiber_g=2.6, vitamin_c_mg=40, vitamin_k_mcg=120, folate_dfe_mcg=60,
                      carotenoids_mcg=3000, potassium_mg=300, nonstarchy_vegetables=0.9, flavonoids_mg=5, protein_g=2.5,
                      unsaturated_fat_g=0.2, saturated_fat_g=0.05, vitamin_a_rae_mcg=300),
    "whole_grain": dict(calories=120, carbohydrate_g=24, fiber_g=3.5, protein_g=4, magnesium_mg=45, thiamin_mg=0.2,
                        niacin_mg=2, whole_grains=1.1, total_grains=1.1, iron_mg=1.2, zinc_mg=1.0, nova_class=1.5),
    "refined_grain": dict(calories=260, carbohydrate_g=50, fiber_g=1.5, protein_g=8, sodium_mg=450, refined_grains=1.9,
                          total_grains=1.9, added_sugar_g=4, thiamin_mg=0.4, niacin_mg=4, iron_mg=3, folate_dfe_mcg=150,
                          nova_class=3.5),
    "red_meat": dict(calories=250, carbohydrate_g=0, fiber_g=0, protein_g=26, saturated_fat_g=6, unsaturated_fat_g=7,
                     cholesterol_mg=85, vitamin_b12_mcg=2.5, zinc_mg=6, iron_mg=2.6, red_meat=3.5, selenium_mcg=22,
                     phosphorus_mg=200, sodium_mg=70, potassium_mg=320, nova_class=1.2, choline_mg=90),
    "cured_meat": dict(calories=300, carbohydrate_g=2, fiber_g=0, protein_g=18, saturated_fat_g=9, unsaturated_fat_g=12,
                       cholesterol_mg=70, sodium_mg=1100, cured_meat=3.0, nova_class=4, vitamin_b12_mcg=1, zinc_mg=2.5),
    "poultry": dict(calories=165, carbohydrate_g=0, fiber_g=0, protein_g=30, saturated_fat_g=1, unsaturated_fat_g=2.5,
                    cholesterol_mg=85, niacin_mg=13, vitamin_b6_mg=0.6, selenium_mcg=27, phosphorus_mg=220,
                    potassium_mg=250, sodium_mg=75, nova_class=1.2, choline_mg=85),
    "fish": dict(calories=180, carbohydrate_g=0, fiber_g=0, protein_g=22, saturated_fat_g=2, unsaturated_fat_g=7,
                 cholesterol_mg=60, epa_g=0.7, dha_g=1.2, vitamin_d_mcg=11, vitamin_b12_mcg=3, selenium_mcg=36,
                 seafood=3.5, sodium_mg=60, potassium_mg=360, nova_class=1.1),
    "dairy": dict(calories=60, carbohydrate_g=5, fiber_g=0, protein_g=3.3, saturated_fat_g=1.9, unsaturated_fat_g=1,
                  cholesterol_mg=10, calcium_mg=120, vitamin_b12_mcg=0.5, riboflavin_mg=0.18, vitamin_d_mcg=1.2,
                  sodium_mg=45, potassium_mg=150, caprylic_g=0.03, capric_g=0.07, lauric_g=0.08, nova_class=1.5),
    "yogurt": dict(calories=75, carbohydrate_g=8, fiber_g=0, protein_g=5, saturated_fat_g=1.2, unsaturated_fat_g=0.6,
                   calcium_mg=170, yogurt=0.45, fermented_pct=100, nova_class=2, sodium_mg=50, potassium_mg=210,
                   added_sugar_g=3, caprylic_g=0.02, capric_g=0.04, lauric_g=0.05),
    "cheese": dict(calories=380, carbohydrate_g=2, fiber_g=0, protein_g=24, saturated_fat_g=19, unsaturated_fat_g=9,
                   cholesterol_mg=100, calcium_mg=700, sodium_mg=650, fermented_pct=80, nova_class=3,
                   caprylic_g=0.25, capric_g=0.6, lauric_g=0.7, vitamin_a_rae_mcg=260, zinc_mg=3.5, phosphorus_mg=500),
    "legume": dict(calories=130, carbohydrate_g=22, fiber_g=7, protein_g=8.5, saturated_fat_g=0.1, unsaturated_fat_g=0.4,
                   folate_dfe_mcg=150, magnesium_mg=45, potassium_mg=400, iron_mg=2.2, beans_legumes=0.9, sodium_mg=5,
                   ala_g=0.1, nova_class=1.2, flavonoids_mg=2),
    "nut": dict(calories=600, carbohydrate_g=20, fiber_g=9, protein_g=20, saturated_fat_g=5, unsaturated_fat_g=45,
                ala_g=2.5, vitamin_e_mg=20, magnesium_mg=250, copper_mg=1.1, nuts_seeds=7, sodium_mg=3,
                potassium_mg=650, nova_class=1.3, flavonoids_mg=15),
    "sweet": dict(calories=420, carbohydrate_g=62, fiber_g=1.5, protein_g=5, saturated_fat_g=9, unsaturated_fat_g=8,
                  added_sugar_g=38, sodium_mg=320, refined_grains=0.8, total_grains=0.8, nova_class=4, cholesterol_mg=40),
    "sweet_drink": dict(calories=42, carbohydrate_g=10.6, fiber_g=0, protein_g=0, saturated_fat_g=0, unsaturated_fat_g=0,
                        added_sugar_g=10.5, sodium_mg=10, potassium_mg=5, nova_class=4),
    "fried_snack": dict(calories=520, carbohydrate_g=52, fiber_g=4, protein_g=6, saturated_fat_g=4, unsaturated_fat_g=28,
                        sodium_mg=520, potassium_mg=1200, fried_flag=1, nova_class=4, plant_oils_g=30, vitamin_e_mg=5),
    "oil": dict(calories=880, carbohydrate_g=0, fiber_g=0, protein_g=0, saturated_fat_g=14, unsaturated_fat_g=84,
                ala_g=5, vitamin_e_mg=14, vitamin_k_mcg=60, plant_oils_g=100, sodium_mg=0, potassium_mg=0, nova_class=2),
    "egg": dict(calories=145, carbohydrate_g=0.7, fiber_g=0, protein_g=12.5, saturated_fat_g=3.1, unsaturated_fat_g=5.7,
                cholesterol_mg=370, choline_mg=290, vitamin_b12_mcg=0.9, selenium_mcg=30, vitamin_d_mcg=2,
                riboflavin_mg=0.45, sodium_mg=140, nova_class=1),
    "mixed_dish": dict(calories=230, carbohydrate_g=24, fiber_g=2.2, protein_g=11, saturated_fat_g=4, unsaturated_fat_g=5,
                       cholesterol_mg=30, sodium_mg=540, refined_grains=1.0, total_grains=1.2, whole_grains=0.2,
                       nonstarchy_vegetables=0.3, red_meat=0.6, calcium_mg=120, nova_class=3.2),
}

FOODS = [
    ("Apple, raw, with skin", "fruit", "Fruits"),
    ("Banana, raw", "fruit", "Fruits"),
    ("Strawberries, raw", "fruit", "Fruits"),
    ("Orange, raw", "fruit", "Fruits"),
    ("Blueberries, frozen, unsweetened", "fruit", "Fruits"),
    ("Broccoli, steamed", "vegetable", "Vegetables"),
    ("Spinach, raw", "vegetable", "Vegetables"),
    ("Carrots, baked", "vegetable", "Vegetables"),
    ("Kale, sauteed with garlic", "vegetable", "Vegetables"),
    ("Tomatoes, raw", "vegetable", "Vegetables"),
    ("Oatmeal, cooked with water", "whole_grain", "Grains"),
    ("Brown rice, cooked", "whole_grain", "Grains"),
    ("Bread, whole wheat", "whole_grain", "Grains"),
    ("Quinoa, cooked", "whole_grain", "Grains"),
    ("Bread, white", "refined_grain", "Grains"),
    ("Bagel, plain", "refined_grain", "Grains"),
    ("Pasta, white, cooked", "refined_grain", "Grains"),
    ("Beef steak, grilled", "red_meat", "Meats"),
    ("Ground beef, pan browned", "red_meat", "Meats"),
    ("Pork chop, baked", "red_meat", "Meats"),
    ("Bacon, cured, cooked", "cured_meat", "Cured meats"),
    ("Salami, sliced", "cured_meat", "Cured meats"),
    ("Hot dog, beef frankfurter", "cured_meat", "Cured meats"),
    ("Chicken breast, grilled", "poultry", "Poultry"),
    ("Turkey, roasted", "poultry", "Poultry"),
    ("Chicken thigh, baked", "poultry", "Poultry"),
    ("Salmon, baked", "fish", "Seafood"),
    ("Tuna, canned in water", "fish", "Seafood"),
    ("Sardines, canned in oil", "fish", "Seafood"),
    ("Milk, whole", "dairy", "Dairy"),
    ("Milk, low fat", "dairy", "Dairy"),
    ("Yogurt, plain, low fat", "yogurt", "Dairy"),
    ("Greek yogurt, strawberry", "yogurt", "Dairy"),
    ("Cheddar cheese", "cheese", "Dairy"),
    ("Black beans, cooked", "legume", "Legumes"),
    ("Lentils, boiled", "legume", "Legumes"),
    ("Chickpeas, canned", "legume", "Legumes"),
    ("Almonds, raw", "nut", "Nuts and seeds"),
    ("Walnuts, shelled", "nut", "Nuts and seeds"),
    ("Chocolate chip cookie", "sweet", "Sweets"),
    ("Glazed doughnut", "sweet", "Sweets"),
    ("Cola soda, sweetened", "sweet_drink", "Beverages"),
    ("Fruit drink, sweetened", "sweet_drink", "Beverages"),
    ("Potato chips, fried, salted", "fried_snack", "Snacks"),
    ("French fries, fried", "fried_snack", "Snacks"),
    ("Olive oil", "oil", "Fats and oils"),
    ("Canola oil", "oil", "Fats and oils"),
    ("Egg, scrambled", "egg", "Eggs"),
    ("Cheese pizza, thin crust", "mixed_dish", "Mixed dishes"),
    ("Grilled chicken sandwich with lettuce and tomato", "mixed_dish", "Mixed dishes"),
]

DEFECTS = [
    ("S900", "Pear, raw", "fruit", "Fruits", {}),
    ("S901", "Turkey sausage, smoked", "cured_meat", "Cured meats", {"sodium_mg": "N/A"}),
    ("S902", "Spinach, canned", "vegetable", "Vegetables", {"iron_mg": -1.5}),
    ("S903", "Pickup truck tires", "oil", None, {}),
    ("S904", "Laptop computer charger", "oil", None, {}),
    ("S905", "Water, tap", "sweet_drink", "Beverages", {"calories": 0.5}),
    ("S906", "12345", "fruit", None, {}),
]


def jitter(rng, value, key):
    if key in ("nova_class", "fermented_pct", "fried_flag"):
        return value
    return round(value * rng.uniform(0.8, 1.2), 4)


def food_values(rng, archetype):
    spec = dict(BASE)
    for k in PATTERN_FIELDS:
        spec.setdefault(k, 0.0)
    spec.update(ARCHETYPES[archetype])
    return {k: jitter(rng, v, k) for k, v in spec.items()}


def per_100kcal(values):
    kcal = values["calories"]
    return {k: (v if k in NOT_MASS else v * 100.0 / kcal) for k, v in values.items()}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "synthetic"))
    ap.add_argument("--seed", type=int, default=20240611)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)

    rows = []
    for i, (desc, arch, cat) in enumerate(FOODS):
        rows.append((f"S{100 + i:03d}", desc, cat, food_values(rng, arch)))
    for code, desc, arch, cat, patch in DEFECTS:
        values = food_values(rng, arch)
        values.update(patch)
        rows.append((code, desc, cat, values))

    with open(out / "nutrients.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["food_code", "description", "category"] + NUTRIENT_FIELDS)
        for code, desc, cat, v in rows:
            w.writerow([code, desc, cat or ""] + [v[k] for k in NUTRIENT_FIELDS])

    with open(out / "food_patterns.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["food_code"] + PATTERN_FIELDS)
        for code, _, _, v in rows:
            if code != "S900":
                w.writerow([code] + [v[k] for k in PATTERN_FIELDS])

    # flavonoid coverage is partial: every third food is missing and gets imputed as 0
    flav_codes = set()
    with open(out / "flavonoids.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["food_code", "flavonoids_mg"])
        for i, (code, _, _, v) in enumerate(rows):
            if i % 3 != 2:
                w.writerow([code, v["flavonoids_mg"]])
                flav_codes.add(code)

    try:
        import foodscore
    except ImportError:
        foodscore = None
    with open(out / "published_scores.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["food_code", "published_fcs"])
        for i, (code, desc, _, v) in enumerate(rows[: len(FOODS)]):
            if i % 10 == 9:
                continue  # unlabeled rows exercise the exclusion count
            v = dict(v)
            if code not in flav_codes:
                v["flavonoids_mg"] = 0.0
            if foodscore is None:
                raise SystemExit("the foodscore module must be importable to compute published scores")
            result = foodscore.score_profile({"basis": "per_100kcal", "profile": per_100kcal(v)}, desc)
            w.writerow([code, result["final_score"]])

    config = {
        "comment": "Small network widths keep two full ingest/train/validate runs under two minutes on one core.",
        "seed": 7,
        "sources": {
            "nutrients": {"path": "nutrients.csv"},
            "food_patterns": {"path": "food_patterns.csv"},
            "flavonoids": {"path": "flavonoids.csv"},
            "published_scores": {"path": "published_scores.csv"},
        },
        "dataset": "out/dataset.jsonl",
        "bundle": "out/bundle",
        "validation_dir": "out/validation",
        "stop_words": "../stopwords.txt",
        "denylist": "../denylist.txt",
        "augmentation": "../augmentation.json",
        "heuristics": "../heuristics.json",
        "embedding": {"dimension": 384},
        "featurizer": {"tfidf_max_features": 1024},
        "model": {"encoder_hidden": [64, 48], "embedding_dim": 32, "head_hidden": [32, 16], "dropout": 0.3},
        "training": {"max_epochs": 300},
        "jobs": 1,
    }
    with open(out / "config.json", "w") as f:
        json.dump(config, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
