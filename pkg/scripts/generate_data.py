#!/usr/bin/env python3
"""Regenerate the packaged data files (catalog, layouts, tasks).

Deterministic: a fixed SplitMix64 seed drives every draw, so rerunning
this script reproduces the committed JSON byte for byte.
"""

from __future__ import annotations

import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from sari_sim.rng import Rng64  # noqa: E402

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "src", "sari_sim", "data")
SEED = 0x5A71_5A4D

COUNTS = {
    "Water": 12, "Soda": 23, "Juice": 16, "Dairy": 20, "Biscuit": 50,
    "Can": 59, "Chips": 40, "Nuts": 15, "Soup": 6, "Noodles": 7, "Liquor": 2,
}

PREFIX = {
    "Water": "WAT", "Soda": "SOD", "Juice": "JUI", "Dairy": "DAI",
    "Biscuit": "BIS", "Can": "CAN", "Chips": "CHI", "Nuts": "NUT",
    "Soup": "SOU", "Noodles": "NOO", "Liquor": "LIQ",
}

BRANDS = {
    "Water": ["Crystal Falls", "Aqua Prima", "Hilltop", "Blue Well"],
    "Soda": ["Fizz Pop", "Sarsi Cool", "Lemon Dash", "Cola Rey", "Bubble Up"],
    "Juice": ["Sun Grove", "Tropic Press", "Mango Lane", "Calamansi Co"],
    "Dairy": ["Carabao Farms", "Morning Moo", "Bahay Gatas", "Creamline"],
    "Biscuit": ["Munch Time", "Baker Jo", "Crunchies", "Sweet Salo", "Biskwit Plus"],
    "Can": ["Golden Bay", "Sea Harvest", "Pantry Pride", "Isla Foods", "Manok Rico"],
    "Chips": ["Krunch King", "Snacku", "Papa Chips", "Corn Loco", "Saltina"],
    "Nuts": ["Nutty Bay", "Mani Mani", "Cashew Casa", "Adobo Nut"],
    "Soup": ["Warm Bowl", "Sopa Mia", "Hearth"],
    "Noodles": ["Pancit Plus", "Lucky Slurp", "Mami Quick"],
    "Liquor": ["Tanduay Sol", "Ginebra Luna"],
}

VARIANTS = {
    "Water": ["Purified", "Mineral", "Spring", "Sparkling", "Alkaline", "Distilled"],
    "Soda": ["Cola", "Root Beer", "Lemon Lime", "Orange", "Grape", "Strawberry"],
    "Juice": ["Mango", "Calamansi", "Pineapple", "Orange", "Guyabano", "Four Seasons"],
    "Dairy": ["Fresh Milk", "Choco Milk", "Yogurt Drink", "Condensada", "Evaporada"],
    "Biscuit": [
        "Strawberry Cream", "Chocolate", "Butter", "Cheese", "Calamansi Cream",
        "Peanut", "Coconut", "Ube", "Milk Sandwich", "Graham", "Vanilla Wafer",
        "Pandan",
    ],
    "Can": [
        "Tuna Flakes in Oil", "Sardines in Tomato", "Corned Beef", "Meat Loaf",
        "Spicy Sardines", "Tuna Chunks", "Liver Spread", "Luncheon Meat",
        "Squid in Ink", "Beef Loaf", "Mackerel", "Mechado",
    ],
    "Chips": [
        "BBQ", "Cheese", "Sour Cream", "Salted", "Chili", "Garlic",
        "Sweet Corn", "Nori", "Adobo", "Original",
    ],
    "Nuts": ["Salted", "Garlic", "Spicy", "Honey", "Adobo", "Plain Roast"],
    "Soup": ["Chicken Noodle", "Mushroom", "Corn", "Tomato", "Beef Bulalo", "Crab"],
    "Noodles": ["Beef Mami", "Chicken", "Calamansi Pancit", "Spicy Lomi", "Batchoy"],
    "Liquor": ["Dark Rum", "Gin Premium"],
}

FORM = {
    "Water": "Bottle", "Soda": "Bottle", "Juice": "Pack", "Dairy": "Carton",
    "Biscuit": "Biscuits", "Can": "Can", "Chips": "Chips", "Nuts": "Nuts",
    "Soup": "Soup Can", "Noodles": "Instant Noodles", "Liquor": "Bottle",
}

MESH_CLASS = {
    "Water": "complex", "Soda": "complex", "Liquor": "complex",
    "Juice": "deformable", "Chips": "deformable", "Nuts": "deformable",
    "Dairy": "simple", "Biscuit": "simple", "Can": "simple",
    "Soup": "simple", "Noodles": "simple",
}

# (price_lo, price_hi) cents; (weight_lo, weight_hi) g;
# extents (x_lo, x_hi, y_lo, y_hi, z policy) in mm, z: "x" copies x
RANGES = {
    "Water": (1200, 2500, 330, 1000, (28, 40, 90, 120, "x")),
    "Soda": (2500, 6000, 240, 500, (28, 36, 80, 115, "x")),
    "Juice": (2000, 5500, 200, 1000, (30, 45, 60, 100, (24, 34))),
    "Dairy": (3000, 9000, 250, 1000, (30, 45, 50, 95, (28, 45))),
    "Biscuit": (800, 4500, 30, 300, (42, 65, 55, 100, (18, 30))),
    "Can": (2500, 9500, 150, 400, (30, 40, 40, 62, "x")),
    "Chips": (1500, 8000, 25, 200, (48, 70, 80, 130, (22, 34))),
    "Nuts": (3000, 9000, 70, 250, (34, 50, 60, 92, (18, 30))),
    "Soup": (3500, 7000, 280, 420, (32, 38, 45, 58, "x")),
    "Noodles": (900, 2200, 55, 90, (38, 55, 24, 40, (38, 55))),
    "Liquor": (8000, 16000, 350, 750, (34, 45, 125, 158, "x")),
}

# nutrition per 100 g: (kcal, sugar_g*10, sodium_mg, fat_g*10, protein_g*10)
NUTRITION = {
    "Water": ((0, 0), (0, 5), (0, 30), (0, 0), (0, 0)),
    "Soda": ((30, 55), (70, 130), (5, 45), (0, 2), (0, 2)),
    "Juice": ((35, 70), (60, 160), (5, 40), (0, 5), (0, 10)),
    "Dairy": ((45, 180), (40, 120), (35, 120), (5, 80), (25, 60)),
    "Biscuit": ((380, 520), (150, 420), (150, 500), (120, 280), (40, 90)),
    "Can": ((90, 310), (5, 60), (300, 900), (20, 220), (120, 250)),
    "Chips": ((450, 560), (10, 80), (350, 900), (200, 380), (50, 90)),
    "Nuts": ((520, 640), (30, 90), (100, 600), (400, 560), (180, 280)),
    "Soup": ((35, 90), (10, 50), (250, 700), (5, 45), (15, 60)),
    "Noodles": ((330, 460), (30, 90), (900, 1800), (120, 220), (70, 110)),
    "Liquor": ((220, 280), (0, 20), (0, 20), (0, 0), (0, 0)),
}

INGREDIENT_BASE = {
    "Water": "purified water, minerals",
    "Soda": "carbonated water, sugar, acidulant, natural flavors, caramel color",
    "Juice": "water, fruit concentrate, sugar, vitamin C, natural flavor",
    "Dairy": "fresh carabao milk, sugar, stabilizer, vitamin D",
    "Biscuit": "wheat flour, sugar, vegetable shortening, cream filling, leavening",
    "Can": "fish or meat, water, vegetable oil, salt, spices",
    "Chips": "corn, vegetable oil, seasoning, salt, monosodium glutamate",
    "Nuts": "peanuts, vegetable oil, salt, garlic",
    "Soup": "water, vegetables, meat stock, modified starch, salt",
    "Noodles": "wheat flour noodles, palm oil, seasoning powder, dried vegetables",
    "Liquor": "sugarcane distillate, water, caramel",
}

ALLERGENS = {
    "Water": [], "Soda": [], "Juice": [], "Dairy": ["milk"],
    "Biscuit": ["wheat", "milk", "soy"], "Can": ["fish", "soy"],
    "Chips": ["milk"], "Nuts": ["peanuts"], "Soup": ["celery", "milk"],
    "Noodles": ["wheat", "soy"], "Liquor": [],
}

ORIGINS = [
    "Philippines", "Thailand", "Malaysia", "Vietnam",
    "Indonesia", "Japan", "South Korea", "Singapore",
]


def ean13(body12: str) -> str:
    total = 0
    for i, ch in enumerate(body12):
        total += int(ch) * (3 if i % 2 else 1)
    return body12 + str((10 - total % 10) % 10)


def pick(rng: Rng64, lo: int, hi: int) -> int:
    return lo + rng.next_below(hi - lo + 1)


def build_catalog() -> dict:
    rng = Rng64(SEED)
    products = []
    counter = 0
    for cat, count in COUNTS.items():
        brands, variants = BRANDS[cat], VARIANTS[cat]
        price_lo, price_hi, w_lo, w_hi, ext = RANGES[cat]
        combos = [(b, v) for v in variants for b in brands]
        for k in range(count):
            brand, variant = combos[k % len(combos)]
            weight = pick(rng, w_lo, w_hi)
            if cat in ("Water", "Soda", "Juice", "Dairy", "Liquor"):
                size = f"{weight}ml"
            else:
                size = f"{weight}g"
            name = f"{brand} {variant} {FORM[cat]} {size}"
            if k >= len(combos):  # very large categories wrap; keep names unique
                name += f" Twin Pack {k // len(combos)}"
            x_mm = pick(rng, ext[0], ext[1])
            y_mm = pick(rng, ext[2], ext[3])
            z_mm = x_mm if ext[4] == "x" else pick(rng, ext[4][0], ext[4][1])
            kc, su, so, fa, pr = NUTRITION[cat]
            counter += 1
            products.append(
                {
                    "sku": f"{PREFIX[cat]}-{k + 1:03d}",
                    "name": name,
                    "category": cat,
                    "price_cents": pick(rng, price_lo, price_hi),
                    "net_weight_g": weight,
                    "extents": [x_mm / 1000.0, y_mm / 1000.0, z_mm / 1000.0],
                    "label": {
                        "ingredients": INGREDIENT_BASE[cat],
                        "nutrition": {
                            "energy_kcal": pick(rng, *kc),
                            "sugar_g": pick(rng, *su) / 10.0,
                            "sodium_mg": pick(rng, *so),
                            "fat_g": pick(rng, *fa) / 10.0,
                            "protein_g": pick(rng, *pr) / 10.0,
                        },
                        "allergens": ALLERGENS[cat],
                        "origin": ORIGINS[rng.next_below(len(ORIGINS))],
                    },
                    "barcode": ean13(f"480{counter:09d}"),
                    "mesh_class": MESH_CLASS[cat],
                }
            )
    return {"catalog_version": 1, "products": products}


SHELF_SETS = [
    ("S1", ["Chips"], "Chips", "none"),
    ("S2", ["Biscuit"], "Biscuits", "none"),
    ("S3", ["Biscuit", "Soda"], "Biscuits & Soda", "none"),
    ("S4", ["Nuts", "Soup", "Noodles"], "Nuts, Soup & Noodles", "none"),
    ("S5", ["Can"], "Canned Goods", "none"),
    ("S6", ["Can"], "Canned Goods", "none"),
    ("S7", ["Water", "Juice"], "Cold Drinks (Fridge)", "hinge"),
    ("S8", ["Dairy", "Liquor"], "Dairy & Liquor (Fridge)", "sliding"),
]


def shelf(sid: str, pos, yaw: float, rows: int, slots: int) -> dict:
    _, cats, label, door = next(s for s in SHELF_SETS if s[0] == sid)
    return {
        "id": sid,
        "pos": [pos[0], 0.0, pos[1]],
        "yaw": yaw,
        "rows": rows,
        "slots_per_row": slots,
        "slot_pitch": 0.16,
        "categories": cats,
        "label": label,
        "door": door,
    }


def build_layouts() -> list[dict]:
    l1 = {
        "layout_version": 1,
        "id": 1,
        "floor": {"w": 6.0, "d": 8.0},
        "spawn": {"pos": [3.0, 0.0, 0.7], "yaw": 0.0},
        "checkout": {"pos": [1.3, 0.0, 1.5], "yaw": 180.0},
        "shelves": [
            shelf("S1", (0.3, 2.6), 90.0, 4, 12),
            shelf("S2", (0.3, 4.8), 90.0, 4, 12),
            shelf("S3", (1.6, 7.6), 180.0, 4, 12),
            shelf("S4", (4.4, 7.6), 180.0, 4, 12),
            shelf("S5", (5.7, 2.6), 270.0, 4, 12),
            shelf("S6", (5.7, 4.8), 270.0, 4, 12),
            shelf("S7", (0.3, 6.95), 90.0, 4, 12),
            shelf("S8", (5.7, 6.95), 270.0, 4, 12),
        ],
    }
    l2 = {
        "layout_version": 1,
        "id": 2,
        "floor": {"w": 5.0, "d": 10.0},
        "spawn": {"pos": [3.5, 0.0, 0.8], "yaw": 0.0},
        "checkout": {"pos": [1.2, 0.0, 1.2], "yaw": 180.0},
        "shelves": [
            shelf("S1", (0.3, 2.0), 90.0, 3, 16),
            shelf("S2", (0.3, 4.8), 90.0, 3, 16),
            shelf("S3", (2.5, 9.6), 180.0, 3, 16),
            shelf("S4", (2.5, 5.2), 90.0, 3, 16),
            shelf("S5", (4.7, 2.0), 270.0, 3, 16),
            shelf("S6", (4.7, 4.8), 270.0, 3, 16),
            shelf("S7", (0.3, 7.6), 90.0, 3, 16),
            shelf("S8", (4.7, 7.6), 270.0, 3, 16),
        ],
    }
    l3 = {
        "layout_version": 1,
        "id": 3,
        "floor": {"w": 7.0, "d": 7.0},
        "spawn": {"pos": [3.5, 0.0, 0.7], "yaw": 0.0},
        "checkout": {"pos": [1.4, 0.0, 1.4], "yaw": 180.0},
        "shelves": [
            shelf("S1", (0.3, 3.1), 90.0, 4, 12),
            shelf("S2", (3.2, 3.8), 270.0, 4, 12),
            shelf("S3", (1.5, 6.7), 180.0, 4, 12),
            shelf("S4", (4.2, 6.7), 180.0, 4, 12),
            shelf("S5", (6.7, 3.1), 270.0, 4, 12),
            shelf("S6", (3.8, 3.8), 90.0, 4, 12),
            shelf("S7", (0.3, 5.3), 90.0, 4, 12),
            shelf("S8", (6.7, 5.3), 270.0, 4, 12),
        ],
    }
    return [l1, l2, l3]


def _distinct_pair(products, category, attribute):
    pool = [p for p in products if p["category"] == category]
    for i, a in enumerate(pool):
        for b in pool[i + 1:]:
            if a["label"]["nutrition"][attribute] != b["label"]["nutrition"][attribute]:
                return a, b
    raise RuntimeError(f"no distinct {attribute} pair in {category}")


def build_tasks(catalog: dict) -> dict:
    products = catalog["products"]
    tasks = []
    for layout in (1, 2, 3):
        tasks.extend(
            [
                {
                    "id": f"easy-l{layout}-chips",
                    "difficulty": "easy",
                    "layout": layout,
                    "instruction": "Find and pick up a bag of chips.",
                    "goal": {"type": "hold", "match": {"category": "Chips"}},
                    "time_limit_s": 300.0,
                },
                {
                    "id": f"easy-l{layout}-biscuit",
                    "difficulty": "easy",
                    "layout": layout,
                    "instruction": "Find and pick up a box of biscuits.",
                    "goal": {"type": "hold", "match": {"category": "Biscuit"}},
                    "time_limit_s": 300.0,
                },
                {
                    "id": f"easy-l{layout}-can",
                    "difficulty": "easy",
                    "layout": layout,
                    "instruction": "Find and pick up a canned good.",
                    "goal": {"type": "hold", "match": {"category": "Can"}},
                    "time_limit_s": 300.0,
                },
                {
                    "id": f"avg-l{layout}-soda",
                    "difficulty": "average",
                    "layout": layout,
                    "instruction": "Pick up a bottle of soda and scan it at the checkout.",
                    "goal": {"type": "scanned", "match": {"category": "Soda"}},
                    "time_limit_s": 600.0,
                },
                {
                    "id": f"avg-l{layout}-chips",
                    "difficulty": "average",
                    "layout": layout,
                    "instruction": "Pick up a bag of chips and scan it at the checkout.",
                    "goal": {"type": "scanned", "match": {"category": "Chips"}},
                    "time_limit_s": 600.0,
                },
                {
                    "id": f"avg-l{layout}-biscuit",
                    "difficulty": "average",
                    "layout": layout,
                    "instruction": "Pick up a box of biscuits and scan it at the checkout.",
                    "goal": {"type": "scanned", "match": {"category": "Biscuit"}},
                    "time_limit_s": 600.0,
                },
            ]
        )
        for n, (category, attribute, label) in enumerate(
            [
                ("Biscuit", "sugar_g", "sugar content"),
                ("Soda", "sugar_g", "sugar content"),
                ("Chips", "sodium_mg", "sodium content"),
            ]
        ):
            a, b = _distinct_pair(products, category, attribute)
            tasks.append(
                {
                    "id": f"diff-l{layout}-{category.lower()}-{attribute}",
                    "difficulty": "difficult",
                    "layout": layout,
                    "instruction": (
                        f"Which of these two products has lower {label}: "
                        f"{a['name']} or {b['name']}? Scan the answer."
                    ),
                    "goal": {
                        "type": "answer_scan",
                        "attribute": attribute,
                        "candidates": [a["sku"], b["sku"]],
                    },
                    "time_limit_s": 600.0,
                }
            )
    return {"task_version": 1, "tasks": tasks}


def main() -> None:
    os.makedirs(OUT_DIR, exist_ok=True)
    catalog = build_catalog()
    with open(os.path.join(OUT_DIR, "catalog.json"), "w", encoding="utf-8") as fh:
        json.dump(catalog, fh, indent=1)
        fh.write("\n")
    for layout in build_layouts():
        path = os.path.join(OUT_DIR, f"layout{layout['id']}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(layout, fh, indent=1)
            fh.write("\n")
    tasks = build_tasks(catalog)
    with open(os.path.join(OUT_DIR, "tasks.json"), "w", encoding="utf-8") as fh:
        json.dump(tasks, fh, indent=1)
        fh.write("\n")
    print(f"wrote catalog ({len(catalog['products'])} products), 3 layouts, "
          f"{len(tasks['tasks'])} tasks to {os.path.normpath(OUT_DIR)}")


if __name__ == "__main__":
    main()
