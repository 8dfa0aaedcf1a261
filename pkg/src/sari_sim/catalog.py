"""Product catalog: loading, validation, lookup, attribute comparison.

The shipped catalog is a synthetic stand-in for the store's scanned
product set: 250 items across 11 fixed categories, each annotated with
name, price, net weight, ingredients, nutrition, allergens and origin.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .geometry import Vec3

CATEGORIES = (
    "Water",
    "Soda",
    "Juice",
    "Dairy",
    "Biscuit",
    "Can",
    "Chips",
    "Nuts",
    "Soup",
    "Noodles",
    "Liquor",
)

MESH_CLASSES = ("simple", "complex", "deformable")

CATALOG_VERSION = 1

MAX_HALF_EXTENT = 0.5


class CatalogError(ValueError):
    """Raised on schema or invariant violations, with the record index."""

    def __init__(self, message: str, index: int | None = None):
        if index is not None:
            message = f"record {index}: {message}"
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class ProductLabel:
    ingredients: str
    nutrition: dict[str, float]
    allergens: tuple[str, ...]
    origin: str


@dataclass(frozen=True)
class ProductSpec:
    sku: str
    name: str
    category: str
    price_cents: int
    net_weight_g: float
    extents: Vec3  # box half sizes, meters
    label: ProductLabel
    barcode: str
    mesh_class: str


@dataclass(frozen=True)
class Catalog:
    products: tuple[ProductSpec, ...]

    @property
    def category_counts(self) -> dict[str, int]:
        counts = {c: 0 for c in CATEGORIES}
        for p in self.products:
            counts[p.category] += 1
        return counts

    def __post_init__(self):
        by_sku = {}
        by_barcode = {}
        for p in self.products:
            by_sku[p.sku] = p
            by_barcode[p.barcode] = p
        object.__setattr__(self, "_by_sku", by_sku)
        object.__setattr__(self, "_by_barcode", by_barcode)

    def __len__(self) -> int:
        return len(self.products)

    def lookup(self, key: str) -> ProductSpec:
        """Exact-match retrieval by sku or barcode."""
        p = self._by_sku.get(key)
        if p is None:
            p = self._by_barcode.get(key)
        if p is None:
            raise KeyError(f"no product with sku or barcode {key!r}")
        return p

    def get(self, key: str) -> ProductSpec | None:
        try:
            return self.lookup(key)
        except KeyError:
            return None


def _parse_product(rec: dict, index: int) -> ProductSpec:
    def need(field: str):
        if field not in rec:
            raise CatalogError(f"missing field {field!r}", index)
        return rec[field]

    sku = need("sku")
    name = need("name")
    category = need("category")
    if category not in CATEGORIES:
        raise CatalogError(f"unknown category {category!r}", index)
    price = need("price_cents")
    if not isinstance(price, int) or isinstance(price, bool) or price <= 0:
        raise CatalogError(f"price_cents must be a positive integer, got {price!r}", index)
    weight = need("net_weight_g")
    if not isinstance(weight, (int, float)) or weight <= 0:
        raise CatalogError(f"net_weight_g must be positive, got {weight!r}", index)
    ext = need("extents")
    if not (isinstance(ext, list) and len(ext) == 3):
        raise CatalogError("extents must be an [x, y, z] array", index)
    for c in ext:
        if not isinstance(c, (int, float)) or not (0.0 < c <= MAX_HALF_EXTENT):
            raise CatalogError(
                f"extents components must lie in (0, {MAX_HALF_EXTENT}], got {ext}", index
            )
    label = need("label")
    for field in ("ingredients", "nutrition", "allergens", "origin"):
        if field not in label:
            raise CatalogError(f"label missing {field!r}", index)
    nutrition = label["nutrition"]
    if not isinstance(nutrition, dict):
        raise CatalogError("label.nutrition must be an object", index)
    barcode = need("barcode")
    if not (isinstance(barcode, str) and len(barcode) == 13 and barcode.isdigit()):
        raise CatalogError(f"barcode must be a 13-digit string, got {barcode!r}", index)
    mesh_class = need("mesh_class")
    if mesh_class not in MESH_CLASSES:
        raise CatalogError(f"unknown mesh_class {mesh_class!r}", index)
    return ProductSpec(
        sku=sku,
        name=name,
        category=category,
        price_cents=price,
        net_weight_g=float(weight),
        extents=Vec3(float(ext[0]), float(ext[1]), float(ext[2])),
        label=ProductLabel(
            ingredients=label["ingredients"],
            nutrition={k: float(v) for k, v in nutrition.items()},
            allergens=tuple(label["allergens"]),
            origin=label["origin"],
        ),
        barcode=barcode,
        mesh_class=mesh_class,
    )


def parse_catalog(doc: dict) -> Catalog:
    if doc.get("catalog_version") != CATALOG_VERSION:
        raise CatalogError(
            f"unsupported catalog_version {doc.get('catalog_version')!r}"
        )
    records = doc.get("products")
    if not isinstance(records, list):
        raise CatalogError("products must be an array")
    products = []
    seen_sku: dict[str, int] = {}
    seen_barcode: dict[str, int] = {}
    for i, rec in enumerate(records):
        p = _parse_product(rec, i)
        if p.sku in seen_sku:
            raise CatalogError(f"duplicate sku {p.sku!r}", i)
        if p.barcode in seen_barcode:
            raise CatalogError(f"duplicate barcode {p.barcode!r}", i)
        seen_sku[p.sku] = i
        seen_barcode[p.barcode] = i
        products.append(p)
    return Catalog(products=tuple(products))


def load_catalog(path: str) -> Catalog:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise CatalogError(f"catalog is not valid JSON: {e}") from e
    return parse_catalog(doc)


def attribute_argmin(catalog: Catalog, skus: list[str], attribute: str) -> str:
    """Sku whose nutrition attribute is smallest; ties break to lexicographic.

    Used to grade comparison questions ("which has lower sugar content").
    """
    if len(skus) < 2:
        raise ValueError("attribute_argmin needs at least two skus")
    best_sku: str | None = None
    best_val = 0.0
    for sku in skus:
        product = catalog.lookup(sku)
        if attribute not in product.label.nutrition:
            raise ValueError(f"product {sku!r} has no nutrition attribute {attribute!r}")
        val = product.label.nutrition[attribute]
        if best_sku is None or val < best_val or (val == best_val and sku < best_sku):
            best_sku = sku
            best_val = val
    assert best_sku is not None
    return best_sku
