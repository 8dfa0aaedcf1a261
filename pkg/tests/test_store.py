from __future__ import annotations

import datetime

import pytest

from sari_sim.protocol import state_hash
from sari_sim.rng import Rng64
from sari_sim.store import (
    LayoutError,
    generate_expirations,
    generate_placement,
    load_packaged_layout,
    reset_world,
)


class TestRng64:
    def test_published_splitmix_vector(self):
        r = Rng64(0)
        assert r.next_u64() == 0xE220A8397B1DCDAF
        assert r.next_u64() == 0x6E789E6AA1B965F4
        assert r.next_u64() == 0x06C45D188009454F

    def test_next_below_range_and_determinism(self):
        a = Rng64(123)
        b = Rng64(123)
        for n in (1, 2, 7, 100, 1 << 40):
            for _ in range(50):
                va = a.next_below(n)
                assert 0 <= va < n
                assert va == b.next_below(n)

    def test_shuffle_is_permutation(self):
        r = Rng64(5)
        items = list(range(100))
        r.shuffle(items)
        assert sorted(items) == list(range(100))
        assert items != list(range(100))


class TestPlacement:
    def test_deterministic_in_seed(self, catalog, layouts):
        p1, t1 = generate_placement(catalog, layouts[1], 42)
        p2, t2 = generate_placement(catalog, layouts[1], 42)
        assert p1 == p2
        assert t1 == t2

    def test_different_seeds_differ(self, catalog, layouts):
        p1, _ = generate_placement(catalog, layouts[1], 42)
        p2, _ = generate_placement(catalog, layouts[1], 43)
        assert [p.sku for p in p1] != [p.sku for p in p2]

    def test_every_product_placed_once(self, catalog, layouts):
        for lid in (1, 2, 3):
            placements, _ = generate_placement(catalog, layouts[lid], 7)
            skus = [p.sku for p in placements]
            assert sorted(skus) == sorted(p.sku for p in catalog.products)

    def test_category_shelf_and_tag_properties(self, catalog, layouts):
        """3 layouts x 10 seeds: no category violations, no slot
        collisions, tags match their slot's product, contiguity per row."""
        for lid in (1, 2, 3):
            layout = layouts[lid]
            shelf_by_id = {s.id: s for s in layout.shelves}
            for seed in range(10):
                placements, tags = generate_placement(catalog, layout, seed)
                seen_slots = set()
                for p in placements:
                    shelf = shelf_by_id[p.slot[0]]
                    product = catalog.lookup(p.sku)
                    assert product.category in shelf.categories
                    assert p.slot not in seen_slots
                    seen_slots.add(p.slot)
                assert len(tags) == len(placements)
                by_slot = {p.slot: p for p in placements}
                for tag in tags:
                    p = by_slot[(tag.shelf_id, tag.row, tag.col)]
                    assert tag.sku == p.sku
                    assert tag.price_cents == catalog.lookup(p.sku).price_cents
                self._check_contiguity(catalog, layout, placements)

    @staticmethod
    def _check_contiguity(catalog, layout, placements):
        rows: dict[tuple[str, int], dict[int, str]] = {}
        for p in placements:
            shelf_id, row, col = p.slot
            rows.setdefault((shelf_id, row), {})[col] = catalog.lookup(p.sku).category
        for (shelf_id, row), cols in rows.items():
            ordered = [cols[c] for c in sorted(cols)]
            runs = 1 + sum(
                1 for a, b in zip(ordered, ordered[1:]) if a != b
            )
            assert runs == len(set(ordered)), (
                f"category split into multiple runs on {shelf_id} row {row}: {ordered}"
            )

    def test_placement_boxes_inside_shelf(self, catalog, layouts):
        layout = layouts[1]
        shelf_by_id = {s.id: s for s in layout.shelves}
        placements, _ = generate_placement(catalog, layout, 3)
        for p in placements:
            unit = shelf_by_id[p.slot[0]].unit_aabb()
            box = p.world_aabb()
            assert box.min.x >= unit.min.x - 1e-6
            assert box.max.x <= unit.max.x + 1e-6
            assert box.min.z >= unit.min.z - 1e-6
            assert box.max.z <= unit.max.z + 1e-6


class TestExpirations:
    def test_dates_within_window(self, catalog, layouts):
        lo = datetime.date(2025, 1, 31)
        hi = datetime.date(2025, 12, 31)
        for seed in range(10):
            placements, _ = generate_placement(catalog, layouts[1], seed)
            generate_expirations(placements, seed)
            for p in placements:
                d = datetime.date.fromisoformat(p.expiration)
                assert lo <= d <= hi

    def test_deterministic(self, catalog, layouts):
        placements, _ = generate_placement(catalog, layouts[2], 9)
        generate_expirations(placements, 9)
        dates1 = [p.expiration for p in placements]
        placements2, _ = generate_placement(catalog, layouts[2], 9)
        generate_expirations(placements2, 9)
        assert dates1 == [p.expiration for p in placements2]

    def test_round_trips_iso_format(self, catalog, layouts):
        placements, _ = generate_placement(catalog, layouts[3], 1)
        generate_expirations(placements, 1)
        for p in placements[:20]:
            assert datetime.date.fromisoformat(p.expiration).isoformat() == p.expiration


class TestResetWorld:
    def test_reset_is_deterministic(self, catalog, config):
        w1 = reset_world(1, 42, catalog, config)
        w2 = reset_world(1, 42, catalog, config)
        assert state_hash(w1) == state_hash(w2)

    def test_avatar_heights(self, catalog, config):
        w = reset_world(1, 7, catalog, config)
        assert w.camera_pos().y == pytest.approx(1.6)
        assert w.hands["left"].pos.y == pytest.approx(1.1)
        assert w.hands["right"].pos.y == pytest.approx(1.1)

    def test_fresh_state(self, catalog, config):
        w = reset_world(2, 0, catalog, config)
        assert w.clock_units == 0
        assert w.cart.phase == "IDLE"
        assert w.cart.lines == []
        assert all(not open_ for open_ in w.doors_open.values())
        assert w.avatar.body == w.layout.spawn_pos

    def test_unknown_layout_rejected(self, catalog, config):
        with pytest.raises(LayoutError):
            reset_world(4, 0, catalog, config)


class TestLayouts:
    def test_all_layouts_valid_and_have_capacity(self, catalog, layouts):
        for lid, layout in layouts.items():
            assert layout.total_capacity() >= 250
            # every category has at least one admitting shelf
            admitted = set()
            for s in layout.shelves:
                admitted.update(s.categories)
            assert admitted == set(
                c for c in catalog.category_counts
            )

    def test_layouts_have_fridge_doors(self, layouts):
        for layout in layouts.values():
            kinds = {s.door for s in layout.shelves}
            assert "hinge" in kinds
            assert "sliding" in kinds

    def test_reload_packaged_layout_is_stable(self, layouts):
        assert load_packaged_layout(1) == layouts[1]
