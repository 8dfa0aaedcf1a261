"""Store layouts, seeded product placement, expiration dates, world state.

Layouts are data files: a rectangular floor, shelving units at cardinal
yaws, one self-checkout fixture and an avatar spawn pose.  Placement
assigns every catalog product to exactly one shelf slot, keeping
categories in contiguous runs and only on shelves that admit them, then
stamps every instance with a pseudo-random expiration date.  Everything
is a pure function of (catalog, layout, seed).

Derived shelf geometry (slab heights, panels, slots) is computed from a
handful of constants rather than stored in the layout files, so the
files stay small and the invariants stay checkable.
"""

from __future__ import annotations

import datetime
import json
from dataclasses import dataclass, field
from importlib import resources

from .catalog import CATEGORIES, Catalog
from .config import SimConfig
from .geometry import (
    Aabb,
    EulerRot,
    Vec3,
    aabb_from_center,
    rotate,
    rotated_box_aabb,
)
from .rng import MASK64, Rng64

LAYOUT_VERSION = 1
LAYOUT_IDS = (1, 2, 3)

# shelving unit geometry, meters
SHELF_DEPTH = 0.5
SHELF_HEIGHT = 2.0
SLAB_THICKNESS = 0.04
SLAB_BASE = 0.5  # lowest slab top; chosen so every row stays in arm reach
SLAB_SPAN = 1.2  # lowest to highest slab top
WIDTH_MARGIN = 0.1
SLOT_FRONT_OFFSET = 0.05
PANEL_THICKNESS = 0.03
DOOR_THICKNESS = 0.02
DOOR_KINDS = ("none", "hinge", "sliding")

# checkout fixture geometry, local frame (front toward -z)
COUNTER_HALF = Vec3(0.6, 0.475, 0.3)
SCREEN_CENTER_LOCAL = Vec3(0.3, 1.25, 0.0)
SCREEN_TILT_DEG = 25.0
SCREEN_WIDTH = 0.40
SCREEN_HEIGHT = 0.30
SCANNER_ORIGIN_LOCAL = Vec3(-0.3, 1.05, 0.0)
FRONT_POINT_DIST = 0.85
# button rectangles in screen coords: name -> (cx, cy, w, h), y up
BUTTON_RECTS = {
    "START": (-0.13, -0.09, 0.10, 0.06),
    "REMOVE_LAST": (0.0, -0.09, 0.10, 0.06),
    "PAY": (0.13, -0.09, 0.10, 0.06),
}

SIM_EPOCH = datetime.date(2025, 1, 1)
EXPIRY_MIN_DAYS = 30
EXPIRY_MAX_DAYS = 364  # epoch + 364 = Dec 31 of the epoch year


class LayoutError(ValueError):
    pass


class PlacementError(ValueError):
    def __init__(self, category: str, shelf_id: str, leftover: int):
        super().__init__(
            f"capacity exceeded: {leftover} {category!r} product(s) left after "
            f"filling shelf {shelf_id!r}"
        )
        self.category = category
        self.shelf_id = shelf_id


@dataclass(frozen=True)
class Shelf:
    id: str
    pos: Vec3  # base center, y = 0
    yaw: float  # cardinal
    rows: int
    slots_per_row: int
    slot_pitch: float
    categories: tuple[str, ...]
    label: str
    door: str = "none"

    @property
    def width(self) -> float:
        return self.slots_per_row * self.slot_pitch + WIDTH_MARGIN

    @property
    def capacity(self) -> int:
        return self.rows * self.slots_per_row

    def rotation(self) -> EulerRot:
        return EulerRot(0.0, self.yaw, 0.0)

    def slab_tops(self) -> list[float]:
        if self.rows == 1:
            return [SLAB_BASE]
        step = SLAB_SPAN / (self.rows - 1)
        return [SLAB_BASE + r * step for r in range(self.rows)]

    def slot_base(self, row: int, col: int) -> Vec3:
        """World point on the slab surface where a slot's product stands."""
        local = Vec3(
            (col - (self.slots_per_row - 1) / 2.0) * self.slot_pitch,
            self.slab_tops()[row],
            SLOT_FRONT_OFFSET,
        )
        return self.pos + rotate(self.rotation(), local)

    def unit_aabb(self) -> Aabb:
        half = rotate(self.rotation(), Vec3(self.width / 2.0, 0.0, SHELF_DEPTH / 2.0))
        hx, hz = abs(half.x), abs(half.z)
        return Aabb(
            Vec3(self.pos.x - hx, 0.0, self.pos.z - hz),
            Vec3(self.pos.x + hx, SHELF_HEIGHT, self.pos.z + hz),
        )

    def front_normal(self) -> Vec3:
        return rotate(self.rotation(), Vec3(0.0, 0.0, 1.0))

    def front_point(self, standoff: float = 0.75) -> Vec3:
        n = self.front_normal()
        return self.pos + n.scaled(SHELF_DEPTH / 2.0 + standoff)

    def structure_boxes(self, door_closed: bool) -> list[tuple[str, Aabb]]:
        """Panels, slabs and (when closed) the door, as world AABBs."""
        rot = self.rotation()
        w2 = self.width / 2.0
        d2 = SHELF_DEPTH / 2.0

        def box(tag: str, lo: Vec3, hi: Vec3) -> tuple[str, Aabb]:
            c_local = Vec3((lo.x + hi.x) / 2, (lo.y + hi.y) / 2, (lo.z + hi.z) / 2)
            h_local = Vec3((hi.x - lo.x) / 2, (hi.y - lo.y) / 2, (hi.z - lo.z) / 2)
            return (
                f"fix:shelf:{self.id}:{tag}",
                rotated_box_aabb(self.pos + rotate(rot, c_local), rot, h_local),
            )

        out = [
            box("back", Vec3(-w2, 0.0, -d2), Vec3(w2, SHELF_HEIGHT, -d2 + PANEL_THICKNESS)),
            box("side_l", Vec3(-w2, 0.0, -d2), Vec3(-w2 + PANEL_THICKNESS, SHELF_HEIGHT, d2)),
            box("side_r", Vec3(w2 - PANEL_THICKNESS, 0.0, -d2), Vec3(w2, SHELF_HEIGHT, d2)),
        ]
        for r, top in enumerate(self.slab_tops()):
            out.append(
                box(f"slab{r}", Vec3(-w2, top - SLAB_THICKNESS, -d2), Vec3(w2, top, d2))
            )
        if self.door != "none" and door_closed:
            out.append(
                box("door", Vec3(-w2, 0.0, d2 - DOOR_THICKNESS), Vec3(w2, SHELF_HEIGHT, d2))
            )
        return out


@dataclass(frozen=True)
class CheckoutFixture:
    pos: Vec3
    yaw: float

    def rotation(self) -> EulerRot:
        return EulerRot(0.0, self.yaw, 0.0)

    def counter_aabb(self) -> Aabb:
        rot = self.rotation()
        center = self.pos + Vec3(0.0, COUNTER_HALF.y, 0.0)
        return rotated_box_aabb(center, rot, COUNTER_HALF)

    def screen_center(self) -> Vec3:
        return self.pos + rotate(self.rotation(), SCREEN_CENTER_LOCAL)

    def screen_axes(self) -> tuple[Vec3, Vec3, Vec3]:
        """(right, up, normal) of the tilted touchscreen, world frame."""
        import math

        rot = self.rotation()
        t = math.radians(SCREEN_TILT_DEG)
        right = rotate(rot, Vec3(1.0, 0.0, 0.0))
        up = rotate(rot, Vec3(0.0, math.cos(t), math.sin(t)))
        normal = rotate(rot, Vec3(0.0, math.sin(t), -math.cos(t)))
        return right, up, normal

    def button_center(self, name: str) -> Vec3:
        cx, cy, _, _ = BUTTON_RECTS[name]
        right, up, _ = self.screen_axes()
        return self.screen_center() + right.scaled(cx) + up.scaled(cy)

    def scanner_origin(self) -> Vec3:
        return self.pos + rotate(self.rotation(), SCANNER_ORIGIN_LOCAL)

    def scanner_axis(self) -> Vec3:
        return rotate(self.rotation(), Vec3(0.0, 0.0, -1.0))

    def front_point(self) -> Vec3:
        return self.pos + rotate(self.rotation(), Vec3(0.0, 0.0, -FRONT_POINT_DIST))

    def facing_yaw(self) -> float:
        """Avatar yaw that looks at the counter from the front point."""
        return self.yaw

    def structure_boxes(self) -> list[tuple[str, Aabb]]:
        rot = self.rotation()
        screen_half = Vec3(SCREEN_WIDTH / 2.0, SCREEN_HEIGHT / 2.0, 0.015)
        scanner_half = Vec3(0.05, 0.05, 0.05)
        return [
            ("fix:checkout:counter", self.counter_aabb()),
            ("fix:checkout:screen", rotated_box_aabb(self.screen_center(), rot, screen_half)),
            (
                "fix:checkout:scanner",
                rotated_box_aabb(self.scanner_origin(), rot, scanner_half),
            ),
        ]


@dataclass(frozen=True)
class Layout:
    id: int
    floor_w: float
    floor_d: float
    spawn_pos: Vec3
    spawn_yaw: float
    checkout: CheckoutFixture
    shelves: tuple[Shelf, ...]

    def shelf(self, shelf_id: str) -> Shelf:
        for s in self.shelves:
            if s.id == shelf_id:
                return s
        raise KeyError(f"no shelf {shelf_id!r} in layout {self.id}")

    def total_capacity(self) -> int:
        return sum(s.capacity for s in self.shelves)


def _inside_floor(layout_w: float, layout_d: float, box: Aabb) -> bool:
    return (
        box.min.x >= 0.0
        and box.min.z >= 0.0
        and box.max.x <= layout_w
        and box.max.z <= layout_d
    )


def parse_layout(doc: dict) -> Layout:
    if doc.get("layout_version") != LAYOUT_VERSION:
        raise LayoutError(f"unsupported layout_version {doc.get('layout_version')!r}")
    lid = doc.get("id")
    if lid not in LAYOUT_IDS:
        raise LayoutError(f"layout id must be one of {LAYOUT_IDS}, got {lid!r}")
    floor = doc["floor"]
    w, d = float(floor["w"]), float(floor["d"])
    if w <= 0 or d <= 0:
        raise LayoutError("floor dimensions must be positive")
    spawn = doc["spawn"]
    spawn_pos = Vec3(float(spawn["pos"][0]), 0.0, float(spawn["pos"][2]))
    co = doc["checkout"]
    checkout = CheckoutFixture(
        pos=Vec3(float(co["pos"][0]), 0.0, float(co["pos"][2])),
        yaw=float(co["yaw"]),
    )
    shelves = []
    seen_ids: set[str] = set()
    for s in doc["shelves"]:
        if s["yaw"] % 90 != 0:
            raise LayoutError(f"shelf {s['id']!r}: yaw must be cardinal")
        cats = tuple(s["categories"])
        if not cats:
            raise LayoutError(f"shelf {s['id']!r}: needs at least one category")
        for c in cats:
            if c not in CATEGORIES:
                raise LayoutError(f"shelf {s['id']!r}: unknown category {c!r}")
        door = s.get("door", "none")
        if door not in DOOR_KINDS:
            raise LayoutError(f"shelf {s['id']!r}: unknown door kind {door!r}")
        if s["id"] in seen_ids:
            raise LayoutError(f"duplicate shelf id {s['id']!r}")
        seen_ids.add(s["id"])
        shelves.append(
            Shelf(
                id=s["id"],
                pos=Vec3(float(s["pos"][0]), 0.0, float(s["pos"][2])),
                yaw=float(s["yaw"]),
                rows=int(s["rows"]),
                slots_per_row=int(s["slots_per_row"]),
                slot_pitch=float(s["slot_pitch"]),
                categories=cats,
                label=s["label"],
                door=door,
            )
        )
    layout = Layout(
        id=lid,
        floor_w=w,
        floor_d=d,
        spawn_pos=spawn_pos,
        spawn_yaw=float(spawn["yaw"]),
        checkout=checkout,
        shelves=tuple(shelves),
    )
    for shelf in layout.shelves:
        if not _inside_floor(w, d, shelf.unit_aabb()):
            raise LayoutError(f"shelf {shelf.id!r} extends outside the floor")
    if not _inside_floor(w, d, layout.checkout.counter_aabb()):
        raise LayoutError("checkout extends outside the floor")
    sp = layout.spawn_pos
    if not (0.0 < sp.x < w and 0.0 < sp.z < d):
        raise LayoutError("spawn lies outside the floor")
    return layout


def load_layout(path: str) -> Layout:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_layout(json.load(fh))


def data_file(name: str) -> str:
    """Path of a packaged data file (catalog, layouts, tasks)."""
    return str(resources.files("sari_sim").joinpath("data", name))


def load_packaged_layout(layout_id: int) -> Layout:
    if layout_id not in LAYOUT_IDS:
        raise LayoutError(f"unknown layout id {layout_id!r}")
    return load_layout(data_file(f"layout{layout_id}.json"))


@dataclass
class Placement:
    instance_id: str
    sku: str
    slot: tuple[str, int, int]  # shelf id, row, col
    center: Vec3
    rotation: EulerRot
    half_extents: Vec3
    expiration: str = ""
    on_shelf: bool = True

    def world_aabb(self) -> Aabb:
        return rotated_box_aabb(self.center, self.rotation, self.half_extents)


@dataclass(frozen=True)
class PriceTag:
    shelf_id: str
    row: int
    col: int
    sku: str
    price_cents: int


def generate_placement(
    catalog: Catalog, layout: Layout, seed: int
) -> tuple[list[Placement], list[PriceTag]]:
    """Assign every product to one slot; category runs stay contiguous.

    Products are shuffled within their category (Fisher-Yates over one
    SplitMix64 stream, categories in enum order), then poured into the
    admitting shelves in shelf-id order.  Slots fill row by row, so a
    category forms at most one run per row.
    """
    rng = Rng64(seed)
    by_cat: dict[str, list] = {c: [] for c in CATEGORIES}
    for p in catalog.products:
        by_cat[p.category].append(p)
    for c in CATEGORIES:
        rng.shuffle(by_cat[c])

    shelves = sorted(layout.shelves, key=lambda s: s.id)
    cursors = {s.id: 0 for s in shelves}
    placements: list[Placement] = []
    tags: list[PriceTag] = []
    for cat in CATEGORIES:
        queue = by_cat[cat]
        qi = 0
        last_shelf = None
        for shelf in shelves:
            if cat not in shelf.categories:
                continue
            last_shelf = shelf.id
            while qi < len(queue) and cursors[shelf.id] < shelf.capacity:
                flat = cursors[shelf.id]
                cursors[shelf.id] += 1
                row, col = divmod(flat, shelf.slots_per_row)
                product = queue[qi]
                qi += 1
                base = shelf.slot_base(row, col)
                placements.append(
                    Placement(
                        instance_id=f"inst{len(placements):03d}",
                        sku=product.sku,
                        slot=(shelf.id, row, col),
                        center=Vec3(base.x, base.y + product.extents.y, base.z),
                        rotation=shelf.rotation(),
                        half_extents=product.extents,
                    )
                )
                tags.append(
                    PriceTag(
                        shelf_id=shelf.id,
                        row=row,
                        col=col,
                        sku=product.sku,
                        price_cents=product.price_cents,
                    )
                )
        if qi < len(queue):
            raise PlacementError(cat, last_shelf or "<none>", len(queue) - qi)
    return placements, tags


def generate_expirations(placements: list[Placement], seed: int) -> None:
    """Stamp each placement with a date in [epoch+30d, epoch+364d].

    Each instance gets its own SplitMix64 stream (seed XOR index) so the
    dates do not depend on iteration order elsewhere.
    """
    span = EXPIRY_MAX_DAYS - EXPIRY_MIN_DAYS + 1
    for idx, placement in enumerate(placements):
        r = Rng64((seed ^ idx) & MASK64)
        days = EXPIRY_MIN_DAYS + r.next_below(span)
        placement.expiration = (SIM_EPOCH + datetime.timedelta(days=days)).isoformat()


@dataclass
class AvatarState:
    body: Vec3  # feet point, y = 0
    yaw: float
    pitch: float = 0.0

    def rotation(self) -> EulerRot:
        return EulerRot(self.pitch, self.yaw, 0.0)


@dataclass
class HandState:
    pos: Vec3
    rot: EulerRot
    grip_closed: bool = False
    poke: bool = False
    held: str | None = None
    hold_offset: Vec3 | None = None  # hand-local
    hold_rel_rot: EulerRot | None = None
    hovered: str | None = None

    @property
    def grip(self) -> str:
        return "closed" if self.grip_closed else "open"


@dataclass
class CartState:
    phase: str = "IDLE"  # IDLE -> ACTIVE -> PAID
    lines: list[tuple[str, int]] = field(default_factory=list)

    @property
    def total_cents(self) -> int:
        return sum(price for _, price in self.lines)


@dataclass
class WorldState:
    layout: Layout
    catalog: Catalog
    config: SimConfig
    seed: int
    clock_units: int  # sim time in command_dt steps
    avatar: AvatarState
    hands: dict[str, HandState]
    placements: dict[str, Placement]  # insertion order = generation order
    tags: list[PriceTag]
    cart: CartState
    doors_open: dict[str, bool]
    beam_latch: set[str] = field(default_factory=set)
    contacts: dict[str, bool] = field(default_factory=dict)
    receipt: dict | None = None
    events: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def sim_time(self) -> float:
        return self.clock_units * self.config.command_dt

    def camera_pos(self) -> Vec3:
        return self.avatar.body + Vec3(0.0, self.config.eye_height, 0.0)

    def held_ids(self) -> set[str]:
        return {h.held for h in self.hands.values() if h.held is not None}

    def structure_boxes(self) -> list[tuple[str, Aabb]]:
        out: list[tuple[str, Aabb]] = []
        for shelf in self.layout.shelves:
            closed = shelf.door != "none" and not self.doors_open.get(shelf.id, False)
            out.extend(shelf.structure_boxes(door_closed=closed))
        out.extend(self.layout.checkout.structure_boxes())
        return out

    def support_surfaces(self) -> list[tuple[float, float, float, float, float]]:
        """(xmin, zmin, xmax, zmax, top_y) of every shelf slab."""
        out = []
        for shelf in self.layout.shelves:
            for key, box in shelf.structure_boxes(door_closed=False):
                if ":slab" in key:
                    out.append((box.min.x, box.min.z, box.max.x, box.max.z, box.max.y))
        return out

    def obstacle_rects(self) -> list[tuple[float, float, float, float]]:
        """2D xz footprints the avatar body cannot enter."""
        rects = []
        for shelf in self.layout.shelves:
            b = shelf.unit_aabb()
            rects.append((b.min.x, b.min.z, b.max.x, b.max.z))
        c = self.layout.checkout.counter_aabb()
        rects.append((c.min.x, c.min.z, c.max.x, c.max.z))
        return rects


def spawn_hand(layout: Layout, config: SimConfig, side: str) -> HandState:
    lateral = -0.2 if side == "left" else 0.2
    local = Vec3(lateral, config.eye_height - config.hand_drop, 0.3)
    rot = EulerRot(0.0, layout.spawn_yaw, 0.0)
    return HandState(pos=layout.spawn_pos + rotate(rot, local), rot=rot)


def reset_world(
    layout_id: int, seed: int, catalog: Catalog, config: SimConfig
) -> WorldState:
    """Fresh deterministic world: regenerated placement, avatar at spawn."""
    layout = load_packaged_layout(layout_id)
    return reset_world_from(layout, seed, catalog, config)


def reset_world_from(
    layout: Layout, seed: int, catalog: Catalog, config: SimConfig
) -> WorldState:
    placements, tags = generate_placement(catalog, layout, seed)
    generate_expirations(placements, seed)
    doors = {s.id: False for s in layout.shelves if s.door != "none"}
    return WorldState(
        layout=layout,
        catalog=catalog,
        config=config,
        seed=seed,
        clock_units=0,
        avatar=AvatarState(body=layout.spawn_pos, yaw=layout.spawn_yaw),
        hands={
            "left": spawn_hand(layout, config, "left"),
            "right": spawn_hand(layout, config, "right"),
        },
        placements={p.instance_id: p for p in placements},
        tags=tags,
        cart=CartState(),
        doors_open=doors,
    )
