"""Observations: semantic frames, flat-shaded screenshots, env info.

The semantic frame is the ground-truth sidecar of a screenshot: every
visible instance with its screen bbox ([ymin, xmin, ymax, xmax]),
distance, and whichever label text is legible at the current proximity
tier.  Legibility stands in for OCR fidelity: name and price need a
near, roughly frontal view; the expiration stamp needs a close view;
the full label requires holding the item.

Screenshots are deliberately low fidelity: a z-buffered raster of the
instance and fixture boxes, one deterministic color per product.
"""

from __future__ import annotations

import base64
import io
import math
import zlib

from .geometry import (
    Aabb,
    CameraModel,
    Vec3,
    angle_between,
    frustum_intersects,
    screen_bbox,
    visible_set,
)
from .kernels import raster_boxes
from .store import BUTTON_RECTS, WorldState

BACKGROUND_RGB = (224, 224, 224)
FIXTURE_COLORS = {
    "shelf": (139, 105, 74),
    "door": (170, 200, 210),
    "counter": (96, 110, 125),
    "screen": (30, 30, 40),
    "scanner": (120, 40, 40),
}


def camera_model(world: WorldState) -> CameraModel:
    cfg = world.config
    return CameraModel(
        position=world.camera_pos(),
        rotation=world.avatar.rotation(),
        fov_deg=cfg.fov_deg,
        width=cfg.image_width,
        height=cfg.image_height,
    )


def product_color(category: str, sku: str) -> tuple[int, int, int]:
    """Stable hue from a CRC of category and sku (not Python's hash)."""
    h = zlib.crc32(f"{category}:{sku}".encode("utf-8")) % 360
    return _hsv_to_rgb(h / 360.0, 0.65, 0.95)


def _hsv_to_rgb(h: float, s: float, v: float) -> tuple[int, int, int]:
    i = int(h * 6.0) % 6
    f = h * 6.0 - int(h * 6.0)
    p = v * (1.0 - s)
    q = v * (1.0 - f * s)
    t = v * (1.0 - (1.0 - f) * s)
    r, g, b = [
        (v, t, p), (q, v, p), (p, v, t), (p, q, v), (t, p, v), (v, p, q)
    ][i]
    return (round(r * 255), round(g * 255), round(b * 255))


def _fixture_color(key: str) -> tuple[int, int, int]:
    tail = key.rsplit(":", 1)[-1]
    return FIXTURE_COLORS.get(tail, FIXTURE_COLORS["shelf"])


def semantic_frame(world: WorldState) -> dict:
    """Structured ground-truth view of everything the camera can see."""
    cam = camera_model(world)
    cfg = world.config
    instances: list[tuple[str, Aabb]] = []
    for iid, p in world.placements.items():
        instances.append((iid, p.world_aabb()))
    structure = world.structure_boxes()
    instances.extend(structure)

    held = world.held_ids()
    _, _, cam_fwd = cam.basis()
    entries = []
    for vis in visible_set(cam, instances):
        if vis.instance_id.startswith("fix:"):
            continue
        p = world.placements[vis.instance_id]
        product = world.catalog.lookup(p.sku)
        is_held = vis.instance_id in held
        to_item = p.center - cam.position
        angle = angle_between(cam_fwd, to_item) if to_item.norm() > 0 else 0.0
        near_frontal = (
            vis.distance <= cfg.name_legible_dist
            and angle <= cfg.name_legible_angle_deg
        )
        expiry_ok = is_held or vis.distance <= cfg.expiry_legible_dist
        name_ok = is_held or expiry_ok or near_frontal
        legible: dict = {}
        if name_ok:
            legible["name"] = product.name
            legible["price_tag"] = product.price_cents
        if expiry_ok:
            legible["expiration"] = p.expiration
        if is_held:
            legible["full_label"] = {
                "ingredients": product.label.ingredients,
                "nutrition": dict(product.label.nutrition),
                "allergens": list(product.label.allergens),
                "origin": product.label.origin,
                "net_weight_g": product.net_weight_g,
                "barcode": product.barcode,
            }
        entries.append(
            {
                "instance_id": vis.instance_id,
                "sku": p.sku,
                "category": product.category,
                "bbox": list(vis.bbox),
                "distance": vis.distance,
                "occluded_fraction": vis.occluded_fraction,
                "held": is_held,
                "legible": legible,
            }
        )

    fixtures = []
    for shelf in world.layout.shelves:
        box = shelf.unit_aabb()
        if not frustum_intersects(cam, box):
            continue
        bbox = screen_bbox(cam, box)
        if bbox is None:
            continue
        fixtures.append(
            {
                "kind": "shelf",
                "id": shelf.id,
                "label": shelf.label,
                "door": shelf.door,
                "door_open": world.doors_open.get(shelf.id),
                "bbox": list(bbox),
            }
        )
    fixture_geom = world.layout.checkout
    right, up, _ = fixture_geom.screen_axes()
    for name, (cx, cy, bw, bh) in BUTTON_RECTS.items():
        center = fixture_geom.button_center(name)
        corners = []
        for sx, sy in ((-1, -1), (-1, 1), (1, -1), (1, 1)):
            corners.append(
                center + right.scaled(sx * bw / 2.0) + up.scaled(sy * bh / 2.0)
            )
        lo = Vec3(
            min(c.x for c in corners), min(c.y for c in corners), min(c.z for c in corners)
        )
        hi = Vec3(
            max(c.x for c in corners), max(c.y for c in corners), max(c.z for c in corners)
        )
        box = Aabb(lo, hi)
        if not frustum_intersects(cam, box):
            continue
        bbox = screen_bbox(cam, box)
        if bbox is None:
            continue
        fixtures.append({"kind": "button", "id": name, "bbox": list(bbox)})

    return {
        "sim_time": world.sim_time,
        "camera": {
            "position": cam.position.as_list(),
            "rotation": cam.rotation.as_list(),
        },
        "entries": entries,
        "fixtures": fixtures,
    }


def render_screenshot(world: WorldState) -> bytes:
    """RGB8 buffer (w*h*3) of the current camera view."""
    cam = camera_model(world)
    boxes: list[float] = []
    rects: list[int] = []
    colors: list[int] = []

    def add(box: Aabb, rgb: tuple[int, int, int]) -> None:
        bbox = screen_bbox(cam, box)
        if bbox is None:
            return
        ymin, xmin, ymax, xmax = bbox
        x0 = max(0, int(math.floor(xmin)))
        y0 = max(0, int(math.floor(ymin)))
        x1 = min(cam.width, int(math.ceil(xmax)))
        y1 = min(cam.height, int(math.ceil(ymax)))
        if x0 >= x1 or y0 >= y1:
            return
        boxes.extend(box.flat())
        rects.extend((x0, y0, x1, y1))
        colors.extend(rgb)

    for key, box in world.structure_boxes():
        add(box, _fixture_color(key))
    for iid, p in world.placements.items():
        product = world.catalog.lookup(p.sku)
        add(p.world_aabb(), product_color(product.category, p.sku))

    right, up, fwd = cam.basis()
    return bytes(
        raster_boxes(
            cam.width, cam.height,
            cam.position.x, cam.position.y, cam.position.z,
            right.x, right.y, right.z,
            up.x, up.y, up.z,
            fwd.x, fwd.y, fwd.z,
            cam.focal_px(),
            boxes, rects, colors,
            BACKGROUND_RGB,
        )
    )


def screenshot_png(world: WorldState) -> bytes:
    from PIL import Image

    buf = render_screenshot(world)
    img = Image.frombytes(
        "RGB", (world.config.image_width, world.config.image_height), buf
    )
    out = io.BytesIO()
    img.save(out, format="PNG")
    return out.getvalue()


def screenshot_payload(world: WorldState) -> dict:
    return {
        "width": world.config.image_width,
        "height": world.config.image_height,
        "png_base64": base64.b64encode(screenshot_png(world)).decode("ascii"),
    }


def env_info(world: WorldState) -> dict:
    """Verbatim mirror of the avatar-facing state fields."""
    return {
        "avatar": {
            "position": world.avatar.body.as_list(),
            "rotation": world.avatar.rotation().as_list(),
        },
        "hands": {
            side: {
                "position": hand.pos.as_list(),
                "rotation": hand.rot.as_list(),
                "grip": hand.grip,
            }
            for side, hand in world.hands.items()
        },
        "layout": world.layout.id,
        "seed": world.seed,
    }
