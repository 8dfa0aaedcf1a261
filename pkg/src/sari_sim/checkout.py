"""Self-checkout: touchscreen state machine, barcode scanning, receipts.

Button and refrigerator-door presses are edge triggered: a press fires
when a poking fingertip enters the target region, not on every command
while it rests there.  Scan registration is debounced the same way: a
barcode plane must leave the beam before its instance can register
again.
"""

from __future__ import annotations

from . import avatar
from .geometry import Vec3, angle_between, basis, rotate
from .store import (
    BUTTON_RECTS,
    SCREEN_HEIGHT,
    SCREEN_WIDTH,
    SHELF_DEPTH,
    SHELF_HEIGHT,
    WorldState,
)

# barcode plane: fraction of the front face it covers, and its clearance
BARCODE_WIDTH_FRACTION = 0.5
BARCODE_HEIGHT_FRACTION = 0.25
BARCODE_CLEARANCE = 0.005


def barcode_plane(world: WorldState, instance_id: str):
    """(center, normal, right, up, half_w, half_h) of the floating plane.

    The plane sits just in front of the product's label face (local +Z)
    and follows the instance pose rigidly.
    """
    p = world.placements[instance_id]
    right, up, fwd = basis(p.rotation)
    center = p.center + fwd.scaled(p.half_extents.z + BARCODE_CLEARANCE)
    half_w = p.half_extents.x * BARCODE_WIDTH_FRACTION
    half_h = p.half_extents.y * BARCODE_HEIGHT_FRACTION
    return center, fwd, right, up, half_w, half_h


def _press_button(world: WorldState, name: str) -> None:
    cart = world.cart
    if name == "START":
        if cart.phase == "IDLE":
            cart.phase = "ACTIVE"
            world.events.append({"type": "button", "name": "START"})
        else:
            world.warnings.append(f"START pressed in phase {cart.phase}: ignored")
    elif name == "REMOVE_LAST":
        if cart.phase == "ACTIVE" and cart.lines:
            sku, _ = cart.lines.pop()
            world.events.append({"type": "button", "name": "REMOVE_LAST", "sku": sku})
        else:
            world.warnings.append(
                f"REMOVE_LAST pressed in phase {cart.phase} "
                f"with {len(cart.lines)} line(s): ignored"
            )
    elif name == "PAY":
        if cart.phase == "ACTIVE" and cart.lines:
            cart.phase = "PAID"
            world.receipt = {
                "lines": [[sku, price] for sku, price in cart.lines],
                "total_cents": cart.total_cents,
                "sim_time": world.sim_time,
            }
            world.events.append({"type": "button", "name": "PAY"})
        else:
            world.warnings.append(
                f"PAY pressed in phase {cart.phase} "
                f"with {len(cart.lines)} line(s): ignored"
            )


def _door_regions(world: WorldState):
    """(key, shelf) pairs for shelves with doors; contact is tested
    against the shelf's front face rectangle."""
    return [
        (f"door:{s.id}", s) for s in world.layout.shelves if s.door != "none"
    ]


def _fingertip_on_screen(world: WorldState, tip: Vec3) -> str | None:
    """Button name under the fingertip, if within touch distance."""
    fixture = world.layout.checkout
    right, up, normal = fixture.screen_axes()
    center = fixture.screen_center()
    d = tip - center
    if abs(d.dot(normal)) > world.config.touch_max_dist:
        return None
    sx = d.dot(right)
    sy = d.dot(up)
    if abs(sx) > SCREEN_WIDTH / 2.0 or abs(sy) > SCREEN_HEIGHT / 2.0:
        return None
    for name, (cx, cy, w, h) in BUTTON_RECTS.items():
        if abs(sx - cx) <= w / 2.0 and abs(sy - cy) <= h / 2.0:
            return name
    return None


def _fingertip_on_door(world: WorldState, tip: Vec3, shelf) -> bool:
    rot = shelf.rotation()
    face_center = shelf.pos + rotate(rot, Vec3(0.0, SHELF_HEIGHT / 2.0, SHELF_DEPTH / 2.0))
    right, up, fwd = basis(rot)
    d = tip - face_center
    if abs(d.dot(fwd)) > 0.03:
        return False
    return abs(d.dot(right)) <= shelf.width / 2.0 and abs(d.dot(up)) <= SHELF_HEIGHT / 2.0


def process_touches(world: WorldState) -> None:
    """Fire edge-triggered presses for poking fingertips.

    Runs after every mutating command.  Contact state is per hand and
    per target, stored in the world so replay sees identical edges.
    """
    for side in ("left", "right"):
        hand = world.hands[side]
        tip = avatar.fingertip(world, side) if hand.poke else None

        button = _fingertip_on_screen(world, tip) if tip is not None else None
        for name in BUTTON_RECTS:
            key = f"{side}:button:{name}"
            now = button == name
            if now and not world.contacts.get(key, False):
                _press_button(world, name)
            world.contacts[key] = now

        for door_key, shelf in _door_regions(world):
            key = f"{side}:{door_key}"
            now = tip is not None and _fingertip_on_door(world, tip, shelf)
            if now and not world.contacts.get(key, False):
                world.doors_open[shelf.id] = not world.doors_open[shelf.id]
                world.events.append(
                    {
                        "type": "door",
                        "shelf": shelf.id,
                        "open": world.doors_open[shelf.id],
                    }
                )
            world.contacts[key] = now


def scan_attempt(world: WorldState) -> list[dict]:
    """Try to register every held item against the scanner beam.

    Success needs the beam ray to hit the item's barcode plane within
    range, and the plane normal to face the scanner within the angle
    threshold.  A latched instance must leave the beam to re-register.
    """
    if world.cart.phase != "ACTIVE":
        return []
    fixture = world.layout.checkout
    origin = fixture.scanner_origin()
    axis = fixture.scanner_axis()
    cfg = world.config
    events: list[dict] = []
    held = sorted(world.held_ids())
    in_beam: set[str] = set()
    for iid in held:
        center, normal, right, up, half_w, half_h = barcode_plane(world, iid)
        denom = axis.dot(normal)
        if abs(denom) < 1e-12:
            continue
        t = (center - origin).dot(normal) / denom
        if t < 0.0 or t > cfg.scan_max_dist:
            continue
        hit = origin + axis.scaled(t)
        d = hit - center
        if abs(d.dot(right)) > half_w or abs(d.dot(up)) > half_h:
            continue
        in_beam.add(iid)
        angle = angle_between(normal, axis.scaled(-1.0))
        if angle > cfg.scan_max_angle_deg:
            continue
        if iid in world.beam_latch:
            continue
        world.beam_latch.add(iid)
        sku = world.placements[iid].sku
        price = world.catalog.lookup(sku).price_cents
        world.cart.lines.append((sku, price))
        events.append(
            {"type": "scan", "instance": iid, "sku": sku, "price_cents": price}
        )
    # anything no longer in the beam may register again later
    world.beam_latch &= in_beam
    world.events.extend(events)
    return events


def receipt(world: WorldState) -> dict:
    if world.cart.phase != "PAID" or world.receipt is None:
        raise ValueError(f"no receipt in phase {world.cart.phase}")
    return world.receipt
