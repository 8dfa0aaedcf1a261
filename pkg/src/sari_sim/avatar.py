"""Avatar and hand kinematics: movement, grabbing, poking, drop settling.

Body translation happens in the avatar's yaw frame and is clipped
against shelf and counter footprints per axis (slide along the blocked
surface, never a hard failure).  Hand translation happens in the full
camera frame and is clamped to a reach sphere.  Held items follow their
hand rigidly via a hand-local offset captured at grab time.

Physics is kinematic: a released item translates straight down until it
rests on the highest shelf slab or the floor under its footprint.
"""

from __future__ import annotations

from .geometry import (
    EulerRot,
    Vec3,
    basis,
    norm_deg,
    rotate,
    rotate_inv,
    signed_deg,
    yaw_forward,
    yaw_right,
)
from .store import WorldState


def camera_basis(world: WorldState) -> tuple[Vec3, Vec3, Vec3]:
    return basis(world.avatar.rotation())


def fingertip(world: WorldState, side: str) -> Vec3:
    """Index fingertip: palm plus a fixed offset along the hand's forward."""
    hand = world.hands[side]
    _, _, fwd = basis(hand.rot)
    return hand.pos + fwd.scaled(world.config.fingertip_offset)


def _clip_axis(
    x: float,
    z: float,
    d: float,
    axis: str,
    rects: list[tuple[float, float, float, float]],
    floor_w: float,
    floor_d: float,
    skin: float,
) -> float:
    """New coordinate after moving d along one axis, stopping skin short
    of any obstacle rect or the floor boundary.  Movement out of an
    already-overlapped rect is never blocked (no trapping)."""
    if axis == "x":
        pos, lateral, bound = x, z, floor_w
    else:
        pos, lateral, bound = z, x, floor_d
    target = pos + d
    if d > 0.0:
        limit = bound - skin
        for rx0, rz0, rx1, rz1 in rects:
            lo, hi = (rx0, rx1) if axis == "x" else (rz0, rz1)
            l0, l1 = (rz0, rz1) if axis == "x" else (rx0, rx1)
            if l0 - skin < lateral < l1 + skin and pos <= lo - skin:
                limit = min(limit, lo - skin)
        return min(target, limit)
    if d < 0.0:
        limit = skin
        for rx0, rz0, rx1, rz1 in rects:
            lo, hi = (rx0, rx1) if axis == "x" else (rz0, rz1)
            l0, l1 = (rz0, rz1) if axis == "x" else (rx0, rx1)
            if l0 - skin < lateral < l1 + skin and pos >= hi + skin:
                limit = max(limit, hi + skin)
        return max(target, limit)
    return pos


def transform_agent(world: WorldState, dT: Vec3, dR: Vec3) -> None:
    """Rotate (yaw/pitch), then translate in the new local frame.

    dT.y is dropped: the body height is invariant.  Hands and any held
    items are carried along, keeping their camera-local pose.
    """
    av = world.avatar
    cfg = world.config
    old_cam = world.camera_pos()
    old_basis = basis(av.rotation())
    old_yaw, old_pitch = av.yaw, av.pitch

    av.yaw = norm_deg(av.yaw + dR.y)
    # clamp the unwrapped sum so large deltas saturate at the right side
    new_pitch = signed_deg(av.pitch) + dR.x
    av.pitch = norm_deg(
        max(-cfg.pitch_limit_deg, min(cfg.pitch_limit_deg, new_pitch))
    )

    w = yaw_right(av.yaw).scaled(dT.x) + yaw_forward(av.yaw).scaled(dT.z)
    rects = world.obstacle_rects()
    nx = _clip_axis(
        av.body.x, av.body.z, w.x, "x", rects,
        world.layout.floor_w, world.layout.floor_d, cfg.wall_skin,
    )
    nz = _clip_axis(
        nx, av.body.z, w.z, "z", rects,
        world.layout.floor_w, world.layout.floor_d, cfg.wall_skin,
    )
    av.body = Vec3(nx, av.body.y, nz)

    # carry hands: keep their pose relative to the camera frame
    new_cam = world.camera_pos()
    new_basis = basis(av.rotation())
    d_yaw = signed_deg(av.yaw - old_yaw)
    d_pitch = signed_deg(av.pitch - old_pitch)
    for hand in world.hands.values():
        rel = hand.pos - old_cam
        local = Vec3(
            rel.dot(old_basis[0]), rel.dot(old_basis[1]), rel.dot(old_basis[2])
        )
        hand.pos = (
            new_cam
            + new_basis[0].scaled(local.x)
            + new_basis[1].scaled(local.y)
            + new_basis[2].scaled(local.z)
        )
        hand.rot = hand.rot.compose(EulerRot(d_pitch, d_yaw, 0.0))
    _update_held(world)
    _update_hover(world)


def transform_hands(
    world: WorldState,
    left_t: Vec3,
    left_r: Vec3,
    right_t: Vec3,
    right_r: Vec3,
) -> None:
    """Translate each hand in the camera frame, clamp to the reach sphere."""
    cam = world.camera_pos()
    right, up, fwd = camera_basis(world)
    for side, (t, r) in (("left", (left_t, left_r)), ("right", (right_t, right_r))):
        hand = world.hands[side]
        hand.pos = (
            hand.pos + right.scaled(t.x) + up.scaled(t.y) + fwd.scaled(t.z)
        )
        dist = hand.pos.distance(cam)
        if dist > world.config.reach:
            hand.pos = cam + (hand.pos - cam).scaled(world.config.reach / dist)
        hand.rot = hand.rot.compose(EulerRot(r.x, r.y, r.z))
    _update_held(world)
    _update_hover(world)


def _grab_blocked(world: WorldState, instance_id: str) -> bool:
    """True while the instance sits on a shelf behind a closed door."""
    p = world.placements[instance_id]
    if not p.on_shelf:
        return False
    shelf = world.layout.shelf(p.slot[0])
    if shelf.door == "none":
        return False
    return not world.doors_open.get(shelf.id, False)


def toggle_grip(world: WorldState, side: str) -> None:
    """Close: attach the nearest graspable instance, or close empty.
    Open: release, kinematically settle the item, flag it off-shelf."""
    hand = world.hands[side]
    if not hand.grip_closed:
        hand.grip_closed = True
        best_id = None
        best_d = 0.0
        for iid, p in world.placements.items():
            if iid in world.held_ids():
                continue
            if _grab_blocked(world, iid):
                continue
            d = p.center.distance(hand.pos)
            if d > world.config.grasp_radius:
                continue
            if best_id is None or d < best_d or (d == best_d and iid < best_id):
                best_id = iid
                best_d = d
        if best_id is not None:
            p = world.placements[best_id]
            hand.held = best_id
            hand.hold_offset = rotate_inv(hand.rot, p.center - hand.pos)
            hand.hold_rel_rot = EulerRot(
                p.rotation.pitch - hand.rot.pitch,
                p.rotation.yaw - hand.rot.yaw,
                p.rotation.roll - hand.rot.roll,
            )
            world.events.append({"type": "grab", "side": side, "instance": best_id})
    else:
        hand.grip_closed = False
        if hand.held is not None:
            iid = hand.held
            hand.held = None
            hand.hold_offset = None
            hand.hold_rel_rot = None
            world.placements[iid].on_shelf = False
            settle_drop(world, iid)
            world.events.append({"type": "release", "side": side, "instance": iid})
    _update_hover(world)


def toggle_poke(world: WorldState, side: str) -> None:
    hand = world.hands[side]
    hand.poke = not hand.poke


def settle_drop(world: WorldState, instance_id: str) -> None:
    """Drop straight down onto the highest support under the footprint."""
    p = world.placements[instance_id]
    box = p.world_aabb()
    bottom = box.min.y
    rest = 0.0  # floor
    for xmin, zmin, xmax, zmax, top in world.support_surfaces():
        if top > bottom + 1e-9:
            continue
        if xmax <= box.min.x or xmin >= box.max.x:
            continue
        if zmax <= box.min.z or zmin >= box.max.z:
            continue
        if top > rest:
            rest = top
    p.center = Vec3(p.center.x, p.center.y - (bottom - rest), p.center.z)


def _update_held(world: WorldState) -> None:
    for hand in world.hands.values():
        if hand.held is None:
            continue
        p = world.placements[hand.held]
        assert hand.hold_offset is not None and hand.hold_rel_rot is not None
        p.center = hand.pos + rotate(hand.rot, hand.hold_offset)
        p.rotation = hand.rot.compose(hand.hold_rel_rot)


def _update_hover(world: WorldState) -> None:
    held = world.held_ids()
    for hand in world.hands.values():
        best_id = None
        best_d = 0.0
        for iid, p in world.placements.items():
            if iid in held:
                continue
            d = p.center.distance(hand.pos)
            if d > world.config.grasp_radius:
                continue
            if best_id is None or d < best_d or (d == best_d and iid < best_id):
                best_id = iid
                best_d = d
        hand.hovered = best_id
