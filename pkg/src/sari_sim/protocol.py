"""Wire protocol: command envelopes, dispatch, canonical state hashing.

One CommandEnvelope in, one ResultEnvelope out, ids echoed verbatim.
The eight core functions mirror the control API; GetEnvInfo and
GetSemanticFrame are data-query extensions and are flagged ext in
their results.

Mutating commands advance the sim clock by one fixed step and then run
the world's reactive rules (touch presses, scanner attempts).  All of
this is wall-clock free: replaying the same envelopes from the same
Reset always produces the same world, which `state_hash` certifies.

Floats in canonical forms are fixed to six decimals, which is what
makes hashes and logs byte-stable across machines.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any, Callable

from . import avatar, checkout, observe
from .catalog import Catalog
from .config import SimConfig
from .geometry import Vec3
from .store import LAYOUT_IDS, WorldState, reset_world

CORE_FNS = (
    "TransformAgent",
    "TransformHands",
    "ToggleLeftGrip",
    "ToggleRightGrip",
    "ToggleLeftPoke",
    "ToggleRightPoke",
    "RequestScreenshot",
    "Reset",
)
EXTENSION_FNS = ("GetEnvInfo", "GetSemanticFrame")
MUTATING_FNS = frozenset(
    {
        "TransformAgent",
        "TransformHands",
        "ToggleLeftGrip",
        "ToggleRightGrip",
        "ToggleLeftPoke",
        "ToggleRightPoke",
    }
)


class CommandError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def fmt6(x: float) -> str:
    """Fixed 6-decimal formatting; negative zero collapses to zero."""
    if x == 0.0:
        x = 0.0
    return f"{x:.6f}"


def fmt6_list(xs) -> list[str]:
    return [fmt6(float(x)) for x in xs]


def _vec3(args: dict, key: str) -> Vec3:
    raw = args.get(key, [0.0, 0.0, 0.0])
    if not isinstance(raw, (list, tuple)) or len(raw) != 3:
        raise CommandError("bad_args", f"{key} must be a 3-element array")
    vals = []
    for c in raw:
        if isinstance(c, bool) or not isinstance(c, (int, float)):
            raise CommandError("bad_args", f"{key} components must be numbers")
        vals.append(float(c))
    v = Vec3(vals[0], vals[1], vals[2])
    if not v.is_finite():
        raise CommandError("bad_args", f"{key} components must be finite")
    return v


def _int_arg(args: dict, key: str, default: int | None) -> int:
    raw = args.get(key, default)
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise CommandError("bad_args", f"{key} must be an integer")
    return raw


class Simulation:
    """Single-writer simulation: owns the world and applies envelopes.

    The recorder hook (if set) sees every accepted envelope and runs
    after each mutating command; the bench module uses it for 10 Hz
    tick logging and task evaluation.
    """

    def __init__(
        self,
        catalog: Catalog,
        config: SimConfig,
        layout_id: int = 1,
        seed: int = 0,
    ):
        self.catalog = catalog
        self.config = config
        self.default_layout = layout_id
        self.default_seed = seed
        self.world: WorldState = reset_world(layout_id, seed, catalog, config)
        self.recorder = None  # bench.EpisodeRecorder, when armed
        self.on_reset: Callable[[WorldState], None] | None = None

    # -- dispatch ---------------------------------------------------------

    def handle(self, envelope: Any) -> dict:
        """Apply one CommandEnvelope, returning its ResultEnvelope."""
        req_id = None
        try:
            if not isinstance(envelope, dict):
                raise CommandError("bad_args", "envelope must be a JSON object")
            req_id = envelope.get("id")
            if isinstance(req_id, bool) or not isinstance(req_id, int):
                req_id = None
                raise CommandError("bad_args", "envelope id must be an integer")
            fn = envelope.get("fn")
            if not isinstance(fn, str):
                raise CommandError("bad_args", "envelope fn must be a string")
            args = envelope.get("args", {})
            if not isinstance(args, dict):
                raise CommandError("bad_args", "envelope args must be an object")
            if self.recorder is not None:
                self.recorder.on_command(envelope)
            payload = self._apply(fn, args)
        except CommandError as e:
            return {
                "id": req_id,
                "status": "error",
                "error": {"code": e.code, "message": e.message},
                "tick": self.world.sim_time,
            }
        result = {
            "id": req_id,
            "status": "ok",
            "payload": payload,
            "tick": self.world.sim_time,
        }
        if fn in EXTENSION_FNS:
            result["ext"] = True
        return result

    def _apply(self, fn: str, args: dict) -> dict:
        world = self.world
        if fn == "Reset":
            layout = _int_arg(args, "layout", self.default_layout)
            seed = _int_arg(args, "seed", self.default_seed)
            if layout not in LAYOUT_IDS:
                raise CommandError("unknown_layout", f"no layout {layout}")
            self.world = reset_world(layout, seed, self.catalog, self.config)
            if self.recorder is not None:
                self.recorder.on_reset(self)
            if self.on_reset is not None:
                self.on_reset(self.world)
            return {"layout": layout, "seed": seed}
        if fn == "RequestScreenshot":
            return observe.screenshot_payload(world)
        if fn == "GetEnvInfo":
            return observe.env_info(world)
        if fn == "GetSemanticFrame":
            return observe.semantic_frame(world)
        if fn not in MUTATING_FNS:
            raise CommandError("unknown_function", f"unknown function {fn!r}")

        world.events.clear()
        world.warnings.clear()
        if fn == "TransformAgent":
            avatar.transform_agent(world, _vec3(args, "T"), _vec3(args, "R"))
            payload = {
                "position": world.avatar.body.as_list(),
                "rotation": world.avatar.rotation().as_list(),
            }
        elif fn == "TransformHands":
            avatar.transform_hands(
                world,
                _vec3(args, "leftT"),
                _vec3(args, "leftR"),
                _vec3(args, "rightT"),
                _vec3(args, "rightR"),
            )
            payload = {
                side: {
                    "position": hand.pos.as_list(),
                    "rotation": hand.rot.as_list(),
                    "held": hand.held,
                }
                for side, hand in world.hands.items()
            }
        elif fn in ("ToggleLeftGrip", "ToggleRightGrip"):
            side = "left" if fn == "ToggleLeftGrip" else "right"
            avatar.toggle_grip(world, side)
            hand = world.hands[side]
            payload = {"side": side, "grip": hand.grip, "held": hand.held}
        else:  # ToggleLeftPoke / ToggleRightPoke
            side = "left" if fn == "ToggleLeftPoke" else "right"
            avatar.toggle_poke(world, side)
            payload = {"side": side, "poke": world.hands[side].poke}

        world.clock_units += 1
        checkout.process_touches(world)
        checkout.scan_attempt(world)
        payload["warnings"] = list(world.warnings)
        payload["events"] = list(world.events)
        payload["cart"] = {
            "phase": world.cart.phase,
            "lines": [[sku, price] for sku, price in world.cart.lines],
            "total_cents": world.cart.total_cents,
        }
        if world.receipt is not None:
            payload["receipt"] = world.receipt
        if self.recorder is not None:
            self.recorder.after_mutation(self)
            status = self.recorder.task_status()
            if status is not None:
                payload["task"] = status
        return payload


# -- canonical state ------------------------------------------------------


def canonical_world(world: WorldState) -> dict:
    """Plain-data world snapshot with 6-decimal floats, hash-stable."""
    hands = {}
    for side in ("left", "right"):
        hand = world.hands[side]
        hands[side] = {
            "pos": fmt6_list(hand.pos.as_list()),
            "rot": fmt6_list(hand.rot.as_list()),
            "grip": hand.grip,
            "poke": hand.poke,
            "held": hand.held,
            "hovered": hand.hovered,
        }
    placements = []
    for iid in sorted(world.placements):
        p = world.placements[iid]
        placements.append(
            {
                "id": iid,
                "sku": p.sku,
                "slot": list(p.slot),
                "center": fmt6_list(p.center.as_list()),
                "rot": fmt6_list(p.rotation.as_list()),
                "half": fmt6_list(p.half_extents.as_list()),
                "expiration": p.expiration,
                "on_shelf": p.on_shelf,
            }
        )
    return {
        "layout": world.layout.id,
        "seed": world.seed,
        "clock_units": world.clock_units,
        "avatar": {
            "body": fmt6_list(world.avatar.body.as_list()),
            "yaw": fmt6(world.avatar.yaw),
            "pitch": fmt6(world.avatar.pitch),
        },
        "hands": hands,
        "placements": placements,
        "doors": {k: world.doors_open[k] for k in sorted(world.doors_open)},
        "cart": {
            "phase": world.cart.phase,
            "lines": [[sku, price] for sku, price in world.cart.lines],
            "total_cents": world.cart.total_cents,
        },
        "beam": sorted(world.beam_latch),
        "contacts": {k: world.contacts[k] for k in sorted(world.contacts)},
        "receipt": world.receipt,
    }


def state_hash(world: WorldState) -> str:
    doc = json.dumps(
        canonical_world(world), sort_keys=True, separators=(",", ":")
    )
    return hashlib.sha256(doc.encode("utf-8")).hexdigest()
