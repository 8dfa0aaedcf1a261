"""Scripted protocol client: navigation and manipulation primitives.

The agent drives the simulator exclusively through the command API,
using the semantic frame as its perception oracle (bounding boxes,
distances, label text) in place of learned detectors.  Its toolkit
mirrors the two-mode design the benchmark assumes:

  navigation:    move_forward (0.1 m), pan_left / pan_right (2.5 deg)
  manipulation:  center_object_on_screen, retrieve_item

Routes come from a semantic memory built once per layout: shelf
categories plus grid-BFS waypoints from the spawn point to every shelf
front and to the checkout.  The agent itself uses no randomness, so a
task replays to the same command sequence every run.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass

from .catalog import Catalog
from .geometry import EulerRot, Vec3, basis, norm_deg, signed_deg
from .store import Layout

STEP = 0.1
PAN_DEG = 2.5
CENTER_TOL_PX = 5.0
STRAFE_TOL_PX = 10.0
APPROACH_DEPTH = 0.6
CARDINALS = (0.0, 90.0, 180.0, 270.0)
GRID = 0.1
ROUTE_CLEARANCE = 0.25
GRAB_STANDOFF = 0.10
FINGER_PRESS_DEPTH = 0.013
SCAN_STANDOFF = 0.2
DEFAULT_BUDGET = 5000


class AgentError(Exception):
    pass


class ModeError(AgentError):
    pass


class TargetNotFound(AgentError):
    pass


class BudgetExceeded(AgentError):
    pass


class CommandFailed(AgentError):
    pass


# -- clients ---------------------------------------------------------------


class LocalClient:
    """In-process client: dispatches straight into a Simulation."""

    def __init__(self, sim, budget: int = DEFAULT_BUDGET):
        self.sim = sim
        self.budget = budget
        self.commands_used = 0
        self._next_id = 0

    def call(self, fn: str, args: dict | None = None) -> dict:
        if self.commands_used >= self.budget:
            raise BudgetExceeded(f"command budget {self.budget} exhausted")
        self._next_id += 1
        self.commands_used += 1
        result = self.sim.handle({"id": self._next_id, "fn": fn, "args": args or {}})
        if result["status"] != "ok":
            raise CommandFailed(f"{fn}: {result['error']}")
        return result["payload"]

    def close(self) -> None:
        pass


class WsClient:
    """Blocking WebSocket client speaking the JSON envelope protocol."""

    def __init__(self, url: str, budget: int = DEFAULT_BUDGET):
        from websockets.sync.client import connect

        self.conn = connect(url, max_size=16 * 1024 * 1024)
        self.budget = budget
        self.commands_used = 0
        self._next_id = 0
        hello = self._roundtrip("Hello", {"role": "controller"})
        if hello.get("role") != "controller":
            raise CommandFailed("controller role refused")

    def _roundtrip(self, fn: str, args: dict) -> dict:
        self._next_id += 1
        self.conn.send(
            json.dumps({"id": self._next_id, "fn": fn, "args": args})
        )
        while True:
            msg = json.loads(self.conn.recv())
            if msg.get("broadcast"):
                continue
            if msg.get("id") != self._next_id:
                continue
            if msg["status"] != "ok":
                raise CommandFailed(f"{fn}: {msg['error']}")
            return msg["payload"]

    def call(self, fn: str, args: dict | None = None) -> dict:
        if self.commands_used >= self.budget:
            raise BudgetExceeded(f"command budget {self.budget} exhausted")
        self.commands_used += 1
        return self._roundtrip(fn, args or {})

    def close(self) -> None:
        self.conn.close()


# -- semantic memory -------------------------------------------------------


@dataclass(frozen=True)
class RouteEntry:
    categories: tuple[str, ...]
    route: tuple[tuple[float, float], ...]  # waypoints after spawn
    face_yaw: float


@dataclass(frozen=True)
class SemanticMemory:
    shelves: dict[str, RouteEntry]
    checkout: RouteEntry
    spawn: tuple[float, float]

    @classmethod
    def from_layout(cls, layout: Layout) -> "SemanticMemory":
        planner = _RoutePlanner(layout)
        shelves = {}
        for shelf in sorted(layout.shelves, key=lambda s: s.id):
            front = shelf.front_point()
            shelves[shelf.id] = RouteEntry(
                categories=shelf.categories,
                route=planner.route_to(front.x, front.z),
                face_yaw=norm_deg(shelf.yaw + 180.0),
            )
        front = layout.checkout.front_point()
        checkout = RouteEntry(
            categories=(),
            route=planner.route_to(front.x, front.z),
            face_yaw=layout.checkout.facing_yaw(),
        )
        return cls(
            shelves=shelves,
            checkout=checkout,
            spawn=(layout.spawn_pos.x, layout.spawn_pos.z),
        )


class _RoutePlanner:
    """Grid BFS over the floor with obstacle clearance; deterministic."""

    def __init__(self, layout: Layout):
        self.layout = layout
        self.nx = int(layout.floor_w / GRID)
        self.nz = int(layout.floor_d / GRID)
        rects = []
        for shelf in layout.shelves:
            b = shelf.unit_aabb()
            rects.append((b.min.x, b.min.z, b.max.x, b.max.z))
        c = layout.checkout.counter_aabb()
        rects.append((c.min.x, c.min.z, c.max.x, c.max.z))
        self.blocked = [[False] * self.nz for _ in range(self.nx)]
        for ix in range(self.nx):
            x = (ix + 0.5) * GRID
            for iz in range(self.nz):
                z = (iz + 0.5) * GRID
                if (
                    x < ROUTE_CLEARANCE
                    or z < ROUTE_CLEARANCE
                    or x > layout.floor_w - ROUTE_CLEARANCE
                    or z > layout.floor_d - ROUTE_CLEARANCE
                ):
                    self.blocked[ix][iz] = True
                    continue
                for rx0, rz0, rx1, rz1 in rects:
                    if (
                        rx0 - ROUTE_CLEARANCE < x < rx1 + ROUTE_CLEARANCE
                        and rz0 - ROUTE_CLEARANCE < z < rz1 + ROUTE_CLEARANCE
                    ):
                        self.blocked[ix][iz] = True
                        break
        sp = layout.spawn_pos
        self.start = (int(sp.x / GRID), int(sp.z / GRID))
        self._parents = self._bfs(self.start)

    def _bfs(self, start):
        parents = {start: None}
        queue = deque([start])
        while queue:
            cx, cz = queue.popleft()
            for dx, dz in ((0, 1), (1, 0), (0, -1), (-1, 0)):
                nxt = (cx + dx, cz + dz)
                if nxt in parents:
                    continue
                if not (0 <= nxt[0] < self.nx and 0 <= nxt[1] < self.nz):
                    continue
                if self.blocked[nxt[0]][nxt[1]]:
                    continue
                parents[nxt] = (cx, cz)
                queue.append(nxt)
        return parents

    def route_to(self, x: float, z: float) -> tuple[tuple[float, float], ...]:
        goal = (int(x / GRID), int(z / GRID))
        if goal not in self._parents:
            raise AgentError(f"no route to ({x:.2f}, {z:.2f}) in layout {self.layout.id}")
        cells = []
        cur = goal
        while cur is not None:
            cells.append(cur)
            cur = self._parents[cur]
        cells.reverse()
        # keep only direction changes plus the goal
        waypoints = []
        for i in range(1, len(cells) - 1):
            ax, az = cells[i - 1]
            bx, bz = cells[i]
            cx, cz = cells[i + 1]
            if (bx - ax, bz - az) != (cx - bx, cz - bz):
                waypoints.append(cells[i])
        waypoints.append(goal)
        return tuple(((cx + 0.5) * GRID, (cz + 0.5) * GRID) for cx, cz in waypoints)


# -- the agent -------------------------------------------------------------


@dataclass
class _TaskTarget:
    skus: set[str] | None  # None = match by category only
    category: str


class ScriptedAgent:
    """Deterministic client that solves hold and scanned tasks end to end."""

    def __init__(
        self,
        client,
        layout: Layout,
        catalog: Catalog,
        image_width: int = 640,
        image_height: int = 480,
        fov_deg: float = 60.0,
        eye_height: float = 1.6,
    ):
        self.client = client
        self.layout = layout
        self.catalog = catalog
        self.memory = SemanticMemory.from_layout(layout)
        self.width = image_width
        self.height = image_height
        self.focal = (image_height / 2.0) / math.tan(math.radians(fov_deg) / 2.0)
        self.eye_height = eye_height
        self.mode = "navigation"
        self.grab_side = "right"
        self.press_side = "left"
        self._active_shelf: str | None = None
        self._held_rel_yaw: float = 0.0
        self._grab_hand_pitch: float = 0.0
        self._last_task: dict | None = None

    # -- plumbing ----------------------------------------------------------

    def _call(self, fn: str, args: dict | None = None) -> dict:
        payload = self.client.call(fn, args)
        if isinstance(payload, dict) and "task" in payload:
            self._last_task = payload["task"]
        return payload

    def _require_mode(self, mode: str) -> None:
        if self.mode != mode:
            raise ModeError(f"action requires {mode} mode, agent is in {self.mode}")

    def _env(self) -> dict:
        return self._call("GetEnvInfo")

    def _frame(self) -> dict:
        return self._call("GetSemanticFrame")

    def _pose(self) -> tuple[Vec3, float, float]:
        env = self._env()
        px, py, pz = env["avatar"]["position"]
        pitch, yaw, _ = env["avatar"]["rotation"]
        return Vec3(px, py, pz), yaw, pitch

    def _task_done(self) -> bool:
        return bool(self._last_task and self._last_task.get("done"))

    # -- navigation primitives ----------------------------------------------

    def move_forward(self) -> dict:
        self._require_mode("navigation")
        return self._call("TransformAgent", {"T": [0.0, 0.0, STEP]})

    def pan_left(self) -> dict:
        self._require_mode("navigation")
        return self._call("TransformAgent", {"R": [0.0, -PAN_DEG, 0.0]})

    def pan_right(self) -> dict:
        self._require_mode("navigation")
        return self._call("TransformAgent", {"R": [0.0, PAN_DEG, 0.0]})

    def _pan_to_yaw(self, target_yaw: float) -> None:
        """Turn to a heading that is a multiple of the pan step."""
        _, yaw, _ = self._pose()
        delta = signed_deg(target_yaw - yaw)
        steps = round(abs(delta) / PAN_DEG)
        for _ in range(steps):
            if delta > 0:
                self.pan_right()
            else:
                self.pan_left()

    def _walk_axis(self, target: float, axis: str) -> None:
        """Face the right cardinal and step until the coordinate matches."""
        pos, _, _ = self._pose()
        cur = pos.x if axis == "x" else pos.z
        delta = target - cur
        if abs(delta) < STEP / 2.0:
            return
        if axis == "x":
            heading = 90.0 if delta > 0 else 270.0
        else:
            heading = 0.0 if delta > 0 else 180.0
        self._pan_to_yaw(heading)
        for _ in range(round(abs(delta) / STEP)):
            self.move_forward()
            if self._task_done():
                return

    def _goto(self, x: float, z: float, lateral_axis: str | None = None) -> None:
        pos, _, _ = self._pose()
        first = lateral_axis or ("x" if abs(x - pos.x) >= abs(z - pos.z) else "z")
        if first == "x":
            self._walk_axis(x, "x")
            self._walk_axis(z, "z")
        else:
            self._walk_axis(z, "z")
            self._walk_axis(x, "x")

    def _follow_route(self, route) -> None:
        for wx, wz in route:
            self._goto(wx, wz)
            if self._task_done():
                return

    # -- perception oracles --------------------------------------------------

    def _match_entry(self, entry: dict, target: _TaskTarget) -> bool:
        if target.skus is not None:
            return entry["sku"] in target.skus
        return entry["category"] == target.category

    def _find_target(self, frame: dict, target: _TaskTarget) -> dict | None:
        """loc_object oracle: nearest matching entry in the frame."""
        best = None
        for entry in frame["entries"]:
            if not self._match_entry(entry, target):
                continue
            if (
                best is None
                or entry["distance"] < best["distance"]
                or (
                    entry["distance"] == best["distance"]
                    and entry["instance_id"] < best["instance_id"]
                )
            ):
                best = entry
        return best

    @staticmethod
    def est_depth(entry: dict) -> float:
        """est_depth oracle: ground-truth eye-to-target distance."""
        return entry["distance"]

    @staticmethod
    def ocr_object(entry: dict) -> dict | None:
        """ocr_object oracle: the held item's full label text."""
        return entry["legible"].get("full_label")

    @staticmethod
    def _bbox_center(entry: dict) -> tuple[float, float]:
        ymin, xmin, ymax, xmax = entry["bbox"]
        return ((xmin + xmax) / 2.0, (ymin + ymax) / 2.0)

    def _unproject(self, entry: dict) -> tuple[Vec3, Vec3]:
        """Estimated world position of an entry, and the eye ray to it."""
        pos, yaw, pitch = self._pose()
        eye = pos + Vec3(0.0, self.eye_height, 0.0)
        right, up, fwd = basis(EulerRot(pitch, yaw, 0.0))
        cx, cy = self._bbox_center(entry)
        d = (
            fwd
            + right.scaled((cx - self.width / 2.0) / self.focal)
            + up.scaled((self.height / 2.0 - cy) / self.focal)
        ).normalized()
        return eye + d.scaled(entry["distance"]), d

    # -- manipulation primitives ----------------------------------------------

    def center_object_on_screen(self, target: _TaskTarget, max_iters: int = 40) -> dict:
        """Rotate until the target's bbox center is within tolerance of
        the screen center.  Raises TargetNotFound after a full 360 scan."""
        self._require_mode("manipulation")
        entry = self._find_target(self._frame(), target)
        if entry is None:
            entry = self._search_target(target)
        if entry is None:
            raise TargetNotFound(f"no {target.category} entry in view after full scan")
        for _ in range(max_iters):
            frame = self._frame()
            entry = self._find_target(frame, target)
            if entry is None:
                raise TargetNotFound(f"{target.category} left the view while centering")
            cx, cy = self._bbox_center(entry)
            du = cx - self.width / 2.0
            dv = cy - self.height / 2.0
            if abs(du) <= CENTER_TOL_PX and abs(dv) <= CENTER_TOL_PX:
                return entry
            d_yaw = math.degrees(math.atan(du / self.focal))
            d_pitch = math.degrees(math.atan(dv / self.focal))
            self._call("TransformAgent", {"R": [d_pitch, d_yaw, 0.0]})
        return entry

    def _search_target(self, target: _TaskTarget) -> dict | None:
        """Look around: pitch sweep, then a full-circle pan scan."""
        for abs_pitch in (0.0, 30.0, -20.0):
            self._set_pitch(abs_pitch)
            entry = self._find_target(self._frame(), target)
            if entry is not None:
                return entry
        self._set_pitch(10.0)
        for _ in range(144 // 8):
            for _ in range(8):
                self._call("TransformAgent", {"R": [0.0, PAN_DEG, 0.0]})
            entry = self._find_target(self._frame(), target)
            if entry is not None:
                return entry
        return None

    def _set_pitch(self, target_pitch: float) -> None:
        _, _, pitch = self._pose()
        delta = signed_deg(target_pitch - pitch)
        if abs(delta) > 1e-9:
            self._call("TransformAgent", {"R": [delta, 0.0, 0.0]})

    def _snap_to_cardinal(self) -> float:
        _, yaw, _ = self._pose()
        best = min(CARDINALS, key=lambda c: (abs(signed_deg(yaw - c)), c))
        delta = signed_deg(best - yaw)
        if abs(delta) > 1e-9:
            self._call("TransformAgent", {"R": [0.0, delta, 0.0]})
        return best

    def strafe_to_center(self, target: _TaskTarget) -> dict:
        """Cardinal-facing lateral alignment: pixel offset -> world strafe."""
        self._require_mode("manipulation")
        _, yaw, _ = self._pose()
        if min(abs(signed_deg(yaw - c)) for c in CARDINALS) > 0.5:
            raise AgentError(f"strafe requires a cardinal heading, yaw is {yaw:.2f}")
        entry = None
        for _ in range(3):
            frame = self._frame()
            entry = self._find_target(frame, target)
            if entry is None:
                raise TargetNotFound(f"{target.category} not in view while strafing")
            cx, _ = self._bbox_center(entry)
            du = cx - self.width / 2.0
            if abs(du) <= STRAFE_TOL_PX:
                return entry
            lateral = self.est_depth(entry) * du / self.focal
            self._strafe_by(lateral)
        assert entry is not None
        return entry

    def _strafe_by(self, lateral: float) -> None:
        """Signed lateral offset -> ceil(|d|/0.1) strafes, last one sized
        to the remainder."""
        mag = abs(lateral)
        if mag < 1e-6:
            return
        sign = 1.0 if lateral > 0 else -1.0
        full = int(mag / STEP)
        rem = mag - full * STEP
        for _ in range(full):
            self._call("TransformAgent", {"T": [sign * STEP, 0.0, 0.0]})
        if rem > 1e-9:
            self._call("TransformAgent", {"T": [sign * rem, 0.0, 0.0]})

    def _pitch_toward(self, point: Vec3) -> None:
        """Tip the camera so a world point sits near the view center."""
        pos, _, _ = self._pose()
        eye_y = pos.y + self.eye_height
        horiz = math.hypot(point.x - pos.x, point.z - pos.z)
        want = math.degrees(math.atan2(eye_y - point.y, max(horiz, 1e-6)))
        self._set_pitch(want)

    def _approach(self, target: _TaskTarget, max_steps: int = 80) -> tuple[dict, Vec3]:
        """move_forward toward the target until close enough to grab.

        Stops at the depth cutoff or at a horizontal standoff: lower rows
        never reach the 3D cutoff, and stepping closer would hide them
        under the slab above.  The camera re-pitches toward the target's
        estimated position whenever it slips out of the frustum; if the
        target stays lost, back up one step and grab from there.
        """
        entry = self._find_target(self._frame(), target)
        if entry is None:
            raise TargetNotFound(f"{target.category} not in view for approach")
        est, _ = self._unproject(entry)
        last_pos, _, _ = self._pose()
        for _ in range(max_steps):
            horiz = math.hypot(est.x - last_pos.x, est.z - last_pos.z)
            if self.est_depth(entry) <= APPROACH_DEPTH or horiz <= 0.65:
                break
            payload = self._call("TransformAgent", {"T": [0.0, 0.0, STEP]})
            px, _, pz = payload["position"]
            advanced = math.hypot(px - last_pos.x, pz - last_pos.z)
            last_pos = Vec3(px, 0.0, pz)
            self._pitch_toward(est)
            fresh = self._find_target(self._frame(), target)
            if fresh is None:
                # over-stepped into the slab shadow: retreat and settle
                self._call("TransformAgent", {"T": [0.0, 0.0, -STEP]})
                self._pitch_toward(est)
                fresh = self._find_target(self._frame(), target)
                if fresh is not None:
                    entry = fresh
                    est, _ = self._unproject(entry)
                break
            entry = fresh
            est, _ = self._unproject(entry)
            if advanced < STEP * 0.9:
                break  # obstruction: shelf face reached
        return entry, est

    def _hand_to(self, side: str, palm_target: Vec3, rot_delta: EulerRot | None = None) -> dict:
        """One TransformHands moving a palm to a world target, camera frame."""
        env = self._env()
        hx, hy, hz = env["hands"][side]["position"]
        pos, yaw, pitch = (
            Vec3(*env["avatar"]["position"]),
            env["avatar"]["rotation"][1],
            env["avatar"]["rotation"][0],
        )
        right, up, fwd = basis(EulerRot(pitch, yaw, 0.0))
        d = palm_target - Vec3(hx, hy, hz)
        local = [d.dot(right), d.dot(up), d.dot(fwd)]
        args: dict = {}
        key_t = "leftT" if side == "left" else "rightT"
        args[key_t] = local
        if rot_delta is not None:
            key_r = "leftR" if side == "left" else "rightR"
            args[key_r] = [rot_delta.pitch, rot_delta.yaw, rot_delta.roll]
        return self._call("TransformHands", args)

    def _hand_rot_delta(self, side: str, target_rot: EulerRot) -> EulerRot:
        env = self._env()
        pitch, yaw, roll = env["hands"][side]["rotation"]
        return EulerRot(
            signed_deg(target_rot.pitch - pitch),
            signed_deg(target_rot.yaw - yaw),
            signed_deg(target_rot.roll - roll),
        )

    def retrieve_item(self, target: _TaskTarget) -> tuple[str, dict | None]:
        """Approach, align, grab and inspect the target.

        Returns (instance_id, full_label).  Retries the grab up to three
        times with small hand adjustments before giving up.
        """
        self._require_mode("manipulation")
        self.center_object_on_screen(target)
        entry, est = self._approach(target)
        self._snap_to_cardinal()
        # the world estimate survives the snap: pre-strafe edge slots back
        # toward the view center, then re-aim the camera and pixel-polish
        pos, yaw, _ = self._pose()
        right = basis(EulerRot(0.0, yaw, 0.0))[0]
        self._strafe_by((est - pos).dot(right))
        self._pitch_toward(est)
        entry = self.strafe_to_center(target)

        jiggles = (
            Vec3(0.0, 0.0, 0.0),
            Vec3(0.0, -0.05, 0.0),
            Vec3(0.0, 0.05, 0.0),
            Vec3(0.05, 0.0, 0.0),
        )
        for attempt, jiggle in enumerate(jiggles):
            frame = self._frame()
            entry = self._find_target(frame, target)
            if entry is None:
                raise TargetNotFound(f"{target.category} lost before grab")
            est, ray = self._unproject(entry)
            palm = est - ray.scaled(GRAB_STANDOFF) + jiggle
            self._hand_to(self.grab_side, palm)
            fn = "ToggleRightGrip" if self.grab_side == "right" else "ToggleLeftGrip"
            payload = self._call(fn)
            held = payload.get("held")
            if held == entry["instance_id"]:
                self._note_held_rotation()
                label = None
                for e in self._frame()["entries"]:
                    if e["instance_id"] == held:
                        label = self.ocr_object(e)
                        break
                return held, label
            # empty (or wrong) grab: open again and retry adjusted
            self._call(fn)
        raise AgentError(f"failed to grab {target.category} after {len(jiggles)} tries")

    def _note_held_rotation(self) -> None:
        """Item pose relative to the hand: the item stood upright at the
        active shelf's yaw when grabbed, so the offsets follow from the
        hand pose at grab time."""
        shelf_yaw = 0.0
        if self._active_shelf is not None:
            shelf_yaw = self.layout.shelf(self._active_shelf).yaw
        env = self._env()
        pitch, yaw, _ = env["hands"][self.grab_side]["rotation"]
        self._held_rel_yaw = signed_deg(shelf_yaw - yaw)
        self._grab_hand_pitch = pitch

    # -- checkout ------------------------------------------------------------

    def _press_button(self, name: str) -> dict:
        """Place the poking fingertip on a touchscreen button."""
        fixture = self.layout.checkout
        right, up, normal = fixture.screen_axes()
        btn = fixture.button_center(name)
        fwd_target = normal.scaled(-1.0)
        yaw_t = math.degrees(math.atan2(fwd_target.x, fwd_target.z))
        pitch_t = math.degrees(math.asin(-fwd_target.y))
        rot_delta = self._hand_rot_delta(self.press_side, EulerRot(pitch_t, yaw_t, 0.0))
        palm = btn + normal.scaled(FINGER_PRESS_DEPTH + 0.09)
        return self._hand_to(self.press_side, palm, rot_delta)

    def _checkout_scan(self, target_sku: str) -> bool:
        """Present the held item's barcode to the scanner until it beeps.

        The barcode plane faces the item's label side, so aiming it at
        the scanner means giving the item the yaw opposite the beam and
        undoing any pitch the hand has picked up since the grab.
        """
        fixture = self.layout.checkout
        origin = fixture.scanner_origin()
        axis = fixture.scanner_axis()
        want_fwd = axis.scaled(-1.0)
        item_yaw = math.degrees(math.atan2(want_fwd.x, want_fwd.z))
        env = self._env()
        pitch_now, yaw_now, _ = env["hands"][self.grab_side]["rotation"]
        d_pitch = signed_deg(self._grab_hand_pitch - pitch_now)
        d_yaw = signed_deg((item_yaw - self._held_rel_yaw) - yaw_now)
        key_r = "rightR" if self.grab_side == "right" else "leftR"
        self._call("TransformHands", {key_r: [d_pitch, d_yaw, 0.0]})
        for nudge in (0.0, -0.02, 0.02, -0.04):
            item_center = origin + axis.scaled(SCAN_STANDOFF + nudge)
            payload = self._hand_to_held_center(item_center)
            for event in payload.get("events", []):
                if event.get("type") == "scan" and event.get("sku") == target_sku:
                    return True
            cart = payload.get("cart", {})
            if any(sku == target_sku for sku, _ in cart.get("lines", [])):
                return True
        return False

    def _hand_to_held_center(self, item_target: Vec3) -> dict:
        """Move the grab hand so the held item's center lands on a point.

        The item keeps a fixed offset from the palm, so measure it from
        one frame and move the palm by the same world delta.
        """
        frame = self._frame()
        held_entry = None
        for e in frame["entries"]:
            if e["held"]:
                held_entry = e
                break
        if held_entry is None:
            raise AgentError("no held item visible while positioning for scan")
        est, _ = self._unproject(held_entry)
        env = self._env()
        hx, hy, hz = env["hands"][self.grab_side]["position"]
        palm_target = Vec3(hx, hy, hz) + (item_target - est)
        return self._hand_to(self.grab_side, palm_target)

    # -- task driver -----------------------------------------------------------

    def _resolve_target(self, goal_match: dict) -> _TaskTarget:
        key, value = next(iter(goal_match.items()))
        if key == "category":
            return _TaskTarget(skus=None, category=value)
        if key == "sku":
            product = self.catalog.lookup(value)
            return _TaskTarget(skus={value}, category=product.category)
        needle = value.lower()
        products = sorted(
            (p for p in self.catalog.products if needle in p.name.lower()),
            key=lambda p: p.sku,
        )
        if not products:
            raise AgentError(f"match {goal_match!r} selects nothing")
        return _TaskTarget(
            skus={p.sku for p in products}, category=products[0].category
        )

    def _shelves_for(self, target: _TaskTarget) -> list[str]:
        return [
            sid
            for sid, mem in sorted(self.memory.shelves.items())
            if target.category in mem.categories
        ]

    def run_task(self, task) -> dict:
        """Drive one task to its outcome; returns the final task status."""
        spec = task.as_dict() if hasattr(task, "as_dict") else dict(task)
        goal = spec["goal"]
        if goal["type"] not in ("hold", "scanned"):
            raise AgentError(f"scripted agent does not handle {goal['type']} goals")
        target = self._resolve_target(goal["match"])

        held = None
        last_err: AgentError | None = None
        for shelf_id in self._shelves_for(target):
            mem = self.memory.shelves[shelf_id]
            self._active_shelf = shelf_id
            self.mode = "navigation"
            self._follow_route(mem.route)
            if self._task_done():
                return self._last_task or {}
            self._pan_to_yaw(mem.face_yaw)
            self.mode = "manipulation"
            try:
                held, _label = self.retrieve_item(target)
                break
            except AgentError as e:
                last_err = e
                self._set_pitch(0.0)
                continue
        if held is None:
            raise last_err or TargetNotFound(f"no shelf yielded {target.category}")
        if goal["type"] != "scanned":
            if not self._task_done():
                raise AgentError("hold goal reported not-done after successful grab")
            return self._last_task or {}

        # pay at the checkout: back out to the aisle, retrace to spawn,
        # then follow the memorized checkout route
        assert self._active_shelf is not None
        self._set_pitch(0.0)
        self.mode = "navigation"
        shelf = self.layout.shelf(self._active_shelf)
        mem = self.memory.shelves[self._active_shelf]
        front = mem.route[-1]
        lateral_axis = "x" if shelf.yaw in (0.0, 180.0) else "z"
        self._goto(front[0], front[1], lateral_axis=lateral_axis)
        back = tuple(reversed(mem.route))
        self._follow_route(back[1:] + (self.memory.spawn,))
        self._follow_route(self.memory.checkout.route)
        self._pan_to_yaw(self.memory.checkout.face_yaw)

        self.mode = "manipulation"
        self._press_button("START")
        poke_fn = "ToggleLeftPoke" if self.press_side == "left" else "ToggleRightPoke"
        payload = self._call(poke_fn)
        if payload.get("cart", {}).get("phase") != "ACTIVE":
            payload = self._press_button("START")  # re-enter fires the edge
        if payload.get("cart", {}).get("phase") != "ACTIVE":
            raise AgentError("START press never activated the checkout")
        held_sku = self._held_sku()
        if not self._checkout_scan(held_sku):
            raise AgentError("scanner never registered the held item")
        self._press_button("PAY")
        if not self._task_done():
            raise AgentError("paid but the task did not complete")
        return self._last_task or {}

    def _held_sku(self) -> str:
        for e in self._frame()["entries"]:
            if e["held"]:
                return e["sku"]
        raise AgentError("nothing held while preparing to scan")
