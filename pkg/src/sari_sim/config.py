"""Tunable simulation constants and their JSON config file.

Every threshold that gates an interaction (grasp radius, scanner cone,
legibility distances, ...) lives here so a single config hash pins the
behavior of an episode.  Values not present in a config file keep their
defaults.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, fields


@dataclass(frozen=True)
class SimConfig:
    # camera
    image_width: int = 640
    image_height: int = 480
    fov_deg: float = 60.0  # vertical
    eye_height: float = 1.6
    hand_drop: float = 0.5  # hands spawn this far below the eye

    # avatar
    pitch_limit_deg: float = 89.0
    reach: float = 1.2
    grasp_radius: float = 0.15
    fingertip_offset: float = 0.09
    wall_skin: float = 0.01

    # checkout
    scan_max_angle_deg: float = 30.0
    scan_max_dist: float = 0.3
    touch_max_dist: float = 0.02

    # observation legibility tiers
    name_legible_dist: float = 2.0
    name_legible_angle_deg: float = 25.0
    expiry_legible_dist: float = 0.6

    # time
    command_dt: float = 0.05  # sim seconds per mutating command
    log_dt: float = 0.1  # tick record cadence

    def hash(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def load_config(path: str | None = None) -> SimConfig:
    """Build a SimConfig, overlaying defaults with a JSON file if given."""
    if path is None:
        return SimConfig()
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError("config file must contain a JSON object")
    known = {f.name for f in fields(SimConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    return SimConfig(**raw)
