"""Vector, rotation, box, ray and camera math.

Frame convention: Y up, Z forward, X right.  Yaw rotates about +Y
(positive turns the forward vector from +Z toward +X), pitch rotates
about the local X axis (positive looks down), roll about the local Z
axis.  Rotations compose yaw, then pitch, then roll.  Angles are kept
in degrees and normalized to [0, 360).

Screen space: u grows right, v grows down, origin at the top-left
pixel corner.  Projection is an ideal pinhole with a vertical field of
view; the focal length in pixels is (height/2) / tan(fov/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .kernels import visible_sample_counts

_INF = float("inf")
SAMPLE_LATTICE = 3  # per-axis occlusion sample count on each box
OCCLUSION_EPS = 1e-9


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __add__(self, o: "Vec3") -> "Vec3":
        return Vec3(self.x + o.x, self.y + o.y, self.z + o.z)

    def __sub__(self, o: "Vec3") -> "Vec3":
        return Vec3(self.x - o.x, self.y - o.y, self.z - o.z)

    def scaled(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    def dot(self, o: "Vec3") -> float:
        return self.x * o.x + self.y * o.y + self.z * o.z

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize a zero vector")
        return Vec3(self.x / n, self.y / n, self.z / n)

    def distance(self, o: "Vec3") -> float:
        return (self - o).norm()

    def is_finite(self) -> bool:
        return (
            math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)
        )

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.z]


ZERO3 = Vec3(0.0, 0.0, 0.0)


def norm_deg(a: float) -> float:
    """Map any angle to [0, 360)."""
    a = math.fmod(a, 360.0)
    if a < 0.0:
        a += 360.0
    return a


def signed_deg(a: float) -> float:
    """Map any angle to [-180, 180)."""
    return norm_deg(a + 180.0) - 180.0


@dataclass(frozen=True)
class EulerRot:
    """(pitch, yaw, roll) in degrees, each stored normalized to [0, 360)."""

    pitch: float
    yaw: float
    roll: float

    def __post_init__(self):
        object.__setattr__(self, "pitch", norm_deg(self.pitch))
        object.__setattr__(self, "yaw", norm_deg(self.yaw))
        object.__setattr__(self, "roll", norm_deg(self.roll))

    def compose(self, d: "EulerRot") -> "EulerRot":
        return EulerRot(self.pitch + d.pitch, self.yaw + d.yaw, self.roll + d.roll)

    def as_list(self) -> list[float]:
        return [self.pitch, self.yaw, self.roll]


IDENTITY_ROT = EulerRot(0.0, 0.0, 0.0)


def rotation_matrix(rot: EulerRot) -> tuple[tuple[float, float, float], ...]:
    """Row-major world-from-local matrix for yaw -> pitch -> roll."""
    p = math.radians(rot.pitch)
    y = math.radians(rot.yaw)
    r = math.radians(rot.roll)
    cp, sp = math.cos(p), math.sin(p)
    cy, sy = math.cos(y), math.sin(y)
    cr, sr = math.cos(r), math.sin(r)
    # R = Ry(yaw) @ Rx(pitch) @ Rz(roll); positive pitch tips forward down.
    return (
        (cy * cr + sy * sp * sr, -cy * sr + sy * sp * cr, sy * cp),
        (cp * sr, cp * cr, -sp),
        (-sy * cr + cy * sp * sr, sy * sr + cy * sp * cr, cy * cp),
    )


def rotate(rot: EulerRot, v: Vec3) -> Vec3:
    m = rotation_matrix(rot)
    return Vec3(
        m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
        m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
        m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
    )


def rotate_inv(rot: EulerRot, v: Vec3) -> Vec3:
    m = rotation_matrix(rot)  # orthonormal, so inverse = transpose
    return Vec3(
        m[0][0] * v.x + m[1][0] * v.y + m[2][0] * v.z,
        m[0][1] * v.x + m[1][1] * v.y + m[2][1] * v.z,
        m[0][2] * v.x + m[1][2] * v.y + m[2][2] * v.z,
    )


def basis(rot: EulerRot) -> tuple[Vec3, Vec3, Vec3]:
    """(right, up, forward) world vectors of a rotated frame."""
    m = rotation_matrix(rot)
    right = Vec3(m[0][0], m[1][0], m[2][0])
    up = Vec3(m[0][1], m[1][1], m[2][1])
    forward = Vec3(m[0][2], m[1][2], m[2][2])
    return right, up, forward


def yaw_forward(yaw_deg: float) -> Vec3:
    y = math.radians(yaw_deg)
    return Vec3(math.sin(y), 0.0, math.cos(y))


def yaw_right(yaw_deg: float) -> Vec3:
    y = math.radians(yaw_deg)
    return Vec3(math.cos(y), 0.0, -math.sin(y))


@dataclass(frozen=True)
class Aabb:
    min: Vec3
    max: Vec3

    def __post_init__(self):
        if self.min.x > self.max.x or self.min.y > self.max.y or self.min.z > self.max.z:
            raise ValueError("Aabb min must be <= max componentwise")

    def center(self) -> Vec3:
        return Vec3(
            (self.min.x + self.max.x) * 0.5,
            (self.min.y + self.max.y) * 0.5,
            (self.min.z + self.max.z) * 0.5,
        )

    def contains(self, p: Vec3) -> bool:
        return (
            self.min.x <= p.x <= self.max.x
            and self.min.y <= p.y <= self.max.y
            and self.min.z <= p.z <= self.max.z
        )

    def corners(self) -> list[Vec3]:
        lo, hi = self.min, self.max
        return [
            Vec3(x, y, z)
            for x in (lo.x, hi.x)
            for y in (lo.y, hi.y)
            for z in (lo.z, hi.z)
        ]

    def flat(self) -> tuple[float, float, float, float, float, float]:
        return (self.min.x, self.min.y, self.min.z, self.max.x, self.max.y, self.max.z)


def aabb_from_center(center: Vec3, half: Vec3) -> Aabb:
    return Aabb(center - half, center + half)


def rotated_box_aabb(center: Vec3, rot: EulerRot, half: Vec3) -> Aabb:
    """Enclosing world AABB of an oriented box (|R| times half extents)."""
    m = rotation_matrix(rot)
    hx = abs(m[0][0]) * half.x + abs(m[0][1]) * half.y + abs(m[0][2]) * half.z
    hy = abs(m[1][0]) * half.x + abs(m[1][1]) * half.y + abs(m[1][2]) * half.z
    hz = abs(m[2][0]) * half.x + abs(m[2][1]) * half.y + abs(m[2][2]) * half.z
    return aabb_from_center(center, Vec3(hx, hy, hz))


@dataclass(frozen=True)
class Ray:
    origin: Vec3
    dir: Vec3  # unit length

    def __post_init__(self):
        n = self.dir.norm()
        if abs(n - 1.0) > 1e-9:
            raise ValueError("ray direction must be unit length")

    def at(self, t: float) -> Vec3:
        return self.origin + self.dir.scaled(t)


def ray_aabb_intersect(ray: Ray, box: Aabb) -> float | None:
    """Smallest t >= 0 with ray.at(t) on or inside the box, else None.

    An origin inside the box reports t = 0.  Total function: degenerate
    (axis-parallel) directions fall back to slab containment checks.
    """
    t = _slab_hit(
        ray.origin.x, ray.origin.y, ray.origin.z,
        ray.dir.x, ray.dir.y, ray.dir.z,
        box.min.x, box.min.y, box.min.z,
        box.max.x, box.max.y, box.max.z,
    )
    return None if t < 0.0 else t


def _slab_hit(ox, oy, oz, dx, dy, dz, lx, ly, lz, hx, hy, hz):
    """Slab test returning entry distance (0 when inside), or -1 on miss.

    Kept as flat scalars so the compiled kernel can mirror it literally.
    """
    tmin = -_INF
    tmax = _INF
    for o, d, lo, hi in ((ox, dx, lx, hx), (oy, dy, ly, hy), (oz, dz, lz, hz)):
        if d == 0.0:
            if o < lo or o > hi:
                return -1.0
        else:
            inv = 1.0 / d
            t1 = (lo - o) * inv
            t2 = (hi - o) * inv
            if t1 > t2:
                t1, t2 = t2, t1
            if t1 > tmin:
                tmin = t1
            if t2 < tmax:
                tmax = t2
    if tmin > tmax:
        return -1.0
    if tmax < 0.0:
        return -1.0
    return tmin if tmin > 0.0 else 0.0


@dataclass(frozen=True)
class CameraModel:
    position: Vec3
    rotation: EulerRot
    fov_deg: float  # vertical
    width: int
    height: int

    def __post_init__(self):
        if not (0.0 < self.fov_deg < 180.0):
            raise ValueError("fov must be in (0, 180)")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("image dimensions must be positive")

    def focal_px(self) -> float:
        return (self.height / 2.0) / math.tan(math.radians(self.fov_deg) / 2.0)

    def basis(self) -> tuple[Vec3, Vec3, Vec3]:
        return basis(self.rotation)


def to_camera(cam: CameraModel, p: Vec3) -> Vec3:
    """World point -> camera coords (x right, y up, z forward depth)."""
    d = p - cam.position
    right, up, forward = cam.basis()
    return Vec3(d.dot(right), d.dot(up), d.dot(forward))


def project_to_screen(cam: CameraModel, p: Vec3) -> tuple[float, float] | None:
    """Pinhole projection to pixels; None when p is not in front.

    The result may lie outside the image rectangle; callers clip.
    """
    c = to_camera(cam, p)
    if c.z <= 0.0:
        return None
    f = cam.focal_px()
    u = cam.width / 2.0 + f * c.x / c.z
    v = cam.height / 2.0 - f * c.y / c.z
    return (u, v)


def pixel_ray(cam: CameraModel, u: float, v: float) -> Ray:
    """World ray through a pixel coordinate (use u+0.5, v+0.5 for centers)."""
    f = cam.focal_px()
    right, up, forward = cam.basis()
    d = (
        forward
        + right.scaled((u - cam.width / 2.0) / f)
        + up.scaled((cam.height / 2.0 - v) / f)
    )
    return Ray(cam.position, d.normalized())


def angle_between(a: Vec3, b: Vec3) -> float:
    """Angle in degrees in [0, 180]; rejects zero-length input."""
    na, nb = a.norm(), b.norm()
    if na == 0.0 or nb == 0.0:
        raise ValueError("angle_between requires nonzero vectors")
    c = a.dot(b) / (na * nb)
    c = max(-1.0, min(1.0, c))
    return math.degrees(math.acos(c))


def frustum_intersects(cam: CameraModel, box: Aabb) -> bool:
    """Conservative test: False only if all corners sit outside one plane.

    Planes: near (z=0) plus the four side planes of the pinhole frustum.
    A True result may still be a miss, which the occlusion sampling stage
    resolves; a False result is always a definite miss.
    """
    tv = math.tan(math.radians(cam.fov_deg) / 2.0)
    th = tv * cam.width / cam.height
    corners = [to_camera(cam, c) for c in box.corners()]
    if all(c.z <= 0.0 for c in corners):
        return False
    for test in (
        lambda c: c.x - th * c.z > 0.0,
        lambda c: -c.x - th * c.z > 0.0,
        lambda c: c.y - tv * c.z > 0.0,
        lambda c: -c.y - tv * c.z > 0.0,
    ):
        if all(test(c) for c in corners):
            return False
    return True


def screen_bbox(cam: CameraModel, box: Aabb) -> tuple[float, float, float, float] | None:
    """Clipped [ymin, xmin, ymax, xmax] pixel bbox of the box's corners.

    Edges crossing the camera plane are clipped at a small positive depth
    before projecting.  None when nothing lies in front of the camera or
    the projection misses the image rectangle entirely.
    """
    eps = 1e-6
    cam_pts = [to_camera(cam, c) for c in box.corners()]
    pts: list[Vec3] = [c for c in cam_pts if c.z > eps]
    # corner indexing: bit2 = x hi, bit1 = y hi, bit0 = z hi (Aabb.corners order)
    edges = (
        (0, 1), (2, 3), (4, 5), (6, 7),
        (0, 2), (1, 3), (4, 6), (5, 7),
        (0, 4), (1, 5), (2, 6), (3, 7),
    )
    for i, j in edges:
        a, b = cam_pts[i], cam_pts[j]
        if (a.z > eps) != (b.z > eps):
            s = (eps - a.z) / (b.z - a.z)
            pts.append(Vec3(a.x + (b.x - a.x) * s, a.y + (b.y - a.y) * s, eps))
    if not pts:
        return None
    f = cam.focal_px()
    us = [cam.width / 2.0 + f * c.x / c.z for c in pts]
    vs = [cam.height / 2.0 - f * c.y / c.z for c in pts]
    xmin = max(0.0, min(us))
    xmax = min(float(cam.width), max(us))
    ymin = max(0.0, min(vs))
    ymax = min(float(cam.height), max(vs))
    if xmin >= xmax or ymin >= ymax:
        return None
    return (ymin, xmin, ymax, xmax)


@dataclass(frozen=True)
class VisibleInstance:
    instance_id: str
    bbox: tuple[float, float, float, float]  # [ymin, xmin, ymax, xmax] px
    distance: float
    occluded_fraction: float


def visible_set(
    cam: CameraModel, instances: list[tuple[str, Aabb]]
) -> list[VisibleInstance]:
    """Instances visible from the camera, with screen bbox and occlusion.

    Membership: the box intersects the view frustum AND at least one of a
    3x3x3 lattice of points on the box projects inside the image and is
    the first thing its eye ray hits.  All instances act as occluders,
    including off-frustum ones.  Output order follows the input order of
    the visible instances.
    """
    n = len(instances)
    if n == 0:
        return []
    boxes: list[float] = []
    for _, box in instances:
        boxes.extend(box.flat())
    candidates = [
        i for i in range(n) if frustum_intersects(cam, instances[i][1])
    ]
    tan_v = math.tan(math.radians(cam.fov_deg) / 2.0)
    tan_h = tan_v * cam.width / cam.height
    right, up, forward = cam.basis()
    counts = visible_sample_counts(
        cam.position.x, cam.position.y, cam.position.z,
        right.x, right.y, right.z,
        up.x, up.y, up.z,
        forward.x, forward.y, forward.z,
        tan_h, tan_v,
        boxes, candidates,
    )
    total = SAMPLE_LATTICE**3
    out: list[VisibleInstance] = []
    for idx, count in zip(candidates, counts):
        if count == 0:
            continue
        iid, box = instances[idx]
        bbox = screen_bbox(cam, box)
        if bbox is None:
            continue
        out.append(
            VisibleInstance(
                instance_id=iid,
                bbox=bbox,
                distance=cam.position.distance(box.center()),
                occluded_fraction=(total - count) / total,
            )
        )
    return out
