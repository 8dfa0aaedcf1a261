"""Geometry kernels against independent oracles.

The ray/box oracle marches the ray in small steps and reports the first
sample inside the box; the visibility oracle rasterizes the scene into
a tiny z-buffer and asks which boxes own at least one pixel.  Both are
deliberately brute force and share no code with the production path.
"""

from __future__ import annotations

import math
import random

import pytest

from sari_sim.geometry import (
    Aabb,
    CameraModel,
    EulerRot,
    Ray,
    Vec3,
    aabb_from_center,
    angle_between,
    pixel_ray,
    project_to_screen,
    ray_aabb_intersect,
    rotate,
    visible_set,
)

CAM = CameraModel(
    position=Vec3(0.0, 0.0, 0.0),
    rotation=EulerRot(0.0, 0.0, 0.0),
    fov_deg=60.0,
    width=640,
    height=480,
)


def march_oracle(ray: Ray, box: Aabb, t_max: float = 20.0, dt: float = 1e-3):
    """First sample point inside the box, scanning t = 0, dt, 2dt, ..."""
    t = 0.0
    while t <= t_max:
        if box.contains(ray.at(t)):
            return t
        t += dt
    return None


class TestRayAabb:
    def test_axis_aligned_slab(self):
        ray = Ray(Vec3(0, 0, 0), Vec3(0, 0, 1))
        box = Aabb(Vec3(-1, -1, 2), Vec3(1, 1, 3))
        assert ray_aabb_intersect(ray, box) == pytest.approx(2.0)

    def test_origin_inside_is_zero(self):
        ray = Ray(Vec3(0, 0, 0), Vec3(0, 0, 1))
        box = Aabb(Vec3(-1, -1, -1), Vec3(1, 1, 1))
        assert ray_aabb_intersect(ray, box) == 0.0

    def test_miss_is_none(self):
        ray = Ray(Vec3(0, 0, 0), Vec3(0, 0, -1))
        box = Aabb(Vec3(-1, -1, 2), Vec3(1, 1, 3))
        assert ray_aabb_intersect(ray, box) is None

    def test_against_marching_oracle(self):
        rng = random.Random(1234)
        for _ in range(1000):
            origin = Vec3(*(rng.uniform(-3, 3) for _ in range(3)))
            d = Vec3(*(rng.uniform(-1, 1) for _ in range(3)))
            if d.norm() < 1e-3:
                continue
            ray = Ray(origin, d.normalized())
            lo = Vec3(*(rng.uniform(-3, 2) for _ in range(3)))
            size = Vec3(rng.uniform(0.1, 2), rng.uniform(0.1, 2), rng.uniform(0.1, 2))
            box = Aabb(lo, lo + size)
            got = ray_aabb_intersect(ray, box)
            want = march_oracle(ray, box)
            if want is None:
                # the march can step across very thin silhouettes; only
                # genuine disagreements count
                assert got is None or got > 0.0
            else:
                assert got is not None
                assert got == pytest.approx(want, abs=2e-3)

    def test_hit_point_inside_inflated_box(self):
        rng = random.Random(77)
        for _ in range(500):
            origin = Vec3(*(rng.uniform(-3, 3) for _ in range(3)))
            d = Vec3(*(rng.uniform(-1, 1) for _ in range(3)))
            if d.norm() < 1e-3:
                continue
            ray = Ray(origin, d.normalized())
            lo = Vec3(*(rng.uniform(-3, 2) for _ in range(3)))
            box = Aabb(lo, lo + Vec3(1, 1, 1))
            t = ray_aabb_intersect(ray, box)
            if t is None:
                continue
            p = ray.at(t)
            eps = 1e-6
            assert box.min.x - eps <= p.x <= box.max.x + eps
            assert box.min.y - eps <= p.y <= box.max.y + eps
            assert box.min.z - eps <= p.z <= box.max.z + eps


class TestProjection:
    def test_optical_axis_hits_center(self):
        for depth in (0.1, 1.0, 25.0):
            assert project_to_screen(CAM, Vec3(0, 0, depth)) == (320.0, 240.0)

    def test_fov_edge_lands_on_top_row(self):
        # vertical offset tan(30 deg) at depth 1 is exactly the half-fov edge
        u, v = project_to_screen(CAM, Vec3(0.0, math.tan(math.radians(30.0)), 1.0))
        assert u == pytest.approx(320.0)
        assert v == pytest.approx(0.0, abs=1e-9)

    def test_behind_camera_is_none(self):
        assert project_to_screen(CAM, Vec3(0, 0, -1)) is None

    def test_scale_consistency(self):
        big = CameraModel(CAM.position, CAM.rotation, CAM.fov_deg, 1280, 960)
        rng = random.Random(5)
        for _ in range(100):
            p = Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0.2, 5))
            u1, v1 = project_to_screen(CAM, p)
            u2, v2 = project_to_screen(big, p)
            assert u2 - 640.0 == pytest.approx(2 * (u1 - 320.0), rel=1e-9, abs=1e-9)
            assert v2 - 480.0 == pytest.approx(2 * (v1 - 240.0), rel=1e-9, abs=1e-9)

    def test_pixel_ray_round_trip(self):
        rng = random.Random(9)
        for _ in range(50):
            p = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.5, 4))
            u, v = project_to_screen(CAM, p)
            ray = pixel_ray(CAM, u, v)
            t = p.distance(CAM.position)
            assert ray.at(t).distance(p) < 1e-6 * max(1.0, t)


class TestAngleBetween:
    def test_parallel(self):
        assert angle_between(Vec3(1, 0, 0), Vec3(1, 0, 0)) == 0.0

    def test_orthogonal(self):
        assert angle_between(Vec3(1, 0, 0), Vec3(0, 1, 0)) == pytest.approx(90.0)

    def test_diagonal(self):
        assert angle_between(Vec3(1, 1, 0), Vec3(1, 0, 0)) == pytest.approx(45.0)

    def test_symmetry_and_opposition(self):
        rng = random.Random(3)
        for _ in range(200):
            a = Vec3(*(rng.uniform(-1, 1) for _ in range(3)))
            b = Vec3(*(rng.uniform(-1, 1) for _ in range(3)))
            if a.norm() < 1e-6 or b.norm() < 1e-6:
                continue
            assert angle_between(a, b) == pytest.approx(angle_between(b, a))
            assert angle_between(a, a.scaled(-1.0)) == pytest.approx(180.0)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            angle_between(Vec3(0, 0, 0), Vec3(1, 0, 0))


def random_scene(rng: random.Random, count: int) -> list[tuple[str, Aabb]]:
    """Non-overlapping random boxes in front of the camera.  Instances in
    the store never interpenetrate, so neither do oracle scenes."""
    instances: list[tuple[str, Aabb]] = []
    tries = 0
    while len(instances) < count and tries < 10000:
        tries += 1
        c = Vec3(rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5), rng.uniform(0.8, 7))
        h = Vec3(rng.uniform(0.1, 0.4), rng.uniform(0.1, 0.4), rng.uniform(0.1, 0.4))
        box = aabb_from_center(c, h)
        if any(
            box.min.x < b.max.x and b.min.x < box.max.x
            and box.min.y < b.max.y and b.min.y < box.max.y
            and box.min.z < b.max.z and b.min.z < box.max.z
            for _, b in instances
        ):
            continue
        instances.append((f"i{len(instances)}", box))
    return instances


def raster_oracle(cam: CameraModel, instances, size: int = 64) -> set[str]:
    """Tiny z-buffer: a size x size ray grid over the camera's own image
    plane, nearest box owns the sample; visible = owns at least one."""
    owner_visible: set[str] = set()
    for py in range(size):
        for px in range(size):
            u = (px + 0.5) * cam.width / size
            v = (py + 0.5) * cam.height / size
            ray = pixel_ray(cam, u, v)
            best_t, best_id = None, None
            for iid, box in instances:
                t = ray_aabb_intersect(ray, box)
                if t is not None and (best_t is None or t < best_t):
                    best_t, best_id = t, iid
            if best_id is not None:
                owner_visible.add(best_id)
    return owner_visible


class TestVisibleSet:
    def test_empty(self):
        assert visible_set(CAM, []) == []

    def test_full_occlusion_excludes_back_box(self):
        front = ("front", aabb_from_center(Vec3(0, 0, 1), Vec3(0.5, 0.5, 0.05)))
        back = ("back", aabb_from_center(Vec3(0, 0, 2), Vec3(0.2, 0.2, 0.05)))
        ids = {v.instance_id for v in visible_set(CAM, [front, back])}
        assert ids == {"front"}

    def test_visible_box_reports_bbox_and_distance(self):
        box = aabb_from_center(Vec3(0, 0, 2), Vec3(0.2, 0.2, 0.2))
        (vis,) = visible_set(CAM, [("b", box)])
        assert vis.distance == pytest.approx(2.0)
        ymin, xmin, ymax, xmax = vis.bbox
        assert 0 <= xmin < 320 < xmax <= 640
        assert 0 <= ymin < 240 < ymax <= 480
        assert vis.occluded_fraction == 0.0

    def test_behind_camera_excluded(self):
        box = aabb_from_center(Vec3(0, 0, -2), Vec3(0.2, 0.2, 0.2))
        assert visible_set(CAM, [("b", box)]) == []

    def test_order_independence(self):
        rng = random.Random(21)
        instances = []
        for i in range(30):
            c = Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0.5, 6))
            h = Vec3(rng.uniform(0.05, 0.4), rng.uniform(0.05, 0.4), rng.uniform(0.05, 0.4))
            instances.append((f"i{i}", aabb_from_center(c, h)))
        ids1 = {v.instance_id for v in visible_set(CAM, instances)}
        shuffled = list(instances)
        rng.shuffle(shuffled)
        ids2 = {v.instance_id for v in visible_set(CAM, shuffled)}
        assert ids1 == ids2

    def test_membership_matches_raster_oracle(self):
        rng = random.Random(4242)
        agree = 0
        total = 0
        for _ in range(6):
            instances = random_scene(rng, 50)
            got = {v.instance_id for v in visible_set(CAM, instances)}
            want = raster_oracle(CAM, instances)
            for iid, _ in instances:
                total += 1
                if (iid in got) == (iid in want):
                    agree += 1
        assert agree / total >= 0.95


def test_rotated_box_aabb_contains_all_corners():
    rng = random.Random(11)
    from sari_sim.geometry import rotated_box_aabb

    for _ in range(200):
        center = Vec3(*(rng.uniform(-2, 2) for _ in range(3)))
        half = Vec3(rng.uniform(0.05, 0.5), rng.uniform(0.05, 0.5), rng.uniform(0.05, 0.5))
        rot = EulerRot(rng.uniform(0, 360), rng.uniform(0, 360), rng.uniform(0, 360))
        box = rotated_box_aabb(center, rot, half)
        for sx in (-1, 1):
            for sy in (-1, 1):
                for sz in (-1, 1):
                    corner = center + rotate(
                        rot, Vec3(sx * half.x, sy * half.y, sz * half.z)
                    )
                    eps = 1e-9
                    assert box.min.x - eps <= corner.x <= box.max.x + eps
                    assert box.min.y - eps <= corner.y <= box.max.y + eps
                    assert box.min.z - eps <= corner.z <= box.max.z + eps
