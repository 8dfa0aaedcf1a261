#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the pure-Python fallback.

The two hot loops are the visibility sampler (27 lattice rays per
candidate box against every box in the scene) and the z-buffered box
rasterizer.  Usage:

    python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import math
import statistics
import time

from sari_sim import observe
from sari_sim.catalog import load_catalog
from sari_sim.config import SimConfig
from sari_sim.geometry import basis
from sari_sim.kernels import pure
from sari_sim.store import data_file, reset_world

try:
    from sari_sim.kernels import _core as core
except ImportError:
    core = None


def world_scene():
    catalog = load_catalog(data_file("catalog.json"))
    config = SimConfig()
    world = reset_world(1, 42, catalog, config)
    boxes: list[float] = []
    instances = list(world.placements.values())
    for p in instances:
        boxes.extend(p.world_aabb().flat())
    for _, box in world.structure_boxes():
        boxes.extend(box.flat())
    cam = observe.camera_model(world)
    right, up, fwd = cam.basis()
    tan_v = math.tan(math.radians(cam.fov_deg) / 2.0)
    tan_h = tan_v * cam.width / cam.height
    n = len(boxes) // 6
    vis_args = (
        cam.position.x, cam.position.y, cam.position.z,
        right.x, right.y, right.z,
        up.x, up.y, up.z,
        fwd.x, fwd.y, fwd.z,
        tan_h, tan_v,
        boxes, list(range(n)),
    )
    return world, vis_args, n


def timeit(fn, repeat: int) -> float:
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    world, vis_args, n = world_scene()
    print(f"scene: {n} boxes (store layout 1, every box a candidate)\n")
    rows = []

    t_pure = timeit(lambda: pure.visible_sample_counts(*vis_args), args.repeat)
    if core is not None:
        t_core = timeit(lambda: core.visible_sample_counts(*vis_args), args.repeat)
        assert pure.visible_sample_counts(*vis_args) == core.visible_sample_counts(
            *vis_args
        ), "backend outputs diverged"
    else:
        t_core = None
    rows.append(("visibility sampler", t_pure, t_core))

    # time the raster kernel directly with identical inputs
    cam = observe.camera_model(world)
    right, up, fwd = cam.basis()
    boxes: list[float] = []
    rects: list[int] = []
    colors: list[int] = []
    from sari_sim.geometry import screen_bbox

    for key, box in world.structure_boxes():
        bbox = screen_bbox(cam, box)
        if bbox is None:
            continue
        ymin, xmin, ymax, xmax = bbox
        boxes.extend(box.flat())
        rects.extend(
            (int(xmin), int(ymin), int(math.ceil(xmax)), int(math.ceil(ymax)))
        )
        colors.extend((120, 120, 120))
    raster_args = (
        cam.width, cam.height,
        cam.position.x, cam.position.y, cam.position.z,
        right.x, right.y, right.z,
        up.x, up.y, up.z,
        fwd.x, fwd.y, fwd.z,
        cam.focal_px(),
        boxes, rects, colors, (224, 224, 224),
    )
    t_pure = timeit(lambda: pure.raster_boxes(*raster_args), args.repeat)
    if core is not None:
        t_core = timeit(lambda: core.raster_boxes(*raster_args), args.repeat)
        assert bytes(pure.raster_boxes(*raster_args)) == bytes(
            core.raster_boxes(*raster_args)
        ), "backend outputs diverged"
    else:
        t_core = None
    rows.append((f"box raster {cam.width}x{cam.height}", t_pure, t_core))

    print(f"{'kernel':<28} {'pure':>10} {'compiled':>10} {'speedup':>8}")
    for name, tp, tc in rows:
        if tc is None:
            print(f"{name:<28} {tp * 1000:>8.1f}ms {'n/a':>10} {'-':>8}")
        else:
            print(
                f"{name:<28} {tp * 1000:>8.1f}ms {tc * 1000:>8.1f}ms "
                f"{tp / tc:>7.1f}x"
            )
    if core is None:
        print("\ncompiled kernel not built; install with a C toolchain to compare")


if __name__ == "__main__":
    main()
