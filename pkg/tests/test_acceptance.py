"""Acceptance criteria, one test per criterion, each printing a verdict.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion.  Every tolerance is pinned here; nothing is deferred.
"""

from __future__ import annotations

import json
import os
import random
import subprocess
import sys
import time
from decimal import Decimal

import pytest

from sari_sim import checkout
from sari_sim.bench import load_tasks, replay_verify, run_scripted_episode
from sari_sim.catalog import load_catalog
from sari_sim.config import SimConfig
from sari_sim.geometry import angle_between, visible_set
from sari_sim.protocol import Simulation, state_hash
from sari_sim.store import data_file, generate_placement, load_packaged_layout

TABLE_COUNTS = {
    "Water": 12, "Soda": 23, "Juice": 16, "Dairy": 20, "Biscuit": 50,
    "Can": 59, "Chips": 40, "Nuts": 15, "Soup": 6, "Noodles": 7, "Liquor": 2,
}

E2E_TASK_IDS = [
    f"{kind}-l{layout}-{name}"
    for layout in (1, 2, 3)
    for kind, name in (
        ("easy", "chips"), ("easy", "biscuit"), ("easy", "can"), ("avg", "soda")
    )
]


def verdict(name: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f" ({detail})"
    print(line, flush=True)
    assert ok, line


@pytest.fixture(scope="module")
def e2e_results(catalog, config):
    """Run the solvability battery once; criteria 7 and 8 both consume it."""
    tasks = {t.id: t for t in load_tasks(data_file("tasks.json"), catalog)}
    results = []
    for tid in E2E_TASK_IDS:
        t0 = time.perf_counter()
        result = run_scripted_episode(tasks[tid], catalog, config, seed=0)
        result["wall_s"] = time.perf_counter() - t0
        results.append(result)
    return results


def test_c1_catalog_fidelity(catalog):
    """Shipped catalog: 250 products, per-category counts exact."""
    t0 = time.perf_counter()
    ok = len(catalog) == 250 and catalog.category_counts == TABLE_COUNTS
    elapsed = time.perf_counter() - t0
    verdict(
        "C1 catalog fidelity: 250 products, Table-2 category counts",
        ok and elapsed < 1.0,
        f"{len(catalog)} products, {elapsed:.3f}s",
    )


def test_c2_api_surface(catalog, config):
    """All eight core functions round-trip over a live WebSocket; an
    unknown function produces a structured error without dropping the
    connection."""
    from websockets.sync.client import connect

    from sari_sim.server import ServerThread, SimServer

    t0 = time.perf_counter()
    thread = ServerThread(SimServer(catalog, config, layout_id=1, seed=42)).start()
    try:
        with connect(thread.url, max_size=16 * 1024 * 1024) as conn:
            def rpc(i, fn, args=None):
                conn.send(json.dumps({"id": i, "fn": fn, "args": args or {}}))
                while True:
                    msg = json.loads(conn.recv(timeout=10))
                    if not msg.get("broadcast"):
                        return msg

            calls = [
                ("Reset", {"layout": 1, "seed": 42}),
                ("TransformAgent", {"T": [0, 0, 0.1], "R": [0, 0, 0]}),
                ("TransformHands", {"leftT": [0, 0, 0.05]}),
                ("ToggleLeftGrip", None),
                ("ToggleRightGrip", None),
                ("ToggleLeftPoke", None),
                ("ToggleRightPoke", None),
                ("RequestScreenshot", None),
            ]
            ok = True
            for i, (fn, args) in enumerate(calls, start=1):
                reply = rpc(i, fn, args)
                ok = ok and reply["status"] == "ok" and reply["id"] == i
            bad = rpc(99, "Fly")
            ok = ok and bad["status"] == "error"
            ok = ok and bad["error"]["code"] == "unknown_function"
            alive = rpc(100, "GetEnvInfo")
            ok = ok and alive["status"] == "ok"
    finally:
        thread.stop()
    elapsed = time.perf_counter() - t0
    verdict(
        "C2 API surface: 8 functions ok over the wire, unknown fn structured error",
        ok and elapsed < 5.0,
        f"{elapsed:.2f}s",
    )


def _determinism_script(n: int = 500) -> list[dict]:
    rng = random.Random(20250809)
    fns = (
        "TransformAgent", "TransformHands",
        "ToggleLeftGrip", "ToggleRightGrip",
        "ToggleLeftPoke", "ToggleRightPoke", "GetEnvInfo",
    )
    script = []
    for i in range(n):
        fn = fns[rng.randrange(len(fns))]
        args: dict = {}
        if fn == "TransformAgent":
            args = {
                "T": [round(rng.uniform(-0.2, 0.2), 3), 0.0, round(rng.uniform(-0.2, 0.2), 3)],
                "R": [round(rng.uniform(-10, 10), 2), round(rng.uniform(-30, 30), 2), 0.0],
            }
        elif fn == "TransformHands":
            args = {
                "leftT": [round(rng.uniform(-0.1, 0.1), 3) for _ in range(3)],
                "rightT": [round(rng.uniform(-0.1, 0.1), 3) for _ in range(3)],
                "leftR": [round(rng.uniform(-15, 15), 2) for _ in range(3)],
                "rightR": [round(rng.uniform(-15, 15), 2) for _ in range(3)],
            }
        script.append({"id": i + 1, "fn": fn, "args": args})
    return script


RUN_SCRIPT_SNIPPET = """
import json, sys
from sari_sim.catalog import load_catalog
from sari_sim.config import SimConfig
from sari_sim.protocol import Simulation, state_hash
from sari_sim.store import data_file
script = json.load(sys.stdin)
sim = Simulation(load_catalog(data_file("catalog.json")), SimConfig(), 1, 42)
sim.handle({"id": 0, "fn": "Reset", "args": {"layout": 1, "seed": 42}})
for env in script:
    assert sim.handle(env)["status"] == "ok"
print(state_hash(sim.world))
"""


def test_c3_determinism(catalog, config):
    """Reset + fixed 500-command script: identical state hashes across 5
    in-process runs and a subprocess with a different hash seed.  A second
    OS build is not available in this environment; the 6-decimal canonical
    formatting is the cross-machine contract (see decisions ledger)."""
    t0 = time.perf_counter()
    script = _determinism_script(500)

    def run_once() -> str:
        sim = Simulation(catalog, config, layout_id=1, seed=42)
        sim.handle({"id": 0, "fn": "Reset", "args": {"layout": 1, "seed": 42}})
        for env in script:
            assert sim.handle(env)["status"] == "ok"
        return state_hash(sim.world)

    hashes = {run_once() for _ in range(5)}
    env = dict(os.environ, PYTHONHASHSEED="12345")
    proc = subprocess.run(
        [sys.executable, "-c", RUN_SCRIPT_SNIPPET],
        input=json.dumps(script),
        capture_output=True,
        text=True,
        env=env,
        timeout=60,
    )
    assert proc.returncode == 0, proc.stderr
    hashes.add(proc.stdout.strip())
    elapsed = time.perf_counter() - t0
    verdict(
        "C3 determinism: 500-command script, 5 runs + rehashed subprocess",
        len(hashes) == 1 and elapsed < 10.0,
        f"hash {next(iter(hashes))[:12]}..., {elapsed:.2f}s",
    )


def test_c4_placement_properties(catalog):
    """3 layouts x 10 seeds: zero category violations, zero price-tag
    mismatches, zero slot collisions, per-row category contiguity."""
    t0 = time.perf_counter()
    violations = 0
    for lid in (1, 2, 3):
        layout = load_packaged_layout(lid)
        shelf_by_id = {s.id: s for s in layout.shelves}
        for seed in range(10):
            placements, tags = generate_placement(catalog, layout, seed)
            slots = set()
            rows: dict[tuple[str, int], dict[int, str]] = {}
            for p in placements:
                cat = catalog.lookup(p.sku).category
                if cat not in shelf_by_id[p.slot[0]].categories:
                    violations += 1
                if p.slot in slots:
                    violations += 1
                slots.add(p.slot)
                rows.setdefault((p.slot[0], p.slot[1]), {})[p.slot[2]] = cat
            by_slot = {p.slot: p for p in placements}
            for tag in tags:
                p = by_slot[(tag.shelf_id, tag.row, tag.col)]
                if tag.sku != p.sku:
                    violations += 1
                if tag.price_cents != catalog.lookup(p.sku).price_cents:
                    violations += 1
            for cols in rows.values():
                ordered = [cols[c] for c in sorted(cols)]
                runs = 1 + sum(1 for a, b in zip(ordered, ordered[1:]) if a != b)
                if runs != len(set(ordered)):
                    violations += 1
    elapsed = time.perf_counter() - t0
    verdict(
        "C4 placement properties: 3 layouts x 10 seeds, zero violations",
        violations == 0 and elapsed < 10.0,
        f"{violations} violations, {elapsed:.2f}s",
    )


def test_c5_scan_gating(catalog, config):
    """Angle sweep 0..90 deg at 0.2 m: registers iff angle <= 30 (one
    degree of slack at the boundary), matching the angle oracle."""
    from tests.test_checkout import hold_item_at_plane_angle

    from sari_sim.store import reset_world

    t0 = time.perf_counter()
    world = reset_world(1, 42, catalog, config)
    axis = world.layout.checkout.scanner_axis()
    ok = True
    for angle in range(0, 91):
        world.cart.phase = "ACTIVE"
        world.cart.lines.clear()
        world.beam_latch.clear()
        hold_item_at_plane_angle(world, float(angle))
        _, normal, *_ = checkout.barcode_plane(world, world.hands["right"].held)
        oracle = angle_between(normal, axis.scaled(-1.0))
        registered = bool(checkout.scan_attempt(world))
        if angle <= 29 and not registered:
            ok = False
        if angle >= 31 and registered:
            ok = False
        if abs(oracle - 30.0) > 1.0 and registered != (oracle <= 30.0):
            ok = False
    elapsed = time.perf_counter() - t0
    verdict(
        "C5 scan gating: registered iff angle <= 30 deg at 0.2 m (+/-1 deg boundary)",
        ok and elapsed < 5.0,
        f"{elapsed:.2f}s",
    )


def test_c6_visibility(catalog):
    """Synthetic occluder scene excludes the back box; random-scene
    membership agrees with the 64x64 raster oracle on >= 95%."""
    from tests.test_geometry import CAM, random_scene, raster_oracle

    from sari_sim.geometry import Vec3, aabb_from_center

    t0 = time.perf_counter()
    front = ("front", aabb_from_center(Vec3(0, 0, 1), Vec3(0.5, 0.5, 0.05)))
    back = ("back", aabb_from_center(Vec3(0, 0, 2), Vec3(0.2, 0.2, 0.05)))
    ids = {v.instance_id for v in visible_set(CAM, [front, back])}
    full_occlusion_ok = ids == {"front"}

    rng = random.Random(20250610)
    agree = 0
    total = 0
    for _ in range(4):
        instances = random_scene(rng, 50)
        got = {v.instance_id for v in visible_set(CAM, instances)}
        want = raster_oracle(CAM, instances, 64)
        for iid, _ in instances:
            total += 1
            if (iid in got) == (iid in want):
                agree += 1
    ratio = agree / total
    elapsed = time.perf_counter() - t0
    verdict(
        "C6 visibility: full occlusion excluded; >= 95% raster-oracle agreement",
        full_occlusion_ok and ratio >= 0.95 and elapsed < 30.0,
        f"agreement {ratio:.3f} over {total} instances, {elapsed:.1f}s",
    )


def test_c7_logging_cadence_and_replay(catalog, config, e2e_results):
    """Tick count equals floor(t_end / 0.1) exactly (decimal arithmetic)
    and every episode log passes replay_verify."""
    t0 = time.perf_counter()
    ok = True
    checked = 0
    for result in e2e_results:
        log = result["log"]
        t_end = Decimal(log.outcome["t_end"])
        want_ticks = int(t_end / Decimal("0.1"))
        if len(log.ticks) != want_ticks:
            ok = False
        if not replay_verify(log, catalog, config):
            ok = False
        checked += 1
    # plus a scripted non-agent episode exercising the timeout path
    from sari_sim.bench import EpisodeRecorder, parse_task

    task = parse_task(
        {
            "id": "cadence-probe",
            "difficulty": "easy",
            "layout": 1,
            "instruction": "probe",
            "goal": {"type": "hold", "match": {"category": "Liquor"}},
            "time_limit_s": 0.7,
        },
        catalog,
    )
    sim = Simulation(catalog, config, layout_id=1, seed=3)
    rec = EpisodeRecorder(task, catalog, config)
    sim.recorder = rec
    sim.handle({"id": 0, "fn": "Reset", "args": {"layout": 1, "seed": 3}})
    for i in range(20):
        sim.handle({"id": i + 1, "fn": "TransformHands", "args": {}})
    log = rec.episode_log()
    t_end = Decimal(log.outcome["t_end"])
    if len(log.ticks) != int(t_end / Decimal("0.1")):
        ok = False
    if not replay_verify(log, catalog, config):
        ok = False
    checked += 1
    elapsed = time.perf_counter() - t0
    verdict(
        "C7 logging cadence: ticks == floor(t_end/0.1); all logs replay",
        ok and elapsed < 30.0,
        f"{checked} episodes, {elapsed:.1f}s",
    )


def test_c8_end_to_end_solvability(e2e_results):
    """Scripted agent: 3 easy hold + 1 average scanned on layouts 1-3,
    100% success, each within 5000 commands and 60 s wall time.
    Model-driven completion rates and times are out of scope here;
    solvability plus budget bounds substitute."""
    ok = True
    worst_cmds = 0
    worst_wall = 0.0
    for result in e2e_results:
        success = result["outcome"]["success"] and result["verified"]
        within = result["commands_used"] <= 5000 and result["wall_s"] < 60.0
        ok = ok and success and within
        worst_cmds = max(worst_cmds, result["commands_used"])
        worst_wall = max(worst_wall, result["wall_s"])
    verdict(
        "C8 end-to-end solvability: 12/12 tasks, <= 5000 cmds, < 60 s each",
        ok,
        f"worst {worst_cmds} cmds, {worst_wall:.1f}s wall",
    )


def test_c9_not_reproducible_declared():
    """Engine frame-rate figures, OCR accuracy measurements and
    human-study results need a rendering engine, an external OCR model
    and human subjects; the kernel benchmark, the legibility tiers and
    the shared task predicates stand in.  Nothing to execute: this
    records the declaration."""
    substitutes = {
        "fps profiling": "benchmarks/bench_kernels.py",
        "ocr accuracy": "legibility tiers in observe.semantic_frame",
        "human study": "teleop client + identical episode logs",
    }
    verdict(
        "C9 declared not reproducible: FPS/OCR/human-study substituted",
        len(substitutes) == 3,
        "; ".join(substitutes),
    )
