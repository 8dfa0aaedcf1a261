from __future__ import annotations

import random

import pytest

from sari_sim.protocol import Simulation, fmt6, state_hash


def fixed_script(n: int = 500) -> list[dict]:
    """A deterministic mixed command script (its own rng, fixed seed)."""
    rng = random.Random(777)
    script = []
    fns = (
        "TransformAgent",
        "TransformHands",
        "ToggleLeftGrip",
        "ToggleRightGrip",
        "ToggleLeftPoke",
        "ToggleRightPoke",
        "GetEnvInfo",
        "GetSemanticFrame",
    )
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


def run_script(catalog, config, script, layout=1, seed=42) -> str:
    sim = Simulation(catalog, config, layout_id=layout, seed=seed)
    sim.handle({"id": 0, "fn": "Reset", "args": {"layout": layout, "seed": seed}})
    for env in script:
        result = sim.handle(env)
        assert result["status"] == "ok", result
    return state_hash(sim.world)


class TestDispatch:
    def test_reset_echoes_layout_and_seed(self, catalog, config):
        sim = Simulation(catalog, config)
        r = sim.handle({"id": 1, "fn": "Reset", "args": {"layout": 2, "seed": 9}})
        assert r["status"] == "ok"
        assert r["payload"] == {"layout": 2, "seed": 9}
        assert r["id"] == 1
        assert r["tick"] == 0.0

    def test_forward_step_visible_in_env_info(self, catalog, config):
        sim = Simulation(catalog, config)
        z0 = sim.world.avatar.body.z
        r = sim.handle(
            {"id": 2, "fn": "TransformAgent", "args": {"T": [0, 0, 0.1], "R": [0, 0, 0]}}
        )
        assert r["status"] == "ok"
        info = sim.handle({"id": 3, "fn": "GetEnvInfo"})
        assert info["payload"]["avatar"]["position"][2] == pytest.approx(z0 + 0.1)
        assert info.get("ext") is True

    def test_unknown_function_keeps_serving(self, catalog, config):
        sim = Simulation(catalog, config)
        r = sim.handle({"id": 3, "fn": "Fly"})
        assert r["status"] == "error"
        assert r["error"]["code"] == "unknown_function"
        r2 = sim.handle({"id": 4, "fn": "GetEnvInfo"})
        assert r2["status"] == "ok"

    def test_bad_args_rejected(self, catalog, config):
        sim = Simulation(catalog, config)
        for args in ({"T": [1, 2]}, {"T": "x"}, {"T": [1, 2, float("nan")]}):
            r = sim.handle({"id": 5, "fn": "TransformAgent", "args": args})
            assert r["status"] == "error"
            assert r["error"]["code"] == "bad_args"

    def test_unknown_layout_code(self, catalog, config):
        sim = Simulation(catalog, config)
        r = sim.handle({"id": 6, "fn": "Reset", "args": {"layout": 9, "seed": 0}})
        assert r["status"] == "error"
        assert r["error"]["code"] == "unknown_layout"

    def test_envelope_id_must_be_integer(self, catalog, config):
        sim = Simulation(catalog, config)
        r = sim.handle({"id": "one", "fn": "GetEnvInfo"})
        assert r["status"] == "error"
        assert r["id"] is None

    def test_clock_advances_only_on_mutations(self, catalog, config):
        sim = Simulation(catalog, config)
        sim.handle({"id": 1, "fn": "GetEnvInfo"})
        sim.handle({"id": 2, "fn": "GetSemanticFrame"})
        assert sim.world.clock_units == 0
        sim.handle({"id": 3, "fn": "TransformAgent", "args": {}})
        sim.handle({"id": 4, "fn": "ToggleLeftPoke"})
        assert sim.world.clock_units == 2
        assert sim.world.sim_time == pytest.approx(0.1)

    def test_mutating_payload_carries_cart_and_events(self, catalog, config):
        sim = Simulation(catalog, config)
        r = sim.handle({"id": 1, "fn": "ToggleLeftGrip"})
        assert r["payload"]["cart"]["phase"] == "IDLE"
        assert isinstance(r["payload"]["events"], list)
        assert isinstance(r["payload"]["warnings"], list)

    def test_screenshot_payload_shape(self, catalog, config):
        sim = Simulation(catalog, config)
        r = sim.handle({"id": 9, "fn": "RequestScreenshot"})
        assert r["status"] == "ok"
        assert r["payload"]["width"] == config.image_width
        assert set(r["payload"]) == {"width", "height", "png_base64"}


class TestDeterminism:
    def test_fixed_script_hash_stable_across_runs(self, catalog, config):
        script = fixed_script(500)
        hashes = {run_script(catalog, config, script) for _ in range(5)}
        assert len(hashes) == 1

    def test_seed_changes_hash(self, catalog, config):
        script = fixed_script(50)
        h1 = run_script(catalog, config, script, seed=42)
        h2 = run_script(catalog, config, script, seed=43)
        assert h1 != h2

    def test_replaying_commands_reproduces_hash(self, catalog, config):
        script = fixed_script(120)
        h1 = run_script(catalog, config, script)
        h2 = run_script(catalog, config, script)
        assert h1 == h2


class TestCanonicalFormatting:
    def test_fmt6_fixed_width_and_zero(self):
        assert fmt6(0.1 + 0.2) == "0.300000"
        assert fmt6(-0.0) == "0.000000"
        assert fmt6(1e-7) == "0.000000"
        assert fmt6(-1.25) == "-1.250000"

    def test_hash_reflects_state_not_identity(self, catalog, config):
        sim1 = Simulation(catalog, config, layout_id=1, seed=5)
        sim2 = Simulation(catalog, config, layout_id=1, seed=5)
        assert state_hash(sim1.world) == state_hash(sim2.world)
        sim1.handle({"id": 1, "fn": "TransformAgent", "args": {"T": [0, 0, 0.1]}})
        assert state_hash(sim1.world) != state_hash(sim2.world)
