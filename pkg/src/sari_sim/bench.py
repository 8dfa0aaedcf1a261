"""Task definitions, success evaluation, episode logging and replay.

A task pairs a natural-language instruction with a machine-checkable
goal, so humans driving the teleop client and scripted agents are
graded identically:

  hold(match)          some matching instance is in a hand
  scanned(match)       a paid receipt contains a matching line
  answer_scan(attr,c)  the paid receipt's sole line is the argmin of
                       the candidates under a nutrition attribute

Episodes are newline-delimited JSON: a header, then command and tick
lines in causal order, then exactly one outcome line.  Ticks fire every
0.1 s of sim time (one per two mutating commands).  All floats are
written with six decimals, so a log replays byte-identically on any
machine: `replay_verify` re-runs the commands from the recorded seed
and compares every tick and the outcome.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .catalog import Catalog, ProductSpec, attribute_argmin
from .config import SimConfig
from .protocol import Simulation, fmt6, fmt6_list
from .store import LAYOUT_IDS, WorldState

TASK_VERSION = 1
DIFFICULTIES = ("easy", "average", "difficult")
GOAL_TYPES = ("hold", "scanned", "answer_scan")


class TaskError(ValueError):
    pass


@dataclass(frozen=True)
class TaskSpec:
    id: str
    difficulty: str
    layout: int
    instruction: str
    goal_type: str
    match: dict | None = None  # hold / scanned
    attribute: str | None = None  # answer_scan
    candidates: tuple[str, ...] = ()  # answer_scan
    time_limit_s: float = 300.0

    def as_dict(self) -> dict:
        goal: dict = {"type": self.goal_type}
        if self.goal_type in ("hold", "scanned"):
            goal["match"] = self.match
        else:
            goal["attribute"] = self.attribute
            goal["candidates"] = list(self.candidates)
        return {
            "id": self.id,
            "difficulty": self.difficulty,
            "layout": self.layout,
            "instruction": self.instruction,
            "goal": goal,
            "time_limit_s": self.time_limit_s,
        }


def match_products(catalog: Catalog, match: dict) -> list[ProductSpec]:
    """Products selected by a match object (sku, category, or name part)."""
    if not isinstance(match, dict) or len(match) != 1:
        raise TaskError(f"match must have exactly one selector, got {match!r}")
    key, value = next(iter(match.items()))
    if key == "sku":
        p = catalog.get(value)
        return [p] if p is not None else []
    if key == "category":
        return [p for p in catalog.products if p.category == value]
    if key == "name_contains":
        needle = value.lower()
        return [p for p in catalog.products if needle in p.name.lower()]
    raise TaskError(f"unknown match selector {key!r}")


def sku_matches(catalog: Catalog, match: dict, sku: str) -> bool:
    key, value = next(iter(match.items()))
    p = catalog.get(sku)
    if p is None:
        return False
    if key == "sku":
        return p.sku == value
    if key == "category":
        return p.category == value
    return value.lower() in p.name.lower()


def parse_task(rec: dict, catalog: Catalog) -> TaskSpec:
    goal = rec.get("goal", {})
    gtype = goal.get("type")
    if gtype not in GOAL_TYPES:
        raise TaskError(f"task {rec.get('id')!r}: unknown goal type {gtype!r}")
    if rec.get("difficulty") not in DIFFICULTIES:
        raise TaskError(f"task {rec.get('id')!r}: bad difficulty")
    if rec.get("layout") not in LAYOUT_IDS:
        raise TaskError(f"task {rec.get('id')!r}: bad layout")
    match = None
    attribute = None
    candidates: tuple[str, ...] = ()
    if gtype in ("hold", "scanned"):
        match = goal.get("match")
        if not match_products(catalog, match):
            raise TaskError(f"task {rec['id']!r}: match selects no catalog product")
    else:
        attribute = goal.get("attribute")
        candidates = tuple(goal.get("candidates", ()))
        if len(candidates) < 2:
            raise TaskError(f"task {rec['id']!r}: needs at least two candidates")
        for sku in candidates:
            product = catalog.get(sku)
            if product is None:
                raise TaskError(f"task {rec['id']!r}: unknown candidate {sku!r}")
            if attribute not in product.label.nutrition:
                raise TaskError(
                    f"task {rec['id']!r}: {sku!r} lacks attribute {attribute!r}"
                )
    return TaskSpec(
        id=rec["id"],
        difficulty=rec["difficulty"],
        layout=rec["layout"],
        instruction=rec["instruction"],
        goal_type=gtype,
        match=match,
        attribute=attribute,
        candidates=candidates,
        time_limit_s=float(rec["time_limit_s"]),
    )


def load_tasks(path: str, catalog: Catalog) -> list[TaskSpec]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("task_version") != TASK_VERSION:
        raise TaskError(f"unsupported task_version {doc.get('task_version')!r}")
    tasks = [parse_task(rec, catalog) for rec in doc["tasks"]]
    seen = set()
    for t in tasks:
        if t.id in seen:
            raise TaskError(f"duplicate task id {t.id!r}")
        seen.add(t.id)
    return tasks


def evaluate(task: TaskSpec, world: WorldState, catalog: Catalog) -> bool:
    """Is the task goal satisfied in this world right now?"""
    if task.goal_type == "hold":
        assert task.match is not None
        return any(
            sku_matches(catalog, task.match, world.placements[iid].sku)
            for iid in world.held_ids()
        )
    if world.receipt is None:
        return False
    lines = world.receipt["lines"]
    if task.goal_type == "scanned":
        assert task.match is not None
        return any(sku_matches(catalog, task.match, sku) for sku, _ in lines)
    # answer_scan: the receipt must contain exactly the argmin candidate
    assert task.attribute is not None
    want = attribute_argmin(catalog, list(task.candidates), task.attribute)
    return len(lines) == 1 and lines[0][0] == want


def _tick_record(world: WorldState, tick_index: int) -> dict:
    head = world.camera_pos()
    left = world.hands["left"]
    right = world.hands["right"]
    hovered = left.hovered if left.hovered is not None else right.hovered
    held = left.held if left.held is not None else right.held
    return {
        "t": fmt6(tick_index * 0.1),
        "head_pos": fmt6_list(head.as_list()),
        "head_rot": fmt6_list(world.avatar.rotation().as_list()),
        "left_pos": fmt6_list(left.pos.as_list()),
        "left_rot": fmt6_list(left.rot.as_list()),
        "right_pos": fmt6_list(right.pos.as_list()),
        "right_rot": fmt6_list(right.rot.as_list()),
        "left_grip": left.grip,
        "right_grip": right.grip,
        "hovered": hovered,
        "held": held,
    }


def _canonical_receipt(receipt: dict | None) -> dict | None:
    if receipt is None:
        return None
    return {
        "lines": [[sku, price] for sku, price in receipt["lines"]],
        "total_cents": receipt["total_cents"],
        "sim_time": fmt6(receipt["sim_time"]),
    }


@dataclass
class EpisodeLog:
    header: dict
    commands: list[dict]
    ticks: list[dict]
    outcome: dict | None

    def lines(self) -> list[dict]:
        out = [dict(self.header, type="header")]
        out.extend({"type": "command", "envelope": c} for c in self.commands)
        out.extend(dict(t, type="tick") for t in self.ticks)
        if self.outcome is not None:
            out.append(dict(self.outcome, type="outcome"))
        return out

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for line in self.lines():
                fh.write(json.dumps(line, sort_keys=True, separators=(",", ":")))
                fh.write("\n")


def load_episode(path: str) -> EpisodeLog:
    header = None
    commands: list[dict] = []
    ticks: list[dict] = []
    outcome = None
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            raw = raw.strip()
            if not raw:
                continue
            rec = json.loads(raw)
            kind = rec.pop("type", None)
            if kind == "header":
                header = rec
            elif kind == "command":
                commands.append(rec["envelope"])
            elif kind == "tick":
                ticks.append(rec)
            elif kind == "outcome":
                if outcome is not None:
                    raise TaskError("episode has multiple outcome lines")
                outcome = rec
            else:
                raise TaskError(f"unknown episode line type {kind!r}")
    if header is None or outcome is None:
        raise TaskError("episode is missing its header or outcome")
    return EpisodeLog(header=header, commands=commands, ticks=ticks, outcome=outcome)


class EpisodeRecorder:
    """Attached to a Simulation: logs commands, 10 Hz ticks, the outcome.

    Recording starts at the first Reset after arming and stops the
    moment the task succeeds or its time limit lapses.
    """

    def __init__(self, task: TaskSpec, catalog: Catalog, config: SimConfig):
        self.task = task
        self.catalog = catalog
        self.config = config
        self.header: dict | None = None
        self.commands: list[dict] = []
        self.ticks: list[dict] = []
        self.outcome: dict | None = None
        self.active = False
        self.saved_path: str | None = None
        # integer unit compare keeps the timeout exact
        self.limit_units = round(task.time_limit_s / config.command_dt)

    def on_reset(self, sim: Simulation) -> None:
        self.header = {
            "task": self.task.as_dict(),
            "layout": sim.world.layout.id,
            "seed": sim.world.seed,
            "config_hash": self.config.hash(),
        }
        self.ticks = []
        self.outcome = None
        self.active = True

    def on_command(self, envelope: dict) -> None:
        if self.outcome is None:
            self.commands.append(envelope)

    def after_mutation(self, sim: Simulation) -> None:
        if not self.active or self.outcome is not None:
            return
        world = sim.world
        units = world.clock_units
        if units % 2 == 0:
            self.ticks.append(_tick_record(world, units // 2))
        if evaluate(self.task, world, self.catalog):
            self.outcome = {
                "success": True,
                "t_end": fmt6(world.sim_time),
                "receipt": _canonical_receipt(world.receipt),
            }
            self.active = False
        elif units > self.limit_units:
            self.outcome = {
                "success": False,
                "t_end": fmt6(self.task.time_limit_s),
                "receipt": _canonical_receipt(world.receipt),
            }
            self.active = False

    def force_fail(self, sim: Simulation) -> None:
        """Close an episode whose driver gave up before the time limit."""
        if self.outcome is None:
            self.outcome = {
                "success": False,
                "t_end": fmt6(sim.world.sim_time),
                "receipt": _canonical_receipt(sim.world.receipt),
            }
            self.active = False

    def task_status(self) -> dict | None:
        if self.header is None:
            return None
        return {
            "id": self.task.id,
            "instruction": self.task.instruction,
            "done": self.outcome is not None,
            "success": bool(self.outcome and self.outcome["success"]),
            "t_end": self.outcome["t_end"] if self.outcome else None,
            "log_path": self.saved_path,
        }

    def episode_log(self) -> EpisodeLog:
        if self.header is None or self.outcome is None:
            raise TaskError("episode is not finished")
        return EpisodeLog(
            header=self.header,
            commands=list(self.commands),
            ticks=list(self.ticks),
            outcome=dict(self.outcome),
        )

    def save(self, log_dir: str) -> str:
        log = self.episode_log()
        os.makedirs(log_dir, exist_ok=True)
        name = f"episode_{self.task.id}_seed{self.header['seed']}.ndjson"
        path = os.path.join(log_dir, name)
        log.save(path)
        self.saved_path = path
        return path


def run_scripted_episode(
    task: TaskSpec,
    catalog: Catalog,
    config: SimConfig,
    seed: int = 0,
    budget: int = 5000,
) -> dict:
    """One full scripted-agent episode against an in-process simulation.

    Returns a result record with the outcome, the command count, the
    episode log and whether the log replays clean.
    """
    from .agent import AgentError, LocalClient, ScriptedAgent
    from .store import load_packaged_layout

    sim = Simulation(catalog, config, layout_id=task.layout, seed=seed)
    recorder = EpisodeRecorder(task, catalog, config)
    sim.recorder = recorder
    client = LocalClient(sim, budget=budget)
    layout = load_packaged_layout(task.layout)
    agent = ScriptedAgent(
        client,
        layout,
        catalog,
        image_width=config.image_width,
        image_height=config.image_height,
        fov_deg=config.fov_deg,
        eye_height=config.eye_height,
    )
    client.call("Reset", {"layout": task.layout, "seed": seed})
    error: str | None = None
    try:
        agent.run_task(task)
    except AgentError as e:
        error = str(e)
    if recorder.outcome is None:
        recorder.force_fail(sim)
    log = recorder.episode_log()
    return {
        "task": task.id,
        "outcome": recorder.outcome,
        "commands_used": client.commands_used,
        "log": log,
        "verified": replay_verify(log, catalog, config),
        "error": error,
    }


def replay_verify(log: EpisodeLog, catalog: Catalog, config: SimConfig) -> bool:
    """Re-run the command list from the logged seed; require identical
    ticks and outcome.  Config hash mismatches fail immediately."""
    if log.header.get("config_hash") != config.hash():
        return False
    task = parse_task(log.header["task"], catalog)
    sim = Simulation(
        catalog, config, layout_id=log.header["layout"], seed=log.header["seed"]
    )
    recorder = EpisodeRecorder(task, catalog, config)
    sim.recorder = recorder
    for envelope in log.commands:
        sim.handle(envelope)
    if recorder.outcome is None:
        recorder.force_fail(sim)
    return recorder.ticks == log.ticks and recorder.outcome == log.outcome
