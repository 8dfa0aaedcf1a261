"""sari-sim command line: serve, bench, replay."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from .bench import load_episode, load_tasks, replay_verify, run_scripted_episode
from .catalog import load_catalog
from .config import load_config
from .store import data_file


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--catalog", default=None, help="catalog JSON (default: packaged)")
    parser.add_argument("--config", default=None, help="thresholds config JSON")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="sari-sim")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the WebSocket simulation server")
    serve.add_argument("--port", type=int, default=8765)
    serve.add_argument("--host", default="0.0.0.0")
    serve.add_argument("--layout", type=int, default=1, choices=(1, 2, 3))
    serve.add_argument("--seed", type=int, default=0)
    serve.add_argument("--tasks", default=None, help="task file (default: packaged)")
    serve.add_argument("--task-id", default=None, help="arm this task for logging")
    serve.add_argument("--log-dir", default=None, help="episode log directory")
    serve.add_argument("--ui-dir", default=None, help="serve a static teleop UI from here")
    serve.add_argument("--ui-port", type=int, default=None, help="UI port (default: port+1)")
    _add_common(serve)

    bench = sub.add_parser("bench", help="run tasks with the scripted agent")
    bench.add_argument("--tasks", default=None, help="task file (default: packaged)")
    bench.add_argument("--agent", choices=("scripted",), default="scripted")
    bench.add_argument("--task-id", action="append", default=None, help="run only these tasks")
    bench.add_argument("--difficulty", choices=("easy", "average", "difficult"), default=None)
    bench.add_argument("--layout", type=int, choices=(1, 2, 3), default=None)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--budget", type=int, default=5000)
    bench.add_argument("--log-dir", default=None, help="write episode logs here")
    _add_common(bench)

    replay = sub.add_parser("replay", help="verify an episode log replays exactly")
    replay.add_argument("--log", required=True)
    _add_common(replay)

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")

    if args.command == "serve":
        from .server import run_server

        run_server(
            port=args.port,
            host=args.host,
            layout_id=args.layout,
            seed=args.seed,
            catalog_path=args.catalog,
            config_path=args.config,
            tasks_path=args.tasks,
            task_id=args.task_id,
            log_dir=args.log_dir,
            ui_dir=args.ui_dir,
            ui_port=args.ui_port,
        )
        return 0

    catalog = load_catalog(args.catalog or data_file("catalog.json"))
    config = load_config(args.config)

    if args.command == "replay":
        log = load_episode(args.log)
        ok = replay_verify(log, catalog, config)
        print(f"{'PASS' if ok else 'FAIL'}: {args.log}")
        return 0 if ok else 1

    tasks = load_tasks(args.tasks or data_file("tasks.json"), catalog)
    if args.task_id:
        wanted = set(args.task_id)
        tasks = [t for t in tasks if t.id in wanted]
    if args.difficulty:
        tasks = [t for t in tasks if t.difficulty == args.difficulty]
    if args.layout:
        tasks = [t for t in tasks if t.layout == args.layout]
    if not tasks:
        print("no tasks selected", file=sys.stderr)
        return 2

    failures = 0
    for task in tasks:
        t0 = time.perf_counter()
        result = run_scripted_episode(
            task, catalog, config, seed=args.seed, budget=args.budget
        )
        wall = time.perf_counter() - t0
        outcome = result["outcome"]
        ok = outcome["success"] and result["verified"]
        if not ok:
            failures += 1
        line = (
            f"{'ok  ' if ok else 'FAIL'} {task.id:<28} "
            f"success={str(outcome['success']):<5} t_end={outcome['t_end']:>10} "
            f"cmds={result['commands_used']:>5} replay={result['verified']} "
            f"wall={wall:.1f}s"
        )
        if result["error"]:
            line += f"  [{result['error']}]"
        print(line)
        if args.log_dir:
            import os

            os.makedirs(args.log_dir, exist_ok=True)
            path = f"{args.log_dir}/episode_{task.id}_seed{args.seed}.ndjson"
            result["log"].save(path)
            print(f"     log: {path}")
    print(f"{len(tasks) - failures}/{len(tasks)} tasks passed")
    return 0 if failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
