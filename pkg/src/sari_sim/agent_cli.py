"""sari-agent command line: run the scripted agent against a live server."""

from __future__ import annotations

import argparse
import sys

from .agent import AgentError, ScriptedAgent, WsClient
from .bench import load_tasks
from .catalog import load_catalog
from .config import load_config
from .store import data_file, load_packaged_layout


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="sari-agent")
    parser.add_argument("--url", required=True, help="ws://HOST:PORT of a sari-sim server")
    parser.add_argument("--task", required=True, help="task file (JSON)")
    parser.add_argument("--task-id", default=None, help="task id (default: first in file)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--budget", type=int, default=5000)
    parser.add_argument("--catalog", default=None)
    parser.add_argument("--config", default=None)
    args = parser.parse_args(argv)

    catalog = load_catalog(args.catalog or data_file("catalog.json"))
    config = load_config(args.config)
    tasks = load_tasks(args.task, catalog)
    if args.task_id is not None:
        tasks = [t for t in tasks if t.id == args.task_id]
        if not tasks:
            print(f"no task {args.task_id!r} in {args.task}", file=sys.stderr)
            return 2
    task = tasks[0]

    client = WsClient(args.url, budget=args.budget)
    try:
        agent = ScriptedAgent(
            client,
            load_packaged_layout(task.layout),
            catalog,
            image_width=config.image_width,
            image_height=config.image_height,
            fov_deg=config.fov_deg,
            eye_height=config.eye_height,
        )
        client.call("Reset", {"layout": task.layout, "seed": args.seed})
        try:
            status = agent.run_task(task)
        except AgentError as e:
            print(f"agent failed: {e}", file=sys.stderr)
            status = agent._last_task or {}
        print(
            f"task={task.id} success={status.get('success')} "
            f"t_end={status.get('t_end')} commands={client.commands_used}"
        )
        if status.get("log_path"):
            print(f"episode log: {status['log_path']}")
        return 0 if status.get("success") else 1
    finally:
        client.close()


if __name__ == "__main__":
    sys.exit(main())
