"""WebSocket server: sessions, the single-writer loop, broadcasts.

One connection may hold the controller role (first to ask, or first to
send a mutating command); everyone else is an observer who receives
state broadcasts after every mutation but cannot mutate.  All commands
funnel through one asyncio lock, so exactly one mutating command is in
flight at any time and per-connection replies keep request order.

An optional task can be armed at startup; its episode log is written
when the outcome lands (success or time limit), to SARI_SIM_LOG_DIR or
the given log directory.
"""

from __future__ import annotations

import asyncio
import functools
import http.server
import json
import logging
import os
import threading

from .bench import EpisodeRecorder, load_tasks
from .catalog import load_catalog
from .config import SimConfig, load_config
from .protocol import MUTATING_FNS, Simulation
from .store import data_file

log = logging.getLogger("sari_sim.server")


class SimServer:
    def __init__(
        self,
        catalog,
        config: SimConfig,
        layout_id: int = 1,
        seed: int = 0,
        task=None,
        log_dir: str | None = None,
    ):
        self.sim = Simulation(catalog, config, layout_id=layout_id, seed=seed)
        self.lock = asyncio.Lock()
        self.controller: int | None = None
        self.connections: dict[int, object] = {}
        self._conn_seq = 0
        self.log_dir = log_dir or os.environ.get("SARI_SIM_LOG_DIR") or "."
        self.recorder = None
        if task is not None:
            self.recorder = EpisodeRecorder(task, catalog, config)
            self.sim.recorder = self.recorder

    # -- session handling ---------------------------------------------------

    async def handle_connection(self, ws) -> None:
        self._conn_seq += 1
        conn_id = self._conn_seq
        self.connections[conn_id] = ws
        role: str | None = None
        try:
            async for raw in ws:
                reply, mutated = await self._handle_raw(conn_id, role, raw)
                if reply.pop("_grant_controller", False):
                    role = "controller"
                if reply.pop("_grant_observer", False):
                    role = "observer"
                await ws.send(json.dumps(reply))
                if mutated:
                    await self._broadcast()
        finally:
            self.connections.pop(conn_id, None)
            if self.controller == conn_id:
                self.controller = None

    async def _handle_raw(self, conn_id: int, role: str | None, raw) -> tuple[dict, bool]:
        try:
            envelope = json.loads(raw)
        except (json.JSONDecodeError, TypeError):
            return (
                {
                    "id": None,
                    "status": "error",
                    "error": {"code": "bad_args", "message": "frame is not valid JSON"},
                },
                False,
            )
        fn = envelope.get("fn") if isinstance(envelope, dict) else None
        req_id = envelope.get("id") if isinstance(envelope, dict) else None

        if fn == "Hello":
            return self._handle_hello(conn_id, envelope), False

        mutating = fn in MUTATING_FNS or fn == "Reset"
        if mutating:
            if self.controller is None and role != "observer":
                self.controller = conn_id
            if self.controller != conn_id:
                return (
                    {
                        "id": req_id if isinstance(req_id, int) else None,
                        "status": "error",
                        "error": {
                            "code": "read_only",
                            "message": "only the controller may mutate the world",
                        },
                    },
                    False,
                )
        async with self.lock:
            result = self.sim.handle(envelope)
            self._maybe_save_episode()
            payload = result.get("payload")
            if (
                self.recorder is not None
                and self.recorder.saved_path is not None
                and isinstance(payload, dict)
                and "task" in payload
            ):
                payload["task"]["log_path"] = self.recorder.saved_path
        grant = (
            {"_grant_controller": True}
            if mutating and self.controller == conn_id and role != "controller"
            else {}
        )
        return ({**result, **grant}, mutating and result["status"] == "ok")

    def _handle_hello(self, conn_id: int, envelope: dict) -> dict:
        req_id = envelope.get("id")
        args = envelope.get("args", {}) or {}
        requested = args.get("role", "controller")
        if requested == "controller":
            if self.controller is None or self.controller == conn_id:
                self.controller = conn_id
                return {
                    "id": req_id,
                    "status": "ok",
                    "payload": {"role": "controller"},
                    "_grant_controller": True,
                }
            return {
                "id": req_id,
                "status": "error",
                "error": {
                    "code": "controller_taken",
                    "message": "another session already controls the world",
                },
                "_grant_observer": True,
            }
        return {
            "id": req_id,
            "status": "ok",
            "payload": {"role": "observer"},
            "_grant_observer": True,
        }

    def _maybe_save_episode(self) -> None:
        rec = self.recorder
        if rec is None or rec.outcome is None or rec.saved_path is not None:
            return
        try:
            rec.saved_path = rec.save(self.log_dir)
            log.info("episode log written to %s", rec.saved_path)
        except OSError as e:
            log.error("could not write episode log: %s", e)

    async def _broadcast(self) -> None:
        from .observe import env_info

        world = self.sim.world
        msg = {
            "broadcast": "state",
            "tick": world.sim_time,
            "payload": {
                "env": env_info(world),
                "cart": {
                    "phase": world.cart.phase,
                    "lines": [[sku, price] for sku, price in world.cart.lines],
                    "total_cents": world.cart.total_cents,
                },
                "task": self.sim.recorder.task_status() if self.sim.recorder else None,
            },
        }
        if self.recorder is not None and self.recorder.saved_path:
            msg["payload"]["log_path"] = self.recorder.saved_path
        data = json.dumps(msg)
        for conn_id, ws in list(self.connections.items()):
            if conn_id == self.controller:
                continue
            try:
                await ws.send(data)
            except Exception:
                pass  # dropped observer; cleanup happens in its handler


async def serve_async(server: SimServer, host: str, port: int, ready=None):
    from websockets.asyncio.server import serve

    async with serve(
        server.handle_connection, host, port, max_size=16 * 1024 * 1024
    ) as ws_server:
        if ready is not None:
            bound = ws_server.sockets[0].getsockname()[1]
            ready(bound)
        await asyncio.get_running_loop().create_future()  # run forever


def _serve_static(ui_dir: str, port: int) -> threading.Thread:
    handler = functools.partial(
        http.server.SimpleHTTPRequestHandler, directory=ui_dir
    )
    httpd = http.server.ThreadingHTTPServer(("0.0.0.0", port), handler)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    log.info("serving teleop UI from %s at http://localhost:%d/", ui_dir, port)
    return thread


def run_server(
    port: int = 8765,
    layout_id: int = 1,
    seed: int = 0,
    catalog_path: str | None = None,
    config_path: str | None = None,
    tasks_path: str | None = None,
    task_id: str | None = None,
    log_dir: str | None = None,
    ui_dir: str | None = None,
    ui_port: int | None = None,
    host: str = "0.0.0.0",
) -> None:
    """Blocking entry point used by the CLI."""
    catalog = load_catalog(catalog_path or data_file("catalog.json"))
    config = load_config(config_path)
    task = None
    if task_id is not None:
        tasks = load_tasks(tasks_path or data_file("tasks.json"), catalog)
        by_id = {t.id: t for t in tasks}
        if task_id not in by_id:
            raise SystemExit(f"no task {task_id!r} in task file")
        task = by_id[task_id]
        layout_id = task.layout
    server = SimServer(
        catalog, config, layout_id=layout_id, seed=seed, task=task, log_dir=log_dir
    )
    if ui_dir:
        _serve_static(ui_dir, ui_port or port + 1)
    log.info("listening on ws://%s:%d (layout %d, seed %d)", host, port, layout_id, seed)
    asyncio.run(serve_async(server, host, port))


class ServerThread:
    """Run a SimServer on a background event loop (tests, embedded use)."""

    def __init__(self, server: SimServer, host: str = "127.0.0.1", port: int = 0):
        self.server = server
        self.host = host
        self.port = port
        self._loop: asyncio.AbstractEventLoop | None = None
        self._thread: threading.Thread | None = None
        self._ready = threading.Event()

    def start(self) -> "ServerThread":
        def runner():
            loop = asyncio.new_event_loop()
            self._loop = loop
            asyncio.set_event_loop(loop)

            def on_ready(bound_port):
                self.port = bound_port
                self._ready.set()

            try:
                loop.run_until_complete(
                    serve_async(self.server, self.host, self.port, ready=on_ready)
                )
            except asyncio.CancelledError:
                pass
            finally:
                loop.close()

        self._thread = threading.Thread(target=runner, daemon=True)
        self._thread.start()
        if not self._ready.wait(timeout=10):
            raise RuntimeError("server did not start in time")
        return self

    @property
    def url(self) -> str:
        return f"ws://{self.host}:{self.port}"

    def stop(self) -> None:
        if self._loop is not None:
            self._loop.call_soon_threadsafe(
                lambda: [t.cancel() for t in asyncio.all_tasks(self._loop)]
            )
        if self._thread is not None:
            self._thread.join(timeout=5)
