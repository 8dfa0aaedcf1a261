// Browser wiring: canvas, keyboard/mouse input, connection lifecycle.

import { commandForKey, dragToHandCommand, isMutating } from "./input.js";
import { SariClient, type SemanticFrame, type SocketLike } from "./protocol.js";
import { drawOverlay } from "./overlay.js";
import {
  applyBroadcast,
  applyFrame,
  applyResult,
  cartSummary,
  frameIsFresh,
  initialViewState,
  type ViewState,
} from "./viewstate.js";

const canvas = document.getElementById("view") as HTMLCanvasElement;
const statusEl = document.getElementById("status") as HTMLElement;
const cartEl = document.getElementById("cart") as HTMLElement;
const taskEl = document.getElementById("task") as HTMLElement;
const warnEl = document.getElementById("warnings") as HTMLElement;
const reconnectBtn = document.getElementById("reconnect") as HTMLButtonElement;
const urlInput = document.getElementById("url") as HTMLInputElement;

let state: ViewState = initialViewState();
let client: SariClient | null = null;
let screenshot: HTMLImageElement | null = null;
let commandsSinceShot = 0;

function render(): void {
  statusEl.textContent = `role: ${state.role} | tick ${state.lastAckTick.toFixed(2)}`;
  cartEl.textContent = cartSummary(state.cart);
  if (state.task) {
    const t = state.task;
    taskEl.textContent = t.done
      ? `task ${t.id}: ${t.success ? "SUCCESS" : "FAILED"} at ${t.t_end}` +
        (state.logPath ? ` (log: ${state.logPath})` : "")
      : `task: ${t.instruction}`;
  } else {
    taskEl.textContent = "no task armed";
  }
  warnEl.textContent = state.warnings.join("; ");
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (screenshot) ctx.drawImage(screenshot, 0, 0);
  if (state.frame && frameIsFresh(state)) {
    drawOverlay(ctx, state.frame);
  }
}

async function refreshPerception(requestShot: boolean): Promise<void> {
  if (!client) return;
  const res = await client.call("GetSemanticFrame");
  if (res.status === "ok" && res.payload && res.tick !== undefined) {
    state = applyFrame(state, res.payload as unknown as SemanticFrame, res.tick);
  }
  if (requestShot) {
    const shot = await client.call("RequestScreenshot");
    if (shot.status === "ok" && shot.payload) {
      const img = new Image();
      img.onload = () => {
        screenshot = img;
        render();
      };
      img.src = `data:image/png;base64,${shot.payload["png_base64"]}`;
    }
  }
  render();
}

async function send(fn: string, args: Record<string, unknown>): Promise<void> {
  if (!client || state.role === "observer") return;
  const result = await client.call(fn, args);
  if (result.status === "error") {
    state = { ...state, warnings: [result.error?.message ?? "error"] };
    render();
    return;
  }
  state = applyResult(state, result);
  if (isMutating(fn)) {
    commandsSinceShot++;
    await refreshPerception(commandsSinceShot % 5 === 0);
  } else {
    render();
  }
}

function connect(url: string): void {
  state = initialViewState();
  const socket = new WebSocket(url) as unknown as SocketLike & WebSocket;
  client = new SariClient(socket);
  client.onBroadcast = (msg) => {
    state = applyBroadcast(state, msg);
    render();
  };
  client.onClose = () => {
    state = { ...state, role: "offline" };
    render();
  };
  socket.onopen = async () => {
    const hello = await client!.call("Hello", { role: "controller" });
    if (hello.status === "ok") {
      state = { ...state, role: "controller" };
      await refreshPerception(true);
    } else {
      // someone else is driving: stay read-only, offer reconnect
      state = { ...state, role: "observer" };
      state.warnings = ["controller taken: observing (reconnect to retry)"];
    }
    render();
  };
}

document.addEventListener("keydown", (ev) => {
  const bound = commandForKey(ev.key);
  if (!bound) return;
  ev.preventDefault();
  if (bound.local === "screenshot") {
    void refreshPerception(true);
    return;
  }
  void send(bound.fn, bound.args);
});

let dragging: { button: "left" | "right"; x: number; y: number } | null = null;
canvas.addEventListener("mousedown", (ev) => {
  dragging = { button: ev.button === 2 ? "right" : "left", x: ev.clientX, y: ev.clientY };
});
canvas.addEventListener("contextmenu", (ev) => ev.preventDefault());
window.addEventListener("mouseup", () => {
  dragging = null;
});
window.addEventListener("mousemove", (ev) => {
  if (!dragging) return;
  const dx = ev.clientX - dragging.x;
  const dy = ev.clientY - dragging.y;
  if (Math.abs(dx) + Math.abs(dy) < 8) return; // quantize drags
  dragging = { ...dragging, x: ev.clientX, y: ev.clientY };
  const cmd = dragToHandCommand(dragging.button, dx, dy);
  if (cmd) void send(cmd.fn, cmd.args);
});
canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  const cmd = dragToHandCommand(ev.shiftKey ? "right" : "left", 0, 0, ev.deltaY < 0 ? 1 : -1);
  if (cmd) void send(cmd.fn, cmd.args);
});

reconnectBtn.addEventListener("click", () => {
  client?.close();
  connect(urlInput.value);
});

connect(urlInput.value);
