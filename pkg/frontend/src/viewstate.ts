// Client-side view of the world: everything rendered comes from server
// replies or broadcasts, never from local prediction.  The frame shown
// is stamped with the tick of the command that produced it, so the UI
// can assert it is never older than the last acknowledged command.

import type {
  Broadcast,
  CartView,
  ResultEnvelope,
  SemanticFrame,
  TaskStatus,
} from "./protocol.js";

export type Role = "controller" | "observer" | "connecting" | "offline";

export interface ViewState {
  role: Role;
  lastAckTick: number;
  frame: SemanticFrame | null;
  frameTick: number;
  screenshotUrl: string | null;
  screenshotTick: number;
  cart: CartView | null;
  task: TaskStatus | null;
  warnings: string[];
  logPath: string | null;
}

export function initialViewState(): ViewState {
  return {
    role: "connecting",
    lastAckTick: 0,
    frame: null,
    frameTick: -1,
    screenshotUrl: null,
    screenshotTick: -1,
    cart: null,
    task: null,
    warnings: [],
    logPath: null,
  };
}

export function applyResult(state: ViewState, result: ResultEnvelope): ViewState {
  if (result.status !== "ok" || result.tick === undefined) return state;
  const next = { ...state, lastAckTick: Math.max(state.lastAckTick, result.tick) };
  const payload = result.payload ?? {};
  if ("cart" in payload) next.cart = payload["cart"] as CartView;
  if ("task" in payload && payload["task"]) {
    next.task = payload["task"] as TaskStatus;
    if (next.task.log_path) next.logPath = next.task.log_path;
  }
  if ("warnings" in payload) next.warnings = payload["warnings"] as string[];
  if ("entries" in payload && "camera" in payload) {
    next.frame = payload as unknown as SemanticFrame;
    next.frameTick = result.tick;
  }
  return next;
}

export function applyFrame(
  state: ViewState,
  frame: SemanticFrame,
  tick: number,
): ViewState {
  if (tick < state.frameTick) return state; // stale reply raced a newer one
  return { ...state, frame, frameTick: tick };
}

export function applyBroadcast(state: ViewState, msg: Broadcast): ViewState {
  const next = {
    ...state,
    lastAckTick: Math.max(state.lastAckTick, msg.tick),
    cart: msg.payload.cart,
    task: msg.payload.task ?? state.task,
  };
  if (msg.payload.log_path) next.logPath = msg.payload.log_path;
  return next;
}

/** Core freshness invariant: what we render is never older than the
 * last acknowledged command.  Checked after every apply in the app,
 * asserted directly in tests. */
export function frameIsFresh(state: ViewState): boolean {
  return state.frame === null || state.frameTick >= state.lastAckTick;
}

export function formatCents(cents: number): string {
  return (cents / 100).toFixed(2);
}

export function cartSummary(cart: CartView | null): string {
  if (cart === null || cart.phase === "IDLE") return "cart: idle";
  const lines = cart.lines.length;
  const total = formatCents(cart.total_cents);
  return `cart [${cart.phase}]: ${lines} item${lines === 1 ? "" : "s"}, total ${total}`;
}
