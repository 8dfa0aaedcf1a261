// Keyboard and mouse bindings -> command envelopes.
// Step sizes match the scripted agent's primitives (0.1 m, 2.5 deg) so
// human and agent trajectories are directly comparable.

export const MOVE_STEP = 0.1;
export const PAN_STEP = 2.5;
export const DRAG_METERS_PER_PX = 0.002;

export interface BoundCommand {
  fn: string;
  args: Record<string, unknown>;
  /** local UI effect, not sent on the wire */
  local?: "screenshot";
}

const KEY_BINDINGS: Record<string, BoundCommand> = {
  w: { fn: "TransformAgent", args: { T: [0, 0, MOVE_STEP], R: [0, 0, 0] } },
  s: { fn: "TransformAgent", args: { T: [0, 0, -MOVE_STEP], R: [0, 0, 0] } },
  a: { fn: "TransformAgent", args: { T: [0, 0, 0], R: [0, -PAN_STEP, 0] } },
  d: { fn: "TransformAgent", args: { T: [0, 0, 0], R: [0, PAN_STEP, 0] } },
  q: { fn: "TransformAgent", args: { T: [-MOVE_STEP, 0, 0], R: [0, 0, 0] } },
  e: { fn: "TransformAgent", args: { T: [MOVE_STEP, 0, 0], R: [0, 0, 0] } },
  g: { fn: "ToggleLeftGrip", args: {} },
  h: { fn: "ToggleRightGrip", args: {} },
  p: { fn: "ToggleLeftPoke", args: {} },
  o: { fn: "ToggleRightPoke", args: {} },
  r: { fn: "RequestScreenshot", args: {}, local: "screenshot" },
};

export function commandForKey(key: string): BoundCommand | null {
  return KEY_BINDINGS[key.toLowerCase()] ?? null;
}

export type DragButton = "left" | "right";

/**
 * Mouse drag -> hand translation in the camera frame: horizontal drag
 * moves the hand sideways, vertical drag moves it up/down, and a wheel
 * tick pushes it along the view axis.  Left button drives the left
 * hand, right button the right hand.
 */
export function dragToHandCommand(
  button: DragButton,
  dxPx: number,
  dyPx: number,
  wheel = 0,
): BoundCommand | null {
  const t = [
    dxPx * DRAG_METERS_PER_PX,
    0 - dyPx * DRAG_METERS_PER_PX,
    wheel * MOVE_STEP,
  ].map((c) => (c === 0 ? 0 : c));
  if (t.every((c) => c === 0)) return null;
  const args: Record<string, unknown> =
    button === "left" ? { leftT: t } : { rightT: t };
  return { fn: "TransformHands", args };
}

export function isMutating(fn: string): boolean {
  return (
    fn.startsWith("Transform") || fn.startsWith("Toggle") || fn === "Reset"
  );
}
