// Bounding-box overlay drawn above the screenshot.  Pure functions over
// a minimal 2D-context interface so tests can run without a DOM canvas.

import type { SemanticFrame } from "./protocol.js";

type CanvasStyle = string | CanvasGradient | CanvasPattern;

export interface Ctx2D {
  strokeStyle: CanvasStyle;
  fillStyle: CanvasStyle;
  lineWidth: number;
  font: string;
  strokeRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
}

export const ENTRY_COLOR = "#27e02c";
export const HELD_COLOR = "#ffcf30";
export const FIXTURE_COLOR = "#3399ff";
export const LABEL_BG = "rgba(0,0,0,0.6)";

export function entryLabel(entry: {
  category: string;
  legible: { name?: string; price_tag?: number };
}): string {
  if (entry.legible.name !== undefined) {
    const price =
      entry.legible.price_tag !== undefined
        ? ` ${(entry.legible.price_tag / 100).toFixed(2)}`
        : "";
    return `${entry.legible.name}${price}`;
  }
  return entry.category;
}

export function drawOverlay(ctx: Ctx2D, frame: SemanticFrame): number {
  let drawn = 0;
  ctx.lineWidth = 1;
  ctx.font = "10px monospace";
  for (const fixture of frame.fixtures) {
    const [ymin, xmin, ymax, xmax] = fixture.bbox;
    ctx.strokeStyle = FIXTURE_COLOR;
    ctx.strokeRect(xmin, ymin, xmax - xmin, ymax - ymin);
    ctx.fillStyle = FIXTURE_COLOR;
    ctx.fillText(fixture.label ?? fixture.id, xmin + 2, ymin - 2);
    drawn++;
  }
  for (const entry of frame.entries) {
    const [ymin, xmin, ymax, xmax] = entry.bbox;
    ctx.strokeStyle = entry.held ? HELD_COLOR : ENTRY_COLOR;
    ctx.strokeRect(xmin, ymin, xmax - xmin, ymax - ymin);
    const label = entryLabel(entry);
    ctx.fillStyle = LABEL_BG;
    ctx.fillRect(xmin, ymax, 6 * label.length, 11);
    ctx.fillStyle = entry.held ? HELD_COLOR : ENTRY_COLOR;
    ctx.fillText(label, xmin + 2, ymax + 9);
    drawn++;
  }
  return drawn;
}
