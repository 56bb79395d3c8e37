/**
 * View model: turn the session into a list of draw operations at a given
 * zoom. Rendering to a real canvas is a thin loop over these ops, so the
 * tests can assert on exact rectangles without a DOM.
 */

import { imageRectToCanvas, type CanvasRect } from "./geometry.js";
import type { Box, SessionState } from "./types.js";

export const LAYOUT_COLOR = "#e5484d";
export const EXCLUDE_COLOR = "#b54708";
export const CROP_COLOR = "#30a46c";
export const PENDING_COLOR = "#8ec8f6";

export interface RectOp {
  type: "rect";
  rect: CanvasRect;
  /** The image-space box this rect was projected from. */
  source: Box;
  color: string;
  dashed: boolean;
  label: string;
}

export interface BadgeOp {
  type: "badge";
  recall: number;
  highlighted: boolean;
  vAesth: number;
  vLayout: number;
  total: number;
  elapsed: number;
}

export interface BannerOp {
  type: "banner";
  message: string;
}

export type RenderOp = RectOp | BadgeOp | BannerOp;

/** All overlay draw operations for the current state, in paint order. */
export function renderPlan(state: SessionState, scale: number, pending: Box | null = null): RenderOp[] {
  const ops: RenderOp[] = [];
  state.layout.forEach((box, i) => {
    ops.push({
      type: "rect",
      rect: imageRectToCanvas(box, scale),
      source: { x: box.x, y: box.y, w: box.w, h: box.h },
      color: box.weight > 0 ? LAYOUT_COLOR : EXCLUDE_COLOR,
      dashed: box.weight <= 0,
      label: box.weight > 0 ? `keep ${i + 1}` : `avoid ${i + 1}`,
    });
  });
  if (pending !== null) {
    ops.push({
      type: "rect",
      rect: imageRectToCanvas(pending, scale),
      source: pending,
      color: PENDING_COLOR,
      dashed: true,
      label: "",
    });
  }
  if (state.lastResponse !== null) {
    const crop = state.lastResponse.box;
    ops.push({
      type: "rect",
      rect: imageRectToCanvas(crop, scale),
      source: { ...crop },
      color: CROP_COLOR,
      dashed: false,
      label: "crop",
    });
    ops.push({
      type: "badge",
      recall: state.lastResponse.recall,
      highlighted: state.lastResponse.recall < 1.0,
      vAesth: state.lastResponse.breakdown.v_aesth,
      vLayout: state.lastResponse.breakdown.v_layout,
      total: state.lastResponse.breakdown.total,
      elapsed: state.lastResponse.elapsed,
    });
  }
  if (state.banner !== null) {
    ops.push({ type: "banner", message: state.banner });
  }
  return ops;
}

/** The rendered crop rectangle op, when a response is shown. */
export function cropRectOp(ops: RenderOp[]): RectOp | null {
  for (const op of ops) {
    if (op.type === "rect" && op.label === "crop") return op;
  }
  return null;
}
