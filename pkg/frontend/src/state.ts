/**
 * Session mutations: constraint drawing, dragging, resizing, weight
 * toggling, and the request bookkeeping. Pure of any DOM concern so every
 * interaction is unit-testable; all boxes stay inside the image bounds.
 */

import {
  boxContainsPoint,
  boxFromCorners,
  clampBox,
  clampCorner,
  handleAt,
  resizeBox,
  type HandleName,
} from "./geometry.js";
import type { Box, CropResponsePayload, LayoutBox, SessionState } from "./types.js";

export type DragState =
  | { kind: "draw"; startX: number; startY: number; currentX: number; currentY: number }
  | { kind: "move"; index: number; grabX: number; grabY: number }
  | { kind: "resize"; index: number; handle: HandleName };

export const HANDLE_TOLERANCE = 4;

export function loadImage(state: SessionState, width: number, height: number, url: string | null): void {
  state.image = { width, height, url };
  state.layout = [];
  state.lastResponse = null;
  state.banner = null;
  state.heatmapB64 = null;
  state.heatmapIsSaliency = false;
}

/**
 * Start an interaction at an image-space point: grab a resize handle if one
 * is under the pointer, else move the box under it, else rubber-band a new
 * region.
 */
export function beginDrag(state: SessionState, x: number, y: number): DragState {
  for (let i = state.layout.length - 1; i >= 0; i--) {
    const handle = handleAt(state.layout[i], x, y, HANDLE_TOLERANCE);
    if (handle !== null) {
      return { kind: "resize", index: i, handle };
    }
  }
  for (let i = state.layout.length - 1; i >= 0; i--) {
    if (boxContainsPoint(state.layout[i], x, y)) {
      return { kind: "move", index: i, grabX: x - state.layout[i].x, grabY: y - state.layout[i].y };
    }
  }
  return { kind: "draw", startX: x, startY: y, currentX: x, currentY: y };
}

export function updateDrag(state: SessionState, drag: DragState, x: number, y: number): DragState {
  if (state.image === null) return drag;
  const { width, height } = state.image;
  switch (drag.kind) {
    case "draw":
      return { ...drag, currentX: x, currentY: y };
    case "move": {
      const box = state.layout[drag.index];
      const moved = clampBox({ ...box, x: x - drag.grabX, y: y - drag.grabY }, width, height);
      state.layout[drag.index] = { ...box, ...moved };
      return drag;
    }
    case "resize": {
      const box = state.layout[drag.index];
      const resized = resizeBox(box, drag.handle, x, y, width, height);
      state.layout[drag.index] = { ...box, ...resized };
      return drag;
    }
  }
}

function rubberBand(state: SessionState, drag: DragState & { kind: "draw" }): Box {
  // corners pin to the frame so an overshooting drag reaches the edge
  const { width, height } = state.image!;
  return boxFromCorners(
    clampCorner(drag.startX, width),
    clampCorner(drag.startY, height),
    clampCorner(drag.currentX, width),
    clampCorner(drag.currentY, height),
  );
}

/** Finish an interaction; a completed rubber-band becomes a +1 region. */
export function endDrag(state: SessionState, drag: DragState): void {
  if (drag.kind !== "draw" || state.image === null) return;
  const box = rubberBand(state, drag);
  if (box.w >= 3 && box.h >= 3) {
    state.layout.push({ ...box, weight: 1 });
  }
}

/** The in-progress rubber band, for rendering only. */
export function pendingBox(state: SessionState, drag: DragState): Box | null {
  if (drag.kind !== "draw" || state.image === null) return null;
  return rubberBand(state, drag);
}

/** Flip a region between include (+1) and exclude (-1). */
export function toggleWeight(state: SessionState, index: number): void {
  const box = state.layout[index];
  if (box) box.weight = box.weight > 0 ? -1 : 1;
}

export function deleteBox(state: SessionState, index: number): void {
  state.layout.splice(index, 1);
}

export function clearBoxes(state: SessionState): void {
  state.layout = [];
}

export function boxIndexAt(state: SessionState, x: number, y: number): number {
  for (let i = state.layout.length - 1; i >= 0; i--) {
    if (boxContainsPoint(state.layout[i], x, y)) return i;
  }
  return -1;
}

export function setAspect(state: SessionState, aspect: number): void {
  if (Number.isFinite(aspect) && aspect > 0) state.aspect = aspect;
}

/** Parse "W:H" or a decimal; returns null when not a valid ratio. */
export function parseAspect(text: string): number | null {
  const trimmed = text.trim();
  const colon = trimmed.indexOf(":");
  let value: number;
  if (colon >= 0) {
    const w = Number(trimmed.slice(0, colon));
    const h = Number(trimmed.slice(colon + 1));
    value = w / h;
  } else {
    value = Number(trimmed);
  }
  return Number.isFinite(value) && value > 0 ? value : null;
}

export function requestStarted(state: SessionState): void {
  state.requestPending = true;
  state.banner = null;
}

export function requestSucceeded(state: SessionState, response: CropResponsePayload): void {
  state.requestPending = false;
  state.lastResponse = response;
  state.banner = null;
}

export function requestFailed(state: SessionState, status: number, message: string): void {
  state.requestPending = false;
  if (status === 422) {
    state.banner = "infeasible constraints";
  } else {
    state.banner = message || `request failed (${status})`;
  }
}

export function allLayoutInBounds(state: SessionState): boolean {
  if (state.image === null) return state.layout.length === 0;
  const { width, height } = state.image;
  return state.layout.every(
    (b) => b.x >= 0 && b.y >= 0 && b.x + b.w <= width && b.y + b.h <= height,
  );
}

export type { LayoutBox };
