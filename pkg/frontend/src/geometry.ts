/**
 * Box arithmetic and the image <-> canvas coordinate mapping.
 *
 * Boxes live in integer image space; the canvas only ever sees scaled
 * copies, so converting a rendered rectangle back at any zoom recovers the
 * original box exactly.
 */

import type { Box } from "./types.js";

export interface CanvasRect {
  x: number;
  y: number;
  w: number;
  h: number;
}

export type HandleName = "nw" | "n" | "ne" | "w" | "e" | "sw" | "s" | "se";

const HANDLE_NAMES: HandleName[] = ["nw", "n", "ne", "w", "e", "sw", "s", "se"];

/** Rectangle from two drag corners, at least 1x1, any corner order. */
export function boxFromCorners(x1: number, y1: number, x2: number, y2: number): Box {
  const x = Math.min(x1, x2);
  const y = Math.min(y1, y2);
  return {
    x,
    y,
    w: Math.max(1, Math.abs(x2 - x1)),
    h: Math.max(1, Math.abs(y2 - y1)),
  };
}

/** Shift a box into [0,width) x [0,height), trimming if it cannot fit. */
export function clampBox(box: Box, width: number, height: number): Box {
  const w = Math.max(1, Math.min(box.w, width));
  const h = Math.max(1, Math.min(box.h, height));
  const x = Math.max(0, Math.min(box.x, width - w));
  const y = Math.max(0, Math.min(box.y, height - h));
  return { x, y, w, h };
}

export function boxContainsPoint(box: Box, px: number, py: number): boolean {
  return px >= box.x && px < box.x + box.w && py >= box.y && py < box.y + box.h;
}

/** The 8 resize handle anchor points of a box, image space. */
export function handlePoints(box: Box): Array<{ name: HandleName; x: number; y: number }> {
  const cx = box.x + box.w / 2;
  const cy = box.y + box.h / 2;
  const xs: Record<HandleName, [number, number]> = {
    nw: [box.x, box.y],
    n: [cx, box.y],
    ne: [box.x + box.w, box.y],
    w: [box.x, cy],
    e: [box.x + box.w, cy],
    sw: [box.x, box.y + box.h],
    s: [cx, box.y + box.h],
    se: [box.x + box.w, box.y + box.h],
  };
  return HANDLE_NAMES.map((name) => ({ name, x: xs[name][0], y: xs[name][1] }));
}

/** Which handle (if any) the pointer grabs, within tolerance pixels. */
export function handleAt(box: Box, px: number, py: number, tolerance: number): HandleName | null {
  for (const h of handlePoints(box)) {
    if (Math.abs(px - h.x) <= tolerance && Math.abs(py - h.y) <= tolerance) {
      return h.name;
    }
  }
  return null;
}

/** Clamp a lattice corner coordinate into [0, extent]. */
export function clampCorner(v: number, extent: number): number {
  return Math.max(0, Math.min(v, extent));
}

/** Resize a box by dragging one handle; the dragged edge pins to the frame
 * while the anchored corner stays put. */
export function resizeBox(
  box: Box,
  handle: HandleName,
  px: number,
  py: number,
  width: number,
  height: number,
): Box {
  const cx = clampCorner(px, width);
  const cy = clampCorner(py, height);
  let x1 = box.x;
  let y1 = box.y;
  let x2 = box.x + box.w;
  let y2 = box.y + box.h;
  if (handle.includes("w")) x1 = cx;
  if (handle.includes("e")) x2 = cx;
  if (handle === "n" || handle === "nw" || handle === "ne") y1 = cy;
  if (handle === "s" || handle === "sw" || handle === "se") y2 = cy;
  return clampBox(boxFromCorners(x1, y1, x2, y2), width, height);
}

/** Image-space box to canvas pixels at the given zoom. */
export function imageRectToCanvas(box: Box, scale: number): CanvasRect {
  return { x: box.x * scale, y: box.y * scale, w: box.w * scale, h: box.h * scale };
}

/** Inverse of imageRectToCanvas; exact for boxes that came from image space. */
export function canvasRectToImage(rect: CanvasRect, scale: number): Box {
  return {
    x: Math.round(rect.x / scale),
    y: Math.round(rect.y / scale),
    w: Math.round(rect.w / scale),
    h: Math.round(rect.h / scale),
  };
}

/** Pointer position on the canvas to integer image lattice coordinates
 * (corner semantics: the far edge maps to width/height, not width-1). */
export function canvasPointToImage(
  px: number,
  py: number,
  scale: number,
  width: number,
  height: number,
): { x: number; y: number } {
  return {
    x: clampCorner(Math.floor(px / scale), width),
    y: clampCorner(Math.floor(py / scale), height),
  };
}
