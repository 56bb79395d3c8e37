import { describe, expect, it } from "vitest";

import {
  boxFromCorners,
  canvasPointToImage,
  canvasRectToImage,
  clampBox,
  handleAt,
  imageRectToCanvas,
  resizeBox,
} from "../src/geometry.js";
import type { Box } from "../src/types.js";

describe("boxFromCorners", () => {
  it("normalizes corner order and enforces minimum size", () => {
    expect(boxFromCorners(10, 20, 4, 6)).toEqual({ x: 4, y: 6, w: 6, h: 14 });
    expect(boxFromCorners(5, 5, 5, 5)).toEqual({ x: 5, y: 5, w: 1, h: 1 });
  });
});

describe("clampBox", () => {
  it("shifts boxes back into bounds", () => {
    expect(clampBox({ x: -4, y: 2, w: 10, h: 10 }, 100, 100)).toEqual({ x: 0, y: 2, w: 10, h: 10 });
    expect(clampBox({ x: 95, y: 95, w: 10, h: 10 }, 100, 100)).toEqual({ x: 90, y: 90, w: 10, h: 10 });
  });

  it("trims boxes larger than the frame", () => {
    expect(clampBox({ x: 0, y: 0, w: 300, h: 50 }, 100, 100)).toEqual({ x: 0, y: 0, w: 100, h: 50 });
  });
});

describe("resizeBox", () => {
  const box: Box = { x: 10, y: 10, w: 20, h: 20 };

  it("moves the dragged edge", () => {
    expect(resizeBox(box, "e", 40, 15, 100, 100)).toEqual({ x: 10, y: 10, w: 30, h: 20 });
    expect(resizeBox(box, "nw", 5, 5, 100, 100)).toEqual({ x: 5, y: 5, w: 25, h: 25 });
  });

  it("clamps a drag past the frame edge to the edge", () => {
    expect(resizeBox(box, "se", 500, 500, 100, 100)).toEqual({ x: 10, y: 10, w: 90, h: 90 });
  });

  it("survives inverted drags", () => {
    const flipped = resizeBox(box, "e", 2, 15, 100, 100);
    expect(flipped.w).toBeGreaterThanOrEqual(1);
    expect(flipped.x).toBe(2);
  });
});

describe("handleAt", () => {
  it("finds corner and edge handles within tolerance", () => {
    const box: Box = { x: 10, y: 10, w: 20, h: 20 };
    expect(handleAt(box, 10, 10, 3)).toBe("nw");
    expect(handleAt(box, 30, 30, 3)).toBe("se");
    expect(handleAt(box, 20, 10, 3)).toBe("n");
    expect(handleAt(box, 20, 20, 3)).toBeNull();
  });
});

describe("coordinate round trip", () => {
  const zooms = [0.25, 0.5, 1, 1.5, 2, 3];
  const boxes: Box[] = [
    { x: 0, y: 0, w: 1, h: 1 },
    { x: 17, y: 3, w: 53, h: 31 },
    { x: 123, y: 77, w: 640, h: 353 },
    { x: 9, y: 999, w: 3, h: 7 },
  ];

  it("recovers the exact image box at every zoom level", () => {
    for (const zoom of zooms) {
      for (const box of boxes) {
        expect(canvasRectToImage(imageRectToCanvas(box, zoom), zoom)).toEqual(box);
      }
    }
  });

  it("maps pointer positions into image lattice bounds", () => {
    expect(canvasPointToImage(-5, 3, 1, 100, 100)).toEqual({ x: 0, y: 3 });
    expect(canvasPointToImage(250, 40, 2, 100, 100)).toEqual({ x: 100, y: 20 });
  });
});
