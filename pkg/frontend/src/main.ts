/**
 * DOM wiring for the crop client: load an image (and optionally a heatmap
 * file), draw layout boxes on the canvas, pick the aspect ratio and budget,
 * request crops, and iterate. All geometry/state logic lives in the
 * framework-free modules; this file only shuttles events and pixels.
 */

import { blobToBase64, buildCropPayload, CropClient, fetchSaliency } from "./api.js";
import { canvasPointToImage } from "./geometry.js";
import { cropRectOp, renderPlan, type RenderOp } from "./render.js";
import {
  beginDrag,
  boxIndexAt,
  clearBoxes,
  deleteBox,
  endDrag,
  parseAspect,
  pendingBox,
  requestFailed,
  requestStarted,
  requestSucceeded,
  toggleWeight,
  updateDrag,
  type DragState,
} from "./state.js";
import { createSession, type MethodName } from "./types.js";

const state = createSession();
const client = new CropClient();

let imageBitmap: ImageBitmap | null = null;
let drag: DragState | null = null;
let zoom = 1.0;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const canvas = el<HTMLCanvasElement>("canvas");
const ctx = canvas.getContext("2d")!;
const bannerEl = el<HTMLDivElement>("banner");
const scoreEl = el<HTMLDivElement>("score");
const boxListEl = el<HTMLUListElement>("box-list");
const saliencyNoteEl = el<HTMLDivElement>("saliency-note");

function redraw(): void {
  if (state.image === null) {
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    return;
  }
  canvas.width = Math.round(state.image.width * zoom);
  canvas.height = Math.round(state.image.height * zoom);
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (imageBitmap !== null) {
    ctx.drawImage(imageBitmap, 0, 0, canvas.width, canvas.height);
  } else {
    ctx.fillStyle = "#202326";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
  }
  const ops = renderPlan(state, zoom, drag ? pendingBox(state, drag) : null);
  paint(ops);
  renderPanels(ops);
  renderBoxList();
}

function paint(ops: RenderOp[]): void {
  for (const op of ops) {
    if (op.type !== "rect") continue;
    ctx.save();
    ctx.strokeStyle = op.color;
    ctx.lineWidth = 2;
    ctx.setLineDash(op.dashed ? [6, 4] : []);
    ctx.strokeRect(op.rect.x, op.rect.y, op.rect.w, op.rect.h);
    if (op.label) {
      ctx.font = "12px system-ui, sans-serif";
      ctx.fillStyle = op.color;
      ctx.fillText(op.label, op.rect.x + 4, op.rect.y + 14);
    }
    ctx.restore();
  }
}

function renderPanels(ops: RenderOp[]): void {
  bannerEl.textContent = state.banner ?? "";
  bannerEl.classList.toggle("visible", state.banner !== null);
  const badge = ops.find((op) => op.type === "badge");
  if (badge && badge.type === "badge") {
    const recallClass = badge.highlighted ? "recall-bad" : "recall-good";
    scoreEl.innerHTML =
      `<span class="${recallClass}">recall ${badge.recall.toFixed(3)}</span>` +
      ` &middot; aesthetic ${badge.vAesth.toFixed(2)}` +
      ` &middot; layout ${badge.vLayout.toFixed(3)}` +
      ` &middot; total ${badge.total.toFixed(2)}` +
      ` &middot; ${(badge.elapsed * 1000).toFixed(0)} ms`;
  } else {
    scoreEl.textContent = state.requestPending ? "cropping…" : "";
  }
}

function renderBoxList(): void {
  boxListEl.innerHTML = "";
  state.layout.forEach((box, i) => {
    const item = document.createElement("li");
    const label = document.createElement("span");
    label.textContent = `${box.weight > 0 ? "keep" : "avoid"} (${box.x},${box.y}) ${box.w}×${box.h}`;
    const toggle = document.createElement("button");
    toggle.textContent = box.weight > 0 ? "make avoid" : "make keep";
    toggle.addEventListener("click", () => {
      toggleWeight(state, i);
      redraw();
    });
    const remove = document.createElement("button");
    remove.textContent = "delete";
    remove.addEventListener("click", () => {
      deleteBox(state, i);
      redraw();
    });
    item.append(label, toggle, remove);
    boxListEl.append(item);
  });
}

function pointerToImage(event: PointerEvent): { x: number; y: number } {
  const rect = canvas.getBoundingClientRect();
  return canvasPointToImage(
    event.clientX - rect.left,
    event.clientY - rect.top,
    zoom,
    state.image?.width ?? 1,
    state.image?.height ?? 1,
  );
}

canvas.addEventListener("pointerdown", (event) => {
  if (state.image === null) return;
  canvas.setPointerCapture(event.pointerId);
  const p = pointerToImage(event);
  drag = beginDrag(state, p.x, p.y);
  redraw();
});

canvas.addEventListener("pointermove", (event) => {
  if (drag === null) return;
  const p = pointerToImage(event);
  drag = updateDrag(state, drag, p.x, p.y);
  redraw();
});

canvas.addEventListener("pointerup", (event) => {
  if (drag === null) return;
  const p = pointerToImage(event);
  drag = updateDrag(state, drag, p.x, p.y);
  endDrag(state, drag);
  drag = null;
  redraw();
});

canvas.addEventListener("dblclick", (event) => {
  if (state.image === null) return;
  const rect = canvas.getBoundingClientRect();
  const p = canvasPointToImage(
    event.clientX - rect.left,
    event.clientY - rect.top,
    zoom,
    state.image.width,
    state.image.height,
  );
  const index = boxIndexAt(state, p.x, p.y);
  if (index >= 0) {
    toggleWeight(state, index);
    redraw();
  }
});

el<HTMLInputElement>("image-file").addEventListener("change", async (event) => {
  const input = event.target as HTMLInputElement;
  const file = input.files?.[0];
  if (!file) return;
  const bitmap = await createImageBitmap(file);
  imageBitmap = bitmap;
  state.image = { width: bitmap.width, height: bitmap.height, url: null };
  state.layout = [];
  state.lastResponse = null;
  state.banner = null;
  // Without an uploaded heatmap the server's heuristic saliency stands in.
  const saliency = await fetchSaliency(file);
  if (saliency.ok && saliency.pngBlob) {
    state.heatmapB64 = await blobToBase64(saliency.pngBlob);
    state.heatmapIsSaliency = true;
  } else {
    state.heatmapB64 = null;
    state.banner = saliency.error;
  }
  updateSaliencyNote();
  redraw();
});

el<HTMLInputElement>("heatmap-file").addEventListener("change", async (event) => {
  const input = event.target as HTMLInputElement;
  const file = input.files?.[0];
  if (!file) return;
  state.heatmapB64 = await blobToBase64(file);
  state.heatmapIsSaliency = false;
  updateSaliencyNote();
  redraw();
});

function updateSaliencyNote(): void {
  saliencyNoteEl.textContent = state.heatmapIsSaliency
    ? "Using heuristic saliency as the heatmap; upload a heatmap file for quality results."
    : "";
}

el<HTMLInputElement>("aspect").addEventListener("change", (event) => {
  const value = parseAspect((event.target as HTMLInputElement).value);
  if (value !== null) {
    state.aspect = value;
  }
});

el<HTMLSelectElement>("method").addEventListener("change", (event) => {
  state.method = (event.target as HTMLSelectElement).value as MethodName;
});

const iterationsInput = el<HTMLInputElement>("iterations");
const iterationsLabel = el<HTMLSpanElement>("iterations-label");
iterationsInput.addEventListener("input", () => {
  state.iterations = Number(iterationsInput.value);
  iterationsLabel.textContent = iterationsInput.value;
});

el<HTMLInputElement>("seed").addEventListener("change", (event) => {
  state.seed = Math.max(0, Math.floor(Number((event.target as HTMLInputElement).value)) || 0);
});

el<HTMLSelectElement>("zoom").addEventListener("change", (event) => {
  zoom = Number((event.target as HTMLSelectElement).value);
  redraw();
});

el<HTMLButtonElement>("clear-boxes").addEventListener("click", () => {
  clearBoxes(state);
  redraw();
});

el<HTMLButtonElement>("crop").addEventListener("click", async () => {
  if (state.image === null || state.heatmapB64 === null) {
    state.banner = "load an image first";
    redraw();
    return;
  }
  requestStarted(state);
  redraw();
  const result = await client.submit(buildCropPayload(state));
  if (result.aborted) return; // a newer request took over
  if (result.ok && result.body) {
    requestSucceeded(state, result.body);
  } else {
    requestFailed(state, result.status, result.error);
  }
  redraw();
});

// Expose the pieces integration checks poke at from the console.
declare global {
  interface Window {
    cropClientDebug: {
      state: typeof state;
      renderPlan: typeof renderPlan;
      cropRectOp: typeof cropRectOp;
    };
  }
}
window.cropClientDebug = { state, renderPlan, cropRectOp };

redraw();
