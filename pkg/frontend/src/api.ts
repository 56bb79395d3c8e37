/**
 * Service client. One crop request may be in flight per session; submitting
 * a new one aborts the pending request so a stale result never renders.
 */

import type { CropRequestPayload, CropResponsePayload, SessionState } from "./types.js";

export interface CropResult {
  ok: boolean;
  status: number;
  body: CropResponsePayload | null;
  error: string;
  aborted: boolean;
}

/** Build the POST /v1/crop body from the session; layout weights ride along. */
export function buildCropPayload(state: SessionState): CropRequestPayload {
  if (state.image === null || state.heatmapB64 === null) {
    throw new Error("image and heatmap must be loaded before requesting a crop");
  }
  return {
    heatmap_b64: state.heatmapB64,
    width: state.image.width,
    height: state.image.height,
    aspect: state.aspect,
    layout: state.layout.map((b) => ({ x: b.x, y: b.y, w: b.w, h: b.h, weight: b.weight })),
    method: state.method,
    iterations: state.iterations,
    alpha: state.alpha,
    seed: state.seed,
  };
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class CropClient {
  private inflight: AbortController | null = null;

  constructor(private fetchImpl: FetchLike = (...args) => fetch(...args)) {}

  /** POST the crop request, cancelling any pending one first. */
  async submit(payload: CropRequestPayload): Promise<CropResult> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    try {
      const resp = await this.fetchImpl("/v1/crop", {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(payload),
        signal: controller.signal,
      });
      const body = await resp.json().catch(() => null);
      if (!resp.ok) {
        const error = body && typeof body.error === "string" ? body.error : resp.statusText;
        return { ok: false, status: resp.status, body: null, error, aborted: false };
      }
      return { ok: true, status: resp.status, body: body as CropResponsePayload, error: "", aborted: false };
    } catch (err) {
      if (controller.signal.aborted) {
        return { ok: false, status: 0, body: null, error: "aborted", aborted: true };
      }
      return { ok: false, status: 0, body: null, error: String(err), aborted: false };
    } finally {
      if (this.inflight === controller) this.inflight = null;
    }
  }

  cancel(): void {
    this.inflight?.abort();
    this.inflight = null;
  }

  get pending(): boolean {
    return this.inflight !== null;
  }
}

/** Upload an image to get the server's heuristic saliency PNG back. */
export async function fetchSaliency(
  file: Blob,
  fetchImpl: FetchLike = (...args) => fetch(...args),
): Promise<{ ok: boolean; pngBlob: Blob | null; error: string }> {
  const form = new FormData();
  form.append("file", file, "image.png");
  const resp = await fetchImpl("/v1/heatmap", { method: "POST", body: form });
  if (!resp.ok) {
    return { ok: false, pngBlob: null, error: `saliency request failed (${resp.status})` };
  }
  return { ok: true, pngBlob: await resp.blob(), error: "" };
}

/** Blob to the base64 the crop endpoint expects. */
export async function blobToBase64(blob: Blob): Promise<string> {
  const buffer = await blob.arrayBuffer();
  const bytes = new Uint8Array(buffer);
  let binary = "";
  const chunk = 0x8000;
  for (let i = 0; i < bytes.length; i += chunk) {
    binary += String.fromCharCode(...bytes.subarray(i, i + chunk));
  }
  return btoa(binary);
}
