/** Shared shapes for the crop client. Boxes are image-space pixels. */

export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

/** A layout region the crop should keep (weight +1) or avoid (weight -1). */
export interface LayoutBox extends Box {
  weight: number;
}

export type MethodName = "heatmap" | "proposal" | "baseline_short" | "baseline_long";

/** Mirrors the service's POST /v1/crop body. */
export interface CropRequestPayload {
  heatmap_b64: string;
  width: number;
  height: number;
  aspect: number;
  layout: Array<Box & { weight: number }>;
  method: MethodName;
  iterations: number;
  alpha: number;
  seed: number;
}

export interface ScoreBreakdownPayload {
  v_aesth: number;
  v_layout: number;
  total: number;
}

/** Mirrors the service's crop response. */
export interface CropResponsePayload {
  box: Box;
  breakdown: ScoreBreakdownPayload;
  recall: number;
  elapsed: number;
}

export interface ImageRef {
  width: number;
  height: number;
  /** Object URL for canvas drawing; null in tests. */
  url: string | null;
}

/** Everything the client needs to rebuild the view and the next request. */
export interface SessionState {
  image: ImageRef | null;
  /** Base64 of the heatmap sent with crop requests. */
  heatmapB64: string | null;
  /** True when the heatmap came from the server's heuristic saliency. */
  heatmapIsSaliency: boolean;
  layout: LayoutBox[];
  aspect: number;
  method: MethodName;
  iterations: number;
  seed: number;
  alpha: number;
  lastResponse: CropResponsePayload | null;
  banner: string | null;
  requestPending: boolean;
}

export function createSession(): SessionState {
  return {
    image: null,
    heatmapB64: null,
    heatmapIsSaliency: false,
    layout: [],
    aspect: 1.0,
    method: "heatmap",
    iterations: 100,
    seed: 0,
    alpha: 10000,
    lastResponse: null,
    banner: null,
    requestPending: false,
  };
}
