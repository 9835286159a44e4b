export type DetectionStatus = "pending" | "human" | "ai" | "error";

export interface PageImageRecord {
  element: HTMLImageElement;
  sourceUrl: string;
  contentHash: string | null;
  status: DetectionStatus;
  probability: number | null;
  overlayDataUrl: string | null;
}

export function newRecord(element: HTMLImageElement, sourceUrl: string): PageImageRecord {
  return {
    element,
    sourceUrl,
    contentHash: null,
    status: "pending",
    probability: null,
    overlayDataUrl: null,
  };
}

/** Only pending records may settle, and they settle exactly once. */
export function settleRecord(
  record: PageImageRecord,
  status: Exclude<DetectionStatus, "pending">,
): boolean {
  if (record.status !== "pending") return false;
  record.status = status;
  return true;
}

export interface SitePreferences {
  enabled: boolean;
  /** null means "use the service default". */
  threshold: number | null;
  alpha: number;
  colormap: string;
}

export const DEFAULT_PREFERENCES: SitePreferences = {
  enabled: false,
  threshold: null,
  alpha: 0.45,
  colormap: "inferno",
};

export interface DetectResponse {
  probability: number;
  label: "ai" | "human";
  threshold: number;
  model: { name: string; version: string };
  timings: Record<string, number>;
  overlay_png_base64?: string;
}

export interface DetectFailure {
  error: { status: number; detail: string };
}

export type BatchItem = DetectResponse | DetectFailure;

export function isFailure(item: BatchItem): item is DetectFailure {
  return "error" in item;
}
