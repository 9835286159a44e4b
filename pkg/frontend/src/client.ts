/** HTTP client for the detection service. Every request goes to the
 * configured base URL and nowhere else. */

import { BatchItem, DetectResponse, SitePreferences } from "./types.js";

export const DEFAULT_BASE_URL = "http://127.0.0.1:8597";

export class ServiceError extends Error {
  constructor(public status: number, detail: string) {
    super(`service ${status}: ${detail}`);
  }
}

export interface DetectOptions {
  saliency?: boolean;
  threshold?: number | null;
  alpha?: number;
  colormap?: string;
}

export function optionsFromPreferences(prefs: SitePreferences): DetectOptions {
  return {
    threshold: prefs.threshold,
    alpha: prefs.alpha,
    colormap: prefs.colormap,
  };
}

export class DetectClient {
  constructor(
    private baseUrl: string = DEFAULT_BASE_URL,
    private fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private detectUrl(path: string, options: DetectOptions): string {
    const url = new URL(this.baseUrl + path);
    if (options.saliency === false) url.searchParams.set("saliency", "false");
    if (options.threshold != null) {
      url.searchParams.set("threshold", String(options.threshold));
    }
    if (options.alpha != null) url.searchParams.set("alpha", String(options.alpha));
    if (options.colormap) url.searchParams.set("colormap", options.colormap);
    return url.toString();
  }

  async detect(bytes: Uint8Array, options: DetectOptions = {}): Promise<DetectResponse> {
    const response = await this.fetchFn(this.detectUrl("/v1/detect", options), {
      method: "POST",
      headers: { "content-type": "application/octet-stream" },
      body: bytes as unknown as BodyInit,
    });
    if (!response.ok) {
      throw new ServiceError(response.status, await safeDetail(response));
    }
    return (await response.json()) as DetectResponse;
  }

  /** Order of results matches the order of `items`; per-item failures
   * come back in place, they do not reject the batch. */
  async detectBatch(items: Uint8Array[], options: DetectOptions = {}): Promise<BatchItem[]> {
    const form = new FormData();
    items.forEach((bytes, i) => {
      form.append("images", new Blob([bytes as unknown as BlobPart]), `img-${i}`);
    });
    const response = await this.fetchFn(this.detectUrl("/v1/detect/batch", options), {
      method: "POST",
      body: form,
    });
    if (!response.ok) {
      throw new ServiceError(response.status, await safeDetail(response));
    }
    return (await response.json()) as BatchItem[];
  }

  async health(): Promise<boolean> {
    try {
      const response = await this.fetchFn(this.baseUrl + "/v1/health");
      return response.ok;
    } catch {
      return false;
    }
  }
}

async function safeDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string };
    return body.detail ?? response.statusText;
  } catch {
    return response.statusText;
  }
}
