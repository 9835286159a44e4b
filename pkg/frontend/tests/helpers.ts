/** Stub service and fixture-page helpers shared by the test suites. */

import { DetectResponse } from "../src/types.js";

export const BASE = "http://service.test";
export const OVERLAY_B64 = "aGVhdG1hcA=="; // stand-in PNG payload

/** Image bytes whose first byte encodes the stub's verdict. */
export function imageBytes(index: number, ai: boolean): Uint8Array {
  const bytes = new Uint8Array(64);
  bytes[0] = ai ? 200 : 10;
  bytes[1] = index & 0xff;
  bytes[2] = (index >> 8) & 0xff;
  for (let i = 3; i < bytes.length; i += 1) bytes[i] = (index * 31 + i) & 0xff;
  return bytes;
}

export function verdictFor(bytes: Uint8Array): DetectResponse {
  const ai = bytes[0] >= 128;
  return {
    probability: ai ? 0.93 : 0.08,
    label: ai ? "ai" : "human",
    threshold: 0.5,
    model: { name: "stub", version: "1" },
    timings: { decode_micros: 1, preprocess_micros: 1, forward_micros: 1, saliency_micros: 1 },
    ...(ai ? { overlay_png_base64: OVERLAY_B64 } : {}),
  };
}

/** jsdom's Blob lacks arrayBuffer(); FileReader covers it. */
async function readBlob(blob: Blob): Promise<Uint8Array> {
  if (typeof blob.arrayBuffer === "function") {
    return new Uint8Array(await blob.arrayBuffer());
  }
  return new Promise((resolve, reject) => {
    const reader = new FileReader();
    reader.onload = () => resolve(new Uint8Array(reader.result as ArrayBuffer));
    reader.onerror = () => reject(reader.error);
    reader.readAsArrayBuffer(blob);
  });
}

interface StubResponseInit {
  status?: number;
  body: unknown;
}

function jsonResponse(init: StubResponseInit): Response {
  const status = init.status ?? 200;
  return {
    ok: status >= 200 && status < 300,
    status,
    statusText: String(status),
    json: async () => init.body,
    arrayBuffer: async () => {
      const payload = init.body as Uint8Array;
      const buffer = new ArrayBuffer(payload.byteLength);
      new Uint8Array(buffer).set(payload);
      return buffer;
    },
  } as unknown as Response;
}

export interface StubService {
  fetch: typeof fetch;
  images: Map<string, Uint8Array>;
  requests: { detect: number; batch: number; image: number };
  urls: string[];
  failNetwork: boolean;
}

/** Serves image bytes by URL and answers /v1/detect(+batch) with the
 * first-byte verdict rule. Counts every request it sees. */
export function makeStubService(): StubService {
  const service: StubService = {
    images: new Map(),
    requests: { detect: 0, batch: 0, image: 0 },
    urls: [],
    failNetwork: false,
    fetch: (async (input: RequestInfo | URL, init?: RequestInit) => {
      const url = String(input);
      service.urls.push(url);
      if (service.failNetwork) throw new Error("network down");

      if (url.startsWith(`${BASE}/v1/detect/batch`)) {
        service.requests.batch += 1;
        const form = init?.body as FormData;
        const items = [];
        for (const [, value] of form.entries()) {
          const bytes = await readBlob(value as Blob);
          if (bytes[0] === 0xff) {
            items.push({ error: { status: 400, detail: "cannot decode" } });
          } else {
            items.push(verdictFor(bytes));
          }
        }
        return jsonResponse({ body: items });
      }
      if (url.startsWith(`${BASE}/v1/detect`)) {
        service.requests.detect += 1;
        const bytes = init?.body as Uint8Array;
        if (bytes[0] === 0xff) {
          return jsonResponse({ status: 400, body: { detail: "cannot decode" } });
        }
        return jsonResponse({ body: verdictFor(bytes) });
      }
      if (url.startsWith(`${BASE}/v1/health`)) {
        return jsonResponse({ body: { status: "ok" } });
      }

      const image = service.images.get(url);
      if (image) {
        service.requests.image += 1;
        return jsonResponse({ body: image });
      }
      return jsonResponse({ status: 404, body: { detail: `no stub for ${url}` } });
    }) as typeof fetch,
  };
  return service;
}

export function addFixtureImage(
  doc: Document,
  service: StubService,
  index: number,
  ai: boolean,
  options: { size?: number; bytes?: Uint8Array } = {},
): HTMLImageElement {
  const url = `http://fixture.test/img/${index}.png`;
  service.images.set(url, options.bytes ?? imageBytes(index, ai));
  const img = doc.createElement("img");
  img.src = url;
  img.width = options.size ?? 100;
  img.height = options.size ?? 100;
  doc.body.appendChild(img);
  return img;
}

export const fetchBytesVia = (service: StubService) => async (url: string) => {
  const response = await service.fetch(url);
  if (!response.ok) throw new Error(`image fetch ${response.status}`);
  return new Uint8Array(await response.arrayBuffer());
};
