/** Page entry point: honors the per-origin preferences and runs the
 * detection controller while enabled. */

import { base64ToBytes } from "./b64.js";
import { DEFAULT_BASE_URL, DetectClient } from "./client.js";
import { DEFAULT_OPTIONS, DetectionController, FetchBytes } from "./controller.js";
import { createPrefStore } from "./prefs.js";
import { SitePreferences } from "./types.js";

/** Same-origin images come straight from the page; cross-origin ones go
 * through the background worker. */
const fetchViaPageOrBackground: FetchBytes = async (url) => {
  try {
    const response = await fetch(url);
    if (!response.ok) throw new Error(`status ${response.status}`);
    return new Uint8Array(await response.arrayBuffer());
  } catch (err) {
    if (typeof chrome !== "undefined" && chrome.runtime?.sendMessage) {
      const reply = (await chrome.runtime.sendMessage({
        type: "pve:fetch-image",
        url,
      })) as { ok: boolean; base64?: string; error?: string };
      if (reply?.ok && reply.base64) return base64ToBytes(reply.base64);
      throw new Error(reply?.error ?? "background fetch failed");
    }
    throw err;
  }
};

export async function startContentScript(
  doc: Document = document,
  baseUrl: string = DEFAULT_BASE_URL,
): Promise<DetectionController> {
  const store = createPrefStore();
  const origin = doc.location?.origin ?? "null";
  let prefs: SitePreferences = await store.load(origin);

  const controller = new DetectionController(
    doc,
    new DetectClient(baseUrl),
    prefs,
    DEFAULT_OPTIONS,
    fetchViaPageOrBackground,
  );
  if (prefs.enabled) controller.enable();

  if (typeof chrome !== "undefined" && chrome.runtime?.onMessage) {
    chrome.runtime.onMessage.addListener((message) => {
      if ((message as { type?: string })?.type !== "pve:prefs-updated") return;
      void store.load(origin).then((updated) => {
        prefs = updated;
        controller.updatePreferences(updated);
        if (updated.enabled && !controller.enabled) controller.enable();
        if (!updated.enabled && controller.enabled) controller.disable();
      });
    });
  }
  return controller;
}

// only auto-start inside a real page, not under the test runner
if (typeof window !== "undefined" && !("__PVE_TEST__" in globalThis)) {
  void startContentScript();
}
