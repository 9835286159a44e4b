/** Service worker: fetches image bytes on behalf of content scripts so
 * cross-origin images do not taint in the page context. */

import { bytesToBase64 } from "./b64.js";

interface FetchImageMessage {
  type: "pve:fetch-image";
  url: string;
}

function isFetchImageMessage(message: unknown): message is FetchImageMessage {
  return (
    typeof message === "object" &&
    message !== null &&
    (message as { type?: unknown }).type === "pve:fetch-image" &&
    typeof (message as { url?: unknown }).url === "string"
  );
}

chrome.runtime.onMessage.addListener((message, _sender, sendResponse) => {
  if (!isFetchImageMessage(message)) return;
  fetch(message.url)
    .then(async (response) => {
      if (!response.ok) {
        sendResponse({ ok: false, error: `status ${response.status}` });
        return;
      }
      const bytes = new Uint8Array(await response.arrayBuffer());
      sendResponse({ ok: true, base64: bytesToBase64(bytes) });
    })
    .catch((err: Error) => sendResponse({ ok: false, error: err.message }));
  return true; // keep the channel open for the async response
});
