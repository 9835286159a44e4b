/** Preferences panel: per-site toggle, threshold, alpha, colormap. */

import { createPrefStore } from "./prefs.js";
import { SitePreferences } from "./types.js";

async function activeTab(): Promise<{ id?: number; origin: string } | null> {
  const tabs = await chrome.tabs.query({ active: true, currentWindow: true });
  const tab = tabs[0];
  if (!tab?.url) return null;
  try {
    return { id: tab.id, origin: new URL(tab.url).origin };
  } catch {
    return null;
  }
}

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`popup is missing #${id}`);
  return found as T;
}

export async function initPopup(): Promise<void> {
  const tab = await activeTab();
  if (!tab) {
    el<HTMLElement>("status").textContent = "No detectable page.";
    return;
  }
  const store = createPrefStore();
  const prefs = await store.load(tab.origin);

  const enabled = el<HTMLInputElement>("enabled");
  const threshold = el<HTMLInputElement>("threshold");
  const thresholdValue = el<HTMLElement>("threshold-value");
  const alpha = el<HTMLInputElement>("alpha");
  const alphaValue = el<HTMLElement>("alpha-value");
  const colormap = el<HTMLSelectElement>("colormap");

  el<HTMLElement>("origin").textContent = tab.origin;
  enabled.checked = prefs.enabled;
  threshold.value = String(prefs.threshold ?? 0.5);
  thresholdValue.textContent = threshold.value;
  alpha.value = String(prefs.alpha);
  alphaValue.textContent = alpha.value;
  colormap.value = prefs.colormap;

  async function persist(): Promise<void> {
    const updated: SitePreferences = {
      enabled: enabled.checked,
      threshold: Number(threshold.value) === 0.5 ? null : Number(threshold.value),
      alpha: Number(alpha.value),
      colormap: colormap.value,
    };
    await store.save(tab!.origin, updated);
    if (tab!.id !== undefined) {
      try {
        await chrome.tabs.sendMessage(tab!.id, { type: "pve:prefs-updated" });
      } catch {
        // tab has no content script (e.g. chrome:// pages)
      }
    }
  }

  enabled.addEventListener("change", () => void persist());
  colormap.addEventListener("change", () => void persist());
  threshold.addEventListener("input", () => {
    thresholdValue.textContent = threshold.value;
    void persist();
  });
  alpha.addEventListener("input", () => {
    alphaValue.textContent = alpha.value;
    void persist();
  });
}

if (typeof document !== "undefined" && !("__PVE_TEST__" in globalThis)) {
  document.addEventListener("DOMContentLoaded", () => void initPopup());
}
