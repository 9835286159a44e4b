/** Per-origin preferences, persisted in extension storage when running
 * as an extension and in localStorage on the demo page. */

import { DEFAULT_PREFERENCES, SitePreferences } from "./types.js";

const KEY_PREFIX = "pve:prefs:";

export interface PrefStore {
  load(origin: string): Promise<SitePreferences>;
  save(origin: string, prefs: SitePreferences): Promise<void>;
}

function sanitize(raw: unknown): SitePreferences {
  const base = { ...DEFAULT_PREFERENCES };
  if (typeof raw !== "object" || raw === null) return base;
  const source = raw as Partial<SitePreferences>;
  if (typeof source.enabled === "boolean") base.enabled = source.enabled;
  if (typeof source.threshold === "number" && source.threshold > 0 && source.threshold < 1) {
    base.threshold = source.threshold;
  }
  if (typeof source.alpha === "number" && source.alpha >= 0 && source.alpha <= 1) {
    base.alpha = source.alpha;
  }
  if (typeof source.colormap === "string" && source.colormap) {
    base.colormap = source.colormap;
  }
  return base;
}

export class WebStorePrefStore implements PrefStore {
  constructor(private storage: Storage) {}

  async load(origin: string): Promise<SitePreferences> {
    try {
      const raw = this.storage.getItem(KEY_PREFIX + origin);
      return raw ? sanitize(JSON.parse(raw)) : { ...DEFAULT_PREFERENCES };
    } catch {
      return { ...DEFAULT_PREFERENCES };
    }
  }

  async save(origin: string, prefs: SitePreferences): Promise<void> {
    this.storage.setItem(KEY_PREFIX + origin, JSON.stringify(prefs));
  }
}

export class ExtensionPrefStore implements PrefStore {
  async load(origin: string): Promise<SitePreferences> {
    const key = KEY_PREFIX + origin;
    const found = await chrome.storage.local.get(key);
    return sanitize(found[key]);
  }

  async save(origin: string, prefs: SitePreferences): Promise<void> {
    await chrome.storage.local.set({ [KEY_PREFIX + origin]: prefs });
  }
}

export function createPrefStore(): PrefStore {
  if (typeof chrome !== "undefined" && chrome.storage?.local) {
    return new ExtensionPrefStore();
  }
  return new WebStorePrefStore(globalThis.localStorage);
}
