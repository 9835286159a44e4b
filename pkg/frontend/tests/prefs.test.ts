import { beforeEach, describe, expect, it } from "vitest";

import { WebStorePrefStore } from "../src/prefs.js";
import { DEFAULT_PREFERENCES } from "../src/types.js";

beforeEach(() => {
  localStorage.clear();
});

describe("per-origin preferences", () => {
  it("defaults when nothing is stored", async () => {
    const store = new WebStorePrefStore(localStorage);
    const prefs = await store.load("https://a.test");
    expect(prefs).toEqual(DEFAULT_PREFERENCES);
    expect(prefs.enabled).toBe(false);
  });

  it("round-trips and keeps origins separate", async () => {
    const store = new WebStorePrefStore(localStorage);
    await store.save("https://a.test", {
      enabled: true, threshold: 0.7, alpha: 0.3, colormap: "jet",
    });
    const a = await store.load("https://a.test");
    const b = await store.load("https://b.test");
    expect(a.enabled).toBe(true);
    expect(a.threshold).toBe(0.7);
    expect(a.colormap).toBe("jet");
    expect(b.enabled).toBe(false);
  });

  it("persists across store instances (page reload)", async () => {
    await new WebStorePrefStore(localStorage).save("https://a.test", {
      enabled: true, threshold: 0.65, alpha: 0.5, colormap: "grayscale",
    });
    const reloaded = await new WebStorePrefStore(localStorage).load("https://a.test");
    expect(reloaded.enabled).toBe(true);
    expect(reloaded.threshold).toBe(0.65);
  });

  it("sanitizes out-of-range stored values", async () => {
    localStorage.setItem(
      "pve:prefs:https://a.test",
      JSON.stringify({ enabled: "yes", threshold: 7, alpha: -2, colormap: 42 }));
    const prefs = await new WebStorePrefStore(localStorage).load("https://a.test");
    expect(prefs).toEqual(DEFAULT_PREFERENCES);
  });

  it("survives corrupted storage", async () => {
    localStorage.setItem("pve:prefs:https://a.test", "{nope");
    const prefs = await new WebStorePrefStore(localStorage).load("https://a.test");
    expect(prefs).toEqual(DEFAULT_PREFERENCES);
  });
});
