import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { PageScanner, isDetectable, renderedSize } from "../src/scanner.js";

let scanner: PageScanner | null = null;

beforeEach(() => {
  document.body.innerHTML = "";
});

afterEach(() => {
  scanner?.stop();
  scanner = null;
});

function addImage(src: string, size = 100): HTMLImageElement {
  const img = document.createElement("img");
  img.src = src;
  img.width = size;
  img.height = size;
  document.body.appendChild(img);
  return img;
}

const tick = () => new Promise((r) => setTimeout(r, 0));

describe("scan_page", () => {
  it("finds every existing image", () => {
    for (let i = 0; i < 10; i += 1) addImage(`http://x.test/${i}.png`);
    const seen: string[] = [];
    scanner = new PageScanner(document, (img) => seen.push(img.src));
    scanner.start();
    expect(seen).toHaveLength(10);
  });

  it("sees dynamically injected images without reload", async () => {
    const seen: string[] = [];
    scanner = new PageScanner(document, (img) => seen.push(img.src));
    scanner.start();
    expect(seen).toHaveLength(0);

    addImage("http://x.test/late.png");
    await tick();
    expect(seen).toEqual(["http://x.test/late.png"]);

    const wrapper = document.createElement("div");
    const nested = document.createElement("img");
    nested.src = "http://x.test/nested.png";
    nested.width = nested.height = 80;
    wrapper.appendChild(nested);
    document.body.appendChild(wrapper);
    await tick();
    expect(seen).toHaveLength(2);
  });

  it("re-reports an image when its source changes", async () => {
    const img = addImage("http://x.test/a.png");
    const seen: string[] = [];
    scanner = new PageScanner(document, (element) => seen.push(element.src));
    scanner.start();
    img.src = "http://x.test/b.png";
    await tick();
    expect(seen).toEqual(["http://x.test/a.png", "http://x.test/b.png"]);
  });

  it("stops observing after stop()", async () => {
    const seen: string[] = [];
    scanner = new PageScanner(document, (img) => seen.push(img.src));
    scanner.start();
    scanner.stop();
    addImage("http://x.test/after-stop.png");
    await tick();
    expect(seen).toHaveLength(0);
  });
});

describe("size floor", () => {
  it("skips icons below 64 rendered pixels", () => {
    const icon = addImage("http://x.test/icon.png", 16);
    const photo = addImage("http://x.test/photo.png", 200);
    expect(isDetectable(icon)).toBe(false);
    expect(isDetectable(photo)).toBe(true);
  });

  it("skips images without a source", () => {
    const img = document.createElement("img");
    img.width = img.height = 100;
    expect(isDetectable(img)).toBe(false);
  });

  it("falls back to attributes when layout reports zero", () => {
    const img = addImage("http://x.test/x.png", 72);
    const size = renderedSize(img);
    expect(size.width).toBe(72);
    expect(size.height).toBe(72);
  });
});
