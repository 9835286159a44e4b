/** Finds page images worth detecting: the ones present now and the ones
 * injected later, skipping anything rendered below 64x64. */

export const MIN_RENDERED_SIZE = 64;

export function renderedSize(img: HTMLImageElement): { width: number; height: number } {
  const rect = img.getBoundingClientRect();
  // jsdom and not-yet-laid-out images report zero rects; fall back to
  // attributes, then to intrinsic size
  const width = rect.width || img.width || img.naturalWidth;
  const height = rect.height || img.height || img.naturalHeight;
  return { width, height };
}

export function isDetectable(img: HTMLImageElement, minSize = MIN_RENDERED_SIZE): boolean {
  if (!img.src) return false;
  const { width, height } = renderedSize(img);
  return width >= minSize && height >= minSize;
}

export class PageScanner {
  private observer: MutationObserver | null = null;

  constructor(
    private root: Document,
    private onImage: (img: HTMLImageElement) => void,
  ) {}

  start(): void {
    for (const img of Array.from(this.root.querySelectorAll("img"))) {
      this.onImage(img as HTMLImageElement);
    }
    this.observer = new MutationObserver((mutations) => {
      for (const mutation of mutations) {
        if (mutation.type === "attributes") {
          if (mutation.target instanceof HTMLImageElement) {
            this.onImage(mutation.target);
          }
          continue;
        }
        for (const node of Array.from(mutation.addedNodes)) {
          if (node instanceof HTMLImageElement) {
            this.onImage(node);
          } else if (node instanceof Element) {
            for (const img of Array.from(node.querySelectorAll("img"))) {
              this.onImage(img as HTMLImageElement);
            }
          }
        }
      }
    });
    this.observer.observe(this.root.documentElement ?? this.root, {
      childList: true,
      subtree: true,
      attributes: true,
      attributeFilter: ["src"],
    });
  }

  stop(): void {
    this.observer?.disconnect();
    this.observer = null;
  }
}
