/** Heatmap overlays rendered as positioned layers above the original
 * elements. The page's own nodes are never touched, so removing the
 * layers restores the document exactly. */

export const LAYER_CLASS = "pve-overlay-layer";
export const BADGE_CLASS = "pve-overlay-badge";

const layers = new WeakMap<HTMLImageElement, HTMLElement>();

export function applyOverlay(
  img: HTMLImageElement,
  overlayDataUrl: string,
  doc: Document = img.ownerDocument,
): HTMLElement {
  removeOverlay(img);

  const rect = img.getBoundingClientRect();
  const layer = doc.createElement("div");
  layer.className = LAYER_CLASS;
  layer.style.position = "absolute";
  layer.style.left = `${rect.left + (doc.defaultView?.scrollX ?? 0)}px`;
  layer.style.top = `${rect.top + (doc.defaultView?.scrollY ?? 0)}px`;
  layer.style.width = `${rect.width || img.width}px`;
  layer.style.height = `${rect.height || img.height}px`;
  layer.style.pointerEvents = "none";
  layer.style.zIndex = "2147483646";

  const heat = doc.createElement("img");
  heat.src = overlayDataUrl;
  heat.style.width = "100%";
  heat.style.height = "100%";
  layer.appendChild(heat);

  const badge = doc.createElement("span");
  badge.className = BADGE_CLASS;
  badge.textContent = "AI";
  badge.style.position = "absolute";
  badge.style.top = "2px";
  badge.style.left = "2px";
  badge.style.background = "#b40000";
  badge.style.color = "#fff";
  badge.style.font = "bold 11px sans-serif";
  badge.style.padding = "1px 4px";
  badge.style.borderRadius = "3px";
  layer.appendChild(badge);

  doc.body.appendChild(layer);
  layers.set(img, layer);
  return layer;
}

/** Neutral marker for images whose detection failed; original untouched. */
export function applyErrorBadge(img: HTMLImageElement, doc: Document = img.ownerDocument): HTMLElement {
  removeOverlay(img);
  const rect = img.getBoundingClientRect();
  const layer = doc.createElement("div");
  layer.className = LAYER_CLASS;
  layer.style.position = "absolute";
  layer.style.left = `${rect.left + (doc.defaultView?.scrollX ?? 0)}px`;
  layer.style.top = `${rect.top + (doc.defaultView?.scrollY ?? 0)}px`;
  layer.style.pointerEvents = "none";

  const badge = doc.createElement("span");
  badge.className = BADGE_CLASS;
  badge.textContent = "?";
  badge.style.background = "#666";
  badge.style.color = "#fff";
  badge.style.font = "bold 11px sans-serif";
  badge.style.padding = "1px 4px";
  badge.style.borderRadius = "3px";
  layer.appendChild(badge);

  doc.body.appendChild(layer);
  layers.set(img, layer);
  return layer;
}

export function removeOverlay(img: HTMLImageElement): void {
  const layer = layers.get(img);
  if (layer) {
    layer.remove();
    layers.delete(img);
  }
}

export function overlayFor(img: HTMLImageElement): HTMLElement | undefined {
  return layers.get(img);
}

export function removeAllOverlays(doc: Document): void {
  for (const layer of Array.from(doc.querySelectorAll(`.${LAYER_CLASS}`))) {
    layer.remove();
  }
}

export function countOverlays(doc: Document): number {
  return doc.querySelectorAll(`.${LAYER_CLASS}`).length;
}
