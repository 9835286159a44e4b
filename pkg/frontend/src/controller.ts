/** Ties scanning, fetching, caching, and overlays together for one page.
 *
 * Detection runs only while enabled; disabling removes every layer the
 * controller added and leaves the page's own nodes exactly as found.
 * Results are cached by content hash with at most one request in flight
 * per hash, and a burst of discoveries within the batch window goes to
 * the batch endpoint instead of one request per image.
 */

import { ResultCache } from "./cache.js";
import { DetectClient, DetectOptions, ServiceError, optionsFromPreferences } from "./client.js";
import { contentHash } from "./hash.js";
import { applyErrorBadge, applyOverlay, removeAllOverlays, removeOverlay } from "./overlay.js";
import { PageScanner, isDetectable } from "./scanner.js";
import {
  DetectResponse,
  PageImageRecord,
  SitePreferences,
  isFailure,
  newRecord,
  settleRecord,
} from "./types.js";

export interface ControllerOptions {
  batchWindowMs: number;
  batchMin: number;
  maxConcurrentFetches: number;
  minImageSize: number;
}

export const DEFAULT_OPTIONS: ControllerOptions = {
  batchWindowMs: 250,
  batchMin: 4,
  maxConcurrentFetches: 6,
  minImageSize: 64,
};

export type FetchBytes = (url: string) => Promise<Uint8Array>;

export async function fetchImageBytes(url: string): Promise<Uint8Array> {
  const response = await fetch(url);
  if (!response.ok) throw new Error(`image fetch ${response.status} for ${url}`);
  return new Uint8Array(await response.arrayBuffer());
}

interface QueuedItem {
  record: PageImageRecord;
  bytes: Uint8Array;
  hash: string;
  done: () => void;
}

export class DetectionController {
  readonly records = new Map<HTMLImageElement, PageImageRecord>();
  private cache = new ResultCache();
  private scanner: PageScanner | null = null;
  private queue: QueuedItem[] = [];
  private windowTimer: ReturnType<typeof setTimeout> | null = null;
  private epoch = 0;
  private activeFetches = 0;
  private fetchWaiters: Array<() => void> = [];
  private settled: Array<Promise<void>> = [];

  constructor(
    private doc: Document,
    private client: DetectClient,
    private prefs: SitePreferences,
    private options: ControllerOptions = DEFAULT_OPTIONS,
    private fetchBytes: FetchBytes = fetchImageBytes,
  ) {}

  get enabled(): boolean {
    return this.scanner !== null;
  }

  updatePreferences(prefs: SitePreferences): void {
    this.prefs = prefs;
  }

  enable(): void {
    if (this.scanner) return;
    this.scanner = new PageScanner(this.doc, (img) => this.discovered(img));
    this.scanner.start();
  }

  /** Removes every overlay and forgets all records; the DOM is back to
   * its pre-enable state (layers are the only thing we ever add). */
  disable(): void {
    this.epoch += 1;
    this.scanner?.stop();
    this.scanner = null;
    if (this.windowTimer !== null) {
      clearTimeout(this.windowTimer);
      this.windowTimer = null;
    }
    for (const item of this.queue) item.done();
    this.queue = [];
    for (const record of this.records.values()) {
      removeOverlay(record.element);
    }
    removeAllOverlays(this.doc);
    this.records.clear();
    this.settled = [];
  }

  /** Resolves once every record discovered so far has settled. */
  async idle(): Promise<void> {
    let seen = 0;
    while (seen < this.settled.length) {
      const batch = this.settled.slice(seen);
      seen = this.settled.length;
      await Promise.all(batch);
    }
  }

  private discovered(img: HTMLImageElement): void {
    if (!isDetectable(img, this.options.minImageSize)) return;
    const existing = this.records.get(img);
    if (existing && existing.sourceUrl === img.src) return;
    if (existing) removeOverlay(img);

    const record = newRecord(img, img.src);
    this.records.set(img, record);
    this.settled.push(this.process(record));
  }

  private async process(record: PageImageRecord): Promise<void> {
    const epoch = this.epoch;
    let bytes: Uint8Array;
    let hash: string;
    try {
      await this.acquireFetchSlot();
      try {
        bytes = await this.fetchBytes(record.sourceUrl);
        hash = await contentHash(bytes);
      } finally {
        this.releaseFetchSlot();
      }
    } catch {
      this.markError(record, epoch);
      return;
    }
    if (epoch !== this.epoch) return;

    record.contentHash = hash;
    const known = this.cache.lookup(hash);
    if (known) {
      await this.applyResult(record, known, epoch);
      return;
    }

    await new Promise<void>((done) => {
      this.queue.push({ record, bytes, hash, done });
      if (this.windowTimer === null) {
        this.windowTimer = setTimeout(() => {
          this.windowTimer = null;
          void this.dispatch(epoch);
        }, this.options.batchWindowMs);
      }
    });
  }

  private async dispatch(epoch: number): Promise<void> {
    const items = this.queue;
    this.queue = [];
    if (epoch !== this.epoch || !items.length) {
      for (const item of items) item.done();
      return;
    }

    const options = optionsFromPreferences(this.prefs);
    const byHash = new Map<string, QueuedItem[]>();
    for (const item of items) {
      const bucket = byHash.get(item.hash);
      if (bucket) bucket.push(item);
      else byHash.set(item.hash, [item]);
    }

    // hashes not already requested get exactly one network call, either
    // batched or individual
    const fresh = this.cache.register(Array.from(byHash.keys()));
    const freshHashes = Array.from(fresh.keys());
    if (freshHashes.length >= this.options.batchMin) {
      void this.dispatchBatch(freshHashes, byHash, fresh, options);
    } else {
      for (const hash of freshHashes) {
        const resolver = fresh.get(hash)!;
        this.client
          .detect(byHash.get(hash)![0].bytes, options)
          .then(resolver.resolve)
          .catch((err: Error) => resolver.reject(err));
      }
    }

    for (const [hash, bucket] of byHash) {
      const promise = this.cache.lookup(hash)!;
      for (const item of bucket) {
        void this.applyResult(item.record, promise, epoch).then(item.done);
      }
    }
  }

  private async dispatchBatch(
    hashes: string[],
    byHash: Map<string, QueuedItem[]>,
    fresh: Map<string, { resolve: (v: DetectResponse) => void; reject: (e: Error) => void }>,
    options: DetectOptions,
  ): Promise<void> {
    const payloads = hashes.map((hash) => byHash.get(hash)![0].bytes);
    try {
      const results = await this.client.detectBatch(payloads, options);
      hashes.forEach((hash, i) => {
        const resolver = fresh.get(hash)!;
        const item = results[i];
        if (item === undefined || isFailure(item)) {
          const status = item && isFailure(item) ? item.error.status : 0;
          const detail = item && isFailure(item) ? item.error.detail : "missing batch item";
          resolver.reject(new ServiceError(status, detail));
        } else {
          resolver.resolve(item);
        }
      });
    } catch (err) {
      for (const hash of hashes) {
        fresh.get(hash)!.reject(err instanceof Error ? err : new Error(String(err)));
      }
    }
  }

  private async applyResult(
    record: PageImageRecord,
    promise: Promise<DetectResponse>,
    epoch: number,
  ): Promise<void> {
    let response: DetectResponse;
    try {
      response = await promise;
    } catch {
      this.markError(record, epoch);
      return;
    }
    if (!this.isCurrent(record, epoch)) return;

    record.probability = response.probability;
    if (response.label === "ai") {
      if (settleRecord(record, "ai") && response.overlay_png_base64) {
        record.overlayDataUrl = `data:image/png;base64,${response.overlay_png_base64}`;
        applyOverlay(record.element, record.overlayDataUrl, this.doc);
      }
    } else {
      settleRecord(record, "human");
    }
  }

  private markError(record: PageImageRecord, epoch: number): void {
    if (this.isCurrent(record, epoch) && settleRecord(record, "error")) {
      applyErrorBadge(record.element, this.doc);
    }
  }

  /** Stale records (disabled in the meantime, or the element's source
   * changed) must not touch the page. */
  private isCurrent(record: PageImageRecord, epoch: number): boolean {
    return epoch === this.epoch && this.records.get(record.element) === record;
  }

  private acquireFetchSlot(): Promise<void> {
    if (this.activeFetches < this.options.maxConcurrentFetches) {
      this.activeFetches += 1;
      return Promise.resolve();
    }
    return new Promise((resolve) => {
      this.fetchWaiters.push(() => {
        this.activeFetches += 1;
        resolve();
      });
    });
  }

  private releaseFetchSlot(): void {
    this.activeFetches -= 1;
    const next = this.fetchWaiters.shift();
    if (next) next();
  }
}
