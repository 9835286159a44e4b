/** Detection results keyed by content hash. At most one request is ever
 * in flight per hash; later lookups share the first promise. */

import { DetectResponse } from "./types.js";

export class ResultCache {
  private inflight = new Map<string, Promise<DetectResponse>>();

  /** Runs `loader` only if this hash has never been requested. */
  fetchOnce(hash: string, loader: () => Promise<DetectResponse>): Promise<DetectResponse> {
    const existing = this.inflight.get(hash);
    if (existing) return existing;
    const promise = loader();
    this.inflight.set(hash, promise);
    promise.catch(() => this.inflight.delete(hash)); // failed lookups may retry
    return promise;
  }

  /** Pre-registers hashes (for batch dispatch); returns resolvers for the
   * hashes that were not already known. */
  register(hashes: string[]): Map<string, {
    resolve: (value: DetectResponse) => void;
    reject: (reason: Error) => void;
  }> {
    const fresh = new Map<string, {
      resolve: (value: DetectResponse) => void;
      reject: (reason: Error) => void;
    }>();
    for (const hash of hashes) {
      if (this.inflight.has(hash) || fresh.has(hash)) continue;
      let resolve!: (value: DetectResponse) => void;
      let reject!: (reason: Error) => void;
      const promise = new Promise<DetectResponse>((res, rej) => {
        resolve = res;
        reject = rej;
      });
      promise.catch(() => this.inflight.delete(hash));
      this.inflight.set(hash, promise);
      fresh.set(hash, { resolve, reject });
    }
    return fresh;
  }

  lookup(hash: string): Promise<DetectResponse> | undefined {
    return this.inflight.get(hash);
  }

  get size(): number {
    return this.inflight.size;
  }

  clear(): void {
    this.inflight.clear();
  }
}
