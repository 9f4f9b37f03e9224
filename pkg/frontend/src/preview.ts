/** Debounced preview requests: at most one request per interval, and a
 * newer request aborts any superseded in-flight one. */

import type { ApiClient, BlendSpec } from './api';

export type PreviewSpec = BlendSpec & { frame_index: number };

export interface PreviewCallbacks {
  onResult: (blob: Blob, spec: PreviewSpec) => void;
  onError: (error: unknown) => void;
}

export class PreviewScheduler {
  private latest: PreviewSpec | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private lastFiredAt = -Infinity;
  private inflight: AbortController | null = null;
  /** Total requests actually dispatched; used by tests and the debug HUD. */
  dispatched = 0;

  constructor(
    private api: Pick<ApiClient, 'preview'>,
    private callbacks: PreviewCallbacks,
    private intervalMs = 250,
    private now: () => number = () => Date.now(),
  ) {}

  /** Ask for a preview of `spec`; coalesces bursts onto the trailing edge. */
  request(spec: PreviewSpec): void {
    this.latest = spec;
    if (this.timer !== null) return; // a trailing fire is already scheduled
    const wait = Math.max(0, this.lastFiredAt + this.intervalMs - this.now());
    if (wait === 0) {
      this.fire();
    } else {
      this.timer = setTimeout(() => {
        this.timer = null;
        this.fire();
      }, wait);
    }
  }

  private fire(): void {
    const spec = this.latest;
    if (spec === null) return;
    this.latest = null;
    this.lastFiredAt = this.now();
    this.dispatched += 1;
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    this.api
      .preview(spec, controller.signal)
      .then((blob) => {
        if (!controller.signal.aborted) this.callbacks.onResult(blob, spec);
      })
      .catch((error: unknown) => {
        if (controller.signal.aborted) return; // superseded, not an error
        this.callbacks.onError(error);
      });
  }

  /** Cancel pending and in-flight work (e.g. when leaving the workbench). */
  cancel(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.latest = null;
    this.inflight?.abort();
    this.inflight = null;
  }
}
