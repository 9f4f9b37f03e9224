/** Frame-sequence playback by image swapping, with labelled A/B sources.
 * Toggling a source keeps the current frame and playback position; only
 * the URL generator changes, so no player reload happens. */

export type FrameUrl = (frameIndex: number) => string;

export class FramePlayer {
  private sources = new Map<string, FrameUrl>();
  private active: string | null = null;
  private frame = 1;
  private frameCount = 0;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private img: HTMLImageElement,
    private fps = 30,
  ) {}

  addSource(label: string, urlFor: FrameUrl): void {
    this.sources.set(label, urlFor);
    if (this.active === null) {
      this.active = label;
      this.refresh();
    }
  }

  setFrameCount(count: number): void {
    this.frameCount = count;
    if (this.frame > count) this.frame = 1;
  }

  get activeSource(): string | null {
    return this.active;
  }

  get currentFrame(): number {
    return this.frame;
  }

  get playing(): boolean {
    return this.timer !== null;
  }

  /** Swap which labelled source feeds the img element. */
  toggle(label: string): void {
    if (!this.sources.has(label) || label === this.active) return;
    this.active = label;
    this.refresh();
  }

  seek(frameIndex: number): void {
    if (this.frameCount === 0) return;
    this.frame = Math.min(this.frameCount, Math.max(1, frameIndex));
    this.refresh();
  }

  play(): void {
    if (this.timer !== null || this.frameCount === 0) return;
    this.timer = setInterval(() => {
      this.frame = this.frame >= this.frameCount ? 1 : this.frame + 1;
      this.refresh();
    }, 1000 / this.fps);
  }

  pause(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  private refresh(): void {
    if (this.active === null) return;
    const urlFor = this.sources.get(this.active);
    if (urlFor) this.img.src = urlFor(this.frame);
  }
}
