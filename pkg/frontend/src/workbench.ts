/** Blend workbench: upload, profile pick, lux slider, mode toggle, live
 * preview, and the job runner with A/B playback. Control logic lives in
 * the tested modules (state, luxScale, preview, player); this file wires
 * them to the DOM. */

import { ApiClient, ApiError, ContextInfo, ProfileListing } from './api';
import { transparentDesignBlob } from './blankDesign';
import { LUX_TICKS, luxToSlider, sliderToLux } from './luxScale';
import { FramePlayer } from './player';
import { PreviewScheduler } from './preview';
import {
  SessionState,
  pushStateToUrl,
  readyForPreview,
} from './state';

const SLIDER_STEPS = 1000;

export interface WorkbenchDeps {
  api: ApiClient;
  state: SessionState;
  contexts: ContextInfo[];
  profiles: ProfileListing;
}

export class Workbench {
  private scheduler: PreviewScheduler;
  player: FramePlayer | null = null;
  private previewUrl: string | null = null;
  private tintOnlyDesignByProfile = new Map<string, string>();

  constructor(
    private root: HTMLElement,
    private deps: WorkbenchDeps,
    private onStateChange: (state: SessionState) => void = pushStateToUrl,
  ) {
    this.scheduler = new PreviewScheduler(deps.api, {
      onResult: (blob) => this.showPreview(blob),
      onError: (error) => this.showInlineError(error),
    });
    this.render();
  }

  private get state(): SessionState {
    return this.deps.state;
  }

  private changed(): void {
    this.onStateChange(this.state);
    this.maybePreview();
  }

  private maybePreview(): void {
    if (!readyForPreview(this.state)) return;
    this.scheduler.request({
      context_id: this.state.contextId!,
      profile_id: this.state.profileId!,
      design_id: this.state.designId!,
      lux: this.state.lux,
      mode: this.state.mode,
      tint_extent: this.state.tintExtent,
      frame_index: this.state.frameIndex,
    });
  }

  private showPreview(blob: Blob): void {
    const img = this.root.querySelector<HTMLImageElement>('#preview-pane img');
    if (!img) return;
    if (this.previewUrl) URL.revokeObjectURL(this.previewUrl);
    this.previewUrl = URL.createObjectURL(blob);
    img.src = this.previewUrl;
    this.setStatus('');
  }

  private showInlineError(error: unknown): void {
    const message =
      error instanceof ApiError ? `${error.status}: ${error.detail}` : String(error);
    this.setStatus(message);
  }

  private setStatus(message: string): void {
    const el = this.root.querySelector<HTMLElement>('#workbench-status');
    if (el) el.textContent = message;
  }

  private render(): void {
    this.root.replaceChildren();

    const controls = document.createElement('div');
    controls.className = 'controls';

    // design upload
    const upload = document.createElement('input');
    upload.type = 'file';
    upload.accept = 'image/png';
    upload.addEventListener('change', async () => {
      const file = upload.files?.[0];
      if (!file) return;
      try {
        this.state.designId = await this.deps.api.uploadDesign(file, file.name);
        this.setStatus(`design uploaded (${this.state.designId})`);
        this.changed();
      } catch (error) {
        this.showInlineError(error); // 415/413 etc. surface inline
      }
    });
    controls.appendChild(labelled('Design PNG', upload));

    // profile selector
    const profileSelect = document.createElement('select');
    for (const profileId of Object.keys(this.deps.profiles.hmd_profiles)) {
      const option = document.createElement('option');
      option.value = profileId;
      option.textContent = profileId;
      profileSelect.appendChild(option);
    }
    if (this.state.profileId) profileSelect.value = this.state.profileId;
    else this.state.profileId = profileSelect.value || null;
    profileSelect.addEventListener('change', () => {
      this.state.profileId = profileSelect.value;
      this.changed();
    });
    controls.appendChild(labelled('Headset', profileSelect));

    // lux slider, log scale with ticks at the studied levels
    const slider = document.createElement('input');
    slider.type = 'range';
    slider.min = '0';
    slider.max = String(SLIDER_STEPS);
    slider.value = String(Math.round(luxToSlider(this.state.lux) * SLIDER_STEPS));
    slider.setAttribute('list', 'lux-ticks');
    const ticks = document.createElement('datalist');
    ticks.id = 'lux-ticks';
    for (const lux of LUX_TICKS) {
      const option = document.createElement('option');
      option.value = String(Math.round(luxToSlider(lux) * SLIDER_STEPS));
      option.label = `${lux} lux`;
      ticks.appendChild(option);
    }
    const luxValue = document.createElement('output');
    luxValue.textContent = `${this.state.lux} lux`;
    slider.addEventListener('input', () => {
      this.state.lux = sliderToLux(Number(slider.value) / SLIDER_STEPS);
      luxValue.textContent = `${this.state.lux} lux`;
      this.changed();
    });
    const sliderWrap = document.createElement('span');
    sliderWrap.append(slider, ticks, luxValue);
    controls.appendChild(labelled('Ambient light', sliderWrap));

    // blend mode toggle
    const modeToggle = document.createElement('button');
    modeToggle.type = 'button';
    modeToggle.textContent = `mode: ${this.state.mode}`;
    modeToggle.addEventListener('click', () => {
      this.state.mode = this.state.mode === 'additive' ? 'alpha_over' : 'additive';
      modeToggle.textContent = `mode: ${this.state.mode}`;
      this.changed();
    });
    controls.appendChild(modeToggle);

    // frame index scrubber for the preview
    const frameInput = document.createElement('input');
    frameInput.type = 'number';
    frameInput.min = '1';
    frameInput.value = String(this.state.frameIndex);
    frameInput.addEventListener('change', () => {
      this.state.frameIndex = Math.max(1, Number(frameInput.value) || 1);
      this.changed();
    });
    controls.appendChild(labelled('Preview frame', frameInput));

    this.root.appendChild(controls);

    const status = document.createElement('p');
    status.id = 'workbench-status';
    this.root.appendChild(status);

    const previewPane = document.createElement('figure');
    previewPane.id = 'preview-pane';
    previewPane.appendChild(document.createElement('img'));
    const caption = document.createElement('figcaption');
    caption.textContent = 'live preview (server-rendered)';
    previewPane.appendChild(caption);
    this.root.appendChild(previewPane);

    // job runner
    const runButton = document.createElement('button');
    runButton.type = 'button';
    runButton.id = 'run-job';
    runButton.textContent = 'Blend full clip';
    runButton.addEventListener('click', () => void this.runJob());
    this.root.appendChild(runButton);

    const results = document.createElement('div');
    results.id = 'results';
    this.root.appendChild(results);

    this.maybePreview();
  }

  /** Launch the blended job plus a tint-only twin for the A/B toggle. */
  private async runJob(): Promise<void> {
    if (!readyForPreview(this.state)) {
      this.setStatus('pick a context, headset, and design first');
      return;
    }
    const { api } = this.deps;
    const base = {
      context_id: this.state.contextId!,
      profile_id: this.state.profileId!,
      lux: this.state.lux,
      mode: this.state.mode,
      tint_extent: this.state.tintExtent,
    };
    try {
      const blendedId = await api.createJob({ ...base, design_id: this.state.designId! });
      const tintOnlyId = await api.createJob({
        ...base,
        design_id: await this.tintOnlyDesign(),
      });
      this.state.jobIds = [blendedId, tintOnlyId];
      this.onStateChange(this.state);
      this.setStatus('rendering…');
      const [blended] = await Promise.all([
        api.waitForJob(blendedId, (job) =>
          this.setStatus(`rendering ${job.progress.done}/${job.progress.total}`),
        ),
        api.waitForJob(tintOnlyId),
      ]);
      this.showResults(blendedId, tintOnlyId, blended.progress.total);
      this.setStatus('');
    } catch (error) {
      this.showInlineError(error);
    }
  }

  /** Upload (once per profile) the transparent canvas used as the
   * tint-only A side; alpha 0 renders to exactly the tinted background. */
  private async tintOnlyDesign(): Promise<string> {
    const profileId = this.state.profileId!;
    const cached = this.tintOnlyDesignByProfile.get(profileId);
    if (cached) return cached;
    const profile = this.deps.profiles.hmd_profiles[profileId];
    const blob = transparentDesignBlob(profile.display_resolution);
    const designId = await this.deps.api.uploadDesign(blob, 'tint-only.png');
    this.tintOnlyDesignByProfile.set(profileId, designId);
    return designId;
  }

  private showResults(blendedId: string, tintOnlyId: string, frameCount: number): void {
    const results = this.root.querySelector<HTMLElement>('#results');
    if (!results) return;
    results.replaceChildren();

    const img = document.createElement('img');
    img.id = 'player-frame';
    results.appendChild(img);

    const context = this.deps.contexts.find((c) => c.id === this.state.contextId);
    const camera = context ? this.deps.profiles.camera_profiles[context.camera] : undefined;
    const player = new FramePlayer(img, camera?.fps ?? 30);
    player.addSource('blended', (n) => this.deps.api.jobFrameUrl(blendedId, n));
    player.addSource('tint-only', (n) => this.deps.api.jobFrameUrl(tintOnlyId, n));
    player.setFrameCount(frameCount);
    this.player = player;

    const bar = document.createElement('div');
    bar.className = 'player-bar';
    const playButton = document.createElement('button');
    playButton.type = 'button';
    playButton.textContent = 'play';
    playButton.addEventListener('click', () => {
      if (player.playing) {
        player.pause();
        playButton.textContent = 'play';
      } else {
        player.play();
        playButton.textContent = 'pause';
      }
    });
    bar.appendChild(playButton);

    const abToggle = document.createElement('button');
    abToggle.type = 'button';
    abToggle.id = 'ab-toggle';
    abToggle.textContent = 'showing: blended';
    abToggle.addEventListener('click', () => {
      const next = player.activeSource === 'blended' ? 'tint-only' : 'blended';
      player.toggle(next);
      abToggle.textContent = `showing: ${next}`;
    });
    bar.appendChild(abToggle);
    results.appendChild(bar);
  }
}

function labelled(text: string, control: HTMLElement): HTMLLabelElement {
  const label = document.createElement('label');
  const span = document.createElement('span');
  span.textContent = text;
  label.append(span, control);
  return label;
}
