/** Typed client for the simulatar service API. All rendering happens
 * server-side; this module only moves bytes. */

export interface ContextInfo {
  id: string;
  location: string;
  mobility: string;
  lighting_lux: number;
  lighting_class: string;
  camera: string;
  frames: number;
  thumbnail: string;
}

export interface HmdProfileInfo {
  display_resolution: [number, number];
  diagonal_fov_deg: number;
  transmittance: number;
  contrast_curve: [number, number][];
  opacity_curve: [number, number][];
  optics_label: string;
  display_label: string;
}

export interface CameraProfileInfo {
  frame_resolution: [number, number];
  diagonal_fov_deg: number;
  fps: number;
  projection: string;
}

export interface ProfileListing {
  hmd_profiles: Record<string, HmdProfileInfo>;
  camera_profiles: Record<string, CameraProfileInfo>;
}

export interface JobProgress {
  done: number;
  total: number;
}

export interface JobRecord {
  id: string;
  state: 'queued' | 'running' | 'done' | 'failed';
  progress: JobProgress;
  error: string | null;
  spec: Record<string, unknown>;
  frames_url?: string;
  video_url?: string;
}

export interface BlendSpec {
  context_id: string;
  profile_id: string;
  design_id: string;
  lux: number;
  mode?: string;
  tint_extent?: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function fail(response: Response): Promise<never> {
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body.detail === 'string') detail = body.detail;
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(response.status, detail);
}

export class ApiClient {
  constructor(private base = '') {}

  private url(path: string): string {
    return this.base + path;
  }

  async listContexts(): Promise<ContextInfo[]> {
    const response = await fetch(this.url('/api/contexts'));
    if (!response.ok) return fail(response);
    return response.json();
  }

  async listProfiles(): Promise<ProfileListing> {
    const response = await fetch(this.url('/api/profiles'));
    if (!response.ok) return fail(response);
    return response.json();
  }

  async uploadDesign(blob: Blob, filename = 'design.png'): Promise<string> {
    const form = new FormData();
    form.append('file', blob, filename);
    const response = await fetch(this.url('/api/designs'), { method: 'POST', body: form });
    if (!response.ok) return fail(response);
    const body = await response.json();
    return body.id;
  }

  async createJob(spec: BlendSpec): Promise<string> {
    const response = await fetch(this.url('/api/jobs'), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(spec),
    });
    if (!response.ok) return fail(response);
    const body = await response.json();
    return body.id;
  }

  async getJob(jobId: string): Promise<JobRecord> {
    const response = await fetch(this.url(`/api/jobs/${jobId}`));
    if (!response.ok) return fail(response);
    return response.json();
  }

  async preview(spec: BlendSpec & { frame_index: number }, signal?: AbortSignal): Promise<Blob> {
    const response = await fetch(this.url('/api/preview'), {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(spec),
      signal,
    });
    if (!response.ok) return fail(response);
    return response.blob();
  }

  jobFrameUrl(jobId: string, frameIndex: number): string {
    return this.url(`/api/jobs/${jobId}/frames/${frameIndex}.png`);
  }

  /** Poll a job until done or failed; throws ApiError on failure state. */
  async waitForJob(
    jobId: string,
    onProgress?: (job: JobRecord) => void,
    intervalMs = 500,
  ): Promise<JobRecord> {
    for (;;) {
      const job = await this.getJob(jobId);
      onProgress?.(job);
      if (job.state === 'done') return job;
      if (job.state === 'failed') throw new ApiError(500, job.error ?? 'job failed');
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }
}
