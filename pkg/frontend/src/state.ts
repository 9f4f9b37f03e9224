/** Session state, round-tripped through URL query params so a session is
 * shareable and reloadable. */

import { clampLux } from './luxScale';

export type BlendModeName = 'additive' | 'alpha_over';
export type TintExtentName = 'full_frame' | 'overlay_rect_only';

export interface SessionState {
  contextId: string | null;
  profileId: string | null;
  designId: string | null;
  lux: number;
  mode: BlendModeName;
  tintExtent: TintExtentName;
  frameIndex: number;
  jobIds: string[];
}

export const DEFAULT_STATE: SessionState = {
  contextId: null,
  profileId: null,
  designId: null,
  lux: 250,
  mode: 'additive',
  tintExtent: 'full_frame',
  frameIndex: 1,
  jobIds: [],
};

/** Preview requests may only go out once every required selection exists. */
export function readyForPreview(state: SessionState): boolean {
  return state.contextId !== null && state.profileId !== null && state.designId !== null;
}

export function encodeState(state: SessionState): URLSearchParams {
  const params = new URLSearchParams();
  if (state.contextId) params.set('context', state.contextId);
  if (state.profileId) params.set('profile', state.profileId);
  if (state.designId) params.set('design', state.designId);
  params.set('lux', String(state.lux));
  if (state.mode !== DEFAULT_STATE.mode) params.set('mode', state.mode);
  if (state.tintExtent !== DEFAULT_STATE.tintExtent) params.set('tint', state.tintExtent);
  if (state.frameIndex !== 1) params.set('frame', String(state.frameIndex));
  if (state.jobIds.length > 0) params.set('jobs', state.jobIds.join(','));
  return params;
}

export function decodeState(params: URLSearchParams): SessionState {
  const mode = params.get('mode');
  const tint = params.get('tint');
  const frame = Number(params.get('frame') ?? '1');
  return {
    contextId: params.get('context'),
    profileId: params.get('profile'),
    designId: params.get('design'),
    lux: clampLux(Number(params.get('lux') ?? DEFAULT_STATE.lux)),
    mode: mode === 'alpha_over' ? 'alpha_over' : 'additive',
    tintExtent: tint === 'overlay_rect_only' ? 'overlay_rect_only' : 'full_frame',
    frameIndex: Number.isInteger(frame) && frame >= 1 ? frame : 1,
    jobIds: (params.get('jobs') ?? '').split(',').filter((s) => s.length > 0),
  };
}

/** Write state into the address bar without a navigation. */
export function pushStateToUrl(state: SessionState): void {
  const query = encodeState(state).toString();
  const url = query ? `${location.pathname}?${query}` : location.pathname;
  history.replaceState(null, '', url);
}

export function readStateFromUrl(): SessionState {
  return decodeState(new URLSearchParams(location.search));
}
