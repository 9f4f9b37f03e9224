import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { FramePlayer } from '../src/player';

describe('frame player with A/B sources', () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  function makePlayer(fps = 10) {
    const img = document.createElement('img');
    const player = new FramePlayer(img, fps);
    player.addSource('blended', (n) => `/api/jobs/blend1/frames/${n}.png`);
    player.addSource('tint-only', (n) => `/api/jobs/tint1/frames/${n}.png`);
    player.setFrameCount(10);
    return { img, player };
  }

  it('shows the first source immediately', () => {
    const { img, player } = makePlayer();
    expect(player.activeSource).toBe('blended');
    expect(img.src).toContain('/api/jobs/blend1/frames/1.png');
  });

  it('toggle swaps the source without resetting the frame', () => {
    const { img, player } = makePlayer();
    player.seek(7);
    expect(img.src).toContain('blend1/frames/7.png');
    player.toggle('tint-only');
    expect(img.src).toContain('tint1/frames/7.png');
    expect(player.currentFrame).toBe(7);
    player.toggle('blended');
    expect(img.src).toContain('blend1/frames/7.png');
  });

  it('toggle keeps playback running', () => {
    const { player } = makePlayer();
    player.play();
    expect(player.playing).toBe(true);
    player.toggle('tint-only');
    expect(player.playing).toBe(true);
  });

  it('does not recreate the image element on toggle', () => {
    const { img, player } = makePlayer();
    const before = img;
    player.toggle('tint-only');
    expect(img).toBe(before);
  });

  it('advances at the configured fps and wraps around', () => {
    const { img, player } = makePlayer(10); // 100ms per frame
    player.play();
    vi.advanceTimersByTime(350);
    expect(player.currentFrame).toBe(4);
    vi.advanceTimersByTime(700); // total 10 assignments -> wrapped to 1
    expect(player.currentFrame).toBe(1);
    expect(img.src).toContain('frames/1.png');
  });

  it('pause stops frame advancement', () => {
    const { player } = makePlayer(10);
    player.play();
    vi.advanceTimersByTime(200);
    player.pause();
    const frame = player.currentFrame;
    vi.advanceTimersByTime(500);
    expect(player.currentFrame).toBe(frame);
  });

  it('seek clamps to the frame range', () => {
    const { player } = makePlayer();
    player.seek(99);
    expect(player.currentFrame).toBe(10);
    player.seek(-5);
    expect(player.currentFrame).toBe(1);
  });
});
