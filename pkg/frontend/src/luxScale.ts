/** Log-scale mapping for the lux slider. Studied lighting conditions span
 * two orders of magnitude, so the slider works in log10 space. */

export const LUX_MIN = 50;
export const LUX_MAX = 20000;

/** The studied lighting levels, marked as slider ticks. */
export const LUX_TICKS = [100, 250, 500, 10000];

export function clampLux(lux: number): number {
  if (!Number.isFinite(lux)) return LUX_MIN;
  return Math.min(LUX_MAX, Math.max(LUX_MIN, lux));
}

/** Slider position in [0, 1] -> lux. */
export function sliderToLux(t: number): number {
  const clamped = Math.min(1, Math.max(0, t));
  const logLux = Math.log10(LUX_MIN) + clamped * (Math.log10(LUX_MAX) - Math.log10(LUX_MIN));
  return clampLux(Math.round(10 ** logLux));
}

/** Lux -> slider position in [0, 1]. */
export function luxToSlider(lux: number): number {
  const clamped = clampLux(lux);
  return (
    (Math.log10(clamped) - Math.log10(LUX_MIN)) / (Math.log10(LUX_MAX) - Math.log10(LUX_MIN))
  );
}
