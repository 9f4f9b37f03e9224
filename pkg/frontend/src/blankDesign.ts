/** Generate a fully transparent PNG at a given canvas size, without any
 * canvas or encoder dependency.
 *
 * The tint-only side of the A/B comparison is rendered by the service
 * from a design whose alpha is zero everywhere (alpha 0 contributes no
 * display light, leaving exactly the tinted background). Building that
 * PNG here keeps every displayed pixel server-rendered.
 *
 * The encoder emits stored (uncompressed) deflate blocks, which is fine
 * for the small canvases uploaded here.
 */

const PNG_SIGNATURE = [0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a];

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

export function crc32(bytes: Uint8Array): number {
  let crc = 0xffffffff;
  for (const byte of bytes) {
    crc = CRC_TABLE[(crc ^ byte) & 0xff] ^ (crc >>> 8);
  }
  return (crc ^ 0xffffffff) >>> 0;
}

export function adler32(bytes: Uint8Array): number {
  let a = 1;
  let b = 0;
  for (const byte of bytes) {
    a = (a + byte) % 65521;
    b = (b + a) % 65521;
  }
  return ((b << 16) | a) >>> 0;
}

function be32(value: number): number[] {
  return [(value >>> 24) & 0xff, (value >>> 16) & 0xff, (value >>> 8) & 0xff, value & 0xff];
}

function chunk(type: string, data: Uint8Array): Uint8Array {
  const typeBytes = new TextEncoder().encode(type);
  const body = new Uint8Array(typeBytes.length + data.length);
  body.set(typeBytes);
  body.set(data, typeBytes.length);
  const out = new Uint8Array(4 + body.length + 4);
  out.set(be32(data.length));
  out.set(body, 4);
  out.set(be32(crc32(body)), 4 + body.length);
  return out;
}

/** Raw scanlines -> zlib stream of stored deflate blocks. */
function zlibStored(raw: Uint8Array): Uint8Array {
  const blocks: number[] = [0x78, 0x01]; // zlib header, no preset dict
  const maxBlock = 65535;
  for (let offset = 0; offset < raw.length || offset === 0; offset += maxBlock) {
    const len = Math.min(maxBlock, raw.length - offset);
    const final = offset + len >= raw.length ? 1 : 0;
    blocks.push(final, len & 0xff, (len >>> 8) & 0xff, ~len & 0xff, (~len >>> 8) & 0xff);
    for (let i = 0; i < len; i++) blocks.push(raw[offset + i]);
    if (final) break;
  }
  const adler = adler32(raw);
  blocks.push(...be32(adler));
  return new Uint8Array(blocks);
}

export function transparentPngBytes(width: number, height: number): Uint8Array {
  if (width <= 0 || height <= 0) throw new Error(`invalid canvas size ${width}x${height}`);
  const ihdr = new Uint8Array([
    ...be32(width),
    ...be32(height),
    8, // bit depth
    6, // color type RGBA
    0, // compression
    0, // filter
    0, // interlace
  ]);
  // each scanline: filter byte 0 + width RGBA pixels, all zero
  const raw = new Uint8Array(height * (1 + width * 4));
  const idat = zlibStored(raw);
  const parts = [
    new Uint8Array(PNG_SIGNATURE),
    chunk('IHDR', ihdr),
    chunk('IDAT', idat),
    chunk('IEND', new Uint8Array(0)),
  ];
  const total = parts.reduce((n, p) => n + p.length, 0);
  const out = new Uint8Array(total);
  let offset = 0;
  for (const part of parts) {
    out.set(part, offset);
    offset += part.length;
  }
  return out;
}

/** Scale the HMD canvas down (same aspect) so uploads stay small; the
 * service resamples designs to the overlay rect anyway. */
export function blankCanvasSize(
  displayResolution: [number, number],
  maxDim = 360,
): [number, number] {
  const [w, h] = displayResolution;
  const scale = Math.min(1, maxDim / Math.max(w, h));
  return [Math.max(1, Math.round(w * scale)), Math.max(1, Math.round(h * scale))];
}

export function transparentDesignBlob(displayResolution: [number, number]): Blob {
  const [w, h] = blankCanvasSize(displayResolution);
  const bytes = transparentPngBytes(w, h);
  return new Blob([bytes.buffer as ArrayBuffer], { type: 'image/png' });
}
