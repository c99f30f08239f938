/**
 * Minimal decoder for 16-bit grayscale PNGs.
 *
 * Canvas decoding collapses PNGs to 8 bits per channel, which silently
 * destroys millimeter depth precision, so the depth raster is decoded by
 * hand: chunk walk, zlib inflate via DecompressionStream, per-scanline
 * unfiltering, big-endian 16-bit samples. Anything that is not a 16-bit
 * grayscale non-interlaced PNG is rejected (format contract).
 */

const PNG_SIGNATURE = [0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a];

export interface Png16 {
  width: number;
  height: number;
  data: Uint16Array;
}

async function inflate(parts: Uint8Array[]): Promise<Uint8Array> {
  const ds = new DecompressionStream('deflate');
  const blob = new Blob(parts as BlobPart[]);
  const out = await new Response(blob.stream().pipeThrough(ds)).arrayBuffer();
  return new Uint8Array(out);
}

function paeth(a: number, b: number, c: number): number {
  const p = a + b - c;
  const pa = Math.abs(p - a);
  const pb = Math.abs(p - b);
  const pc = Math.abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

export async function decodePng16Gray(buffer: ArrayBuffer): Promise<Png16> {
  const bytes = new Uint8Array(buffer);
  if (bytes.length < 8 || PNG_SIGNATURE.some((v, i) => bytes[i] !== v)) {
    throw new Error('not a PNG file');
  }
  const view = new DataView(buffer);
  let offset = 8;
  let width = 0;
  let height = 0;
  let seenHeader = false;
  const idat: Uint8Array[] = [];
  while (offset + 8 <= bytes.length) {
    const length = view.getUint32(offset);
    const type = String.fromCharCode(...bytes.subarray(offset + 4, offset + 8));
    const dataStart = offset + 8;
    if (type === 'IHDR') {
      width = view.getUint32(dataStart);
      height = view.getUint32(dataStart + 4);
      const bitDepth = bytes[dataStart + 8];
      const colorType = bytes[dataStart + 9];
      const interlace = bytes[dataStart + 12];
      if (bitDepth !== 16 || colorType !== 0) {
        throw new Error(
          `expected 16-bit grayscale PNG, got bit depth ${bitDepth}, color type ${colorType}`);
      }
      if (interlace !== 0) throw new Error('interlaced PNGs are not supported');
      seenHeader = true;
    } else if (type === 'IDAT') {
      idat.push(bytes.subarray(dataStart, dataStart + length));
    } else if (type === 'IEND') {
      break;
    }
    offset = dataStart + length + 4; // skip CRC
  }
  if (!seenHeader || width === 0 || height === 0) throw new Error('PNG missing IHDR');
  if (!idat.length) throw new Error('PNG missing IDAT');

  const raw = await inflate(idat);
  const bpp = 2; // one 16-bit gray sample
  const stride = width * bpp;
  if (raw.length < height * (stride + 1)) throw new Error('PNG data truncated');

  const scanlines = new Uint8Array(height * stride);
  let prev = new Uint8Array(stride);
  for (let y = 0; y < height; y++) {
    const filter = raw[y * (stride + 1)];
    const line = raw.subarray(y * (stride + 1) + 1, (y + 1) * (stride + 1));
    const cur = scanlines.subarray(y * stride, (y + 1) * stride);
    switch (filter) {
      case 0:
        cur.set(line);
        break;
      case 1:
        for (let i = 0; i < stride; i++) {
          cur[i] = (line[i] + (i >= bpp ? cur[i - bpp] : 0)) & 0xff;
        }
        break;
      case 2:
        for (let i = 0; i < stride; i++) {
          cur[i] = (line[i] + prev[i]) & 0xff;
        }
        break;
      case 3:
        for (let i = 0; i < stride; i++) {
          const left = i >= bpp ? cur[i - bpp] : 0;
          cur[i] = (line[i] + ((left + prev[i]) >> 1)) & 0xff;
        }
        break;
      case 4:
        for (let i = 0; i < stride; i++) {
          const left = i >= bpp ? cur[i - bpp] : 0;
          const upLeft = i >= bpp ? prev[i - bpp] : 0;
          cur[i] = (line[i] + paeth(left, prev[i], upLeft)) & 0xff;
        }
        break;
      default:
        throw new Error(`unknown PNG filter type ${filter}`);
    }
    prev = cur;
  }

  const data = new Uint16Array(width * height);
  for (let i = 0; i < data.length; i++) {
    data[i] = (scanlines[2 * i] << 8) | scanlines[2 * i + 1];
  }
  return { width, height, data };
}
