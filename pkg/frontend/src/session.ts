import { decodePng16Gray } from './png16.js';
import { segmentLength } from './pano.js';
import type { BundleMetadata, DepthImage, MeasuredSegment } from './types.js';

const REQUIRED_META = ['pano_width', 'pano_height', 'depth_scale_mm',
                       'depth_path', 'rgb_path', 'station_id'] as const;

export function parseMetadata(doc: unknown): BundleMetadata {
  const meta = doc as Record<string, unknown>;
  for (const key of REQUIRED_META) {
    if (!(key in meta)) throw new Error(`metadata lacks field "${key}"`);
  }
  if ((meta.pano_width as number) !== 2 * (meta.pano_height as number)) {
    throw new Error('panorama width must be twice the height');
  }
  return doc as BundleMetadata;
}

/** Measurement state over one pano bundle; drawing lives elsewhere. */
export class MeasureSession {
  readonly meta: BundleMetadata;
  readonly depth: DepthImage;
  readonly measurements: MeasuredSegment[] = [];
  private nextIndex = 1;

  constructor(meta: BundleMetadata, depth: DepthImage) {
    if (depth.width !== meta.pano_width || depth.height !== meta.pano_height) {
      throw new Error(
        `depth raster ${depth.width}x${depth.height} does not match metadata ` +
        `${meta.pano_width}x${meta.pano_height}`);
    }
    this.meta = meta;
    this.depth = depth;
  }

  static async fromParts(metaDoc: unknown, depthPng: ArrayBuffer): Promise<MeasureSession> {
    const meta = parseMetadata(metaDoc);
    const png = await decodePng16Gray(depthPng);
    return new MeasureSession(meta, {
      width: png.width, height: png.height, data: png.data,
      scaleMm: meta.depth_scale_mm,
    });
  }

  /** Nearest-neighbor depth in meters at a continuous pano pixel; 0 = invalid. */
  depthAt(u: number, v: number): number {
    const { width, height } = this.depth;
    let ui = Math.floor(u + 0.5) % width;
    if (ui < 0) ui += width;
    const vi = Math.min(Math.max(Math.floor(v + 0.5), 0), height - 1);
    return (this.depth.data[vi * width + ui] * this.depth.scaleMm) / 1000;
  }

  /** Measure between two pano pixels; throws if either has no valid depth. */
  clickMeasure(p1: [number, number], p2: [number, number]): MeasuredSegment {
    const d1 = this.depthAt(p1[0], p1[1]);
    if (d1 <= 0) throw new Error(`pixel (${p1[0]}, ${p1[1]}) has no valid depth`);
    const d2 = this.depthAt(p2[0], p2[1]);
    if (d2 <= 0) throw new Error(`pixel (${p2[0]}, ${p2[1]}) has no valid depth`);
    const seg: MeasuredSegment = {
      index: this.nextIndex++,
      p1: [p1[0], p1[1]], p2: [p2[0], p2[1]],
      d1, d2,
      lengthM: segmentLength(p1, d1, p2, d2, this.meta.pano_width, this.meta.pano_height),
    };
    this.measurements.push(seg);
    return seg;
  }

  remove(index: number): void {
    const at = this.measurements.findIndex((m) => m.index === index);
    if (at >= 0) this.measurements.splice(at, 1);
  }

  exportJson(): string {
    return JSON.stringify({
      station_id: this.meta.station_id,
      measurements: this.measurements.map((m) => ({
        index: m.index, p1: m.p1, p2: m.p2, length_m: m.lengthM,
      })),
    }, null, 2);
  }
}

/** Browser entry point: fetch the metadata and the depth PNG it references. */
export async function loadBundle(metaUrl: string): Promise<MeasureSession> {
  const metaResp = await fetch(metaUrl);
  if (!metaResp.ok) throw new Error(`failed to fetch ${metaUrl}: ${metaResp.status}`);
  const meta = parseMetadata(await metaResp.json());
  const base = new URL(metaUrl, window.location.href);
  const depthResp = await fetch(new URL(meta.depth_path, base));
  if (!depthResp.ok) throw new Error(`failed to fetch depth PNG: ${depthResp.status}`);
  return MeasureSession.fromParts(meta, await depthResp.arrayBuffer());
}
