export interface PoseJson {
  rotation: number[];
  translation: number[];
  convention: string;
}

export interface BundleMetadata {
  pano_width: number;
  pano_height: number;
  depth_scale_mm: number;
  h_floor: number;
  virtual_pose: PoseJson;
  station_id: string;
  depth_path: string;
  rgb_path: string;
}

export interface DepthImage {
  width: number;
  height: number;
  /** raw 16-bit samples; meters = raw * scaleMm / 1000 */
  data: Uint16Array;
  scaleMm: number;
}

export interface MeasuredSegment {
  index: number;
  p1: [number, number];
  p2: [number, number];
  d1: number;
  d2: number;
  lengthM: number;
}
