/** Pan/zoom over the flat equirectangular raster.
 *
 * Flat display was chosen over spherical WebGL rendering: measurement needs
 * pixel-exact click targeting more than immersion. Screen x maps to pano u
 * by u = originU + x / zoom (same for rows).
 */
export class Viewport {
  zoom = 1;
  originU = 0;
  originV = 0;

  constructor(readonly panoWidth: number, readonly panoHeight: number) {}

  screenToPano(x: number, y: number): [number, number] {
    return [this.originU + x / this.zoom, this.originV + y / this.zoom];
  }

  panoToScreen(u: number, v: number): [number, number] {
    return [(u - this.originU) * this.zoom, (v - this.originV) * this.zoom];
  }

  /** Zoom by `factor` keeping the pano point under (x, y) fixed on screen. */
  zoomAt(x: number, y: number, factor: number): void {
    const [u, v] = this.screenToPano(x, y);
    this.zoom = Math.min(Math.max(this.zoom * factor, 0.1), 64);
    this.originU = u - x / this.zoom;
    this.originV = v - y / this.zoom;
  }

  panBy(dxScreen: number, dyScreen: number): void {
    this.originU -= dxScreen / this.zoom;
    this.originV -= dyScreen / this.zoom;
  }

  /** Keep the view inside the raster vertically and wrapped horizontally. */
  clamp(viewWidth: number, viewHeight: number): void {
    const spanV = viewHeight / this.zoom;
    this.originV = Math.min(Math.max(this.originV, -spanV * 0.25),
                            this.panoHeight - spanV * 0.75);
    this.originU = ((this.originU % this.panoWidth) + this.panoWidth) % this.panoWidth;
  }
}
