import { wrapSplit } from './pano.js';
import type { MeasuredSegment } from './types.js';
import type { Viewport } from './view.js';

const LINE_COLOR = '#ff3333';
const LABEL_BG = 'rgba(0, 0, 0, 0.65)';

function drawEndpoint(ctx: CanvasRenderingContext2D, x: number, y: number, label: string) {
  ctx.beginPath();
  ctx.arc(x, y, 4, 0, 2 * Math.PI);
  ctx.fillStyle = LINE_COLOR;
  ctx.fill();
  ctx.fillStyle = LABEL_BG;
  ctx.fillRect(x + 6, y - 16, 18, 14);
  ctx.fillStyle = '#fff';
  ctx.fillText(label, x + 9, y - 5);
}

/** Draw the pano, every stored segment (wrap-aware) and the live readout. */
export function renderOverlay(
  ctx: CanvasRenderingContext2D,
  pano: CanvasImageSource,
  panoWidth: number,
  panoHeight: number,
  vp: Viewport,
  measurements: MeasuredSegment[],
  pending: [number, number] | null,
  hover: { u: number; v: number; depthM: number } | null,
): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.imageSmoothingEnabled = vp.zoom < 1;
  // three copies cover horizontal wrap at any pan position
  for (const shift of [-panoWidth, 0, panoWidth]) {
    const [sx, sy] = vp.panoToScreen(shift, 0);
    ctx.drawImage(pano, sx, sy, panoWidth * vp.zoom, panoHeight * vp.zoom);
  }

  ctx.font = '12px sans-serif';
  ctx.lineWidth = 2;
  for (const seg of measurements) {
    for (const [a, b] of wrapSplit(seg.p1, seg.p2, panoWidth)) {
      const [ax, ay] = vp.panoToScreen(a[0], a[1]);
      const [bx, by] = vp.panoToScreen(b[0], b[1]);
      ctx.strokeStyle = LINE_COLOR;
      ctx.beginPath();
      ctx.moveTo(ax, ay);
      ctx.lineTo(bx, by);
      ctx.stroke();
    }
    const [x1, y1] = vp.panoToScreen(seg.p1[0], seg.p1[1]);
    const [x2, y2] = vp.panoToScreen(seg.p2[0], seg.p2[1]);
    drawEndpoint(ctx, x1, y1, String(2 * seg.index - 1));
    drawEndpoint(ctx, x2, y2, String(2 * seg.index));
    const label = `${seg.lengthM.toFixed(3)} m`;
    const mx = (x1 + x2) / 2;
    const my = (y1 + y2) / 2;
    ctx.fillStyle = LABEL_BG;
    ctx.fillRect(mx + 4, my - 18, ctx.measureText(label).width + 8, 16);
    ctx.fillStyle = '#fff';
    ctx.fillText(label, mx + 8, my - 6);
  }

  if (pending) {
    const [px, py] = vp.panoToScreen(pending[0], pending[1]);
    drawEndpoint(ctx, px, py, '*');
  }

  if (hover) {
    const text = hover.depthM > 0
      ? `u ${hover.u.toFixed(1)}  v ${hover.v.toFixed(1)}  depth ${hover.depthM.toFixed(3)} m`
      : `u ${hover.u.toFixed(1)}  v ${hover.v.toFixed(1)}  depth: none`;
    ctx.fillStyle = LABEL_BG;
    ctx.fillRect(8, height - 28, ctx.measureText(text).width + 12, 20);
    ctx.fillStyle = '#fff';
    ctx.fillText(text, 14, height - 14);
  }
}
