import { renderOverlay } from './overlay.js';
import { loadBundle, MeasureSession } from './session.js';
import { Viewport } from './view.js';

const canvas = document.getElementById('pano') as HTMLCanvasElement;
const ctx = canvas.getContext('2d')!;
const statusEl = document.getElementById('status')!;
const listEl = document.getElementById('measurements')!;
const urlInput = document.getElementById('bundle-url') as HTMLInputElement;

let session: MeasureSession | null = null;
let panoImage: HTMLImageElement | null = null;
let vp: Viewport | null = null;
let pending: [number, number] | null = null;
let hover: { u: number; v: number; depthM: number } | null = null;
let dragging = false;
let moved = false;
let last: [number, number] = [0, 0];

function setStatus(text: string, isError = false) {
  statusEl.textContent = text;
  statusEl.className = isError ? 'error' : '';
}

function redraw() {
  if (!session || !panoImage || !vp) return;
  renderOverlay(ctx, panoImage, session.meta.pano_width, session.meta.pano_height,
                vp, session.measurements, pending, hover);
}

function refreshList() {
  if (!session) return;
  listEl.innerHTML = '';
  for (const m of session.measurements) {
    const li = document.createElement('li');
    li.textContent = `#${m.index}: ${m.lengthM.toFixed(3)} m `;
    const del = document.createElement('button');
    del.textContent = 'delete';
    del.addEventListener('click', () => {
      session!.remove(m.index);
      refreshList();
      redraw();
    });
    li.appendChild(del);
    listEl.appendChild(li);
  }
}

async function load(url: string) {
  try {
    setStatus('loading bundle...');
    session = await loadBundle(url);
    panoImage = new Image();
    const rgbUrl = new URL(session.meta.rgb_path, new URL(url, window.location.href));
    await new Promise<void>((resolve, reject) => {
      panoImage!.onload = () => resolve();
      panoImage!.onerror = () => reject(new Error(`failed to load ${rgbUrl}`));
      panoImage!.src = rgbUrl.toString();
    });
    if (panoImage.naturalWidth !== session.meta.pano_width ||
        panoImage.naturalHeight !== session.meta.pano_height) {
      throw new Error('RGB panorama size does not match the metadata');
    }
    vp = new Viewport(session.meta.pano_width, session.meta.pano_height);
    vp.zoom = canvas.width / session.meta.pano_width;
    pending = null;
    refreshList();
    redraw();
    setStatus(`loaded ${session.meta.station_id} ` +
              `(${session.meta.pano_width}x${session.meta.pano_height})`);
  } catch (err) {
    session = null;
    setStatus(err instanceof Error ? err.message : String(err), true);
  }
}

canvas.addEventListener('mousedown', (ev) => {
  dragging = true;
  moved = false;
  last = [ev.offsetX, ev.offsetY];
});

canvas.addEventListener('mousemove', (ev) => {
  if (!session || !vp) return;
  if (dragging) {
    const dx = ev.offsetX - last[0];
    const dy = ev.offsetY - last[1];
    if (Math.abs(dx) + Math.abs(dy) > 2) moved = true;
    vp.panBy(dx, dy);
    vp.clamp(canvas.width, canvas.height);
    last = [ev.offsetX, ev.offsetY];
  }
  const [u, v] = vp.screenToPano(ev.offsetX, ev.offsetY);
  hover = { u, v, depthM: session.depthAt(u, v) };
  redraw();
});

canvas.addEventListener('mouseup', (ev) => {
  dragging = false;
  if (moved || !session || !vp) return;
  const p = vp.screenToPano(ev.offsetX, ev.offsetY) as [number, number];
  try {
    if (!pending) {
      if (session.depthAt(p[0], p[1]) <= 0) {
        throw new Error('no depth at this pixel');
      }
      pending = p;
    } else {
      const seg = session.clickMeasure(pending, p);
      pending = null;
      setStatus(`#${seg.index}: ${seg.lengthM.toFixed(3)} m`);
      refreshList();
    }
  } catch (err) {
    pending = null;
    setStatus(err instanceof Error ? err.message : String(err), true);
  }
  redraw();
});

canvas.addEventListener('wheel', (ev) => {
  if (!vp) return;
  ev.preventDefault();
  vp.zoomAt(ev.offsetX, ev.offsetY, ev.deltaY < 0 ? 1.25 : 0.8);
  vp.clamp(canvas.width, canvas.height);
  redraw();
}, { passive: false });

document.getElementById('load-btn')!.addEventListener('click', () => load(urlInput.value));
document.getElementById('export-btn')!.addEventListener('click', () => {
  if (!session) return;
  const blob = new Blob([session.exportJson()], { type: 'application/json' });
  const a = document.createElement('a');
  a.href = URL.createObjectURL(blob);
  a.download = `${session.meta.station_id}_measurements.json`;
  a.click();
  URL.revokeObjectURL(a.href);
});

if (urlInput.value) void load(urlInput.value);
