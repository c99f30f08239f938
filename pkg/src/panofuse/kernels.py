"""Hot inner loops with numba and pure-NumPy backends.

Every public function here dispatches on :mod:`panofuse.accel`. The scatter
kernels have genuinely vectorized NumPy fallbacks; the irregular per-pixel
loops (guided fill, diffusion, directional fill) fall back to running the
same code uncompiled, which is slow but exact.
"""

from __future__ import annotations

import numpy as np

from . import accel
from .accel import prange


# ---------------------------------------------------------------------------
# scatter: minimum depth per pixel (occlusion rule)

@accel.dual()
def _scatter_min_loop(vi, ui, z, out):
    for i in range(vi.size):
        v = vi[i]
        u = ui[i]
        cur = out[v, u]
        if cur == 0.0 or z[i] < cur:
            out[v, u] = z[i]


def scatter_min_depth(vi, ui, z, shape):
    """Rasterize samples keeping the smallest value per pixel; 0 = no sample."""
    if accel.enabled():
        out = np.zeros(shape, dtype=np.float64)
        _scatter_min_loop(vi, ui, z, out)
        return out
    tmp = np.full(shape, np.inf)
    np.minimum.at(tmp, (vi, ui), z)
    return np.where(np.isinf(tmp), 0.0, tmp)


# ---------------------------------------------------------------------------
# scatter: sum + count per pixel (overlap averaging)

@accel.dual()
def _scatter_sum_count_loop(vi, ui, val, sums, counts):
    for i in range(vi.size):
        v = vi[i]
        u = ui[i]
        sums[v, u] += val[i]
        counts[v, u] += 1


def scatter_sum_count(vi, ui, val, sums, counts):
    if accel.enabled():
        _scatter_sum_count_loop(vi, ui, val, sums, counts)
    else:
        np.add.at(sums, (vi, ui), val)
        np.add.at(counts, (vi, ui), 1)


# ---------------------------------------------------------------------------
# guided fill of invalid depth pixels (adaptive joint bilateral weights)

@accel.dual(parallel=True)
def _guided_fill_loop(sparse, guide, ys, xs, vals, bucket_start, bucket_ids,
                      bsize, nby, nbx, k, max_radius, sigma_color, out):
    height, width = sparse.shape
    nchan = guide.shape[2]
    r2max = float(max_radius) * float(max_radius)
    inv_2sc2 = 1.0 / (2.0 * sigma_color * sigma_color)
    for y in prange(height):
        kbuf = np.empty(k, dtype=np.float64)
        for x in range(width):
            if sparse[y, x] > 0.0:
                continue
            by = y // bsize
            bx = x // bsize
            by0 = by - 1 if by > 0 else 0
            bx0 = bx - 1 if bx > 0 else 0
            by1 = by + 2 if by + 2 < nby else nby
            bx1 = bx + 2 if bx + 2 < nbx else nbx
            # pass 1: k smallest squared distances within the radius
            count = 0
            for byy in range(by0, by1):
                for bxx in range(bx0, bx1):
                    b = byy * nbx + bxx
                    for ii in range(bucket_start[b], bucket_start[b + 1]):
                        s = bucket_ids[ii]
                        dy = float(ys[s] - y)
                        dx = float(xs[s] - x)
                        d2 = dx * dx + dy * dy
                        if d2 > r2max:
                            continue
                        if count < k:
                            j = count
                            while j > 0 and kbuf[j - 1] > d2:
                                kbuf[j] = kbuf[j - 1]
                                j -= 1
                            kbuf[j] = d2
                            count += 1
                        elif d2 < kbuf[k - 1]:
                            j = k - 1
                            while j > 0 and kbuf[j - 1] > d2:
                                kbuf[j] = kbuf[j - 1]
                                j -= 1
                            kbuf[j] = d2
            if count == 0:
                continue
            kth = kbuf[count - 1] if count < k else kbuf[k - 1]
            sigma_s = 0.5 * np.sqrt(kth)
            inv_2ss2 = 1.0 / (2.0 * sigma_s * sigma_s)
            # pass 2: accumulate the normalized weighted average
            acc = 0.0
            wsum = 0.0
            for byy in range(by0, by1):
                for bxx in range(bx0, bx1):
                    b = byy * nbx + bxx
                    for ii in range(bucket_start[b], bucket_start[b + 1]):
                        s = bucket_ids[ii]
                        dy = float(ys[s] - y)
                        dx = float(xs[s] - x)
                        d2 = dx * dx + dy * dy
                        if d2 > r2max:
                            continue
                        c2 = 0.0
                        for c in range(nchan):
                            dc = guide[y, x, c] - guide[ys[s], xs[s], c]
                            c2 += dc * dc
                        w = np.exp(-d2 * inv_2ss2) * np.exp(-c2 * inv_2sc2)
                        acc += w * vals[s]
                        wsum += w
            if wsum > 0.0:
                out[y, x] = acc / wsum


def guided_fill(sparse, guide, k, max_radius, sigma_color):
    """Fill invalid pixels from valid samples within ``max_radius``.

    Weights combine a spatial Gaussian whose bandwidth adapts to the k-th
    nearest valid sample and a color Gaussian on the guide image. Valid
    pixels pass through untouched; pixels with no sample in range stay 0.
    """
    ys, xs = np.nonzero(sparse > 0)
    vals = sparse[ys, xs].astype(np.float64)
    height, width = sparse.shape
    bsize = int(max_radius)
    nby = (height + bsize - 1) // bsize
    nbx = (width + bsize - 1) // bsize
    bucket = (ys // bsize) * nbx + (xs // bsize)
    order = np.argsort(bucket, kind="stable")
    bucket_ids = order.astype(np.int64)
    bucket_start = np.zeros(nby * nbx + 1, dtype=np.int64)
    np.add.at(bucket_start, bucket + 1, 1)
    bucket_start = np.cumsum(bucket_start)
    out = sparse.astype(np.float64).copy()
    _guided_fill_loop(
        sparse.astype(np.float64), guide, ys.astype(np.int64), xs.astype(np.int64),
        vals, bucket_start, bucket_ids, bsize, nby, nbx,
        int(k), float(max_radius), float(sigma_color), out,
    )
    return out


# ---------------------------------------------------------------------------
# edge-aware diffusion sweeps (Jacobi, originally-invalid pixels only)

@accel.dual()
def _diffuse_loop(cur, guide, fill_mask, lam, sigma_color, iters):
    height, width = cur.shape
    nchan = guide.shape[2]
    inv_2sc2 = 1.0 / (2.0 * sigma_color * sigma_color)
    for _ in range(iters):
        prev = cur.copy()
        for y in range(height):
            for x in range(width):
                if not fill_mask[y, x] or prev[y, x] <= 0.0:
                    continue
                acc = 0.0
                for n in range(4):
                    ny = y + (-1 if n == 0 else (1 if n == 1 else 0))
                    nx = x + (-1 if n == 2 else (1 if n == 3 else 0))
                    if ny < 0 or ny >= height or nx < 0 or nx >= width:
                        continue
                    if prev[ny, nx] <= 0.0:
                        continue
                    c2 = 0.0
                    for c in range(nchan):
                        dc = guide[y, x, c] - guide[ny, nx, c]
                        c2 += dc * dc
                    acc += np.exp(-c2 * inv_2sc2) * (prev[ny, nx] - prev[y, x])
                cur[y, x] = prev[y, x] + lam * acc / 4.0
    return cur


def edge_aware_diffuse(depth, guide, fill_mask, lam, sigma_color, iters):
    return _diffuse_loop(
        depth.astype(np.float64).copy(), guide,
        fill_mask.astype(np.bool_), float(lam), float(sigma_color), int(iters),
    )


# ---------------------------------------------------------------------------
# 8-direction nearest-valid fill (minimum over first hit per direction)

@accel.dual()
def _directional_min_fill(depth, row_lo, row_hi):
    height, width = depth.shape
    big = 1e300
    best = np.full((height, width), big)
    # left / right
    for y in range(height):
        last = 0.0
        for x in range(width):
            if last > 0.0 and last < best[y, x]:
                best[y, x] = last
            if depth[y, x] > 0.0:
                last = depth[y, x]
        last = 0.0
        for x in range(width - 1, -1, -1):
            if last > 0.0 and last < best[y, x]:
                best[y, x] = last
            if depth[y, x] > 0.0:
                last = depth[y, x]
    # up / down
    col = np.zeros(width)
    for y in range(height):
        for x in range(width):
            if col[x] > 0.0 and col[x] < best[y, x]:
                best[y, x] = col[x]
            if depth[y, x] > 0.0:
                col[x] = depth[y, x]
    col[:] = 0.0
    for y in range(height - 1, -1, -1):
        for x in range(width):
            if col[x] > 0.0 and col[x] < best[y, x]:
                best[y, x] = col[x]
            if depth[y, x] > 0.0:
                col[x] = depth[y, x]
    # diagonals: chain[x] carries the first valid value along the diagonal
    for dx in (-1, 1):
        chain = np.zeros(width)
        cur = np.zeros(width)
        for y in range(height):
            for x in range(width):
                px = x + dx  # pixel one step back along the scan (y-1, x+dx)
                if y == 0 or px < 0 or px >= width:
                    cur[x] = 0.0
                elif depth[y - 1, px] > 0.0:
                    cur[x] = depth[y - 1, px]
                else:
                    cur[x] = chain[px]
            for x in range(width):
                chain[x] = cur[x]
                if cur[x] > 0.0 and cur[x] < best[y, x]:
                    best[y, x] = cur[x]
        chain[:] = 0.0
        for y in range(height - 1, -1, -1):
            for x in range(width):
                px = x + dx
                if y == height - 1 or px < 0 or px >= width:
                    cur[x] = 0.0
                elif depth[y + 1, px] > 0.0:
                    cur[x] = depth[y + 1, px]
                else:
                    cur[x] = chain[px]
            for x in range(width):
                chain[x] = cur[x]
                if cur[x] > 0.0 and cur[x] < best[y, x]:
                    best[y, x] = cur[x]
    out = depth.copy()
    for y in range(row_lo, row_hi):
        for x in range(width):
            if depth[y, x] == 0.0 and best[y, x] < big:
                out[y, x] = best[y, x]
    return out


def directional_min_fill(depth, row_lo, row_hi):
    """Assign each invalid pixel in rows [row_lo, row_hi) the minimum of the
    first valid values found scanning the 8 compass directions of the
    original raster."""
    return _directional_min_fill(np.asarray(depth, dtype=np.float64), int(row_lo), int(row_hi))


# ---------------------------------------------------------------------------
# bilinear sampling (vectorized; no numba path needed)

def bilinear_sample(img, us, vs):
    """Sample img (H, W) or (H, W, C) at continuous coords inside
    [0, W-1] x [0, H-1]. Returns float64 samples."""
    arr = np.asarray(img, dtype=np.float64)
    h, w = arr.shape[:2]
    x0 = np.floor(us).astype(np.int64)
    y0 = np.floor(vs).astype(np.int64)
    x0 = np.clip(x0, 0, w - 1)
    y0 = np.clip(y0, 0, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = us - x0
    fy = vs - y0
    if arr.ndim == 3:
        fx = fx[..., None]
        fy = fy[..., None]
    top = arr[y0, x0] * (1 - fx) + arr[y0, x1] * fx
    bot = arr[y1, x0] * (1 - fx) + arr[y1, x1] * fx
    return top * (1 - fy) + bot * fy
