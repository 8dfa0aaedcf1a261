"""Pure-Python kernel fallback.

Functionally identical to the compiled extension; every floating-point
operation happens in the same order so results match bit for bit.
Correct but slow on store-sized scenes; see benchmarks/bench_kernels.py.
"""

from __future__ import annotations

import math

_INF = float("inf")
_EPS = 1e-9


def _slab(ox, oy, oz, dx, dy, dz, lx, ly, lz, hx, hy, hz):
    """Ray/AABB entry distance: 0 when origin inside, -1 on miss."""
    tmin = -_INF
    tmax = _INF
    if dx == 0.0:
        if ox < lx or ox > hx:
            return -1.0
    else:
        inv = 1.0 / dx
        t1 = (lx - ox) * inv
        t2 = (hx - ox) * inv
        if t1 > t2:
            t1, t2 = t2, t1
        if t1 > tmin:
            tmin = t1
        if t2 < tmax:
            tmax = t2
    if dy == 0.0:
        if oy < ly or oy > hy:
            return -1.0
    else:
        inv = 1.0 / dy
        t1 = (ly - oy) * inv
        t2 = (hy - oy) * inv
        if t1 > t2:
            t1, t2 = t2, t1
        if t1 > tmin:
            tmin = t1
        if t2 < tmax:
            tmax = t2
    if dz == 0.0:
        if oz < lz or oz > hz:
            return -1.0
    else:
        inv = 1.0 / dz
        t1 = (lz - oz) * inv
        t2 = (hz - oz) * inv
        if t1 > t2:
            t1, t2 = t2, t1
        if t1 > tmin:
            tmin = t1
        if t2 < tmax:
            tmax = t2
    if tmin > tmax:
        return -1.0
    if tmax < 0.0:
        return -1.0
    return tmin if tmin > 0.0 else 0.0


def visible_sample_counts(
    ex, ey, ez,
    rx, ry, rz,
    ux, uy, uz,
    fx, fy, fz,
    tan_h, tan_v,
    boxes, candidates,
):
    """Count on-screen, unoccluded lattice samples per candidate box.

    boxes: flat [minx,miny,minz,maxx,maxy,maxz] * n.
    candidates: indices of boxes to sample (all boxes still occlude).
    A sample counts when it projects inside the image (camera basis
    r/u/f with tangent half-angles) and no other box is hit first on
    the eye ray toward it.  Returns one count in [0, 27] per candidate.
    """
    n = len(boxes) // 6
    counts = []
    for ci in candidates:
        base = ci * 6
        lx, ly, lz = boxes[base], boxes[base + 1], boxes[base + 2]
        hx, hy, hz = boxes[base + 3], boxes[base + 4], boxes[base + 5]
        visible = 0
        # 3x3x3 lattice at fractions {0.05, 0.5, 0.95}: the 5% inset keeps
        # measure-zero silhouette slivers from counting as visibility
        for gx in range(3):
            sx = lx + (hx - lx) * (0.05 + 0.45 * gx)
            for gy in range(3):
                sy = ly + (hy - ly) * (0.05 + 0.45 * gy)
                for gz in range(3):
                    sz = lz + (hz - lz) * (0.05 + 0.45 * gz)
                    dx = sx - ex
                    dy = sy - ey
                    dz = sz - ez
                    cz = dx * fx + dy * fy + dz * fz
                    if cz <= 0.0:
                        continue
                    cx = dx * rx + dy * ry + dz * rz
                    if cx > tan_h * cz or -cx > tan_h * cz:
                        continue
                    cy = dx * ux + dy * uy + dz * uz
                    if cy > tan_v * cz or -cy > tan_v * cz:
                        continue
                    dist = math.sqrt(dx * dx + dy * dy + dz * dz)
                    if dist < 1e-12:
                        visible += 1  # eye touching the box
                        continue
                    dx /= dist
                    dy /= dist
                    dz /= dist
                    t_own = _slab(ex, ey, ez, dx, dy, dz, lx, ly, lz, hx, hy, hz)
                    if t_own < 0.0:
                        # corner samples graze their own box; the sample
                        # itself sits on the surface at this distance
                        t_own = dist
                    blocked = False
                    for j in range(n):
                        if j == ci:
                            continue
                        jb = j * 6
                        tj = _slab(
                            ex, ey, ez, dx, dy, dz,
                            boxes[jb], boxes[jb + 1], boxes[jb + 2],
                            boxes[jb + 3], boxes[jb + 4], boxes[jb + 5],
                        )
                        if tj >= 0.0 and tj < t_own - _EPS:
                            blocked = True
                            break
                    if not blocked:
                        visible += 1
        counts.append(visible)
    return counts


def raster_boxes(
    width, height,
    ex, ey, ez,
    rx, ry, rz,
    ux, uy, uz,
    fx, fy, fz,
    focal,
    boxes, rects, colors,
    bg,
):
    """Z-buffered flat raster of AABBs into an RGB8 buffer.

    rects: per box, integer [x0, y0, x1, y1) pixel bounds already clipped
    to the image; pixels outside a box's rect are never tested against it.
    Returns a bytearray of width*height*3.
    """
    half_w = width / 2.0
    half_h = height / 2.0
    n = len(boxes) // 6
    pix = bytearray(width * height * 3)
    bg0, bg1, bg2 = bg
    for i in range(0, len(pix), 3):
        pix[i] = bg0
        pix[i + 1] = bg1
        pix[i + 2] = bg2
    depth = [_INF] * (width * height)
    for b in range(n):
        x0 = rects[b * 4]
        y0 = rects[b * 4 + 1]
        x1 = rects[b * 4 + 2]
        y1 = rects[b * 4 + 3]
        base = b * 6
        lx, ly, lz = boxes[base], boxes[base + 1], boxes[base + 2]
        hx, hy, hz = boxes[base + 3], boxes[base + 4], boxes[base + 5]
        cr = colors[b * 3]
        cg = colors[b * 3 + 1]
        cb = colors[b * 3 + 2]
        for py in range(y0, y1):
            row = py * width
            for px in range(x0, x1):
                sx = (px + 0.5 - half_w) / focal
                sy = (half_h - (py + 0.5)) / focal
                dx = fx + rx * sx + ux * sy
                dy = fy + ry * sx + uy * sy
                dz = fz + rz * sx + uz * sy
                norm = math.sqrt(dx * dx + dy * dy + dz * dz)
                dx /= norm
                dy /= norm
                dz /= norm
                t = _slab(ex, ey, ez, dx, dy, dz, lx, ly, lz, hx, hy, hz)
                if t >= 0.0 and t < depth[row + px]:
                    depth[row + px] = t
                    off = (row + px) * 3
                    pix[off] = cr
                    pix[off + 1] = cg
                    pix[off + 2] = cb
    return pix
