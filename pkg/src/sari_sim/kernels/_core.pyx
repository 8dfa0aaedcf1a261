# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel core.

Mirrors kernels/pure.py operation for operation; keep the two in sync.
The build passes -ffp-contract=off so no FMA contraction can change
results relative to the interpreter.
"""

from libc.math cimport sqrt, INFINITY
from libc.stdlib cimport malloc, free

cdef double _EPS = 1e-9


cdef inline double _slab(
    double ox, double oy, double oz,
    double dx, double dy, double dz,
    double lx, double ly, double lz,
    double hx, double hy, double hz,
) noexcept nogil:
    cdef double tmin = -INFINITY
    cdef double tmax = INFINITY
    cdef double inv, t1, t2, tmp
    if dx == 0.0:
        if ox < lx or ox > hx:
            return -1.0
    else:
        inv = 1.0 / dx
        t1 = (lx - ox) * inv
        t2 = (hx - ox) * inv
        if t1 > t2:
            tmp = t1; t1 = t2; t2 = tmp
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
            tmp = t1; t1 = t2; t2 = tmp
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
            tmp = t1; t1 = t2; t2 = tmp
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
    double ex, double ey, double ez,
    double rx, double ry, double rz,
    double ux, double uy, double uz,
    double fx, double fy, double fz,
    double tan_h, double tan_v,
    boxes, candidates,
):
    """Count on-screen, unoccluded lattice samples per box (see pure.py)."""
    cdef Py_ssize_t n = len(boxes) // 6
    cdef Py_ssize_t k = len(candidates)
    cdef Py_ssize_t i, ci, j, gx, gy, gz
    cdef double lx, ly, lz, hx, hy, hz
    cdef double sx, sy, sz, dx, dy, dz, cx, cy, cz, dist, t_own, tj
    cdef int visible, blocked
    cdef double *B = <double *> malloc((n * 6 + 1) * sizeof(double))
    cdef long *C = <long *> malloc((k + 1) * sizeof(long))
    if B == NULL or C == NULL:
        free(B); free(C)
        raise MemoryError()
    try:
        for i in range(n * 6):
            B[i] = boxes[i]
        for i in range(k):
            C[i] = candidates[i]
        counts = [0] * k
        for i in range(k):
            ci = C[i]
            lx = B[ci * 6]; ly = B[ci * 6 + 1]; lz = B[ci * 6 + 2]
            hx = B[ci * 6 + 3]; hy = B[ci * 6 + 4]; hz = B[ci * 6 + 5]
            visible = 0
            # lattice fractions {0.05, 0.5, 0.95}; see pure.py for rationale
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
                        dist = sqrt(dx * dx + dy * dy + dz * dz)
                        if dist < 1e-12:
                            visible += 1
                            continue
                        dx /= dist
                        dy /= dist
                        dz /= dist
                        t_own = _slab(ex, ey, ez, dx, dy, dz, lx, ly, lz, hx, hy, hz)
                        if t_own < 0.0:
                            # corner samples graze their own box; the sample
                            # itself sits on the surface at this distance
                            t_own = dist
                        blocked = 0
                        for j in range(n):
                            if j == ci:
                                continue
                            tj = _slab(
                                ex, ey, ez, dx, dy, dz,
                                B[j * 6], B[j * 6 + 1], B[j * 6 + 2],
                                B[j * 6 + 3], B[j * 6 + 4], B[j * 6 + 5],
                            )
                            if tj >= 0.0 and tj < t_own - _EPS:
                                blocked = 1
                                break
                        if not blocked:
                            visible += 1
            counts[i] = visible
        return counts
    finally:
        free(B)
        free(C)


def raster_boxes(
    int width, int height,
    double ex, double ey, double ez,
    double rx, double ry, double rz,
    double ux, double uy, double uz,
    double fx, double fy, double fz,
    double focal,
    boxes, rects, colors,
    bg,
):
    """Z-buffered flat raster of AABBs into an RGB8 buffer (see pure.py)."""
    cdef Py_ssize_t n = len(boxes) // 6
    cdef double half_w = width / 2.0
    cdef double half_h = height / 2.0
    cdef Py_ssize_t i, b, py, px, row, off
    cdef long x0, y0, x1, y1
    cdef double lx, ly, lz, hx, hy, hz
    cdef double sx, sy, dx, dy, dz, norm, t
    cdef unsigned char cr, cg, cb
    cdef bytearray pix = bytearray(width * height * 3)
    cdef unsigned char[::1] pv = pix
    cdef unsigned char bg0 = bg[0], bg1 = bg[1], bg2 = bg[2]
    for i in range(0, width * height * 3, 3):
        pv[i] = bg0
        pv[i + 1] = bg1
        pv[i + 2] = bg2
    cdef double *B = <double *> malloc((n * 6 + 1) * sizeof(double))
    cdef long *R = <long *> malloc((n * 4 + 1) * sizeof(long))
    cdef unsigned char *K = <unsigned char *> malloc(n * 3 + 1)
    cdef double *depth = <double *> malloc(width * height * sizeof(double))
    if B == NULL or R == NULL or K == NULL or depth == NULL:
        free(B); free(R); free(K); free(depth)
        raise MemoryError()
    try:
        for i in range(n * 6):
            B[i] = boxes[i]
        for i in range(n * 4):
            R[i] = rects[i]
        for i in range(n * 3):
            K[i] = colors[i]
        for i in range(width * height):
            depth[i] = INFINITY
        with nogil:
            for b in range(n):
                x0 = R[b * 4]; y0 = R[b * 4 + 1]; x1 = R[b * 4 + 2]; y1 = R[b * 4 + 3]
                lx = B[b * 6]; ly = B[b * 6 + 1]; lz = B[b * 6 + 2]
                hx = B[b * 6 + 3]; hy = B[b * 6 + 4]; hz = B[b * 6 + 5]
                cr = K[b * 3]; cg = K[b * 3 + 1]; cb = K[b * 3 + 2]
                for py in range(y0, y1):
                    row = py * width
                    for px in range(x0, x1):
                        sx = (px + 0.5 - half_w) / focal
                        sy = (half_h - (py + 0.5)) / focal
                        dx = fx + rx * sx + ux * sy
                        dy = fy + ry * sx + uy * sy
                        dz = fz + rz * sx + uz * sy
                        norm = sqrt(dx * dx + dy * dy + dz * dz)
                        dx /= norm
                        dy /= norm
                        dz /= norm
                        t = _slab(ex, ey, ez, dx, dy, dz, lx, ly, lz, hx, hy, hz)
                        if t >= 0.0 and t < depth[row + px]:
                            depth[row + px] = t
                            off = (row + px) * 3
                            pv[off] = cr
                            pv[off + 1] = cg
                            pv[off + 2] = cb
        return pix
    finally:
        free(B)
        free(R)
        free(K)
        free(depth)
