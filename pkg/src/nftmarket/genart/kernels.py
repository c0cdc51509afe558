"""Integer-only procedural raster kernels.

Two implementations of the same math: a numba @njit per-pixel loop (the hot
path) and a vectorized numpy fallback. Selection: set NFTMARKET_NO_NUMBA=1
to force the numpy path; the numpy path is also used automatically when
numba is unavailable. Both paths produce bit-identical rasters — everything
is uint64 fixed-point, no floats anywhere, so output is reproducible across
runs and platforms.

The image is three layers: a seeded 5-color palette, three octaves of
integer value noise indexing into the palette, and a handful of seeded
filled circles blended on top.
"""

from __future__ import annotations

import os

import numpy as np

U64 = np.uint64

# splitmix64 finalizer constants
_C_GAMMA = 0x9E3779B97F4A7C15
_C_M1 = 0xBF58476D1CE4E5B9
_C_M2 = 0x94D049BB133111EB

# lattice point mixing keys, one per axis plus the octave channel
_KX = 0xA24BAED4963EE407
_KY = 0x9FB21C651E98DF25
_KO = 0xD6E8FEB86659FD93

_PALETTE_SALT = 0x00C0FFEE
_CIRCLE_SALT = 0x5EED0000

_OCTAVE_SHIFTS = (6, 5, 4)
_OCTAVE_WEIGHTS = (4, 2, 1)
PALETTE_SIZE = 5


def numba_enabled() -> bool:
    if os.environ.get("NFTMARKET_NO_NUMBA", "") not in ("", "0"):
        return False
    try:
        import numba  # noqa: F401

        return True
    except ImportError:
        return False


def _mix_py(z: int) -> int:
    """Reference scalar splitmix64 finalizer (plain Python, wraps mod 2^64)."""
    mask = (1 << 64) - 1
    z = (z + _C_GAMMA) & mask
    z = ((z ^ (z >> 30)) * _C_M1) & mask
    z = ((z ^ (z >> 27)) * _C_M2) & mask
    return z ^ (z >> 31)


def seed_palette(seed: int) -> np.ndarray:
    """(PALETTE_SIZE, 3) int64 RGB palette derived from the seed."""
    out = np.zeros((PALETTE_SIZE, 3), dtype=np.int64)
    for i in range(PALETTE_SIZE):
        h = _mix_py(seed ^ (_PALETTE_SALT + i))
        out[i, 0] = h & 0xFF
        out[i, 1] = (h >> 8) & 0xFF
        out[i, 2] = (h >> 16) & 0xFF
    return out


def seed_circles(seed: int, width: int, height: int) -> np.ndarray:
    """(n, 6) int64 rows of cx, cy, r_squared, r, g, b."""
    n = 3 + (_mix_py(seed ^ _CIRCLE_SALT) & 3)
    palette = seed_palette(seed)
    min_wh = min(width, height)
    rows = []
    for k in range(n):
        h1 = _mix_py(seed ^ (_CIRCLE_SALT + 3 * k + 1))
        h2 = _mix_py(seed ^ (_CIRCLE_SALT + 3 * k + 2))
        h3 = _mix_py(seed ^ (_CIRCLE_SALT + 3 * k + 3))
        cx = h1 % width
        cy = h2 % height
        radius = min_wh // 8 + h3 % max(1, min_wh // 4)
        color = palette[k % PALETTE_SIZE]
        rows.append([cx, cy, radius * radius, color[0], color[1], color[2]])
    return np.asarray(rows, dtype=np.int64)


# --- numpy implementation --------------------------------------------------


def _mix_np(z: np.ndarray) -> np.ndarray:
    z = z + U64(_C_GAMMA)
    z = (z ^ (z >> U64(30))) * U64(_C_M1)
    z = (z ^ (z >> U64(27))) * U64(_C_M2)
    return z ^ (z >> U64(31))


def _lattice_np(seed: int, ix: np.ndarray, iy: np.ndarray, octave: int) -> np.ndarray:
    # octave term precomputed in python ints: numpy warns on scalar overflow
    oterm = ((octave + 1) * _KO) & ((1 << 64) - 1)
    key = ix * U64(_KX) + iy * U64(_KY) + U64(oterm)
    return (_mix_np(U64(seed) ^ key) & U64(0xFF)).astype(np.int64)


def render_numpy(seed: int, width: int, height: int) -> np.ndarray:
    ys, xs = np.mgrid[0:height, 0:width].astype(np.uint64)
    noise = np.zeros((height, width), dtype=np.int64)
    for shift, weight in zip(_OCTAVE_SHIFTS, _OCTAVE_WEIGHTS):
        cell = 1 << shift
        mask = U64(cell - 1)
        gx, gy = xs >> U64(shift), ys >> U64(shift)
        fx = (xs & mask).astype(np.int64)
        fy = (ys & mask).astype(np.int64)
        one = U64(1)
        v00 = _lattice_np(seed, gx, gy, shift)
        v10 = _lattice_np(seed, gx + one, gy, shift)
        v01 = _lattice_np(seed, gx, gy + one, shift)
        v11 = _lattice_np(seed, gx + one, gy + one, shift)
        top = v00 * (cell - fx) + v10 * fx
        bot = v01 * (cell - fx) + v11 * fx
        interp = (top * (cell - fy) + bot * fy) >> (2 * shift)
        noise += weight * interp
    noise //= sum(_OCTAVE_WEIGHTS)  # 0..255

    palette = seed_palette(seed)
    t = noise * (PALETTE_SIZE - 1)  # 0..255*4
    idx = np.minimum(t >> 8, PALETTE_SIZE - 2)
    frac = t - (idx << 8)
    img = np.zeros((height, width, 3), dtype=np.int64)
    for c in range(3):
        lo = palette[idx, c]
        hi = palette[idx + 1, c]
        img[:, :, c] = (lo * (256 - frac) + hi * frac) >> 8

    xi = xs.astype(np.int64)
    yi = ys.astype(np.int64)
    for cx, cy, r2, r, g, b in seed_circles(seed, width, height):
        inside = (xi - cx) ** 2 + (yi - cy) ** 2 <= r2
        for c, col in enumerate((r, g, b)):
            chan = img[:, :, c]
            chan[inside] = (chan[inside] + col) >> 1
    return img.astype(np.uint8)


# --- numba implementation --------------------------------------------------

_numba_kernel = None


def _get_numba_kernel():
    global _numba_kernel
    if _numba_kernel is not None:
        return _numba_kernel

    import numba

    @numba.njit(cache=True)
    def kernel(seed, width, height, palette, circles):  # pragma: no cover - jit
        gamma = U64(_C_GAMMA)
        m1 = U64(_C_M1)
        m2 = U64(_C_M2)
        kx = U64(_KX)
        ky = U64(_KY)
        ko = U64(_KO)
        byte_mask = U64(0xFF)
        seed64 = U64(seed)

        out = np.zeros((height, width, 3), dtype=np.uint8)
        shifts = (6, 5, 4)
        weights = (4, 2, 1)
        for y in range(height):
            for x in range(width):
                noise = np.int64(0)
                for o in range(3):
                    shift = shifts[o]
                    cell = 1 << shift
                    gx = U64(x >> shift)
                    gy = U64(y >> shift)
                    fx = np.int64(x & (cell - 1))
                    fy = np.int64(y & (cell - 1))
                    corners = np.empty(4, dtype=np.int64)
                    ci = 0
                    for dy in range(2):
                        for dx in range(2):
                            key = (gx + U64(dx)) * kx + (gy + U64(dy)) * ky + U64(shift + 1) * ko
                            z = (seed64 ^ key) + gamma
                            z = (z ^ (z >> U64(30))) * m1
                            z = (z ^ (z >> U64(27))) * m2
                            z = z ^ (z >> U64(31))
                            corners[ci] = np.int64(z & byte_mask)
                            ci += 1
                    v00, v10, v01, v11 = corners[0], corners[1], corners[2], corners[3]
                    top = v00 * (cell - fx) + v10 * fx
                    bot = v01 * (cell - fx) + v11 * fx
                    interp = (top * (cell - fy) + bot * fy) >> (2 * shift)
                    noise += weights[o] * interp
                noise //= 7  # sum of weights

                t = noise * (palette.shape[0] - 1)
                idx = t >> 8
                if idx > palette.shape[0] - 2:
                    idx = palette.shape[0] - 2
                frac = t - (idx << 8)
                px = np.empty(3, dtype=np.int64)
                for c in range(3):
                    lo = palette[idx, c]
                    hi = palette[idx + 1, c]
                    px[c] = (lo * (256 - frac) + hi * frac) >> 8

                for k in range(circles.shape[0]):
                    dx2 = np.int64(x) - circles[k, 0]
                    dy2 = np.int64(y) - circles[k, 1]
                    if dx2 * dx2 + dy2 * dy2 <= circles[k, 2]:
                        for c in range(3):
                            px[c] = (px[c] + circles[k, 3 + c]) >> 1

                for c in range(3):
                    out[y, x, c] = np.uint8(px[c])
        return out

    _numba_kernel = kernel
    return kernel


def render_numba(seed: int, width: int, height: int) -> np.ndarray:
    kernel = _get_numba_kernel()
    palette = seed_palette(seed)
    circles = seed_circles(seed, width, height)
    return kernel(U64(seed), width, height, palette, circles)


def render_raster(seed: int, width: int, height: int) -> np.ndarray:
    """(height, width, 3) uint8 raster, a pure function of its arguments."""
    if numba_enabled():
        return render_numba(seed, width, height)
    return render_numpy(seed, width, height)
