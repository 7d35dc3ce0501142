"""Counter-based random streams and uniform sampling on spheres.

Every path owns one stream.  Draw ``j`` of stream ``(seed, stream_id)`` is
the Philox4x64-10 block at counter ``(j, stream_id, 0, 0)`` under key
``(seed, 0)``, so any draw of any stream is available in O(1) and the
walk kernels need no generator state besides the step index.  The block
function is bit-compatible with ``numpy.random.Philox``.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_LO32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0
_TWO_PI = 2.0 * math.pi

MASK64 = (1 << 64) - 1


@njit(cache=True, nogil=True)
def _mulhilo(a, b):
    lo = a * b
    a0 = a & _LO32
    a1 = a >> _S32
    b0 = b & _LO32
    b1 = b >> _S32
    p00 = a0 * b0
    p01 = a0 * b1
    p10 = a1 * b0
    p11 = a1 * b1
    mid = (p00 >> _S32) + (p01 & _LO32) + (p10 & _LO32)
    hi = p11 + (p01 >> _S32) + (p10 >> _S32) + (mid >> _S32)
    return hi, lo


@njit(cache=True, nogil=True)
def philox4x64(c0, c1, c2, c3, k0, k1):
    """Philox4x64 with 10 rounds on a single counter block."""
    for r in range(10):
        hi0, lo0 = _mulhilo(_M0, c0)
        hi1, lo1 = _mulhilo(_M1, c2)
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
        if r < 9:
            k0 = k0 + _W0
            k1 = k1 + _W1
    return c0, c1, c2, c3


@njit(cache=True, nogil=True)
def _unit(w):
    return np.float64(w >> _S11) * _INV53


@njit(cache=True, nogil=True)
def sphere_direction(seed, stream_id, draw):
    """Uniform unit vector from draw ``draw`` of a stream.

    Inverse CDF on the polar cosine plus a uniform azimuth: two uniforms
    per direction, no rejection.
    """
    w0, w1, w2, w3 = philox4x64(np.uint64(draw), stream_id, np.uint64(0), np.uint64(0),
                                seed, np.uint64(0))
    cz = 1.0 - 2.0 * _unit(w0)
    phi = _TWO_PI * _unit(w1)
    sz = math.sqrt(max(0.0, (1.0 - cz) * (1.0 + cz)))
    return sz * math.cos(phi), sz * math.sin(phi), cz


def _u64(v: int) -> np.uint64:
    return np.uint64(int(v) & MASK64)


class RngStream:
    """One reproducible stream; ``position`` counts consumed draws."""

    def __init__(self, base_seed: int, stream_id: int, position: int = 0):
        self.base_seed = int(base_seed) & MASK64
        self.stream_id = int(stream_id) & MASK64
        self.position = int(position)

    def __repr__(self):
        return f"RngStream(base_seed={self.base_seed}, stream_id={self.stream_id}, position={self.position})"

    def block(self, draw: int) -> tuple[int, int, int, int]:
        """The raw 4x64-bit block for a given draw index (does not advance)."""
        out = philox4x64(_u64(draw), _u64(self.stream_id), np.uint64(0), np.uint64(0),
                         _u64(self.base_seed), np.uint64(0))
        return tuple(int(w) for w in out)

    def direction(self) -> np.ndarray:
        """Next uniform unit vector; advances the stream by one draw."""
        d = sphere_direction(_u64(self.base_seed), _u64(self.stream_id), _u64(self.position))
        self.position += 1
        return np.array(d)


def make_stream(base_seed: int, stream_id: int) -> RngStream:
    return RngStream(base_seed, stream_id)


def uniform_on_sphere(s: RngStream, center, radius: float) -> np.ndarray:
    if not radius > 0:
        raise ValueError("radius must be positive")
    return np.asarray(center, dtype=float) + radius * s.direction()


@njit(cache=True, nogil=True)
def _fill_directions(seed, stream_id, start, out):
    for j in range(out.shape[0]):
        x, y, z = sphere_direction(seed, stream_id, np.uint64(start + j))
        out[j, 0] = x
        out[j, 1] = y
        out[j, 2] = z


def directions(base_seed: int, stream_id: int, n: int, start: int = 0) -> np.ndarray:
    """``n`` consecutive unit vectors of one stream as an (n, 3) array."""
    out = np.empty((n, 3))
    _fill_directions(_u64(base_seed), _u64(stream_id), int(start), out)
    return out
