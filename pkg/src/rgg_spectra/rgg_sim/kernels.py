"""Numba kernels for fixed-radius pair search on a uniform cell grid.

Points are bucketed into ``m`` cells per axis (cell side ``side / m >= delta``)
and each cell is compared with itself and with the half of its ``3**d``
neighbourhood that is lexicographically positive, so every unordered pair
of nearby cells is visited once.
"""

from __future__ import annotations

import itertools

import numpy as np
from numba import njit


def half_shell_offsets(d: int) -> np.ndarray:
    """Offsets in ``{-1, 0, 1}**d`` that are lexicographically positive."""
    offs = [o for o in itertools.product((-1, 0, 1), repeat=d) if o > (0,) * d]
    return np.array(offs, dtype=np.int64).reshape(len(offs), d)


def cells_per_axis(side: float, delta: float, n_points: int, d: int, torus: bool) -> int:
    """As fine as ``delta`` allows, capped near ``2 N`` cells in total.

    The cap keeps sparse schedules (tiny ``delta``) from allocating a huge
    empty grid; on the torus at least 3 cells per axis keep neighbours distinct.
    """
    m = max(1, int(np.floor(side / delta)))
    cap = max(1, int((2.0 * max(n_points, 1)) ** (1.0 / d)))
    m = min(m, cap)
    if torus:
        m = max(m, 3)
    return m


@njit(cache=True, nogil=True)
def _bucket(points, side, m):
    n, d = points.shape
    width = side / m
    cell = np.empty(n, dtype=np.int64)
    for i in range(n):
        flat = 0
        for k in range(d):
            c = int(points[i, k] / width)
            if c >= m:
                c = m - 1
            elif c < 0:
                c = 0
            flat = flat * m + c
        cell[i] = flat
    order = np.argsort(cell, kind="mergesort")
    ncell = m**d
    start = np.zeros(ncell + 1, dtype=np.int64)
    for i in range(n):
        start[cell[i] + 1] += 1
    for c in range(ncell):
        start[c + 1] += start[c]
    return order, start


@njit(cache=True, nogil=True, inline="always")
def _dist2(points, i, j, side, torus):
    half = 0.5 * side
    acc = 0.0
    for k in range(points.shape[1]):
        diff = abs(points[i, k] - points[j, k])
        if torus and diff > half:
            diff = side - diff
        acc += diff * diff
    return acc


@njit(cache=True, nogil=True)
def _neighbour(cell, off, m, torus, idx):
    # decode flat cell into idx, shift by off; -1 when outside a hard window
    d = off.shape[0]
    rem = cell
    for k in range(d - 1, -1, -1):
        idx[k] = rem % m
        rem //= m
    flat = 0
    for k in range(d):
        c = idx[k] + off[k]
        if c < 0 or c >= m:
            if not torus:
                return -1
            c %= m
        flat = flat * m + c
    return flat


@njit(cache=True, nogil=True)
def _scan(points, side, delta, m, torus, offsets, mode, taus, out_i, out_j, out_r, sums):
    """Shared traversal.

    ``mode`` 0 counts edges, 1 writes them into ``out_*``, 2 accumulates
    ``sum r**tau`` into ``sums``.  Returns the edge count and the number of
    zero-length edges.
    """
    order, start = _bucket(points, side, m)
    d = points.shape[1]
    ncell = m**d
    delta2 = delta * delta
    idx = np.empty(d, dtype=np.int64)
    count = 0
    zeros = 0
    ntau = taus.shape[0]
    for cell in range(ncell):
        lo = start[cell]
        hi = start[cell + 1]
        if lo == hi:
            continue
        for o in range(-1, offsets.shape[0]):
            if o < 0:
                other = cell
            else:
                other = _neighbour(cell, offsets[o], m, torus, idx)
                if other < 0:
                    continue
            olo = start[other]
            ohi = start[other + 1]
            for a in range(lo, hi):
                i = order[a]
                b0 = a + 1 if o < 0 else olo
                for b in range(b0, ohi):
                    j = order[b]
                    r2 = _dist2(points, i, j, side, torus)
                    if r2 > delta2:
                        continue
                    if mode == 1:
                        if i < j:
                            out_i[count] = i
                            out_j[count] = j
                        else:
                            out_i[count] = j
                            out_j[count] = i
                        out_r[count] = np.sqrt(r2)
                    elif mode == 2:
                        r = np.sqrt(r2)
                        if r == 0.0:
                            zeros += 1
                        for k in range(ntau):
                            tau = taus[k]
                            if tau == 0.0:
                                sums[k] += 1.0
                            elif tau == 1.0:
                                sums[k] += r
                            elif tau == 2.0:
                                sums[k] += r2
                            else:
                                sums[k] += r**tau
                    count += 1
    return count, zeros


_EMPTY_I = np.empty(0, dtype=np.int64)
_EMPTY_F = np.empty(0, dtype=np.float64)


def _grid(points, side, delta, torus):
    d = points.shape[1]
    return cells_per_axis(side, delta, points.shape[0], d, torus), half_shell_offsets(d)


def count_edges(points, side, delta, torus):
    m, offsets = _grid(points, side, delta, torus)
    count, _ = _scan(points, side, delta, m, torus, offsets, 0, _EMPTY_F, _EMPTY_I, _EMPTY_I, _EMPTY_F, _EMPTY_F)
    return count


def edge_arrays(points, side, delta, torus):
    m, offsets = _grid(points, side, delta, torus)
    count = count_edges(points, side, delta, torus)
    out_i = np.empty(count, dtype=np.int64)
    out_j = np.empty(count, dtype=np.int64)
    out_r = np.empty(count, dtype=np.float64)
    _scan(points, side, delta, m, torus, offsets, 1, _EMPTY_F, out_i, out_j, out_r, _EMPTY_F)
    return out_i, out_j, out_r


def power_sums(points, side, delta, torus, taus):
    """``(sums, edge_count, zero_length_count)`` without materialising edges."""
    m, offsets = _grid(points, side, delta, torus)
    taus = np.ascontiguousarray(taus, dtype=np.float64)
    sums = np.zeros(taus.shape[0])
    count, zeros = _scan(points, side, delta, m, torus, offsets, 2, taus, _EMPTY_I, _EMPTY_I, _EMPTY_F, sums)
    return sums, count, zeros
