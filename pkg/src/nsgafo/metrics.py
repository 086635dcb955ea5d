"""Pareto-front quality indicators: IGD and hypervolume (minimization)."""

from __future__ import annotations

from bisect import bisect_left

import numpy as np


def _as_front(points, name: str) -> np.ndarray:
    A = np.asarray(points, dtype=float)
    if A.ndim == 1:
        A = A[None, :]
    if A.ndim != 2 or len(A) == 0:
        raise ValueError(f"{name} must be a non-empty (n, m) point set")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite values")
    return A


def igd(front, reference, mode: str = "standard") -> float:
    """Inverted generational distance.

    ``standard``: mean over reference points of the distance to the nearest
    obtained point. ``paper``: sum over obtained points of the distance to the
    nearest reference point, divided by the reference-set size.

    Raises:
        ValueError: On empty sets, mismatched objective counts, or unknown mode.
    """
    P = _as_front(front, "front")
    R = _as_front(reference, "reference")
    if P.shape[1] != R.shape[1]:
        raise ValueError(f"objective count mismatch: {P.shape[1]} vs {R.shape[1]}")
    d = np.sqrt(((R[:, None, :] - P[None, :, :]) ** 2).sum(axis=2))
    if mode == "standard":
        return float(d.min(axis=1).mean())
    if mode == "paper":
        return float(d.min(axis=0).sum() / len(R))
    raise ValueError(f"unknown IGD mode {mode!r}")


def _to_integers(P: np.ndarray, ref: np.ndarray) -> tuple[list[tuple[int, ...]], tuple[int, ...], int]:
    """Scale every coordinate by one power of two so all become exact integers.

    Floats are dyadic rationals, so a common scale 2**shift exists; volumes
    computed on the integers are exact and a single division rounds them.
    """
    values = np.concatenate([P.ravel(), ref])
    _, exps = np.frexp(values[values != 0.0])
    shift = max(0, 53 - int(exps.min())) if exps.size else 0

    def scaled(v: float) -> int:
        num, den = float(v).as_integer_ratio()
        return num * ((1 << shift) // den)

    return [tuple(scaled(v) for v in row) for row in P], tuple(scaled(v) for v in ref), shift


def _box_volume(lo: np.ndarray, hi: np.ndarray) -> float:
    """Correctly rounded volume of the box [lo, hi]."""
    (li,), hi_i, shift = _to_integers(lo[None, :], hi)
    volume = 1
    for a, b in zip(li, hi_i):
        volume *= b - a
    return volume / (1 << (shift * len(li)))


def _hv2d(P: list, ref: tuple) -> int:
    volume = 0
    best_y = ref[1]
    for x, y in sorted(P):
        if y < best_y:
            volume += (ref[0] - x) * (best_y - y)
            best_y = y
    return volume


class _Staircase:
    """2-D nondominated set sorted by x with its dominated area maintained."""

    def __init__(self, rx: int, ry: int):
        self.rx, self.ry = rx, ry
        self.xs: list[int] = []
        self.ys: list[int] = []
        self.area = 0

    def _height(self, i: int) -> int:
        return self.ry - self.ys[i]

    def insert(self, px: int, py: int) -> None:
        xs, ys = self.xs, self.ys
        i = bisect_left(xs, px)
        if i > 0 and ys[i - 1] <= py:
            return
        if i < len(xs) and xs[i] == px and ys[i] <= py:
            return
        e = i
        while e < len(xs) and ys[e] >= py:
            e += 1
        right = xs[e] if e < len(xs) else self.rx
        # area already covered on [px, right) before the insert
        covered = 0
        first_end = xs[i] if i < e else right
        if i > 0:
            covered += (first_end - px) * self._height(i - 1)
        for j in range(i, e):
            nxt = xs[j + 1] if j + 1 < len(xs) else self.rx
            covered += (nxt - xs[j]) * self._height(j)
        self.area += (right - px) * (self.ry - py) - covered
        xs[i:e] = [px]
        ys[i:e] = [py]


def _hv3d(P: list, ref: tuple) -> int:
    P = sorted(P, key=lambda p: p[2])
    stair = _Staircase(ref[0], ref[1])
    volume = 0
    for idx, (x, y, z) in enumerate(P):
        stair.insert(x, y)
        z_next = P[idx + 1][2] if idx + 1 < len(P) else ref[2]
        volume += stair.area * (z_next - z)
    return volume


def hypervolume(front, ref, samples: int = 100_000, seed: int = 0) -> float:
    """Hypervolume dominated by ``front`` and bounded by ``ref``.

    Exact for m <= 3 (sorted sweep for m=2, z-sliced staircase sweep for
    m=3): the sweeps run in integer arithmetic and the result is the
    correctly rounded true volume, so adding points never lowers it. For m > 3 the Monte Carlo estimate from :func:`hypervolume_mc` is
    returned. Points not strictly better than ``ref`` in every coordinate
    contribute nothing; duplicated and dominated points change nothing.
    """
    r = np.asarray(ref, dtype=float)
    P = np.asarray(front, dtype=float).reshape(-1, r.size)
    P = P[np.all(P < r, axis=1)]
    if len(P) == 0:
        return 0.0
    m = r.size
    if m == 1:
        return float(r[0] - P[:, 0].min())
    if m in (2, 3):
        Pi, ri, shift = _to_integers(P, r)
        volume = _hv2d(Pi, ri) if m == 2 else _hv3d(Pi, ri)
        return volume / (1 << (shift * m))
    return hypervolume_mc(P, r, samples=samples, seed=seed)[0]


def hypervolume_mc(
    front, ref, samples: int = 100_000, seed: int = 0, chunk: int = 20_000
) -> tuple[float, float]:
    """Monte Carlo hypervolume estimate and its binomial standard error.

    Samples uniformly in the box spanned by the componentwise minimum of the
    contributing points and ``ref``.
    """
    if samples < 1000:
        raise ValueError("use at least 1000 samples")
    r = np.asarray(ref, dtype=float)
    P = np.asarray(front, dtype=float).reshape(-1, r.size)
    P = P[np.all(P < r, axis=1)]
    if len(P) == 0:
        return 0.0, 0.0
    lo = P.min(axis=0)
    box = _box_volume(lo, r)
    if box <= 0.0:
        return 0.0, 0.0
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        S = lo + rng.random((n, r.size)) * (r - lo)
        dominated = np.zeros(n, dtype=bool)
        for p in P:
            dominated |= np.all(p <= S, axis=1)
        hits += int(dominated.sum())
        done += n
    frac = hits / samples
    return box * frac, box * np.sqrt(frac * (1.0 - frac) / samples)


def hv_reference(fronts, factor: float = 1.1) -> np.ndarray:
    """Componentwise worst point over several point sets, pushed out by ``factor``.

    Each coordinate moves away from zero by ``(factor - 1) * |worst|`` so the
    rule also behaves for negative objectives; a zero worst stays zero plus
    a small margin.
    """
    stacked = np.vstack([np.asarray(f, dtype=float).reshape(len(f), -1) for f in fronts if len(f)])
    worst = stacked.max(axis=0)
    margin = (factor - 1.0) * np.abs(worst)
    margin[margin == 0.0] = factor - 1.0
    return worst + margin
