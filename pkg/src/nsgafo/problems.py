"""Benchmark problems and the problem interface the optimizers consume."""

from __future__ import annotations

from math import comb

import numpy as np

from nsgafo.core.reference import das_dennis


class Problem:
    """Box-bounded minimization problem.

    Subclasses implement :meth:`evaluate_batch` (vectorized) or
    :meth:`evaluate` (one gene vector); each falls back on the other.
    Evaluation must be deterministic and side-effect free.
    """

    name = "problem"

    def __init__(self, n_var: int, n_obj: int, lower, upper):
        self.n_var = int(n_var)
        self.n_obj = int(n_obj)
        self.lower = np.broadcast_to(np.asarray(lower, dtype=float), (self.n_var,)).copy()
        self.upper = np.broadcast_to(np.asarray(upper, dtype=float), (self.n_var,)).copy()
        if not (np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper))):
            raise ValueError("bounds must be finite")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")

    @property
    def dimension(self) -> int:
        return self.n_var

    def evaluate(self, genes) -> tuple[np.ndarray, float]:
        F, cv = self.evaluate_batch(np.atleast_2d(np.asarray(genes, dtype=float)))
        return F[0], float(cv[0])

    def evaluate_batch(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        rows = [self.evaluate(x) for x in X]
        F = np.array([r[0] for r in rows], dtype=float).reshape(len(X), self.n_obj)
        return F, np.array([r[1] for r in rows], dtype=float)

    def true_front(self, count: int) -> np.ndarray:
        raise NotImplementedError(f"{self.name} has no analytic Pareto front")

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n_var={self.n_var}, n_obj={self.n_obj})"


def _lattice_at_least(m: int, count: int) -> np.ndarray:
    p = 1
    while comb(m + p - 1, p) < count:
        p += 1
    return das_dennis(m, p)


def _spread_subset(points: np.ndarray, count: int) -> np.ndarray:
    """Greedy max-min subset, seeded with the first row, original order kept."""
    if len(points) <= count:
        return points
    chosen = [0]
    nearest = np.linalg.norm(points - points[0], axis=1)
    for _ in range(count - 1):
        nxt = int(np.argmax(nearest))
        chosen.append(nxt)
        nearest = np.minimum(nearest, np.linalg.norm(points - points[nxt], axis=1))
    return points[np.sort(chosen)]


class DTLZ3(Problem):
    """DTLZ3: spherical front, multimodal distance function.

    ``m`` objectives and ``k`` distance variables on [0, 1]^(m+k-1). The
    optimum has every distance variable at 0.5, where g = 0.
    """

    name = "dtlz3"

    def __init__(self, n_obj: int = 3, k: int = 10):
        if n_obj < 2:
            raise ValueError("DTLZ3 needs at least 2 objectives")
        if k < 1:
            raise ValueError("DTLZ3 needs at least 1 distance variable")
        self.k = k
        super().__init__(n_obj + k - 1, n_obj, 0.0, 1.0)

    @staticmethod
    def g(xm: np.ndarray) -> np.ndarray:
        z = xm - 0.5
        return 100.0 * (xm.shape[-1] + np.sum(z**2 - np.cos(20.0 * np.pi * z), axis=-1))

    def evaluate_batch(self, X):
        X = np.asarray(X, dtype=float)
        m = self.n_obj
        pos, dist = X[:, : m - 1], X[:, m - 1 :]
        scale = 1.0 + self.g(dist)
        c = np.cos(0.5 * np.pi * pos)
        s = np.sin(0.5 * np.pi * pos)
        F = np.empty((len(X), m))
        for i in range(m):
            f = scale * np.prod(c[:, : m - 1 - i], axis=1)
            if i > 0:
                f = f * s[:, m - 1 - i]
            F[:, i] = f
        return F, np.zeros(len(X))

    def true_front(self, count: int) -> np.ndarray:
        dirs = _spread_subset(_lattice_at_least(self.n_obj, count), count)
        return dirs / np.linalg.norm(dirs, axis=1, keepdims=True)


def _correct_to_01(x, eps=1e-10):
    x = np.where((x < 0) & (x >= -eps), 0.0, x)
    return np.where((x > 1) & (x <= 1 + eps), 1.0, x)


def _s_linear(y, shift=0.35):
    return _correct_to_01(np.abs(y - shift) / np.abs(np.floor(shift - y) + shift))


def _r_nonsep(y, a):
    # y: (n, cols) block, a: degree of non-separability
    n_cols = y.shape[1]
    total = np.zeros(len(y))
    for j in range(n_cols):
        total += y[:, j]
        for k in range(a - 1):
            total += np.abs(y[:, j] - y[:, (1 + j + k) % n_cols])
    half = np.ceil(a / 2.0)
    denom = (n_cols / a) * half * (1.0 + 2.0 * a - 2.0 * half)
    return _correct_to_01(total / denom)


def _linear_shape(x: np.ndarray) -> np.ndarray:
    """Linear front shape h_1..h_M from the M-1 position coordinates."""
    n, mm1 = x.shape
    m = mm1 + 1
    h = np.empty((n, m))
    for i in range(1, m + 1):
        h[:, i - 1] = np.prod(x[:, : m - i], axis=1)
        if i > 1:
            h[:, i - 1] *= 1.0 - x[:, m - i]
    return h


class WFG3(Problem):
    """WFG3: linear, degenerate front; variable i lives on [0, 2i].

    ``k`` position parameters (divisible by m - 1) and ``l`` distance
    parameters (even).
    """

    name = "wfg3"

    def __init__(self, n_obj: int = 3, k: int = 4, l: int = 20):  # noqa: E741
        if n_obj < 2:
            raise ValueError("WFG3 needs at least 2 objectives")
        if k < 1 or k % (n_obj - 1) != 0:
            raise ValueError("position parameter count k must be a positive multiple of m - 1")
        if l < 2 or l % 2 != 0:
            raise ValueError("distance parameter count l must be a positive even number")
        self.k, self.l = k, l
        n = k + l
        super().__init__(n, n_obj, 0.0, 2.0 * np.arange(1, n + 1))
        self.scales = 2.0 * np.arange(1, n_obj + 1)
        self.degeneracy = np.zeros(n_obj - 1)
        self.degeneracy[0] = 1.0

    def transform(self, X: np.ndarray) -> np.ndarray:
        """Map raw variables to the M underlying parameters (positions..., distance)."""
        k, l, m = self.k, self.l, self.n_obj
        y = np.asarray(X, dtype=float) / self.upper
        y = y.copy()
        y[:, k:] = _s_linear(y[:, k:], 0.35)
        pairs = [_r_nonsep(y[:, k + 2 * i : k + 2 * i + 2], 2) for i in range(l // 2)]
        y = np.column_stack([y[:, :k], *pairs])
        gap = k // (m - 1)
        t = [_correct_to_01(y[:, i * gap : (i + 1) * gap].mean(axis=1)) for i in range(m - 1)]
        t.append(_correct_to_01(y[:, k:].mean(axis=1)))
        return np.column_stack(t)

    def _objectives(self, t: np.ndarray) -> np.ndarray:
        dist = t[:, -1]
        pos = np.maximum(dist[:, None], self.degeneracy) * (t[:, :-1] - 0.5) + 0.5
        return dist[:, None] + self.scales * _linear_shape(pos)

    def evaluate_batch(self, X):
        F = self._objectives(self.transform(np.asarray(X, dtype=float)))
        return F, np.zeros(len(F))

    def front_point(self, u) -> np.ndarray:
        """Points of the degenerate front parametrized by u in [0, 1]."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        t = np.full((u.size, self.n_obj), 0.5)
        t[:, 0] = u
        t[:, -1] = 0.0
        return self._objectives(t)

    def true_front(self, count: int) -> np.ndarray:
        if count < 2:
            return self.front_point([0.0])[:count]
        return self.front_point(das_dennis(2, count - 1)[::-1, 0])


def sample_true_front(problem: Problem, count: int = 1000) -> np.ndarray:
    """Deterministic sample of ``count`` points on the problem's analytic front.

    Raises:
        NotImplementedError: If the problem has no analytic front.
    """
    if count < 1:
        raise ValueError("count must be positive")
    return problem.true_front(count)


def make_benchmark(name: str) -> Problem:
    """Default-size benchmark by name: ``dtlz3`` (m=3, k=10) or ``wfg3`` (m=3, k=4, l=20)."""
    key = name.lower()
    if key == "dtlz3":
        return DTLZ3(3, 10)
    if key == "wfg3":
        return WFG3(3, 4, 20)
    raise ValueError(f"unknown benchmark problem {name!r}")
