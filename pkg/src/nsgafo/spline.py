"""Degree-6 B-spline interpolation of joint key points.

A trajectory through n+1 key points (t_0, q_0) ... (t_n, q_n) is a clamped
degree-6 spline with n+7 control points: n+1 pass-through conditions plus
velocity, acceleration and jerk prescribed at both ends. Derivatives are
evaluated exactly from the derivative control nets, the order-r net being a
degree 6-r spline on the same knots with the outer r knots dropped.

Angles are in degrees and times in seconds throughout; derivatives come out
in deg/s, deg/s^2 and deg/s^3.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEGREE = 6
MAX_CONDITION = 1e12


class SplineError(ValueError):
    """Interpolation system could not be solved reliably."""


@dataclass(frozen=True)
class KeyPointSeries:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        q = np.asarray(self.values, dtype=float)
        _check_times(t)
        if len(q) != len(t):
            raise ValueError("times and values must have the same length")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", q)

    def interpolate(self, bc: "BoundaryConditions | None" = None) -> "JointTrajectory":
        return interpolate(self.times, self.values, bc)


@dataclass(frozen=True)
class BoundaryConditions:
    """End derivatives; each entry is a scalar or one value per joint."""

    v_start: float | np.ndarray = 0.0
    v_end: float | np.ndarray = 0.0
    a_start: float | np.ndarray = 0.0
    a_end: float | np.ndarray = 0.0
    j_start: float | np.ndarray = 0.0
    j_end: float | np.ndarray = 0.0

    def start(self) -> tuple:
        return self.v_start, self.a_start, self.j_start

    def end(self) -> tuple:
        return self.v_end, self.a_end, self.j_end


def _check_times(t: np.ndarray) -> None:
    if t.ndim != 1 or len(t) < 2:
        raise ValueError("need at least two key-point times")
    if not np.all(np.isfinite(t)):
        raise ValueError("key-point times must be finite")
    if np.any(np.diff(t) <= 0):
        raise ValueError("key-point times must be strictly increasing")


def build_knots(times, degree: int = DEGREE) -> np.ndarray:
    """Clamped knot vector for interpolating ``times`` with end derivatives.

    End times are repeated degree+1 times; the interior knots are the
    interior key times plus ``degree // 2 - 2`` auxiliary knots, each at the
    midpoint of the currently longest knot span (earliest span on ties).
    For degree 6 that is one auxiliary knot, which makes the knot count
    (n + 7) + 7 for n + 7 control points.
    """
    t = np.asarray(times, dtype=float)
    _check_times(t)
    interior = list(t[1:-1])
    breaks = list(t)
    for _ in range(degree // 2 - 2):
        gaps = np.diff(breaks)
        i = int(np.argmax(gaps))
        mid = 0.5 * (breaks[i] + breaks[i + 1])
        breaks.insert(i + 1, mid)
        interior.append(mid)
    interior.sort()
    return np.concatenate([np.full(degree + 1, t[0]), interior, np.full(degree + 1, t[-1])])


def find_spans(knots: np.ndarray, degree: int, x: np.ndarray) -> np.ndarray:
    n_ctrl = len(knots) - degree - 1
    span = np.searchsorted(knots, x, side="right") - 1
    return np.clip(span, degree, n_ctrl - 1)


def basis_functions(knots: np.ndarray, degree: int, x: np.ndarray, span: np.ndarray) -> list[np.ndarray]:
    """Nonzero basis functions of every degree 0..``degree`` (Cox-de Boor).

    Entry ``q`` of the result has shape (len(x), q+1); column ``a`` holds
    N_{span-q+a, q}(x) on the full knot vector.
    """
    x = np.asarray(x, dtype=float)
    K = x.size
    left = np.zeros((K, degree + 1))
    right = np.zeros((K, degree + 1))
    N = np.ones((K, 1))
    out = [N]
    for j in range(1, degree + 1):
        left[:, j] = x - knots[span + 1 - j]
        right[:, j] = knots[span + j] - x
        nxt = np.zeros((K, j + 1))
        saved = np.zeros(K)
        for r in range(j):
            temp = N[:, r] / (right[:, r + 1] + left[:, j - r])
            nxt[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        nxt[:, j] = saved
        N = nxt
        out.append(N)
    return out


def derivative_nets(knots: np.ndarray, controls: np.ndarray, degree: int, max_order: int) -> list[np.ndarray]:
    """Control nets of the curve and its derivatives up to ``max_order``.

    Net r has len(controls) - r rows; row j multiplies N_{j+r, degree-r}.
    """
    nets = [np.asarray(controls, dtype=float)]
    for r in range(1, max_order + 1):
        d = nets[-1]
        j = np.arange(len(d) - 1)
        denom = knots[j + degree + 1] - knots[j + r]
        scale = np.where(denom > 0, (degree - r + 1) / np.where(denom > 0, denom, 1.0), 0.0)
        diff = d[1:] - d[:-1]
        nets.append(diff * scale.reshape((-1,) + (1,) * (diff.ndim - 1)))
    return nets


def _gather(N: np.ndarray, net: np.ndarray, offset: np.ndarray) -> np.ndarray:
    # sum_a N[:, a] * net[offset + a], via a dense basis matrix and one matmul
    K, width = N.shape
    B = np.zeros((K, len(net)))
    cols = offset[:, None] + np.arange(width)
    np.put_along_axis(B, cols, N, axis=1)
    return B @ net


@dataclass(frozen=True)
class JointTrajectory:
    """Immutable clamped spline with cached derivative nets (orders 0..3).

    ``controls`` has shape (n_ctrl,) for one joint or (n_ctrl, J) for J
    joints sharing the same knots.
    """

    knots: np.ndarray
    controls: np.ndarray
    degree: int = DEGREE
    nets: tuple = field(init=False, repr=False)

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        controls = np.asarray(self.controls, dtype=float)
        if len(knots) != len(controls) + self.degree + 1:
            raise ValueError("knot count must equal control count + degree + 1")
        if np.any(np.diff(knots) < 0):
            raise ValueError("knots must be nondecreasing")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "controls", controls)
        order = min(3, self.degree)
        object.__setattr__(self, "nets", tuple(derivative_nets(knots, controls, self.degree, order)))

    @property
    def t_start(self) -> float:
        return float(self.knots[0])

    @property
    def t_end(self) -> float:
        return float(self.knots[-1])

    def _prepare(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        tol = 1e-12 * max(1.0, abs(self.t_start), abs(self.t_end))
        if np.any(t_arr < self.t_start - tol) or np.any(t_arr > self.t_end + tol):
            raise ValueError(f"t outside trajectory domain [{self.t_start}, {self.t_end}]")
        t_arr = np.clip(t_arr, self.t_start, self.t_end)
        span = find_spans(self.knots, self.degree, t_arr)
        return t_arr, span, basis_functions(self.knots, self.degree, t_arr, span)

    def evaluate(self, t, order: int = 0):
        """Position (0), velocity (1), acceleration (2) or jerk (3) at ``t``."""
        if order not in range(len(self.nets)):
            raise ValueError(f"derivative order must be in 0..{len(self.nets) - 1}")
        _, span, N = self._prepare(t)
        out = _gather(N[self.degree - order], self.nets[order], span - self.degree)
        return out[0] if np.ndim(t) == 0 else out

    def evaluate_all(self, t) -> list[np.ndarray]:
        """All derivative orders 0..3 at ``t`` from one basis evaluation."""
        _, span, N = self._prepare(t)
        off = span - self.degree
        return [_gather(N[self.degree - r], net, off) for r, net in enumerate(self.nets)]

    def __call__(self, t, order: int = 0):
        return self.evaluate(t, order)


def _operator_rows(knots, degree, x, orders) -> np.ndarray:
    """Rows mapping control points to the ``orders``-th derivative at each x."""
    n_ctrl = len(knots) - degree - 1
    x = np.asarray(x, dtype=float)
    span = find_spans(knots, degree, x)
    N = basis_functions(knots, degree, x, span)
    maps = derivative_nets(knots, np.eye(n_ctrl), degree, max(orders))
    rows = np.empty((len(x), n_ctrl))
    for k, (r, s) in enumerate(zip(orders, span)):
        q = degree - r
        sel = s - degree + np.arange(q + 1)
        rows[k] = N[q][k] @ maps[r][sel]
    return rows


def collocation_system(times, degree: int = DEGREE) -> tuple[np.ndarray, np.ndarray]:
    """Interpolation matrix and knot vector for ``times``.

    Row order: pass-through at t_0..t_n, then velocity, acceleration, jerk
    at t_0, then velocity, acceleration, jerk at t_n.
    """
    t = np.asarray(times, dtype=float)
    knots = build_knots(t, degree)
    n_end = degree // 2
    x = np.concatenate([t, np.full(n_end, t[0]), np.full(n_end, t[-1])])
    orders = [0] * len(t) + list(range(1, n_end + 1)) * 2
    return _operator_rows(knots, degree, x, orders), knots


def interpolate(times, values, bc: BoundaryConditions | None = None, degree: int = DEGREE) -> JointTrajectory:
    """Interpolating trajectory through key points with end derivatives.

    Args:
        times: Strictly increasing key times t_0..t_n (s).
        values: Key values, shape (n+1,) or (n+1, J) for J joints (deg).
        bc: End velocity / acceleration / jerk; zeros when omitted.

    Returns:
        The trajectory; p(t_k) = q_k and the end derivatives match ``bc``.

    Raises:
        SplineError: If the system is singular or its condition number
            exceeds 1e12.
    """
    t = np.asarray(times, dtype=float)
    _check_times(t)
    q = np.asarray(values, dtype=float)
    if len(q) != len(t):
        raise ValueError("times and values must have the same length")
    bc = bc or BoundaryConditions()
    A, knots = collocation_system(t, degree)

    tail = q.shape[1:]
    ends = [np.broadcast_to(np.asarray(v, dtype=float), tail) for v in (*bc.start(), *bc.end())]
    # solve for offsets from the first key value: basis functions sum to one,
    # so constant data yields exactly constant control points
    base = q[0]
    rhs = np.concatenate([(q - base).reshape((len(t),) + tail), np.stack(ends)])

    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SplineError(f"interpolation system is ill-conditioned (condition number {cond:.3e})")
    try:
        offsets = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise SplineError(f"interpolation system is singular (condition number {cond:.3e})") from exc
    return JointTrajectory(knots, offsets + base, degree)


def evaluate(traj: JointTrajectory, t, order: int = 0):
    """Module-level alias for :meth:`JointTrajectory.evaluate`."""
    return traj.evaluate(t, order)
