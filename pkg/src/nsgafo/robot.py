"""Time / jerk / energy objectives for joint-space trajectory planning.

Decision variables are the free segment durations between consecutive key
points; dwell segments with a fixed duration are spliced in. Every joint
follows a degree-6 interpolating spline over the resulting time vector.

Objectives (all minimized):

- f1: total motion time t_n - t_0 (s)
- f2: sum over joints of the RMS jerk (deg/s^3)
- f3: sum over joints of the RMS mechanical power |omega * tau| (W)

Joint torque uses a decoupled per-joint model
``tau = I * alpha + c * omega + g * cos(q)`` with alpha in rad/s^2, omega in
deg/s for the viscous term (c is per degree) and q in radians for gravity.
Power uses omega in rad/s.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from nsgafo.problems import Problem
from nsgafo.spline import BoundaryConditions, JointTrajectory, interpolate

DEG = math.pi / 180.0
DEFAULT_SAMPLES = 1000
# optimizer genes live on a 2**-40 s grid: sums below 2**13 s are then
# exact, so time-vector differences reproduce every duration bit for bit
DURATION_GRID_BITS = 40

_COMPARATORS = {
    "lt": np.less,
    "le": np.less_equal,
}


@dataclass(frozen=True)
class ArmModel:
    """Per-joint dynamics parameters and motion limits.

    The bundled defaults are placeholders chosen for a plausible
    time/energy trade-off; they are not measured values for any real arm.
    ``v_max`` (end-effector speed) is carried for completeness but not
    checked: there is no forward kinematics here.
    """

    inertia: np.ndarray  # kg m^2
    viscous: np.ndarray  # N m s / deg
    gravity: np.ndarray  # N m
    tau_max: np.ndarray  # N m
    omega_max: np.ndarray  # deg/s
    jerk_max: np.ndarray  # deg/s^3
    v_max: float | None = None
    name: str = "model"

    def __post_init__(self):
        n = len(np.atleast_1d(self.inertia))
        for f in ("inertia", "viscous", "gravity", "tau_max", "omega_max", "jerk_max"):
            arr = np.broadcast_to(np.asarray(getattr(self, f), dtype=float), (n,)).copy()
            object.__setattr__(self, f, arr)
        for f in ("tau_max", "omega_max", "jerk_max"):
            if np.any(getattr(self, f) < 0):
                raise ValueError(f"{f} must be nonnegative")

    @property
    def joint_count(self) -> int:
        return len(self.inertia)

    @classmethod
    def default(cls) -> "ArmModel":
        return load_model(None)

    @classmethod
    def from_dict(cls, data) -> "ArmModel":
        joints = data["joints"] if isinstance(data, dict) else data
        col = lambda key: [float(j[key]) for j in joints]  # noqa: E731
        return cls(
            inertia=col("inertia"),
            viscous=col("viscous"),
            gravity=col("gravity"),
            tau_max=col("tauMax"),
            omega_max=col("omegaMax"),
            jerk_max=col("jerkMax"),
            v_max=data.get("vMax") if isinstance(data, dict) else None,
            name=data.get("name", "model") if isinstance(data, dict) else "model",
        )

    def torque(self, q, omega, alpha) -> np.ndarray:
        """Joint torque from angle (deg), velocity (deg/s) and acceleration (deg/s^2)."""
        return self.inertia * (alpha * DEG) + self.viscous * omega + self.gravity * np.cos(q * DEG)


@dataclass(frozen=True)
class Threshold:
    op: str
    value: float

    def accepts(self, x):
        return _COMPARATORS[self.op](x, self.value)

    def __str__(self) -> str:
        return f"{'<' if self.op == 'lt' else '<='} {self.value:g}"


def _parse_threshold(spec) -> Threshold:
    if isinstance(spec, (int, float)):
        return Threshold("lt", float(spec))
    if isinstance(spec, dict) and len(spec) == 1:
        (op, value), = spec.items()
        if op in _COMPARATORS:
            return Threshold(op, float(value))
    raise ValueError(f"bad threshold {spec!r}; use a number (strict) or {{'lt'|'le': value}}")


def _parse_boundary(data: dict | None) -> BoundaryConditions:
    data = data or {}
    unknown = set(data) - {"vs", "ve", "as", "ae", "js", "je"}
    if unknown:
        raise ValueError(f"unknown boundary keys {sorted(unknown)}")
    get = lambda k: np.asarray(data.get(k, 0.0), dtype=float)  # noqa: E731
    return BoundaryConditions(get("vs"), get("ve"), get("as"), get("ae"), get("js"), get("je"))


@dataclass(frozen=True)
class TrajectoryTask:
    """Key points (nodes x joints, deg) plus timing rules and acceptance caps.

    ``fixed_segments`` maps a segment index (segment i joins key points i
    and i+1, zero-based) to a fixed duration in seconds.
    """

    key_points: np.ndarray
    fixed_segments: dict = field(default_factory=dict)
    interval_bounds: tuple[float, float] = (0.5, 10.0)
    boundary: BoundaryConditions = field(default_factory=BoundaryConditions)
    thresholds: dict = field(default_factory=dict)
    name: str = "task"

    def __post_init__(self):
        kp = np.asarray(self.key_points, dtype=float)
        if kp.ndim != 2 or len(kp) < 2:
            raise ValueError("key points must be a (nodes >= 2, joints) matrix")
        object.__setattr__(self, "key_points", kp)
        n_seg = len(kp) - 1
        fixed = {int(k): float(v) for k, v in dict(self.fixed_segments).items()}
        for idx, dur in fixed.items():
            if not 0 <= idx < n_seg:
                raise ValueError(f"fixed segment index {idx} outside 0..{n_seg - 1}")
            if dur <= 0:
                raise ValueError("fixed segment durations must be positive")
        if len(fixed) == n_seg:
            raise ValueError("every segment is fixed; nothing left to optimize")
        object.__setattr__(self, "fixed_segments", fixed)
        lo, hi = (float(x) for x in self.interval_bounds)
        if not 0 < lo <= hi:
            raise ValueError("interval bounds need 0 < hmin <= hmax")
        object.__setattr__(self, "interval_bounds", (lo, hi))

    @property
    def n_joints(self) -> int:
        return self.key_points.shape[1]

    @property
    def n_segments(self) -> int:
        return len(self.key_points) - 1

    @property
    def free_segments(self) -> list[int]:
        return [i for i in range(self.n_segments) if i not in self.fixed_segments]

    @classmethod
    def from_dict(cls, data: dict) -> "TrajectoryTask":
        return cls(
            key_points=data["keyPoints"],
            fixed_segments={s["index"]: s["duration"] for s in data.get("fixedSegments", [])},
            interval_bounds=tuple(data.get("intervalBounds", (0.5, 10.0))),
            boundary=_parse_boundary(data.get("boundary")),
            thresholds={k: _parse_threshold(v) for k, v in (data.get("thresholds") or {}).items()},
            name=data.get("name", "task"),
        )

    def accepts(self, objectives: np.ndarray) -> np.ndarray:
        """Mask of objective rows (f1, f2, f3) that meet every threshold."""
        F = np.atleast_2d(objectives)
        ok = np.ones(len(F), dtype=bool)
        for key, th in self.thresholds.items():
            col = int(key.lstrip("f")) - 1
            ok &= th.accepts(F[:, col])
        return ok


def _read_json(source, bundled_dir: str):
    if isinstance(source, dict):
        return source
    path = Path(source)
    if path.exists():
        return json.loads(path.read_text())
    name = str(source)
    if not name.endswith(".json"):
        name += ".json"
    res = resources.files("nsgafo") / "data" / bundled_dir / name
    if res.is_file():
        return json.loads(res.read_text())
    raise FileNotFoundError(f"no file or bundled {bundled_dir[:-1]} named {source!r}")


def load_task(source) -> TrajectoryTask:
    """Task from a JSON path, a bundled name (``table2``, ``task1``, ``task2``) or a dict."""
    return TrajectoryTask.from_dict(_read_json(source, "tasks"))


def load_model(source=None) -> ArmModel:
    """Arm model from a JSON path, a dict, or the bundled default when None."""
    return ArmModel.from_dict(_read_json("default" if source is None else source, "models"))


def bundled_tasks() -> list[str]:
    folder = resources.files("nsgafo") / "data" / "tasks"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def segment_durations(genes, task: TrajectoryTask) -> np.ndarray:
    """Full segment-duration vector: free genes in order, fixed ones spliced in."""
    genes = np.asarray(genes, dtype=float)
    free = task.free_segments
    if genes.shape != (len(free),):
        raise ValueError(f"expected {len(free)} free durations, got shape {genes.shape}")
    out = np.empty(task.n_segments)
    out[free] = genes
    for idx, dur in task.fixed_segments.items():
        out[idx] = dur
    return out


def time_vector(durations) -> np.ndarray:
    """Passage times starting at 0; entry k is the correctly rounded sum of
    the first k durations."""
    d = [float(x) for x in durations]
    return np.array([0.0] + [math.fsum(d[: k + 1]) for k in range(len(d))])


def time_vector_from_genes(genes, task: TrajectoryTask) -> np.ndarray:
    return time_vector(segment_durations(genes, task))


@dataclass(frozen=True)
class ObjectiveEvaluation:
    f1: float
    f2: float
    f3: float
    violation: float
    samples: int

    @property
    def objectives(self) -> np.ndarray:
        return np.array([self.f1, self.f2, self.f3])


@dataclass(frozen=True)
class ConstraintReport:
    """Peak |value| per joint for each limited quantity, with margins (limit - peak)."""

    peaks: dict
    limits: dict
    violation: float

    @property
    def margins(self) -> dict:
        return {k: self.limits[k] - self.peaks[k] for k in self.peaks}

    @property
    def feasible(self) -> bool:
        return self.violation == 0.0


def build_trajectory(task: TrajectoryTask, times) -> JointTrajectory:
    times = np.asarray(times, dtype=float)
    if len(times) != len(task.key_points):
        raise ValueError("time vector length must match the number of key points")
    return interpolate(times, task.key_points, task.boundary)


def _sample(task, times, samples):
    if samples < 2:
        raise ValueError("need at least 2 samples")
    traj = build_trajectory(task, times)
    ts = np.linspace(times[0], times[-1], samples)
    q, omega, alpha, jerk = traj.evaluate_all(ts)
    return ts, q, omega, alpha, jerk


def _rms(ts: np.ndarray, values: np.ndarray) -> np.ndarray:
    T = ts[-1] - ts[0]
    return np.sqrt(np.trapezoid(values**2, ts, axis=0) / T)


def _constraint_report(model: ArmModel, q, omega, alpha, jerk) -> ConstraintReport:
    tau = model.torque(q, omega, alpha)
    peaks = {
        "torque": np.abs(tau).max(axis=0),
        "jerk": np.abs(jerk).max(axis=0),
        "omega": np.abs(omega).max(axis=0),
    }
    limits = {"torque": model.tau_max, "jerk": model.jerk_max, "omega": model.omega_max}
    total = 0.0
    for key, peak in peaks.items():
        lim = limits[key]
        excess = np.maximum(peak - lim, 0.0)
        total += float(np.sum(np.where(lim > 0, excess / np.where(lim > 0, lim, 1.0), excess)))
    return ConstraintReport(peaks, limits, total)


def evaluate_objectives(
    task: TrajectoryTask, times, model: ArmModel, samples: int = DEFAULT_SAMPLES
) -> ObjectiveEvaluation:
    """Objectives and aggregate constraint violation for one time vector.

    Each limit contributes the relative excess of its peak over the sample
    grid, (peak - limit) / limit, summed over joints and quantities; a zero
    limit contributes the raw peak.
    """
    times = np.asarray(times, dtype=float)
    if model.joint_count != task.n_joints:
        raise ValueError("model joint count does not match the task")
    ts, q, omega, alpha, jerk = _sample(task, times, samples)
    power = (omega * DEG) * model.torque(q, omega, alpha)
    report = _constraint_report(model, q, omega, alpha, jerk)
    return ObjectiveEvaluation(
        f1=float(times[-1] - times[0]),
        f2=float(np.sum(_rms(ts, jerk))),
        f3=float(np.sum(_rms(ts, power))),
        violation=report.violation,
        samples=samples,
    )


def check_constraints(
    task: TrajectoryTask, times, model: ArmModel, samples: int = DEFAULT_SAMPLES
) -> ConstraintReport:
    """Per-joint peaks and margins for torque, jerk and angular velocity."""
    _, q, omega, alpha, jerk = _sample(task, np.asarray(times, dtype=float), samples)
    return _constraint_report(model, q, omega, alpha, jerk)


class TaskProblem(Problem):
    """A trajectory task exposed as a 3-objective box-bounded problem."""

    name = "task"

    def __init__(self, task: TrajectoryTask, model: ArmModel, samples: int = DEFAULT_SAMPLES):
        if model.joint_count != task.n_joints:
            raise ValueError(
                f"model has {model.joint_count} joints, task has {task.n_joints}"
            )
        if samples < 100:
            raise ValueError("use at least 100 samples per evaluation")
        self.task, self.model, self.samples = task, model, samples
        self.name = task.name
        lo, hi = task.interval_bounds
        super().__init__(len(task.free_segments), 3, lo, hi)

    def repair(self, genes: np.ndarray) -> np.ndarray:
        """Snap durations to the 2**-40 s grid (inside the bounds).

        Passage times of snapped genes are exact binary sums, so each
        segment, fixed dwells included, is recovered exactly as a
        difference of consecutive passage times.
        """
        snapped = np.ldexp(np.round(np.ldexp(genes, DURATION_GRID_BITS)), -DURATION_GRID_BITS)
        return np.clip(snapped, self.lower, self.upper)

    def evaluate(self, genes):
        ev = evaluate_objectives(self.task, time_vector_from_genes(genes, self.task), self.model, self.samples)
        return ev.objectives, ev.violation


def make_task_problem(task: TrajectoryTask, model: ArmModel | None = None, samples: int = DEFAULT_SAMPLES) -> TaskProblem:
    return TaskProblem(task, model or ArmModel.default(), samples)
