"""NSGA-III with focused-operator screening, and the plain NSGA-III it extends.

One generation of the focused variant:

1. normalize the parent population and measure each member's distance to
   the unit hyperplane;
2. promote the closest members (focused) and drop the farthest
   (non-focused);
3. sort the remainder, derive crossover / mutation probabilities from its
   fitness spread, and breed offspring by binary tournament, SBX and
   polynomial mutation until focused + remainder + offspring = 2N;
4. keep N survivors by reference-direction niching, focused members
   guaranteed.

With zero focused and non-focused members this is exactly NSGA-III.
"""

from __future__ import annotations

import logging
from concurrent.futures import Executor
from dataclasses import dataclass, field, replace

import numpy as np

from nsgafo.core.niching import niching_select
from nsgafo.core.normalization import normalize, plane_distance
from nsgafo.core.operators import polynomial_mutation, sbx_crossover
from nsgafo.core.population import Population, pareto_set, update_archive
from nsgafo.core.reference import ReferenceSet, default_population_size
from nsgafo.core.screening import RateState, adaptive_rates, screen_focused
from nsgafo.core.sorting import fast_nondominated_sort, ranks_from_fronts
from nsgafo.metrics import hypervolume, igd

log = logging.getLogger(__name__)

ALGORITHMS = ("nsga3", "nsga3-fo", "moead")


class EvaluationError(RuntimeError):
    """Objective evaluation failed; ``genes`` holds the offending vector(s)."""

    def __init__(self, message: str, genes: np.ndarray):
        super().__init__(message)
        self.genes = genes


@dataclass(frozen=True)
class AlgorithmConfig:
    algorithm: str = "nsga3-fo"
    pop_size: int | None = None  # None: smallest multiple of 4 >= reference count
    divisions: int = 12
    max_evaluations: int = 20_000
    focused_count: int = 1
    nonfocused_count: int = 1
    sbx_eta: float = 30.0
    pm_eta: float = 20.0
    pc_max: float = 1.0
    pc_min: float = 0.6
    pm_max: float = 1.0
    pm_min: float = 0.5
    seed: int = 0
    moead_neighbors: int = 20

    def population_size(self, n_obj: int) -> int:
        if self.pop_size is not None:
            return self.pop_size
        return default_population_size(n_obj, self.divisions)

    def validate(self, n_obj: int) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        n = self.population_size(n_obj)
        if n < 4 or n % 2:
            raise ValueError(f"population size must be even and >= 4, got {n}")
        if self.divisions < 1:
            raise ValueError("divisions must be >= 1")
        if self.max_evaluations < 1:
            raise ValueError("max_evaluations must be positive")
        if self.focused_count < 0 or self.nonfocused_count < 0:
            raise ValueError("screening counts must be nonnegative")
        if self.focused_count + self.nonfocused_count >= n:
            raise ValueError("focused + non-focused counts must be below the population size")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be an unsigned 64-bit integer")
        RateState(self.pc_max, self.pc_min, self.pm_max, self.pm_min, 0.0, 0.0, 0.0)


@dataclass
class GenerationRecord:
    generation: int
    evaluations: int
    feasible_fraction: float
    best: np.ndarray
    mean: np.ndarray
    front: np.ndarray = field(repr=False)
    archive: np.ndarray = field(repr=False)
    igd: float | None = None
    hv: float | None = None
    archive_hv: float | None = None


@dataclass
class RunTrace:
    config: AlgorithmConfig
    records: list[GenerationRecord] = field(default_factory=list)
    pareto: Population | None = None
    population: Population | None = None

    @property
    def evaluations(self) -> int:
        return self.records[-1].evaluations if self.records else 0

    def fronts(self) -> list[np.ndarray]:
        return [r.front for r in self.records]

    def with_hv(self, ref) -> "RunTrace":
        """Fill per-record HV of the population front and of the archive."""
        ref = np.asarray(ref, dtype=float)
        for rec in self.records:
            rec.hv = hypervolume(rec.front, ref) if len(rec.front) else 0.0
            rec.archive_hv = hypervolume(rec.archive, ref) if len(rec.archive) else 0.0
        return self


@dataclass
class OptimizerState:
    problem: object
    config: AlgorithmConfig
    refs: ReferenceSet
    rng: np.random.Generator
    population: Population
    evaluations: int
    archive: np.ndarray
    trace: RunTrace
    true_front: np.ndarray | None = None
    executor: Executor | None = None
    done: bool = False
    extra: dict = field(default_factory=dict)


def evaluate_population(problem, genes: np.ndarray, executor: Executor | None = None):
    """Evaluate rows of ``genes``; results are in row order whatever the executor."""
    try:
        if executor is None:
            F, cv = problem.evaluate_batch(genes)
        else:
            results = list(executor.map(problem.evaluate, list(genes)))
            F = np.array([r[0] for r in results], dtype=float).reshape(len(genes), -1)
            cv = np.array([r[1] for r in results], dtype=float)
    except EvaluationError:
        raise
    except Exception as exc:
        raise EvaluationError(f"evaluation failed: {exc}", genes.copy()) from exc
    F = np.asarray(F, dtype=float)
    cv = np.asarray(cv, dtype=float)
    bad = ~(np.all(np.isfinite(F), axis=1) & np.isfinite(cv))
    if bad.any():
        raise EvaluationError("non-finite objective values", genes[bad].copy())
    return F, np.maximum(cv, 0.0)


def _record(state: OptimizerState) -> None:
    pop = state.population
    front = pareto_set(pop)
    feas = pop.feasible
    F = pop.objectives
    rec = GenerationRecord(
        generation=pop.generation,
        evaluations=state.evaluations,
        feasible_fraction=float(feas.mean()),
        best=F.min(axis=0),
        mean=F.mean(axis=0),
        front=front.objectives.copy() if front.feasible.all() and len(front) else np.zeros((0, F.shape[1])),
        archive=state.archive,
    )
    if state.true_front is not None and len(rec.front):
        rec.igd = igd(rec.front, state.true_front)
    state.trace.records.append(rec)


def initialize(
    problem,
    config: AlgorithmConfig,
    true_front: np.ndarray | None = None,
    executor: Executor | None = None,
) -> OptimizerState:
    """Validate the configuration, draw and evaluate the initial population."""
    config.validate(problem.n_obj)
    rng = np.random.default_rng(config.seed)
    refs = ReferenceSet.from_divisions(problem.n_obj, config.divisions)
    # MOEA/D keeps one member per weight vector
    n = len(refs) if config.algorithm == "moead" else config.population_size(problem.n_obj)
    genes = _repair(problem, problem.lower + rng.random((n, problem.n_var)) * (problem.upper - problem.lower))
    F, cv = evaluate_population(problem, genes, executor)
    pop = Population(genes, F, cv, generation=0)
    archive = update_archive(np.zeros((0, problem.n_obj)), F[cv <= 0.0])
    state = OptimizerState(
        problem=problem,
        config=config,
        refs=refs,
        rng=rng,
        population=pop,
        evaluations=n,
        archive=archive,
        trace=RunTrace(config),
        true_front=None if true_front is None else np.asarray(true_front, dtype=float),
        executor=executor,
    )
    if config.algorithm == "moead":
        from nsgafo.core.moead import setup as moead_setup

        moead_setup(state)
    _record(state)
    return state


def _repair(problem, genes: np.ndarray) -> np.ndarray:
    # optional problem hook mapping raw genes onto its representable set
    fix = getattr(problem, "repair", None)
    return genes if fix is None else np.asarray(fix(genes), dtype=float)


def _tournament(rank: np.ndarray, dist: np.ndarray, n_parents: int, rng) -> np.ndarray:
    cand = rng.integers(0, len(rank), size=(n_parents, 2))
    a, b = cand[:, 0], cand[:, 1]
    a_wins = (rank[a] < rank[b]) | ((rank[a] == rank[b]) & (dist[a] <= dist[b]))
    return np.where(a_wins, a, b)


def make_offspring(
    genes: np.ndarray,
    rank: np.ndarray,
    dist: np.ndarray,
    n_offspring: int,
    pc: float,
    pm: float,
    problem,
    config: AlgorithmConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Tournament selection followed by SBX and polynomial mutation.

    ``pm`` scales the per-gene mutation probability 1 / n_var.
    """
    n_pairs = -(-n_offspring // 2)
    parents = _tournament(rank, dist, 2 * n_pairs, rng)
    lo, hi = problem.lower, problem.upper
    gene_pm = pm / problem.n_var
    children = np.empty((2 * n_pairs, problem.n_var))
    for p in range(n_pairs):
        a = genes[parents[2 * p]]
        b = genes[parents[2 * p + 1]]
        if rng.random() < pc:
            c1, c2 = sbx_crossover(a, b, lo, hi, config.sbx_eta, rng)
        else:
            c1, c2 = a.copy(), b.copy()
        children[2 * p] = polynomial_mutation(c1, lo, hi, config.pm_eta, gene_pm, rng)
        children[2 * p + 1] = polynomial_mutation(c2, lo, hi, config.pm_eta, gene_pm, rng)
    return _repair(problem, children[:n_offspring])


def _offspring_count(state: OptimizerState) -> int:
    cfg = state.config
    n = len(state.population)
    if cfg.algorithm == "nsga3-fo":
        return n + cfg.nonfocused_count
    return n


def evolve_generation(state: OptimizerState) -> OptimizerState:
    """Advance one generation in place, or mark the state done when the
    remaining budget cannot pay for a full set of offspring."""
    cfg = state.config
    if state.done:
        return state
    if state.evaluations + _offspring_count(state) > cfg.max_evaluations:
        state.done = True
        return state
    if cfg.algorithm == "moead":
        from nsgafo.core.moead import moead_generation

        moead_generation(state)
    else:
        _nsga3_generation(state, focused=cfg.algorithm == "nsga3-fo")
    _record(state)
    return state


def _nsga3_generation(state: OptimizerState, focused: bool) -> None:
    cfg, pop, rng, problem = state.config, state.population, state.rng, state.problem
    n = len(pop)

    dist = plane_distance(normalize(pop.objectives, state.refs))

    if focused:
        promoted, excluded, rest = screen_focused(dist, cfg.focused_count, cfg.nonfocused_count)
        pool = pop.take(rest)
        pool_dist = dist[rest]
        fitness = -pool_dist
        pc, pm = adaptive_rates(
            RateState.from_fitness(fitness, cfg.pc_max, cfg.pc_min, cfg.pm_max, cfg.pm_min)
        )
        n_off = n + cfg.nonfocused_count
    else:
        promoted = excluded = np.zeros(0, dtype=int)
        pool = pop
        pool_dist = dist
        pc, pm = cfg.pc_max, cfg.pm_max
        n_off = n

    rank = ranks_from_fronts(fast_nondominated_sort(pool.objectives, pool.violation), len(pool))
    kids = make_offspring(pool.genes, rank, pool_dist, n_off, pc, pm, problem, cfg, rng)
    F, cv = evaluate_population(problem, kids, state.executor)
    state.evaluations += len(kids)
    offspring = Population(kids, F, cv, pop.generation + 1)
    state.archive = update_archive(state.archive, F[cv <= 0.0])

    merged = Population.concat(pop.take(promoted), pool, offspring)
    forced = np.arange(len(promoted))
    keep = niching_select(merged.objectives, merged.violation, state.refs, n, rng, forced=forced)
    nxt = merged.take(keep)
    nxt.generation = pop.generation + 1
    state.population = nxt
    state.extra["last_rates"] = (pc, pm)
    state.extra["last_promoted"] = pop.genes[promoted].copy()
    state.extra["last_screening"] = (dist[promoted], dist[excluded])
    state.extra["last_merged_size"] = len(merged)


def run(
    problem,
    config: AlgorithmConfig,
    true_front: np.ndarray | None = None,
    executor: Executor | None = None,
    hv_ref=None,
) -> RunTrace:
    """Run one optimization until the evaluation budget is spent.

    Args:
        problem: Object with ``n_var``, ``n_obj``, ``lower``, ``upper`` and
            ``evaluate_batch`` / ``evaluate``.
        config: Algorithm settings; validated before any evaluation.
        true_front: Reference front for per-generation IGD.
        executor: Optional executor for objective evaluation only.
        hv_ref: When given, per-generation HV is filled in.

    Returns:
        The trace, with ``pareto`` set to the final population's
        nondominated (feasible-first) members.
    """
    state = initialize(problem, config, true_front, executor)
    while not state.done:
        evolve_generation(state)
    trace = state.trace
    trace.population = state.population
    trace.pareto = pareto_set(state.population)
    if hv_ref is not None:
        trace.with_hv(hv_ref)
    log.debug(
        "%s seed=%d finished: %d generations, %d evaluations",
        config.algorithm,
        config.seed,
        state.population.generation,
        state.evaluations,
    )
    return trace


def with_algorithm(config: AlgorithmConfig, algorithm: str, **changes) -> AlgorithmConfig:
    return replace(config, algorithm=algorithm, **changes)
