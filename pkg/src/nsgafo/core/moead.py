"""Minimal MOEA/D (Tchebycheff) used only as a comparison curve."""

from __future__ import annotations

import numpy as np

from nsgafo.core.operators import polynomial_mutation, sbx_crossover
from nsgafo.core.population import Population, update_archive


def _tchebycheff(F: np.ndarray, weights: np.ndarray, ideal: np.ndarray) -> np.ndarray:
    return np.max(weights * np.abs(F - ideal), axis=-1)


def setup(state) -> None:
    W = np.maximum(state.refs.points, 1e-6)
    T = min(state.config.moead_neighbors, len(W))
    d = np.linalg.norm(W[:, None, :] - W[None, :, :], axis=2)
    state.extra["weights"] = W
    state.extra["neighbors"] = np.argsort(d, axis=1, kind="stable")[:, :T]
    state.extra["ideal"] = state.population.objectives.min(axis=0)


def moead_generation(state) -> None:
    from nsgafo.core.algorithm import _repair, evaluate_population

    cfg, rng, problem = state.config, state.rng, state.problem
    pop = state.population
    W = state.extra["weights"]
    B = state.extra["neighbors"]
    n = len(pop)
    lo, hi = problem.lower, problem.upper

    kids = np.empty((n, problem.n_var))
    for i in range(n):
        k, l = B[i, rng.choice(B.shape[1], size=2, replace=False)]
        if rng.random() < cfg.pc_max:
            child, _ = sbx_crossover(pop.genes[k], pop.genes[l], lo, hi, cfg.sbx_eta, rng)
        else:
            child = pop.genes[k].copy()
        kids[i] = polynomial_mutation(child, lo, hi, cfg.pm_eta, cfg.pm_max / problem.n_var, rng)

    kids = _repair(problem, kids)
    F, cv = evaluate_population(problem, kids, state.executor)
    state.evaluations += n
    state.archive = update_archive(state.archive, F[cv <= 0.0])

    genes = pop.genes.copy()
    objs = pop.objectives.copy()
    viol = pop.violation.copy()
    ideal = state.extra["ideal"]
    for i in range(n):
        ideal = np.minimum(ideal, F[i])
        nb = B[i]
        g_new = _tchebycheff(F[i], W[nb], ideal)
        g_old = _tchebycheff(objs[nb], W[nb], ideal)
        better = np.where(
            (cv[i] <= 0) & (viol[nb] <= 0),
            g_new <= g_old,
            cv[i] < viol[nb],
        )
        idx = nb[better]
        genes[idx] = kids[i]
        objs[idx] = F[i]
        viol[idx] = cv[i]
    state.extra["ideal"] = ideal
    state.population = Population(genes, objs, viol, pop.generation + 1)
