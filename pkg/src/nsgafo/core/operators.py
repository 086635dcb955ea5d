"""Bounded real-coded variation: simulated binary crossover and polynomial mutation."""

from __future__ import annotations

import numpy as np


def sbx_crossover(
    a: np.ndarray,
    b: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    eta: float,
    rng: np.random.Generator,
    gene_prob: float = 0.5,
) -> tuple[np.ndarray, np.ndarray]:
    """Simulated binary crossover of two parents.

    Each gene is recombined with probability ``gene_prob``. A recombined gene
    uses one spread factor for both children, so child genes sit
    symmetrically around the parents' midpoint; the spread distribution is
    truncated at the nearer bound, which keeps both children inside
    [lower, upper] without clipping. Children then swap each gene with
    probability 1/2.

    Args:
        a, b: Parent gene vectors of equal length.
        lower, upper: Per-gene bounds.
        eta: Distribution index; larger values keep children near the parents.
        rng: Random stream. Always consumes three draws per gene.
        gene_prob: Per-gene recombination probability.

    Returns:
        Two child gene vectors.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.size
    u = rng.random(n)
    do = rng.random(n) < gene_prob
    swap = rng.random(n) < 0.5

    y1 = np.minimum(a, b)
    y2 = np.maximum(a, b)
    diff = y2 - y1
    do &= diff > 1e-14

    c1 = a.copy()
    c2 = b.copy()
    if do.any():
        y1d, y2d, dd = y1[do], y2[do], diff[do]
        lo, hi, ud = lower[do], upper[do], u[do]
        room = np.maximum(np.minimum(y1d - lo, hi - y2d), 0.0)
        beta_bound = 1.0 + 2.0 * room / dd
        alpha = 2.0 - beta_bound ** (-(eta + 1.0))
        inv = 1.0 / (eta + 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            betaq = np.where(
                ud <= 1.0 / alpha,
                (ud * alpha) ** inv,
                (1.0 / (2.0 - ud * alpha)) ** inv,
            )
        total = y1d + y2d
        hi_child = np.minimum(0.5 * total + 0.5 * betaq * dd, hi)
        # the low child is the exact complement when mid <= hi_child <= 2 * total
        # (Sterbenz), which keeps the children's mean equal to the parents'
        lo_child = total - hi_child
        low = lo_child < lo
        hi_child = np.where(low, total - lo, hi_child)
        lo_child = np.where(low, lo, lo_child)
        c1[do] = lo_child
        c2[do] = hi_child

    c1s = np.where(swap, c2, c1)
    c2s = np.where(swap, c1, c2)
    return c1s, c2s


def polynomial_mutation(
    genes: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    eta: float,
    prob: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Polynomial mutation with per-gene probability ``prob``.

    ``prob == 0`` returns an unchanged copy. Always consumes two draws per gene.
    """
    x = np.asarray(genes, dtype=float).copy()
    n = x.size
    hit = rng.random(n) < prob
    u = rng.random(n)
    width = upper - lower
    hit &= width > 0
    if not hit.any():
        return x

    xl, xu, w, y, uu = lower[hit], upper[hit], width[hit], x[hit], u[hit]
    d1 = (y - xl) / w
    d2 = (xu - y) / w
    power = 1.0 / (eta + 1.0)
    left = uu < 0.5
    xy = np.where(left, 1.0 - d1, 1.0 - d2)
    val = np.where(
        left,
        2.0 * uu + (1.0 - 2.0 * uu) * xy ** (eta + 1.0),
        2.0 * (1.0 - uu) + 2.0 * (uu - 0.5) * xy ** (eta + 1.0),
    )
    deltaq = np.where(left, val**power - 1.0, 1.0 - val**power)
    x[hit] = np.clip(y + deltaq * w, xl, xu)
    return x
