"""Seedable random sources.

All stochastic operations in the package take an explicit seed (or an already
constructed Generator).  Generators are backed by the counter-based Philox
bit generator so that hierarchically split streams are reproducible regardless
of the order in which parallel work is scheduled: a child stream is addressed
purely by its spawn key, never by how many draws preceded it.
"""

from __future__ import annotations

from typing import Iterable, Union

import numpy as np

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


def make_rng(seed: SeedLike) -> np.random.Generator:
    """Return a Generator for ``seed``; pass Generators through unchanged."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def child_seed(seed: int, *key: int) -> np.random.SeedSequence:
    """Deterministic child SeedSequence addressed by ``key``.

    ``child_seed(s, a, b)`` depends only on ``(s, a, b)``, so parallel
    schedules that hand out work by index reproduce serial runs bit-for-bit.
    """
    return np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))


def child_rng(seed: int, *key: int) -> np.random.Generator:
    return make_rng(child_seed(seed, *key))


def spawn_rngs(seed: int, n: int, *prefix: int) -> list[np.random.Generator]:
    """n independent Generators under ``prefix``, one per index."""
    return [child_rng(seed, *prefix, i) for i in range(n)]


def draw_multivariate_normal(
    rng: np.random.Generator, mean: np.ndarray, cov: np.ndarray
) -> np.ndarray:
    """Draw N(mean, cov) robustly for PSD (possibly singular) covariances.

    Uses a symmetric eigendecomposition with negative eigenvalues clipped to
    zero, so exactly degenerate posteriors yield exactly deterministic draws.
    """
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    if cov.size == 0:
        return mean.copy()
    w, v = np.linalg.eigh(0.5 * (cov + cov.T))
    w = np.clip(w, 0.0, None)
    z = rng.standard_normal(mean.shape[0])
    return mean + v @ (np.sqrt(w) * z)


def is_iterable_of_ints(key: Iterable) -> bool:
    return all(isinstance(k, (int, np.integer)) for k in key)
