"""Induced subgraph games: coalition value as the sum of pairwise weights.

Instances come either from a least-squares fit against a coalition value
oracle (every nonempty coalition weighted equally) or from the random
Gaussian edge model used for large benchmarks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .energy import Coalition

FIT_CAP = 20


class IsgError(ValueError):
    pass


@dataclass(frozen=True)
class IsgMeta:
    source: str  # "fitted" | "random"
    sigma: float | None = None
    density: float | None = None
    seed: int | None = None
    residual: float | None = None


@dataclass(frozen=True)
class IsgInstance:
    """Symmetric pairwise weight matrix with zero diagonal."""

    n: int
    weights: np.ndarray
    meta: IsgMeta

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if w.shape != (self.n, self.n):
            raise IsgError("weight matrix shape must be n x n")
        if not np.array_equal(w, w.T):
            raise IsgError("weight matrix must be symmetric")
        if np.any(np.diagonal(w) != 0.0):
            raise IsgError("weight matrix diagonal must be zero")

    @property
    def density(self) -> float:
        """Fraction of nonzero upper-triangle entries."""
        iu = np.triu_indices(self.n, k=1)
        total = iu[0].size
        return float(np.count_nonzero(self.weights[iu]) / total) if total else 0.0

    def value_oracle(self) -> Callable[[Coalition], float]:
        return lambda coalition: isg_value(self, coalition)


def isg_value(instance: IsgInstance, coalition: Coalition) -> float:
    """Sum of pairwise weights among coalition members; singletons are zero."""
    members = coalition.sorted_members()
    if members[-1] >= instance.n:
        raise IsgError("coalition member outside instance")
    idx = np.array(members)
    sub = instance.weights[np.ix_(idx, idx)]
    return float(np.triu(sub, k=1).sum())


def pair_index(n: int) -> list[tuple[int, int]]:
    """Upper-triangle pairs in lexicographic order; fixes the fit's unknown ordering."""
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def fit_gram_matrix(n: int) -> np.ndarray:
    """Closed-form normal-equation Gram: entry for pairs p, q counts the
    coalitions containing their union, i.e. 2**(n - |p ∪ q|)."""
    pairs = pair_index(n)
    P = len(pairs)
    gram = np.empty((P, P))
    for a, (i, j) in enumerate(pairs):
        for b, (k, l) in enumerate(pairs):
            union = len({i, j, k, l})
            gram[a, b] = 2.0 ** (n - union)
    return gram


def fit_isg(oracle: Callable[[Coalition], float], n: int) -> IsgInstance:
    """Least-squares pairwise weights minimizing the squared error of the
    pairwise-sum approximation over all 2**n - 1 nonempty coalitions.

    Solved by normal equations with the closed-form Gram matrix and a dense
    Cholesky factorization; a non-positive-definite Gram is an error.
    """
    if n < 2:
        raise IsgError("no pairs to fit (n < 2)")
    if n > FIT_CAP:
        raise IsgError(f"fit limited to n <= {FIT_CAP} (cost grows as 2^n)")

    size = 1 << n
    values = np.empty(size)
    values[0] = 0.0
    for mask in range(1, size):
        values[mask] = oracle(Coalition.from_mask(mask))

    pairs = pair_index(n)
    masks = np.arange(size, dtype=np.int64)
    bits = np.empty((size, n), dtype=np.int8)
    for k in range(n):
        bits[:, k] = (masks >> k) & 1

    # one pass over all coalitions per pair: rhs[(i,j)] = sum of v over supersets of {i,j}
    rhs = np.empty(len(pairs))
    for a, (i, j) in enumerate(pairs):
        rhs[a] = float(values @ (bits[:, i] & bits[:, j]))

    gram = fit_gram_matrix(n)
    try:
        w_flat = cho_solve(cho_factor(gram, lower=True), rhs)
    except np.linalg.LinAlgError as exc:
        raise IsgError(f"normal-equation Gram not positive definite: {exc}") from exc

    weights = np.zeros((n, n))
    for a, (i, j) in enumerate(pairs):
        weights[i, j] = weights[j, i] = w_flat[a]

    # root-mean-square residual over every nonempty coalition
    predicted = np.zeros(size)
    for a, (i, j) in enumerate(pairs):
        predicted += w_flat[a] * (bits[:, i] & bits[:, j])
    resid = values[1:] - predicted[1:]
    rms = float(np.sqrt(np.mean(resid ** 2)))

    dens = float(np.count_nonzero(w_flat) / len(pairs))
    return IsgInstance(n=n, weights=weights,
                       meta=IsgMeta(source="fitted", sigma=None, density=dens,
                                    seed=None, residual=rms))


def random_isg(n: int, sigma: float = 0.2, density: float = 0.95, seed: int = 0) -> IsgInstance:
    """Random instance: upper-triangle weights iid Normal(0, sigma^2), each kept
    with probability `density`, mirrored to symmetry."""
    if n < 2:
        raise IsgError("need n >= 2")
    if sigma <= 0:
        raise IsgError("sigma must be positive")
    if not 0.0 < density <= 1.0:
        raise IsgError("density must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    weights = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    draws = rng.normal(0.0, sigma, size=iu[0].size)
    keep = rng.random(iu[0].size) < density
    weights[iu] = np.where(keep, draws, 0.0)
    weights += weights.T
    return IsgInstance(n=n, weights=weights,
                       meta=IsgMeta(source="random", sigma=sigma, density=density,
                                    seed=seed, residual=None))


def isg_to_json(instance: IsgInstance) -> str:
    entries = [[i, j, float(instance.weights[i, j])]
               for i, j in pair_index(instance.n) if instance.weights[i, j] != 0.0]
    doc = {
        "n": instance.n,
        "weights": entries,
        "meta": {
            "source": instance.meta.source,
            "sigma": instance.meta.sigma,
            "density": instance.meta.density,
            "seed": instance.meta.seed,
            "residual": instance.meta.residual,
        },
    }
    return json.dumps(doc, indent=2)


def isg_from_json(text: str) -> IsgInstance:
    doc = json.loads(text)
    n = int(doc["n"])
    weights = np.zeros((n, n))
    for i, j, w in doc["weights"]:
        i, j = int(i), int(j)
        if not 0 <= i < j < n:
            raise IsgError(f"bad weight entry ({i}, {j})")
        weights[i, j] = weights[j, i] = float(w)
    meta = doc.get("meta", {})
    return IsgInstance(n=n, weights=weights,
                       meta=IsgMeta(source=str(meta.get("source", "random")),
                                    sigma=meta.get("sigma"),
                                    density=meta.get("density"),
                                    seed=meta.get("seed"),
                                    residual=meta.get("residual")))
