"""Bipartition objective for a coalition's induced subgraph.

The split QUBO scores a binary labeling by the signed weight it cuts:
variables with equal bits stay in the same subcoalition, and
energy(x) = sum of weights on edges crossing the labeling.  Negative-energy
labelings are value-increasing splits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energy import Coalition
from .isg import IsgInstance


class QuboError(ValueError):
    pass


@dataclass(frozen=True)
class QuboInstance:
    """Reduced triangular form: energy(x) = offset + h.x + sum_{i<j} q_ij x_i x_j."""

    size: int
    linear: np.ndarray
    quadratic: dict[tuple[int, int], float]
    offset: float
    var_map: tuple[int, ...]  # local variable index -> global agent id

    def __post_init__(self):
        h = np.asarray(self.linear, dtype=float)
        object.__setattr__(self, "linear", h)
        if h.shape != (self.size,):
            raise QuboError("linear term must have one entry per variable")
        if len(self.var_map) != self.size:
            raise QuboError("var_map must have one entry per variable")
        for i, j in self.quadratic:
            if not 0 <= i < j < self.size:
                raise QuboError(f"quadratic key ({i}, {j}) must satisfy i < j")

    def dense_quadratic(self) -> np.ndarray:
        """Symmetric coupling matrix M with M[i, j] = M[j, i] = q_ij, zero diagonal."""
        m = np.zeros((self.size, self.size))
        for (i, j), q in self.quadratic.items():
            m[i, j] = m[j, i] = q
        return m

    def upper_quadratic(self) -> np.ndarray:
        """Strictly upper-triangular coupling matrix."""
        m = np.zeros((self.size, self.size))
        for (i, j), q in self.quadratic.items():
            m[i, j] = q
        return m


@dataclass(frozen=True)
class IsingInstance:
    """Spin form over s in {-1, +1}: energy(s) = offset + h.s + sum_{i<j} J_ij s_i s_j."""

    fields: np.ndarray
    couplings: dict[tuple[int, int], float]
    offset: float

    @property
    def size(self) -> int:
        return int(self.fields.size)

    def dense_couplings(self) -> np.ndarray:
        m = np.zeros((self.size, self.size))
        for (i, j), val in self.couplings.items():
            m[i, j] = m[j, i] = val
        return m


def build_split_qubo(instance: IsgInstance, coalition: Coalition) -> QuboInstance:
    """QUBO whose energy is the signed cut of the coalition's induced subgraph.

    For symmetric weights w the reduction is h_i = sum_j w_ij, q_ij = -2 w_ij,
    offset 0, so that energy(x) = sum_{i<j} w_ij * [x_i != x_j].
    """
    members = coalition.sorted_members()
    if len(members) < 2:
        raise QuboError("nothing to split (coalition smaller than 2)")
    if members[-1] >= instance.n:
        raise QuboError("coalition member outside instance")
    idx = np.array(members)
    sub = instance.weights[np.ix_(idx, idx)]
    m = len(members)
    linear = sub.sum(axis=1)
    quadratic = {}
    for i in range(m):
        for j in range(i + 1, m):
            w = sub[i, j]
            if w != 0.0:
                quadratic[(i, j)] = -2.0 * w
    return QuboInstance(size=m, linear=linear, quadratic=quadratic, offset=0.0,
                        var_map=tuple(members))


def energy(qubo: QuboInstance, x: np.ndarray) -> float:
    """Exact double-precision energy of assignment `x`."""
    x = np.asarray(x, dtype=float)
    if x.shape != (qubo.size,):
        raise QuboError(f"assignment length {x.shape} does not match size {qubo.size}")
    quad = 0.0
    for (i, j), q in sorted(qubo.quadratic.items()):
        quad += q * x[i] * x[j]
    return float(qubo.offset + qubo.linear @ x + quad)


def assignment_key(x: np.ndarray) -> int:
    """Big-endian integer value of a bit vector (x_0 most significant).

    Used as the deterministic tie-break everywhere: among equal-energy
    assignments the smallest key wins, which also prefers x_0 = 0
    representatives over their complements.
    """
    key = 0
    for bit in np.asarray(x).astype(int):
        key = (key << 1) | (bit & 1)
    return key


def to_ising(qubo: QuboInstance) -> IsingInstance:
    """Spin-variable equivalent via x = (1 + s) / 2; energies match for every assignment."""
    m = qubo.size
    fields = qubo.linear / 2.0
    offset = qubo.offset + float(qubo.linear.sum()) / 2.0
    couplings = {}
    for (i, j), q in qubo.quadratic.items():
        couplings[(i, j)] = q / 4.0
        fields[i] += q / 4.0
        fields[j] += q / 4.0
        offset += q / 4.0
    return IsingInstance(fields=fields, couplings=couplings, offset=offset)


def ising_energy(ising: IsingInstance, s: np.ndarray) -> float:
    s = np.asarray(s, dtype=float)
    quad = 0.0
    for (i, j), val in sorted(ising.couplings.items()):
        quad += val * s[i] * s[j]
    return float(ising.offset + ising.fields @ s + quad)


def split_assignment(qubo: QuboInstance, x: np.ndarray) -> tuple[Coalition, Coalition]:
    """Map a non-constant labeling back to the two global-id subcoalitions."""
    x = np.asarray(x).astype(int)
    zeros = [qubo.var_map[i] for i in range(qubo.size) if x[i] == 0]
    ones = [qubo.var_map[i] for i in range(qubo.size) if x[i] == 1]
    if not zeros or not ones:
        raise QuboError("constant labeling does not induce a split")
    return Coalition(frozenset(zeros)), Coalition(frozenset(ones))
