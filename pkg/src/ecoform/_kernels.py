"""Compiled inner loops for the metaheuristics and the subset DP.

All kernels are purely arithmetic: randomness comes in as pre-drawn arrays so
results are bit-reproducible, and energies are tracked incrementally with a
full re-evaluation every RESYNC_FLIPS accepted flips to cap drift.
"""

import math

import numpy as np
from numba import njit

RESYNC_FLIPS = 1000


@njit(cache=True)
def qubo_energy_dense(h, M, x):
    """offset-free energy h.x + 0.5 x'Mx for symmetric M with zero diagonal."""
    m = x.shape[0]
    e = 0.0
    for i in range(m):
        if x[i] == 1:
            e += h[i]
            acc = 0.0
            for j in range(m):
                if x[j] == 1:
                    acc += M[i, j]
            e += 0.5 * acc
    return e


@njit(cache=True)
def local_fields(h, M, x):
    m = x.shape[0]
    f = np.empty(m)
    for i in range(m):
        acc = h[i]
        for j in range(m):
            if x[j] == 1:
                acc += M[i, j]
        f[i] = acc
    return f


@njit(cache=True)
def sa_run(h, M, x, temps, uniforms):
    """Single-bit-flip Metropolis sweeps over a fixed temperature schedule.

    Mutates `x`; returns (best_energy, best_x, flips). uniforms has one entry
    per attempted flip, consumed in sweep-major, variable-minor order.
    """
    m = x.shape[0]
    f = local_fields(h, M, x)
    e = qubo_energy_dense(h, M, x)
    best_e = e
    best_x = x.copy()
    k = 0
    flips = 0
    for s in range(temps.shape[0]):
        temp = temps[s]
        for i in range(m):
            delta = (1.0 - 2.0 * x[i]) * f[i]
            accept = delta <= 0.0
            if not accept and temp > 0.0:
                accept = uniforms[k] < math.exp(-delta / temp)
            k += 1
            if accept:
                change = 1.0 - 2.0 * x[i]
                x[i] = 1 - x[i]
                e += delta
                for j in range(m):
                    f[j] += M[j, i] * change
                flips += 1
                if flips % RESYNC_FLIPS == 0:
                    e = qubo_energy_dense(h, M, x)
                if e < best_e:
                    # re-evaluate exactly so accumulated drift cannot fake a best
                    e = qubo_energy_dense(h, M, x)
                    if e < best_e:
                        best_e = e
                        best_x[:] = x
    return best_e, best_x, flips


@njit(cache=True)
def tabu_run(h, M, x, tenure, max_nonimproving):
    """Steepest single-flip search with a recency tabu list and aspiration.

    A tabu flip is allowed when it would beat the best assignment seen so far;
    if every flip is tabu and none aspirates, the one expiring soonest is
    taken so the walk cannot deadlock.  Stops after `max_nonimproving`
    consecutive iterations without improving the best.
    """
    m = x.shape[0]
    f = local_fields(h, M, x)
    e = qubo_energy_dense(h, M, x)
    best_e = e
    best_x = x.copy()
    tabu_until = np.zeros(m, dtype=np.int64)
    iteration = 0
    nonimproving = 0
    flips = 0
    while nonimproving < max_nonimproving:
        iteration += 1
        best_i = -1
        best_delta = 0.0
        for i in range(m):
            delta = (1.0 - 2.0 * x[i]) * f[i]
            allowed = tabu_until[i] < iteration or e + delta < best_e
            if allowed and (best_i < 0 or delta < best_delta):
                best_i = i
                best_delta = delta
        if best_i < 0:
            soonest = tabu_until[0]
            best_i = 0
            for i in range(1, m):
                if tabu_until[i] < soonest:
                    soonest = tabu_until[i]
                    best_i = i
            best_delta = (1.0 - 2.0 * x[best_i]) * f[best_i]
        change = 1.0 - 2.0 * x[best_i]
        x[best_i] = 1 - x[best_i]
        e += best_delta
        for j in range(m):
            f[j] += M[j, best_i] * change
        tabu_until[best_i] = iteration + tenure
        flips += 1
        if flips % RESYNC_FLIPS == 0:
            e = qubo_energy_dense(h, M, x)
        if e < best_e:
            # drift in the running energy must not register phantom improvements,
            # or the non-improving counter never fires; confirm exactly first
            e = qubo_energy_dense(h, M, x)
        if e < best_e:
            best_e = e
            best_x[:] = x
            nonimproving = 0
        else:
            nonimproving += 1
    return best_e, best_x, iteration


@njit(cache=True)
def ising_slice_energy(h, J, s):
    m = s.shape[0]
    e = 0.0
    for i in range(m):
        e += h[i] * s[i]
        acc = 0.0
        for j in range(i + 1, m):
            acc += J[i, j] * s[j]
        e += s[i] * acc
    return e


@njit(cache=True)
def sqa_run(h, J, slices, beta, gammas, uniforms, s_init):
    """Path-integral Monte Carlo on the transverse-field Ising proxy.

    `s_init` is slices x m spins (+-1).  Per sweep: one Metropolis pass of
    single-spin moves over every (slice, spin), then one pass of global moves
    flipping a spin across all slices.  The slice coupling follows
    J_perp = -(P T / 2) ln tanh(gamma / (P T)) with T = 1/beta, so a shrinking
    transverse field gamma progressively locks the replicas together.
    Returns the best single-slice configuration seen, by problem energy.
    """
    P = s_init.shape[0]
    m = s_init.shape[1]
    s = s_init.copy()
    temp = 1.0 / beta
    inv_p = 1.0 / P

    fields = np.empty((P, m))
    energies = np.empty(P)
    for k in range(P):
        for i in range(m):
            acc = h[i]
            for j in range(m):
                acc += J[i, j] * s[k, j]
            fields[k, i] = acc
        energies[k] = ising_slice_energy(h, J, s[k])

    best_e = energies[0]
    best_s = s[0].copy()
    for k in range(1, P):
        if energies[k] < best_e:
            best_e = energies[k]
            best_s = s[k].copy()

    u = 0
    flips = 0
    for sweep in range(gammas.shape[0]):
        gamma = gammas[sweep]
        arg = math.tanh(gamma / (P * temp))
        if arg >= 1.0:
            j_perp = 0.0
        else:
            j_perp = -(P * temp / 2.0) * math.log(arg)

        for k in range(P):
            up = (k + 1) % P
            down = (k - 1) % P
            for i in range(m):
                d_problem = -2.0 * s[k, i] * fields[k, i]
                d_trans = 2.0 * j_perp * s[k, i] * (s[down, i] + s[up, i])
                delta = inv_p * d_problem + d_trans
                accept = delta <= 0.0
                if not accept:
                    accept = uniforms[u] < math.exp(-beta * delta)
                u += 1
                if accept:
                    s[k, i] = -s[k, i]
                    energies[k] += d_problem
                    new_spin = s[k, i]
                    for j in range(m):
                        fields[k, j] += 2.0 * J[j, i] * new_spin
                    flips += 1
                    if flips % RESYNC_FLIPS == 0:
                        energies[k] = ising_slice_energy(h, J, s[k])
                    if energies[k] < best_e:
                        energies[k] = ising_slice_energy(h, J, s[k])
                        if energies[k] < best_e:
                            best_e = energies[k]
                            best_s[:] = s[k]

        for i in range(m):
            d_total = 0.0
            for k in range(P):
                d_total += -2.0 * s[k, i] * fields[k, i]
            delta = inv_p * d_total
            accept = delta <= 0.0
            if not accept:
                accept = uniforms[u] < math.exp(-beta * delta)
            u += 1
            if accept:
                for k in range(P):
                    d_k = -2.0 * s[k, i] * fields[k, i]
                    s[k, i] = -s[k, i]
                    energies[k] += d_k
                    new_spin = s[k, i]
                    for j in range(m):
                        fields[k, j] += 2.0 * J[j, i] * new_spin
                    if energies[k] < best_e:
                        energies[k] = ising_slice_energy(h, J, s[k])
                        if energies[k] < best_e:
                            best_e = energies[k]
                            best_s[:] = s[k]
                flips += 1
                if flips % RESYNC_FLIPS == 0:
                    for k in range(P):
                        energies[k] = ising_slice_energy(h, J, s[k])
    return best_e, best_s


@njit(cache=True)
def isg_dense_values(weights):
    """Coalition values (pairwise sums) for every bitmask, by incremental DP."""
    n = weights.shape[0]
    size = 1 << n
    values = np.zeros(size)
    for mask in range(1, size):
        low_idx = 0
        while not (mask >> low_idx) & 1:
            low_idx += 1
        rest = mask & (mask - 1)
        acc = values[rest]
        r = rest
        j = 0
        while r:
            if r & 1:
                acc += weights[low_idx, j]
            r >>= 1
            j += 1
        values[mask] = acc
    return values


@njit(cache=True)
def idp_tables(values, tie_eps):
    """Bottom-up subset DP: best achievable value for every coalition, either
    kept whole or split into the best pair of complementary parts.

    Splits must beat the whole coalition by more than tie_eps, so exact ties
    (zero netting benefit across the split) resolve to the coarser structure
    instead of floating-point noise.  Returns (best, choice) where
    choice[mask] is the lower part of the best bipartition (containing mask's
    lowest set bit), or 0 to keep mask whole.
    """
    size = values.shape[0]
    best = values.copy()
    choice = np.zeros(size, dtype=np.int64)
    for mask in range(1, size):
        low = mask & (-mask)
        rest = mask ^ low
        if rest == 0:
            continue
        t = (rest - 1) & rest
        while True:
            part = low | t
            other = mask ^ part
            cand = best[part] + best[other]
            if cand > best[mask] + tie_eps:
                best[mask] = cand
                choice[mask] = part
            if t == 0:
                break
            t = (t - 1) & rest
    return best, choice
