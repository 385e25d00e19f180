"""Hot Monte Carlo loops, jitted.

Each trial draws from its own counter-based stream derived from
(seed, trial index), so results do not depend on how trials are batched.
The stream logic mirrors the pure-python reference in rng.py.
"""

import numpy as np
from numba import njit, uint64

_GOLD = uint64(0x9E3779B97F4A7C15)
_MIX1 = uint64(0xBF58476D1CE4E5B9)
_MIX2 = uint64(0x94D049BB133111EB)
_U30 = uint64(30)
_U27 = uint64(27)
_U31 = uint64(31)
_U11 = uint64(11)
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True)
def _mix64(z):
    z = z + _GOLD
    z = (z ^ (z >> _U30)) * _MIX1
    z = (z ^ (z >> _U27)) * _MIX2
    return z ^ (z >> _U31)


@njit(cache=True)
def _uniform(base, draw):
    w = _mix64(base + draw * _GOLD)
    return (w >> _U11) * _INV53


@njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def perc_mc_counts(n_vars, fac_start, fac_vars, etas, s1, s2, trials, seed):
    """Sum and sum-of-squares of per-trial counts of S1 vertices linked to S2."""
    parent = np.empty(n_vars, np.int64)
    mark = np.zeros(n_vars, np.int64)
    n_fac = etas.size
    total = 0
    total_sq = 0
    sbase = _mix64(uint64(seed))
    for t in range(trials):
        base = _mix64(sbase + uint64(t))
        for i in range(n_vars):
            parent[i] = i
        for w in range(n_fac):
            if _uniform(base, uint64(w)) < etas[w]:
                ra = _find(parent, fac_vars[fac_start[w]])
                for j in range(fac_start[w] + 1, fac_start[w + 1]):
                    rb = _find(parent, fac_vars[j])
                    if rb != ra:
                        if rb < ra:
                            parent[ra] = rb
                            ra = rb
                        else:
                            parent[rb] = ra
        stamp = t + 1
        for j in range(s2.size):
            mark[_find(parent, s2[j])] = stamp
        c = 0
        for j in range(s1.size):
            if mark[_find(parent, s1[j])] == stamp:
                c += 1
        total += c
        total_sq += c * c
    return total, total_sq


@njit(cache=True)
def grid_two_point_counts(L, src, dst, thresholds, trials, seed):
    """Trials in which src and dst are bond-connected at each threshold.

    thresholds must be ascending.  Each trial draws one weight per bond and
    adds bonds threshold bucket by threshold bucket (sorted-weight sweep), so
    a single pass serves the whole grid of open probabilities.
    """
    n_sites = L * L
    n_horiz = L * (L - 1)
    nb = 2 * n_horiz
    npts = thresholds.size
    top = thresholds[npts - 1]
    parent = np.empty(n_sites, np.int64)
    bucket_head = np.empty(npts, np.int64)
    bucket_next = np.empty(nb, np.int64)
    counts = np.zeros(npts, np.int64)
    sbase = _mix64(uint64(seed))
    for t in range(trials):
        base = _mix64(sbase + uint64(t))
        for j in range(npts):
            bucket_head[j] = -1
        for b in range(nb):
            u = _uniform(base, uint64(b))
            if u >= top:
                continue
            j = 0
            while thresholds[j] <= u:
                j += 1
            bucket_next[b] = bucket_head[j]
            bucket_head[j] = b
        for i in range(n_sites):
            parent[i] = i
        hit = -1
        for j in range(npts):
            b = bucket_head[j]
            while b != -1:
                if b < n_horiz:
                    a = (b // (L - 1)) * L + b % (L - 1)
                    bb = a + 1
                else:
                    a = b - n_horiz
                    bb = a + L
                ra = _find(parent, a)
                rb = _find(parent, bb)
                if ra != rb:
                    if rb < ra:
                        parent[ra] = rb
                    else:
                        parent[rb] = ra
                b = bucket_next[b]
            if _find(parent, src) == _find(parent, dst):
                hit = j
                break
        if hit >= 0:
            for j in range(hit, npts):
                counts[j] += 1
    return counts
