"""Percolation quantities: Monte Carlo, exact enumeration, lattice two-point
functions, giant components, and branching-process extinction."""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse
from scipy.sparse.csgraph import connected_components

from . import _kernels
from .errors import BudgetExceededError
from .graphs import sample_er_edges
from .rng import substream

Z95 = 1.959963984540054

EXACT_FACTOR_CAP = 20


@dataclass(frozen=True)
class PercEstimate:
    """Monte Carlo estimate with its sampling uncertainty."""

    mean: float
    stderr: float
    trials: int
    ci95: tuple

    def __post_init__(self):
        lo, hi = self.ci95
        if not (self.stderr >= 0 and lo <= self.mean <= hi):
            raise ValueError("inconsistent estimate")


def wilson_interval(successes, trials, z=Z95):
    """Wilson 95% interval for a Bernoulli mean; well-behaved near 0 and 1."""
    if trials == 0:
        return (0.0, 1.0)
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = max(0.0, center - half)
    hi = min(1.0, center + half)
    # Rounding must not push the point estimate outside its own interval.
    return (min(lo, phat), max(hi, phat))


def _estimate_from_counts(total, total_sq, trials, bernoulli):
    mean = total / trials
    if trials > 1:
        var = max(0.0, (total_sq - total * total / trials) / (trials - 1))
        stderr = math.sqrt(var / trials)
    else:
        stderr = math.inf
    if bernoulli and trials > 1:
        ci = wilson_interval(total, trials)
    elif stderr < math.inf:
        ci = (mean - Z95 * stderr, mean + Z95 * stderr)
    else:
        ci = (-math.inf, math.inf)
    return PercEstimate(mean, stderr, trials, ci)


def _flatten_factors(fg):
    starts = np.zeros(fg.n_factors + 1, dtype=np.int64)
    vars_flat = []
    etas = np.empty(fg.n_factors)
    for i, f in enumerate(fg.factors):
        vars_flat.extend(f.vars)
        starts[i + 1] = len(vars_flat)
        etas[i] = f.eta
    return starts, np.asarray(vars_flat, dtype=np.int64), etas


def perc_mc(fg, s1, s2, trials, seed):
    """Monte Carlo estimate of the expected number of S1 vertices connected
    to S2 after keeping each factor independently with its retention
    probability."""
    s1 = sorted(set(s1))
    s2 = sorted(set(s2))
    if not s1 or not s2:
        raise ValueError("S1 and S2 must be nonempty")
    if trials < 1:
        raise ValueError("need at least one trial")
    starts, vars_flat, etas = _flatten_factors(fg)
    total, total_sq = _kernels.perc_mc_counts(
        fg.n_vars, starts, vars_flat, etas,
        np.asarray(s1, dtype=np.int64), np.asarray(s2, dtype=np.int64),
        trials, seed)
    return _estimate_from_counts(total, total_sq, trials, bernoulli=(len(s1) == 1))


class ExactPercolator:
    """Enumerates all retention patterns of a factor graph once, then answers
    connection queries for arbitrary (S1, S2) pairs cheaply."""

    def __init__(self, fg, max_factors=EXACT_FACTOR_CAP):
        free = [f for f in fg.factors if 0.0 < f.eta < 1.0]
        fixed = [f for f in fg.factors if f.eta == 1.0]
        if len(free) > max_factors:
            raise BudgetExceededError(
                f"{len(free)} enumerable factors exceed the cap {max_factors}")
        n = fg.n_vars
        base = list(range(n))

        def find(parent, x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for f in fixed:
            r = find(base, f.vars[0])
            for v in f.vars[1:]:
                rv = find(base, v)
                if rv != r:
                    if rv < r:
                        base[r], r = rv, rv
                    else:
                        base[rv] = r
        base = [find(base, v) for v in range(n)]

        n_pat = 1 << len(free)
        labels = np.empty((n_pat, n), dtype=np.int32)
        weights = np.empty(n_pat)
        etas = [f.eta for f in free]
        for pat in range(n_pat):
            parent = list(base)
            w = 1.0
            for i, f in enumerate(free):
                if pat >> i & 1:
                    w *= etas[i]
                    r = find(parent, f.vars[0])
                    for v in f.vars[1:]:
                        rv = find(parent, v)
                        if rv != r:
                            if rv < r:
                                parent[r], r = rv, rv
                            else:
                                parent[rv] = r
                else:
                    w *= 1.0 - etas[i]
            labels[pat] = [find(parent, v) for v in range(n)]
            weights[pat] = w
        self.labels = labels
        self.weights = weights

    def perc(self, s1, s2):
        s1 = sorted(set(s1))
        s2 = sorted(set(s2))
        if not s1 or not s2:
            raise ValueError("S1 and S2 must be nonempty")
        roots2 = self.labels[:, s2]
        hits = (self.labels[:, s1][:, :, None] == roots2[:, None, :]).any(axis=2)
        return float(self.weights @ hits.sum(axis=1))


def perc_exact(fg, s1, s2, max_factors=EXACT_FACTOR_CAP):
    """Exact expected S1-to-S2 connection count by enumerating all retention
    patterns (factor count capped)."""
    return ExactPercolator(fg, max_factors).perc(s1, s2)


def recursion_check(fg, s1, s2, w, max_factors=EXACT_FACTOR_CAP):
    """Evaluate both sides of the one-factor peeling identity at factor w.

    Requires N(w) to meet S2.  Returns (lhs, rhs); they agree to float
    precision on any valid instance.
    """
    factor = fg.factors[w]
    s2 = set(s2)
    if not s2 & set(factor.vars):
        raise ValueError("factor w must touch S2")
    lhs = perc_exact(fg, s1, s2, max_factors)
    sub = fg.drop_factor(w)
    rhs = (factor.eta * perc_exact(sub, s1, s2 | set(factor.vars), max_factors)
           + (1.0 - factor.eta) * perc_exact(sub, s1, s2, max_factors))
    return lhs, rhs


def _grid_geometry(n, margin):
    b = n if margin is None else margin
    if b < 0:
        raise ValueError("margin must be nonnegative")
    off = n // 2 + b
    L = 2 * n + 2 * b + 1
    src = off * L + off
    dst = (n + off) * L + (n + off)
    return L, src, dst


def grid_two_point(n, eta, trials, seed, margin=None):
    """P[(0,0) connected to (n,n)] under bond percolation at open probability
    eta, on a square box with margin `margin` (default n) around the pair."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must be in [0, 1]")
    return grid_two_point_curve(n, [eta], trials, seed, margin)[0]


def grid_two_point_curve(n, etas, trials, seed, margin=None):
    """Two-point estimates for a whole grid of open probabilities.

    One weight is drawn per bond per trial and the thresholds are swept in
    sorted order without resampling, so the estimates are exactly monotone in
    eta and every threshold sees all `trials` trials.
    """
    etas = list(etas)
    order = sorted(range(len(etas)), key=lambda i: etas[i])
    thresholds = np.asarray([etas[i] for i in order], dtype=float)
    L, src, dst = _grid_geometry(n, margin)
    counts = _kernels.grid_two_point_counts(L, src, dst, thresholds, trials, seed)
    out = [None] * len(etas)
    for rank, i in enumerate(order):
        c = int(counts[rank])
        if etas[i] == 1.0:
            c = trials
        est = _estimate_from_counts(c, c, trials, bernoulli=True)
        out[i] = est
    return out


def er_giant(n, c, trials, seed):
    """Mean largest-component fraction E[C_max]/n over ER(n, c/n) samples."""
    if c < 0:
        raise ValueError("mean degree must be nonnegative")
    fracs = np.empty(trials)
    for i in range(trials):
        rng = substream(seed, i)
        u, v = sample_er_edges(n, c / n, rng)
        if u.size == 0:
            fracs[i] = 1.0 / n
            continue
        adj = scipy.sparse.coo_matrix(
            (np.ones(u.size, dtype=np.int8), (u, v)), shape=(n, n))
        _, labels = connected_components(adj, directed=False)
        fracs[i] = np.bincount(labels).max() / n
    mean = float(fracs.mean())
    stderr = float(fracs.std(ddof=1) / math.sqrt(trials)) if trials > 1 else math.inf
    ci = (mean - Z95 * stderr, mean + Z95 * stderr) if trials > 1 else (-math.inf, math.inf)
    return PercEstimate(mean, stderr, trials, ci)


@dataclass(frozen=True)
class PoissonOffspring:
    mean: float

    def __post_init__(self):
        if self.mean < 0:
            raise ValueError("mean must be nonnegative")

    def pgf(self, q):
        return math.exp(self.mean * (q - 1.0))


@dataclass(frozen=True)
class BinomialOffspring:
    n: int
    p: float

    def __post_init__(self):
        if self.n < 0 or not 0.0 <= self.p <= 1.0:
            raise ValueError("need n >= 0 and p in [0, 1]")

    @property
    def mean(self):
        return self.n * self.p

    def pgf(self, q):
        return (1.0 - self.p + self.p * q) ** self.n


def gw_extinction(offspring, tol=1e-12, max_iter=10_000_000):
    """Extinction probability: smallest fixed point of the offspring pgf.

    Returns exactly 1 when the mean offspring count is at most 1; otherwise
    iterates q <- pgf(q) monotonically from 0 until successive values differ
    by at most tol.
    """
    if offspring.mean <= 1.0:
        return 1.0
    q = 0.0
    for _ in range(max_iter):
        q_next = offspring.pgf(q)
        if q_next - q <= tol:
            return q_next
        q = q_next
    return q
