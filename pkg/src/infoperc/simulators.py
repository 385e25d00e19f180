"""Desk-scale simulators: broadcasting on trees, spiked rank-one matrices,
block-model sampling, the label-coupling branching process, and the
random-guessing baseline."""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError
from .graphs import bernoulli_indices, _decode_pairs
from .percolation import PercEstimate, Z95, wilson_interval
from .rng import substream

MAX_PERMUTATION_LABELS = 8
_COUPLING_CHILD_CAP = 100_000_000


@dataclass(frozen=True)
class BroadcastSpec:
    """Binary labels propagated root-to-leaves through independent BSCs."""

    d: int
    delta: float
    depth: int
    population: int = 100_000

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("branching factor must be at least 1")
        if not 0.0 <= self.delta <= 0.5:
            raise ValueError("delta must be in [0, 1/2]")
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        if self.population < 1000:
            raise ValueError("population must be at least 1000")


@dataclass(frozen=True)
class BroadcastResult:
    depths: np.ndarray
    mi_bits: np.ndarray
    stderr: np.ndarray
    population: int


def _binary_entropy_bits(q):
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(q > 0, q * np.log2(np.where(q > 0, q, 1.0)), 0.0)
        h -= np.where(q < 1, (1 - q) * np.log2(np.where(q < 1, 1 - q, 1.0)), 0.0)
    return h


def broadcast_mi(spec, seed):
    """Per-depth root information from the labels of one generation, in bits.

    Population dynamics on the root-posterior distribution: a pool of
    posterior samples (conditioned on a + root) is pushed one generation at a
    time by resampling d children, flipping each with probability delta, and
    recombining the likelihoods.  MI at depth t is 1 - E[h2(posterior)].
    """
    rng = substream(seed, 0)
    pop, d, delta = spec.population, spec.d, spec.delta
    q = np.ones(pop)
    mi = np.empty(spec.depth)
    se = np.empty(spec.depth)
    for t in range(spec.depth):
        idx = rng.integers(0, pop, size=(pop, d))
        flip = rng.random((pop, d)) < delta
        q_child = np.where(flip, 1.0 - q[idx], q[idx])
        lik_plus = delta + (1.0 - 2.0 * delta) * q_child
        up = np.prod(lik_plus, axis=1)
        down = np.prod(1.0 - lik_plus, axis=1)
        q = up / (up + down)
        h = _binary_entropy_bits(q)
        mi[t] = 1.0 - h.mean()
        se[t] = h.std(ddof=1) / math.sqrt(pop)
    return BroadcastResult(np.arange(1, spec.depth + 1), mi, se, pop)


@dataclass(frozen=True)
class WignerInstance:
    """Rank-one +-1 spike observed through symmetric Gaussian noise."""

    n: int
    lam: float
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if not np.allclose(self.y, self.y.T):
            raise ValueError("observation matrix must be symmetric")


def sample_wigner(n, lam, seed):
    """y = sqrt(lam/n) * x x^T + W with standard normal off-diagonal noise.

    The diagonal is populated (independent noise) but carries no signal usable
    by the estimators here.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    rng = substream(seed, 0)
    x = rng.integers(0, 2, size=n) * 2 - 1
    a = rng.standard_normal((n, n))
    w = np.triu(a, 1)
    w = w + w.T + np.diag(rng.standard_normal(n))
    y = math.sqrt(lam / n) * np.outer(x, x) + w
    return WignerInstance(n, lam, x, y)


def wigner_bayes_overlap(inst, max_n=18):
    """Exact Bayes analysis by enumerating the 2^(n-1) sign classes.

    Returns (overlap, mmse_xx): overlap is |<x, xhat>|/n for xhat the
    sign-rounded top eigenvector of the posterior mean of x x^T, and mmse_xx
    is the posterior mean of ||x x^T - xhat xhat^T||_F^2 / n^2 (so 2(1 - 1/n)
    for an uninformative posterior and 0 in the noiseless limit).
    """
    n = inst.n
    if n > max_n:
        raise BudgetExceededError(f"n={n} exceeds the enumeration cap {max_n}")
    bits = np.arange(1 << (n - 1), dtype=np.int64)
    signs = np.empty((bits.size, n))
    signs[:, 0] = 1.0
    for j in range(1, n):
        signs[:, j] = ((bits >> (j - 1)) & 1) * 2.0 - 1.0
    y_off = inst.y - np.diag(np.diag(inst.y))
    quad = ((signs @ y_off) * signs).sum(axis=1)
    logw = 0.5 * math.sqrt(inst.lam / n) * quad
    logw -= logw.max()
    w = np.exp(logw)
    w /= w.sum()
    post_mean = (signs * w[:, None]).T @ signs
    eigvals, eigvecs = np.linalg.eigh(post_mean)
    top = eigvecs[:, -1]
    xhat = np.where(top >= 0, 1.0, -1.0)
    overlap = abs(float(xhat @ inst.x)) / n
    mmse_xx = 2.0 * (1.0 - float(xhat @ post_mean @ xhat) / (n * n))
    return overlap, mmse_xx


@dataclass(frozen=True)
class SbmInstance:
    """Labelled graph with intra-rate a/n and inter-rate b/n edges."""

    n: int
    k: int
    a: float
    b: float
    labels: np.ndarray
    edge_u: np.ndarray
    edge_v: np.ndarray

    @property
    def n_edges(self):
        return self.edge_u.size

    def mean_degree(self):
        return 2.0 * self.n_edges / self.n

    def upper_triangular_bits(self):
        """Adjacency as packed bits of the strict upper triangle (u < v),
        ordered by pair index v(v-1)/2 + u."""
        flat = np.zeros(self.n * (self.n - 1) // 2, dtype=bool)
        flat[self.edge_v * (self.edge_v - 1) // 2 + self.edge_u] = True
        return np.packbits(flat)


def sample_sbm(n, k, a, b, seed):
    """Uniform labels on k classes; edges kept independently at rate a/n
    within a class and b/n across classes."""
    if a < 0 or b < 0 or a > n or b > n:
        raise ValueError("need 0 <= a, b <= n")
    if k < 1:
        raise ValueError("need at least one class")
    rng = substream(seed, 0)
    labels = rng.integers(0, k, size=n)
    groups = [np.flatnonzero(labels == c) for c in range(k)]
    us, vs = [], []
    for c in range(k):
        g = groups[c]
        idx = bernoulli_indices(rng, g.size * (g.size - 1) // 2, a / n)
        lu, lv = _decode_pairs(idx)
        us.append(g[lu])
        vs.append(g[lv])
    for c1 in range(k):
        for c2 in range(c1 + 1, k):
            g1, g2 = groups[c1], groups[c2]
            idx = bernoulli_indices(rng, g1.size * g2.size, b / n)
            us.append(g1[idx // max(g2.size, 1)])
            vs.append(g2[idx % max(g2.size, 1)])
    u = np.concatenate(us) if us else np.empty(0, dtype=np.int64)
    v = np.concatenate(vs) if vs else np.empty(0, dtype=np.int64)
    u, v = np.minimum(u, v), np.maximum(u, v)
    return SbmInstance(n, k, a, b, labels, u, v)


@dataclass(frozen=True)
class CouplingStats:
    """Outcome of the two-law label coupling on a random tree."""

    survival: PercEstimate
    per_depth: np.ndarray
    uncouple_rate: PercEstimate
    trials: int


_COUPLING_BLOCK = 2048


def _coupling_block(k, d, depth, trials, rng):
    counts = np.ones(trials, dtype=np.int64)
    depth_sums = np.zeros(depth + 1)
    depth_sums[0] = trials
    child_total = 0
    child_uncoupled = 0
    for g in range(1, depth + 1):
        total = int(counts.sum())
        if total == 0:
            break
        if total * d > _COUPLING_CHILD_CAP:
            raise BudgetExceededError("coupling population exceeded the budget")
        n_children = rng.poisson(d, size=total)
        n_tot = int(n_children.sum())
        fire = rng.random(n_tot) < 1.0 / k
        swap = rng.random(n_tot) < 1.0 / (k - 1.0)
        uncoupled = fire | (~fire & swap)
        child_total += n_tot
        child_uncoupled += int(uncoupled.sum())
        node_trial = np.repeat(np.repeat(np.arange(trials), counts), n_children)
        counts = np.bincount(node_trial, weights=uncoupled, minlength=trials).astype(np.int64)
        depth_sums[g] = counts.sum()
    return counts, depth_sums, child_total, child_uncoupled


def gw_coupling(k, d, depth, trials, seed):
    """Couple the label broadcasts started from two different root labels on
    a Poisson(d)-offspring tree.

    Edge observations are Bernoulli(1/k); a child of an uncoupled node stays
    uncoupled when the edge fires (labels copied) or, on a silent edge, with
    probability 1/(k-1) (the swap branch).  Coupled subtrees never uncouple,
    so only uncoupled nodes are tracked.  Trials run in seed-partitioned
    blocks, so results do not depend on how the blocks are scheduled.
    """
    if k < 2:
        raise ValueError("need k >= 2")
    if d <= 0:
        raise ValueError("need d > 0")
    per_depth = np.zeros(depth + 1)
    child_total = 0
    child_uncoupled = 0
    survived = 0
    for block, lo in enumerate(range(0, trials, _COUPLING_BLOCK)):
        size = min(_COUPLING_BLOCK, trials - lo)
        counts, sums, c_tot, c_unc = _coupling_block(
            k, d, depth, size, substream(seed, block))
        per_depth += sums
        child_total += c_tot
        child_uncoupled += c_unc
        survived += int((counts > 0).sum())
    per_depth /= trials
    survival = PercEstimate(
        survived / trials,
        math.sqrt(max(survived / trials * (1 - survived / trials), 0.0) / trials),
        trials,
        wilson_interval(survived, trials))
    rate = child_uncoupled / max(child_total, 1)
    uncouple_rate = PercEstimate(
        rate,
        math.sqrt(max(rate * (1 - rate), 0.0) / max(child_total, 1)),
        child_total,
        wilson_interval(child_uncoupled, max(child_total, 1)))
    return CouplingStats(survival, per_depth, uncouple_rate, trials)


def overlap_metric(x, x_hat, k=None):
    """Fraction of mismatches minimized over global relabelings of x_hat."""
    x = np.asarray(x)
    x_hat = np.asarray(x_hat)
    if x.shape != x_hat.shape:
        raise ValueError("length mismatch")
    if k is None:
        k = int(max(x.max(), x_hat.max())) + 1
    if k > MAX_PERMUTATION_LABELS:
        raise BudgetExceededError(f"k={k} exceeds the permutation cap")
    m = x.size
    conf = np.zeros((k, k), dtype=np.int64)
    np.add.at(conf, (x, x_hat), 1)
    best = max(sum(conf[perm[b], b] for b in range(k))
               for perm in itertools.permutations(range(k)))
    return 1.0 - best / m


@dataclass(frozen=True)
class RandomGuessReport:
    violations: int
    trials: int
    rate: float
    bound: float
    hamming_means: np.ndarray
    hamming_sem: float


def random_guess_check(k, m, trials, seed):
    """Empirical check that an independent guess cannot beat chance by much.

    Draws independent uniform strings X, Z of length m and counts how often
    the permutation-minimized mismatch rate falls below (k-1)/k - m^(-1/3);
    the tail bound for that event is k! * exp(-2 m^(1/3)).  Also reports the
    per-permutation mean Hamming distance, which concentrates at (k-1)/k.
    """
    if k > MAX_PERMUTATION_LABELS:
        raise BudgetExceededError(f"k={k} exceeds the permutation cap")
    rng = substream(seed, 0)
    perms = list(itertools.permutations(range(k)))
    xs = rng.integers(0, k, size=(trials, m))
    zs = rng.integers(0, k, size=(trials, m))
    flat = (np.arange(trials)[:, None] * (k * k) + xs * k + zs).ravel()
    conf = np.bincount(flat, minlength=trials * k * k).reshape(trials, k, k)
    matches = np.stack(
        [conf[:, list(p), range(k)].sum(axis=1) for p in perms], axis=1)
    d_vals = 1.0 - matches.max(axis=1) / m
    threshold = (k - 1) / k - m ** (-1.0 / 3.0)
    violations = int((d_vals < threshold).sum())
    bound = math.factorial(k) * math.exp(-2.0 * m ** (1.0 / 3.0))
    hamming = 1.0 - matches / m
    sem = math.sqrt((k - 1) / k / k / (m * trials))
    return RandomGuessReport(
        violations, trials, violations / trials, bound,
        hamming.mean(axis=0), sem)
