"""Brute-force mutual-information oracle over small discrete models.

Everything here enumerates the full joint law of (labels, observations), so
it is only usable on desk-scale instances, but within its budget it is exact
and serves as the ground truth against which the percolation bounds and the
scalable simulators are checked.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError
from .graphs import Factor, FactorGraph, parity_channel, reveal_channel
from .percolation import PercEstimate, Z95, perc_exact
from .rng import substream

LOG2 = math.log(2.0)

# Hard caps: alphabet^n_vars * prod(|Y_w|) for full enumeration, and
# alphabet^n_vars for the sampled-conditioning estimator.
EXACT_STATE_CAP = 1 << 26
MC_STATE_CAP = 1 << 22

_CACHE_ENTRIES = 1 << 22
_CHUNK_ROWS = 1 << 14
_TINY = 1e-300

MODES = ("joint", "cond_given_y", "cond_given_x")


@dataclass
class SmallModel:
    """Enumerable joint law over labels X and factor observations Y.

    prior is either None (i.i.d. uniform labels) or a flat joint table of
    length alphabet**n_vars with variable 0 as the most significant digit.
    """

    fg: FactorGraph
    prior: np.ndarray = None

    def __post_init__(self):
        for f in self.fg.factors:
            if f.channel is None:
                raise ValueError("SmallModel factors need discrete channels")
        if self.prior is not None:
            p = np.asarray(self.prior, dtype=float).ravel()
            if p.size != self.fg.alphabet**self.fg.n_vars:
                raise ValueError("prior table has wrong size")
            if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
                raise ValueError("prior table is not a distribution")
            self.prior = p
        self._cache = {}

    @property
    def n_labels(self):
        return self.fg.alphabet**self.fg.n_vars

    @property
    def n_obs(self):
        out = 1
        for f in self.fg.factors:
            out *= f.channel.n_out
        return out

    def state_count(self):
        return self.n_labels * self.n_obs


def independent_prior(marginals):
    """Flat joint table for independent per-variable label distributions."""
    table = np.array([1.0])
    for m in marginals:
        m = np.asarray(m, dtype=float)
        if np.any(m < 0) or abs(m.sum() - 1.0) > 1e-9:
            raise ValueError("marginal is not a distribution")
        table = np.kron(table, m)
    return table


def _entropy(table):
    t = np.asarray(table, dtype=float).ravel()
    t = t[t > _TINY].astype(np.longdouble)
    if t.size == 0:
        return 0.0
    return float(-np.sum(t * np.log(t)))


def _group_index(xs, variables, n, k):
    idx = np.zeros(xs.size, dtype=np.int64)
    for v in variables:
        idx = idx * k + (xs // k ** (n - 1 - v)) % k
    return idx


def _prior_chunk(model, lo, hi):
    if model.prior is None:
        return np.full(hi - lo, 1.0 / model.n_labels)
    return model.prior[lo:hi]


def _joint_chunk(model, lo, hi):
    xs = np.arange(lo, hi)
    n, k = model.fg.n_vars, model.fg.alphabet
    j = _prior_chunk(model, lo, hi)[:, None]
    for f in model.fg.factors:
        rows = f.channel.table[_group_index(xs, f.vars, n, k)]
        j = (j[:, :, None] * rows[:, None, :]).reshape(xs.size, -1)
    return j


def _label_obs_table(model, variables):
    """Joint table over (X_variables, Y_all), accumulated chunk by chunk."""
    variables = tuple(sorted(variables))
    cache = model._cache.setdefault("tables", {})
    if variables in cache:
        return cache[variables]
    if model.state_count() > EXACT_STATE_CAP:
        raise BudgetExceededError(
            f"{model.state_count()} states exceed the exact cap {EXACT_STATE_CAP}")
    n, k = model.fg.n_vars, model.fg.alphabet
    table = np.zeros((k ** len(variables), model.n_obs))
    for lo in range(0, model.n_labels, _CHUNK_ROWS):
        hi = min(lo + _CHUNK_ROWS, model.n_labels)
        grp = _group_index(np.arange(lo, hi), variables, n, k)
        np.add.at(table, grp, _joint_chunk(model, lo, hi))
    if table.size <= _CACHE_ENTRIES:
        cache[variables] = table
    return table


def _marginalize_labels(table, keep_positions, n_kept, k):
    """Sum a (X_group, Y) table down to a sub-group of its label variables."""
    shaped = table.reshape((k,) * n_kept + (-1,))
    drop = tuple(i for i in range(n_kept) if i not in keep_positions)
    out = shaped.sum(axis=drop) if drop else shaped
    return out.reshape(-1, table.shape[-1])


def prior_marginal(model, variables):
    """Exact label marginal over the given variables."""
    variables = tuple(sorted(variables))
    n, k = model.fg.n_vars, model.fg.alphabet
    if model.prior is None:
        return np.full(k ** len(variables), k ** (-len(variables)))
    out = np.zeros(k ** len(variables))
    for lo in range(0, model.n_labels, _CHUNK_ROWS):
        hi = min(lo + _CHUNK_ROWS, model.n_labels)
        grp = _group_index(np.arange(lo, hi), variables, n, k)
        np.add.at(out, grp, model.prior[lo:hi])
    return out


def max_vertex_entropy(model):
    """sup over variables of the label entropy, in nats."""
    if model.prior is None:
        return math.log(model.fg.alphabet)
    return max(_entropy(prior_marginal(model, (v,))) for v in range(model.fg.n_vars))


def is_independent_prior(model, tol=1e-9):
    if model.prior is None:
        return True
    product = independent_prior(
        [prior_marginal(model, (v,)) for v in range(model.fg.n_vars)])
    return bool(np.max(np.abs(product - model.prior)) <= tol)


def exact_mi(model, a_vars, b_vars, mode):
    """Exact mutual information (nats) by full enumeration.

    mode selects the quantity:
      joint        I(X_A ; X_B, Y)
      cond_given_y I(X_A ; X_B | Y)
      cond_given_x I(X_A ; Y | X_B)
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    a = tuple(sorted(set(a_vars)))
    b = tuple(sorted(set(b_vars)))
    for v in a + b:
        if not 0 <= v < model.fg.n_vars:
            raise ValueError(f"variable {v} out of range")
    if not a:
        return 0.0
    u = tuple(sorted(set(a) | set(b)))
    t_uy = _label_obs_table(model, u)
    k = model.fg.alphabet
    pos = {v: i for i, v in enumerate(u)}
    t_ay = _marginalize_labels(t_uy, {pos[v] for v in a}, len(u), k)
    t_by = _marginalize_labels(t_uy, {pos[v] for v in b}, len(u), k)
    h_uy = _entropy(t_uy)
    h_ay = _entropy(t_ay)
    h_by = _entropy(t_by)
    h_y = _entropy(t_uy.sum(axis=0))
    if mode == "joint":
        return _entropy(prior_marginal(model, a)) + h_by - h_uy
    if mode == "cond_given_y":
        return h_ay + h_by - h_uy - h_y
    h_u = _entropy(t_uy.sum(axis=1))
    h_b = _entropy(prior_marginal(model, b))
    return h_u + h_by - h_b - h_uy


def _sample_labels(model, rng, samples):
    if model.prior is None:
        return rng.integers(0, model.n_labels, size=samples)
    return rng.choice(model.n_labels, size=samples, p=model.prior)


def mc_mi(model, a_vars, b_vars, mode, samples, seed):
    """Monte Carlo mutual-information estimate with exact inner posteriors.

    The conditioning data (labels of B and all observations) is sampled; the
    posterior of X_A given each sample is computed exactly by summing over
    all label configurations.  The information estimate is the exact marginal
    entropy of X_A (given X_B where applicable) minus the sampled conditional
    entropy.  With one sample the standard error is unreliable and returned
    as +inf.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if samples < 1:
        raise ValueError("need at least one sample")
    if model.n_labels > MC_STATE_CAP:
        raise BudgetExceededError(
            f"{model.n_labels} label states exceed the sampling cap {MC_STATE_CAP}")
    a = tuple(sorted(set(a_vars)))
    b = tuple(sorted(set(b_vars)))
    if not a:
        return PercEstimate(0.0, 0.0, samples, (0.0, 0.0))
    n, k = model.fg.n_vars, model.fg.alphabet
    all_x = np.arange(model.n_labels)
    grp_a = _group_index(all_x, a, n, k)
    grp_b = _group_index(all_x, b, n, k) if b else None
    fac_idx = [_group_index(all_x, f.vars, n, k) for f in model.fg.factors]
    prior_vec = (np.full(model.n_labels, 1.0 / model.n_labels)
                 if model.prior is None else model.prior)

    rng = substream(seed, 0)
    xs = _sample_labels(model, rng, samples)
    ys = []
    for f, idx in zip(model.fg.factors, fac_idx):
        rows = f.channel.table[idx[xs]]
        u = rng.random(samples)
        ys.append(np.argmax(u[:, None] < np.cumsum(rows, axis=1), axis=1))
    ys = np.asarray(ys)

    neglog_full = np.empty(samples)   # -log p(x_A | x_B, y)
    neglog_y = np.empty(samples)      # -log p(x_A | y), cond_given_y only
    for s in range(samples):
        w = prior_vec.copy()
        for f, idx, y in zip(model.fg.factors, fac_idx, ys[:, s]):
            w *= f.channel.table[:, y][idx]
        a_val = grp_a[xs[s]]
        if mode == "cond_given_y":
            p_ay = np.bincount(grp_a, weights=w, minlength=k ** len(a))
            neglog_y[s] = -math.log(max(p_ay[a_val] / p_ay.sum(), _TINY))
        if b:
            w = np.where(grp_b == grp_b[xs[s]], w, 0.0)
        p_a = np.bincount(grp_a, weights=w, minlength=k ** len(a))
        neglog_full[s] = -math.log(max(p_a[a_val] / p_a.sum(), _TINY))

    if mode == "joint":
        vals = _entropy(prior_marginal(model, a)) - neglog_full
    elif mode == "cond_given_x":
        h_ab = _entropy(prior_marginal(model, tuple(set(a) | set(b))))
        h_b = _entropy(prior_marginal(model, b)) if b else 0.0
        vals = (h_ab - h_b) - neglog_full
    else:
        vals = neglog_y - neglog_full
    mean = float(vals.mean())
    if samples > 1:
        stderr = float(vals.std(ddof=1) / math.sqrt(samples))
        ci = (mean - Z95 * stderr, mean + Z95 * stderr)
    else:
        stderr = math.inf
        ci = (-math.inf, math.inf)
    return PercEstimate(mean, stderr, samples, ci)


def binary_symmetric_model(g, delta):
    """Uniform binary labels on a simple graph; per-edge observation of the
    endpoint XOR through a BSC(delta).  Retention probabilities (1-2*delta)^2."""
    eta = (1.0 - 2.0 * delta) ** 2
    ch = parity_channel(delta, 2)
    factors = tuple(Factor((u, v), eta, ch) for u, v in g.edges)
    return SmallModel(FactorGraph(g.n, 2, factors))


@dataclass(frozen=True)
class VerifyReport:
    instance: str
    param: float
    lhs_nats: float
    rhs_nats: float

    @property
    def slack(self):
        return self.rhs_nats - self.lhs_nats

    def row(self):
        return (self.instance, self.param, self.lhs_nats, self.rhs_nats, self.slack)


def _parity_delta(channel):
    """Crossover probability of a parity-observation factor, or None."""
    t = channel.table
    if t.shape[1] != 2 or channel.alphabet != 2:
        return None
    delta = t[0, 1]
    for i in range(t.shape[0]):
        parity = bin(i).count("1") % 2
        expect = (delta, 1.0 - delta) if parity else (1.0 - delta, delta)
        if abs(t[i, 0] - expect[0]) > 1e-12 or abs(t[i, 1] - expect[1]) > 1e-12:
            return None
    return float(delta)


def _is_uniform_prior(model):
    if model.prior is None:
        return True
    return np.max(np.abs(model.prior - 1.0 / model.n_labels)) <= 1e-12


def verify_thm1(model, v, s_vars, instance=""):
    """Joint-information percolation bound for XOR observations.

    lhs = I(X_v ; X_S, Y) exactly; rhs = expected connection probability of v
    to S with per-edge retention (1-2*delta)^2, times log 2.
    """
    if model.fg.alphabet != 2 or not _is_uniform_prior(model):
        raise ValueError("requires uniform binary labels")
    etas = []
    for f in model.fg.factors:
        if len(f.vars) != 2:
            raise ValueError("requires degree-2 factors")
        delta = _parity_delta(f.channel)
        if delta is None:
            raise ValueError("requires XOR-through-BSC factors")
        etas.append((1.0 - 2.0 * delta) ** 2)
    s = tuple(sorted(set(s_vars)))
    lhs = exact_mi(model, (v,), s, "joint")
    if s:
        perc_fg = FactorGraph(model.fg.n_vars, 2, tuple(
            Factor(f.vars, eta) for f, eta in zip(model.fg.factors, etas)))
        rhs = perc_exact(perc_fg, (v,), s) * LOG2
    else:
        rhs = 0.0
    param = float(np.mean([_parity_delta(f.channel) for f in model.fg.factors])) \
        if model.fg.factors else 0.0
    return VerifyReport(instance, param, lhs, rhs)


def verify_thm2(model, s1, s2, instance=""):
    """Conditional-information percolation bound for independent labels.

    lhs = I(X_S1 ; X_S2 | Y) exactly; rhs = perc(S1, S2) with the factors'
    own retention probabilities, times the largest label entropy.
    """
    if not is_independent_prior(model):
        raise ValueError("requires independent labels")
    s1 = tuple(sorted(set(s1)))
    s2 = tuple(sorted(set(s2)))
    lhs = exact_mi(model, s1, s2, "cond_given_y")
    if s1 and s2:
        rhs = perc_exact(model.fg, s1, s2) * max_vertex_entropy(model)
    else:
        rhs = 0.0
    param = float(np.mean([f.eta for f in model.fg.factors])) if model.fg.factors else 0.0
    return VerifyReport(instance, param, lhs, rhs)


def erasure_twin(model):
    """Replace every factor by the channel that reveals the exact neighborhood
    tuple with its retention probability and erases otherwise."""
    k = model.fg.alphabet
    factors = tuple(
        Factor(f.vars, f.eta, reveal_channel(k, len(f.vars), f.eta))
        for f in model.fg.factors)
    return SmallModel(FactorGraph(model.fg.n_vars, k, factors), model.prior)


def random_factor_model(seed, dependent=False, max_vars=5):
    """Random small model for bound verification sweeps.

    Returns (model, s1, s2).  Factors mix XOR observations (degree 2 and 3),
    agreement edges, reveal-or-erase factors, and generic binary-output
    degree-1 channels; every family has an exactly known contraction
    coefficient, stored as the factor's retention probability.  Labels get a
    non-uniform independent prior, or a dependent one when requested.
    """
    from .channels import DiscretePair, eta_kl_closed
    from .graphs import equality_channel, unary_channel

    rng = substream(seed, 0)
    n = int(rng.integers(3, max_vars + 1))
    k = 3 if (n <= 4 and rng.random() < 0.3) else 2
    factors = []
    for _ in range(int(rng.integers(2, 6))):
        kinds = ["equality", "reveal"] if k > 2 else ["parity", "equality", "reveal", "unary"]
        kind = kinds[int(rng.integers(len(kinds)))]
        if kind == "parity":
            deg = int(rng.integers(2, 4))
            delta = 0.02 + 0.46 * rng.random()
            ch = parity_channel(delta, deg)
            eta = (1.0 - 2.0 * delta) ** 2
        elif kind == "equality":
            deg = 2
            p, q = 0.05 + 0.9 * rng.random(2)
            ch = equality_channel(p, q, k)
            eta = eta_kl_closed(DiscretePair([1 - p, p], [1 - q, q]))
        elif kind == "reveal":
            deg = int(rng.integers(1, 3))
            eta = rng.random()
            ch = reveal_channel(k, deg, eta)
        else:
            deg = 1
            rows = 0.05 + rng.random((2, 2))
            rows /= rows.sum(axis=1, keepdims=True)
            ch = unary_channel(rows[0], rows[1])
            eta = eta_kl_closed(DiscretePair(rows[0], rows[1]))
        variables = rng.choice(n, size=deg, replace=False)
        factors.append(Factor(tuple(int(v) for v in variables), eta, ch))
    if dependent:
        if rng.random() < 0.5:
            prior = rng.random(k**n) ** 2
            prior /= prior.sum()
        else:
            # Force the first two labels equal.
            prior = independent_prior([_norm(0.1 + rng.random(k)) for _ in range(n)])
            digits = (np.arange(k**n) // k ** (n - 1)) % k, (np.arange(k**n) // k ** (n - 2)) % k
            prior = np.where(digits[0] == digits[1], prior, 0.0)
            prior /= prior.sum()
    else:
        prior = independent_prior([_norm(0.15 + rng.random(k)) for _ in range(n)])
    model = SmallModel(FactorGraph(n, k, tuple(factors)), prior)
    s1 = tuple(int(v) for v in rng.choice(n, size=int(rng.integers(1, 3)), replace=False))
    s2 = tuple(int(v) for v in rng.choice(n, size=int(rng.integers(1, 3)), replace=False))
    return model, s1, s2


def _norm(v):
    v = np.asarray(v, dtype=float)
    return v / v.sum()


def verify_compare(model, s1, s2, instance=""):
    """Erasure-channel comparison: observations through the true factors carry
    no more conditional information than the erasure counterparts whose pass
    probabilities are the factors' contraction coefficients.  Any label prior
    is allowed, dependent ones included."""
    s1 = tuple(sorted(set(s1)))
    s2 = tuple(sorted(set(s2)))
    lhs = exact_mi(model, s1, s2, "cond_given_x")
    rhs = exact_mi(erasure_twin(model), s1, s2, "cond_given_x")
    param = float(np.mean([f.eta for f in model.fg.factors])) if model.fg.factors else 0.0
    return VerifyReport(instance, param, lhs, rhs)
