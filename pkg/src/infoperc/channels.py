"""Binary-input channels: divergences, contraction coefficients, chi2 information.

A binary-input channel is carried around as the pair (P, Q) of output
distributions for input 0 and input 1.  All information quantities are in
nats; the CLI converts to bits where users expect them.
"""

import math
from dataclasses import dataclass, field

import numpy as np

LOG2 = math.log(2.0)

# Gaussian pairs are handled on a fixed discretization: uniform grid covering
# +-8 sigma beyond the means (tail mass < 1e-14), trapezoidal weights
# renormalized to a probability vector.
GAUSS_GRID_POINTS = 4001
GAUSS_TAIL_SIGMAS = 8.0

_PROB_SUM_TOL = 1e-12


def _as_probs(p, name="distribution"):
    if isinstance(p, FiniteDistribution):
        return p.probs
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-d probability vector")
    if np.any(arr < 0):
        raise ValueError(f"{name} has negative weights")
    if abs(arr.sum() - 1.0) > _PROB_SUM_TOL:
        raise ValueError(f"{name} weights sum to {arr.sum()}, not 1")
    return arr


@dataclass(frozen=True)
class FiniteDistribution:
    """Probability vector over a finite output alphabet."""

    probs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", arr)
        _as_probs(arr)

    def __len__(self):
        return self.probs.size


def _check_pair(p, q):
    p = _as_probs(p, "P")
    q = _as_probs(q, "Q")
    if p.size != q.size:
        raise ValueError(f"dimension mismatch: {p.size} vs {q.size}")
    return p, q


def kl_divergence(p, q):
    """KL divergence D(P||Q) in nats; +inf if P is not dominated by Q."""
    p, q = _check_pair(p, q)
    if np.any((p > 0) & (q == 0)):
        return math.inf
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def chi2_divergence(p, q):
    """chi-squared divergence sum (P-Q)^2 / Q; +inf off the support of Q."""
    p, q = _check_pair(p, q)
    if np.any((p > 0) & (q == 0)):
        return math.inf
    mask = q > 0
    return float(np.sum((p[mask] - q[mask]) ** 2 / q[mask]))


def hellinger_sq(p, q):
    """Squared Hellinger distance, symmetric, in [0, 2]."""
    p, q = _check_pair(p, q)
    return float(np.sum((np.sqrt(p) - np.sqrt(q)) ** 2))


def lecam_beta(p, q, beta):
    """Le Cam divergence LC_beta = beta*(1-beta) * sum (P-Q)^2 / (beta*P + (1-beta)*Q).

    Output points where the mixture beta*P + (1-beta)*Q vanishes contribute 0.
    """
    p, q = _check_pair(p, q)
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must be in [0, 1], got {beta}")
    den = beta * p + (1.0 - beta) * q
    num = (p - q) ** 2
    mask = den > 0
    return float(beta * (1.0 - beta) * np.sum(num[mask] / den[mask]))


def _lecam_grid(p, q, betas):
    den = betas[:, None] * p[None, :] + (1.0 - betas[:, None]) * q[None, :]
    num = (p - q) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(den > 0, num[None, :] / np.where(den > 0, den, 1.0), 0.0)
    return betas * (1.0 - betas) * terms.sum(axis=1)


class BinaryInputChannel:
    """Base class; subclasses provide the (P, Q) output-distribution pair."""

    def pair(self):
        raise NotImplementedError


@dataclass(frozen=True)
class DiscretePair(BinaryInputChannel):
    """Channel given directly by two distributions on a shared alphabet."""

    p0: FiniteDistribution
    p1: FiniteDistribution

    def __post_init__(self):
        p0 = self.p0 if isinstance(self.p0, FiniteDistribution) else FiniteDistribution(np.asarray(self.p0, dtype=float))
        p1 = self.p1 if isinstance(self.p1, FiniteDistribution) else FiniteDistribution(np.asarray(self.p1, dtype=float))
        if len(p0) != len(p1):
            raise ValueError("DiscretePair distributions must share one alphabet")
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "p1", p1)

    def pair(self):
        return self.p0.probs, self.p1.probs


@dataclass(frozen=True)
class Bsc(BinaryInputChannel):
    """Binary symmetric channel with crossover probability delta in [0, 1/2]."""

    delta: float

    def __post_init__(self):
        if not 0.0 <= self.delta <= 0.5:
            raise ValueError(f"BSC crossover must be in [0, 1/2], got {self.delta}")

    def pair(self):
        d = self.delta
        return np.array([1.0 - d, d]), np.array([d, 1.0 - d])


@dataclass(frozen=True)
class Erasure(BinaryInputChannel):
    """Reveals the input bit with probability `pass_prob`, else an erasure symbol."""

    pass_prob: float

    def __post_init__(self):
        if not 0.0 <= self.pass_prob <= 1.0:
            raise ValueError(f"pass probability must be in [0, 1], got {self.pass_prob}")

    def pair(self):
        e = 1.0 - self.pass_prob
        return np.array([self.pass_prob, 0.0, e]), np.array([0.0, self.pass_prob, e])


@dataclass(frozen=True)
class GaussianPair(BinaryInputChannel):
    """N(mu0, sigma^2) vs N(mu1, sigma^2), discretized on a fixed grid."""

    mu0: float
    mu1: float
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    def pair(self):
        lo = min(self.mu0, self.mu1) - GAUSS_TAIL_SIGMAS * self.sigma
        hi = max(self.mu0, self.mu1) + GAUSS_TAIL_SIGMAS * self.sigma
        x = np.linspace(lo, hi, GAUSS_GRID_POINTS)
        w = np.full(x.size, x[1] - x[0])
        w[0] *= 0.5
        w[-1] *= 0.5

        def density(mu):
            z = (x - mu) / self.sigma
            d = np.exp(-0.5 * z * z) * w
            return d / d.sum()

        return density(self.mu0), density(self.mu1)


@dataclass(frozen=True)
class BmsMixture(BinaryInputChannel):
    """Mixture of BSCs: a random crossover Delta is drawn and revealed with the bit."""

    components: tuple = field(default=())

    def __post_init__(self):
        comps = tuple((float(w), float(d)) for w, d in self.components)
        if not comps:
            raise ValueError("mixture needs at least one component")
        weights = np.array([w for w, _ in comps])
        _as_probs(weights, "mixture weights")
        for _, d in comps:
            if not 0.0 <= d <= 0.5:
                raise ValueError(f"component crossover must be in [0, 1/2], got {d}")
        object.__setattr__(self, "components", comps)

    def pair(self):
        # Two output letters per component: (component index, bit).
        p = np.empty(2 * len(self.components))
        q = np.empty(2 * len(self.components))
        for i, (w, d) in enumerate(self.components):
            p[2 * i : 2 * i + 2] = (w * (1.0 - d), w * d)
            q[2 * i : 2 * i + 2] = (w * d, w * (1.0 - d))
        return p, q


def _golden_max(f, a, b, tol):
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    best = max(fc, fd)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
        best = max(best, fc, fd)
    return best


def eta_kl_numeric(ch, tol=1e-10):
    """Contraction coefficient as sup over beta of LC_beta(P||Q).

    Dense grid (step 1e-3) first so no local maximum is missed, then
    golden-section refinement around the best grid point.
    """
    p, q = ch.pair()
    if np.array_equal(p, q):
        return 0.0
    betas = np.linspace(0.0, 1.0, 1001)
    vals = _lecam_grid(p, q, betas)
    i = int(np.argmax(vals))
    lo = betas[max(i - 1, 0)]
    hi = betas[min(i + 1, betas.size - 1)]
    refined = _golden_max(lambda b: lecam_beta(p, q, b), lo, hi, tol)
    return max(float(vals[i]), refined)


def eta_kl_closed(ch):
    """Exact closed-form contraction coefficient for the variants that admit one."""
    if isinstance(ch, Bsc):
        return (1.0 - 2.0 * ch.delta) ** 2
    if isinstance(ch, Erasure):
        return ch.pass_prob
    if isinstance(ch, BmsMixture):
        return float(sum(w * (1.0 - 2.0 * d) ** 2 for w, d in ch.components))
    if isinstance(ch, DiscretePair) and len(ch.p0) == 2:
        # Bernoulli pair: p + q - 2pq - 2*sqrt(p(1-p)q(1-q)).
        p = float(ch.p0.probs[1])
        q = float(ch.p1.probs[1])
        return p + q - 2.0 * p * q - 2.0 * math.sqrt(p * (1.0 - p) * q * (1.0 - q))
    raise ValueError(f"no closed form for {type(ch).__name__}; use eta_kl_numeric")


def eta_kl(ch, tol=1e-10):
    """Closed form when available, numeric maximization otherwise."""
    try:
        return eta_kl_closed(ch)
    except ValueError:
        return eta_kl_numeric(ch, tol)


def chi2_mutual_info(ch, prior):
    """chi2 information between the input bit (P[X=1] = prior) and the output.

    Equals LC_{1-prior}(P||Q); in particular LC_{1/2} for a uniform input.
    """
    if not 0.0 < prior < 1.0:
        raise ValueError(f"prior must be in (0, 1), got {prior}")
    p, q = ch.pair()
    return lecam_beta(p, q, 1.0 - prior)


def hellinger_bounds(ch):
    """(H^2/2, H^2): the two-sided squared-Hellinger bracket for eta_kl."""
    p, q = ch.pair()
    h2 = hellinger_sq(p, q)
    return 0.5 * h2, h2


def eta_small_signal(epsilon, tol=1e-10):
    """eta_kl of the Gaussian location pair N(-eps, 1) vs N(eps, 1).

    Behaves like eps^2 as eps -> 0 (unit Fisher information).
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if epsilon == 0:
        return 0.0
    return eta_kl_numeric(GaussianPair(-epsilon, epsilon, 1.0), tol)


def compose_with_bsc(ch, delta):
    """Pre-compose the channel with an independent BSC on its input bit.

    The result is again a binary-input channel on the same output alphabet;
    its contraction coefficient can only shrink.
    """
    if not 0.0 <= delta <= 0.5:
        raise ValueError("delta must be in [0, 1/2]")
    p, q = ch.pair()
    return DiscretePair((1.0 - delta) * p + delta * q, delta * p + (1.0 - delta) * q)


# Keys understood by the structured-text channel configuration (CLI contract).
_CHANNEL_KEYS = {
    "bsc": {"delta"},
    "erasure": {"pass"},
    "bern": {"p", "q"},
    "gaussian": {"mu0", "mu1", "sigma"},
    "mixture": {"components"},
}


def parse_channel(spec):
    """Build a channel from a flat key-value mapping.

    Recognised keys: kind, delta, p, q, pass, mu0, mu1, sigma, components.
    `components` is a comma list of weight:delta pairs, e.g. "0.5:0.0,0.5:0.3".
    Unknown or missing keys raise ValueError.
    """
    spec = {str(k): str(v) for k, v in spec.items()}
    kind = spec.pop("kind", None)
    if kind not in _CHANNEL_KEYS:
        raise ValueError(f"unknown channel kind: {kind!r}")
    allowed = _CHANNEL_KEYS[kind]
    unknown = set(spec) - allowed
    if unknown:
        raise ValueError(f"unknown keys for kind={kind}: {sorted(unknown)}")
    missing = allowed - set(spec)
    if missing:
        raise ValueError(f"missing keys for kind={kind}: {sorted(missing)}")
    if kind == "bsc":
        return Bsc(float(spec["delta"]))
    if kind == "erasure":
        return Erasure(float(spec["pass"]))
    if kind == "bern":
        p, q = float(spec["p"]), float(spec["q"])
        return DiscretePair(np.array([1.0 - p, p]), np.array([1.0 - q, q]))
    if kind == "gaussian":
        return GaussianPair(float(spec["mu0"]), float(spec["mu1"]), float(spec["sigma"]))
    comps = []
    for item in spec["components"].split(","):
        w, _, d = item.partition(":")
        if not _:
            raise ValueError(f"bad mixture component {item!r}; expected weight:delta")
        comps.append((float(w), float(d)))
    return BmsMixture(tuple(comps))
