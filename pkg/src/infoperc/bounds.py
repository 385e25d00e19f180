"""Closed-form impossibility bounds and (a, b) phase-boundary curves.

All curves are leading-order asymptotic boundaries (vanishing corrections
dropped) reported on the a >= b branch.
"""

import math
from dataclasses import dataclass

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class CurvePoint:
    a: float
    b: float
    curve: str

    def __post_init__(self):
        if not self.a >= self.b >= 0:
            raise ValueError("curve points live on the a >= b >= 0 branch")


def fano_bound(info_nats, p_max=0.5):
    """Estimation-error lower bound (1 - p_max) - sqrt(info/2), clamped to [0, 1].

    info_nats is the information available about the target; p_max is the
    probability of its most likely value.
    """
    if info_nats < 0:
        raise ValueError("information must be nonnegative")
    if not 0.0 < p_max <= 1.0:
        raise ValueError("p_max must be in (0, 1]")
    return min(1.0, max(0.0, (1.0 - p_max) - math.sqrt(info_nats / 2.0)))


def fano_bound_from_perc(perc, p_max=0.5, h_max_nats=LOG2):
    """Percolation variant: the information is at most perc * h_max_nats."""
    return fano_bound(perc * h_max_nats, p_max)


def curve_mns(b):
    """a >= b root of (a - b)^2 = 2(a + b): the sharp two-community boundary."""
    if b < 0:
        raise ValueError("b must be nonnegative")
    return b + 1.0 + math.sqrt(4.0 * b + 1.0)


def curve_perc_2sbm(b):
    """Two-community percolation boundary (sqrt(a) - sqrt(b))^2 = 1."""
    if b < 0:
        raise ValueError("b must be nonnegative")
    # Expanded form of (1 + sqrt(b))^2: exact at b = 0.
    return 1.0 + b + 2.0 * math.sqrt(b)


def _banks_rhs(k):
    return 2.0 * k * math.log(k - 1.0) / (k - 1.0)


def curve_banks(k, b):
    """a >= b root of (a - b)^2 = c * (a + (k-1) b), c = 2k log(k-1)/(k-1)."""
    if k < 3:
        raise ValueError("needs k >= 3")
    if b < 0:
        raise ValueError("b must be nonnegative")
    c = _banks_rhs(k)
    return b + 0.5 * c + math.sqrt(0.25 * c * c + c * b * k)


def curve_ksbm(k, b):
    """k-community percolation boundary (sqrt(a) - sqrt(b))^2 = k/2."""
    if k < 2:
        raise ValueError("needs k >= 2")
    if b < 0:
        raise ValueError("b must be nonnegative")
    return k / 2.0 + b + 2.0 * math.sqrt(k * b / 2.0)


def f_gupo(k):
    """Tree-reconstruction degree threshold
    f(k) = ( (log k - log(k-1))/log k * (k-1)/k + 1/k )^{-1},
    which grows like k - k/log k."""
    if k < 2:
        raise ValueError("needs k >= 2")
    term = (math.log(k) - math.log(k - 1.0)) / math.log(k) * (k - 1.0) / k
    return 1.0 / (term + 1.0 / k)


def curve_gupo(k, b):
    """Boundary (sqrt(a) - sqrt(b))^2 = f(k)."""
    if b < 0:
        raise ValueError("b must be nonnegative")
    f = f_gupo(k)
    return f + b + 2.0 * math.sqrt(f * b)


_CURVES = {
    "mns": lambda k, b: curve_mns(b),
    "perc2sbm": lambda k, b: curve_perc_2sbm(b),
    "ksbm": curve_ksbm,
    "banks": curve_banks,
    "gupo": curve_gupo,
}


def curve_value(curve, k, b):
    if curve not in _CURVES:
        raise ValueError(f"unknown curve {curve!r}; choices: {sorted(_CURVES)}")
    return _CURVES[curve](k, b)


def curve_points(curve, k, b_grid):
    return [CurvePoint(curve_value(curve, k, b), b, curve) for b in b_grid]


def region_classify(a, b, k):
    """Names of the bounds under which (a, b) is in the impossible region.

    The sharp two-community test and the k >= 3 comparison boundary are only
    reported where they apply.
    """
    if a < 0 or b < 0:
        raise ValueError("a and b must be nonnegative")
    if k < 2:
        raise ValueError("needs k >= 2")
    gap = (math.sqrt(a) - math.sqrt(b)) ** 2
    names = set()
    if gap < 1.0:
        names.add("perc2sbm")
    if gap <= k / 2.0:
        names.add("ksbm")
    if gap < f_gupo(k):
        names.add("gupo")
    if k == 2 and (a - b) ** 2 <= 2.0 * (a + b):
        names.add("mns")
    if k >= 3 and (a - b) ** 2 < _banks_rhs(k) * (a + (k - 1.0) * b):
        names.add("banks")
    return names


def applicable_bounds(k):
    """Bound names region_classify can report for this k."""
    names = {"perc2sbm", "ksbm", "gupo"}
    names.add("mns" if k == 2 else "banks")
    return names
