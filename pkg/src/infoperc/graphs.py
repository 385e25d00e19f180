"""Graphs and bipartite factor graphs on which the bounds are evaluated."""

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceededError

# Guards against accidentally huge constructions (complete(10^5) etc).
MAX_VERTICES = 1 << 22
MAX_EDGES = 1 << 26


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1."""

    n: int
    edges: tuple

    def __post_init__(self):
        if self.n < 0 or self.n > MAX_VERTICES:
            raise BudgetExceededError(f"vertex count {self.n} outside [0, {MAX_VERTICES}]")
        if len(self.edges) > MAX_EDGES:
            raise BudgetExceededError(f"edge count {len(self.edges)} exceeds {MAX_EDGES}")
        seen = set()
        norm = []
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u},{v}) out of range for n={self.n}")
            e = (u, v) if u < v else (v, u)
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
            norm.append(e)
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def m(self):
        return len(self.edges)

    def adjacency(self):
        adj = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj


def path_graph(n):
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def cycle_graph(n):
    if n < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def complete_graph(n):
    return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def grid2d_graph(w, h):
    """w x h grid, vertices numbered row-major: v = r*w + c."""
    if w < 1 or h < 1:
        raise ValueError("grid sides must be positive")
    edges = []
    for r in range(h):
        for c in range(w):
            v = r * w + c
            if c + 1 < w:
                edges.append((v, v + 1))
            if r + 1 < h:
                edges.append((v, v + w))
    return Graph(w * h, tuple(edges))


def dary_tree_graph(d, depth):
    """Complete d-ary tree down to `depth`, breadth-first numbering, root 0."""
    if d < 1 or depth < 0:
        raise ValueError("need d >= 1 and depth >= 0")
    edges = []
    next_id = 1
    frontier = [0]
    for _ in range(depth):
        new_frontier = []
        for parent in frontier:
            for _ in range(d):
                edges.append((parent, next_id))
                new_frontier.append(next_id)
                next_id += 1
        frontier = new_frontier
        if next_id > MAX_VERTICES:
            raise BudgetExceededError("tree too large")
    return Graph(next_id, tuple(edges))


_MAKERS = {
    "path": path_graph,
    "cycle": cycle_graph,
    "complete": complete_graph,
    "grid2d": grid2d_graph,
    "dary_tree": dary_tree_graph,
}


def make_graph(kind, *args):
    """Dispatch constructor: make_graph("grid2d", 3, 3) etc."""
    if kind not in _MAKERS:
        raise ValueError(f"unknown graph kind {kind!r}; choices: {sorted(_MAKERS)}")
    return _MAKERS[kind](*args)


def tree_layer(d, depth):
    """Vertex ids of the depth-`depth` layer of dary_tree_graph(d, ...)."""
    if d == 1:
        return [depth]
    start = (d**depth - 1) // (d - 1)
    return list(range(start, start + d**depth))


def _decode_pairs(idx):
    """Map linear indices into the strict upper triangle to (u, v), u < v.

    Pairs are ordered (0,1),(0,2),(1,2),(0,3),... i.e. idx = v(v-1)/2 + u.
    """
    idx = np.asarray(idx, dtype=np.int64)
    v = ((1.0 + np.sqrt(1.0 + 8.0 * idx.astype(np.float64))) // 2).astype(np.int64)
    # Float sqrt can be off by one near 2^53; fix up exactly.
    v = np.where(v * (v - 1) // 2 > idx, v - 1, v)
    v = np.where((v + 1) * v // 2 <= idx, v + 1, v)
    u = idx - v * (v - 1) // 2
    return u, v


def bernoulli_indices(rng, n_items, p):
    """Indices of an i.i.d. Bernoulli(p) thinning of range(n_items).

    Uses geometric gap skipping so the cost is O(number of hits), which makes
    sparse samples over ~10^9 slots practical.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    if n_items == 0 or p == 0.0:
        return np.empty(0, dtype=np.int64)
    if p == 1.0:
        return np.arange(n_items, dtype=np.int64)
    out = []
    pos = -1
    log1p = math.log1p(-p)
    block = max(256, int(n_items * p * 1.2) + 16)
    while True:
        u = rng.random(block)
        gaps = np.floor(np.log(u) / log1p).astype(np.int64) + 1
        hits = pos + np.cumsum(gaps)
        take = hits[hits < n_items]
        out.append(take)
        if take.size < hits.size:
            break
        pos = int(hits[-1])
    return np.concatenate(out) if out else np.empty(0, dtype=np.int64)


def sample_er(n, p, seed):
    """One sample of the Erdos-Renyi graph ER(n, p), deterministic given seed."""
    from .rng import substream

    rng = substream(seed, 0)
    n_pairs = n * (n - 1) // 2
    idx = bernoulli_indices(rng, n_pairs, p)
    u, v = _decode_pairs(idx)
    return Graph(n, tuple(zip(u.tolist(), v.tolist())))


def sample_er_edges(n, p, rng):
    """Edge arrays (u, v) of an ER(n, p) sample, for bulk consumers."""
    idx = bernoulli_indices(rng, n * (n - 1) // 2, p)
    return _decode_pairs(idx)


def boundary_at_distance(g, u, t):
    """Exact graph-distance-t sphere around u (breadth-first)."""
    if t < 0:
        raise ValueError("distance must be nonnegative")
    if t == 0:
        return {u}
    adj = g.adjacency()
    dist = {u: 0}
    frontier = deque([u])
    sphere = set()
    while frontier:
        x = frontier.popleft()
        dx = dist[x]
        if dx == t:
            continue
        for y in adj[x]:
            if y not in dist:
                dist[y] = dx + 1
                if dx + 1 == t:
                    sphere.add(y)
                frontier.append(y)
    return sphere


@dataclass(frozen=True)
class FactorChannel:
    """Conditional table of a discrete factor observation.

    `table` has one row per joint input (mixed-radix index of the neighborhood
    labels, most significant digit first) and one column per output letter.
    """

    alphabet: int
    degree: int
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.shape[0] != self.alphabet**self.degree:
            raise ValueError("table rows must cover alphabet^degree inputs")
        if np.any(t < 0) or np.any(np.abs(t.sum(axis=1) - 1.0) > 1e-9):
            raise ValueError("table rows must be probability vectors")
        object.__setattr__(self, "table", t)

    @property
    def n_out(self):
        return self.table.shape[1]


def parity_channel(delta, degree=2, alphabet=2):
    """Observation of the XOR of the neighborhood bits through a BSC(delta)."""
    if alphabet != 2:
        raise ValueError("parity factors are binary")
    rows = np.empty((2**degree, 2))
    for i in range(2**degree):
        parity = bin(i).count("1") % 2
        rows[i] = (delta, 1.0 - delta) if parity else (1.0 - delta, delta)
    return FactorChannel(2, degree, rows)


def equality_channel(p, q, alphabet):
    """Edge observation Bern(p) when the endpoints agree, Bern(q) otherwise."""
    k = alphabet
    rows = np.empty((k * k, 2))
    for i in range(k * k):
        same = (i // k) == (i % k)
        r = p if same else q
        rows[i] = (1.0 - r, r)
    return FactorChannel(k, 2, rows)


def reveal_channel(alphabet, degree, pass_prob):
    """Erasure-style factor: reveals the exact neighborhood tuple w.p. pass_prob."""
    k_in = alphabet**degree
    rows = np.zeros((k_in, k_in + 1))
    rows[np.arange(k_in), np.arange(k_in)] = pass_prob
    rows[:, k_in] = 1.0 - pass_prob
    return FactorChannel(alphabet, degree, rows)


def unary_channel(p0, p1):
    """Degree-1 binary-input factor given by two output rows."""
    rows = np.vstack([np.asarray(p0, dtype=float), np.asarray(p1, dtype=float)])
    return FactorChannel(2, 1, rows)


@dataclass(frozen=True)
class Factor:
    """One observation node: neighborhood, channel (may be None), retention eta."""

    vars: tuple
    eta: float
    channel: FactorChannel = None

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(int(v) for v in self.vars))
        if len(self.vars) == 0:
            raise ValueError("factor neighborhood must be nonempty")
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("factor neighborhood has repeated variables")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must be in [0, 1], got {self.eta}")
        if self.channel is not None and self.channel.degree != len(self.vars):
            raise ValueError("channel degree does not match neighborhood size")


@dataclass(frozen=True)
class FactorGraph:
    """Bipartite observation graph: variables 0..n_vars-1 plus factor nodes."""

    n_vars: int
    alphabet: int
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if self.alphabet < 2:
            raise ValueError("alphabet must have at least two labels")
        for f in self.factors:
            for v in f.vars:
                if not 0 <= v < self.n_vars:
                    raise ValueError(f"factor variable {v} out of range")
            if f.channel is not None and f.channel.alphabet != self.alphabet:
                raise ValueError("factor channel alphabet mismatch")

    @property
    def n_factors(self):
        return len(self.factors)

    def drop_factor(self, w):
        return FactorGraph(self.n_vars, self.alphabet,
                           self.factors[:w] + self.factors[w + 1:])


def incidence_factor_graph(g, channel, eta):
    """One degree-2 factor per edge of g, uniform retention probability eta."""
    factors = tuple(Factor((u, v), eta, channel) for u, v in g.edges)
    alphabet = channel.alphabet if channel is not None else 2
    return FactorGraph(g.n, alphabet, factors)


def to_edge_list_text(g):
    """Serialize to the edge-list format: first line "n m", then "u v" lines."""
    lines = [f"{g.n} {g.m}"]
    lines += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def from_edge_list_text(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n, m = map(int, lines[0].split())
    edges = [tuple(map(int, ln.split())) for ln in lines[1 : 1 + m]]
    if len(edges) != m:
        raise ValueError("edge list shorter than declared")
    return Graph(n, tuple(edges))
