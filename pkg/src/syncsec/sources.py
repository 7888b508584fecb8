"""Order-M binary Markov input sources.

States are length-M bit strings read as M-bit unsigned integers (most
significant bit oldest). A transition s -> s' is only allowed when the
last M-1 bits of s equal the first M-1 bits of s', i.e. the state is a
shift register over the emitted bits; l(s) = s & 1 is the newest bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import StructureError
from .util import as_bits

ROW_SUM_TOL = 1e-12
STATIONARY_TOL = 1e-10


def binary_entropy(x: float) -> float:
    """h(x) in bits; h(0) = h(1) = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary_entropy requires x in [0,1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return float(-x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x))


def _validate_stochastic(P: np.ndarray) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("transition matrix must be square")
    if np.any(P < 0.0) or np.any(P > 1.0):
        raise ValueError("transition probabilities must lie in [0,1]")
    if np.any(np.abs(P.sum(axis=1) - 1.0) > ROW_SUM_TOL):
        raise ValueError("transition matrix rows must sum to 1")
    return P


def _closed_classes(P: np.ndarray):
    """Communicating classes of the positive-entry digraph, split into
    (closed, open). Uses boolean reachability closure; fine for <= 256
    states."""
    n = P.shape[0]
    adj = (P > 0.0) | np.eye(n, dtype=bool)
    reach = adj.copy()
    while True:
        nxt = reach @ reach
        if (nxt == reach).all():
            break
        reach = nxt
    comm = reach & reach.T
    seen = np.zeros(n, dtype=bool)
    closed, open_ = [], []
    for s in range(n):
        if seen[s]:
            continue
        members = np.flatnonzero(comm[s])
        seen[members] = True
        # closed iff nothing reachable outside the class
        outside = np.setdiff1d(np.flatnonzero(reach[s]), members)
        (closed if outside.size == 0 else open_).append(members)
    return closed, open_


def _period(P: np.ndarray, members: np.ndarray) -> int:
    """gcd of cycle lengths within one strongly connected class."""
    sub = P[np.ix_(members, members)] > 0.0
    n = members.size
    level = np.full(n, -1, dtype=int)
    level[0] = 0
    queue = [0]
    g = 0
    while queue:
        u = queue.pop()
        for v in np.flatnonzero(sub[u]):
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(int(v))
            else:
                g = math.gcd(g, level[u] + 1 - level[v])
    return abs(g) if g else 1


def stationary_dist(P) -> np.ndarray:
    """Unique stationary distribution of a row-stochastic matrix.

    Requires the recurrent structure to be a single aperiodic class;
    rejects reducible-to-several-sinks and periodic chains with a
    StructureError.
    """
    P = _validate_stochastic(P)
    closed, _ = _closed_classes(P)
    if len(closed) != 1:
        raise StructureError(
            f"chain has {len(closed)} closed communicating classes; stationary law not unique"
        )
    members = closed[0]
    if _period(P, members) != 1:
        raise StructureError("chain is periodic on its recurrent class")
    sub = P[np.ix_(members, members)]
    k = members.size
    a = sub.T - np.eye(k)
    a[-1, :] = 1.0
    b = np.zeros(k)
    b[-1] = 1.0
    pi_sub = np.linalg.solve(a, b)
    pi_sub = np.clip(pi_sub, 0.0, None)
    pi_sub /= pi_sub.sum()
    pi = np.zeros(P.shape[0])
    pi[members] = pi_sub
    return pi


@dataclass(frozen=True, eq=False)
class MarkovSource:
    """Validated order-M binary Markov source.

    `transitions` is the 2^M x 2^M shift-register transition matrix and
    `stationary` its stationary law. Instances are immutable and safe to
    share across threads.
    """

    order: int
    transitions: np.ndarray
    stationary: np.ndarray

    def __init__(self, transitions, stationary=None, order: int | None = None):
        P = _validate_stochastic(transitions)
        n = P.shape[0]
        M = int(round(math.log2(n)))
        if 2**M != n or M < 1:
            raise ValueError("state count must be 2^M with M >= 1")
        if order is not None and order != M:
            raise ValueError(f"matrix size {n} implies order {M}, got order={order}")
        low_mask = (1 << (M - 1)) - 1 if M > 0 else 0
        for s in range(n):
            for sp in range(n):
                if P[s, sp] > 0.0 and (s & low_mask) != (sp >> 1):
                    raise ValueError(
                        f"transition {s:0{M}b}->{sp:0{M}b} violates shift-register structure"
                    )
        if stationary is None:
            pi = stationary_dist(P)
        else:
            pi = np.asarray(stationary, dtype=float)
            if pi.shape != (n,):
                raise ValueError("stationary vector has wrong length")
            if np.any(pi < 0.0) or abs(pi.sum() - 1.0) > STATIONARY_TOL:
                raise ValueError("stationary vector must be a probability vector")
            if np.max(np.abs(pi @ P - pi)) > STATIONARY_TOL:
                raise ValueError("supplied vector is not stationary for P")
            self._check_reachable_structure(P, pi)
        object.__setattr__(self, "order", M)
        object.__setattr__(self, "transitions", P)
        object.__setattr__(self, "stationary", pi)
        self.transitions.setflags(write=False)
        self.stationary.setflags(write=False)

    @staticmethod
    def _check_reachable_structure(P, pi):
        # restricted to states reachable from the support of pi, the chain
        # must still be a single aperiodic recurrent class
        n = P.shape[0]
        reach = pi > 0.0
        while True:
            nxt = reach | ((P[reach] > 0.0).any(axis=0))
            if (nxt == reach).all():
                break
            reach = nxt
        sub = P[np.ix_(np.flatnonzero(reach), np.flatnonzero(reach))]
        closed, _ = _closed_classes(sub)
        if len(closed) != 1:
            raise StructureError("chain restricted to reachable states is reducible")
        if _period(sub, closed[0]) != 1:
            raise StructureError("chain restricted to reachable states is periodic")

    @classmethod
    def first_order(cls, p01: float, p10: float) -> "MarkovSource":
        """Two-state source from flip probabilities p01 = P(1|0), p10 = P(0|1)."""
        P = np.array([[1.0 - p01, p01], [p10, 1.0 - p10]], dtype=float)
        return cls(P)

    @classmethod
    def uniform(cls, order: int = 1) -> "MarkovSource":
        n = 2**order
        P = np.zeros((n, n))
        mask = n - 1
        for s in range(n):
            for b in (0, 1):
                P[s, ((s << 1) & mask) | b] = 0.5
        return cls(P)

    @property
    def num_states(self) -> int:
        return self.transitions.shape[0]

    def last_bits(self) -> np.ndarray:
        """l(s) for every state: the newest bit of the register."""
        return (np.arange(self.num_states) & 1).astype(np.uint8)

    def entropy_rate(self) -> float:
        """Closed-form entropy rate in bits per symbol."""
        P = self.transitions
        with np.errstate(divide="ignore", invalid="ignore"):
            plogp = np.where(P > 0.0, P * np.log2(np.where(P > 0.0, P, 1.0)), 0.0)
        return float(-(self.stationary @ plogp.sum(axis=1)))

    def sample(self, n: int, rng) -> np.ndarray:
        """Sample n bits; the initial state is drawn from the stationary law."""
        if n < 1:
            raise ValueError("n must be >= 1")
        rng = np.random.default_rng(rng)
        cum = np.cumsum(self.transitions, axis=1)
        start = int(np.searchsorted(np.cumsum(self.stationary), rng.random(), side="right"))
        start = min(start, self.num_states - 1)
        states = np.empty(n, dtype=np.int64)
        _kernels.markov_walk(cum, start, rng.random(n), states)
        return (states & 1).astype(np.uint8)


def entropy_rate_closed_form(source: MarkovSource) -> float:
    return source.entropy_rate()


def sample_path(source: MarkovSource, n: int, seed) -> np.ndarray:
    """Module-level convenience wrapper around MarkovSource.sample."""
    return source.sample(n, seed)
