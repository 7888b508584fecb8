"""Hidden-Markov models for the receiver and eavesdropper symbol streams.

The eavesdropper's flattened bit stream Z is hidden Markov over the source
register states: insertions freeze the state (Q = (1-i)P + iI) and emit a
coin flip mixed with the register bit, deletions jump it (Q =
(1-d)(I-dP)^{-1}P) with deterministic emission, and the receiver's Y
process keeps Q = P with erasure emissions. Entropy rates are estimated by
sampling a path and running the normalized forward recursion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ImpossibleObservation
from .sources import MarkovSource, STATIONARY_TOL
from .util import ERASURE, EstimateReport, derive_seeds, parallel_map

EMISSION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class HiddenMarkovModel:
    """Edge-emission HMM: Pr(z | s, s') may depend on the whole transition.

    transition: (S,S) row-stochastic; emission: (S,S,A) with rows summing
    to 1 on every edge with positive transition probability; initial is
    stationary for the transition matrix.
    """

    transition: np.ndarray
    emission: np.ndarray
    initial: np.ndarray

    def __post_init__(self):
        Q = np.asarray(self.transition, dtype=float)
        E = np.asarray(self.emission, dtype=float)
        pi = np.asarray(self.initial, dtype=float)
        S = Q.shape[0]
        if Q.shape != (S, S) or E.shape[:2] != (S, S) or pi.shape != (S,):
            raise ValueError("inconsistent HMM shapes")
        if np.any(np.abs(Q.sum(axis=1) - 1.0) > EMISSION_TOL):
            raise ValueError("transition rows must sum to 1")
        live = Q > 0.0
        if np.any(np.abs(E[live].sum(axis=1) - 1.0) > EMISSION_TOL):
            raise ValueError("emission rows on live edges must sum to 1")
        if np.any(E < -EMISSION_TOL) or np.any(E > 1.0 + EMISSION_TOL):
            raise ValueError("emission probabilities must lie in [0,1]")
        if np.max(np.abs(pi @ Q - pi)) > STATIONARY_TOL:
            raise ValueError("initial distribution must be stationary for Q")
        object.__setattr__(self, "transition", Q)
        object.__setattr__(self, "emission", E)
        object.__setattr__(self, "initial", pi)
        for arr in (Q, E, pi):
            arr.setflags(write=False)

    @property
    def num_states(self) -> int:
        return self.transition.shape[0]

    @property
    def alphabet_size(self) -> int:
        return self.emission.shape[2]


def build_insertion_hmm(source: MarkovSource, i: float) -> HiddenMarkovModel:
    """Z-process model for the pure-insertion channel (d = 0)."""
    if not 0.0 <= i < 1.0:
        raise ValueError(f"insertion probability must lie in [0,1), got {i}")
    P = source.transitions
    S = source.num_states
    Q = (1.0 - i) * P + i * np.eye(S)
    last = source.last_bits()
    E = np.zeros((S, S, 2))
    for s in range(S):
        for sp in range(S):
            if Q[s, sp] <= 0.0:
                # dead edge; keep a valid row for completeness
                E[s, sp, last[sp]] = 1.0
                continue
            if s == sp:
                flip = (i / 2.0) / Q[s, s] if i > 0.0 else 0.0
                E[s, s, 1 - last[s]] = flip
                E[s, s, last[s]] = 1.0 - flip
            else:
                E[s, sp, last[sp]] = 1.0
    return HiddenMarkovModel(Q, E, source.stationary)


def build_deletion_hmm(source: MarkovSource, d: float) -> HiddenMarkovModel:
    """Z-process model for the pure-deletion channel (i = 0)."""
    if not 0.0 <= d < 1.0:
        raise ValueError(f"deletion probability must lie in [0,1), got {d}")
    P = source.transitions
    S = source.num_states
    Q = (1.0 - d) * np.linalg.solve(np.eye(S) - d * P, P)
    Q = np.clip(Q, 0.0, None)
    Q /= Q.sum(axis=1, keepdims=True)
    last = source.last_bits()
    E = np.zeros((S, S, 2))
    for sp in range(S):
        E[:, sp, last[sp]] = 1.0
    return HiddenMarkovModel(Q, E, source.stationary)


def build_erasure_hmm(source: MarkovSource, d: float) -> HiddenMarkovModel:
    """Y-process model: the source observed through an erasure channel."""
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"erasure probability must lie in [0,1], got {d}")
    S = source.num_states
    last = source.last_bits()
    E = np.zeros((S, S, 3))
    for sp in range(S):
        E[:, sp, last[sp]] = 1.0 - d
        E[:, sp, ERASURE] = d
    return HiddenMarkovModel(source.transitions, E, source.stationary)


def hmm_sample(model: HiddenMarkovModel, k: int, rng) -> np.ndarray:
    """Sample k output symbols (stationary start); deterministic given seed."""
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(rng)
    cum_rows = np.cumsum(model.transition, axis=1)
    cum_emit = np.cumsum(model.emission, axis=2)
    start = int(np.searchsorted(np.cumsum(model.initial), rng.random(), side="right"))
    start = min(start, model.num_states - 1)
    u = rng.random(2 * k)
    obs = np.empty(k, dtype=np.uint8)
    _kernels.hmm_walk_emit(cum_rows, cum_emit, start, u[:k], u[k:], obs)
    return obs


def _weighted_transitions(model: HiddenMarkovModel) -> np.ndarray:
    # W[a, s, s'] = Q(s,s') Pr(a | s,s'), the per-symbol forward operator
    Q = model.transition
    E = model.emission
    return np.ascontiguousarray(np.moveaxis(E * Q[:, :, None], 2, 0))


def forward_nll(model: HiddenMarkovModel, obs) -> float:
    """-log2 P(obs) by the normalized forward recursion (bits)."""
    obs = np.asarray(obs, dtype=np.uint8)
    if obs.ndim != 1 or obs.size == 0:
        raise ValueError("observation sequence must be a nonempty 1-D array")
    if obs.max() >= model.alphabet_size:
        raise ValueError("observation symbol outside the model alphabet")
    nll, bad = _kernels.hmm_forward_nll(_weighted_transitions(model), model.initial, obs)
    if bad >= 0:
        raise ImpossibleObservation(f"prefix of length {bad + 1} has probability 0")
    return float(nll)


def mc_entropy_rate(model: HiddenMarkovModel, k: int, runs: int, seed) -> EstimateReport:
    """Monte-Carlo estimate of the output entropy rate lim (1/k) H(Z^k).

    Each run samples a length-k output and evaluates -log2 P / k with the
    forward recursion; the report carries the mean and standard error over
    independent, separately seeded runs.
    """
    if runs < 2:
        raise ValueError("need runs >= 2")
    seeds = derive_seeds(seed, runs, "mc-entropy")
    W = _weighted_transitions(model)
    cum_rows = np.cumsum(model.transition, axis=1)
    cum_emit = np.cumsum(model.emission, axis=2)
    cum_init = np.cumsum(model.initial)

    def one_run(run_seed):
        rng = np.random.default_rng(int(run_seed))
        start = min(
            int(np.searchsorted(cum_init, rng.random(), side="right")),
            model.num_states - 1,
        )
        u = rng.random(2 * k)
        obs = np.empty(k, dtype=np.uint8)
        _kernels.hmm_walk_emit(cum_rows, cum_emit, start, u[:k], u[k:], obs)
        nll, bad = _kernels.hmm_forward_nll(W, model.initial, obs)
        if bad >= 0:  # cannot happen for self-generated data
            raise ImpossibleObservation(f"self-sample impossible at step {bad}")
        return nll / k

    values = parallel_map(one_run, seeds)
    return EstimateReport.from_values(values, k, seeds)


def scale_factor(i: float, d: float) -> float:
    """Symbols out per symbol in: converts rates of Z^k to rates of the
    flattened output, (1-(1-i)d)/(1-i)."""
    if not 0.0 <= i < 1.0:
        raise ValueError(f"insertion probability must lie in [0,1), got {i}")
    return (1.0 - (1.0 - i) * d) / (1.0 - i)


def scaled_z_entropy_rate(
    source: MarkovSource, i: float, d: float, k: int, runs: int, seed
) -> EstimateReport:
    """Estimate of lim (1/n) H(flattened eavesdropper output).

    Supported for the pure channels only (i = 0 or d = 0); the flattened
    rate is the Z^k rate times the expected output length per input.
    """
    if i > 0.0 and d > 0.0:
        raise ValueError(
            "combined insertion+deletion Z-process is unsupported; set i=0 or d=0"
        )
    if d > 0.0:
        model = build_deletion_hmm(source, d)
    else:
        model = build_insertion_hmm(source, i)
    factor = scale_factor(i, d)
    raw = mc_entropy_rate(model, k, runs, seed)
    return EstimateReport(
        mean=factor * raw.mean,
        stderr=factor * raw.stderr,
        runs=raw.runs,
        length=raw.length,
        seeds=raw.seeds,
    )


def exact_output_entropy(model: HiddenMarkovModel, k: int) -> float:
    """H(Z^k) in bits by enumerating every output word (test oracle).

    Walks the output tree depth-first carrying unnormalized forward
    vectors, so P(word) = sum of the leaf vector. Exponential in k.
    """
    if model.alphabet_size**k > 2**22:
        raise ValueError("enumeration oracle limited to alphabet^k <= 2^22")
    W = _weighted_transitions(model)
    acc = 0.0
    stack = [(np.asarray(model.initial, dtype=float), 0)]
    while stack:
        alpha, depth = stack.pop()
        if depth == k:
            p = alpha.sum()
            if p > 0.0:
                acc -= p * np.log2(p)
            continue
        for a in range(model.alphabet_size):
            nxt = alpha @ W[a]
            if nxt.sum() > 0.0:
                stack.append((nxt, depth + 1))
    return float(acc)
