"""Independent brute-force oracles used across the test suite.

Everything here recomputes channel quantities from first principles
(pattern enumeration, path sums), deliberately avoiding the library's
trellis/forward code paths.
"""

import itertools
import math

import numpy as np


def deletion_output_law(x, d):
    """Exact {z: P(z|x)} by enumerating all 2^n deletion patterns."""
    x = np.asarray(x, dtype=np.uint8)
    n = x.size
    law = {}
    for mask in range(2**n):
        keep = np.array([(mask >> j) & 1 == 0 for j in range(n)], dtype=bool)
        c = int(n - keep.sum())
        z = bytes(x[keep])
        law[z] = law.get(z, 0.0) + d**c * (1.0 - d) ** (n - c)
    return law


def insertion_output_law(x, i, max_insertions):
    """Truncated {z: P(z|x)} by enumerating insertion patterns.

    Enumerates every (N_1..N_n, B bits) with total insertions <= the cap;
    the missing mass is the negative binomial tail (see negbin_cdf).
    """
    x = [int(b) for b in x]
    n = len(x)
    law = {}
    for total in range(max_insertions + 1):
        for cuts in itertools.combinations(range(total + n - 1), n - 1):
            counts = []
            prev = -1
            for c in cuts:
                counts.append(c - prev - 1)
                prev = c
            counts.append(total + n - 1 - prev - 1)
            p_counts = math.prod((1.0 - i) * i**m for m in counts)
            for bits in itertools.product([0, 1], repeat=total):
                z = []
                pos = 0
                for k in range(n):
                    z.append(x[k])
                    z.extend(bits[pos : pos + counts[k]])
                    pos += counts[k]
                zb = bytes(z)
                law[zb] = law.get(zb, 0.0) + p_counts * 0.5**total
    return law


def negbin_cdf(n, i, T):
    """P(total insertions <= T) for n independent Geometric(1-i) draws."""
    return sum(
        math.comb(t + n - 1, n - 1) * (1.0 - i) ** n * i**t for t in range(T + 1)
    )


def forward_prob_pathsum(initial, Q, E, obs):
    """P(obs) by summing over every hidden state path."""
    S = len(initial)
    k = len(obs)
    total = 0.0
    for path in itertools.product(range(S), repeat=k + 1):
        p = initial[path[0]]
        for m in range(k):
            if p == 0.0:
                break
            p *= Q[path[m], path[m + 1]] * E[path[m], path[m + 1], obs[m]]
        total += p
    return total


def markov_block_entropy(P, pi, k):
    """H of k emitted bits of the stationary register chain, by enumeration."""
    n_states = P.shape[0]
    mask = n_states - 1
    total = 0.0
    for word in range(2**k):
        bits = [(word >> (k - 1 - j)) & 1 for j in range(k)]
        state_p = np.array(
            [pi[s] if (s & 1) == bits[0] else 0.0 for s in range(n_states)]
        )
        prob = state_p.sum()
        if prob <= 0.0:
            continue
        state_p = state_p / prob
        dead = False
        for b in bits[1:]:
            nxt = np.zeros(n_states)
            for s in range(n_states):
                if state_p[s] > 0.0:
                    sp = ((s << 1) & mask) | b
                    nxt[sp] += state_p[s] * P[s, sp]
            step = nxt.sum()
            if step <= 0.0:
                dead = True
                break
            prob *= step
            state_p = nxt / step
        if not dead and prob > 0.0:
            total -= prob * math.log2(prob)
    return total


def random_shift_register_source(rng, order):
    """Random strictly-positive transition matrix with register structure."""
    n = 2**order
    mask = n - 1
    P = np.zeros((n, n))
    for s in range(n):
        w = rng.uniform(0.05, 1.0, 2)
        w /= w.sum()
        for b in (0, 1):
            P[s, ((s << 1) & mask) | b] = w[b]
    return P
