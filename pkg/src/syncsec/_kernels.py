"""Numba kernels for trellis recursions and sequence sampling.

All kernels are deterministic given their inputs; randomness is drawn by
callers through numpy Generators and passed in as arrays. The alignment
trellis runs full-width with a leading sentinel slot so the inner loops
have loop-invariant bounds (which is what lets LLVM vectorize them);
unreachable cells stay exactly zero and negligible cells flush to zero
under FTZ (see _ftz).

Storage convention for the alignment trellis: slot ``t`` holds the DP cell
"``t - 1`` short symbols consumed"; slot 0 is a permanent zero sentinel.
"""

import numpy as np
from numba import njit

NEG_INF = float(-np.inf)


# ---------------------------------------------------------------------------
# alignment trellis: P(long | short) for stay/advance channels
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True, fastmath=True, inline="never")
def _dp_step32(src, dst, eq, ws, width):
    for t in range(1, width):
        dst[t] = ws * src[t] + eq[t] * src[t - 1]


@njit(cache=True, nogil=True, fastmath=True, inline="never")
def _dp_step64(src, dst, eq, ws, width):
    for t in range(1, width):
        dst[t] = ws * src[t] + eq[t] * src[t - 1]


@njit(cache=True, nogil=True, fastmath=True, inline="never")
def _renorm32(arr, width):
    mx = np.float32(0.0)
    for t in range(1, width):
        if arr[t] > mx:
            mx = arr[t]
    if mx <= np.float32(0.0):
        return 0.0
    inv = np.float32(1.0) / mx
    for t in range(1, width):
        arr[t] *= inv
    return np.float64(mx)


@njit(cache=True, nogil=True, fastmath=True, inline="never")
def _renorm64(arr, width):
    mx = 0.0
    for t in range(1, width):
        if arr[t] > mx:
            mx = arr[t]
    if mx <= 0.0:
        return 0.0
    inv = 1.0 / mx
    for t in range(1, width):
        arr[t] *= inv
    return mx


@njit(cache=True, nogil=True, fastmath=True)
def aligned_logp_f32(long_seq, short_seq, w_stay, w_adv):
    """log2 P over monotone alignments of short_seq into long_seq.

    Each long symbol is either a "stay" (weight w_stay) or an "advance"
    consuming the next short symbol (weight w_adv if it matches, else 0).
    All short symbols must be consumed. Returns -inf if no alignment.
    """
    n_l = long_seq.size
    n_s = short_seq.size
    if n_s > n_l:
        return NEG_INF
    width = n_s + 2
    ws = np.float32(w_stay)
    wa = np.float32(w_adv)
    eq0 = np.zeros(width, dtype=np.float32)
    eq1 = np.zeros(width, dtype=np.float32)
    for j in range(n_s):
        if short_seq[j] == 0:
            eq0[j + 2] = wa
        else:
            eq1[j + 2] = wa
    a = np.zeros(width, dtype=np.float32)
    b = np.zeros(width, dtype=np.float32)
    a[1] = np.float32(1.0)
    log2scale = 0.0
    m = 0
    while m + 2 <= n_l:
        if long_seq[m] == 0:
            _dp_step32(a, b, eq0, ws, width)
        else:
            _dp_step32(a, b, eq1, ws, width)
        if long_seq[m + 1] == 0:
            _dp_step32(b, a, eq0, ws, width)
        else:
            _dp_step32(b, a, eq1, ws, width)
        m += 2
        if m % 16 == 0:
            mx = _renorm32(a, width)
            if mx == 0.0:
                return NEG_INF
            log2scale += np.log2(mx)
    if m < n_l:
        if long_seq[m] == 0:
            _dp_step32(a, b, eq0, ws, width)
        else:
            _dp_step32(a, b, eq1, ws, width)
        final = np.float64(b[n_s + 1])
    else:
        final = np.float64(a[n_s + 1])
    if final <= 0.0:
        return NEG_INF
    return np.log2(final) + log2scale


@njit(cache=True, nogil=True, fastmath=True)
def aligned_logp_f64(long_seq, short_seq, w_stay, w_adv):
    n_l = long_seq.size
    n_s = short_seq.size
    if n_s > n_l:
        return NEG_INF
    width = n_s + 2
    eq0 = np.zeros(width, dtype=np.float64)
    eq1 = np.zeros(width, dtype=np.float64)
    for j in range(n_s):
        if short_seq[j] == 0:
            eq0[j + 2] = w_adv
        else:
            eq1[j + 2] = w_adv
    a = np.zeros(width, dtype=np.float64)
    b = np.zeros(width, dtype=np.float64)
    a[1] = 1.0
    log2scale = 0.0
    m = 0
    while m + 2 <= n_l:
        if long_seq[m] == 0:
            _dp_step64(a, b, eq0, w_stay, width)
        else:
            _dp_step64(a, b, eq1, w_stay, width)
        if long_seq[m + 1] == 0:
            _dp_step64(b, a, eq0, w_stay, width)
        else:
            _dp_step64(b, a, eq1, w_stay, width)
        m += 2
        if m % 32 == 0:
            mx = _renorm64(a, width)
            if mx == 0.0:
                return NEG_INF
            log2scale += np.log2(mx)
    if m < n_l:
        if long_seq[m] == 0:
            _dp_step64(a, b, eq0, w_stay, width)
        else:
            _dp_step64(a, b, eq1, w_stay, width)
        final = b[n_s + 1]
    else:
        final = a[n_s + 1]
    if final <= 0.0:
        return NEG_INF
    return np.log2(final) + log2scale


# ---------------------------------------------------------------------------
# Markov / HMM sampling walks
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def markov_walk(cum_rows, start_state, uniforms, out_states):
    """Walk a finite Markov chain; cum_rows[s] is the cumsum of row s."""
    s = start_state
    n = out_states.size
    ns = cum_rows.shape[1]
    for k in range(n):
        u = uniforms[k]
        row = cum_rows[s]
        nxt = ns - 1
        for j in range(ns - 1):
            if u < row[j]:
                nxt = j
                break
        out_states[k] = nxt
        s = nxt


@njit(cache=True, nogil=True)
def hmm_walk_emit(cum_rows, cum_emit, start_state, u_trans, u_emit, out_obs):
    """Sample an HMM path and its emissions; emission law is per edge."""
    s = start_state
    k = out_obs.size
    ns = cum_rows.shape[1]
    na = cum_emit.shape[2]
    for m in range(k):
        u = u_trans[m]
        row = cum_rows[s]
        nxt = ns - 1
        for j in range(ns - 1):
            if u < row[j]:
                nxt = j
                break
        ue = u_emit[m]
        erow = cum_emit[s, nxt]
        z = na - 1
        for a in range(na - 1):
            if ue < erow[a]:
                z = a
                break
        out_obs[m] = z
        s = nxt


@njit(cache=True, nogil=True)
def hmm_forward_nll(trans_weighted, initial, obs):
    """Normalized forward recursion: -log2 P(obs).

    trans_weighted[a, s, s'] = Q(s, s') * Pr(obs a | s, s'). Returns
    (nll_bits, step) where step is the index of the first zero-probability
    prefix, or -1 if the whole sequence has positive probability.
    """
    ns = initial.size
    alpha = initial.copy()
    nxt = np.empty(ns, dtype=np.float64)
    total = 0.0
    for m in range(obs.size):
        w = trans_weighted[obs[m]]
        c = 0.0
        for sp in range(ns):
            acc = 0.0
            for s in range(ns):
                acc += alpha[s] * w[s, sp]
            nxt[sp] = acc
            c += acc
        if c <= 0.0:
            return 0.0, m
        inv = 1.0 / c
        for sp in range(ns):
            alpha[sp] = nxt[sp] * inv
        total += np.log2(c)
    return -total, -1
