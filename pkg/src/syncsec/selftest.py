"""Built-in oracle checks, runnable via `syncsec selftest`.

A fast, deterministic subset of the full test suite: each check compares
an implementation path against an independent brute-force computation and
prints one PASS/FAIL line. Exit status 0 iff everything passes.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .channel import ChannelParams, assemble_record, expected_length, resynchronize, transmit
from .condent import cond_nll_deletion_exact, cond_nll_insertion, genie_block_cond_entropy_lb, mc_cond_entropy_rate
from .errors import ImpossibleObservation
from .hmm import build_deletion_hmm, build_insertion_hmm, forward_nll, hmm_sample
from .sources import MarkovSource
from .util import seq_to_text


def _check_example_replay():
    record = assemble_record(
        x=[0, 1, 1, 0],
        insert_counts=[2, 0, 0, 1],
        delete_flags=[False, False, True, False],
        insert_bits=[1, 1, 0],
    )
    ok = seq_to_text(record.z) == "011100" and seq_to_text(resynchronize(record)) == "01e0"
    return ok, f"z={seq_to_text(record.z)} y={seq_to_text(resynchronize(record))}"


def _check_length_law():
    n, runs = 4000, 60
    worst = 0.0
    for idx, (i, d) in enumerate([(0.3, 0.0), (0.0, 0.3), (0.2, 0.2)]):
        params = ChannelParams(i, d)
        lengths = [
            transmit(np.zeros(n, np.uint8), params, 1000 * idx + r).z.size for r in range(runs)
        ]
        lengths = np.array(lengths, dtype=float)
        se = lengths.std(ddof=1) / math.sqrt(runs)
        dev = abs(lengths.mean() - expected_length(i, d, n)) / se
        worst = max(worst, dev)
    return worst < 3.0, f"worst deviation {worst:.2f} standard errors"


def _check_deletion_trellis():
    rng = np.random.default_rng(11)
    d = 0.35
    worst = 0.0
    for n in range(1, 9):
        x = rng.integers(0, 2, n).astype(np.uint8)
        probs = {}
        for pattern in itertools.product([0, 1], repeat=n):
            keep = np.array(pattern, dtype=bool)
            z = bytes(x[keep])
            probs[z] = probs.get(z, 0.0) + d ** int(n - keep.sum()) * (1 - d) ** int(keep.sum())
        for z, p in probs.items():
            got = 2.0 ** (-cond_nll_deletion_exact(x, np.frombuffer(z, np.uint8), d))
            worst = max(worst, abs(got - p) / p)
    return worst < 1e-12, f"worst relative error {worst:.2e}"


def _check_insertion_trellis():
    rng = np.random.default_rng(12)
    i = 0.5
    worst = 0.0
    for n in range(1, 5):
        x = rng.integers(0, 2, n).astype(np.uint8)
        for extra in range(0, 4):
            L = n + extra
            for zbits in itertools.product([0, 1], repeat=L):
                z = np.array(zbits, dtype=np.uint8)
                total = 0.0
                # real-symbol positions, first anchored at 0
                for combo in itertools.combinations(range(1, L), n - 1):
                    pos = (0,) + combo
                    if all(z[pos[j]] == x[j] for j in range(n)):
                        total += (1 - i) ** n * (i / 2) ** (L - n)
                try:
                    got = 2.0 ** (-cond_nll_insertion(x, z, i))
                except ImpossibleObservation:
                    got = 0.0
                if total > 0:
                    worst = max(worst, abs(got - total) / total)
                elif got > 0:
                    worst = max(worst, 1.0)
    return worst < 1e-12, f"worst relative error {worst:.2e}"


def _check_hmm_stationarity():
    rng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(25):
        p01, p10 = rng.uniform(0.05, 0.95, 2)
        src = MarkovSource.first_order(p01, p10)
        i, d = rng.uniform(0.05, 0.9, 2)
        for model in (build_insertion_hmm(src, i), build_deletion_hmm(src, d)):
            worst = max(worst, float(np.max(np.abs(src.stationary @ model.transition - src.stationary))))
    return worst < 1e-10, f"worst |piQ - pi| = {worst:.2e}"


def _check_forward_pathsum():
    src = MarkovSource.first_order(0.3, 0.6)
    model = build_insertion_hmm(src, 0.4)
    k = 8
    obs = hmm_sample(model, k, 14)
    total = 0.0
    S = model.num_states
    for path in itertools.product(range(S), repeat=k + 1):
        p = model.initial[path[0]]
        for m in range(k):
            p *= model.transition[path[m], path[m + 1]] * model.emission[path[m], path[m + 1], obs[m]]
        total += p
    got = forward_nll(model, obs)
    err = abs(got - (-math.log2(total)))
    return err < 1e-9, f"|forward - pathsum| = {err:.2e} bits"


def _check_genie_vs_exact():
    src = MarkovSource.first_order(0.4, 0.4)
    exact = mc_cond_entropy_rate(src, d=0.3, n=1024, runs=12, seed=15)
    genie = genie_block_cond_entropy_lb(src, d=0.3, n=1024, T=64, runs=12, seed=16)
    slack = 3.0 * math.hypot(exact.stderr, genie.stderr)
    ok = genie.mean <= exact.mean + slack
    return ok, f"genie {genie.mean:.4f} <= exact {exact.mean:.4f} + {slack:.4f}"


CHECKS = [
    ("transmitter example replay", _check_example_replay),
    ("expected output length law", _check_length_law),
    ("deletion trellis vs enumeration", _check_deletion_trellis),
    ("insertion trellis vs enumeration", _check_insertion_trellis),
    ("stationarity of Z-process chains", _check_hmm_stationarity),
    ("forward recursion vs path sum", _check_forward_pathsum),
    ("genie bound below exact estimate", _check_genie_vs_exact),
]


def run(stream) -> int:
    failures = 0
    for name, fn in CHECKS:
        ok, detail = fn()
        status = "PASS" if ok else "FAIL"
        stream.write(f"{status} {name}: {detail}\n")
        if not ok:
            failures += 1
    stream.write(f"{len(CHECKS) - failures}/{len(CHECKS)} checks passed\n")
    return 1 if failures else 0
