import itertools
import math

import numpy as np
import pytest

from syncsec import (
    ChannelParams,
    ImpossibleObservation,
    MarkovSource,
    cond_nll_deletion_exact,
    cond_nll_insertion,
    genie_block_cond_entropy_lb,
    mc_cond_entropy_rate,
    transmit,
)
from syncsec.condent import genie_block_nll
from oracles import deletion_output_law, insertion_output_law, negbin_cdf


def bits(s):
    return np.array([int(c) for c in s], dtype=np.uint8)


class TestInsertionNll:
    def test_single_symbol_no_insertions(self):
        for i in (0.1, 0.5, 0.9):
            assert cond_nll_insertion(bits("0"), bits("0"), i) == pytest.approx(
                -math.log2(1 - i), abs=1e-12
            )

    def test_single_insertion(self):
        # P = (1-i) * i * 1/2 = 0.125 at i = 0.5
        got = cond_nll_insertion(bits("0"), bits("01"), 0.5)
        assert got == pytest.approx(3.0, abs=1e-12)

    def test_two_alignments(self):
        # patterns (N1,N2) in {(1,0),(0,1)}: P = 2 (1-i)^2 (i/2) = 0.125
        got = cond_nll_insertion(bits("00"), bits("000"), 0.5)
        assert got == pytest.approx(-math.log2(0.125), abs=1e-12)

    def test_wrong_first_symbol_impossible(self):
        with pytest.raises(ImpossibleObservation):
            cond_nll_insertion(bits("10"), bits("010"), 0.5)

    def test_not_a_supersequence_impossible(self):
        with pytest.raises(ImpossibleObservation):
            cond_nll_insertion(bits("11"), bits("101"), 0.5)

    def test_zero_insertion_rate(self):
        x = bits("0110")
        assert cond_nll_insertion(x, x, 0.0) == 0.0
        with pytest.raises(ImpossibleObservation):
            cond_nll_insertion(x, bits("01101"), 0.0)

    @pytest.mark.parametrize("i", [0.3, 0.5, 0.7])
    def test_matches_pattern_enumeration(self, i):
        rng = np.random.default_rng(60)
        src = MarkovSource.first_order(0.4, 0.35)
        checked = 0
        while checked < 60:
            n = int(rng.integers(1, 6))
            x = src.sample(n, rng)
            rec = transmit(x, ChannelParams(i, 0.0), rng)
            if rec.z.size > 14:
                continue
            law = insertion_output_law(x, i, max_insertions=rec.z.size - n)
            want = law[bytes(rec.z)]
            got = 2.0 ** (-cond_nll_insertion(x, rec.z, i))
            assert got == pytest.approx(want, rel=1e-12)
            checked += 1

    def test_truncated_total_mass(self):
        # summing the trellis over every word up to length n+T recovers the
        # negative binomial cdf, and the gap is the geometric-sum tail
        i, n, T = 0.5, 3, 8
        x = bits("010")
        total = 0.0
        for L in range(n, n + T + 1):
            for word in itertools.product((0, 1), repeat=L):
                z = np.array(word, np.uint8)
                try:
                    total += 2.0 ** (-cond_nll_insertion(x, z, i))
                except ImpossibleObservation:
                    continue
        want = negbin_cdf(n, i, T)
        assert total == pytest.approx(want, abs=1e-9)
        assert 1.0 - total <= 1.0 - negbin_cdf(n, i, T) + 1e-12


class TestDeletionNll:
    def test_full_keep(self):
        x = bits("0101")
        for d in (0.0, 0.3, 0.8):
            assert cond_nll_deletion_exact(x, x, d) == pytest.approx(
                -4 * math.log2(1 - d) if d else 0.0, abs=1e-12
            )

    def test_full_deletion(self):
        x = bits("0101")
        d = 0.6
        got = cond_nll_deletion_exact(x, bits(""), d)
        assert got == pytest.approx(-4 * math.log2(d), abs=1e-12)

    def test_two_patterns(self):
        d = 0.3
        got = cond_nll_deletion_exact(bits("00"), bits("0"), d)
        assert got == pytest.approx(-math.log2(2 * d * (1 - d)), abs=1e-12)

    def test_not_subsequence_impossible(self):
        with pytest.raises(ImpossibleObservation):
            cond_nll_deletion_exact(bits("00"), bits("1"), 0.4)
        with pytest.raises(ImpossibleObservation):
            cond_nll_deletion_exact(bits("0"), bits("00"), 0.4)

    @pytest.mark.parametrize("d", [0.2, 0.5, 0.8])
    def test_matches_pattern_enumeration_all_subsequences(self, d):
        rng = np.random.default_rng(61)
        for n in range(1, 9):
            x = rng.integers(0, 2, n).astype(np.uint8)
            law = deletion_output_law(x, d)
            mass = 0.0
            for zb, want in law.items():
                z = np.frombuffer(zb, np.uint8)
                got = 2.0 ** (-cond_nll_deletion_exact(x, z, d))
                assert got == pytest.approx(want, rel=1e-12)
                mass += got
            assert mass == pytest.approx(1.0, abs=1e-9)


class TestPrecisionAgreement:
    def test_single_vs_double_on_generated_pairs(self):
        src = MarkovSource.first_order(0.3, 0.6)
        rng = np.random.default_rng(62)
        for i in (0.4, 0.8):
            x = src.sample(2000, rng)
            rec = transmit(x, ChannelParams(i, 0.0), rng)
            a = cond_nll_insertion(x, rec.z, i, precision="single")
            b = cond_nll_insertion(x, rec.z, i, precision="double")
            assert a == pytest.approx(b, rel=1e-5, abs=0.05)
        for d in (0.4, 0.8):
            x = src.sample(2000, rng)
            rec = transmit(x, ChannelParams(0.0, d), rng)
            a = cond_nll_deletion_exact(x, rec.z, d, precision="single")
            b = cond_nll_deletion_exact(x, rec.z, d, precision="double")
            assert a == pytest.approx(b, rel=1e-5, abs=0.05)


class TestMcCondEntropy:
    def test_noiseless_is_exactly_zero(self):
        rep = mc_cond_entropy_rate(MarkovSource.uniform(), n=200, runs=5, seed=70)
        assert rep.mean == 0.0 and rep.stderr == 0.0

    def test_insertion_matches_truncated_exact_entropy(self):
        # exact conditional entropy by pattern enumeration at n = 3;
        # truncation tail bounded and added to the tolerance
        i, n = 0.5, 3
        src = MarkovSource.uniform()
        cap = 12
        hx_given = 0.0
        tail_bound = 0.0
        for xw in itertools.product((0, 1), repeat=n):
            x = np.array(xw, np.uint8)
            px = 0.5**n
            law = insertion_output_law(x, i, max_insertions=cap)
            hx_given += px * sum(-p * math.log2(p) for p in law.values())
            # tail: P(T=t) * max nll(t), nll <= n + (2+log2(1/i)) t approx
            for t in range(cap + 1, cap + 200):
                pt = math.comb(t + n - 1, n - 1) * (1 - i) ** n * i**t
                tail_bound += px * pt * (n + 2.0 * t + math.log2(math.comb(t + n - 1, n - 1)))
        exact = hx_given / n
        rep = mc_cond_entropy_rate(src, i=i, n=n, runs=3000, seed=71)
        assert rep.mean >= exact - 3 * rep.stderr
        assert rep.mean <= exact + tail_bound / n + 3 * rep.stderr

    def test_deletion_stable_in_n(self):
        src = MarkovSource.uniform()
        small = mc_cond_entropy_rate(src, d=0.3, n=1000, runs=16, seed=72)
        large = mc_cond_entropy_rate(src, d=0.3, n=10_000, runs=16, seed=73)
        slack = 3 * math.hypot(small.stderr, large.stderr) + 0.01  # O(1/n) edge effects
        assert abs(small.mean - large.mean) < slack

    def test_combined_channel_rejected(self):
        with pytest.raises(ValueError):
            mc_cond_entropy_rate(MarkovSource.uniform(), i=0.1, d=0.1, n=10, runs=2, seed=0)


class TestGenieBound:
    def test_no_deletions_is_zero(self):
        rep = genie_block_cond_entropy_lb(MarkovSource.uniform(), 0.0, 256, 16, runs=4, seed=80)
        assert rep.mean == 0.0

    def test_single_block_value(self):
        # T = n, one block: NLL = log2 C(n, c) - log2 #embeddings
        x = bits("0011")
        D = np.array([True, False, False, False])
        got = genie_block_nll(x, D, 0.5, 4)
        embeddings = sum(
            1
            for pos in itertools.combinations(range(4), 3)
            if np.array_equal(x[list(pos)], x[~D])
        )
        assert got == pytest.approx(math.log2(math.comb(4, 1)) - math.log2(embeddings), abs=1e-9)

    def test_lower_bounds_exact(self):
        src = MarkovSource.first_order(0.35, 0.5)
        for d in (0.2, 0.5):
            exact = mc_cond_entropy_rate(src, d=d, n=2048, runs=16, seed=81)
            genie = genie_block_cond_entropy_lb(src, d, 2048, 64, runs=16, seed=82)
            assert genie.mean <= exact.mean + 3 * math.hypot(exact.stderr, genie.stderr)

    def test_single_block_is_genie_with_total_count(self):
        src = MarkovSource.first_order(0.35, 0.5)
        exact = mc_cond_entropy_rate(src, d=0.3, n=512, runs=20, seed=83)
        whole = genie_block_cond_entropy_lb(src, 0.3, 512, 512, runs=20, seed=84)
        assert whole.mean <= exact.mean + 3 * math.hypot(exact.stderr, whole.stderr)

    def test_nested_blocks_order(self):
        # finer boundaries reveal more: bound(T=16) <= bound(T=64)
        src = MarkovSource.uniform()
        fine = genie_block_cond_entropy_lb(src, 0.3, 2048, 16, runs=16, seed=85)
        coarse = genie_block_cond_entropy_lb(src, 0.3, 2048, 64, runs=16, seed=85)
        assert fine.mean <= coarse.mean + 3 * math.hypot(fine.stderr, coarse.stderr)

    def test_block_longer_than_sequence_rejected(self):
        with pytest.raises(ValueError):
            genie_block_cond_entropy_lb(MarkovSource.uniform(), 0.3, 100, 128, runs=4, seed=86)

    def test_ragged_final_block(self):
        rep = genie_block_cond_entropy_lb(MarkovSource.uniform(), 0.4, 100, 64, runs=6, seed=87)
        assert np.isfinite(rep.mean)
