import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rotation_ot.randomness import (
    bits_to_key,
    chi_square_test,
    key_to_bits,
    run_battery,
    serial_correlation_test,
    widest_symbol,
)
from rotation_ot.seeding import make_rng


def chi_square_oracle(counts):
    counts = np.asarray(counts, dtype=float)
    expected = counts.sum() / len(counts)
    return sum((o - expected) ** 2 / expected for o in counts)


class TestKeyBits:
    def test_examples(self):
        assert key_to_bits((0, 0), 2) == (0, 0, 0, 0)
        assert key_to_bits((3, 1), 2) == (1, 1, 0, 1)
        assert key_to_bits((5, 2, 7), 3) == (1, 0, 1, 0, 1, 0, 1, 1, 1)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            key_to_bits((4,), 2)

    @given(st.integers(1, 12).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(0, 2**n - 1), max_size=40))))
    def test_roundtrip(self, case):
        n, values = case
        bits = key_to_bits(values, n)
        assert len(bits) == n * len(values)
        assert bits_to_key(bits, n) == tuple(values)


class TestChiSquare:
    def test_balanced_counts(self):
        bits = [int(b) for sym in range(16) for b in format(sym, "04b")] * 5
        stat, ok = chi_square_test(bits, 4)
        assert stat == 0.0 and ok

    def test_all_zero_width2(self):
        # 400 bits -> 200 two-bit symbols, all in bin 0
        stat, ok = chi_square_test([0] * 400, 2, alpha=0.01)
        assert stat == pytest.approx(chi_square_oracle([200, 0, 0, 0]))
        assert stat == pytest.approx(600.0)
        assert not ok

    def test_matches_oracle_on_random_input(self):
        rng = make_rng(5)
        bits = rng.integers(0, 2, size=1000)
        symbols = bits[:1000].reshape(-1, 4) @ np.array([8, 4, 2, 1])
        stat, _ = chi_square_test(bits, 4)
        assert stat == pytest.approx(chi_square_oracle(np.bincount(symbols, minlength=16)))

    def test_rejects_small_sample(self):
        with pytest.raises(ValueError):
            chi_square_test([0, 1] * 100, 4)

    def test_calibration(self):
        rng = make_rng(77)
        passes = sum(chi_square_test(rng.integers(0, 2, 10_000), 4, 0.01)[1] for _ in range(1000))
        assert passes >= 980


class TestSerialCorrelation:
    def test_alternating(self):
        r, ok = serial_correlation_test([0, 1] * 500)
        assert r == pytest.approx(-1.0)
        assert not ok

    def test_constant_fails(self):
        r, ok = serial_correlation_test([1] * 1000)
        assert math.isnan(r) and not ok

    def test_rejects_short(self):
        with pytest.raises(ValueError):
            serial_correlation_test([0, 1] * 40)

    def test_matches_pearson(self):
        rng = make_rng(8)
        bits = rng.integers(0, 2, 500)
        r, _ = serial_correlation_test(bits)
        x, y = bits[:-1].astype(float), bits[1:].astype(float)
        oracle = ((x - x.mean()) * (y - y.mean())).sum() / math.sqrt(((x - x.mean()) ** 2).sum() * ((y - y.mean()) ** 2).sum())
        assert r == pytest.approx(oracle, abs=1e-12)

    def test_calibration(self):
        rng = make_rng(78)
        passes = sum(serial_correlation_test(rng.integers(0, 2, 10_000), 0.01)[1] for _ in range(1000))
        assert passes >= 980


class TestBattery:
    def test_widths(self):
        assert widest_symbol(400) == 4
        assert widest_symbol(120) == 3
        assert widest_symbol(96) == 2
        assert widest_symbol(12) == 1
        with pytest.raises(ValueError):
            widest_symbol(9)

    def test_overall_is_conjunction(self):
        rng = make_rng(4)
        cases = [[0, 1] * 200, [0] * 400, list(rng.integers(0, 2, 400)), [0, 0, 1, 1] * 100]
        for bits in cases:
            v = run_battery(bits)
            assert v.overall_pass == (v.chi_square_pass and v.serial_pass)
        v = run_battery([0, 1] * 200)
        assert not v.chi_square_pass and not v.serial_pass

    def test_honest_keys_pass(self):
        rng = make_rng(90)
        sessions = 1000
        passes = sum(run_battery(key_to_bits(rng.integers(0, 16, 96), 4)).overall_pass for _ in range(sessions))
        alpha = 0.01
        slack = 3 * math.sqrt(2 * alpha * (1 - 2 * alpha) / sessions)
        assert passes / sessions >= 1 - 2 * alpha - slack

    def test_all_zero_key_rejected(self):
        for n, length in [(4, 24), (4, 30), (3, 60), (8, 96)]:
            assert not run_battery(key_to_bits([0] * length, n), min_serial_length=12).overall_pass
