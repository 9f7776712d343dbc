import dataclasses
import json
import math

import numpy as np
import pytest

from rotation_ot.bits import as_bits, parity, random_bits
from rotation_ot.hashing import HashFunctionGF2, eval_hash
from rotation_ot.protocol import (
    CipherState,
    OpeningMessage,
    ProtocolError,
    Received,
    Rejected,
    RejectReason,
    SecretKey,
    SessionParams,
    alice_open,
    alice_transfer,
    bob_decode,
    bob_open,
    outcome_from_dict,
    parity_message,
    single_bit_ot_alice,
    single_bit_ot_bob,
)
from rotation_ot.qubit import QubitState, encode_bit
from rotation_ot.seeding import make_rng
from rotation_ot.transcript import SessionTranscript, read_transcript, write_transcript

GOLDEN_HASH = {"k": 8, "matrix": ["e1", "ee", "88", "b7"], "offset": "5"}
GOLDEN_KEY = (0, 1, 6, 0, 1, 1, 7, 2, 2, 1, 3, 4)
GOLDEN_CIPHER = [
    (0.0, 1.0),
    (0.9238795325112865, -0.3826834323650904),
    (0.7071067811865474, -0.7071067811865477),
    (0.0, 1.0),
    (0.9238795325112865, -0.3826834323650904),
    (0.9238795325112865, -0.3826834323650904),
    (0.38268343236509, -0.9238795325112866),
    (0.7071067811865474, -0.7071067811865477),
    (0.7071067811865474, -0.7071067811865477),
    (0.9238795325112865, -0.3826834323650904),
    (0.9238795325112867, 0.3826834323650898),
    (1.0, 0.0),
]


@pytest.fixture
def params():
    return SessionParams.sample(16, 4, make_rng(1))


def zero_hash(k):
    return HashFunctionGF2(np.zeros((k // 2, k)), np.zeros(k // 2))


class TestParams:
    @pytest.mark.parametrize("k,n", [(6, 4), (9, 4), (16, 0)])
    def test_rejects_bad_values(self, k, n):
        with pytest.raises(ValueError):
            SessionParams(k, n, zero_hash(k - k % 2 or 2))

    def test_hash_length_must_match(self):
        with pytest.raises(ValueError):
            SessionParams(16, 4, zero_hash(8))

    def test_theta(self, params):
        assert params.theta_n == math.pi / 8
        assert params.register_length == 24

    def test_roundtrip(self, params):
        assert SessionParams.from_dict(json.loads(json.dumps(params.to_dict()))) == params


class TestTransfer:
    def test_all_zero(self):
        p = SessionParams(8, 4, zero_hash(8))
        key = SecretKey((0,) * 12, 4)
        cipher, record = alice_transfer("0" * 8, p, make_rng(0), a=0, key=key)
        assert all(q == QubitState.zero() for q in cipher.qubits)
        assert record.digest == (0,) * 4

    def test_first_bit_one(self):
        p = SessionParams(8, 4, zero_hash(8))
        key = SecretKey((0,) + (3,) * 11, 4)
        cipher, _ = alice_transfer("10000000", p, make_rng(0), key=key)
        assert cipher.qubits[0] == QubitState.one()

    def test_golden_snapshot(self):
        rng = make_rng(2024)
        p = SessionParams.sample(8, 3, rng)
        assert p.hash.to_dict() == GOLDEN_HASH
        cipher, record = alice_transfer("10110010", p, rng)
        assert record.a == 1
        assert record.key.values == GOLDEN_KEY
        assert record.digest == as_bits("0011")
        assert [(q.amp0, q.amp1) for q in cipher.qubits] == GOLDEN_CIPHER

    def test_layout_message_then_digest(self, params):
        rng = make_rng(3)
        message = random_bits(16, rng)
        cipher, record = alice_transfer(message, params, rng)
        bits = bob_decode(cipher, record.key, 1 - record.a, rng)
        assert bits[:16] == message
        assert bits[16:] == eval_hash(params.hash, message) == record.digest

    def test_rejects_wrong_length(self, params):
        with pytest.raises(ProtocolError):
            alice_transfer("0101", params, make_rng(0))

    def test_rejects_mismatched_key(self, params):
        with pytest.raises(ProtocolError):
            alice_transfer("0" * 16, params, make_rng(0), key=SecretKey((1,) * 20, 4))


class TestOpening:
    def test_reveals_key_and_n_only(self, params):
        _, record = alice_transfer("0" * 16, params, make_rng(5))
        opening = alice_open(record)
        assert opening.key == record.key and opening.n == params.n
        assert {f.name for f in dataclasses.fields(opening)} == {"key", "n"}
        assert set(opening.to_dict()) == {"key", "n"}

    def test_independent_of_direction(self, params):
        _, record = alice_transfer("0" * 16, params, make_rng(5))
        flipped = dataclasses.replace(record, a=1 - record.a)
        assert alice_open(record) == alice_open(flipped)
        assert json.dumps(alice_open(record).to_dict()) == json.dumps(alice_open(flipped).to_dict())

    def test_serialization_roundtrip(self, params):
        _, record = alice_transfer("1" * 16, params, make_rng(6))
        opening = alice_open(record)
        text = json.dumps(opening.to_dict())
        assert OpeningMessage.from_dict(json.loads(text)) == opening
        assert json.dumps(OpeningMessage.from_dict(json.loads(text)).to_dict()) == text

    def test_mismatched_n(self):
        with pytest.raises(ValueError):
            OpeningMessage(SecretKey((1, 2), 3), 4)


class TestBob:
    def test_opposite_direction_recovers_exactly(self, params):
        rng = make_rng(10)
        for _ in range(300):
            message = random_bits(16, rng)
            cipher, record = alice_transfer(message, params, rng)
            outcome = bob_open(cipher, alice_open(record), params, rng, a_prime=1 - record.a)
            assert outcome == Received(message)

    def test_same_direction_per_qubit_law(self):
        n, trials = 4, 10_000
        rng = make_rng(11)
        for s in (1, 3, 6):
            key = SecretKey((s,), n)
            hits = 0
            for _ in range(trials):
                m, a = int(rng.integers(0, 2)), int(rng.integers(0, 2))
                cipher = CipherState((encode_bit(m, s, a, n),))
                hits += bob_decode(cipher, key, a, rng)[0] == m
            p = math.cos(s * math.pi / 8) ** 2
            assert abs(hits / trials - p) <= 3 * math.sqrt(p * (1 - p) / trials)

    def test_all_zero_key_rejected(self, params):
        key = SecretKey((0,) * 24, 4)
        cipher, record = alice_transfer("0" * 16, params, make_rng(0), key=key)
        outcome = bob_open(cipher, alice_open(record), params, make_rng(1))
        assert isinstance(outcome, Rejected) and outcome.reason is RejectReason.KEY_NOT_RANDOM
        assert not outcome.verdict.overall_pass

    def test_tampered_digest_rejected(self, params):
        rng = make_rng(12)
        cipher, record = alice_transfer("0110" * 4, params, rng)
        qubits = list(cipher.qubits)
        last = qubits[-1]
        qubits[-1] = QubitState(-last.amp1, last.amp0)  # R(pi): flips the decoded bit
        outcome = bob_open(CipherState(qubits), alice_open(record), params, rng, a_prime=1 - record.a)
        assert outcome == Rejected(RejectReason.DIGEST_MISMATCH)

    def test_length_mismatch(self, params):
        rng = make_rng(13)
        cipher, record = alice_transfer("0" * 16, params, rng)
        short = CipherState(cipher.qubits[:-1])
        with pytest.raises(ProtocolError):
            bob_open(short, alice_open(record), params, rng)

    def test_false_accept_rate_small_k(self):
        rng = make_rng(14)
        sessions, accepted = 4000, 0
        for _ in range(sessions):
            p = SessionParams.sample(8, 4, rng)
            cipher, record = alice_transfer(random_bits(8, rng), p, rng)
            accepted += isinstance(bob_open(cipher, alice_open(record), p, rng, a_prime=record.a), Received)
        bound = 2**-4
        assert accepted / sessions <= bound + 3 * math.sqrt(bound * (1 - bound) / sessions)


class TestSingleBit:
    def test_parity_examples(self):
        assert single_bit_ot_bob(Received(as_bits("0110"))) == 0
        assert single_bit_ot_bob(Received(as_bits("1110"))) == 1
        assert single_bit_ot_bob(Rejected(RejectReason.DIGEST_MISMATCH)) is None
        assert parity(as_bits("0" * 16)) == 0

    def test_sampled_parity(self):
        rng = make_rng(20)
        for i in range(10_000):
            b = i & 1
            assert parity(parity_message(b, 16, rng)) == b

    def test_golden_message(self):
        rng = make_rng(5)
        p = SessionParams.sample(8, 3, rng)
        message, _, _ = single_bit_ot_alice(1, p, rng)
        assert message == as_bits("00010000")

    def test_recovered_bit_matches(self, params):
        rng = make_rng(21)
        for _ in range(200):
            b = int(rng.integers(0, 2))
            _, cipher, record = single_bit_ot_alice(b, params, rng)
            outcome = bob_open(cipher, alice_open(record), params, rng, a_prime=1 - record.a)
            assert single_bit_ot_bob(outcome) == b


class TestTranscript:
    def test_roundtrip(self, params, tmp_path):
        rng = make_rng(30)
        cipher, record = alice_transfer(random_bits(16, rng), params, rng)
        opening = alice_open(record)
        outcome = bob_open(cipher, opening, params, rng)
        t = SessionTranscript(params, cipher, opening, outcome, seed=99)
        path = write_transcript(tmp_path, 0, t)
        back = read_transcript(path)
        assert back == t
        assert back.dumps() == t.dumps()
        doc = json.loads(path.read_text())
        assert doc["schema_version"] == 1
        assert "a" not in json.dumps(doc["opening"]).replace('"key"', "")

    def test_outcome_dicts(self):
        for o in (Received(as_bits("0101")), Rejected(RejectReason.KEY_NOT_RANDOM)):
            assert outcome_from_dict(o.to_dict()) == o
