"""Monte-Carlo experiments reproducing the protocol's security claims.

Every trial draws from its own generator, seeded by
:func:`rotation_ot.seeding.derive_trial_seed`; results are folded in trial
index order, so sequential and parallel runs give identical reports.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy import stats

from . import adversary, protocol, pubkey
from .bits import random_bits
from .hashing import sample_hash, collision_rate
from .protocol import OpeningMessage, Received, RejectReason, SecretKey, SessionParams
from .qubit import encode_bit, helstrom_probability
from .seeding import derive_trial_seed, make_rng, substream_seed, trial_rng
from .transcript import SessionTranscript, write_transcript

SCHEMA_VERSION = 1
N_SIGMA = 3.0
# Slack for float round-off when comparing against a zero-width window.
FLOAT_SLACK = 1e-12

DIRECTIONS = ("random", "opposite", "same")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    k: Optional[int] = None
    n: Optional[int] = None
    trials: Optional[int] = None
    master_seed: int = 0
    alpha: float = 0.01
    key_check_alpha: float = protocol.KEY_CHECK_ALPHA
    bob_direction: str = "random"
    keys: int = 10
    workers: int = 1
    output_path: Optional[str] = None
    format: str = "json"
    transcripts_dir: Optional[str] = None

    def resolved(self) -> "ExperimentConfig":
        """Fill experiment defaults and validate."""
        if self.experiment not in EXPERIMENTS:
            raise ValueError(
                f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}"
            )
        defaults = EXPERIMENTS[self.experiment].defaults
        cfg = dataclasses.replace(
            self,
            k=self.k if self.k is not None else defaults["k"],
            n=self.n if self.n is not None else defaults["n"],
            trials=self.trials if self.trials is not None else defaults["trials"],
        )
        if cfg.trials < 1:
            raise ValueError("trials must be >= 1")
        if cfg.k < protocol.MIN_K or cfg.k % 2:
            raise ValueError(f"k must be even and >= {protocol.MIN_K}")
        if cfg.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 < cfg.alpha < 1 or not 0 < cfg.key_check_alpha < 1:
            raise ValueError("alpha levels must lie in (0, 1)")
        if cfg.bob_direction not in DIRECTIONS:
            raise ValueError(f"bob_direction must be one of {DIRECTIONS}")
        if cfg.format not in ("json", "csv"):
            raise ValueError("format must be json or csv")
        if cfg.keys < 1 or cfg.workers < 1:
            raise ValueError("keys and workers must be >= 1")
        if not 0 <= cfg.master_seed < 2**64:
            raise ValueError("master seed must be a 64-bit unsigned integer")
        return cfg

    def echo(self) -> dict:
        """Fields that define the result (paths and worker count excluded)."""
        d = dataclasses.asdict(self)
        for name in ("output_path", "format", "transcripts_dir", "workers"):
            d.pop(name)
        return d


@dataclass
class Check:
    name: str
    kind: str  # two-sided | upper | lower | exact | absolute | relative
    empirical: float
    reference: float
    tolerance: float
    sigma: Optional[float] = None
    passed: bool = False

    def __post_init__(self):
        self.passed = check_passes(self.kind, self.empirical, self.reference, self.tolerance)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "empirical": self.empirical,
            "reference": self.reference,
            "tolerance": self.tolerance,
            "sigma": self.sigma,
            "pass": self.passed,
        }


def check_passes(kind: str, empirical: float, reference: float, tolerance: float) -> bool:
    """Pass rule shared by every check; recomputable from a stored report."""
    if math.isnan(empirical):
        return False
    if kind == "exact":
        return empirical == reference
    if kind == "upper":
        return empirical <= reference + tolerance + FLOAT_SLACK
    if kind == "lower":
        return empirical >= reference - tolerance - FLOAT_SLACK
    if kind in ("two-sided", "absolute", "relative"):
        return abs(empirical - reference) <= tolerance + FLOAT_SLACK
    raise ValueError(f"unknown check kind {kind!r}")


def binomial_sigma(p: float, count: int) -> float:
    return math.sqrt(p * (1.0 - p) / count) if count else math.inf


def two_sided(name: str, empirical: float, reference: float, sigma: float) -> Check:
    return Check(name, "two-sided", empirical, reference, N_SIGMA * sigma, sigma)


def upper(name: str, empirical: float, bound: float, sigma: float) -> Check:
    return Check(name, "upper", empirical, bound, N_SIGMA * sigma, sigma)


def lower(name: str, empirical: float, bound: float, sigma: float) -> Check:
    return Check(name, "lower", empirical, bound, N_SIGMA * sigma, sigma)


@dataclass
class ExperimentReport:
    config: dict
    metrics: dict
    checks: list[Check]
    wall_time: float = 0.0
    schema_version: int = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def body(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "experiment": self.config["experiment"],
            "config": self.config,
            "metrics": self.metrics,
            "checks": [c.to_dict() for c in self.checks],
            "pass": self.passed,
        }

    def to_dict(self) -> dict:
        return {**self.body(), "wall_time": self.wall_time}

    def body_json(self) -> str:
        return json.dumps(self.body(), sort_keys=True, indent=2)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["experiment", "check", "kind", "empirical", "reference", "tolerance", "sigma", "pass"]
        )
        for c in self.checks:
            writer.writerow(
                [
                    self.config["experiment"],
                    c.name,
                    c.kind,
                    repr(c.empirical),
                    repr(c.reference),
                    repr(c.tolerance),
                    "" if c.sigma is None else repr(c.sigma),
                    int(c.passed),
                ]
            )
        writer.writerow([self.config["experiment"], "overall", "", "", "", "", "", int(self.passed)])
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        return self.to_json() if fmt == "json" else self.to_csv()


@dataclass(frozen=True)
class Experiment:
    trial: Callable[[ExperimentConfig, int, bool], tuple]
    fold: Callable[[ExperimentConfig, list], tuple[dict, list[Check]]]
    defaults: dict
    total_trials: Callable[[ExperimentConfig], int] = field(default=lambda cfg: cfg.trials)


# --- helpers ---------------------------------------------------------------


def _bob_direction(cfg: ExperimentConfig, a: int, rng: np.random.Generator) -> int:
    if cfg.bob_direction == "opposite":
        return 1 - a
    if cfg.bob_direction == "same":
        return a
    return int(rng.integers(0, 2))


def _same_direction_eps(key: SecretKey, upto: Optional[int] = None) -> float:
    values = np.array(key.values[:upto], dtype=float)
    return 0.5 * float(np.prod(np.cos(values * math.pi / 2 ** (key.n - 1)) ** 2))


def _outcome_code(outcome, message) -> int:
    if isinstance(outcome, Received):
        return 0 if outcome.message == message else 1
    return 2 if outcome.reason is RejectReason.DIGEST_MISMATCH else 3


OUTCOME_NAMES = ("received-correct", "received-wrong", "digest-mismatch", "key-not-random")


# --- soundness ---------------------------------------------------------------


def _soundness_trial(cfg: ExperimentConfig, index: int, want_transcript: bool):
    seed = derive_trial_seed(cfg.master_seed, index)
    rng = make_rng(seed)
    params = SessionParams.sample(cfg.k, cfg.n, rng, key_check_alpha=cfg.key_check_alpha)
    message = random_bits(cfg.k, rng)
    cipher, record = protocol.alice_transfer(message, params, rng)
    opening = protocol.alice_open(record)
    a_prime = _bob_direction(cfg, record.a, rng)
    outcome = protocol.bob_open(cipher, opening, params, rng, a_prime=a_prime)
    row = (
        int(a_prime == record.a),
        _outcome_code(outcome, message),
        _same_direction_eps(record.key, cfg.k),
        _same_direction_eps(record.key),
    )
    doc = None
    if want_transcript:
        doc = SessionTranscript(params, cipher, opening, outcome, seed).to_dict()
    return row, doc


def _soundness_fold(cfg: ExperimentConfig, rows: list):
    arr = np.array(rows, dtype=float)
    n_total = len(arr)
    same = arr[:, 0] == 1
    code = arr[:, 1]
    received = code <= 1
    correct = code == 0
    digest_bound = 2.0 ** (-cfg.k / 2)
    eps_bar = float(arr[:, 3].mean())
    eps_bar_message = float(arr[:, 2].mean())
    rate = float(received.mean())
    metrics = {
        "sessions": n_total,
        "same_direction_sessions": int(same.sum()),
        "received_rate": rate,
        "received_correct_rate": float(correct.mean()),
        "outcome_counts": {name: int((code == i).sum()) for i, name in enumerate(OUTCOME_NAMES)},
        "eps_bar_register": eps_bar,
        "eps_bar_message": eps_bar_message,
        "digest_bound": digest_bound,
    }
    checks: list[Check] = []
    if cfg.bob_direction == "opposite":
        checks.append(Check("opposite-direction-exact-recovery", "exact", float(correct.mean()), 1.0, 0.0))
    else:
        n_same = int(same.sum())
        if n_same:
            fa = float(received[same].mean())
            metrics["false_accept_rate"] = fa
            checks.append(
                upper("false-accept-rate", fa, digest_bound, binomial_sigma(digest_bound, n_same))
            )
        if cfg.bob_direction == "random":
            sigma = binomial_sigma(0.5, n_total)
            checks.append(lower("received-rate-floor", rate, 0.5, sigma))
            checks.append(upper("received-rate-ceiling", rate, 0.5 + digest_bound, sigma))
            checks.append(two_sided("received-rate-vs-half-plus-eps", rate, 0.5 + eps_bar, sigma))
            checks.append(Check("eps-bar-below-2^-k/2", "upper", eps_bar_message, digest_bound, 0.0))
    return metrics, checks


# --- same-direction per-qubit law ------------------------------------------------


def _per_s_total(cfg: ExperimentConfig) -> int:
    return cfg.trials * 2**cfg.n


def _same_direction_trial(cfg: ExperimentConfig, index: int, want_transcript: bool):
    rng = trial_rng(cfg.master_seed, index)
    s = index % 2**cfg.n
    m = int(rng.integers(0, 2))
    a = int(rng.integers(0, 2))
    key = SecretKey((s,), cfg.n)
    cipher = protocol.encode_register((m,), key, a)
    (bit,) = protocol.bob_decode(cipher, key, a, rng)
    return (s, int(bit == m)), None


def _same_direction_fold(cfg: ExperimentConfig, rows: list):
    arr = np.array(rows, dtype=np.int64)
    checks, table = [], {}
    for s in range(2**cfg.n):
        hits = arr[arr[:, 0] == s, 1]
        p = math.cos(s * math.pi / 2 ** (cfg.n - 1)) ** 2
        rate = float(hits.mean())
        table[str(s)] = {"empirical": rate, "analytic": p, "trials": int(len(hits))}
        checks.append(two_sided(f"agreement-s={s}", rate, p, binomial_sigma(p, len(hits))))
    return {"per_s": table}, checks


# --- concealing before opening ---------------------------------------------------


def _concealing_before_trial(cfg: ExperimentConfig, index: int, want_transcript: bool):
    rng = trial_rng(cfg.master_seed, index)
    params = SessionParams.sample(cfg.k, cfg.n, rng, key_check_alpha=cfg.key_check_alpha)
    message = random_bits(cfg.k, rng)
    cipher, record = protocol.alice_transfer(message, params, rng)
    guess = adversary.bob_guess_before_opening(cipher, rng)
    agree = sum(int(g == m) for g, m in zip(guess, message))
    return (record.a, agree, sum(guess), int(guess == message)), None


def _concealing_before_fold(cfg: ExperimentConfig, rows: list):
    arr = np.array(rows, dtype=np.int64)
    k, n_total = cfg.k, len(arr)
    bits = n_total * k
    rate = float(arr[:, 1].sum() / bits)
    checks = [two_sided("per-bit-success", rate, 0.5, binomial_sigma(0.5, bits))]
    metrics = {
        "sessions": n_total,
        "per_bit_success": rate,
        "whole_message_success": float(arr[:, 3].mean()),
        "whole_message_reference": 2.0**-k,
    }
    for label, col in (("agreement", 1), ("outcome-ones", 2)):
        table = np.array(
            [
                [arr[arr[:, 0] == a, col].sum(), k * (arr[:, 0] == a).sum() - arr[arr[:, 0] == a, col].sum()]
                for a in (0, 1)
            ]
        )
        if (table.sum(axis=0) == 0).any() or (table.sum(axis=1) == 0).any():
            p_value = math.nan
        else:
            p_value = float(stats.chi2_contingency(table, correction=False)[1])
        metrics[f"{label}_vs_a_table"] = table.tolist()
        metrics[f"{label}_vs_a_p_value"] = p_value
        checks.append(Check(f"{label}-independent-of-a", "lower", p_value, cfg.alpha, 0.0))
    return metrics, checks


# --- concealing after opening (Helstrom) ---------------------------------------------


def _concealing_after_trial(cfg: ExperimentConfig, index: int, want_transcript: bool):
    rng = trial_rng(cfg.master_seed, index)
    s = index % 2**cfg.n
    m = int(rng.integers(0, 2))
    a = int(rng.integers(0, 2))
    key = SecretKey((s,), cfg.n)
    cipher = protocol.CipherState((encode_bit(m, s, a, cfg.n),))
    (guess,) = adversary.bob_helstrom_after_opening(cipher, OpeningMessage(key, cfg.n), rng)
    return (s, int(guess == m)), None


def helstrom_oracle(s: int, n: int) -> float:
    """``1/2 + 1/4 Tr|rho_0 - rho_1|`` by numerical eigendecomposition."""
    from .qubit import bit_mixture

    delta = bit_mixture(0, s, n).matrix - bit_mixture(1, s, n).matrix
    return 0.5 + 0.25 * float(np.abs(np.linalg.eigvalsh(delta)).sum())


def _concealing_after_fold(cfg: ExperimentConfig, rows: list):
    arr = np.array(rows, dtype=np.int64)
    checks, table = [], {}
    worst = 0.0
    for s in range(2**cfg.n):
        hits = arr[arr[:, 0] == s, 1]
        p = helstrom_probability(s, cfg.n)
        worst = max(worst, abs(p - helstrom_oracle(s, cfg.n)))
        rate = float(hits.mean())
        table[str(s)] = {"empirical": rate, "analytic": p, "trials": int(len(hits))}
        checks.append(two_sided(f"helstrom-s={s}", rate, p, binomial_sigma(p, len(hits))))
    checks.append(Check("closed-form-vs-eigendecomposition", "absolute", worst, 0.0, 1e-10))
    return {"per_s": table}, checks


# --- obliviousness (cheating Alice) ---------------------------------------------------


def _key_session(cfg: ExperimentConfig, j: int) -> tuple[SessionParams, SecretKey]:
    rng = make_rng(derive_trial_seed(substream_seed(cfg.master_seed, "keys"), j))
    params = SessionParams.sample(cfg.k, cfg.n, rng, key_check_alpha=cfg.key_check_alpha)
    return params, SecretKey.random(params.register_length, cfg.n, rng)


def _oblivious_total(cfg: ExperimentConfig) -> int:
    return cfg.trials * cfg.keys


def _obliviousness_trial(cfg: ExperimentConfig, index: int, want_transcript: bool):
    seed = derive_trial_seed(cfg.master_seed, index)
    rng = make_rng(seed)
    j = index % cfg.keys
    params, key = _key_session(cfg, j)
    message = random_bits(cfg.k, rng)
    state = adversary.build_cheating_state(message, key, params)
    opening = OpeningMessage(key, cfg.n)
    outcome = protocol.bob_open(state.cipher, opening, params, rng)
    got = int(isinstance(outcome, Received) and outcome.message == message)
    doc = None
    if want_transcript:
        doc = SessionTranscript(
            params, state.cipher, opening, outcome, seed, kind="cheating-alice", extra={"key_index": j}
        ).to_dict()
    return (j, got), doc


def _obliviousness_fold(cfg: ExperimentConfig, rows: list):
    arr = np.array(rows, dtype=np.int64)
    checks, per_key = [], []
    for j in range(cfg.keys):
        params, key = _key_session(cfg, j)
        hits = arr[arr[:, 0] == j, 1]
        l = adversary.count_critical_angles(key).l
        bound = adversary.obliviousness_bound(l)
        phis = np.array(key.values) * math.pi / 2 ** (cfg.n - 1)
        analytic = float(np.prod((1 + np.abs(np.cos(phis))) / 2))
        rate = float(hits.mean())
        per_key.append(
            {"key_index": j, "l": l, "total": len(key), "empirical": rate,
             "analytic_optimum": analytic, "bound": bound, "trials": int(len(hits))}
        )
        checks.append(upper(f"pr_ch-key{j}-below-bound", rate, bound, binomial_sigma(bound, len(hits))))
        checks.append(two_sided(f"pr_ch-key{j}-vs-optimum", rate, analytic, binomial_sigma(analytic, len(hits))))
    return {"per_key": per_key}, checks


# --- public-key roundtrip --------------------------------------------------------


def _pubkey_trial(cfg: ExperimentConfig, index: int, want_transcript: bool):
    seed = derive_trial_seed(cfg.master_seed, index)
    rng = make_rng(seed)
    secret, public = pubkey.keygen(cfg.k, cfg.n, rng)
    length = int(rng.integers(0, cfg.k + 1))
    message = random_bits(length, rng)
    cipher = pubkey.encrypt(message, public)
    plain = pubkey.decrypt(cipher, secret, rng, length)
    doc = None
    if want_transcript:
        doc = SessionTranscript(
            None, cipher, OpeningMessage(secret, cfg.n), Received(plain), seed, kind="pubkey"
        ).to_dict()
    return (int(plain == message),), doc


def _pubkey_fold(cfg: ExperimentConfig, rows: list):
    ok = np.array(rows, dtype=np.int64)[:, 0]
    return {"sessions": len(ok), "failures": int((ok == 0).sum())}, [
        Check("roundtrip-identity", "exact", float(ok.mean()), 1.0, 0.0)
    ]


# --- hash universality --------------------------------------------------------------


def _hash_trial(cfg: ExperimentConfig, index: int, want_transcript: bool):
    h = sample_hash(cfg.k, trial_rng(cfg.master_seed, index))
    return (collision_rate(h), int(h.rank() == cfg.k // 2)), None


def _hash_fold(cfg: ExperimentConfig, rows: list):
    arr = np.array(rows, dtype=float)
    rates = arr[:, 0]
    bound = 2.0 ** (-cfg.k / 2)
    se = float(rates.std(ddof=1) / math.sqrt(len(rates))) if len(rates) > 1 else 0.0
    mean = float(rates.mean())
    return (
        {"functions": len(rates), "mean_collision_rate": mean, "full_rank_fraction": float(arr[:, 1].mean())},
        [upper("pairwise-collision-rate", mean, bound, se)],
    )


# --- l distribution ---------------------------------------------------------------


def _l_trial(cfg: ExperimentConfig, index: int, want_transcript: bool):
    key = SecretKey.random(cfg.k, cfg.n, trial_rng(cfg.master_seed, index))
    return (adversary.count_critical_angles(key).l,), None


def _l_fold(cfg: ExperimentConfig, rows: list):
    ls = np.array(rows, dtype=float)[:, 0]
    k, n_samples = cfg.k, len(ls)
    lo, hi = adversary.l_interval(k)
    mean = float(ls.mean())
    var = float(ls.var(ddof=1)) if n_samples > 1 else 0.0
    frac = float(((ls >= lo) & (ls <= hi)).mean())
    p = adversary.critical_probability(cfg.n)
    metrics = {
        "samples": n_samples,
        "mean": mean,
        "variance": var,
        "in_interval_fraction": frac,
        "interval": [lo, hi],
        "critical_probability_exact": p,
        "binomial_mean": k * p,
        "binomial_variance": k * p * (1 - p),
        "binomial_in_interval": float(
            stats.binom.cdf(math.floor(hi), k, p) - stats.binom.cdf(math.ceil(lo) - 1, k, p)
        ),
    }
    checks = [
        two_sided("mean-l-vs-k/4", mean, k / 4, math.sqrt(var / n_samples)),
        Check("variance-l-vs-k/16", "relative", var, k / 16, 0.1 * k / 16),
        Check("in-interval-fraction-vs-0.998", "absolute", frac, 0.998, 0.002),
    ]
    return metrics, checks


# --- single-bit OT ---------------------------------------------------------------------


def _bit_ot_trial(cfg: ExperimentConfig, index: int, want_transcript: bool):
    seed = derive_trial_seed(cfg.master_seed, index)
    rng = make_rng(seed)
    params = SessionParams.sample(cfg.k, cfg.n, rng, key_check_alpha=cfg.key_check_alpha)
    b = int(rng.integers(0, 2))
    message, cipher, record = protocol.single_bit_ot_alice(b, params, rng)
    opening = protocol.alice_open(record)
    a_prime = _bob_direction(cfg, record.a, rng)
    outcome = protocol.bob_open(cipher, opening, params, rng, a_prime=a_prime)
    bit = protocol.single_bit_ot_bob(outcome)
    doc = None
    if want_transcript:
        doc = SessionTranscript(
            params, cipher, opening, outcome, seed, kind="single-bit-ot", extra={"b": b}
        ).to_dict()
    return (int(bit is not None), int(bit is not None and bit != b)), doc


def _bit_ot_fold(cfg: ExperimentConfig, rows: list):
    arr = np.array(rows, dtype=np.int64)
    rate = float(arr[:, 0].mean())
    wrong = int(arr[:, 1].sum())
    checks = [Check("wrong-bits", "exact", float(wrong), 0.0, 0.0)]
    if cfg.bob_direction == "random":
        checks.append(two_sided("received-rate-vs-half", rate, 0.5, binomial_sigma(0.5, len(arr))))
    return {"sessions": len(arr), "received_rate": rate, "wrong_bits": wrong}, checks


EXPERIMENTS: dict[str, Experiment] = {
    "soundness": Experiment(_soundness_trial, _soundness_fold, {"k": 20, "n": 4, "trials": 20000}),
    "same-direction": Experiment(
        _same_direction_trial, _same_direction_fold, {"k": 8, "n": 4, "trials": 10000}, _per_s_total
    ),
    "concealing-before": Experiment(
        _concealing_before_trial, _concealing_before_fold, {"k": 16, "n": 4, "trials": 10000}
    ),
    "concealing-after": Experiment(
        _concealing_after_trial, _concealing_after_fold, {"k": 8, "n": 4, "trials": 10000}, _per_s_total
    ),
    "obliviousness": Experiment(
        _obliviousness_trial, _obliviousness_fold, {"k": 40, "n": 4, "trials": 10000}, _oblivious_total
    ),
    "pubkey-roundtrip": Experiment(_pubkey_trial, _pubkey_fold, {"k": 16, "n": 4, "trials": 1000}),
    "hash-universality": Experiment(_hash_trial, _hash_fold, {"k": 8, "n": 4, "trials": 200}),
    "l-distribution": Experiment(_l_trial, _l_fold, {"k": 400, "n": 16, "trials": 10000}),
    "bit-ot": Experiment(_bit_ot_trial, _bit_ot_fold, {"k": 40, "n": 4, "trials": 10000}),
}


def _run_chunk(args) -> list:
    cfg, start, stop, want = args
    trial = EXPERIMENTS[cfg.experiment].trial
    return [trial(cfg, i, want) for i in range(start, stop)]


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    cfg = config.resolved()
    experiment = EXPERIMENTS[cfg.experiment]
    total = experiment.total_trials(cfg)
    want = cfg.transcripts_dir is not None
    if cfg.output_path is not None:
        out = Path(cfg.output_path)
        if out.parent and not out.parent.exists():
            raise OSError(f"output directory {out.parent} does not exist")
    started = time.perf_counter()
    if cfg.workers == 1:
        results = _run_chunk((cfg, 0, total, want))
    else:
        step = math.ceil(total / (cfg.workers * 4))
        chunks = [(cfg, i, min(i + step, total), want) for i in range(0, total, step)]
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = [r for part in pool.map(_run_chunk, chunks) for r in part]
    rows = [row for row, _ in results]
    if want:
        for i, (_, doc) in enumerate(results):
            if doc is not None:
                write_transcript(Path(cfg.transcripts_dir), i, SessionTranscript.from_dict(doc))
    metrics, checks = experiment.fold(cfg, rows)
    report = ExperimentReport(cfg.echo(), metrics, checks, time.perf_counter() - started)
    if cfg.output_path is not None:
        Path(cfg.output_path).write_text(report.render(cfg.format))
    return report
