"""QND fidelity, readout fidelity and repeatability, and error statistics of
repeated-measurement records.

Conditional tables are arrays ``P[k, i, j]``: the probability that a qubit
prepared in ``k`` (0 or 1) ends in state ``i`` after the measurement and the
measurement reports ``j`` (0 or 1).  Post-measurement states are indexed
``0, 1, 2, 3, 4`` where 4 stands for "4 or higher".

Records follow the protocol of a leakage check, a fixed number of
back-to-back qubit measurements, and a second leakage check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from typing import Iterable, Sequence

import numpy as np

from .parallel import ordered_map

__all__ = [
    "STATE_LABELS",
    "ConditionalTable",
    "TwoMeasurementTable",
    "QNDDecomposition",
    "ShotRecord",
    "RecordBatch",
    "ErrorTally",
    "qnd_fidelity",
    "qnd_decomposition",
    "readout_fidelity",
    "repeatability",
    "table_from_rates",
    "compose_two_measurements",
    "synthesize_records",
    "classify_records",
]

STATE_LABELS = ("0", "1", "2", "3", "4+")
N_STATES = len(STATE_LABELS)
SEQUENCE_LENGTH = 18
CHUNK = 1 << 16
_TOL = 1e-9


# ------------------------------------------------------------------ tables


@dataclass(frozen=True, eq=False)
class ConditionalTable:
    """``P(i_s, j_m | k_s)`` stored as ``p[k, i, j]`` with shape ``(2, 5, 2)``."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (2, N_STATES, 2):
            raise ValueError(f"table must have shape (2, {N_STATES}, 2), got {p.shape}")
        if np.any(p < -_TOL) or np.any(p > 1 + _TOL):
            raise ValueError("probabilities must lie in [0, 1]")
        sums = p.sum(axis=(1, 2))
        if np.any(np.abs(sums - 1.0) > _TOL):
            raise ValueError(f"each prepared state must sum to 1, got {sums}")
        object.__setattr__(self, "p", p)

    def transition(self, k: int) -> np.ndarray:
        """``P(i_s | k_s)`` regardless of outcome."""
        return self.p[k].sum(axis=1)

    def outcome(self, k: int) -> np.ndarray:
        """``P(j_m | k_s)`` regardless of the final state."""
        return self.p[k].sum(axis=0)


@dataclass(frozen=True, eq=False)
class TwoMeasurementTable:
    """``P(j_m1, i_m2 | k_s)`` stored as ``p[k, j, i]`` with shape ``(2, 2, 2)``."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (2, 2, 2):
            raise ValueError(f"two-measurement table must have shape (2, 2, 2), got {p.shape}")
        if np.any(p < -_TOL) or np.any(np.abs(p.sum(axis=(1, 2)) - 1.0) > _TOL):
            raise ValueError("two-measurement table is not a probability table")
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class QNDDecomposition:
    q: float
    eps_assign: float
    eps_trans: float
    eps_trans_bitflip: float
    eps_trans_leakage: float


def qnd_fidelity(t: ConditionalTable) -> float:
    """``Q = (P(1,1|1) + P(0,0|0)) / 2``."""
    return 0.5 * (t.p[1, 1, 1] + t.p[0, 0, 0])


def qnd_decomposition(t: ConditionalTable) -> QNDDecomposition:
    """Split ``1 - Q`` into assignment and transition errors.

    Transitions are further split into bit flips (0 <-> 1) and leakage
    (to states 2 and above).
    """
    trans = [t.transition(k) for k in (0, 1)]
    eps_trans = 0.5 * sum(trans[k].sum() - trans[k][k] for k in (0, 1))
    eps_assign = 0.5 * (t.p[0, 0, 1] + t.p[1, 1, 0])
    bitflip = 0.5 * (trans[0][1] + trans[1][0])
    leak = 0.5 * (trans[0][2:].sum() + trans[1][2:].sum())
    return QNDDecomposition(qnd_fidelity(t), eps_assign, eps_trans, bitflip, leak)


def readout_fidelity(t: ConditionalTable) -> float:
    """``F = (P(0_m|0_s) + P(1_m|1_s)) / 2``."""
    return 0.5 * (t.outcome(0)[0] + t.outcome(1)[1])


def repeatability(t2: TwoMeasurementTable) -> float:
    """``R = (P(0_m2|0_m1, 0_s) + P(1_m2|1_m1, 1_s)) / 2``.

    Raises
    ------
    ValueError
        If a first outcome that enters the definition never occurs.
    """
    vals = []
    for k in (0, 1):
        first = t2.p[k, k].sum()
        if first <= 0:
            raise ValueError(f"outcome {k} never occurs after preparing {k}")
        vals.append(t2.p[k, k, k] / first)
    return 0.5 * sum(vals)


def compose_two_measurements(
    t: ConditionalTable, leak_outcome: Sequence[float] = (1.0, 1.0, 1.0)
) -> TwoMeasurementTable:
    """Two back-to-back measurements built from one conditional table.

    The second measurement of a computational state reads out with the
    table's outcome statistics; a leaked state ``2, 3, 4+`` reports 1 with
    probability ``leak_outcome[state - 2]``.
    """
    lo = np.asarray(leak_outcome, dtype=float)
    if lo.shape != (N_STATES - 2,) or np.any((lo < 0) | (lo > 1)):
        raise ValueError("leak_outcome needs one probability per leaked state")
    second = np.empty((N_STATES, 2))
    second[0], second[1] = t.outcome(0), t.outcome(1)
    second[2:, 1] = lo
    second[2:, 0] = 1.0 - lo
    return TwoMeasurementTable(np.einsum("kij,il->kjl", t.p, second))


def table_from_rates(
    eps_assign: float, eps_bitflip: float, eps_leak: float, leak_state: int = 2
) -> ConditionalTable:
    """Symmetric table: the outcome reflects the pre-measurement state with
    error ``eps_assign``; afterwards the state flips with ``eps_bitflip`` or
    leaks to ``leak_state`` with ``eps_leak``.
    """
    for v in (eps_assign, eps_bitflip, eps_leak):
        if not 0 <= v <= 1:
            raise ValueError("rates must be probabilities")
    if eps_bitflip + eps_leak > 1:
        raise ValueError("eps_bitflip + eps_leak exceeds one")
    if leak_state not in (2, 3, 4):
        raise ValueError("leak_state must be 2, 3 or 4")
    p = np.zeros((2, N_STATES, 2))
    a = eps_assign
    for k in (0, 1):
        right, wrong = 1.0 - a, a
        stay = 1.0 - eps_bitflip - eps_leak
        for state, w in ((k, stay), (1 - k, eps_bitflip), (leak_state, eps_leak)):
            p[k, state, k] += w * right
            p[k, state, 1 - k] += w * wrong
    return ConditionalTable(p)


# ----------------------------------------------------------------- records

LEAK_TARGETS = (0.7, 0.25, 0.05)  # relative weights of 2, 3, 4+


@dataclass(frozen=True)
class ShotRecord:
    """One sequence: preparation, leakage checks and binary outcomes.

    Leakage-check labels are 0 for a computational state (the check does
    not separate 0 from 1) and 2, 3, 4 for ``2``, ``3`` and ``4+``.
    """

    prepared: int
    outcomes: tuple[int, ...]
    pre_leak: int
    post_leak: int

    def __post_init__(self):
        if self.prepared not in (0, 1):
            raise ValueError("prepared must be 0 or 1")
        if any(o not in (0, 1) for o in self.outcomes):
            raise ValueError("outcomes must be binary")
        for v in (self.pre_leak, self.post_leak):
            if v not in (0, 1, 2, 3, 4):
                raise ValueError(f"leak label {v} is not one of 0/1, 2, 3, 4+")


@dataclass(eq=False)
class RecordBatch:
    """Column storage for many records; ``outcomes`` has shape ``(n, length)``."""

    prepared: np.ndarray
    outcomes: np.ndarray
    pre_leak: np.ndarray
    post_leak: np.ndarray

    def __post_init__(self):
        self.prepared = np.asarray(self.prepared, dtype=np.uint8)
        self.outcomes = np.atleast_2d(np.asarray(self.outcomes, dtype=np.uint8))
        self.pre_leak = np.asarray(self.pre_leak, dtype=np.uint8)
        self.post_leak = np.asarray(self.post_leak, dtype=np.uint8)
        n = len(self.prepared)
        if self.outcomes.shape[0] != n or len(self.pre_leak) != n or len(self.post_leak) != n:
            raise ValueError("record columns have inconsistent lengths")
        if np.any(self.prepared > 1) or np.any(self.outcomes > 1):
            raise ValueError("prepared states and outcomes must be binary")
        if np.any(self.pre_leak > 4) or np.any(self.post_leak > 4):
            raise ValueError("leak labels must lie in 0..4")

    def __len__(self) -> int:
        return len(self.prepared)

    @property
    def length(self) -> int:
        return self.outcomes.shape[1]

    @classmethod
    def from_records(cls, records: Iterable[ShotRecord]) -> "RecordBatch":
        recs = list(records)
        if not recs:
            raise ValueError("no records")
        lengths = {len(r.outcomes) for r in recs}
        if len(lengths) != 1:
            raise ValueError("records have different sequence lengths")
        return cls(
            [r.prepared for r in recs],
            [r.outcomes for r in recs],
            [r.pre_leak for r in recs],
            [r.post_leak for r in recs],
        )

    def records(self) -> list[ShotRecord]:
        return [
            ShotRecord(int(k), tuple(int(x) for x in o), int(a), int(b))
            for k, o, a, b in zip(self.prepared, self.outcomes, self.pre_leak, self.post_leak)
        ]

    def slice(self, sl: slice) -> "RecordBatch":
        return RecordBatch(self.prepared[sl], self.outcomes[sl], self.pre_leak[sl], self.post_leak[sl])

    @classmethod
    def concatenate(cls, parts: Sequence["RecordBatch"]) -> "RecordBatch":
        return cls(
            np.concatenate([p.prepared for p in parts]),
            np.concatenate([p.outcomes for p in parts]),
            np.concatenate([p.pre_leak for p in parts]),
            np.concatenate([p.post_leak for p in parts]),
        )


def _synth_chunk(rates, length, pre_leak_prob, leak_readout, seed, job):
    index, start, n = job
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    a, bf, lk = rates
    prepared = ((start + np.arange(n)) % 2).astype(np.uint8)
    targets = np.array([2, 3, 4], dtype=np.uint8)
    weights = np.asarray(LEAK_TARGETS) / sum(LEAK_TARGETS)

    pre_leaked = rng.random(n) < pre_leak_prob
    pre_label = np.where(pre_leaked, rng.choice(targets, n, p=weights), 0).astype(np.uint8)
    state = prepared.astype(np.int8)
    state[pre_leaked] = pre_label[pre_leaked].astype(np.int8)

    outcomes = np.empty((n, length), dtype=np.uint8)
    for t in range(length):
        leaked = state >= 2
        flip = rng.random(n) < a
        out = np.where(leaked, leak_readout, state).astype(np.uint8)
        out[~leaked & flip] ^= 1
        outcomes[:, t] = out
        # state change after the measurement
        u = rng.random(n)
        go_flip = ~leaked & (u < bf)
        go_leak = ~leaked & (u >= bf) & (u < bf + lk)
        state[go_flip] = 1 - state[go_flip]
        if np.any(go_leak):
            state[go_leak] = rng.choice(targets, int(go_leak.sum()), p=weights).astype(np.int8)
    post = np.where(state >= 2, state, 0).astype(np.uint8)
    return RecordBatch(prepared, outcomes, pre_label, post)


def synthesize_records(
    rates: tuple[float, float, float],
    n_shots: int,
    seed: int,
    length: int = SEQUENCE_LENGTH,
    pre_leak_prob: float = 0.0,
    leak_readout: int = 1,
    workers: int | None = None,
) -> RecordBatch:
    """Markov generator of repeated-measurement records.

    ``rates = (eps_assign, eps_bitflip, eps_leak)`` are per-measurement
    probabilities.  Preparations alternate 0, 1, 0, ...  At each measurement
    a computational state is reported with assignment error ``eps_assign``;
    afterwards it flips with ``eps_bitflip`` or leaks with ``eps_leak`` into
    2, 3 or 4+.  Leaked states stay leaked and always read
    ``leak_readout``.  ``pre_leak_prob`` starts a fraction of shots leaked.

    Shots are generated in fixed chunks, each with its own seed stream, so
    the output depends on ``seed`` only, never on ``workers``.
    """
    a, bf, lk = (float(r) for r in rates)
    if not all(0 <= r <= 1 for r in (a, bf, lk, pre_leak_prob)) or bf + lk > 1:
        raise ValueError(f"invalid rates {rates}")
    if n_shots < 0 or length < 1:
        raise ValueError("n_shots must be >= 0 and length >= 1")
    if leak_readout not in (0, 1):
        raise ValueError("leak_readout must be 0 or 1")
    jobs = [(i, s, min(CHUNK, n_shots - s)) for i, s in enumerate(range(0, n_shots, CHUNK))]
    if not jobs:
        return RecordBatch(np.zeros(0), np.zeros((0, length)), np.zeros(0), np.zeros(0))
    task = partial(_synth_chunk, (a, bf, lk), length, pre_leak_prob, leak_readout, seed)
    return RecordBatch.concatenate(ordered_map(task, jobs, workers, chunksize=1))


# ------------------------------------------------------------- classifier


@dataclass(frozen=True)
class RateEstimate:
    rate: float
    count: int
    trials: int

    @property
    def sigma(self) -> float:
        """Binomial standard error."""
        if self.trials == 0:
            return math.nan
        return math.sqrt(max(self.rate * (1 - self.rate), 0.0) / self.trials)

    def wilson(self, z: float = 1.96) -> tuple[float, float]:
        """Wilson score interval."""
        n = self.trials
        if n == 0:
            return (math.nan, math.nan)
        p = self.count / n
        den = 1 + z * z / n
        mid = (p + z * z / (2 * n)) / den
        half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
        return (max(mid - half, 0.0), min(mid + half, 1.0))


@dataclass(frozen=True)
class ErrorTally:
    """Per-measurement error probabilities recovered from records.

    Assignment errors are counted at interior positions and bit flips at
    interior gaps of each clean sequence; events at the sequence edges are
    ambiguous and reported separately in ``edge_assign`` and ``edge_trans``.
    Leakage is the fraction of kept sequences whose closing check is
    non-computational, divided by the sequence length.
    """

    assign: RateEstimate
    bitflip: RateEstimate
    leakage: RateEstimate
    n_records: int
    n_discarded: int
    n_leaked: int
    edge_assign: int
    edge_trans: int

    @property
    def eps_assign(self) -> float:
        return self.assign.rate

    @property
    def eps_trans_bitflip(self) -> float:
        return self.bitflip.rate

    @property
    def eps_trans_leakage(self) -> float:
        return self.leakage.rate

    @property
    def eps_trans(self) -> float:
        return self.bitflip.rate + self.leakage.rate

    @property
    def q_estimate(self) -> float:
        """``1 - eps_assign - eps_trans``."""
        return 1.0 - self.eps_assign - self.eps_trans


def _viterbi(outcomes: np.ndarray, prepared: np.ndarray, a: float, bf: float):
    """Most likely hidden 0/1 path for each row.

    The hidden state before the first measurement is the prepared one; a
    transition may happen before any measurement.  Ties favour a transition.
    """
    n, length = outcomes.shape
    ca, cna = -math.log(a), -math.log1p(-a)
    cf, cnf = -math.log(bf), -math.log1p(-bf)
    emit = lambda s, t: np.where(outcomes[:, t] == s, cna, ca)  # noqa: E731
    cost = np.empty((n, 2))
    for s in (0, 1):
        cost[:, s] = np.where(prepared == s, cnf, cf) + emit(s, 0)
    back = np.zeros((n, length, 2), dtype=bool)  # True: came from the other state
    for t in range(1, length):
        new = np.empty_like(cost)
        for s in (0, 1):
            stay = cost[:, s] + cnf
            move = cost[:, 1 - s] + cf
            take = move <= stay
            back[:, t, s] = take
            new[:, s] = np.where(take, move, stay) + emit(s, t)
        cost = new
    path = np.empty((n, length), dtype=np.uint8)
    s = np.where(cost[:, 1] <= cost[:, 0], 1, 0).astype(np.uint8)
    rows = np.arange(n)
    for t in range(length - 1, -1, -1):
        path[:, t] = s
        if t > 0:
            s = np.where(back[rows, t, s], 1 - s, s).astype(np.uint8)
    return path


def _count_chunk(a, bf, batch: RecordBatch):
    path = _viterbi(batch.outcomes, batch.prepared, a, bf)
    wrong = path != batch.outcomes
    trans = path[:, 1:] != path[:, :-1]
    first = path[:, 0] != batch.prepared
    n_assign = int(wrong[:, 1:-1].sum())
    n_trans = int(trans[:, 1:-1].sum())
    edge_a = int(wrong[:, 0].sum() + wrong[:, -1].sum())
    edge_t = int(trans[:, 0].sum() + trans[:, -1].sum() + first.sum())
    return n_assign, n_trans, edge_a, edge_t


def classify_records(
    records: RecordBatch | Iterable[ShotRecord],
    rates: tuple[float, float] | None = None,
    max_iter: int = 20,
    workers: int | None = None,
) -> ErrorTally:
    """Classify assignment errors, bit flips and leakage in measurement records.

    Sequences whose opening leakage check is non-computational are
    discarded; sequences that leak during the run (closing check
    non-computational) only contribute to the leakage rate, since a leaked
    transmon corrupts the remaining outcomes.

    Clean sequences are decoded with the most likely hidden path under
    independent assignment errors and bit flips.  An isolated disagreeing
    outcome therefore costs one assignment error while a lasting switch
    costs one transition.  Without ``rates = (eps_assign, eps_bitflip)``
    the rates used for decoding are iterated to self-consistency.

    Raises
    ------
    ValueError
        If there are no records or every record is discarded.
    """
    batch = records if isinstance(records, RecordBatch) else RecordBatch.from_records(records)
    if len(batch) == 0:
        raise ValueError("no records to classify")
    length = batch.length
    if length < 3:
        raise ValueError("sequences need at least three measurements")
    kept = batch.pre_leak < 2
    n_kept = int(kept.sum())
    if n_kept == 0:
        raise ValueError("every record was discarded by the opening leakage check")
    leaked = kept & (batch.post_leak >= 2)
    clean_idx = np.flatnonzero(kept & ~leaked)
    clean = RecordBatch(
        batch.prepared[clean_idx], batch.outcomes[clean_idx],
        batch.pre_leak[clean_idx], batch.post_leak[clean_idx],
    )
    n_clean = len(clean)
    a_trials = (length - 2) * n_clean
    t_trials = (length - 3) * n_clean

    chunks = [clean.slice(slice(s, s + CHUNK)) for s in range(0, n_clean, CHUNK)]

    def run(a, bf):
        parts = ordered_map(partial(_count_chunk, a, bf), chunks, workers, chunksize=1)
        return tuple(sum(p[k] for p in parts) for k in range(4))

    counts = (0, 0, 0, 0)
    if n_clean:
        if rates is not None:
            counts = run(*rates)
        else:
            a, bf = 1e-2, 1e-3
            seen = set()
            for _ in range(max_iter):
                counts = run(a, bf)
                # half-count floor keeps the decoder from ruling out an event type
                a_new = max(counts[0], 0.5) / a_trials
                bf_new = max(counts[1], 0.5) / t_trials
                key = (counts[0], counts[1])
                if key in seen:
                    break
                seen.add(key)
                a, bf = min(a_new, 0.49), min(bf_new, 0.49)

    n_assign, n_trans, edge_a, edge_t = counts
    n_leaked = int(leaked.sum())
    return ErrorTally(
        RateEstimate(n_assign / a_trials if a_trials else math.nan, n_assign, a_trials),
        RateEstimate(n_trans / t_trials if t_trials else math.nan, n_trans, t_trials),
        RateEstimate(n_leaked / (length * n_kept), n_leaked, length * n_kept),
        len(batch),
        len(batch) - n_kept,
        n_leaked,
        edge_a,
        edge_t,
    )
