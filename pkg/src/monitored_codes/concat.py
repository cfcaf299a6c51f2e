"""Logical measurement probabilities of concatenated k = 1 codes.

One level maps the per-qubit outcome distribution ``(p_none, pX, pY, pZ)``
to the distribution of the block's verdict: preserved blocks act as
unmeasured qubits at the next level, a block whose X̄ (Ȳ, Z̄) was measured
acts as a qubit measured in X (Y, Z).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .codes import CodeSpec
from .monitor import ContractError, class_bucket, erasure_correctable, rng_for

EXHAUSTIVE_MAX_N = 8


class UndefinedInputError(ValueError):
    """The requested quantity is undefined for this input."""


@dataclass(frozen=True)
class OutcomeDistribution:
    p_none: float
    pX: float
    pY: float
    pZ: float

    def __post_init__(self):
        vals = self.as_array()
        if (vals < -1e-15).any() or abs(vals.sum() - 1.0) > 1e-12:
            raise ContractError(f"not a probability distribution: {tuple(vals)}")

    @classmethod
    def from_measured(cls, pX: float, pY: float, pZ: float) -> "OutcomeDistribution":
        return cls(1.0 - (pX + pY + pZ), pX, pY, pZ)

    @classmethod
    def uniform(cls, p_m: float) -> "OutcomeDistribution":
        return cls(1.0 - p_m, p_m / 3, p_m / 3, p_m / 3)

    @classmethod
    def from_array(cls, arr) -> "OutcomeDistribution":
        a = np.asarray(arr, dtype=float)
        return cls(*(float(v) for v in a))

    @property
    def p_m(self) -> float:
        return self.pX + self.pY + self.pZ

    def as_array(self) -> np.ndarray:
        return np.array([self.p_none, self.pX, self.pY, self.pZ], dtype=float)


# ------------------------------------------------------------- verdict tables

def _all_patterns(n: int) -> np.ndarray:
    """Every pattern in base-4 counting order, qubit 0 most significant."""
    idx = np.arange(4**n)
    shifts = 2 * np.arange(n - 1, -1, -1)
    return ((idx[:, None] >> shifts) & 3).astype(np.uint8)


@lru_cache(maxsize=16)
def _table_for(fingerprint: str, n: int) -> np.ndarray:
    code = _CODES_BY_FP[fingerprint]
    pats = _all_patterns(n)
    return np.array([class_bucket(code, p) for p in pats], dtype=np.uint8)


_CODES_BY_FP: dict[str, CodeSpec] = {}


def verdict_table(code: CodeSpec) -> np.ndarray:
    """Bucket (0 none, 1 X̄, 2 Ȳ, 3 Z̄) for all 4^n patterns of a small code."""
    _check_k1(code)
    if code.n > EXHAUSTIVE_MAX_N:
        raise ContractError(f"exhaustive enumeration needs n <= {EXHAUSTIVE_MAX_N}, code has {code.n}")
    _CODES_BY_FP.setdefault(code.fingerprint, code)
    return _table_for(code.fingerprint, code.n)


def _check_k1(code: CodeSpec) -> None:
    if code.k != 1:
        raise ContractError(f"concatenation flow needs k = 1, code has k = {code.k}")


def _pattern_index(codes: np.ndarray) -> np.ndarray:
    n = codes.shape[-1]
    weights = 4 ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return codes.astype(np.int64) @ weights


class _BucketCache:
    """Memoised block verdicts for codes too large for a full table."""

    def __init__(self, code: CodeSpec):
        self.code = code
        self.memo: dict[bytes, int] = {}

    def __call__(self, codes: np.ndarray) -> int:
        key = codes.tobytes()
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = class_bucket(self.code, codes)
        return hit


_CACHES: dict[str, _BucketCache] = {}


def _buckets(code: CodeSpec, patterns: np.ndarray) -> np.ndarray:
    if code.n <= EXHAUSTIVE_MAX_N:
        return verdict_table(code)[_pattern_index(patterns)]
    cache = _CACHES.setdefault(code.fingerprint, _BucketCache(code))
    return np.array([cache(p) for p in patterns], dtype=np.uint8)


# ------------------------------------------------------------------ level maps

def level_map_exhaustive(code: CodeSpec, d: OutcomeDistribution) -> OutcomeDistribution:
    """Exact one-level map by summing over all 4^n measurement patterns."""
    table = verdict_table(code)
    probs = d.as_array()
    weights = np.prod(probs[_all_patterns(code.n)], axis=1)
    out = np.bincount(table, weights=weights, minlength=4)
    out = np.clip(out, 0.0, None)
    out /= out.sum()
    return OutcomeDistribution.from_array(out)


def level_map_montecarlo(
    code: CodeSpec,
    d: OutcomeDistribution,
    samples: int,
    seed: int = 0,
    key: Sequence[int] = (0,),
) -> OutcomeDistribution:
    """Frequency estimate of the four buckets from ``samples`` random blocks."""
    _check_k1(code)
    if samples < 1:
        raise ContractError("samples must be >= 1")
    rng = rng_for(seed, tuple(key))
    u = rng.random((samples, code.n))
    cum = np.cumsum(d.as_array())[:3]
    patterns = np.searchsorted(cum, u, side="right").astype(np.uint8)
    counts = np.bincount(_buckets(code, patterns), minlength=4)
    return OutcomeDistribution.from_array(counts / samples)


# ------------------------------------------------------------------ flows

@dataclass
class FlowTrace:
    code: str
    method: str
    rounds: list[OutcomeDistribution] = field(default_factory=list)

    @property
    def final(self) -> OutcomeDistribution:
        return self.rounds[-1]

    def rows(self) -> list[tuple]:
        out = []
        for i, d in enumerate(self.rounds):
            r2 = renyi2_uncertainty(d) if d.p_m > 0 else math.nan
            out.append((i, d.p_none, d.pX, d.pY, d.pZ, r2))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["round", "p_none", "pX", "pY", "pZ", "renyi2"])
        for row in self.rows():
            w.writerow([row[0]] + [format_float(v) for v in row[1:]])
        return buf.getvalue()


def format_float(v: float) -> str:
    return "nan" if v != v else f"{v:.9g}"


def flow(
    code: CodeSpec,
    d0: OutcomeDistribution,
    rounds: int,
    method: str = "exhaustive",
    samples: int = 1000,
    seed: int = 0,
    key: Sequence[int] = (),
) -> FlowTrace:
    """Iterate the level map ``rounds`` times; entry 0 is ``d0``."""
    if rounds < 1:
        raise ContractError("rounds must be >= 1")
    if method not in ("exhaustive", "montecarlo"):
        raise ContractError(f"unknown method {method!r}")
    label = "exhaustive" if method == "exhaustive" else f"montecarlo({samples})"
    trace = FlowTrace(code.name, label, [d0])
    d = d0
    for r in range(rounds):
        if method == "exhaustive":
            d = level_map_exhaustive(code, d)
        else:
            d = level_map_montecarlo(code, d, samples, seed, tuple(key) + (r,))
        trace.rounds.append(d)
    return trace


def renyi2_uncertainty(d, arity: int = 3) -> float:
    """Rényi-2 entropy (base ``arity``) of the measured-class distribution.

    ``d`` is an :class:`OutcomeDistribution` (three classes) or a sequence of
    class probabilities; it is renormalised to the measured mass first.
    """
    if isinstance(d, OutcomeDistribution):
        q = d.as_array()[1:]
    else:
        q = np.asarray(d, dtype=float)
    if arity not in (3, 4):
        raise ContractError("arity must be 3 or 4")
    total = q.sum()
    if total <= 0:
        raise UndefinedInputError("no measured mass; the uncertainty is undefined")
    q = q / total
    val = -math.log(float(np.sum(q * q))) / math.log(arity)
    return max(0.0, val)


def five_qubit_closed_form(p_m: float) -> float:
    """Measured mass after one five-qubit level under uniform frequencies."""
    return (10 * p_m**3 - p_m**5) / 9


# ------------------------------------------------------------------ erasure

@lru_cache(maxsize=16)
def _erasure_table_for(fingerprint: str, n: int) -> np.ndarray:
    code = _CODES_BY_FP[fingerprint]
    idx = np.arange(2**n)
    bits = (idx[:, None] >> np.arange(n - 1, -1, -1)) & 1
    return np.array([not erasure_correctable(code, np.flatnonzero(b)) for b in bits], dtype=bool)


def erasure_table(code: CodeSpec) -> np.ndarray:
    """True where erasing the subset (bitmask, qubit 0 most significant) loses the logical."""
    if code.n > 16:
        raise ContractError("erasure enumeration needs n <= 16")
    _CODES_BY_FP.setdefault(code.fingerprint, code)
    return _erasure_table_for(code.fingerprint, code.n)


def erasure_level_map(code: CodeSpec, p_e: float) -> float:
    """Probability a block loses its logical qubit when each qubit is erased with ``p_e``."""
    table = erasure_table(code)
    n = code.n
    sizes = np.array([bin(i).count("1") for i in range(2**n)])
    weights = p_e**sizes * (1.0 - p_e) ** (n - sizes)
    return float(min(1.0, max(0.0, weights[table].sum())))


def erasure_flow(code: CodeSpec, p_e: float, rounds: int) -> list[float]:
    """Erasure probability after each concatenation level (entry 0 is ``p_e``)."""
    out = [p_e]
    for _ in range(rounds):
        out.append(erasure_level_map(code, out[-1]))
    return out
