"""Choi states of codes as stabilizer states, with measurement updates and entropies.

This is the slow, general route: the encoded information survives a set of
measurements iff the system keeps maximal mutual information with the
reference.  It doubles as an oracle for :mod:`monitored_codes.monitor`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import gf2
from .codes import CodeSpec
from .monitor import ContractError, MeasurementPattern, _pattern_codes
from .pauli import GeneratorSet, PauliOp, centralizer_matrix, independent_matrix, symplectic_product

REGION_LABELS = ("A", "R", "R_gauge", "R_bare")


@dataclass(frozen=True, eq=False)
class StabilizerState:
    """A (possibly mixed) stabilizer state given by an unsigned generator matrix.

    ``group`` rows are independent, mutually commuting ``[x | z]`` vectors on
    ``n_total`` qubits.  ``regions`` maps a label to its qubit indices.
    """

    n_total: int
    group: np.ndarray
    regions: dict = field(default_factory=dict)

    def __post_init__(self):
        g = np.asarray(self.group, dtype=np.uint8).reshape(-1, 2 * self.n_total)
        g.setflags(write=False)
        object.__setattr__(self, "group", g)
        for label in self.regions:
            if label not in REGION_LABELS:
                raise ContractError(f"unknown region label {label!r}")

    @property
    def rank(self) -> int:
        return self.group.shape[0]

    @property
    def is_pure(self) -> bool:
        return self.rank == self.n_total

    def region(self, label: str) -> np.ndarray:
        try:
            return np.asarray(self.regions[label], dtype=np.intp)
        except KeyError:
            raise ContractError(f"state has no region {label!r}") from None

    def generators(self) -> GeneratorSet:
        return GeneratorSet.from_matrix(self.group, self.n_total, "stabilizer")

    def same_group(self, other: "StabilizerState") -> bool:
        if self.n_total != other.n_total or self.rank != other.rank:
            return False
        if self.rank == 0:
            return True
        return gf2.rank(np.vstack([self.group, other.group])) == self.rank


def _extend(rows: np.ndarray, n_old: int, n_new: int, offset: int = 0) -> np.ndarray:
    """Place ``[x | z]`` rows on ``n_old`` qubits into a ``n_new`` qubit frame."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.uint8))
    out = np.zeros((rows.shape[0], 2 * n_new), dtype=np.uint8)
    out[:, offset : offset + n_old] = rows[:, :n_old]
    out[:, n_new + offset : n_new + offset + n_old] = rows[:, n_old:]
    return out


def _bell_rows(sys_rows: np.ndarray, n: int, n_total: int, ref: int, kind: str) -> np.ndarray:
    """``P ⊗ X_ref`` (kind X) or ``P ⊗ Z_ref`` (kind Z) for each system row."""
    out = _extend(sys_rows, n, n_total)
    out[:, (0 if kind == "X" else n_total) + ref] = 1
    return out


def build_choi(code: CodeSpec) -> StabilizerState:
    """Choi state of a stabilizer code on n + k qubits (A then R)."""
    if code.is_subsystem:
        raise ContractError("subsystem code: use build_choi_subsystem")
    n, k = code.n, code.k
    N = n + k
    rows = [_extend(code.stabilizers.matrix, n, N)]
    for j in range(k):
        rows.append(_bell_rows(code.logical_x[j].symplectic(), n, N, n + j, "X"))
        rows.append(_bell_rows(code.logical_z[j].symplectic(), n, N, n + j, "Z"))
    regions = {"A": list(range(n)), "R": list(range(n, N))}
    return StabilizerState(N, np.vstack(rows), regions)


def build_choi_subsystem(code: CodeSpec) -> StabilizerState:
    """Choi state of a subsystem code on n + g + k qubits (A, R_gauge, R_bare).

    The gauge qubits are entangled with their own reference through a
    symplectic basis of G modulo S.
    """
    if not code.is_subsystem:
        raise ContractError("stabilizer code: use build_choi")
    n, g, k = code.n, code.g, code.k
    N = n + g + k
    a, b = code.gauge_pairs
    if a.shape[0] != g:
        raise ContractError(f"gauge group has {a.shape[0]} conjugate pairs, expected {g}")
    rows = [_extend(code.stabilizers.matrix, n, N)]
    for i in range(g):
        rows.append(_bell_rows(a[i], n, N, n + i, "X"))
        rows.append(_bell_rows(b[i], n, N, n + i, "Z"))
    for j in range(k):
        rows.append(_bell_rows(code.logical_x[j].symplectic(), n, N, n + g + j, "X"))
        rows.append(_bell_rows(code.logical_z[j].symplectic(), n, N, n + g + j, "Z"))
    regions = {
        "A": list(range(n)),
        "R_gauge": list(range(n, n + g)),
        "R_bare": list(range(n + g, N)),
    }
    return StabilizerState(N, np.vstack(rows), regions)


def embed_measurements(state: StabilizerState, pattern) -> np.ndarray:
    """Single-qubit measured Paulis of a system pattern, in the state's frame."""
    n_sys = len(state.regions.get("A", range(state.n_total)))
    codes = pattern.codes if isinstance(pattern, MeasurementPattern) else np.asarray(pattern, np.uint8)
    if codes.size != n_sys:
        raise ContractError(f"pattern has {codes.size} qubits, system has {n_sys}")
    qs = np.flatnonzero(codes)
    rows = np.zeros((qs.size, 2 * state.n_total), dtype=np.uint8)
    c = codes[qs]
    rows[np.arange(qs.size), qs] = (c == 1) | (c == 2)
    rows[np.arange(qs.size), state.n_total + qs] = (c == 2) | (c == 3)
    return rows


def _measured_rows(state: StabilizerState, measured) -> np.ndarray:
    if isinstance(measured, GeneratorSet):
        if measured.n != state.n_total:
            raise ContractError("measured operators act on the wrong number of qubits")
        return measured.matrix
    if isinstance(measured, MeasurementPattern):
        return embed_measurements(state, measured)
    rows = np.atleast_2d(np.asarray(measured, dtype=np.uint8))
    if rows.size and rows.shape[1] != 2 * state.n_total:
        raise ContractError("measured operators act on the wrong number of qubits")
    return rows.reshape(-1, 2 * state.n_total)


def apply_measurements(state: StabilizerState, measured) -> StabilizerState:
    """Unsigned stabilizer update ``S' = <S ∩ C(M), M>``.

    ``measured`` may be a :class:`GeneratorSet` on ``n_total`` qubits, a
    system-only :class:`MeasurementPattern`, or a matrix of rows.
    """
    M = _measured_rows(state, measured)
    if M.shape[0] == 0:
        return state
    if symplectic_product(M, M).any():
        raise ContractError("measured operators must mutually commute")
    kept = centralizer_matrix(state.group, M)
    group = independent_matrix(np.vstack([kept, M]))
    return StabilizerState(state.n_total, group, state.regions)


def apply_sequentially(state: StabilizerState, measured) -> StabilizerState:
    """Measurement update applied one measured operator at a time."""
    for row in _measured_rows(state, measured):
        state = apply_measurements(state, row[None, :])
    return state


def dephase(state: StabilizerState, measured) -> StabilizerState:
    """Outcome-averaged state after measuring ``measured``: group ``S ∩ C(M)``.

    Averaging over outcomes randomises the signs of the measured operators,
    so they drop out of the stabilizer group; this is the state a party
    who never learns the outcomes holds.
    """
    M = _measured_rows(state, measured)
    if M.shape[0] == 0:
        return state
    kept = independent_matrix(centralizer_matrix(state.group, M))
    return StabilizerState(state.n_total, kept, state.regions)


def _as_region(state: StabilizerState, region) -> np.ndarray:
    if isinstance(region, str):
        return state.region(region)
    if isinstance(region, (list, tuple)) and region and all(isinstance(r, str) for r in region):
        return np.concatenate([state.region(r) for r in region])
    qs = np.asarray(sorted(set(int(q) for q in region)), dtype=np.intp)
    if qs.size and (qs.min() < 0 or qs.max() >= state.n_total):
        raise ContractError("region contains qubits outside the state")
    return qs


def supported_rank(state: StabilizerState, region) -> int:
    """Number of independent group elements supported entirely inside ``region``."""
    qs = _as_region(state, region)
    if state.rank == 0:
        return 0
    mask = np.ones(state.n_total, dtype=bool)
    mask[qs] = False
    comp = np.flatnonzero(mask)
    if comp.size == 0:
        return state.rank
    cols = np.concatenate([comp, comp + state.n_total])
    return state.rank - gf2.rank(state.group[:, cols])


def region_entropy(state: StabilizerState, region) -> int:
    """Entropy in bits: ``|region| - log2 |group ∩ P_region|``."""
    qs = _as_region(state, region)
    return int(qs.size - supported_rank(state, qs))


def mutual_information(state: StabilizerState, a, b) -> int:
    qa = _as_region(state, a)
    qb = _as_region(state, b)
    if np.intersect1d(qa, qb).size:
        raise ContractError("regions overlap")
    both = np.concatenate([qa, qb])
    return region_entropy(state, qa) + region_entropy(state, qb) - region_entropy(state, both)


def subsystem_preserved(state: StabilizerState) -> bool:
    """Every element supported on R_gauge ∪ R_bare acts trivially on R_bare."""
    rg = state.region("R_gauge")
    rb = state.region("R_bare")
    if state.rank == 0:
        return True
    n = state.n_total
    ref = np.concatenate([rg, rb])
    mask = np.ones(n, dtype=bool)
    mask[ref] = False
    comp = np.flatnonzero(mask)
    outside = state.group[:, np.concatenate([comp, comp + n])]
    coeffs = gf2.nullspace_basis(outside.T)
    if coeffs.shape[0] == 0:
        return True
    inside = gf2.matmul(coeffs, state.group)
    return not inside[:, np.concatenate([rb, rb + n])].any()


@dataclass(frozen=True)
class ChoiVerdict:
    preserved: bool
    mutual_info: int
    classical_remnant: bool


def choi_verdict(code: CodeSpec, pattern) -> ChoiVerdict:
    """Preservation decided on the Choi state after the measurement update.

    For stabilizer codes the criterion is ``I(A, R) = 2k`` on the updated
    pure state; for subsystem codes it is :func:`subsystem_preserved`.
    ``mutual_info`` is always reported on the outcome-averaged state, where
    a partially destroyed code keeps ``2k - r`` bits for ``r`` measured
    logical classes (``classical_remnant`` flags ``0 < I < 2k``).
    """
    codes = _pattern_codes(code, pattern)
    if code.is_subsystem:
        state = build_choi_subsystem(code)
        post = apply_measurements(state, MeasurementPattern(codes))
        ok = subsystem_preserved(post)
        info = mutual_information(dephase(state, MeasurementPattern(codes)), "A", "R_bare")
    else:
        state = build_choi(code)
        post = apply_measurements(state, MeasurementPattern(codes))
        ok = mutual_information(post, "A", "R") == 2 * code.k
        info = mutual_information(dephase(state, MeasurementPattern(codes)), "A", "R")
    return ChoiVerdict(ok, info, 0 < info < 2 * code.k)


def single_qubit_state(paulis: Sequence[str]) -> StabilizerState:
    """Product state stabilized by the given single-qubit Paulis."""
    ops = [PauliOp.from_string(p) for p in paulis]
    n = ops[0].n
    return StabilizerState(n, np.array([o.symplectic() for o in ops], dtype=np.uint8))


def region_qubits(state: StabilizerState, labels: Iterable[str]) -> list[int]:
    return sorted(int(q) for lab in labels for q in state.region(lab))
