"""Preservation of encoded information under single-qubit Pauli measurements.

The fast path never builds a Choi state.  For a pattern measuring qubits
``q_1..q_m`` with Paulis ``P_1..P_m`` it solves for the subsets of measured
Paulis whose product commutes with every stabilizer (the group M ∩ C(S)),
then pairs each solution with the stored logical basis.  A solution that
pairs trivially with every logical lies in S (in G for subsystem codes,
whose logicals are bare); anything else is a measured logical class.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import gf2
from .codes import CodeSpec
from .pauli import GeneratorSet, PauliOp, commutes

UNMEASURED, MX, MY, MZ = 0, 1, 2, 3
ALL_CLASSES = 4  # k = 1 subsystem code with both X̄ and Z̄ measured
_CHARS = ".XYZ"
_CODE_OF = {".": 0, "I": 0, "X": 1, "Y": 2, "Z": 3}
# x / z bits of the measured single-qubit Pauli, indexed by pattern code.
_PX = np.array([0, 1, 1, 0], dtype=np.uint8)
_PZ = np.array([0, 0, 1, 1], dtype=np.uint8)

# Reference Pauli (x, z) -> single-letter class for k = 1.
CLASS_NAMES = {(1, 0): "X", (1, 1): "Y", (0, 1): "Z"}


class ContractError(ValueError):
    """An operation was called outside its documented preconditions."""


class UnsupportedOperationError(RuntimeError):
    """The requested object does not exist for this input."""


@dataclass(frozen=True)
class ProbabilityVector:
    pX: float
    pY: float
    pZ: float

    def __post_init__(self):
        vals = (self.pX, self.pY, self.pZ)
        if any(not np.isfinite(v) or v < 0 for v in vals):
            raise ContractError(f"probabilities must be finite and >= 0, got {vals}")
        if sum(vals) > 1 + 1e-12:
            raise ContractError(f"p_m = {sum(vals)} exceeds 1")

    @property
    def p_m(self) -> float:
        return self.pX + self.pY + self.pZ

    @classmethod
    def along_ray(cls, ray: Sequence[float], p_m: float) -> "ProbabilityVector":
        ray = np.asarray(ray, dtype=float)
        total = ray.sum()
        if total <= 0 or (ray < 0).any():
            raise ContractError(f"invalid frequency ray {tuple(ray)}")
        ray = ray / total
        return cls(*(float(p_m * r) for r in ray))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.pX, self.pY, self.pZ)


class MeasurementPattern:
    """Per-qubit measurement basis: 0 unmeasured, 1 X, 2 Y, 3 Z."""

    __slots__ = ("codes",)

    def __init__(self, codes):
        codes = np.array(codes, dtype=np.uint8).ravel()
        if codes.size and codes.max() > 3:
            raise ContractError("pattern entries must be in 0..3")
        codes.setflags(write=False)
        self.codes = codes

    @property
    def n(self) -> int:
        return self.codes.size

    @classmethod
    def unmeasured(cls, n: int) -> "MeasurementPattern":
        return cls(np.zeros(n, np.uint8))

    @classmethod
    def uniform(cls, n: int, basis: str) -> "MeasurementPattern":
        return cls(np.full(n, _CODE_OF[basis], np.uint8))

    @classmethod
    def from_string(cls, s: str) -> "MeasurementPattern":
        try:
            return cls([_CODE_OF[ch] for ch in s.upper()])
        except KeyError as exc:
            raise ValueError(f"invalid pattern character {exc.args[0]!r}") from None

    @classmethod
    def from_dict(cls, n: int, assignment: dict[int, str]) -> "MeasurementPattern":
        codes = np.zeros(n, np.uint8)
        for q, b in assignment.items():
            codes[q] = _CODE_OF[b]
        return cls(codes)

    def to_string(self) -> str:
        return "".join(_CHARS[c] for c in self.codes)

    def measured(self) -> np.ndarray:
        return np.flatnonzero(self.codes)

    def measured_ops(self) -> GeneratorSet:
        qs = self.measured()
        ops = tuple(PauliOp.single(self.n, int(q), _CHARS[self.codes[q]]) for q in qs)
        return GeneratorSet(ops, self.n, "measured")

    def with_measurement(self, qubit: int, basis: str) -> "MeasurementPattern":
        codes = self.codes.copy()
        codes[qubit] = _CODE_OF[basis]
        return MeasurementPattern(codes)

    def __eq__(self, other) -> bool:
        return isinstance(other, MeasurementPattern) and np.array_equal(self.codes, other.codes)

    def __hash__(self) -> int:
        return hash(self.codes.tobytes())

    def __repr__(self) -> str:
        return f"MeasurementPattern({self.to_string()!r})"


@dataclass(frozen=True)
class Verdict:
    preserved: bool
    measured_logicals: GeneratorSet
    mutual_info: int

    @property
    def k(self) -> int:
        return self.measured_logicals.n

    def logical_class(self) -> str | None:
        """For k = 1: ``None`` when preserved, else ``"X"``, ``"Y"``, ``"Z"``, or ``"all"``."""
        if self.k != 1:
            raise ContractError("logical_class() is defined for k = 1 only")
        if self.preserved:
            return None
        if len(self.measured_logicals) > 1:
            return "all"
        op = self.measured_logicals[0]
        return CLASS_NAMES[(int(op.x[0]), int(op.z[0]))]


# ------------------------------------------------------------------ sampling

def rng_for(seed: int, key) -> np.random.Generator:
    """Counter-style stream: identical for a given (seed, key) on any thread."""
    if isinstance(key, (int, np.integer)):
        key = (int(key),)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def sample_codes(n: int, p: ProbabilityVector, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(n)
    edges = np.array([p.pX, p.pX + p.pY, p.p_m])
    codes = np.searchsorted(edges, u, side="right").astype(np.uint8) + 1
    codes[codes == 4] = 0
    return codes


def sample_pattern(n: int, p: ProbabilityVector, seed: int, index=0) -> MeasurementPattern:
    """Each qubit independently unmeasured / X / Y / Z with (1-p_m, pX, pY, pZ)."""
    if not isinstance(p, ProbabilityVector):
        p = ProbabilityVector(*p)
    return MeasurementPattern(sample_codes(n, p, rng_for(seed, index)))


# ------------------------------------------------------------------ fast core

def _pattern_codes(code: CodeSpec, pattern) -> np.ndarray:
    codes = pattern.codes if isinstance(pattern, MeasurementPattern) else np.asarray(pattern, np.uint8)
    if codes.size != code.n:
        raise ContractError(f"pattern has {codes.size} qubits, code has {code.n}")
    return codes


def _kernel_and_pairing(code: CodeSpec, qubits, px, pz):
    """Basis of M ∩ C(S) (as subsets of measured ops) and the logical pairings.

    Column ``j`` of the commutation matrix is the syndrome of the ``j``-th
    measured single-qubit Pauli.  Returns ``(kernel, pairing)`` where
    ``pairing[l, j] = <L_l, P_j>`` over the rows of ``code.logical_matrix``.
    """
    n = code.n
    A = (code.stab_x[:, qubits] & pz) ^ (code.stab_z[:, qubits] & px)
    kernel = gf2.nullspace_basis(A) if A.shape[0] else np.eye(len(qubits), dtype=np.uint8)
    Lm = code.logical_matrix
    pairing = (Lm[:, :n][:, qubits] & pz) ^ (Lm[:, n:][:, qubits] & px)
    return kernel, pairing


_TABLES: dict[str, np.ndarray] = {}


def _measurement_table(code: CodeSpec) -> np.ndarray:
    """Packed rows ``[syndrome | logical pairing]`` for every (qubit, Pauli).

    Entry ``[q, c]`` describes the single-qubit Pauli with pattern code ``c``
    on qubit ``q``: its commutation with each stabilizer, then with each row
    of ``code.logical_matrix``.  Built once per code.
    """
    table = _TABLES.get(code.fingerprint)
    if table is None:
        n = code.n
        S = np.concatenate([code.stab_x, code.stab_z], axis=1)
        H = np.concatenate([S, code.logical_matrix], axis=0)  # (m + 2k, 2n)
        dense = np.zeros((n, 4, H.shape[0]), dtype=np.uint8)
        for c in (MX, MY, MZ):
            # <h, P> for P with bits (px, pz) on qubit q is h_x[q] pz ^ h_z[q] px.
            dense[:, c] = ((H[:, :n] * _PZ[c]) ^ (H[:, n:] * _PX[c])).T
        table = gf2.pack_rows(dense.reshape(4 * n, -1)).reshape(n, 4, -1)
        _TABLES[code.fingerprint] = table
    return table


def _reference_image(code: CodeSpec, qubits: np.ndarray, bases: np.ndarray) -> np.ndarray:
    """Reference-qubit Paulis (rows ``[x | z]`` on k qubits) of M ∩ C(S) mod S.

    Row-reducing the measured Paulis' syndromes leaves, below the pivots, a
    basis of the products that commute with S; their logical pairings sit in
    the trailing columns.
    """
    k = code.k
    if len(qubits) == 0:
        return np.zeros((0, 2 * k), dtype=np.uint8)
    m = code.stab_x.shape[0]
    rows = _measurement_table(code)[qubits, bases]
    a, piv = gf2._eliminate(rows, m + 2 * k, limit=m, full=False)
    rest = a[len(piv):]
    cols = np.arange(m, m + 2 * k)
    img = ((rest[:, cols >> 6] >> (cols & 63).astype(np.uint64)) & np.uint64(1)).astype(np.uint8)
    # img columns: <c, X̄_j> then <c, Z̄_j>; x-part_j = <c, Z̄_j>, z-part_j = <c, X̄_j>
    ref = np.concatenate([img[:, k:], img[:, :k]], axis=1)
    return ref[ref.any(axis=1)]


def _split(codes: np.ndarray):
    qubits = np.flatnonzero(codes)
    return qubits, codes[qubits]


def measured_image(code: CodeSpec, pattern) -> np.ndarray:
    """Canonical (reduced echelon) reference-Pauli basis of the measured logical classes."""
    codes = _pattern_codes(code, pattern)
    ref = _reference_image(code, *_split(codes))
    return gf2.rref(ref)[0].to_dense() if ref.shape[0] else ref


def measured_centralizer_basis(code: CodeSpec, pattern) -> GeneratorSet:
    """Basis of M ∩ C(S) as physical Pauli operators."""
    codes = _pattern_codes(code, pattern)
    qubits = np.flatnonzero(codes)
    px, pz = _PX[codes[qubits]], _PZ[codes[qubits]]
    n = code.n
    if qubits.size == 0:
        return GeneratorSet((), n, "measured")
    kernel, _ = _kernel_and_pairing(code, qubits, px, pz)
    rows = np.zeros((kernel.shape[0], 2 * n), dtype=np.uint8)
    rows[:, qubits] = kernel & px
    rows[:, n + qubits] = kernel & pz
    return GeneratorSet.from_matrix(rows, n, "measured")


def preservation_verdict(code: CodeSpec, pattern) -> Verdict:
    """Preservation verdict from the measured-logical image (gauge-aware for subsystem codes)."""
    img = measured_image(code, pattern)
    r = img.shape[0]
    logicals = GeneratorSet.from_matrix(img, code.k, "logical-basis")
    return Verdict(r == 0, logicals, 2 * code.k - r)


def is_preserved(code: CodeSpec, codes: np.ndarray) -> bool:
    """Boolean-only fast path used by the Monte Carlo loops."""
    return _reference_image(code, *_split(np.asarray(codes, np.uint8))).shape[0] == 0


def class_bucket(code: CodeSpec, codes: np.ndarray) -> int:
    """For k = 1: 0 preserved, else pattern code 1/2/3 of the measured X̄/Ȳ/Z̄.

    Subsystem codes can lose both classes at once, reported as :data:`ALL_CLASSES`.
    """
    ref = _reference_image(code, *_split(np.asarray(codes, np.uint8)))
    if ref.shape[0] == 0:
        return 0
    rows = {(int(r[0]), int(r[1])) for r in ref}
    if len(rows) != 1:
        # Commuting dressed operators can carry anticommuting bare classes
        # when their gauge parts anticommute; stabilizer codes never do this.
        if not code.is_subsystem:
            raise AssertionError(f"inconsistent measured classes {rows}")
        return ALL_CLASSES
    x, z = rows.pop()
    return {(1, 0): MX, (1, 1): MY, (0, 1): MZ}[(x, z)]


# ------------------------------------------------------------------ erasure

def erasure_correctable(code: CodeSpec, subset: Iterable[int]) -> bool:
    """True iff no nontrivial (dressed) logical is supported inside ``subset``."""
    qs = np.array(sorted(set(int(q) for q in subset)), dtype=np.intp)
    if qs.size == 0:
        return True
    if qs.min() < 0 or qs.max() >= code.n:
        raise ContractError("subset contains qubits outside the code")
    # Both X and Z on every qubit span all Paulis supported on the subset.
    qubits = np.concatenate([qs, qs])
    bases = np.repeat(np.array([MX, MZ], dtype=np.uint8), qs.size)
    return _reference_image(code, qubits, bases).shape[0] == 0


# ------------------------------------------------------ commuting representative

def commuting_representative(code: CodeSpec, logical: PauliOp, pattern) -> PauliOp:
    """A representative of ``logical``'s class commuting with every measured Pauli.

    Solves ``<s, P_j> = <logical, P_j>`` for a product ``s`` of stabilizers
    (of gauge generators for subsystem codes) by Gaussian elimination.  The
    system is consistent exactly when the verdict is Preserved.
    """
    codes = _pattern_codes(code, pattern)
    if logical.n != code.n:
        raise ContractError("logical acts on the wrong number of qubits")
    group = code.gauge_gens if code.is_subsystem else code.stabilizers
    for g in group:
        if not commutes(g, logical):
            what = "a bare logical" if code.is_subsystem else "in the centralizer of S"
            raise ContractError(f"operator is not {what}")
    if not preservation_verdict(code, codes).preserved:
        raise UnsupportedOperationError("information is destroyed; no commuting representative exists")
    qubits = np.flatnonzero(codes)
    px, pz = _PX[codes[qubits]], _PZ[codes[qubits]]
    if qubits.size == 0:
        return logical
    G = group.matrix
    n = code.n
    A = (G[:, :n][:, qubits] & pz) ^ (G[:, n:][:, qubits] & px)
    t = (logical.x[qubits] & pz) ^ (logical.z[qubits] & px)
    alpha = gf2.solve(A.T, t)
    if alpha is None:  # unreachable when the verdict is correct
        raise UnsupportedOperationError("no commuting representative exists")
    s = gf2.matmul(alpha[None, :], G)[0]
    return PauliOp.from_symplectic(logical.symplectic() ^ s)


def logical_basis_ops(code: CodeSpec) -> list[PauliOp]:
    """X̄_j, Z̄_j and Ȳ_j = X̄_j Z̄_j for every logical qubit."""
    out = []
    for lx, lz in zip(code.logical_x, code.logical_z):
        out += [lx, lx * lz, lz]
    return out


def pattern_from_ops(n: int, ops: Sequence[PauliOp]) -> MeasurementPattern:
    """Inverse of :meth:`MeasurementPattern.measured_ops` for single-qubit ops."""
    codes = np.zeros(n, np.uint8)
    for op in ops:
        (q,) = op.support()
        codes[q] = _CODE_OF[op.to_string()[q]]
    return MeasurementPattern(codes)

