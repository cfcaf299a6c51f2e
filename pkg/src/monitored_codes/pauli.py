"""Signless Pauli operators in the symplectic (x | z) representation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import gf2

ROLES = ("stabilizer", "gauge", "measured", "logical-basis", "generic")

_CHAR_TO_XZ = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_XZ_TO_CHAR = {v: k for k, v in _CHAR_TO_XZ.items()}


class PauliOp:
    """An n-qubit Pauli operator with its phase discarded.

    ``x[i]``/``z[i]`` flag an X/Z factor on qubit ``i`` (0-based); Y is
    ``x = z = 1``.
    """

    __slots__ = ("x", "z")

    def __init__(self, x, z):
        x = np.array(x, dtype=np.uint8).ravel() & 1
        z = np.array(z, dtype=np.uint8).ravel() & 1
        if x.shape != z.shape:
            raise ValueError("x and z parts must have equal length")
        x.setflags(write=False)
        z.setflags(write=False)
        self.x = x
        self.z = z

    @property
    def n(self) -> int:
        return self.x.size

    @classmethod
    def identity(cls, n: int) -> "PauliOp":
        return cls(np.zeros(n, np.uint8), np.zeros(n, np.uint8))

    @classmethod
    def from_string(cls, s: str) -> "PauliOp":
        try:
            pairs = [_CHAR_TO_XZ[ch] for ch in s.upper()]
        except KeyError as exc:
            raise ValueError(f"invalid Pauli character {exc.args[0]!r} in {s!r}") from None
        if not pairs:
            return cls.identity(0)
        x, z = zip(*pairs)
        return cls(x, z)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str) -> "PauliOp":
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        x[qubit], z[qubit] = _CHAR_TO_XZ[kind]
        return cls(x, z)

    @classmethod
    def from_support(cls, n: int, qubits: Iterable[int], kind: str) -> "PauliOp":
        """Tensor product of ``kind`` on every listed qubit."""
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        bx, bz = _CHAR_TO_XZ[kind]
        for q in qubits:
            x[q] ^= bx
            z[q] ^= bz
        return cls(x, z)

    @classmethod
    def from_symplectic(cls, v) -> "PauliOp":
        v = np.asarray(v, dtype=np.uint8).ravel()
        n = v.size // 2
        return cls(v[:n], v[n:])

    def symplectic(self) -> np.ndarray:
        return np.concatenate([self.x, self.z])

    def to_string(self) -> str:
        return "".join(_XZ_TO_CHAR[(int(a), int(b))] for a, b in zip(self.x, self.z))

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def support(self) -> list[int]:
        return np.flatnonzero(self.x | self.z).tolist()

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def __mul__(self, other: "PauliOp") -> "PauliOp":
        return multiply(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliOp):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z)

    def __hash__(self) -> int:
        return hash((self.x.tobytes(), self.z.tobytes()))

    def __repr__(self) -> str:
        return f"PauliOp({self.to_string()!r})"

    def __str__(self) -> str:
        return self.to_string()


def _check_same_n(a: PauliOp, b: PauliOp) -> None:
    if a.n != b.n:
        raise ValueError(f"qubit count mismatch: {a.n} vs {b.n}")


def commutes(a: PauliOp, b: PauliOp) -> bool:
    _check_same_n(a, b)
    return (int(a.x @ b.z) + int(a.z @ b.x)) % 2 == 0


def multiply(a: PauliOp, b: PauliOp) -> PauliOp:
    _check_same_n(a, b)
    return PauliOp(a.x ^ b.x, a.z ^ b.z)


def stack(ops: Sequence[PauliOp], n: int | None = None) -> np.ndarray:
    """Rows ``[x | z]`` for each operator; shape ``(len(ops), 2n)``."""
    if not ops:
        if n is None:
            raise ValueError("need n to stack an empty operator list")
        return np.zeros((0, 2 * n), dtype=np.uint8)
    n = ops[0].n if n is None else n
    for op in ops:
        if op.n != n:
            raise ValueError(f"qubit count mismatch: {op.n} vs {n}")
    return np.array([op.symplectic() for op in ops], dtype=np.uint8)


def unstack(rows: np.ndarray) -> list[PauliOp]:
    return [PauliOp.from_symplectic(r) for r in np.asarray(rows, dtype=np.uint8)]


def symplectic_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix of commutation bits: entry (i, j) is <a_i, b_j>."""
    a = np.atleast_2d(np.asarray(a, dtype=np.uint8))
    b = np.atleast_2d(np.asarray(b, dtype=np.uint8))
    n = a.shape[1] // 2
    swapped = np.concatenate([b[:, n:], b[:, :n]], axis=1)
    return gf2.matmul(a, swapped.T)


@dataclass(frozen=True)
class GeneratorSet:
    """An independent list of Pauli generators sharing a qubit count."""

    gens: tuple[PauliOp, ...]
    n: int
    role: str = "generic"
    _matrix: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        gens = tuple(self.gens)
        object.__setattr__(self, "gens", gens)
        m = stack(gens, self.n)
        m.setflags(write=False)
        object.__setattr__(self, "_matrix", m)
        if gens and gf2.rank(m) != len(gens):
            raise ValueError("generators are not independent")
        if self.role in ("stabilizer", "measured") and not self.is_abelian():
            raise ValueError(f"{self.role} generators must mutually commute")

    @classmethod
    def from_strings(cls, strings: Iterable[str], role: str = "generic", n: int | None = None):
        ops = [PauliOp.from_string(s) for s in strings]
        if n is None:
            if not ops:
                raise ValueError("need n for an empty generator list")
            n = ops[0].n
        return cls(tuple(ops), n, role)

    @classmethod
    def from_matrix(cls, rows: np.ndarray, n: int, role: str = "generic") -> "GeneratorSet":
        return cls(tuple(unstack(rows)), n, role)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    def __len__(self) -> int:
        return len(self.gens)

    def __iter__(self):
        return iter(self.gens)

    def __getitem__(self, i):
        return self.gens[i]

    def strings(self) -> list[str]:
        return [g.to_string() for g in self.gens]

    def is_abelian(self) -> bool:
        return not symplectic_product(self.matrix, self.matrix).any() if len(self) else True

    def is_independent(self) -> bool:
        return gf2.rank(self.matrix) == len(self) if len(self) else True

    def with_role(self, role: str) -> "GeneratorSet":
        return GeneratorSet(self.gens, self.n, role)


def independent_subset(ops: Sequence[PauliOp], n: int | None = None, role: str = "generic") -> GeneratorSet:
    """Greedy maximal independent sublist, preserving input order."""
    if isinstance(ops, GeneratorSet):
        n = ops.n
        ops = ops.gens
    ops = list(ops)
    if n is None:
        if not ops:
            raise ValueError("need n for an empty operator list")
        n = ops[0].n
    if not ops:
        return GeneratorSet((), n, role)
    keep = gf2.independent_rows(stack(ops, n))
    return GeneratorSet(tuple(ops[i] for i in keep), n, role)


def independent_matrix(rows: np.ndarray) -> np.ndarray:
    """Rows of a greedy maximal independent subset of ``rows``."""
    rows = np.asarray(rows, dtype=np.uint8)
    if rows.shape[0] == 0:
        return rows
    return rows[gf2.independent_rows(rows)]


def centralizer_matrix(group: np.ndarray, constraints: np.ndarray) -> np.ndarray:
    """Rows spanning {g in <group> : g commutes with every constraint row}."""
    group = np.asarray(group, dtype=np.uint8)
    if constraints.shape[0] == 0 or group.shape[0] == 0:
        return group
    # (i, j) entry: <constraint_i, group_j>; unknowns are group coefficients.
    comm = symplectic_product(constraints, group)
    coeffs = gf2.nullspace_basis(comm)
    if coeffs.shape[0] == 0:
        return np.zeros((0, group.shape[1]), dtype=np.uint8)
    return gf2.matmul(coeffs, group)


def centralizer_intersection(group: GeneratorSet, constraints: GeneratorSet) -> GeneratorSet:
    """Generators of the elements of ``<group>`` commuting with all constraints."""
    if group.n != constraints.n:
        raise ValueError(f"qubit count mismatch: {group.n} vs {constraints.n}")
    rows = centralizer_matrix(group.matrix, constraints.matrix)
    return GeneratorSet.from_matrix(rows, group.n, group.role)


def group_contains(group: GeneratorSet, p: PauliOp) -> bool:
    if group.n != p.n:
        raise ValueError(f"qubit count mismatch: {group.n} vs {p.n}")
    if p.is_identity():
        return True
    if len(group) == 0:
        return False
    return gf2.in_rowspace(group.matrix, p.symplectic())


def _sp(u: np.ndarray, v: np.ndarray) -> int:
    n = u.size // 2
    return (int(u[:n] @ v[n:]) + int(u[n:] @ v[:n])) & 1


def symplectic_pairs(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Symplectic Gram-Schmidt on the span of ``rows``.

    Returns ``(a, b, iso)`` with ``<a_i, b_j> = delta_ij``, all other pairs
    among ``a`` and ``b`` commuting, and ``iso`` spanning the part of the span
    that commutes with everything in it.
    """
    rows = np.asarray(rows, dtype=np.uint8)
    width = rows.shape[1]
    work = [r.astype(np.uint8) for r in independent_matrix(rows)]
    a, b, iso = [], [], []
    while work:
        v = work.pop(0)
        idx = next((i for i, w in enumerate(work) if _sp(v, w)), None)
        if idx is None:
            iso.append(v)
            continue
        w = work.pop(idx)
        work = [u ^ (_sp(u, w) * v) ^ (_sp(u, v) * w) for u in work]
        a.append(v)
        b.append(w)

    def _arr(lst):
        return np.array(lst, dtype=np.uint8).reshape(-1, width)

    return _arr(a), _arr(b), _arr(iso)
