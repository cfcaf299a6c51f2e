"""All-Y operators commuting with the toric code, and the pure-Y destruction bound.

Rotated-lattice bijection.  Edge qubits of :func:`codes.toric` get doubled
coordinates: horizontal edge (i, j) sits at (2i, 2j+1), vertical edge (i, j)
at (2i+1, 2j), both taken mod 2L.  Every qubit has r + c odd.  Turning the
picture by 45 degrees, the qubits become vertices of a lattice whose straight
lines are the diagonals

    u-line  r + c = u  (mod 2L),  u odd
    w-line  r - c = u  (mod 2L),  u odd

giving L lines of each family, 2L lines in total, each through 2L qubits.
A u-line and a w-line cross on exactly two qubits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import gf2
from .codes import toric
from .monitor import ContractError, MeasurementPattern, MY, preservation_verdict
from .pauli import GeneratorSet, PauliOp, independent_subset, symplectic_product


def rotated_index(L: int, r: int, c: int) -> int:
    """Qubit index of the doubled coordinate (r, c), r + c odd."""
    r %= 2 * L
    c %= 2 * L
    if (r + c) % 2 == 0:
        raise ContractError(f"({r}, {c}) is not a qubit site")
    if r % 2 == 0:
        return (r // 2) * L + ((c - 1) // 2) % L
    return L * L + (r // 2) * L + (c // 2) % L


def line_supports(L: int) -> list[list[int]]:
    """Qubit supports of the L u-lines followed by the L w-lines."""
    lines = []
    for sign in (+1, -1):
        for u in range(1, 2 * L, 2):
            lines.append(sorted(rotated_index(L, r, sign * (u - r)) for r in range(2 * L)))
    return lines


@dataclass(frozen=True)
class YCommutantBasis:
    L: int
    lines: tuple[PauliOp, ...]
    generators: GeneratorSet


def y_commutant_basis(L: int) -> YCommutantBasis:
    """The 2L line operators and an independent subset of them."""
    if L < 2:
        raise ContractError("L must be >= 2")
    code, _ = toric(L)
    n = code.n
    lines = tuple(PauliOp.from_support(n, s, "Y") for s in line_supports(L))
    comm = symplectic_product(code.stabilizers.matrix, np.array([l.symplectic() for l in lines]))
    if comm.any():
        raise AssertionError("a line operator anticommutes with a stabilizer")
    return YCommutantBasis(L, lines, independent_subset(lines, n, "generic"))


def y_commutant_full(L: int) -> np.ndarray:
    """Basis (rows over qubits) of every all-Y operator commuting with S.

    Solved independently of the line construction: an all-Y operator with
    support y commutes with a stabilizer s iff sum_q y_q (s.x_q + s.z_q) = 0.
    """
    code, _ = toric(L)
    A = code.stab_x ^ code.stab_z
    return gf2.nullspace_basis(A)


def y_support_rows(basis: YCommutantBasis) -> np.ndarray:
    return np.array([l.x for l in basis.lines], dtype=np.uint8)


def y_weight(L: int, a: int, b: int) -> int:
    """W(a, b) = (L - a) b + (L - b) a for a row and b column lines.

    On this lattice the true weight of such a product is 2 W(a, b), since
    each line carries 2L qubits and two lines cross twice.
    """
    if not (0 <= a <= L and 0 <= b <= L):
        raise ContractError(f"need 0 <= a, b <= L, got a={a}, b={b}, L={L}")
    return (L - a) * b + (L - b) * a


def y_destroy_upper_bound(L: int, pY: float, logical_only: bool = False) -> float:
    """Union bound sum_{a,b} C(L,a) C(L,b) pY^W(a,b), identity classes excluded.

    With ``logical_only`` only products in a nontrivial logical class are
    kept; every line is in the class Ȳ1Ȳ2, so those are the a + b odd terms.
    """
    if not 0.0 <= pY <= 1.0:
        raise ContractError(f"pY must lie in [0, 1], got {pY}")
    terms = []
    for a, b in product(range(L + 1), repeat=2):
        if (a, b) in ((0, 0), (L, L)):
            continue
        if logical_only and (a + b) % 2 == 0:
            continue
        terms.append(math.comb(L, a) * math.comb(L, b) * pY ** y_weight(L, a, b))
    return math.fsum(terms)


# --------------------------------------------------------------- taxonomy

_P2 = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def _two_qubit(s: str) -> tuple[int, int, int, int]:
    (x1, z1), (x2, z2) = _P2[s[0]], _P2[s[1]]
    return (x1, x2, z1, z2)


def _span(rows: list[tuple[int, ...]]) -> frozenset:
    out = {(0, 0, 0, 0)}
    for r in rows:
        out |= {tuple(a ^ b for a, b in zip(e, r)) for e in out}
    out.discard((0, 0, 0, 0))
    return frozenset(out)


# The ten measured sets seen on the torus: {P̄1, Q̄2} and {X̄1X̄2, Z̄1Z̄2}.
TAXONOMY = {f"{p}1,{q}2": _span([_two_qubit(p + "I"), _two_qubit("I" + q)]) for p in "XYZ" for q in "XYZ"}
TAXONOMY["X1X2,Z1Z2"] = _span([_two_qubit("XX"), _two_qubit("ZZ")])


def classify_measured(measured: GeneratorSet) -> str:
    """Label a measured logical subgroup on the two reference qubits.

    Returns ``"preserved"``, one of the ten :data:`TAXONOMY` keys, or
    ``"other:<generators>"`` for partial or unexpected subgroups.
    """
    if measured.n != 2:
        raise ContractError("toric taxonomy needs k = 2")
    if len(measured) == 0:
        return "preserved"
    group = _span([tuple(int(v) for v in g.symplectic()) for g in measured])
    for label, ref in TAXONOMY.items():
        if group == ref:
            return label
    return "other:" + ",".join(sorted(measured.strings()))


def renyi_bucket(label: str) -> str | None:
    """Which of X̄1, Ȳ1, Z̄1, X̄1X̄2 the label counts toward (base-4 entropy)."""
    if label == "X1X2,Z1Z2":
        return "X1X2"
    if label in TAXONOMY:
        return label[:2]
    return None


def y_classify_measured(L: int, pattern: MeasurementPattern) -> str:
    codes = pattern.codes
    if ((codes != 0) & (codes != MY)).any():
        raise ContractError("pattern must measure Y only")
    code, _ = toric(L)
    return classify_measured(preservation_verdict(code, pattern).measured_logicals)
