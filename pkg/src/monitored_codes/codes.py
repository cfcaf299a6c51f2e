"""Stabilizer and subsystem codes in a single representation.

Every code is a :class:`CodeSpec`: independent stabilizer generators, a
generating set for the gauge group (equal to the stabilizers for plain
stabilizer codes), and ``k`` pairs of bare logical operators.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from . import gf2
from .pauli import GeneratorSet, PauliOp, stack, symplectic_pairs, symplectic_product


class InvalidParameterError(ValueError):
    """A code constructor was given an unsupported size."""


@dataclass(frozen=True)
class LatticeGeometry:
    kind: str  # "square-torus" | "triangular-color" | "grid"
    L: int
    coords: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(set(self.coords.values())) != len(self.coords):
            raise InvalidParameterError("qubit coordinates must be unique")


@dataclass(frozen=True, eq=False)
class CodeSpec:
    name: str
    n: int
    k: int
    g: int
    stabilizers: GeneratorSet
    gauge_gens: GeneratorSet
    logical_x: tuple[PauliOp, ...]
    logical_z: tuple[PauliOp, ...]

    @property
    def is_subsystem(self) -> bool:
        return self.g > 0

    # Cached dense views used by the hot paths.

    @cached_property
    def stab_x(self) -> np.ndarray:
        return np.ascontiguousarray(self.stabilizers.matrix[:, : self.n])

    @cached_property
    def stab_z(self) -> np.ndarray:
        return np.ascontiguousarray(self.stabilizers.matrix[:, self.n :])

    @cached_property
    def logical_matrix(self) -> np.ndarray:
        """Rows X̄_1..X̄_k then Z̄_1..Z̄_k."""
        return stack(list(self.logical_x) + list(self.logical_z), self.n)

    @cached_property
    def gauge_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """``g`` conjugate pairs of gauge-qubit operators inside the gauge group."""
        if self.g == 0:
            empty = np.zeros((0, 2 * self.n), dtype=np.uint8)
            return empty, empty
        a, b, _ = symplectic_pairs(self.gauge_gens.matrix)
        return a, b

    @cached_property
    def fingerprint(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "k": self.k,
            "g": self.g,
            "stabilizers": self.stabilizers.strings(),
            "gauge": self.gauge_gens.strings(),
            "logical_x": [p.to_string() for p in self.logical_x],
            "logical_z": [p.to_string() for p in self.logical_z],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "CodeSpec":
        n = int(d["n"])
        return cls(
            name=d["name"],
            n=n,
            k=int(d["k"]),
            g=int(d["g"]),
            stabilizers=GeneratorSet.from_strings(d["stabilizers"], "stabilizer", n),
            gauge_gens=GeneratorSet.from_strings(d["gauge"], "gauge", n),
            logical_x=tuple(PauliOp.from_string(s) for s in d["logical_x"]),
            logical_z=tuple(PauliOp.from_string(s) for s in d["logical_z"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "CodeSpec":
        return cls.from_dict(json.loads(text))

    def __repr__(self) -> str:
        return f"CodeSpec({self.name!r}, n={self.n}, k={self.k}, g={self.g})"


def _stabilizer_code(name, stabs, lx, lz) -> CodeSpec:
    stabs = [PauliOp.from_string(s) if isinstance(s, str) else s for s in stabs]
    lx = tuple(PauliOp.from_string(s) if isinstance(s, str) else s for s in lx)
    lz = tuple(PauliOp.from_string(s) if isinstance(s, str) else s for s in lz)
    n = stabs[0].n
    gs = GeneratorSet(tuple(stabs), n, "stabilizer")
    return CodeSpec(name, n, len(lx), 0, gs, gs.with_role("gauge"), lx, lz)


# ---------------------------------------------------------------- small codes

@lru_cache(maxsize=None)
def five_qubit() -> CodeSpec:
    return _stabilizer_code(
        "five_qubit",
        ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"],
        ["XXXXX"],
        ["ZZZZZ"],
    )


@lru_cache(maxsize=None)
def steane() -> CodeSpec:
    return _stabilizer_code(
        "steane",
        ["XXXXIII", "IXXIXXI", "IIXXIXX", "ZZZZIII", "IZZIZZI", "IIZZIZZ"],
        ["XXXXXXX"],
        ["ZZZZZZZ"],
    )


# Qubit q carries the 4-bit label q + 1 on the tetrahedron: corners, edge
# midpoints, face centres and the body centre.  X rows are the four body
# cells (label has bit i); Z rows are the six interior faces (bits i and j)
# followed by one outer face per cell (bit i set, bit i+1 mod 4 clear).
REED_MULLER_15_STABILIZERS = (
    "XIXIXIXIXIXIXIX",
    "IXXIIXXIIXXIIXX",
    "IIIXXXXIIIIXXXX",
    "IIIIIIIXXXXXXXX",
    "IIZIIIZIIIZIIIZ",
    "IIIIZIZIIIIIZIZ",
    "IIIIIIIIZIZIZIZ",
    "IIIIIZZIIIIIIZZ",
    "IIIIIIIIIZZIIZZ",
    "IIIIIIIIIIIZZZZ",
    "ZIIIZIIIZIIIZII",
    "IZZIIIIIIZZIIII",
    "IIIZZZZIIIIIIII",
    "IIIIIIIZIZIZIZI",
)


@lru_cache(maxsize=None)
def reed_muller_15() -> CodeSpec:
    return _stabilizer_code(
        "reed_muller_15", REED_MULLER_15_STABILIZERS, ["X" * 15], ["Z" * 15]
    )


# --------------------------------------------------------------- toric code

def toric_edge(L: int, i: int, j: int, vertical: bool) -> int:
    """Qubit index of the horizontal/vertical edge leaving vertex (i, j)."""
    return (L * L if vertical else 0) + (i % L) * L + (j % L)


@lru_cache(maxsize=None)
def toric(L: int) -> tuple[CodeSpec, LatticeGeometry]:
    """Toric code on an L x L periodic square lattice, one qubit per edge.

    Horizontal edge (i, j) joins vertices (i, j)-(i, j+1) and has index
    ``i*L + j``; vertical edge (i, j) joins (i, j)-(i+1, j) and has index
    ``L*L + i*L + j``.  One star and one plaquette are dropped to keep the
    generators independent.  Z̄1 runs along horizontal edges of row 0, Z̄2
    along vertical edges of column 0; X̄1 / X̄2 are the crossing dual loops.
    """
    if L < 2:
        raise InvalidParameterError(f"toric code needs L >= 2, got {L}")
    n = 2 * L * L
    h = lambda i, j: toric_edge(L, i, j, False)  # noqa: E731
    v = lambda i, j: toric_edge(L, i, j, True)  # noqa: E731
    stars, plaqs = [], []
    for i in range(L):
        for j in range(L):
            stars.append(PauliOp.from_support(n, [h(i, j), h(i, j - 1), v(i, j), v(i - 1, j)], "X"))
            plaqs.append(PauliOp.from_support(n, [h(i, j), h(i + 1, j), v(i, j), v(i, j + 1)], "Z"))
    stabs = stars[:-1] + plaqs[:-1]
    lx = (
        PauliOp.from_support(n, [h(i, 0) for i in range(L)], "X"),
        PauliOp.from_support(n, [v(0, j) for j in range(L)], "X"),
    )
    lz = (
        PauliOp.from_support(n, [h(0, j) for j in range(L)], "Z"),
        PauliOp.from_support(n, [v(i, 0) for i in range(L)], "Z"),
    )
    code = _stabilizer_code(f"toric_{L}", stabs, lx, lz)
    coords = {}
    for i in range(L):
        for j in range(L):
            coords[h(i, j)] = (2 * i, 2 * j + 1)
            coords[v(i, j)] = (2 * i + 1, 2 * j)
    return code, LatticeGeometry("square-torus", L, coords)


def toric_all_stabilizers(L: int) -> tuple[list[PauliOp], list[PauliOp]]:
    """All L² stars and L² plaquettes, including the two redundant ones."""
    n = 2 * L * L
    h = lambda i, j: toric_edge(L, i, j, False)  # noqa: E731
    v = lambda i, j: toric_edge(L, i, j, True)  # noqa: E731
    stars = [PauliOp.from_support(n, [h(i, j), h(i, j - 1), v(i, j), v(i - 1, j)], "X")
             for i in range(L) for j in range(L)]
    plaqs = [PauliOp.from_support(n, [h(i, j), h(i + 1, j), v(i, j), v(i, j + 1)], "Z")
             for i in range(L) for j in range(L)]
    return stars, plaqs


# ------------------------------------------------------- triangular color code

_TRI_NEIGHBOURS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1))


@lru_cache(maxsize=None)
def color_triangular(d: int) -> tuple[CodeSpec, LatticeGeometry]:
    """6.6.6 color code on a triangular patch of distance ``d``.

    Sites (r, c) with 0 <= c <= r <= 3(d-1)/2 of a triangular lattice; sites
    with (r + c) % 3 == 1 are hexagon centres (plaquettes), the rest are
    qubits.  Each plaquette carries an X and a Z generator on its neighbouring
    qubits.  The logical strings run along the c = 0 boundary (weight d).
    """
    if d < 3 or d % 2 == 0:
        raise InvalidParameterError(f"color code needs odd d >= 3, got {d}")
    top = 3 * (d - 1) // 2
    sites = [(r, c) for r in range(top + 1) for c in range(r + 1)]
    qubit_sites = [s for s in sites if (s[0] + s[1]) % 3 != 1]
    plaq_sites = [s for s in sites if (s[0] + s[1]) % 3 == 1]
    index = {s: i for i, s in enumerate(qubit_sites)}
    n = len(qubit_sites)
    supports = []
    for r, c in plaq_sites:
        nb = [(r + dr, c + dc) for dr, dc in _TRI_NEIGHBOURS]
        supports.append(sorted(index[s] for s in nb if s in index))
    stabs = [PauliOp.from_support(n, s, "X") for s in supports]
    stabs += [PauliOp.from_support(n, s, "Z") for s in supports]
    edge = [index[s] for s in qubit_sites if s[1] == 0]
    code = _stabilizer_code(
        f"color_{d}",
        stabs,
        [PauliOp.from_support(n, edge, "X")],
        [PauliOp.from_support(n, edge, "Z")],
    )
    coords = {i: s for s, i in index.items()}
    return code, LatticeGeometry("triangular-color", d, coords)


# --------------------------------------------------------------- Bacon-Shor

@lru_cache(maxsize=None)
def bacon_shor(L: int) -> CodeSpec:
    """Bacon-Shor subsystem code on an L x L grid; qubit (r, c) is ``r*L + c``.

    Gauge generators are XX on horizontal neighbours and ZZ on vertical
    neighbours.  Stabilizers are X on pairs of adjacent columns and Z on
    pairs of adjacent rows.  Bare X̄ is a full column of X, bare Z̄ a full
    row of Z.
    """
    if L < 2:
        raise InvalidParameterError(f"Bacon-Shor code needs L >= 2, got {L}")
    n = L * L
    q = lambda r, c: r * L + c  # noqa: E731
    gauge = [PauliOp.from_support(n, [q(r, c), q(r, c + 1)], "X") for r in range(L) for c in range(L - 1)]
    gauge += [PauliOp.from_support(n, [q(r, c), q(r + 1, c)], "Z") for r in range(L - 1) for c in range(L)]
    stabs = [PauliOp.from_support(n, [q(r, cc) for r in range(L) for cc in (c, c + 1)], "X") for c in range(L - 1)]
    stabs += [PauliOp.from_support(n, [q(rr, c) for rr in (r, r + 1) for c in range(L)], "Z") for r in range(L - 1)]
    lx = PauliOp.from_support(n, [q(r, 0) for r in range(L)], "X")
    lz = PauliOp.from_support(n, [q(0, c) for c in range(L)], "Z")
    return CodeSpec(
        f"bacon_shor_{L}",
        n,
        1,
        (L - 1) ** 2,
        GeneratorSet(tuple(stabs), n, "stabilizer"),
        GeneratorSet(tuple(gauge), n, "gauge"),
        (lx,),
        (lz,),
    )


# ---------------------------------------------------------- concatenation

def concatenate(outer: CodeSpec, inner: CodeSpec) -> CodeSpec:
    """Explicit two-level concatenation of two k=1 stabilizer codes.

    Only used as a cross-check for the concatenation flow; block ``b`` holds
    inner qubits ``b*inner.n ... (b+1)*inner.n - 1``.
    """
    if outer.k != 1 or inner.k != 1 or outer.g or inner.g:
        raise InvalidParameterError("concatenate() supports k=1 stabilizer codes only")
    n = outer.n * inner.n
    lx, lz = inner.logical_x[0], inner.logical_z[0]

    def lift(op: PauliOp) -> PauliOp:
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        for b in range(outer.n):
            sl = slice(b * inner.n, (b + 1) * inner.n)
            if op.x[b]:
                x[sl] ^= lx.x
                z[sl] ^= lx.z
            if op.z[b]:
                x[sl] ^= lz.x
                z[sl] ^= lz.z
        return PauliOp(x, z)

    def embed(op: PauliOp, b: int) -> PauliOp:
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        x[b * inner.n : (b + 1) * inner.n] = op.x
        z[b * inner.n : (b + 1) * inner.n] = op.z
        return PauliOp(x, z)

    stabs = [embed(s, b) for b in range(outer.n) for s in inner.stabilizers]
    stabs += [lift(s) for s in outer.stabilizers]
    return _stabilizer_code(
        f"{outer.name}*{inner.name}",
        stabs,
        [lift(outer.logical_x[0])],
        [lift(outer.logical_z[0])],
    )


# --------------------------------------------------------------- validation

@dataclass
class ValidationReport:
    ok: bool
    failure: str | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate(code: CodeSpec) -> ValidationReport:
    """Check every CodeSpec invariant; report the first one violated."""

    def fail(name, detail=""):
        return ValidationReport(False, name, detail)

    n, k, g = code.n, code.k, code.g
    S = code.stabilizers.matrix
    G = code.gauge_gens.matrix
    if len(code.logical_x) != k or len(code.logical_z) != k:
        return fail("logical-count", f"expected {k} logical pairs")
    if S.shape[0] != n - k - g:
        return fail("stabilizer-count", f"{S.shape[0]} generators, expected {n - k - g}")
    if S.shape[0] and gf2.rank(S) != S.shape[0]:
        return fail("stabilizer-independence")
    if S.shape[0] and symplectic_product(S, S).any():
        return fail("commutation", "stabilizer generators do not mutually commute")
    for s in S:
        if not gf2.in_rowspace(G, s):
            return fail("gauge-contains-stabilizers")
    rank_g = gf2.rank(G) if G.shape[0] else 0
    if rank_g != (n - k - g) + 2 * g:
        return fail("gauge-structure", f"gauge group rank {rank_g}, expected {n - k + g}")
    if G.shape[0] and symplectic_product(S, G).any():
        return fail("gauge-structure", "stabilizers are not central in the gauge group")
    Lm = code.logical_matrix
    if S.shape[0] and symplectic_product(Lm, S).any():
        return fail("logical-commutation", "a logical anticommutes with a stabilizer")
    if G.shape[0] and symplectic_product(Lm, G).any():
        return fail("bare-logical", "a logical anticommutes with a gauge generator")
    pairing = symplectic_product(Lm, Lm)
    expected = np.zeros((2 * k, 2 * k), dtype=np.uint8)
    expected[:k, k:] = np.eye(k, dtype=np.uint8)
    expected[k:, :k] = np.eye(k, dtype=np.uint8)
    if not np.array_equal(pairing, expected):
        return fail("logical-pairing", "X̄/Z̄ pairing matrix is not the identity")
    return ValidationReport(True)


def code_by_name(name: str, size: int | None = None) -> CodeSpec:
    """Look up a library code by name; ``size`` is L or d where needed."""
    fixed = {"five_qubit": five_qubit, "steane": steane, "reed_muller_15": reed_muller_15}
    if name in fixed:
        return fixed[name]()
    if size is None:
        raise InvalidParameterError(f"code {name!r} needs a size")
    if name == "toric":
        return toric(size)[0]
    if name == "color":
        return color_triangular(size)[0]
    if name == "bacon_shor":
        return bacon_shor(size)
    raise InvalidParameterError(f"unknown code {name!r}")
