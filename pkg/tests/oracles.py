"""Brute-force references used to cross-check the fast routines on small codes."""
from __future__ import annotations

from itertools import permutations

import numpy as np

from monitored_codes import gf2
from monitored_codes.codes import CodeSpec
from monitored_codes.pauli import PauliOp, symplectic_product


def span(rows: np.ndarray) -> np.ndarray:
    """Every element of the GF(2) row span (2^r rows, r = number of input rows)."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.uint8))
    r = rows.shape[0]
    if r == 0:
        return np.zeros((1, rows.shape[1]), dtype=np.uint8)
    bits = ((np.arange(2**r)[:, None] >> np.arange(r)) & 1).astype(np.uint8)
    return gf2.matmul(bits, rows)


def weights(rows: np.ndarray, n: int) -> np.ndarray:
    return (rows[:, :n] | rows[:, n:]).sum(axis=1)


def all_paulis(n: int) -> np.ndarray:
    """All 4^n symplectic vectors on n qubits."""
    idx = np.arange(4**n)
    return ((idx[:, None] >> np.arange(2 * n)) & 1).astype(np.uint8)


def brute_force_distance(code: CodeSpec) -> int:
    """Minimum weight of a nontrivial logical, by enumerating all 4^n Paulis."""
    P = all_paulis(code.n)
    S = code.stabilizers.matrix
    cent = ~symplectic_product(P, S).any(axis=1)
    in_s = np.array([gf2.in_rowspace(S, p) for p in P[cent]])
    logical = P[cent][~in_s]
    return int(weights(logical, code.n).min())


def coset_min_weight(code: CodeSpec, op: PauliOp) -> int:
    """Minimum weight over the coset op·S."""
    coset = span(code.stabilizers.matrix) ^ op.symplectic()
    return int(weights(coset, code.n).min())


def exhaustive_commuting_rep(code: CodeSpec, logical: PauliOp, measured: np.ndarray) -> PauliOp | None:
    """Search every stabilizer multiple of ``logical`` for one commuting with ``measured``."""
    cands = span(code.stabilizers.matrix) ^ logical.symplectic()
    if measured.shape[0] == 0:
        return logical
    ok = ~symplectic_product(cands, measured).any(axis=1)
    if not ok.any():
        return None
    return PauliOp.from_symplectic(cands[np.argmax(ok)])


def same_group(a: np.ndarray, b: np.ndarray) -> bool:
    ra, rb = gf2.rank(a), gf2.rank(b)
    return ra == rb == gf2.rank(np.vstack([a, b]))


def permute_qubits(rows: np.ndarray, n: int, perm) -> np.ndarray:
    perm = list(perm)
    return np.concatenate([rows[:, :n][:, perm], rows[:, n:][:, perm]], axis=1)


def equivalent_up_to_relabeling(a: CodeSpec, b: CodeSpec) -> bool:
    """Stabilizer groups equal after some qubit permutation (n <= 8)."""
    if a.n != b.n or a.k != b.k:
        return False
    Sa, Sb = a.stabilizers.matrix, b.stabilizers.matrix
    # Prune with the weight enumerator before searching permutations.
    wa = np.sort(weights(span(Sa), a.n))
    wb = np.sort(weights(span(Sb), b.n))
    if not np.array_equal(wa, wb):
        return False
    return any(same_group(permute_qubits(Sa, a.n, p), Sb) for p in permutations(range(a.n)))
