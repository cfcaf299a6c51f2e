"""Dense state-vector experiments with Haar-random codes and Haar-random measurements.

Qubit 0 is the most significant bit of an amplitude index.  A state on
system ``A ∪ B`` plus reference ``R`` stores the system qubits first.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from .choi import build_choi, build_choi_subsystem
from .codes import CodeSpec
from .monitor import ContractError, rng_for

MAX_QUBITS = 14


class ResampleSignal(RuntimeError):
    """A projection left (numerically) zero norm; draw a new sample."""


@dataclass(frozen=True, eq=False)
class DenseState:
    amplitudes: np.ndarray
    n_sys: int
    n_ref: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        if amps.size != 2 ** (self.n_sys + self.n_ref):
            raise ContractError("amplitude count does not match qubit counts")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_total(self) -> int:
        return self.n_sys + self.n_ref

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_total)


def haar_unitary(dim: int, rng: np.random.Generator, cols: int | None = None) -> np.ndarray:
    """Haar-random unitary (or its first ``cols`` columns) via phase-fixed QR."""
    cols = dim if cols is None else cols
    g = (rng.standard_normal((dim, cols)) + 1j * rng.standard_normal((dim, cols))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def sample_haar_code_state(k: int, n: int, rng: np.random.Generator) -> DenseState:
    """Choi state of a Haar-random encoding of k qubits into n.

    The encoder acts on ``|0...0> ⊗ (k EPR halves)``, so only the first
    ``2^k`` columns of the Haar unitary matter; those form a Haar isometry.
    """
    if not 0 <= k < n:
        raise ContractError(f"need 0 <= k < n, got k={k}, n={n}")
    if n + k > MAX_QUBITS:
        raise ContractError(f"n + k = {n + k} exceeds the dense limit of {MAX_QUBITS} qubits")
    dR = 2**k
    V = haar_unitary(2**n, rng, dR)
    return DenseState((V / np.sqrt(dR)).ravel(), n, k)


def reduced_purity(state: DenseState, keep: Iterable[int]) -> float:
    """Tr(σ²) of the reduced state on the listed qubits."""
    keep = sorted(set(keep))
    rest = [q for q in range(state.n_total) if q not in keep]
    t = state.tensor().transpose(keep + rest).reshape(2 ** len(keep), -1)
    rho = t @ t.conj().T
    return float(np.real(np.vdot(rho, rho)))


def _reference_matrix(state: DenseState, measured, vec) -> np.ndarray:
    """Unnormalised ``<vec|_measured |Ψ>`` as a (rest-of-system, reference) matrix."""
    measured = list(measured)
    if any(q < 0 or q >= state.n_sys for q in measured):
        raise ContractError("measured qubits must lie in the system")
    rest = [q for q in range(state.n_sys) if q not in measured]
    refs = list(range(state.n_sys, state.n_total))
    t = state.tensor().transpose(measured + rest + refs)
    t = t.reshape(2 ** len(measured), 2 ** len(rest), 2**state.n_ref)
    return np.tensordot(vec.conj(), t, axes=(0, 0))


def project_and_purity(state: DenseState, measured, basis: str = "computational", rng=None) -> float:
    """Reference purity Tr(ρ̃_R²) after projecting ``measured`` onto one outcome.

    ``basis="computational"`` projects onto ``|0...0>``; ``"haar"`` onto a
    fresh Haar-random state of the measured qubits.
    """
    measured = sorted(set(measured))
    dim = 2 ** len(measured)
    if basis == "computational":
        vec = np.zeros(dim, dtype=np.complex128)
        vec[0] = 1.0
    elif basis == "haar":
        if rng is None:
            raise ContractError("haar basis needs an rng")
        vec = haar_state(dim, rng)
    else:
        raise ContractError(f"unknown basis {basis!r}")
    M = _reference_matrix(state, measured, vec)
    rho = M.T @ M.conj()  # ρ_R, unnormalised
    tr = float(np.real(np.trace(rho)))
    if tr < 1e-14:
        raise ResampleSignal("post-measurement norm vanished")
    return float(np.real(np.vdot(rho, rho))) / tr**2


def expected_purity_terms(dA: float, dB: float, dR: float) -> tuple[float, float]:
    """Haar averages E Tr(ρ_R²) and E (Tr ρ_R)² for a computational-basis projection."""
    dAB = dA * dB
    num = ((dR**2 * dB + dR * dB**2) / (dAB**2 - 1) - (dR**2 * dB**2 + dR * dB) / (dAB * (dAB**2 - 1))) / dR**2
    den = ((dR**2 * dB**2 + dR * dB) / (dAB**2 - 1) - (dR * dB**2 + dR**2 * dB) / (dAB * (dAB**2 - 1))) / dR**2
    return num, den


def predicted_purity_exact(dA: float, dB: float, dR: float) -> float:
    """Ratio of the two Haar-averaged expressions."""
    if min(dA, dB, dR) < 1:
        raise ContractError("dimensions must be >= 1")
    if dR == 1:
        return 1.0
    num, den = expected_purity_terms(dA, dB, dR)
    return num / den


def predicted_purity_approx(dB: float, dR: float) -> float:
    return (dR + dB) / (dR * dB + 1)


@dataclass
class PurityStats:
    dA: int
    dB: int
    dR: int
    samples: int
    mean: float
    std: float
    predicted: float
    bound: float | None = None
    distance_mean: float | None = None
    distance_std: float | None = None

    @property
    def stderr(self) -> float:
        return self.std / np.sqrt(self.samples)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=False)


def _stats(values: np.ndarray, dA: int, dB: int, dR: int, predicted: float, bound) -> PurityStats:
    std = float(values.std(ddof=1)) if values.size > 1 else 0.0
    dist = values - 1.0 / dR
    dstd = float(dist.std(ddof=1)) if values.size > 1 else 0.0
    return PurityStats(dA, dB, dR, int(values.size), float(values.mean()), std, predicted, bound,
                       float(dist.mean()), dstd)


def _run_samples(fn, samples: int, threads: int) -> np.ndarray:
    if threads <= 1:
        return np.array([fn(i) for i in range(samples)])
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.array(list(pool.map(fn, range(samples))))


def haar_code_purity(k: int, n: int, m: int, samples: int, seed: int = 0, threads: int = 1) -> PurityStats:
    """Haar-random code, computational-basis measurement of the first ``m`` qubits."""
    if not 0 <= m <= n:
        raise ContractError("need 0 <= m <= n")

    def one(i: int) -> float:
        attempt = 0
        while True:
            rng = rng_for(seed, (i, attempt))
            st = sample_haar_code_state(k, n, rng)
            try:
                return project_and_purity(st, range(m))
            except ResampleSignal:
                attempt += 1

    vals = _run_samples(one, samples, threads)
    dA, dB, dR = 2**m, 2 ** (n - m), 2**k
    return _stats(vals, dA, dB, dR, predicted_purity_exact(dA, dB, dR), None)


# --------------------------------------------------------- dense code states

def _apply_pauli(psi: np.ndarray, row: np.ndarray, N: int) -> np.ndarray:
    """Hermitian Pauli ``i^{x·z} X^x Z^z`` from an ``[x | z]`` row."""
    bits = 1 << np.arange(N - 1, -1, -1)
    xmask = int(bits @ row[:N])
    zmask = int(bits @ row[N:])
    idx = np.arange(psi.size)
    parity = np.zeros(psi.size, dtype=np.int64)
    t = idx & zmask
    while t.any():
        parity ^= t & 1
        t >>= 1
    phase = (1j) ** int(row[:N] @ row[N:])
    out = np.empty_like(psi)
    out[idx ^ xmask] = psi * np.where(parity, -1.0, 1.0)
    return phase * out


def stabilizer_state_vector(group: np.ndarray, N: int, seed: int = 0) -> np.ndarray:
    """A state vector stabilized (with some sign choice) by ``N`` independent rows."""
    rng = np.random.default_rng(seed)
    psi = rng.standard_normal(2**N) + 1j * rng.standard_normal(2**N)
    for row in group:
        psi = 0.5 * (psi + _apply_pauli(psi, row, N))
    nrm = np.linalg.norm(psi)
    if nrm < 1e-8:
        raise RuntimeError("projection onto the stabilizer state failed")
    return psi / nrm


def code_choi_dense(code: CodeSpec) -> DenseState:
    """Dense Choi state of a small code (signs fixed by a deterministic choice)."""
    state = build_choi_subsystem(code) if code.is_subsystem else build_choi(code)
    N = state.n_total
    if N > MAX_QUBITS:
        raise ContractError(f"{N} qubits exceed the dense limit of {MAX_QUBITS}")
    psi = stabilizer_state_vector(state.group, N)
    return DenseState(psi, code.n, N - code.n)


def haar_measure_code(code: CodeSpec, measured, samples: int, seed: int = 0, threads: int = 1) -> PurityStats:
    """Project ``measured`` system qubits of the code's Choi state onto Haar states.

    The reference is the bare logical reference for subsystem codes, with
    gauge references traced out.  Reports the sample purity, the predicted
    value (1/dR + Tr σ_B²) / (1 + Tr σ_A²), and the bound 1/dR + Tr σ_B².
    """
    measured = sorted(set(int(q) for q in measured))
    dense = code_choi_dense(code)
    n = code.n
    B = [q for q in range(n) if q not in measured]
    dR = 2**code.k
    # Gauge references (subsystem codes) are counted with B.
    ref_start = n + code.g
    refs = list(range(ref_start, dense.n_total))
    sB = reduced_purity(dense, B + list(range(n, ref_start))) if (B or ref_start > n) else 1.0
    sA = reduced_purity(dense, measured) if measured else 1.0
    predicted = (1.0 / dR + sB) / (1.0 + sA)
    bound = 1.0 / dR + sB

    def one(i: int) -> float:
        attempt = 0
        while True:
            rng = rng_for(seed, (i, attempt))
            try:
                return _subsystem_purity(dense, measured, refs, rng)
            except ResampleSignal:
                attempt += 1

    vals = _run_samples(one, samples, threads)
    return _stats(vals, 2 ** len(measured), 2 ** len(B), dR, predicted, bound)


def _subsystem_purity(dense: DenseState, measured, refs, rng) -> float:
    vec = haar_state(2 ** len(measured), rng)
    N = dense.n_total
    others = [q for q in range(N) if q not in measured and q not in refs]
    t = dense.tensor().transpose(list(measured) + others + list(refs))
    t = t.reshape(2 ** len(measured), 2 ** len(others), 2 ** len(refs))
    M = np.tensordot(vec.conj(), t, axes=(0, 0))
    rho = M.T @ M.conj()
    tr = float(np.real(np.trace(rho)))
    if tr < 1e-14:
        raise ResampleSignal("post-measurement norm vanished")
    return float(np.real(np.vdot(rho, rho))) / tr**2
