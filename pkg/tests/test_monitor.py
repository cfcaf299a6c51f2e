from __future__ import annotations

from itertools import combinations

import numpy as np
import pytest

from monitored_codes import gf2
from monitored_codes.codes import bacon_shor, five_qubit, steane, toric, toric_edge
from monitored_codes.choi import choi_verdict
from monitored_codes.monitor import (
    ALL_CLASSES,
    ContractError,
    MeasurementPattern,
    ProbabilityVector,
    UnsupportedOperationError,
    class_bucket,
    commuting_representative,
    erasure_correctable,
    is_preserved,
    logical_basis_ops,
    measured_centralizer_basis,
    pattern_from_ops,
    preservation_verdict,
    rng_for,
    sample_codes,
    sample_pattern,
)
from monitored_codes.pauli import PauliOp, commutes, symplectic_product
from oracles import exhaustive_commuting_rep, span

SMALL = [five_qubit(), steane(), toric(2)[0]]


def random_patterns(code, count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        p_m = rng.uniform(0.2, 1.0)
        yield MeasurementPattern(rng.choice(4, size=code.n, p=[1 - p_m] + [p_m / 3] * 3))


# ------------------------------------------------------------- sampling

def test_probability_vector_contract():
    with pytest.raises(ContractError):
        ProbabilityVector(-0.1, 0, 0)
    with pytest.raises(ContractError):
        ProbabilityVector(0.6, 0.6, 0)
    with pytest.raises(ContractError):
        ProbabilityVector(float("nan"), 0, 0)
    p = ProbabilityVector.along_ray((1, 1, 2), 0.8)
    assert p.as_tuple() == pytest.approx((0.2, 0.2, 0.4))


def test_sample_pattern_extremes():
    assert not sample_pattern(20, (0, 0, 0), seed=1).codes.any()
    assert (sample_pattern(20, (1, 0, 0), seed=1).codes == 1).all()
    assert (sample_pattern(20, (0, 0, 1), seed=1).codes == 3).all()


def test_sample_frequencies():
    n = 10**6
    codes = sample_codes(n, ProbabilityVector(1 / 3, 1 / 3, 1 / 3), rng_for(7, 0))
    sigma = np.sqrt(n * (1 / 3) * (2 / 3))
    for c in (1, 2, 3):
        assert abs((codes == c).sum() - n / 3) < 4 * sigma
    assert not (codes == 0).any()


def test_sampling_is_keyed():
    p = ProbabilityVector(0.2, 0.3, 0.1)
    a = sample_pattern(50, p, seed=3, index=(4, 5))
    assert a == sample_pattern(50, p, seed=3, index=(4, 5))
    assert a != sample_pattern(50, p, seed=3, index=(4, 6))


def test_pattern_string_roundtrip():
    p = MeasurementPattern.from_string(".XYZ.")
    assert p.to_string() == ".XYZ."
    assert list(p.measured()) == [1, 2, 3]
    assert pattern_from_ops(5, list(p.measured_ops())) == p
    assert p.with_measurement(0, "Z").to_string() == "ZXYZ."
    with pytest.raises(ValueError):
        MeasurementPattern.from_string("XQ")


# ------------------------------------------------------------- centralizer

def test_measured_centralizer_examples():
    c = five_qubit()
    assert len(measured_centralizer_basis(c, MeasurementPattern.unmeasured(5))) == 0
    basis = measured_centralizer_basis(c, MeasurementPattern.uniform(5, "Z"))
    assert basis.strings() == ["ZZZZZ"]
    assert len(measured_centralizer_basis(c, MeasurementPattern.from_string("X...."))) == 0


# ------------------------------------------------------------- verdicts

def test_verdict_examples():
    c = five_qubit()
    v = preservation_verdict(c, MeasurementPattern.uniform(5, "Z"))
    assert not v.preserved
    assert v.measured_logicals.strings() == ["Z"]
    assert v.mutual_info == 1
    assert v.logical_class() == "Z"
    for q in range(5):
        for b in "XYZ":
            pat = MeasurementPattern.unmeasured(5).with_measurement(q, b)
            assert preservation_verdict(c, pat).preserved

    t = toric(3)[0]
    v = preservation_verdict(t, MeasurementPattern.uniform(t.n, "Y"))
    assert sorted(v.measured_logicals.strings()) == ["IY", "YI"]
    assert v.mutual_info == 2


def test_empty_pattern_preserved():
    for c in SMALL + [bacon_shor(3)]:
        v = preservation_verdict(c, MeasurementPattern.unmeasured(c.n))
        assert v.preserved and v.mutual_info == 2 * c.k


def test_pattern_length_checked():
    with pytest.raises(ContractError):
        preservation_verdict(five_qubit(), MeasurementPattern.unmeasured(4))


@pytest.mark.parametrize("code", SMALL + [bacon_shor(3), toric(3)[0]], ids=lambda c: c.name)
def test_verdict_invariants(code):
    for pat in random_patterns(code, 200, seed=11):
        v = preservation_verdict(code, pat)
        assert v.preserved == (len(v.measured_logicals) == 0) == (v.mutual_info == 2 * code.k)
        assert v.mutual_info == 2 * code.k - len(v.measured_logicals)
        assert is_preserved(code, pat.codes) == v.preserved
        if code.is_subsystem:
            # Dressed measured operators may reveal anticommuting bare classes.
            if len(v.measured_logicals) == 2:
                assert class_bucket(code, pat.codes) == ALL_CLASSES
                assert v.logical_class() == "all"
            continue
        assert v.measured_logicals.is_abelian()
        if code.k == 1:
            assert len(v.measured_logicals) <= 1
            assert class_bucket(code, pat.codes) == (0 if v.preserved else "XYZ".index(v.logical_class()) + 1)


def test_subsystem_full_loss_agrees_with_choi():
    b = bacon_shor(3)
    pat = MeasurementPattern.from_string("XYYYYXZZX")
    v = preservation_verdict(b, pat)
    assert len(v.measured_logicals) == 2 and v.mutual_info == 0
    assert choi_verdict(b, pat).mutual_info == 0


@pytest.mark.parametrize("code", SMALL + [bacon_shor(3)], ids=lambda c: c.name)
def test_monotone_in_measured_set(code):
    rng = np.random.default_rng(5)
    for pat in random_patterns(code, 150, seed=12):
        if preservation_verdict(code, pat).preserved:
            continue
        free = np.flatnonzero(pat.codes == 0)
        if free.size == 0:
            continue
        bigger = pat.with_measurement(int(rng.choice(free)), "XYZ"[rng.integers(3)])
        assert not preservation_verdict(code, bigger).preserved


# ------------------------------------------------------------- erasure

def test_erasure_examples():
    c = five_qubit()
    assert erasure_correctable(c, [])
    for pair in combinations(range(5), 2):
        assert erasure_correctable(c, pair)
    for triple in combinations(range(5), 3):
        assert not erasure_correctable(c, triple)
    with pytest.raises(ContractError):
        erasure_correctable(c, [7])


@pytest.mark.parametrize("code", SMALL + [bacon_shor(3)], ids=lambda c: c.name)
def test_erasure_implies_preserved(code):
    for pat in random_patterns(code, 300, seed=13):
        if erasure_correctable(code, pat.measured()):
            assert preservation_verdict(code, pat).preserved


# ------------------------------------------------------------- representatives

def test_representative_examples():
    c = five_qubit()
    lx = c.logical_x[0]
    assert commuting_representative(c, lx, MeasurementPattern.unmeasured(5)) == lx
    pat = MeasurementPattern.from_string("Z....")
    rep = commuting_representative(c, lx, pat)
    assert rep.to_string()[0] in "IZ"
    assert gf2.in_rowspace(c.stabilizers.matrix, (rep * lx).symplectic())


def test_toric_deformed_loop():
    t = toric(3)[0]
    lz1 = t.logical_z[0]
    e = toric_edge(3, 0, 0, False)
    assert lz1.z[e] == 1
    pat = MeasurementPattern.unmeasured(t.n).with_measurement(e, "X")
    rep = commuting_representative(t, lz1, pat)
    assert rep.z[e] == 0 and rep.x[e] == 0
    assert not commutes(rep, t.logical_x[0])
    assert commutes(rep, t.logical_x[1])
    assert gf2.in_rowspace(t.stabilizers.matrix, (rep * lz1).symplectic())


def test_representative_errors():
    c = five_qubit()
    with pytest.raises(ContractError):
        commuting_representative(c, PauliOp.from_string("XIIII"), MeasurementPattern.unmeasured(5))
    with pytest.raises(UnsupportedOperationError):
        commuting_representative(c, c.logical_x[0], MeasurementPattern.uniform(5, "Z"))
    b = bacon_shor(3)
    dressed = b.logical_x[0] * b.gauge_gens[0]
    with pytest.raises(ContractError):
        commuting_representative(b, dressed, MeasurementPattern.unmeasured(9))


@pytest.mark.parametrize("code", SMALL, ids=lambda c: c.name)
def test_commuting_representative_equivalence_exhaustive(code):
    """Preserved iff every logical class has a commuting representative."""
    for pat in random_patterns(code, 150, seed=14):
        M = pat.measured_ops().matrix
        preserved = preservation_verdict(code, pat).preserved
        found = [exhaustive_commuting_rep(code, op, M) is not None for op in logical_basis_ops(code)]
        if preserved:
            assert all(found)
            for op in logical_basis_ops(code):
                rep = commuting_representative(code, op, pat)
                assert not symplectic_product(rep.symplectic(), M).any() if M.shape[0] else True
                assert gf2.in_rowspace(code.stabilizers.matrix, (rep * op).symplectic())
        else:
            assert not all(found)


def test_subsystem_representative_is_dressed():
    b = bacon_shor(3)
    G = b.gauge_gens.matrix
    hits = 0
    for pat in random_patterns(b, 200, seed=15):
        if not preservation_verdict(b, pat).preserved:
            continue
        M = pat.measured_ops().matrix
        for op in logical_basis_ops(b):
            rep = commuting_representative(b, op, pat)
            if M.shape[0]:
                assert not symplectic_product(rep.symplectic(), M).any()
            assert gf2.in_rowspace(G, (rep * op).symplectic())
            hits += 1
    assert hits > 0
