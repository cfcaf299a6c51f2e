from __future__ import annotations

import numpy as np
import pytest

from monitored_codes import gf2
from monitored_codes.choi import (
    apply_measurements,
    apply_sequentially,
    build_choi,
    build_choi_subsystem,
    choi_verdict,
    dephase,
    mutual_information,
    region_entropy,
    single_qubit_state,
    subsystem_preserved,
)
from monitored_codes.codes import bacon_shor, five_qubit, steane, toric
from monitored_codes.monitor import ContractError, MeasurementPattern, preservation_verdict
from monitored_codes.pauli import GeneratorSet


def test_build_choi_counts():
    s = build_choi(five_qubit())
    assert (s.n_total, s.rank) == (6, 6) and s.is_pure
    assert mutual_information(s, "A", "R") == 2
    t = build_choi(toric(2)[0])
    assert (t.n_total, t.rank) == (10, 10)
    assert region_entropy(t, "R") == 2
    with pytest.raises(ContractError):
        build_choi(bacon_shor(3))
    with pytest.raises(ContractError):
        build_choi_subsystem(five_qubit())


def test_build_choi_subsystem_counts():
    s = build_choi_subsystem(bacon_shor(3))
    assert (s.n_total, s.rank) == (14, 14)
    assert mutual_information(s, "A", "R_bare") == 2
    assert mutual_information(s, "A", ["R_gauge", "R_bare"]) == 10


def test_entropy_examples():
    s = build_choi(five_qubit())
    assert region_entropy(s, range(6)) == 0
    assert region_entropy(s, "R") == 1
    prod = single_qubit_state(["ZI", "IZ"])
    assert mutual_information(prod, [0], [1]) == 0
    with pytest.raises(ContractError):
        mutual_information(s, [0, 1], [1, 2])
    with pytest.raises(ContractError):
        region_entropy(s, "R_gauge")


def test_measurement_examples():
    s = build_choi(five_qubit())
    assert apply_measurements(s, MeasurementPattern.unmeasured(5)).same_group(s)
    one = single_qubit_state(["Z"])
    post = apply_measurements(one, GeneratorSet.from_strings(["X"]))
    assert post.same_group(single_qubit_state(["X"]))
    with pytest.raises(ContractError):
        apply_measurements(one, np.array([[1, 0], [0, 1]], dtype=np.uint8))


def test_full_z_measurement_destroys():
    c = five_qubit()
    s = build_choi(c)
    post = apply_measurements(s, MeasurementPattern.uniform(5, "Z"))
    # The reference is left stabilized by Z_R alone: Z̄ was read out.
    zr = np.zeros(12, dtype=np.uint8)
    zr[6 + 5] = 1
    assert gf2.in_rowspace(post.group, zr)
    assert mutual_information(post, "A", "R") == 0
    # Averaged over outcomes one classical bit is left.
    assert mutual_information(dephase(s, MeasurementPattern.uniform(5, "Z")), "A", "R") == 1
    v = choi_verdict(c, MeasurementPattern.uniform(5, "Z"))
    assert not v.preserved and v.mutual_info == 1 and v.classical_remnant


def test_subsystem_examples():
    b = bacon_shor(3)
    s = build_choi_subsystem(b)
    assert subsystem_preserved(s)
    column = MeasurementPattern.from_dict(9, {0: "X", 3: "X", 6: "X"})
    assert not subsystem_preserved(apply_measurements(s, column))
    for q in range(9):
        for basis in "XYZ":
            pat = MeasurementPattern.unmeasured(9).with_measurement(q, basis)
            assert subsystem_preserved(apply_measurements(s, pat))
            assert preservation_verdict(b, pat).preserved


CODES = [five_qubit(), steane(), toric(2)[0], toric(3)[0], bacon_shor(2), bacon_shor(3)]


@pytest.mark.parametrize("code", CODES, ids=lambda c: c.name)
def test_update_properties(code):
    rng = np.random.default_rng(21)
    build = build_choi_subsystem if code.is_subsystem else build_choi
    s = build(code)
    for _ in range(40):
        p_m = rng.uniform(0.1, 1)
        pat = MeasurementPattern(rng.choice(4, size=code.n, p=[1 - p_m] + [p_m / 3] * 3))
        once = apply_measurements(s, pat)
        assert once.same_group(apply_sequentially(s, pat))
        assert apply_measurements(once, pat).same_group(once)
        assert once.is_pure
        # Entropy sanity on a random bipartition.
        cut = sorted(rng.choice(s.n_total, size=rng.integers(1, s.n_total), replace=False).tolist())
        rest = [q for q in range(s.n_total) if q not in cut]
        sa = region_entropy(once, cut)
        assert 0 <= sa <= len(cut)
        assert sa == region_entropy(once, rest)
        mixed = dephase(s, pat)
        sb = region_entropy(mixed, rest)
        assert region_entropy(mixed, cut) + sb >= region_entropy(mixed, range(s.n_total))


@pytest.mark.parametrize("code", CODES, ids=lambda c: c.name)
def test_choi_verdict_matches_fast_path(code):
    rng = np.random.default_rng(22)
    for _ in range(60):
        p_m = rng.uniform(0.1, 1)
        pat = MeasurementPattern(rng.choice(4, size=code.n, p=[1 - p_m] + [p_m / 3] * 3))
        fast = preservation_verdict(code, pat)
        slow = choi_verdict(code, pat)
        assert fast.preserved == slow.preserved
        assert fast.mutual_info == slow.mutual_info
