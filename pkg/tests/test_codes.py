from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from monitored_codes import gf2
from monitored_codes.codes import (
    CodeSpec,
    InvalidParameterError,
    LatticeGeometry,
    bacon_shor,
    code_by_name,
    color_triangular,
    concatenate,
    five_qubit,
    reed_muller_15,
    steane,
    toric,
    toric_all_stabilizers,
    validate,
)
from monitored_codes.pauli import GeneratorSet, PauliOp, commutes, symplectic_product
from oracles import brute_force_distance, coset_min_weight, equivalent_up_to_relabeling

LIBRARY = [
    five_qubit(),
    steane(),
    reed_muller_15(),
    toric(2)[0],
    toric(3)[0],
    toric(6)[0],
    color_triangular(3)[0],
    color_triangular(5)[0],
    color_triangular(9)[0],
    bacon_shor(2),
    bacon_shor(3),
    bacon_shor(5),
]


@pytest.mark.parametrize("code", LIBRARY, ids=lambda c: c.name)
def test_library_validates(code):
    report = validate(code)
    assert report.ok, report
    assert code.stabilizers.is_independent()
    assert len(code.stabilizers) + code.k + code.g == code.n


@pytest.mark.parametrize("code", LIBRARY, ids=lambda c: c.name)
def test_logical_pairing_is_identity(code):
    k = code.k
    lx = np.array([p.symplectic() for p in code.logical_x])
    lz = np.array([p.symplectic() for p in code.logical_z])
    assert np.array_equal(symplectic_product(lx, lz), np.eye(k, dtype=np.uint8))


def test_five_qubit():
    c = five_qubit()
    assert c.k == 1 and c.n == 5
    assert brute_force_distance(c) == 3


def test_steane_distance_and_color_equivalence():
    assert brute_force_distance(steane()) == 3
    assert equivalent_up_to_relabeling(color_triangular(3)[0], steane())


def test_reed_muller_logical_weights():
    c = reed_muller_15()
    assert coset_min_weight(c, c.logical_z[0]) == 3
    assert coset_min_weight(c, c.logical_x[0]) == 7
    assert coset_min_weight(c, c.logical_x[0] * c.logical_z[0]) == 7


def test_toric_counts_and_relations():
    c, geo = toric(2)
    assert (c.n, len(c.stabilizers), c.k) == (8, 6, 2)
    assert len(geo.coords) == c.n
    for L in (2, 3, 5):
        stars, plaqs = toric_all_stabilizers(L)
        for group in (stars, plaqs):
            prod = PauliOp.identity(2 * L * L)
            for s in group:
                prod = prod * s
            assert prod.is_identity()


def test_color_counts():
    assert color_triangular(5)[0].n == 19
    for d in (3, 5, 7):
        assert color_triangular(d)[0].k == 1
    with pytest.raises(InvalidParameterError):
        color_triangular(4)
    with pytest.raises(InvalidParameterError):
        color_triangular(1)


def test_color_logical_weight_is_distance():
    c = color_triangular(5)[0]
    assert c.logical_x[0].weight == 5
    assert coset_min_weight(c, c.logical_z[0]) == 5


def test_bacon_shor_structure():
    c = bacon_shor(3)
    assert (c.n, c.k, c.g) == (9, 1, 4)
    assert all(commutes(c.logical_x[0], g) for g in c.gauge_gens)
    G = c.gauge_gens.matrix
    assert all(gf2.in_rowspace(G, s) for s in c.stabilizers.matrix)
    assert gf2.rank(G) > len(c.stabilizers)


@pytest.mark.parametrize("ctor", [toric, bacon_shor])
def test_small_sizes_rejected(ctor):
    with pytest.raises(InvalidParameterError):
        ctor(1)


def test_validate_reports_commutation():
    c = five_qubit()
    gens = list(c.stabilizers)
    gens[0] = PauliOp.from_string("XIIII")
    bad = dataclasses.replace(c, stabilizers=GeneratorSet(tuple(gens), 5, "generic"))
    assert validate(bad).failure == "commutation"


def test_validate_reports_bare_logical():
    c = bacon_shor(3)
    # A dressed operator: X on one column times an XX gauge generator.
    dressed = c.logical_x[0] * c.gauge_gens[0]
    bad = dataclasses.replace(c, logical_x=c.logical_z, logical_z=(dressed,))
    assert validate(bad).failure in ("bare-logical", "logical-pairing")
    bad2 = dataclasses.replace(c, logical_x=(dressed,))
    assert validate(bad2).failure == "bare-logical"


def test_geometry_rejects_duplicate_coordinates():
    with pytest.raises(InvalidParameterError):
        LatticeGeometry("square-torus", 2, {0: (0, 1), 1: (0, 1)})


def test_json_roundtrip():
    for code in (five_qubit(), bacon_shor(3)):
        back = CodeSpec.from_json(code.to_json())
        assert back.to_dict() == code.to_dict()
        assert validate(back).ok


def test_code_by_name():
    assert code_by_name("steane").n == 7
    assert code_by_name("toric", 3).n == 18
    with pytest.raises(InvalidParameterError):
        code_by_name("toric")
    with pytest.raises(InvalidParameterError):
        code_by_name("nonsense", 3)


def test_concatenated_five_qubit():
    c = concatenate(five_qubit(), five_qubit())
    assert c.n == 25 and c.k == 1
    assert validate(c).ok
