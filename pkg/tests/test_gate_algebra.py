"""Gate functionals, Haar constants and the Weingarten transfer block."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest

from moment_spectra import gate_algebra as ga
from moment_spectra.errors import InputError, InvariantError

Q = math.pi / 4


# ---------------------------------------------------------------- frozen oracles


def test_haar_reference_exact():
    assert ga.haar_reference(2).e_H == Fraction(3, 5)
    assert ga.haar_reference(3).e_H == Fraction(4, 5)
    assert ga.haar_reference(2).g_H == Fraction(1, 2)
    assert ga.e_haar(5) == pytest.approx(24 / 26)


@pytest.mark.parametrize(
    "params, e, g",
    [
        ((Q, 0, 0), 2 / 3, 1 / 3),  # CNOT class
        ((Q, Q, 0), 2 / 3, 2 / 3),  # iSWAP / DCNOT class
        ((Q, Q, Q), 0.0, 1.0),  # SWAP
        ((0, 0, 0), 0.0, 0.0),  # identity
    ],
)
def test_named_gate_profiles(params, e, g):
    prof = ga.entanglement_profile(ga.gate_from_canonical(ga.CanonicalParams(*params)))
    assert prof.e_u == pytest.approx(e, abs=1e-12)
    assert prof.g_u == pytest.approx(g, abs=1e-12)
    prof.check()


def test_swap_and_identity_gates():
    for d in (2, 3):
        sw = ga.entanglement_profile(ga.swap_gate(d))
        assert (sw.e_u, sw.g_u) == pytest.approx((0.0, 1.0), abs=1e-12)
        idp = ga.entanglement_profile(ga.identity_gate(d))
        assert (idp.e_u, idp.g_u) == pytest.approx((0.0, 0.0), abs=1e-12)


def test_cnot_residual_and_fsum():
    params = ga.CanonicalParams(Q, 0, 0)
    prof = ga.entanglement_profile(ga.gate_from_canonical(params))
    assert ga.solvable_residual(prof) == pytest.approx(-2 / 9, abs=1e-12)
    assert ga.qubit_solvable_residual(params) == pytest.approx(2 / 5, abs=1e-12)


def test_qubit_residual_ratio_is_constant(rng):
    # the trigonometric sum is a fixed multiple of g - e/(2 e_H) for qubits
    for params in ga.iter_canonical_gates(rng, 30):
        prof = ga.qubit_profile_closed_form(params)
        r = ga.solvable_residual(prof)
        f = ga.qubit_solvable_residual(params)
        assert f == pytest.approx(-9 / 5 * r, abs=1e-12)


def test_identity_residual_flagged_degenerate():
    prof = ga.entanglement_profile(ga.identity_gate(2))
    r, flag = ga.solvable_residual(prof, with_flag=True)
    assert r == 0.0 and flag


def test_closed_form_matches_contraction(rng):
    for params in ga.iter_canonical_gates(rng, 15):
        a = ga.entanglement_profile(ga.gate_from_canonical(params))
        b = ga.qubit_profile_closed_form(params)
        assert a.e_u == pytest.approx(b.e_u, abs=1e-12)
        assert a.g_u == pytest.approx(b.g_u, abs=1e-12)


def test_haar_average_of_random_gates(rng):
    es = [ga.entanglement_profile(ga.haar_random_gate(2, rng)).e_u for _ in range(400)]
    assert np.mean(es) == pytest.approx(0.6, abs=0.03)


# ---------------------------------------------------------------- Weingarten block


def test_transfer_block_structure():
    B = ga.transfer_block(0.1, -0.2, 0.05)
    np.testing.assert_allclose(B[0], [1, 0, 0, 0])
    np.testing.assert_allclose(B[3], [0, 0, 0, 1])
    np.testing.assert_allclose(B[1], [0.1, 0.8, 0.05, 0.1])
    np.testing.assert_allclose(B[2], [0.1, 0.05, 0.8, 0.1])


def test_haar_weights():
    a, b, c = ga.block_coefficients(0.6, 0.5, 2)
    assert (a, b, c) == pytest.approx((2 / 5, -1.0, 0.0), abs=1e-14)


def test_solvable_weights_at_cnot():
    a, b, c = ga.block_coefficients(2 / 3, 5 / 9, 2)
    assert (a, b, c) == pytest.approx((4 / 9, -10 / 9, 0.0), abs=1e-14)


@pytest.mark.parametrize("d", [2, 3])
def test_weingarten_from_gate_matches_profile(d, rng):
    for _ in range(3):
        u = ga.haar_random_gate(d, rng)
        np.testing.assert_allclose(
            ga.weingarten_matrix(u), ga.weingarten_matrix_from_profile(ga.entanglement_profile(u)), atol=1e-10
        )


def test_pauli_sector_biorthogonal():
    for d in (2, 3):
        B = ga.pauli_sector_basis(d)
        np.testing.assert_allclose(B.biorthogonality(), np.eye(2), atol=1e-12)
        np.testing.assert_allclose(B.gram(), [[d * d, d], [d, d * d]], atol=1e-12)


# ---------------------------------------------------------------- feasibility / validation


def test_feasibility_region():
    assert ga.is_feasible(0.6, 0.5, 2)
    assert not ga.is_feasible(0.7, 0.5, 2)  # above e_max for qubits
    assert not ga.is_feasible(1 / 3, 1 / 3 / 1.2, 2)  # 2g(1-g) > e
    assert ga.is_feasible(0.9, 0.5, 3)


def test_non_unitary_rejected():
    with pytest.raises(InvariantError):
        ga.TwoQuditGate(2, np.ones((4, 4)))
    with pytest.raises(InvariantError):
        ga.TwoQuditGate(2, np.eye(3))


def test_gate_json_roundtrip(tmp_path, rng):
    u = ga.haar_random_gate(2, rng)
    p = tmp_path / "u.json"
    p.write_text(json.dumps(ga.gate_to_json(u)))
    v = ga.load_gate(p)
    np.testing.assert_allclose(u.entries, v.entries, atol=1e-15)


def test_load_gate_missing(tmp_path):
    with pytest.raises(InputError):
        ga.load_gate(tmp_path / "nope.json")


def test_gate_composition_and_dagger(rng):
    u = ga.haar_random_gate(2, rng)
    np.testing.assert_allclose((u @ u.dagger).entries, np.eye(4), atol=1e-12)
