"""Closed-form spectra, gaps, fermionic modes and analytic eigenvectors."""

import math

import numpy as np
import pytest

from moment_spectra import moment_builder as mb
from moment_spectra import spectra_analytic as sa
from moment_spectra import spectra_numeric as sn
from moment_spectra.errors import InvariantError, UnsupportedConfiguration


# ---------------------------------------------------------------- momentum grids


def test_grid_even_n():
    g1 = sa.momentum_grid(4, 1)
    g0 = sa.momentum_grid(4, 0)
    np.testing.assert_allclose(g1.values, [-3 * math.pi / 4, -math.pi / 4, math.pi / 4, 3 * math.pi / 4])
    np.testing.assert_allclose(g0.values, [-math.pi / 2, 0, math.pi / 2, math.pi])


def test_grid_odd_n_contains_zero_and_pi():
    assert 0.0 in [round(k, 12) for k in sa.momentum_grid(5, 0).values]
    assert any(abs(k - math.pi) < 1e-12 for k in sa.momentum_grid(5, 1).values)


@pytest.mark.parametrize("n", [3, 4, 5, 8])
def test_grid_folded_and_sized(n):
    for p in (0, 1):
        ks = sa.momentum_grid(n, p).values
        assert len(ks) == n
        assert all(-math.pi < k <= math.pi + 1e-12 for k in ks)


def test_pattern_parity_enforced():
    grid = sa.momentum_grid(4, 1)
    with pytest.raises(InvariantError):
        sa.OccupationPattern(grid, (1, 0, 0, 0))
    pat = sa.OccupationPattern.from_momenta(grid, [-math.pi / 4, math.pi / 4])
    assert pat.bitstring == "0110"


# ---------------------------------------------------------------- gaps (frozen oracles)


def test_local_gap_frozen():
    assert sa.local_gap(4, 2, 0.6) == pytest.approx(0.21715728752538, abs=1e-12)


def test_local_gap_linear_in_e():
    for n in (4, 7, 10):
        assert sa.local_gap(n, 2, 0.3) / sa.local_gap(n, 2, 0.6) == pytest.approx(0.5, abs=1e-14)


def test_brickwall_haar_gap_frozen():
    assert sa.brickwall_haar_gap(8, 2) == pytest.approx(0.701584531212995, abs=1e-12)
    # general formula agrees with the Haar form at e_H
    for n in (4, 6, 8, 10):
        assert sa.brickwall_gap(n, 2, 0.6) == pytest.approx(sa.brickwall_haar_gap(n, 2), abs=1e-12)


def test_brickwall_nonreal_branch_n4():
    lam0 = (23 + 8 * math.sqrt(7)) / 81
    assert sa.brickwall_mode(0.0, 2, 2 / 3).real == pytest.approx(lam0, abs=1e-12)
    assert sa.brickwall_gap(4, 2, 2 / 3) == pytest.approx(1 - lam0 / 9, abs=1e-12)


def test_brickwall_mode_frozen():
    lam = sa.brickwall_mode(math.pi / 3, 2, 2 / 3)
    assert lam == pytest.approx(-0.012345679012345713 + 0.11042310999998968j, abs=1e-12)
    assert abs(lam) == pytest.approx(1 / 9, abs=1e-12)
    assert sa.brickwall_mode(2 * math.pi / 3, 2, 2 / 3) == pytest.approx(lam.conjugate(), abs=1e-12)


def test_local_eigenvalue_frozen():
    grid = sa.momentum_grid(6, 1)
    pat = sa.OccupationPattern.from_momenta(grid, [-math.pi / 6, math.pi / 6])
    assert sa.local_eigenvalue(pat, sa.FermionDispersion.from_e(2, 0.6), 6) == pytest.approx(
        0.897606774342517, abs=1e-12
    )


def test_local_spectrum_has_two_unit_eigenvalues():
    spec = mb.CircuitSpec(6, 2, "local")
    vals = sa.enumerate_local_spectrum(spec, 0.6).values
    assert len(vals) == 64
    assert np.sum(np.abs(vals - 1) < 1e-12) == 2


def test_enumeration_matches_dense_local():
    spec = mb.CircuitSpec(5, 3, "local")
    rep = sn.match_spectra(sa.enumerate_local_spectrum(spec, 0.5), sn.moment_spectrum(spec, 0.5, 0.5 / 1.6))
    assert rep.ok


def test_enumeration_matches_dense_brickwall():
    spec = mb.CircuitSpec(6, 2, "brickwall")
    rep = sn.match_spectra(
        sa.enumerate_brickwall_spectrum(spec, 2 / 3), sn.moment_spectrum(spec, 2 / 3, 5 / 9), tol=1e-8
    )
    assert rep.ok, rep.to_json()


def test_spectrum_json_labels():
    js = sa.enumerate_local_spectrum(mb.CircuitSpec(3, 2, "local"), 0.6).to_json()
    assert len(js["eigenvalues"]) == 8
    assert {e["sector"] for e in js["eigenvalues"]} == {0, 1}


# ---------------------------------------------------------------- modes


@pytest.mark.parametrize("n", [3, 4, 5])
def test_fermion_algebra(n):
    modes = sa.fermion_modes(n)
    assert modes.site_anticommutator_error() < 1e-12
    for p in (0, 1):
        assert modes.momentum_anticommutator_error(p) < 1e-12
        assert modes.fourier_inversion_error(p) < 1e-12


def test_fermion_modes_cap():
    with pytest.raises(UnsupportedConfiguration):
        sa.fermion_modes(13)


# ---------------------------------------------------------------- eigenvectors


@pytest.mark.parametrize("n,d", [(4, 2), (5, 3), (6, 2)])
def test_local_left_eigenvectors(n, d):
    spec = mb.CircuitSpec(n, d, "local")
    e = 0.45
    M = mb.build_moment(spec, mb.solvable_weights(e, d)).entries
    disp = sa.FermionDispersion.from_e(d, e)
    for p in (0, 1):
        for pat in sa.all_patterns(n, p):
            v = sa.local_left_eigenvector(spec, pat)
            lam = sa.local_eigenvalue(pat, disp, n)
            assert np.linalg.norm(v @ M - lam * v) / np.linalg.norm(v) < 1e-10, pat.bitstring


@pytest.mark.parametrize("e", [0.4, 0.6, 2 / 3])
def test_brickwall_left_eigenvectors(e, rng):
    spec = mb.CircuitSpec(6, 2, "brickwall")
    M = mb.build_moment(spec, mb.solvable_weights(e, 2)).entries
    for p in (0, 1):
        for _ in range(6):
            pat = sa.random_pattern(6, p, rng)
            ev = sa.brickwall_left_eigenvector(spec, e, pat, M=M)
            assert ev.residual < 1e-9
            # the "plus" convention works for every pattern; "minus" only on some
            assert ev.tried["plus"] < 1e-9


def test_brickwall_vacuum_eigenvector_has_unit_eigenvalue():
    spec = mb.CircuitSpec(4, 2, "brickwall")
    for p in (0, 1):
        pat = sa.OccupationPattern(sa.momentum_grid(4, p), (0, 0, 0, 0))
        ev = sa.brickwall_left_eigenvector(spec, 0.5, pat)
        assert ev.eigenvalue == 1
        assert ev.residual < 1e-12


# ---------------------------------------------------------------- 4x4 mode matrix


@pytest.mark.parametrize("e", [0.3, 0.5])
@pytest.mark.parametrize("k", [0.2, 0.7, 1.3])
def test_mode_matrix_mode_matrix(k, e):
    res = sa.mode_matrix_check(k, 2, e)
    assert res.ok, (res.eig_error, res.lambda_error, res.reciprocal_error)


@pytest.mark.parametrize("k", [0.2, 0.7, 1.3])
def test_mode_matrix_above_haar_reports_branch(k):
    # above e_H the principal log moves lambda_k to another label; it is
    # reported, not corrected, and lambda_k is still among the four values
    res = sa.mode_matrix_check(k, 2, 2 / 3)
    assert res.eig_error < 1e-9 and res.reciprocal_error < 1e-9
    assert np.abs(res.predicted - sa.brickwall_mode(k, 2, 2 / 3)).min() < 1e-12


def test_mode_matrix_rejects_singular_points():
    with pytest.raises(InvariantError):
        sa.mode_matrix_check(0.5, 2, 0.6)
    with pytest.raises(InvariantError):
        sa.mode_matrix_check(2.0, 2, 0.3)
