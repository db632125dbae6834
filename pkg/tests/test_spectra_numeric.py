"""Dense eigensolvers, spectrum matching and gap scans."""

import csv
import io

import numpy as np
import pytest

from moment_spectra import moment_builder as mb
from moment_spectra import spectra_analytic as sa
from moment_spectra import spectra_numeric as sn
from moment_spectra.errors import InvariantError, UnsupportedConfiguration


def test_subleading_modulus_frozen():
    lam3 = sn.subleading_modulus(sn.moment_spectrum(mb.CircuitSpec(4, 2, "local"), 0.6, 0.5))
    assert lam3 == pytest.approx(0.7828427124746188, abs=1e-10)
    lam3 = sn.subleading_modulus(sn.moment_spectrum(mb.CircuitSpec(8, 2, "brickwall"), 0.6, 0.5))
    assert lam3 == pytest.approx(0.298415468787005, abs=1e-10)


def test_subleading_rejects_identity():
    spec = mb.CircuitSpec(4, 2, "local")
    with pytest.raises(InvariantError):
        sn.subleading_modulus(sn.moment_spectrum(spec, 0.0, 0.0))
    assert sn.subleading_modulus(sn.moment_spectrum(spec, 0.0, 0.0), strict=False) == pytest.approx(1.0)


def test_dense_eigenvalues_validation():
    with pytest.raises(InvariantError):
        sn.dense_eigenvalues(np.ones((2, 3)))
    ns = sn.dense_eigenvalues(np.diag([3.0, 1.0]), symmetric=True)
    np.testing.assert_allclose(np.sort(ns.eigenvalues.real), [1, 3])
    assert ns.backward_error_estimate > 0


def test_match_spectra_permutation_invariant(rng):
    a = rng.normal(size=20) + 1j * rng.normal(size=20)
    b = rng.permutation(a) + 1e-12
    rep = sn.match_spectra(a, b)
    assert rep.ok and rep.max_distance < 1e-11


def test_match_spectra_detects_mismatch():
    rep = sn.match_spectra(np.array([1.0, 2.0]), np.array([1.0, 2.5]))
    assert not rep.ok
    assert rep.max_distance == pytest.approx(0.5)
    with pytest.raises(InvariantError):
        sn.match_spectra(np.ones(2), np.ones(3))


def test_scan_point_infeasible_has_no_spectral_fields():
    r = sn.scan_point(mb.CircuitSpec(4, 2, "local"), 0.1, 0.9)
    assert not r.feasible and r.gap is None
    assert r.csv_row()[5:] == ["", "", "false"]


def test_scan_grid_order_and_haar_point():
    spec = mb.CircuitSpec(4, 2, "local")
    recs = sn.scan_grid((0.0, 2 / 3), (0.0, 1.0), (11, 3), spec, threads=2)
    assert len(recs) == 33
    assert [(r.e_u, r.g_u) for r in recs[:3]] == [(0.0, 0.0), (0.0, 0.5), (0.0, 1.0)]
    haar = [r for r in recs if abs(r.e_u - 0.6) < 1e-12 and abs(r.g_u - 0.5) < 1e-12]
    assert len(haar) == 1
    assert haar[0].gap == pytest.approx(sa.local_gap(4, 2, 0.6), abs=1e-10)


def test_scan_limits():
    spec = mb.CircuitSpec(4, 2, "local")
    with pytest.raises(UnsupportedConfiguration):
        sn.scan_grid((0, 1), (0, 1), 513, spec)
    with pytest.raises(UnsupportedConfiguration):
        sn.scan_grid((0, 1), (0, 1), 3, mb.CircuitSpec(11, 2, "local"))


def test_records_csv_roundtrip():
    spec = mb.CircuitSpec(4, 2, "brickwall")
    recs = sn.solvable_line_scan(spec, [0.5, 0.6, 2 / 3])
    rows = list(csv.reader(io.StringIO(sn.records_to_csv(recs))))
    assert tuple(rows[0]) == sn.CSV_HEADER
    assert len(rows) == 4
    assert float(rows[2][6]) == pytest.approx(sa.brickwall_haar_gap(4, 2), abs=1e-10)


def test_solvable_line_gaps_match_formula():
    spec = mb.CircuitSpec(6, 2, "brickwall")
    es = [0.5, 0.55, 0.6, 0.65]
    gaps = sn.gap_along_solvable_line(spec, es)
    np.testing.assert_allclose(gaps, [sa.brickwall_gap(6, 2, e) for e in es], atol=1e-10)


def test_qutrit_gap_slope_changes_sign():
    # the d = 3 brick-wall gap on the solvable line peaks between e = 0.85 and 0.865
    es = [0.85, 0.855, 0.86, 0.865]
    gaps = [sa.brickwall_gap(6, 3, e) for e in es]
    np.testing.assert_allclose(
        gaps, [0.9761218002951464, 0.9814502655505379, 0.981785209181491, 0.9813427604278334], atol=1e-12
    )
    slopes = sn.finite_difference_slope(gaps, 0.005)
    assert slopes[0] > 0 and slopes[-1] < 0
