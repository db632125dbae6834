"""Frame potentials from the moment operator and the domain-wall model."""

import numpy as np
import pytest

from moment_spectra import frame_potential as fp
from moment_spectra import moment_builder as mb
from moment_spectra.errors import InvariantError, UnsupportedConfiguration


def _pm(n, e, g, arch="local"):
    spec = mb.CircuitSpec(n, 2, arch)
    return mb.to_orthonormal_basis(mb.build_moment(spec, mb.weights_from_eg(e, g, 2)))


def test_frame_potential_starts_at_dimension():
    curve = fp.frame_potential_via_moment(_pm(4, 0.6, 0.5), 5)
    assert curve.F[0] == pytest.approx(16.0)
    assert np.all(np.diff(curve.F) < 0)
    assert curve.F[-1] > 2.0  # the two invariant states keep F >= 2


def test_frame_potential_spectral_sum():
    M = _pm(5, 0.5, 0.5 / 1.2)
    curve = fp.frame_potential_via_moment(M, 8)
    lam = np.linalg.eigvalsh(M.entries)
    np.testing.assert_allclose(curve.F, [np.sum(lam ** (2 * t)) for t in range(9)], rtol=1e-10)


def test_frame_potential_needs_orthonormal_basis():
    spec = mb.CircuitSpec(4, 2, "local")
    with pytest.raises(InvariantError):
        fp.frame_potential_via_moment(mb.build_moment(spec, mb.weights_from_eg(0.6, 0.5, 2)), 3)
    with pytest.raises(UnsupportedConfiguration):
        fp.frame_potential_via_moment(_pm(4, 0.6, 0.5), 65)


def test_frame_potential_brickwall_non_symmetric():
    curve = fp.frame_potential_via_moment(_pm(4, 0.6, 0.5, "brickwall"), 4)
    assert curve.F[0] == pytest.approx(16.0)
    assert curve.to_csv().startswith("t,F\n0,")


def test_domain_wall_haar_entries_frozen():
    model = fp.domain_wall_model(6, 2, mb.solvable_weights(0.6, 2))
    assert model.diag == pytest.approx(0.32, abs=1e-12)
    assert model.off == pytest.approx(0.16, abs=1e-12)
    assert model.solvable


def test_domain_wall_cnot_entries_frozen():
    model = fp.domain_wall_model(6, 2, mb.solvable_weights(2 / 3, 2))
    assert model.diag == pytest.approx(1 - 17 / 15 * 2 / 3, abs=1e-12)
    assert model.off == pytest.approx(4 / 15 * 2 / 3, abs=1e-12)


@pytest.mark.parametrize("e", [0.3, 0.6, 2 / 3])
def test_domain_wall_analytic_spectrum(e):
    model = fp.domain_wall_model(7, 2, mb.solvable_weights(e, 2))
    spec = fp.domain_wall_spectrum(model)
    assert spec.analytic
    np.testing.assert_allclose(np.sort(spec.eigenvalues), np.linalg.eigvalsh(model.matrix()), atol=1e-12)


def test_f1_matches_trace_oracle():
    model = fp.domain_wall_model(6, 2, mb.solvable_weights(0.6, 2))
    assert fp.f1(model, 3) == pytest.approx(0.05865314713600004, rel=1e-12)
    for t in range(1, 6):
        assert fp.f1(model, t) == pytest.approx(fp.f1_trace_oracle(model, t), rel=1e-12)


def test_domain_wall_non_solvable_falls_back_to_numeric():
    model = fp.domain_wall_model(5, 2, mb.weights_from_eg(0.6, 0.4, 2))
    assert not model.solvable
    spec = fp.domain_wall_spectrum(model)
    assert not spec.analytic
    np.testing.assert_allclose(np.sort(spec.eigenvalues), np.linalg.eigvalsh(model.matrix()), atol=1e-12)
