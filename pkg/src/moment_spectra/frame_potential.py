"""Frame potentials from moment operators and the single-domain-wall model.

Two distinct architectures appear here and are never mixed:

* :func:`frame_potential_via_moment` works with any periodic moment matrix
  from :mod:`moment_spectra.moment_builder` (in the orthonormal basis) and
  computes ``F(t) = tr(M^t (M^T)^t)`` on the ``2**n``-dimensional space.
* :class:`DomainWallModel` describes an *open* chain whose layers alternate
  between Haar two-qudit gates and structured gates, followed by a final
  Haar layer.  In the one-domain-wall sector the transfer matrix is
  tridiagonal; its eigenvalues give the leading contribution ``f1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvariantError, UnsupportedConfiguration
from .moment_builder import ORTHONORMAL, GateWeights, MomentMatrix


@dataclass
class FramePotentialCurve:
    architecture: str
    t: np.ndarray
    F: np.ndarray

    def to_json(self) -> dict:
        return {"architecture": self.architecture,
                "curve": [{"t": int(t), "F": float(f"{F:.12g}")} for t, F in zip(self.t, self.F)]}

    def to_csv(self) -> str:
        return "t,F\n" + "".join(f"{int(t)},{F:.12e}\n" for t, F in zip(self.t, self.F))


def frame_potential_via_moment(M: MomentMatrix, t_max: int, check_symmetric: bool = True) -> FramePotentialCurve:
    """``F(t) = tr(M^t (M^T)^t) = ||M^t||_F^2`` for ``t = 0, ..., t_max``.

    For a symmetric ``M`` the result is cross-checked against
    ``sum_i lambda_i^{2t}`` (relative tolerance 1e-9).

    Raises
    ------
    InvariantError
        If the matrix is not in the orthonormal basis, where the trace is
        the physical one.
    """
    if M.basis != ORTHONORMAL:
        raise InvariantError("frame potential needs the orthonormal-basis matrix")
    if M.spec.n > 10 or t_max > 64 or t_max < 0:
        raise UnsupportedConfiguration("frame potential supports n <= 10 and 0 <= t_max <= 64")
    A = M.entries
    P = np.eye(A.shape[0])
    F = []
    for _ in range(t_max + 1):
        F.append(float(np.sum(P * P)))
        P = P @ A
    F = np.array(F)
    if check_symmetric and np.abs(A - A.T).max() < 1e-10:
        lam = np.linalg.eigvalsh((A + A.T) / 2)
        ref = np.array([np.sum(lam ** (2 * t)) for t in range(t_max + 1)])
        rel = np.abs(F - ref) / np.maximum(np.abs(ref), 1e-300)
        if rel.max() > 1e-9:
            raise InvariantError(f"F(t) disagrees with the spectral sum (rel. error {rel.max():.2e})")
    return FramePotentialCurve(M.spec.architecture, np.arange(t_max + 1), F)


@dataclass(frozen=True)
class DomainWallModel:
    """Tridiagonal one-domain-wall transfer matrix of the alternating open chain.

    ``diag = b'' + 2 a_H a + a_H^2 c`` and ``off = a_H a + a_H^2 c`` with
    ``a_H = d/(d^2+1)`` the weight of the Haar layers.  Domain-wall positions
    are ``1, ..., n-1``.
    """

    n: int
    d: int
    weights: GateWeights
    a_H: float
    diag: float
    off: float

    @property
    def solvable(self) -> bool:
        return abs(self.weights.c) < 1e-12

    def matrix(self) -> np.ndarray:
        m = self.n - 1
        return self.diag * np.eye(m) + self.off * (np.eye(m, k=1) + np.eye(m, k=-1))


def domain_wall_model(n: int, d: int, weights: GateWeights, tol: float = 1e-12) -> DomainWallModel:
    """Tridiagonal entries from the gate weights (solvable reduction asserted when ``c = 0``)."""
    if n < 2:
        raise InvariantError("domain-wall model needs n >= 2")
    aH = d / (d * d + 1)
    diag = weights.b_prime_prime + 2 * aH * weights.a + aH * aH * weights.c
    off = aH * weights.a + aH * aH * weights.c
    if abs(weights.c) < tol and math.isfinite(weights.e_u):
        e = weights.e_u
        d4 = d**4
        if abs(diag - (1 - (d4 + 1) * e / (d4 - 1))) > tol or abs(off - d * d * e / (d4 - 1)) > tol:
            raise InvariantError("domain-wall entries do not reduce to the solvable closed form")
    return DomainWallModel(n, d, weights, aH, diag, off)


@dataclass
class DomainWallSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns
    analytic: bool


def domain_wall_spectrum(model: DomainWallModel, tol: float = 1e-10) -> DomainWallSpectrum:
    """``lambda_k = diag + 2 off cos(k pi / n)`` with eigenvectors ``sin(k i pi / n)``, ``k = 1..n-1``.

    Each analytic pair is verified against the explicit tridiagonal matrix.
    For non-solvable weights only the numeric eigendecomposition is
    returned (``analytic=False``).
    """
    T = model.matrix()
    if not model.solvable:
        w, V = np.linalg.eigh(T)
        return DomainWallSpectrum(w[::-1], V[:, ::-1], False)
    n = model.n
    ks = np.arange(1, n)
    lam = model.diag + 2 * model.off * np.cos(ks * math.pi / n)
    i = np.arange(1, n)
    V = np.sin(np.outer(i, ks) * math.pi / n)
    V /= np.linalg.norm(V, axis=0)
    res = np.abs(T @ V - V * lam).max() if n > 1 else 0.0
    if res > tol:
        raise InvariantError(f"analytic domain-wall eigenpairs fail (residual {res:.2e})")
    return DomainWallSpectrum(lam, V, True)


def f1(model: DomainWallModel, t: int) -> float:
    """One-domain-wall contribution ``sum_k lambda_k^{2t}``."""
    lam = domain_wall_spectrum(model).eigenvalues
    return float(np.sum(lam ** (2 * t)))


def f1_trace_oracle(model: DomainWallModel, t: int) -> float:
    """``tr(T^{2t})`` of the explicit tridiagonal matrix."""
    return float(np.trace(np.linalg.matrix_power(model.matrix(), 2 * t)))
