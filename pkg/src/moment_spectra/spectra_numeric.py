"""Brute-force oracle: dense eigensolvers, spectrum matching and (e, g) gap scans."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .errors import InvariantError, UnsupportedConfiguration
from .gate_algebra import e_haar, is_feasible
from .moment_builder import (
    LOCAL,
    CircuitSpec,
    build_moment,
    to_orthonormal_basis,
    weights_from_eg,
)

MAX_DENSE_DIM = 4096
HUNGARIAN_MAX = 2048
CSV_HEADER = ("e_u", "g_u", "n", "d", "architecture", "lambda3_abs", "gap", "feasible")


@dataclass
class NumericSpectrum:
    """Eigenvalues of a dense matrix.

    ``backward_error_estimate`` is the a-priori bound ``dim * eps * ||A||_F``
    of a backward-stable dense solver.
    """

    eigenvalues: np.ndarray
    symmetric_input: bool
    backward_error_estimate: float

    def __len__(self):
        return len(self.eigenvalues)


def dense_eigenvalues(matrix: np.ndarray, symmetric: bool = False) -> NumericSpectrum:
    """Full eigenvalue multiset via LAPACK (``syevd`` or Hessenberg/Schur)."""
    A = np.asarray(matrix)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvariantError(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] > MAX_DENSE_DIM:
        raise UnsupportedConfiguration(f"dense eigensolve limited to dimension {MAX_DENSE_DIM}")
    try:
        if symmetric:
            ev = scipy.linalg.eigvalsh((A + A.T) / 2).astype(complex)
        else:
            ev = scipy.linalg.eigvals(A)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise InvariantError(f"eigensolver failed for a {A.shape[0]}x{A.shape[1]} matrix: {exc}") from None
    bound = A.shape[0] * np.finfo(float).eps * float(np.linalg.norm(A))
    return NumericSpectrum(ev, bool(symmetric), bound)


def subleading_modulus(spectrum: NumericSpectrum, tol: float = 1e-8, strict: bool = True) -> float:
    """Third-largest eigenvalue modulus ``|lambda_3|``.

    The two largest moduli must equal 1 (within ``tol``) and, when
    ``strict``, the third must be separated from 1; otherwise the
    unit-eigenvalue multiplicity is not 2 and an error is raised.
    """
    mods = np.sort(np.abs(spectrum.eigenvalues))[::-1]
    if len(mods) < 3:
        raise InvariantError("spectrum too short for a subleading modulus")
    if abs(mods[0] - 1) > tol or abs(mods[1] - 1) > tol:
        raise InvariantError(f"top two moduli are {mods[0]:.12g}, {mods[1]:.12g}, expected 1")
    if strict and mods[2] > 1 - tol:
        raise InvariantError("unit eigenvalue multiplicity exceeds 2 (identity gate?)")
    return float(mods[2])


@dataclass
class MatchReport:
    max_distance: float
    worst_pairs: list
    method: str
    tol: float

    @property
    def ok(self) -> bool:
        return self.max_distance <= self.tol

    def to_json(self) -> dict:
        return {
            "max_distance": self.max_distance,
            "tol": self.tol,
            "ok": self.ok,
            "method": self.method,
            "worst_pairs": [
                {"analytic": {"re": a.real, "im": a.imag}, "numeric": {"re": b.real, "im": b.imag}}
                for a, b in self.worst_pairs
            ],
        }


def _sort_key(v: np.ndarray) -> np.ndarray:
    return np.lexsort((np.round(np.angle(v), 9), np.round(np.abs(v), 9)))


def match_spectra(analytic, numeric, tol: float = 1e-8, worst: int = 3) -> MatchReport:
    """Optimal one-to-one matching of two eigenvalue multisets.

    A sorted merge (by modulus, then phase) is tried first; if it misses
    ``tol`` -- typically because near-degenerate values were ordered
    differently -- the exact Hungarian assignment is used.
    """
    a = np.asarray(getattr(analytic, "values", analytic), dtype=complex)
    b = np.asarray(getattr(numeric, "eigenvalues", numeric), dtype=complex)
    if a.shape != b.shape:
        raise InvariantError(f"cardinality mismatch: {a.size} analytic vs {b.size} numeric")
    sa, sb = a[_sort_key(a)], b[_sort_key(b)]
    dist = np.abs(sa - sb)
    method = "sorted"
    if dist.size and dist.max() > tol and a.size <= HUNGARIAN_MAX:
        C = np.abs(a[:, None] - b[None, :])
        r, c = linear_sum_assignment(C)
        sa, sb, dist = a[r], b[c], C[r, c]
        method = "hungarian"
    order = np.argsort(dist)[::-1][:worst]
    return MatchReport(
        float(dist.max()) if dist.size else 0.0,
        [(complex(sa[i]), complex(sb[i])) for i in order],
        method,
        tol,
    )


def moment_spectrum(spec: CircuitSpec, e_u: float, g_u: float) -> NumericSpectrum:
    """Dense spectrum of the moment operator for ``(e_u, g_u)``.

    The local operator is diagonalized in the orthonormal basis, where it
    is symmetric.
    """
    M = build_moment(spec, weights_from_eg(e_u, g_u, spec.d))
    if spec.architecture == LOCAL:
        return dense_eigenvalues(to_orthonormal_basis(M).entries, symmetric=True)
    return dense_eigenvalues(M.entries, symmetric=False)


# ---------------------------------------------------------------------------
# Grid scans
# ---------------------------------------------------------------------------


@dataclass
class GapScanRecord:
    e_u: float
    g_u: float
    n: int
    d: int
    architecture: str
    lambda3_abs: float | None
    gap: float | None
    feasible: bool
    region_verified: bool = True

    def csv_row(self) -> list[str]:
        fmt = "%.12e"
        spectral = ["", ""] if self.lambda3_abs is None else [fmt % self.lambda3_abs, fmt % self.gap]
        return [fmt % self.e_u, fmt % self.g_u, str(self.n), str(self.d), self.architecture, *spectral,
                "true" if self.feasible else "false"]

    def to_json(self) -> dict:
        return {
            "e_u": self.e_u, "g_u": self.g_u, "n": self.n, "d": self.d,
            "architecture": self.architecture, "lambda3_abs": self.lambda3_abs, "gap": self.gap,
            "feasible": self.feasible, "region_verified": self.region_verified,
        }


def scan_point(spec: CircuitSpec, e_u: float, g_u: float, tol: float = 1e-10) -> GapScanRecord:
    """Evaluate one grid point (infeasible points carry no spectral fields)."""
    feas = is_feasible(e_u, g_u, spec.d, tol)
    verified = spec.d == 2
    if not feas:
        return GapScanRecord(e_u, g_u, spec.n, spec.d, spec.architecture, None, None, False, verified)
    lam3 = subleading_modulus(moment_spectrum(spec, e_u, g_u), strict=False)
    return GapScanRecord(e_u, g_u, spec.n, spec.d, spec.architecture, lam3, 1.0 - lam3, True, verified)


def _axis(rng: Sequence[float], num: int) -> np.ndarray:
    lo, hi = float(rng[0]), float(rng[1])
    return np.linspace(lo, hi, int(num)) if num > 1 else np.array([lo])


def scan_grid(
    e_range: Sequence[float],
    g_range: Sequence[float],
    resolution,
    spec: CircuitSpec,
    threads: int | None = None,
) -> list[GapScanRecord]:
    """Evaluate ``|lambda_3|`` on a rectangular ``(e, g)`` grid.

    Parameters
    ----------
    e_range, g_range : (lo, hi)
    resolution : int or (int, int)
        Points per axis (``<= 512``).
    spec : CircuitSpec
        ``n <= 10`` for scans.
    threads : int, optional
        Worker count; output order is ``(e index, g index)`` regardless.
    """
    ne, ng = (resolution, resolution) if np.isscalar(resolution) else resolution
    if max(ne, ng) > 512 or min(ne, ng) < 1:
        raise UnsupportedConfiguration("scan resolution must be between 1 and 512 per axis")
    if spec.n > 10:
        raise UnsupportedConfiguration("scans are limited to n <= 10")
    points = [(float(e), float(g)) for e in _axis(e_range, ne) for g in _axis(g_range, ng)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda eg: scan_point(spec, *eg), points))


def solvable_line_scan(spec: CircuitSpec, e_values: Sequence[float], threads: int | None = None) -> list[GapScanRecord]:
    """Scan along ``g = e / (2 e_H)``."""
    eh = e_haar(spec.d)
    pts = [(float(e), float(e) / (2 * eh)) for e in e_values]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda eg: scan_point(spec, *eg), pts))


def records_to_csv(records: Sequence[GapScanRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.csv_row())
    return buf.getvalue()


def finite_difference_slope(values: Sequence[float], step: float) -> list[float]:
    """Forward differences ``(v[i+1] - v[i]) / step``."""
    return [(b - a) / step for a, b in zip(values[:-1], values[1:])]


def gap_along_solvable_line(spec: CircuitSpec, e_values: Sequence[float]) -> list[float]:
    """Numeric gaps ``1 - |lambda_3|`` on the solvable line."""
    return [r.gap for r in solvable_line_scan(spec, e_values, threads=1)]


def isclose_all(a, b, tol) -> bool:
    return all(math.isclose(x, y, abs_tol=tol) for x, y in zip(a, b))
