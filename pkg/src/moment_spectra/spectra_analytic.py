"""Closed-form free-fermion spectra of solvable second-moment operators.

On the solvable line ``g_u = e_u / (2 e_H)`` the moment operators of both
architectures map, via a Jordan-Wigner transformation, to quadratic
fermionic chains.  Their spectra are labeled by a parity sector
``p in {0, 1}``, a momentum grid ``K_p`` and an even-parity occupation
pattern ``i_k in {0, 1}``:

* local: ``lambda = 1 - (1/n) sum_k eps_k i_k`` with
  ``eps_k = e~ (1 - 2 a_k)`` and ``a_k = d cos(k) / (d^2 + 1)``;
* brick-wall: ``lambda = prod_k lambda_k^{i_k}`` with
  ``lambda_k = (a_k e~ + sqrt(a_k^2 e~^2 + 1 - e~))^2`` (principal root).

Besides enumerating eigenvalues this module builds the fermionic mode
operators as sparse matrices and assembles explicit left eigenvectors,
which are checked against the dense moment matrices.

Conventions
-----------
* Spins live directly in the computational ``{I, S}`` basis (``|0> = I``).
  ``c_j^dag = X^{(x)(j-1)} (x) (Z + iY)/2 (x) I`` with 1-based ``j``;
  fermion parity is the global spin flip ``X^{(x)n}``.
* Sector ``p = 1`` lives in the flip-even subspace (vacuum
  ``<0..0| + <1..1|``), sector ``p = 0`` in the flip-odd one
  (``<0..0| - <1..1|``).
* Momenta are reported in ``(-pi, pi]`` and sorted ascending; occupation
  bitstrings follow that order.  In sector 0 the ``k = 0`` bit is flipped
  so that the all-zero pattern is always the eigenvalue-1 state.
"""

from __future__ import annotations

import cmath
import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import InvariantError, UnsupportedConfiguration, ValidationFailure
from .gate_algebra import e_haar
from .moment_builder import BRICKWALL, LOCAL, CircuitSpec, build_moment, solvable_weights

ENUMERATION_CAP = 2**20
MODE_N_CAP = 12


# ---------------------------------------------------------------------------
# Grids, dispersions, patterns
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentumGrid:
    """Allowed momenta ``K_p`` of an ``n``-site ring in sector ``p``."""

    n: int
    p: int
    values: tuple

    def __len__(self):
        return len(self.values)

    def index(self, k: float) -> int:
        for i, v in enumerate(self.values):
            if abs(v - k) < 1e-9:
                return i
        raise KeyError(k)


def momentum_grid(n: int, p: int) -> MomentumGrid:
    """``K_p = {(2m - p) pi / n}`` folded into ``(-pi, pi]``.

    ``m`` runs over ``-n/2+1, ..., n/2`` for even ``n`` and over the
    half-integers ``-n/2+1/2, ..., n/2-1/2`` for odd ``n``.
    """
    if n < 2 or p not in (0, 1):
        raise InvariantError(f"invalid grid request n={n}, p={p}")
    twice_m = range(-n + 2, n + 1, 2) if n % 2 == 0 else range(-n + 1, n, 2)
    ks = []
    for tm in twice_m:
        num = tm - p  # k = num * pi / n
        if num <= -n:
            num += 2 * n
        ks.append(num * math.pi / n)
    return MomentumGrid(n, p, tuple(sorted(ks)))


@dataclass(frozen=True)
class FermionDispersion:
    """Single-mode quantities for local dimension ``d`` and normalized power ``e~``."""

    d: int
    e_tilde: float

    @classmethod
    def from_e(cls, d: int, e_u: float) -> "FermionDispersion":
        return cls(d, e_u / e_haar(d))

    def a_k(self, k):
        return self.d * np.cos(k) / (self.d**2 + 1)

    def eps_k(self, k):
        """Local single-particle energy ``e~ (1 - 2 a_k)``."""
        return self.e_tilde * (1 - 2 * self.a_k(k))

    def discriminant(self, k):
        ak = self.a_k(k)
        return ak**2 * self.e_tilde**2 + 1 - self.e_tilde

    def lambda_k(self, k):
        """Brick-wall mode eigenvalue (principal square root; complex when needed)."""
        ak = self.a_k(k)
        return (ak * self.e_tilde + np.sqrt(np.asarray(self.discriminant(k), dtype=complex))) ** 2


@dataclass(frozen=True)
class OccupationPattern:
    """Occupation bits over a momentum grid (same order as ``grid.values``)."""

    grid: MomentumGrid
    bits: tuple

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if len(bits) != len(self.grid) or any(b not in (0, 1) for b in bits):
            raise InvariantError("pattern must have one 0/1 bit per momentum")
        if sum(bits) % 2:
            raise InvariantError("occupation patterns must have even parity")
        object.__setattr__(self, "bits", bits)

    @property
    def bitstring(self) -> str:
        return "".join(str(b) for b in self.bits)

    def occupied(self) -> list[float]:
        return [k for k, b in zip(self.grid.values, self.bits) if b]

    @classmethod
    def from_momenta(cls, grid: MomentumGrid, momenta: Sequence[float]) -> "OccupationPattern":
        bits = [0] * len(grid)
        for k in momenta:
            bits[grid.index(k)] = 1
        return cls(grid, tuple(bits))


@dataclass
class AnalyticSpectrum:
    """Analytically enumerated eigenvalues with their labels."""

    spec: CircuitSpec
    e_u: float
    values: np.ndarray
    sectors: np.ndarray
    patterns: list

    def __len__(self):
        return len(self.values)

    def to_json(self, digits: int = 12) -> dict:
        def r(x):
            return float(f"{x:.{digits}g}")

        return {
            "n": self.spec.n,
            "d": self.spec.d,
            "architecture": self.spec.architecture,
            "e_u": self.e_u,
            "eigenvalues": [
                {"re": r(v.real), "im": r(v.imag), "sector": int(p), "occupation": s}
                for v, p, s in zip(self.values, self.sectors, self.patterns)
            ],
        }


def _even_patterns(n: int) -> np.ndarray:
    bits = ((np.arange(2**n)[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1).astype(np.int8)
    return bits[bits.sum(axis=1) % 2 == 0]


def _check_enumeration(spec: CircuitSpec) -> None:
    if 2**spec.n > ENUMERATION_CAP:
        raise UnsupportedConfiguration(f"full enumeration of 2^{spec.n} eigenvalues exceeds the cap 2^20")


def local_eigenvalue(pattern: OccupationPattern, dispersion: FermionDispersion, n: int) -> float:
    """``1 - (1/n) sum_k eps_k i_k``."""
    ks = np.array(pattern.grid.values)
    return float(1 - np.dot(dispersion.eps_k(ks), pattern.bits) / n)


def brickwall_eigenvalue(pattern: OccupationPattern, dispersion: FermionDispersion) -> complex:
    """``prod_k lambda_k^{i_k}``."""
    out = 1 + 0j
    for k in pattern.occupied():
        out *= complex(dispersion.lambda_k(k))
    return out


def enumerate_local_spectrum(spec: CircuitSpec, e_u: float) -> AnalyticSpectrum:
    """All ``2**n`` eigenvalues of the local solvable moment operator."""
    _check_enumeration(spec)
    disp = FermionDispersion.from_e(spec.d, e_u)
    pats = _even_patterns(spec.n)
    vals, secs, labels = [], [], []
    for p in (0, 1):
        eps = disp.eps_k(np.array(momentum_grid(spec.n, p).values))
        vals.append(1 - pats @ eps / spec.n)
        secs.append(np.full(len(pats), p))
        labels.extend("".join(map(str, row)) for row in pats)
    return AnalyticSpectrum(spec, e_u, np.concatenate(vals).astype(complex), np.concatenate(secs), labels)


def enumerate_brickwall_spectrum(spec: CircuitSpec, e_u: float) -> AnalyticSpectrum:
    """All ``2**n`` eigenvalues of the brick-wall solvable moment operator."""
    if spec.n % 2:
        raise UnsupportedConfiguration("brick-wall spectra need even n")
    _check_enumeration(spec)
    disp = FermionDispersion.from_e(spec.d, e_u)
    pats = _even_patterns(spec.n)
    vals, secs, labels = [], [], []
    for p in (0, 1):
        lam = disp.lambda_k(np.array(momentum_grid(spec.n, p).values))
        vals.append(np.prod(np.where(pats == 1, lam[None, :], 1.0), axis=1))
        secs.append(np.full(len(pats), p))
        labels.extend("".join(map(str, row)) for row in pats)
    values = np.concatenate(vals)
    nonreal = values[np.abs(values.imag) > 1e-12]
    if nonreal.size:
        partners = np.abs(nonreal[:, None] - nonreal.conj()[None, :]).min(axis=1)
        if partners.max() > 1e-9:
            raise InvariantError("non-real brick-wall eigenvalues are not closed under conjugation")
    return AnalyticSpectrum(spec, e_u, values, np.concatenate(secs), labels)


def enumerate_spectrum(spec: CircuitSpec, e_u: float) -> AnalyticSpectrum:
    if spec.architecture == LOCAL:
        return enumerate_local_spectrum(spec, e_u)
    return enumerate_brickwall_spectrum(spec, e_u)


# ---------------------------------------------------------------------------
# Gaps
# ---------------------------------------------------------------------------


def local_gap(n: int, d: int, e_u: float) -> float:
    """``(2 e_u / (n e_H)) (1 - (2d/(d^2+1)) cos(pi/n))``."""
    return 2 * e_u / (n * e_haar(d)) * (1 - 2 * d / (d * d + 1) * math.cos(math.pi / n))


def brickwall_mode(k: float, d: int, e_u: float) -> complex:
    """Single-mode brick-wall eigenvalue ``lambda_k``."""
    return complex(FermionDispersion.from_e(d, e_u).lambda_k(k))


def brickwall_gap(n: int, d: int, e_u: float) -> float:
    """``1 - max(|lambda_{pi/n}|^2, lambda_0 |lambda_{2pi/n}|)``."""
    if n % 2:
        raise UnsupportedConfiguration("brick-wall gap needs even n")
    l1 = brickwall_mode(math.pi / n, d, e_u)
    l0 = brickwall_mode(0.0, d, e_u)
    l2 = brickwall_mode(2 * math.pi / n, d, e_u)
    return 1.0 - max(abs(l1) ** 2, l0.real * abs(l2))


def brickwall_haar_gap(n: int, d: int) -> float:
    """Brick-wall Haar gap ``1 - 16 (d/(d^2+1))^4 cos^4(pi/n)``."""
    return 1.0 - 16 * (d / (d * d + 1)) ** 4 * math.cos(math.pi / n) ** 4


# ---------------------------------------------------------------------------
# Fermionic modes
# ---------------------------------------------------------------------------

_X = sp.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
_I = sp.identity(2, format="csr")
_RAISE = sp.csr_matrix(np.array([[1.0, 1.0], [-1.0, -1.0]]) / 2)  # (Z + iY)/2


def _kron_all(ops) -> sp.csr_matrix:
    out = sp.csr_matrix(np.ones((1, 1)))
    for o in ops:
        out = sp.kron(out, o, format="csr")
    return out


@dataclass
class EigenmodeSet:
    """Sparse Jordan-Wigner and Fourier mode operators on ``n`` sites.

    Attributes
    ----------
    c_dag : list of sparse matrices
        ``c_dag[j-1]`` is the creation operator on (1-based) site ``j``.
    parity : sparse matrix
        ``X^{(x)n}``.
    """

    n: int
    c_dag: list = field(repr=False)
    parity: sp.csr_matrix = field(repr=False)

    def c(self, j: int) -> sp.csr_matrix:
        return self.c_dag[j - 1].getH().tocsr()

    @functools.lru_cache(maxsize=None)
    def eta_dag(self, k: float) -> sp.csr_matrix:
        """``eta_k^dag = n^{-1/2} sum_j exp(-i k j) c_j^dag``."""
        out = sp.csr_matrix((2**self.n, 2**self.n), dtype=complex)
        for j in range(1, self.n + 1):
            out = out + cmath.exp(-1j * k * j) * self.c_dag[j - 1]
        return (out / math.sqrt(self.n)).tocsr()

    def eta(self, k: float) -> sp.csr_matrix:
        return self.eta_dag(k).getH().tocsr()

    def __hash__(self):
        return id(self)

    # -- algebra checks ---------------------------------------------------
    def site_anticommutator_error(self) -> float:
        """Max deviation of ``{c_i, c_j^dag} = delta_ij`` and ``{c_i, c_j} = 0``."""
        N = 2**self.n
        eye = sp.identity(N, format="csr")
        err = 0.0
        for i in range(1, self.n + 1):
            ci = self.c(i)
            for j in range(1, self.n + 1):
                cdj = self.c_dag[j - 1]
                A = ci @ cdj + cdj @ ci - (eye if i == j else 0 * eye)
                B = ci @ self.c(j) + self.c(j) @ ci
                err = max(err, _spmax(A), _spmax(B))
        return err

    def momentum_anticommutator_error(self, p: int) -> float:
        """Max deviation of ``{eta_k, eta_l^dag} = delta_kl`` and ``{eta_k, eta_l} = 0`` on ``K_p``."""
        N = 2**self.n
        eye = sp.identity(N, format="csr")
        ks = momentum_grid(self.n, p).values
        err = 0.0
        for a, k in enumerate(ks):
            ek = self.eta(k)
            for b, l in enumerate(ks):
                A = ek @ self.eta_dag(l) + self.eta_dag(l) @ ek - (eye if a == b else 0 * eye)
                B = ek @ self.eta(l) + self.eta(l) @ ek
                err = max(err, _spmax(A), _spmax(B))
        return err

    def fourier_inversion_error(self, p: int = 1) -> float:
        """Max deviation of ``c_j^dag = n^{-1/2} sum_k exp(i k j) eta_k^dag``."""
        ks = momentum_grid(self.n, p).values
        err = 0.0
        for j in range(1, self.n + 1):
            rec = sum(cmath.exp(1j * k * j) * self.eta_dag(k) for k in ks) / math.sqrt(self.n)
            err = max(err, _spmax(rec - self.c_dag[j - 1]))
        return err


def _spmax(A) -> float:
    A = sp.csr_matrix(A)
    return float(np.abs(A.data).max()) if A.nnz else 0.0


@functools.lru_cache(maxsize=8)
def fermion_modes(n: int) -> EigenmodeSet:
    """Jordan-Wigner creation operators on an ``n``-site ring (sparse, cached per ``n``)."""
    if n < 2 or n > MODE_N_CAP:
        raise UnsupportedConfiguration(f"mode construction supports 2 <= n <= {MODE_N_CAP}")
    c_dag = [_kron_all([_X] * (j - 1) + [_RAISE] + [_I] * (n - j)) for j in range(1, n + 1)]
    return EigenmodeSet(n, c_dag, _kron_all([_X] * n))


def _vacuum(n: int, p: int) -> np.ndarray:
    v = np.zeros(2**n, dtype=complex)
    v[0] = 1.0
    v[-1] = 1.0 if p == 1 else -1.0
    return v


def _apply_row(v: np.ndarray, op) -> np.ndarray:
    """Row vector times sparse operator."""
    return np.asarray(op.T @ v).ravel()


# ---------------------------------------------------------------------------
# Local eigenvectors
# ---------------------------------------------------------------------------


def z_factor(d: int) -> float:
    return ((d + 1) / (d - 1)) ** 2


def p_matrix(k: float, d: int) -> np.ndarray:
    """2x2 Bogoliubov matrix ``P_k`` of the local chain (``0 < k < pi``)."""
    z = z_factor(d)
    c, s = math.cos(k), math.sin(k)
    return np.array([[-z * (1 - c), 1 + c], [1j * z * s, 1j * z * s]])


def local_xi_left(modes: EigenmodeSet, k: float, d: int, p: int):
    """Left-acting mode operator ``xi_{L,k}`` for the local chain."""
    if p == 0 and abs(k) < 1e-12:
        return modes.eta_dag(0.0)  # flipped k = 0 label
    if abs(k) < 1e-12 or abs(abs(k) - math.pi) < 1e-12:
        return modes.eta(k)
    kk = abs(k)
    P = p_matrix(kk, d)
    if k > 0:
        Pi = np.linalg.inv(P)
        return Pi[0, 0] * modes.eta(kk) + Pi[0, 1] * modes.eta_dag(-kk)
    return P[0, 1] * modes.eta_dag(kk) + P[1, 1] * modes.eta(-kk)


def local_left_eigenvector(spec: CircuitSpec, pattern: OccupationPattern) -> np.ndarray:
    """Unnormalized left eigenvector (computational basis) for an occupation pattern.

    The vector does not depend on ``e_u``; its eigenvalue is
    :func:`local_eigenvalue`.
    """
    if spec.architecture != LOCAL:
        raise UnsupportedConfiguration("local eigenvectors need the local architecture")
    if spec.n > 10:
        raise UnsupportedConfiguration("eigenvector assembly supports n <= 10")
    modes = fermion_modes(spec.n)
    p = pattern.grid.p
    v = _vacuum(spec.n, p)
    for k in pattern.occupied():
        v = _apply_row(v, local_xi_left(modes, k, spec.d, p))
    if np.linalg.norm(v) < 1e-300:
        raise InvariantError("eigenvector assembly produced the zero vector")
    return v


# ---------------------------------------------------------------------------
# Brick-wall eigenvectors
# ---------------------------------------------------------------------------


def r_values(k: float, d: int, e_tilde: float) -> tuple[complex, complex]:
    """``r_{i,k} = (e~ - 2 - (-1)^i 2 sqrt(a_k^2 e~^2 + 1 - e~)) / (e~ (1 + 2 a_k))`` for ``i = 1, 2``."""
    ak = d * math.cos(k) / (d * d + 1)
    sq = cmath.sqrt(ak * ak * e_tilde * e_tilde + 1 - e_tilde)
    den = e_tilde * (1 + 2 * ak)
    return (e_tilde - 2 + 2 * sq) / den, (e_tilde - 2 - 2 * sq) / den


def w_matrix(k: float, d: int, e_tilde: float, convention: str) -> np.ndarray:
    """4x4 mode-mixing matrix for ``0 < k < pi/2``.

    Columns correspond to ``(k, pi-k, k-pi, -k)`` acting on the operator row
    ``(eta_k^dag, eta_{-k}, -eta_{k-pi}^dag, -eta_{pi-k})``.

    ``convention='plus'`` uses ``+iz tan(k/2)`` in row 2 together with
    ``r_1`` in the first column; ``'minus'`` uses ``-iz tan(k/2)`` with the
    ``r`` labels exchanged.
    """
    z = z_factor(d)
    r1, r2 = r_values(k, d, e_tilde)
    t, ct = math.tan(k / 2), 1 / math.tan(k / 2)
    if convention == "plus":
        return np.array(
            [
                [1, 1, 1, 1],
                [1j * z * t, 1j * z * t, -1j * ct, -1j * ct],
                [-1j * r1 * t, -1j * r2 * t, -1j * r2 * ct, -1j * r1 * ct],
                [-z * r1, -z * r2, r2, r1],
            ]
        )
    if convention == "minus":
        return np.array(
            [
                [1, 1, 1, 1],
                [-1j * z * t, -1j * z * t, -1j * ct, -1j * ct],
                [-1j * r2 * t, -1j * r1 * t, -1j * r1 * ct, -1j * r2 * ct],
                [z * r2, z * r1, r1, r2],
            ]
        )
    raise ValueError(convention)


def w_edge_matrix(k: float, d: int, e_tilde: float, convention: str) -> np.ndarray:
    """2x2 mixing matrices at ``k = 0`` (pair ``(0, pi)``) and ``k = pi/2`` (pair ``(pi/2, -pi/2)``).

    ``'plus'`` gives the ``k -> 0`` and ``k -> pi/2`` limits of the 4x4
    form; ``'minus'`` gives the alternative printed forms.
    """
    z = z_factor(d)
    if abs(k) < 1e-12:
        r1, r2 = r_values(0.0, d, e_tilde)
        if convention == "plus":
            return np.array([[1, 1], [-z * r1, -z * r2]])
        return np.array([[-r1, -r2], [1, 1]])
    if convention == "plus":
        return np.array([[1, 1], [1j * z, -1j]])
    return np.array([[1j, 1j / z], [1, 1]])


W_CONVENTIONS = ("minus", "plus")


def brickwall_modes(modes: EigenmodeSet, d: int, e_tilde: float, p: int, convention: str) -> dict:
    """Map each momentum of ``K_p`` to the operator applied when its bit is set.

    Non-negative momenta get the left mode ``zeta_{L,l}``; negative momenta
    the right mode ``zeta_{R,l}^dag``.
    """
    n = modes.n
    out = {}
    for k in momentum_grid(n, p).values:
        if abs(k) < 1e-12:
            W = w_edge_matrix(0.0, d, e_tilde, convention)
            ops = [modes.eta_dag(0.0), -modes.eta(math.pi)]
            opsd = [modes.eta(0.0), -modes.eta_dag(math.pi)]
            ls = [0.0, math.pi]
        elif abs(k - math.pi / 2) < 1e-12:
            W = w_edge_matrix(math.pi / 2, d, e_tilde, convention)
            ops = [modes.eta_dag(k), modes.eta(-k)]
            opsd = [modes.eta(k), modes.eta_dag(-k)]
            ls = [k, -k]
        elif 0 < k < math.pi / 2:
            W = w_matrix(k, d, e_tilde, convention)
            ops = [modes.eta_dag(k), modes.eta(-k), -modes.eta_dag(k - math.pi), -modes.eta(math.pi - k)]
            opsd = [modes.eta(k), modes.eta_dag(-k), -modes.eta(k - math.pi), -modes.eta_dag(math.pi - k)]
            ls = [k, math.pi - k, k - math.pi, -k]
        else:
            continue
        Wi = np.linalg.inv(W)
        for j, l in enumerate(ls):
            if l >= 0:
                op = sum(W[i, j] * ops[i] for i in range(len(ops)))
            else:
                op = sum(Wi[j, i] * opsd[i] for i in range(len(ops)))
            out[round(l, 9)] = op
    return out


@dataclass
class BrickwallEigenvector:
    vector: np.ndarray
    eigenvalue: complex
    convention: str
    residual: float
    tried: dict


def brickwall_left_eigenvector(
    spec: CircuitSpec, e_u: float, pattern: OccupationPattern, tol: float = 1e-6, M: np.ndarray | None = None
) -> BrickwallEigenvector:
    """Left eigenvector of the brick-wall solvable operator for an occupation pattern.

    The sign convention of the mode-mixing matrices is selected empirically:
    every convention in :data:`W_CONVENTIONS` is evaluated, and the one with
    the smallest relative residual ``|vM - lam v| / |v|`` is kept provided it
    is below ``tol``.  All residuals are reported in ``tried``.  The
    construction is regular at ``e_u = e_H``, so no one-sided limit is taken.

    Raises
    ------
    ValidationFailure
        If no convention satisfies the eigen-relation.
    """
    if spec.architecture != BRICKWALL:
        raise UnsupportedConfiguration("brick-wall eigenvectors need the brick-wall architecture")
    if spec.n > 8:
        raise UnsupportedConfiguration("brick-wall eigenvector assembly supports n <= 8")
    if e_u <= 0:
        raise InvariantError("brick-wall eigenvectors need e_u > 0")
    et = e_u / e_haar(spec.d)
    disp = FermionDispersion(spec.d, et)
    lam = brickwall_eigenvalue(pattern, disp)
    if M is None:
        M = build_moment(spec, solvable_weights(e_u, spec.d)).entries
    modes = fermion_modes(spec.n)
    p = pattern.grid.p
    neg = [k for k in pattern.occupied() if k < 0]
    pos = [k for k in pattern.occupied() if k >= 0]
    tried, vectors = {}, {}
    for conv in W_CONVENTIONS:
        ops = brickwall_modes(modes, spec.d, et, p, conv)
        v = _vacuum(spec.n, p)
        for k in neg + pos:
            v = _apply_row(v, ops[round(k, 9)])
        nv = np.linalg.norm(v)
        tried[conv] = float(np.linalg.norm(v @ M - lam * v) / nv) if nv > 0 else math.inf
        vectors[conv] = v
    best = min(tried, key=tried.get)
    if tried[best] > tol:
        raise ValidationFailure(f"no W convention satisfies the eigen-relation; residuals {tried}")
    return BrickwallEigenvector(vectors[best], lam, best, tried[best], tried)


# ---------------------------------------------------------------------------
# 4x4 mode-matrix check
# ---------------------------------------------------------------------------


@dataclass
class ModeMatrixCheck:
    """Result of the 4x4 mode-matrix diagonalization check."""

    k: float
    d: int
    e_tilde: float
    x: complex
    y: complex
    q: complex
    S1: np.ndarray = field(repr=False)
    S2: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray
    predicted: np.ndarray
    eig_error: float
    lambda_error: float
    reciprocal_error: float
    tol: float = 1e-9

    @property
    def ok(self) -> bool:
        return max(self.eig_error, self.lambda_error, self.reciprocal_error) <= self.tol


def s1_matrix(k: float, x: complex, y: complex) -> np.ndarray:
    c, s = math.cos(k), math.sin(k)
    return 0.5 * np.array(
        [
            [2 * x + y * c, -1j * (2 * x + y) * s, -1j * y * s, (2 * x + y) * c],
            [-1j * (2 * x - y) * s, -2 * x - y * c, (2 * x - y) * c, 1j * y * s],
            [1j * y * s, -(2 * x + y) * c, 2 * x - y * c, 1j * (2 * x + y) * s],
            [-(2 * x - y) * c, -1j * y * s, 1j * (2 * x - y) * s, -2 * x + y * c],
        ]
    )


def s2_matrix(k: float, x: complex, y: complex) -> np.ndarray:
    P = np.diag([1.0, 1.0, -1.0, -1.0])
    return P @ s1_matrix(k, x, y) @ P


def matched_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Max distance under an optimal one-to-one assignment."""
    from scipy.optimize import linear_sum_assignment

    C = np.abs(np.asarray(a)[:, None] - np.asarray(b)[None, :])
    r, c = linear_sum_assignment(C)
    return float(C[r, c].max()) if len(r) else 0.0


def mode_matrix_check(k: float, d: int, e_u: float, tol: float = 1e-9) -> ModeMatrixCheck:
    """Diagonalize ``exp(S2) exp(S1)`` and compare with the closed-form mode eigenvalues.

    Branch mismatches are reported through the error fields, not corrected.
    """
    if not 0 < k < math.pi / 2:
        raise InvariantError("the 4x4 check needs 0 < k < pi/2")
    et = e_u / e_haar(d)
    if et == 0 or abs(et - 1) < 1e-14:
        raise InvariantError("the 4x4 check is singular at e_u in {0, e_H}")
    y = cmath.log(complex(1 - et))  # principal branch: log|z| + i pi for z < 0
    x = -d / (d * d + 1) * y
    S1, S2 = s1_matrix(k, x, y), s2_matrix(k, x, y)
    Mk = scipy.linalg.expm(S2) @ scipy.linalg.expm(S1)
    q = 2 * x * cmath.sinh(y / 2) * math.cos(k) / y
    r = cmath.sqrt(q * q + 1)
    ey, emy = cmath.exp(y), cmath.exp(-y)
    pred = np.array([ey * (q + r) ** 2, ey * (q - r) ** 2, emy * (q + r) ** 2, emy * (q - r) ** 2])
    ev = np.linalg.eigvals(Mk)
    lam = brickwall_mode(k, d, e_u)
    return ModeMatrixCheck(
        k, d, et, x, y, q, S1, S2, ev, pred,
        eig_error=matched_distance(ev, pred),
        lambda_error=abs(pred[0] - lam),
        reciprocal_error=abs(pred[0] * pred[3] - 1),
        tol=tol,
    )


def all_patterns(n: int, p: int):
    """Iterate over every even-parity :class:`OccupationPattern` of sector ``p``."""
    grid = momentum_grid(n, p)
    for bits in itertools.product((0, 1), repeat=n):
        if sum(bits) % 2 == 0:
            yield OccupationPattern(grid, bits)


def random_pattern(n: int, p: int, rng: np.random.Generator) -> OccupationPattern:
    bits = rng.integers(0, 2, n)
    if bits.sum() % 2:
        bits[rng.integers(0, n)] ^= 1
    return OccupationPattern(momentum_grid(n, p), tuple(int(b) for b in bits))
