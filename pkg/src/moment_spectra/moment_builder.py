"""Second-moment operators of one-dimensional structured random circuits.

The moment operator acts on the ``2**n``-dimensional span of per-site
identity/swap vectors.  In the *computational* representation a basis state
is a bitstring over ``{I, S}`` (``I = 0``, ``S = 1``) with site 0 the most
significant bit; the entry ``M[r, c]`` is the transfer weight from input
configuration ``c`` to output configuration ``r``.  Eigenvectors of physical
interest are *left* eigenvectors, i.e. row vectors ``v`` with ``v @ M = lam * v``.

Two architectures with periodic boundary are supported:

* ``local``: a single gate on a uniformly random bond,
  ``M = (1/n) sum_i B_{i,i+1}``.
* ``brickwall``: ``M = T2 @ T1`` with ``T1`` acting on bonds ``(0,1), (2,3), ...``
  and ``T2`` on ``(1,2), ..., (n-1, 0)``.

The *orthonormal* representation conjugates each site by a fixed 2x2
matrix so that the local operator becomes symmetric.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError, InvariantError, UnsupportedConfiguration
from .gate_algebra import (
    EntanglementProfile,
    block_coefficients,
    e_haar,
    transfer_block,
)

LOCAL = "local"
BRICKWALL = "brickwall"
ARCHITECTURES = (LOCAL, BRICKWALL)
COMPUTATIONAL = "computational"
ORTHONORMAL = "orthonormal"
DEFAULT_N_CAP = 12


@dataclass(frozen=True)
class CircuitSpec:
    """Circuit geometry.

    Parameters
    ----------
    n : int
        Number of qudits.
    d : int
        Local dimension.
    architecture : {'local', 'brickwall'}
    boundary : str
        Only ``'periodic'`` is implemented.
    n_cap : int
        Largest ``n`` for which a dense matrix may be built.
    """

    n: int
    d: int
    architecture: str = LOCAL
    boundary: str = "periodic"
    n_cap: int = DEFAULT_N_CAP

    def __post_init__(self):
        arch = self.architecture.lower().replace("-", "").replace("_", "")
        if arch not in ARCHITECTURES:
            raise UnsupportedConfiguration(f"unknown architecture {self.architecture!r}")
        object.__setattr__(self, "architecture", arch)
        if self.boundary != "periodic":
            raise UnsupportedConfiguration("only periodic boundary conditions are implemented")
        if self.d < 2:
            raise InvariantError("local dimension must be >= 2")
        if arch == LOCAL and self.n < 3:
            raise UnsupportedConfiguration("local architecture needs n >= 3")
        if arch == BRICKWALL and (self.n < 4 or self.n % 2):
            raise UnsupportedConfiguration("brick-wall architecture needs even n >= 4")

    @property
    def dim(self) -> int:
        return 2**self.n

    def check_cap(self) -> None:
        if self.n > self.n_cap:
            raise UnsupportedConfiguration(
                f"n = {self.n} exceeds the dense-matrix cap n <= {self.n_cap} ({2**self.n_cap}^2 entries)"
            )

    def to_dict(self) -> dict:
        return {"n": self.n, "d": self.d, "architecture": self.architecture, "boundary": self.boundary}


@dataclass(frozen=True)
class GateWeights:
    """Transfer-block coefficients ``(a, b, c)``; ``b'' = 1 + b`` is the IS->IS entry."""

    a: float
    b: float
    c: float
    d: int
    e_u: float = float("nan")
    g_u: float = float("nan")

    @property
    def b_prime_prime(self) -> float:
        return 1.0 + self.b

    def block(self) -> np.ndarray:
        return transfer_block(self.a, self.b, self.c)


@dataclass(frozen=True)
class MomentMatrix:
    """Dense real moment operator with its provenance."""

    spec: CircuitSpec
    basis: str
    entries: np.ndarray
    weights: GateWeights

    def sidecar(self) -> dict:
        out = self.spec.to_dict()
        out.update({"basis": self.basis, "e_u": self.weights.e_u, "g_u": self.weights.g_u,
                    "dtype": "float64", "order": "row-major", "shape": list(self.entries.shape)})
        return out

    def export(self, path: str | Path) -> tuple[Path, Path]:
        """Write raw float64 row-major bytes to ``path`` and a JSON sidecar next to it."""
        path = Path(path)
        side = path.with_suffix(path.suffix + ".json")
        try:
            np.ascontiguousarray(self.entries, dtype="<f8").tofile(path)
            side.write_text(json.dumps(self.sidecar(), indent=2))
        except OSError as exc:
            raise InputError(f"cannot write moment matrix to {path}: {exc}") from None
        return path, side


@dataclass(frozen=True)
class BasisChange:
    """Per-site map from the biorthogonal ``{I~, S~}`` labels to the orthonormal ``{+, -}`` pair."""

    d: int
    W: np.ndarray = field(repr=False)
    W_inv: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class V1Subspace:
    """The two-dimensional eigenvalue-1 subspace in orthonormal coordinates.

    Attributes
    ----------
    raw : ndarray, shape (2, 2**n)
        Coordinates of ``|I>^n`` and ``|S>^n``.
    basis : ndarray, shape (2**n, 2)
        Orthonormal basis of V1 (columns).
    complement : ndarray, shape (2**n, 2**n - 2)
        Orthonormal basis of V1-perp (columns).
    projector : ndarray
        Orthogonal projector onto V1-perp.
    """

    n: int
    d: int
    raw: np.ndarray = field(repr=False)
    basis: np.ndarray = field(repr=False)
    complement: np.ndarray = field(repr=False)
    projector: np.ndarray = field(repr=False)

    def gram(self) -> np.ndarray:
        return self.raw @ self.raw.T


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------


def gate_weights(profile: EntanglementProfile) -> GateWeights:
    """``a = d e~/(d^2+1)``, ``b = -e~/2 - g``, ``c = -e~/2 + g`` with ``e~ = e/e_H``."""
    a, b, c = block_coefficients(profile.e_u, profile.g_u, profile.d)
    return GateWeights(a, b, c, profile.d, profile.e_u, profile.g_u)


def weights_from_eg(e_u: float, g_u: float, d: int) -> GateWeights:
    return gate_weights(EntanglementProfile.from_eg(e_u, g_u, d))


def solvable_weights(e_u: float, d: int) -> GateWeights:
    """Weights on the solvable line ``g = e / (2 e_H)``."""
    return weights_from_eg(e_u, e_u / (2 * e_haar(d)), d)


# ---------------------------------------------------------------------------
# Bit-indexed embedding
# ---------------------------------------------------------------------------


def embed_block(B: np.ndarray, n: int, i: int, j: int) -> np.ndarray:
    """Embed a 4x4 block acting on sites ``(i, j)`` into a dense ``2**n`` matrix.

    Pure index arithmetic: for each of the 4 input sub-configurations the
    column index is obtained from the row index by overwriting bits ``i, j``.
    """
    N = 2**n
    si, sj = n - 1 - i, n - 1 - j
    rows = np.arange(N)
    rb = (((rows >> si) & 1) << 1) | ((rows >> sj) & 1)
    clear = rows & ~((1 << si) | (1 << sj))
    out = np.zeros((N, N), dtype=np.result_type(B, float))
    for cb in range(4):
        cols = clear | ((cb >> 1) << si) | ((cb & 1) << sj)
        out[rows, cols] += B[rb, cb]
    return out


def apply_block_left(X: np.ndarray, B: np.ndarray, n: int, i: int, j: int) -> np.ndarray:
    """Return ``embed_block(B, n, i, j) @ X`` without forming the embedded matrix."""
    m = X.shape[1]
    T = X.reshape((2,) * n + (m,))
    Bt = B.reshape(2, 2, 2, 2)
    T = np.tensordot(Bt, T, axes=([2, 3], [i, j]))  # new axes 0,1 are sites i,j
    T = np.moveaxis(T, (0, 1), (i, j))
    return T.reshape(2**n, m)


def apply_site_left(X: np.ndarray, A: np.ndarray, n: int, i: int) -> np.ndarray:
    """``(I (x) .. A_i .. (x) I) @ X`` for a 2x2 matrix ``A`` on site ``i``."""
    m = X.shape[1]
    T = X.reshape((2,) * n + (m,))
    T = np.moveaxis(np.tensordot(A, T, axes=([1], [i])), 0, i)
    return T.reshape(2**n, m)


def _brickwall_layers(n: int, B: np.ndarray, X: np.ndarray, which: int) -> np.ndarray:
    start = 0 if which == 1 else 1
    for i in range(start, n, 2):
        X = apply_block_left(X, B, n, i, (i + 1) % n)
    return X


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def build_local_moment(spec: CircuitSpec, weights: GateWeights) -> MomentMatrix:
    """``M = I - (1/n) sum_i A_{i,i+1}`` with ``A = I_4 - B`` on each periodic bond."""
    if spec.architecture != LOCAL:
        raise UnsupportedConfiguration("build_local_moment needs the local architecture")
    spec.check_cap()
    n = spec.n
    A = np.eye(4) - weights.block()
    H = np.zeros((spec.dim, spec.dim))
    for i in range(n):
        H += embed_block(A, n, i, (i + 1) % n)
    M = np.eye(spec.dim) - H / n
    return MomentMatrix(spec, COMPUTATIONAL, M, weights)


def brickwall_layers(spec: CircuitSpec, weights: GateWeights) -> tuple[np.ndarray, np.ndarray]:
    """The two staggered layers ``(T1, T2)`` as dense matrices."""
    spec.check_cap()
    B = weights.block()
    eye = np.eye(spec.dim)
    return _brickwall_layers(spec.n, B, eye, 1), _brickwall_layers(spec.n, B, eye, 2)


def build_brickwall_moment(spec: CircuitSpec, weights: GateWeights) -> MomentMatrix:
    """``M = T2 @ T1`` for the periodic brick-wall circuit."""
    if spec.architecture != BRICKWALL:
        raise UnsupportedConfiguration("build_brickwall_moment needs the brick-wall architecture")
    if spec.n % 2:
        raise UnsupportedConfiguration("brick-wall architecture needs even n")
    spec.check_cap()
    B = weights.block()
    M = _brickwall_layers(spec.n, B, np.eye(spec.dim), 1)
    M = _brickwall_layers(spec.n, B, M, 2)
    return MomentMatrix(spec, COMPUTATIONAL, M, weights)


def build_moment(spec: CircuitSpec, weights: GateWeights) -> MomentMatrix:
    """Dispatch on ``spec.architecture``."""
    if spec.architecture == LOCAL:
        return build_local_moment(spec, weights)
    return build_brickwall_moment(spec, weights)


# ---------------------------------------------------------------------------
# Orthonormal representation
# ---------------------------------------------------------------------------


def basis_change(d: int) -> BasisChange:
    """Per-site matrix ``W`` with rows ``(+, -)`` and columns ``(I, S)``.

    ``W = (2d)^{-1/2} [[1/sqrt(d+1), 1/sqrt(d+1)], [1/sqrt(d-1), -1/sqrt(d-1)]]``.
    """
    p, m = 1 / math.sqrt(d + 1), 1 / math.sqrt(d - 1)
    W = np.array([[p, p], [m, -m]]) / math.sqrt(2 * d)
    return BasisChange(d, W, np.linalg.inv(W))


def to_orthonormal_basis(M: MomentMatrix) -> MomentMatrix:
    """Conjugate by ``W^{(x)n}``: ``M_pm = W^{(x)n} M W^{-(x)n}``."""
    if M.basis != COMPUTATIONAL:
        raise InvariantError("matrix is already in the orthonormal basis")
    n = M.spec.n
    bc = basis_change(M.spec.d)
    X = M.entries
    for i in range(n):
        X = apply_site_left(X, bc.W, n, i)
    X = X.T
    for i in range(n):
        X = apply_site_left(X, bc.W_inv.T, n, i)
    return MomentMatrix(M.spec, ORTHONORMAL, np.ascontiguousarray(X.T), M.weights)


def pm_generators(d: int) -> tuple[np.ndarray, np.ndarray]:
    """The two positive semi-definite 4x4 bond pieces in ``(++, +-, -+, --)`` order.

    The orthonormal-basis bond Hamiltonian is ``e * Pe + g * Pg``.
    """
    Pe = np.array(
        [
            [(d - 1) / (2 * (d + 1)), 0, 0, -0.5],
            [0, 0, 0, 0],
            [0, 0, 0, 0],
            [-0.5, 0, 0, (d + 1) / (2 * (d - 1))],
        ]
    )
    Pg = np.array([[0, 0, 0, 0], [0, 1, -1, 0], [0, -1, 1, 0], [0, 0, 0, 0]], dtype=float)
    return Pe, Pg


def build_pm_local_hamiltonian(e_u: float, g_u: float, spec: CircuitSpec) -> np.ndarray:
    """Symmetric ``H = sum_i (e Pe + g Pg)_{i,i+1}``; the local operator is ``I - H/n``."""
    if spec.architecture != LOCAL:
        raise UnsupportedConfiguration("the orthonormal Hamiltonian is defined for the local architecture")
    spec.check_cap()
    Pe, Pg = pm_generators(spec.d)
    for P in (Pe, Pg):
        if np.linalg.eigvalsh(P).min() < -1e-12:
            raise InvariantError("bond generator is not positive semi-definite")
    A = e_u * Pe + g_u * Pg
    H = np.zeros((spec.dim, spec.dim))
    for i in range(spec.n):
        H += embed_block(A, spec.n, i, (i + 1) % spec.n)
    return H


def v1_subspace(n: int, d: int) -> V1Subspace:
    """Orthonormal coordinates of ``span{|I>^n, |S>^n}`` and its complement."""
    wI = np.array([math.sqrt(d * (d + 1) / 2), math.sqrt(d * (d - 1) / 2)])
    wS = np.array([wI[0], -wI[1]])
    rI, rS = np.ones(1), np.ones(1)
    for _ in range(n):
        rI, rS = np.kron(rI, wI), np.kron(rS, wS)
    raw = np.stack([rI, rS])
    Q, R = np.linalg.qr(raw.T, mode="complete")
    if abs(R[1, 1]) < 1e-10 * abs(R[0, 0]):
        raise InvariantError("identity and swap product vectors are numerically dependent")
    basis, comp = Q[:, :2], Q[:, 2:]
    return V1Subspace(n, d, raw, basis, comp, comp @ comp.T)


def positivity_gap(e_u: float, g_u: float, spec: CircuitSpec) -> float:
    """Minimum eigenvalue of ``M_Haar - M_u`` restricted to V1-perp (orthonormal basis).

    A non-negative value certifies that ``u`` is at least as random as the
    Haar two-qudit gate in the positivity order.
    """
    if spec.architecture != LOCAL:
        raise UnsupportedConfiguration("positivity comparison is defined for the local architecture")
    H_u = build_pm_local_hamiltonian(e_u, g_u, spec)
    H_h = build_pm_local_hamiltonian(e_haar(spec.d), 0.5, spec)
    diff = (H_u - H_h) / spec.n  # = M_Haar - M_u
    C = v1_subspace(spec.n, spec.d).complement
    R = C.T @ diff @ C
    return float(np.linalg.eigvalsh((R + R.T) / 2).min())


def spin_flip_permutation(n: int) -> np.ndarray:
    """Index permutation implementing the bit complement ``I <-> S`` on every site."""
    return (2**n - 1) ^ np.arange(2**n)
