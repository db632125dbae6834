"""Two-qudit gates and their second-moment functionals.

A two-qudit gate ``u`` enters the second-moment operator of a structured
random circuit only through two numbers: the entangling power ``e_u`` and
the gate typicality ``g_u``.  This module computes both from a concrete
unitary, evaluates the four-copy matrix elements
``<s3 s4| u (x) u (x) conj(u) (x) conj(u) |s1 s2>`` between per-site identity
(``I``) and swap (``S``) permutation vectors, and assembles the 4x4
single-gate transfer block.

Conventions
-----------
* Gate matrices are ``d**2 x d**2`` and row-major over the product basis
  ``|a b>`` of qudit A (first, most significant) and qudit B.
* Labels ``I`` and ``S`` are encoded as ``0`` and ``1``.
* The transfer block is indexed ``(II, IS, SI, SS)``; its row is the output
  pair ``(s3, s4)`` and its column the input pair ``(s1, s2)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, InvariantError

UNITARITY_TOL = 1e-12
IMAG_TOL = 1e-10

LABELS = {"I": 0, "S": 1, 0: 0, 1: 1}

_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoQuditGate:
    """A two-qudit unitary.

    Parameters
    ----------
    d : int
        Local dimension (``>= 2``).
    entries : ndarray
        Complex ``d**2 x d**2`` matrix.
    tol : float
        Entrywise unitarity tolerance used at construction.
    """

    d: int
    entries: np.ndarray
    tol: float = field(default=UNITARITY_TOL, compare=False)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise InvariantError(f"local dimension must be an integer >= 2, got {self.d}")
        m = np.array(self.entries, dtype=complex)
        D = self.d * self.d
        if m.shape != (D, D):
            raise InvariantError(f"gate must be {D}x{D} for d={self.d}, got shape {m.shape}")
        dev = np.abs(m @ m.conj().T - np.eye(D)).max()
        if dev > self.tol:
            raise InvariantError(f"gate is not unitary: max |U U^dag - I| = {dev:.3e} > {self.tol:.1e}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dagger(self) -> "TwoQuditGate":
        return TwoQuditGate(self.d, self.entries.conj().T, self.tol)

    def __matmul__(self, other: "TwoQuditGate") -> "TwoQuditGate":
        if other.d != self.d:
            raise InvariantError("cannot multiply gates of different local dimension")
        return TwoQuditGate(self.d, self.entries @ other.entries, max(self.tol, other.tol))


@dataclass(frozen=True)
class CanonicalParams:
    """Qubit canonical parameters of ``exp(-i(alpha XX + beta YY + gamma ZZ))``."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for v in (self.alpha, self.beta, self.gamma):
            if not math.isfinite(v):
                raise InvariantError("canonical parameters must be finite reals")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)


@dataclass(frozen=True)
class EntanglementProfile:
    """Entangling power, gate typicality and the operator entanglements they derive from.

    Attributes
    ----------
    e_u, g_u : float
        Entangling power and gate typicality.
    E_u, E_u_swap : float
        Operator entanglement of ``u`` and of ``u @ SWAP``.
    d : int
        Local dimension.
    """

    e_u: float
    g_u: float
    E_u: float
    E_u_swap: float
    d: int

    @classmethod
    def from_eg(cls, e_u: float, g_u: float, d: int) -> "EntanglementProfile":
        """Build a profile from ``(e, g)`` alone, filling the operator entanglements."""
        f = (d * d - 1) / (2.0 * d * d)
        return cls(float(e_u), float(g_u), f * (e_u + 2 * g_u), f * (e_u - 2 * g_u + 2), int(d))

    def check(self, tol: float = 1e-10) -> None:
        """Raise :class:`InvariantError` if the stored quantities are inconsistent."""
        f = (self.d * self.d - 1) / (2.0 * self.d * self.d)
        if abs(self.E_u - f * (self.e_u + 2 * self.g_u)) > tol:
            raise InvariantError("E_u inconsistent with (e_u, g_u)")
        if abs(self.E_u_swap - f * (self.e_u - 2 * self.g_u + 2)) > tol:
            raise InvariantError("E_u_swap inconsistent with (e_u, g_u)")
        if not (-tol <= self.e_u <= 1 + tol and -tol <= self.g_u <= 1 + tol):
            raise InvariantError(f"(e_u, g_u) = ({self.e_u}, {self.g_u}) outside [0, 1]^2")

    def to_dict(self) -> dict:
        return {"d": self.d, "e_u": self.e_u, "g_u": self.g_u, "E_u": self.E_u, "E_u_swap": self.E_u_swap}


@dataclass(frozen=True)
class HaarReference:
    """Haar-averaged values of the gate functionals for local dimension ``d``."""

    d: int
    e_H: Fraction
    g_H: Fraction

    def e_tilde(self, e_u: float) -> float:
        """Entangling power normalized by its Haar value."""
        return e_u / float(self.e_H)


@dataclass(frozen=True)
class PauliSectorBasis:
    """Vectorized identity / swap permutations on two copies of one qudit and their duals.

    Vectors live in ``C^(d^2) (x) C^(d^2)`` flattened to length ``d**4``, with
    index order ``(a1, a2, a1', a2')`` where primed indices belong to the
    conjugate copies.
    """

    d: int
    vec_I: np.ndarray
    vec_S: np.ndarray
    vec_I_tilde: np.ndarray
    vec_S_tilde: np.ndarray

    def gram(self) -> np.ndarray:
        V = np.stack([self.vec_I, self.vec_S])
        return V @ V.T

    def biorthogonality(self) -> np.ndarray:
        """Matrix of ``<sigma | tau~>``; equals the identity."""
        V = np.stack([self.vec_I, self.vec_S])
        Vt = np.stack([self.vec_I_tilde, self.vec_S_tilde])
        return V @ Vt.T


# ---------------------------------------------------------------------------
# Construction helpers
# ---------------------------------------------------------------------------


def identity_gate(d: int) -> TwoQuditGate:
    return TwoQuditGate(d, np.eye(d * d))


def swap_gate(d: int) -> TwoQuditGate:
    """The two-qudit SWAP, ``|a b> -> |b a>``."""
    D = d * d
    perm = [b * d + a for a in range(d) for b in range(d)]
    return TwoQuditGate(d, np.eye(D)[perm])


def gate_from_canonical(params: CanonicalParams) -> TwoQuditGate:
    """Qubit gate ``exp(-i(alpha XX + beta YY + gamma ZZ))``.

    The three generators commute, so the exponential factorizes into
    ``cos(t) I - i sin(t) P`` terms.
    """
    out = np.eye(4, dtype=complex)
    for theta, P in zip(params.as_tuple(), (_PAULI_X, _PAULI_Y, _PAULI_Z)):
        PP = np.kron(P, P)
        out = out @ (math.cos(theta) * np.eye(4) - 1j * math.sin(theta) * PP)
    return TwoQuditGate(2, out)


def haar_random_gate(d: int, rng: np.random.Generator | None = None) -> TwoQuditGate:
    """Sample a Haar-random ``d**2 x d**2`` unitary (QR with phase-fixed diagonal)."""
    rng = np.random.default_rng() if rng is None else rng
    D = d * d
    Z = (rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D))) / math.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return TwoQuditGate(d, Q * ph)


def parse_gate(obj: dict, tol: float = UNITARITY_TOL) -> TwoQuditGate:
    """Build a gate from its JSON representation.

    Accepts ``{"d": int, "entries": [[re, im], ...]}`` (row-major, ``d**4``
    entries) or ``{"canonical": [alpha, beta, gamma]}``.
    """
    if not isinstance(obj, dict):
        raise InputError("gate description must be a JSON object")
    if "canonical" in obj:
        vals = obj["canonical"]
        try:
            a, b, c = (float(v) for v in vals)
        except (TypeError, ValueError) as exc:
            raise InputError(f"'canonical' must be three numbers: {exc}") from None
        return gate_from_canonical(CanonicalParams(a, b, c))
    if "d" not in obj or "entries" not in obj:
        raise InputError("gate JSON needs either 'canonical' or both 'd' and 'entries'")
    try:
        d = int(obj["d"])
        flat = np.array([complex(float(re), float(im)) for re, im in obj["entries"]])
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed gate entries: {exc}") from None
    if d < 2 or flat.size != d**4:
        raise InputError(f"expected {d**4} entries for d={d}, got {flat.size}")
    return TwoQuditGate(d, flat.reshape(d * d, d * d), tol)


def load_gate(path: str | Path, tol: float = UNITARITY_TOL) -> TwoQuditGate:
    """Read a gate JSON file (see :func:`parse_gate`)."""
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read gate file {path}: {exc}") from None
    return parse_gate(obj, tol)


def gate_to_json(u: TwoQuditGate) -> dict:
    return {"d": u.d, "entries": [[float(z.real), float(z.imag)] for z in u.entries.ravel()]}


# ---------------------------------------------------------------------------
# Four-copy contractions
# ---------------------------------------------------------------------------


def _label(s) -> int:
    try:
        return LABELS[s]
    except KeyError:
        raise InvariantError(f"permutation label must be 'I'/'S' or 0/1, got {s!r}") from None


def moment_element(u: TwoQuditGate, out: Sequence, inp: Sequence) -> complex:
    """``<s3 s4| u^{(x)2,2} |s1 s2>`` for unnormalized permutation vectors.

    Evaluated as a single index contraction of two copies of ``u`` and two of
    ``conj(u)``; the ``d**8`` four-copy operator is never formed.

    Parameters
    ----------
    u : TwoQuditGate
    out : pair of labels
        ``(s3, s4)`` on qudits A and B.
    inp : pair of labels
        ``(s1, s2)`` on qudits A and B.
    """
    d = u.d
    s3, s4 = (_label(s) for s in out)
    s1, s2 = (_label(s) for s in inp)
    t = u.entries.reshape(d, d, d, d)  # (out A, out B, in A, in B)
    oA, oB, iA, iB = "ab", "ce", "fg", "hi"

    def pick(lbls, s, c):
        return lbls[c if s == 0 else 1 - c]

    terms = [oA[0] + oB[0] + iA[0] + iB[0], oA[1] + oB[1] + iA[1] + iB[1]]
    for c in (0, 1):
        terms.append(pick(oA, s3, c) + pick(oB, s4, c) + pick(iA, s1, c) + pick(iB, s2, c))
    tc = t.conj()
    return complex(np.einsum(",".join(terms) + "->", t, t, tc, tc, optimize=True))


def operator_entanglement(u: TwoQuditGate) -> float:
    """Operator entanglement ``E(u) = 1 - <I S| u^{(x)2,2} |I S> / d**4``."""
    val = moment_element(u, ("I", "S"), ("I", "S"))
    return 1.0 - val.real / u.d**4


def entanglement_profile(u: TwoQuditGate) -> EntanglementProfile:
    """Entangling power and gate typicality from ``E(u)`` and ``E(u @ SWAP)``."""
    d = u.d
    Es = (d * d - 1) / (d * d)
    Eu = operator_entanglement(u)
    Eus = operator_entanglement(u @ swap_gate(d))
    e = (Eu + Eus - Es) / Es
    g = (Eu - Eus + Es) / (2 * Es)
    return EntanglementProfile(e, g, Eu, Eus, d)


def qubit_profile_closed_form(params: CanonicalParams) -> EntanglementProfile:
    """Qubit profile from the trigonometric closed forms of the two contractions."""
    c2 = [math.cos(2 * x) ** 2 for x in params.as_tuple()]
    s2 = [math.sin(2 * x) ** 2 for x in params.as_tuple()]
    iu = 4 * (1 + c2[0] * c2[1] + c2[1] * c2[2] + c2[2] * c2[0])
    ius = 4 * (1 + s2[0] * s2[1] + s2[1] * s2[2] + s2[2] * s2[0])
    Eu, Eus = 1 - iu / 16, 1 - ius / 16
    Es = 3 / 4
    return EntanglementProfile((Eu + Eus - Es) / Es, (Eu - Eus + Es) / (2 * Es), Eu, Eus, 2)


def haar_reference(d: int) -> HaarReference:
    """Haar averages ``e_H = (d^2-1)/(d^2+1)`` and ``g_H = 1/2`` as exact fractions."""
    if int(d) != d or d < 2:
        raise InvariantError(f"local dimension must be an integer >= 2, got {d}")
    d = int(d)
    return HaarReference(d, Fraction(d * d - 1, d * d + 1), Fraction(1, 2))


def e_haar(d: int) -> float:
    return (d * d - 1) / (d * d + 1)


def e_max(d: int) -> float:
    """Largest attainable entangling power: 2/3 for qubits, 1 for ``d >= 3``."""
    return 2.0 / 3.0 if d == 2 else 1.0


def solvable_residual(profile: EntanglementProfile, with_flag: bool = False):
    """``g_u - e_u / (2 e_H)``, the IS->SI transfer weight.

    Vanishes exactly on the solvable line.  For the identity gate
    (``e = g = 0``) the ratio ``e/g`` is undefined; the residual is still 0
    and, with ``with_flag=True``, the degeneracy flag is returned as well.

    Returns
    -------
    float or (float, bool)
    """
    r = profile.g_u - profile.e_u / (2 * e_haar(profile.d))
    degenerate = abs(profile.e_u) < 1e-12 and abs(profile.g_u) < 1e-12
    if degenerate:
        r = 0.0
    return (r, degenerate) if with_flag else r


def qubit_solvable_residual(params: CanonicalParams) -> float:
    """``f(a,b) + f(b,c) + f(c,a)`` with ``f(x1,x2) = sin^2 2x1 (cos^2 2x2 - 3/5)``."""

    def f(x1, x2):
        return math.sin(2 * x1) ** 2 * (math.cos(2 * x2) ** 2 - 0.6)

    a, b, c = params.as_tuple()
    return f(a, b) + f(b, c) + f(c, a)


def is_feasible(e_u: float, g_u: float, d: int, tol: float = 1e-10) -> bool:
    """Known feasibility constraints on ``(e_u, g_u)``.

    For qubits these are necessary and sufficient.  For ``d >= 3`` the
    region is only known numerically, so only ``0 <= e <= 1``, ``0 <= g <= 1``
    and the dimension-independent inequalities are applied.
    """
    if not (-tol <= e_u <= e_max(d) + tol and -tol <= g_u <= 1 + tol):
        return False
    if d == 2:
        return (2 * g_u * (1 - g_u) <= e_u + tol) and (e_u <= 2 * g_u + tol) and (e_u <= 2 - 2 * g_u + tol)
    return True


# ---------------------------------------------------------------------------
# Weingarten block
# ---------------------------------------------------------------------------


def pauli_sector_basis(d: int) -> PauliSectorBasis:
    """Vectorized ``|I>``, ``|S>`` on two copies of one qudit and the dual pair."""
    eye = np.eye(d)
    vI = np.einsum("ac,bd->abcd", eye, eye).reshape(-1)  # delta(a1,a1') delta(a2,a2')
    vS = np.einsum("ad,bc->abcd", eye, eye).reshape(-1)  # delta(a1,a2') delta(a2,a1')
    f = 1.0 / (d * d - 1)
    return PauliSectorBasis(d, vI, vS, f * (vI - vS / d), f * (vS - vI / d))


def weingarten_element(u: TwoQuditGate, sigmas: Sequence, tol: float = IMAG_TOL) -> float:
    """``(<s3| (x) <s4|) u^{(x)2,2} (|s1~> (x) |s2~>)`` for ``sigmas = (s1, s2, s3, s4)``.

    The dual vectors are expanded as ``|s~> = (|s> - |s'>/d)/(d^2-1)`` so the
    element is a combination of four :func:`moment_element` contractions.
    """
    s1, s2, s3, s4 = (_label(s) for s in sigmas)
    d = u.d
    f = 1.0 / (d * d - 1)
    total = 0j
    for t1 in (0, 1):
        c1 = f * (1.0 if t1 == s1 else -1.0 / d)
        for t2 in (0, 1):
            c2 = f * (1.0 if t2 == s2 else -1.0 / d)
            total += c1 * c2 * moment_element(u, (s3, s4), (t1, t2))
    if abs(total.imag) > tol:
        raise InvariantError(f"Weingarten element has imaginary part {total.imag:.3e}")
    return float(total.real)


_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))


def weingarten_matrix(u: TwoQuditGate) -> np.ndarray:
    """The 4x4 transfer block contracted directly from ``u`` (rows = output pair)."""
    return np.array([[weingarten_element(u, (i1, i2, o1, o2)) for (i1, i2) in _PAIRS] for (o1, o2) in _PAIRS])


def transfer_block(a: float, b: float, c: float) -> np.ndarray:
    """The 4x4 block with rows ``(1,0,0,0), (a,1+b,c,a), (a,c,1+b,a), (0,0,0,1)``."""
    return np.array(
        [[1.0, 0.0, 0.0, 0.0], [a, 1.0 + b, c, a], [a, c, 1.0 + b, a], [0.0, 0.0, 0.0, 1.0]]
    )


def block_coefficients(e_u: float, g_u: float, d: int) -> tuple[float, float, float]:
    """``(a, b, c)`` of the transfer block from ``(e_u, g_u)``."""
    et = e_u / e_haar(d)
    return d * et / (d * d + 1), -et / 2 - g_u, -et / 2 + g_u


def weingarten_matrix_from_profile(profile: EntanglementProfile) -> np.ndarray:
    """The transfer block parametrized by ``(e_u, g_u)`` only."""
    return transfer_block(*block_coefficients(profile.e_u, profile.g_u, profile.d))


def iter_canonical_gates(rng: np.random.Generator, count: int) -> Iterable[CanonicalParams]:
    """Random canonical parameters, uniform on ``[0, pi)^3``."""
    for _ in range(count):
        a, b, c = rng.uniform(0, math.pi, 3)
        yield CanonicalParams(float(a), float(b), float(c))
