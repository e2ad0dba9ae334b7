"""GKLS system model, its exact superoperator and Bloch-affine forms.

Vectorisation is column stacking throughout: ``vec(X) = X.T.reshape(-1)``,
so that ``vec(A X B) = (B^T kron A) vec(X)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import algebra
from .algebra import (
    IDENTITY,
    HermitianAxis,
    anticommutator,
    as_operator,
    commutator,
    dagger,
    pauli_vector,
    traceless_part,
)
from .exceptions import (
    InvalidBasis,
    InvalidSystem,
    NotUnitary,
    UnsupportedTermCount,
    ZeroScale,
)

TOL_CLOSURE = 1e-9
TOL_UNITARY = 1e-10


@dataclass(frozen=True, eq=False)
class JumpTerm:
    rate: float
    op: np.ndarray

    def __post_init__(self):
        rate = float(self.rate)
        if not np.isfinite(rate) or rate < 0:
            raise InvalidSystem(f"jump rate must be finite and >= 0, got {self.rate!r}")
        object.__setattr__(self, "rate", rate)
        object.__setattr__(self, "op", as_operator(self.op))


@dataclass(frozen=True, eq=False)
class GklsSystem:
    """Hamiltonian plus rate-weighted jump operators.

    ``drho/dt = -i[H, rho] + sum_i rate_i (L rho L^+ - {L^+ L, rho} / 2)``
    """

    hamiltonian: np.ndarray
    terms: tuple = ()

    def __post_init__(self):
        H = as_operator(self.hamiltonian)
        if not algebra.is_hermitian(H):
            raise InvalidSystem("Hamiltonian is not Hermitian")
        terms = tuple(t if isinstance(t, JumpTerm) else JumpTerm(*t) for t in self.terms)
        object.__setattr__(self, "hamiltonian", H)
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_ops(cls, hamiltonian, terms: Sequence) -> "GklsSystem":
        """Build from ``[(rate, op), ...]``."""
        return cls(hamiltonian, tuple(JumpTerm(r, L) for r, L in terms))

    @property
    def rates(self):
        return [t.rate for t in self.terms]

    @property
    def ops(self):
        return [t.op for t in self.terms]


def vec(X) -> np.ndarray:
    return np.asarray(X).T.reshape(-1)


def unvec(v) -> np.ndarray:
    v = np.asarray(v)
    n = int(round(np.sqrt(v.size)))
    return v.reshape(n, n).T


def dissipator_apply(L, rho) -> np.ndarray:
    """``L rho L^+ - {L^+ L, rho} / 2``."""
    L, rho = np.asarray(L), np.asarray(rho)
    LdL = dagger(L) @ L
    return L @ rho @ dagger(L) - 0.5 * anticommutator(LdL, rho)


def generator_apply(sys: GklsSystem, rho) -> np.ndarray:
    """Right-hand side of the master equation evaluated at ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    out = -1j * commutator(sys.hamiltonian, rho)
    for t in sys.terms:
        out = out + t.rate * dissipator_apply(t.op, rho)
    return out


def _left(A):
    return np.kron(IDENTITY, A)


def _right(B):
    return np.kron(np.asarray(B).T, IDENTITY)


def liouvillian_matrix(sys: GklsSystem) -> np.ndarray:
    """4x4 complex generator acting on column-stacked density matrices."""
    H = sys.hamiltonian
    out = -1j * (_left(H) - _right(H))
    for t in sys.terms:
        L = t.op
        LdL = dagger(L) @ L
        out = out + t.rate * (np.kron(L.conj(), L) - 0.5 * _left(LdL) - 0.5 * _right(LdL))
    return out


# ---------------------------------------------------------------------------
# Bloch-affine representation
# ---------------------------------------------------------------------------

PAULI_BASIS = (
    HermitianAxis([1.0, 0.0, 0.0]),
    HermitianAxis([0.0, 1.0, 0.0]),
    HermitianAxis([0.0, 0.0, 1.0]),
)
PAULI_HALF_BASIS = tuple(a.to_half() for a in PAULI_BASIS)


@dataclass(frozen=True, eq=False)
class AffineBlochGenerator:
    """``dr/dt = m @ r + drive`` for ``rho = I/2 + sum_i r_i B_i``.

    ``B_i`` are the operators of ``basis`` in their own normalisation: with a
    half-normalised basis ``r`` is the usual Bloch vector, with a full one it
    is half of it.
    """

    m: np.ndarray
    drive: np.ndarray
    basis: tuple

    def rhs(self, r) -> np.ndarray:
        return self.m @ np.asarray(r, dtype=float) + self.drive

    def to_density(self, r) -> np.ndarray:
        return bloch_to_density(r, self.basis)

    def from_density(self, rho) -> np.ndarray:
        return density_to_bloch(rho, self.basis)


def _check_basis(basis):
    if len(basis) != 3:
        raise InvalidBasis("basis must contain three axes")
    if len({a.half for a in basis}) != 1:
        raise InvalidBasis("basis mixes normalisation conventions")
    gram = np.array([[np.dot(a.unit, b.unit) for b in basis] for a in basis])
    if np.abs(gram - np.eye(3)).max() > algebra.TOL_NORM:
        raise InvalidBasis("basis axes are not orthonormal")


def bloch_to_density(r, basis) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return IDENTITY / 2 + sum(ri * a.op for ri, a in zip(r, basis))


def density_to_bloch(rho, basis) -> np.ndarray:
    v = pauli_vector(rho).real
    return np.array([np.dot(a.v, v) / np.dot(a.v, a.v) for a in basis])


def bloch_generator(sys: GklsSystem, basis=PAULI_BASIS) -> AffineBlochGenerator:
    """Real affine generator of ``sys`` in the coordinates of ``basis``."""
    basis = tuple(basis)
    _check_basis(basis)
    norm2 = np.dot(basis[0].v, basis[0].v)
    images = [pauli_vector(generator_apply(sys, a.op)).real for a in basis]
    m = np.array([[np.dot(a.v, img) for img in images] for a in basis]) / norm2
    d_img = pauli_vector(generator_apply(sys, IDENTITY / 2)).real
    drive = np.array([np.dot(a.v, d_img) for a in basis]) / norm2
    return AffineBlochGenerator(m, drive, basis)


# ---------------------------------------------------------------------------
# Form-preserving transforms
# ---------------------------------------------------------------------------


def transform_energy_shift(sys: GklsSystem, E0: float) -> GklsSystem:
    """``H -> H - E0 I``."""
    return GklsSystem(sys.hamiltonian - E0 * IDENTITY, sys.terms)


def transform_rescale(sys: GklsSystem, i: int, alpha: complex) -> GklsSystem:
    """``L_i -> alpha L_i`` and ``rate_i -> rate_i / |alpha|^2``."""
    if alpha == 0:
        raise ZeroScale("rescaling factor must be nonzero")
    terms = list(sys.terms)
    t = terms[i]
    terms[i] = JumpTerm(t.rate / abs(alpha) ** 2, alpha * t.op)
    return GklsSystem(sys.hamiltonian, tuple(terms))


def transform_identity_shift(sys: GklsSystem, alphas) -> GklsSystem:
    """``L_i -> L_i - alpha_i I`` with the compensating Hamiltonian correction.

    The correction is ``H -> H - sum_i rate_i / (2i) (alpha_i^* L_i - alpha_i L_i^+)``.
    """
    alphas = np.broadcast_to(np.asarray(alphas, dtype=complex), (len(sys.terms),))
    H = sys.hamiltonian.copy()
    terms = []
    for a, t in zip(alphas, sys.terms):
        L = t.op
        H = H - t.rate / 2j * (np.conj(a) * L - a * dagger(L))
        terms.append(JumpTerm(t.rate, L - a * IDENTITY))
    # Hermitian up to rounding; symmetrise so the constructor check is exact
    H = (H + dagger(H)) / 2
    return GklsSystem(H, tuple(terms))


def transform_unitary_mix(sys: GklsSystem, U) -> GklsSystem:
    """Mix rate-absorbed jump operators with a unitary ``U``; output rates are 1."""
    U = np.asarray(U, dtype=complex)
    n = len(sys.terms)
    if U.shape != (n, n):
        raise NotUnitary(f"mixing matrix must be {n}x{n}, got {U.shape}")
    if np.abs(U @ dagger(U) - np.eye(n)).max() > TOL_UNITARY:
        raise NotUnitary("mixing matrix is not unitary")
    K = np.array([np.sqrt(t.rate) * t.op for t in sys.terms])
    M = np.einsum("ik,kab->iab", U, K)
    return GklsSystem(sys.hamiltonian, tuple(JumpTerm(1.0, Mi) for Mi in M))


# ---------------------------------------------------------------------------
# Input classification
# ---------------------------------------------------------------------------


class Classification(enum.Enum):
    PureDephasing = "PureDephasing"
    ExchangeCandidate = "ExchangeCandidate"
    AdjointNotClosed = "AdjointNotClosed"
    Collinear = "Collinear"


def _rank(mat, tol) -> int:
    s = np.linalg.svd(mat, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * max(1.0, s[0])))


def _hermitian_up_to_phase(c, tol) -> bool:
    # c . sigma = e^{i phi} (Hermitian)  <=>  Re c and Im c are parallel
    scale = np.vdot(c, c).real
    return bool(np.linalg.norm(np.cross(c.real, c.imag)) <= tol * max(scale, 1e-300))


def effective_vectors(sys: GklsSystem, tol=TOL_CLOSURE):
    """Pauli vectors of ``sqrt(rate) * traceless(L)`` for the non-trivial terms."""
    out = []
    for t in sys.terms:
        c = np.sqrt(t.rate) * pauli_vector(traceless_part(t.op))
        if np.linalg.norm(c) > tol:
            out.append(c)
    return out


def classify_input(sys: GklsSystem, tol=TOL_CLOSURE) -> Classification:
    """Decide whether ``sys`` can be cast as an exchange process.

    Identity components of jump operators are ignored: they only feed the
    Hamiltonian. Two jump operators whose complex span is two-dimensional and
    closed under the adjoint are an ``ExchangeCandidate`` (this takes
    precedence over ``PureDephasing`` when both are Hermitian, e.g.
    ``sigma_x, sigma_y``).
    """
    if len(sys.terms) > 2:
        raise UnsupportedTermCount(f"{len(sys.terms)} jump terms; at most 2 are supported")
    vecs = effective_vectors(sys, tol)
    if not vecs:
        return Classification.PureDephasing
    stack = np.array(vecs)
    rank = _rank(stack, tol)
    if rank == 2:
        closed = _rank(np.vstack([stack, stack.conj()]), tol) == 2
        return Classification.ExchangeCandidate if closed else Classification.AdjointNotClosed
    if all(_hermitian_up_to_phase(c, tol) for c in vecs):
        return Classification.PureDephasing
    if len(vecs) == 2:
        return Classification.Collinear
    return Classification.AdjointNotClosed
