"""Exact algebra of 2x2 complex operators.

Operators are plain ``numpy`` arrays of shape ``(2, 2)`` and dtype complex.
Traceless Hermitian operators are also carried as :class:`HermitianAxis`,
a real Pauli 3-vector tagged with its normalisation convention:

* full: ``A @ A == I`` (Pauli vector of unit length),
* half: ``|A| = 1/2`` (Pauli vector of length 1/2), used for charge,
  dephasing and Hamiltonian axes of the physical form.

The Hilbert-Schmidt inner product is fixed to ``Tr(X^dagger Y) / 2`` so that
full-normalised axes have unit norm and Pauli 3-vectors are an isometric
model of the traceless Hermitian operators.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import CollinearInput, InvalidBasis

TOL_HERM = 1e-10
TOL_NORM = 1e-10
TOL_COLLINEAR = 1e-9

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)

#: ``PAULI[k]`` for k = 0..3 is I, sigma_x, sigma_y, sigma_z.
PAULI = np.stack([IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z])


def as_operator(M) -> np.ndarray:
    """Return ``M`` as a fresh complex ``(2, 2)`` array."""
    arr = np.array(M, dtype=complex)
    if arr.shape != (2, 2):
        raise ValueError(f"expected a 2x2 operator, got shape {arr.shape}")
    return arr


class PauliCoeffs(NamedTuple):
    c0: complex
    cx: complex
    cy: complex
    cz: complex

    @property
    def vector(self) -> np.ndarray:
        """The (cx, cy, cz) part as a complex 3-vector."""
        return np.array([self.cx, self.cy, self.cz], dtype=complex)

    def to_operator(self) -> np.ndarray:
        return np.tensordot(np.array(self, dtype=complex), PAULI, axes=1)


def pauli_decompose(M) -> PauliCoeffs:
    """Expand ``M = c0 I + cx sx + cy sy + cz sz``; ``c_k = Tr(P_k M) / 2``."""
    M = as_operator(M)
    c = np.einsum("kij,ji->k", PAULI, M) / 2
    return PauliCoeffs(*(complex(x) for x in c))


def pauli_vector(M) -> np.ndarray:
    """Complex 3-vector of sigma coefficients of ``M`` (identity part dropped)."""
    return pauli_decompose(M).vector


def from_pauli_vector(v, c0=0.0) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return c0 * IDENTITY + np.tensordot(v, PAULI[1:], axes=1)


def dagger(M) -> np.ndarray:
    return np.conj(np.asarray(M)).T


def is_hermitian(M, tol=TOL_HERM) -> bool:
    M = np.asarray(M)
    return bool(np.abs(M - dagger(M)).max() <= tol)


def traceless_part(M) -> np.ndarray:
    M = as_operator(M)
    return M - np.trace(M) / 2 * IDENTITY


def hs_inner(X, Y) -> complex:
    """``<X, Y> = Tr(X^dagger Y) / 2``."""
    return complex(np.trace(dagger(X) @ np.asarray(Y)) / 2)


def hs_norm(X) -> float:
    return float(np.sqrt(hs_inner(X, X).real))


def commutator(X, Y) -> np.ndarray:
    X, Y = np.asarray(X), np.asarray(Y)
    return X @ Y - Y @ X


def anticommutator(X, Y) -> np.ndarray:
    X, Y = np.asarray(X), np.asarray(Y)
    return X @ Y + Y @ X


@dataclass(frozen=True, eq=False)
class HermitianAxis:
    """Traceless Hermitian operator ``v . sigma`` with a declared normalisation.

    ``half=False`` means ``|v| = 1`` (so ``A @ A = I``); ``half=True`` means
    ``|v| = 1/2``.
    """

    v: np.ndarray
    half: bool = False

    def __post_init__(self):
        v = np.array(self.v, dtype=float).reshape(3)
        v.setflags(write=False)
        object.__setattr__(self, "v", v)
        target = 0.5 if self.half else 1.0
        if abs(np.linalg.norm(v) - target) > TOL_NORM:
            raise InvalidBasis(
                f"axis norm {np.linalg.norm(v):.12g} does not match the "
                f"{'half' if self.half else 'full'} convention ({target})"
            )

    @classmethod
    def along(cls, direction, half=False) -> "HermitianAxis":
        """Axis pointing along a nonzero real 3-vector, normalised to ``half``."""
        d = np.asarray(direction, dtype=float)
        n = np.linalg.norm(d)
        if n == 0:
            raise InvalidBasis("zero direction")
        return cls(d / n * (0.5 if half else 1.0), half=half)

    @classmethod
    def from_operator(cls, M, half=False, tol=TOL_HERM) -> "HermitianAxis":
        """Wrap an already-normalised traceless Hermitian operator."""
        c = pauli_decompose(M)
        vec = c.vector
        if abs(c.c0) > tol or np.abs(vec.imag).max() > tol:
            raise InvalidBasis("operator is not traceless Hermitian")
        return cls(vec.real, half=half)

    @property
    def op(self) -> np.ndarray:
        return from_pauli_vector(self.v)

    @property
    def unit(self) -> np.ndarray:
        """Direction as a unit 3-vector, independent of convention."""
        return self.v * (2.0 if self.half else 1.0)

    def to_full(self) -> "HermitianAxis":
        return HermitianAxis(self.unit, half=False)

    def to_half(self) -> "HermitianAxis":
        return HermitianAxis(self.unit / 2, half=True)

    def __neg__(self) -> "HermitianAxis":
        return HermitianAxis(-self.v, half=self.half)

    def __repr__(self):
        conv = "half" if self.half else "full"
        return f"HermitianAxis({np.array2string(self.v, precision=6)}, {conv})"


def _hermitian_vector(M, tol=TOL_HERM) -> np.ndarray:
    if isinstance(M, HermitianAxis):
        return M.unit
    c = pauli_decompose(M)
    if abs(c.c0) > tol or np.abs(c.vector.imag).max() > tol:
        raise InvalidBasis("expected a traceless Hermitian operator")
    return c.vector.real


def orthonormal_pair(B1, B2, tol=TOL_COLLINEAR):
    """Gram-Schmidt two traceless Hermitian operators into full-normalised axes.

    ``A1`` is always aligned with ``B1``; the returned pair spans the same real
    plane as the inputs.
    """
    v1 = _hermitian_vector(B1)
    v2 = _hermitian_vector(B2)
    n1, n2 = np.linalg.norm(v1), np.linalg.norm(v2)
    if n1 == 0 or n2 == 0 or np.linalg.norm(np.cross(v1, v2)) < tol * n1 * n2:
        raise CollinearInput("inputs do not span a plane")
    e1 = v1 / n1
    w = v2 - np.dot(e1, v2) * e1
    return HermitianAxis(e1), HermitianAxis(w / np.linalg.norm(w))


def complete_basis(a1: HermitianAxis, a2: HermitianAxis, tol=TOL_NORM) -> HermitianAxis:
    """Third axis ``A3 = [A1, A2] / 2i`` of a right-handed full-normalised triple."""
    if a1.half or a2.half:
        raise InvalidBasis("complete_basis expects full-normalised axes")
    if abs(np.dot(a1.v, a2.v)) > tol:
        raise InvalidBasis("A1 and A2 are not orthogonal")
    a3 = commutator(a1.op, a2.op) / 2j
    return HermitianAxis.from_operator(a3)
