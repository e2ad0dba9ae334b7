"""Canonical physical form of a two-jump-operator qubit GKLS generator.

Any ``ExchangeCandidate`` system is rewritten as::

    drho/dt = -i[H, rho]
              - (gp + gm) (rho - I/2)
              + (gp - gm) N
              + (gp + gm) [N, [N, rho]] / 2
              - Gamma [D, [D, rho]] / 2

with ``|N| = |D| = 1/2`` and ``N`` orthogonal to ``D``. The pipeline is
``reduce_traceless -> build_exchange_basis -> dissipator_coefficients ->
diagonalize_inplane -> extract_physical`` and :func:`reassemble` rebuilds
the 4x4 generator from the five terms above (trace factors made explicit so
that it is linear on all of ``C^{2x2}``).

Rate bookkeeping. In the rotated basis the dissipator reads
``g1 (A1 rho A1 - rho) + g2 (A2 rho A2 - rho) + g3 A3`` with ``g1 >= g2``.
Each exchange dissipator contributes ``(A1 rho A1 + A2 rho A2) / 4 - rho / 2
+- A3 / 2``, so matching gives ``gp + gm = 4 g2``, ``gp - gm = 2 g3`` and the
leftover ``(g1 - g2)(A1 rho A1 - rho)`` is dephasing along ``D = A1 / 2`` with
``Gamma = 4 (g1 - g2)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import (
    IDENTITY,
    HermitianAxis,
    anticommutator,
    commutator,
    complete_basis,
    dagger,
    hs_inner,
    orthonormal_pair,
    pauli_vector,
    traceless_part,
)
from .exceptions import CollinearSpan, NegativeRate, NotExchangeCandidate, NotInSpan
from .gkls import (
    TOL_CLOSURE,
    Classification,
    GklsSystem,
    JumpTerm,
    classify_input,
    liouvillian_matrix,
    transform_energy_shift,
    transform_identity_shift,
    unvec,
    vec,
)

TOL_PSD = 1e-10
TOL_DEG = 1e-10
TOL_NEG = 1e-12


@dataclass(frozen=True, eq=False)
class ExchangeBasis:
    a1: HermitianAxis
    a2: HermitianAxis
    a3: HermitianAxis

    def __iter__(self):
        return iter((self.a1, self.a2, self.a3))


@dataclass(frozen=True)
class DissipatorCoefficients:
    """Coefficients of the dissipator in an in-plane basis ``(A1, A2)``.

    The complex coefficient matrix is ``C = [[m11, m12 - i d], [m12 + i d, m22]]``
    with ``C_jk = sum_i rate_i c_ij conj(c_ik)`` for ``L_i = c_i1 A1 + c_i2 A2``;
    ``d = sum_i rate_i Im(conj(a_i) b_i)``.
    """

    m11: float
    m22: float
    m12: float
    d: float

    @property
    def real_matrix(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m12, self.m22]])

    @property
    def complex_matrix(self) -> np.ndarray:
        return np.array([[self.m11, self.m12 - 1j * self.d], [self.m12 + 1j * self.d, self.m22]])


@dataclass(frozen=True, eq=False)
class FermionicPair:
    sp: np.ndarray
    sm: np.ndarray


@dataclass(frozen=True, eq=False)
class PhysicalForm:
    """Free evolution + exchange of charge ``n`` + residual dephasing ``dphase``."""

    h_eff: np.ndarray
    n: HermitianAxis
    dphase: Optional[HermitianAxis]
    gamma_p: float
    gamma_m: float
    big_gamma: float

    def __post_init__(self):
        if not self.n.half or (self.dphase is not None and not self.dphase.half):
            raise ValueError("physical-form axes must be half-normalised")
        if self.dphase is not None and abs(np.dot(self.n.v, self.dphase.v)) > 1e-10:
            raise ValueError("dephasing axis is not orthogonal to the charge")
        if (self.dphase is None) != (self.big_gamma == 0):
            raise ValueError("big_gamma must vanish exactly when dphase is absent")

    @property
    def is_physical(self) -> bool:
        return self.gamma_p >= 0 and self.gamma_m >= 0 and self.big_gamma >= 0


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------


def _require_candidate(sys: GklsSystem, tol=TOL_CLOSURE):
    cls = classify_input(sys, tol)
    if cls is not Classification.ExchangeCandidate:
        raise NotExchangeCandidate(cls)


def reduce_traceless(sys: GklsSystem, tol=TOL_CLOSURE) -> GklsSystem:
    """Move identity parts of the jump operators and of ``H`` out of the generator."""
    _require_candidate(sys, tol)
    alphas = [np.trace(t.op) / 2 for t in sys.terms]
    out = transform_identity_shift(sys, alphas)
    out = transform_energy_shift(out, np.trace(out.hamiltonian).real / 2)
    H = traceless_part(out.hamiltonian)
    terms = tuple(JumpTerm(t.rate, traceless_part(t.op)) for t in out.terms)
    return GklsSystem((H + dagger(H)) / 2, terms)


def _hermitian_generators(sys: GklsSystem):
    vecs = []
    for t in sys.terms:
        c = np.sqrt(t.rate) * pauli_vector(t.op)
        vecs.extend([c.real, c.imag])
    return np.array(vecs)


def build_exchange_basis(sys: GklsSystem, tol=TOL_CLOSURE) -> ExchangeBasis:
    """Orthonormal basis of the Hermitian operators inside ``span_C{L1, L2}``.

    The real plane is spanned by the real and imaginary Pauli parts of the
    rate-weighted operators (the span is adjoint-closed). Gram-Schmidt picks
    the longest generator first, then the one with the largest orthogonal
    remainder; the in-plane orientation is flipped when needed so that the
    largest component of ``a3`` is positive.
    """
    cplx = np.array([np.sqrt(t.rate) * pauli_vector(t.op) for t in sys.terms]).reshape(-1, 3)
    sc = np.linalg.svd(cplx, compute_uv=False) if cplx.size else np.zeros(1)
    if sc.size < 2 or sc[0] == 0 or sc[1] <= tol * max(1.0, sc[0]):
        raise CollinearSpan("jump operators span fewer than two complex dimensions")
    gens = _hermitian_generators(sys)
    scale = np.abs(gens).max() if gens.size else 0.0
    s = np.linalg.svd(gens, compute_uv=False) if gens.size else np.zeros(1)
    if scale == 0 or s.size < 2 or s[1] <= tol * max(1.0, s[0]):
        raise CollinearSpan("Hermitian part of the jump-operator span is not two-dimensional")
    norms = np.linalg.norm(gens, axis=1)
    i1 = int(np.argmax(norms))
    e1 = gens[i1] / norms[i1]
    rem = gens - np.outer(gens @ e1, e1)
    i2 = int(np.argmax(np.linalg.norm(rem, axis=1)))
    a1, a2 = orthonormal_pair(
        HermitianAxis.along(gens[i1]).op, HermitianAxis.along(gens[i2]).op
    )
    a3 = complete_basis(a1, a2)
    if a3.v[np.argmax(np.abs(a3.v))] < 0:
        a2, a3 = -a2, -a3
    return ExchangeBasis(a1, a2, a3)


def dissipator_coefficients(sys: GklsSystem, basis: ExchangeBasis, tol=TOL_CLOSURE) -> DissipatorCoefficients:
    A1, A2 = basis.a1.op, basis.a2.op
    C = np.zeros((2, 2), dtype=complex)
    for t in sys.terms:
        L = t.op
        a, b = hs_inner(A1, L), hs_inner(A2, L)
        resid = L - a * A1 - b * A2
        if np.abs(resid).max() > tol * max(1.0, np.abs(L).max()):
            raise NotInSpan("jump operator has a component outside the exchange plane")
        c = np.array([a, b])
        C += t.rate * np.outer(c, c.conj())
    return DissipatorCoefficients(
        m11=float(C[0, 0].real), m22=float(C[1, 1].real), m12=float(C[0, 1].real), d=float(-C[0, 1].imag)
    )


def coefficient_dissipator_apply(coeffs: DissipatorCoefficients, basis: ExchangeBasis, rho) -> np.ndarray:
    """``sum_jk C_jk (A_j rho A_k - {A_k A_j, rho} / 2)`` for the coefficient matrix ``C``."""
    A = (basis.a1.op, basis.a2.op)
    C = coeffs.complex_matrix
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros((2, 2), dtype=complex)
    for j in range(2):
        for k in range(2):
            out += C[j, k] * (A[j] @ rho @ A[k] - 0.5 * anticommutator(A[k] @ A[j], rho))
    return out


def diagonalize_inplane(coeffs: DissipatorCoefficients, basis: ExchangeBasis, tol=TOL_DEG):
    """Rotate ``(a1, a2)`` onto the eigenaxes of the real coefficient matrix.

    Returns ``(basis', g1, g2, g3)`` with ``g1 >= g2`` the eigenvalues and
    ``g3 = 2 d`` the coefficient of the constant ``A3`` drive. The rotation is
    proper, so ``a3`` is untouched.
    """
    M = coeffs.real_matrix
    scale = max(abs(coeffs.m11), abs(coeffs.m22), 1e-300)
    if abs(coeffs.m12) <= tol * scale and coeffs.m11 >= coeffs.m22:
        R = np.eye(2)
        g1, g2 = coeffs.m11, coeffs.m22
    else:
        w, V = np.linalg.eigh(M)
        g2, g1 = w
        R = V[:, ::-1]
        if R[0, 0] < 0 or (R[0, 0] == 0 and R[1, 0] < 0):
            R[:, 0] *= -1
        if np.linalg.det(R) < 0:
            R[:, 1] *= -1
    v1, v2 = basis.a1.v, basis.a2.v
    b1 = HermitianAxis.along(R[0, 0] * v1 + R[1, 0] * v2)
    b2 = HermitianAxis.along(R[0, 1] * v1 + R[1, 1] * v2)
    return ExchangeBasis(b1, b2, basis.a3), float(g1), float(g2), 2.0 * coeffs.d


def fermionic_pair(basis: ExchangeBasis) -> FermionicPair:
    """``sp = (A1 + i A2) / 2`` and ``sm = sp^+``; ``[sp, sm] = A3``."""
    sp = 0.5 * (basis.a1.op + 1j * basis.a2.op)
    return FermionicPair(sp=sp, sm=dagger(sp))


def extract_physical(
    sys: GklsSystem,
    basis: ExchangeBasis,
    gamma1: float,
    gamma2: float,
    gamma3: float,
    allow_negative: bool = False,
    tol_deg: float = TOL_DEG,
) -> PhysicalForm:
    """Match the diagonal form onto exchange + dephasing channels.

    ``sys`` must already be traceless-reduced: its Hamiltonian becomes
    ``h_eff``. Raises :class:`NegativeRate` when the drive is too strong for
    the symmetric part (``|g3| > 2 g2``) unless ``allow_negative``.
    """
    if gamma1 < gamma2:
        raise ValueError("gamma1 must be >= gamma2")
    total = 4.0 * gamma2
    diff = 2.0 * gamma3
    gp, gm = (total + diff) / 2, (total - diff) / 2
    tol = TOL_NEG * max(abs(total), abs(diff), 1e-300)
    gp = 0.0 if -tol < gp < 0 else gp
    gm = 0.0 if -tol < gm < 0 else gm
    if (gp < 0 or gm < 0) and not allow_negative:
        raise NegativeRate(gp, gm)
    if gamma1 - gamma2 <= tol_deg * abs(gamma1):
        dphase, big_gamma = None, 0.0
    else:
        dphase, big_gamma = basis.a1.to_half(), 4.0 * (gamma1 - gamma2)
    return PhysicalForm(
        h_eff=traceless_part(sys.hamiltonian),
        n=basis.a3.to_half(),
        dphase=dphase,
        gamma_p=float(gp),
        gamma_m=float(gm),
        big_gamma=float(big_gamma),
    )


def physical_generator_apply(pf: PhysicalForm, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    tr = np.trace(rho)
    N = pf.n.op
    total, diff = pf.gamma_p + pf.gamma_m, pf.gamma_p - pf.gamma_m
    out = -1j * commutator(pf.h_eff, rho)
    out = out - total * (rho - 0.5 * tr * IDENTITY) + diff * tr * N
    out = out + total * commutator(N, commutator(N, rho)) / 2
    if pf.dphase is not None:
        D = pf.dphase.op
        out = out - pf.big_gamma * commutator(D, commutator(D, rho)) / 2
    return out


def reassemble(pf: PhysicalForm) -> np.ndarray:
    """4x4 generator of the physical form (column-stacking convention)."""
    out = np.zeros((4, 4), dtype=complex)
    for k in range(4):
        e = np.zeros(4, dtype=complex)
        e[k] = 1
        out[:, k] = vec(physical_generator_apply(pf, unvec(e)))
    return out


def decompose(sys: GklsSystem, allow_negative: bool = False, tol=TOL_CLOSURE) -> PhysicalForm:
    """Full pipeline from a GKLS system to its physical form."""
    reduced = reduce_traceless(sys, tol)
    basis = build_exchange_basis(reduced, tol)
    coeffs = dissipator_coefficients(reduced, basis, tol)
    rotated, g1, g2, g3 = diagonalize_inplane(coeffs, basis)
    return extract_physical(reduced, rotated, g1, g2, g3, allow_negative=allow_negative)


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Every intermediate of :func:`decompose`, for inspection and checks."""

    reduced: GklsSystem
    basis: ExchangeBasis
    coeffs: DissipatorCoefficients
    rotated: ExchangeBasis
    gammas: tuple
    pair: FermionicPair
    form: PhysicalForm


def decompose_verbose(sys: GklsSystem, allow_negative: bool = False, tol=TOL_CLOSURE) -> Decomposition:
    reduced = reduce_traceless(sys, tol)
    basis = build_exchange_basis(reduced, tol)
    coeffs = dissipator_coefficients(reduced, basis, tol)
    rotated, g1, g2, g3 = diagonalize_inplane(coeffs, basis)
    pf = extract_physical(reduced, rotated, g1, g2, g3, allow_negative=allow_negative)
    return Decomposition(reduced, basis, coeffs, rotated, (g1, g2, g3), fermionic_pair(rotated), pf)


def roundtrip_residual(sys: GklsSystem, pf: PhysicalForm) -> float:
    return float(np.abs(reassemble(pf) - liouvillian_matrix(sys)).max())


def synthesize_system(pf: PhysicalForm) -> GklsSystem:
    """A two-jump-operator system whose generator equals ``reassemble(pf)``.

    Inverse direction of :func:`decompose`: the coefficient matrix in the
    basis ``(2 D, 2 N x 2 D, 2 N)`` is factorised by its eigendecomposition.
    Requires nonnegative rates.
    """
    if not pf.is_physical:
        raise NegativeRate(pf.gamma_p, pf.gamma_m)
    a3 = pf.n.unit
    if pf.dphase is not None:
        a1 = pf.dphase.unit
    else:
        trial = np.eye(3)[int(np.argmin(np.abs(a3)))]
        a1 = trial - np.dot(trial, a3) * a3
        a1 /= np.linalg.norm(a1)
    a2 = np.cross(a3, a1)
    g2 = (pf.gamma_p + pf.gamma_m) / 4
    g1 = g2 + pf.big_gamma / 4
    d = (pf.gamma_p - pf.gamma_m) / 4
    C = np.array([[g1, -1j * d], [1j * d, g2]])
    w, V = np.linalg.eigh(C)
    A1, A2 = HermitianAxis(a1).op, HermitianAxis(a2).op
    terms = []
    for lam, u in zip(w, V.T):
        terms.append(JumpTerm(max(float(lam), 0.0), u[0] * A1 + u[1] * A2))
    return GklsSystem(pf.h_eff, tuple(terms))
