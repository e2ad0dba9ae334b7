"""Stationary-state thermodynamics: generalised Gibbs fits and case-study formulas."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import commutator, pauli_decompose, pauli_vector
from .dynamics import Case
from .exceptions import DegenerateDenominator, PureState, RankDeficientBasis

TOL_FIT = 1e-8
TOL_MIXED = 1e-12


@dataclass(frozen=True)
class GibbsFit:
    """``rho = exp(-beta h + mu n + i lam [h, n]) / Z``; ``log_z = log Z``."""

    beta: float
    mu: float
    lam: float
    log_z: float
    residual: float

    def exponent(self, h, n) -> np.ndarray:
        h, n = np.asarray(h), np.asarray(n)
        return -self.beta * h + self.mu * n + 1j * self.lam * commutator(h, n)

    def reconstruct(self, h, n) -> np.ndarray:
        w, V = np.linalg.eigh(self.exponent(h, n))
        return (V * np.exp(w - self.log_z)) @ V.conj().T


def log_density(rho) -> np.ndarray:
    """Principal logarithm of a strictly positive 2x2 density matrix."""
    rho = np.asarray(rho, dtype=complex)
    rho = (rho + rho.conj().T) / 2
    w, V = np.linalg.eigh(rho)
    if w.min() <= TOL_MIXED:
        raise PureState(f"smallest eigenvalue {w.min():.3g} is not strictly positive")
    return (V * np.log(w)) @ V.conj().T


def gibbs_fit(rho_st, h, n, tol=TOL_FIT) -> GibbsFit:
    """Fit ``log(rho)`` onto ``span{-h, n, i[h, n]}`` plus an identity component.

    Pauli 3-vectors make this a real least-squares problem. When ``[h, n] = 0``
    the commutator direction is dropped (``lam = 0``) and when ``h`` is
    parallel to ``n`` all weight goes to ``beta`` (``mu = 0``): the two
    potentials are then not separately identifiable.

    ``lam`` multiplies ``i[h, n]`` in the exponent. It is not the third Bloch
    coordinate of the state: the traceless part of ``log(rho)`` is
    ``artanh(|r|) / |r|`` times the Bloch vector, so the two agree only after
    that scalar factor and the normalisation of ``i[h, n]``.
    """
    K = log_density(rho_st)
    c = pauli_decompose(K)
    log_z = -c.c0.real
    target = c.vector.real
    cols = [
        -pauli_vector(h).real,
        pauli_vector(n).real,
        pauli_vector(1j * commutator(h, n)).real,
    ]
    B = np.array(cols).T
    scale = max(np.linalg.norm(col) for col in cols) or 1.0
    rank = np.linalg.matrix_rank(B, tol=1e-10 * scale)
    coef = np.zeros(3)
    if rank == 3:
        coef = np.linalg.solve(B, target)
    else:
        # keep beta, then mu, then lam while each adds rank
        chosen = []
        for k in range(3):
            if np.linalg.matrix_rank(B[:, chosen + [k]], tol=1e-10 * scale) == len(chosen) + 1:
                chosen.append(k)
        if chosen:
            coef[chosen] = np.linalg.lstsq(B[:, chosen], target, rcond=None)[0]
    residual = float(np.linalg.norm(target - B @ coef))
    if rank < 3 and residual > tol:
        raise RankDeficientBasis(f"state is outside the generalised Gibbs family (residual {residual:.3g})")
    beta, mu, lam = (float(x) for x in coef)
    return GibbsFit(beta=beta, mu=mu, lam=lam, log_z=float(log_z), residual=residual)


def analytic_stationary(kind, E=0.0, eps=0.0, gamma_p=0.0, gamma_m=0.0, big_gamma=0.0) -> np.ndarray:
    """Closed-form stationary ``(beta, alpha, lambda)`` of the case studies.

    Case 3 uses ``lambda = 2 eps (gp - gm) / (4 E^2 + g^2 + 2 eps^2)``, the
    value solving its characteristic matrix; ``beta`` and ``alpha`` share the
    same denominator.
    """
    kind = Case(kind)
    if min(gamma_p, gamma_m, big_gamma) < 0:
        raise ValueError("rates must be >= 0")
    g = gamma_p + gamma_m
    delta = gamma_p - gamma_m
    if kind is Case.CASE2:
        den = g + big_gamma / 2
        if den == 0:
            raise DegenerateDenominator("gamma_p + gamma_m + Gamma/2 vanishes")
        return np.array([delta / den, 0.0, 0.0])
    if g == 0:
        raise DegenerateDenominator("gamma_p + gamma_m vanishes")
    if kind is Case.CASE1:
        return np.array([delta / g, 0.0, 0.0])
    q = 4 * E**2 + g**2
    den = q + 2 * eps**2
    ratio = q / den
    return np.array([delta / g * ratio, delta / g * 4 * eps * E / den, 2 * eps * delta / den])
