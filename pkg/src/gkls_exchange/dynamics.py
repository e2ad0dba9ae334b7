"""Bloch-vector propagation, stationary states and exceptional-point analysis."""
from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field

import numpy as np

from .algebra import SIGMA_X, SIGMA_Z, HermitianAxis, commutator
from .decompose import PhysicalForm
from .exceptions import SingularGenerator
from .gkls import AffineBlochGenerator
from .linalg import expm

TOL_EP = 1e-8


# ---------------------------------------------------------------------------
# propagation
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BlochTrajectory:
    times: np.ndarray
    states: np.ndarray  # shape (n_samples, 3)
    basis: tuple

    def densities(self) -> np.ndarray:
        ops = np.array([a.op for a in self.basis])
        return np.eye(2) / 2 + np.einsum("ti,iab->tab", self.states, ops)

    def to_csv(self, fh=None) -> str:
        buf = fh if fh is not None else io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "r1", "r2", "r3"])
        for t, r in zip(self.times, self.states):
            w.writerow([f"{t:.17g}"] + [f"{x:.17g}" for x in r])
        return buf.getvalue() if fh is None else ""


def affine_propagator(gen: AffineBlochGenerator, dt: float) -> np.ndarray:
    """4x4 real ``exp(dt [[m, drive], [0, 0]])``; no inverse of ``m`` needed."""
    aug = np.zeros((4, 4))
    aug[:3, :3] = gen.m
    aug[:3, 3] = gen.drive
    return expm(aug * dt)


def evolve(gen: AffineBlochGenerator, r0, t_final: float, n_steps: int) -> BlochTrajectory:
    """Exact affine propagation sampled at ``n_steps + 1`` uniform times."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if not t_final > 0:
        raise ValueError("t_final must be positive")
    times = np.linspace(0.0, t_final, n_steps + 1)
    P = affine_propagator(gen, t_final / n_steps)
    Pm, Pd = P[:3, :3], P[:3, 3]
    states = np.empty((n_steps + 1, 3))
    states[0] = np.asarray(r0, dtype=float)
    for k in range(n_steps):
        states[k + 1] = Pm @ states[k] + Pd
    return BlochTrajectory(times, states, gen.basis)


def stationary_state(gen: AffineBlochGenerator, tol=1e-12) -> np.ndarray:
    """Fixed point ``-m^{-1} drive`` of a strictly dissipative generator."""
    eig = np.linalg.eigvals(gen.m)
    scale = max(1.0, np.abs(gen.m).max())
    if eig.real.max() >= -tol * scale:
        raise SingularGenerator("generator has a non-decaying mode; no unique fixed point")
    return np.linalg.solve(gen.m, -gen.drive)


# ---------------------------------------------------------------------------
# case studies
# ---------------------------------------------------------------------------


class Case(enum.Enum):
    CASE1 = "case1"  # N = H, no extra dephasing
    CASE2 = "case2"  # N = H, dephasing along D
    CASE3 = "case3"  # H = E N + eps D, no extra dephasing


CASE_N = HermitianAxis.from_operator(SIGMA_Z / 2, half=True)
CASE_D = HermitianAxis.from_operator(SIGMA_X / 2, half=True)
CASE_T = HermitianAxis.from_operator(1j * commutator(CASE_N.op, CASE_D.op), half=True)
#: (N, D, i[N, D]); coordinates are the (beta, alpha, lambda) of the case studies.
CASE_BASIS = (CASE_N, CASE_D, CASE_T)


def case_generator(kind, E=0.0, eps=0.0, gamma_p=0.0, gamma_m=0.0, big_gamma=0.0) -> AffineBlochGenerator:
    """Characteristic matrix and drive of the three case studies.

    Parameters irrelevant to ``kind`` are ignored.
    """
    kind = Case(kind)
    if min(gamma_p, gamma_m, big_gamma) < 0:
        raise ValueError("rates must be >= 0")
    g = gamma_p + gamma_m
    if kind is Case.CASE1:
        m = [[-g, 0, 0], [0, -g / 2, E], [0, -E, -g / 2]]
    elif kind is Case.CASE2:
        G = big_gamma
        m = [[-g - G / 2, 0, 0], [0, -g / 2, E], [0, -E, -(g + G) / 2]]
    else:
        m = [[-g, 0, -eps], [0, -g / 2, E], [eps, -E, -g / 2]]
    return AffineBlochGenerator(np.array(m, dtype=float), np.array([gamma_p - gamma_m, 0.0, 0.0]), CASE_BASIS)


def case_form(kind, E=0.0, eps=0.0, gamma_p=0.0, gamma_m=0.0, big_gamma=0.0) -> PhysicalForm:
    """The physical form whose generator the case study describes."""
    kind = Case(kind)
    N, D = CASE_N.op, CASE_D.op
    if kind is Case.CASE3:
        h = E * N + eps * D
    else:
        h = E * N
    if kind is Case.CASE2 and big_gamma > 0:
        return PhysicalForm(h, CASE_N, CASE_D, gamma_p, gamma_m, big_gamma)
    return PhysicalForm(h, CASE_N, None, gamma_p, gamma_m, 0.0)


# ---------------------------------------------------------------------------
# cubic spectrum of the case-3 characteristic matrix (gamma = 1 units)
# ---------------------------------------------------------------------------


class EP(enum.Enum):
    NONE = "None"
    EP2 = "EP2"
    EP3 = "EP3"


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Eigenvalues in units of ``gamma``: real root first, then the pair with
    positive imaginary part first (or all three ascending when real)."""

    eigenvalues: np.ndarray
    ep: EP
    discriminant: float
    x: float
    y: float
    z: complex
    e_over_gamma: float = np.nan
    eps_over_gamma: float = np.nan


def cubic_xy(e, eps):
    """``X = -1/4 + 3 eps^2 + 3 E^2`` and ``Y = -1/4 + 9 eps^2 / 2 - 9 E^2``; arrays allowed."""
    e2 = np.multiply(e, e)
    p2 = np.multiply(eps, eps)
    return -0.25 + 3.0 * p2 + 3.0 * e2, -0.25 + 4.5 * p2 - 9.0 * e2


def characteristic_coefficients(e, eps):
    """``(b, c)`` of ``l^3 + 2 l^2 + b l + c``."""
    return 1.25 + eps * eps + e * e, 0.25 + eps * eps / 2 + e * e


_OMEGA = complex(-0.5, np.sqrt(3) / 2)
_CBRT2 = 2.0 ** (1.0 / 3.0)


def _cardano(X, Y):
    disc = Y * Y + 4.0 * X**3
    if disc >= 0:
        Z = np.sqrt(disc)
        if abs(Y - Z) > abs(Y + Z):
            Z = -Z
        S = Y + Z
        w = complex(np.cbrt(S))
    else:
        Z = 1j * np.sqrt(-disc)
        S = Y + Z
        w = S ** (1.0 / 3.0)
    if S == 0:
        return np.full(3, -2.0 / 3.0, dtype=complex), disc, complex(Z)
    u = w / (3.0 * _CBRT2)
    roots = []
    for k in range(3):
        uk = u * _OMEGA**k
        roots.append(-2.0 / 3.0 + uk - X / (9.0 * uk))
    roots = np.array(roots, dtype=complex)
    if disc <= 0:
        roots = np.sort(roots.real).astype(complex)
    else:
        i_real = int(np.argmin(np.abs(roots.imag)))
        pair = np.delete(roots, i_real)
        pair = pair[np.argsort(-pair.imag)]
        roots = np.concatenate([[roots[i_real].real], pair])
    return roots, disc, complex(Z)


def cubic_eigenvalues(e_over_gamma: float, eps_over_gamma: float, tol_ep: float = TOL_EP) -> SpectrumResult:
    """Closed-form eigenvalues of the case-3 characteristic matrix with ``gamma = 1``.

    Cardano's formula with ``u = (Y + Z)^{1/3} / (3 * 2^{1/3})`` and roots
    ``-2/3 + w^k u - X / (9 w^k u)``. The sign of ``Z`` is chosen to maximise
    ``|Y + Z|`` so the cube root never sees a cancelled argument. A positive
    discriminant ``Y^2 + 4 X^3`` means one real root and a conjugate pair.
    """
    e, p = float(e_over_gamma), float(eps_over_gamma)
    X, Y = cubic_xy(e, p)
    roots, disc, Z = _cardano(X, Y)
    res = SpectrumResult(roots, EP.NONE, float(disc), float(X), float(Y), Z, e, p)
    return SpectrumResult(roots, classify_ep(res, tol_ep), res.discriminant, res.x, res.y, res.z, e, p)


def case3_matrix(e_over_gamma, eps_over_gamma) -> np.ndarray:
    """Case-3 characteristic matrix with ``gamma = 1``."""
    e, p = e_over_gamma, eps_over_gamma
    return np.array([[-1.0, 0.0, -p], [0.0, -0.5, e], [p, -e, -0.5]])


def classify_ep(spectrum: SpectrumResult, tol_ep: float = TOL_EP) -> EP:
    """EP3 when ``|X|, |Y| < tol_ep``; EP2 when the discriminant vanishes relative
    to its own scale ``Y^2 + 4|X|^3``.

    A vanishing discriminant at a diagonalisable degeneracy (the decoupled
    point ``E = eps = 0``) is not an exceptional point; when the parameters are
    known, the double eigenvalue must be defective to count as EP2.
    """
    if abs(spectrum.x) < tol_ep and abs(spectrum.y) < tol_ep:
        return EP.EP3
    scale = spectrum.y**2 + 4.0 * abs(spectrum.x) ** 3
    if abs(spectrum.discriminant) > tol_ep * scale:
        return EP.NONE
    if np.isfinite(spectrum.e_over_gamma) and np.isfinite(spectrum.eps_over_gamma):
        lam = _double_root(spectrum.eigenvalues)
        M = case3_matrix(spectrum.e_over_gamma, spectrum.eps_over_gamma) - lam * np.eye(3)
        s = np.linalg.svd(M, compute_uv=False)
        if s[1] <= np.sqrt(tol_ep) * max(1.0, s[0]):
            return EP.NONE
    return EP.EP2


def _double_root(eigs):
    d = np.abs(eigs[:, None] - eigs[None, :])
    np.fill_diagonal(d, np.inf)
    i, j = np.unravel_index(np.argmin(d), d.shape)
    return (eigs[i] + eigs[j]).real / 2


def discriminant(e, eps):
    X, Y = cubic_xy(e, eps)
    return Y * Y + 4.0 * X**3


def bisect_ep2(p0, p1, max_iter=200):
    """Point on the segment ``p0 -> p1`` where the discriminant changes sign.

    ``p0`` and ``p1`` are ``(E, eps)`` pairs with opposite sign of
    ``disc <= 0``; bisection runs until the bracket stops shrinking.
    """
    p0, p1 = np.asarray(p0, dtype=float), np.asarray(p1, dtype=float)
    s0 = discriminant(*p0) <= 0
    if s0 == (discriminant(*p1) <= 0):
        raise ValueError("endpoints do not bracket a discriminant sign change")
    lo, hi = p0, p1
    for _ in range(max_iter):
        mid = (lo + hi) / 2
        if np.array_equal(mid, lo) or np.array_equal(mid, hi):
            break
        if (discriminant(*mid) <= 0) == s0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def locate_ep3(seed, max_iter=50):
    """Newton iteration on ``(X, Y) = 0``; returns ``(E, eps, residual)``."""
    e, p = map(float, seed)
    for _ in range(max_iter):
        X, Y = cubic_xy(e, p)
        J = np.array([[6 * e, 6 * p], [-18 * e, 9 * p]])
        if abs(np.linalg.det(J)) < 1e-300:
            break
        de, dp = np.linalg.solve(J, [X, Y])
        e, p = e - de, p - dp
        if abs(de) + abs(dp) < 1e-16 * (1 + abs(e) + abs(p)):
            break
    X, Y = cubic_xy(e, p)
    return e, p, float(np.hypot(X, Y))


# ---------------------------------------------------------------------------
# (E, eps) maps
# ---------------------------------------------------------------------------


def symmetric_axis(lo: float, hi: float, n: int) -> np.ndarray:
    """``n`` uniform points on ``[lo, hi]``; exactly mirror-symmetric about the centre."""
    k = np.arange(n, dtype=float)
    centre, half = (lo + hi) / 2, (hi - lo) / 2
    return centre + half * ((2 * k - (n - 1)) / (n - 1))


@dataclass(frozen=True, eq=False)
class EpMap:
    e_axis: np.ndarray
    eps_axis: np.ndarray
    discriminant: np.ndarray  # [i_e, i_eps]
    ep_flag: np.ndarray  # [i_e, i_eps], values of EP
    boundary: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    cusps: np.ndarray = field(default_factory=lambda: np.empty((0, 3)))

    @property
    def region(self) -> np.ndarray:
        return np.where(self.discriminant <= 0, "real", "complex")

    def to_csv(self, fh=None) -> str:
        buf = fh if fh is not None else io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["e_over_gamma", "eps_over_gamma", "discriminant", "region"])
        region = self.region
        for i, e in enumerate(self.e_axis):
            for j, p in enumerate(self.eps_axis):
                w.writerow([f"{e:.17g}", f"{p:.17g}", f"{self.discriminant[i, j]:.17g}", region[i, j]])
        return buf.getvalue() if fh is None else ""

    def cusps_csv(self, fh=None) -> str:
        buf = fh if fh is not None else io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["e_over_gamma", "eps_over_gamma", "residual"])
        for row in self.cusps:
            w.writerow([f"{x:.17g}" for x in row])
        return buf.getvalue() if fh is None else ""


def _bisect_edges(a, b, iters=80):
    """Vectorised :func:`bisect_ep2` over arrays of segment endpoints (k, 2)."""
    s0 = discriminant(a[:, 0], a[:, 1]) <= 0
    lo, hi = a.copy(), b.copy()
    for _ in range(iters):
        mid = (lo + hi) / 2
        same = (discriminant(mid[:, 0], mid[:, 1]) <= 0) == s0
        lo[same] = mid[same]
        hi[~same] = mid[~same]
    return (lo + hi) / 2


def ep_map(e_range=(-0.3, 0.3), eps_range=(-0.5, 0.5), n_e=201, n_eps=201, tol_ep=TOL_EP) -> EpMap:
    """Discriminant-sign map over ``(E/gamma, eps/gamma)`` with EP2 and EP3 refinement."""
    if n_e < 2 or n_eps < 2:
        raise ValueError("grid needs at least 2 points per axis")
    e_axis = symmetric_axis(*e_range, n_e)
    eps_axis = symmetric_axis(*eps_range, n_eps)
    E, P = np.meshgrid(e_axis, eps_axis, indexing="ij")
    X, Y = cubic_xy(E, P)
    disc = Y * Y + 4.0 * X**3
    scale = Y * Y + 4.0 * np.abs(X) ** 3

    flag = np.full(disc.shape, EP.NONE, dtype=object)
    flag[(np.abs(disc) <= tol_ep * scale) & ~((E == 0) & (P == 0))] = EP.EP2
    flag[(np.abs(X) < tol_ep) & (np.abs(Y) < tol_ep)] = EP.EP3

    real = disc <= 0
    pts = np.stack([E, P], axis=-1)
    starts, ends = [], []
    h = real[1:, :] != real[:-1, :]
    starts.append(pts[:-1, :][h])
    ends.append(pts[1:, :][h])
    v = real[:, 1:] != real[:, :-1]
    starts.append(pts[:, :-1][v])
    ends.append(pts[:, 1:][v])
    a, b = np.concatenate(starts), np.concatenate(ends)
    boundary = _bisect_edges(a, b) if len(a) else np.empty((0, 2))

    cusps = _find_cusps(X, Y, e_axis, eps_axis)
    return EpMap(e_axis, eps_axis, disc, flag, boundary, cusps)


def _find_cusps(X, Y, e_axis, eps_axis):
    def changes(F):
        corners = np.stack([F[:-1, :-1], F[1:, :-1], F[:-1, 1:], F[1:, 1:]])
        return (corners.min(axis=0) <= 0) & (corners.max(axis=0) >= 0)

    cells = np.argwhere(changes(X) & changes(Y))
    found = []
    e_lo, e_hi = e_axis[0], e_axis[-1]
    p_lo, p_hi = eps_axis[0], eps_axis[-1]
    for i, j in cells:
        seed = ((e_axis[i] + e_axis[i + 1]) / 2, (eps_axis[j] + eps_axis[j + 1]) / 2)
        e, p, res = locate_ep3(seed)
        if res > 1e-12 or not (e_lo <= e <= e_hi and p_lo <= p <= p_hi):
            continue
        if any(abs(e - f[0]) < 1e-9 and abs(p - f[1]) < 1e-9 for f in found):
            continue
        found.append((e, p, res))
    found.sort()
    return np.array(found, dtype=float).reshape(-1, 3)
