"""Seeded random generators for systems, transforms and states."""
from __future__ import annotations

import numpy as np

from .algebra import IDENTITY, HermitianAxis, from_pauli_vector
from .decompose import PhysicalForm, synthesize_system
from .gkls import GklsSystem, JumpTerm, transform_identity_shift, transform_unitary_mix


def _rng(rng):
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def random_unit(rng) -> np.ndarray:
    rng = _rng(rng)
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_hermitian(rng, scale=1.0) -> np.ndarray:
    rng = _rng(rng)
    return scale * from_pauli_vector(rng.normal(size=3), c0=rng.normal())


def random_complex(rng, size=None):
    rng = _rng(rng)
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def random_plane(rng):
    """Orthonormal pair of real 3-vectors."""
    rng = _rng(rng)
    q, _ = np.linalg.qr(rng.normal(size=(3, 2)))
    return q[:, 0], q[:, 1]


def random_adjoint_closed_system(rng, rate_range=(0.1, 3.0)) -> GklsSystem:
    """Two jump operators spanning a random real plane, plus identity parts.

    Coefficients are complex and unrestricted, so the exchange drive may be
    too strong for the symmetric part and force a negative rate.
    """
    rng = _rng(rng)
    u, v = random_plane(rng)
    A, B = from_pauli_vector(u), from_pauli_vector(v)
    terms = []
    for _ in range(2):
        a, b, c = random_complex(rng, 3)
        rate = rng.uniform(*rate_range)
        terms.append(JumpTerm(rate, a * A + b * B + c * IDENTITY))
    return GklsSystem(random_hermitian(rng), tuple(terms))


def random_physical_form(rng, dephasing=True) -> PhysicalForm:
    rng = _rng(rng)
    n = random_unit(rng)
    d = random_unit(rng)
    d = d - np.dot(d, n) * n
    d /= np.linalg.norm(d)
    gp, gm = rng.uniform(0.1, 3.0, size=2)
    big_gamma = rng.uniform(0.1, 3.0) if dephasing else 0.0
    return PhysicalForm(
        h_eff=from_pauli_vector(rng.normal(size=3)),
        n=HermitianAxis(n / 2, half=True),
        dphase=HermitianAxis(d / 2, half=True) if dephasing else None,
        gamma_p=float(gp),
        gamma_m=float(gm),
        big_gamma=float(big_gamma),
    )


def random_physical_system(rng) -> GklsSystem:
    """System with nonnegative physical rates, scrambled by a unitary mix."""
    rng = _rng(rng)
    sys = synthesize_system(random_physical_form(rng, dephasing=bool(rng.integers(2))))
    sys = transform_unitary_mix(sys, random_unitary(rng, 2))
    return transform_identity_shift(sys, random_complex(rng, 2))


def random_unitary(rng, n=2) -> np.ndarray:
    rng = _rng(rng)
    q, r = np.linalg.qr(random_complex(rng, (n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng, min_eig=0.0) -> np.ndarray:
    """Random state with Bloch radius below ``1 - 2 min_eig``."""
    rng = _rng(rng)
    radius = (1 - 2 * min_eig) * rng.uniform() ** (1 / 3)
    return IDENTITY / 2 + from_pauli_vector(radius * random_unit(rng)) / 2
