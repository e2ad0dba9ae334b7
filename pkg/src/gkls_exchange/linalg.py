"""Small dense linear-algebra kernels."""
from __future__ import annotations

import numpy as np

# Pade(13, 13) numerator coefficients, Higham (2005), scaled so b0 = 1
_PADE13 = tuple(b / 64764752532480000.0 for b in (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
))
_THETA13 = 5.371920351148152


def expm(A) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a fixed [13/13] Pade approximant.

    The scaling power is ``s = max(0, ceil(log2(||A||_1 / theta_13)))``;
    no lower-order approximants are tried, so results do not depend on
    norm-estimate heuristics.
    """
    A = np.asarray(A)
    n = A.shape[0]
    ident = np.eye(n, dtype=A.dtype)
    norm = np.abs(A).sum(axis=0).max() if n else 0.0
    s = 0
    if norm > _THETA13:
        s = int(np.ceil(np.log2(norm / _THETA13)))
        A = A / 2.0**s
    b = _PADE13
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident
    R = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        R = R @ R
    return R
