import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def multiset_gap(a, b):
    """Largest pairwise distance after optimally matching two eigenvalue lists."""
    a, b = np.asarray(a), np.asarray(b)
    cost = np.abs(a[:, None] - b[None, :])
    i, j = linear_sum_assignment(cost)
    return cost[i, j].max()


def generator_matrix_oracle(apply, dim=2):
    """Column-stacked superoperator built by applying ``apply`` to matrix units."""
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    for k in range(dim * dim):
        E = np.zeros((dim, dim), dtype=complex)
        E[k % dim, k // dim] = 1
        out[:, k] = apply(E).T.reshape(-1)
    return out


def null_density(L):
    """Normalised stationary density from the null vector of a 4x4 generator."""
    from scipy.linalg import null_space

    v = null_space(L, rcond=1e-10)
    assert v.shape[1] == 1
    rho = v[:, 0].reshape(2, 2).T
    return rho / np.trace(rho)


ACCEPTANCE_LINES = []


def report(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
