import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import generator_matrix_oracle, multiset_gap
from gkls_exchange.algebra import IDENTITY, SIGMA_MINUS, SIGMA_PLUS, SIGMA_X, SIGMA_Y, SIGMA_Z
from gkls_exchange.dynamics import CASE_BASIS, Case, case_generator
from gkls_exchange.exceptions import InvalidBasis, InvalidSystem, NotUnitary, UnsupportedTermCount, ZeroScale
from gkls_exchange.gkls import (
    PAULI_BASIS,
    PAULI_HALF_BASIS,
    Classification,
    GklsSystem,
    bloch_generator,
    classify_input,
    dissipator_apply,
    generator_apply,
    liouvillian_matrix,
    transform_energy_shift,
    transform_identity_shift,
    transform_rescale,
    transform_unitary_mix,
)
from gkls_exchange.sampling import random_adjoint_closed_system, random_complex, random_density, random_unitary


def test_dissipator_values():
    assert np.abs(dissipator_apply(SIGMA_Z, IDENTITY / 2)).max() < 1e-15
    out = dissipator_apply(SIGMA_MINUS, np.diag([1.0, 0.0]))
    assert np.abs(out - np.diag([-1.0, 1.0])).max() < 1e-15
    assert np.abs(dissipator_apply(SIGMA_MINUS, np.diag([0.0, 1.0]))).max() < 1e-15


def test_liouvillian_examples():
    assert np.abs(liouvillian_matrix(GklsSystem(np.zeros((2, 2))))).max() == 0
    w = np.linalg.eigvals(liouvillian_matrix(GklsSystem(SIGMA_Z / 2)))
    assert multiset_gap(w, [0, 0, 1j, -1j]) < 1e-12
    w = np.linalg.eigvals(liouvillian_matrix(GklsSystem.from_ops(np.zeros((2, 2)), [(1.0, SIGMA_MINUS)])))
    assert multiset_gap(w, [0, -0.5, -0.5, -1]) < 1e-12


def test_liouvillian_matches_matrix_unit_oracle(rng):
    for _ in range(50):
        sys = random_adjoint_closed_system(rng)
        oracle = generator_matrix_oracle(lambda r: generator_apply(sys, r))
        assert np.abs(liouvillian_matrix(sys) - oracle).max() < 1e-12


def test_liouvillian_is_trace_preserving(rng):
    for _ in range(50):
        L = liouvillian_matrix(random_adjoint_closed_system(rng))
        # vec(I)^T L = 0 in column stacking
        assert np.abs(np.eye(2).T.reshape(-1) @ L).max() < 1e-12


def test_system_validation():
    with pytest.raises(InvalidSystem):
        GklsSystem(SIGMA_PLUS)
    with pytest.raises(InvalidSystem):
        GklsSystem.from_ops(SIGMA_Z, [(-1.0, SIGMA_X)])


@pytest.mark.parametrize("kind", list(Case))
def test_bloch_generator_reproduces_case_matrices(kind):
    from gkls_exchange.decompose import synthesize_system
    from gkls_exchange.dynamics import case_form

    params = dict(E=1.0, eps=0.5, gamma_p=2.0, gamma_m=1.0, big_gamma=2.0)
    sys = synthesize_system(case_form(kind, **params))
    gen = bloch_generator(sys, CASE_BASIS)
    ref = case_generator(kind, **params)
    assert np.abs(gen.m - ref.m).max() < 1e-12
    assert np.abs(gen.drive - ref.drive).max() < 1e-12


def test_case_matrix_entries():
    m0 = case_generator(Case.CASE1, E=1, gamma_p=0.5, gamma_m=0.5).m
    assert np.abs(m0 - [[-1, 0, 0], [0, -0.5, 1], [0, -1, -0.5]]).max() == 0
    m1 = case_generator(Case.CASE2, E=1, gamma_p=0.5, gamma_m=0.5, big_gamma=2).m
    assert np.abs(np.diag(m1) - [-2, -0.5, -1.5]).max() == 0
    m2 = case_generator(Case.CASE3, E=1, eps=0.5, gamma_p=0.5, gamma_m=0.5).m
    assert m2[0, 2] == -0.5 and m2[2, 0] == 0.5


def test_bloch_generator_matches_density_dynamics(rng):
    for basis in (PAULI_BASIS, PAULI_HALF_BASIS):
        for _ in range(20):
            sys = random_adjoint_closed_system(rng)
            gen = bloch_generator(sys, basis)
            rho = random_density(rng)
            r = gen.from_density(rho)
            assert np.abs(gen.to_density(r) - rho).max() < 1e-12
            lhs = gen.to_density(gen.rhs(r)) - IDENTITY / 2
            assert np.abs(lhs - generator_apply(sys, rho)).max() < 1e-12


def test_bloch_generator_rejects_mixed_basis():
    with pytest.raises(InvalidBasis):
        bloch_generator(GklsSystem(SIGMA_Z), (PAULI_BASIS[0], PAULI_BASIS[1], PAULI_HALF_BASIS[2]))


def test_transform_examples():
    T1 = GklsSystem.from_ops(SIGMA_Z / 2, [(1.0, SIGMA_MINUS), (2.0, SIGMA_PLUS)])
    L0 = liouvillian_matrix(T1)
    assert np.abs(liouvillian_matrix(transform_energy_shift(T1, 5.0)) - L0).max() < 1e-15

    sys = GklsSystem.from_ops(np.zeros((2, 2)), [(1.0, 2 * SIGMA_MINUS)])
    out = transform_rescale(sys, 0, 0.5)
    assert out.rates[0] == 4.0 and np.abs(out.ops[0] - SIGMA_MINUS).max() == 0
    assert np.abs(liouvillian_matrix(out) - liouvillian_matrix(sys)).max() < 1e-15
    with pytest.raises(ZeroScale):
        transform_rescale(sys, 0, 0)


def test_identity_shift_hamiltonian_sign():
    sys = GklsSystem.from_ops(np.zeros((2, 2)), [(1.0, SIGMA_MINUS + IDENTITY)])
    out = transform_identity_shift(sys, [1.0])
    assert np.abs(out.ops[0] - SIGMA_MINUS).max() == 0
    assert np.abs(out.hamiltonian - SIGMA_Y / 2).max() < 1e-15
    assert np.abs(liouvillian_matrix(out) - liouvillian_matrix(sys)).max() < 1e-15
    # the opposite sign does not preserve the generator
    wrong = GklsSystem(-SIGMA_Y / 2, out.terms)
    assert np.abs(liouvillian_matrix(wrong) - liouvillian_matrix(sys)).max() > 0.5


def test_unitary_mix_rejects_non_unitary():
    sys = GklsSystem.from_ops(SIGMA_Z, [(1.0, SIGMA_MINUS), (1.0, SIGMA_PLUS)])
    with pytest.raises(NotUnitary):
        transform_unitary_mix(sys, np.array([[1, 1], [0, 1]]))
    with pytest.raises(NotUnitary):
        transform_unitary_mix(sys, np.eye(3))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_transforms_preserve_liouvillian(seed):
    rng = np.random.default_rng(seed)
    sys = random_adjoint_closed_system(rng)
    L0 = liouvillian_matrix(sys)
    variants = [
        transform_energy_shift(sys, rng.normal()),
        transform_rescale(sys, int(rng.integers(2)), complex(*rng.normal(size=2))),
        transform_identity_shift(sys, random_complex(rng, 2)),
        transform_unitary_mix(sys, random_unitary(rng)),
    ]
    for other in variants:
        assert np.abs(liouvillian_matrix(other) - L0).max() < 1e-12


def test_classification_examples():
    H = SIGMA_Z / 2
    assert classify_input(GklsSystem.from_ops(H, [(1.0, SIGMA_Z)])) is Classification.PureDephasing
    assert classify_input(GklsSystem.from_ops(H, [(1.0, SIGMA_MINUS)])) is Classification.AdjointNotClosed
    ex = GklsSystem.from_ops(H, [(1.0, SIGMA_MINUS), (1.0, SIGMA_PLUS)])
    assert classify_input(ex) is Classification.ExchangeCandidate
    # two Hermitian operators spanning a plane are an exchange candidate too
    assert classify_input(GklsSystem.from_ops(H, [(1.0, SIGMA_X), (1.0, SIGMA_Y)])) is Classification.ExchangeCandidate
    assert classify_input(GklsSystem.from_ops(H, [(1.0, SIGMA_MINUS), (1.0, 2 * SIGMA_MINUS)])) is Classification.Collinear
    assert classify_input(GklsSystem.from_ops(H, [(1.0, SIGMA_MINUS), (1.0, SIGMA_Z)])) is Classification.AdjointNotClosed
    assert classify_input(GklsSystem(H)) is Classification.PureDephasing
    with pytest.raises(UnsupportedTermCount):
        classify_input(GklsSystem.from_ops(H, [(1.0, SIGMA_X)] * 3))


def test_identity_parts_are_ignored_by_classification():
    sys = GklsSystem.from_ops(SIGMA_Z, [(1.0, SIGMA_MINUS + 3 * IDENTITY), (0.5, SIGMA_PLUS - 1j * IDENTITY)])
    assert classify_input(sys) is Classification.ExchangeCandidate
