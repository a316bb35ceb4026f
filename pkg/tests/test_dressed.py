import numpy as np
import pytest
from hypothesis import given, strategies as st

from dressedopto.dressed import (diagonalize, dress, dressed_operators, photon_parity,
                                 position_operators, resonance_gap, transition_amplitudes,
                                 tune_resonance)
from dressedopto.errors import InvalidArgument, NotFound
from dressedopto.fockspace import fock_index
from dressedopto.hamiltonian import SystemParams, build_free, build_interaction, system_hamiltonian


def test_bare_spectrum():
    p = SystemParams(omega1=0.5, epsilon=0.0)
    basis = diagonalize(system_hamiltonian(p), 6)
    assert np.allclose(basis.energies, [0, 0.5, 1, 1, 1, 1.5], atol=1e-12)


def test_residual_and_orthonormality():
    p = SystemParams()
    H = system_hamiltonian(p)
    b = diagonalize(H, 60, parity=photon_parity(p))
    assert np.allclose(b.vectors.conj().T @ b.vectors, np.eye(60), atol=1e-10)
    res = np.linalg.norm(H @ b.vectors - b.vectors * b.energies, axis=0)
    assert res.max() <= 1e-9 * b.hamiltonian_norm
    assert np.all(np.diff(b.energies) >= 0)


def test_parity_sectors_match_full_diagonalisation():
    p = SystemParams()
    H = system_hamiltonian(p)
    with_sectors = diagonalize(H, 60, parity=photon_parity(p))
    plain = diagonalize(H, 60)
    assert np.allclose(with_sectors.energies, plain.energies, atol=1e-11)
    assert set(np.unique(with_sectors.parity)) <= {-1, 1}


def test_phase_convention():
    b = diagonalize(system_hamiltonian(SystemParams()), 30)
    lead = b.vectors[np.argmax(np.abs(b.vectors), axis=0), np.arange(30)]
    assert np.allclose(lead.imag, 0, atol=1e-15) and np.all(lead.real > 0)


def test_diagonalize_rejects():
    with pytest.raises(InvalidArgument):
        diagonalize(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(InvalidArgument):
        diagonalize(np.eye(3), 4)


def test_split_at_bare_resonance():
    # two-level estimate 2 sqrt(2) g11 with g11 = eps omega1 / 2
    gap = resonance_gap(SystemParams(omega1=0.5))
    assert gap == pytest.approx(2 * np.sqrt(2) * 0.0125, rel=0.1)


def test_bare_transition_amplitudes():
    p = SystemParams(omega1=0.5, epsilon=0.0, cutoffs=(3, 2, 2))
    H = system_hamiltonian(p)
    basis = diagonalize(H)
    table = transition_amplitudes(basis, position_operators(p))
    s = p.specs
    dom = np.argmax(np.abs(basis.vectors), axis=0)
    level = {int(k): n for n, k in enumerate(dom)}
    g, e = level[fock_index(0, 0, 0, s)], level[fock_index(1, 0, 0, s)]
    assert abs(table.u1[e, g]) == pytest.approx(1.0)
    # wall amplitudes only between states one phonon apart, value sqrt(m)
    labels = [(n1, n2, m) for n1 in range(4) for n2 in range(3) for m in range(3)]
    for i, j in zip(*np.nonzero(np.abs(table.w) > 1e-12)):
        a, b = labels[dom[i]], labels[dom[j]]
        assert a[:2] == b[:2] and abs(a[2] - b[2]) == 1
        assert abs(table.w[i, j]) == pytest.approx(np.sqrt(max(a[2], b[2])))


def test_hybridised_doublet_shares_the_phonon():
    p = SystemParams()
    basis, table, _ = dress(p, 60)
    s = p.specs
    weight = (np.abs(basis.vectors[fock_index(2, 0, 0, s)]) ** 2
              + np.abs(basis.vectors[fock_index(0, 0, 1, s)]) ** 2)
    k1, k2 = np.argsort(-weight)[:2]
    assert abs(table.w[k1, 0]) == pytest.approx(1 / np.sqrt(2), abs=0.05)
    assert abs(table.w[k2, 0]) == pytest.approx(1 / np.sqrt(2), abs=0.05)


def test_table_hermitian():
    _, table, _ = dress(SystemParams(), 40)
    for x in (table.u1, table.u2, table.w):
        assert np.allclose(x, x.conj().T, atol=1e-13)
    assert np.all(table.delta[np.tril_indices(40, -1)] >= 0)


def test_dressed_operators_structure():
    _, table, ops = dress(SystemParams(), 60)
    for A in (ops.A1, ops.A2, ops.B):
        assert not np.any(np.tril(A))
        assert not np.any(A[:, 0])
        assert np.linalg.eigvalsh(A.conj().T @ A).min() > -1e-12
    ground = np.zeros((60, 60))
    ground[0, 0] = 1
    assert np.trace(ops.A1.conj().T @ ops.A1 @ ground) == 0


def test_bare_limit_reproduces_bare_ladder():
    p = SystemParams(omega1=0.5, epsilon=0.0, cutoffs=(3, 2, 2))
    basis = diagonalize(system_hamiltonian(p), 10)
    table = transition_amplitudes(basis, position_operators(p))
    ops = dressed_operators(table)
    from dressedopto.fockspace import ladder_operators
    a1 = ladder_operators(p.specs)[0]
    V = basis.vectors
    assert np.allclose(ops.A1, V.conj().T @ a1 @ V, atol=1e-12)


def test_transition_operator_algebra():
    M = 5
    P = np.zeros((M, M))
    P[3, 1] = 1
    assert not np.any(P @ P)
    Pjj = np.zeros((M, M))
    Pjj[1, 1] = 1
    assert np.array_equal(P.T @ P, Pjj)


@given(st.floats(0.0, 0.15))
def test_spectrum_symmetric_under_coupling_sign(eps):
    p = SystemParams(epsilon=eps, cutoffs=(4, 2, 3))
    H0, HI = build_free(p), build_interaction(p)
    assert np.allclose(np.linalg.eigvalsh(H0 + HI), np.linalg.eigvalsh(H0 - HI), atol=1e-10)


def test_tune_resonance_default():
    assert tune_resonance(SystemParams()) == pytest.approx(0.502, abs=0.002)


def test_tune_resonance_limits():
    assert tune_resonance(SystemParams(epsilon=0.01)) == pytest.approx(0.5, abs=1e-9)
    w05 = tune_resonance(SystemParams(epsilon=0.05))
    w10 = tune_resonance(SystemParams(epsilon=0.1))
    assert abs(w10 - 0.5) > abs(w05 - 0.5)


def test_tune_resonance_errors():
    with pytest.raises(InvalidArgument):
        tune_resonance(SystemParams(), step=2e-3)
    with pytest.raises(InvalidArgument):
        tune_resonance(SystemParams(), lo=0.51, hi=0.52)
    with pytest.raises(NotFound):
        tune_resonance(SystemParams(), lo=0.499, hi=0.501)
