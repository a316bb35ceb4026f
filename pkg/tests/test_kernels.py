import numpy as np
import pytest

from dressedopto import _kernels
from dressedopto.dressed import dress
from dressedopto.hamiltonian import SystemParams
from dressedopto.lindblad import BathParams, DriveParams, Generator, integrate

needs_numba = pytest.mark.skipif(not _kernels.NUMBA_AVAILABLE, reason="numba not installed")


@pytest.fixture(scope="module")
def gen():
    _, table, ops = dress(SystemParams(), 40)
    return Generator(table, ops, BathParams(T_c=0.1), DriveParams(F=0.01))


def test_env_flag_selects_numpy(monkeypatch):
    monkeypatch.setenv(_kernels.ENV_FLAG, "1")
    assert not _kernels.numba_enabled()
    assert _kernels.get_kernels() is _kernels.numpy_kernels


@needs_numba
def test_numba_default(monkeypatch):
    monkeypatch.delenv(_kernels.ENV_FLAG, raising=False)
    assert _kernels.numba_enabled()
    assert _kernels.get_kernels() is _kernels.numba_kernels()


@needs_numba
def test_backends_agree_on_trajectory(gen):
    a = integrate(gen, gen.ground_state(), 40.0, record_every=10, kernels=_kernels.numpy_kernels)
    b = integrate(gen, gen.ground_state(), 40.0, record_every=10, kernels=_kernels.numba_kernels())
    assert np.abs(a.final_state - b.final_state).max() < 1e-15
    for name in ("N1", "N2", "Nw", "X1", "Jc", "Jw", "P", "energy"):
        assert np.allclose(a.series(name), b.series(name), rtol=1e-10, atol=1e-18)


@needs_numba
def test_propagate_states_matches_integrate(gen):
    rho = gen.propagate(gen.ground_state(), 0.0, 0.02, 500)
    tr = integrate(gen, gen.ground_state(), 10.0, record_every=500)
    assert np.abs(rho - tr.final_state).max() < 1e-15


def test_numpy_rhs_is_generator(gen, rng):
    from conftest import random_density
    rho = random_density(40, rng)
    a = gen._args
    out = _kernels.numpy_kernels.rhs(rho, 1.5, a["K"], a["R"], a["A"], a["Ad"], a["F"], a["omega"])
    assert np.array_equal(out, gen(1.5, rho))
