"""Fixed-step RK4 propagation of the dressed master equation.

Two interchangeable kernel sets share one driver:

* ``numpy_kernels``: vectorised numpy, no compilation;
* ``numba_kernels()``: fused element loops under ``numba.njit``,
  compiled on first use.

:func:`get_kernels` returns the numba set unless numba is missing or the
environment variable ``DRESSEDOPTO_DISABLE_NUMBA=1`` is set.

Generator layout, with ``p = diag(rho)`` and ``H_d = F (e^{-iwt} A + h.c.)``::

    L(rho) = K * rho + diag(R @ p) - i (Z - Z^dag),   Z = H_d rho

``K[m, n] = -i (E_m - E_n) - (G_m + G_n) / 2`` folds the free evolution
and the decay of every entry; ``R[a, b]`` is the total rate b -> a.
``Z - Z^dag`` equals the commutator only for Hermitian ``rho``, which the
generator preserves.
"""
import os
from types import SimpleNamespace

import numpy as np

COLUMNS = ("N1", "N2", "Nw", "X1", "X2", "Xw", "Jc", "Jw", "P", "energy")
ENV_FLAG = "DRESSEDOPTO_DISABLE_NUMBA"

# exact eigenvalues at least this often (in steps); Cholesky certificate otherwise
EIG_STRIDE = 25
PSD_SHIFT = 1e-10

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

NUMBA_AVAILABLE = numba is not None


# -- numpy -----------------------------------------------------------------

def _rhs_np(rho, t, K, R, A, Ad, F, omega):
    out = K * rho
    out[np.diag_indices_from(out)] += R @ np.real(np.diag(rho))
    if F != 0.0:
        ph = np.exp(-1j * omega * t)
        Z = (F * (ph * A + np.conj(ph) * Ad)) @ rho
        out -= 1j * (Z - Z.conj().T)
    return out


def _step_np(rho, t, dt, K, R, A, Ad, F, omega, work):
    k1 = _rhs_np(rho, t, K, R, A, Ad, F, omega)
    k2 = _rhs_np(rho + (0.5 * dt) * k1, t + 0.5 * dt, K, R, A, Ad, F, omega)
    k3 = _rhs_np(rho + (0.5 * dt) * k2, t + 0.5 * dt, K, R, A, Ad, F, omega)
    k4 = _rhs_np(rho + dt * k3, t + dt, K, R, A, Ad, F, omega)
    return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


# -- numba -----------------------------------------------------------------

def _rhs_loops(rho, t, K, R, A, Ad, F, omega, H, out):
    M = rho.shape[0]
    for m in range(M):
        acc = 0.0
        for b in range(M):
            acc += R[m, b] * rho[b, b].real
        for n in range(M):
            out[m, n] = K[m, n] * rho[m, n]
        out[m, m] += acc
    if F != 0.0:
        ph = np.exp(-1j * omega * t)
        cph = np.conj(ph)
        for m in range(M):
            for n in range(M):
                H[m, n] = F * (ph * A[m, n] + cph * Ad[m, n])
        Z = np.dot(H, rho)
        for m in range(M):
            for n in range(M):
                out[m, n] -= 1j * (Z[m, n] - np.conj(Z[n, m]))


def _make_step_loops(rhs):
    def step(rho, t, dt, K, R, A, Ad, F, omega, work):
        # work: [k, acc, stage, H]; rho is updated in place
        k, acc, tmp, H = work[0], work[1], work[2], work[3]
        M = rho.shape[0]
        half = 0.5 * dt
        rhs(rho, t, K, R, A, Ad, F, omega, H, k)
        for i in range(M):
            for j in range(M):
                acc[i, j] = k[i, j]
                tmp[i, j] = rho[i, j] + half * k[i, j]
        rhs(tmp, t + half, K, R, A, Ad, F, omega, H, k)
        for i in range(M):
            for j in range(M):
                acc[i, j] += 2.0 * k[i, j]
                tmp[i, j] = rho[i, j] + half * k[i, j]
        rhs(tmp, t + half, K, R, A, Ad, F, omega, H, k)
        for i in range(M):
            for j in range(M):
                acc[i, j] += 2.0 * k[i, j]
                tmp[i, j] = rho[i, j] + dt * k[i, j]
        rhs(tmp, t + dt, K, R, A, Ad, F, omega, H, k)
        for i in range(M):
            for j in range(M):
                rho[i, j] += (dt / 6.0) * (acc[i, j] + k[i, j])
        return rho
    return step


# -- shared driver ---------------------------------------------------------

def _build(jit, step):
    @jit
    def bath_flow(rho, p, E, Hd, Rb, Gb, Gmat):
        diag_part = np.sum(E * (np.dot(Rb, p) - Gb * p))
        return diag_part + np.real(np.sum(Hd.T * Gmat * rho))

    @jit
    def record(rho, t, E, A, Ad, F, omega, obs, Rc, Rw, Gc, Gw, Gmat_c, Gmat_w, row):
        p = np.real(np.diag(rho)).copy()
        for k in range(obs.shape[0]):
            row[k] = np.real(np.sum(obs[k] * rho))
        ph = np.exp(-1j * omega * t)
        Hd = F * (ph * A + np.conj(ph) * Ad)
        row[6] = bath_flow(rho, p, E, Hd, Rc, Gc, Gmat_c)
        row[7] = bath_flow(rho, p, E, Hd, Rw, Gw, Gmat_w)
        row[8] = 2.0 * F * np.real(-1j * omega * ph * np.sum(A * rho.T))
        row[9] = np.sum(E * p)

    @jit
    def certified_psd(rho, shift):
        M = rho.shape[0]
        try:
            np.linalg.cholesky(rho + shift * np.eye(M))
        except Exception:
            return False
        return True

    @jit
    def propagate(rho, t0, dt, n_records, record_every, E, K, R, A, Ad, F, omega,
                  obs, Rc, Rw, Gc, Gw, Gmat_c, Gmat_w, out, stats, drift_tol, neg_tol):
        """Fill ``out`` / ``stats`` row by row; returns ``(rho, n_done)``.

        ``stats`` columns: trace drift, minimum eigenvalue (NaN where only
        the Cholesky certificate ran), pre-symmetrisation Hermiticity
        residual, certificate flag.  ``n_done < n_records`` means record
        ``n_done - 1`` left tolerance.
        """
        M = rho.shape[0]
        work = np.zeros((4, M, M), dtype=np.complex128)
        since_eig = EIG_STRIDE
        for r in range(n_records):
            if r > 0:
                base = t0 + (r - 1) * record_every * dt
                for s in range(record_every):
                    rho = step(rho, base + s * dt, dt, K, R, A, Ad, F, omega, work)
                since_eig += record_every
            t = t0 + r * record_every * dt
            stats[r, 2] = np.max(np.abs(rho - rho.conj().T))
            rho = 0.5 * (rho + rho.conj().T)
            drift = np.real(np.trace(rho)) - 1.0
            stats[r, 0] = drift
            ok = certified_psd(rho, PSD_SHIFT)
            stats[r, 3] = 1.0 if ok else 0.0
            min_eig = np.nan
            if since_eig >= EIG_STRIDE or r == n_records - 1 or not ok:
                min_eig = np.linalg.eigvalsh(rho)[0]
                since_eig = 0
            stats[r, 1] = min_eig
            record(rho, t, E, A, Ad, F, omega, obs, Rc, Rw, Gc, Gw, Gmat_c, Gmat_w, out[r])
            if abs(drift) > drift_tol or min_eig < -neg_tol:
                return rho, r + 1
        return rho, n_records

    @jit
    def propagate_states(rho, t0, dt, n_steps, K, R, A, Ad, F, omega):
        M = rho.shape[0]
        work = np.zeros((4, M, M), dtype=np.complex128)
        for s in range(n_steps):
            rho = step(rho, t0 + s * dt, dt, K, R, A, Ad, F, omega, work)
        return rho

    return SimpleNamespace(step=step, propagate=propagate, propagate_states=propagate_states,
                           record=record, name="")


def _identity(f):
    return f


numpy_kernels = _build(_identity, _step_np)
numpy_kernels.name = "numpy"
numpy_kernels.rhs = _rhs_np
_numba_kernels = None


def numba_kernels():
    """Compiled kernel set (built lazily; each function compiles on first call)."""
    global _numba_kernels
    if not NUMBA_AVAILABLE:
        raise RuntimeError("numba is not installed")
    if _numba_kernels is None:
        fast = numba.njit(fastmath=True)
        rhs = fast(_rhs_loops)
        _numba_kernels = _build(numba.njit, fast(_make_step_loops(rhs)))
        _numba_kernels.name = "numba"
        _numba_kernels.rhs_into = rhs
    return _numba_kernels


def numba_enabled() -> bool:
    return NUMBA_AVAILABLE and os.environ.get(ENV_FLAG, "").lower() not in ("1", "true", "yes")


def get_kernels():
    return numba_kernels() if numba_enabled() else numpy_kernels
