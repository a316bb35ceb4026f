"""Dressed-picture master equation with a cavity bath, a wall bath and a drive."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dressed import DressedOperators, TransitionTable
from .errors import IntegrationUnstable, InvalidArgument
from .trajectory import Trajectory

DRIFT_TOL = 1e-6
NEGATIVITY_TOL = 1e-6


@dataclass(frozen=True)
class BathParams:
    T_c: float = 1e-6
    T_w: float = 0.3
    kappa: float = 0.003
    gamma: float = 0.009

    def __post_init__(self):
        for name in ("T_c", "T_w", "kappa", "gamma"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise InvalidArgument(f"{name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class DriveParams:
    F: float = 0.02 * 0.009
    omega_L: float = 0.502

    def __post_init__(self):
        if not np.isfinite(self.F) or self.F < 0:
            raise InvalidArgument(f"drive amplitude must be >= 0, got {self.F}")
        if not np.isfinite(self.omega_L) or self.omega_L <= 0:
            raise InvalidArgument(f"drive frequency must be > 0, got {self.omega_L}")


@dataclass(frozen=True)
class LindbladChannel:
    i: int
    j: int
    rate_down: float  # coefficient of D[|j><i|]
    rate_up: float  # coefficient of D[|i><j|]
    source: str


def _bose(delta, T):
    delta = np.asarray(delta, dtype=float)
    if T <= 0:
        return np.zeros_like(delta)
    x = delta / T
    out = np.zeros_like(x)
    ok = x <= 700.0
    out[ok] = 1.0 / np.expm1(x[ok])
    return out


def thermal_occupation(delta: float, T: float) -> float:
    """Bose-Einstein occupation ``1 / (exp(delta / T) - 1)``; zero at ``T = 0``."""
    if not delta > 0:
        raise InvalidArgument(f"transition frequency must be > 0, got {delta}")
    if T < 0:
        raise InvalidArgument(f"temperature must be >= 0, got {T}")
    return float(_bose(delta, T))


def _weights(table: TransitionTable, baths: BathParams):
    """Per-pair channel weights (lower triangle, degenerate pairs zeroed)."""
    keep = np.tril(np.ones((table.M, table.M), dtype=bool), k=-1) & ~table.degenerate
    wc = np.where(keep, baths.kappa / 4 * np.abs(table.u1 + table.u2) ** 2, 0.0)
    ww = np.where(keep, baths.gamma / 2 * np.abs(table.w) ** 2, 0.0)
    return keep, wc, ww


def build_channels(table: TransitionTable, baths: BathParams) -> list:
    keep, wc, ww = _weights(table, baths)
    delta = table.delta
    channels = []
    for i, j in zip(*np.nonzero(keep)):
        for weight, T, source in ((wc, baths.T_c, "cavity"), (ww, baths.T_w, "wall")):
            n = float(_bose(delta[i, j], T))
            w = float(weight[i, j])
            channels.append(LindbladChannel(int(i), int(j), w * (1 + n), w * n, source))
    return channels


def _jump(a: int, b: int, M: int) -> np.ndarray:
    P = np.zeros((M, M), dtype=complex)
    P[a, b] = 1.0
    return P


def dissipator_apply(ij, rho: np.ndarray) -> np.ndarray:
    """``D[P] rho`` for the transition operator ``P = |i><j|``."""
    i, j = ij
    P = _jump(i, j, rho.shape[0])
    Pd = P.conj().T
    return 0.5 * (2 * P @ rho @ Pd - rho @ Pd @ P - Pd @ P @ rho)


def channel_dissipator(channels, rho: np.ndarray) -> np.ndarray:
    out = np.zeros_like(rho, dtype=complex)
    for ch in channels:
        if ch.rate_down:
            out += ch.rate_down * dissipator_apply((ch.j, ch.i), rho)
        if ch.rate_up:
            out += ch.rate_up * dissipator_apply((ch.i, ch.j), rho)
    return out


def channel_adjoint(channels, X: np.ndarray) -> np.ndarray:
    """Heisenberg-picture dissipator ``L*(X)`` built from the same channels."""
    out = np.zeros_like(X, dtype=complex)
    M = X.shape[0]
    for ch in channels:
        for rate, (a, b) in ((ch.rate_down, (ch.j, ch.i)), (ch.rate_up, (ch.i, ch.j))):
            if rate:
                P = _jump(a, b, M)
                Pd = P.conj().T
                out += rate * (Pd @ X @ P - 0.5 * (Pd @ P @ X + X @ Pd @ P))
    return out


def drive_hamiltonian(t: float, drive: DriveParams, ops: DressedOperators) -> np.ndarray:
    """Co-rotating drive ``F (e^{-iwt} A1^dag + e^{iwt} A1)`` on the pumped mode."""
    ph = np.exp(-1j * drive.omega_L * t)
    return drive.F * (ph * ops.A1.conj().T + np.conj(ph) * ops.A1)


def drive_hamiltonian_dot(t: float, drive: DriveParams, ops: DressedOperators) -> np.ndarray:
    w = drive.omega_L
    ph = np.exp(-1j * w * t)
    return drive.F * (-1j * w * ph * ops.A1.conj().T + 1j * w * np.conj(ph) * ops.A1)


def rhs(t: float, rho: np.ndarray, channels, energies, drive: DriveParams,
        ops: DressedOperators) -> np.ndarray:
    """Channel-by-channel evaluation of the master equation (reference path)."""
    H = np.diag(np.asarray(energies, dtype=complex)) + drive_hamiltonian(t, drive, ops)
    return -1j * (H @ rho - rho @ H) + channel_dissipator(channels, rho)


class Generator:
    """Vectorised master-equation generator used by the integrator.

    The per-channel dissipators collapse into a population transfer matrix
    ``R`` (``R[a, b]`` = total rate b -> a) and per-level escape rates.
    All arrays are in dressed energy order.
    """

    def __init__(self, table: TransitionTable, ops: DressedOperators,
                 baths: BathParams, drive: DriveParams):
        self.table, self.ops, self.baths, self.drive = table, ops, baths, drive
        E = np.asarray(table.energies, dtype=float)
        self.E = E
        keep, wc, ww = _weights(table, baths)
        delta = np.where(keep, table.delta, 1.0)
        self.n_dropped = int(table.degenerate.sum())

        def transfer(weight, T):
            n = np.where(keep, _bose(delta, T), 0.0)
            # absorption j -> i lands at [i, j], emission i -> j at [j, i]
            return (weight * n) + (weight * (1 + n)).T

        self.Rc = transfer(wc, baths.T_c)
        self.Rw = transfer(ww, baths.T_w)
        self.R = self.Rc + self.Rw
        self.Gc = self.Rc.sum(axis=0)
        self.Gw = self.Rw.sum(axis=0)
        G = self.Gc + self.Gw
        self.Gmat_c = -0.5 * (self.Gc[:, None] + self.Gc[None, :])
        self.Gmat_w = -0.5 * (self.Gw[:, None] + self.Gw[None, :])
        self.K = -1j * (E[:, None] - E[None, :]) - 0.5 * (G[:, None] + G[None, :])
        # the kernels apply F (e^{-iwt} A + e^{iwt} Ad); A is the raising operator
        self.A = ops.A1.conj().T.astype(complex)
        self.observables = np.array([
            ops.A1.conj().T @ ops.A1,
            ops.A2.conj().T @ ops.A2,
            ops.B.conj().T @ ops.B,
            ops.A1 + ops.A1.conj().T,
            ops.A2 + ops.A2.conj().T,
            ops.B + ops.B.conj().T,
        ], dtype=complex)
        c = np.ascontiguousarray
        self._args = dict(
            E=c(E), K=c(self.K), R=c(self.R), A=c(self.A), Ad=c(self.A.conj().T),
            F=float(drive.F), omega=float(drive.omega_L), obs=c(np.conj(self.observables)),
            Rc=c(self.Rc), Rw=c(self.Rw), Gc=c(self.Gc), Gw=c(self.Gw),
            Gmat_c=c(self.Gmat_c), Gmat_w=c(self.Gmat_w),
        )

    @property
    def M(self) -> int:
        return self.E.size

    @property
    def max_frequency(self) -> float:
        return float(max(self.E.max() - self.E.min(), self.drive.omega_L))

    def _kernel_state(self, rho):
        return np.array(rho, dtype=complex, order="C", copy=True)

    def __call__(self, t: float, rho: np.ndarray) -> np.ndarray:
        a = self._args
        return _kernels.numpy_kernels.rhs(np.asarray(rho, dtype=complex), float(t), a["K"],
                                          a["R"], a["A"], a["Ad"], a["F"], a["omega"])

    def bath_dissipator(self, rho: np.ndarray, bath: str) -> np.ndarray:
        R, Gmat = (self.Rc, self.Gmat_c) if bath == "cavity" else (self.Rw, self.Gmat_w)
        out = Gmat * rho
        out[np.diag_indices(self.M)] += R @ np.real(np.diag(rho))
        return out

    def total_hamiltonian(self, t: float) -> np.ndarray:
        return np.diag(self.E.astype(complex)) + drive_hamiltonian(t, self.drive, self.ops)

    def ground_state(self) -> np.ndarray:
        rho = np.zeros((self.M, self.M), dtype=complex)
        rho[0, 0] = 1.0
        return rho

    def propagate(self, rho, t0: float, dt: float, n_steps: int, kernels=None):
        """Bare RK4 advance of ``n_steps`` without recording."""
        k = kernels or _kernels.get_kernels()
        a = self._args
        return k.propagate_states(self._kernel_state(rho), float(t0), float(dt), int(n_steps),
                                  a["K"], a["R"], a["A"], a["Ad"], a["F"], a["omega"])


def max_stable_dt(gen: Generator) -> float:
    return 2 * np.pi / (20 * gen.max_frequency)


def integrate(gen: Generator, rho0: np.ndarray, t_max: float, dt: float = 0.02,
              record_every: int = 25, t0: float = 0.0, kernels=None) -> Trajectory:
    """Fixed-step RK4 from ``t0`` to ``t0 + t_max``, recording every ``record_every`` steps."""
    if not t_max > 0:
        raise InvalidArgument(f"t_max must be > 0, got {t_max}")
    if not 0 < dt <= max_stable_dt(gen) * (1 + 1e-12):
        raise InvalidArgument(
            f"dt={dt} exceeds the resolution bound {max_stable_dt(gen):.4g} "
            "for the fastest kept transition"
        )
    record_every = int(record_every)
    if record_every < 1:
        raise InvalidArgument("record_every must be >= 1")
    n_steps = int(round(t_max / dt))
    n_records = n_steps // record_every + 1
    kernels = kernels or _kernels.get_kernels()

    a = gen._args
    out = np.zeros((n_records, len(_kernels.COLUMNS)))
    stats = np.zeros((n_records, 4))
    rho, n_done = kernels.propagate(
        gen._kernel_state(rho0), float(t0), float(dt), n_records, record_every, a["E"],
        a["K"], a["R"], a["A"], a["Ad"], a["F"], a["omega"], a["obs"], a["Rc"], a["Rw"], a["Gc"], a["Gw"], a["Gmat_c"], a["Gmat_w"],
        out, stats, DRIFT_TOL, NEGATIVITY_TOL,
    )
    times = t0 + dt * record_every * np.arange(n_records)
    if n_done < n_records:
        k = n_done - 1
        raise IntegrationUnstable(
            f"state left tolerance at t={times[k]:.6g}: trace drift {stats[k, 0]:.3e}, "
            f"min eigenvalue {stats[k, 1]:.3e}",
            {"t": float(times[k]), "trace_drift": float(stats[k, 0]),
             "min_eig": float(stats[k, 1]), "record": int(k)},
        )
    return Trajectory.from_table(times, out, stats, final_state=rho)
