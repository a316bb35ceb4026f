"""Closed-form coherence-transfer results for the driven reduced models.

Mode 1 is replaced by a coherent amplitude ``alpha = F exp(-i omega1 t)``;
``F`` here is that amplitude, not the drive strength of the master equation.
The brute-force oracle integrates the same reduced rotating-wave models
directly so the closed forms can be checked against them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IntegrationUnstable, InvalidArgument
from .fockspace import annihilation

NORM_TOL = 1e-8
MAX_WALL_CUTOFF = 12
MAX_MODE2_CUTOFF = 6


@dataclass(frozen=True)
class AppendixParams:
    omega1: float = 0.5
    omega2: float = 1.0
    Omega: float = 1.0
    epsilon: float = 0.05
    F: float = 1.0

    def __post_init__(self):
        for name in ("omega1", "omega2", "Omega"):
            if not getattr(self, name) > 0:
                raise InvalidArgument(f"{name} must be > 0")
        if self.F < 0:
            raise InvalidArgument("coherent amplitude F must be >= 0")

    @property
    def beta(self) -> float:
        return -self.epsilon * self.F**2 * self.omega1

    @property
    def xi(self) -> float:
        return -self.omega1 * np.sqrt(self.omega1 * self.omega2) * self.epsilon**2 * self.F**3


def xw_closed_form(t, p: AppendixParams):
    """Wall quadrature ``beta t sin(Omega t)`` under resonant conversion."""
    t = np.asarray(t, dtype=float)
    return p.beta * t * np.sin(p.Omega * t)


def kernel_K(omega: float, t):
    """``int_0^t t' exp(-i omega t') dt'``.

    Uses the closed form away from ``omega t = 0`` and its Taylor series
    near it, where the closed form cancels catastrophically.  At
    ``omega = 0`` this is ``t**2 / 2``.
    """
    t = np.asarray(t, dtype=float)
    z = -1j * omega * t
    small = np.abs(z) < 1e-2
    out = np.empty(t.shape, dtype=complex)
    zs, ts = z[small], t[small]
    series = np.zeros(zs.shape, dtype=complex)
    term = np.ones(zs.shape, dtype=complex)
    for k in range(8):
        series += term / (k + 2)
        term = term * zs / (k + 1)
    out[small] = ts**2 * series
    if omega != 0:
        zl, tl = z[~small], t[~small]
        out[~small] = (np.exp(zl) * (1 + 1j * omega * tl) - 1) / omega**2
    return out if out.ndim else complex(out)


def _check_modes(p: AppendixParams):
    if p.omega2 == p.omega1:
        raise InvalidArgument("omega2 must differ from omega1")


def _sinc(x):
    return np.sinc(np.asarray(x) / np.pi)


def x2_closed_form(t, p: AppendixParams):
    """Mode-2 quadrature, all three lines including both sinc corrections."""
    _check_modes(p)
    t = np.asarray(t, dtype=float)
    s, d = p.omega2 + p.omega1, p.omega2 - p.omega1
    return p.xi * t / 2 * (
        (1 / s - 1 / d) * np.sin(p.omega1 * t)
        + np.sin(s * t / 2) * _sinc(d * t / 2) / d
        - np.sin(d * t / 2) * _sinc(s * t / 2) / s
    )


def x2_first_line(t, p: AppendixParams):
    """Late-time truncation of :func:`x2_closed_form` (sinc terms dropped)."""
    _check_modes(p)
    t = np.asarray(t, dtype=float)
    s, d = p.omega2 + p.omega1, p.omega2 - p.omega1
    return p.xi * t / 2 * (1 / s - 1 / d) * np.sin(p.omega1 * t)


def x2_with_conversion(t, p: AppendixParams):
    """Leading cubic term once mode-2/wall conversion is included."""
    _check_modes(p)
    t = np.asarray(t, dtype=float)
    s, d = p.omega2 + p.omega1, p.omega2 - p.omega1
    return (p.xi * t) ** 3 / 16 * (1 / s - 1 / d) * np.sin(p.omega1 * t)


@dataclass
class OracleSeries:
    times: np.ndarray
    Xw: np.ndarray
    X2: np.ndarray | None = None


def _oracle_operators(model: str, wall_cutoff: int, mode2_cutoff: int):
    b = annihilation(wall_cutoff)
    if model == "wall":
        return b, None
    a2 = annihilation(mode2_cutoff)
    I2, Iw = np.eye(mode2_cutoff + 1), np.eye(wall_cutoff + 1)
    return np.kron(I2, b), np.kron(a2, Iw)


def brute_force_oracle(model: str, p: AppendixParams, t_max: float, dt: float = 0.005,
                       wall_cutoff: int = MAX_WALL_CUTOFF, mode2_cutoff: int = MAX_MODE2_CUTOFF,
                       omega_L: float | None = None, record_every: int = 1) -> OracleSeries:
    """Schrodinger-picture RK4 integration of a reduced model from the vacuum.

    ``model="wall"``: ``Omega b^dag b + g (exp(-2i omega_L t) b^dag + h.c.)``
    with ``g = omega1 epsilon F**2 / 2``.

    ``model="two_mode"`` adds ``omega2 a2^dag a2`` and
    ``g' (exp(-i omega_L t) b^dag + h.c.)(a2 + a2^dag)`` with
    ``g' = sqrt(omega1 omega2) epsilon F / 2``.

    ``omega_L`` defaults to ``omega1``.
    """
    if model not in ("wall", "two_mode"):
        raise InvalidArgument(f"unknown model {model!r}; expected 'wall' or 'two_mode'")
    if not 1 <= wall_cutoff <= MAX_WALL_CUTOFF or not 1 <= mode2_cutoff <= MAX_MODE2_CUTOFF:
        raise InvalidArgument(
            f"cutoffs limited to wall <= {MAX_WALL_CUTOFF}, mode2 <= {MAX_MODE2_CUTOFF}"
        )
    if not t_max > 0 or not dt > 0:
        raise InvalidArgument("t_max and dt must be > 0")
    wL = p.omega1 if omega_L is None else float(omega_L)

    b, a2 = _oracle_operators(model, wall_cutoff, mode2_cutoff)
    bd = b.conj().T
    H0 = p.Omega * bd @ b
    g = p.omega1 * p.epsilon * p.F**2 / 2
    # time-dependent parts as sums of c(t) * V + h.c. with c(t) = exp(-i nu t)
    parts = [(2 * wL, g * bd)]
    if a2 is not None:
        H0 = H0 + p.omega2 * a2.conj().T @ a2
        gp = np.sqrt(p.omega1 * p.omega2) * p.epsilon * p.F / 2
        parts.append((wL, gp * bd @ (a2 + a2.conj().T)))
    parts = [(nu, V, V.conj().T.copy()) for nu, V in parts]
    Xw_op = b + bd
    X2_op = None if a2 is None else a2 + a2.conj().T

    def deriv(t, psi):
        out = H0 @ psi
        for nu, V, Vd in parts:
            c = np.exp(-1j * nu * t)
            out += c * (V @ psi) + np.conj(c) * (Vd @ psi)
        return -1j * out

    n_steps = int(round(t_max / dt))
    n_rec = n_steps // record_every + 1
    psi = np.zeros(H0.shape[0], dtype=complex)
    psi[0] = 1.0
    times = dt * record_every * np.arange(n_rec)
    Xw = np.zeros(n_rec)
    X2 = None if X2_op is None else np.zeros(n_rec)
    t = 0.0
    for r in range(n_rec):
        if r:
            for _ in range(record_every):
                k1 = deriv(t, psi)
                k2 = deriv(t + dt / 2, psi + dt / 2 * k1)
                k3 = deriv(t + dt / 2, psi + dt / 2 * k2)
                k4 = deriv(t + dt, psi + dt * k3)
                psi = psi + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
                t += dt
            drift = abs(np.vdot(psi, psi).real - 1)
            if drift > NORM_TOL:
                raise IntegrationUnstable(
                    f"norm drift {drift:.3e} at t={t:.6g}",
                    {"t": t, "norm_drift": drift},
                )
        Xw[r] = np.vdot(psi, Xw_op @ psi).real
        if X2 is not None:
            X2[r] = np.vdot(psi, X2_op @ psi).real
    return OracleSeries(times, Xw, X2)


def xw_validity_time(p: AppendixParams, wall_cutoff: int = MAX_WALL_CUTOFF) -> float:
    """Longest time the truncated wall space can host the linear growth of X_w."""
    if p.beta == 0:
        return np.inf
    return 0.2 * wall_cutoff / abs(p.beta)


FORMULAS = {"xw": xw_closed_form, "x2": x2_closed_form, "x2conv": x2_with_conversion}
