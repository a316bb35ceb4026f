"""Populations, quadratures, heat flows, power and trajectory analysis."""
from __future__ import annotations

import numpy as np
from scipy.ndimage import gaussian_filter1d, maximum_filter1d, minimum_filter1d

from .errors import InvalidArgument, NotFound
from .lindblad import DriveParams, Generator, channel_dissipator, drive_hamiltonian_dot
from .trajectory import Trajectory

POPULATION_KEYS = ("N1", "N2", "Nw")
QUADRATURE_KEYS = ("X1", "X2", "Xw")
FLOW_KEYS = ("Jc", "Jw", "P")


def _expect(op: np.ndarray, rho: np.ndarray) -> complex:
    return np.sum(op.T * rho)  # Tr[op rho]


def population(rho: np.ndarray, op: np.ndarray) -> float:
    """``Tr[op^dag op rho]`` for a dressed ladder operator."""
    return float(np.real(_expect(op.conj().T @ op, rho)))


def quadrature(rho: np.ndarray, op: np.ndarray) -> float:
    """``Tr[(op + op^dag) rho]``."""
    return float(np.real(_expect(op + op.conj().T, rho)))


def heat_flow(rho: np.ndarray, channels, H_tot: np.ndarray) -> float:
    """``Tr[H_tot L(rho)]`` for the dissipator built from ``channels``.

    Equal to ``Tr[L*(H_tot) rho]``; positive values mean energy taken from
    the bath.
    """
    return float(np.real(np.sum(H_tot.T * channel_dissipator(channels, rho))))


def heat_flows(gen: Generator, rho: np.ndarray, t: float) -> tuple:
    """``(J_c, J_w)`` through the vectorised generator."""
    H = gen.total_hamiltonian(t)
    return tuple(
        float(np.real(np.sum(H.T * gen.bath_dissipator(rho, bath))))
        for bath in ("cavity", "wall")
    )


def laser_power(rho: np.ndarray, t: float, drive: DriveParams, ops) -> float:
    """``Tr[dH_d/dt rho]``, the work rate delivered by the drive."""
    return float(np.real(_expect(drive_hamiltonian_dot(t, drive, ops), rho)))


def effective_temperature(N: float, omega: float) -> float:
    """Temperature of a thermal oscillator of frequency ``omega`` holding ``N`` quanta."""
    if not N > 0:
        raise InvalidArgument(f"occupation must be > 0, got {N}")
    if not omega > 0:
        raise InvalidArgument(f"frequency must be > 0, got {omega}")
    return float(omega / np.log1p(1.0 / N))


def dominant_frequency(times, series, noise_factor: float = 30.0):
    """Angular frequency of the strongest spectral line of a uniformly sampled series.

    Returns ``(frequency, resolution)`` with ``resolution = 2 pi / window``.
    The mean is removed first; the peak must stand ``noise_factor`` above
    the median power or :class:`NotFound` is raised.
    """
    times = np.asarray(times, dtype=float)
    x = np.asarray(series, dtype=float)
    if times.size != x.size or times.size < 4:
        raise InvalidArgument("need at least four matching samples")
    dt = times[1] - times[0]
    if not np.allclose(np.diff(times), dt, rtol=1e-6, atol=1e-12):
        raise InvalidArgument("samples must be uniformly spaced")
    x = x - x.mean()
    power = np.abs(np.fft.rfft(x)) ** 2
    power[0] = 0.0
    k = int(np.argmax(power))
    floor = np.median(power[1:])
    if power[k] == 0 or power[k] <= noise_factor * floor:
        raise NotFound("no spectral peak above the noise floor")
    window = dt * times.size
    return 2 * np.pi * k / window, 2 * np.pi / window


def _smooth(x: np.ndarray, width: int) -> np.ndarray:
    # Gaussian rather than box: no sidelobes, so a carrier of a few periods per
    # window is suppressed completely instead of leaking a percent-level ripple
    return gaussian_filter1d(x, width / 2, mode="reflect", truncate=4.0)


def _envelopes(traj: Trajectory, smooth: int) -> dict:
    out = {}
    for key in POPULATION_KEYS + FLOW_KEYS:
        out[key] = _smooth(traj.series(key), smooth)
    for key in QUADRATURE_KEYS:
        out[key] = np.sqrt(2 * np.maximum(_smooth(traj.series(key) ** 2, smooth), 0.0))
    return out


def steady_state_time(traj: Trajectory, kappa: float, rel_tol: float = 1e-3,
                      smooth_time: float | None = None) -> float:
    """Earliest time after which every smoothed observable is stationary.

    Populations, flows and power are smoothed with a running mean and the
    quadratures replaced by their running amplitude ``sqrt(2 <x^2>)``, both
    using a Gaussian window of width ``smooth_time`` (default ``0.5 / kappa``,
    sigma = half of it).  The final ``2 * smooth_time`` of the record, where
    that window runs off the data, is not used.  A time ``tau`` qualifies
    when, for it and every later window start, the spread of each smoothed
    series over ``[tau, tau + 2 / kappa]`` stays below ``rel_tol`` times the
    largest magnitude that series reaches.
    """
    if len(traj) < 2:
        raise InvalidArgument("trajectory too short")
    dt = traj.times[1] - traj.times[0]
    span = int(round(2.0 / kappa / dt)) + 1
    smooth = max(1, int(round((smooth_time if smooth_time is not None else 0.5 / kappa) / dt)))
    n_valid = len(traj) - 2 * smooth
    if span > n_valid:
        raise NotFound("trajectory shorter than one stationarity window")

    n_starts = n_valid - span + 1
    ok = np.ones(n_starts, dtype=bool)
    for s in _envelopes(traj, smooth).values():
        s = s[:n_valid]
        scale = np.max(np.abs(s))
        if scale == 0:
            continue
        # forward-looking window [tau, tau + span)
        hi = maximum_filter1d(s, span, origin=-(span // 2))[:n_starts]
        lo = minimum_filter1d(s, span, origin=-(span // 2))[:n_starts]
        ok &= (hi - lo) < rel_tol * scale
    if not ok[-1]:
        raise NotFound("observables still drifting at the end of the trajectory")
    bad = np.flatnonzero(~ok)
    first = 0 if bad.size == 0 else bad[-1] + 1
    return float(traj.times[first])


def steady_observables(traj: Trajectory, window: float) -> dict:
    """Means (populations, flows, power) and amplitudes (quadratures) over the final ``window``."""
    tail = traj.window(traj.times[-1] - window)
    out = {key: float(np.mean(tail.series(key))) for key in POPULATION_KEYS + FLOW_KEYS}
    for key in QUADRATURE_KEYS:
        out[f"{key}_amp"] = float(np.sqrt(2 * np.mean(tail.series(key) ** 2)))
    return out
