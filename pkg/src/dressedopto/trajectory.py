from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import COLUMNS

RECORD_FIELDS = COLUMNS[:9]


@dataclass
class Trajectory:
    """Time grid plus the observables recorded along a run.

    ``energy`` is ``Tr[H_s' rho]``.  ``trace_drift``, ``min_eig`` and
    ``psd_certified`` are per-record health diagnostics; ``min_eig`` is NaN
    on records where positivity was only certified by a shifted Cholesky
    factorisation.
    """

    times: np.ndarray
    N1: np.ndarray
    N2: np.ndarray
    Nw: np.ndarray
    X1: np.ndarray
    X2: np.ndarray
    Xw: np.ndarray
    Jc: np.ndarray
    Jw: np.ndarray
    P: np.ndarray
    energy: np.ndarray
    trace_drift: np.ndarray = field(default_factory=lambda: np.zeros(0))
    min_eig: np.ndarray = field(default_factory=lambda: np.zeros(0))
    psd_certified: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    final_state: np.ndarray | None = None

    @classmethod
    def from_table(cls, times, table, stats=None, final_state=None):
        cols = {name: np.ascontiguousarray(table[:, k]) for k, name in enumerate(COLUMNS)}
        if stats is not None:
            cols["trace_drift"] = stats[:, 0].copy()
            cols["min_eig"] = stats[:, 1].copy()
            cols["psd_certified"] = stats[:, 3] > 0.5
        return cls(times=np.asarray(times, dtype=float), final_state=final_state, **cols)

    @classmethod
    def empty(cls):
        z = np.zeros(0)
        return cls(times=z, **{name: z for name in COLUMNS})

    def __len__(self):
        return self.times.size

    def series(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def window(self, t_start: float, t_stop: float = np.inf) -> "Trajectory":
        sel = (self.times >= t_start) & (self.times <= t_stop)
        kw = {name: getattr(self, name)[sel] for name in COLUMNS}
        return Trajectory(
            times=self.times[sel],
            trace_drift=self.trace_drift[sel] if self.trace_drift.size else self.trace_drift,
            min_eig=self.min_eig[sel] if self.min_eig.size else self.min_eig,
            psd_certified=self.psd_certified[sel] if self.psd_certified.size else self.psd_certified,
            **kw,
        )
