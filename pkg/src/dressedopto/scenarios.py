"""Preset experiments, the end-to-end run pipeline and CSV output."""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .dressed import dress, tune_resonance
from .errors import InvalidArgument, NotFound
from .hamiltonian import SystemParams
from .lindblad import BathParams, DriveParams, Generator, integrate
from .observables import effective_temperature, steady_observables, steady_state_time
from .trajectory import Trajectory

log = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "DRESSEDOPTO_OUTPUT_DIR"
CSV_COLUMNS = ("t", "kappa_t", "N1", "N2", "Nw", "X1", "X2", "Xw", "Jc", "Jw", "P")
GATE_TOL = 0.01
GATE_CUTOFF_STEP = 2
GATE_M_STEP = 20
KAPPA_REF = 0.003
GAMMA = 0.009
ZOOM_WINDOW = (11.0, 11.14)


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to reproduce one run.

    ``tuned_omega1`` sets both the mode-1 frequency and the drive frequency;
    leave it ``None`` and set ``auto_tune`` to scan for it instead.
    ``csv_window`` restricts the CSV rows to a range of ``kappa_ref * t``.
    """

    system: SystemParams = field(default_factory=SystemParams)
    baths: BathParams = field(default_factory=BathParams)
    drive: DriveParams = field(default_factory=DriveParams)
    tuned_omega1: float | None = 0.502
    auto_tune: bool = False
    t_max_kappa_units: float = 15.0
    kappa_ref: float = KAPPA_REF
    dt: float = 0.02
    record_every: int = 25
    dressed_M: int = 60
    output_path: str | None = None
    csv_window: tuple | None = None
    converge_check: bool = True
    name: str = "custom"

    def __post_init__(self):
        if self.tuned_omega1 is None and not self.auto_tune:
            raise InvalidArgument("either tuned_omega1 or auto_tune is required")
        if self.tuned_omega1 is not None and not self.tuned_omega1 > 0:
            raise InvalidArgument("tuned_omega1 must be > 0")
        for name in ("t_max_kappa_units", "kappa_ref", "dt"):
            if not getattr(self, name) > 0:
                raise InvalidArgument(f"{name} must be > 0")
        if int(self.record_every) < 1:
            raise InvalidArgument("record_every must be >= 1")
        if int(self.dressed_M) < 2:
            raise InvalidArgument("dressed_M must be >= 2")

    @property
    def t_max(self) -> float:
        return self.t_max_kappa_units / self.kappa_ref


@dataclass
class ConvergenceReport:
    """Steady-observable drift against a run with larger cutoffs and M."""

    cutoffs: tuple
    dressed_M: int
    reference: dict
    drift: dict
    tolerance: float = GATE_TOL

    @property
    def max_drift(self) -> float:
        return max(self.drift.values()) if self.drift else 0.0

    @property
    def converged(self) -> bool:
        return self.max_drift < self.tolerance


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    trajectory: Trajectory
    t_f: float
    steady: dict
    convergence: ConvergenceReport | None
    n_dropped: int
    omega1: float
    warnings: list = field(default_factory=list)

    @property
    def converged(self) -> bool:
        """Outcome of the cutoff/M gate (True when the gate was skipped).

        A missing ``t_f`` only adds a warning: the steady values are then
        the final-window values.
        """
        return self.convergence is None or self.convergence.converged

    @property
    def steady_reached(self) -> bool:
        return bool(np.isfinite(self.t_f))


def _make(name, *, T_c=1e-6, T_w=0.3, kappa=KAPPA_REF, F=0.02 * GAMMA, epsilon=0.05,
          cutoffs=None, **extra):
    system = SystemParams(epsilon=epsilon) if cutoffs is None else SystemParams(
        epsilon=epsilon, cutoffs=cutoffs)
    return ScenarioConfig(
        system=system,
        baths=BathParams(T_c=T_c, T_w=T_w, kappa=kappa, gamma=GAMMA),
        drive=DriveParams(F=F, omega_L=0.502),
        tuned_omega1=0.502, name=name, **extra,
    )


PRESETS = {
    "fig2_equilibrium": lambda: _make("fig2_equilibrium", T_c=0.3),
    "fig2_gradient": lambda: _make("fig2_gradient"),
    "fig3_strong_laser": lambda: _make("fig3_strong_laser", T_c=0.3, F=0.1 * GAMMA),
    "fig5_gradient_coherence": lambda: _make(
        "fig5_gradient_coherence", record_every=1, csv_window=ZOOM_WINDOW),
    "fig6_high_kappa": lambda: _make("fig6_high_kappa", kappa=0.03),
    # the default cutoffs leave a 2.5% drift in N2 at this coupling
    "fig9_high_epsilon": lambda: _make("fig9_high_epsilon", epsilon=0.1, cutoffs=(8, 6, 6)),
}


def preset(name: str) -> ScenarioConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        raise NotFound(f"unknown preset {name!r}; valid: {', '.join(PRESETS)}") from None


# flat key = value names, used by config files and --override
def _parse_cutoffs(v):
    parts = [p for p in str(v).replace(",", " ").split() if p]
    if len(parts) != 3:
        raise InvalidArgument(f"cutoffs need three integers, got {v!r}")
    return tuple(int(p) for p in parts)


def _parse_bool(v):
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise InvalidArgument(f"not a boolean: {v!r}")


def _parse_window(v):
    parts = [p for p in str(v).replace(",", " ").replace(":", " ").split() if p]
    if len(parts) != 2:
        raise InvalidArgument(f"window needs two numbers, got {v!r}")
    return (float(parts[0]), float(parts[1]))


_SYSTEM_KEYS = {"omega2": "omega2", "omega_wall": "Omega", "epsilon": "epsilon",
                "cutoffs": "cutoffs"}
_BATH_KEYS = {"t_c": "T_c", "t_w": "T_w", "kappa": "kappa", "gamma": "gamma"}
_DRIVE_KEYS = {"f": "F"}
_TOP_KEYS = {
    "t_max_kappa_units": float, "kappa_ref": float, "dt": float, "record_every": int,
    "dressed_m": int, "output_path": str, "csv_window": _parse_window,
    "converge_check": _parse_bool, "name": str,
}
CONFIG_KEYS = tuple(_SYSTEM_KEYS) + tuple(_BATH_KEYS) + tuple(_DRIVE_KEYS) + (
    "tuned_omega1",) + tuple(_TOP_KEYS)


def apply_overrides(config: ScenarioConfig, values: dict) -> ScenarioConfig:
    """Return ``config`` with flat ``key -> text`` values applied."""
    system, baths, drive = {}, {}, {}
    top = {}
    for key, raw in values.items():
        k = key.strip().lower().replace("-", "_")
        v = str(raw).strip()
        try:
            if k in _SYSTEM_KEYS:
                system[_SYSTEM_KEYS[k]] = _parse_cutoffs(v) if k == "cutoffs" else float(v)
            elif k in _BATH_KEYS:
                baths[_BATH_KEYS[k]] = float(v)
            elif k in _DRIVE_KEYS:
                drive[_DRIVE_KEYS[k]] = float(v)
            elif k == "tuned_omega1":
                if v.lower() == "auto":
                    top.update(tuned_omega1=None, auto_tune=True)
                else:
                    top.update(tuned_omega1=float(v), auto_tune=False)
            elif k in _TOP_KEYS:
                top["dressed_M" if k == "dressed_m" else k] = _TOP_KEYS[k](v)
            else:
                raise InvalidArgument(f"unknown config key {key!r}; valid: {', '.join(CONFIG_KEYS)}")
        except ValueError as e:
            if isinstance(e, InvalidArgument):
                raise
            raise InvalidArgument(f"bad value for {key!r}: {raw!r}") from None
    return replace(
        config,
        system=replace(config.system, **system),
        baths=replace(config.baths, **baths),
        drive=replace(config.drive, **drive),
        **top,
    )


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgument(f"line {n}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise InvalidArgument(f"line {n}: empty key")
        out[key] = value
    return out


def load_config(path: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        values = parse_config_text(fh.read())
    if base is None and "preset" in values:
        base = preset(values.pop("preset"))
    values.pop("preset", None)
    return apply_overrides(base or ScenarioConfig(), values)


def _simulate(system: SystemParams, drive: DriveParams, config: ScenarioConfig, M: int,
              kernels=None, dt=None, record_every=None):
    _, table, ops = dress(system, M)
    gen = Generator(table, ops, config.baths, drive)
    traj = integrate(gen, gen.ground_state(), config.t_max, dt=dt or config.dt,
                     record_every=record_every or config.record_every, kernels=kernels)
    return traj, gen


def relative_drift(a: dict, b: dict) -> dict:
    """``|a - b| / max(|a|, |b|)`` per shared key (0 when both vanish)."""
    out = {}
    for key in a.keys() & b.keys():
        scale = max(abs(a[key]), abs(b[key]))
        out[key] = 0.0 if scale == 0 else abs(a[key] - b[key]) / scale
    return out


def steady_summary(traj: Trajectory, kappa: float) -> dict:
    steady = steady_observables(traj, 2.0 / kappa)
    if steady["Nw"] > 0:
        steady["Tw_eff"] = effective_temperature(steady["Nw"], 1.0)
    return steady


def run(config: ScenarioConfig, kernels=None) -> ScenarioResult:
    """Build, diagonalise, integrate and analyse one scenario.

    With ``config.converge_check`` the run is repeated with every cutoff
    raised by 2 and ``M`` by 20; the result is flagged unconverged when a
    steady observable moves by 1% or more.
    """
    warnings = []
    system = config.system
    if config.auto_tune:
        w1 = tune_resonance(system)
        log.info("tuned omega1 = %s", w1)
    else:
        w1 = float(config.tuned_omega1)
    system = system.with_(omega1=w1)
    drive = replace(config.drive, omega_L=w1)
    config = replace(config, system=system, drive=drive, tuned_omega1=w1, auto_tune=False)

    traj, gen = _simulate(system, drive, config, config.dressed_M, kernels)
    kappa = config.baths.kappa
    try:
        t_f = steady_state_time(traj, kappa)
    except NotFound as e:
        t_f = float("nan")
        warnings.append(f"steady state not reached: {e}; reporting final values")
        log.warning(warnings[-1])
    steady = steady_summary(traj, kappa)

    report = None
    if config.converge_check:
        cut = tuple(c + GATE_CUTOFF_STEP for c in system.cutoffs)
        M = config.dressed_M + GATE_M_STEP
        ref_traj, _ = _simulate(system.with_(cutoffs=cut), drive, config, M, kernels,
                                record_every=max(config.record_every, 25))
        ref = steady_summary(ref_traj, kappa)
        report = ConvergenceReport(cut, M, ref, relative_drift(steady, ref))
        if not report.converged:
            worst = max(report.drift, key=report.drift.get)
            warnings.append(f"convergence gate failed: {worst} drifts {report.drift[worst]:.3%}")
            log.warning(warnings[-1])

    result = ScenarioResult(config, traj, t_f, steady, report, gen.n_dropped, w1, warnings)
    if config.output_path:
        emit_csv(result, config.output_path)
    return result


def _rows(result: ScenarioResult) -> np.ndarray:
    traj = result.trajectory
    cfg = result.config
    kt = cfg.kappa_ref * traj.times
    table = np.column_stack([traj.times, kt] + [traj.series(c) for c in CSV_COLUMNS[2:]])
    if cfg.csv_window is not None and len(traj):
        lo, hi = cfg.csv_window
        table = table[(kt >= lo) & (kt <= hi)]
    return table


def emit_csv(result: ScenarioResult, path: str) -> None:
    """Write the recorded trajectory as CSV with 17 significant digits."""
    rows = _rows(result) if len(result.trajectory) else np.zeros((0, len(CSV_COLUMNS)))
    lines = [",".join(CSV_COLUMNS)]
    lines.extend(",".join(f"{v:.17g}" for v in row) for row in rows)
    try:
        d = os.path.dirname(path)
        if d:
            os.makedirs(d, exist_ok=True)
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as e:
        raise OSError(e.errno, f"cannot write CSV to {path}: {e.strerror}") from e


def read_csv(path: str) -> tuple:
    """Return ``(header, values)`` of a file written by :func:`emit_csv`."""
    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
        body = fh.read()
    values = np.array([[float(v) for v in line.split(",")] for line in body.splitlines() if line])
    return header, values.reshape(-1, len(header))


def default_output_path(name: str) -> str:
    return os.path.join(os.environ.get(OUTPUT_DIR_ENV, "."), f"{name}.csv")


def config_as_dict(config: ScenarioConfig) -> dict:
    """Flat view of a configuration, keyed like config files."""
    s, b, d = config.system, config.baths, config.drive
    return {
        "name": config.name, "omega1": s.omega1, "omega2": s.omega2, "omega_wall": s.Omega,
        "epsilon": s.epsilon, "cutoffs": s.cutoffs, "t_c": b.T_c, "t_w": b.T_w,
        "kappa": b.kappa, "gamma": b.gamma, "f": d.F, "omega_l": d.omega_L,
        "tuned_omega1": config.tuned_omega1, "auto_tune": config.auto_tune,
        "t_max_kappa_units": config.t_max_kappa_units, "kappa_ref": config.kappa_ref,
        "dt": config.dt, "record_every": config.record_every, "dressed_m": config.dressed_M,
        "csv_window": config.csv_window, "converge_check": config.converge_check,
    }
