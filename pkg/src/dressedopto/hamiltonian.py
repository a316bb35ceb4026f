"""Free and interaction Hamiltonians of two cavity modes and a movable wall.

All energies are in units of the second cavity frequency (hbar = 1).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidArgument
from .fockspace import ModeSpec, annihilation, embed, ladder_operators

DEFAULT_CUTOFFS = (6, 4, 4)

TERM_LABELS = (
    "radiation_pressure",
    "single_mode_conversion",
    "two_mode_conversion",
    "raman",
    "counter_rotating",
)


@dataclass(frozen=True)
class SystemParams:
    omega1: float = 0.502
    omega2: float = 1.0
    Omega: float = 1.0
    epsilon: float = 0.05
    cutoffs: tuple = DEFAULT_CUTOFFS

    def __post_init__(self):
        for name in ("omega1", "omega2", "Omega"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise InvalidArgument(f"{name} must be a positive finite number, got {v}")
        if not np.isfinite(self.epsilon) or self.epsilon < 0:
            raise InvalidArgument(f"epsilon must be >= 0, got {self.epsilon}")
        object.__setattr__(self, "cutoffs", tuple(int(c) for c in self.cutoffs))
        if len(self.cutoffs) != 3:
            raise InvalidArgument("cutoffs must hold three integers (mode1, mode2, wall)")

    @property
    def specs(self):
        c1, c2, cw = self.cutoffs
        return (
            ModeSpec("mode1", self.omega1, c1),
            ModeSpec("mode2", self.omega2, c2),
            ModeSpec("wall", self.Omega, cw),
        )

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class Couplings:
    g11: float
    g22: float
    g12: float


@dataclass
class TermBreakdown:
    """Interaction Hamiltonian split by physical process.

    ``offset`` collects what is left after normal ordering ``(a + a^dag)^2``,
    i.e. ``g_jj [a_j, a_j^dag] (b + b^dag)``.
    """

    terms: dict = field(default_factory=dict)
    offset: np.ndarray | None = None

    def total(self) -> np.ndarray:
        out = sum(self.terms.values())
        return out + self.offset if self.offset is not None else out


def coupling_constants(epsilon: float, omega1: float, omega2: float) -> Couplings:
    if omega1 <= 0 or omega2 <= 0:
        raise InvalidArgument("mode frequencies must be positive")
    return Couplings(
        g11=epsilon * omega1 / 2,
        g22=epsilon * omega2 / 2,
        g12=epsilon * np.sqrt(omega1 * omega2) / 2,
    )


def build_free(params: SystemParams) -> np.ndarray:
    a1, a2, b = ladder_operators(params.specs)
    return (
        params.omega1 * a1.conj().T @ a1
        + params.omega2 * a2.conj().T @ a2
        + params.Omega * b.conj().T @ b
    )


def build_interaction(params: SystemParams) -> np.ndarray:
    g = coupling_constants(params.epsilon, params.omega1, params.omega2)
    a1, a2, b = ladder_operators(params.specs)
    x1 = a1 + a1.conj().T
    x2 = a2 + a2.conj().T
    xb = b + b.conj().T
    return g.g12 * x1 @ x2 @ xb + g.g11 * x1 @ x1 @ xb + g.g22 * x2 @ x2 @ xb


def system_hamiltonian(params: SystemParams) -> np.ndarray:
    return build_free(params) + build_interaction(params)


def term_breakdown(params: SystemParams) -> TermBreakdown:
    g = coupling_constants(params.epsilon, params.omega1, params.omega2)
    specs = params.specs
    a1, a2, b = ladder_operators(specs)
    d = lambda m: m.conj().T  # noqa: E731
    xb = b + d(b)

    terms = {label: np.zeros_like(a1) for label in TERM_LABELS}
    offset = np.zeros_like(a1)
    for gjj, a, spec in ((g.g11, a1, specs[0]), (g.g22, a2, specs[1])):
        terms["radiation_pressure"] += 2 * gjj * d(a) @ a @ xb
        terms["single_mode_conversion"] += gjj * (a @ a @ d(b) + d(a) @ d(a) @ b)
        terms["counter_rotating"] += gjj * (a @ a @ b + d(a) @ d(a) @ d(b))
        # truncated [a, a^dag] is the identity except on the top Fock level
        lo = annihilation(spec.cutoff)
        comm = embed(lo @ d(lo) - d(lo) @ lo, spec.label, specs)
        offset += gjj * comm @ xb

    terms["two_mode_conversion"] = g.g12 * (d(a1) @ d(a2) @ b + a1 @ a2 @ d(b))
    terms["counter_rotating"] += g.g12 * (a1 @ a2 @ b + d(a1) @ d(a2) @ d(b))
    terms["raman"] = g.g12 * (a1 @ d(a2) + d(a1) @ a2) @ xb
    return TermBreakdown(terms=terms, offset=offset)
