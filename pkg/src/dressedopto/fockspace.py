"""Truncated bosonic ladder operators and their three-mode embedding.

Slots are always ordered (mode1, mode2, wall), so a Fock label
``(n1, n2, m)`` maps to the flat index ``(n1 * d2 + n2) * dw + m``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import InvalidArgument

SLOTS = ("mode1", "mode2", "wall")


@dataclass(frozen=True)
class ModeSpec:
    label: str
    frequency: float
    cutoff: int

    def __post_init__(self):
        if self.label not in SLOTS:
            raise InvalidArgument(f"unknown mode label {self.label!r}")
        if int(self.cutoff) != self.cutoff or self.cutoff < 1:
            raise InvalidArgument(f"cutoff must be an integer >= 1, got {self.cutoff}")
        if not np.isfinite(self.frequency) or self.frequency < 0:
            raise InvalidArgument(f"frequency must be finite and >= 0, got {self.frequency}")

    @property
    def dim(self) -> int:
        return self.cutoff + 1


def annihilation(cutoff: int) -> np.ndarray:
    """Return the ``(cutoff+1) x (cutoff+1)`` lowering operator."""
    if int(cutoff) != cutoff or cutoff < 1:
        raise InvalidArgument(f"cutoff must be an integer >= 1, got {cutoff}")
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), k=1).astype(complex)


def _slot_index(slot: str) -> int:
    try:
        return SLOTS.index(slot)
    except ValueError:
        raise InvalidArgument(f"unknown slot {slot!r}; expected one of {SLOTS}") from None


def embed(op: np.ndarray, slot: str, specs) -> np.ndarray:
    """Lift a single-mode operator into the full tensor-product space."""
    specs = _ordered(specs)
    k = _slot_index(slot)
    op = np.asarray(op)
    if op.shape != (specs[k].dim, specs[k].dim):
        raise InvalidArgument(
            f"operator shape {op.shape} does not match slot {slot!r} "
            f"of local dimension {specs[k].dim}"
        )
    factors = [np.eye(s.dim, dtype=complex) for s in specs]
    factors[k] = op.astype(complex)
    return reduce(np.kron, factors)


def _ordered(specs):
    specs = list(specs)
    if len(specs) != 3:
        raise InvalidArgument("exactly three mode specs are required")
    by_label = {s.label: s for s in specs}
    if set(by_label) != set(SLOTS):
        raise InvalidArgument(f"mode specs must cover {SLOTS} once each")
    return [by_label[s] for s in SLOTS]


def full_dim(specs) -> int:
    return int(np.prod([s.dim for s in _ordered(specs)]))


def fock_index(n1: int, n2: int, m: int, specs) -> int:
    """Flat basis index of the bare Fock state ``|n1, n2, m>``."""
    s1, s2, sw = _ordered(specs)
    for n, s in ((n1, s1), (n2, s2), (m, sw)):
        if not 0 <= n <= s.cutoff:
            raise InvalidArgument(f"occupation {n} outside [0, {s.cutoff}] for {s.label}")
    return (n1 * s2.dim + n2) * sw.dim + m


def ladder_operators(specs):
    """Embedded lowering operators ``(a1, a2, b)`` for the three slots."""
    specs = _ordered(specs)
    return tuple(embed(annihilation(s.cutoff), s.label, specs) for s in specs)
