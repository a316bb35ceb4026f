"""Dressed-picture master-equation simulator for a driven two-mode cavity with a movable wall."""
from .errors import IntegrationUnstable, InvalidArgument, NotFound, NumericalError
from .hamiltonian import SystemParams, system_hamiltonian
from .dressed import dress, tune_resonance
from .lindblad import BathParams, DriveParams, Generator, integrate
from .scenarios import ScenarioConfig, preset, run

__version__ = "0.1.0"

__all__ = [
    "BathParams", "DriveParams", "Generator", "IntegrationUnstable", "InvalidArgument",
    "NotFound", "NumericalError", "ScenarioConfig", "SystemParams", "dress", "integrate",
    "preset", "run", "system_hamiltonian", "tune_resonance",
]
