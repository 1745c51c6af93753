"""Quench simulations of a fragmented Ising spin ladder with a diagonal
rung-bias protection term (quantum Zeno suppression of entanglement growth)."""

from . import analysis, basis, cli, dynamics, entanglement, hamiltonian
from .analysis import EETimeSeries, PlateauStats, SpectrumReport
from .dynamics import QuenchSpec, run_quench

__all__ = [
    "analysis", "basis", "cli", "dynamics", "entanglement", "hamiltonian",
    "EETimeSeries", "PlateauStats", "SpectrumReport", "QuenchSpec", "run_quench",
]

__version__ = "0.1.0"
