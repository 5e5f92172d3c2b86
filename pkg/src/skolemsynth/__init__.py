"""Skolem function synthesis from Boolean relations."""

from .circuit import Circuit, Spec
from .phase1 import SkolemVector, phase1_synthesize
from .phase2 import cegar_loop
from .synth import run_report, synthesize

__all__ = ["Circuit", "Spec", "SkolemVector", "phase1_synthesize", "cegar_loop", "synthesize", "run_report"]
__version__ = "0.1.0"
