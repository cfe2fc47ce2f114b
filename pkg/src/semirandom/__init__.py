"""Simulator for the semi-random graph process and Builder strategies."""

from .graph_core import Graph, TargetSpec, balanced_orientation, generate
from .process_engine import Transcript, derive_seed, draw_sequence, replay, run

__all__ = ["Graph", "TargetSpec", "Transcript", "balanced_orientation", "derive_seed", "draw_sequence",
           "generate", "replay", "run"]
