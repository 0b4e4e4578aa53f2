"""Scattering quantum walks for finding paths through chains of star graphs."""

from .maze import MazeSpec, build_maze, load_maze, neighbors, reveal_path, save_maze
from .walk import WalkState, apply_step, evolve, measure, prepare

__version__ = "0.1.0"

__all__ = [
    "MazeSpec",
    "WalkState",
    "apply_step",
    "build_maze",
    "evolve",
    "load_maze",
    "measure",
    "neighbors",
    "prepare",
    "reveal_path",
    "save_maze",
]
