"""Semiclassical partition functions of one-dimensional single-well potentials."""

from .potential import Kind, Potential, UnsupportedPotential, custom, harmonic, make, quartic

__version__ = "0.1.0"

__all__ = ["Kind", "Potential", "UnsupportedPotential", "custom", "harmonic", "make", "quartic"]
