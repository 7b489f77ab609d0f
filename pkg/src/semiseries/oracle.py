"""Spectral ground truth from finite-difference diagonalization.

``h = -(g/2) d^2/dq^2 + U(q)/g`` is discretized with three-point central
differences on a uniform grid with hard walls at ``q = +-L``; the resulting
symmetric tridiagonal matrix is diagonalized for its lowest levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .potential import Potential

DEFAULT_POINTS = 8001
WALL_MARGIN = 25.0          # U(L)/g >= eps_max + WALL_MARGIN, at least
WALL_DECAY = 20.0           # WKB decay exponent of the top level between turning point and wall
TRUNCATION = 1e-12


class TruncationError(ArithmeticError):
    """Not enough levels for the requested Theta."""


class RefinementError(ArithmeticError):
    """The grid is too coarse for the requested accuracy."""


@dataclass(frozen=True)
class Grid:
    q_min: float
    q_max: float
    n_points: int

    def __post_init__(self):
        if not self.q_max > self.q_min:
            raise ValueError("empty grid")
        if self.n_points < 3:
            raise ValueError("need at least 3 grid points")

    @property
    def spacing(self) -> float:
        return (self.q_max - self.q_min) / (self.n_points - 1)

    def refined(self) -> Grid:
        return Grid(self.q_min, self.q_max, 2 * self.n_points - 1)


@dataclass(frozen=True)
class SpectralSolution:
    energies: np.ndarray
    grid: Grid
    g: float

    @property
    def ground(self) -> float:
        return float(self.energies[0])


def _reach(p: Potential, level: float, sign: float) -> float:
    hi = 1.0
    while p.u(sign * hi) < level:
        hi *= 2.0
    return brentq(lambda x: p.u(sign * x) - level, 0.0, hi, xtol=1e-12)


def wall_position(p: Potential, eps_target: float, margin: float = WALL_MARGIN,
                  decay: float = WALL_DECAY) -> float:
    """Half-width ``L`` of the box for levels up to ``eps_target``.

    ``L`` satisfies ``U(+-L)/g >= eps_target + margin`` and, beyond the
    classical turning point ``q_e`` of ``eps_target``, the WKB exponent
    ``int_{q_e}^{L} sqrt(2 (U/g - eps)/g) dq`` reaches ``decay``.  The second
    condition is what matters at large ``g``, where the kinetic term is large
    and the tails are long.
    """
    g = p.g
    kappa = lambda x, s: math.sqrt(max(2.0 * (p.u(s * x) / g - eps_target) / g, 0.0))
    out = 0.0
    for s in (1.0, -1.0):
        qe = _reach(p, g * eps_target, s)
        # march outwards in steps of the local decay length
        x, acc = qe, 0.0
        while acc < decay:
            dx = 0.05 * max(qe, 1.0)
            acc += 0.5 * dx * (kappa(x, s) + kappa(x + dx, s))
            x += dx
        out = max(out, x, _reach(p, g * (eps_target + margin), s))
    return out


def _diagonalize(p: Potential, grid: Grid, n_levels: int) -> np.ndarray:
    q = np.linspace(grid.q_min, grid.q_max, grid.n_points)[1:-1]   # walls are Dirichlet nodes
    h = grid.spacing
    g = p.g
    diag = g / (h * h) + np.array([p.u(x) for x in q]) / g
    off = np.full(q.size - 1, -0.5 * g / (h * h))
    if n_levels > q.size:
        raise ValueError(f"{n_levels} levels requested from {q.size} interior points")
    return eigh_tridiagonal(diag, off, select="i", select_range=(0, n_levels - 1),
                            eigvals_only=True)


def spectrum(p: Potential, n_levels: int, grid: Grid | None = None,
             extrapolate: bool = False) -> SpectralSolution:
    """Lowest ``n_levels`` eigenvalues.

    Without an explicit grid the box is sized by :func:`wall_position` for the
    highest computed level; the walls are moved out and the solve repeated
    until that holds.  ``extrapolate`` combines the grid and its halving by
    Richardson extrapolation, removing the ``O(h^2)`` discretization error.
    """
    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    if grid is None:
        eps_top = n_levels - 0.5       # harmonic value; anharmonic levels lie higher
        for _ in range(20):
            L = wall_position(p, eps_top)
            grid = Grid(-L, L, DEFAULT_POINTS)
            e = _diagonalize(p, grid, n_levels)
            if e[-1] <= eps_top + 1e-9:
                break
            eps_top = float(e[-1]) * 1.05
        else:
            raise RefinementError("wall placement did not settle")
    else:
        e = _diagonalize(p, grid, n_levels)
    if extrapolate:
        e = (4.0 * _diagonalize(p, grid.refined(), n_levels) - e) / 3.0
    return SpectralSolution(e, grid, p.g)


def refinement_change(p: Potential, sol: SpectralSolution) -> float:
    """``|eps_0(2n) - eps_0(n)|`` on the same box."""
    finer = spectrum(p, 1, sol.grid.refined())
    return abs(finer.ground - sol.ground)


def ground_state_energy(p: Potential, extrapolate: bool = True) -> float:
    return spectrum(p, 1, extrapolate=extrapolate).ground


def _check(s: SpectralSolution, theta_big: float) -> None:
    gap = s.energies[-1] - s.energies[0]
    if math.exp(-theta_big * gap) >= TRUNCATION:
        raise TruncationError(
            f"{s.energies.size} levels leave exp(-Theta (e_N - e_0)) = {math.exp(-theta_big * gap):.2e}"
            f" at Theta={theta_big:g}; request more levels")


def _weights(s: SpectralSolution, theta_big: float) -> np.ndarray:
    return np.exp(-theta_big * (s.energies - s.energies[0]))


def exact_partition(s: SpectralSolution, theta_big: float, check: bool = True) -> float:
    """``Z = sum_n exp(-Theta eps_n)``."""
    if check:
        _check(s, theta_big)
    return float(math.exp(-theta_big * s.energies[0]) * _weights(s, theta_big).sum())


def exact_specific_heat(s: SpectralSolution, theta_big: float, check: bool = True) -> float:
    """``C = Theta^2 (<eps^2> - <eps>^2)`` with Boltzmann weights."""
    if check:
        _check(s, theta_big)
    w = _weights(s, theta_big)
    w /= w.sum()
    e = s.energies - s.energies[0]
    mean = float(w @ e)
    return theta_big ** 2 * float(w @ (e - mean) ** 2)


def spectrum_for(p: Potential, theta_min: float, start: int = 40) -> SpectralSolution:
    """A spectrum with enough levels for every ``Theta >= theta_min``."""
    n = start
    while True:
        s = spectrum(p, n)
        if math.exp(-theta_min * (s.energies[-1] - s.energies[0])) < TRUNCATION:
            return s
        n *= 2
        if n > DEFAULT_POINTS // 4:
            raise TruncationError(f"Theta={theta_min:g} needs more than {n // 2} levels")
