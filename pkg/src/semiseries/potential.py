"""Dimensionless single-well potentials ``U(q)`` with their first four derivatives."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

Fn = Callable[[float], float]


class Kind(str, Enum):
    HARMONIC = "harmonic"
    QUARTIC = "quartic"
    CUSTOM = "custom"


class UnsupportedPotential(ValueError):
    """The potential is not of the single-well type."""


@dataclass(frozen=True)
class Potential:
    """A single-well potential with its minimum at the origin.

    ``U`` must grow without bound as ``|q| -> inf`` and satisfy ``U(0) = U'(0) = 0``
    with ``U'(q) q > 0`` elsewhere; :meth:`check_single_well` tests this on a grid.
    ``g`` is the dimensionless coupling that weights the action, ``exp(-I/g)``.

    ``diff(q, p)`` returns ``U(q) - U(p)``.  Close to the turning point the
    naive difference cancels badly, so potentials may supply an exact factored
    form; otherwise a fourth-order Taylor expansion is used for small ``q - p``.
    """

    g: float
    u: Fn
    u1: Fn
    u2: Fn
    u3: Fn
    u4: Fn
    kind: Kind = Kind.CUSTOM
    symmetric: bool = False
    name: str = "custom"
    _diff: Fn | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError(f"coupling g must be positive, got {self.g!r}")

    def diff(self, q: float, p: float) -> float:
        if self._diff is not None:
            return self._diff(q, p)
        d = q - p
        scale = max(abs(p), 1.0)
        if abs(d) < 1e-3 * scale:
            return d * (self.u1(p) + d * (self.u2(p) / 2 + d * (self.u3(p) / 6 + d * self.u4(p) / 24)))
        return self.u(q) - self.u(p)

    def with_coupling(self, g: float) -> Potential:
        return Potential(g, self.u, self.u1, self.u2, self.u3, self.u4,
                         self.kind, self.symmetric, self.name, self._diff)

    def as_custom(self) -> Potential:
        """Same function, stripped of its closed-form fast paths."""
        return Potential(self.g, self.u, self.u1, self.u2, self.u3, self.u4,
                         Kind.CUSTOM, self.symmetric, self.name + "(generic)", self._diff)

    @property
    def omega0(self) -> float:
        """Small-oscillation frequency ``sqrt(U''(0))``."""
        return math.sqrt(self.u2(0.0))

    def check_single_well(self, q_max: float = 10.0, n: int = 2001, atol: float = 1e-12) -> None:
        """Raise :class:`UnsupportedPotential` unless the grid shows a single well at 0."""
        if abs(self.u(0.0)) > atol or abs(self.u1(0.0)) > atol:
            raise UnsupportedPotential("minimum must sit at the origin with U(0) = U'(0) = 0")
        qs = np.linspace(-q_max, q_max, n)
        qs = qs[qs != 0.0]
        bad = [q for q in qs if not self.u1(q) * q > 0]
        if bad:
            raise UnsupportedPotential(f"U'(q) q <= 0 at q = {bad[0]:.6g}: not a single well")


def harmonic(g: float = 1.0) -> Potential:
    """``U = q^2/2``."""
    return Potential(
        g,
        u=lambda q: 0.5 * q * q,
        u1=lambda q: q,
        u2=lambda q: 1.0,
        u3=lambda q: 0.0,
        u4=lambda q: 0.0,
        kind=Kind.HARMONIC,
        symmetric=True,
        name="harmonic",
        _diff=lambda q, p: 0.5 * (q - p) * (q + p),
    )


def quartic(g: float) -> Potential:
    """``U = q^2/2 + q^4/4``."""
    return Potential(
        g,
        u=lambda q: 0.5 * q * q + 0.25 * q ** 4,
        u1=lambda q: q + q ** 3,
        u2=lambda q: 1.0 + 3.0 * q * q,
        u3=lambda q: 6.0 * q,
        u4=lambda q: 6.0,
        kind=Kind.QUARTIC,
        symmetric=True,
        name="quartic",
        _diff=lambda q, p: (q - p) * (q + p) * (0.5 + 0.25 * (q * q + p * p)),
    )


def custom(u: Fn, u1: Fn, u2: Fn, u3: Fn, u4: Fn, g: float, *,
           symmetric: bool = False, name: str = "custom", check: bool = True) -> Potential:
    p = Potential(g, u, u1, u2, u3, u4, Kind.CUSTOM, symmetric, name)
    if check:
        p.check_single_well()
    return p


def make(kind: str | Kind, g: float) -> Potential:
    kind = Kind(kind)
    if kind is Kind.HARMONIC:
        return harmonic(g)
    if kind is Kind.QUARTIC:
        return quartic(g)
    raise ValueError("custom potentials need explicit callables; use custom()")
