"""Quadratic fluctuations about a classical path.

The two solutions of ``eta'' = U''(q_c) eta`` used throughout are
``eta_a = dq_c/dtheta`` and ``eta_b = eta_a Q`` with
``Q(theta) = Q(0) + int_0^theta dtheta' / qdot_c^2`` on the first half of the
path, ``Q(Theta - theta) = -Q(theta)``, and ``Q(0)`` fixed by continuity of
``d eta_b / d theta`` at the turning point.  Everything else (``Omega``,
``W``, the propagator, the Dirichlet Green function, the Van Vleck
determinant) is built from that pair.

For generic potentials ``Q`` is never integrated directly: integrating by
parts removes the ``1/qdot_c^2`` pole at ``Theta/2`` and leaves, with
``q = q_c(theta)`` on the first half-period,

    eta_b = -1/U'(q) + v(q, qt) J(q),      d eta_b/d theta = U'(q) J(q),
    J(q)  = int_{qt}^{q} U''(p) / (U'(p)^2 |v(p, qt)|) |dp|,

which is finite everywhere and makes ``eta_b`` even about ``Theta/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import elliptic as el
from .classical import (ClassicalPath, _regularized, path_eval, quartic_modulus,
                        quartic_theta, theta_of_turning_point, velocity)
from .potential import Kind


class FluctuationError(ValueError):
    """Nonpositive ``Omega`` or ``Delta``: ordering violation or invalid path."""


@dataclass(frozen=True)
class FluctuationBasis:
    """The pair ``(eta_a, eta_b)`` for one classical path."""

    path: ClassicalPath
    _ends: tuple = field(default=(), repr=False, compare=False)

    @property
    def theta_big(self) -> float:
        return self.path.theta_big

    # -- raw evaluators -------------------------------------------------------
    def eta_a(self, theta: float) -> float:
        return _eta_a(self.path, theta)

    def eta_b(self, theta: float) -> float:
        return _eta_b(self.path, theta)

    def eta_a_dot(self, theta: float) -> float:
        path = self.path
        if path.degenerate:
            w = path.potential.omega0
            return w * math.cosh(w * (theta - 0.5 * path.theta_big))
        q, _ = path_eval(path, theta)
        return path.potential.u1(q)

    def eta_b_dot(self, theta: float) -> float:
        return _eta_b_dot(self.path, theta)

    def bigQ(self, theta: float) -> float:
        """``Q(theta) = eta_b / eta_a``; ``nan`` at the turning point where it jumps."""
        if self.path.potential.kind is Kind.QUARTIC and not self.path.degenerate:
            return _quartic_Q(self.path, theta)
        a = self.eta_a(theta)
        if a == 0.0:
            return math.nan
        return self.eta_b(theta) / a

    # -- endpoint values used by Omega(0, .) and Omega(., Theta) --------------
    def ends(self) -> tuple[float, float, float, float]:
        """``(eta_a(0), eta_b(0), eta_a(Theta), eta_b(Theta))``."""
        if self._ends:
            return self._ends
        T = self.theta_big
        return (self.eta_a(0.0), self.eta_b(0.0), self.eta_a(T), self.eta_b(T))


def fluctuation_basis(path: ClassicalPath) -> FluctuationBasis:
    b = FluctuationBasis(path)
    return FluctuationBasis(path, b.ends())


def basis_eval(b: FluctuationBasis, theta: float) -> tuple[float, float, float]:
    """Return ``(eta_a, eta_b, Q)`` at ``theta``."""
    return b.eta_a(theta), b.eta_b(theta), b.bigQ(theta)


# -- per-kind implementations --------------------------------------------------------

def _eta_a(path: ClassicalPath, theta: float) -> float:
    if path.degenerate:
        w = path.potential.omega0
        return math.sinh(w * (theta - 0.5 * path.theta_big))
    return path_eval(path, theta)[1]


def _quartic_parts(path: ClassicalPath, theta: float):
    qt = path.qt
    m = quartic_modulus(qt)
    u = math.sqrt(1.0 + qt * qt) * (theta - 0.5 * path.theta_big)
    sn, cn, dn, am = el.jacobi_am(u, m)
    E = el.incomplete_E(am, m)
    return qt, m, u, sn, cn, dn, E


def _quartic_Q(path: ClassicalPath, theta: float) -> float:
    qt, m, u, sn, cn, dn, E = _quartic_parts(path, theta)
    if sn == 0.0:
        return math.nan
    k2 = m.k * m.k
    kp2 = m.k_prime * m.k_prime
    br = (-kp2 / k2 * u + (1.0 - 2.0 * k2) / k2 * E
          - cn * dn / sn - kp2 * cn * sn / dn)
    return br / (qt * qt * (1.0 + qt * qt) ** 1.5)


def _eta_b(path: ClassicalPath, theta: float) -> float:
    T = path.theta_big
    if path.degenerate:
        w = path.potential.omega0
        return -math.cosh(w * (theta - 0.5 * T)) / w
    kind = path.potential.kind
    qt = path.qt
    if kind is Kind.HARMONIC:
        return -math.cosh(theta - 0.5 * T) / qt
    if kind is Kind.QUARTIC:
        # eta_a * Q with the 1/sn of Q cancelled against the sn of eta_a
        qt, m, u, sn, cn, dn, E = _quartic_parts(path, theta)
        k2 = m.k * m.k
        kp2 = m.k_prime * m.k_prime
        br = (sn * dn * (-kp2 / k2 * u + (1.0 - 2.0 * k2) / k2 * E)
              - cn * dn * dn - kp2 * cn * sn * sn)
        return br / (qt * (1.0 + qt * qt) * cn * cn)
    q, _ = path_eval(path, theta)
    p = path.potential
    return -1.0 / p.u1(q) + velocity(p, q, qt) * _J(path, q)


def _J(path: ClassicalPath, q: float) -> float:
    p = path.potential
    qt = path.qt
    if q == qt:
        return 0.0
    span = abs(q - qt)
    u1t = p.u1(qt)
    lim0 = p.u2(qt) / (u1t * u1t) * math.sqrt(1.0 / (2.0 * abs(u1t) * span))

    def f(x, w, s):
        if w == 0.0 or s == 0.0:
            return lim0
        d = p.u1(x)
        return p.u2(x) / (d * d) * s / w

    return _regularized(p, q, qt, f)


def _eta_b_dot(path: ClassicalPath, theta: float) -> float:
    T = path.theta_big
    s = theta - 0.5 * T
    if path.degenerate:
        w = path.potential.omega0
        return -math.sinh(w * s)
    if path.potential.kind is Kind.HARMONIC:
        return -math.sinh(s) / path.qt
    q, _ = path_eval(path, theta)
    val = path.potential.u1(q) * _J(path, q)
    return val if s <= 0.0 else -val


# -- Omega / W algebra ----------------------------------------------------------------

def omega(b: FluctuationBasis, theta1: float, theta2: float) -> float:
    """``Omega(theta1, theta2) = eta_a(1) eta_b(2) - eta_a(2) eta_b(1)``."""
    T = b.theta_big
    a0, b0, aT, bT = b.ends()
    a1, b1 = (a0, b0) if theta1 == 0.0 else (aT, bT) if theta1 == T else (b.eta_a(theta1), b.eta_b(theta1))
    a2, b2 = (a0, b0) if theta2 == 0.0 else (aT, bT) if theta2 == T else (b.eta_a(theta2), b.eta_b(theta2))
    return a1 * b2 - a2 * b1


def omega_w(b: FluctuationBasis, theta1: float, theta2: float) -> tuple[float, float, float]:
    """Return ``(Omega_12, W_12, W_21)`` with ``W_ij = d Omega_ij / d theta_j``."""
    a1, b1 = b.eta_a(theta1), b.eta_b(theta1)
    a2, b2 = b.eta_a(theta2), b.eta_b(theta2)
    ad1, bd1 = b.eta_a_dot(theta1), b.eta_b_dot(theta1)
    ad2, bd2 = b.eta_a_dot(theta2), b.eta_b_dot(theta2)
    return a1 * b2 - a2 * b1, a1 * bd2 - ad2 * b1, a2 * bd1 - ad1 * b2


def w_from_Q(b: FluctuationBasis, theta_i: float, theta_j: float) -> float:
    """``W_ij`` written through ``Q``; singular when ``theta_j`` is the turning time."""
    p = b.path.potential
    qdi = b.eta_a(theta_i)
    qj, qdj = path_eval(b.path, theta_j) if not b.path.degenerate else (0.0, b.eta_a(theta_j))
    return qdi * p.u1(qj) * (b.bigQ(theta_j) - b.bigQ(theta_i)) + qdi / qdj


def propagator_gc(b: FluctuationBasis, theta1: float, eta1: float, theta2: float, eta2: float,
                  g: float) -> float:
    """Quadratic propagator ``G_c(theta1, eta1; theta2, eta2)``."""
    if not theta1 < theta2:
        raise FluctuationError(f"need theta1 < theta2, got {theta1!r}, {theta2!r}")
    if eta1 == 0.0 and eta2 == 0.0:
        o12 = omega(b, theta1, theta2)
        w12 = w21 = 0.0
    else:
        o12, w12, w21 = omega_w(b, theta1, theta2)
    if not o12 > 0.0:
        raise FluctuationError(f"Omega_12 = {o12!r} <= 0 (conjugate point or bad ordering)")
    expo = -(w12 * eta2 * eta2 + w21 * eta1 * eta1 - 2.0 * eta1 * eta2) / (2.0 * g * o12)
    return math.exp(expo) / math.sqrt(2.0 * math.pi * g * o12)


# -- Green function ---------------------------------------------------------------------

@dataclass(frozen=True)
class GreenFunction:
    """Dirichlet Green function of ``-d^2/dtheta^2 + U''(q_c)`` on ``[0, Theta]``."""

    basis: FluctuationBasis
    theta_big: float
    offset: float = 0.0   # additive fault injection for the validation harness

    @property
    def omega_0T(self) -> float:
        return omega(self.basis, 0.0, self.theta_big)


def green_function(b: FluctuationBasis, offset: float = 0.0) -> GreenFunction:
    gf = GreenFunction(b, b.theta_big, offset)
    if not gf.omega_0T > 0.0:
        raise FluctuationError("Omega(0, Theta) <= 0: degenerate fluctuation operator")
    return gf


def green(gf: GreenFunction, theta: float, theta_p: float) -> float:
    """``G(theta, theta') = Omega(0, min) Omega(max, Theta) / Omega(0, Theta)``."""
    lo, hi = (theta, theta_p) if theta <= theta_p else (theta_p, theta)
    T = gf.theta_big
    val = omega(gf.basis, 0.0, lo) * omega(gf.basis, hi, T) / gf.omega_0T
    return val + gf.offset


def green_diag(gf: GreenFunction, theta: float) -> float:
    return green(gf, theta, theta)


def green_dtheta(gf: GreenFunction, theta: float, theta_p: float, side: int) -> float:
    """One-sided ``dG/dtheta`` at ``theta``; ``side=+1`` for ``theta > theta'``."""
    b = gf.basis
    T = gf.theta_big
    a0, b0, aT, bT = b.ends()
    ad, bd = b.eta_a_dot(theta), b.eta_b_dot(theta)
    if side > 0:
        return omega(b, 0.0, theta_p) * (ad * bT - aT * bd) / gf.omega_0T
    return (a0 * bd - ad * b0) * omega(b, theta_p, T) / gf.omega_0T


# -- Van Vleck determinant --------------------------------------------------------------

def van_vleck(b: FluctuationBasis, g: float) -> float:
    """``Delta = 2 pi g Omega(0, Theta)``."""
    delta = 2.0 * math.pi * g * omega(b, 0.0, b.theta_big)
    if not delta > 0.0:
        raise FluctuationError(f"Van Vleck determinant {delta!r} <= 0")
    return delta


def _theta_at(path: ClassicalPath, qt: float) -> float:
    p = path.potential
    if p.kind is Kind.QUARTIC:
        return quartic_theta(abs(path.q0), abs(qt))
    if p.kind is Kind.HARMONIC:
        return 2.0 * math.acosh(path.q0 / qt)
    return theta_of_turning_point(p, path.q0, qt)


def van_vleck_from_theta(path: ClassicalPath, g: float, rel_step: float = 1e-3) -> float:
    """``Delta = 4 pi g [U(qt) - U(q0)] / U'(qt) (dTheta/dqt)_{q0}`` by finite differences.

    Five-point central differences at two steps, combined by Richardson
    extrapolation; the step is kept inside ``(0, |q0|)``.
    """
    p = path.potential
    qt, q0 = path.qt, path.q0
    if qt == 0.0:
        raise FluctuationError("turning point at the minimum: use the harmonic limit")
    h = min(rel_step * abs(qt), 0.2 * abs(q0 - qt), 0.2 * abs(qt))

    def d5(h):
        f = [_theta_at(path, qt + j * h) for j in (-2, -1, 1, 2)]
        return (f[0] - 8.0 * f[1] + 8.0 * f[2] - f[3]) / (12.0 * h)

    dtheta = (16.0 * d5(0.5 * h) - d5(h)) / 15.0
    return 4.0 * math.pi * g * (-p.diff(q0, qt)) / p.u1(qt) * dtheta
