"""Euclidean classical paths of a single-well potential.

For boundary value ``q0`` and imaginary-time length ``Theta`` the path starts at
``q0``, rolls (in the inverted potential) to the turning point ``qt`` at
``Theta/2`` and comes back.  Harmonic and quartic potentials use closed forms;
anything else goes through quadratures of the first integral and an ODE solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from . import elliptic as el
from .potential import Kind, Potential, UnsupportedPotential

#: inner quadrature tolerances (turning-point integrals, actions)
QUAD_EPSABS = 1e-14
QUAD_EPSREL = 1e-12


class PathError(ValueError):
    pass


# -- generic single-well quadratures -------------------------------------------------

def _speed(p: Potential, q: float, qt: float) -> float:
    """``sqrt(2 [U(q) - U(qt)])``, the magnitude of the velocity at ``q``."""
    d = p.diff(q, qt)
    return math.sqrt(2.0 * d) if d > 0.0 else 0.0


def _speed_offset(p: Potential, qt: float, delta: float) -> float:
    """``_speed(p, qt + delta, qt)`` from the exact offset ``delta``.

    Recomputing ``q - qt`` from a rounded ``q`` loses digits when ``delta`` is
    tiny against ``qt``; the Taylor form avoids that (and is exact for quartics).
    """
    if abs(delta) < 1e-3 * max(abs(qt), 1.0):
        d = delta * (p.u1(qt) + delta * (p.u2(qt) / 2 + delta * (p.u3(qt) / 6 + delta * p.u4(qt) / 24)))
    else:
        d = p.diff(qt + delta, qt)
    return math.sqrt(2.0 * d) if d > 0.0 else 0.0


def velocity(p: Potential, q: float, qt: float) -> float:
    """``v(q, qt) = sign(qt - q) sqrt(2 [U(q) - U(qt)])``."""
    return math.copysign(_speed(p, q, qt), qt - q)


def _regularized(p: Potential, q0: float, qt: float, f: Callable[[float, float, float], float],
                 epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL) -> float:
    """Integrate between ``qt`` and ``q0`` after substituting ``q = qt + (q0 - qt) s^2``.

    ``f(q, w, s)`` gets the point, the speed there and ``s``; the Jacobian
    ``2 |q0 - qt| s`` is split so that ``f`` can cancel the ``1/w`` endpoint
    singularity itself (it returns ``s / w`` for ``dq / w``, say) and only the
    constant factor ``2 |q0 - qt|`` is applied here.
    """
    span = q0 - qt
    if span == 0.0:
        return 0.0

    def integrand(s):
        delta = span * s * s
        return f(qt + delta, _speed_offset(p, qt, delta), s) * 2.0 * abs(span)

    val, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=epsabs, epsrel=epsrel, limit=200)
    return val


def theta_of_turning_point(p: Potential, q0: float, qt: float) -> float:
    """Imaginary time needed to go ``q0 -> qt -> q0``: ``2 int dq / |v|``."""
    if q0 == qt:
        return 0.0
    span = abs(q0 - qt)
    lim0 = math.sqrt(span / (2.0 * abs(p.u1(qt)))) if p.u1(qt) != 0.0 else math.inf

    def f(q, w, s):
        if w == 0.0 or s == 0.0:
            return lim0 / span
        return s / w

    return 2.0 * _regularized(p, q0, qt, f)


def action_quadrature(p: Potential, q0: float, qt: float, theta_big: float) -> float:
    """``I = Theta U(qt) + 2 int |v| dq`` by adaptive quadrature."""
    return theta_big * p.u(qt) + 2.0 * _regularized(p, q0, qt, lambda q, w, s: w * s)


def turning_point_generic(p: Potential, q0: float, theta_big: float) -> float:
    if q0 == 0.0:
        return 0.0
    # solve in x = log(qt/q0); Theta(x) decreases from +inf (x -> -inf) to 0 (x = 0)
    def h(x):
        return theta_of_turning_point(p, q0, q0 * math.exp(x)) - theta_big

    w0 = p.omega0
    x_hi = 0.0
    x_lo = -math.log(math.cosh(0.5 * w0 * theta_big)) - 1.0
    for _ in range(60):
        if h(x_lo) > 0.0:
            break
        x_lo = 2.0 * x_lo - 1.0
    else:
        raise UnsupportedPotential("turning point not bracketed; is U a single well growing at infinity?")
    x = optimize.brentq(h, x_lo, x_hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    return q0 * math.exp(x)


# -- harmonic closed forms ---------------------------------------------------------

def harmonic_turning_point(q0: float, theta_big: float) -> float:
    return q0 / math.cosh(0.5 * theta_big)


def harmonic_action(q0: float, theta_big: float) -> float:
    return q0 * q0 * math.tanh(0.5 * theta_big)


# -- quartic closed forms ----------------------------------------------------------

@dataclass(frozen=True)
class QuarticKinematics:
    """Elliptic parameters of the quartic path at time ``theta``."""

    u_theta: float
    k: float
    k_prime: float
    phi_theta: float

    @property
    def modulus(self) -> el.EllipticModulus:
        return el.EllipticModulus(self.k, self.k_prime)


def quartic_modulus(qt: float) -> el.EllipticModulus:
    """``k^2 = (2 + qt^2) / (2 (1 + qt^2))``, built from ``k'`` for accuracy at small ``qt``."""
    kp = abs(qt) / math.sqrt(2.0 * (1.0 + qt * qt))
    return el.EllipticModulus.from_complement(kp)


def quartic_kinematics(qt: float, theta_big: float, theta: float) -> QuarticKinematics:
    m = quartic_modulus(qt)
    u = math.sqrt(1.0 + qt * qt) * (theta - 0.5 * theta_big)
    _, _, _, am = el.jacobi_am(u, m)
    return QuarticKinematics(u, m.k, m.k_prime, am)


def quartic_q0(qt: float, theta_big: float) -> float:
    """Boundary value reached at ``Theta`` from turning point ``qt``: ``qt nc(u_Theta)``.

    Raises :class:`EllipticError` once ``u_Theta >= K``: the path has escaped
    to infinity before ``Theta``, i.e. ``|qt| >= q_Theta^+``.
    """
    m = quartic_modulus(qt)
    u = 0.5 * math.sqrt(1.0 + qt * qt) * theta_big
    if m.k_prime > 0.0 and u >= el.complete_K(m):
        raise el.EllipticError(f"turning point {qt!r} lies beyond the escape point at Theta={theta_big!r}")
    return qt * el.nc(u, m)


def quartic_theta(q0: float, qt: float) -> float:
    """Inverse of :func:`quartic_q0` at fixed ``q0``: ``Theta = 2 F(arccos(qt/q0), k) / sqrt(1 + qt^2)``."""
    if q0 == qt:
        return 0.0
    m = quartic_modulus(qt)
    phi = math.acos(min(1.0, qt / q0))
    return 2.0 * el.incomplete_F(phi, m) / math.sqrt(1.0 + qt * qt)


@lru_cache(maxsize=512)
def quartic_escape_turning_point(theta_big: float) -> float:
    """Turning point ``q_Theta^+`` whose path reaches ``q0 = inf`` at ``Theta``.

    Root of ``2 sqrt(2k^2 - 1) K(k) = Theta``, solved for ``log qt`` (the left
    side, written through ``qt``, is ``2 K(k(qt)) / sqrt(1 + qt^2)``).
    """
    if theta_big <= 0.0:
        return math.inf

    def h(x):
        qt = math.exp(x)
        return 2.0 * el.complete_K(quartic_modulus(qt)) / math.sqrt(1.0 + qt * qt) - theta_big

    lo, hi = -1.0, 1.0
    while h(lo) < 0.0:
        lo *= 2.0
    while h(hi) > 0.0:
        hi *= 2.0
    x = optimize.brentq(h, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=300)
    return math.exp(x)


def quartic_turning_point(q0: float, theta_big: float) -> float:
    if q0 == 0.0:
        return 0.0
    a = abs(q0)
    hi = min(a, quartic_escape_turning_point(theta_big))

    def h(qt):
        m = quartic_modulus(qt)
        _, cn, _ = el.jacobi(0.5 * math.sqrt(1.0 + qt * qt) * theta_big, m)
        return a * cn - qt

    qt = optimize.brentq(h, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=300)
    return math.copysign(qt, q0)


def quartic_action_closed(qt: float, theta_big: float) -> float:
    """Closed-form action of the quartic path with turning point ``qt``."""
    if qt == 0.0:
        return 0.0
    q2 = qt * qt
    m = quartic_modulus(qt)
    s = math.sqrt(1.0 + q2)
    u = 0.5 * s * theta_big
    if u >= el.complete_K(m):
        raise el.EllipticError("u_Theta >= K(k): q0 is infinite for this turning point")
    sn, cn, _, am = el.jacobi_am(u, m)
    nc2 = 1.0 / (cn * cn)
    E = el.incomplete_E(am, m)
    return (theta_big * (0.5 * q2 + 0.25 * q2 * q2)
            + 4.0 / 3.0 * (-s * (E + 0.5 * q2 * u)
                           + sn * (1.0 + 0.5 * q2 * nc2) * math.sqrt(1.0 + 0.5 * q2 * (1.0 + nc2))))


def quartic_action_low_T(q0: float) -> float:
    """Large-``Theta`` limit of the quartic action, ``(4/3)[(1 + q0^2/2)^{3/2} - 1]``."""
    return 4.0 / 3.0 * ((1.0 + 0.5 * q0 * q0) ** 1.5 - 1.0)


# -- dispatch ------------------------------------------------------------------------

def turning_point(p: Potential, q0: float, theta_big: float) -> float:
    """Turning point ``qt(q0, Theta)``; ``|qt| <= |q0|`` with the sign of ``q0``."""
    if not theta_big > 0.0:
        raise PathError(f"Theta must be positive, got {theta_big!r}")
    if not math.isfinite(q0):
        raise PathError(f"q0 must be finite, got {q0!r}")
    if q0 == 0.0:
        return 0.0
    if p.kind is Kind.HARMONIC:
        return harmonic_turning_point(q0, theta_big)
    if p.kind is Kind.QUARTIC:
        return quartic_turning_point(q0, theta_big)
    return turning_point_generic(p, q0, theta_big)


@dataclass(frozen=True)
class ClassicalPath:
    """Classical path for ``(q0, Theta)``; build with :func:`classical_path`."""

    potential: Potential
    q0: float
    theta_big: float
    qt: float
    action: float
    _ode: object = field(default=None, repr=False, compare=False)

    @property
    def degenerate(self) -> bool:
        """Constant path sitting at the minimum."""
        return self.qt == 0.0

    def eval(self, theta: float) -> tuple[float, float]:
        return path_eval(self, theta)


def _solve_path_ode(p: Potential, qt: float, half: float):
    def rhs(_, y):
        return [y[1], p.u1(y[0])]

    sol = integrate.solve_ivp(rhs, (0.0, half), [qt, 0.0], method="DOP853",
                              rtol=1e-13, atol=1e-14 * max(1.0, abs(qt)), dense_output=True)
    if not sol.success:
        raise PathError(f"path integration failed: {sol.message}")
    return sol.sol


def classical_action(p: Potential, path: ClassicalPath) -> float:
    if path.qt == 0.0:
        return 0.0
    if p.kind is Kind.HARMONIC:
        return harmonic_action(path.q0, path.theta_big)
    if p.kind is Kind.QUARTIC:
        try:
            return quartic_action_closed(path.qt, path.theta_big)
        except el.EllipticError:
            pass
    return action_quadrature(p, path.q0, path.qt, path.theta_big)


def classical_path(p: Potential, q0: float, theta_big: float, qt: float | None = None) -> ClassicalPath:
    """Solve for the turning point (unless given) and assemble the path."""
    if qt is None:
        qt = turning_point(p, q0, theta_big)
    ode = None
    if p.kind is Kind.CUSTOM and qt != 0.0:
        ode = _solve_path_ode(p, qt, 0.5 * theta_big)
    path = ClassicalPath(p, q0, theta_big, qt, 0.0, ode)
    return ClassicalPath(p, q0, theta_big, qt, classical_action(p, path), ode)


def path_eval(path: ClassicalPath, theta: float) -> tuple[float, float]:
    """Return ``(q_c(theta), dq_c/dtheta)``."""
    T = path.theta_big
    if not -1e-12 * T <= theta <= T * (1 + 1e-12):
        raise PathError(f"theta={theta!r} outside [0, {T!r}]")
    qt = path.qt
    if qt == 0.0:
        return 0.0, 0.0
    s = theta - 0.5 * T
    kind = path.potential.kind
    if kind is Kind.HARMONIC:
        return qt * math.cosh(s), qt * math.sinh(s)
    if kind is Kind.QUARTIC:
        m = quartic_modulus(qt)
        r = math.sqrt(1.0 + qt * qt)
        sn, cn, dn = el.jacobi(r * s, m)
        return qt / cn, qt * r * sn * dn / (cn * cn)
    q, qdot = path._ode(abs(s))
    return float(q), float(qdot) if s >= 0.0 else -float(qdot)
