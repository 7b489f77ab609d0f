"""Semiclassical series for the partition function.

The quadratic approximation ``Z2`` integrates ``exp(-I[q_c]/g) Delta^{-1/2}``
over the boundary value ``q0``; equivalently over the turning point ``qt``
with the Jacobian folded into ``D(qt, Theta)``.  On top of that: the
high/low-temperature limits, the ground-state energy of the semiclassical
wave function, the specific heat, Wick moments of the fluctuation field and
the first (m = 1) correction.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from scipy import integrate

from . import elliptic as el
from .classical import (classical_path, quartic_escape_turning_point, quartic_modulus,
                        quartic_action_closed, quartic_q0, velocity)
from .fluctuations import (FluctuationBasis, GreenFunction, fluctuation_basis, green_diag,
                           green_function, propagator_gc, van_vleck)
from .potential import Kind, Potential


class QuadratureError(ArithmeticError):
    def __init__(self, msg: str, value: float = math.nan, error: float = math.nan):
        super().__init__(f"{msg} (value={value:.17g}, estimated error={error:.3g})")
        self.value = value
        self.error = error


class DifferentiationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-13
    rel_tol: float = 1e-10
    max_subdivisions: int = 200
    derivative_step: float = 0.02      # step in log(Theta)
    derivative_tol: float = 1e-4       # allowed |C(h) - C(h/2)|
    high_T_below: float = 0.2
    low_T_above: float = 8.0

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0 and self.derivative_step > 0):
            raise ValueError("tolerances and derivative step must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT = QuadratureConfig()


class Regime(str, Enum):
    GENERIC = "generic"
    HIGH_T = "high_T"
    LOW_T = "low_T"


def regime(theta_big: float, cfg: QuadratureConfig = DEFAULT) -> Regime:
    if theta_big < cfg.high_T_below:
        return Regime.HIGH_T
    if theta_big > cfg.low_T_above:
        return Regime.LOW_T
    return Regime.GENERIC


@dataclass(frozen=True)
class PartitionEstimate:
    value: float
    err_estimate: float
    k_theta: float
    qt_plus: float
    regime: Regime

    @property
    def qt_minus(self) -> float:
        return -self.qt_plus


def _quad(f, a, b, cfg: QuadratureConfig, what: str, epsabs=None, points=None):
    epsabs = cfg.abs_tol if epsabs is None else epsabs
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, epsabs=epsabs, epsrel=cfg.rel_tol,
                                  limit=cfg.max_subdivisions, points=points)
    # quad warns on roundoff even when the result is fine; judge by the error estimate
    if not caught or err <= 100.0 * max(cfg.rel_tol * abs(val), epsabs):
        return val, err
    raise QuadratureError(f"{what}: quadrature did not converge ({caught[0].message})", val, err)


def _cutoff(f: Callable[[float], float], direction: float, peak: float, cfg: QuadratureConfig) -> float:
    """Smallest ``x = direction * 2^n`` beyond which ``f`` is negligible against ``peak``."""
    x = 1.0
    for _ in range(60):
        if f(direction * x) < cfg.abs_tol * peak:
            return direction * x
        x *= 2.0
    raise QuadratureError("integrand does not decay", math.nan, math.nan)


def _kinematics(p: Potential, theta_big: float) -> tuple[float, float]:
    if p.kind is Kind.QUARTIC:
        return k_theta_solve(theta_big)
    if p.kind is Kind.HARMONIC:
        return math.nan, math.inf
    return math.nan, math.nan


# -- Z2 over q0 -------------------------------------------------------------------------

def z2_integrand_q0(p: Potential, q0: float, theta_big: float) -> float:
    """``exp(-I[q_c]/g) / sqrt(Delta)`` at boundary value ``q0``."""
    path = classical_path(p, q0, theta_big)
    delta = van_vleck(fluctuation_basis(path), p.g)
    return math.exp(-path.action / p.g) / math.sqrt(delta)


def _integrate_line(f, p: Potential, cfg: QuadratureConfig, what: str) -> tuple[float, float]:
    peak = max(f(x) for x in (0.0, 0.25, 0.5, 1.0, -0.25, -0.5, -1.0))
    total, err = 0.0, 0.0
    sides = (1.0,) if p.symmetric else (1.0, -1.0)
    for d in sides:
        cut = _cutoff(f, d, peak, cfg)
        lo, hi = sorted((0.0, cut))
        val, e = _quad(f, lo, hi, cfg, what, epsabs=cfg.abs_tol * peak)
        total += val
        err += e + abs(f(cut)) * abs(cut)
    if p.symmetric:
        total, err = 2.0 * total, 2.0 * err
    return total, err


def z2_over_q0(p: Potential, theta_big: float, cfg: QuadratureConfig = DEFAULT) -> PartitionEstimate:
    """Quadratic approximation ``Z2 = int dq0 exp(-I/g) Delta^{-1/2}``."""
    if not theta_big > 0:
        raise ValueError(f"Theta must be positive, got {theta_big!r}")
    val, err = _integrate_line(lambda q0: z2_integrand_q0(p, q0, theta_big), p, cfg, "Z2 over q0")
    k, qp = _kinematics(p, theta_big)
    return PartitionEstimate(val, err, k, qp, regime(theta_big, cfg))


# -- Z2 over qt ---------------------------------------------------------------------------

def theta_of_modulus(m: el.EllipticModulus) -> float:
    """``f(k) = 2 sqrt(2 k^2 - 1) K(k)``."""
    return 2.0 * math.sqrt((m.k - m.k_prime) * (m.k + m.k_prime)) * el.complete_K(m)


def k_theta_solve(theta_big: float) -> tuple[float, float]:
    """Return ``(k_Theta, q_Theta^+)`` with ``f(k_Theta) = Theta``."""
    if theta_big < 0:
        raise ValueError("Theta must be nonnegative")
    if theta_big == 0.0:
        return 1.0 / math.sqrt(2.0), math.inf
    qp = quartic_escape_turning_point(theta_big)
    return quartic_modulus(qp).k, qp


def d_factor(qt: float, theta_big: float, g: float) -> float:
    """Closed-form ``D(qt, Theta)`` of the quartic oscillator."""
    q2 = qt * qt
    if qt == 0.0:
        # harmonic degeneration: bracket -> coth(Theta/2)
        return math.sqrt(1.0 / math.tanh(0.5 * theta_big)) / math.sqrt(4.0 * math.pi * g)
    m = quartic_modulus(qt)
    k2, kp2 = m.k * m.k, m.k_prime * m.k_prime
    u = 0.5 * math.sqrt(1.0 + q2) * theta_big
    sn, cn, dn, am = el.jacobi_am(u, m)
    E = el.incomplete_E(am, m)
    br = (kp2 / k2 * u + (k2 - kp2) / k2 * E + cn * dn / sn + kp2 * cn * sn / dn)
    return (1.0 + q2) ** 0.25 / math.sqrt(4.0 * math.pi * g) * math.sqrt(br)


def d_factor_from_path(b: FluctuationBasis, g: float) -> float:
    """``D = -U'(qt) Delta^{1/2} / (4 pi g v(q0, qt))``, assembled from the fluctuation basis."""
    path = b.path
    p = path.potential
    delta = van_vleck(b, g)
    return -p.u1(path.qt) * math.sqrt(delta) / (4.0 * math.pi * g * velocity(p, path.q0, path.qt))


def _harmonic_d(theta_big: float, g: float) -> float:
    return math.sqrt(math.sinh(theta_big) / (8.0 * math.pi * g)) / math.sinh(0.5 * theta_big)


def z2_integrand_qt(p: Potential, qt: float, theta_big: float) -> float:
    """``D(qt, Theta) exp(-I/g)``; zero once ``q0`` has escaped to infinity."""
    g = p.g
    if p.kind is Kind.HARMONIC:
        return _harmonic_d(theta_big, g) * math.exp(-0.5 * qt * qt * math.sinh(theta_big) / g)
    if p.kind is not Kind.QUARTIC:
        raise ValueError("the turning-point route needs the closed-form D (harmonic or quartic)")
    a = abs(qt)
    try:
        action = quartic_action_closed(a, theta_big)
    except (el.EllipticError, ZeroDivisionError, OverflowError):
        return 0.0
    return d_factor(a, theta_big, g) * math.exp(-action / g)


def _integrate_qt(f, p: Potential, theta_big: float, cfg: QuadratureConfig, what: str):
    if p.kind is Kind.HARMONIC:
        val, err = _integrate_line(f, p, cfg, what)
        return val, err
    qp = quartic_escape_turning_point(theta_big)
    peak = max(f(x * qp) for x in (0.0, 0.1, 0.25, 0.5))
    # the integrand dies like exp(-c q0^3) well before qp; trim the dead tail
    hi = qp
    for _ in range(2000):
        if f(hi * (1 - 1e-3)) > cfg.abs_tol * peak:
            break
        hi *= 1 - 2e-3
    val, err = _quad(f, 0.0, hi, cfg, what, epsabs=cfg.abs_tol * peak)
    return 2.0 * val, 2.0 * err


def z2_over_qt(p: Potential, theta_big: float, cfg: QuadratureConfig = DEFAULT) -> PartitionEstimate:
    """``Z2 = int_{q_Theta^-}^{q_Theta^+} D(qt, Theta) exp(-I/g) dqt``."""
    if not theta_big > 0:
        raise ValueError(f"Theta must be positive, got {theta_big!r}")
    val, err = _integrate_qt(lambda qt: z2_integrand_qt(p, qt, theta_big), p, theta_big, cfg,
                             "Z2 over qt")
    k, qp = _kinematics(p, theta_big)
    return PartitionEstimate(val, err, k, qp, regime(theta_big, cfg))


# -- limits ---------------------------------------------------------------------------------

def z2_high_T(p: Potential, theta_big: float, cfg: QuadratureConfig = DEFAULT) -> float:
    """``sqrt(1/(2 pi g Theta)) int exp(-Theta U(q)/g) dq``; sensible for ``Theta < ~0.2``."""
    g = p.g
    f = lambda q: math.exp(-theta_big * p.u(q) / g)
    val, _ = _integrate_line(f, p, cfg, "high-T limit")
    return val / math.sqrt(2.0 * math.pi * g * theta_big)


def low_T_integrand(q0: float, g: float) -> float:
    """Integrand of the large-``Theta`` quartic ``Z2`` (without the ``exp(-Theta/2)`` prefactor)."""
    s = math.sqrt(1.0 + 0.5 * q0 * q0)
    return math.exp(-4.0 / (3.0 * g) * (s ** 3 - 1.0)) / (s * (1.0 + s))


def z2_low_T(p: Potential, theta_big: float, cfg: QuadratureConfig = DEFAULT) -> float:
    """Large-``Theta`` quartic ``Z2``; sensible for ``Theta > ~8``."""
    if p.kind is not Kind.QUARTIC:
        raise ValueError("low-temperature closed form exists for the quartic oscillator only")
    g = p.g
    val, _ = _integrate_line(lambda q: low_T_integrand(q, g), p, cfg, "low-T limit")
    return 2.0 * math.exp(-0.5 * theta_big) / math.sqrt(math.pi * g) * val


def ground_state_energy(g: float, cfg: QuadratureConfig = DEFAULT) -> float:
    """Energy expectation of ``phi_0 = sqrt(low_T_integrand)`` for the quartic oscillator.

    ``h = -(g/2) d^2/dq^2 + (q^2/2 + q^4/4)/g``; the kinetic term is used in
    its integrated-by-parts form ``(g/2) |phi_0'|^2``.
    """
    if not g > 0:
        raise ValueError("g must be positive")

    def dlog_phi(q):
        s = math.sqrt(1.0 + 0.5 * q * q)
        ds = q / (2.0 * s)
        return 0.5 * (-(4.0 / g) * s * s * ds - ds / s - ds / (1.0 + s))

    def energy_density(q):
        return low_T_integrand(q, g) * (0.5 * g * dlog_phi(q) ** 2 + (0.5 * q * q + 0.25 * q ** 4) / g)

    quartic = Potential(g, lambda q: 0.0, lambda q: 0.0, lambda q: 0.0, lambda q: 0.0, lambda q: 0.0,
                        Kind.QUARTIC, True, "quartic")
    tight = QuadratureConfig(abs_tol=min(cfg.abs_tol, 1e-15), rel_tol=min(cfg.rel_tol, 1e-12),
                             max_subdivisions=cfg.max_subdivisions)
    num, _ = _integrate_line(energy_density, quartic, tight, "energy numerator")
    den, _ = _integrate_line(lambda q: low_T_integrand(q, g), quartic, tight, "norm")
    return num / den


# -- specific heat --------------------------------------------------------------------------

def specific_heat_from(log_z: Callable[[float], float], theta_big: float, step: float = 0.02,
                       tol: float = 1e-4) -> tuple[float, float]:
    """``C = Theta^2 d^2 log Z / dTheta^2`` by differencing in ``x = log Theta``.

    ``C = L'' - L'`` with ``L(x) = log Z(e^x)``.  Five-point stencils at steps
    ``h`` and ``h/2`` are combined by Richardson extrapolation; the difference
    between the two is returned as the error estimate.
    """
    x = math.log(theta_big)
    cache: dict[float, float] = {}

    def L(dx):
        key = round(dx / step * 4.0)
        if key not in cache:
            cache[key] = log_z(math.exp(x + dx))
        return cache[key]

    def c5(h):
        f = [L(j * h) for j in (-2, -1, 0, 1, 2)]
        d1 = (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h)
        d2 = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h)
        return d2 - d1

    coarse, fine = c5(step), c5(0.5 * step)
    c = (16.0 * fine - coarse) / 15.0
    err = abs(fine - c)
    if err > tol:
        raise DifferentiationError(f"specific heat at Theta={theta_big:g}: differencing noise {err:.2e}")
    return c, err


def _z_provider(p: Potential, provider, cfg: QuadratureConfig, theta_big: float) -> Callable[[float], float]:
    if callable(provider):
        return provider
    if provider == "z2_over_q0":
        return lambda t: z2_over_q0(p, t, cfg).value
    if provider == "z2_over_qt":
        return lambda t: z2_over_qt(p, t, cfg).value
    if provider == "oracle":
        from .oracle import exact_partition, spectrum_for
        # the smallest Theta of the stencil needs the most levels
        sol = spectrum_for(p, theta_min=math.exp(-2.0 * cfg.derivative_step) * theta_big)
        return lambda t: exact_partition(sol, t)
    raise ValueError(f"unknown Z provider {provider!r}")


def specific_heat(p: Potential, theta_big: float, cfg: QuadratureConfig = DEFAULT,
                  provider="z2_over_q0") -> float:
    """Specific heat from ``Z(Theta)``; ``provider`` picks the partition function."""
    zf = _z_provider(p, provider, cfg, theta_big)
    c, _ = specific_heat_from(lambda t: math.log(zf(t)), theta_big, cfg.derivative_step,
                              cfg.derivative_tol)
    return c


def classical_specific_heat(p: Potential, theta_big: float, cfg: QuadratureConfig = DEFAULT) -> float:
    """Specific heat of ``Z_cl = sqrt(1/(2 pi g Theta)) int exp(-Theta U/g) dq``.

    Differentiating under the integral gives ``C = 1/2 + Theta^2 Var(U/g)``
    with the classical Boltzmann weight, so no numerical differencing is needed.
    """
    g = p.g
    w = lambda q: math.exp(-theta_big * p.u(q) / g)
    z, _ = _integrate_line(w, p, cfg, "classical Z")
    m1, _ = _integrate_line(lambda q: w(q) * p.u(q) / g, p, cfg, "classical <U>")
    m2, _ = _integrate_line(lambda q: w(q) * (p.u(q) / g) ** 2, p, cfg, "classical <U^2>")
    m1, m2 = m1 / z, m2 / z
    return 0.5 + theta_big ** 2 * (m2 - m1 * m1)


# -- Wick moments and the first correction ------------------------------------------------

def pairings(items: Sequence) -> Iterator[list[tuple]]:
    """All perfect matchings of ``items`` (empty for odd length)."""
    if not items:
        yield []
        return
    if len(items) % 2:
        return
    first, rest = items[0], items[1:]
    for i, partner in enumerate(rest):
        for tail in pairings(rest[:i] + rest[i + 1:]):
            yield [(first, partner)] + tail


def wick_expectation(gf: GreenFunction, b: FluctuationBasis, g: float, thetas: Sequence[float]) -> float:
    """``<eta(theta_1) ... eta(theta_k)>``: sum over pairings of products of ``G``."""
    k = len(thetas)
    if k % 2:
        return 0.0
    from .fluctuations import green
    gc = propagator_gc(b, 0.0, 0.0, b.theta_big, 0.0, g)
    total = sum(math.prod(green(gf, a, c) for a, c in pr) for pr in pairings(list(thetas)))
    return g ** (k / 2) * gc * total


def double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def wick_moment(gf: GreenFunction, b: FluctuationBasis, g: float, k_power: int, theta: float) -> float:
    """Equal-time moment ``<eta^k(theta)>``."""
    if k_power < 0:
        raise ValueError("k_power must be >= 0")
    if k_power % 2:
        return 0.0
    gc = propagator_gc(b, 0.0, 0.0, b.theta_big, 0.0, g)
    return double_factorial(k_power - 1) * g ** (k_power / 2) * gc * green_diag(gf, theta) ** (k_power // 2)


def a1_correction(gf: GreenFunction, theta_big: float, cfg: QuadratureConfig = DEFAULT) -> float:
    """``a1 = (3/4) int_0^Theta G(theta, theta)^2 dtheta``.

    The m = 1 term of the quartic oscillator: only the four-leg vertex
    ``eta^4/4`` survives, since the three-leg vertex has a vanishing odd moment.
    """
    f = lambda t: green_diag(gf, t) ** 2
    val, _ = _quad(f, 0.0, theta_big, cfg, "a1", epsabs=cfg.abs_tol)
    return 0.75 * val


def a1_at_turning_point(p: Potential, qt: float, theta_big: float, cfg: QuadratureConfig = DEFAULT) -> float:
    """``a1(qt, Theta)`` on the quartic path with turning point ``qt``."""
    if p.kind is not Kind.QUARTIC:
        raise ValueError("a1(qt, Theta) is defined on quartic paths")
    q0 = quartic_q0(qt, theta_big) if qt != 0.0 else 0.0
    path = classical_path(p, q0, theta_big, qt=qt)
    return a1_correction(green_function(fluctuation_basis(path)), theta_big, cfg)


def z_corrected(p: Potential, theta_big: float, cfg: QuadratureConfig = DEFAULT) -> PartitionEstimate:
    """``Z ~ int dqt D exp(-I/g) [1 - g a1(qt, Theta)]`` for the quartic oscillator.

    The harmonic oscillator has no vertices, so there the result is ``Z2``.
    """
    if not theta_big > 0:
        raise ValueError(f"Theta must be positive, got {theta_big!r}")
    if p.kind is Kind.HARMONIC:
        return z2_over_qt(p, theta_big, cfg)
    if p.kind is not Kind.QUARTIC:
        raise ValueError("the first correction is implemented for the quartic oscillator")
    g = p.g
    inner = QuadratureConfig(abs_tol=1e-12, rel_tol=max(cfg.rel_tol, 1e-9),
                             max_subdivisions=cfg.max_subdivisions)

    def f(qt):
        base = z2_integrand_qt(p, qt, theta_big)
        if base == 0.0:
            return 0.0
        return base * (1.0 - g * a1_at_turning_point(p, abs(qt), theta_big, inner))

    val, err = _integrate_qt(f, p, theta_big, cfg, "corrected Z over qt")
    k, qp = _kinematics(p, theta_big)
    return PartitionEstimate(val, err, k, qp, regime(theta_big, cfg))


# -- bookkeeping of the expansion ----------------------------------------------------------

@dataclass(frozen=True)
class SeriesTerm:
    """One vertex assignment ``(n_1, ..., n_m)`` of the m-th order term.

    ``value`` is the pure-number prefactor ``(-1)^m / (m! prod n_j!)``;
    ``g_power`` is the net power of ``g`` once the Gaussian moment
    ``<eta^{sum n_j}> ~ g^{sum n_j / 2}`` is combined with ``g^{-m}``.
    """

    m_order: int
    vertex_powers: tuple[int, ...]
    g_power: Fraction
    value: float

    def __post_init__(self):
        if any(n < 3 for n in self.vertex_powers):
            raise ValueError("vertex powers start at 3")


def series_terms(m_order: int, n_max: int) -> list[SeriesTerm]:
    """Surviving (even total power) vertex assignments with ``3 <= n_j <= n_max``."""
    out = []
    for ns in itertools.combinations_with_replacement(range(3, n_max + 1), m_order):
        total = sum(ns)
        if total % 2:
            continue
        pref = (-1) ** m_order / (math.factorial(m_order) * math.prod(math.factorial(n) for n in ns))
        out.append(SeriesTerm(m_order, ns, Fraction(total, 2) - m_order, pref))
    return out
