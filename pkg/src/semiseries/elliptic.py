"""Jacobi elliptic functions and elliptic integrals of the first and second kind.

Everything here is built on the arithmetic-geometric mean and the descending
Landen transformation.  The modulus convention is ``k`` (not the parameter
``m = k**2``).  Callers that know the complementary modulus ``k'`` to full
relative precision (the quartic kinematics do, for tiny turning points) should
build the modulus with :meth:`EllipticModulus.from_complement` so that nothing
is lost to ``sqrt(1 - k**2)`` cancellation near ``k = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

#: Absolute tolerance of the AGM sequences.  Once ``|c_n|`` drops below this,
#: one further (quadratically convergent) step is taken and the sequence stops.
TOL = 1e-12

#: Below this value of ``k'**2`` the Jacobi functions use the expansion about
#: the hyperbolic degeneration ``k = 1`` (when its error term is negligible).
HYPERBOLIC_SWITCH = 1e-12

_MAX_ITER = 64


class EllipticError(ArithmeticError):
    """Raised at poles of ``nc`` and at the logarithmic singularity of K(1)."""


@dataclass(frozen=True)
class EllipticModulus:
    """Modulus ``k`` with its complement ``k' = sqrt(1 - k^2)``."""

    k: float
    k_prime: float

    def __post_init__(self):
        if not (0.0 <= self.k <= 1.0 and 0.0 <= self.k_prime <= 1.0):
            raise ValueError(f"modulus out of range: k={self.k!r}, k'={self.k_prime!r}")

    @classmethod
    def from_k(cls, k: float) -> EllipticModulus:
        if not 0.0 <= k <= 1.0:
            raise ValueError(f"modulus k={k!r} outside [0, 1]")
        return cls(k, math.sqrt((1.0 - k) * (1.0 + k)))

    @classmethod
    def from_complement(cls, k_prime: float) -> EllipticModulus:
        if not 0.0 <= k_prime <= 1.0:
            raise ValueError(f"complementary modulus k'={k_prime!r} outside [0, 1]")
        return cls(math.sqrt((1.0 - k_prime) * (1.0 + k_prime)), k_prime)


def _as_modulus(m) -> EllipticModulus:
    if isinstance(m, EllipticModulus):
        return m
    return EllipticModulus.from_k(float(m))


def _agm_sequence(m: EllipticModulus) -> tuple[list[float], list[float]]:
    """Return the lists ``a_n`` and ``c_n`` of the AGM started at (1, k')."""
    a, b, c = 1.0, m.k_prime, m.k
    a_seq, c_seq = [a], [c]
    extra = False
    for _ in range(_MAX_ITER):
        if extra:
            break
        if abs(c) < TOL:
            extra = True
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
        if c == 0.0:
            break
    return a_seq, c_seq


def complete_K(m) -> float:
    """Complete elliptic integral of the first kind, ``K(k) = pi / (2 AGM(1, k'))``."""
    m = _as_modulus(m)
    if m.k_prime == 0.0:
        raise EllipticError("K(k) diverges at k = 1")
    a_seq, _ = _agm_sequence(m)
    return math.pi / (2.0 * a_seq[-1])


def complete_E(m) -> float:
    """Complete elliptic integral of the second kind."""
    m = _as_modulus(m)
    if m.k_prime == 0.0:
        return 1.0
    a_seq, c_seq = _agm_sequence(m)
    s = sum(2.0 ** (n - 1) * c * c for n, c in enumerate(c_seq))
    return math.pi / (2.0 * a_seq[-1]) * (1.0 - s)


def _landen_amplitudes(phi: float, m: EllipticModulus):
    """Descending Landen sequence of amplitudes for the incomplete integrals.

    ``tan(phi_{n+1} - phi_n) = (b_n / a_n) tan(phi_n)`` with the branch chosen
    so that ``phi_{n+1}`` stays close to ``2 phi_n``.
    """
    a, b, c = 1.0, m.k_prime, m.k
    phis, a_seq, c_seq = [phi], [a], [c]
    extra = False
    for _ in range(_MAX_ITER):
        if extra:
            break
        if abs(c) < TOL:
            extra = True
        p = phis[-1]
        delta = math.atan2(b * math.sin(p), a * math.cos(p))
        delta += 2.0 * math.pi * round((p - delta) / (2.0 * math.pi))
        phis.append(p + delta)
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
        if c == 0.0:
            break
    return phis, a_seq, c_seq


def incomplete_F(phi: float, m) -> float:
    """Incomplete elliptic integral of the first kind ``F(phi, k)``."""
    m = _as_modulus(m)
    if m.k_prime == 0.0:
        if abs(phi) >= 0.5 * math.pi:
            raise EllipticError("F(phi, 1) diverges for |phi| >= pi/2")
        return math.atanh(math.sin(phi))
    phis, a_seq, _ = _landen_amplitudes(phi, m)
    n = len(phis) - 1
    return phis[-1] / (2.0 ** n * a_seq[-1])


def incomplete_E(phi: float, m) -> float:
    """Incomplete elliptic integral of the second kind.

    ``E(phi, k) = integral_0^phi sqrt(1 - k^2 sin^2 t) dt``, any real ``phi``.
    """
    m = _as_modulus(m)
    if m.k_prime == 0.0:
        # integrand |cos t|
        turns = math.floor(phi / math.pi + 0.5)
        return 2.0 * turns + math.sin(phi - turns * math.pi)
    phis, a_seq, c_seq = _landen_amplitudes(phi, m)
    n = len(phis) - 1
    F = phis[-1] / (2.0 ** n * a_seq[-1])
    ratio = 1.0 - sum(2.0 ** (j - 1) * c * c for j, c in enumerate(c_seq))
    z = sum(c_seq[j] * math.sin(phis[j]) for j in range(1, len(phis)))
    return F * ratio + z


def _jacobi_hyperbolic(u: float, m1: float):
    # expansion about k = 1 to first order in m1 = k'^2
    t, s = math.tanh(u), 1.0 / math.cosh(u)
    g = 0.25 * m1 * (math.sinh(u) * math.cosh(u) - u)
    h = 0.25 * m1 * (math.sinh(u) * math.cosh(u) + u)
    sn = t + g * s * s
    cn = s - g * t * s
    dn = s + h * t * s
    am = 2.0 * math.atan(math.exp(u)) - 0.5 * math.pi + g * s
    return sn, cn, dn, am


def _jacobi_landen(u: float, m: EllipticModulus, a_seq, c_seq):
    n = len(a_seq) - 1
    phi = [0.0] * (n + 1)
    phi[n] = 2.0 ** n * a_seq[n] * u
    for j in range(n, 0, -1):
        phi[j - 1] = 0.5 * (phi[j] + math.asin(c_seq[j] / a_seq[j] * math.sin(phi[j])))
    p0 = phi[0]
    sn, cn = math.sin(p0), math.cos(p0)
    dn = cn / math.cos(phi[1] - p0) if n >= 1 else 1.0
    return sn, cn, dn


def _jacobi_reduced(r: float, m: EllipticModulus, a_seq, c_seq):
    # |r| <= K/2 here
    m1 = m.k_prime * m.k_prime
    if m1 < HYPERBOLIC_SWITCH and abs(r) < 0.25 * math.log(1e-16 / (m1 * m1)):
        sn, cn, dn, _ = _jacobi_hyperbolic(r, m1)
        return sn, cn, dn
    return _jacobi_landen(r, m, a_seq, c_seq)


def jacobi_am(u: float, m):
    """Return ``(sn, cn, dn, am)`` at real argument ``u``.

    The amplitude ``am`` is continuous in ``u`` (it is not reduced to
    ``[-pi/2, pi/2]``), so ``E(am(u), k)`` is odd in ``u``.
    """
    m = _as_modulus(m)
    if not math.isfinite(u):
        raise ValueError(f"argument u={u!r} is not finite")
    if m.k_prime == 0.0:
        return _jacobi_hyperbolic(u, 0.0)
    if m.k == 0.0:
        return math.sin(u), math.cos(u), 1.0, u

    a_seq, c_seq = _agm_sequence(m)
    K = math.pi / (2.0 * a_seq[-1])
    # u = 2jK + r with r in [-K, K): sn, cn flip sign with j, dn does not
    j = math.floor((u + K) / (2.0 * K))
    r = u - 2.0 * j * K
    if abs(r) <= 0.5 * K:
        sn, cn, dn = _jacobi_reduced(r, m, a_seq, c_seq)
    else:
        # quarter-period reflection keeps cn and dn relatively accurate near r = +-K
        v = K - abs(r)
        sv, cv, dv = _jacobi_reduced(v, m, a_seq, c_seq)
        sn = math.copysign(cv / dv, r)
        cn = m.k_prime * sv / dv
        dn = m.k_prime / dv
    am = math.atan2(sn, cn) + j * math.pi
    if j % 2:
        sn, cn = -sn, -cn
    return sn, cn, dn, am


def jacobi(u: float, m) -> tuple[float, float, float]:
    """Return ``(sn(u, k), cn(u, k), dn(u, k))``."""
    sn, cn, dn, _ = jacobi_am(u, m)
    return sn, cn, dn


def nc(u: float, m) -> float:
    """``nc = 1/cn``; raises :class:`EllipticError` at a zero of ``cn``."""
    _, cn, _ = jacobi(u, m)
    if cn == 0.0:
        raise EllipticError(f"nc has a pole at u={u!r}")
    return 1.0 / cn
