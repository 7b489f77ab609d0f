"""Invariant suites run by ``semiseries validate``.

Each suite returns a list of :class:`Check`; a run passes iff every check does.
``green_offset`` shifts every Green-function value and exists to prove that
the suite notices a corrupted propagator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from . import classical as cl
from . import elliptic as el
from . import fluctuations as fl
from . import oracle
from . import series
from .potential import harmonic, quartic

TABLE1_G = (0.4, 1.2, 2.0, 4.0, 8.0)
TABLE1_SEMI = (0.559258, 0.639765, 0.701429, 0.823078, 1.011928)
TABLE1_EXACT = (0.559146, 0.637992, 0.696176, 0.803771, 0.951568)


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: str


def _check(suite, name, value, limit, fmt="{:.3g}") -> Check:
    ok = bool(np.isfinite(value) and value <= limit)
    return Check(suite, name, ok, f"{fmt.format(value)} <= {limit:g}")


def elliptic_suite(**_) -> list[Check]:
    worst = 0.0
    for k in np.linspace(0.02, 0.999, 20):
        m = el.EllipticModulus.from_k(float(k))
        for u in np.linspace(-6.0, 6.0, 50):
            sn, cn, dn = el.jacobi(float(u), m)
            worst = max(worst, abs(sn * sn + cn * cn - 1.0), abs(dn * dn + k * k * sn * sn - 1.0))
    out = [_check("elliptic", "sn^2+cn^2=1 and dn^2+k^2 sn^2=1 on 50x20 grid", worst, 1e-12)]
    dk = de = 0.0
    for k in (0.1, 0.5, 1 / math.sqrt(2.0), 0.9, 0.99):
        K_ref = integrate.quad(lambda t: 1 / math.sqrt(1 - (k * math.sin(t)) ** 2), 0, math.pi / 2,
                               epsabs=1e-14, epsrel=1e-13)[0]
        E_ref = integrate.quad(lambda t: math.sqrt(1 - (k * math.sin(t)) ** 2), 0, math.pi / 2,
                               epsabs=1e-14, epsrel=1e-13)[0]
        dk = max(dk, abs(el.complete_K(k) - K_ref))
        de = max(de, abs(el.complete_E(k) - E_ref))
    out.append(_check("elliptic", "K(k) against quadrature", dk, 1e-10))
    out.append(_check("elliptic", "E(k) against quadrature", de, 1e-10))
    sn, cn, _ = el.jacobi(el.complete_K(0.8), 0.8)
    out.append(_check("elliptic", "sn(K)=1, cn(K)=0 at k=0.8", max(abs(sn - 1), abs(cn)), 1e-12))
    return out


def classical_suite(**_) -> list[Check]:
    p = quartic(1.0)
    q0 = cl.quartic_q0(0.5, 2.0)
    closed = cl.quartic_action_closed(0.5, 2.0)
    quad = cl.action_quadrature(p, q0, 0.5, 2.0)
    out = [_check("classical", "quartic action closed form vs quadrature", abs(closed - quad), 1e-9)]
    # first integral of the path equation: qdot^2/2 - U(q) = -U(qt)
    worst = 0.0
    for pot in (p, p.as_custom()):
        path = cl.classical_path(pot, 1.3, 2.0)
        for th in np.linspace(0.0, 2.0, 21):
            q, qd = path.eval(float(th))
            worst = max(worst, abs(0.5 * qd * qd - pot.diff(q, path.qt)))
    out.append(_check("classical", "energy conservation along quartic paths", worst, 1e-9))
    res = max(abs(series.theta_of_modulus(cl.quartic_modulus(series.k_theta_solve(t)[1])) - t)
              for t in (0.01, 0.5, 2.0, 10.0, 30.0))
    out.append(_check("classical", "k_Theta root residual", res, 1e-10))
    return out


def fluctuations_suite(green_offset: float = 0.0, **_) -> list[Check]:
    rng = np.random.default_rng(7)
    p = quartic(1.0)
    jump = bound = ends = 0.0
    for _ in range(100):
        T = float(rng.uniform(0.2, 6.0))
        qt = float(rng.uniform(0.0, 0.9 * series.k_theta_solve(T)[1]))
        path = cl.classical_path(p, cl.quartic_q0(qt, T), T, qt=qt)
        gf = fl.green_function(fl.fluctuation_basis(path), offset=green_offset)
        th = float(rng.uniform(0.0, T))
        bound = max(bound, fl.green_diag(gf, th) - th * (T - th) / T)
        ends = max(ends, abs(fl.green(gf, 0.0, th)), abs(fl.green(gf, th, T)))
        jump = max(jump, abs(fl.green_dtheta(gf, th, th, +1) - fl.green_dtheta(gf, th, th, -1) + 1.0))
    out = [
        _check("fluctuations", "jump of dG/dtheta equals -1", jump, 1e-6),
        _check("fluctuations", "G(theta,theta) <= theta(Theta-theta)/Theta", bound, 1e-12),
        _check("fluctuations", "G vanishes at the boundaries", ends, 1e-12),
    ]
    worst = 0.0
    for _ in range(10):
        T = float(rng.uniform(0.5, 5.0))
        q0 = float(rng.uniform(0.2, 2.0))
        path = cl.classical_path(p, q0, T)
        a = fl.van_vleck(fl.fluctuation_basis(path), 1.0)
        b = fl.van_vleck_from_theta(path, 1.0)
        worst = max(worst, abs(a / b - 1.0))
    out.append(_check("fluctuations", "Delta: Wronskian route vs dTheta/dqt route", worst, 1e-6))
    h = harmonic(1.0)
    dh = max(abs(fl.van_vleck(fl.fluctuation_basis(cl.classical_path(h, 0.7, T)), 1.0)
                 - 2 * math.pi * math.sinh(T)) for T in (0.5, 1.0, 3.0))
    out.append(_check("fluctuations", "harmonic Delta = 2 pi sinh Theta", dh, 1e-10))
    return out


def series_suite(**_) -> list[Check]:
    h = harmonic(1.0)
    worst = max(abs(series.z2_over_q0(h, T).value * 2 * math.sinh(0.5 * T) - 1.0)
                for T in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0))
    out = [_check("series", "harmonic Z2 = 1/(2 sinh(Theta/2))", worst, 1e-6)]
    worst = 0.0
    for g in (0.1, 0.3, 1.0):
        for T in (0.5, 2.0, 5.0):
            p = quartic(g)
            worst = max(worst, abs(series.z2_over_q0(p, T).value / series.z2_over_qt(p, T).value - 1))
    out.append(_check("series", "route equivalence q0 vs qt", worst, 1e-6))
    worst = max(abs(series.ground_state_energy(g) - e) for g, e in zip(TABLE1_G, TABLE1_SEMI))
    out.append(_check("series", "semiclassical e0 against Table 1", worst, 1e-4))
    return out


def oracle_suite(**_) -> list[Check]:
    worst = max(abs(oracle.ground_state_energy(quartic(g)) - e) for g, e in zip(TABLE1_G, TABLE1_EXACT))
    out = [_check("oracle", "exact e0 against Table 1", worst, 1e-5)]
    viol = min(series.ground_state_energy(g) - oracle.ground_state_energy(quartic(g)) for g in TABLE1_G)
    out.append(Check("oracle", "semiclassical e0 >= exact e0", viol >= 0.0, f"min gap {viol:.3g}"))
    excess = -math.inf
    for g in (0.1, 0.3, 1.0):
        s = oracle.spectrum_for(quartic(g), 0.5)
        for T in (0.5, 1.0, 2.0, 5.0):
            z2 = series.z2_over_q0(quartic(g), T).value
            zx = oracle.exact_partition(s, T)
            excess = max(excess, abs(z2 - zx) / zx - 3 * g * T ** 3 / 40)
    out.append(_check("oracle", "|Z2 - Z|/Z - 3 g Theta^3/40 (error envelope)", excess, 0.0))
    return out


SUITES: dict[str, Callable[..., list[Check]]] = {
    "elliptic": elliptic_suite,
    "classical": classical_suite,
    "fluctuations": fluctuations_suite,
    "series": series_suite,
    "oracle": oracle_suite,
}


def run(only: list[str] | None = None, green_offset: float = 0.0) -> list[Check]:
    names = list(SUITES) if not only else only
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}; choose from {', '.join(SUITES)}")
    out: list[Check] = []
    for n in names:
        try:
            out.extend(SUITES[n](green_offset=green_offset))
        except ArithmeticError as exc:     # numerical failure inside a suite counts as failure
            out.append(Check(n, "suite raised", False, repr(exc)))
    return out
