import math

import numpy as np
import pytest

from semiseries import harmonic, oracle, quartic, series

TABLE1_G = (0.4, 1.2, 2.0, 4.0, 8.0)
TABLE1_EXACT = (0.559146, 0.637992, 0.696176, 0.803771, 0.951568)


def test_harmonic_levels():
    for g in (0.3, 1.0):
        s = oracle.spectrum(harmonic(g), 8, extrapolate=True)
        assert np.allclose(s.energies, np.arange(8) + 0.5, atol=1e-6, rtol=0)


@pytest.mark.parametrize("g,e0", list(zip(TABLE1_G, TABLE1_EXACT)))
def test_table1_exact_column(g, e0):
    assert oracle.ground_state_energy(quartic(g)) == pytest.approx(e0, abs=1e-5)
    assert oracle.spectrum(quartic(g), 1).ground == pytest.approx(e0, abs=1e-5)


@pytest.mark.parametrize("g", TABLE1_G)
def test_variational_one_sidedness(g):
    assert series.ground_state_energy(g) >= oracle.ground_state_energy(quartic(g))


def test_levels_ordered_and_refinement_stable():
    p = quartic(1.2)
    s = oracle.spectrum(p, 20)
    assert np.all(np.diff(s.energies) > 0)
    assert oracle.refinement_change(p, s) < 1e-7


def test_second_order_convergence():
    p = quartic(1.0)
    L = oracle.wall_position(p, 0.5)
    grids = [oracle.Grid(-L, L, n) for n in (401, 801, 1601)]
    e = [oracle.spectrum(p, 1, gr).ground for gr in grids]
    ratio = (e[0] - e[1]) / (e[1] - e[2])
    assert ratio == pytest.approx(4.0, rel=0.02)


def test_exact_partition_harmonic_and_ground_dominance():
    h = harmonic(1.0)
    s = oracle.spectrum(h, 60, extrapolate=True)
    for T in (1.0, 3.0):
        assert oracle.exact_partition(s, T) == pytest.approx(1 / (2 * math.sinh(T / 2)), rel=1e-8)
    p = quartic(0.3)
    s = oracle.spectrum(p, 40)
    T = 40.0
    assert oracle.exact_partition(s, T) * math.exp(T * s.ground) == pytest.approx(1.0, abs=1e-6)


def test_truncation_control():
    s = oracle.spectrum(quartic(0.3), 5)
    with pytest.raises(oracle.TruncationError):
        oracle.exact_partition(s, 0.1)
    with pytest.raises(oracle.TruncationError):
        oracle.exact_specific_heat(s, 0.1)


def test_exact_specific_heat():
    h = harmonic(1.0)
    s = oracle.spectrum(h, 80, extrapolate=True)
    for T in (0.5, 2.0):
        assert oracle.exact_specific_heat(s, T) == pytest.approx((T / 2) ** 2 / math.sinh(T / 2) ** 2, abs=1e-7)
    p = quartic(0.3)
    s = oracle.spectrum_for(p, 0.2)
    assert oracle.exact_specific_heat(s, 20.0) < 1e-4
    # high temperature approaches the classical curve
    assert oracle.exact_specific_heat(s, 0.2) == pytest.approx(series.classical_specific_heat(p, 0.2), rel=0.01)


def test_grid_validation():
    with pytest.raises(ValueError):
        oracle.Grid(1.0, -1.0, 10)
    with pytest.raises(ValueError):
        oracle.spectrum(harmonic(1.0), 0)
