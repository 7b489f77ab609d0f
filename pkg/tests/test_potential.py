import pytest

from semiseries import UnsupportedPotential, custom, harmonic, make, quartic


def test_factored_difference_matches_naive():
    p = quartic(1.0)
    assert p.diff(1.3, 0.4) == pytest.approx(p.u(1.3) - p.u(0.4), rel=1e-14)
    h = harmonic(1.0)
    assert h.diff(2.0, 1.0) == pytest.approx(1.5)


def test_taylor_difference_for_custom():
    p = quartic(1.0).as_custom()
    q = 0.7
    d = 1e-6
    exact = (q + d - q) * (2 * q + d) * (0.5 + 0.25 * ((q + d) ** 2 + q ** 2))
    assert p.diff(q + d, q) == pytest.approx(exact, rel=1e-9)


def test_bad_coupling_and_well_checks():
    with pytest.raises(ValueError):
        quartic(0.0)
    with pytest.raises(UnsupportedPotential):
        custom(lambda q: q ** 4 / 4 - q ** 2 / 2, lambda q: q ** 3 - q, lambda q: 3 * q * q - 1,
               lambda q: 6 * q, lambda q: 6.0, g=1.0)
    with pytest.raises(ValueError):
        make("custom", 1.0)


def test_omega0():
    assert quartic(0.3).omega0 == 1.0
    assert make("harmonic", 2.0).g == 2.0
