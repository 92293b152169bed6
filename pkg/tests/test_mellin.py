"""Mellin transforms: Gamma/Beta oracles, finite parts, pole structure."""

import math

import mpmath as mp
import pytest

from opecalc import mellin as ml


def test_exponential_gamma_oracle():
    # Z(s) = Gamma(2s + N) for h = e^{-r}
    h = ml.exponential_profile()
    for n in (2, 4):
        for s in (0.0, 0.75, -0.3, 1.5):
            v = ml.mellin_Z(h, s, n)
            want = complex(mp.gamma(2 * s + n))
            assert abs(v.value - want) < 1e-8 * max(1.0, abs(want))


def test_bump_beta_oracle():
    # Z(s) = B((2s+N)/2, power+1) / 2 for h = (1-r^2)^power on [0, 1]
    power = 16
    h = ml.bump_profile(power)
    for n in (2, 4):
        for s in (0.0, 0.5, -0.4):
            v = ml.mellin_Z(h, s, n)
            want = complex(mp.beta((2 * s + n) / 2, power + 1)) / 2
            assert abs(v.value - want) < 1e-10


def test_continuation_below_convergence():
    # direct quadrature diverges for 2s + N <= 0; IBP continues it
    h = ml.exponential_profile()
    v = ml.mellin_Z(h, -2.75, 4)
    assert v.method.startswith("ibp")
    want = complex(mp.gamma(2 * (-2.75) + 4))
    assert abs(v.value - want) < 1e-6 * abs(want)


def test_excluded_points_raise():
    h = ml.exponential_profile()
    with pytest.raises(ValueError):
        ml.mellin_Z(h, -2.0, 4)  # on the pole lattice
    with pytest.raises(ValueError):
        ml.mellin_Z(h, 0.0, 3)  # odd N


@pytest.mark.parametrize("name", ["bump", "exponential"])
@pytest.mark.parametrize("m", [0, 1, 2])
def test_qM_identity(name, m):
    h = ml.profile_by_name(name)
    assert ml.verify_qM_identity(h, m, 4) < 1e-6


def test_U2_is_minus_gamma():
    fp = ml.finite_part(ml.exponential_profile(), 2, 4)
    assert abs(fp.value - (-float(mp.euler))) < 1e-6
    # the pole itself is simple with residue 1/2 (from Gamma(2s+4) at s=-2)
    assert abs(fp.pole_coefficient - 0.5) < 1e-6


@pytest.mark.parametrize("name", ["bump", "exponential"])
def test_poles_simple_on_lattice(name):
    h = ml.profile_by_name(name)
    poles = ml.pole_scan(h, 4, (-4.0, 0.0))
    lattice = {-(4 + k) / 2 for k in range(10)}
    assert poles
    for loc, order in poles:
        assert loc in lattice
        assert order == 1


def test_profile_by_name_unknown():
    with pytest.raises(ValueError):
        ml.profile_by_name("sombrero")
