"""Radial Mellin transforms, analytic continuation, and finite parts.

For an even dimension N and a radial profile h, the transform is
Z(s) = integral_0^inf r^{2s+N-1} h(r) dr.  It converges for
Re(2s+N) > 0 and continues meromorphically via iterated integration by
parts with prefactor (-1)^P / ((s'+1)...(s'+P)), s' = 2s+N-1; the poles
lie in {-(N+k)/2 : k >= 0} and are at most simple.  The finite part is
U_M = res_{s=-M} Z(s)/(s+M), read off a Laurent fit on a small circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import mpmath as mp

QUAD_TOL = 1e-10
CIRCLE_RADIUS = 1e-2
CIRCLE_POINTS = 16
QUAD_DPS = 15


@dataclass
class RadialProfile:
    """A smooth radial profile with closed-form derivatives.

    ``derivative(k)`` returns a callable evaluating h^{(k)}; ``support`` is
    either ("compact", R0) or ("decay", scale).
    """

    name: str
    family: str
    derivative: Callable[[int], Callable]
    support: tuple
    max_order: int = 64

    def __call__(self, r):
        return self.derivative(0)(r)


def _poly_eval(coeffs, r):
    acc = mp.mpf(0)
    for c in reversed(coeffs):
        acc = acc * r + c
    return acc


def bump_profile(power: int = 16) -> RadialProfile:
    """(1 - r^2)^power on [0, 1]; C^{power-1} at the boundary."""
    coeffs = [mp.mpf(0)] * (2 * power + 1)
    for j in range(power + 1):
        coeffs[2 * j] = mp.mpf((-1) ** j) * mp.binomial(power, j)
    derivs = {0: coeffs}

    def derivative(k: int):
        if k > power - 1:
            raise ValueError("derivative order exceeds smoothness")
        while len(derivs) <= k:
            m = len(derivs)
            prev = derivs[m - 1]
            derivs[m] = [prev[i + 1] * (i + 1) for i in range(len(prev) - 1)]
        cs = derivs[k]

        def f(r):
            if r >= 1:
                return mp.mpf(0)
            return _poly_eval(cs, r)

        return f

    return RadialProfile("bump", "bump", derivative, ("compact", 1.0),
                         max_order=power - 1)


def exponential_profile() -> RadialProfile:
    """e^{-r} on [0, inf)."""

    def derivative(k: int):
        sign = (-1) ** k

        def f(r):
            return sign * mp.e ** (-r)

        return f

    return RadialProfile("exponential", "exponential", derivative,
                         ("decay", 1.0))


def profile_by_name(name: str) -> RadialProfile:
    if name == "bump":
        return bump_profile()
    if name == "exponential":
        return exponential_profile()
    raise ValueError(f"unknown profile {name!r}")


def scaled_profile(h: RadialProfile, shift: int) -> RadialProfile:
    """The profile r^{2*shift} h(r) (radial multiplication by q^shift)."""
    base = h.derivative

    def derivative(k: int):
        # Leibniz: (r^{2m} h)^{(k)} = sum_j C(k,j) (r^{2m})^{(j)} h^{(k-j)}
        m = 2 * shift
        parts = []
        for j in range(min(k, m) + 1):
            c = math.comb(k, j) * math.perm(m, j)
            parts.append((c, m - j, base(k - j)))

        def f(r):
            return sum(c * (r ** e) * g(r) for c, e, g in parts)

        return f

    return RadialProfile(f"r^{2*shift}*{h.name}", h.family, derivative,
                         h.support, max_order=h.max_order)


@dataclass
class MellinValue:
    value: complex
    error: float
    method: str


def _quad(f, interval):
    with mp.workdps(QUAD_DPS):
        val, err = mp.quad(f, interval, error=True)
    return complex(val), float(abs(err))


def mellin_Z(h: RadialProfile, s: complex, n: int) -> MellinValue:
    """Z(s) by direct quadrature or by integration by parts."""
    if n % 2 != 0 or n < 2:
        raise ValueError("N must be an even integer >= 2")
    s = complex(s)
    sp = 2 * s + n - 1  # exponent s' in r^{s'}
    # keep the integrated exponent's real part >= 0.5 so the quadrature
    # never sees a near -1 endpoint singularity
    depth = max(0, int(math.ceil(0.5 - sp.real)))
    if depth > h.max_order:
        raise ValueError("profile not smooth enough for required depth")
    pref = complex(1.0)
    for k in range(1, depth + 1):
        den = sp + k
        if abs(den) < 1e-13:
            raise ValueError(f"s at an excluded point (s'+{k} = 0); "
                             "evaluate off the pole lattice")
        pref /= den
    pref *= (-1) ** depth
    g = h.derivative(depth)
    expo = sp + depth
    if h.support[0] == "compact":
        interval = [0, h.support[1]]
    else:
        interval = [0, mp.inf]

    def integrand(r):
        if r <= 0:
            return mp.mpf(0)
        return (mp.mpf(r) if isinstance(r, (int, float)) else r) ** expo * g(r)

    val, err = _quad(integrand, interval)
    method = "direct" if depth == 0 else f"ibp-{depth}"
    return MellinValue(pref * val, abs(pref) * err, method)


@dataclass
class FinitePart:
    value: complex
    pole_coefficient: complex
    m: int
    n: int
    fit_residual: float
    higher_order: float = 0.0


def _laurent_fit(h: RadialProfile, center: complex, n: int,
                 lowest: int = -2, highest: int = 3):
    """Least-squares Laurent coefficients of Z around ``center``."""
    import numpy as np

    zs = [CIRCLE_RADIUS * complex(math.cos(2 * math.pi * k / CIRCLE_POINTS),
                                  math.sin(2 * math.pi * k / CIRCLE_POINTS))
          for k in range(CIRCLE_POINTS)]
    vals = [mellin_Z(h, center + z, n).value for z in zs]
    powers = list(range(lowest, highest + 1))
    a = np.array([[z ** p for p in powers] for z in zs], dtype=complex)
    b = np.array(vals, dtype=complex)
    coef, *_ = np.linalg.lstsq(a, b, rcond=None)
    resid = float(np.max(np.abs(a @ coef - b)))
    return dict(zip(powers, coef)), resid


def finite_part(h: RadialProfile, m: int, n: int) -> FinitePart:
    """Laurent data of Z at s = -m: U_M is the constant term, the pole
    coefficient the residue of Z itself."""
    coeffs, resid = _laurent_fit(h, complex(-m), n)
    scale = max(1.0, max(abs(v) for v in coeffs.values()))
    return FinitePart(
        value=complex(coeffs[0]),
        pole_coefficient=complex(coeffs[-1]),
        m=m, n=n,
        fit_residual=resid,
        higher_order=float(abs(coeffs[-2]) / scale),
    )


def verify_qM_identity(h: RadialProfile, m: int, n: int) -> float:
    """|U_M(r^{2M} h) - Z(0, h)|: the finite part of q^M h at -M recovers
    the plain integral."""
    shifted = scaled_profile(h, m)
    fp = finite_part(shifted, m, n)
    z0 = mellin_Z(h, 0, n).value
    return abs(fp.value - z0)


def pole_scan(h: RadialProfile, n: int, window: tuple[float, float],
              include_midpoints: bool = True,
              threshold: float = 1e-6):
    """Scan the candidate lattice (and midpoints) for poles.

    Returns a list of (location, order) for detected singular points; order
    is 2 if the z^{-2} coefficient is significant (should never happen), 1
    for a simple pole.
    """
    lo, hi = window
    candidates: list[float] = []
    k = 0
    while True:
        s = -(n + k) / 2
        if s < lo - 1e-9:
            break
        if s <= hi + 1e-9:
            candidates.append(s)
        k += 1
    if include_midpoints:
        mids = [c + 0.25 for c in candidates if lo <= c + 0.25 <= hi]
    else:
        mids = []
    out = []
    for c in sorted(set(candidates + mids)):
        coeffs, _ = _laurent_fit(h, complex(c), n)
        scale = max(1.0, max(abs(v) for v in coeffs.values()))
        order = 0
        if abs(coeffs[-2]) / scale > threshold:
            order = 2
        elif abs(coeffs[-1]) / scale > threshold:
            order = 1
        if order:
            out.append((c, order))
    return out
