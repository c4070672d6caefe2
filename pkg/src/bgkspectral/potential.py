"""Even polynomial confinement potentials and their normalization.

A potential is stored through its even-power coefficients (c_0, ..., c_m) for
phi(x) = sum_i c_i x^(2i).  Normalization rescales and shifts the potential so
that the weight rho = exp(-phi) has unit mass and unit mean curvature,
<1> = <phi''> = 1, which also centers the weight (phi is even).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import InvalidPotentialError
from .weddle import integrate_adaptive


def _full_coeffs(even_coeffs) -> np.ndarray:
    full = np.zeros(2 * len(even_coeffs) - 1)
    full[::2] = even_coeffs
    return full


def _validate_even_coeffs(coeffs) -> tuple[float, ...]:
    coeffs = tuple(float(c) for c in coeffs)
    if len(coeffs) < 2:
        raise InvalidPotentialError("potential must have degree >= 2")
    if coeffs[-1] <= 0.0:
        raise InvalidPotentialError(
            f"leading coefficient must be positive, got {coeffs[-1]}"
        )
    return coeffs


@dataclass(frozen=True)
class RawPotential:
    """Even polynomial potential as supplied by the user, before normalization."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _validate_even_coeffs(self.coeffs))

    @property
    def degree(self) -> int:
        return 2 * (len(self.coeffs) - 1)

    def __call__(self, x):
        return npoly.polyval(x, _full_coeffs(self.coeffs))

    def deriv(self, x):
        return npoly.polyval(x, npoly.polyder(_full_coeffs(self.coeffs)))

    def deriv2(self, x):
        return npoly.polyval(x, npoly.polyder(_full_coeffs(self.coeffs), 2))


@dataclass(frozen=True)
class NormalizedPotential:
    """Normalized potential with the scale and shift that produced it.

    `scale` and `log_shift` record the substitution phi(scale * x) + log_shift,
    so callers can map back to the original coordinates.
    """

    coeffs: tuple[float, ...]
    scale: float
    log_shift: float
    harmonic: bool

    @property
    def degree(self) -> int:
        return 2 * (len(self.coeffs) - 1)

    def __call__(self, x):
        return npoly.polyval(x, _full_coeffs(self.coeffs))

    def deriv(self, x):
        return npoly.polyval(x, npoly.polyder(_full_coeffs(self.coeffs)))

    def deriv2(self, x):
        return npoly.polyval(x, npoly.polyder(_full_coeffs(self.coeffs), 2))

    def deriv3(self, x):
        return npoly.polyval(x, npoly.polyder(_full_coeffs(self.coeffs), 3))


def tail_cutoff(pot, poly_degree: int = 0, threshold: float = 80.0) -> float:
    """Radius L beyond which |x|^poly_degree * exp(-pot(x)) is negligible.

    The bound is taken relative to the minimum of the potential, so an
    arbitrary constant offset in the coefficients does not shrink the
    integration window.
    """
    hi = 8.0
    while pot.deriv(hi) <= 0.0 or pot(hi) <= pot(0.0):
        hi *= 2.0
        if hi > 1e8:
            raise InvalidPotentialError("potential does not grow at infinity")
    floor = float(np.min(pot(np.linspace(0.0, hi, 2049))))

    L = 0.5
    while True:
        margin = pot(L) - floor - poly_degree * math.log(max(L, math.e))
        growing = pot.deriv(L) - poly_degree / L > 0.0
        if margin >= threshold and growing:
            return L
        L *= 1.0625
        if L > 1e9:
            raise InvalidPotentialError("failed to locate an integration cutoff")


def normalize_potential(raw: RawPotential, quad_tol: float = 1e-12) -> NormalizedPotential:
    """Rescale and shift `raw` so that <1> = <phi''> = 1 under rho = exp(-phi).

    The scale c and gamma follow the closed formulas
    c = sqrt(I0 * I2), gamma = sqrt(I0 / I2) with I0 = integral of exp(-phi)
    and I2 = integral of phi'' exp(-phi); both are evaluated by adaptive
    composite quadrature on a truncated interval.
    """
    if not isinstance(raw, RawPotential):
        raw = RawPotential(tuple(raw))

    L0 = tail_cutoff(raw, poly_degree=0)
    L2 = tail_cutoff(raw, poly_degree=raw.degree - 2)
    i0 = integrate_adaptive(lambda x: np.exp(-raw(x)), -L0, L0, rel_tol=quad_tol)
    i2 = integrate_adaptive(lambda x: raw.deriv2(x) * np.exp(-raw(x)),
                            -L2, L2, rel_tol=quad_tol)
    if i0 <= 0.0 or i2 <= 0.0:
        raise InvalidPotentialError(
            f"normalization integrals must be positive, got {i0}, {i2}"
        )

    c = math.sqrt(i0 * i2)
    gamma = math.sqrt(i0 / i2)
    coeffs = [g * gamma ** (2 * i) for i, g in enumerate(raw.coeffs)]
    coeffs[0] += math.log(c)
    pot = NormalizedPotential(
        coeffs=tuple(coeffs),
        scale=gamma,
        log_shift=math.log(c),
        harmonic=(raw.degree == 2),
    )

    check_tol = max(100.0 * quad_tol, 1e-11)
    L = tail_cutoff(pot, poly_degree=pot.degree - 2)
    r0 = integrate_adaptive(lambda x: np.exp(-pot(x)), -L, L, rel_tol=quad_tol)
    r2 = integrate_adaptive(lambda x: pot.deriv2(x) * np.exp(-pot(x)),
                            -L, L, rel_tol=quad_tol)
    if abs(r0 - 1.0) > check_tol or abs(r2 - 1.0) > check_tol:
        raise InvalidPotentialError(
            f"normalization residuals too large: <1>-1={r0 - 1.0:.3e}, "
            f"<phi''>-1={r2 - 1.0:.3e}"
        )
    return pot
