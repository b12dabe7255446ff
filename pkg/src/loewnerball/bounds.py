"""
Sharp coefficient bounds for -M and S^0, their extremal fields, and the
shear radius.

For the pure term ``q z2^m`` in the first component, membership reduces to
``-x^2 - y^2 + |q| x y^m <= 0`` on the closed quarter disc. The left side is
homogeneous of mixed degree (2 and m+1 > 2), so the binding constraint sits
on the arc ``x = cos s, y = sin s``, and the largest admissible ``|q|`` is
``min_s 1 / (cos s sin^m s)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ParameterError
from .herglotz import HerglotzField, koebe_field, linear_field, pure_power_field
from .loewner import DEFAULT_HORIZON, DEFAULT_STEP, coeff_evolution
from .powerseries import DEFAULT_DEGREE


def sharp_q0m_bound(m: int) -> float:
    """``u_m = (1+m)^((m+1)/2) / m^(m/2)``, the sharp bound on ``|q^1_{0,m}|`` in -M."""
    if m < 2:
        raise ParameterError(f"need m >= 2, got {m}")
    return (1 + m) ** ((m + 1) / 2) / m ** (m / 2)


def bound_qm0() -> float:
    """Sharp bound 2 on ``|q^1_{m,0}|`` for every m; attained by the Koebe field."""
    return 2.0


@dataclass(frozen=True)
class BoundResult:
    m: int
    closed_form: float
    numeric: float
    optimizer_point: tuple[float, float]

    @property
    def abs_err(self) -> float:
        return abs(self.numeric - self.closed_form)

    def to_record(self) -> dict:
        return {"m": self.m, "closed_form": self.closed_form, "numeric": self.numeric,
                "x_opt": self.optimizer_point[0], "y_opt": self.optimizer_point[1],
                "abs_err": self.abs_err}


def _arc_grid(resolution: int) -> np.ndarray:
    # interior nodes only; doubling the resolution refines the same grid
    return np.arange(1, resolution) * (np.pi / 2 / resolution)


def verify_q0m_numeric(m: int, grid_resolution: int = 10_000) -> BoundResult:
    """Grid search for the largest admissible ``|q^1_{0,m}|``, then a Lagrange refinement.

    ``numeric`` is the grid minimum of ``1 / (cos s sin^m s)``. The optimizer
    is polished by solving the Lagrange stationarity condition
    ``m cot s = tan s`` inside the bracket around the best grid node.
    """
    if m < 2:
        raise ParameterError(f"need m >= 2, got {m}")
    if grid_resolution < 100:
        raise ParameterError("grid_resolution must be at least 100")
    s = _arc_grid(grid_resolution)
    vals = 1.0 / (np.cos(s) * np.sin(s) ** m)
    k = int(np.argmin(vals))
    lo = s[max(k - 1, 0)]
    hi = s[min(k + 1, len(s) - 1)]
    s_star = brentq(lambda x: m * math.cos(x) ** 2 - math.sin(x) ** 2, lo, hi, xtol=1e-15, rtol=1e-15)
    return BoundResult(m, sharp_q0m_bound(m), float(vals[k]), (math.cos(s_star), math.sin(s_star)))


def extremal_field(kind: str, m: int | None = None, degree: int = DEFAULT_DEGREE) -> HerglotzField:
    """``"koebe"``: ``(-z1 (1+z1)/(1-z1), -z2)``; ``"pure_z2m"``: ``(-z1 + u_m z2^m, -z2)``."""
    if kind == "koebe":
        return koebe_field(degree)
    if kind == "pure_z2m":
        if m is None or m < 2:
            raise ParameterError("pure_z2m needs m >= 2")
        return pure_power_field(m, sharp_q0m_bound(m), degree)
    raise ParameterError(f"unknown extremal field kind {kind!r}")


def field_dictionary(degree: int = DEFAULT_DEGREE) -> list[HerglotzField]:
    """Linear, Koebe and the pure_z2m extremals for m = 2, 3: generators for sampling -M."""
    return [linear_field(degree), extremal_field("koebe", degree=degree),
            extremal_field("pure_z2m", 2, degree), extremal_field("pure_z2m", 3, degree)]


def shear_radius(a: complex) -> float:
    """``r(f)`` for the shear ``f(z) = (z1 + a z2^2, z2)``.

    ``f^t(z) = f(t z) / t = (z1 + a t z2^2, z2)`` lies in S^0 exactly when
    ``|a t| <= 3 sqrt(3) / 2``.
    """
    if a == 0:
        raise ParameterError("the identity has infinite shear radius")
    return sharp_q0m_bound(2) / abs(a)


def check_b02_extremal(step: float = DEFAULT_STEP, T: float = DEFAULT_HORIZON, scale: float = 1.0) -> float:
    """``e^T a^1_{0,2}(0, T)`` for the field ``(-z1 + scale * u_2 z2^2, -z2)``."""
    G = pure_power_field(2, scale * sharp_q0m_bound(2), degree=2) if scale else linear_field(2)
    rec = coeff_evolution(G, 2, 0.0, T, step, time_grid=[0.0, T])
    return float(rec.rescaled_at(1).comp1[0, 2].real)


def probe_pure_coefficients(f, m_max: int) -> dict[str, list[complex]]:
    """Raw ``b^1_{m,0}`` and ``b^1_{0,m}`` for m = 2..m_max of a map; no sharpness claimed."""
    return {"b_m0": [f.comp1[m, 0] for m in range(2, m_max + 1)],
            "b_0m": [f.comp1[0, m] for m in range(2, m_max + 1)]}


def bound_table(ms, grid_resolution: int = 10_000) -> list[dict]:
    return [verify_q0m_numeric(m, grid_resolution).to_record() for m in ms]

