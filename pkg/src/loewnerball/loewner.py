"""
Loewner ODE for points and for Taylor coefficients.

Points follow ``dw/dt = G(w, t)``. For coefficients write
``phi_{s,t}(z) = e^{s-t} z + A(z, t)`` where ``A`` collects the terms of
degree >= 2. With ``G(w) = -w + Q(w)`` this gives::

    dA/dt = -A + Q(e^{s-t} z + A)        (truncated at degree N)

The degree-``d`` part of the right-hand side only involves parts of ``A`` of
degree below ``d``, so the joint RK4 step preserves the triangular structure.
The linear part ``e^{s-t}`` is kept in closed form.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, InstabilityError, ParameterError
from .herglotz import FieldPiece, HerglotzField, SampleGrid
from .powerseries import ComposePlan, MultiIndex, PolyMap2, basis

DEFAULT_STEP = 1e-3
DEFAULT_HORIZON = 20.0
DEFAULT_CONV_TOL = 1e-6
NORM_SLACK = 1e-12


def _legs(G: HerglotzField, s: float, t: float):
    """Split ``[s, t]`` at the field's breakpoints: yields ``(a, b, piece)``."""
    cuts = [s] + [b for b in G.breakpoints if s < b < t] + [t]
    for a, b in zip(cuts[:-1], cuts[1:]):
        yield a, b, G.piece_at(a)


def _rk4_leg(f, y, a: float, b: float, step: float, check=None):
    n = max(1, math.ceil((b - a) / step - 1e-9))
    h = (b - a) / n
    t = a
    for _ in range(n):
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
        if check is not None:
            check(t, y)
    return y


def _piece_rhs(piece: FieldPiece):
    def f(_t, w):
        g1, g2 = piece(w[..., 0], w[..., 1])
        return np.stack([g1, g2], axis=-1)
    return f


def _norm_guard(t, w):
    nrm = np.linalg.norm(w, axis=-1)
    if np.any(nrm > 1 + NORM_SLACK):
        raise InstabilityError(
            f"trajectory left the unit ball at t={t:.6g} (|w| = {float(nrm.max()):.6g}); "
            "step too large or field not in -M")


def integrate_point(G: HerglotzField, z, s: float, t: float, step: float = DEFAULT_STEP) -> np.ndarray:
    """Fixed-step RK4 solution of ``dw/dtau = G(w, tau)``, ``w(s) = z``, at ``tau = t``.

    ``z`` may be a single point of shape ``(2,)`` or a batch ``(n, 2)``.
    """
    z = np.array(z, dtype=complex)
    if step <= 0:
        raise ParameterError("step must be positive")
    if t < s:
        raise ParameterError("need s <= t")
    if np.any(np.linalg.norm(z, axis=-1) >= 1):
        raise ParameterError("starting point must lie in the open unit ball")
    w = z
    for a, b, piece in _legs(G, s, t):
        w = _rk4_leg(_piece_rhs(piece), w, a, b, step, _norm_guard)
    return w


def trajectory(G: HerglotzField, z, s: float, t: float, step: float = DEFAULT_STEP):
    """Every RK4 node of :func:`integrate_point`: returns ``(times, states)``."""
    z = np.array(z, dtype=complex)
    times, states = [s], [z]

    def record(tau, w):
        _norm_guard(tau, w)
        times.append(tau)
        states.append(w)

    for a, b, piece in _legs(G, s, t):
        _rk4_leg(_piece_rhs(piece), states[-1], a, b, step, record)
    return np.array(times), np.array(states)


# --- coefficient evolution --------------------------------------------------

@dataclass
class EvolutionRecord:
    """Coefficients ``a^j_alpha(s, t)`` of ``phi_{s,t}`` on a time grid.

    ``coeffs[i]`` is the ``(2, size)`` coefficient array at ``time_grid[i]``
    including the linear part ``e^{s-t} id``; ``rescaled[i]`` is
    ``e^{t-s} coeffs[i]``.
    """

    s: float
    degree: int
    time_grid: np.ndarray
    coeffs: np.ndarray
    rescaled: np.ndarray = field(init=False)

    def __post_init__(self):
        self.rescaled = self.coeffs * np.exp(self.time_grid - self.s)[:, None, None]

    def coeffs_at(self, i: int) -> PolyMap2:
        return PolyMap2.from_arrays(self.degree, self.coeffs[i])

    def rescaled_at(self, i: int) -> PolyMap2:
        return PolyMap2.from_arrays(self.degree, self.rescaled[i])

    def series(self, j: int, alpha) -> np.ndarray:
        """``a^j_alpha(s, t)`` along the grid."""
        return self.coeffs[:, j - 1, basis(self.degree).index[MultiIndex(*alpha)]]

    def to_csv(self, fh=None) -> str | None:
        """Columns ``t, j, alpha1, alpha2, re_a, im_a, re_scaled, im_scaled``."""
        out = fh if fh is not None else io.StringIO()
        w = csv.writer(out, lineterminator="\r\n")
        w.writerow(["t", "j", "alpha1", "alpha2", "re_a", "im_a", "re_scaled", "im_scaled"])
        alphas = basis(self.degree).alphas
        for i, t in enumerate(self.time_grid):
            for j in (0, 1):
                for k, alpha in enumerate(alphas):
                    a, r = complex(self.coeffs[i, j, k]), complex(self.rescaled[i, j, k])
                    w.writerow([repr(float(t)), j + 1, alpha.a1, alpha.a2,
                                repr(a.real), repr(a.imag), repr(r.real), repr(r.imag)])
        return out.getvalue() if fh is None else None


class _CoefficientRHS:
    """``dA/dt = -A + Q(e^{s-t} z + A)`` for one autonomous piece."""

    def __init__(self, piece: FieldPiece, degree: int, s: float):
        self.b = basis(degree)
        q = piece.series.truncate(degree).array.copy()
        q[:, self.b.deg <= 1] = 0  # linear part handled separately
        self.plan = ComposePlan(self.b, q)
        self.s = s
        self.e1 = np.zeros(self.b.size, dtype=complex)
        self.e2 = np.zeros(self.b.size, dtype=complex)
        if degree >= 1:
            self.e1[self.b.index[MultiIndex(1, 0)]] = 1
            self.e2[self.b.index[MultiIndex(0, 1)]] = 1

    def __call__(self, t, A):
        lam = math.exp(self.s - t)
        phi1 = lam * self.e1 + A[0]
        phi2 = lam * self.e2 + A[1]
        return self.plan(phi1, phi2) - A


def coeff_evolution(G: HerglotzField, N: int, s: float, T: float, step: float = DEFAULT_STEP,
                    time_grid=None) -> EvolutionRecord:
    """Solve for every ``a^j_alpha(s, t)``, ``|alpha| <= N``, by RK4 with fixed step.

    ``time_grid`` lists the record times (default: 201 equally spaced nodes
    from ``s`` to ``T``); integration legs are also cut at field breakpoints.
    """
    if step <= 0:
        raise ParameterError("step must be positive")
    if T <= s:
        raise ParameterError("need T > s")
    if N > G.truncation_degree:
        raise ParameterError(f"degree {N} exceeds field truncation degree {G.truncation_degree}")
    grid = np.linspace(s, T, 201) if time_grid is None else np.asarray(time_grid, dtype=float)
    if grid[0] != s or np.any(np.diff(grid) <= 0):
        raise ParameterError("time grid must start at s and increase")
    b = basis(N)
    A = np.zeros((2, b.size), dtype=complex)
    cache: dict[int, _CoefficientRHS] = {}
    lin = np.zeros((2, b.size), dtype=complex)
    if N >= 1:
        lin[0, b.index[MultiIndex(1, 0)]] = 1
        lin[1, b.index[MultiIndex(0, 1)]] = 1
    out = [A + lin]
    for a, c in zip(grid[:-1], grid[1:]):
        for lo, hi, piece in _legs(G, a, c):
            rhs = cache.get(id(piece))
            if rhs is None:
                rhs = cache[id(piece)] = _CoefficientRHS(piece, N, s)
            A = _rk4_leg(rhs, A, lo, hi, step)
        out.append(A + math.exp(s - c) * lin)
    return EvolutionRecord(s, N, grid, np.array(out))


@dataclass(frozen=True)
class ParametricResult:
    """Coefficients ``b^j_alpha = e^T a^j_alpha(0, T)`` with convergence diagnostics."""

    map: PolyMap2
    T: float
    cauchy_difference: float
    tail_estimate: float
    worst: tuple[int, MultiIndex] | None


def parametric_map_report(G: HerglotzField, N: int | None = None, T: float = DEFAULT_HORIZON,
                          step: float = DEFAULT_STEP, conv_tol: float = DEFAULT_CONV_TOL) -> ParametricResult:
    """:func:`parametric_map` plus the numbers behind its convergence verdict.

    The rescaled coefficients approach their limit like ``e^{-t}`` once the
    field is autonomous, so ``|b(T) - b(T/2)| / (e^{T/2} - 1)`` estimates the
    remaining distance to the limit; that estimate must not exceed ``conv_tol``.
    """
    N = G.truncation_degree if N is None else N
    rec = coeff_evolution(G, N, 0.0, T, step, time_grid=[0.0, T / 2, T])
    diff = np.abs(rec.rescaled[2] - rec.rescaled[1])
    k = np.unravel_index(int(np.argmax(diff)), diff.shape)
    cauchy = float(diff[k])
    tail = cauchy / math.expm1(T / 2)
    worst = (int(k[0]) + 1, basis(N).alphas[int(k[1])])
    result = ParametricResult(rec.rescaled_at(2), T, cauchy, tail, worst)
    if not tail <= conv_tol:
        raise ConvergenceError(
            f"horizon T={T} too short: coefficient {worst[0]}:{tuple(worst[1])} "
            f"still moves by {tail:.3e} (> {conv_tol:.1e})", worst=worst)
    return result


def parametric_map(G: HerglotzField, N: int | None = None, T: float = DEFAULT_HORIZON,
                   step: float = DEFAULT_STEP, conv_tol: float = DEFAULT_CONV_TOL) -> PolyMap2:
    """Taylor coefficients of ``f = lim e^t phi_{0,t}``, the element of S^0 generated by ``G``."""
    return parametric_map_report(G, N, T, step, conv_tol).map


# --- exponential squeezing ---------------------------------------------------

@dataclass
class SqueezeReport:
    margin: float | None = None
    ratio_violations: list = field(default_factory=list)

    def squeezing(self, a: float) -> bool:
        return self.margin is not None and self.margin <= -a and not self.ratio_violations


def squeezing_margin(G: HerglotzField, samples: SampleGrid | np.ndarray | None = None) -> SqueezeReport:
    """Largest sampled value of ``Re <G(z,t), z> / |z|^2`` over all pieces.

    ``z = 0`` is skipped: it is a fixed point of every normalized field.
    """
    pts = (SampleGrid() if samples is None else samples)
    pts = pts.points() if isinstance(pts, SampleGrid) else np.asarray(pts, dtype=complex)
    n2 = (pts[:, 0] * np.conj(pts[:, 0])).real + (pts[:, 1] * np.conj(pts[:, 1])).real
    pts = pts[n2 > 0]
    n2 = n2[n2 > 0]
    margin = -np.inf
    for piece in G.pieces:
        for start in range(0, len(pts), 16384):
            z = pts[start:start + 16384]
            g1, g2 = piece(z[:, 0], z[:, 1])
            val = (g1 * np.conj(z[:, 0])).real + (g2 * np.conj(z[:, 1])).real
            margin = max(margin, float(np.max(val / n2[start:start + 16384])))
    return SqueezeReport(margin=margin)


def squeezing_equiv_check(G: HerglotzField, a: float, s: float, t: float, samples,
                          step: float = DEFAULT_STEP, slack: float = 1e-9) -> SqueezeReport:
    """Check ``|phi_{s,t}(z)| <= e^{a(s-t)} |z|`` at every sample point.

    ``phi_{s,t} = f_t^{-1} o f_s`` is obtained by flowing the points, so no
    map is ever inverted.
    """
    if not s < t:
        raise ParameterError("need s < t")
    pts = samples.points() if isinstance(samples, SampleGrid) else np.atleast_2d(np.asarray(samples, dtype=complex))
    w = integrate_point(G, pts, s, t, step)
    lhs = np.linalg.norm(w, axis=-1)
    rhs = math.exp(a * (s - t)) * np.linalg.norm(pts, axis=-1) + slack
    bad = np.flatnonzero(lhs > rhs)
    return SqueezeReport(ratio_violations=[(s, t, pts[i]) for i in bad])
