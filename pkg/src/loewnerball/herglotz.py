"""
Herglotz vector fields of class -M, harmonic decoupling and slice reduction.

A field is a finite list of time pieces ``[t_start, next t_start)``; on each
piece it is autonomous and normalized as ``G(z) = -z + O(|z|^2)``. The
coefficients ``q^j_a`` live in a :class:`~loewnerball.powerseries.PolyMap2`.

Rational fields such as the Koebe generator are not polynomials, and their
truncations leave the class near the boundary of the ball. A piece may
therefore carry :class:`Tail` objects, closed-form remainders beyond the
truncation degree. Pointwise evaluation (membership sampling, the Loewner
ODE for points) includes the tails; coefficient work only sees the series.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import toeplitz

from .errors import NormalizationError, ParameterError, WeightError
from .powerseries import MultiIndex, PolyMap2, basis, rotate

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class Tail:
    """Closed-form remainder ``sum_{n>=0} c_n z^(base + n*step)`` in one component.

    ``func(z1, z2)`` returns the remainder's value; the monomial family is
    recorded so that decoupling can decide whether to keep or drop it.
    """

    component: int
    base: MultiIndex
    step: MultiIndex
    func: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def __call__(self, z1, z2):
        return self.func(z1, z2)

    def scaled(self, w: complex) -> Tail:
        f = self.func
        return Tail(self.component, self.base, self.step, lambda z1, z2: w * f(z1, z2))

    def rotated(self, theta1: float, theta2: float) -> Tail:
        f = self.func
        back = np.exp(-1j * (theta1 if self.component == 1 else theta2))
        u1, u2 = np.exp(1j * theta1), np.exp(1j * theta2)
        return Tail(self.component, self.base, self.step, lambda z1, z2: back * f(u1 * z1, u2 * z2))

    def resonance(self, k1: int, k2: int) -> str:
        """'all', 'none' or 'mixed': which family members survive the (k1, k2) filter."""
        f0 = _frequency(self.component, self.base, k1, k2)
        fs = self.step.a1 * k1 + self.step.a2 * k2
        if fs == 0:
            return "all" if f0 == 0 else "none"
        n, r = divmod(-f0, fs)
        return "mixed" if r == 0 and n >= 0 else "none"


def _frequency(j: int, alpha, k1: int, k2: int):
    a1, a2 = alpha
    return (a1 - 1) * k1 + a2 * k2 if j == 1 else a1 * k1 + (a2 - 1) * k2


@dataclass(frozen=True)
class FieldPiece:
    t_start: float
    series: PolyMap2
    tails: tuple[Tail, ...] = ()

    def __call__(self, z1, z2):
        z1 = np.asarray(z1, dtype=complex)
        z2 = np.asarray(z2, dtype=complex)
        mono = basis(self.series.truncation_degree).powers(z1, z2)
        g = mono @ self.series.array.T
        g1, g2 = g[..., 0], g[..., 1]
        for tail in self.tails:
            if tail.component == 1:
                g1 = g1 + tail(z1, z2)
            else:
                g2 = g2 + tail(z1, z2)
        return g1, g2


@dataclass(frozen=True)
class HerglotzField:
    """Normalized, piecewise-autonomous field; build it with :func:`make_field`."""

    pieces: tuple[FieldPiece, ...]

    @property
    def truncation_degree(self) -> int:
        return self.pieces[0].series.truncation_degree

    @property
    def is_autonomous(self) -> bool:
        return len(self.pieces) == 1

    @property
    def breakpoints(self) -> list[float]:
        return [p.t_start for p in self.pieces]

    def piece_at(self, t: float) -> FieldPiece:
        i = int(np.searchsorted(self.breakpoints, t, side="right")) - 1
        return self.pieces[max(i, 0)]

    @property
    def series(self) -> PolyMap2:
        """Coefficients of the first piece (the whole field if autonomous)."""
        return self.pieces[0].series

    def __call__(self, z, t: float = 0.0) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        g1, g2 = self.piece_at(t)(z[..., 0], z[..., 1])
        return np.stack([g1, g2], axis=-1)

    def shifted(self, t0: float) -> HerglotzField:
        """The field ``G(., t + t0)``."""
        if t0 < 0:
            raise ParameterError("shift must be nonnegative")
        keep = [p for p in self.pieces[1:] if p.t_start > t0]
        first = self.piece_at(t0)
        pieces = [FieldPiece(0.0, first.series, first.tails)]
        pieces += [FieldPiece(p.t_start - t0, p.series, p.tails) for p in keep]
        return HerglotzField(tuple(pieces))


def _check_normalization(series: PolyMap2, where: str) -> None:
    expected = {(1, (0, 0)): 0, (1, (1, 0)): -1, (1, (0, 1)): 0,
                (2, (0, 0)): 0, (2, (1, 0)): 0, (2, (0, 1)): -1}
    for (j, alpha), want in expected.items():
        got = series.component(j)[alpha]
        if abs(got - want) > NORMALIZATION_TOL:
            raise NormalizationError(
                f"{where}: component {j} coefficient of z^{alpha} is {got}, expected {want}")


def make_field(pieces) -> HerglotzField:
    """Validate normalization and assemble a field.

    ``pieces`` is a single :class:`PolyMap2` or :class:`FieldPiece` (an
    autonomous field) or a sequence of ``FieldPiece`` / ``(t_start, PolyMap2)``.
    Membership in the class is not checked here; see :func:`membership_test`.
    """
    if isinstance(pieces, (PolyMap2, FieldPiece)):
        pieces = [pieces]
    built = []
    for p in pieces:
        if isinstance(p, PolyMap2):
            p = FieldPiece(0.0, p)
        elif not isinstance(p, FieldPiece):
            t, series = p
            p = FieldPiece(float(t), series)
        built.append(p)
    if not built:
        raise ParameterError("a field needs at least one piece")
    if built[0].t_start != 0:
        raise ParameterError(f"first piece must start at t=0, got {built[0].t_start}")
    degree = built[0].series.truncation_degree
    for i, p in enumerate(built):
        if i and p.t_start <= built[i - 1].t_start:
            raise ParameterError("piece start times must be strictly increasing")
        if p.series.truncation_degree != degree:
            raise ParameterError("all pieces must share one truncation degree")
        _check_normalization(p.series, f"piece {i} (t_start={p.t_start})")
    return HerglotzField(tuple(built))


def linear_field(degree: int = 8) -> HerglotzField:
    return make_field(PolyMap2.from_terms(degree, linear=-1.0))


# --- membership in -M -------------------------------------------------------

@dataclass(frozen=True)
class MembershipVerdict:
    passed: bool
    worst_value: float
    witness: np.ndarray | None = None
    piece: int | None = None


@dataclass(frozen=True)
class SampleGrid:
    """Product grid ``z = r (cos th e^{i p1}, sin th e^{i p2})``."""

    radial: int = 20
    angular: int = 16
    phases: int = 24
    r_min: float = 0.05
    r_max: float = 0.99

    def points(self) -> np.ndarray:
        r = np.linspace(self.r_min, self.r_max, self.radial)
        th = np.linspace(0.0, np.pi / 2, self.angular)
        ph = np.arange(self.phases) * (2 * np.pi / self.phases)
        R, TH, P1, P2 = np.meshgrid(r, th, ph, ph, indexing="ij")
        z1 = R * np.cos(TH) * np.exp(1j * P1)
        z2 = R * np.sin(TH) * np.exp(1j * P2)
        return np.stack([z1.ravel(), z2.ravel()], axis=-1)


DEFAULT_GRID = SampleGrid()


def defining_function(G: HerglotzField, z, t: float = 0.0) -> np.ndarray:
    """``Re <G(z,t), z>``; nonpositive on the ball for members of -M."""
    z = np.asarray(z, dtype=complex)
    g = G(z, t)
    return (g[..., 0] * np.conj(z[..., 0]) + g[..., 1] * np.conj(z[..., 1])).real


def _grid_max(G, fn, grid: SampleGrid, chunk: int = 16384):
    pts = grid.points()
    best, where, piece = -np.inf, None, None
    for i, p in enumerate(G.pieces):
        for start in range(0, len(pts), chunk):
            z = pts[start:start + chunk]
            vals = fn(p, z)
            k = int(np.argmax(vals))
            if vals[k] > best:
                best, where, piece = float(vals[k]), z[k].copy(), i
    return best, where, piece


def _piece_defining(p: FieldPiece, z):
    g1, g2 = p(z[:, 0], z[:, 1])
    return (g1 * np.conj(z[:, 0]) + g2 * np.conj(z[:, 1])).real


def membership_test(G: HerglotzField, radial_samples: int = 20, angular_samples: int = 16,
                    tol: float = 1e-12, phase_samples: int = 24, r_max: float = 0.99) -> MembershipVerdict:
    """Sample ``Re <G(z), z>`` on a product grid of the ball, for every piece.

    A pass is evidence only; a failure comes with a witness point and is
    conclusive.
    """
    if min(radial_samples, angular_samples, phase_samples) < 1:
        raise ParameterError("sample counts must be positive")
    if not 0 < r_max < 1:
        raise ParameterError(f"r_max must lie in (0, 1), got {r_max}")
    grid = SampleGrid(radial_samples, angular_samples, phase_samples, r_max=r_max)
    worst, witness, piece = _grid_max(G, _piece_defining, grid)
    return MembershipVerdict(worst <= tol, worst, witness, piece)


# --- harmonic decoupling ----------------------------------------------------

def resonance_mask(degree: int, k1: int, k2: int) -> np.ndarray:
    """Boolean ``(2, size)`` mask of the monomials kept by the (k1, k2) filter."""
    b = basis(degree)
    keep1 = (b.a1 - 1) * k1 + b.a2 * k2 == 0
    keep2 = b.a1 * k1 + (b.a2 - 1) * k2 == 0
    return np.stack([keep1, keep2])


def decouple(G: HerglotzField, k1: int, k2: int) -> HerglotzField:
    """Keep only the terms invariant under ``z -> (e^{i k1 s} z1, e^{i k2 s} z2)``.

    Averaging the rotated field over ``s`` kills every other monomial, so the
    average is this term filter; the linear part always survives.
    """
    if k1 == 0 and k2 == 0:
        raise ParameterError("(k1, k2) must not be (0, 0)")
    pieces = []
    for p in G.pieces:
        mask = resonance_mask(p.series.truncation_degree, k1, k2)
        series = PolyMap2.from_arrays(p.series.truncation_degree, np.where(mask, p.series.array, 0))
        tails = []
        for tail in p.tails:
            kind = tail.resonance(k1, k2)
            if kind == "all":
                tails.append(tail)
            elif kind == "mixed":
                raise ParameterError(
                    f"closed-form remainder {tail.base}+n*{tail.step} is only partly resonant for {(k1, k2)}")
        pieces.append(FieldPiece(p.t_start, series, tuple(tails)))
    return HerglotzField(tuple(pieces))


def rotate_field(G: HerglotzField, theta1: float, theta2: float) -> HerglotzField:
    """``U* G(U z, t)`` for ``U = diag(e^{i theta1}, e^{i theta2})``; stays in -M."""
    return HerglotzField(tuple(
        FieldPiece(p.t_start, rotate(p.series, theta1, theta2),
                   tuple(t.rotated(theta1, theta2) for t in p.tails))
        for p in G.pieces))


def convex_combination(fields: Sequence[HerglotzField], weights: Sequence[float]) -> HerglotzField:
    """Pointwise weighted sum; piece grids are merged."""
    times = sorted({t for G in fields for t in G.breakpoints})
    pieces = []
    for t in times:
        parts = [G.piece_at(t) for G in fields]
        arr = sum(w * p.series.array for w, p in zip(weights, parts))
        tails = tuple(tail.scaled(w) for w, p in zip(weights, parts) if w for tail in p.tails)
        pieces.append(FieldPiece(t, PolyMap2.from_arrays(parts[0].series.truncation_degree, arr), tails))
    return make_field(pieces)


def random_member(dictionary: Sequence[HerglotzField], weights: Sequence[float],
                  rotations: Sequence[tuple[float, float]] | None = None) -> HerglotzField:
    """``sum_i w_i U_i* G_i(U_i z)``; in -M whenever every dictionary entry is."""
    if not dictionary:
        raise WeightError("dictionary must not be empty")
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(dictionary),):
        raise WeightError(f"need {len(dictionary)} weights, got {w.shape}")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise WeightError(f"weights must be nonnegative and sum to 1, got {w.tolist()}")
    rotations = rotations if rotations is not None else [(0.0, 0.0)] * len(dictionary)
    if len(rotations) != len(dictionary):
        raise WeightError("need one rotation per dictionary entry")
    rotated = [G if (a == 0 and b == 0) else rotate_field(G, a, b) for G, (a, b) in zip(dictionary, rotations)]
    if len(rotated) == 1:
        return rotated[0]
    return convex_combination(rotated, w)


def sample_member(rng: np.random.Generator, dictionary: Sequence[HerglotzField]) -> HerglotzField:
    """Random Dirichlet weights and random diagonal rotations."""
    w = rng.dirichlet(np.ones(len(dictionary)))
    w = w / w.sum()
    rot = [tuple(rng.uniform(0, 2 * np.pi, 2)) for _ in dictionary]
    return random_member(dictionary, w, rot)


# --- slice reduction and the Caratheodory class ----------------------------

@dataclass(frozen=True)
class SliceFunction:
    """``p(zeta) = 1 + sum_{m=1}^{M} c_m zeta^m``."""

    c: np.ndarray

    @property
    def order(self) -> int:
        return len(self.c)

    def __call__(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        return 1 + sum(cm * zeta ** (m + 1) for m, cm in enumerate(self.c))


def slice(G: HerglotzField, v, order: int, t: float = 0.0) -> SliceFunction:  # noqa: A001
    """Restrict ``G`` to the complex line through unit vector ``v``.

    ``-zeta p_v(zeta) = <G(zeta v), v>`` gives
    ``c_m = -sum_{|a|=m+1} (q^1_a conj(v1) + q^2_a conj(v2)) v^a``.
    """
    v = np.asarray(v, dtype=complex)
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise NormalizationError(f"slice direction must be a unit vector, |v| = {np.linalg.norm(v)!r}")
    series = G.piece_at(t).series
    N = series.truncation_degree
    if order < 1 or order + 1 > N:
        raise ParameterError(f"slice order must be in 1..{N - 1} for truncation degree {N}")
    b = basis(N)
    mono = b.powers(v[0], v[1])
    weighted = (series.comp1.array * np.conj(v[0]) + series.comp2.array * np.conj(v[1])) * mono
    c = np.array([-weighted[b.deg == m + 1].sum() for m in range(1, order + 1)])
    return SliceFunction(c)


@dataclass(frozen=True)
class CoefficientBoundReport:
    passed: bool
    violations: list[int]
    boundary: list[int] = field(default_factory=list)
    diagnostic: str | None = None


def caratheodory_coeff_bound(p: SliceFunction, tol: float = 1e-12) -> CoefficientBoundReport:
    """Necessary test ``|c_m| <= 2`` for Caratheodory functions."""
    mods = np.abs(p.c)
    violations = [int(m) + 1 for m in np.flatnonzero(mods > 2 + tol)]
    boundary = [int(m) + 1 for m in np.flatnonzero(np.abs(mods - 2) <= max(tol, 1e-9))]
    diagnostic = None
    if boundary:
        diagnostic = (f"|c_m| = 2 at m = {boundary}: p must then be a convex combination of "
                      "m rotated half-plane kernels (not verified)")
    return CoefficientBoundReport(not violations, violations, boundary, diagnostic)


@dataclass(frozen=True)
class ToeplitzReport:
    passed: bool
    min_eigenvalue: float


def toeplitz_matrix(p: SliceFunction, m: int) -> np.ndarray:
    """Hermitian ``(m+1) x (m+1)`` matrix with 2 on the diagonal and ``c_{k-l}`` below it."""
    col = np.concatenate([[2.0], p.c[:m]]).astype(complex)
    return toeplitz(col)


def caratheodory_toeplitz(p: SliceFunction, m: int, tol: float = 1e-10) -> ToeplitzReport:
    """Positive semidefiniteness of the order-``m`` Caratheodory-Toeplitz matrix."""
    if not 1 <= m <= p.order:
        raise ParameterError(f"order must be in 1..{p.order}, got {m}")
    lam = float(np.linalg.eigvalsh(toeplitz_matrix(p, m))[0])
    return ToeplitzReport(lam >= -tol, lam)


def unit_vectors(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def koebe_tail(degree: int) -> Tail:
    """``-2 z1^(N+1) / (1 - z1)``, the part of ``-z1 (1+z1)/(1-z1)`` above degree N."""
    n = degree + 1
    return Tail(1, MultiIndex(n, 0), MultiIndex(1, 0), lambda z1, z2: -2 * z1 ** n / (1 - z1))


def koebe_field(degree: int = 8) -> HerglotzField:
    """``(-z1 (1+z1)/(1-z1), -z2)``: every ``q^1_{m,0} = -2``."""
    terms = {(m, 0): -2.0 for m in range(2, degree + 1)}
    series = PolyMap2.from_terms(degree, terms, linear=-1.0)
    return make_field(FieldPiece(0.0, series, (koebe_tail(degree),)))


def pure_power_field(m: int, q: complex, degree: int = 8) -> HerglotzField:
    """``(-z1 + q z2^m, -z2)``."""
    if m < 2 or m > degree:
        raise ParameterError(f"need 2 <= m <= {degree}, got {m}")
    return make_field(PolyMap2.from_terms(degree, {(0, m): q}, linear=-1.0))

