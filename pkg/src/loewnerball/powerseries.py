"""
Bivariate complex power series truncated at a total degree.

A :class:`PolySeries` stores the coefficients of ``sum p_a z1**a1 z2**a2``
for ``a1 + a2 <= N``. Internally the table is a dense complex vector laid
out degree by degree::

    (0,0) | (1,0) (0,1) | (2,0) (1,1) (0,2) | (3,0) ...

so that multiplication and composition reduce to small matrix products.
The public face is still an associative table: :attr:`PolySeries.coeffs`
returns ``{MultiIndex: complex}`` for the nonzero entries.

A :class:`PolyMap2` is a pair of series of equal degree, read as a map
from C^2 to C^2.

    >>> z1 = PolySeries.variable(1, 4)
    >>> (z1 * z1).coeffs
    {MultiIndex(a1=2, a2=0): (1+0j)}
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Union

import numpy as np

from .errors import DegreeMismatchError, InvalidCompositionError, OutOfRangeError, ParameterError

DEFAULT_DEGREE = 8


class MultiIndex(NamedTuple):
    """Exponent pair ``(a1, a2)`` of the monomial ``z1**a1 * z2**a2``."""

    a1: int
    a2: int

    @property
    def degree(self) -> int:
        return self.a1 + self.a2


IndexLike = Union[MultiIndex, tuple]


def as_index(alpha: IndexLike) -> MultiIndex:
    a1, a2 = alpha
    if int(a1) != a1 or int(a2) != a2 or a1 < 0 or a2 < 0:
        raise ParameterError(f"multi-index must be a pair of nonnegative integers, got {alpha!r}")
    return MultiIndex(int(a1), int(a2))


class _Basis:
    """Monomial layout and multiplication tables for one truncation degree."""

    def __init__(self, degree: int):
        self.degree = degree
        self.alphas = [MultiIndex(d - k, k) for d in range(degree + 1) for k in range(d + 1)]
        self.size = len(self.alphas)
        self.index = {a: i for i, a in enumerate(self.alphas)}
        self.a1 = np.array([a.a1 for a in self.alphas])
        self.a2 = np.array([a.a2 for a in self.alphas])
        self.deg = self.a1 + self.a2
        ks, is_, js = [], [], []
        for i, ai in enumerate(self.alphas):
            for j, aj in enumerate(self.alphas):
                if ai.degree + aj.degree <= degree:
                    ks.append(self.index[MultiIndex(ai.a1 + aj.a1, ai.a2 + aj.a2)])
                    is_.append(i)
                    js.append(j)
        self._k = np.array(ks)
        self._i = np.array(is_)
        self._j = np.array(js)

    def operator(self, p: np.ndarray) -> np.ndarray:
        """Matrix of ``q -> p*q``; each (row, column) pair fixes the factor index."""
        m = np.zeros((self.size, self.size), dtype=complex)
        m[self._k, self._j] = p[self._i]
        return m

    def mul(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        return self.operator(p) @ q

    def powers(self, z1: np.ndarray, z2: np.ndarray) -> np.ndarray:
        """Monomial values, shape ``z1.shape + (size,)``."""
        z1 = np.asarray(z1, dtype=complex)
        z2 = np.asarray(z2, dtype=complex)
        p1 = np.empty(z1.shape + (self.degree + 1,), dtype=complex)
        p2 = np.empty(z2.shape + (self.degree + 1,), dtype=complex)
        p1[..., 0] = p2[..., 0] = 1.0
        p1[..., 1:] = z1[..., None]
        p2[..., 1:] = z2[..., None]
        np.cumprod(p1, axis=-1, out=p1)
        np.cumprod(p2, axis=-1, out=p2)
        return p1[..., self.a1] * p2[..., self.a2]

    def compose(self, outer: np.ndarray, inner1: np.ndarray, inner2: np.ndarray) -> np.ndarray:
        """Coefficients of ``outer(inner1, inner2)``; inner constants must vanish.

        ``outer`` may be a stack of shape ``(k, size)``; the powers of the
        inner series are then shared by all k outer series.
        """
        return ComposePlan(self, outer)(inner1, inner2)


class ComposePlan:
    """Composition with a fixed outer series, reusable across many inner maps."""

    def __init__(self, b: _Basis, outer):
        outer = np.asarray(outer, dtype=complex)
        self.b = b
        self.stacked = outer.ndim == 2
        outer = outer if self.stacked else outer[None, :]
        self.shape = outer.shape
        support = np.flatnonzero(np.any(outer != 0, axis=0))
        self.amax = int(b.a1[support].max()) if support.size else 0
        self.bmax = int(b.a2[support].max()) if support.size else 0
        # per power of inner1: (outer columns, matching powers of inner2)
        self.groups = []
        for a in range(self.amax + 1):
            sel = support[b.a1[support] == a]
            self.groups.append((np.ascontiguousarray(outer[:, sel]), b.a2[sel]) if sel.size else None)
        self.empty = support.size == 0

    def __call__(self, inner1: np.ndarray, inner2: np.ndarray) -> np.ndarray:
        b = self.b
        result = np.zeros(self.shape, dtype=complex)
        if not self.empty:
            cols = np.zeros((b.size, self.bmax + 1), dtype=complex)
            cols[0, 0] = 1.0
            if self.bmax:
                m2 = b.operator(inner2)
                for k in range(1, self.bmax + 1):
                    cols[:, k] = m2 @ cols[:, k - 1]
            m1 = b.operator(inner1) if self.amax else None
            for a, group in enumerate(self.groups):
                if a:
                    cols = m1 @ cols
                if group is not None:
                    result += group[0] @ cols[:, group[1]].T
        return result if self.stacked else result[0]


@functools.lru_cache(maxsize=None)
def basis(degree: int) -> _Basis:
    if degree < 0:
        raise ParameterError(f"truncation degree must be nonnegative, got {degree}")
    return _Basis(degree)


class PolySeries:
    """Immutable truncated series in ``(z1, z2)``.

    ``coeffs`` maps multi-indices (or plain pairs) to complex numbers; any
    key with total degree above ``truncation_degree`` is rejected.
    """

    __slots__ = ("_degree", "_c")

    def __init__(self, truncation_degree: int, coeffs: Mapping[IndexLike, complex] | None = None):
        b = basis(truncation_degree)
        c = np.zeros(b.size, dtype=complex)
        for alpha, value in (coeffs or {}).items():
            alpha = as_index(alpha)
            if alpha.degree > truncation_degree:
                raise OutOfRangeError(f"z^{tuple(alpha)} exceeds truncation degree {truncation_degree}")
            c[b.index[alpha]] += value
        c.setflags(write=False)
        self._degree = truncation_degree
        self._c = c

    @classmethod
    def from_array(cls, truncation_degree: int, array) -> PolySeries:
        b = basis(truncation_degree)
        arr = np.array(array, dtype=complex)
        if arr.shape != (b.size,):
            raise ParameterError(f"expected {b.size} coefficients for degree {truncation_degree}, got {arr.shape}")
        out = cls.__new__(cls)
        arr.setflags(write=False)
        out._degree = truncation_degree
        out._c = arr
        return out

    @classmethod
    def constant(cls, value: complex, truncation_degree: int = DEFAULT_DEGREE) -> PolySeries:
        return cls(truncation_degree, {(0, 0): value})

    @classmethod
    def variable(cls, j: int, truncation_degree: int = DEFAULT_DEGREE) -> PolySeries:
        if j not in (1, 2):
            raise ParameterError(f"variable index must be 1 or 2, got {j}")
        if truncation_degree < 1:
            return cls(truncation_degree)
        return cls(truncation_degree, {(1, 0) if j == 1 else (0, 1): 1.0})

    @property
    def truncation_degree(self) -> int:
        return self._degree

    @property
    def array(self) -> np.ndarray:
        """Read-only dense coefficient vector in degree-graded order."""
        return self._c

    @property
    def coeffs(self) -> dict[MultiIndex, complex]:
        alphas = basis(self._degree).alphas
        return {alphas[i]: complex(self._c[i]) for i in np.flatnonzero(self._c)}

    def __getitem__(self, alpha: IndexLike) -> complex:
        alpha = as_index(alpha)
        if alpha.degree > self._degree:
            raise OutOfRangeError(f"z^{tuple(alpha)} exceeds truncation degree {self._degree}")
        return complex(self._c[basis(self._degree).index[alpha]])

    def truncate(self, degree: int) -> PolySeries:
        """Drop every term above ``degree`` (which may not exceed the current degree)."""
        if degree > self._degree:
            raise DegreeMismatchError(f"cannot raise truncation degree {self._degree} to {degree}")
        return PolySeries.from_array(degree, self._c[: basis(degree).size])

    def _check(self, other: PolySeries) -> None:
        if other._degree != self._degree:
            raise DegreeMismatchError(
                f"truncation degrees differ: {self._degree} vs {other._degree}")

    def __add__(self, other):
        if isinstance(other, PolySeries):
            self._check(other)
            return PolySeries.from_array(self._degree, self._c + other._c)
        if np.isscalar(other):
            return self + PolySeries.constant(other, self._degree)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return PolySeries.from_array(self._degree, -self._c)

    def __sub__(self, other):
        if isinstance(other, PolySeries) or np.isscalar(other):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PolySeries):
            return mul(self, other)
        if np.isscalar(other):
            return PolySeries.from_array(self._degree, self._c * other)
        return NotImplemented

    def __rmul__(self, other):
        if np.isscalar(other):
            return PolySeries.from_array(self._degree, self._c * other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, PolySeries):
            return NotImplemented
        return self._degree == other._degree and np.array_equal(self._c, other._c)

    __hash__ = None

    def __call__(self, z1, z2):
        return evaluate(self, (z1, z2))

    def __repr__(self):
        terms = ", ".join(f"{tuple(a)}: {v:.6g}" for a, v in self.coeffs.items())
        return f"PolySeries(N={self._degree}, {{{terms}}})"


@dataclass(frozen=True)
class PolyMap2:
    """A pair of series ``(comp1, comp2)`` of equal truncation degree."""

    comp1: PolySeries
    comp2: PolySeries

    def __post_init__(self):
        if self.comp1.truncation_degree != self.comp2.truncation_degree:
            raise DegreeMismatchError(
                f"component degrees differ: {self.comp1.truncation_degree} vs {self.comp2.truncation_degree}")

    @classmethod
    def identity(cls, truncation_degree: int = DEFAULT_DEGREE) -> PolyMap2:
        return cls(PolySeries.variable(1, truncation_degree), PolySeries.variable(2, truncation_degree))

    @classmethod
    def from_terms(cls, truncation_degree: int, terms1=None, terms2=None, linear: complex = 1.0) -> PolyMap2:
        """Build ``linear*z + higher terms``; ``terms1``/``terms2`` give the nonlinear parts."""
        c1 = {(1, 0): linear}
        c2 = {(0, 1): linear}
        for alpha, v in (terms1 or {}).items():
            c1[alpha] = c1.get(alpha, 0) + v
        for alpha, v in (terms2 or {}).items():
            c2[alpha] = c2.get(alpha, 0) + v
        return cls(PolySeries(truncation_degree, c1), PolySeries(truncation_degree, c2))

    @classmethod
    def from_arrays(cls, truncation_degree: int, array) -> PolyMap2:
        array = np.asarray(array)
        return cls(PolySeries.from_array(truncation_degree, array[0]),
                   PolySeries.from_array(truncation_degree, array[1]))

    @property
    def truncation_degree(self) -> int:
        return self.comp1.truncation_degree

    @property
    def array(self) -> np.ndarray:
        return np.stack([self.comp1.array, self.comp2.array])

    def component(self, j: int) -> PolySeries:
        if j == 1:
            return self.comp1
        if j == 2:
            return self.comp2
        raise ParameterError(f"component index must be 1 or 2, got {j}")

    def linear_part(self) -> np.ndarray:
        """The 2x2 Jacobian at the origin."""
        return np.array([[self.comp1[1, 0], self.comp1[0, 1]],
                         [self.comp2[1, 0], self.comp2[0, 1]]])

    def constant_part(self) -> np.ndarray:
        return np.array([self.comp1[0, 0], self.comp2[0, 0]])

    @property
    def is_normalized(self) -> bool:
        return (np.all(self.constant_part() == 0)
                and np.array_equal(self.linear_part(), np.eye(2)))

    def truncate(self, degree: int) -> PolyMap2:
        return PolyMap2(self.comp1.truncate(degree), self.comp2.truncate(degree))

    def __add__(self, other):
        if not isinstance(other, PolyMap2):
            return NotImplemented
        return PolyMap2(self.comp1 + other.comp1, self.comp2 + other.comp2)

    def __sub__(self, other):
        if not isinstance(other, PolyMap2):
            return NotImplemented
        return PolyMap2(self.comp1 - other.comp1, self.comp2 - other.comp2)

    def __neg__(self):
        return PolyMap2(-self.comp1, -self.comp2)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return PolyMap2(self.comp1 * scalar, self.comp2 * scalar)

    __rmul__ = __mul__

    def __call__(self, z):
        """Evaluate at ``z`` of shape ``(..., 2)``; returns the same shape."""
        z = np.asarray(z, dtype=complex)
        mono = basis(self.truncation_degree).powers(z[..., 0], z[..., 1])
        return mono @ self.array.T


def mul(p: PolySeries, q: PolySeries) -> PolySeries:
    """Truncated product: every term of total degree above N is dropped."""
    p._check(q)
    return PolySeries.from_array(p.truncation_degree, basis(p.truncation_degree).mul(p.array, q.array))


def compose(outer: PolySeries, inner: PolyMap2) -> PolySeries:
    """``outer(inner.comp1(z), inner.comp2(z))`` truncated at the common degree.

    The inner map must vanish at the origin, otherwise low-degree coefficients
    of the result would depend on terms the truncation has already discarded.
    """
    outer._check(inner.comp1)
    if np.any(inner.constant_part() != 0):
        raise InvalidCompositionError(
            f"inner map has nonzero constant term {inner.constant_part().tolist()}")
    b = basis(outer.truncation_degree)
    return PolySeries.from_array(outer.truncation_degree,
                                 b.compose(outer.array, inner.comp1.array, inner.comp2.array))


def compose_map(outer: PolyMap2, inner: PolyMap2) -> PolyMap2:
    return PolyMap2(compose(outer.comp1, inner), compose(outer.comp2, inner))


def evaluate(p: PolySeries, z) -> complex | np.ndarray:
    """Sum of ``p_a z^a`` over stored terms; ``z`` has shape ``(..., 2)`` or is a pair."""
    z1, z2 = (np.asarray(z[0], dtype=complex), np.asarray(z[1], dtype=complex)) \
        if not isinstance(z, np.ndarray) else (z[..., 0], z[..., 1])
    b = basis(p.truncation_degree)
    out = b.powers(z1, z2) @ p.array
    return complex(out) if np.ndim(out) == 0 else out


def coeff(f: PolyMap2, j: int, alpha: IndexLike) -> complex:
    """The coefficient b^j_alpha of component ``j``."""
    return f.component(j)[alpha]


def rotation_phases(degree: int, theta1: float, theta2: float) -> np.ndarray:
    """Per-coefficient phase factors of ``U* f(U z)`` for ``U = diag(e^{i theta1}, e^{i theta2})``."""
    b = basis(degree)
    freq1 = (b.a1 - 1) * theta1 + b.a2 * theta2
    freq2 = b.a1 * theta1 + (b.a2 - 1) * theta2
    return np.stack([np.exp(1j * freq1), np.exp(1j * freq2)])


def rotate(f: PolyMap2, theta1: float, theta2: float) -> PolyMap2:
    """Conjugate ``f`` by the diagonal unitary ``diag(e^{i theta1}, e^{i theta2})``.

    Any linear part that is a multiple of the identity is left unchanged, so
    normalized maps stay normalized.
    """
    return PolyMap2.from_arrays(f.truncation_degree,
                                f.array * rotation_phases(f.truncation_degree, theta1, theta2))


def align_phase(f: PolyMap2, j: int, alpha: IndexLike) -> tuple[float, float]:
    """Rotation angles that make ``b^j_alpha`` real and nonnegative.

    Only ``theta1`` is used unless the coefficient's phase does not depend on
    it, in which case ``theta2`` carries the correction.
    """
    alpha = as_index(alpha)
    c = coeff(f, j, alpha)
    if c == 0:
        return 0.0, 0.0
    phase = -np.angle(c)
    w1 = alpha.a1 - 1 if j == 1 else alpha.a1
    w2 = alpha.a2 if j == 1 else alpha.a2 - 1
    if w1 != 0:
        return float(phase / w1), 0.0
    if w2 != 0:
        return 0.0, float(phase / w2)
    raise ParameterError(f"coefficient {j}:{tuple(alpha)} is rotation invariant")
