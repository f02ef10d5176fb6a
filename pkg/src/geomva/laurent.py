"""Multivariate formal Laurent series with vector coefficients.

Series carry explicit per-variable exponent windows; products that would
leave the declared window raise instead of truncating silently.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import AliasingError, PoleError, RegionError, WindowViolation
from .grading import DegreeWindow, GradedVector, WindowedCompletion
from .scalars import binomial, is_exact

Exponent = tuple


def _is_zero(c) -> bool:
    if isinstance(c, GradedVector):
        return c.is_zero()
    return c == 0


def _bounding_windows(exponents: Iterable[Exponent], arity: int) -> tuple:
    exps = list(exponents)
    if not exps:
        return tuple((0, 0) for _ in range(arity))
    return tuple((min(e[i] for e in exps), max(e[i] for e in exps)) for i in range(arity))


class MultiLaurent:
    """Sparse series ``sum_alpha c_alpha x^alpha`` in ``arity`` variables.

    Coefficients are scalars or ``GradedVector``s; ``windows[i]`` is the
    closed exponent interval allowed for variable ``i``.
    """

    __slots__ = ("arity", "windows", "terms")

    def __init__(self, arity: int, terms: Mapping[Exponent, object], windows: Sequence | None = None):
        self.arity = arity
        clean = {}
        for alpha, c in terms.items():
            alpha = tuple(alpha)
            if len(alpha) != arity:
                raise ValueError(f"exponent {alpha} has wrong arity for {arity} variables")
            if not _is_zero(c):
                clean[alpha] = c
        if windows is None:
            windows = _bounding_windows(clean, arity)
        self.windows = tuple(tuple(w) for w in windows)
        for alpha in clean:
            for i, (lo, hi) in enumerate(self.windows):
                if not lo <= alpha[i] <= hi:
                    raise WindowViolation(
                        f"exponent {alpha} outside window {self.windows} in variable {i}"
                    )
        self.terms = clean

    @classmethod
    def constant(cls, c, arity: int = 0) -> "MultiLaurent":
        return cls(arity, {(0,) * arity: c}, [(0, 0)] * arity)

    def __getitem__(self, alpha) -> object:
        return self.terms.get(tuple(alpha), 0)

    def __add__(self, other: "MultiLaurent") -> "MultiLaurent":
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out[a] + c if a in out else c
        wins = [
            (min(w1[0], w2[0]), max(w1[1], w2[1])) for w1, w2 in zip(self.windows, other.windows)
        ]
        return MultiLaurent(self.arity, out, wins)

    def __sub__(self, other: "MultiLaurent") -> "MultiLaurent":
        return self + other.scale(-1)

    def scale(self, s) -> "MultiLaurent":
        return MultiLaurent(self.arity, {a: c * s for a, c in self.terms.items()}, self.windows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiLaurent):
            return NotImplemented
        return not (self - other).terms

    def __repr__(self):
        return f"MultiLaurent({self.arity}, {dict(sorted(self.terms.items()))})"

    def restrict(self, var: int, exponent: int) -> "MultiLaurent":
        """Coefficient series of ``x_var**exponent`` (variable removed)."""
        terms = {}
        for a, c in self.terms.items():
            if a[var] == exponent:
                terms[a[:var] + a[var + 1:]] = c
        wins = self.windows[:var] + self.windows[var + 1:]
        return MultiLaurent(self.arity - 1, terms, wins)

    def has_negative_exponents(self) -> bool:
        return any(min(a, default=0) < 0 for a in self.terms)


def mul(s: MultiLaurent, t: MultiLaurent, window: Sequence | None = None) -> MultiLaurent:
    """Exact convolution product.

    With ``window`` given, any product exponent outside it is an error.
    """
    if s.arity != t.arity:
        raise ValueError("arity mismatch")
    out: dict = {}
    for a, ca in s.terms.items():
        for b, cb in t.terms.items():
            e = tuple(x + y for x, y in zip(a, b))
            if isinstance(ca, GradedVector) or not isinstance(cb, GradedVector):
                term = ca * cb
            else:
                term = cb * ca
            out[e] = out[e] + term if e in out else term
    if window is None:
        window = [(w1[0] + w2[0], w1[1] + w2[1]) for w1, w2 in zip(s.windows, t.windows)]
    else:
        for e, c in out.items():
            if _is_zero(c):
                continue
            for i, (lo, hi) in enumerate(window):
                if not lo <= e[i] <= hi:
                    raise WindowViolation(f"product exponent {e} overflows window {tuple(window)}")
    return MultiLaurent(s.arity, out, window)


class PoleClearingPoly:
    """``g(x) = prod_{i<j} (x_i - x_j)**N_ij`` with its expanded integer coefficients."""

    def __init__(self, arity: int, orders: Mapping[tuple, int]):
        self.arity = arity
        self.orders = {}
        for (i, j), n in orders.items():
            if not 0 <= i < j < arity:
                raise ValueError(f"pair {(i, j)} invalid for arity {arity}")
            if n < 0:
                raise ValueError("pole orders must be nonnegative")
            if n:
                self.orders[(i, j)] = n
        self.coefficients = self._expand()

    def _expand(self) -> dict:
        poly = {(0,) * self.arity: 1}
        for (i, j), n in sorted(self.orders.items()):
            factor = {}
            for s in range(n + 1):
                e = [0] * self.arity
                e[i] = n - s
                e[j] = s
                factor[tuple(e)] = binomial(n, s) * (-1) ** s
            new = {}
            for a, ca in poly.items():
                for b, cb in factor.items():
                    e = tuple(x + y for x, y in zip(a, b))
                    new[e] = new.get(e, 0) + ca * cb
            poly = {e: c for e, c in new.items() if c}
        return poly

    @property
    def total_degree(self) -> int:
        return sum(self.orders.values())

    def degree_in(self, var: int) -> int:
        return sum(n for (i, j), n in self.orders.items() if var in (i, j))

    def order(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        return self.orders.get((i, j), 0)

    def as_series(self) -> MultiLaurent:
        return MultiLaurent(
            self.arity, self.coefficients, [(0, self.degree_in(v)) for v in range(self.arity)]
        )

    def __call__(self, z: Sequence):
        out = 1
        for (i, j), n in self.orders.items():
            out = out * (z[i] - z[j]) ** n
        return out

    def __repr__(self):
        return f"PoleClearingPoly({self.arity}, {self.orders})"


class AnnulusRegion:
    """Product of annuli ordered so that ``|x_order[0]| > |x_order[1]| > ...``."""

    def __init__(self, order: Sequence[int], radii: Sequence | None = None):
        order = tuple(order)
        if sorted(order) != list(range(len(order))):
            raise RegionError(f"ordering {order} is not a permutation")
        self.order = order
        self.radii = tuple(tuple(r) for r in radii) if radii is not None else None
        if self.radii is not None:
            if len(self.radii) != len(order):
                raise RegionError("one (r, R) pair per variable is required")
            for r, R in self.radii:
                if not 0 <= r < R:
                    raise RegionError(f"annulus ({r}, {R}) is empty")
            for outer, inner in zip(order, order[1:]):
                if self.radii[inner][1] > self.radii[outer][0]:
                    raise RegionError("annuli are not strictly nested along the ordering")

    @classmethod
    def standard(cls, arity: int) -> "AnnulusRegion":
        return cls(tuple(range(arity)))

    def rank(self, var: int) -> int:
        return self.order.index(var)

    def contains(self, z: Sequence) -> bool:
        mags = [abs(z[v]) for v in self.order]
        return all(a > b for a, b in zip(mags, mags[1:]))


def expand_inverse_g(p: PoleClearingPoly, region: AnnulusRegion, order: int) -> MultiLaurent:
    """Laurent expansion of ``1/g`` valid on ``region``.

    Every factor ``(x_i - x_j)**-N`` is expanded as a geometric-type series
    in (inner / outer); terms whose summed expansion indices exceed
    ``order`` are dropped.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    if len(region.order) != p.arity:
        raise RegionError("region arity does not match polynomial arity")
    m = p.arity
    # (exponent, used order) -> coefficient
    acc = {((0,) * m, 0): 1}
    for (i, j), n in sorted(p.orders.items()):
        outer, inner = (i, j) if region.rank(i) < region.rank(j) else (j, i)
        sign = 1 if outer == i else (-1) ** n
        new = {}
        for (alpha, used), c in acc.items():
            for t in range(order - used + 1):
                e = list(alpha)
                e[inner] += t
                e[outer] -= n + t
                key = (tuple(e), used + t)
                new[key] = new.get(key, 0) + c * sign * binomial(n + t - 1, t)
        acc = new
    terms: dict = {}
    for (alpha, _), c in acc.items():
        terms[alpha] = terms.get(alpha, 0) + c
    wins = []
    for v in range(m):
        deg = p.degree_in(v)
        wins.append((-deg - order, order))
    return MultiLaurent(m, terms, wins)


def filtration_weight(alpha: Exponent, region: AnnulusRegion) -> int:
    """Weight that increases by at least one per unit of expansion order."""
    return sum(region.rank(v) * a for v, a in enumerate(alpha))


def poly_mul(s: MultiLaurent, p: PoleClearingPoly, window: Sequence | None = None) -> MultiLaurent:
    """Multiply a series by a pole-clearing polynomial (exact)."""
    if s.arity != p.arity:
        raise ValueError("arity mismatch")
    return mul(s, p.as_series(), window)


def _power(z, e: int):
    if e >= 0:
        return z ** e
    if z == 0:
        raise PoleError("negative power of a vanishing coordinate")
    if is_exact(z):
        return 1 / (z ** (-e))
    return z ** e


def eval_at(s: MultiLaurent, z: Sequence, window: DegreeWindow | None = None, basis=None):
    """Evaluate a series with finitely many terms at the point ``z``.

    Exact coefficients at exact points stay exact; otherwise the result is
    complex. Vector-valued series return a ``WindowedCompletion``.
    """
    z = tuple(z)
    if len(z) != s.arity:
        raise ValueError("point has wrong arity")
    for alpha, c in s.terms.items():
        for i, a in enumerate(alpha):
            if a < 0 and z[i] == 0:
                raise PoleError(f"x_{i} = 0 with negative exponent {a}")
    exact_point = all(is_exact(x) for x in z)
    pt = z if exact_point else tuple(complex(x) for x in z)
    vector_valued = any(isinstance(c, GradedVector) for c in s.terms.values())
    total = None
    for alpha, c in s.terms.items():
        mono = 1
        for x, a in zip(pt, alpha):
            mono = mono * _power(x, a)
        if isinstance(c, GradedVector):
            if not exact_point or not c.is_exact():
                c = c.to_numeric()
                mono = complex(mono)
            term = c * mono
        else:
            term = c * mono if exact_point else complex(c) * complex(mono)
        total = term if total is None else total + term
    if not vector_valued:
        return 0 if total is None else total
    if basis is None:
        basis = next(iter(s.terms.values())).basis
    vec = total if total is not None else GradedVector(basis)
    if window is None:
        degs = vec.support_degrees() or {basis.min_degree}
        window = DegreeWindow(min(degs), max(degs))
    return WindowedCompletion(
        basis, window, {k: vec.component(k) for k in window.degrees()}, below_window_zero=True
    )


def default_nodes(k_range: Sequence[int]) -> int:
    return 2 * max(abs(k) for k in k_range) + 5


def laurent_coefficients(
    h: Callable,
    k_range: Sequence[int],
    radius: float = 1.0,
    nodes: int | None = None,
    support: tuple | None = None,
) -> dict:
    """Trapezoidal-rule Laurent coefficients ``(1/2 pi i) \\oint z^{-k-1} h(z) dz`` on ``|z| = radius``.

    ``h`` maps a complex scalar to a complex scalar or a numpy array.
    ``support``, when known, is the exponent range of ``h``; the rule is exact
    when the node count exceeds its width, and aliasing is raised otherwise.
    """
    k_range = list(k_range)
    if not k_range:
        return {}
    kmax = max(abs(k) for k in k_range)
    M = default_nodes(k_range) if nodes is None else nodes
    if M < 2 * kmax + 1:
        raise AliasingError(f"{M} nodes cannot resolve |k| up to {kmax} (need {2 * kmax + 1})")
    if support is not None:
        lo, hi = support
        if hi - lo + 1 > M:
            raise AliasingError(f"{M} nodes alias a Laurent support of width {hi - lo + 1}")
    pts = contour_nodes(M, radius)
    samples = np.array([np.asarray(h(p), dtype=complex) for p in pts])
    return trapezoid(samples, pts, k_range)


def contour_nodes(M: int, radius: float = 1.0) -> np.ndarray:
    """``M`` equispaced points on the circle ``|z| = radius``."""
    return radius * np.exp(2j * np.pi * np.arange(M) / M)


def trapezoid(samples, nodes, k_range: Sequence[int]) -> dict:
    """Coefficients ``c_k`` of ``z^k`` from samples of ``h`` at equispaced circle nodes."""
    samples = np.asarray(samples, dtype=complex)
    zs = np.asarray(nodes, dtype=complex)
    M = len(zs)
    out = {}
    for k in k_range:
        w = zs ** (-k) / M
        c = np.tensordot(w, samples, axes=(0, 0))
        out[k] = complex(c) if c.ndim == 0 else c
    return out


def box(windows: Sequence[tuple]) -> Iterable[Exponent]:
    return itertools.product(*(range(lo, hi + 1) for lo, hi in windows))
