"""Geometric multiplication ``mu`` built from a vertex algebra, and its axiom checks.

For basis states ``a_1, ..., a_m`` the formal series
``f(a, x) = Y(a_1, x_1) ... Y(a_m, x_m)|0>`` has exponent ``e`` coefficient
``(a_1)_(-e_1-1) ... (a_m)_(-e_m-1)|0>``.  Multiplying by
``g(x) = prod_{i<j} (x_i - x_j)^{N_ij}`` (``N_ij`` the locality orders) gives,
in each degree ``l``, a polynomial ``P_l`` supported on
``sum(alpha) = deg g + l - sum |a_i|``.  ``mu_continued`` evaluates ``P_l / g``
anywhere off the diagonals; ``mu_ordered`` sums the mode series directly on
``|z_1| > ... > |z_m|``.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    AxiomViolation,
    DiagonalError,
    DomainError,
    InvalidScalar,
    WindowViolation,
)
from .grading import DegreeWindow, GradedVector, WindowedCompletion, scale_action
from .laurent import MultiLaurent, PoleClearingPoly, _power, eval_at
from .scalars import is_exact
from .va_core import CheckReport, VertexAlgebra


def _compositions(total: int, parts: int):
    """Tuples of ``parts`` nonnegative integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _bounded_points(total: int, lows: Sequence[int]):
    """Integer points with ``alpha_i >= lows[i]`` and ``sum(alpha) = total``."""
    shift = total - sum(lows)
    if shift < 0:
        return
    for c in _compositions(shift, len(lows)):
        yield tuple(x + lo for x, lo in zip(c, lows))


def _reciprocal(x):
    if isinstance(x, int):
        return Fraction(1, x)
    return 1 / x


def _as_vector(V: VertexAlgebra, a) -> GradedVector:
    if isinstance(a, GradedVector):
        return a
    if isinstance(a, str):
        return V.basis.vector(V.basis.parse(a))
    return V.basis.vector(a)


def _check_distinct(z: Sequence) -> None:
    for i, j in itertools.combinations(range(len(z)), 2):
        if z[i] == z[j]:
            raise DiagonalError(f"insertion points {i} and {j} coincide at {z[i]}")


def is_ordered(z: Sequence) -> bool:
    """``|z_1| > |z_2| > ... > |z_m|`` strictly."""
    mags = [abs(complex(x)) for x in z]
    return all(a > b for a, b in zip(mags, mags[1:]))


def _vec_norm(d: dict) -> float:
    return max((abs(c) for c in d.values()), default=0.0)


@dataclass
class ConvergenceCertificate:
    """Evidence that the degree-``l`` shell series converges normally on a sampled compact.

    ``shell_norms[t]`` bounds the sup over the compact of the summed norms of
    shell ``t``; the tail past the last retained shell is bounded by geometric
    extrapolation of the last three shells.
    """

    degree: int
    shell_norms: list
    partial_norms: list
    ratio: float
    tail: float
    compact: dict

    def certified(self, tol: float) -> bool:
        return self.tail <= tol

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "shells": len(self.shell_norms),
            "ratio": self.ratio,
            "tail": self.tail,
            "compact": self.compact,
        }


def geometric_tail(norms: Sequence[float], zero_run: int = 3) -> tuple:
    """``(ratio, tail)`` from the last three shell norms; ``inf`` when not yet contracting.

    Isolated zero shells do occur, so a zero among the last three is not
    evidence of convergence; only ``zero_run`` consecutive zero shells are
    read as a terminated series (tail 0).
    """
    if len(norms) >= zero_run and not any(norms[-zero_run:]):
        return 0.0, 0.0
    if len(norms) < 3:
        return math.inf, math.inf
    n1, n2, n3 = norms[-3:]
    if n1 == 0 or n2 == 0 or n3 == 0:
        return math.inf, math.inf
    rho = max(n2 / n1, n3 / n2)
    if rho >= 1:
        return rho, math.inf
    return rho, n3 * rho / (1 - rho)


@dataclass
class PolynomialityWitness:
    """Exhaustive check of ``p_l(g f)`` on a box of exponents around the simplex."""

    labels: tuple
    degree: int
    orders: dict
    hyperplane_sum: int
    lows: tuple
    checked: int
    negative: list = field(default_factory=list)
    off_degree: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.negative and not self.off_degree


class GeometricStructure:
    """``Psi(V)``: the geometric multiplication of a vertex algebra, built lazily.

    Pole-clearing polynomials and the per-degree polynomials ``P_l`` are cached
    per tuple of basis keys; states ``f_e`` are cached per key suffix.
    """

    def __init__(self, V: VertexAlgebra, m_max: int = 3):
        self.V = V
        self.basis = V.basis
        self.window = V.window
        self.m_max = m_max
        self._orders: dict = {}
        self._states: dict = {}
        self._polys: dict = {}

    # -- locality data ---------------------------------------------------------------

    def key_order(self, x, y) -> int:
        """Pole order ``N_xy``: least ``N`` with ``x_(n) y = 0`` for all ``n >= N``.

        For a vertex algebra this equals the minimal locality order of the pair,
        and it is found exactly: ``x_(n) y`` has degree ``|x| + |y| - n - 1``,
        so only finitely many ``n`` can contribute.  Modes beyond the cap are
        allowed here.
        """
        pair = (x, y) if (x, y) in self._orders else (y, x)
        if pair not in self._orders:
            V = self.V
            top = V.degree(x) + V.degree(y) - self.basis.min_degree - 1
            n = 0
            for k in range(top, -1, -1):
                if V.mode_dict(x, k, y):
                    n = k + 1
                    break
            self._orders[(x, y)] = n
            pair = (x, y)
        return self._orders[pair]

    def pole_poly(self, supports: Sequence) -> PoleClearingPoly:
        """``g`` for argument supports (iterables of basis keys): ``N_ij`` maximized over keys."""
        orders = {}
        m = len(supports)
        for i, j in itertools.combinations(range(m), 2):
            n = max((self.key_order(x, y) for x in supports[i] for y in supports[j]), default=0)
            orders[(i, j)] = n
        return PoleClearingPoly(m, orders)

    # -- exact series data -----------------------------------------------------------

    def state(self, keys: tuple, e: tuple) -> dict:
        """Coefficient of ``x^e`` in ``Y(k_1, x_1) ... Y(k_m, x_m)|0>``, all degrees."""
        if not keys:
            return self.V._vacuum
        ck = (keys, e)
        out = self._states.get(ck)
        if out is None:
            inner = self.state(keys[1:], e[1:])
            out = self.V.mode_on({keys[0]: 1}, -e[0] - 1, inner) if inner else {}
            self._states[ck] = out
        return out

    def key_polynomial(self, keys: tuple, g: PoleClearingPoly, l: int) -> MultiLaurent:
        """``P_l = p_l(g f)`` for a tuple of basis keys, exact."""
        ck = (keys, tuple(sorted(g.orders.items())), l)
        poly = self._polys.get(ck)
        if poly is not None:
            return poly
        m = len(keys)
        S = g.total_degree + l - sum(self.V.degree(k) for k in keys)
        terms = {}
        if S >= 0:
            for alpha in _compositions(S, m):
                acc: dict = {}
                for beta, r in g.coefficients.items():
                    e = tuple(a - b for a, b in zip(alpha, beta))
                    for key, c in self.state(keys, e).items():
                        if self.V.degree(key) == l:
                            acc[key] = acc.get(key, 0) + r * c
                vec = GradedVector(self.basis, acc)
                if not vec.is_zero():
                    terms[alpha] = vec
        wins = [(0, max(S, 0))] * m
        poly = MultiLaurent(m, terms, wins)
        self._polys[ck] = poly
        return poly

    def polynomial(self, a: Sequence, l: int) -> tuple:
        """``(g, P_l)`` for arbitrary vectors, by multilinearity over basis keys."""
        a = [_as_vector(self.V, x) for x in a]
        g = self.pole_poly([list(x.coeffs) for x in a])
        total: MultiLaurent | None = None
        for combo in itertools.product(*(x.coeffs.items() for x in a)):
            keys = tuple(k for k, _ in combo)
            coeff = 1
            for _, c in combo:
                coeff = coeff * c
            p = self.key_polynomial(keys, g, l).scale(coeff)
            total = p if total is None else total + p
        if total is None:
            total = MultiLaurent(len(a), {})
        return g, total

    def witness(self, keys: tuple, l: int, pad: int = 1) -> PolynomialityWitness:
        """Check that ``p_l(g f)`` vanishes at every box exponent with a negative entry.

        The box is ``alpha_i >= -(deg_{x_i} g + pad)`` on the hyperplane
        ``sum(alpha) = deg g + l - sum |a_i|``.  Each coefficient of ``g f`` is
        computed in full (all degrees); any part in a degree other than ``l``
        would place a nonzero term off its own hyperplane and is recorded.
        """
        m = len(keys)
        g = self.pole_poly([[k] for k in keys])
        S = g.total_degree + l - sum(self.V.degree(k) for k in keys)
        lows = tuple(-(g.degree_in(v) + pad) for v in range(m))
        w = PolynomialityWitness(
            tuple(self.basis.label(k) for k in keys), l, dict(g.orders), S, lows, 0
        )
        for alpha in _bounded_points(S, lows):
            acc: dict = {}
            for beta, r in g.coefficients.items():
                e = tuple(a - b for a, b in zip(alpha, beta))
                for key, c in self.state(keys, e).items():
                    acc[key] = acc.get(key, 0) + r * c
            acc = {k: c for k, c in acc.items() if c}
            w.checked += 1
            if not acc:
                continue
            degs = {self.V.degree(k) for k in acc}
            if degs - {l}:
                w.off_degree.append((alpha, sorted(degs - {l})))
            if l in degs and min(alpha) < 0:
                w.negative.append(alpha)
        return w

    # -- evaluation --------------------------------------------------------------------

    def _degrees(self, degrees) -> list:
        return list(self.window.degrees()) if degrees is None else sorted(set(degrees))

    def _completion(self, comps: dict, degrees: list, certs=None) -> WindowedCompletion:
        window = DegreeWindow(min(degrees), max(degrees)) if degrees else self.window
        return WindowedCompletion(self.basis, window, comps, True, certs)

    def mu_continued(self, a: Sequence, z: Sequence, degrees=None) -> WindowedCompletion:
        """``P_l(z) / g(z)`` per degree; exact at exact points."""
        a = [_as_vector(self.V, x) for x in a]
        z = tuple(z)
        if len(a) != len(z):
            raise ValueError("one point per insertion is required")
        _check_distinct(z)
        degrees = self._degrees(degrees)
        if not a:
            vac = GradedVector(self.basis, self.V._vacuum)
            return self._completion({l: vac.component(l) for l in degrees}, degrees)
        exact_point = all(is_exact(x) for x in z)
        pt = z if exact_point else tuple(complex(x) for x in z)
        comps = {}
        for l in degrees:
            g, P = self.polynomial(a, l)
            if not P.terms:
                continue
            inv = _reciprocal(g(pt)) if exact_point else 1 / complex(g(pt))
            val = eval_at(P, pt, DegreeWindow(l, l), self.basis).component(l)
            comps[l] = val * inv
        return self._completion(comps, degrees)

    def mu_ordered(
        self,
        a: Sequence,
        z: Sequence,
        degrees=None,
        tol: float = 1e-13,
        max_shells: int = 200,
        rel_radius: float = 1e-2,
        zero_run: int = 16,
    ) -> WindowedCompletion:
        """Direct mode-sum evaluation on the ordered domain with per-degree certificates.

        Intermediate degrees ``d_2, ..., d_m`` of the partial products are
        summed shell by shell (``t = sum d_j``); each degree stops once its
        certified tail is below ``tol`` relative to the partial sum, or after
        ``zero_run`` consecutive vanishing shells.
        """
        a = [_as_vector(self.V, x) for x in a]
        z = tuple(complex(x) for x in z)
        m = len(a)
        if m != len(z):
            raise ValueError("one point per insertion is required")
        _check_distinct(z)
        if not is_ordered(z):
            raise DomainError("points are not strictly ordered by modulus; use mu_continued")
        degrees = self._degrees(degrees)
        if m == 0:
            return self.mu_continued([], [], degrees)
        lo = self.basis.min_degree
        mods = [abs(x) for x in z]
        # closed annuli around each modulus, still strictly nested
        delta = rel_radius
        for j in range(m - 1):
            if mods[j + 1] > 0:
                delta = min(delta, 0.25 * (mods[j] - mods[j + 1]) / (mods[j] + mods[j + 1]))
        outer = [r * (1 + delta) if r else delta * mods[m - 2] for r in mods]
        inner = [r * (1 - delta) for r in mods]
        compact = {
            "moduli": [[inner[j], outer[j]] for j in range(m)],
            "shape": "product of closed annuli",
        }

        def sup_monomial(e):
            out = 1.0
            for j, ej in enumerate(e):
                if ej > 0:
                    out *= outer[j] ** ej
                elif ej < 0:
                    out *= inner[j] ** ej
            return out

        combos = []
        for combo in itertools.product(*(x.coeffs.items() for x in a)):
            keys = tuple(k for k, _ in combo)
            coeff = 1
            for _, c in combo:
                coeff = coeff * c
            combos.append((keys, coeff))

        acc = {l: {} for l in degrees}
        shells = {l: [] for l in degrees}
        partials = {l: [] for l in degrees}
        done = {l: False for l in degrees}
        t_min = 3 + sum(max((self.V.degree(k) for k in x.coeffs), default=0) for x in a[1:])
        for t in range(max_shells):
            shell_norm = {l: 0.0 for l in degrees}
            for d_tail in _compositions(t, m - 1):
                d = (None,) + tuple(x + lo for x in d_tail) + (0,)
                for keys, coeff in combos:
                    degs = [self.V.degree(k) for k in keys]
                    e_tail = tuple(d[j] - d[j + 1] - degs[j] for j in range(1, m))
                    inner_state = self.state(keys[1:], e_tail)
                    if not inner_state:
                        continue
                    for l in degrees:
                        if done[l]:
                            continue
                        e = (l - d[1] - degs[0],) + e_tail
                        s1 = self.V.mode_on({keys[0]: 1}, -e[0] - 1, inner_state)
                        s1 = {k: c for k, c in s1.items() if self.V.degree(k) == l}
                        if not s1:
                            continue
                        mono = coeff
                        for x, ej in zip(z, e):
                            mono = mono * (x ** ej)
                        mono = complex(mono)
                        target = acc[l]
                        for k, c in s1.items():
                            target[k] = target.get(k, 0) + complex(c) * mono
                        shell_norm[l] += abs(complex(coeff)) * _vec_norm(s1) * sup_monomial(e)
            for l in degrees:
                if done[l]:
                    continue
                shells[l].append(shell_norm[l])
                partials[l].append(_vec_norm(acc[l]))
                _, tail = geometric_tail(shells[l], zero_run)
                if t + 1 >= t_min and tail <= tol * max(partials[l][-1], 1.0):
                    done[l] = True
            if m == 1 or all(done.values()):
                break
        certs = {}
        comps = {}
        for l in degrees:
            ratio, tail = geometric_tail(shells[l], zero_run) if m > 1 else (0.0, 0.0)
            certs[l] = ConvergenceCertificate(l, shells[l], partials[l], ratio, tail, compact)
            vec = GradedVector(self.basis, acc[l])
            if not vec.is_zero():
                comps[l] = vec
        return self._completion(comps, degrees, certs)

    def dense_values(self, a: Sequence, zs: Sequence, l: int) -> np.ndarray:
        """Degree-``l`` component of ``mu_continued(a, z)`` at many numeric points.

        Rows follow ``zs``; columns follow ``basis.keys(l)``.
        """
        a = [_as_vector(self.V, x) for x in a]
        g, P = self.polynomial(a, l)
        keys = self.basis.keys(l)
        pts = np.array([[complex(x) for x in z] for z in zs], dtype=complex).reshape(len(zs), len(a))
        out = np.zeros((len(zs), len(keys)), dtype=complex)
        if not P.terms:
            return out
        for i, j in itertools.combinations(range(len(a)), 2):
            if np.any(pts[:, i] == pts[:, j]):
                raise DiagonalError("insertion points coincide")
        for alpha, vec in P.terms.items():
            mono = np.prod(pts ** np.array(alpha), axis=1) if alpha else np.ones(len(zs))
            coeffs = np.array([complex(c) for c in vec.as_dense(l)])
            out += np.outer(mono, coeffs)
        gz = np.ones(len(zs), dtype=complex)
        for (i, j), n in g.orders.items():
            gz = gz * (pts[:, i] - pts[:, j]) ** n
        return out / gz[:, None]

    def mu(self, a: Sequence, z: Sequence, degrees=None) -> WindowedCompletion:
        """Evaluate with the ordered sum when the points allow it, else by continuation."""
        if len(z) >= 2 and is_ordered(z) and not all(is_exact(x) for x in z):
            return self.mu_ordered(a, z, degrees)
        return self.mu_continued(a, z, degrees)

    def mu_vector_last(self, a: Sequence, v: GradedVector, z: Sequence, degrees=None):
        """``mu(a_1, z_1, ..., v, z_last)`` for a numeric vector ``v``, split over its keys."""
        out = None
        for key, c in v.coeffs.items():
            val = self.mu_continued(list(a) + [self.basis.vector(key)], z, degrees) * c
            out = val if out is None else out + val
        if out is None:
            out = self._completion({}, self._degrees(degrees))
        return out


# -- comparison helpers ---------------------------------------------------------------


def relative_residual(x: WindowedCompletion, y: WindowedCompletion, degrees=None) -> float:
    """Max over degrees of ``|x_l - y_l| / max(|y_l|, 1)``."""
    degrees = list(x.window.degrees()) if degrees is None else degrees
    worst = 0.0
    for l in degrees:
        xl = x.components.get(l, GradedVector(x.basis))
        yl = y.components.get(l, GradedVector(y.basis))
        diff = xl - yl
        d = float(abs(complex(max(diff.coeffs.values(), key=lambda c: abs(c))))) if diff.coeffs else 0.0
        worst = max(worst, d / max(yl.norm(), 1.0))
    return worst


# -- axiom checks -----------------------------------------------------------------------


def check_permutation(G: GeometricStructure, a: Sequence, z: Sequence, sigma: Sequence, tol: float = 1e-8):
    a = [_as_vector(G.V, x) for x in a]
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(len(a))):
        raise ValueError(f"{sigma} is not a permutation of {len(a)} insertions")
    ref = G.mu_continued(a, z)
    other = G.mu_continued([a[s] for s in sigma], [z[s] for s in sigma])
    res = relative_residual(other, ref)
    return CheckReport("permutation", "pass" if res <= tol else "fail", res, {"sigma": list(sigma)})


def check_equivariance(G: GeometricStructure, a: Sequence, z: Sequence, lam, tol: float = 1e-8):
    if lam == 0:
        raise InvalidScalar("equivariance needs a nonzero scalar")
    a = [_as_vector(G.V, x) for x in a]
    lhs = scale_action(lam, G.mu_continued(a, z))
    rhs = G.mu_continued([scale_action(lam, x) for x in a], [lam * x for x in z])
    res = relative_residual(lhs, rhs)
    return CheckReport("equivariance", "pass" if res <= tol else "fail", res, {"lambda": lam})


def check_insertion_at_zero(G: GeometricStructure, a) -> CheckReport:
    """``mu(a, 0) = a`` exactly, on both evaluation paths."""
    a = _as_vector(G.V, a)
    target = {l: a.component(l) for l in G.window.degrees()}
    got = G.mu_continued([a], [0])
    bad = [l for l in G.window.degrees() if got.component(l) != target[l]]
    direct = G.mu_ordered([a], [0])
    bad += [l for l in G.window.degrees() if direct.component(l) != target[l].to_numeric()]
    return CheckReport("insertion_at_zero", "fail" if bad else "pass", 0.0 if not bad else 1.0,
                       {"bad_degrees": sorted(set(bad))})


def check_meromorphicity(G: GeometricStructure, a, b) -> int:
    """Pole order ``N`` of ``mu(a, z, b, 0)`` at ``z = 0``; polynomiality verified exactly."""
    a, b = _as_vector(G.V, a), _as_vector(G.V, b)
    for x in a.coeffs:
        for y in b.coeffs:
            for l in G.window.degrees():
                w = G.witness((x, y), l)
                if not w.ok:
                    raise AxiomViolation(
                        f"p_{l}(g f) for ({G.basis.label(x)}, {G.basis.label(y)}) is not a polynomial"
                    )
    if not a.coeffs or not b.coeffs:
        return 0
    return G.pole_poly([list(a.coeffs), list(b.coeffs)]).order(0, 1)


@dataclass
class AssociativityReport:
    residual: float
    terms: int
    tail: float
    ratio: float
    term_norms: list
    status: str

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "residual": self.residual,
            "terms": self.terms,
            "certificate": {"ratio": float(self.ratio), "tail": float(self.tail)},
        }


def check_associativity(
    G: GeometricStructure,
    a: Sequence,
    z: Sequence,
    b: Sequence,
    w: Sequence,
    kmax: int | None = None,
    tail_tol: float = 1e-8,
    cap: int = 40,
    tol: float = 1e-6,
) -> AssociativityReport:
    """Compare ``sum_k mu(a, z, p_k mu(b, w), z_{m+1})`` with ``mu(a, z, b, w + z_{m+1})``.

    The inner degree sum runs from the lowest degree up to ``kmax`` when given,
    otherwise until the geometric tail of the term norms is below ``tail_tol``
    (or ``cap`` degrees).
    """
    a = [_as_vector(G.V, x) for x in a]
    b = [_as_vector(G.V, x) for x in b]
    z = tuple(z)
    w = tuple(w)
    m = len(a)
    if len(z) != m + 1 or len(w) != len(b):
        raise ValueError("need m+1 points z and one point per b")
    if w:
        reach = max(abs(complex(x)) for x in w)
        gap = min((abs(complex(z[j] - z[m])) for j in range(m)), default=math.inf)
        if not reach < gap:
            raise DomainError("associativity needs max |w_i| < min |z_j - z_{m+1}|")
    degrees = list(G.window.degrees())
    rhs = G.mu_continued(a + b, list(z[:m]) + [x + z[m] for x in w], degrees)
    lo = G.basis.min_degree
    top = kmax if kmax is not None else cap
    total = None
    norms = []
    ratio, tail = math.inf, math.inf
    for k in range(lo, top + 1):
        inner = G.mu(b, w, [k]).component(k) if b else G.mu_continued([], [], [k]).component(k)
        term = G.mu_vector_last(a, inner, z, degrees)
        total = term if total is None else total + term
        norms.append(term.norm())
        ratio, tail = geometric_tail(norms)
        if kmax is None and len(norms) >= 3 and tail <= tail_tol:
            break
    res = relative_residual(total, rhs)
    status = "pass" if res <= tol and (kmax is not None or tail <= max(tol, tail_tol)) else "fail"
    return AssociativityReport(res, len(norms), tail, ratio, norms, status)


# -- OPE ----------------------------------------------------------------------------------


def ope_expand(G: GeometricStructure, a: Sequence, i: int, j: int, order: int) -> list:
    """Leading ``order`` OPE terms of insertion ``i`` into insertion ``j``.

    Returns ``(k, c_k, fn)`` where ``c_k = a_i(k) a_j`` and ``fn(z)`` evaluates
    ``mu(..., c_k, z_j, ...) (z_i - z_j)^{-k-1}`` with insertion ``i`` removed;
    ``k`` runs downward from ``N - 1`` where ``a_i(n) a_j = 0`` for ``n >= N``.
    """
    if not i < j:
        raise IndexError("OPE needs i < j")
    a = [_as_vector(G.V, x) for x in a]
    if j >= len(a):
        raise IndexError("insertion index out of range")
    N = G.pole_poly([list(a[i].coeffs), list(a[j].coeffs)]).order(0, 1) if a[i].coeffs and a[j].coeffs else 0
    out = []
    for k in range(N - 1, N - 1 - order, -1):
        c = G.V.apply_mode(a[i], k, a[j])
        rest = [x for n, x in enumerate(a) if n != i]
        pos = j - 1

        def fn(z, k=k, c=c, rest=rest, pos=pos):
            zr = [x for n, x in enumerate(z) if n != i]
            args = list(rest)
            args[pos] = c
            val = G.mu_continued(args, zr)
            d = z[i] - z[j]
            if not (is_exact(d) and all(is_exact(x) for x in z)):
                d = complex(d)
            return val * _power(d, -k - 1)

        out.append((k, c, fn))
    return out


def in_ope_region(z: Sequence, i: int, j: int) -> bool:
    """``|z_i - z_j| < min_{l != i, j} |z_l - z_j|``."""
    d = abs(complex(z[i] - z[j]))
    others = [abs(complex(z[l] - z[j])) for l in range(len(z)) if l not in (i, j)]
    return all(d < o for o in others)


def ope_partial_residuals(G: GeometricStructure, a: Sequence, z: Sequence, i: int, j: int, orders: Sequence[int]) -> dict:
    """Residual of the OPE partial sum against ``mu_continued`` for each order."""
    if not in_ope_region(z, i, j):
        raise DomainError("point lies outside the OPE region U_ij")
    ref = G.mu_continued(a, z)
    terms = ope_expand(G, a, i, j, max(orders))
    out = {}
    for n in orders:
        total = None
        for _, _, fn in terms[:n]:
            v = fn(z)
            total = v if total is None else total + v
        out[n] = relative_residual(total, ref)
    return out


# -- affine action ------------------------------------------------------------------------


def translate(G: GeometricStructure, w, x: WindowedCompletion) -> WindowedCompletion:
    """``w.x = sum_k mu(p_k(x), w)``, exact within the window for bounded-below ``x``."""
    if not x.below_window_zero:
        raise WindowViolation("translation needs an element vanishing below its window")
    degrees = list(x.window.degrees())
    out = WindowedCompletion(G.basis, x.window, {}, True)
    for k in degrees:
        v = x.component(k)
        if v.is_zero():
            continue
        out = out + G.mu_vector_last([], v, [w], degrees)
    return out


def affine_action(G: GeometricStructure, lam, w, x: WindowedCompletion) -> WindowedCompletion:
    """Action of ``(lam, w)`` in ``C^x ⋉ C``: translate by ``w``, then scale by ``lam``."""
    if lam == 0:
        raise InvalidScalar("affine action needs a nonzero scalar")
    return scale_action(lam, translate(G, w, x))


# -- sampling -------------------------------------------------------------------------------


def sample_points(m: int, count: int = 8, seed: int = 42, ordered: bool = True) -> list:
    """Deterministic points with ``|z_1|`` in [1, 2] and successive modulus ratios in [0.15, 0.35].

    Anti-ordered points are the same tuples reversed.
    """
    rng = random.Random(seed * 1000 + m)
    pts = []
    for _ in range(count):
        r = rng.uniform(1.0, 2.0)
        z = []
        for _ in range(m):
            theta = rng.uniform(0, 2 * math.pi)
            z.append(complex(r * math.cos(theta), r * math.sin(theta)))
            r *= rng.uniform(0.15, 0.35)
        pts.append(tuple(z) if ordered else tuple(reversed(z)))
    return pts
