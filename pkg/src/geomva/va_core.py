"""Z-graded vertex algebras given by mode rules, and exact axiom checkers.

A ``VertexAlgebra`` carries a mode rule valid in every degree; the
``ModeTable`` is its materialization on a degree window with mode cap ``K``.
All checks are exact and report "verified within (window, K)".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Hashable

import sympy

from .errors import (
    LocalityUndetermined,
    ModeCapError,
    StructuralInconsistency,
    WindowViolation,
)
from .grading import DegreeWindow, GradedBasis, GradedVector
from .scalars import binomial

Key = Hashable


def _axpy(target: dict, source: dict, scale) -> None:
    get = target.get
    for key, c in source.items():
        v = get(key, 0) + scale * c
        if v:
            target[key] = v
        else:
            target.pop(key, None)


class VertexAlgebra:
    """Data ``(V, Y, T, |0>)``.

    ``mode_rule(a, k, c)`` returns the sparse dict of ``a_(k) c`` for basis
    keys ``a`` and ``c``; ``translation_rule(a)`` returns ``T a``.
    """

    def __init__(
        self,
        name: str,
        basis: GradedBasis,
        vacuum: dict,
        mode_rule: Callable[[Key, int, Key], dict],
        translation_rule: Callable[[Key], dict],
        window: DegreeWindow,
        K: int,
    ):
        self.name = name
        self.basis = basis
        self._vacuum = dict(vacuum)
        self._mode_rule = mode_rule
        self._translation_rule = translation_rule
        self.window = window.clamp(basis.min_degree)
        self.K = K
        self._modes: dict = {}
        self._translations: dict = {}

    @property
    def vacuum(self) -> GradedVector:
        return GradedVector(self.basis, self._vacuum)

    def degree(self, key: Key) -> int:
        return self.basis.degree(key)

    def window_keys(self) -> list:
        return list(self.basis.keys_in(self.window))

    # -- raw dict level, unrestricted in degree --------------------------------

    def mode_dict(self, a: Key, k: int, c: Key) -> dict:
        """``a_(k) c`` for basis keys; cached, callers must not mutate the result."""
        key = (a, k, c)
        out = self._modes.get(key)
        if out is None:
            if self.degree(a) + self.degree(c) - k - 1 < self.basis.min_degree:
                out = {}
            else:
                out = self._mode_rule(a, k, c)
            self._modes[key] = out
        return out

    def mode_on(self, a: dict, k: int, c: dict) -> dict:
        out: dict = {}
        get = out.get
        for ak, ac in a.items():
            for ck, cc in c.items():
                w = ac * cc
                for key, v in self.mode_dict(ak, k, ck).items():
                    out[key] = get(key, 0) + w * v
        return {key: v for key, v in out.items() if v}

    def translate_dict(self, v: dict) -> dict:
        out: dict = {}
        for key, c in v.items():
            t = self._translations.get(key)
            if t is None:
                t = self._translations[key] = self._translation_rule(key)
            _axpy(out, t, c)
        return out

    # -- vector level ------------------------------------------------------------

    def apply_mode(self, a: GradedVector, k: int, b: GradedVector) -> GradedVector:
        """Unrestricted ``a_(k) b`` (no window or cap checks)."""
        return GradedVector(self.basis, self.mode_on(a.coeffs, k, b.coeffs))

    def translate(self, v: GradedVector) -> GradedVector:
        return GradedVector(self.basis, self.translate_dict(v.coeffs))

    @cached_property
    def mode_table(self) -> "ModeTable":
        return ModeTable.build(self)

    def __repr__(self):
        return f"VertexAlgebra({self.name!r}, window={self.window}, K={self.K})"


@dataclass
class ModeTable:
    """Windowed mode data: ``a_(k) c`` for basis ``a, c`` in the window, ``|k| <= K``,
    output degree in the window."""

    window: DegreeWindow
    K: int
    entries: dict = field(default_factory=dict)

    @classmethod
    def build(cls, V: VertexAlgebra) -> "ModeTable":
        table = cls(V.window, V.K)
        keys = V.window_keys()
        for a in keys:
            for c in keys:
                for k in range(-V.K, V.K + 1):
                    out_deg = V.degree(a) + V.degree(c) - k - 1
                    if out_deg in V.window:
                        table.entries[(a, k, c)] = V.mode_dict(a, k, c)
        return table

    def __len__(self):
        return len(self.entries)

    def items(self):
        return self.entries.items()


@dataclass
class CheckReport:
    name: str
    status: str
    residual: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def _residual(d: dict) -> float:
    return float(max((abs(c) for c in d.values()), default=0))


def mode_apply(V: VertexAlgebra, a: GradedVector, k: int, b: GradedVector) -> GradedVector:
    """Windowed, capped ``a_(k) b``."""
    if abs(k) > V.K:
        raise ModeCapError(f"|k| = {abs(k)} exceeds cap K = {V.K}")
    for v in (a, b):
        outside = [d for d in v.support_degrees() if d not in V.window]
        if outside:
            raise WindowViolation(f"input support in degrees {outside} outside {V.window}")
    out = V.apply_mode(a, k, b)
    outside = [d for d in out.support_degrees() if d not in V.window]
    if outside:
        raise WindowViolation(f"a_({k}) b has support in degrees {outside} outside {V.window}")
    return out


def _homogeneous(V: VertexAlgebra, v: GradedVector) -> int:
    d = v.homogeneous_degree()
    if d is None:
        if v.is_zero():
            return V.basis.min_degree
        raise ValueError("expected a homogeneous vector")
    return d


def locality_coefficient(V: VertexAlgebra, a: dict, b: dict, c: dict, N: int, p: int, q: int, cache=None) -> dict:
    """Coefficient of ``x^{-p-1} y^{-q-1}`` in ``(x-y)^N [Y(a,x), Y(b,y)] c``."""
    out: dict = {}
    for s in range(N + 1):
        m, n = p + N - s, q + s
        key = (m, n)
        comm = cache.get(key) if cache is not None else None
        if comm is None:
            comm = dict(V.mode_on(a, m, V.mode_on(b, n, c)))
            _axpy(comm, V.mode_on(b, n, V.mode_on(a, m, c)), -1)
            if cache is not None:
                cache[key] = comm
        _axpy(out, comm, binomial(N, s) * (-1) ** s)
    return out


class _DiffRow:
    """Commutators ``[a_(m), b_(sigma-m)] c`` for ``m = -R, -R+1, ...`` and their forward differences."""

    __slots__ = ("levels",)

    def __init__(self):
        self.levels: list = [[]]

    def extend(self, value: dict) -> None:
        self.levels[0].append(value)
        for lvl in range(1, len(self.levels)):
            below = self.levels[lvl - 1]
            if len(below) < 2:
                break
            d = dict(below[-1])
            _axpy(d, below[-2], -1)
            self.levels[lvl].append(d)

    def add_level(self) -> None:
        below = self.levels[-1]
        row = []
        for i in range(len(below) - 1):
            d = dict(below[i + 1])
            _axpy(d, below[i], -1)
            row.append(d)
        self.levels.append(row)


def check_locality(
    V: VertexAlgebra,
    a: GradedVector,
    b: GradedVector,
    N_cap: int | None = None,
    coefficient_range: int | None = None,
) -> int:
    """Smallest ``N <= N_cap`` with ``(x-y)^N [Y(a,x),Y(b,y)] = 0`` on the window.

    Coefficients ``x^{-p-1} y^{-q-1}`` with ``|p|, |q| <= coefficient_range``
    (default ``K``) are tested against every windowed basis vector, keeping
    those whose output degree lies in the window.

    Along an anti-diagonal ``m + n = sigma`` that coefficient is the ``N``-th
    forward difference at ``m = p`` of ``[a_(m), b_(sigma-m)] c``, so rows of
    commutators are extended lazily as ``N`` grows.
    """
    N_cap = V.K if N_cap is None else N_cap
    R = V.K if coefficient_range is None else coefficient_range
    da, db = _homogeneous(V, a), _homogeneous(V, b)
    tasks = []
    for c in V.window_keys():
        dc = V.degree(c)
        for out_deg in V.window.degrees():
            tasks.append((c, da + db + dc - out_deg - 2))
    rows: dict = {}
    A_cache: dict = {}
    B_cache: dict = {}

    def side(cache, vec, k, c):
        key = (k, c)
        if key not in cache:
            cache[key] = V.mode_on(vec.coeffs, k, {c: 1})
        return cache[key]

    def commutator(c, m, n) -> dict:
        out: dict = {}
        bc = side(B_cache, b, n, c)
        if bc:
            _axpy(out, V.mode_on(a.coeffs, m, bc), 1)
        ac = side(A_cache, a, m, c)
        if ac:
            _axpy(out, V.mode_on(b.coeffs, n, ac), -1)
        return out

    for N in range(N_cap + 1):
        ok = True
        for c, sigma in tasks:
            # positions p with |p|, |q| <= R where q = sigma - N - p
            p_lo, p_hi = max(-R, sigma - N - R), min(R, sigma - N + R)
            if p_lo > p_hi:
                continue
            row = rows.get((c, sigma))
            if row is None:
                row = rows[(c, sigma)] = _DiffRow()
            while len(row.levels) <= N:
                row.add_level()
            while len(row.levels[0]) < p_hi + N + R + 1:
                m = -R + len(row.levels[0])
                row.extend(commutator(c, m, sigma - m))
            level = row.levels[N]
            if any(level[p + R] for p in range(p_lo, p_hi + 1)):
                ok = False
                break
        if ok:
            return N
    raise LocalityUndetermined(f"no locality order <= {N_cap} verified for ({a!r}, {b!r})")


def check_translation(V: VertexAlgebra, a: GradedVector) -> CheckReport:
    """``T|0> = 0`` and ``[T, a_(k)] = -k a_(k-1)`` on windowed basis vectors."""
    worst: dict = {}
    t_vac = V.translate_dict(V._vacuum)
    residual = _residual(t_vac)
    da = _homogeneous(V, a)
    checked = 0
    for c in V.window_keys():
        dc = V.degree(c)
        tc = V.translate_dict({c: 1})
        for k in range(-V.K + 1, V.K + 1):
            if da + dc - k not in V.window:
                continue
            lhs = V.translate_dict(V.mode_on(a.coeffs, k, {c: 1}))
            _axpy(lhs, V.mode_on(a.coeffs, k, tc), -1)
            _axpy(lhs, V.mode_on(a.coeffs, k - 1, {c: 1}), k)
            checked += 1
            r = _residual(lhs)
            if r > residual:
                residual = r
                worst = {"k": k, "c": V.basis.label(c)}
    status = "pass" if residual == 0 else "fail"
    return CheckReport("translation", status, residual, {"checked": checked, **worst})


def check_creation(V: VertexAlgebra, a: GradedVector) -> CheckReport:
    """``a_(-1)|0> = a`` and ``a_(k)|0> = 0`` for ``0 <= k <= K``."""
    vac = V._vacuum
    diff = V.mode_on(a.coeffs, -1, vac)
    _axpy(diff, a.coeffs, -1)
    residual = _residual(diff)
    for k in range(0, V.K + 1):
        residual = max(residual, _residual(V.mode_on(a.coeffs, k, vac)))
    return CheckReport("creation", "pass" if residual == 0 else "fail", residual)


def check_vacuum(V: VertexAlgebra) -> CheckReport:
    """``|0>_(k) = delta_{k,-1} id`` on all windowed basis vectors, ``|k| <= K``."""
    residual = 0.0
    checked = 0
    for c in V.window_keys():
        for k in range(-V.K, V.K + 1):
            out = dict(V.mode_on(V._vacuum, k, {c: 1}))
            if k == -1:
                _axpy(out, {c: 1}, -1)
            residual = max(residual, _residual(out))
            checked += 1
    return CheckReport("vacuum", "pass" if residual == 0 else "fail", residual, {"checked": checked})


def derive_T_and_vacuum(V: VertexAlgebra) -> tuple:
    """Reconstruct ``T`` from ``Ta = a_(-2)|0>`` and the vacuum from ``Y(a,x) = id``.

    Raises ``StructuralInconsistency`` if either disagrees with the stored data.
    """
    T = {}
    for a in V.window_keys():
        derived = V.mode_on({a: 1}, -2, V._vacuum)
        stored = V.translate_dict({a: 1})
        diff = dict(derived)
        _axpy(diff, stored, -1)
        if diff:
            raise StructuralInconsistency(
                f"T{V.basis.label(a)} != {V.basis.label(a)}_(-2)|0>: residual {_residual(diff)}"
            )
        T[a] = GradedVector(V.basis, derived)
    # Y(x,z) = id forces x_(-1)|0> = |0>; solve that linear system on the window.
    keys = V.window_keys()
    images = [V.mode_on({a: 1}, -1, V._vacuum) for a in keys]
    rows = sorted({r for img in images for r in img} | set(V._vacuum), key=repr)
    M = sympy.Matrix([[_to_sympy(img.get(r, 0)) for img in images] for r in rows])
    rhs = sympy.Matrix([_to_sympy(V._vacuum.get(r, 0)) for r in rows])
    sol, params = M.gauss_jordan_solve(rhs)
    if params.shape[0] != 0:
        raise StructuralInconsistency("vacuum not uniquely determined by Y on the window")
    candidate = {a: sympy.Rational(x) for a, x in zip(keys, sol) if x != 0}
    cand = {a: _from_sympy(x) for a, x in candidate.items()}
    diff = dict(cand)
    _axpy(diff, V._vacuum, -1)
    if diff:
        raise StructuralInconsistency("the element with Y = id differs from the stored vacuum")
    if not check_vacuum(V).passed:
        raise StructuralInconsistency("stored vacuum does not satisfy Y(|0>, x) = id")
    return T, GradedVector(V.basis, cand)


def _to_sympy(x):
    if isinstance(x, int):
        return sympy.Integer(x)
    if isinstance(x, Fraction):
        return sympy.Rational(x.numerator, x.denominator)
    return sympy.nsimplify(complex(x))


def _from_sympy(x):
    x = sympy.Rational(x)
    return int(x) if x.q == 1 else Fraction(int(x.p), int(x.q))


def vanishing_order(V: VertexAlgebra, a: GradedVector, b: GradedVector) -> int:
    """Minimal ``N`` with ``a_(n) b = 0`` for all ``n >= N`` (within the cap)."""
    da, db = _homogeneous(V, a), _homogeneous(V, b)
    bound = da + db - 1 - V.basis.min_degree  # a_(n) b = 0 for n > bound by degree
    if bound > V.K:
        raise LocalityUndetermined(f"degree bound {bound} exceeds mode cap {V.K}")
    for n in range(bound, -V.K - 1, -1):
        if V.mode_on(a.coeffs, n, b.coeffs):
            return n + 1
    return -V.K


def locality_pairs(V: VertexAlgebra) -> list:
    """Unordered basis pairs whose total degree fits in the window.

    The tested coefficient set is symmetric under ``(a, p) <-> (b, q)``, so
    ``check_locality(a, b) == check_locality(b, a)`` and one order suffices.
    """
    keys = V.window_keys()
    return [
        (a, b)
        for i, a in enumerate(keys)
        for b in keys[i:]
        if V.degree(a) + V.degree(b) <= V.window.hi
    ]


def axiom_suite(V: VertexAlgebra) -> list:
    """Run vacuum, creation, translation, locality and structure checks."""
    reports = [check_vacuum(V)]
    basis = V.basis
    creation = [check_creation(V, basis.vector(a)) for a in V.window_keys()]
    reports.append(_merge("creation", creation))
    translation = [check_translation(V, basis.vector(a)) for a in V.window_keys()]
    reports.append(_merge("translation", translation))
    orders = {}
    undetermined = []
    for a, b in locality_pairs(V):
        try:
            orders[(basis.label(a), basis.label(b))] = check_locality(V, basis.vector(a), basis.vector(b))
        except LocalityUndetermined:
            undetermined.append((basis.label(a), basis.label(b)))
    if undetermined:
        loc = CheckReport("locality", "undetermined", 0.0, {"undetermined": undetermined})
    else:
        loc = CheckReport("locality", "pass", 0.0, {})
    loc.details["orders"] = {f"{x},{y}": n for (x, y), n in orders.items()}
    reports.append(loc)
    try:
        derive_T_and_vacuum(V)
        reports.append(CheckReport("structure", "pass"))
    except StructuralInconsistency as exc:
        reports.append(CheckReport("structure", "fail", details={"error": str(exc)}))
    return reports


def _merge(name: str, reports: list) -> CheckReport:
    residual = max((r.residual for r in reports), default=0.0)
    status = "pass" if all(r.passed for r in reports) else "fail"
    return CheckReport(name, status, residual, {"count": len(reports)})
