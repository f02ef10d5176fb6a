"""Concrete vertex algebras: trivial, commutative, and the Heisenberg free boson.

The free boson's mode rule is built recursively from the generator modes
``b_m`` via the iterate formula for ``(b_(-n) v)_(k)``.  ``fock_mode_oracle``
computes the same modes along an independent route (normally ordered
products of derivative fields, annihilators pushed through creators one
commutator at a time).
"""

from __future__ import annotations

import itertools
from math import factorial

from .errors import ConfigError, WindowViolation
from .grading import DegreeWindow, GradedBasis
from .scalars import binomial
from .va_core import VertexAlgebra, _axpy

MODELS = ("trivial", "commutative", "free_boson")


def partitions(n: int, max_part: int | None = None):
    """Partitions of ``n`` as descending tuples, in reverse-lexicographic order."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def _insert_part(lam: tuple, n: int) -> tuple:
    return tuple(sorted(lam + (n,), reverse=True))


def _remove_part(lam: tuple, n: int) -> tuple:
    i = lam.index(n)
    return lam[:i] + lam[i + 1:]


# --- trivial -----------------------------------------------------------------------


def trivial_basis() -> GradedBasis:
    return GradedBasis(
        "trivial",
        degree_of=lambda key: 0,
        enumerate_degree=lambda k: [()] if k == 0 else [],
        label_of=lambda key: "|0>",
        min_degree=0,
        aliases={"vac": (), "1": ()},
    )


def build_trivial(window: DegreeWindow, K: int) -> VertexAlgebra:
    def mode_rule(a, k, c):
        return {(): 1} if k == -1 else {}

    return VertexAlgebra("trivial", trivial_basis(), {(): 1}, mode_rule, lambda key: {}, window, K)


# --- commutative -------------------------------------------------------------------


class CommutativeModel:
    """Differential polynomials in one generator ``u`` of degree ``d``.

    A basis key is the descending tuple ``(j_1, ..., j_r)`` standing for the
    monomial ``u[j_1] ... u[j_r]`` in the divided derivatives
    ``u[j] = T^j u / j!``; its degree is ``sum(d + j_i)``.  In this basis
    ``T u[j] = (j+1) u[j+1]`` and every structure constant is an integer.
    ``Y(a, z) c = (e^{zT} a) c``.
    """

    def __init__(self, d: int = 1):
        if d < 1:
            raise ConfigError("generator degree must be at least 1")
        self.d = d
        self.basis = GradedBasis(
            f"commutative(d={d})",
            degree_of=lambda key: sum(d + j for j in key),
            enumerate_degree=self._enumerate,
            label_of=self._label,
            min_degree=0,
            aliases={"u": (0,), "vac": (), "1": ()},
        )
        self._tpow: dict = {}

    def _enumerate(self, k: int):
        for lam in partitions(k):
            if all(part >= self.d for part in lam):
                yield tuple(part - self.d for part in lam)

    @staticmethod
    def _label(key) -> str:
        if not key:
            return "|0>"
        return "".join(f"u[{j}]" for j in key)

    @staticmethod
    def derivation(key) -> dict:
        out: dict = {}
        for i, j in enumerate(key):
            new = tuple(sorted(key[:i] + (j + 1,) + key[i + 1:], reverse=True))
            out[new] = out.get(new, 0) + j + 1
        return out

    def divided_power(self, key, n: int) -> dict:
        """``T^n key / n!`` (integral in the divided-derivative basis)."""
        if (key, n) not in self._tpow:
            v = {key: 1}
            for _ in range(n):
                nxt: dict = {}
                for kk, c in v.items():
                    _axpy(nxt, self.derivation(kk), c)
                v = nxt
            f = factorial(n)
            self._tpow[(key, n)] = {kk: c // f for kk, c in v.items()}
        return self._tpow[(key, n)]

    def mode_rule(self, a, k, c) -> dict:
        if k >= 0:
            return {}
        out: dict = {}
        for kk, coeff in self.divided_power(a, -k - 1).items():
            prod = tuple(sorted(kk + c, reverse=True))
            out[prod] = out.get(prod, 0) + coeff
        return {kk: v for kk, v in out.items() if v}

    def build(self, window: DegreeWindow, K: int) -> VertexAlgebra:
        return VertexAlgebra(
            "commutative", self.basis, {(): 1}, self.mode_rule, self.derivation, window, K
        )


# --- free boson --------------------------------------------------------------------


def heisenberg(m: int, lam: tuple) -> dict:
    """``b_m`` on the Fock state ``b_{-n_1} ... b_{-n_r}|0>`` with ``[b_m, b_n] = m delta_{m+n,0}``."""
    if m < 0:
        return {_insert_part(lam, -m): 1}
    if m == 0:
        return {}
    mult = lam.count(m)
    if not mult:
        return {}
    return {_remove_part(lam, m): m * mult}


def fock_label(lam: tuple) -> str:
    if not lam:
        return "|0>"
    return "".join(f"b{-n}" for n in lam)


def fock_basis() -> GradedBasis:
    return GradedBasis(
        "free_boson",
        degree_of=sum,
        enumerate_degree=partitions,
        label_of=fock_label,
        min_degree=0,
        aliases={"b": (1,), "vac": (), "1": ()},
    )


class FreeBosonModel:
    """Heisenberg vertex algebra at level 1 on the zero-momentum Fock space."""

    def __init__(self):
        self.basis = fock_basis()
        self.V: VertexAlgebra | None = None

    def _mode(self, a, k, c) -> dict:
        return self.V.mode_dict(a, k, c)

    def _mode_vec(self, a, k, vec: dict) -> dict:
        out: dict = {}
        for key, coeff in vec.items():
            _axpy(out, self._mode(a, k, key), coeff)
        return out

    def mode_rule(self, a, k, c) -> dict:
        # (b_(-n) v)_(k) c = sum_j C(n+j-1, j) [b_{-n-j} v_(k+j) c - (-1)^n v_(k-n-j) b_j c]
        if not a:
            return {c: 1} if k == -1 else {}
        n, v = a[0], a[1:]
        dv, dc = sum(v), sum(c)
        out: dict = {}
        for j in range(0, max(dv + dc - k, 0) + 1):
            inner = self._mode(v, k + j, c)
            if not inner:
                continue
            w = binomial(n + j - 1, j)
            for key, coeff in inner.items():
                _axpy(out, heisenberg(-n - j, key), w * coeff)
        sign = -1 if n % 2 == 0 else 1
        for j in range(1, dc + 1):
            lowered = heisenberg(j, c)
            if not lowered:
                continue
            w = sign * binomial(n + j - 1, j)
            _axpy(out, self._mode_vec(v, k - n - j, lowered), w)
        return out

    @staticmethod
    def translation_rule(lam) -> dict:
        # T b_{-n} = n b_{-n-1}, extended as a derivation
        out: dict = {}
        for i, n in enumerate(lam):
            if i and lam[i - 1] == n:
                continue
            mult = lam.count(n)
            new = _insert_part(_remove_part(lam, n), n + 1)
            out[new] = out.get(new, 0) + n * mult
        return out

    def build(self, window: DegreeWindow, K: int) -> VertexAlgebra:
        self.V = VertexAlgebra(
            "free_boson", self.basis, {(): 1}, self.mode_rule, self.translation_rule, window, K
        )
        return self.V


def _push_annihilator(m: int, word: tuple) -> list:
    """``b_m word |0>`` for ``m > 0`` by moving ``b_m`` rightwards through creators."""
    if not word:
        return []
    head, rest = word[0], word[1:]
    out = [(c, (head,) + w) for c, w in _push_annihilator(m, rest)]
    if head == m:
        out.append((m, rest))
    return out


def _compositions(total: int, parts: int, low: int = 1):
    """Tuples of ``parts`` integers ``>= low`` summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(low, total - low * (parts - 1) + 1):
        for rest in _compositions(total - first, parts - 1, low):
            yield (first,) + rest


def fock_mode_oracle(lam: tuple, k: int, state: tuple, window: DegreeWindow | None = None) -> dict:
    """``k``-th mode of ``b_{-n_1}...b_{-n_r}|0>`` applied to a Fock state, by Wick ordering.

    The field is ``:prod_i d^{(n_i - 1)} b(z):`` with
    ``d^{(n-1)} b(z) = sum_m C(-m-1, n-1) b_m z^{-m-n}``; the coefficient of
    ``z^{-k-1}`` is summed over normally ordered words with creators
    (``m < 0``) to the left of annihilators (``m > 0``).  With ``window``,
    inputs or an output degree outside it raise ``WindowViolation``.
    """
    if window is not None:
        for d in (sum(lam), sum(state), sum(lam) + sum(state) - k - 1):
            if d not in window and d >= 0:
                raise WindowViolation(f"degree {d} outside window {window}")
    r = len(lam)
    if r == 0:
        return {state: 1} if k == -1 else {}
    target = k + 1 - sum(lam)  # sum of the m_i
    deg = sum(state)
    out: dict = {}
    for kinds in itertools.product((1, -1), repeat=r):
        ann = [i for i in range(r) if kinds[i] > 0]
        cre = [i for i in range(r) if kinds[i] < 0]
        for ann_total in (range(len(ann), deg + 1) if ann else (0,)):
            cre_total = target - ann_total
            if cre and cre_total > -len(cre):
                continue
            if not cre and cre_total != 0:
                continue
            for ann_vals in _compositions(ann_total, len(ann)):
                for cre_vals in _compositions(-cre_total, len(cre)):
                    ms = [0] * r
                    for i, v in zip(ann, ann_vals):
                        ms[i] = v
                    for i, v in zip(cre, cre_vals):
                        ms[i] = -v
                    weight = 1
                    for m, n in zip(ms, lam):
                        weight *= binomial(-m - 1, n - 1)
                    if not weight:
                        continue
                    words = [(1, tuple(state))]
                    for i in ann:
                        words = [
                            (c * c2, w2) for c, w in words for c2, w2 in _push_annihilator(ms[i], w)
                        ]
                    for c, w in words:
                        key = tuple(sorted(w + tuple(-ms[i] for i in cre), reverse=True))
                        out[key] = out.get(key, 0) + weight * c
    return {key: c for key, c in out.items() if c}


def build_model(name: str, window: DegreeWindow | None = None, K: int = 7, **params) -> VertexAlgebra:
    """Construct one of the shipped vertex algebras."""
    window = window or DegreeWindow(0, 6)
    if name == "trivial":
        return build_trivial(window, K)
    if name == "commutative":
        return CommutativeModel(int(params.get("d", 1))).build(window, K)
    if name == "free_boson":
        return FreeBosonModel().build(window, K)
    raise ConfigError(f"unknown model {name!r}; choose from {', '.join(MODELS)}")
