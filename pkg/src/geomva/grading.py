"""Z-graded vector spaces with explicit bases, degree windows and truncated completions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Iterator, Mapping

from .errors import InvalidScalar, WindowViolation
from .scalars import is_exact

Key = Hashable


@dataclass(frozen=True)
class DegreeWindow:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise WindowViolation(f"empty window [{self.lo},{self.hi}]")

    def __contains__(self, k: int) -> bool:
        return self.lo <= k <= self.hi

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def clamp(self, min_degree: int) -> "DegreeWindow":
        return DegreeWindow(max(self.lo, min_degree), max(self.hi, min_degree))

    @classmethod
    def parse(cls, text: str) -> "DegreeWindow":
        lo, hi = text.split(":")
        return cls(int(lo), int(hi))

    def __str__(self):
        return f"{self.lo}:{self.hi}"


class GradedBasis:
    """Labeled bases of the homogeneous components ``V_k``.

    Components are produced on demand by ``enumerate_degree``; every shipped
    model is bounded below by ``min_degree`` and finite-dimensional in each
    degree, so any finite range of degrees can be enumerated.
    """

    def __init__(
        self,
        name: str,
        degree_of: Callable[[Key], int],
        enumerate_degree: Callable[[int], Iterable[Key]],
        label_of: Callable[[Key], str],
        min_degree: int = 0,
        aliases: Mapping[str, Key] | None = None,
    ):
        self.name = name
        self._degree_of = degree_of
        self._enumerate = enumerate_degree
        self._label_of = label_of
        self.min_degree = min_degree
        self.aliases = dict(aliases or {})
        self._keys: dict[int, tuple] = {}
        self._index: dict[Key, int] = {}

    def keys(self, k: int) -> tuple:
        if k < self.min_degree:
            return ()
        if k not in self._keys:
            ks = tuple(self._enumerate(k))
            self._keys[k] = ks
            for i, key in enumerate(ks):
                self._index[key] = i
        return self._keys[k]

    def dim(self, k: int) -> int:
        return len(self.keys(k))

    def degree(self, key: Key) -> int:
        return self._degree_of(key)

    def index(self, key: Key) -> int:
        self.keys(self.degree(key))
        return self._index[key]

    def label(self, key: Key) -> str:
        return self._label_of(key)

    def keys_in(self, window: DegreeWindow) -> Iterator[Key]:
        for k in window.degrees():
            yield from self.keys(k)

    def parse(self, label: str, search_hi: int = 12) -> Key:
        """Find the basis key with the given label (or alias)."""
        if label in self.aliases:
            return self.aliases[label]
        for k in range(self.min_degree, search_hi + 1):
            for key in self.keys(k):
                if self.label(key) == label:
                    return key
        raise KeyError(f"unknown basis label {label!r} in {self.name}")

    def vector(self, key: Key, coeff=1) -> "GradedVector":
        return GradedVector(self, {key: coeff})

    def zero(self) -> "GradedVector":
        return GradedVector(self, {})


def _add_into(target: dict, source: Mapping, scale=1) -> None:
    for key, c in source.items():
        v = target.get(key, 0) + scale * c
        if v == 0:
            target.pop(key, None)
        else:
            target[key] = v


class GradedVector:
    """Finitely supported element of ``V``: a sparse map basis key -> scalar."""

    __slots__ = ("basis", "coeffs")

    def __init__(self, basis: GradedBasis, coeffs: Mapping | None = None):
        self.basis = basis
        self.coeffs = {k: c for k, c in (coeffs or {}).items() if c != 0}

    def __add__(self, other: "GradedVector") -> "GradedVector":
        out = dict(self.coeffs)
        _add_into(out, other.coeffs)
        return GradedVector(self.basis, out)

    def __sub__(self, other: "GradedVector") -> "GradedVector":
        out = dict(self.coeffs)
        _add_into(out, other.coeffs, -1)
        return GradedVector(self.basis, out)

    def __neg__(self) -> "GradedVector":
        return GradedVector(self.basis, {k: -c for k, c in self.coeffs.items()})

    def __mul__(self, scalar) -> "GradedVector":
        return GradedVector(self.basis, {k: scalar * c for k, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedVector):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = [f"{c}*{self.basis.label(k)}" for k, c in self.sorted_items()]
        return " + ".join(parts)

    def sorted_items(self):
        return sorted(
            self.coeffs.items(),
            key=lambda kc: (self.basis.degree(kc[0]), self.basis.index(kc[0])),
        )

    def is_zero(self) -> bool:
        return not self.coeffs

    def support_degrees(self) -> set:
        return {self.basis.degree(k) for k in self.coeffs}

    def homogeneous_degree(self) -> int | None:
        """Degree ``k`` if all nonzero entries lie in ``V_k``; ``None`` otherwise (or for 0)."""
        degs = self.support_degrees()
        if len(degs) == 1:
            return degs.pop()
        return None

    def component(self, k: int) -> "GradedVector":
        return GradedVector(
            self.basis, {key: c for key, c in self.coeffs.items() if self.basis.degree(key) == k}
        )

    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self.coeffs.values())

    def to_numeric(self) -> "GradedVector":
        return GradedVector(self.basis, {k: complex(c) for k, c in self.coeffs.items()})

    def norm(self) -> float:
        """Max absolute coefficient in the model basis."""
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def as_dense(self, k: int) -> list:
        keys = self.basis.keys(k)
        return [self.coeffs.get(key, 0) for key in keys]


class WindowedCompletion:
    """Element of the completion ``prod_k V_k`` truncated to a degree window.

    ``below_window_zero`` asserts that every component below ``window.lo``
    vanishes, i.e. the represented element is bounded below.
    """

    __slots__ = ("basis", "window", "components", "below_window_zero", "certificates")

    def __init__(
        self,
        basis: GradedBasis,
        window: DegreeWindow,
        components: Mapping[int, GradedVector] | None = None,
        below_window_zero: bool = True,
        certificates: Mapping | None = None,
    ):
        self.basis = basis
        self.window = window
        comps = {}
        for k, v in (components or {}).items():
            if k not in window:
                if v.is_zero():
                    continue
                raise WindowViolation(f"component of degree {k} outside window {window}")
            bad = v.support_degrees() - {k}
            if bad:
                raise WindowViolation(f"component {k} has entries in degrees {sorted(bad)}")
            if not v.is_zero():
                comps[k] = v
        self.components = comps
        self.below_window_zero = below_window_zero
        self.certificates = dict(certificates or {})

    def component(self, k: int) -> GradedVector:
        return project(self, k)

    def __sub__(self, other: "WindowedCompletion") -> "WindowedCompletion":
        return WindowedCompletion(
            self.basis,
            self.window,
            {k: self.component(k) - other.component(k) for k in self.window.degrees()},
            self.below_window_zero and other.below_window_zero,
        )

    def __add__(self, other: "WindowedCompletion") -> "WindowedCompletion":
        return WindowedCompletion(
            self.basis,
            self.window,
            {k: self.component(k) + other.component(k) for k in self.window.degrees()},
            self.below_window_zero and other.below_window_zero,
        )

    def __mul__(self, scalar) -> "WindowedCompletion":
        return WindowedCompletion(
            self.basis,
            self.window,
            {k: v * scalar for k, v in self.components.items()},
            self.below_window_zero,
        )

    __rmul__ = __mul__

    def norm(self, k: int | None = None) -> float:
        if k is not None:
            return self.component(k).norm()
        return max((v.norm() for v in self.components.values()), default=0.0)

    def is_zero(self) -> bool:
        return not self.components

    def to_vector(self) -> GradedVector:
        """Sum of all windowed components as a finitely supported vector."""
        out = GradedVector(self.basis)
        for v in self.components.values():
            out = out + v
        return out

    def __repr__(self):
        body = ", ".join(f"{k}: {v!r}" for k, v in sorted(self.components.items()))
        return f"WindowedCompletion[{self.window}]({{{body}}})"


def project(x: WindowedCompletion, k: int) -> GradedVector:
    """The degree-``k`` component of a truncated completion."""
    if k not in x.window:
        raise WindowViolation(f"degree {k} outside window {x.window}")
    return x.components.get(k, GradedVector(x.basis))


def scale_action(z, v):
    """Action of ``z`` in C^x: multiply the degree-``l`` part by ``z**l``.

    Works on both ``GradedVector`` and ``WindowedCompletion``.
    """
    if z == 0:
        raise InvalidScalar("scale_action needs a nonzero scalar")
    if isinstance(v, WindowedCompletion):
        return WindowedCompletion(
            v.basis,
            v.window,
            {k: scale_action(z, comp) for k, comp in v.components.items()},
            v.below_window_zero,
        )
    basis = v.basis
    return GradedVector(basis, {key: c * z ** basis.degree(key) for key, c in v.coeffs.items()})


def embed(v: GradedVector, window: DegreeWindow) -> WindowedCompletion:
    """View ``v`` in the completion truncated to ``window``."""
    degs = v.support_degrees()
    outside = [d for d in degs if d > window.hi or d < window.lo]
    if outside:
        raise WindowViolation(f"support in degrees {sorted(outside)} outside window {window}")
    comps = {k: v.component(k) for k in degs}
    return WindowedCompletion(v.basis, window, comps, below_window_zero=True)
