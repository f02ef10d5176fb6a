"""Recover vertex-algebra data from a geometric structure and drive the round trip.

Modes come from the two-point function ``mu(a, z, b, 0)``: exactly, by
expanding ``P_l / g`` as a Laurent series in ``z``, or numerically, by a
trapezoidal contour integral.  ``T`` is the ``z``-linear coefficient of
``mu(a, z)`` and the vacuum is ``mu()``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

import numpy as np

from .errors import AxiomViolation, ConfigError, ModeCapError, StructuralInconsistency
from .geometric import GeometricStructure, relative_residual, sample_points
from .grading import GradedVector
from .laurent import AnnulusRegion, contour_nodes, expand_inverse_g, laurent_coefficients, mul, trapezoid
from .va_core import VertexAlgebra, _axpy


@dataclass
class ExtractionConfig:
    radius: float = 1.0
    nodes: int | None = None
    h: float = 1e-3
    tol: float = 1e-9

    def node_count(self, K: int) -> int:
        return 2 * K + 5 if self.nodes is None else self.nodes

    def validate(self, K: int) -> None:
        if self.radius <= 0:
            raise ConfigError("contour radius must be positive")
        if self.node_count(K) < 2 * K + 5:
            raise ConfigError(f"need at least {2 * K + 5} quadrature nodes for K={K}")


def _key_mode(G: GeometricStructure, a, k: int, b) -> dict:
    """``a_(k) b`` for basis keys read off ``L(1/g) * P_l`` at ``x_2 = 0``."""
    V = G.V
    l = V.degree(a) + V.degree(b) - k - 1
    if l < G.basis.min_degree:
        return {}
    g, P = G.polynomial([G.basis.vector(a), G.basis.vector(b)], l)
    if not P.terms:
        return {}
    # only the x_2-constant part of 1/g survives x_2 = 0 on |x_1| > |x_2|
    inv = expand_inverse_g(g, AnnulusRegion.standard(2), 0)
    series = mul(inv, P).restrict(1, 0)
    coeff = series[(-k - 1,)]
    return dict(coeff.coeffs) if isinstance(coeff, GradedVector) else {}


def extract_mode_exact(G: GeometricStructure, a: GradedVector, b: GradedVector, k: int) -> GradedVector:
    """``a_(k) b`` from the exact Laurent expansion of ``mu(a, z, b, 0)``."""
    if abs(k) > G.V.K:
        raise ModeCapError(f"|k| = {abs(k)} exceeds the cap K = {G.V.K}")
    out: dict = {}
    for x, cx in a.coeffs.items():
        for y, cy in b.coeffs.items():
            _axpy(out, _key_mode(G, x, k, y), cx * cy)
    return GradedVector(G.basis, out)


def extract_mode_quadrature(
    G: GeometricStructure, a: GradedVector, b: GradedVector, k: int, cfg: ExtractionConfig | None = None
) -> GradedVector:
    """``(1/2 pi i) \\oint z^k mu(a, z, b, 0) dz`` on ``|z| = r`` by the trapezoidal rule."""
    cfg = cfg or ExtractionConfig()
    K = G.V.K
    cfg.validate(K)
    if abs(k) > K:
        raise ModeCapError(f"|k| = {abs(k)} exceeds the cap K = {K}")
    V = G.V
    out = GradedVector(G.basis)
    M = cfg.node_count(K)
    for x, cx in a.coeffs.items():
        for y, cy in b.coeffs.items():
            l = V.degree(x) + V.degree(y) - k - 1
            if l < G.basis.min_degree or not G.basis.keys(l):
                continue
            args = [G.basis.vector(x), G.basis.vector(y)]
            g, P = G.polynomial(args, l)
            N = g.order(0, 1)
            top = max((alpha[0] for alpha in P.terms), default=0)
            support = (-N, top - N)

            def h(z, args=args, l=l):
                return G.dense_values(args, [(z, 0)], l)[0]

            coeff = laurent_coefficients(h, [-k - 1], cfg.radius, M, support)[-k - 1]
            keys = G.basis.keys(l)
            vec = GradedVector(G.basis, {key: complex(c) for key, c in zip(keys, coeff) if c != 0})
            out = out + vec * (cx * cy)
    return out


def extract_T(G: GeometricStructure, check: bool = True):
    """``T`` on the window as ``{key: dict}``: the ``z^1`` coefficient of ``mu(a, z)``.

    With ``check`` the result is compared with ``a_(-2)|0>`` from the extracted
    modes; any disagreement raises.
    """
    V = G.V
    vac = extract_vacuum(G)
    out = {}
    for a in V.window_keys():
        l = V.degree(a) + 1
        _, P = G.polynomial([G.basis.vector(a)], l)
        c = P[(1,)]
        t = dict(c.coeffs) if isinstance(c, GradedVector) else {}
        if check:
            alt = extract_mode_exact(G, G.basis.vector(a), vac, -2)
            if GradedVector(G.basis, t) != alt:
                raise StructuralInconsistency(
                    f"T({G.basis.label(a)}) differs between z-derivative and a_(-2)|0>"
                )
        out[a] = t
    return out


def extract_T_finite_difference(G: GeometricStructure, a: GradedVector, h: float = 1e-3) -> GradedVector:
    """Diagnostic: central difference ``(mu(a, h) - mu(a, -h)) / 2h`` in degree ``|a| + 1``."""
    out = GradedVector(G.basis)
    for x, cx in a.coeffs.items():
        l = G.V.degree(x) + 1
        vals = G.dense_values([G.basis.vector(x)], [(h,), (-h,)], l)
        d = (vals[0] - vals[1]) / (2 * h)
        keys = G.basis.keys(l)
        out = out + GradedVector(G.basis, {key: complex(c) for key, c in zip(keys, d) if c != 0}) * cx
    return out


def extract_vacuum(G: GeometricStructure) -> GradedVector:
    """``mu()``, which must lie in degree 0."""
    lo = min(G.basis.min_degree, G.window.lo)
    vac = G.mu_continued([], [], range(lo, G.window.hi + 1)).to_vector()
    if vac.support_degrees() - {0}:
        raise AxiomViolation(f"mu() has components in degrees {sorted(vac.support_degrees())}")
    return vac


def extract(G: GeometricStructure) -> VertexAlgebra:
    """``Phi(G)``: a vertex algebra whose modes are read lazily from ``G``."""
    V = G.V
    vac = extract_vacuum(G)
    T = extract_T(G, check=False)

    def translation_rule(key):
        if key in T:
            return T[key]
        _, P = G.polynomial([G.basis.vector(key)], V.degree(key) + 1)
        c = P[(1,)]
        return dict(c.coeffs) if isinstance(c, GradedVector) else {}

    return VertexAlgebra(
        f"extracted({V.name})",
        G.basis,
        dict(vac.coeffs),
        lambda a, k, c: _key_mode(G, a, k, c),
        translation_rule,
        V.window,
        V.K,
    )


@dataclass
class RoundTripReport:
    model: str
    entries: int = 0
    exact_residual: float = 0.0
    quadrature_residual: float = 0.0
    T_residual: float = 0.0
    vacuum_residual: float = 0.0
    psi_phi_residual: float = 0.0
    psi_phi_points: int = 0
    failures: list = field(default_factory=list)
    tol: float = 1e-9
    psi_tol: float = 1e-8

    @property
    def passed(self) -> bool:
        return (
            self.exact_residual == 0
            and self.T_residual == 0
            and self.vacuum_residual == 0
            and self.quadrature_residual <= self.tol
            and self.psi_phi_residual <= self.psi_tol
            and not self.failures
        )

    def to_json(self) -> dict:
        return {
            "status": "pass" if self.passed else "fail",
            "model": self.model,
            "entries": self.entries,
            "exact_residual": self.exact_residual,
            "quadrature_residual": self.quadrature_residual,
            "T_residual": self.T_residual,
            "vacuum_residual": self.vacuum_residual,
            "psi_phi_residual": self.psi_phi_residual,
            "psi_phi_points": self.psi_phi_points,
            "failures": self.failures[:20],
        }


def _dict_residual(x: dict, y: dict) -> float:
    d = dict(x)
    _axpy(d, y, -1)
    return float(max((abs(complex(c)) for c in d.values()), default=0.0))


def default_tuples(V: VertexAlgebra, seed: int = 42, pairs: int = 6) -> list:
    """Argument tuples for the ``Psi(Phi(G))`` comparison: every windowed state at arity 1,
    a seeded sample of pairs, and the lowest nontrivial state three times."""
    keys = V.window_keys()
    rng = random.Random(seed)
    out = [(k,) for k in keys]
    all_pairs = list(itertools.product(keys, repeat=2))
    out += rng.sample(all_pairs, min(pairs, len(all_pairs)))
    gen = next((k for k in keys if V.degree(k) > 0), keys[0])
    out.append((gen, gen, gen))
    return out


def roundtrip(
    V: VertexAlgebra,
    cfg: ExtractionConfig | None = None,
    seed: int = 42,
    points: int = 8,
    tuples: list | None = None,
) -> RoundTripReport:
    """Build ``G = Psi(V)``, extract ``Phi(G)`` and compare it with ``V``; then compare
    ``Psi(Phi(G))`` with ``G`` at sampled ordered and anti-ordered points."""
    cfg = cfg or ExtractionConfig()
    G = GeometricStructure(V)
    report = RoundTripReport(V.name, tol=cfg.tol)
    W = extract(G)
    table = V.mode_table
    # exact path over every ModeTable entry, quadrature path per (a, c) and degree
    for (a, k, c), val in table.items():
        got = W.mode_dict(a, k, c)
        r = _dict_residual(got, val)
        report.entries += 1
        if r:
            report.exact_residual = max(report.exact_residual, r)
            report.failures.append(("exact", V.basis.label(a), k, V.basis.label(c)))
    M = cfg.node_count(V.K)
    cfg.validate(V.K)
    nodes = contour_nodes(M, cfg.radius)
    keys = V.window_keys()
    for a in keys:
        for c in keys:
            for l in V.window.degrees():
                k = V.degree(a) + V.degree(c) - l - 1
                if abs(k) > V.K or not V.basis.keys(l):
                    continue
                args = [V.basis.vector(a), V.basis.vector(c)]
                vals = G.dense_values(args, [(z, 0) for z in nodes], l)
                coeff = trapezoid(vals, nodes, [-k - 1])[-k - 1]
                ref = np.array(
                    [complex(x) for x in GradedVector(V.basis, table.entries.get((a, k, c), {})).as_dense(l)]
                )
                r = float(np.max(np.abs(coeff - ref))) / max(float(np.max(np.abs(ref))), 1.0)
                report.quadrature_residual = max(report.quadrature_residual, r)
    # translation and vacuum
    T = extract_T(G, check=False)
    for a in keys:
        report.T_residual = max(report.T_residual, _dict_residual(T[a], V.translate_dict({a: 1})))
    report.vacuum_residual = _dict_residual(dict(extract_vacuum(G).coeffs), V._vacuum)
    # Psi(Phi(G)) against G
    G2 = GeometricStructure(W)
    for tup in tuples if tuples is not None else default_tuples(V, seed):
        m = len(tup)
        args = [V.basis.vector(x) for x in tup]
        for ordered in (True, False):
            for z in sample_points(m, points // 2, seed, ordered):
                r = relative_residual(G2.mu_continued(args, z), G.mu_continued(args, z))
                report.psi_phi_points += 1
                report.psi_phi_residual = max(report.psi_phi_residual, r)
    return report
