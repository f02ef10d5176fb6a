import itertools
from math import factorial

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from geomva import build_model
from geomva.errors import ConfigError, WindowViolation
from geomva.grading import DegreeWindow
from geomva.models import CommutativeModel, fock_mode_oracle, heisenberg, partitions
from geomva.va_core import axiom_suite, check_locality


def test_oracle_examples():
    assert fock_mode_oracle((1,), 1, (1,)) == {(): 1}
    assert fock_mode_oracle((1,), -1, (1,)) == {(1, 1): 1}
    for state in [(), (1,), (2, 1), (3, 3, 1)]:
        assert fock_mode_oracle((1,), 0, state) == {}


def test_oracle_window_overflow():
    w = DegreeWindow(0, 4)
    with pytest.raises(WindowViolation):
        fock_mode_oracle((2, 1), -3, (1,), window=w)
    with pytest.raises(WindowViolation):
        fock_mode_oracle((5,), 0, (), window=w)
    assert fock_mode_oracle((1,), 1, (1,), window=w) == {(): 1}


def test_heisenberg_relations():
    states = [lam for n in range(6) for lam in partitions(n)]

    def apply(m, vec):
        out = {}
        for key, c in vec.items():
            for k2, c2 in heisenberg(m, key).items():
                out[k2] = out.get(k2, 0) + c * c2
        return {k: v for k, v in out.items() if v}

    for lam in states:
        for m, n in itertools.product(range(-3, 4), repeat=2):
            lhs = apply(m, apply(n, {lam: 1}))
            rhs = apply(n, apply(m, {lam: 1}))
            comm = dict(lhs)
            for k, v in rhs.items():
                comm[k] = comm.get(k, 0) - v
            comm = {k: v for k, v in comm.items() if v}
            expected = {lam: m} if m + n == 0 and m != 0 else {}
            assert comm == expected


def test_build_model_examples(triv):
    assert triv.window_keys() == [()]
    assert all(r.passed and r.residual == 0 for r in axiom_suite(triv))
    fb = build_model("free_boson", DegreeWindow(0, 6), 7)
    assert fb.basis.dim(4) == 5
    comm = build_model("commutative", DegreeWindow(0, 4), 7, d=1)
    for x, y in itertools.product(comm.window_keys(), repeat=2):
        if sum(1 + j for j in x) + sum(1 + j for j in y) <= 4:
            assert check_locality(comm, comm.basis.vector(x), comm.basis.vector(y)) == 0
    with pytest.raises(ConfigError):
        build_model("lattice")
    with pytest.raises(ConfigError):
        build_model("commutative", d=0)


def test_free_boson_grading_matches_partitions(fb):
    for key in fb.window_keys():
        assert fb.degree(key) == sum(key)
    for a, c in [((1,), (2, 1)), ((2,), (1, 1)), ((1, 1), (3,))]:
        for k in range(-4, 5):
            out = fb.mode_dict(a, k, c)
            assert all(sum(key) == sum(a) + sum(c) - k - 1 for key in out)


def test_mode_table_matches_oracle_on_low_degrees(fb):
    keys = [k for k in fb.window_keys() if sum(k) <= 3]
    for a, c in itertools.product(keys, repeat=2):
        for k in range(-fb.K, fb.K + 1):
            assert fb.mode_dict(a, k, c) == fock_mode_oracle(a, k, c)


# commutative model against an independent sympy differential-polynomial oracle

U = sympy.symbols("u0:12")
z = sympy.Symbol("z")


def _poly(key):
    return sympy.Mul(*[U[j] for j in key])


def _D(expr):
    # T u[j] = (j+1) u[j+1] in the divided-derivative basis
    return sum(sympy.diff(expr, U[j]) * (j + 1) * U[j + 1] for j in range(len(U) - 1))


def _from_poly(expr):
    out = {}
    for monom, coeff in sympy.Poly(sympy.expand(expr), *U).terms():
        key = tuple(sorted((j for j, e in enumerate(monom) for _ in range(e)), reverse=True))
        out[key] = int(coeff)
    return out


@pytest.mark.parametrize("a,c", [((0,), (0,)), ((1,), (0,)), ((0, 0), (1,)), ((2,), ())])
def test_commutative_series_oracle(comm, a, c):
    # Y(a,z)c = (e^{zT} a) c as a polynomial in z
    series = 0
    term = _poly(a)
    for n in range(6):
        series += z ** n * term / factorial(n)
        term = _D(term)
    series = sympy.expand(series * _poly(c))
    for n in range(6):
        expected = _from_poly(series.coeff(z, n))
        assert comm.mode_dict(a, -n - 1, c) == expected
    assert all(not comm.mode_dict(a, k, c) for k in range(0, 5))


@given(st.integers(1, 3), st.data())
@settings(max_examples=20, deadline=None)
def test_commutative_modes_commute(d, data):
    V = CommutativeModel(d).build(DegreeWindow(0, 6), 5)
    keys = V.window_keys()
    a, b, c = (data.draw(st.sampled_from(keys)) for _ in range(3))
    m, n = data.draw(st.integers(-4, 4)), data.draw(st.integers(-4, 4))
    ab = V.mode_on({a: 1}, m, V.mode_on({b: 1}, n, {c: 1}))
    ba = V.mode_on({b: 1}, n, V.mode_on({a: 1}, m, {c: 1}))
    assert ab == ba
