import json
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from segreode import (
    QI,
    BackendMismatch,
    SeriesError,
    TruncSeries1,
    TruncSeries2,
    coeff_str,
    compose,
    compositional_inverse,
    divide,
    parse_coeff,
    solve_implicit,
)

N = 10

qi_values = st.builds(QI, st.integers(-9, 9), st.integers(-9, 9),
                      st.integers(1, 9))


def series1(trunc=8):
    return st.lists(qi_values, min_size=trunc + 1, max_size=trunc + 1).map(
        lambda cs: TruncSeries1(cs, 0, trunc)
    )


def units1(trunc=8):
    return st.lists(qi_values, min_size=trunc, max_size=trunc).map(
        lambda cs: TruncSeries1([QI(1)] + cs, 0, trunc)
    )


def nilpotent1(trunc=8):
    return st.lists(qi_values, min_size=trunc, max_size=trunc).map(
        lambda cs: TruncSeries1([QI(0)] + cs, 0, trunc)
    )


# -- coefficients -----------------------------------------------------------


def test_qi_normalization():
    c = QI(2, -4, -6)
    assert (c.a, c.b, c.d) == (-1, 2, 3)
    assert QI(0, 0, 5) == QI(0)


def test_qi_arithmetic():
    i = QI(0, 1)
    assert i * i == QI(-1)
    assert (QI(1, 1) / QI(1, 1)) == QI(1)
    assert QI(1, 0, 2) + Fraction(1, 2) == QI(1)
    assert 2 * QI(1, 0, 2) == QI(1)
    with pytest.raises(ZeroDivisionError):
        QI(1) / QI(0)


@given(qi_values, qi_values)
def test_qi_lowest_terms_invariant(a, b):
    for c in (a + b, a - b, a * b):
        assert math.gcd(c.a, c.b, c.d) == 1
        assert c.d > 0
    if not b.is_zero:
        q = a / b
        assert math.gcd(q.a, q.b, q.d) == 1
        assert q * b == a


@pytest.mark.parametrize("text", ["3/2", "-1/2+3i", "2i", "-2/3i", "1-1/2i",
                                  "0", "-7", "1+1i"])
def test_coeff_grammar_roundtrip(text):
    assert coeff_str(parse_coeff(text)) == text


def test_coeff_parse_rejects_junk():
    for bad in ["", "i", "1+", "1**i", "1.5"]:
        with pytest.raises(ValueError):
            parse_coeff(bad)


# -- ring operations ---------------------------------------------------------


def test_difference_of_squares():
    w = TruncSeries1.var(N)
    one = TruncSeries1.one(N)
    p = (one + w) * (one - w)
    assert p.coefficient(0) == QI(1)
    assert p.coefficient(1).is_zero
    assert p.coefficient(2) == QI(-1)


def test_laurent_pole_cancellation():
    w = TruncSeries1.var(N)
    winv = TruncSeries1.monomial(1, -1, N)
    q = winv * w
    assert q.pole == 0
    assert q == TruncSeries1.one(q.trunc)


def test_bivariate_square():
    one = TruncSeries2.one(2, 2)
    x = TruncSeries2.var_x(2, 2)
    y = TruncSeries2.var_y(2, 2)
    s = (one + x + y) * (one + x + y)
    expect = {(0, 0): 1, (1, 0): 2, (0, 1): 2, (2, 0): 1, (1, 1): 2, (0, 2): 1}
    for (j, k), v in expect.items():
        assert s.coefficient(j, k) == QI(v)


@given(series1(), series1(), series1())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)


@given(series1(), series1())
def test_backend_mixing_rejected(a, b):
    fb = b.to_float()
    with pytest.raises(BackendMismatch):
        a * fb


def test_float_bivariate_product():
    one = TruncSeries2.one(2, 2, backend="float")
    x = TruncSeries2.var_x(2, 2, backend="float")
    y = TruncSeries2.var_y(2, 2, backend="float")
    s = (one + x.scale(0.5)) * (one + y.scale(2j))
    assert s.coefficient(1, 1) == 1j
    assert s.coefficient(1, 0) == 0.5


# -- division ----------------------------------------------------------------


def test_geometric_series():
    w = TruncSeries1.var(N)
    g = divide(TruncSeries1.one(N), TruncSeries1.one(N) - w)
    assert all(g.coefficient(k) == QI(1) for k in range(g.trunc + 1))


def test_monomial_quotient():
    w = TruncSeries1.var(N)
    q = divide(w * w, w)
    assert q == TruncSeries1.var(q.trunc)


def test_termwise_laurent_quotient():
    num = TruncSeries1.from_terms({0: QI(0, 2), 1: -2}, N)
    den = TruncSeries1.var(N) * TruncSeries1.var(N)
    q = divide(num, den)
    assert q.pole == 2
    assert q.coefficient(-2) == QI(0, 2)
    assert q.coefficient(-1) == QI(-2)
    assert q.coefficient(0).is_zero


@given(series1(), units1())
def test_divide_is_mul_inverse(a, b):
    q = divide(a, b)
    assert q * b == a


def test_divide_by_zero_series():
    with pytest.raises(ZeroDivisionError):
        divide(TruncSeries1.one(N), TruncSeries1.zero(N))


# -- exp/log and fractional powers -------------------------------------------


def test_exp_series():
    e = TruncSeries1.var(N).exp()
    for k in range(N + 1):
        assert e.coefficient(k) == QI(1, 0, math.factorial(k))


def test_log_series():
    l = (TruncSeries1.one(N) + TruncSeries1.var(N)).log()
    for k in range(1, N + 1):
        assert l.coefficient(k) == QI((-1) ** (k + 1), 0, k)


@given(units1())
def test_exp_log_inverse(u):
    assert u.log().exp() == u


def test_log_conjugate_quotient():
    # log(conj(f)/f) for f = 1 + (i/2)w + (1/8)w^2: linear term -i, square 0
    f = TruncSeries1.from_terms({0: 1, 1: QI(0, 1, 2), 2: QI(1, 0, 8)}, 4)
    l = divide(f.conj(), f).log()
    assert l.coefficient(1) == QI(0, -1)
    assert l.coefficient(2).is_zero


def test_binomial_sqrt():
    h = (TruncSeries1.one(N) + TruncSeries1.var(N)).pow_frac(Fraction(1, 2))
    assert h.coefficient(1) == QI(1, 0, 2)
    assert h.coefficient(2) == QI(-1, 0, 8)


def test_fractional_power_roundtrip():
    u = TruncSeries1.one(N) + TruncSeries1.monomial(QI(1, 0, 2), 2, N)
    inv = u.pow_frac(Fraction(-1))
    assert inv.coefficient(2) == QI(-1, 0, 2)
    assert inv.pow_frac(Fraction(-1)) == u


@given(units1())
def test_square_root_squares_back(u):
    assert u.pow_frac(Fraction(1, 2)).pow_frac(Fraction(2)) == u


def test_log_requires_unit():
    with pytest.raises(SeriesError):
        (TruncSeries1.var(N)).log()
    with pytest.raises(SeriesError):
        TruncSeries1.constant(2, N).exp()


# -- composition -------------------------------------------------------------


def test_compose_simple():
    outer = TruncSeries1.one(N) + TruncSeries1.var(N)
    inner = TruncSeries1.var(N).pow_int(2)
    c = compose(outer, inner)
    assert c.coefficient(0) == QI(1) and c.coefficient(2) == QI(1)


def test_compose_linear_substitution_bivariate():
    p = TruncSeries1.from_terms({0: QI(0, 2), 1: -2}, 8)
    inner = TruncSeries2.var_y(1, 1) * (
        TruncSeries2.one(1, 1) + TruncSeries2.var_x(1, 1).scale(QI(0, 1))
    )
    c = compose(p, inner)
    assert c.coefficient(0, 0) == QI(0, 2)
    assert c.coefficient(0, 1) == QI(-2)
    assert c.coefficient(1, 1) == QI(0, -2)


def test_compose2_bivariate_second_argument():
    from segreode import compose2
    nx, ny = 4, 4
    outer = TruncSeries2.var_x(nx, ny) * TruncSeries2.var_y(nx, ny)
    first = TruncSeries2.var_x(nx, ny) * (
        TruncSeries2.one(nx, ny) + TruncSeries2.var_y(nx, ny)
    )
    second = TruncSeries2.var_y(nx, ny) + \
        TruncSeries2.var_x(nx, ny) * TruncSeries2.var_y(nx, ny)
    result = compose2(outer, first, second)
    expected = first * second
    assert result == expected.restrict(result.nx, result.ny)


def test_exp_log_compose_roundtrip():
    t = TruncSeries1.var(N)
    expm1 = t.exp() - TruncSeries1.one(N)
    log1p = (TruncSeries1.one(N) + t).log()
    assert compose(log1p, expm1) == t


@given(nilpotent1())
def test_compose_with_inverse(g):
    if g.coefficient(1).is_zero:
        with pytest.raises(SeriesError):
            compositional_inverse(g)
        return
    h = compositional_inverse(g)
    assert compose(g, h) == TruncSeries1.var(min(g.trunc, h.trunc))
    assert compose(h, g) == TruncSeries1.var(min(g.trunc, h.trunc))


def test_compositional_inverse_examples():
    w = TruncSeries1.var(N)
    assert compositional_inverse(w) == w
    moebius = divide(w, TruncSeries1.one(N) - w)
    assert compositional_inverse(moebius) == divide(w, TruncSeries1.one(N) + w)
    g = w + w.pow_int(3)
    h = compositional_inverse(g)
    assert h.coefficient(3) == QI(-1)
    assert h.coefficient(5) == QI(3)


# -- implicit solving ---------------------------------------------------------


def test_implicit_identity():
    phi = TruncSeries2.var_x(2, 6) - TruncSeries2.var_y(2, 6)
    u = solve_implicit(phi)
    assert u == TruncSeries1.var(u.trunc)


def test_implicit_catalan():
    x = TruncSeries2.var_x(2, 8)
    y = TruncSeries2.var_y(2, 8)
    phi = x - y - x * x
    u = solve_implicit(phi)
    for k, c in enumerate([0, 1, 1, 2, 5, 14]):
        assert u.coefficient(k) == QI(c)
    assert phi.eval_first(u).is_zero


def test_implicit_geometric():
    x = TruncSeries2.var_x(1, 8)
    y = TruncSeries2.var_y(1, 8)
    phi = x * (TruncSeries2.one(1, 8) + y) - y
    u = solve_implicit(phi)
    for k in range(1, 8):
        assert u.coefficient(k) == QI((-1) ** (k + 1))


def test_implicit_degenerate():
    x = TruncSeries2.var_x(2, 4)
    with pytest.raises(SeriesError):
        solve_implicit(x * x - TruncSeries2.var_y(2, 4))


# -- truncation discipline -----------------------------------------------------


def test_coefficients_beyond_truncation_are_unknown():
    s = TruncSeries1.one(4)
    with pytest.raises(SeriesError):
        s.coefficient(5)


def test_equality_uses_common_truncation():
    a = TruncSeries1.one(8)
    b = TruncSeries1.one(4)
    assert a == b
    c = TruncSeries1.from_terms({0: 1, 4: 5}, 4)
    assert a != c


def test_truncation_monotonicity():
    w_small = TruncSeries1.var(6)
    w_big = TruncSeries1.var(14)
    inv_small = divide(TruncSeries1.one(6), TruncSeries1.one(6) - w_small)
    inv_big = divide(TruncSeries1.one(14), TruncSeries1.one(14) - w_big)
    assert inv_small == inv_big  # compares on the common truncation


def test_derivative_drops_truncation():
    s = TruncSeries1.var(6).exp()
    d = s.derivative()
    assert d.trunc == 5
    assert d == s.truncate(5)


def test_pole_cap_enforced():
    from segreode.series import POLE_CAP, PoleOverflow
    with pytest.raises(PoleOverflow):
        TruncSeries1.monomial(1, -(POLE_CAP + 1), 0)


# -- serialization --------------------------------------------------------------


def test_series1_json_roundtrip():
    s = TruncSeries1.from_terms({-2: QI(0, 2), 0: QI(1, 0, 3), 3: -2}, 5)
    blob = json.dumps(s.to_json())
    back = TruncSeries1.from_json(json.loads(blob))
    assert back == s and back.pole == s.pole and back.trunc == s.trunc


def test_series1_json_float():
    s = TruncSeries1([1 + 2j, 0j, -0.5j], 0, 2, backend="float")
    back = TruncSeries1.from_json(s.to_json())
    assert back.backend == "float"
    assert back.coeffs == s.coeffs


def test_series2_json_roundtrip():
    s = TruncSeries2.var_y(2, 3) + TruncSeries2.var_x(2, 3).scale(QI(0, 1, 2))
    back = TruncSeries2.from_json(s.to_json())
    assert back == s and back.rect == s.rect


def test_json_rejects_mixed_backends():
    blob = {"pole": 0, "trunc": 1, "coeffs": ["1", [0.0, 1.0]]}
    with pytest.raises(BackendMismatch):
        TruncSeries1.from_json(blob)
