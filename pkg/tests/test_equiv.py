from fractions import Fraction

import pytest
from conftest import family_hyper

from segreode import (
    QI,
    AdmissibleOde,
    GaugeMap,
    SeriesError,
    TruncSeries1,
    beta_family,
    build_chi_tau,
    coupled_map_g,
    coupled_residual,
    divide,
    formal_solutions,
    pullback_under_gauge,
    self_map_probe,
    solution_residuals,
    verify_map_on_hypersurface,
)

RECT = (6, 12)


# -- the coefficient recursion ---------------------------------------------------


def test_solution_values_beta1():
    pair = formal_solutions(2, 1, 24)
    assert pair.f.coefficient(0) == QI(1)
    assert pair.f.coefficient(1) == QI(0, 1, 2)
    assert pair.f.coefficient(2) == QI(1, 0, 8)


def test_solution_terminates_beta2():
    pair = formal_solutions(2, 2, 30)
    assert pair.f == TruncSeries1.from_terms({0: 1, 1: QI(0, 1)}, 30)


def test_u_is_conjugate_for_real_beta():
    for beta in (1, 3, Fraction(5, 2)):
        pair = formal_solutions(2, beta, 20)
        assert pair.u == pair.f.conj()


@pytest.mark.parametrize("m,beta", [(2, 0), (2, 1), (2, Fraction(1, 2)),
                                    (3, 1), (3, 4), (4, 2)])
def test_solution_residuals_vanish(m, beta):
    pair = formal_solutions(m, beta, 30)
    rf, ru = solution_residuals(pair)
    assert rf.is_zero
    assert ru.is_zero


@pytest.mark.parametrize("m,beta", [(2, 0), (2, 1), (3, 2)])
def test_wronskian_liouville_normalization(m, beta):
    # with z1 = f and z2 = u*exp(2i/(1-m) w^{1-m}), the Wronskian is
    # exp(...) * S with S = f*u' - f'*u + 2i*w^{-m}*f*u, and the classical
    # first-order Wronskian equation forces S = 2i*w^{-m} exactly
    pair = formal_solutions(m, beta, 30)
    s = pair.f * pair.u.derivative() - pair.f.derivative() * pair.u \
        + (pair.f * pair.u).shift(-m).scale(QI(0, 2))
    assert s == TruncSeries1.monomial(QI(0, 2), -m, s.trunc)


def test_support_on_multiples_of_m_minus_1():
    for m in (2, 3, 4):
        pair = formal_solutions(m, 7, 30)
        for deg, c in pair.f.items():
            if deg % (m - 1) != 0:
                assert c.is_zero


@pytest.mark.parametrize("m", [2, 3])
def test_termination_iff_resonant(m):
    resonant = {l * (l + 1) * (m - 1) ** 2 for l in range(6)}
    for beta in range(0, 35):
        pair = formal_solutions(m, beta, 40)
        terminated = all(
            c.is_zero for deg, c in pair.f.items() if deg > 6 * (m - 1)
        )
        assert terminated == (beta in resonant), (m, beta)


def test_solutions_truncation_monotonicity():
    small = formal_solutions(2, 1, 16)
    large = formal_solutions(2, 1, 48)
    assert small.f == large.f
    assert small.u == large.u


def test_rejects_small_m():
    with pytest.raises(ValueError):
        formal_solutions(1, 1, 10)


# -- the gauge map ------------------------------------------------------------------


def test_chi_tau_beta0_is_identity():
    gm = build_chi_tau(formal_solutions(2, 0, 24))
    assert gm.f == TruncSeries1.one(gm.f.trunc)
    assert gm.g == TruncSeries1.var(gm.g.trunc)


def test_tau_quadratic_term_vanishes():
    for beta in (1, 2, 5):
        gm = build_chi_tau(formal_solutions(2, beta, 24))
        assert gm.g.coefficient(2).is_zero
        assert gm.is_special(2)


def test_equivalence_map_convenience():
    from segreode import equivalence_map
    gm = equivalence_map(2, 1, 24)
    assert gm.is_special(2)
    assert gm == build_chi_tau(formal_solutions(2, 1, 24))


def test_chi_is_reciprocal_of_f():
    pair = formal_solutions(2, 1, 20)
    gm = build_chi_tau(pair)
    assert gm.f * pair.f == TruncSeries1.one(gm.f.trunc)


@pytest.mark.parametrize("beta", [1, 2, 3])
def test_pullback_recovers_family_member(beta):
    gauge = build_chi_tau(formal_solutions(2, beta, 40))
    e0 = beta_family(2, 0, 48)
    eb = beta_family(2, beta, 48)
    pulled = pullback_under_gauge(e0, gauge, 2)
    assert pulled.trunc >= 20
    assert pulled.p == eb.p
    assert pulled.q == eb.q


def test_pullback_m3():
    gauge = build_chi_tau(formal_solutions(3, 2, 40))
    pulled = pullback_under_gauge(beta_family(3, 0, 48), gauge, 3)
    eb = beta_family(3, 2, 48)
    assert pulled.p == eb.p and pulled.q == eb.q


# -- coupled parameter map ------------------------------------------------------------


def test_coupled_identity():
    gm = GaugeMap.identity(16)
    paired = coupled_map_g(gm, 2)
    assert paired.f == TruncSeries1.one(16 - 2)
    assert paired.g == TruncSeries1.var(16)


@pytest.mark.parametrize("beta", [1, 2, 3])
def test_coupled_map_is_conjugate(beta):
    gauge = build_chi_tau(formal_solutions(2, beta, 32))
    paired = coupled_map_g(gauge, 2)
    assert paired.f == gauge.f.conj()
    assert paired.g == gauge.g.conj()
    assert coupled_residual(gauge, paired, 2).is_zero


def test_coupled_defining_equation_general_input():
    w = TruncSeries1.var(20)
    g = divide(w, TruncSeries1.one(20) - w.pow_int(2))
    gauge = GaugeMap(TruncSeries1.one(20), g)
    paired = coupled_map_g(gauge, 2)
    assert paired.g == g
    assert coupled_residual(gauge, paired, 2).is_zero


def test_coupled_requires_special_gauge():
    f = TruncSeries1.from_terms({0: 2}, 10)
    with pytest.raises(SeriesError):
        coupled_map_g(GaugeMap(f, TruncSeries1.var(10)), 2)


# -- hypersurface-level verification ----------------------------------------------------


def test_map_identity_on_beta0():
    h0 = family_hyper(2, "0", *RECT)
    res = verify_map_on_hypersurface(h0, h0, GaugeMap.identity(30))
    assert res.is_zero


def test_map_beta1_to_beta0():
    h1 = family_hyper(2, "1", *RECT)
    h0 = family_hyper(2, "0", *RECT)
    gauge = build_chi_tau(formal_solutions(2, 1, 30))
    res = verify_map_on_hypersurface(h1, h0, gauge)
    assert res.rect == RECT
    assert res.is_zero


def test_map_identity_with_wrong_beta_leaves_witness():
    h1 = family_hyper(2, "1", *RECT)
    h0 = family_hyper(2, "0", *RECT)
    res = verify_map_on_hypersurface(h1, h0, GaugeMap.identity(30))
    (j, k), value = res.first_nonzero()
    # the profiles first differ in the x^3 row: delta(psi_3) = beta*eta^2/6
    assert (j, k) == (3, 4)
    assert value == QI(0, 1, 6)


# -- rigidity probe -----------------------------------------------------------------------


def test_probe_beta0_rigid():
    report = self_map_probe(beta_family(2, 0, 26), 12)
    assert report.rigid and report.identity
    assert all(st.dimension == 0 for st in report.stages)
    assert report.verified_order >= 12


def test_probe_beta1_rigid():
    report = self_map_probe(beta_family(2, 1, 26), 12)
    assert report.rigid and report.identity


def test_probe_flat_equation_detects_freedom():
    flat = AdmissibleOde(1, TruncSeries1.zero(24), TruncSeries1.zero(24))
    report = self_map_probe(flat, 6)
    assert not report.rigid
    assert report.stages[0].dimension == 1
    assert report.stages[0].free_directions == ("g",)
