"""Infinitesimal automorphisms A(w)*z*dz + B(w)*dw of the family
hypersurfaces, formal tangency verification, the closed-form beta = 0 model,
and the straightening-map coefficient identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coefficients import QI
from .ode import GaugeMap
from .segre import Hypersurface
from .series import (
    SeriesError,
    TruncSeries1,
    TruncSeries2,
    compose,
    divide,
)


@dataclass(frozen=True)
class VectorFieldRep:
    """The holomorphic field a(w)*z*dz + b(w)*dw."""

    a: TruncSeries1
    b: TruncSeries1

    def __post_init__(self):
        if self.a.backend != self.b.backend:
            raise SeriesError("field components must share one backend")
        if self.a.pole != 0 or self.b.pole != 0:
            raise SeriesError("field components must be pole-free")


def build_vector_field(gauge: GaugeMap, m: int) -> VectorFieldRep:
    """Pull the field w^m*dw back through (z, w) -> (chi(w)*z, tau(w)):

        a = -chi'*tau^m/(chi*tau'),    b = tau^m/tau'.

    For a special gauge input, b = w^m + O(w^{m+1}).
    """
    chi, tau = gauge.f, gauge.g
    tau_m = tau.pow_int(m)
    tau_p = tau.derivative()
    b = divide(tau_m, tau_p)
    a = -divide(chi.derivative() * tau_m, chi * tau_p)
    if b.order() != m:
        raise SeriesError(f"dw-component must vanish to order exactly {m}")
    return VectorFieldRep(a, b)


def tangency_check(field: VectorFieldRep, h: Hypersurface) -> TruncSeries2:
    """Residual of formal tangency of Re(field) to the complexified
    hypersurface {w = rho(x, eta)}:

        B(rho) - (A(rho) + conj_A(eta)) * x * d(rho)/dx - conj_B(eta) * d(rho)/d(eta),

    with conj denoting coefficient conjugation.  Zero up to the returned
    rectangle certifies tangency at that order.
    """
    rho = h.rho
    nx, ny = rho.rect
    b_at = compose(field.b, rho)
    a_at = compose(field.a, rho)
    a_bar = TruncSeries2.embed_y(field.a.conj().truncate(min(field.a.trunc, ny)),
                                 nx)
    b_bar = TruncSeries2.embed_y(field.b.conj().truncate(min(field.b.trunc, ny)),
                                 nx)
    rx = rho.derivative_x()
    ry = rho.derivative_y()
    return b_at - ((a_at + a_bar) * rx).shift_x(1) - b_bar * ry


def explicit_model(m: int, rect: tuple = (8, 24)) -> Hypersurface:
    """The closed-form beta = 0 hypersurface of order m:

        rho(x, eta) = eta * (1 + (i/2)(1-m) * eta^{m-1} * L(x))^{1/(1-m)},
        L(x) = -log(1 - 2x) = 2x + 2x^2 + (8/3)x^3 + ...

    computed entirely through series operations.
    """
    if m < 2:
        raise ValueError(f"the closed-form model needs m >= 2, got {m}")
    nx, ny = rect
    lx = (TruncSeries1.one(nx) - TruncSeries1.monomial(2, 1, nx)).log().scale(-1)
    big_l = TruncSeries2.embed_x(lx, ny)
    c = QI(0, 1 - m, 2)  # (i/2)(1-m)
    inner = TruncSeries2.one(nx, ny) + big_l.shift_y(m - 1).scale(c)
    rho = inner.pow_frac(Fraction(1, 1 - m)).shift_y(1)
    return Hypersurface(m, +1, rho)


@dataclass(frozen=True)
class StraighteningCheck:
    ok: bool
    computed_p: TruncSeries1
    expected_p: TruncSeries1
    witness: dict | None = None


def straightening_check(m: int, trunc: int = 16,
                        rate: TruncSeries1 | None = None) -> StraighteningCheck:
    """Laurent identity behind the straightening map (z, w) -> (z, E(w)) with
    E'/E = 2i*w^{-m}: pulling Z'' = 0 back gives z'' = alpha(w) z' with

        alpha = E''/E' = r + r'/r    for the log-derivative r = E'/E,

    which must equal (2i - m*w^{m-1})/w^m exactly.  (The z-coefficient of the
    pullback vanishes identically because the z-component of the map is the
    identity.)  A corrupted rate series can be passed in as a negative
    control.
    """
    if m < 2:
        raise ValueError(f"straightening check needs m >= 2, got {m}")
    if rate is None:
        rate = TruncSeries1.monomial(QI(0, 2), -m, trunc)
    alpha = rate + divide(rate.derivative(), rate)
    computed_p = alpha.shift(m)
    n = computed_p.trunc
    expected_p = TruncSeries1.from_terms({0: QI(0, 2), m - 1: QI(-m)},
                                         max(n, m - 1))
    if computed_p.pole == 0 and computed_p == expected_p:
        return StraighteningCheck(True, computed_p, expected_p)
    diff = computed_p - expected_p.truncate(min(n, expected_p.trunc))
    fn = diff.first_nonzero()
    witness = None
    if fn is not None:
        witness = {"degree": fn[0], "value": str(fn[1])}
    elif computed_p.pole > 0:
        witness = {"pole": computed_p.pole}
    return StraighteningCheck(False, computed_p, expected_p, witness)
