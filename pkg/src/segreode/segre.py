"""Segre families attached to admissible ODEs.

A family of order m and sign s = +/-1 is the two-parameter family of curves
w = eta * exp(s*i*eta^{m-1} * psi(x, eta)) with profile psi = x + sum_{k>=2}
psi_k(eta) x^k; here x stands for the product of the curve variable and the
antiholomorphic parameter, and eta for the conjugated second parameter.

The profile solves a parametric Cauchy problem with data psi(0) = 0,
d(psi)/dx(0) = 1, and determines the ODE coefficients back through

    P = s*2i*psi_2 - w^{m-1}
    Q = 6*psi_3 - 8*psi_2^2 + s*2i*(m-1)*w^{m-1}*psi_2 - s*2i*w^m*psi_2'.

Everything here is exact order-by-order; no convergence claims are made.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coefficients import EXACT, QI
from .ode import AdmissibleOde
from .series import (
    SeriesError,
    TruncationStarvation,
    TruncSeries1,
    TruncSeries2,
    compose,
)

HALF = Fraction(1, 2)
NEG_HALF_I = QI(0, -1, 2)  # 1/(2i)


class RealityError(SeriesError):
    """Raised when an extraction that presumes a real hypersurface meets a
    nonzero imaginary part."""


def _first_nonreal_row(s: TruncSeries1):
    for deg, c in s.items():
        if isinstance(c, QI):
            if c.b != 0:
                return deg, c
        elif c.imag != 0.0:
            return deg, c
    return None


@dataclass(frozen=True)
class SegreFamily:
    """Profile psi of an admissible family; psi(0, eta) = 0 and the x-slope
    is exactly 1 at every stored eta-order."""

    m: int
    sign: int
    psi: TruncSeries2

    def __post_init__(self):
        if self.sign not in (+1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if self.m < 1:
            raise ValueError(f"order m must be >= 1, got {self.m}")
        if not self.psi.row(0).is_zero:
            raise SeriesError("psi must vanish at x = 0")
        if self.psi.nx >= 1:
            one = TruncSeries1.one(self.psi.ny, self.psi.backend)
            if self.psi.row(1) != one:
                raise SeriesError("psi must have x-slope exactly 1")

    @property
    def rect(self):
        return self.psi.rect


@dataclass(frozen=True)
class Hypersurface:
    """Complex defining series rho(x, eta) of w = rho(z*conj(z), conj(w)),
    plus (optionally) the real normal-form coefficient series h_k."""

    m: int
    sign: int
    rho: TruncSeries2
    real_form: tuple | None = None

    def __post_init__(self):
        eta = TruncSeries1.var(self.rho.ny, self.rho.backend)
        if self.rho.row(0) != eta:
            raise SeriesError("rho(0, eta) must equal eta exactly")
        if self.rho.nx >= 1:
            lead = TruncSeries1.monomial(QI(0, self.sign), self.m, self.rho.ny,
                                         self.rho.backend) \
                if self.rho.backend == EXACT else \
                TruncSeries1.monomial(complex(0, self.sign), self.m, self.rho.ny,
                                      self.rho.backend)
            if self.rho.row(1) != lead:
                raise SeriesError(
                    "rho must have x-coefficient exactly sign*i*eta^m"
                )

    @property
    def rect(self):
        return self.rho.rect


@dataclass(frozen=True)
class RealityTest:
    ok: bool
    witness: dict | None = None


@dataclass(frozen=True)
class NormalForm:
    """Real normal form of the hypersurface, normalized so the leading
    coefficient is exactly one:

        w - conj(w) = i * u^m * (sign*x + sum_{k>=2} h_k(u) x^k),
        u = (w + conj(w))/2,  x = |z|^2.

    Equivalently 2*Im(w) = u^m*(sign*x + sum h_k x^k).  ``hks[k]`` holds h_k
    for k >= 2; ``v`` is the plain imaginary part Im(w) as a series in (x, u)
    (half of the normalized height, for the family convention rho =
    eta + sign*i*eta^m*x + ...).
    """

    sign: int
    hks: dict
    v: TruncSeries2


# ---------------------------------------------------------------------------
# the parametric Cauchy problem
# ---------------------------------------------------------------------------


def _profile_rhs(e: AdmissibleOde, sign: int, y: TruncSeries2) -> TruncSeries2:
    """Right-hand side of the profile equation for y(t, eta):

    y'' = -s*i*(y')^2*(eta^{m-1} + P(eta*E)*E^{1-m})
          + (y')^3 * t * Q(eta*E)*E^{2-2m},      E = exp(s*i*eta^{m-1}*y).
    """
    m = e.m
    si = QI(0, sign)
    x_big = y.shift_y(m - 1).scale(si)
    arg = x_big.exp().shift_y(1)
    p_at = compose(e.p, arg)
    q_at = compose(e.q, arg)
    e_1m = x_big.scale(1 - m).exp()
    e_22m = x_big.scale(2 - 2 * m).exp()
    yp = y.derivative_x()
    yp2 = yp * yp
    eta_pow = TruncSeries2.one(y.nx, y.ny, y.backend).shift_y(m - 1)
    first = (yp2 * (eta_pow + p_at * e_1m)).scale(-si)
    second = (yp2 * yp * q_at * e_22m).shift_x(1)
    return first + second


def solve_psi(e: AdmissibleOde, sign: int = +1,
              rect: tuple = (8, 24)) -> SegreFamily:
    """Solve the parametric Cauchy problem degree-by-degree in the curve
    variable: k(k-1)*psi_k(eta) equals the t^{k-2} coefficient of the
    right-hand side, which only involves psi_2 .. psi_{k-1}.  The division by
    k(k-1) is exact.
    """
    nx, ny = rect
    if nx < 1:
        raise TruncationStarvation("rectangle must allow x-degree >= 1")
    if e.trunc < nx + ny:
        raise TruncationStarvation(
            f"ODE coefficients known to order {e.trunc}; rectangle "
            f"({nx}, {ny}) needs order >= {nx + ny}"
        )
    backend = e.backend
    rows = {0: TruncSeries1.zero(ny, backend), 1: TruncSeries1.one(ny, backend)}
    for k in range(2, nx + 1):
        y_cur = TruncSeries2.from_rows(
            {j: s for j, s in rows.items() if j <= k - 1}, k - 1, ny, backend
        )
        rhs = _profile_rhs(e, sign, y_cur)
        rows[k] = rhs.row(k - 2).scale(Fraction(1, k * (k - 1)))
    psi = TruncSeries2.from_rows(rows, nx, ny, backend)
    return SegreFamily(e.m, sign, psi)


def profile_residual(e: AdmissibleOde, fam: SegreFamily) -> TruncSeries2:
    """y'' minus the profile right-hand side; zero up to truncation iff the
    family is associated with the ODE."""
    ypp = fam.psi.derivative_x().derivative_x()
    return ypp - _profile_rhs(e, fam.sign, fam.psi)


def inverse_ode_residual(e: AdmissibleOde, fam: SegreFamily) -> TruncSeries2:
    """Substitute the family into the inverse ODE, cleared of denominators:

    rho_xx * rho^{2m} + P(rho)*rho^m*(rho_x)^2 + Q(rho)*(rho_x)^3*x == 0.

    This is an independent verification path from the profile equation.
    """
    rho = build_rho(fam).rho
    rx = rho.derivative_x()
    rxx = rx.derivative_x()
    p_at = compose(e.p, rho)
    q_at = compose(e.q, rho)
    m = e.m
    return (rxx * rho.pow_int(2 * m)
            + p_at * rho.pow_int(m) * rx * rx
            + (q_at * rx * rx * rx).shift_x(1))


# ---------------------------------------------------------------------------
# extraction and the defining series
# ---------------------------------------------------------------------------


def extract_pq(fam: SegreFamily):
    """Recover (P, Q) from psi_2, psi_3; inverse of the Cauchy solve."""
    if fam.psi.nx < 3:
        raise TruncationStarvation("extracting (P, Q) needs psi to x-degree 3")
    m, s = fam.m, fam.sign
    ny = fam.psi.ny
    psi2 = fam.psi.row(2)
    psi3 = fam.psi.row(3)
    backend = fam.psi.backend
    p = psi2.scale(QI(0, 2 * s)) - TruncSeries1.monomial(1, m - 1, ny, backend)
    q = (psi3.scale(6)
         - (psi2 * psi2).scale(8)
         + psi2.shift(m - 1).scale(QI(0, 2 * s * (m - 1)))
         - psi2.derivative().shift(m).scale(QI(0, 2 * s)))
    return p, q


def build_rho(fam: SegreFamily) -> Hypersurface:
    """rho(x, eta) = eta * exp(sign*i*eta^{m-1}*psi(x, eta))."""
    si = QI(0, fam.sign)
    rho = fam.psi.shift_y(fam.m - 1).scale(si).exp().shift_y(1)
    return Hypersurface(fam.m, fam.sign, rho)


# ---------------------------------------------------------------------------
# duality, conjugation, reality
# ---------------------------------------------------------------------------


def dual_family(fam: SegreFamily) -> SegreFamily:
    """Swap variables and parameters in the defining equation and solve back.

    The defining equation of the dual is eta = w * exp(s*i*w^{m-1}*psi(x, w));
    the fixed-point form w <- eta * exp(-s*i*w^{m-1}*psi(x, w)) gains one
    x-order per sweep, so it stabilizes on the stored rectangle.
    """
    nx, ny = fam.psi.rect
    backend = fam.psi.backend
    neg_si = QI(0, -fam.sign)
    w_cur = TruncSeries2.var_y(nx, ny, backend)
    stabilized = False
    for _ in range(nx + 2):
        psi_at = fam.psi.substitute_y(w_cur)
        exponent = (psi_at * w_cur.pow_int(fam.m - 1)).scale(neg_si)
        w_new = exponent.exp().shift_y(1)
        if w_new == w_cur:
            stabilized = True
            break
        w_cur = w_new
    if not stabilized:
        raise SeriesError("dual fixed point failed to stabilize")
    log_part = w_cur.shift_y(-1).log()
    psi_star = log_part.shift_y(-(fam.m - 1)).scale(QI(0, fam.sign))
    return SegreFamily(fam.m, -fam.sign, psi_star)


def conjugated_family(fam: SegreFamily) -> SegreFamily:
    """Conjugate the profile coefficients; the family sign flips."""
    return SegreFamily(fam.m, -fam.sign, fam.psi.conj())


def real_structure_test(fam: SegreFamily) -> RealityTest:
    """The family belongs to a real hypersurface iff its dual coincides with
    its conjugate, profile against profile, on the common rectangle."""
    dual = dual_family(fam)
    conj = conjugated_family(fam)
    diff = dual.psi - conj.psi
    if diff.is_zero:
        return RealityTest(True)
    (j, k), value = diff.first_nonzero()
    return RealityTest(False, witness={
        "cell": [j, k],
        "dual_minus_conjugated": str(value),
    })


def realty_identity_check(h) -> TruncSeries2:
    """Residual of w == rho(x, conj_rho(x, w)), as a series in (x, w).

    Accepts a Hypersurface or a raw bivariate series (so that degenerate or
    deliberately broken defining series can be probed too).
    """
    rho = h.rho if isinstance(h, Hypersurface) else h
    rho_bar = rho.conj()
    inner = rho.substitute_y(rho_bar)
    return TruncSeries2.var_y(inner.nx, inner.ny, inner.backend) - inner


def real_normal_form(h) -> NormalForm:
    """Extract the real normal form v = u^m*(sign*x + sum h_k(u) x^k).

    Solves u + i*v = rho(x, u - i*v) for v(x, u) by a fixed point that gains
    one x-order per sweep, then divides the x-rows by u^m.  Any nonzero
    imaginary part in the result means the defining series was not real.
    """
    rho = h.rho if isinstance(h, Hypersurface) else h
    nx, ny = rho.rect
    backend = rho.backend
    u_var = TruncSeries2.var_y(nx, ny, backend)
    v = TruncSeries2.zero(nx, ny, backend)
    for _ in range(nx + 2):
        w_bar = u_var - v.scale(QI(0, 1))
        rho_at = rho.substitute_y(w_bar)
        v_new = (rho_at - w_bar).scale(NEG_HALF_I)
        if v_new == v:
            break
        v = v_new
    theta = v.scale(2)
    for j in range(1, nx + 1):
        bad = _first_nonreal_row(theta.row(j))
        if bad is not None:
            raise RealityError(
                f"normal form row x^{j} has imaginary coefficient {bad[1]} "
                f"at u-degree {bad[0]}"
            )
    if theta.is_zero:
        return NormalForm(0, {}, v)

    m = h.m if isinstance(h, Hypersurface) else None
    lead = theta.row(1)
    lead_ord = lead.order()
    if lead_ord is None:
        raise RealityError("normal form has no x-linear term but is nonzero")
    if m is None:
        m = lead_ord
    plus = TruncSeries1.monomial(1, m, ny, backend)
    minus = TruncSeries1.monomial(-1, m, ny, backend)
    if lead == plus:
        sign = +1
    elif lead == minus:
        sign = -1
    else:
        raise RealityError("x-linear term of the normal form is not ±u^m")

    hks = {}
    for k in range(2, nx + 1):
        row = theta.row(k)
        hk = row.shift(-m)
        if hk.pole > 0:
            raise RealityError(
                f"normal form row x^{k} is not divisible by u^{m}"
            )
        hks[k] = hk

    _check_reconstruction(rho, v, sign, m)
    return NormalForm(sign, hks, v)


def _check_reconstruction(rho: TruncSeries2, v: TruncSeries2, sign: int,
                          m: int) -> None:
    """Rebuild the complex defining series from the real form and compare."""
    nx, ny = rho.rect
    backend = rho.backend
    y = TruncSeries2.var_y(nx, ny, backend)
    w_cur = y
    for _ in range(nx + 2):
        mid = (w_cur + y).scale(HALF)
        theta = v.substitute_y(mid)
        w_new = y + theta.scale(QI(0, 2))
        if w_new == w_cur:
            break
        w_cur = w_new
    if not (w_cur == rho):
        raise SeriesError("normal-form reconstruction does not match rho")
