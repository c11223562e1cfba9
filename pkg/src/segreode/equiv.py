"""Formal fundamental solutions of the one-parameter family, the divergent
gauge equivalence onto the beta = 0 member, the coupled parameter-side map,
and a degree-by-degree rigidity probe for gauge self-maps.

For z'' = (2i/w^m - m/w) z' + (beta/w^2) z the fundamental pair is

    { f(w),  g(w) * w^{1-m} * exp(2i/(1-m) * w^{1-m}) },   g = w^{m-1} * u,

with f(0) = u(0) = 1.  Both power-series halves satisfy the one-step
recursion (with 2i replaced by -2i for u)

    2i*j*f_j = ((j-m+1)*j - beta) * f_{j-m+1},

so f is supported on degrees divisible by m-1 and terminates exactly when
beta = l*(l+1)*(m-1)^2 for an integer l >= 0.  The exponential and w^{1-m}
factors never enter a series slot; u carries all series content of g.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coefficients import QI
from .ode import AdmissibleOde, GaugeMap, beta_family, conjugate_ode, pullback_under_gauge
from .segre import Hypersurface
from .series import (
    SeriesError,
    TruncationStarvation,
    TruncSeries1,
    TruncSeries2,
    compose,
    compose2,
    divide,
)


@dataclass(frozen=True)
class FormalSolutionPair:
    """Power-series halves (f, u) of the fundamental system; g = w^{m-1}*u."""

    m: int
    beta: QI
    f: TruncSeries1
    u: TruncSeries1

    def g(self) -> TruncSeries1:
        return self.u.shift(self.m - 1)


def formal_solutions(m: int, beta, trunc: int) -> FormalSolutionPair:
    """Run the coefficient recursion for f and u up to the given order."""
    if m < 2:
        raise ValueError(f"the family needs m >= 2, got {m}")
    beta_q = beta if isinstance(beta, QI) else QI.of(
        beta if isinstance(beta, (int, Fraction)) else Fraction(beta)
    )
    if not beta_q.is_real:
        raise ValueError(f"beta must be real, got {beta_q}")

    def run(two_i: QI):
        coeffs = [QI(1)] + [QI(0)] * trunc
        for j in range(1, trunc + 1):
            k = j - m + 1
            if k < 0 or coeffs[k].is_zero:
                continue
            coeffs[j] = (QI(k * j) - beta_q) / (two_i * j) * coeffs[k]
        return TruncSeries1(coeffs, 0, trunc)

    return FormalSolutionPair(m, beta_q, run(QI(0, 2)), run(QI(0, -2)))


def solution_residuals(pair: FormalSolutionPair):
    """Residuals certifying the pair: f against the family ODE, u against the
    conjugated one (the equation satisfied by g*w^{1-m}*exp(...) once the
    exponential factor is peeled off)."""
    n = pair.f.trunc
    e = beta_family(pair.m, pair.beta, n + 2 * pair.m)

    def residual(s: TruncSeries1, ode: AdmissibleOde) -> TruncSeries1:
        return (s.derivative().derivative()
                - ode.alpha() * s.derivative() - ode.gamma() * s)

    return residual(pair.f, e), residual(pair.u, conjugate_ode(e))


def build_chi_tau(pair: FormalSolutionPair) -> GaugeMap:
    """The special gauge map (z, w) -> (chi(w)*z, tau(w)) onto the beta = 0
    member:

        chi = 1/f,
        tau = w * (1 + ((1-m)/2i) * w^{m-1} * log(u/f))^{1/(1-m)}.

    The normalization u(0) = 1 pins the residual scaling freedom of the
    fundamental pair, so the map is unique in this gauge.
    """
    m = pair.m
    n = pair.f.trunc
    chi = divide(TruncSeries1.one(n, pair.f.backend), pair.f)
    lg = divide(pair.u, pair.f).log()
    scale = QI(0, m - 1, 2)  # (1-m)/(2i)
    inner = TruncSeries1.one(lg.trunc + m - 1, pair.f.backend) \
        + lg.scale(scale).shift(m - 1)
    tau = inner.pow_frac(Fraction(1, 1 - m)).shift(1)
    gm = GaugeMap(chi, tau)
    if not gm.is_special(m):
        raise SeriesError("chi/tau construction lost the special normalization")
    return gm


def equivalence_map(m: int, beta, trunc: int = 40) -> GaugeMap:
    """Convenience: the special gauge map sending the beta family member into
    the beta = 0 member, at the given series order."""
    return build_chi_tau(formal_solutions(m, beta, trunc))


# ---------------------------------------------------------------------------
# coupled parameter-side map
# ---------------------------------------------------------------------------


def coupled_map_g(gauge: GaugeMap, m: int) -> GaugeMap:
    """The unique parameter-side map (xi, eta) -> (xi*lambda(eta), mu(eta))
    pairing with a special gauge map on the variable side:

        mu = g,    eta^m * g'(eta) = mu(eta)^m * f(eta) * lambda(eta).
    """
    if not gauge.is_special(m):
        raise SeriesError("coupled map needs a special gauge input")
    f, g = gauge.f, gauge.g
    lam = divide(g.derivative().shift(m), g.pow_int(m) * f)
    return GaugeMap(lam, g)


def coupled_residual(f_map: GaugeMap, g_map: GaugeMap, m: int) -> TruncSeries1:
    """Defining-equation residual eta^m*g' - mu^m*f*lambda; zero certifies
    the pairing."""
    return f_map.g.derivative().shift(m) \
        - g_map.g.pow_int(m) * f_map.f * g_map.f


# ---------------------------------------------------------------------------
# hypersurface-level verification
# ---------------------------------------------------------------------------


def verify_map_on_hypersurface(h_beta: Hypersurface, h_zero: Hypersurface,
                               gauge: GaugeMap) -> TruncSeries2:
    """Residual of the complexified mapping identity

        tau(rho_b(x, eta)) == rho_0(x * chi(rho_b(x, eta)) * conj_chi(eta),
                                    conj_tau(eta)),

    where conj denotes coefficient conjugation.  Zero up to the returned
    rectangle certifies that (z, w) -> (chi(w) z, tau(w)) maps the first
    hypersurface into the second at that order.
    """
    rho_b = h_beta.rho
    chi, tau = gauge.f, gauge.g
    ny = rho_b.ny
    if tau.trunc < ny:
        raise TruncationStarvation(
            f"gauge map known to order {tau.trunc} < eta-truncation {ny}"
        )
    lhs = compose(tau, rho_b)
    chi_at = compose(chi, rho_b)
    chi_bar = TruncSeries2.embed_y(chi.conj().truncate(ny), rho_b.nx, ny)
    first = (chi_at * chi_bar).shift_x(1)
    second = tau.conj().truncate(ny)
    rhs = compose2(h_zero.rho, first, second)
    return lhs - rhs


# ---------------------------------------------------------------------------
# self-map rigidity probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeStage:
    degree: int
    dimension: int
    f_coeff: QI
    g_coeff: QI
    consistent: bool
    free_directions: tuple = ()


@dataclass(frozen=True)
class ProbeReport:
    stages: tuple
    rigid: bool          # every stage pinned both unknowns
    identity: bool       # the unique solution is the identity map
    verified_order: int  # residuals vanish to this coefficient order


def self_map_probe(e: AdmissibleOde, degree: int) -> ProbeReport:
    """Solve pullback(e, (f, g)) = e for a special gauge (f, g) degree by
    degree.

    At stage d the new unknowns are f_d and g_{d+m}; the residual coefficients
    of P at w^{d-1+m} and of Q at w^{d-1+m} are affine in them (nonlinear
    corrections and later unknowns only reach higher orders), so an exact
    2x2 affine solve per stage either pins them or reports free directions.
    """
    m = e.m
    work = degree + 2 * m + 8
    if e.trunc < work:
        raise TruncationStarvation(
            f"probe to degree {degree} needs ODE coefficients to order {work}, "
            f"got {e.trunc}"
        )

    f_terms = {0: QI(1)}
    g_terms = {1: QI(1)}

    def residual_pair(fd: QI, ge: QI, d: int):
        ft = dict(f_terms)
        gt = dict(g_terms)
        if not fd.is_zero:
            ft[d] = fd
        if not ge.is_zero:
            gt[d + m] = ge
        gauge = GaugeMap(TruncSeries1.from_terms(ft, work),
                         TruncSeries1.from_terms(gt, work))
        pulled = pullback_under_gauge(e, gauge, m)
        return pulled.p - e.p.truncate(pulled.p.trunc), \
            pulled.q - e.q.truncate(pulled.q.trunc)

    stages = []
    identity = True
    rigid = True
    for d in range(1, degree + 1):
        crit = d - 1 + m
        rp0, rq0 = residual_pair(QI(0), QI(0), d)
        rp1, rq1 = residual_pair(QI(1), QI(0), d)
        rp2, rq2 = residual_pair(QI(0), QI(1), d)
        # coefficients finalized at earlier stages must already vanish
        for low in range(min(crit, rp0.trunc)):
            if not (rp0.coefficient(low).is_zero and rq0.coefficient(low).is_zero):
                raise SeriesError(
                    f"probe invariant broken at stage {d}: residual at order "
                    f"{low} should be zero"
                )
        a11 = rp1.coefficient(crit) - rp0.coefficient(crit)
        a12 = rp2.coefficient(crit) - rp0.coefficient(crit)
        a21 = rq1.coefficient(crit) - rq0.coefficient(crit)
        a22 = rq2.coefficient(crit) - rq0.coefficient(crit)
        b1 = -rp0.coefficient(crit)
        b2 = -rq0.coefficient(crit)

        det = a11 * a22 - a12 * a21
        free: tuple = ()
        if not det.is_zero:
            fd = (b1 * a22 - a12 * b2) / det
            ge = (a11 * b2 - b1 * a21) / det
            dim = 0
        else:
            rows = [(a11, a12, b1), (a21, a22, b2)]
            pivot = next((r for r in rows if not (r[0].is_zero and r[1].is_zero)),
                         None)
            if pivot is None:
                consistent = b1.is_zero and b2.is_zero
                dim = 2
                fd = ge = QI(0)
                free = ("f", "g")
            else:
                other = rows[1] if pivot is rows[0] else rows[0]
                # other row must be proportional to the pivot row
                consistent = (pivot[0] * other[2] - other[0] * pivot[2]).is_zero \
                    and (pivot[1] * other[2] - other[1] * pivot[2]).is_zero \
                    and (pivot[0] * other[1] - other[0] * pivot[1]).is_zero
                dim = 1
                if not pivot[0].is_zero:
                    fd = pivot[2] / pivot[0]
                    ge = QI(0)
                    free = ("g",)
                else:
                    ge = pivot[2] / pivot[1]
                    fd = QI(0)
                    free = ("f",)
            if not consistent:
                stages.append(ProbeStage(d, dim, QI(0), QI(0), False, free))
                return ProbeReport(tuple(stages), False, False, d - 1)
        if dim > 0:
            rigid = False
        if not (fd.is_zero and ge.is_zero):
            identity = False
            if not fd.is_zero:
                f_terms[d] = fd
            if not ge.is_zero:
                g_terms[d + m] = ge
        stages.append(ProbeStage(d, dim, fd, ge, True, free))

    rp, rq = residual_pair(QI(0), QI(0), degree + 1)
    verified = degree + m - 1
    for low in range(min(verified, rp.trunc) + 1):
        if not (rp.coefficient(low).is_zero and rq.coefficient(low).is_zero):
            verified = low - 1
            break
    return ProbeReport(tuple(stages), rigid, identity, verified)
