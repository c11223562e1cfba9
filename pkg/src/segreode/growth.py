"""Coefficient-growth diagnostics for formal series: Gevrey-order estimation
by least squares on log-magnitudes, Cauchy-Hadamard radius estimates, and
exact termination detection.

The Gevrey fit is a heuristic: it diagnoses divergence from finitely many
coefficients and never proves it.  Structural divergence statements rest on
the monodromy classification; this module corroborates them numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coefficients import EXACT, QI
from .series import SeriesError, TruncSeries1


@dataclass(frozen=True)
class TerminationReport:
    terminated: bool
    degree: int | None  # None: the series is identically zero up to truncation


@dataclass(frozen=True)
class GrowthReport:
    gevrey: float
    gevrey_stderr: float
    confidence: tuple      # gevrey +- 2*stderr
    fit_window: tuple
    radius: float
    terminated: bool
    termination_degree: int | None
    n_points: int


def termination_detect(s: TruncSeries1, min_tail: int = 1) -> TerminationReport:
    """Exact check that all stored coefficients above some degree vanish.

    ``min_tail`` is the number of trailing zero coefficients demanded before
    the series is called terminated; longer tails give more confidence for
    series supported on arithmetic progressions.
    """
    if s.backend != EXACT:
        raise SeriesError("termination detection needs the exact backend")
    last = None
    for deg, c in s.items():
        if not c.is_zero:
            last = deg
    if last is None:
        return TerminationReport(True, None)
    return TerminationReport(s.trunc - last >= min_tail, last)


def expected_termination(m: int, beta) -> bool:
    """Exact resonance predicate: the recursion for f terminates iff
    beta = l*(l+1)*(m-1)^2 for some integer l >= 0."""
    beta = Fraction(beta)
    if beta < 0 or beta.denominator != 1:
        return False
    step = (m - 1) ** 2
    t, rem = divmod(int(beta), step)
    if rem != 0:
        return False
    d = 1 + 4 * t
    r = math.isqrt(d)
    return r * r == d and (r - 1) % 2 == 0


def _log_abs(c) -> float:
    if isinstance(c, QI):
        return c.log_abs()
    return math.log(abs(c))


def gevrey_estimate(s: TruncSeries1, window: tuple | None = None,
                    min_points: int = 8) -> GrowthReport:
    """Least-squares fit of log|c_k| ~ s*k*log(k) + k*log(A) + C over the
    nonzero coefficients in the window.

    s ~ 1 signals factorial-type divergence, s ~ 0 a finite radius, s ~ -1
    entire series of exponential type.  The radius estimate is the
    Cauchy-Hadamard value exp(-median(log|c_k|/k)) over the top quarter of
    the window.
    """
    n = s.trunc
    if window is None:
        window = (max(4, n // 8), n)
    k_min, k_max = window
    k_max = min(k_max, n)
    if s.backend == EXACT:
        term = termination_detect(s)
        if term.terminated:
            return GrowthReport(
                gevrey=0.0, gevrey_stderr=0.0, confidence=(0.0, 0.0),
                fit_window=(k_min, k_max), radius=math.inf,
                terminated=True, termination_degree=term.degree, n_points=0,
            )
    ks = []
    logs = []
    for k in range(max(k_min, 1), k_max + 1):
        c = s.coefficient(k)
        if isinstance(c, QI):
            if c.is_zero:
                continue
        elif c == 0:
            continue
        ks.append(float(k))
        logs.append(_log_abs(c))
    if len(ks) < min_points:
        raise SeriesError(
            f"Gevrey fit needs at least {min_points} nonzero coefficients in "
            f"the window, found {len(ks)}"
        )
    ks_arr = np.array(ks)
    logs_arr = np.array(logs)
    design = np.column_stack([ks_arr * np.log(ks_arr), ks_arr,
                              np.ones_like(ks_arr)])
    coef, *_ = np.linalg.lstsq(design, logs_arr, rcond=None)
    fitted = design @ coef
    dof = len(ks) - 3
    if dof > 0:
        sigma2 = float(np.sum((logs_arr - fitted) ** 2)) / dof
        cov = sigma2 * np.linalg.inv(design.T @ design)
        stderr = math.sqrt(max(cov[0, 0], 0.0))
    else:
        stderr = math.inf
    gevrey = float(coef[0])

    top = max(1, len(ks) // 4)
    rates = sorted(lg / k for k, lg in zip(ks[-top:], logs[-top:]))
    median_rate = rates[len(rates) // 2]
    radius = math.exp(-median_rate) if median_rate < 700 else 0.0

    return GrowthReport(
        gevrey=gevrey,
        gevrey_stderr=stderr,
        confidence=(gevrey - 2 * stderr, gevrey + 2 * stderr),
        fit_window=(max(k_min, 1), k_max),
        radius=radius,
        terminated=False,
        termination_degree=None,
        n_points=len(ks),
    )
