"""Command-line front end: build family members, run verification pipelines
over (m, beta) grids, and emit deterministic JSON reports with coefficient
witnesses on failure.

Exit codes: 0 all selected checks pass, 1 at least one check failed,
2 configuration/usage error, 3 resource exhaustion.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from multiprocessing import Pool

from .coefficients import EXACT, QI
from .growth import expected_termination, gevrey_estimate, termination_detect
from .monodromy import monodromy_report
from .ode import (
    AdmissibleOde,
    RealData,
    beta_family,
    check_real_structure,
    ode_from_real_data,
    pullback_under_gauge,
)
from .autovec import build_vector_field, explicit_model, straightening_check, tangency_check
from .equiv import (
    build_chi_tau,
    coupled_map_g,
    coupled_residual,
    formal_solutions,
    verify_map_on_hypersurface,
)
from .segre import (
    RealityError,
    build_rho,
    extract_pq,
    real_normal_form,
    real_structure_test,
    realty_identity_check,
    solve_psi,
)
from .series import SeriesError, TruncSeries1

REPORT_VERSION = 1

ALL_CHECKS = (
    "roundtrip", "reality", "realty", "map", "coupled", "selfmap",
    "monodromy", "tangency", "model0", "growth",
)

_POLY_TERM = re.compile(r"([+-]?)\s*(\d+(?:/\d+)?)\s*\*\s*w\^(\d+)\s*")


class ConfigError(ValueError):
    pass


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse rational {text!r}") from exc


def parse_family(text: str):
    """'m,beta' -> (m, beta) with beta rational (e.g. '2,1' or '3,-1/2')."""
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"family spec must be 'm,beta', got {text!r}")
    try:
        m = int(parts[0])
    except ValueError as exc:
        raise ConfigError(f"bad order in family spec {text!r}") from exc
    return m, parse_rational(parts[1])


def parse_polynomial(text: str, trunc: int) -> TruncSeries1:
    """Sum of RAT*w^INT terms, e.g. '1*w^0 + 3/2*w^2 - 1*w^4'."""
    terms = {}
    pos = 0
    stripped = text.replace(" ", "")
    while pos < len(stripped):
        match = _POLY_TERM.match(stripped, pos)
        if not match:
            raise ConfigError(f"cannot parse polynomial {text!r} at {stripped[pos:]!r}")
        sign, rat, deg = match.groups()
        value = Fraction(rat)
        if sign == "-":
            value = -value
        degree = int(deg)
        terms[degree] = terms.get(degree, Fraction(0)) + value
        pos = match.end()
    if max(terms, default=0) > trunc:
        raise ConfigError(
            f"polynomial degree {max(terms)} exceeds truncation {trunc}"
        )
    return TruncSeries1.from_terms(
        {d: QI.of(v) for d, v in terms.items()}, trunc
    )


def parse_rect(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"rectangle must be 'Nx,Ny', got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ConfigError(f"bad rectangle {text!r}") from exc


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    families: list = field(default_factory=list)   # (m, Fraction) pairs
    explicit: dict | None = None                   # {"m":…, "a":…, "b":…}
    checks: list = field(default_factory=lambda: list(ALL_CHECKS))
    degree: int = 40
    rect: tuple = (8, 24)
    backend: str = EXACT
    radius: float = 1.0
    tol: float = 1e-10
    out: str | None = None
    jobs: int = 1

    def validate(self):
        for name in self.checks:
            if name not in ALL_CHECKS:
                raise ConfigError(f"unknown check {name!r}; known: {ALL_CHECKS}")
        if not self.families and self.explicit is None:
            raise ConfigError("no family members selected")
        if self.backend != EXACT:
            raise ConfigError(
                "identity checks require the exact backend; float is only "
                "used internally for monodromy and growth"
            )


def config_from_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError("config file must hold a JSON object")
    return obj


# ---------------------------------------------------------------------------
# per-family lazily computed artifacts
# ---------------------------------------------------------------------------


class FamilyContext:
    """Memoizes the chain ODE -> profile -> defining series -> gauge map for
    one family member."""

    def __init__(self, m: int, beta: Fraction | None = None,
                 data: RealData | None = None, degree: int = 40,
                 rect: tuple = (8, 24), radius: float = 1.0,
                 tol: float = 1e-10):
        if (beta is None) == (data is None):
            raise ConfigError("exactly one of beta or explicit data is needed")
        self.m = m
        self.beta = beta
        self.data = data
        self.degree = degree
        self.rect = rect
        self.radius = radius
        self.tol = tol
        self.work = max(rect[0] + rect[1] + 2 * m + 2,
                        degree + 2 * m + 10)
        self._cache: dict = {}

    def label(self):
        if self.beta is not None:
            return [self.m, str(self.beta)]
        return {"m": self.m, "explicit": True}

    def _memo(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    def ode(self) -> AdmissibleOde:
        def build():
            if self.beta is not None:
                return beta_family(self.m, self.beta, self.work)
            return ode_from_real_data(self.data)
        return self._memo("ode", build)

    def family(self):
        return self._memo("family", lambda: solve_psi(self.ode(), +1, self.rect))

    def hyper(self):
        return self._memo("hyper", lambda: build_rho(self.family()))

    def zero_ode(self) -> AdmissibleOde:
        return self._memo("zero_ode", lambda: beta_family(self.m, 0, self.work))

    def zero_hyper(self):
        return self._memo(
            "zero_hyper",
            lambda: build_rho(solve_psi(self.zero_ode(), +1, self.rect)),
        )

    def solutions(self):
        return self._memo(
            "solutions",
            lambda: formal_solutions(self.m, self.beta, self.degree),
        )

    def chi_tau(self) -> GaugeMap:
        return self._memo("chi_tau", lambda: build_chi_tau(self.solutions()))


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def _witness2(diff) -> dict | None:
    fn = diff.first_nonzero()
    if fn is None:
        return None
    (j, k), value = fn
    return {"cell": [j, k], "value": str(value)}


def _witness1(diff) -> dict | None:
    fn = diff.first_nonzero()
    if fn is None:
        return None
    return {"degree": fn[0], "value": str(fn[1])}


def _series_eq(a, b):
    """(equal, witness) on the common truncation."""
    if hasattr(a, "trunc"):
        common = min(a.trunc, b.trunc)
        diff = a.truncate(common) - b.truncate(common)
        return diff.is_zero, _witness1(diff)
    nx, ny = min(a.nx, b.nx), min(a.ny, b.ny)
    diff = a.restrict(nx, ny) - b.restrict(nx, ny)
    return diff.is_zero, _witness2(diff)


def check_roundtrip(ctx: FamilyContext) -> dict:
    fam = ctx.family()
    p, q = extract_pq(fam)
    e = ctx.ode()
    ok_p, wit_p = _series_eq(p, e.p)
    ok_q, wit_q = _series_eq(q, e.q)
    return {
        "pass": ok_p and ok_q,
        "rect": list(ctx.rect),
        "p_order": min(p.trunc, e.p.trunc),
        "q_order": min(q.trunc, e.q.trunc),
        "witness": wit_p or wit_q,
    }


def check_reality(ctx: FamilyContext) -> dict:
    fam = ctx.family()
    structural = real_structure_test(fam)
    p, q = extract_pq(fam)
    coeff = check_real_structure(AdmissibleOde(ctx.m, p, q))
    recovered_ok = False
    witness = structural.witness or coeff.witness
    if coeff.ok:
        if ctx.beta is not None:
            a_ref = TruncSeries1.one(coeff.a.trunc)
            b_ref = TruncSeries1.monomial(QI.of(ctx.beta), 2 * ctx.m - 2,
                                          coeff.b.trunc)
        else:
            a_ref, b_ref = ctx.data.a, ctx.data.b
        ok_a, wit_a = _series_eq(coeff.a, a_ref)
        ok_b, wit_b = _series_eq(coeff.b, b_ref)
        recovered_ok = ok_a and ok_b
        witness = witness or wit_a or wit_b
    return {
        "pass": structural.ok and coeff.ok and recovered_ok,
        "dual_equals_conjugated": structural.ok,
        "coefficient_test": coeff.ok,
        "recovered_data": recovered_ok,
        "witness": witness,
    }


def check_realty(ctx: FamilyContext) -> dict:
    h = ctx.hyper()
    res = realty_identity_check(h)
    ok = res.is_zero
    witness = None if ok else _witness2(res)
    normal_ok = True
    detail = None
    try:
        nf = real_normal_form(h)
        if h.rho.nx >= 2 and not nf.hks:
            normal_ok = False
            detail = "no normal-form coefficients extracted"
    except (RealityError, SeriesError) as exc:
        normal_ok = False
        detail = str(exc)
    return {
        "pass": ok and normal_ok,
        "rect": [res.nx, res.ny],
        "normal_form": normal_ok,
        "detail": detail,
        "witness": witness,
    }


def check_map(ctx: FamilyContext) -> dict:
    if ctx.beta is None or ctx.m < 2:
        return {"pass": None, "detail": "needs a family member with m >= 2"}
    gauge = ctx.chi_tau()
    pulled = pullback_under_gauge(ctx.zero_ode(), gauge, ctx.m)
    e = ctx.ode()
    ok_p, wit_p = _series_eq(pulled.p, e.p)
    ok_q, wit_q = _series_eq(pulled.q, e.q)
    res = verify_map_on_hypersurface(ctx.hyper(), ctx.zero_hyper(), gauge)
    ok_h = res.is_zero
    return {
        "pass": ok_p and ok_q and ok_h,
        "ode_order": min(pulled.trunc, e.trunc),
        "hypersurface_rect": [res.nx, res.ny],
        "witness": wit_p or wit_q or (None if ok_h else _witness2(res)),
    }


def check_coupled(ctx: FamilyContext) -> dict:
    if ctx.beta is None or ctx.m < 2:
        return {"pass": None, "detail": "needs a family member with m >= 2"}
    gauge = ctx.chi_tau()
    paired = coupled_map_g(gauge, ctx.m)
    ok_l, wit_l = _series_eq(paired.f, gauge.f.conj())
    ok_m, wit_m = _series_eq(paired.g, gauge.g.conj())
    residual = coupled_residual(gauge, paired, ctx.m)
    ok_r = residual.is_zero
    return {
        "pass": ok_l and ok_m and ok_r,
        "witness": wit_l or wit_m or (None if ok_r else _witness1(residual)),
    }


def check_selfmap(ctx: FamilyContext) -> dict:
    degree = min(12, ctx.degree)
    report = self_map_probe_cached(ctx, degree)
    dims = [st.dimension for st in report.stages]
    return {
        "pass": report.rigid and report.identity,
        "degree": degree,
        "dimensions": dims,
        "verified_order": report.verified_order,
        "witness": None if report.rigid else {"free_degrees": [
            st.degree for st in report.stages if st.dimension > 0
        ]},
    }


def self_map_probe_cached(ctx: FamilyContext, degree: int):
    from .equiv import self_map_probe

    def build():
        return self_map_probe(ctx.ode(), degree)
    return ctx._memo(("probe", degree), build)


def check_monodromy(ctx: FamilyContext) -> dict:
    if ctx.beta is None or ctx.m < 2:
        return {"pass": None, "detail": "needs a family member with m >= 2"}
    report = monodromy_report(ctx.m, ctx.beta, numeric=True,
                              radius=ctx.radius, tol=ctx.tol)
    num = report.numeric
    ok = num.deviation < 1e-6
    return {
        "pass": ok,
        "trivial": report.trivial,
        "eigenvalue_sum": report.eigenvalue_sum,
        "eigenvalue_product": str(report.eigenvalue_product),
        "predicted": [[ev.real, ev.imag] for ev in report.predicted_eigenvalues],
        "numeric_deviation": num.deviation,
        "det_deviation": num.det_deviation,
        "witness": None if ok else {"deviation": num.deviation},
    }


def check_tangency(ctx: FamilyContext) -> dict:
    if ctx.beta is None or ctx.m < 2:
        return {"pass": None, "detail": "needs a family member with m >= 2"}
    fieldrep = build_vector_field(ctx.chi_tau(), ctx.m)
    res = tangency_check(fieldrep, ctx.hyper())
    ok = res.is_zero
    return {
        "pass": ok,
        "rect": [res.nx, res.ny],
        "witness": None if ok else _witness2(res),
    }


def check_model0(ctx: FamilyContext) -> dict:
    if ctx.beta is None or ctx.m < 2:
        return {"pass": None, "detail": "needs a family member with m >= 2"}
    if ctx.beta != 0:
        return {"pass": None, "detail": "closed-form model applies to beta = 0"}
    model = explicit_model(ctx.m, ctx.rect)
    ok, wit = _series_eq(model.rho, ctx.hyper().rho)
    return {"pass": ok, "rect": list(ctx.rect), "witness": wit}


def check_growth(ctx: FamilyContext) -> dict:
    if ctx.beta is None or ctx.m < 2:
        return {"pass": None, "detail": "needs a family member with m >= 2"}
    n = max(200, ctx.degree)
    pair = formal_solutions(ctx.m, ctx.beta, n)
    term = termination_detect(pair.f)
    expected = expected_termination(ctx.m, ctx.beta)
    out = {
        "pass": term.terminated == expected,
        "terminated": term.terminated,
        "termination_expected": expected,
        "termination_degree": term.degree,
        "witness": None,
    }
    if not term.terminated:
        report = gevrey_estimate(pair.f)
        out["gevrey"] = report.gevrey
        out["gevrey_stderr"] = report.gevrey_stderr
        out["radius"] = report.radius
    if term.terminated != expected:
        out["witness"] = {"terminated": term.terminated, "expected": expected}
    return out


CHECKS = {
    "roundtrip": check_roundtrip,
    "reality": check_reality,
    "realty": check_realty,
    "map": check_map,
    "coupled": check_coupled,
    "selfmap": check_selfmap,
    "monodromy": check_monodromy,
    "tangency": check_tangency,
    "model0": check_model0,
    "growth": check_growth,
}


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------


def _run_one(payload) -> dict:
    spec, checks, degree, rect, radius, tol = payload
    if isinstance(spec, tuple):
        ctx = FamilyContext(spec[0], beta=spec[1], degree=degree, rect=rect,
                            radius=radius, tol=tol)
    else:
        data = RealData(spec["m"],
                        TruncSeries1.from_json(spec["a"]),
                        TruncSeries1.from_json(spec["b"]))
        ctx = FamilyContext(spec["m"], data=data, degree=degree, rect=rect,
                            radius=radius, tol=tol)
    results = {}
    for name in checks:
        try:
            entry = CHECKS[name](ctx)
        except (SeriesError, RealityError, ValueError, ZeroDivisionError,
                RuntimeError) as exc:
            entry = {"pass": False, "error": str(exc), "witness": None}
        results[name] = entry
    return {"family": ctx.label(), "checks": results}


def run_pipeline(cfg: RunConfig) -> tuple[dict, int]:
    cfg.validate()
    payloads = []
    for m, beta in cfg.families:
        payloads.append(((m, beta), cfg.checks, cfg.degree, cfg.rect,
                         cfg.radius, cfg.tol))
    if cfg.explicit is not None:
        payloads.append((cfg.explicit, cfg.checks, cfg.degree, cfg.rect,
                         cfg.radius, cfg.tol))
    if cfg.jobs > 1 and len(payloads) > 1:
        with Pool(min(cfg.jobs, len(payloads))) as pool:
            runs = pool.map(_run_one, payloads)
    else:
        runs = [_run_one(p) for p in payloads]
    report = {"version": REPORT_VERSION, "runs": runs}
    failed = any(
        entry.get("pass") is False
        for run in runs
        for entry in run["checks"].values()
    )
    return report, (1 if failed else 0)


def _round_floats(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, complex):
        return [_round_floats(obj.real), _round_floats(obj.imag)]
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def emit(obj, out: str | None):
    text = json.dumps(_round_floats(obj), indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--degree", type=int, default=40,
                   help="univariate truncation order (default 40)")
    p.add_argument("--rect", "--trunc", type=str, default="8,24",
                   help="bivariate rectangle Nx,Ny (default 8,24)")
    p.add_argument("--backend", choices=[EXACT, "float"], default=EXACT)
    p.add_argument("--out", type=str, default=None,
                   help="write JSON here instead of stdout")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel workers for family grids")


def _family_args(p: argparse.ArgumentParser):
    p.add_argument("--family", action="append", default=[],
                   metavar="m,beta", help="family member (repeatable)")
    p.add_argument("--m", type=int, default=None, help="order for explicit data")
    p.add_argument("--a", type=str, default=None,
                   help="polynomial for a, e.g. '1*w^0+1/2*w^2'")
    p.add_argument("--b", type=str, default=None,
                   help="polynomial for b, e.g. '1*w^2'")


def _context_from_args(args, need_beta: bool = False) -> FamilyContext:
    if getattr(args, "backend", EXACT) != EXACT:
        raise ConfigError(
            "identity checks run on the exact backend only; the float backend "
            "is used internally by monodromy and growth"
        )
    rect = parse_rect(args.rect)
    if args.family:
        m, beta = parse_family(args.family[0])
        return FamilyContext(m, beta=beta, degree=args.degree, rect=rect)
    if args.m is None or args.a is None or args.b is None:
        raise ConfigError("need --family or all of --m/--a/--b")
    if need_beta:
        raise ConfigError("this command needs a --family member")
    work = max(rect[0] + rect[1] + 2 * args.m + 2, args.degree + 2 * args.m + 10)
    data = RealData(args.m, parse_polynomial(args.a, work),
                    parse_polynomial(args.b, work))
    return FamilyContext(args.m, data=data, degree=args.degree, rect=rect)


def cmd_build_ode(args) -> int:
    ctx = _context_from_args(args)
    emit(ctx.ode().to_json(), args.out)
    return 0


def cmd_segre(args) -> int:
    ctx = _context_from_args(args)
    pieces = args.emit.split(",")
    out = {"family": ctx.label(), "rect": list(ctx.rect), "sign": args.sign}
    if args.sign == +1:
        fam = ctx.family()
        hyper = ctx.hyper()
    else:
        fam = solve_psi(ctx.ode(), args.sign, ctx.rect)
        hyper = build_rho(fam)
    for piece in pieces:
        if piece == "psi":
            out["psi"] = fam.psi.to_json()
        elif piece == "rho":
            out["rho"] = hyper.rho.to_json()
        elif piece == "hk":
            nf = real_normal_form(hyper)
            out["normal_form_sign"] = nf.sign
            out["hk"] = {str(k): s.to_json() for k, s in nf.hks.items()}
        else:
            raise ConfigError(f"unknown --emit piece {piece!r}")
    emit(out, args.out)
    return 0


def cmd_check(args) -> int:
    ctx = _context_from_args(args)
    names = args.checks.split(",") if args.checks else ["roundtrip", "reality",
                                                        "realty"]
    results = {}
    for name in names:
        if name not in CHECKS:
            raise ConfigError(f"unknown check {name!r}")
        results[name] = CHECKS[name](ctx)
    report = {"version": REPORT_VERSION,
              "runs": [{"family": ctx.label(), "checks": results}]}
    emit(report, args.out)
    return 1 if any(r.get("pass") is False for r in results.values()) else 0


def cmd_equiv(args) -> int:
    ctx = _context_from_args(args, need_beta=True)
    out = {"family": ctx.label(), "degree": ctx.degree}
    gauge = ctx.chi_tau()
    for piece in (args.emit.split(",") if args.emit else []):
        if piece == "chi":
            out["chi"] = gauge.f.to_json()
        elif piece == "tau":
            out["tau"] = gauge.g.to_json()
        elif piece == "G":
            paired = coupled_map_g(gauge, ctx.m)
            out["G"] = paired.to_json()
        else:
            raise ConfigError(f"unknown --emit piece {piece!r}")
    failed = False
    for name in (args.verify.split(",") if args.verify else []):
        mapping = {"ode": "map", "hypersurface": "map", "coupled": "coupled"}
        if name not in mapping:
            raise ConfigError(f"unknown --verify target {name!r}")
        entry = CHECKS[mapping[name]](ctx)
        out.setdefault("verify", {})[name] = entry
        failed = failed or entry.get("pass") is False
    emit(out, args.out)
    return 1 if failed else 0


def cmd_monodromy(args) -> int:
    m, beta = parse_family(args.family[0]) if args.family else (None, None)
    if m is None:
        raise ConfigError("monodromy needs --family m,beta")
    report = monodromy_report(m, beta, numeric=args.numeric,
                              radius=args.radius, tol=args.tol)
    out = {
        "family": [m, str(beta)],
        "trivial": report.trivial,
        "eigenvalue_sum": report.eigenvalue_sum,
        "eigenvalue_product": str(report.eigenvalue_product),
        "discriminant": str(report.discriminant),
        "residue_eigenvalues": [[l.real, l.imag]
                                for l in report.residue_eigenvalues],
        "predicted_eigenvalues": [[e.real, e.imag]
                                  for e in report.predicted_eigenvalues],
    }
    if report.integer_eigenvalues is not None:
        out["integer_eigenvalues"] = list(report.integer_eigenvalues)
    if report.numeric is not None:
        num = report.numeric
        out["numeric"] = {
            "eigenvalues": [[e.real, e.imag] for e in num.eigenvalues],
            "deviation": num.deviation,
            "det_deviation": num.det_deviation,
            "radius": num.radius,
            "tol": num.tol,
            "n_evaluations": num.n_evaluations,
        }
    emit(out, args.out)
    return 0


def cmd_autovec(args) -> int:
    ctx = _context_from_args(args, need_beta=True)
    out = {"family": ctx.label()}
    failed = False
    for name in args.check.split(","):
        if name == "tangency":
            entry = check_tangency(ctx)
            out["tangency"] = entry
            failed = failed or entry.get("pass") is False
        elif name == "lambda":
            chk = straightening_check(ctx.m)
            out["lambda"] = {"pass": chk.ok, "witness": chk.witness}
            failed = failed or not chk.ok
        else:
            raise ConfigError(f"unknown --check target {name!r}")
    fieldrep = build_vector_field(ctx.chi_tau(), ctx.m)
    out["field"] = {"A": fieldrep.a.to_json(), "B": fieldrep.b.to_json()}
    emit(out, args.out)
    return 1 if failed else 0


def cmd_growth(args) -> int:
    window = parse_rect(args.window) if args.window else None
    if args.series:
        with open(args.series, "r", encoding="utf-8") as fh:
            series = TruncSeries1.from_json(json.load(fh))
        label = args.series
    elif args.family:
        m, beta = parse_family(args.family[0])
        series = formal_solutions(m, beta, max(200, args.degree)).f
        label = [m, str(beta)]
    else:
        raise ConfigError("growth needs --series FILE or --family m,beta")
    term = termination_detect(series)
    out = {"series": label, "terminated": term.terminated,
           "termination_degree": term.degree}
    if not term.terminated:
        report = gevrey_estimate(series, window=window)
        out.update({
            "gevrey": report.gevrey,
            "gevrey_stderr": report.gevrey_stderr,
            "confidence": list(report.confidence),
            "fit_window": list(report.fit_window),
            "radius": report.radius,
            "n_points": report.n_points,
        })
    emit(out, args.out)
    return 0


def cmd_run(args) -> int:
    file_cfg = config_from_file(args.config) if args.config else {}
    families = [parse_family(f) for f in args.family] if args.family else [
        (int(f[0]), Fraction(str(f[1]))) for f in file_cfg.get("families", [])
    ]
    checks = (args.checks.split(",") if args.checks
              else file_cfg.get("checks", list(ALL_CHECKS)))
    cfg = RunConfig(
        families=families,
        checks=checks,
        degree=args.degree if args.degree is not None
        else file_cfg.get("degree", 40),
        rect=parse_rect(args.rect) if args.rect
        else tuple(file_cfg.get("rect", (8, 24))),
        radius=args.radius if args.radius is not None
        else file_cfg.get("radius", 1.0),
        tol=args.tol if args.tol is not None else file_cfg.get("tol", 1e-10),
        out=args.out or file_cfg.get("out"),
        jobs=args.jobs if args.jobs is not None else file_cfg.get("jobs", 1),
    )
    report, code = run_pipeline(cfg)
    emit(report, cfg.out)
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="segreode",
        description="Exact formal-series toolkit for singular second-order "
                    "ODEs, Segre families, and nonminimal real hypersurfaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-ode", help="construct an admissible ODE")
    _family_args(p)
    _add_common(p)
    p.set_defaults(fn=cmd_build_ode)

    p = sub.add_parser("segre", help="solve the family profile and emit series")
    _family_args(p)
    _add_common(p)
    p.add_argument("--sign", type=int, choices=(1, -1), default=1)
    p.add_argument("--emit", type=str, default="psi",
                   help="comma list from psi,rho,hk")
    p.set_defaults(fn=cmd_segre)

    p = sub.add_parser("check", help="run reality checks on one member")
    _family_args(p)
    _add_common(p)
    p.add_argument("--checks", type=str, default=None)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("equiv", help="gauge equivalence onto the beta=0 member")
    _family_args(p)
    _add_common(p)
    p.add_argument("--emit", type=str, default="chi,tau")
    p.add_argument("--verify", type=str, default=None,
                   help="comma list from ode,hypersurface,coupled")
    p.set_defaults(fn=cmd_equiv)

    p = sub.add_parser("monodromy", help="monodromy classification")
    _family_args(p)
    _add_common(p)
    p.add_argument("--numeric", action="store_true")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(fn=cmd_monodromy)

    p = sub.add_parser("autovec", help="infinitesimal automorphism checks")
    _family_args(p)
    _add_common(p)
    p.add_argument("--check", type=str, default="tangency,lambda")
    p.set_defaults(fn=cmd_autovec)

    p = sub.add_parser("growth", help="divergence diagnostics")
    _family_args(p)
    _add_common(p)
    p.add_argument("--series", type=str, default=None,
                   help="JSON file holding a univariate series")
    p.add_argument("--window", type=str, default=None, metavar="KMIN,KMAX")
    p.set_defaults(fn=cmd_growth)

    p = sub.add_parser("run", help="full verification pipeline over a grid")
    p.add_argument("--family", action="append", default=[], metavar="m,beta")
    p.add_argument("--checks", type=str, default=None)
    p.add_argument("--config", type=str, default=None,
                   help="JSON config; flags override file values")
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--rect", type=str, default=None)
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(fn=cmd_run)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (MemoryError, RecursionError) as exc:
        print(f"resource limit: {exc!r}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
