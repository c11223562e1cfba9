"""Truncated formal power/Laurent series, exact or floating, in one and two
variables.

Conventions
-----------
* A :class:`TruncSeries1` stores coefficients for degrees ``-pole .. trunc``.
  Degrees above ``trunc`` are *unknown*, never assumed zero; every operation
  propagates the guaranteed truncation pessimistically (min rules), so the
  ``trunc`` field of a result is always a sound guarantee.
* A :class:`TruncSeries2` stores a dense coefficient rectangle for
  ``x^j * y^k`` with ``0 <= j <= nx``, ``0 <= k <= ny`` and has no pole part.
* Exact series hold :class:`segreode.coefficients.QI` cells; float series hold
  Python complex. The two backends never mix inside one operation.
* Values are immutable; all operations are pure functions and safe to share
  across threads.

Multiplication extracts a common denominator per operand and convolves raw
integers, which keeps exact arithmetic fast enough for the rectangle sizes
used elsewhere in the package.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .coefficients import EXACT, FLOAT, QI, coeff_from_json, coeff_to_json

# Largest pole order any operation may produce.  The admissible-ODE layer
# needs poles up to 2m plus a little slack for intermediate quotients.
POLE_CAP = 64


class SeriesError(ValueError):
    pass


class BackendMismatch(SeriesError):
    pass


class TruncationStarvation(SeriesError):
    pass


class PoleOverflow(SeriesError):
    pass


Scalar = Union[int, Fraction, QI, float, complex]


def _zero_cell(backend: str):
    return QI(0) if backend == EXACT else 0j


def _cell_is_zero(c) -> bool:
    if isinstance(c, QI):
        return c.is_zero
    return c == 0


def _as_cell(value: Scalar, backend: str):
    if backend == EXACT:
        if isinstance(value, (float, complex)):
            raise BackendMismatch("float scalar used with exact series")
        return QI.of(value)
    if isinstance(value, QI):
        return value.to_complex()
    return complex(value)


def _check_backends(a, b):
    if a.backend != b.backend:
        raise BackendMismatch(f"mixed backends {a.backend!r} and {b.backend!r}")


# ---------------------------------------------------------------------------
# convolution kernels
# ---------------------------------------------------------------------------


def _lcm_den(cells: Iterable[QI]) -> int:
    lcm = 1
    for c in cells:
        d = c.d
        if d != 1:
            lcm = lcm // math.gcd(lcm, d) * d
    return lcm


def _scaled(cells: Sequence[QI], lcm: int):
    out = []
    for c in cells:
        m = lcm // c.d
        out.append((c.a * m, c.b * m))
    return out


def _conv1_exact(a: Sequence[QI], b: Sequence[QI], out_len: int):
    la = _lcm_den(a)
    lb = _lcm_den(b)
    sa = _scaled(a, la)
    sb = _scaled(b, lb)
    sb_nz = [(j, br, bi) for j, (br, bi) in enumerate(sb) if br or bi]
    rr = [0] * out_len
    ri = [0] * out_len
    for i, (ar, ai) in enumerate(sa):
        if i >= out_len:
            break
        if not (ar or ai):
            continue
        jmax = out_len - i
        for j, br, bi in sb_nz:
            if j >= jmax:
                break
            k = i + j
            rr[k] += ar * br - ai * bi
            ri[k] += ar * bi + ai * br
    den = la * lb
    return [QI(rr[k], ri[k], den) for k in range(out_len)]


def _conv1_float(a, b, out_len: int):
    out = [0j] * out_len
    for i, ca in enumerate(a):
        if i >= out_len:
            break
        if ca == 0:
            continue
        jmax = min(len(b), out_len - i)
        for j in range(jmax):
            cb = b[j]
            if cb != 0:
                out[i + j] += ca * cb
    return out


def _conv2_exact(rows_a, rows_b, nx: int, ny: int):
    la = _lcm_den(c for row in rows_a for c in row)
    lb = _lcm_den(c for row in rows_b for c in row)
    sa = [_scaled(row, la) for row in rows_a]
    sb = [
        [(l, br, bi) for l, (br, bi) in enumerate(_scaled(row, lb)) if br or bi]
        for row in rows_b
    ]
    acc_r = [[0] * (ny + 1) for _ in range(nx + 1)]
    acc_i = [[0] * (ny + 1) for _ in range(nx + 1)]
    nxb = len(rows_b) - 1
    for ja, row_a in enumerate(sa):
        if ja > nx:
            break
        jb_hi = min(nxb, nx - ja)
        for la_idx, (ar, ai) in enumerate(row_a):
            if la_idx > ny:
                break
            if not (ar or ai):
                continue
            lb_hi = ny - la_idx
            for jb in range(jb_hi + 1):
                tr = acc_r[ja + jb]
                ti = acc_i[ja + jb]
                for l, br, bi in sb[jb]:
                    if l > lb_hi:
                        break
                    k = la_idx + l
                    tr[k] += ar * br - ai * bi
                    ti[k] += ar * bi + ai * br
    den = la * lb
    return [
        tuple(QI(acc_r[j][l], acc_i[j][l], den) for l in range(ny + 1))
        for j in range(nx + 1)
    ]


def _conv2_float(rows_a, rows_b, nx: int, ny: int):
    acc = [[0j] * (ny + 1) for _ in range(nx + 1)]
    nxb = len(rows_b) - 1
    for ja, row_a in enumerate(rows_a):
        if ja > nx:
            break
        jb_hi = min(nxb, nx - ja)
        for la_idx, ca in enumerate(row_a):
            if la_idx > ny:
                break
            if ca == 0:
                continue
            lb_hi = ny - la_idx
            for jb in range(jb_hi + 1):
                row_b = rows_b[jb]
                tr = acc[ja + jb]
                for l in range(min(len(row_b) - 1, lb_hi) + 1):
                    cb = row_b[l]
                    if cb != 0:
                        tr[la_idx + l] += ca * cb
    return [tuple(row) for row in acc]


# ---------------------------------------------------------------------------
# univariate series
# ---------------------------------------------------------------------------


class TruncSeries1:
    """Univariate truncated Laurent series: degrees ``-pole .. trunc``."""

    __slots__ = ("backend", "pole", "trunc", "coeffs")

    def __init__(self, coeffs: Sequence, pole: int = 0, trunc: int | None = None,
                 backend: str = EXACT):
        if trunc is None:
            trunc = len(coeffs) - 1 - pole
        if len(coeffs) != trunc + pole + 1:
            raise SeriesError(
                f"coefficient list length {len(coeffs)} != trunc {trunc} + pole {pole} + 1"
            )
        if trunc < 0:
            raise TruncationStarvation(f"truncation order {trunc} < 0")
        cells = [_as_cell(c, backend) if not isinstance(c, (QI, complex)) else c
                 for c in coeffs]
        if backend == EXACT and any(isinstance(c, complex) for c in cells):
            raise BackendMismatch("complex cell in exact series")
        if backend == FLOAT:
            cells = [c.to_complex() if isinstance(c, QI) else complex(c) for c in cells]
        # strip structural zeros below the first nonzero to normalize the pole
        while pole > 0 and _cell_is_zero(cells[0]):
            cells.pop(0)
            pole -= 1
        if pole > POLE_CAP:
            raise PoleOverflow(f"pole order {pole} exceeds cap {POLE_CAP}")
        object.__setattr__(self, "backend", backend)
        object.__setattr__(self, "pole", pole)
        object.__setattr__(self, "trunc", trunc)
        object.__setattr__(self, "coeffs", tuple(cells))

    def __setattr__(self, *_):
        raise AttributeError("series are immutable")

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, trunc: int, backend: str = EXACT) -> "TruncSeries1":
        return cls([_zero_cell(backend)] * (trunc + 1), 0, trunc, backend)

    @classmethod
    def constant(cls, value: Scalar, trunc: int, backend: str = EXACT) -> "TruncSeries1":
        cells = [_zero_cell(backend)] * (trunc + 1)
        cells[0] = _as_cell(value, backend)
        return cls(cells, 0, trunc, backend)

    @classmethod
    def one(cls, trunc: int, backend: str = EXACT) -> "TruncSeries1":
        return cls.constant(1, trunc, backend)

    @classmethod
    def var(cls, trunc: int, backend: str = EXACT) -> "TruncSeries1":
        return cls.monomial(1, 1, trunc, backend)

    @classmethod
    def monomial(cls, value: Scalar, degree: int, trunc: int,
                 backend: str = EXACT) -> "TruncSeries1":
        pole = max(0, -degree)
        if degree > trunc:
            raise TruncationStarvation(f"monomial degree {degree} above trunc {trunc}")
        cells = [_zero_cell(backend)] * (trunc + pole + 1)
        cells[degree + pole] = _as_cell(value, backend)
        return cls(cells, pole, trunc, backend)

    @classmethod
    def from_terms(cls, terms: dict, trunc: int, backend: str = EXACT) -> "TruncSeries1":
        pole = max(0, -min(terms.keys(), default=0))
        cells = [_zero_cell(backend)] * (trunc + pole + 1)
        for deg, val in terms.items():
            if deg > trunc:
                raise TruncationStarvation(f"term degree {deg} above trunc {trunc}")
            cells[deg + pole] = _as_cell(val, backend)
        return cls(cells, pole, trunc, backend)

    # -- queries ----------------------------------------------------------

    def coefficient(self, degree: int):
        """Coefficient at ``degree``; degrees above trunc are unknown."""
        if degree > self.trunc:
            raise TruncationStarvation(
                f"coefficient of degree {degree} is beyond truncation {self.trunc}"
            )
        if degree < -self.pole:
            return _zero_cell(self.backend)
        return self.coeffs[degree + self.pole]

    @property
    def is_zero(self) -> bool:
        return all(_cell_is_zero(c) for c in self.coeffs)

    def order(self) -> int | None:
        """Degree of the lowest nonzero stored coefficient, or None."""
        for i, c in enumerate(self.coeffs):
            if not _cell_is_zero(c):
                return i - self.pole
        return None

    def first_nonzero(self):
        """(degree, coefficient) of the lowest nonzero term, or None."""
        v = self.order()
        if v is None:
            return None
        return v, self.coefficient(v)

    def items(self):
        for i, c in enumerate(self.coeffs):
            yield i - self.pole, c

    def __eq__(self, other):
        """Equality of all coefficients up to the common truncation."""
        if not isinstance(other, TruncSeries1):
            return NotImplemented
        if self.backend != other.backend:
            return False
        hi = min(self.trunc, other.trunc)
        lo = -max(self.pole, other.pole)
        if hi < lo:
            return True
        for k in range(lo, hi + 1):
            if self.coefficient(k) != other.coefficient(k):
                return False
        return True

    __hash__ = None

    def __repr__(self):
        shown = []
        for deg, c in self.items():
            if not _cell_is_zero(c):
                shown.append(f"({c})*w^{deg}" if deg else f"({c})")
            if len(shown) >= 6:
                break
        body = " + ".join(shown) if shown else "0"
        return f"<series {body} + O(w^{self.trunc + 1})>"

    # -- structural ops ---------------------------------------------------

    def truncate(self, trunc: int) -> "TruncSeries1":
        if trunc > self.trunc:
            raise TruncationStarvation(
                f"cannot extend truncation {self.trunc} to {trunc}"
            )
        if trunc == self.trunc:
            return self
        return TruncSeries1(list(self.coeffs[: trunc + self.pole + 1]),
                            self.pole, trunc, self.backend)

    def shift(self, k: int) -> "TruncSeries1":
        """Multiply by w^k (exact, k of either sign)."""
        if self.pole - k >= 0:
            return TruncSeries1(list(self.coeffs), self.pole - k,
                                self.trunc + k, self.backend)
        pad = [_zero_cell(self.backend)] * (k - self.pole)
        return TruncSeries1(pad + list(self.coeffs), 0, self.trunc + k,
                            self.backend)

    def conj(self) -> "TruncSeries1":
        if self.backend == EXACT:
            cells = [c.conj() for c in self.coeffs]
        else:
            cells = [c.conjugate() for c in self.coeffs]
        return TruncSeries1(cells, self.pole, self.trunc, self.backend)

    def to_float(self) -> "TruncSeries1":
        if self.backend == FLOAT:
            return self
        return TruncSeries1([c.to_complex() for c in self.coeffs],
                            self.pole, self.trunc, FLOAT)

    # -- ring ops ----------------------------------------------------------

    def _aligned(self, other):
        pole = max(self.pole, other.pole)
        trunc = min(self.trunc, other.trunc)
        z = _zero_cell(self.backend)

        def cells(s):
            out = [z] * (pole - s.pole)
            out.extend(s.coeffs[: trunc + s.pole + 1])
            out.extend([z] * (trunc + pole + 1 - len(out)))
            return out

        return cells(self), cells(other), pole, trunc

    def __add__(self, other):
        if not isinstance(other, TruncSeries1):
            return NotImplemented
        _check_backends(self, other)
        ca, cb, pole, trunc = self._aligned(other)
        return TruncSeries1([x + y for x, y in zip(ca, cb)], pole, trunc, self.backend)

    def __sub__(self, other):
        if not isinstance(other, TruncSeries1):
            return NotImplemented
        _check_backends(self, other)
        ca, cb, pole, trunc = self._aligned(other)
        return TruncSeries1([x - y for x, y in zip(ca, cb)], pole, trunc, self.backend)

    def __neg__(self):
        return TruncSeries1([-c for c in self.coeffs], self.pole, self.trunc,
                            self.backend)

    def scale(self, value: Scalar) -> "TruncSeries1":
        c = _as_cell(value, self.backend)
        return TruncSeries1([c * x for x in self.coeffs], self.pole, self.trunc,
                            self.backend)

    def __mul__(self, other):
        if not isinstance(other, TruncSeries1):
            return self.scale(other)
        _check_backends(self, other)
        trunc = min(self.trunc - other.pole, other.trunc - self.pole)
        pole = self.pole + other.pole
        if trunc < -pole:
            raise TruncationStarvation("product truncation exhausted")
        out_len = trunc + pole + 1
        if self.backend == EXACT:
            cells = _conv1_exact(self.coeffs, other.coeffs, out_len)
        else:
            cells = _conv1_float(self.coeffs, other.coeffs, out_len)
        return TruncSeries1(cells, pole, trunc, self.backend)

    __rmul__ = __mul__

    def pow_int(self, n: int) -> "TruncSeries1":
        if n < 0:
            return self.inverse().pow_int(-n)
        result = TruncSeries1.one(self.trunc, self.backend)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- division ------------------------------------------------------------

    def inverse(self) -> "TruncSeries1":
        return divide(TruncSeries1.one(self.trunc + self.pole, self.backend), self)

    def __truediv__(self, other):
        if isinstance(other, TruncSeries1):
            return divide(self, other)
        c = _as_cell(other, self.backend)
        if self.backend == EXACT:
            inv = QI(1) / c
        else:
            inv = 1.0 / c
        return self.scale(inv)

    # -- calculus -------------------------------------------------------------

    def derivative(self) -> "TruncSeries1":
        if self.trunc < 1 and self.pole == 0:
            raise TruncationStarvation("cannot differentiate a trunc-0 series")
        pole = self.pole + 1 if self.pole > 0 else 0
        trunc = self.trunc - 1
        z = _zero_cell(self.backend)
        cells = [z] * (trunc + pole + 1)
        for deg, c in self.items():
            if deg == 0 or _cell_is_zero(c):
                continue
            tgt = deg - 1
            if -pole <= tgt <= trunc:
                cells[tgt + pole] = c * deg
        return TruncSeries1(cells, pole, trunc, self.backend)

    # -- transcendental -------------------------------------------------------

    def exp(self) -> "TruncSeries1":
        if self.pole > 0 or not _cell_is_zero(self.coefficient(0)):
            raise SeriesError("exp requires a pole-free series with zero constant term")
        result = TruncSeries1.one(self.trunc, self.backend)
        term = TruncSeries1.one(self.trunc, self.backend)
        for k in range(1, self.trunc + 1):
            term = term * self
            if term.is_zero:
                break
            scaled = term.scale(Fraction(1, math.factorial(k))) if self.backend == EXACT \
                else term.scale(1.0 / math.factorial(k))
            result = result + scaled
        return result

    def log(self) -> "TruncSeries1":
        one = _as_cell(1, self.backend)
        if self.pole > 0 or self.coefficient(0) != one:
            raise SeriesError("log requires constant term exactly 1")
        y = self - TruncSeries1.one(self.trunc, self.backend)
        result = TruncSeries1.zero(self.trunc, self.backend)
        term = TruncSeries1.one(self.trunc, self.backend)
        for k in range(1, self.trunc + 1):
            term = term * y
            if term.is_zero:
                break
            coeff = Fraction(1 if k % 2 else -1, k) if self.backend == EXACT \
                else (1.0 if k % 2 else -1.0) / k
            result = result + term.scale(coeff)
        return result

    def pow_frac(self, alpha) -> "TruncSeries1":
        """Principal formal branch u^alpha = exp(alpha*log(u)); needs u(0) = 1."""
        a = Fraction(alpha) if not isinstance(alpha, Fraction) else alpha
        return self.log().scale(a).exp()

    # -- composition ----------------------------------------------------------

    def compose(self, inner):
        return compose(self, inner)

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "pole": self.pole,
            "trunc": self.trunc,
            "coeffs": [coeff_to_json(c, self.backend) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TruncSeries1":
        cells = []
        backend = None
        for raw in obj["coeffs"]:
            c, b = coeff_from_json(raw)
            if backend is None:
                backend = b
            elif backend != b:
                raise BackendMismatch("mixed exact and float coefficients in JSON")
            cells.append(c)
        backend = backend or EXACT
        return cls(cells, obj.get("pole", 0), obj["trunc"], backend)


# ---------------------------------------------------------------------------
# bivariate series
# ---------------------------------------------------------------------------


class TruncSeries2:
    """Bivariate truncated power series on the rectangle (nx, ny), no poles."""

    __slots__ = ("backend", "nx", "ny", "rows")

    def __init__(self, rows: Sequence[Sequence], nx: int | None = None,
                 ny: int | None = None, backend: str = EXACT):
        if nx is None:
            nx = len(rows) - 1
        if ny is None:
            ny = len(rows[0]) - 1 if rows else 0
        if nx < 0 or ny < 0:
            raise TruncationStarvation(f"rectangle ({nx}, {ny}) is empty")
        if len(rows) != nx + 1 or any(len(r) != ny + 1 for r in rows):
            raise SeriesError("rectangle shape mismatch")
        conv = []
        for r in rows:
            cells = [_as_cell(c, backend) if not isinstance(c, (QI, complex)) else c
                     for c in r]
            if backend == FLOAT:
                cells = [c.to_complex() if isinstance(c, QI) else complex(c)
                         for c in cells]
            conv.append(tuple(cells))
        object.__setattr__(self, "backend", backend)
        object.__setattr__(self, "nx", nx)
        object.__setattr__(self, "ny", ny)
        object.__setattr__(self, "rows", tuple(conv))

    def __setattr__(self, *_):
        raise AttributeError("series are immutable")

    # -- constructors -----------------------------------------------------------

    @classmethod
    def zero(cls, nx: int, ny: int, backend: str = EXACT) -> "TruncSeries2":
        z = _zero_cell(backend)
        return cls([[z] * (ny + 1) for _ in range(nx + 1)], nx, ny, backend)

    @classmethod
    def constant(cls, value: Scalar, nx: int, ny: int, backend: str = EXACT):
        z = _zero_cell(backend)
        rows = [[z] * (ny + 1) for _ in range(nx + 1)]
        rows[0][0] = _as_cell(value, backend)
        return cls(rows, nx, ny, backend)

    @classmethod
    def one(cls, nx: int, ny: int, backend: str = EXACT) -> "TruncSeries2":
        return cls.constant(1, nx, ny, backend)

    @classmethod
    def var_x(cls, nx: int, ny: int, backend: str = EXACT) -> "TruncSeries2":
        z = _zero_cell(backend)
        rows = [[z] * (ny + 1) for _ in range(nx + 1)]
        if nx < 1:
            raise TruncationStarvation("nx < 1 cannot hold x")
        rows[1][0] = _as_cell(1, backend)
        return cls(rows, nx, ny, backend)

    @classmethod
    def var_y(cls, nx: int, ny: int, backend: str = EXACT) -> "TruncSeries2":
        z = _zero_cell(backend)
        rows = [[z] * (ny + 1) for _ in range(nx + 1)]
        if ny < 1:
            raise TruncationStarvation("ny < 1 cannot hold y")
        rows[0][1] = _as_cell(1, backend)
        return cls(rows, nx, ny, backend)

    @classmethod
    def from_rows(cls, rows_map: dict, nx: int, ny: int, backend: str = EXACT):
        """Build from a {x_degree: TruncSeries1-in-y} mapping."""
        z = _zero_cell(backend)
        rows = [[z] * (ny + 1) for _ in range(nx + 1)]
        for j, s in rows_map.items():
            if j > nx:
                raise TruncationStarvation(f"row {j} above nx {nx}")
            if s.pole != 0:
                raise SeriesError("row series must be pole-free")
            if s.trunc < ny:
                raise TruncationStarvation(
                    f"row {j} known only to order {s.trunc} < ny {ny}"
                )
            for k in range(ny + 1):
                rows[j][k] = s.coefficient(k)
        return cls(rows, nx, ny, backend)

    @classmethod
    def embed_y(cls, s: TruncSeries1, nx: int, ny: int | None = None):
        """A univariate series in y viewed on the rectangle."""
        if s.pole != 0:
            raise SeriesError("cannot embed a series with a pole")
        if ny is None:
            ny = s.trunc
        if ny > s.trunc:
            raise TruncationStarvation(f"ny {ny} above series truncation {s.trunc}")
        return cls.from_rows({0: s}, nx, ny, s.backend)

    @classmethod
    def embed_x(cls, s: TruncSeries1, ny: int, nx: int | None = None):
        if s.pole != 0:
            raise SeriesError("cannot embed a series with a pole")
        if nx is None:
            nx = s.trunc
        if nx > s.trunc:
            raise TruncationStarvation(f"nx {nx} above series truncation {s.trunc}")
        z = _zero_cell(s.backend)
        rows = [[z] * (ny + 1) for _ in range(nx + 1)]
        for j in range(nx + 1):
            rows[j][0] = s.coefficient(j)
        return cls(rows, nx, ny, s.backend)

    # -- queries ----------------------------------------------------------------

    @property
    def rect(self):
        return (self.nx, self.ny)

    def coefficient(self, j: int, k: int):
        if j > self.nx or k > self.ny:
            raise TruncationStarvation(
                f"cell ({j}, {k}) is beyond the rectangle {self.rect}"
            )
        if j < 0 or k < 0:
            return _zero_cell(self.backend)
        return self.rows[j][k]

    def row(self, j: int) -> TruncSeries1:
        """The coefficient series of x^j, as a univariate series in y."""
        if j > self.nx:
            raise TruncationStarvation(f"row {j} beyond nx {self.nx}")
        return TruncSeries1(list(self.rows[j]), 0, self.ny, self.backend)

    @property
    def is_zero(self) -> bool:
        return all(_cell_is_zero(c) for row in self.rows for c in row)

    def first_nonzero(self):
        """((j, k), coefficient) minimizing total degree then x-degree."""
        best = None
        for j, row in enumerate(self.rows):
            for k, c in enumerate(row):
                if not _cell_is_zero(c):
                    key = (j + k, j)
                    if best is None or key < best[0]:
                        best = (key, (j, k), c)
        if best is None:
            return None
        return best[1], best[2]

    def x_order(self) -> int | None:
        for j, row in enumerate(self.rows):
            if any(not _cell_is_zero(c) for c in row):
                return j
        return None

    def y_order(self) -> int | None:
        best = None
        for row in self.rows:
            for k, c in enumerate(row):
                if not _cell_is_zero(c):
                    best = k if best is None else min(best, k)
                    break
        return best

    def __eq__(self, other):
        if not isinstance(other, TruncSeries2):
            return NotImplemented
        if self.backend != other.backend:
            return False
        nx = min(self.nx, other.nx)
        ny = min(self.ny, other.ny)
        return all(
            self.rows[j][k] == other.rows[j][k]
            for j in range(nx + 1)
            for k in range(ny + 1)
        )

    __hash__ = None

    def __repr__(self):
        nz = sum(1 for row in self.rows for c in row if not _cell_is_zero(c))
        return f"<series2 rect={self.rect} nonzero_cells={nz}>"

    # -- structural --------------------------------------------------------------

    def restrict(self, nx: int, ny: int) -> "TruncSeries2":
        if nx > self.nx or ny > self.ny:
            raise TruncationStarvation(
                f"cannot extend rectangle {self.rect} to ({nx}, {ny})"
            )
        rows = [list(self.rows[j][: ny + 1]) for j in range(nx + 1)]
        return TruncSeries2(rows, nx, ny, self.backend)

    def shift_x(self, k: int) -> "TruncSeries2":
        """Multiply by x^k (k >= 0); cells pushed past nx are dropped."""
        if k < 0:
            raise SeriesError("negative x-shift is not defined on power series")
        z = _zero_cell(self.backend)
        rows = [[z] * (self.ny + 1) for _ in range(k)]
        rows.extend(list(r) for r in self.rows[: self.nx + 1 - k])
        while len(rows) < self.nx + 1:
            rows.append([z] * (self.ny + 1))
        return TruncSeries2(rows, self.nx, self.ny, self.backend)

    def shift_y(self, k: int) -> "TruncSeries2":
        """Multiply by y^k; k < 0 requires exact divisibility and shrinks ny."""
        z = _zero_cell(self.backend)
        if k >= 0:
            rows = [
                [z] * k + list(r[: self.ny + 1 - k]) for r in self.rows
            ]
            return TruncSeries2(rows, self.nx, self.ny, self.backend)
        k = -k
        ny = self.ny - k
        if ny < 0:
            raise TruncationStarvation("y-shift empties the rectangle")
        for j, r in enumerate(self.rows):
            for l in range(k):
                if not _cell_is_zero(r[l]):
                    raise SeriesError(
                        f"series is not divisible by y^{k} (cell ({j}, {l}) nonzero)"
                    )
        rows = [list(r[k: self.ny + 1]) for r in self.rows]
        return TruncSeries2(rows, self.nx, ny, self.backend)

    def conj(self) -> "TruncSeries2":
        if self.backend == EXACT:
            rows = [[c.conj() for c in r] for r in self.rows]
        else:
            rows = [[c.conjugate() for c in r] for r in self.rows]
        return TruncSeries2(rows, self.nx, self.ny, self.backend)

    def to_float(self) -> "TruncSeries2":
        if self.backend == FLOAT:
            return self
        rows = [[c.to_complex() for c in r] for r in self.rows]
        return TruncSeries2(rows, self.nx, self.ny, FLOAT)

    # -- ring ops -----------------------------------------------------------------

    def _common_rect(self, other):
        return min(self.nx, other.nx), min(self.ny, other.ny)

    def __add__(self, other):
        if not isinstance(other, TruncSeries2):
            return NotImplemented
        _check_backends(self, other)
        nx, ny = self._common_rect(other)
        rows = [
            [self.rows[j][k] + other.rows[j][k] for k in range(ny + 1)]
            for j in range(nx + 1)
        ]
        return TruncSeries2(rows, nx, ny, self.backend)

    def __sub__(self, other):
        if not isinstance(other, TruncSeries2):
            return NotImplemented
        _check_backends(self, other)
        nx, ny = self._common_rect(other)
        rows = [
            [self.rows[j][k] - other.rows[j][k] for k in range(ny + 1)]
            for j in range(nx + 1)
        ]
        return TruncSeries2(rows, nx, ny, self.backend)

    def __neg__(self):
        rows = [[-c for c in r] for r in self.rows]
        return TruncSeries2(rows, self.nx, self.ny, self.backend)

    def scale(self, value: Scalar) -> "TruncSeries2":
        c = _as_cell(value, self.backend)
        rows = [[c * x for x in r] for r in self.rows]
        return TruncSeries2(rows, self.nx, self.ny, self.backend)

    def __mul__(self, other):
        if not isinstance(other, TruncSeries2):
            return self.scale(other)
        _check_backends(self, other)
        nx, ny = self._common_rect(other)
        if self.backend == EXACT:
            rows = _conv2_exact(self.rows, other.rows, nx, ny)
        else:
            rows = _conv2_float(self.rows, other.rows, nx, ny)
        return TruncSeries2(rows, nx, ny, self.backend)

    __rmul__ = __mul__

    def pow_int(self, n: int) -> "TruncSeries2":
        if n < 0:
            raise SeriesError("negative powers of bivariate series are not defined")
        result = TruncSeries2.one(self.nx, self.ny, self.backend)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- calculus ----------------------------------------------------------------

    def derivative_x(self) -> "TruncSeries2":
        if self.nx < 1:
            raise TruncationStarvation("cannot x-differentiate with nx = 0")
        rows = []
        for j in range(1, self.nx + 1):
            rows.append([c * j for c in self.rows[j]])
        return TruncSeries2(rows, self.nx - 1, self.ny, self.backend)

    def derivative_y(self) -> "TruncSeries2":
        if self.ny < 1:
            raise TruncationStarvation("cannot y-differentiate with ny = 0")
        rows = []
        for r in self.rows:
            rows.append([r[k] * k for k in range(1, self.ny + 1)])
        return TruncSeries2(rows, self.nx, self.ny - 1, self.backend)

    # -- transcendental -----------------------------------------------------------

    def exp(self) -> "TruncSeries2":
        if not _cell_is_zero(self.rows[0][0]):
            raise SeriesError("exp requires zero constant term")
        result = TruncSeries2.one(self.nx, self.ny, self.backend)
        term = TruncSeries2.one(self.nx, self.ny, self.backend)
        for k in range(1, self.nx + self.ny + 1):
            term = term * self
            if term.is_zero:
                break
            coeff = Fraction(1, math.factorial(k)) if self.backend == EXACT \
                else 1.0 / math.factorial(k)
            result = result + term.scale(coeff)
        return result

    def log(self) -> "TruncSeries2":
        if self.rows[0][0] != _as_cell(1, self.backend):
            raise SeriesError("log requires constant term exactly 1")
        y = self - TruncSeries2.one(self.nx, self.ny, self.backend)
        result = TruncSeries2.zero(self.nx, self.ny, self.backend)
        term = TruncSeries2.one(self.nx, self.ny, self.backend)
        for k in range(1, self.nx + self.ny + 1):
            term = term * y
            if term.is_zero:
                break
            coeff = Fraction(1 if k % 2 else -1, k) if self.backend == EXACT \
                else (1.0 if k % 2 else -1.0) / k
            result = result + term.scale(coeff)
        return result

    def pow_frac(self, alpha) -> "TruncSeries2":
        a = Fraction(alpha) if not isinstance(alpha, Fraction) else alpha
        return self.log().scale(a).exp()

    # -- substitution ---------------------------------------------------------------

    def eval_first(self, u: TruncSeries1) -> TruncSeries1:
        """Substitute the x-variable by a series u(y); returns a series in y."""
        if u.pole != 0:
            raise SeriesError("substituted series must be pole-free")
        ny = min(self.ny, u.trunc)
        acc = self.row(0).truncate(ny)
        if self.nx == 0:
            return acc
        power = TruncSeries1.one(ny, self.backend)
        ut = u.truncate(ny)
        if ut.order() is not None and ut.order() < 1:
            raise SeriesError("substituted series must have zero constant term")
        for j in range(1, self.nx + 1):
            power = power * ut
            if power.is_zero:
                break
            acc = acc + self.row(j).truncate(ny) * power
        return acc

    def substitute_y(self, g: "TruncSeries2") -> "TruncSeries2":
        """Substitute the y-variable by a bivariate series g(x, y) with zero
        constant term.

        When g has y-order 0 (an x-term without y), terms beyond the outer
        truncation can reach low y-orders, so the guaranteed region is capped
        by total degree; with y-order >= 1 the full common rectangle carries
        over.
        """
        _check_backends(self, g)
        if not _cell_is_zero(g.rows[0][0]):
            raise SeriesError("substituted series must have zero constant term")
        fn = g.first_nonzero()
        v_tot = (fn[0][0] + fn[0][1]) if fn else (g.nx + g.ny + 1)
        vy = g.y_order()
        nx = min(self.nx, g.nx)
        ny = min(self.ny, g.ny)
        if vy == 0:
            tot_cap = self.ny * max(v_tot, 1)
            if nx + ny > tot_cap:
                ny = tot_cap - nx
                if ny < 0:
                    raise TruncationStarvation(
                        "outer truncation cannot cover the rectangle for a "
                        "y-order-0 substitution"
                    )
        gt = g.restrict(nx, ny)
        acc = TruncSeries2.zero(nx, ny, self.backend)
        power = TruncSeries2.one(nx, ny, self.backend)
        # row-wise Horner would recompute powers per row; sharing them is cheaper
        powers = [power]
        for _ in range(1, min(self.ny, nx + ny) + 1):
            power = power * gt
            if power.is_zero:
                break
            powers.append(power)
        for j in range(nx + 1):
            row = self.rows[j]
            combo = TruncSeries2.zero(nx, ny, self.backend)
            nonzero = False
            for l, c in enumerate(row[: self.ny + 1]):
                if _cell_is_zero(c) or l >= len(powers):
                    continue
                combo = combo + powers[l].scale(c)
                nonzero = True
            if nonzero:
                acc = acc + combo.shift_x(j)
        return acc

    # -- serialization -----------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "trunc": [self.nx, self.ny],
            "coeffs": [
                [coeff_to_json(c, self.backend) for c in row] for row in self.rows
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TruncSeries2":
        nx, ny = obj["trunc"]
        rows = []
        backend = None
        for raw_row in obj["coeffs"]:
            row = []
            for raw in raw_row:
                c, b = coeff_from_json(raw)
                if backend is None:
                    backend = b
                elif backend != b:
                    raise BackendMismatch("mixed exact and float coefficients in JSON")
                row.append(c)
            rows.append(row)
        return cls(rows, nx, ny, backend or EXACT)


# ---------------------------------------------------------------------------
# division, composition, inversion
# ---------------------------------------------------------------------------


def divide(a: TruncSeries1, b: TruncSeries1) -> TruncSeries1:
    """Laurent quotient a/b; b must have a nonzero stored coefficient."""
    _check_backends(a, b)
    v = b.order()
    if v is None:
        raise ZeroDivisionError("division by a series that is zero up to truncation")
    unit = b.shift(-v)
    n = unit.trunc
    c0 = unit.coefficient(0)
    inv0 = (QI(1) / c0) if a.backend == EXACT else (1.0 / c0)
    y = TruncSeries1.constant(inv0, n, a.backend)
    two = TruncSeries1.constant(2, n, a.backend)
    correct = 0
    while correct < n:
        y = y * (two - unit * y)
        correct = 2 * correct + 1
    return (a * y).shift(-v)


def compose(outer: TruncSeries1, inner):
    """Composition outer(inner); inner must have zero constant term.

    If the outer series has a pole part, the inner series must have order
    exactly 1 (otherwise negative powers do not exist as Laurent series).
    """
    if isinstance(inner, TruncSeries2):
        return _compose_1_2(outer, inner)
    return _compose_1_1(outer, inner)


def _compose_1_1(outer: TruncSeries1, inner: TruncSeries1) -> TruncSeries1:
    _check_backends(outer, inner)
    if inner.pole != 0:
        raise SeriesError("inner series of a composition cannot have a pole")
    if not _cell_is_zero(inner.coefficient(0)):
        raise SeriesError("inner series must have zero constant term")
    v = inner.order()
    if v is None:
        v = inner.trunc + 1
    if outer.pole > 0 and v != 1:
        raise SeriesError(
            "outer pole part needs an invertible inner series (order exactly 1)"
        )
    cap = (outer.trunc + 1) * v - 1
    n = inner.trunc
    acc = TruncSeries1.constant(outer.coefficient(0), n, outer.backend)
    power = TruncSeries1.one(n, outer.backend)
    for k in range(1, outer.trunc + 1):
        power = power * inner
        if power.is_zero:
            break
        c = outer.coefficient(k)
        if not _cell_is_zero(c):
            acc = acc + power.scale(c)
    if outer.pole > 0:
        inv = divide(TruncSeries1.one(n, outer.backend), inner)
        neg = TruncSeries1.zero(n, outer.backend)
        ipow = TruncSeries1.one(n, outer.backend)
        for k in range(1, outer.pole + 1):
            ipow = ipow * inv
            c = outer.coefficient(-k)
            if not _cell_is_zero(c):
                neg = neg + ipow.scale(c)
        acc = acc + neg
    return acc if acc.trunc <= cap else acc.truncate(min(acc.trunc, cap))


def _compose_1_2(outer: TruncSeries1, inner: TruncSeries2) -> TruncSeries2:
    _check_backends(outer, inner)
    if outer.pole > 0:
        raise SeriesError("pole-part composition with a bivariate inner series")
    if not _cell_is_zero(inner.rows[0][0]):
        raise SeriesError("inner series must have zero constant term")
    fn = inner.first_nonzero()
    v_tot = (fn[0][0] + fn[0][1]) if fn else (inner.nx + inner.ny + 1)
    cap = (outer.trunc + 1) * v_tot - 1
    nx, ny = inner.nx, inner.ny
    if nx + ny > cap:
        ny = cap - nx
        if ny < 0:
            raise TruncationStarvation(
                f"outer truncation {outer.trunc} cannot cover the rectangle "
                f"({inner.nx}, {inner.ny})"
            )
    it = inner.restrict(nx, ny)
    acc = TruncSeries2.constant(outer.coefficient(0), nx, ny, outer.backend)
    power = TruncSeries2.one(nx, ny, outer.backend)
    for k in range(1, min(outer.trunc, nx + ny) + 1):
        power = power * it
        if power.is_zero:
            break
        c = outer.coefficient(k)
        if not _cell_is_zero(c):
            acc = acc + power.scale(c)
    return acc


def compose2(outer: TruncSeries2, first: TruncSeries2, second) -> TruncSeries2:
    """Full bivariate substitution outer(first(x, y), second).

    ``first`` must have x-order >= 1; ``second`` (univariate in y, or
    bivariate) must have y-order >= 1 and zero constant term.
    """
    _check_backends(outer, first)
    vx = first.x_order()
    if vx is None:
        vx = first.nx + 1
    if vx < 1:
        raise SeriesError("first substituted series must have x-order >= 1")
    if isinstance(second, TruncSeries1):
        if second.pole != 0 or not _cell_is_zero(second.coefficient(0)):
            raise SeriesError("second substituted series must vanish at the origin")
        vy = second.order() or (second.trunc + 1)
        ny_second = second.trunc
    else:
        _check_backends(outer, second)
        if not _cell_is_zero(second.rows[0][0]):
            raise SeriesError("second substituted series must vanish at the origin")
        vy = second.y_order() or (second.ny + 1)
        ny_second = second.ny
    if vy < 1:
        raise SeriesError("second substituted series must have y-order >= 1")
    nx = min(first.nx, (outer.nx + 1) * vx - 1)
    ny = min(first.ny, ny_second, (outer.ny + 1) * vy - 1)
    ft = first.restrict(nx, ny)

    if isinstance(second, TruncSeries1):
        st = second.truncate(ny)
        spowers = [TruncSeries1.one(ny, outer.backend)]
        p = spowers[0]
        for _ in range(1, ny + 1):
            p = p * st
            if p.is_zero:
                break
            spowers.append(p)

        def row_composed(j):
            acc = TruncSeries1.zero(ny, outer.backend)
            for l in range(min(outer.ny, len(spowers) - 1) + 1):
                c = outer.rows[j][l]
                if not _cell_is_zero(c):
                    acc = acc + spowers[l].scale(c)
            return TruncSeries2.embed_y(acc, nx, ny)
    else:
        st2 = second.restrict(nx, ny)
        spowers2 = [TruncSeries2.one(nx, ny, outer.backend)]
        p2 = spowers2[0]
        for _ in range(1, ny + 1):
            p2 = p2 * st2
            if p2.is_zero:
                break
            spowers2.append(p2)

        def row_composed(j):
            acc = TruncSeries2.zero(nx, ny, outer.backend)
            for l in range(min(outer.ny, len(spowers2) - 1) + 1):
                c = outer.rows[j][l]
                if not _cell_is_zero(c):
                    acc = acc + spowers2[l].scale(c)
            return acc

    fpowers = [TruncSeries2.one(nx, ny, outer.backend)]
    p = fpowers[0]
    for _ in range(1, min(outer.nx, nx) + 1):
        p = p * ft
        if p.is_zero:
            break
        fpowers.append(p)

    acc = TruncSeries2.zero(nx, ny, outer.backend)
    for j in range(min(outer.nx, len(fpowers) - 1) + 1):
        rc = row_composed(j)
        if not rc.is_zero:
            acc = acc + rc * fpowers[j]
    return acc


def solve_implicit(phi: TruncSeries2) -> TruncSeries1:
    """Unique u(y) with u(0) = 0 and phi(u(y), y) = 0 up to truncation.

    The x-slot of ``phi`` is the unknown; requires phi(0, 0) = 0 and a
    nonzero linear coefficient d(phi)/dx at the origin.
    """
    if not _cell_is_zero(phi.rows[0][0]):
        raise SeriesError("implicit solve requires phi(0, 0) = 0")
    if phi.nx < 1:
        raise SeriesError("phi carries no x-slot to solve for")
    lin = phi.rows[1][0]
    if _cell_is_zero(lin):
        raise SeriesError("degenerate linear part in implicit solve")
    inv_lin = (QI(1) / lin) if phi.backend == EXACT else (1.0 / lin)
    ny = phi.ny
    u = TruncSeries1.zero(ny, phi.backend)
    for _ in range(ny + 1):
        r = phi.eval_first(u)
        if r.is_zero:
            break
        u = u - r.scale(inv_lin)
    return u


def compositional_inverse(g: TruncSeries1) -> TruncSeries1:
    """The series h with g(h(w)) = w up to truncation; needs g(0)=0, g'(0)!=0."""
    if g.pole != 0 or not _cell_is_zero(g.coefficient(0)):
        raise SeriesError("compositional inverse requires g(0) = 0")
    c1 = g.coefficient(1)
    if _cell_is_zero(c1):
        raise SeriesError("compositional inverse requires g'(0) != 0")
    n = g.trunc
    w = TruncSeries1.var(n, g.backend)
    inv1 = (QI(1) / c1) if g.backend == EXACT else (1.0 / c1)
    h = w.scale(inv1)
    for _ in range(n):
        r = compose(g, h) - w
        if r.is_zero:
            break
        h = h - r.scale(inv1)
    return h
