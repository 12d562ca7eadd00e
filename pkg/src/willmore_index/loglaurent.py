"""Exact arithmetic on truncated bivariate log-Laurent expansions.

A series is a finite sum of terms ``c * z^k * zbar^l * log^p|z|`` with
``p <= 2``, plus a tracked remainder ``O(|z|^(N+1) log^q|z|)``.  These
expansions carry every local quantity attached to a minimal-surface end
(conformal factor, Gauss curvature, squared immersion norm, boundary
integrands), and the circle contour integral of a term is closed-form,
which is what makes all residue and counterterm extraction exact.

Coefficients are either Python ``complex`` (float mode) or :class:`QC`
(exact Gaussian rationals).  Contour results are always reported in units
of pi so exact mode stays in ``Fraction`` arithmetic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational


class LogPowerError(ValueError):
    """A term would carry log power above the supported cap p <= 2."""


class TermBudgetError(RuntimeError):
    """A series operation overflowed the configured term-count cap."""


class LeadingTermError(ValueError):
    """Inversion/log requested on a series without a clean leading monomial."""


#: log powers above this are a modeling error, not a truncation.
MAX_LOG_POWER = 2

#: hard cap on stored terms; overflow raises TermBudgetError.
MAX_TERMS = 200_000


class QC:
    """Gaussian rational: complex number with Fraction real/imag parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, other):
        other = _as_qc(other)
        if other is NotImplemented:
            return NotImplemented
        return QC(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_qc(other)
        if other is NotImplemented:
            return NotImplemented
        return QC(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _as_qc(other)
        if other is NotImplemented:
            return NotImplemented
        return QC(other.re - self.re, other.im - self.im)

    def __mul__(self, other):
        other = _as_qc(other)
        if other is NotImplemented:
            return NotImplemented
        return QC(self.re * other.re - self.im * other.im,
                  self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_qc(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _as_qc(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __neg__(self):
        return QC(-self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, QC):
            return self.re == other.re and self.im == other.im
        if isinstance(other, Rational):
            return self.re == other and self.im == 0
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QC({self.re}, {self.im})"

    def conjugate(self):
        return QC(self.re, -self.im)

    def inverse(self):
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of QC(0)")
        return QC(self.re / n, -self.im / n)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0


def _as_qc(x):
    if isinstance(x, QC):
        return x
    if isinstance(x, Rational):
        return QC(x)
    return NotImplemented


def _coeff(x, exact: bool):
    """Lift a scalar into the coefficient ring of the series."""
    if exact:
        if isinstance(x, QC):
            return x
        if isinstance(x, Rational):
            return QC(x)
        raise TypeError(f"exact series needs rational coefficients, got {x!r}")
    if isinstance(x, QC):
        return complex(x)
    return complex(x)


def _is_zero(c) -> bool:
    if isinstance(c, QC):
        return c.is_zero()
    return c == 0


def _conj(c):
    if isinstance(c, QC):
        return c.conjugate()
    return c.conjugate()


def _re_of(c):
    if isinstance(c, QC):
        return c.re
    return c.real


def _min_order(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


@dataclass
class LogLaurentSeries:
    """Finite sum of ``c z^k zbar^l log^p|z|`` with truncation bookkeeping.

    ``order`` is the truncation order N: every term with total degree
    ``k + l <= N`` is exact and terms beyond are absorbed into a remainder
    ``O(|z|^(N+1) log^rem|z|)``.  ``order=None`` means the series is exact
    (no remainder).  ``dropped`` counts terms silently truncated away so
    callers can audit precision loss.
    """

    terms: dict = field(default_factory=dict)
    order: int | None = None
    remainder_log_degree: int = 0
    exact: bool = False
    dropped: int = 0

    def __post_init__(self):
        clean = {}
        dropped = self.dropped
        for (k, l, p), c in self.terms.items():
            if p < 0:
                raise ValueError("negative log power")
            if p > MAX_LOG_POWER:
                raise LogPowerError(f"log power {p} exceeds cap {MAX_LOG_POWER}")
            c = _coeff(c, self.exact)
            if _is_zero(c):
                continue
            if self.order is not None and k + l > self.order:
                dropped += 1
                continue
            clean[(k, l, p)] = c
        if len(clean) > MAX_TERMS:
            raise TermBudgetError(f"{len(clean)} terms exceeds cap {MAX_TERMS}")
        self.terms = clean
        self.dropped = dropped

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, order=None, exact=False):
        return cls({}, order=order, exact=exact)

    @classmethod
    def one(cls, order=None, exact=False):
        return cls({(0, 0, 0): 1}, order=order, exact=exact)

    @classmethod
    def monomial(cls, c, k, l, p=0, order=None, exact=False):
        return cls({(k, l, p): c}, order=order, exact=exact)

    @classmethod
    def log_abs(cls, order=None, exact=False):
        """log|z| as a series."""
        return cls({(0, 0, 1): 1}, order=order, exact=exact)

    @classmethod
    def from_taylor(cls, coeffs, order=None, exact=False, offset=0):
        """Series sum_j coeffs[j] z^(offset+j) from an ascending list."""
        terms = {(offset + j, 0, 0): c for j, c in enumerate(coeffs)}
        if order is None:
            order = offset + len(coeffs) - 1
        return cls(terms, order=order, exact=exact)

    # -- structure ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def min_degree(self) -> int | None:
        """Lowest total degree k+l present, or None for the zero series."""
        if not self.terms:
            return None
        return min(k + l for (k, l, _p) in self.terms)

    def max_log_power(self) -> int:
        return max((p for (_k, _l, p) in self.terms), default=0)

    def coeff(self, k, l, p=0):
        c = self.terms.get((k, l, p))
        if c is None:
            return QC(0) if self.exact else 0j
        return c

    def _like(self, terms, order, rem_log=None, dropped=0):
        return LogLaurentSeries(
            terms,
            order=order,
            remainder_log_degree=self.remainder_log_degree if rem_log is None else rem_log,
            exact=self.exact,
            dropped=dropped,
        )

    def copy(self):
        return self._like(dict(self.terms), self.order)

    def truncate(self, order):
        """Explicitly reduce the truncation order (terms beyond are dropped)."""
        new_order = _min_order(self.order, order)
        return LogLaurentSeries(dict(self.terms), order=new_order,
                                remainder_log_degree=self.remainder_log_degree,
                                exact=self.exact, dropped=self.dropped)

    # -- ring operations ----------------------------------------------

    def __add__(self, other):
        if not isinstance(other, LogLaurentSeries):
            other = LogLaurentSeries.monomial(other, 0, 0, exact=self.exact)
        self._check_mode(other)
        order = _min_order(self.order, other.order)
        terms = dict(self.terms)
        for key, c in other.terms.items():
            acc = terms.get(key)
            terms[key] = c if acc is None else acc + c
        rem = max(self.remainder_log_degree, other.remainder_log_degree)
        return self._like(terms, order, rem, self.dropped + other.dropped)

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -c for k, c in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s):
        s = _coeff(s, self.exact)
        return self._like({k: c * s for k, c in self.terms.items()}, self.order)

    def __mul__(self, other):
        if not isinstance(other, LogLaurentSeries):
            return self.scale(other)
        self._check_mode(other)
        # remainder order: min over cross terms of (min degree of one
        # factor + remainder order of the other); pessimistic by design.
        order = None
        if other.order is not None:
            d = self.min_degree()
            order = _min_order(order, (0 if d is None else d) + other.order)
        if self.order is not None:
            d = other.min_degree()
            order = _min_order(order, (0 if d is None else d) + self.order)
        terms: dict = {}
        dropped = self.dropped + other.dropped
        for (k1, l1, p1), c1 in self.terms.items():
            for (k2, l2, p2), c2 in other.terms.items():
                k, l = k1 + k2, l1 + l2
                # order truncation first: beyond-order terms are outside the
                # tracked expansion, so the log cap only guards stored terms
                if order is not None and k + l > order:
                    dropped += 1
                    continue
                p = p1 + p2
                if p > MAX_LOG_POWER:
                    raise LogPowerError(
                        f"product would carry log^{p}; cap is {MAX_LOG_POWER}")
                key = (k, l, p)
                acc = terms.get(key)
                v = c1 * c2
                terms[key] = v if acc is None else acc + v
        if len(terms) > MAX_TERMS:
            raise TermBudgetError(f"{len(terms)} terms exceeds cap {MAX_TERMS}")
        rem = max(self.remainder_log_degree + other.max_log_power(),
                  other.remainder_log_degree + self.max_log_power())
        return self._like(terms, order, rem, dropped)

    __rmul__ = __mul__

    def conj(self):
        """Complex conjugate: swaps z and zbar exponents."""
        return self._like({(l, k, p): _conj(c) for (k, l, p), c in self.terms.items()},
                          self.order)

    def real_part(self):
        half = Fraction(1, 2) if self.exact else 0.5
        return (self + self.conj()).scale(half)

    def is_real_series(self, tol=0.0) -> bool:
        """Reality invariant: c_{k,l,p} == conj(c_{l,k,p})."""
        for (k, l, p), c in self.terms.items():
            d = c - _conj(self.coeff(l, k, p))
            if self.exact:
                if not _is_zero(d):
                    return False
            elif abs(d) > tol:
                return False
        return True

    # -- calculus -----------------------------------------------------

    def dz(self):
        """d/dz; uses d/dz log|z| = 1/(2z).  Truncation order drops by 1."""
        half = Fraction(1, 2) if self.exact else 0.5
        terms: dict = {}
        for (k, l, p), c in self.terms.items():
            if k != 0:
                key = (k - 1, l, p)
                v = c * k
                acc = terms.get(key)
                terms[key] = v if acc is None else acc + v
            if p > 0:
                key = (k - 1, l, p - 1)
                v = c * p * half
                acc = terms.get(key)
                terms[key] = v if acc is None else acc + v
        order = None if self.order is None else self.order - 1
        return self._like(terms, order)

    def dzbar(self):
        return self.conj().dz().conj()

    def laplacian(self):
        """Flat Laplacian 4 d/dz d/dzbar."""
        return self.dz().dzbar().scale(4)

    # -- leading-term factorizations -----------------------------------

    def _leading_monomial(self):
        """The unique minimal-degree term; requires p=0 there."""
        d = self.min_degree()
        if d is None:
            raise LeadingTermError("zero series has no leading term")
        lead = [(k, l, p) for (k, l, p) in self.terms if k + l == d]
        if len(lead) != 1:
            raise LeadingTermError(f"leading degree {d} is not a single monomial")
        k, l, p = lead[0]
        if p != 0:
            raise LeadingTermError("leading term carries a log factor")
        return k, l, self.terms[(k, l, p)]

    def invert(self, order=None):
        """1/self for self = c z^k zbar^l (1 + s), s of positive degree."""
        k, l, c = self._leading_monomial()
        rel = None if self.order is None else self.order - (k + l)
        if rel is None:
            if order is None:
                if len(self.terms) == 1:
                    inv_c = c.inverse() if self.exact else 1.0 / c
                    return self._like({(-k, -l, 0): inv_c}, None)
                raise LeadingTermError("exact non-monomial series needs an explicit order")
            rel = order + (k + l)  # requested absolute order of the result
            rel = rel + 2 * (k + l)
        inv_c = c.inverse() if self.exact else 1.0 / c
        mono_inv = LogLaurentSeries.monomial(inv_c, -k, -l, exact=self.exact)
        u = (self * mono_inv).truncate(rel)  # 1 + s
        s = u - LogLaurentSeries.one(exact=self.exact)
        # geometric series sum (-s)^j, j = 0..rel
        acc = LogLaurentSeries.one(order=rel, exact=self.exact)
        power = LogLaurentSeries.one(order=rel, exact=self.exact)
        neg_s = (-s).truncate(rel)
        sd = s.min_degree()
        nmax = rel if sd is None else max(0, rel // max(sd, 1))
        for _ in range(nmax):
            power = (power * neg_s).truncate(rel)
            if power.is_zero():
                break
            acc = acc + power
        out = acc * mono_inv
        if self.order is None and order is not None:
            out = out.truncate(order)
        return out

    def log(self, order=None):
        """log(self) for real positive leading monomial c|z|^(2k).

        Returns log(c) + 2k log|z| + log(1+s) as a series; only meaningful
        for real series (conformal factors), where the leading monomial is
        radial.
        """
        k, l, c = self._leading_monomial()
        if k != l:
            raise LeadingTermError("log needs a radial leading monomial |z|^(2k)")
        if not _is_zero(c - _conj(c)) or _re_of(c) <= 0:
            raise LeadingTermError("log needs a positive real leading coefficient")
        rel = None if self.order is None else self.order - 2 * k
        if rel is None:
            rel = order if order is not None else 0
            rel = rel + 2 * k if order is not None else rel
        inv_c = c.inverse() if self.exact else 1.0 / c
        mono_inv = LogLaurentSeries.monomial(inv_c, -k, -k, exact=self.exact)
        s = (self * mono_inv).truncate(rel) - LogLaurentSeries.one(exact=self.exact)
        # log(1+s) = s - s^2/2 + s^3/3 - ...
        acc = LogLaurentSeries.zero(order=rel, exact=self.exact)
        power = LogLaurentSeries.one(order=rel, exact=self.exact)
        sd = s.min_degree()
        nmax = 0 if sd is None else max(0, rel // max(sd, 1))
        for j in range(1, nmax + 1):
            power = (power * s).truncate(rel)
            if power.is_zero():
                break
            inv_j = Fraction((-1) ** (j + 1), j) if self.exact else ((-1) ** (j + 1)) / j
            acc = acc + power.scale(inv_j)
        if self.exact:
            if c != QC(1):
                raise LeadingTermError("exact log needs unit leading coefficient")
            const = LogLaurentSeries.zero(exact=True)
        else:
            const = LogLaurentSeries.monomial(cmath.log(complex(c)), 0, 0)
        log_abs = LogLaurentSeries.monomial(2 * k, 0, 0, 1, exact=self.exact)
        return const + log_abs + acc

    # -- evaluation and contour ----------------------------------------

    def __call__(self, z: complex) -> complex:
        zb = z.conjugate()
        lg = math.log(abs(z))
        total = 0j
        for (k, l, p), c in sorted(self.terms.items()):
            total += complex(c) * z ** k * zb ** l * lg ** p
        return total

    def _check_mode(self, other):
        if self.exact != other.exact:
            raise TypeError("cannot mix exact and float series")

    def circle_integral_im(self):
        """Im of the contour integral of self(z) dz over |z| = eps, exactly.

        A term (k, l, p) is resonant iff k - l = -1 and then contributes
        2 pi Re(c) eps^(2l) log^p(eps).  The result is returned in units of
        pi as a dict {(m, p): a} meaning

            Im oint = pi * sum a_{m,p} eps^(-m) log^p(1/eps),

        together with the largest eps power the truncation order justifies
        (``None`` when the series is exact).
        """
        coeffs: dict = {}
        for (k, l, p), c in self.terms.items():
            if k - l != -1:
                continue
            a = 2 * _re_of(c) * ((-1) ** p)
            key = (-2 * l, p)
            acc = coeffs.get(key)
            coeffs[key] = a if acc is None else acc + a
        coeffs = {k: v for k, v in coeffs.items() if not _is_zero_scalar(v)}
        trusted = None if self.order is None else self.order + 1
        return ContourResult(coeffs=coeffs, exact=self.exact,
                             trusted_through_eps_power=trusted)


def _is_zero_scalar(v) -> bool:
    if isinstance(v, Fraction):
        return v == 0
    return v == 0


@dataclass
class ContourResult:
    """Im oint S dz = pi * sum coeffs[(m,p)] eps^(-m) log^p(1/eps)."""

    coeffs: dict
    exact: bool
    trusted_through_eps_power: int | None

    def coeff(self, m, p=0):
        """Coefficient of eps^{-m} log^p(1/eps), in units of pi."""
        if self.trusted_through_eps_power is not None and -m > self.trusted_through_eps_power:
            raise TermBudgetError(
                f"eps^{-m} is beyond the trusted order of the input series")
        zero = Fraction(0) if self.exact else 0.0
        return self.coeffs.get((m, p), zero)

    def value(self, eps: float) -> float:
        L = math.log(1.0 / eps)
        return math.pi * math.fsum(
            float(a) * eps ** (-m) * L ** p for (m, p), a in sorted(self.coeffs.items()))

    def divergent(self) -> dict:
        """Only the terms that do not vanish as eps -> 0 (m>0, or logs)."""
        return {(m, p): a for (m, p), a in self.coeffs.items()
                if m > 0 or (m == 0 and p > 0)}


def contour_dz_im(series: LogLaurentSeries) -> ContourResult:
    """Im oint S dz for the 1-form S dz (alias of the method, as a function)."""
    return series.circle_integral_im()


def contour_form_im(s_dz: LogLaurentSeries, s_dzbar: LogLaurentSeries) -> ContourResult:
    """Im oint (S dz + T dzbar) over |z| = eps.

    oint z^k zbar^l dzbar = conj(oint zbar^k z^l dz), so the dzbar part is
    the conjugated-series contour with a sign.
    """
    a = s_dz.circle_integral_im()
    b = s_dzbar.conj().circle_integral_im()
    coeffs = dict(a.coeffs)
    for key, v in b.coeffs.items():
        acc = coeffs.get(key)
        coeffs[key] = -v if acc is None else acc - v
    coeffs = {k: v for k, v in coeffs.items() if not _is_zero_scalar(v)}
    trusted = a.trusted_through_eps_power
    if b.trusted_through_eps_power is not None:
        trusted = (b.trusted_through_eps_power if trusted is None
                   else min(trusted, b.trusted_through_eps_power))
    return ContourResult(coeffs=coeffs, exact=s_dz.exact,
                         trusted_through_eps_power=trusted)


def mul_trunc(a: LogLaurentSeries, b: LogLaurentSeries, order: int) -> LogLaurentSeries:
    """Product truncated to ``order``, pre-truncating each factor safely.

    A factor term of degree d can only reach product degree <= order when
    d <= order - min_degree(other factor), so dropping beyond that loses
    nothing below the requested order.
    """
    da = a.min_degree()
    db = b.min_degree()
    if da is None or db is None:
        return LogLaurentSeries.zero(order=order, exact=a.exact)
    return (a.truncate(order - db) * b.truncate(order - da)).truncate(order)


def series_mul(a: LogLaurentSeries, b: LogLaurentSeries) -> LogLaurentSeries:
    return a * b


def series_dz(a: LogLaurentSeries) -> LogLaurentSeries:
    return a.dz()


def series_dzbar(a: LogLaurentSeries) -> LogLaurentSeries:
    return a.dzbar()


def series_invert(a: LogLaurentSeries, order=None) -> LogLaurentSeries:
    return a.invert(order=order)


def series_contour(a: LogLaurentSeries) -> ContourResult:
    return a.circle_integral_im()
