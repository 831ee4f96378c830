"""Truncated multivariate Laurent series with exact rational coefficients.

A :class:`SeriesRing` fixes an ordered tuple of variable names, a per-variable
truncation order (largest exponent kept) and a per-variable pole depth
(largest negative exponent allowed).  Elements are sparse maps from exponent
vectors to ``Fraction``.  There is no floating point anywhere: every operation
either produces the exact truncated result or raises.

Equivariant weights are handled by making ``t`` an ordinary ring variable
(coefficients are then polynomials, or Laurent polynomials, in ``t``).  The
global fractional prefactors t^{p/q} (-t)^{p'/q'} u^m that occur in the
finite-r operator formula never enter coefficient arithmetic; they are carried
by the separate :class:`FracMonomial` and must cancel to integer exponents
before a value is read off.

Special series provided here: varsigma(z) = 2*sinh(z/2), its normalised form
S(z) = varsigma(z)/z, powers S(cz)^e with series exponent e, exp/log, and the
two-sided Pochhammer symbol (1+x)_n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .errors import ConfigurationError, DomainError

Q0 = Fraction(0)
Q1 = Fraction(1)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise ConfigurationError(f"not an exact rational: {c!r}")


def rat_str(c: Fraction) -> str:
    """Canonical "p/q" rendering ("p" when q == 1)."""
    c = _as_fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def parse_rat(s: str) -> Fraction:
    return Fraction(s)


class SeriesRing:
    """Ambient ring: variable names, truncation orders, pole depths."""

    __slots__ = ("vars", "trunc", "pole", "_idx", "_zero_exp")

    def __init__(self, vars=(), trunc=(), pole=None):
        self.vars = tuple(vars)
        if isinstance(trunc, int):
            trunc = (trunc,) * len(self.vars)
        self.trunc = tuple(int(t) for t in trunc)
        if pole is None:
            pole = (0,) * len(self.vars)
        elif isinstance(pole, int):
            pole = (pole,) * len(self.vars)
        self.pole = tuple(int(p) for p in pole)
        if len(self.trunc) != len(self.vars) or len(self.pole) != len(self.vars):
            raise ConfigurationError("trunc/pole length must match vars")
        if any(t < 0 for t in self.trunc) or any(p < 0 for p in self.pole):
            raise ConfigurationError("truncation and pole depth must be >= 0")
        self._idx = {v: i for i, v in enumerate(self.vars)}
        self._zero_exp = (0,) * len(self.vars)

    def __eq__(self, other):
        return (
            isinstance(other, SeriesRing)
            and self.vars == other.vars
            and self.trunc == other.trunc
            and self.pole == other.pole
        )

    def __hash__(self):
        return hash((self.vars, self.trunc, self.pole))

    def __repr__(self):
        decl = ", ".join(
            f"{v}<=#{t}(pole {p})" for v, t, p in zip(self.vars, self.trunc, self.pole)
        )
        return f"SeriesRing({decl})"

    def index(self, var: str) -> int:
        try:
            return self._idx[var]
        except KeyError:
            raise ConfigurationError(f"undeclared series variable {var!r}") from None

    def _admissible(self, exps) -> bool:
        """True when the exponent vector survives truncation (may still raise on poles)."""
        for e, t, p in zip(exps, self.trunc, self.pole):
            if e > t:
                return False
            if e < -p:
                raise DomainError(
                    f"pole bound exceeded: exponent {exps} below declared depth in {self!r}"
                )
        return True

    # -- constructors -----------------------------------------------------

    def zero(self) -> "SeriesElement":
        return SeriesElement(self, {})

    def one(self) -> "SeriesElement":
        return self.const(Q1)

    def const(self, c) -> "SeriesElement":
        c = _as_fraction(c)
        if c == 0:
            return self.zero()
        return SeriesElement(self, {self._zero_exp: c})

    def monomial(self, exps: dict, c=Q1) -> "SeriesElement":
        """c * prod(var**e) for a {var: e} mapping."""
        vec = [0] * len(self.vars)
        for v, e in exps.items():
            vec[self.index(v)] = int(e)
        c = _as_fraction(c)
        vec = tuple(vec)
        if c == 0 or not self._admissible(vec):
            return self.zero()
        return SeriesElement(self, {vec: c})

    def var(self, name: str, power: int = 1, c=Q1) -> "SeriesElement":
        return self.monomial({name: power}, c)

    def series(self, terms: dict) -> "SeriesElement":
        """Build from {exponent tuple: coefficient}; drops zeros, applies truncation."""
        out = {}
        for exps, c in terms.items():
            c = _as_fraction(c)
            if c == 0:
                continue
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(self.vars):
                raise ConfigurationError("exponent vector length mismatch")
            if self._admissible(exps):
                out[exps] = out.get(exps, Q0) + c
        return SeriesElement(self, {e: c for e, c in out.items() if c != 0})

    def drop_vars(self, names) -> "SeriesRing":
        keep = [i for i, v in enumerate(self.vars) if v not in set(names)]
        return SeriesRing(
            tuple(self.vars[i] for i in keep),
            tuple(self.trunc[i] for i in keep),
            tuple(self.pole[i] for i in keep),
        )


class SeriesElement:
    """Immutable sparse truncated Laurent series over Fraction."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: SeriesRing, terms: dict):
        self.ring = ring
        self.terms = terms

    # -- inspection --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, exps=None, **by_name) -> Fraction:
        """Coefficient of an exponent vector (tuple, {var: e} dict, or kwargs)."""
        if exps is None:
            exps = by_name
        if isinstance(exps, dict):
            vec = [0] * len(self.ring.vars)
            for v, e in exps.items():
                vec[self.ring.index(v)] = int(e)
            exps = tuple(vec)
        return self.terms.get(tuple(exps), Q0)

    def constant_term(self) -> Fraction:
        return self.terms.get(self.ring._zero_exp, Q0)

    def to_fraction(self) -> Fraction:
        """The value of a constant series; error when non-constant terms remain."""
        for e in self.terms:
            if any(e):
                raise DomainError(f"series is not constant: {self}")
        return self.constant_term()

    def coefficient(self, var: str, k: int) -> "SeriesElement":
        """Coefficient of var**k, as an element of the same ring (var-exponent 0)."""
        i = self.ring.index(var)
        out = {}
        for exps, c in self.terms.items():
            if exps[i] == k:
                out[exps[:i] + (0,) + exps[i + 1:]] = c
        return SeriesElement(self.ring, out)

    def max_degree(self, var: str) -> int:
        """Largest var-exponent with nonzero coefficient (ring pole floor if zero)."""
        i = self.ring.index(var)
        if not self.terms:
            return -self.ring.pole[i]
        return max(e[i] for e in self.terms)

    def __eq__(self, other):
        if not isinstance(other, SeriesElement):
            if other == 0:
                return self.is_zero()
            return self.terms == {self.ring._zero_exp: _as_fraction(other)}
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for exps, c in sorted(self.terms.items()):
            mono = "*".join(
                f"{v}^{e}" for v, e in zip(self.ring.vars, exps) if e != 0
            )
            bits.append(f"{rat_str(c)}" + (f"*{mono}" if mono else ""))
        return " + ".join(bits)

    # -- arithmetic ---------------------------------------------------------

    def _check_ring(self, other: "SeriesElement"):
        if self.ring != other.ring:
            raise ConfigurationError("series from different rings")

    def __add__(self, other):
        if not isinstance(other, SeriesElement):
            other = self.ring.const(other)
        self._check_ring(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, Q0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return SeriesElement(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return SeriesElement(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, SeriesElement):
            other = self.ring.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return self.ring.const(other) - self

    def scale(self, c) -> "SeriesElement":
        c = _as_fraction(c)
        if c == 0:
            return self.ring.zero()
        return SeriesElement(self.ring, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, SeriesElement):
            return self.scale(other)
        self._check_ring(other)
        if not self.terms or not other.terms:
            return self.ring.zero()
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        trunc, pole = self.ring.trunc, self.ring.pole
        out = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                ok = True
                for x, t, p in zip(e, trunc, pole):
                    if x > t:
                        ok = False
                        break
                    if x < -p:
                        raise DomainError("pole bound exceeded in product")
                if not ok:
                    continue
                s = out.get(e)
                out[e] = ca * cb if s is None else s + ca * cb
        return SeriesElement(self.ring, {e: c for e, c in out.items() if c != 0})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        n = int(n)
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        if not isinstance(other, SeriesElement):
            return self.scale(Q1 / _as_fraction(other))
        return self * other.inverse()

    def inverse(self) -> "SeriesElement":
        """Exact inverse of a (monomial * unit) element; DomainError otherwise."""
        if not self.terms:
            raise DomainError("zero series is not invertible")
        shift = tuple(min(e[i] for e in self.terms) for i in range(len(self.ring.vars)))
        lead = self.terms.get(shift)
        if lead is None:
            raise DomainError(
                "series is not invertible in the truncated Laurent ring "
                "(no dominant monomial)"
            )
        # u := self / (lead * shift-monomial) - 1 has strictly positive exponents.
        neg_shift = tuple(-s for s in shift)
        u_terms = {}
        for e, c in self.terms.items():
            if e == shift:
                continue
            u_terms[tuple(x - s for x, s in zip(e, shift))] = c / lead
        ring = self.ring
        u = SeriesElement(ring, u_terms)
        # Neumann series sum (-u)^k terminates because u has positive exponents.
        acc = ring.one()
        term = ring.one()
        while True:
            term = term * u
            if term.is_zero():
                break
            term = -term
            acc = acc + term
        inv_mono = SeriesElement(ring, {neg_shift: Q1 / lead})
        if not ring._admissible(neg_shift):
            raise DomainError("inverse exceeds declared pole depth")
        return inv_mono * acc

    # -- substitutions -------------------------------------------------------

    def subs_neg(self, var: str) -> "SeriesElement":
        """Substitute var -> -var (used for t -> -t)."""
        i = self.ring.index(var)
        return SeriesElement(
            self.ring,
            {e: (-c if e[i] % 2 else c) for e, c in self.terms.items()},
        )

    def subs_linear(self, var: str, combo: dict, target: SeriesRing) -> "SeriesElement":
        """Substitute var -> sum(c_w * w) into nonnegative powers of var.

        All other variables must exist in `target`.  Negative powers of `var`
        raise: they have no expansion in the target ring.
        """
        i = self.ring.index(var)
        lin = target.zero()
        for w, c in combo.items():
            lin = lin + target.var(w, 1, c)
        cache = {0: target.one()}

        def lin_pow(n):
            if n not in cache:
                cache[n] = lin_pow(n - 1) * lin
            return cache[n]

        out = target.zero()
        for e, c in self.terms.items():
            if e[i] < 0:
                raise DomainError("negative power has no linear-substitution expansion")
            mono = {
                v: e[self.ring.index(v)]
                for v in self.ring.vars
                if v != var and e[self.ring.index(v)] != 0
            }
            out = out + target.monomial(mono, c) * lin_pow(e[i])
        return out

    def transfer(self, target: SeriesRing) -> "SeriesElement":
        """Re-home into `target` matching variables by name.

        Variables absent from `target` must carry exponent 0 everywhere.
        """
        out = {}
        for e, c in self.terms.items():
            vec = [0] * len(target.vars)
            for v, x in zip(self.ring.vars, e):
                if x == 0:
                    continue
                vec[target.index(v)] = x
            vec = tuple(vec)
            if target._admissible(vec):
                out[vec] = out.get(vec, Q0) + c
        return SeriesElement(target, {e: c for e, c in out.items() if c != 0})

    # -- serialization ---------------------------------------------------------

    def to_json_obj(self) -> list:
        return [
            {"exponents": list(e), "coeff": rat_str(c)}
            for e, c in sorted(self.terms.items())
        ]


# -- special series ------------------------------------------------------------


def exp_monomial(ring: SeriesRing, c, exps: dict) -> SeriesElement:
    """exp(c * x^exps) truncated; requires a non-constant monomial unless c == 0."""
    c = _as_fraction(c)
    if c == 0:
        return ring.one()
    mono = ring.monomial(exps, c)
    if mono.is_zero():
        return ring.one()  # monomial already beyond truncation
    if not any(exps.values()):
        raise DomainError("exp of a nonzero constant is not rational")
    acc = ring.one()
    term = ring.one()
    n = 0
    while True:
        n += 1
        term = term * mono
        if term.is_zero():
            break
        term = term.scale(Fraction(1, n))
        acc = acc + term
    return acc


def exp_series(f: SeriesElement) -> SeriesElement:
    """exp(f) for f with zero constant term and no negative exponents."""
    if f.constant_term() != 0:
        raise DomainError("exp requires zero constant term")
    if any(x < 0 for e in f.terms for x in e):
        raise DomainError("exp requires nonnegative exponents")
    ring = f.ring
    acc = ring.one()
    power = ring.one()
    n = 0
    while True:
        n += 1
        power = power * f
        if power.is_zero():
            break
        acc = acc + power.scale(Fraction(1, factorial(n)))
    return acc


def log1p(f: SeriesElement) -> SeriesElement:
    """log(1 + f) for f with zero constant term and no negative exponents."""
    if f.constant_term() != 0:
        raise DomainError("log requires the series to have constant term 1")
    if any(x < 0 for e in f.terms for x in e):
        raise DomainError("log requires nonnegative exponents")
    ring = f.ring
    acc = ring.zero()
    power = ring.one()
    n = 0
    while True:
        n += 1
        power = power * f
        if power.is_zero():
            break
        acc = acc + power.scale(Fraction((-1) ** (n - 1), n))
    return acc


@lru_cache(maxsize=None)
def varsigma_coeff(k: int) -> Fraction:
    """[z^k] of varsigma(z) = 2*sinh(z/2): 1/(2^(k-1) k!) for odd k, else 0."""
    if k < 1 or k % 2 == 0:
        return Q0
    return Fraction(1, 2 ** (k - 1) * factorial(k))


@lru_cache(maxsize=None)
def inv_varsigma_coeff(k: int) -> Fraction:
    """[z^k] of 1/varsigma(z); nonzero only for odd k >= -1."""
    if k < -1 or k % 2 == 0:
        return Q0
    # 1/varsigma = z^(-1) * (1/S); invert S(z) = sum z^(2m)/(2^(2m)(2m+1)!) exactly.
    order = k + 1
    s = [Fraction(1, 2 ** (2 * m) * factorial(2 * m + 1)) for m in range(order // 2 + 1)]
    inv = [Q0] * (order // 2 + 1)
    inv[0] = Q1
    for m in range(1, len(inv)):
        inv[m] = -sum(s[j] * inv[m - j] for j in range(1, m + 1))
    return inv[order // 2]


def varsigma(ring: SeriesRing, c=Q1, exps=None, var: str | None = None) -> SeriesElement:
    """varsigma(c * m) = 2*sinh(c*m/2) for the monomial m (default: `var`)."""
    if exps is None:
        exps = {var: 1}
    c = _as_fraction(c)
    if c == 0:
        return ring.zero()
    if not any(exps.values()):
        raise DomainError("varsigma of a nonzero constant is not rational")
    out = ring.zero()
    k = 1
    while True:
        mono = {v: k * e for v, e in exps.items()}
        term = ring.monomial(mono, varsigma_coeff(k) * c ** k)
        if term.is_zero() and k > 1:
            break
        out = out + term
        k += 2
        if k > sum(ring.trunc) + 2:
            break
    return out


def s_series(ring: SeriesRing, c=Q1, exps=None, var: str | None = None) -> SeriesElement:
    """S(c*m) = varsigma(c*m)/(c*m); constant term 1, even powers only."""
    if exps is None:
        exps = {var: 1}
    c = _as_fraction(c)
    if c == 0:
        return ring.one()
    if not any(exps.values()):
        raise DomainError("S of a nonzero constant is not rational")
    out = ring.one()
    k = 3
    while True:
        mono = {v: (k - 1) * e for v, e in exps.items()}
        term = ring.monomial(mono, varsigma_coeff(k) * c ** (k - 1))
        if term.is_zero():
            break
        out = out + term
        k += 2
    return out


def s_power(ring: SeriesRing, c, exps, exponent: SeriesElement) -> SeriesElement:
    """S(c*m)^exponent := exp(exponent * log S(c*m)) for a series exponent."""
    if exponent.ring != ring:
        raise ConfigurationError("exponent must live in the same ring")
    s = s_series(ring, c, exps)
    return exp_series(exponent * log1p(s - 1))


def pochhammer_parts(x: SeriesElement, n: int):
    """(num, den) with (1+x)_n = num/den exactly.

    n >= 0: ((x+1)...(x+n), 1); n < 0: (1, x(x-1)...(x+n+1)).
    """
    ring = x.ring
    if n >= 0:
        num = ring.one()
        for j in range(1, n + 1):
            num = num * (x + j)
        return num, ring.one()
    den = ring.one()
    for j in range(0, -n):
        den = den * (x - j)
    return ring.one(), den


def pochhammer(x: SeriesElement, n: int) -> SeriesElement:
    """The Pochhammer value (1+x)_n; DomainError when the n<0 form is not invertible."""
    num, den = pochhammer_parts(x, n)
    if n >= 0:
        return num
    try:
        return den.inverse()
    except DomainError as exc:
        raise DomainError(
            f"(1+x)_{n} is not invertible: factor product {den!r} has no inverse"
        ) from exc


# -- global fractional monomial -------------------------------------------------


@dataclass(frozen=True)
class FracMonomial:
    """Global prefactor t^t_exp * (-t)^negt_exp * u^u_exp with rational exponents.

    (-t) is kept as its own base; (-t)^k = (-1)^k t^k is applied only at
    integer k (via :meth:`split_integral`).
    """

    t_exp: Fraction = Q0
    negt_exp: Fraction = Q0
    u_exp: int = 0

    @staticmethod
    def make(t_exp=0, negt_exp=0, u_exp=0) -> "FracMonomial":
        return FracMonomial(_as_fraction(t_exp), _as_fraction(negt_exp), int(u_exp))

    def __mul__(self, other: "FracMonomial") -> "FracMonomial":
        return FracMonomial(
            self.t_exp + other.t_exp,
            self.negt_exp + other.negt_exp,
            self.u_exp + other.u_exp,
        )

    def inverse(self) -> "FracMonomial":
        return FracMonomial(-self.t_exp, -self.negt_exp, -self.u_exp)

    def is_integral(self) -> bool:
        return self.t_exp.denominator == 1 and self.negt_exp.denominator == 1

    def fractional_residue(self) -> tuple:
        """(frac part of t-exponent, frac part of (-t)-exponent); (0,0) iff integral."""
        return (
            self.t_exp - self.t_exp.numerator // self.t_exp.denominator,
            self.negt_exp - self.negt_exp.numerator // self.negt_exp.denominator,
        )

    def split_integral(self):
        """(sign, t_power, u_power) after folding (-t)^k = (-1)^k t^k; integral only."""
        if not self.is_integral():
            raise DomainError(f"fractional monomial did not cancel: {self}")
        k = int(self.negt_exp)
        sign = -1 if k % 2 else 1
        return sign, int(self.t_exp) + k, self.u_exp
