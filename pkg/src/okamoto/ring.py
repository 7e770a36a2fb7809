"""Exact scalar arithmetic for the whole package.

Scalars are elements of the fraction field of a multivariate Laurent
polynomial ring over the rationals.  Polynomials are stored sparsely as a
map from integer exponent vectors (negative exponents allowed) to nonzero
``Fraction`` coefficients; the variable list of every value is kept
alphabetized so that canonical forms, and hence golden files, are
deterministic.

The module also provides directed power-substitution rules (used to decide
equality modulo the Casimir relation and the residue-parameter constraints)
and the parser/printer for the expression grammar shared by the CLI and the
file formats:

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' signed_int)?
    base   := integer | identifier | '(' expr ')'

Identifiers match ``[A-Za-z][A-Za-z0-9_]*``.  The canonical printer emits
this grammar (the optional leading sign is the one extension over the bare
grammar; it is needed so that values with a negative leading coefficient
round-trip).

All values are immutable after construction and every operation is a pure
function, so values may be freely shared between threads.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd
from typing import Iterable, Mapping, Sequence

__all__ = [
    "AlgebraError",
    "ParseError",
    "DivisionByZero",
    "LaurentPolynomial",
    "RationalFunction",
    "SubstitutionRule",
    "parse_expression",
    "rf",
    "rf_equal_mod",
    "normalize_mod",
    "poly_gcd",
]


class AlgebraError(Exception):
    """Base class for exact-arithmetic errors."""


class ParseError(AlgebraError):
    """Syntax or lookup error while parsing an expression."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DivisionByZero(AlgebraError):
    """Division by an expression that is identically zero."""


Exponents = tuple[int, ...]
Terms = dict[Exponents, Fraction]

# cache of index maps used when two values over different variable lists meet
_ALIGN_CACHE: dict[tuple[tuple[str, ...], tuple[str, ...]], tuple] = {}


def _grlex_key(exps: Exponents) -> tuple:
    return (sum(exps), exps)


def _merge_vars(va: tuple[str, ...], vb: tuple[str, ...]):
    """Return (merged, map_a, map_b) with positions of va/vb inside merged."""
    key = (va, vb)
    hit = _ALIGN_CACHE.get(key)
    if hit is not None:
        return hit
    merged = tuple(sorted(set(va) | set(vb)))
    pos = {name: i for i, name in enumerate(merged)}
    map_a = tuple(pos[name] for name in va)
    map_b = tuple(pos[name] for name in vb)
    out = (merged, map_a, map_b)
    _ALIGN_CACHE[key] = out
    return out


def _remap(terms: Terms, index_map: tuple[int, ...], arity: int) -> Terms:
    if not terms:
        return {}
    out: Terms = {}
    for exps, c in terms.items():
        vec = [0] * arity
        for i, e in zip(index_map, exps):
            vec[i] = e
        out[tuple(vec)] = c
    return out


class LaurentPolynomial:
    """Sparse Laurent polynomial over Q with an alphabetized variable list."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Sequence[str], terms: Mapping[Exponents, Fraction]):
        vs = tuple(vars)
        if any(vs[i] >= vs[i + 1] for i in range(len(vs) - 1)):
            raise AlgebraError(f"variable list must be strictly alphabetized: {vs}")
        cleaned: Terms = {}
        for exps, c in terms.items():
            c = Fraction(c)
            if c:
                if len(exps) != len(vs):
                    raise AlgebraError("exponent arity mismatch")
                cleaned[tuple(exps)] = c
        object.__setattr__(self, "vars", vs)
        object.__setattr__(self, "terms", cleaned)

    def __setattr__(self, *_):
        raise AttributeError("LaurentPolynomial is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def constant(c, vars: Sequence[str] = ()) -> "LaurentPolynomial":
        c = Fraction(c)
        vs = tuple(vars)
        return LaurentPolynomial(vs, {(0,) * len(vs): c} if c else {})

    @staticmethod
    def variable(name: str) -> "LaurentPolynomial":
        return LaurentPolynomial((name,), {(1,): Fraction(1)})

    @staticmethod
    def monomial(vars: Sequence[str], exps: Exponents, coeff=1) -> "LaurentPolynomial":
        return LaurentPolynomial(vars, {tuple(exps): Fraction(coeff)})

    # -- basic queries ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return len(self.terms) == 1 and next(iter(self.terms.items())) == (
            (0,) * len(self.vars),
            Fraction(1),
        )

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_constant(self) -> bool:
        return not self.terms or set(self.terms) == {(0,) * len(self.vars)}

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise AlgebraError("not a constant")
        return next(iter(self.terms.values()))

    def leading(self) -> tuple[Exponents, Fraction]:
        """Leading term under graded lexicographic order."""
        if not self.terms:
            raise AlgebraError("zero polynomial has no leading term")
        exps = max(self.terms, key=_grlex_key)
        return exps, self.terms[exps]

    def degree_in(self, var: str) -> int:
        if var not in self.vars or not self.terms:
            return 0
        i = self.vars.index(var)
        return max(e[i] for e in self.terms)

    def min_degree_in(self, var: str) -> int:
        if var not in self.vars or not self.terms:
            return 0
        i = self.vars.index(var)
        return min(e[i] for e in self.terms)

    def used_vars(self) -> tuple[str, ...]:
        used = set()
        for exps in self.terms:
            for name, e in zip(self.vars, exps):
                if e:
                    used.add(name)
        return tuple(sorted(used))

    # -- alignment -------------------------------------------------------

    def on_vars(self, vars: tuple[str, ...]) -> "LaurentPolynomial":
        if vars == self.vars:
            return self
        merged, map_a, _ = _merge_vars(self.vars, vars)
        if merged != vars:
            raise AlgebraError(f"cannot restrict {self.vars} onto {vars}")
        return LaurentPolynomial(vars, _remap(self.terms, map_a, len(vars)))

    @staticmethod
    def aligned(a: "LaurentPolynomial", b: "LaurentPolynomial"):
        if a.vars == b.vars:
            return a, b
        merged, map_a, map_b = _merge_vars(a.vars, b.vars)
        n = len(merged)
        return (
            LaurentPolynomial(merged, _remap(a.terms, map_a, n)),
            LaurentPolynomial(merged, _remap(b.terms, map_b, n)),
        )

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, LaurentPolynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPolynomial.constant(other, self.vars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = LaurentPolynomial.aligned(self, other)
        terms = dict(a.terms)
        for exps, c in b.terms.items():
            s = terms.get(exps, Fraction(0)) + c
            if s:
                terms[exps] = s
            else:
                terms.pop(exps, None)
        return LaurentPolynomial(a.vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = LaurentPolynomial.aligned(self, other)
        if not a.terms or not b.terms:
            return LaurentPolynomial(a.vars, {})
        terms: Terms = {}
        for ea, ca in a.terms.items():
            for eb, cb in b.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = terms.get(e, Fraction(0)) + ca * cb
                if s:
                    terms[e] = s
                else:
                    del terms[e]
        return LaurentPolynomial(a.vars, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if not self.is_monomial():
                raise AlgebraError("only monomials are invertible in the Laurent ring")
            exps, c = self.leading()
            inv = LaurentPolynomial(
                self.vars, {tuple(-e for e in exps): Fraction(1) / c}
            )
            return inv ** (-n)
        result = LaurentPolynomial.constant(1, self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPolynomial.constant(other, self.vars)
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        a, b = LaurentPolynomial.aligned(self, other)
        return a.terms == b.terms

    def __hash__(self):
        used = self.used_vars()
        if used != self.vars:
            return hash(self._project(used))
        return hash((self.vars, tuple(sorted(self.terms.items()))))

    def _project(self, vars: tuple[str, ...]) -> "LaurentPolynomial":
        keep = [self.vars.index(v) for v in vars]
        return LaurentPolynomial(
            vars, {tuple(e[i] for i in keep): c for e, c in self.terms.items()}
        )

    # -- content and canonical helpers ------------------------------------

    def monomial_min(self) -> Exponents:
        """Per-variable minimum exponent over all terms (0 for the zero poly)."""
        if not self.terms:
            return (0,) * len(self.vars)
        mins = None
        for exps in self.terms:
            if mins is None:
                mins = list(exps)
            else:
                mins = [min(m, e) for m, e in zip(mins, exps)]
        return tuple(mins)

    def shift(self, delta: Exponents) -> "LaurentPolynomial":
        return LaurentPolynomial(
            self.vars,
            {tuple(e + d for e, d in zip(exps, delta)): c for exps, c in self.terms.items()},
        )

    def rational_content(self) -> Fraction:
        """gcd of numerators over lcm of denominators, sign of leading coeff."""
        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = int_gcd(num, abs(c.numerator))
            den = den * c.denominator // int_gcd(den, c.denominator)
        content = Fraction(num, den)
        if self.leading()[1] < 0:
            content = -content
        return content

    def map_coeffs(self, fn) -> "LaurentPolynomial":
        return LaurentPolynomial(self.vars, {e: fn(c) for e, c in self.terms.items()})

    # -- evaluation and substitution ---------------------------------------

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        total = Fraction(0)
        for exps, c in self.terms.items():
            val = c
            for name, e in zip(self.vars, exps):
                if e:
                    val *= Fraction(point[name]) ** e
            total += val
        return total

    def substitute(self, mapping: Mapping[str, "RationalFunction"]) -> "RationalFunction":
        """Total substitution of variables by rational functions."""
        result = RationalFunction.zero()
        for exps, c in self.terms.items():
            term = RationalFunction.constant(c)
            for name, e in zip(self.vars, exps):
                if not e:
                    continue
                if name in mapping:
                    term = term * (mapping[name] ** e)
                else:
                    term = term * RationalFunction(
                        LaurentPolynomial.monomial((name,), (e,))
                    )
            result = result + term
        return result

    # -- printing ----------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps in sorted(self.terms, key=_grlex_key, reverse=True):
            c = self.terms[exps]
            factors = []
            for name, e in zip(self.vars, exps):
                if e == 0:
                    continue
                factors.append(name if e == 1 else f"{name}^{e}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = str(mag) + "*" + "*".join(factors)
            parts.append(("-" if c < 0 else "+", body))
        sign, body = parts[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            out += sign + body
        return out

    def __repr__(self):
        return f"LaurentPolynomial({self})"


def _clear_to_integer(p: LaurentPolynomial) -> LaurentPolynomial:
    """Scale so all coefficients are integers with overall gcd 1."""
    c = p.rational_content()
    if not c:
        return p
    return p.map_coeffs(lambda x: x / c)


# ---------------------------------------------------------------------------
# polynomial gcd (subresultant PRS, recursive in the number of variables)
# ---------------------------------------------------------------------------


def _poly_divmod(f: LaurentPolynomial, g: LaurentPolynomial):
    """Multivariate division of honest (non-negative exponent) polynomials.

    Returns (q, r) with f = q*g + r; terminates because the graded-lex
    leading term strictly drops.  Exact when r == 0.
    """
    f, g = LaurentPolynomial.aligned(f, g)
    if g.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    q_terms: Terms = {}
    r = f
    g_lead, g_coeff = g.leading()
    while not r.is_zero():
        r_lead, r_coeff = r.leading()
        exps = tuple(a - b for a, b in zip(r_lead, g_lead))
        if any(e < 0 for e in exps):
            break
        coeff = r_coeff / g_coeff
        q_terms[exps] = q_terms.get(exps, Fraction(0)) + coeff
        r = r - LaurentPolynomial.monomial(r.vars, exps, coeff) * g
    return LaurentPolynomial(f.vars, q_terms), r


def poly_div_exact(f: LaurentPolynomial, g: LaurentPolynomial) -> LaurentPolynomial:
    """Exact quotient f/g for Laurent polynomials; raises if not divisible."""
    f0, g0 = LaurentPolynomial.aligned(f, g)
    sf = f0.monomial_min()
    sg = g0.monomial_min()
    fq = f0.shift(tuple(-e for e in sf))
    gq = g0.shift(tuple(-e for e in sg))
    q, r = _poly_divmod(fq, gq)
    if not r.is_zero():
        raise AlgebraError("inexact polynomial division")
    return q.shift(tuple(a - b for a, b in zip(sf, sg)))


def _univariate_view(p: LaurentPolynomial, var: str):
    """Return dict degree -> coefficient polynomial (var removed)."""
    i = p.vars.index(var)
    rest = p.vars[:i] + p.vars[i + 1 :]
    out: dict[int, Terms] = {}
    for exps, c in p.terms.items():
        d = exps[i]
        rest_e = exps[:i] + exps[i + 1 :]
        out.setdefault(d, {})[rest_e] = c
    return {d: LaurentPolynomial(rest, t) for d, t in out.items()}


def _uni_mul_scalar(u: dict[int, LaurentPolynomial], s: LaurentPolynomial):
    return {d: c * s for d, c in u.items()}


def _uni_sub(a: dict[int, LaurentPolynomial], b: dict[int, LaurentPolynomial]):
    out = dict(a)
    for d, c in b.items():
        if d in out:
            s = out[d] - c
            if s.is_zero():
                del out[d]
            else:
                out[d] = s
        else:
            out[d] = -c
    return out


def _uni_shift_mul(u: dict[int, LaurentPolynomial], k: int, s: LaurentPolynomial):
    return {d + k: c * s for d, c in u.items()}


def _pseudo_rem(
    A: dict[int, LaurentPolynomial], B: dict[int, LaurentPolynomial]
) -> dict[int, LaurentPolynomial]:
    """Pseudo-remainder of univariate polynomials with polynomial coefficients."""
    da = max(A)
    db = max(B)
    lb = B[db]
    R = dict(A)
    while R and max(R) >= db:
        dr = max(R)
        lr = R[dr]
        R = _uni_sub(_uni_mul_scalar(R, lb), _uni_shift_mul(B, dr - db, lr))
        R.pop(dr, None)
        if dr - db == 0:
            break
    return R


def _content_free(u: dict[int, LaurentPolynomial]):
    """(content, primitive part) of a univariate-view polynomial."""
    cont = None
    for c in u.values():
        cont = c if cont is None else poly_gcd(cont, c)
    assert cont is not None
    return cont, {d: poly_div_exact(c, cont) for d, c in u.items()}


def poly_gcd(a: LaurentPolynomial, b: LaurentPolynomial) -> LaurentPolynomial:
    """gcd up to units, canonicalized: min exponent 0 per variable, integer
    coefficients with gcd 1, positive leading coefficient (graded lex)."""
    a, b = LaurentPolynomial.aligned(a, b)
    if a.is_zero():
        return _canonical_gcd_form(b)
    if b.is_zero():
        return _canonical_gcd_form(a)
    # strip monomial content so we work with honest polynomials
    a = a.shift(tuple(-e for e in a.monomial_min()))
    b = b.shift(tuple(-e for e in b.monomial_min()))
    a = _clear_to_integer(a)
    b = _clear_to_integer(b)
    if a == b:
        return _canonical_gcd_form(a)
    if a.is_monomial() or b.is_monomial():
        # common monomial part is trivial after the shifts above
        return LaurentPolynomial.constant(1, a.vars)
    g = _gcd_rec(a, b)
    return _canonical_gcd_form(g)


def _canonical_gcd_form(p: LaurentPolynomial) -> LaurentPolynomial:
    if p.is_zero():
        return p
    p = p.shift(tuple(-e for e in p.monomial_min()))
    return _clear_to_integer(p)


def _gcd_rec(a: LaurentPolynomial, b: LaurentPolynomial) -> LaurentPolynomial:
    main = None
    for v in reversed(a.vars):
        if a.degree_in(v) > 0 and b.degree_in(v) > 0:
            main = v
            break
    if main is None:
        # no shared variable: gcd is a constant (content already cleared)
        for v in reversed(a.vars):
            if a.degree_in(v) > 0 or b.degree_in(v) > 0:
                return LaurentPolynomial.constant(1, a.vars)
        return LaurentPolynomial.constant(1, a.vars)

    A = _univariate_view(a, main)
    B = _univariate_view(b, main)
    if max(A) < max(B):
        A, B = B, A
    ca, A = _content_free(A)
    cb, B = _content_free(B)
    cont = poly_gcd(ca, cb)

    # subresultant polynomial remainder sequence
    g = LaurentPolynomial.constant(1, ca.vars)
    h = LaurentPolynomial.constant(1, ca.vars)
    while True:
        d = max(A) - max(B)
        R = _pseudo_rem(A, B)
        if not R:
            _, pp = _content_free(B)
            result = _reassemble(pp, main)
            return cont * result
        if max(R) == 0:
            return cont
        divisor = g * (h ** d)
        A = B
        B = {deg: poly_div_exact(c, divisor) for deg, c in R.items()}
        g = A[max(A)]
        if d > 1:
            h = poly_div_exact(g ** d, h ** (d - 1))
        elif d == 1:
            h = g
        # d == 0 cannot occur: pseudo-remainder strictly drops the degree


def _reassemble(u: dict[int, LaurentPolynomial], var: str) -> LaurentPolynomial:
    total = None
    for d, c in u.items():
        part = c * LaurentPolynomial.monomial((var,), (d,))
        total = part if total is None else total + part
    assert total is not None
    return total


def poly_lcm(a: LaurentPolynomial, b: LaurentPolynomial) -> LaurentPolynomial:
    if a.is_zero() or b.is_zero():
        return LaurentPolynomial.constant(0, a.vars)
    return poly_div_exact(a * b, poly_gcd(a, b))


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------


class RationalFunction:
    """Reduced fraction of Laurent polynomials over Q.

    The canonical form extracts the monomial content (per variable, exactly
    one of numerator and denominator touches exponent 0), normalizes the
    integer content with a positive graded-lex leading coefficient in the
    denominator, and divides out the polynomial gcd.  Equality is decided by
    cross-multiplication, never by evaluation.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, (int, Fraction)):
            num = LaurentPolynomial.constant(num)
        if den is None:
            den = LaurentPolynomial.constant(1, num.vars)
        elif isinstance(den, (int, Fraction)):
            den = LaurentPolynomial.constant(den, num.vars)
        if den.is_zero():
            raise DivisionByZero("denominator is identically zero")
        num, den = LaurentPolynomial.aligned(num, den)
        num, den = self._canonicalize(num, den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *_):
        raise AttributeError("RationalFunction is immutable")

    @staticmethod
    def _canonicalize(num: LaurentPolynomial, den: LaurentPolynomial):
        if num.is_zero():
            return (
                LaurentPolynomial.constant(0, num.vars),
                LaurentPolynomial.constant(1, num.vars),
            )
        # monomial content: land both on non-negative exponents sharing no
        # common monomial factor
        mn = num.monomial_min()
        md = den.monomial_min()
        num = num.shift(tuple(-e for e in mn))
        den = den.shift(tuple(-e for e in md))
        extra_num = []
        extra_den = []
        for g in (a - b for a, b in zip(mn, md)):
            extra_num.append(g if g > 0 else 0)
            extra_den.append(-g if g < 0 else 0)
        num = num.shift(tuple(extra_num))
        den = den.shift(tuple(extra_den))
        # full gcd reduction keeps expression swell down
        if not den.is_constant() and not num.is_constant():
            g = poly_gcd(num, den)
            if not g.is_constant():
                num = poly_div_exact(num, g)
                den = poly_div_exact(den, g)
        # joint integer content 1, denominator leading coefficient positive
        lcm_den = 1
        gcd_num = 0
        for c in list(num.terms.values()) + list(den.terms.values()):
            lcm_den = lcm_den * c.denominator // int_gcd(lcm_den, c.denominator)
            gcd_num = int_gcd(gcd_num, abs(c.numerator))
        scale = Fraction(lcm_den, gcd_num)
        if den.leading()[1] < 0:
            scale = -scale
        if scale != 1:
            num = num.map_coeffs(lambda x: x * scale)
            den = den.map_coeffs(lambda x: x * scale)
        return num, den

    # arithmetic ----------------------------------------------------------

    @staticmethod
    def zero() -> "RationalFunction":
        return RationalFunction(0)

    @staticmethod
    def one() -> "RationalFunction":
        return RationalFunction(1)

    @staticmethod
    def constant(c) -> "RationalFunction":
        return RationalFunction(Fraction(c))

    @staticmethod
    def var(name: str) -> "RationalFunction":
        return RationalFunction(LaurentPolynomial.variable(name))

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, (int, Fraction)):
            return RationalFunction(other)
        if isinstance(other, LaurentPolynomial):
            return RationalFunction(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise DivisionByZero("division by zero expression")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return RationalFunction(other) / self

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise DivisionByZero("zero has no inverse")
        return RationalFunction(self.den, self.num)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = RationalFunction.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num == self.den

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        # cross-multiplication is the decision procedure
        return (self.num * other.den) == (other.num * self.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        d = self.den.evaluate(point)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at evaluation point")
        return self.num.evaluate(point) / d

    def substitute(self, mapping: Mapping[str, "RationalFunction"]) -> "RationalFunction":
        d = self.den.substitute(mapping)
        if d.is_zero():
            raise DivisionByZero("denominator vanishes under substitution")
        return self.num.substitute(mapping) / d

    def variables(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.num.used_vars()) | set(self.den.used_vars())))

    def __str__(self):
        if self.den.is_one():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RationalFunction({self})"


# ---------------------------------------------------------------------------
# directed power substitution
# ---------------------------------------------------------------------------


class SubstitutionRule:
    """Rewrite ``var^power -> replacement`` wherever the exponent allows.

    A monomial exponent e of the target variable is written e = q*power + r
    with 0 <= r < power and the rule contributes ``replacement^q * var^r``;
    q may be negative, which is fine because replacements are invertible
    rational functions in every rule set used here.  Rule sets are validated
    to be mutually non-reintroducing (no replacement mentions any rule's
    target), which makes sequential application confluent.
    """

    __slots__ = ("var", "power", "replacement")

    def __init__(self, var: str, replacement: "RationalFunction", power: int = 1):
        if power < 1:
            raise AlgebraError("substitution power must be >= 1")
        if var in replacement.variables():
            raise AlgebraError(f"replacement for {var} must not mention {var}")
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "power", power)
        object.__setattr__(self, "replacement", replacement)

    def __setattr__(self, *_):
        raise AttributeError("SubstitutionRule is immutable")

    def apply_poly(self, p: LaurentPolynomial) -> "RationalFunction":
        if self.var not in p.vars:
            return RationalFunction(p)
        i = p.vars.index(self.var)
        total = RationalFunction.zero()
        # group terms by quotient power to share replacement powers
        groups: dict[int, Terms] = {}
        for exps, c in p.terms.items():
            q, r = divmod(exps[i], self.power)
            new_exps = exps[:i] + (r,) + exps[i + 1 :]
            groups.setdefault(q, {})[new_exps] = (
                groups.get(q, {}).get(new_exps, Fraction(0)) + c
            )
        for q, terms in groups.items():
            base = RationalFunction(LaurentPolynomial(p.vars, terms))
            total = total + base * (self.replacement ** q)
        return total

    def apply(self, x: "RationalFunction") -> "RationalFunction":
        if self.var not in x.variables():
            return x
        return self.apply_poly(x.num) / self.apply_poly(x.den)

    def __repr__(self):
        head = self.var if self.power == 1 else f"{self.var}^{self.power}"
        return f"SubstitutionRule({head} -> {self.replacement})"


def validate_rules(rules: Sequence[SubstitutionRule]) -> None:
    targets = {r.var for r in rules}
    if len(targets) != len(list(rules)):
        raise AlgebraError("duplicate substitution targets")
    for r in rules:
        mentioned = set(r.replacement.variables())
        if mentioned & targets:
            raise AlgebraError(
                f"rule for {r.var} reintroduces targets {mentioned & targets}"
            )


def normalize_mod(x: "RationalFunction", rules: Sequence[SubstitutionRule]) -> "RationalFunction":
    """Normal form of x under a confluent rule set."""
    for r in rules:
        x = r.apply(x)
    return x


def rf_equal_mod(
    a: "RationalFunction", b: "RationalFunction", rules: Sequence[SubstitutionRule] = ()
) -> bool:
    """Exact equality of normal forms, decided by cross-multiplication."""
    if rules:
        validate_rules(rules)
        a = normalize_mod(a, rules)
        b = normalize_mod(b, rules)
    return a == b


# ---------------------------------------------------------------------------
# parser for the expression grammar
# ---------------------------------------------------------------------------

_IDENT_START = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz")
_IDENT_CONT = _IDENT_START | set("0123456789_")
_DIGITS = set("0123456789")


def _tokenize(text: str):
    tokens = []  # (kind, value, position)
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\n\r":
            i += 1
            continue
        if ch in _DIGITS:
            j = i
            while j < n and text[j] in _DIGITS:
                j += 1
            tokens.append(("int", int(text[i:j]), i))
            i = j
            continue
        if ch in _IDENT_START:
            j = i
            while j < n and text[j] in _IDENT_CONT:
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
            continue
        if ch in "+-*/^()":
            tokens.append((ch, ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, tokens, vars: Sequence[str] | None):
        self.tokens = tokens
        self.pos = 0
        self.registry = None if vars is None else set(vars)

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[1]!r}", tok[2])
        self.pos += 1
        return tok

    def parse(self) -> RationalFunction:
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected trailing {tok[1]!r}", tok[2])
        return value

    def expr(self) -> RationalFunction:
        sign = 1
        if self.peek()[0] in ("+", "-"):
            if self.take()[0] == "-":
                sign = -1
        value = self.term() * sign
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> RationalFunction:
        value = self.factor()
        while self.peek()[0] in ("*", "/"):
            op, _, pos = self.take()
            rhs = self.factor()
            if op == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero expression", pos)
                value = value / rhs
        return value

    def factor(self) -> RationalFunction:
        value = self.base()
        if self.peek()[0] == "^":
            _, _, pos = self.take()
            sign = 1
            if self.peek()[0] in ("+", "-"):
                if self.take()[0] == "-":
                    sign = -1
            tok = self.take("int")
            exponent = sign * tok[1]
            if value.is_zero() and exponent < 0:
                raise ParseError("division by zero expression", pos)
            value = value ** exponent
        return value

    def base(self) -> RationalFunction:
        kind, val, pos = self.take()
        if kind == "int":
            return RationalFunction.constant(val)
        if kind == "ident":
            if self.registry is not None and val not in self.registry:
                raise ParseError(f"unknown variable {val!r}", pos)
            return RationalFunction.var(val)
        if kind == "(":
            value = self.expr()
            self.take(")")
            return value
        raise ParseError(f"unexpected token {val!r}", pos)


def parse_expression(text: str, vars: Sequence[str] | None = None) -> RationalFunction:
    """Parse ``text`` into an exact rational function.

    When ``vars`` is given it acts as the variable registry: identifiers
    outside it raise a ``ParseError``.  Without it, identifiers register
    themselves.  The result round-trips through ``str`` up to canonical form.
    """
    return _Parser(_tokenize(text), vars).parse()


def rf(text: str, vars: Sequence[str] | None = None) -> RationalFunction:
    """Shorthand for :func:`parse_expression`."""
    return parse_expression(text, vars)
