"""Exact valued fields: the rationals with p-adic valuations and the
rational function field in one variable with valuations at a point or
at infinity.

Field elements are Fractions (over Q) or RationalFunction values (over
Q(t)); both are immutable and support exact arithmetic.  Valuations
return rank-1 LambdaElements, with a shared INFINITY sentinel for the
value at zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import DomainError, FieldMismatch, NotInValuationRing
from .ordered import LambdaElement, LambdaGroup


class _Infinity:
    """Sentinel for the valuation of zero; larger than every group element."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __gt__(self, other):
        return not isinstance(other, _Infinity)

    def __ge__(self, other):
        return True

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return isinstance(other, _Infinity)

    def __eq__(self, other):
        return isinstance(other, _Infinity)

    def __hash__(self):
        return hash("infinity-sentinel")

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __neg__(self):
        raise DomainError("negated infinity is not a valuation value")

    def __repr__(self):
        return "INFINITY"


INFINITY = _Infinity()


def is_infinite(value) -> bool:
    return isinstance(value, _Infinity)


class Polynomial:
    """Polynomial in one variable with exact rational coefficients.

    Coefficients are stored ascending with no trailing zeros; the zero
    polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [c if isinstance(c, Fraction) else Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @staticmethod
    def constant(c) -> "Polynomial":
        return Polynomial([Fraction(c)])

    @staticmethod
    def x() -> "Polynomial":
        return Polynomial([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Fraction:
        if self.is_zero():
            raise DomainError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        b = list(other.coeffs) + [Fraction(0)] * (n - len(other.coeffs))
        return Polynomial([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) + (-self)

    def __mul__(self, other):
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return Polynomial([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise DomainError("negative polynomial power")
        result = Polynomial.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def divmod(self, other: "Polynomial"):
        if other.is_zero():
            raise DomainError("polynomial division by zero")
        q = Polynomial([])
        r = self
        d = other.degree
        lead = other.leading()
        while not r.is_zero() and r.degree >= d:
            shift = r.degree - d
            coef = r.leading() / lead
            term = Polynomial([Fraction(0)] * shift + [coef])
            q = q + term
            r = r - term * other
        return q, r

    def gcd(self, other: "Polynomial") -> "Polynomial":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        if a.is_zero():
            return a
        return a * (1 / a.leading())

    def evaluate(self, point: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * point + c
        return acc

    def shift(self, c: Fraction) -> "Polynomial":
        """The polynomial p(t + c)."""
        acc = Polynomial([])
        x_plus_c = Polynomial([Fraction(c), Fraction(1)])
        for coef in reversed(self.coeffs):
            acc = acc * x_plus_c + Polynomial.constant(coef)
        return acc

    def reversed_coeffs(self) -> "Polynomial":
        """t^deg * p(1/t): the coefficient sequence reversed."""
        return Polynomial(list(reversed(self.coeffs)))

    def order_at_zero(self) -> int:
        if self.is_zero():
            raise DomainError("zero polynomial has unbounded order")
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return i
        raise AssertionError("unreachable")

    def truncate(self, k: int) -> "Polynomial":
        return Polynomial(self.coeffs[:k])

    def series_inverse(self, k: int) -> "Polynomial":
        """Multiplicative inverse modulo t^k; requires a nonzero constant term."""
        if self.is_zero() or self.coeffs[0] == 0:
            raise DomainError("series inversion needs a unit constant term")
        inv = Polynomial.constant(1 / self.coeffs[0])
        prec = 1
        while prec < k:
            prec = min(2 * prec, k)
            inv = (inv * (2 - self.truncate(prec) * inv)).truncate(prec)
        return inv.truncate(k)

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if i == 0:
                body = str(mag)
            elif i == 1:
                body = "t" if mag == 1 else f"{mag}*t"
            else:
                body = f"t^{i}" if mag == 1 else f"{mag}*t^{i}"
            parts.append((sign, body))
        sign0, body0 = parts[0]
        text = ("-" if sign0 == "-" else "") + body0
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"Polynomial({self})"


def _as_poly(value) -> Polynomial:
    if isinstance(value, Polynomial):
        return value
    if isinstance(value, (int, Fraction)):
        return Polynomial.constant(value)
    raise DomainError(f"cannot coerce {type(value).__name__} to Polynomial")


class RationalFunction:
    """Quotient of two Polynomials, reduced, with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = _as_poly(num)
        den = Polynomial.constant(1) if den is None else _as_poly(den)
        if den.is_zero():
            raise DomainError("rational function with zero denominator")
        if num.is_zero():
            den = Polynomial.constant(1)
        else:
            g = num.gcd(den)
            if g.degree > 0:
                num = num.divmod(g)[0]
                den = den.divmod(g)[0]
            lead = den.leading()
            if lead != 1:
                inv = 1 / lead
                num = num * inv
                den = den * inv
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @staticmethod
    def constant(c) -> "RationalFunction":
        return RationalFunction(Polynomial.constant(c))

    @staticmethod
    def t() -> "RationalFunction":
        return RationalFunction(Polynomial.x())

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise DomainError("not a constant rational function")
        if self.is_zero():
            return Fraction(0)
        return self.num.coeffs[0] / self.den.coeffs[0]

    def __eq__(self, other):
        other = _as_rf(other)
        if other is None:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = _as_rf(other)
        if other is None:
            return NotImplemented
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        other = _as_rf(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_rf(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _as_rf(other)
        if other is None:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rf(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise DomainError("division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = _as_rf(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, k: int):
        if k < 0:
            if self.is_zero():
                raise DomainError("zero to a negative power")
            return RationalFunction(self.den, self.num) ** (-k)
        return RationalFunction(self.num**k, self.den**k)

    def __str__(self):
        num_text = str(self.num)
        if self.den == Polynomial.constant(1):
            return num_text
        return f"({num_text})/({self.den})"

    def __repr__(self):
        return f"RationalFunction({self})"


def _as_rf(value) -> Optional[RationalFunction]:
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, (int, Fraction)):
        return RationalFunction.constant(value)
    if isinstance(value, Polynomial):
        return RationalFunction(value)
    return None


class _ExpressionParser:
    """Recursive-descent parser for field-element expressions.

    Grammar:  expr := ['-'] term (('+'|'-') term)*
              term := factor (('*'|'/') factor)*
              factor := atom ['^' ['-'] integer]
              atom := '(' expr ')' | 't' | integer
    """

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def parse(self) -> RationalFunction:
        value = self.expr()
        self.skip_space()
        if self.pos != len(self.text):
            raise DomainError(f"unexpected character at position {self.pos}: {self.text!r}")
        return value

    def skip_space(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_space()
        if self.pos < len(self.text):
            return self.text[self.pos]
        return ""

    def expr(self) -> RationalFunction:
        negate = False
        if self.peek() == "-":
            self.pos += 1
            negate = True
        elif self.peek() == "+":
            self.pos += 1
        value = self.term()
        if negate:
            value = -value
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> RationalFunction:
        value = self.factor()
        while self.peek() in ("*", "/"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self.factor()
            value = value * rhs if op == "*" else value / rhs
        return value

    def factor(self) -> RationalFunction:
        value = self.atom()
        if self.peek() == "^":
            self.pos += 1
            sign = 1
            if self.peek() == "-":
                self.pos += 1
                sign = -1
            k = self.integer()
            value = value ** (sign * k)
        return value

    def atom(self) -> RationalFunction:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            value = self.expr()
            if self.peek() != ")":
                raise DomainError(f"missing closing parenthesis: {self.text!r}")
            self.pos += 1
            return value
        if ch == "t":
            self.pos += 1
            return RationalFunction.t()
        if ch.isdigit():
            return RationalFunction.constant(self.integer())
        raise DomainError(f"unexpected character at position {self.pos}: {self.text!r}")

    def integer(self) -> int:
        self.skip_space()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise DomainError(f"expected a number at position {start}: {self.text!r}")
        return int(self.text[start : self.pos])


def parse_rational_function(text: str) -> RationalFunction:
    return _ExpressionParser(text).parse()


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _int_valuation(n: int, p: int) -> int:
    if n == 0:
        raise DomainError("valuation of integer zero")
    e = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        e += 1
    return e


@dataclass(frozen=True)
class ResidueField:
    """Descriptor of the residue field: a prime field or the rationals."""

    kind: str  # "prime_field" | "rationals"
    p: Optional[int] = None

    @property
    def formally_real(self) -> bool:
        return self.kind == "rationals"

    def __str__(self):
        return f"F_{self.p}" if self.kind == "prime_field" else "Q"


FieldElement = Union[Fraction, RationalFunction]


@dataclass(frozen=True)
class ValuedField:
    """A base field together with a discrete valuation.

    base: "Q" or "Q(t)".  kind: "p_adic", "at_point" or "at_infinity".
    The value group is the rank-1 integer group in every built-in case.
    """

    base: str
    kind: str
    p: Optional[int] = None
    point: Optional[Fraction] = None

    def __post_init__(self):
        if self.base not in ("Q", "Q(t)"):
            raise DomainError(f"unsupported base field {self.base!r}")
        if self.base == "Q":
            if self.kind != "p_adic" or self.p is None:
                raise DomainError("rational base takes a p_adic valuation")
            if not _is_prime(self.p):
                raise DomainError(f"{self.p} is not prime")
        else:
            if self.kind == "at_point":
                if self.point is None:
                    raise DomainError("at_point valuation needs a base point")
            elif self.kind != "at_infinity":
                raise DomainError(f"unsupported valuation kind {self.kind!r}")

    @staticmethod
    def rationals(p: int) -> "ValuedField":
        return ValuedField("Q", "p_adic", p=p)

    @staticmethod
    def function_field_at(c) -> "ValuedField":
        return ValuedField("Q(t)", "at_point", point=Fraction(c))

    @staticmethod
    def function_field_at_infinity() -> "ValuedField":
        return ValuedField("Q(t)", "at_infinity")

    @property
    def value_group(self) -> LambdaGroup:
        return LambdaGroup(1)

    def zero(self) -> FieldElement:
        return Fraction(0) if self.base == "Q" else RationalFunction.constant(0)

    def one(self) -> FieldElement:
        return Fraction(1) if self.base == "Q" else RationalFunction.constant(1)

    def contains(self, x) -> bool:
        if self.base == "Q":
            return isinstance(x, Fraction)
        return isinstance(x, RationalFunction)

    def coerce(self, x) -> FieldElement:
        if self.base == "Q":
            if isinstance(x, Fraction):
                return x
            if isinstance(x, int):
                return Fraction(x)
        else:
            got = _as_rf(x)
            if got is not None:
                return got
        raise FieldMismatch(f"{x!r} is not an element of {self}")

    def uniformizer(self) -> FieldElement:
        if self.kind == "p_adic":
            return Fraction(self.p)
        if self.kind == "at_point":
            return RationalFunction(Polynomial([-self.point, Fraction(1)]))
        return RationalFunction(Polynomial.constant(1), Polynomial.x())

    def residue_field(self) -> ResidueField:
        if self.kind == "p_adic":
            return ResidueField("prime_field", self.p)
        return ResidueField("rationals")

    def valuation(self, x) -> Union[LambdaElement, _Infinity]:
        x = self.coerce(x)
        if self.base == "Q":
            if x == 0:
                return INFINITY
            v = _int_valuation(x.numerator, self.p) - _int_valuation(x.denominator, self.p)
            return self.value_group.element(v)
        if x.is_zero():
            return INFINITY
        if self.kind == "at_point":
            v = self._order_at_point(x.num) - self._order_at_point(x.den)
            return self.value_group.element(v)
        v = x.den.degree - x.num.degree
        return self.value_group.element(v)

    def _order_at_point(self, poly: Polynomial) -> int:
        c = self.point
        if poly.is_zero():
            raise DomainError("order of zero polynomial")
        order = 0
        linear = Polynomial([-c, Fraction(1)])
        while True:
            q, r = poly.divmod(linear)
            if not r.is_zero():
                return order
            poly = q
            order += 1

    def valuation_int(self, x) -> Union[int, _Infinity]:
        v = self.valuation(x)
        if is_infinite(v):
            return INFINITY
        return int(v.coords[0])

    def residue(self, x):
        """Image in the residue field: an integer mod p, or a Fraction."""
        x = self.coerce(x)
        v = self.valuation(x)
        if is_infinite(v):
            return 0 if self.kind == "p_adic" else Fraction(0)
        if v < self.value_group.zero():
            raise NotInValuationRing(f"valuation of {x} is negative")
        if self.kind == "p_adic":
            if v > self.value_group.zero():
                return 0
            num = x.numerator % self.p
            den = x.denominator % self.p
            return (num * pow(den, -1, self.p)) % self.p
        if v > self.value_group.zero():
            return Fraction(0)
        if self.kind == "at_point":
            return x.num.evaluate(self.point) / x.den.evaluate(self.point)
        return x.num.leading() / x.den.leading()

    def residue_lift(self, x) -> FieldElement:
        """Residue of x re-embedded as a canonical field element."""
        r = self.residue(x)
        if self.base == "Q":
            return Fraction(r)
        return RationalFunction.constant(r)

    def canonical_mod(self, x, n: int) -> FieldElement:
        """Canonical representative of x modulo pi^n * O(v).

        Computed as the truncated digit expansion sum a_i pi^i over
        v(x) <= i < n with each digit the canonical residue lift; two
        elements are congruent mod pi^n O(v) iff their representatives
        are equal.
        """
        x = self.coerce(x)
        v = self.valuation_int(x)
        if is_infinite(v) or v >= n:
            return self.zero()
        pi = self.uniformizer()
        rep = self.zero()
        rest = x
        for i in range(v, n):
            vi = self.valuation_int(rest)
            if is_infinite(vi) or vi >= n:
                break
            if vi > i:
                continue
            digit = self.residue_lift(rest * pi ** (-i))
            term = digit * pi**i
            rep = rep + term
            rest = rest - term
        return rep

    def element_from_string(self, text: str) -> FieldElement:
        if self.base == "Q":
            try:
                return Fraction(text.strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise DomainError(f"cannot parse rational {text!r}") from exc
        value = parse_rational_function(text)
        return value

    def element_to_string(self, x) -> str:
        x = self.coerce(x)
        return str(x)

    def to_json(self) -> dict:
        if self.base == "Q":
            return {"field": "Q", "p": self.p}
        if self.kind == "at_infinity":
            return {"field": "Q(t)", "at": "inf"}
        return {"field": "Q(t)", "at": str(self.point)}

    @staticmethod
    def from_json(obj: dict) -> "ValuedField":
        field = obj.get("field")
        if field == "Q":
            return ValuedField.rationals(int(obj["p"]))
        if field == "Q(t)":
            at = str(obj.get("at"))
            if at == "inf":
                return ValuedField.function_field_at_infinity()
            return ValuedField.function_field_at(Fraction(at))
        raise DomainError(f"unsupported field description {obj!r}")

    def __str__(self):
        if self.base == "Q":
            return f"(Q, v_{self.p})"
        if self.kind == "at_infinity":
            return "(Q(t), v_inf)"
        return f"(Q(t), v at t={self.point})"


def valuation(x, field: ValuedField):
    return field.valuation(x)


def residue(x, field: ValuedField):
    return field.residue(x)


def is_formally_real(field: ValuedField) -> bool:
    return field.residue_field().formally_real
