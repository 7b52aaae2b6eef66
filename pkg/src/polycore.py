"""
Polynomial Core
Exact construction, evaluation and differentiation of the Lucas-Lehmer
polynomials L_n and the generalised map M^a_n, plus the integer
Lucas-Lehmer sequence and the Mersenne primality test.

    L_0 = x,  L_n = L_{n-1}^2 - 2
    M_0 = x,  M_n = 2a M_{n-1}^2 - 1/a      (a = 1/2 gives L_n)
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import gmpy2
import mpmath

from config_manager import default_max_n
from utils.helpers import decimal_digits, format_rational, parse_rational
from utils.validators import DomainError, check_cap, check_level, check_precision


logger = logging.getLogger(__name__)

MIN_PRECISION = 53

GUARD_BITS_PER_LEVEL = 8
GUARD_BITS_BASE = 32

# Operands shorter than this are multiplied by plain convolution
KRONECKER_THRESHOLD = 16


def guard_bits(n: int) -> int:
    """Extra working bits for n map iterations"""
    return GUARD_BITS_PER_LEVEL * n + GUARD_BITS_BASE


@lru_cache(maxsize=None)
def working_context(bits: int):
    """
    Independent mpmath context fixed at the given precision

    Contexts are never re-configured after creation, so sharing one
    between threads is safe.
    """
    ctx = mpmath.mp.clone()
    ctx.prec = bits
    return ctx


def to_mpf(ctx, value):
    """Convert an exact rational or numeric value into ctx"""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return ctx.mpf(value.numerator)
        return ctx.fdiv(value.numerator, value.denominator)
    if isinstance(value, BigReal):
        return ctx.mpf(value.value)
    return ctx.mpf(value)


# =============================================================================
#  Value types
# =============================================================================

@dataclass(frozen=True)
class BigReal:
    """Arbitrary-precision real value tagged with its precision in bits"""

    value: Any
    precision: int

    def __post_init__(self):
        check_precision(self.precision, MIN_PRECISION)

    @classmethod
    def from_value(cls, x: Union[str, int, float, Fraction, 'BigReal'], precision: int) -> 'BigReal':
        """
        Round x to the given precision

        Strings are parsed as exact rationals ("1/10", "0.1", "-3") before
        rounding, so "0.1" means one tenth rather than the nearest double.
        """
        check_precision(precision, MIN_PRECISION)
        ctx = working_context(precision)
        if isinstance(x, str):
            x = parse_rational(x)
        return cls(to_mpf(ctx, x), precision)

    def with_precision(self, precision: int) -> 'BigReal':
        return BigReal(working_context(precision).mpf(self.value), precision)

    @property
    def digits(self) -> int:
        return decimal_digits(self.precision)

    def to_decimal_string(self, digits: Optional[int] = None) -> str:
        """Deterministic decimal rendering with a digit count derived from precision"""
        ctx = working_context(self.precision)
        return ctx.nstr(self.value, digits or self.digits, strip_zeros=False,
                        min_fixed=-4, max_fixed=self.digits + 2)

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return self.to_decimal_string()


class Family(Enum):
    L = 'L'
    M = 'M'


@dataclass(frozen=True)
class MapParams:
    """Selects L_n (a fixed to 1/2) or the M^a_n map"""

    family: Family = Family.L
    a: Fraction = Fraction(1, 2)

    def __post_init__(self):
        family = Family(self.family)
        a = Fraction(self.a)
        if a <= 0:
            raise DomainError(f"parameter a must be positive, got {format_rational(a)}")
        if family is Family.L and a != Fraction(1, 2):
            raise DomainError("family L fixes a = 1/2; use family M for other values")
        object.__setattr__(self, 'family', family)
        object.__setattr__(self, 'a', a)

    @classmethod
    def lucas(cls) -> 'MapParams':
        return cls(Family.L)

    @classmethod
    def general(cls, a: Union[str, int, Fraction]) -> 'MapParams':
        return cls(Family.M, parse_rational(a))

    @classmethod
    def from_args(cls, family: str, a: Optional[Union[str, Fraction]] = None) -> 'MapParams':
        """Build from CLI-style arguments ("L" / "M", optional a)"""
        try:
            fam = Family(str(family).upper())
        except ValueError:
            raise DomainError(f"unknown family {family!r}; expected L or M")
        if fam is Family.L:
            if a is not None and parse_rational(a) != Fraction(1, 2):
                raise DomainError("family L does not take a parameter a")
            return cls.lucas()
        if a is None:
            raise DomainError("family M requires a parameter a")
        return cls.general(a)

    @property
    def lead(self) -> Fraction:
        """Factor 2a in front of the square"""
        return 2 * self.a

    @property
    def constant(self) -> Fraction:
        """Subtracted constant 1/a (also the fixed-point / extreme value)"""
        return 1 / self.a

    @property
    def derivative_factor(self) -> Fraction:
        """Per-level factor 4a of the derivative product"""
        return 4 * self.a

    @property
    def zero_scale(self) -> Fraction:
        """Zeros of M^a_n are the zeros of L_n times 1/(2a)"""
        return 1 / (2 * self.a)

    @property
    def label(self) -> str:
        if self.family is Family.L:
            return 'L'
        return f"M[a={format_rational(self.a)}]"


# =============================================================================
#  Exact polynomials
# =============================================================================

def _as_fraction(c) -> Fraction:
    return c if type(c) is Fraction else Fraction(c)


def _common_denominator(coeffs: Sequence[Fraction]) -> int:
    den = 1
    for c in coeffs:
        d = c.denominator
        if d != 1:
            den = den * d // gcd(den, d)
    return den


def _schoolbook(a: Sequence, b: Sequence) -> List:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _pack(values: Sequence[int], slot_hex: int, half: int) -> Any:
    """Pack signed integers into one mpz, base 2^(4*slot_hex), least significant first"""
    fmt = f'0{slot_hex}x'
    biased = ''.join(format(v + half, fmt) for v in reversed(values))
    offset = ('8' + '0' * (slot_hex - 1)) * len(values)
    return gmpy2.mpz(biased, 16) - gmpy2.mpz(offset, 16)


def _unpack(packed: Any, count: int, slot_hex: int, half: int) -> List[int]:
    offset = ('8' + '0' * (slot_hex - 1)) * count
    digits = (packed + gmpy2.mpz(offset, 16)).digits(16).rjust(count * slot_hex, '0')
    total = len(digits)
    return [
        int(digits[total - (k + 1) * slot_hex: total - k * slot_hex], 16) - half
        for k in range(count)
    ]


def _kronecker(a: Sequence[int], b: Sequence[int]) -> List[int]:
    """
    Integer polynomial product by Kronecker substitution

    Both operands are packed into big integers with slots wide enough for
    every product coefficient, multiplied once, and unpacked.
    """
    bound = max(abs(v) for v in a) * max(abs(v) for v in b) * min(len(a), len(b))
    if bound == 0:
        return [0] * (len(a) + len(b) - 1)
    slot_bits = bound.bit_length() + 2
    slot_hex = (slot_bits + 3) // 4
    half = 1 << (4 * slot_hex - 1)

    pa = _pack(a, slot_hex, half)
    pb = pa if a is b else _pack(b, slot_hex, half)
    return _unpack(pa * pb, len(a) + len(b) - 1, slot_hex, half)


def _multiply(a: Tuple[Fraction, ...], b: Tuple[Fraction, ...]) -> List[Fraction]:
    if not a or not b:
        return []
    if min(len(a), len(b)) <= KRONECKER_THRESHOLD:
        return _schoolbook(a, b)

    da = _common_denominator(a)
    db = da if a is b else _common_denominator(b)
    na = [c.numerator * (da // c.denominator) for c in a]
    nb = na if a is b else [c.numerator * (db // c.denominator) for c in b]
    product = _kronecker(na, nb)

    den = da * db
    if den == 1:
        return [Fraction(c) for c in product]
    return [Fraction(c, den) for c in product]


@dataclass(frozen=True)
class ExactPoly:
    """
    Dense univariate polynomial with exact rational coefficients

    coeffs[i] is the coefficient of x^i. Trailing zeros are stripped, so the
    zero polynomial has an empty coefficient tuple and degree None.
    """

    coeffs: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        coeffs = [_as_fraction(c) for c in self.coeffs]
        end = len(coeffs)
        while end and coeffs[end - 1] == 0:
            end -= 1
        object.__setattr__(self, 'coeffs', tuple(coeffs[:end]))

    @classmethod
    def x(cls) -> 'ExactPoly':
        return cls((0, 1))

    @classmethod
    def constant(cls, c) -> 'ExactPoly':
        return cls((c,))

    @property
    def degree(self) -> Optional[int]:
        return len(self.coeffs) - 1 if self.coeffs else None

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def coefficient(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def is_even(self) -> bool:
        """True when every odd-index coefficient vanishes"""
        return all(c == 0 for c in self.coeffs[1::2])

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def __add__(self, other: 'ExactPoly') -> 'ExactPoly':
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return ExactPoly(tuple(a[i] + b[i] for i in range(len(b))) + a[len(b):])

    def __neg__(self) -> 'ExactPoly':
        return ExactPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: 'ExactPoly') -> 'ExactPoly':
        return self + (-other)

    def __mul__(self, other) -> 'ExactPoly':
        if isinstance(other, ExactPoly):
            return ExactPoly(tuple(_multiply(self.coeffs, other.coeffs)))
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, factor) -> 'ExactPoly':
        factor = _as_fraction(factor)
        if factor == 1:
            return self
        return ExactPoly(tuple(c * factor for c in self.coeffs))

    def square(self) -> 'ExactPoly':
        return ExactPoly(tuple(_multiply(self.coeffs, self.coeffs)))

    def compose(self, inner: 'ExactPoly') -> 'ExactPoly':
        """self(inner(x)) by Horner's scheme"""
        result = ExactPoly()
        for c in reversed(self.coeffs):
            result = result * inner + ExactPoly.constant(c)
        return result

    def __call__(self, x):
        return eval_poly(self, x)

    def to_strings(self) -> List[str]:
        return [format_rational(c) for c in self.coeffs]

    def __str__(self) -> str:
        if self.is_zero:
            return '0'
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = '-' if c < 0 else '+'
            mag = abs(c)
            body = '' if (mag == 1 and i > 0) else format_rational(mag)
            if i == 1:
                body += 'x'
            elif i > 1:
                body += f'x^{i}'
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        head = ('-' if first_sign == '-' else '') + first_body
        return ''.join([head] + [f' {sign} {body}' for sign, body in terms[1:]])


# =============================================================================
#  Construction and evaluation
# =============================================================================

def _resolve_cap(max_n: Optional[int]) -> int:
    return default_max_n() if max_n is None else max_n


@lru_cache(maxsize=64)
def _build_cached(params: MapParams, n: int) -> ExactPoly:
    if n == 0:
        return ExactPoly.x()
    prev = _build_cached(params, n - 1)
    poly = prev.square().scale(params.lead) - ExactPoly.constant(params.constant)
    if n >= 10:
        logger.debug(f"Expanded {params.label}_{n}: degree {poly.degree}")
    return poly


def build_poly(params: MapParams, n: int, max_n: Optional[int] = None) -> ExactPoly:
    """
    Exact expansion of L_n or M^a_n

    Args:
        params: Map selector
        n: Level, degree of the result is 2^n
        max_n: Degree cap override (configured limit otherwise)

    Raises:
        SizeLimitError: n above the cap
    """
    check_level(n, 0)
    check_cap(n, _resolve_cap(max_n), f"build_poly({params.label})")
    return _build_cached(params, n)


def eval_poly(p: ExactPoly, x) -> Fraction:
    """Exact Horner evaluation at a rational point"""
    x = _as_fraction(x)
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def eval_poly_real(p: ExactPoly, x: BigReal) -> BigReal:
    """
    Numeric evaluation of an exact polynomial

    Working precision is raised by the magnitude of sum |c_i| |x|^i so the
    cancellation between large alternating coefficients is absorbed.
    """
    if p.is_zero:
        return BigReal(working_context(x.precision).mpf(0), x.precision)

    rough = working_context(MIN_PRECISION)
    xm = abs(rough.mpf(x.value))
    bound = rough.polyval([rough.mpf(abs(c.numerator)) / c.denominator for c in reversed(p.coeffs)], xm)
    extra = max(0, int(rough.mag(bound))) if bound else 0

    ctx = working_context(x.precision + extra + GUARD_BITS_BASE)
    value = ctx.polyval([to_mpf(ctx, c) for c in reversed(p.coeffs)], ctx.mpf(x.value))
    return BigReal(working_context(x.precision).mpf(value), x.precision)


def eval_map(params: MapParams, n: int, x: BigReal) -> BigReal:
    """
    n iterations of the map starting at x, without expansion

    Carried at x.precision + guard_bits(n), returned at x.precision.
    No degree cap applies.
    """
    check_level(n, 0)
    ctx = working_context(x.precision + guard_bits(n))
    lead = to_mpf(ctx, params.lead)
    const = to_mpf(ctx, params.constant)

    v = ctx.mpf(x.value)
    for _ in range(n):
        v = lead * v * v - const
    return BigReal(working_context(x.precision).mpf(v), x.precision)


def eval_map_exact(params: MapParams, n: int, x) -> Fraction:
    """n map iterations in exact rational arithmetic"""
    check_level(n, 0)
    v = _as_fraction(x)
    for _ in range(n):
        v = params.lead * v * v - params.constant
    return v


def eval_map_derivatives(params: MapParams, n: int, x: BigReal) -> Tuple[BigReal, BigReal, BigReal]:
    """
    Value, first and second derivative of the n-th iterate at x

    Forward recurrences: M' = 4a M M',  M'' = 4a (M'^2 + M M'').
    """
    check_level(n, 0)
    ctx = working_context(x.precision + guard_bits(n))
    lead = to_mpf(ctx, params.lead)
    const = to_mpf(ctx, params.constant)
    four_a = to_mpf(ctx, params.derivative_factor)

    v, d1, d2 = ctx.mpf(x.value), ctx.mpf(1), ctx.mpf(0)
    for _ in range(n):
        v, d1, d2 = lead * v * v - const, four_a * v * d1, four_a * (d1 * d1 + v * d2)

    out = working_context(x.precision)
    return tuple(BigReal(out.mpf(t), x.precision) for t in (v, d1, d2))


def derivative(p: ExactPoly) -> ExactPoly:
    """Formal derivative"""
    return ExactPoly(tuple(i * c for i, c in enumerate(p.coeffs))[1:])


def derivative_product(params: MapParams, n: int, max_n: Optional[int] = None) -> ExactPoly:
    """
    (4a)^n x prod_{i=1}^{n-1} M_i(x), expanded

    Equals derivative(build_poly(params, n)); for L the factor is 2^n.
    """
    check_level(n, 2)
    check_cap(n, _resolve_cap(max_n), f"derivative_product({params.label})")

    product = ExactPoly.x().scale(params.derivative_factor ** n)
    for i in range(1, n):
        product = product * _build_cached(params, i)
    return product


def leading_coefficient(params: MapParams, n: int) -> Fraction:
    """Closed form (2a)^(2^n - 1) of the leading coefficient"""
    check_level(n, 0)
    return params.lead ** (2 ** n - 1)


def special_values(params: MapParams, n: int) -> Dict[str, Optional[Fraction]]:
    """
    Exact values of the n-th iterate at its distinguished points

    Points are 0, +-1/a (the endpoints +-2 for L) and +-sqrt(2)/(2a)
    (+-sqrt(2) for L). The latter is irrational, so its level-0 value is
    reported as None; from level 1 on the iterate is the exact sequence
    0, -1/a, 1/a, 1/a, ...
    """
    check_level(n, 0)
    values = {
        '0': eval_map_exact(params, n, 0),
        '1/a': eval_map_exact(params, n, params.constant),
        '-1/a': eval_map_exact(params, n, -params.constant),
    }
    if n == 0:
        radical_value = None
    else:
        radical_value = eval_map_exact(params, n - 1, 0)
    values['sqrt2/(2a)'] = radical_value
    values['-sqrt2/(2a)'] = radical_value
    return values


# =============================================================================
#  Integer Lucas-Lehmer sequence and Mersenne test
# =============================================================================

def ll_integer_sequence(count: int, max_n: Optional[int] = None) -> List[int]:
    """
    s_1 = 4, s_{k+1} = s_k^2 - 2, so s_k = L_k(sqrt 6)

    Returns the first count terms. Term k has about 2^k bits, so count is
    held to the same cap as the expansion level.

    Raises:
        SizeLimitError: count above the cap
    """
    check_level(count, 1, 'count')
    check_cap(count, _resolve_cap(max_n), 'll_integer_sequence')
    s = 4
    terms = [s]
    for _ in range(count - 1):
        s = s * s - 2
        terms.append(s)
    return terms


def is_prime_trial(p: int) -> bool:
    """Primality by trial division (exponents are small)"""
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    for d in range(3, isqrt(p) + 1, 2):
        if p % d == 0:
            return False
    return True


def _reduce_mersenne(x, p: int, m):
    """x mod 2^p - 1 for x >= 0 using shifts and masks"""
    while x > m:
        x = (x & m) + (x >> p)
    return 0 if x == m else x


def mersenne_test(p: int) -> bool:
    """
    Lucas-Lehmer test: True iff 2^p - 1 is prime

    s_0 = 4, s_{k+1} = s_k^2 - 2 mod 2^p - 1, prime iff s_{p-2} == 0.
    p = 2 (where the congruence is not defined) reports the prime 3.

    Raises:
        DomainError: p is not prime
    """
    check_level(p, 2, 'p')
    if not is_prime_trial(p):
        raise DomainError(f"mersenne_test requires a prime exponent, got p={p}")
    if p == 2:
        return True

    m = gmpy2.mpz((1 << p) - 1)
    s = gmpy2.mpz(4)
    for _ in range(p - 2):
        s = _reduce_mersenne(s * s + m - 2, p, m)
    logger.debug(f"Lucas-Lehmer residue for p={p}: {s}")
    return s == 0
