"""
Nested Radicals
Closed-form zeros of L_n as sign patterns over nested square roots of 2,
their purely symbolic ordering, and the critical-point sets of L_n.

A level-n pattern (outer, (s_1, ..., s_{n-1})) denotes

    outer * sqrt(2 + s_1 sqrt(2 + s_2 sqrt( ... 2 + s_{n-1} sqrt(2))))
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterator, List, Optional, Tuple, Union

from config_manager import default_enumeration_max_n
from polycore import BigReal, MapParams, guard_bits, to_mpf, working_context
from utils.validators import DomainError, check_cap, check_level, check_precision


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SignPattern:
    """Sign choices identifying one nested-radical zero"""

    outer: int
    inner: Tuple[int, ...] = ()

    def __post_init__(self):
        inner = tuple(self.inner)
        for s in (self.outer,) + inner:
            if s not in (1, -1):
                raise DomainError(f"sign pattern entries must be +1 or -1, got {s!r}")
        object.__setattr__(self, 'inner', inner)

    @property
    def level(self) -> int:
        return len(self.inner) + 1

    @classmethod
    def parse(cls, text: str) -> 'SignPattern':
        """Parse the compact form produced by str(), e.g. "+(-+)" or "-" """
        text = text.strip()
        if not text or text[0] not in '+-':
            raise DomainError(f"malformed sign pattern {text!r}")
        outer = 1 if text[0] == '+' else -1
        body = text[1:]
        if body:
            if not (body.startswith('(') and body.endswith(')')):
                raise DomainError(f"malformed sign pattern {text!r}")
            body = body[1:-1]
        try:
            inner = tuple({'+': 1, '-': -1}[ch] for ch in body)
        except KeyError:
            raise DomainError(f"malformed sign pattern {text!r}")
        return cls(outer, inner)

    def mirrored(self) -> 'SignPattern':
        return SignPattern(-self.outer, self.inner)

    def symbolic(self) -> str:
        """Radical notation, e.g. -sqrt(2-sqrt(2+sqrt(2)))"""
        text = 'sqrt(2)'
        for s in reversed(self.inner):
            text = f"sqrt(2{'+' if s > 0 else '-'}{text})"
        return ('-' if self.outer < 0 else '') + text

    def __str__(self) -> str:
        out = '+' if self.outer > 0 else '-'
        if not self.inner:
            return out
        return out + '(' + ''.join('+' if s > 0 else '-' for s in self.inner) + ')'


@dataclass(frozen=True)
class ScaledZero:
    """Zero of M^a_n: a level-n pattern times 1/(2a)"""

    pattern: SignPattern
    factor: Fraction

    def value(self, precision: int) -> BigReal:
        base = eval_radical(self.pattern, precision + 8)
        ctx = working_context(precision)
        return BigReal(ctx.mpf(base.value) * to_mpf(ctx, self.factor), precision)


class Extremum(Enum):
    MAX = 'max'
    MIN = 'min'


@dataclass(frozen=True)
class Origin:
    """The critical point x = 0 (not expressible as a sign pattern)"""

    def symbolic(self) -> str:
        return '0'

    def __str__(self) -> str:
        return '0'


ORIGIN = Origin()


@dataclass(frozen=True)
class CriticalPoint:
    location: Union[Origin, SignPattern]
    kind: Extremum
    value: Fraction
    # Locations of M^a_n critical points are scaled by 1/(2a)
    factor: Fraction = Fraction(1)

    def position(self, precision: int) -> BigReal:
        if isinstance(self.location, Origin):
            return BigReal(working_context(precision).mpf(0), precision)
        return ScaledZero(self.location, self.factor).value(precision)


@dataclass(frozen=True)
class CriticalPointReport:
    n: int
    params: MapParams
    zeros: Tuple[SignPattern, ...]
    critical_points: Tuple[CriticalPoint, ...]

    @property
    def maxima(self) -> List[CriticalPoint]:
        return [c for c in self.critical_points if c.kind is Extremum.MAX]

    @property
    def minima(self) -> List[CriticalPoint]:
        return [c for c in self.critical_points if c.kind is Extremum.MIN]

    @property
    def positive_count(self) -> int:
        return sum(1 for c in self.critical_points
                   if isinstance(c.location, SignPattern) and c.location.outer > 0)


# =============================================================================
#  Evaluation and ordering
# =============================================================================

def eval_radical(sp: SignPattern, precision: int) -> BigReal:
    """
    Numeric value of a sign pattern

    Raises:
        DomainError: a radicand goes negative
    """
    check_precision(precision)
    ctx = working_context(precision + guard_bits(sp.level))
    two = ctx.mpf(2)

    r = ctx.sqrt(two)
    for s in reversed(sp.inner):
        radicand = two + s * r
        if radicand < 0:
            raise DomainError(f"negative radicand while evaluating {sp}")
        r = ctx.sqrt(radicand)

    out = working_context(precision)
    return BigReal(out.mpf(sp.outer * r), precision)


def compare_symbolic(a: SignPattern, b: SignPattern) -> int:
    """
    Order two same-level patterns from their signs alone

    Scans the inner signs left to right. Differing signs decide at once
    (+ beats -); equal minus signs flip the direction of every later
    decision, since sqrt(2 - u) falls as u grows. Returns -1, 0 or 1.

    Raises:
        DomainError: patterns of different levels
    """
    if a.level != b.level:
        raise DomainError(f"cannot compare patterns of levels {a.level} and {b.level}")
    if a.outer != b.outer:
        return -1 if a.outer < b.outer else 1
    if a.outer < 0:
        return compare_symbolic(b.mirrored(), a.mirrored())

    direction = 1
    for sa, sb in zip(a.inner, b.inner):
        if sa == sb:
            if sa < 0:
                direction = -direction
            continue
        return direction if sa > sb else -direction
    return 0


symbolic_key = cmp_to_key(compare_symbolic)


def _inner_ascending(m: int, descending: bool = False) -> Iterator[Tuple[int, ...]]:
    # Reflected ordering: under a leading minus the tail order reverses
    if m == 0:
        yield ()
        return
    if descending:
        for tail in _inner_ascending(m - 1, True):
            yield (1,) + tail
        for tail in _inner_ascending(m - 1, False):
            yield (-1,) + tail
    else:
        for tail in _inner_ascending(m - 1, True):
            yield (-1,) + tail
        for tail in _inner_ascending(m - 1, False):
            yield (1,) + tail


def _check_enumeration(n: int, max_n: Optional[int], what: str):
    check_level(n, 1)
    cap = default_enumeration_max_n() if max_n is None else max_n
    check_cap(n, cap, what, 'LLPOLY_ENUM_MAX_N')


def iter_zeros(n: int, max_n: Optional[int] = None) -> Iterator[SignPattern]:
    """
    All 2^n level-n zero patterns in ascending order, streamed

    Level and cap are checked on the call, before the first pattern is drawn.
    """
    _check_enumeration(n, max_n, 'zeros')
    return _ascending_zeros(n)


def _ascending_zeros(n: int) -> Iterator[SignPattern]:
    for inner in _inner_ascending(n - 1, descending=True):
        yield SignPattern(-1, inner)
    for inner in _inner_ascending(n - 1):
        yield SignPattern(1, inner)


def zeros(n: int, max_n: Optional[int] = None) -> List[SignPattern]:
    """Sorted zeros of L_n as sign patterns (ascending by compare_symbolic)"""
    result = list(iter_zeros(n, max_n))
    if n >= 12:
        logger.debug(f"Enumerated {len(result)} zero patterns at level {n}")
    return result


def all_patterns(n: int) -> List[SignPattern]:
    """Every level-n pattern in generation (unsorted) order"""
    check_level(n, 1)
    return [SignPattern(outer, inner)
            for outer in (1, -1)
            for inner in itertools.product((1, -1), repeat=n - 1)]


def zeros_trig(n: int, precision: int, params: Optional[MapParams] = None,
               max_n: Optional[int] = None) -> List[BigReal]:
    """
    Zeros from the cosine form: 2cos((2k+1) pi / 2^(n+1)), k = 0 .. 2^n - 1

    For M^a the values are multiplied by 1/(2a). Returned in k order,
    which is descending.
    """
    _check_enumeration(n, max_n, 'zeros_trig')
    check_precision(precision)
    params = params or MapParams.lucas()

    ctx = working_context(precision + guard_bits(n))
    scale = 2 * to_mpf(ctx, params.zero_scale)
    denom = 2 ** (n + 1)
    out = working_context(precision)
    return [BigReal(out.mpf(scale * ctx.cospi(ctx.mpf(2 * k + 1) / denom)), precision)
            for k in range(2 ** n)]


def m_zeros(n: int, a, max_n: Optional[int] = None) -> List[ScaledZero]:
    """Sorted zeros of M^a_n: the L_n zero patterns scaled by 1/(2a)"""
    params = a if isinstance(a, MapParams) else MapParams.general(a)
    factor = params.zero_scale
    return [ScaledZero(sp, factor) for sp in zeros(n, max_n)]


def plus_chain(n: int, precision: int) -> BigReal:
    """All-plus nested radical with n twos; equals 2cos(pi / 2^(n+1))"""
    check_level(n, 1)
    return eval_radical(SignPattern(1, (1,) * (n - 1)), precision)


# =============================================================================
#  Critical points
# =============================================================================

def critical_points(n: int, params: Optional[MapParams] = None,
                    max_n: Optional[int] = None) -> CriticalPointReport:
    """
    Classified critical points of L_n (or M^a_n)

    M_n = {0} u Z_1 u ... u Z_{n-1}. For n >= 2 the origin and Z_1..Z_{n-2}
    are maxima with value 2 and Z_{n-1} are minima with value -2; L_1 has a
    single minimum at the origin. For M^a locations scale by 1/(2a) and the
    extreme values are +-1/a.
    """
    params = params or MapParams.lucas()
    _check_enumeration(n, max_n, 'critical_points')

    top = params.constant
    factor = params.zero_scale

    if n == 1:
        points = [CriticalPoint(ORIGIN, Extremum.MIN, -top, factor)]
    else:
        points = [CriticalPoint(ORIGIN, Extremum.MAX, top, factor)]
        for i in range(1, n):
            kind, value = (Extremum.MIN, -top) if i == n - 1 else (Extremum.MAX, top)
            points.extend(CriticalPoint(sp, kind, value, factor) for sp in iter_zeros(i))

    report = CriticalPointReport(
        n=n,
        params=params,
        zeros=tuple(iter_zeros(n, max_n)),
        critical_points=tuple(points),
    )
    logger.debug(f"critical_points({params.label}, {n}): {len(points)} points, "
                 f"{report.positive_count} positive")
    return report
