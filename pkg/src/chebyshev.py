"""
Chebyshev Bridge
Chebyshev polynomials of both kinds and exact verification of the identities
linking them to L_n and M^a_n through the shift t = 2a^2 x^2 - 1:

    M_n(x)              = (1/a) T_{2^(n-1)}(t)
    prod_{i<=n} M_i(x)  = (1/(2a))^n U_{2^n - 1}(t)

(for L, a = 1/2 and t = x^2/2 - 1).
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Tuple

from config_manager import default_max_n
from polycore import (
    BigReal,
    ExactPoly,
    MapParams,
    build_poly,
    eval_map,
    eval_poly,
    guard_bits,
    working_context,
)
from utils.validators import DomainError, check_cap, check_level, check_precision


logger = logging.getLogger(__name__)


class ChebKind(Enum):
    FIRST = 'first'
    SECOND = 'second'


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of an exact coefficient comparison"""

    identity: str
    family: str
    n: int
    holds: bool
    first_mismatch: Optional[int] = None
    lhs_degree: Optional[int] = None
    rhs_degree: Optional[int] = None

    def __bool__(self) -> bool:
        return self.holds

    def describe(self) -> str:
        if self.holds:
            return f"{self.identity} {self.family} n={self.n}: ok (degree {self.lhs_degree})"
        return (f"{self.identity} {self.family} n={self.n}: FAILED at coefficient "
                f"x^{self.first_mismatch} (degrees {self.lhs_degree} vs {self.rhs_degree})")


def _degree_cap(max_n: Optional[int]) -> int:
    return 2 ** (default_max_n() if max_n is None else max_n)


@lru_cache(maxsize=128)
def _cheb_cached(kind: ChebKind, n: int) -> ExactPoly:
    prev2 = ExactPoly.constant(1)
    if n == 0:
        return prev2
    prev = ExactPoly.x() if kind is ChebKind.FIRST else ExactPoly((0, 2))
    two_x = ExactPoly((0, 2))
    for _ in range(2, n + 1):
        prev, prev2 = two_x * prev - prev2, prev
    return prev


def cheb_poly(kind: ChebKind, n: int, max_n: Optional[int] = None) -> ExactPoly:
    """
    T_n or U_n with exact integer coefficients

    Raises:
        SizeLimitError: n above the degree cap 2^max_n
    """
    check_level(n, 0)
    check_cap(n, _degree_cap(max_n), f"cheb_poly({kind.value})")
    return _cheb_cached(ChebKind(kind), n)


def shift_poly(family: MapParams) -> ExactPoly:
    """t(x) = 2a^2 x^2 - 1"""
    return ExactPoly((-1, 0, 2 * family.a ** 2))


def compose_shift(p: ExactPoly, family: MapParams, max_n: Optional[int] = None) -> ExactPoly:
    """
    p(t(x)) with t = 2a^2 x^2 - 1, expanded exactly

    The cap applies to the degree of p, not to the composed degree 2 deg p,
    so U_{2^n - 1}(t) can still be checked at n equal to the cap.

    Raises:
        SizeLimitError: degree of p above the degree cap
    """
    if p.degree is not None:
        check_cap(p.degree, _degree_cap(max_n), 'compose_shift degree')
    return p.compose(shift_poly(family))


def compare_polys(lhs: ExactPoly, rhs: ExactPoly, identity: str = 'identity',
                  family: str = '', n: int = 0) -> IdentityReport:
    """Coefficient-exact comparison reporting the first differing index"""
    length = max(len(lhs.coeffs), len(rhs.coeffs))
    mismatch = next((i for i in range(length) if lhs.coefficient(i) != rhs.coefficient(i)), None)
    return IdentityReport(
        identity=identity,
        family=family,
        n=n,
        holds=mismatch is None,
        first_mismatch=mismatch,
        lhs_degree=lhs.degree,
        rhs_degree=rhs.degree,
    )


def verify_t_identity(params: MapParams, n: int, candidate: Optional[ExactPoly] = None,
                      max_n: Optional[int] = None) -> IdentityReport:
    """
    Check M_n = (1/a) T_{2^(n-1)}(t) coefficient by coefficient

    candidate replaces build_poly(params, n) on the left-hand side.
    """
    check_level(n, 1)
    lhs = candidate if candidate is not None else build_poly(params, n, max_n)
    rhs = compose_shift(cheb_poly(ChebKind.FIRST, 2 ** (n - 1), max_n), params, max_n)
    report = compare_polys(lhs, rhs.scale(params.constant), 'T-identity', params.label, n)
    if not report.holds:
        logger.warning(report.describe())
    return report


def verify_u_identity(params: MapParams, n: int, candidate: Optional[ExactPoly] = None,
                      max_n: Optional[int] = None) -> IdentityReport:
    """
    Check prod_{i=1}^n M_i = (1/(2a))^n U_{2^n - 1}(t) coefficient by coefficient

    candidate replaces the product on the left-hand side.
    """
    check_level(n, 1)
    if candidate is not None:
        lhs = candidate
    else:
        lhs = ExactPoly.constant(1)
        for i in range(1, n + 1):
            lhs = lhs * build_poly(params, i, max_n)
    rhs = compose_shift(cheb_poly(ChebKind.SECOND, 2 ** n - 1, max_n), params, max_n)
    report = compare_polys(lhs, rhs.scale(params.zero_scale ** n), 'U-identity', params.label, n)
    if not report.holds:
        logger.warning(report.describe())
    return report


def u_endpoint(n: int, max_n: Optional[int] = None) -> Tuple[int, int]:
    """(U_n(1), U_n(-1)) = (n + 1, (-1)^n (n + 1)), by exact evaluation"""
    u = cheb_poly(ChebKind.SECOND, n, max_n)
    return int(eval_poly(u, 1)), int(eval_poly(u, -1))


def sine_quotient_check(n: int, theta: BigReal, precision: int) -> BigReal:
    """
    |prod_{i=1}^n L_i(2cos theta) - sin(2^(n+1) theta) / sin(2 theta)|

    The product is taken from map iterations, the quotient from sines.

    Raises:
        DomainError: sin(2 theta) within 2^(-precision/4) of zero
    """
    check_level(n, 1)
    check_precision(precision)
    ctx = working_context(precision + guard_bits(n))
    th = ctx.mpf(theta.value)

    denominator = ctx.sin(2 * th)
    if abs(denominator) < ctx.ldexp(1, -(precision // 4)):
        raise DomainError(f"sin(2 theta) too close to zero for theta={ctx.nstr(th, 15)}")

    x = BigReal(2 * ctx.cos(th), precision + guard_bits(n))
    params = MapParams.lucas()
    product = ctx.mpf(1)
    for i in range(1, n + 1):
        product *= eval_map(params, i, x).value
    quotient = ctx.sin(ctx.ldexp(th, n + 1)) / denominator

    return BigReal(working_context(precision).mpf(abs(product - quotient)), precision)


def pell_unit_residual(t: BigReal) -> BigReal:
    """
    |(t - sqrt(t^2 - 1)) (t + sqrt(t^2 - 1)) - 1| for |t| >= 1

    Raises:
        DomainError: |t| < 1
    """
    ctx = working_context(t.precision + 16)
    tv = ctx.mpf(t.value)
    if abs(tv) < 1:
        raise DomainError(f"pell_unit_residual needs |t| >= 1, got {ctx.nstr(tv, 15)}")
    root = ctx.sqrt(tv * tv - 1)
    residual = abs((tv - root) * (tv + root) - 1)
    return BigReal(working_context(t.precision).mpf(residual), t.precision)
